use crate::error::{Error, Result};
use num_traits::Num;
use std::fmt;
use std::ops::Neg;

/// Dense univariate polynomial, coefficient index = degree.
///
/// The zero polynomial stores no coefficients; otherwise the leading
/// coefficient is nonzero.
#[derive(Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl<T> Poly<T> {
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }
}

impl<T> Poly<T>
where
    T: Clone + Num + Neg<Output = T>,
{
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(degree: usize, c: T) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![T::zero(); degree + 1];
        coeffs[degree] = c;
        Poly { coeffs }
    }

    /// Coefficient of λ^i (zero beyond the stored degree).
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Poly::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        Poly::new(coeffs)
    }

    pub fn neg(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().cloned().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(coeffs)
    }

    pub fn scale(&self, s: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Euclidean division: self = q·d + r with deg r < deg d.
    pub fn divrem(&self, d: &Self) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(Error::Domain("division by zero polynomial".into()));
        }
        let dd = d.degree().unwrap();
        let dl = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        while rem.len() > dd {
            let deg = rem.len() - 1;
            let c = rem[deg].clone() / dl.clone();
            quot[deg - dd] = c.clone();
            for (i, dc) in d.coeffs.iter().enumerate().take(dd) {
                rem[deg - dd + i] = rem[deg - dd + i].clone() - c.clone() * dc.clone();
            }
            // the leading term is eliminated by construction; drop it
            // explicitly so float roundoff cannot stall the division
            rem.truncate(deg);
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// λ^d · p(1/λ): coefficient reversal into degree `d`.
    /// Requires deg p ≤ d.
    pub fn reverse(&self, d: usize) -> Result<Self> {
        if let Some(deg) = self.degree() {
            if deg > d {
                return Err(Error::Domain(format!(
                    "cannot reverse degree-{deg} polynomial into degree {d}"
                )));
            }
        }
        let coeffs = (0..=d).map(|j| self.coeff(d - j)).collect();
        Ok(Poly::new(coeffs))
    }

    pub fn map<U, F>(&self, f: F) -> Poly<U>
    where
        U: Clone + Num + Neg<Output = U>,
        F: Fn(&T) -> U,
    {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Rational};

    fn p(v: &[i64]) -> Poly<Rational> {
        Poly::new(v.iter().map(|&c| rat(c, 1)).collect())
    }

    #[test]
    fn mul_and_sub_identity() {
        // (2λ²−1)² − (4λ⁴−4λ²)·1² = 1
        let a = p(&[-1, 0, 2]);
        let f = p(&[0, 0, -4, 0, 4]);
        let one = p(&[1]);
        let lhs = a.mul(&a).sub(&f.mul(&one.mul(&one)));
        assert_eq!(lhs, p(&[1]));
    }

    #[test]
    fn divrem_monomials() {
        let (q, r) = p(&[0, 0, 0, 1]).divrem(&p(&[0, 0, 1])).unwrap();
        assert_eq!(q, p(&[0, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn mul_difference_of_squares() {
        assert_eq!(p(&[1, 1]).mul(&p(&[-1, 1])), p(&[-1, 0, 1]));
    }

    #[test]
    fn divrem_reconstruction() {
        let a = p(&[3, -2, 0, 7, 1]);
        let b = p(&[-1, 4, 2]);
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < b.degree().unwrap());
    }

    #[test]
    fn divrem_by_zero_rejected() {
        assert!(p(&[1, 2]).divrem(&Poly::zero()).is_err());
    }

    #[test]
    fn reverse_round_trip() {
        let f = p(&[-4, 20, -31, 15]);
        let rev = f.reverse(4).unwrap();
        assert_eq!(rev, p(&[0, 15, -31, 20, -4]));
        assert_eq!(rev.reverse(4).unwrap(), f);
    }

    #[test]
    fn eval_horner() {
        let f = p(&[1, -3, 2]);
        assert_eq!(f.eval(&rat(2, 1)), rat(3, 1));
    }

    proptest::proptest! {
        #[test]
        fn divrem_reconstructs_exactly(
            a_coeffs in proptest::collection::vec(-9i64..9, 0..8),
            b_coeffs in proptest::collection::vec(-9i64..9, 1..5),
        ) {
            let a = p(&a_coeffs);
            let b = p(&b_coeffs);
            proptest::prop_assume!(!b.is_zero());
            let (q, r) = a.divrem(&b).unwrap();
            proptest::prop_assert_eq!(q.mul(&b).add(&r), a);
            if !r.is_zero() {
                proptest::prop_assert!(r.degree().unwrap() < b.degree().unwrap());
            }
        }

        #[test]
        fn reverse_is_involutive(coeffs in proptest::collection::vec(-9i64..9, 1..5)) {
            let f = p(&coeffs);
            proptest::prop_assume!(!f.is_zero());
            let d = 4usize;
            let rev = f.reverse(d).unwrap();
            proptest::prop_assert_eq!(rev.reverse(d).unwrap(), f);
        }
    }
}
