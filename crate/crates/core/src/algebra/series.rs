use crate::error::{Error, Result};
use num_traits::Num;
use std::ops::Neg;

/// Truncated power series c₀..c_T (T+1 stored coefficients).
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries<T> {
    coeffs: Vec<T>,
}

impl<T> PowerSeries<T>
where
    T: Clone + Num + Neg<Output = T>,
{
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a power series stores at least c0");
        PowerSeries { coeffs }
    }

    pub fn from_poly_coeffs(coeffs: &[T], order: usize) -> Self {
        let mut v: Vec<T> = coeffs.to_vec();
        v.resize(order + 1, T::zero());
        v.truncate(order + 1);
        PowerSeries { coeffs: v }
    }

    /// Truncation order T (highest stored index).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Truncated product, kept to `order`.
    pub fn mul(&self, other: &Self, order: usize) -> Self {
        let mut out = vec![T::zero(); order + 1];
        for i in 0..=order.min(self.order()) {
            for j in 0..=(order - i).min(other.order()) {
                out[i + j] = out[i + j].clone() + self.coeff(i) * other.coeff(j);
            }
        }
        PowerSeries { coeffs: out }
    }
}

/// Square root of a series with constant term exactly 1, to order T.
///
/// Recurrence: c₀ = 1, cₙ = (gₙ − Σ_{i=1}^{n−1} cᵢ c_{n−i}) / 2.
pub fn series_sqrt<T>(g: &PowerSeries<T>, order: usize) -> Result<PowerSeries<T>>
where
    T: Clone + Num + Neg<Output = T>,
{
    if !g.coeff(0).is_one() {
        return Err(Error::Series(
            "series_sqrt requires constant term exactly 1".into(),
        ));
    }
    let two = T::one() + T::one();
    let mut c: Vec<T> = Vec::with_capacity(order + 1);
    c.push(T::one());
    for n in 1..=order {
        let mut acc = T::zero();
        for i in 1..n {
            acc = acc + c[i].clone() * c[n - i].clone();
        }
        c.push((g.coeff(n) - acc) / two.clone());
    }
    Ok(PowerSeries { coeffs: c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Rational};
    use num_traits::Zero;

    fn series(v: &[(i64, i64)]) -> PowerSeries<Rational> {
        PowerSeries::new(v.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn sqrt_one_plus_lambda_binomial() {
        let g = PowerSeries::from_poly_coeffs(&[rat(1, 1), rat(1, 1)], 5);
        let c = series_sqrt(&g, 5).unwrap();
        let expect = series(&[(1, 1), (1, 2), (-1, 8), (1, 16), (-5, 128), (7, 256)]);
        assert_eq!(c, expect);
    }

    #[test]
    fn sqrt_of_one_is_one() {
        let g = PowerSeries::from_poly_coeffs(&[rat(1, 1)], 7);
        let c = series_sqrt(&g, 7).unwrap();
        assert_eq!(c.coeff(0), rat(1, 1));
        for i in 1..=7 {
            assert!(c.coeff(i).is_zero());
        }
    }

    #[test]
    fn sqrt_of_perfect_square_is_linear() {
        // (1+λ/3)² = 1 + 2λ/3 + λ²/9
        let g = PowerSeries::from_poly_coeffs(&[rat(1, 1), rat(2, 3), rat(1, 9)], 4);
        let c = series_sqrt(&g, 4).unwrap();
        assert_eq!(c, series(&[(1, 1), (1, 3), (0, 1), (0, 1), (0, 1)]));
    }

    #[test]
    fn rejects_non_unit_constant_term() {
        let g = PowerSeries::from_poly_coeffs(&[rat(2, 1), rat(1, 1)], 3);
        assert!(series_sqrt(&g, 3).is_err());
    }

    #[test]
    fn square_of_sqrt_recovers_series() {
        let g = PowerSeries::from_poly_coeffs(&[rat(1, 1), rat(-3, 7), rat(5, 11), rat(2, 3)], 9);
        let c = series_sqrt(&g, 9).unwrap();
        let sq = c.mul(&c, 9);
        for i in 0..=9 {
            assert_eq!(sq.coeff(i), g.coeff(i), "mismatch at order {i}");
        }
    }

    proptest::proptest! {
        #[test]
        fn sqrt_squares_back_exactly(
            nums in proptest::collection::vec(-30i64..30, 1..8),
            dens in proptest::collection::vec(1i64..12, 1..8),
        ) {
            let mut coeffs = vec![rat(1, 1)];
            for (n, d) in nums.iter().zip(&dens) {
                coeffs.push(rat(*n, *d));
            }
            let order = coeffs.len() + 3;
            let g = PowerSeries::from_poly_coeffs(&coeffs, order);
            let c = series_sqrt(&g, order).unwrap();
            let sq = c.mul(&c, order);
            for i in 0..=order {
                proptest::prop_assert_eq!(sq.coeff(i), g.coeff(i));
            }
        }
    }
}
