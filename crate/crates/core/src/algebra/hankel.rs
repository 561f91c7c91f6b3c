use super::series::PowerSeries;
use super::Rational;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Scalars with a determinant kernel appropriate to their arithmetic.
pub trait DetScalar: Sized + Clone {
    fn det(matrix: Vec<Vec<Self>>) -> Self;
}

impl DetScalar for f64 {
    /// LU with partial pivoting.
    fn det(mut m: Vec<Vec<f64>>) -> f64 {
        let n = m.len();
        if n == 0 {
            return 1.0;
        }
        let mut det = 1.0;
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
                .unwrap();
            if m[piv][col] == 0.0 {
                return 0.0;
            }
            if piv != col {
                m.swap(piv, col);
                det = -det;
            }
            det *= m[col][col];
            for r in col + 1..n {
                let f = m[r][col] / m[col][col];
                for c in col..n {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
        det
    }
}

impl DetScalar for Rational {
    /// Clears denominators, then runs fraction-free Bareiss elimination over
    /// BigInt. Exact; avoids the coefficient blowup of naive expansion.
    fn det(m: Vec<Vec<Rational>>) -> Rational {
        let n = m.len();
        if n == 0 {
            return Rational::one();
        }
        let mut lcm = BigInt::one();
        for row in &m {
            for e in row {
                lcm = lcm.lcm(e.denom());
            }
        }
        let mut a: Vec<Vec<BigInt>> = m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| e.numer() * (&lcm / e.denom()))
                    .collect()
            })
            .collect();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(piv) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                    return Rational::zero();
                };
                a.swap(k, piv);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        let mut det = Rational::new(a[n - 1][n - 1].clone(), BigInt::one());
        if sign < 0 {
            det = -det;
        }
        let scale = Rational::new(lcm.pow(n as u32), BigInt::one());
        det / scale
    }
}

fn require_order<T>(c: &PowerSeries<T>, max_index: usize) -> Result<()>
where
    T: Clone + num_traits::Num + std::ops::Neg<Output = T>,
{
    if c.order() < max_index {
        return Err(Error::Series(format!(
            "truncation order {} too small, need coefficients through index {max_index}",
            c.order()
        )));
    }
    Ok(())
}

/// H⁽¹⁾_p: determinant of the (p−1)×(p−1) matrix with entry (i,j) = c_{3+i+j}
/// (top-left c₃, bottom-right c_{2p−1}). Tied to even closure N = 2p.
pub fn hankel_h1<T>(c: &PowerSeries<T>, p: usize) -> Result<T>
where
    T: DetScalar + Clone + num_traits::Num + std::ops::Neg<Output = T>,
{
    if p < 2 {
        return Err(Error::Domain("hankel_h1 requires p >= 2".into()));
    }
    require_order(c, 2 * p - 1)?;
    let size = p - 1;
    let m = (0..size)
        .map(|i| (0..size).map(|j| c.coeff(3 + i + j)).collect())
        .collect();
    Ok(T::det(m))
}

/// H⁽²⁾_p: determinant of the p×p matrix with entry (i,j) = c_{2+i+j}
/// (top-left c₂, bottom-right c_{2p}). Tied to odd closure N = 2p+1.
pub fn hankel_h2<T>(c: &PowerSeries<T>, p: usize) -> Result<T>
where
    T: DetScalar + Clone + num_traits::Num + std::ops::Neg<Output = T>,
{
    if p < 1 {
        return Err(Error::Domain("hankel_h2 requires p >= 1".into()));
    }
    require_order(c, 2 * p)?;
    let m = (0..p)
        .map(|i| (0..p).map(|j| c.coeff(2 + i + j)).collect())
        .collect();
    Ok(T::det(m))
}
