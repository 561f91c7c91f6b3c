//! Exact and floating-point scalar kernels: big rationals, dense univariate
//! polynomials, truncated power series, and Hankel determinants.
//!
//! Everything here is immutable after construction and all operations are
//! pure functions, so the kernels are safe to share across threads.

mod hankel;
mod poly;
mod series;

pub use hankel::{hankel_h1, hankel_h2, DetScalar};
pub use poly::Poly;
pub use series::{series_sqrt, PowerSeries};

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

/// Exact rational scalar. Numerator/denominator are arbitrary-precision and
/// kept reduced with a positive denominator by `num-rational`.
pub type Rational = BigRational;

/// Shorthand constructor from machine integers.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "p/q", "p", or a plain decimal like "-1.25" into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let digits = frac_part.len() as u32;
        let joined = format!("{int_part}{frac_part}");
        let n: BigInt = joined
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?;
        return Ok(Rational::new(n, BigInt::from(10u32).pow(digits)));
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {s:?}")))?;
    Ok(Rational::from(n))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation of `x` within `tol`, by continued-fraction
/// convergents. Denominators stay near the information-theoretic minimum
/// (~1/sqrt(tol)), which keeps downstream exact arithmetic small.
pub fn rationalize_f64(x: f64, tol: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("cannot rationalize {x}")));
    }
    let exact = Rational::from_f64(x).ok_or_else(|| Error::Domain("NaN input".into()))?;
    if tol <= 0.0 {
        return Ok(exact);
    }
    // Continued-fraction expansion of x, stopping at the first convergent
    // within tol.
    let (mut p_prev, mut q_prev) = (BigInt::from(1), BigInt::from(0));
    let mut a0 = x.floor();
    let (mut p, mut q) = (BigInt::from_f64(a0).unwrap(), BigInt::from(1));
    let mut frac = x - a0;
    for _ in 0..64 {
        let approx = Rational::new(p.clone(), q.clone());
        if (rational_to_f64(&approx) - x).abs() <= tol {
            return Ok(approx);
        }
        if frac.abs() < 1e-18 {
            break;
        }
        let inv = 1.0 / frac;
        a0 = inv.floor();
        frac = inv - a0;
        let a_big = BigInt::from_f64(a0).ok_or_else(|| Error::Numeric("cf overflow".into()))?;
        let p_next = &a_big * &p + &p_prev;
        let q_next = &a_big * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    Ok(exact)
}

/// Renders a rational as "p/q" (or "p" when the denominator is 1).
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_abs(r: &Rational) -> Rational {
    r.abs()
}
