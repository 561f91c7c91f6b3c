//! Exact algebraic periodicity criterion: the characteristic cubic of the
//! pencil, the normalized √f Taylor series, and the Hankel determinant
//! ladder. Closure after N steps corresponds to H⁽¹⁾_p = 0 for N = 2p and
//! H⁽²⁾_p = 0 for N = 2p+1.
//!
//! Determinant vanishing is an exact algebraic predicate: the classifier
//! runs in rational arithmetic. The float path rescales λ by the nearest
//! root radius of f (a positive rescaling preserves every zero/nonzero
//! status) and is a heuristic for scans and sweeps; Hankel magnitudes decay
//! superexponentially in N, so its zero test compares each determinant
//! against the trend of its own parity chain rather than a fixed cutoff.

use crate::algebra::{
    hankel_h1, hankel_h2, rational_to_string, series_sqrt, Poly, PowerSeries, Rational,
};
use crate::curve::{build_pencil, rational_pencil_poly, EulerBaxterCurve, RationalCurve};
use crate::error::{Error, Result};
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

#[derive(Clone, Debug, PartialEq)]
pub struct CayleyVerdict<T> {
    pub n: u32,
    pub det: T,
    pub zero: bool,
}

/// Exact classification report.
#[derive(Clone, Debug)]
pub struct CayleyReport {
    pub f: Poly<Rational>,
    pub normalized_series: PowerSeries<Rational>,
    pub verdicts: Vec<CayleyVerdict<Rational>>,
    /// Smallest N with a vanishing determinant, i.e. the Poncelet period.
    pub period: Option<u32>,
}

impl Serialize for CayleyReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct V {
            #[serde(rename = "N")]
            n: u32,
            det: String,
            zero: bool,
        }
        let mut st = s.serialize_struct("CayleyReport", 3)?;
        let f: Vec<String> = self.f.coeffs().iter().map(rational_to_string).collect();
        st.serialize_field("f", &f)?;
        let verdicts: Vec<V> = self
            .verdicts
            .iter()
            .map(|v| V {
                n: v.n,
                det: rational_to_string(&v.det),
                zero: v.zero,
            })
            .collect();
        st.serialize_field("verdicts", &verdicts)?;
        st.serialize_field("period", &self.period)?;
        st.end()
    }
}

fn cubic_discriminant(f: &Poly<Rational>) -> Rational {
    let a = f.coeff(3);
    let b = f.coeff(2);
    let c = f.coeff(1);
    let d = f.coeff(0);
    let r18 = Rational::from_integer(18.into());
    let r4 = Rational::from_integer(4.into());
    let r27 = Rational::from_integer(27.into());
    r18 * &a * &b * &c * &d - r4.clone() * b.clone() * b.clone() * b.clone() * &d
        + b.clone() * &b * c.clone() * &c
        - r4 * &a * c.clone() * c.clone() * &c
        - r27 * a.clone() * &a * d.clone() * &d
}

fn degeneracy_gate(f: &Poly<Rational>) -> Result<()> {
    if f.degree() != Some(3) {
        return Err(Error::Degenerate(format!(
            "pencil cubic has degree {:?}, criterion needs a nondegenerate cubic",
            f.degree()
        )));
    }
    if cubic_discriminant(f).is_zero() {
        return Err(Error::Degenerate(
            "repeated pencil root: degenerate pencil, criterion inapplicable".into(),
        ));
    }
    Ok(())
}

/// Truncation order serving the largest requested determinant.
fn truncation_order(nmax: u32) -> usize {
    2 * (nmax as usize / 2) + 1
}

/// Exact Hankel ladder for rational curve parameters, N = 3..nmax.
/// The smallest vanishing verdict is the Poncelet period.
pub fn cayley_classify(c: &RationalCurve, nmax: u32) -> Result<CayleyReport> {
    if nmax < 3 {
        return Err(Error::Domain("nmax must be at least 3".into()));
    }
    let f = rational_pencil_poly(c);
    degeneracy_gate(&f)?;
    let f0 = f.coeff(0);
    debug_assert!(!f0.is_zero());
    let g_coeffs: Vec<Rational> = f.coeffs().iter().map(|v| v / &f0).collect();
    let order = truncation_order(nmax);
    let g = PowerSeries::from_poly_coeffs(&g_coeffs, order);
    let series = series_sqrt(&g, order)?;
    let mut verdicts = Vec::with_capacity(nmax as usize - 2);
    let mut period = None;
    for n in 3..=nmax {
        let det = if n % 2 == 0 {
            hankel_h1(&series, n as usize / 2)?
        } else {
            hankel_h2(&series, (n as usize - 1) / 2)?
        };
        let zero = det.is_zero();
        if zero && period.is_none() {
            period = Some(n);
        }
        verdicts.push(CayleyVerdict { n, det, zero });
    }
    Ok(CayleyReport {
        f,
        normalized_series: series,
        verdicts,
        period,
    })
}

/// Magnitudes of the roots of a polynomial by Durand–Kerner iteration.
fn root_magnitudes(p: &Poly<f64>) -> Result<Vec<f64>> {
    let deg = p
        .degree()
        .ok_or_else(|| Error::Degenerate("zero polynomial".into()))?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = *p.leading().unwrap();
    let monic: Vec<f64> = p.coeffs().iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic.iter().take(deg).map(|c| c.abs()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|i| seed.powu(i as u32 + 1) * radius)
        .collect();
    let eval = |z: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    for _ in 0..200 {
        let mut max_change: f64 = 0.0;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() < 1e-300 {
                continue;
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            max_change = max_change.max(delta.norm());
        }
        if max_change < 1e-14 * radius {
            break;
        }
    }
    Ok(roots.iter().map(|z| z.norm()).collect())
}

/// Float ladder after the λ → ρλ rescaling, ρ = min |root of f|.
#[derive(Clone, Debug, Serialize)]
pub struct CayleyFloatReport {
    pub rho: f64,
    pub verdicts: Vec<CayleyVerdict<f64>>,
    pub period: Option<u32>,
}

impl Serialize for CayleyVerdict<f64> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CayleyVerdict", 3)?;
        st.serialize_field("N", &self.n)?;
        st.serialize_field("det", &self.det)?;
        st.serialize_field("zero", &self.zero)?;
        st.end()
    }
}

/// Rescaled float determinants for N = 3..nmax (no zero classification).
pub fn cayley_ladder_float(c: &EulerBaxterCurve, nmax: u32) -> Result<(f64, Vec<(u32, f64)>)> {
    let pencil = build_pencil(c)?;
    let f = pencil.f;
    if f.degree() != Some(3) {
        return Err(Error::Degenerate("pencil cubic degenerated".into()));
    }
    let f0 = f.coeff(0);
    let g: Vec<f64> = f.coeffs().iter().map(|v| v / f0).collect();
    let mags = root_magnitudes(&Poly::new(g.clone()))?;
    let rho = mags.iter().cloned().fold(f64::INFINITY, f64::min);
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::Numeric("could not locate pencil roots".into()));
    }
    let gs: Vec<f64> = g.iter().enumerate().map(|(j, v)| v * rho.powi(j as i32)).collect();
    let order = truncation_order(nmax);
    let series = series_sqrt(&PowerSeries::from_poly_coeffs(&gs, order), order)?;
    let mut out = Vec::new();
    for n in 3..=nmax {
        let det = if n % 2 == 0 {
            hankel_h1(&series, n as usize / 2)?
        } else {
            hankel_h2(&series, (n as usize - 1) / 2)?
        };
        out.push((n, det));
    }
    Ok((rho, out))
}

/// The single rescaled determinant designated for closure at N.
pub fn designated_hankel_float(c: &EulerBaxterCurve, n: u32) -> Result<f64> {
    let (_, ladder) = cayley_ladder_float(c, n)?;
    Ok(ladder.last().unwrap().1)
}

/// Heuristic float classification: a determinant counts as zero when it
/// falls at least `gap_tol` below the decay trend extrapolated from the
/// previous nonzero entries of its own parity chain.
pub fn cayley_classify_float(
    c: &EulerBaxterCurve,
    nmax: u32,
    gap_tol: f64,
) -> Result<CayleyFloatReport> {
    let (rho, ladder) = cayley_ladder_float(c, nmax)?;
    let mut verdicts: Vec<CayleyVerdict<f64>> = Vec::with_capacity(ladder.len());
    let mut period = None;
    for &(n, det) in &ladder {
        let chain: Vec<f64> = verdicts
            .iter()
            .filter(|v| v.n % 2 == n % 2 && !v.zero && v.det != 0.0)
            .map(|v| v.det.abs())
            .collect();
        let trend = match chain.len() {
            0 => 1.0,
            1 => chain[0] * 1e-2,
            _ => {
                let v1 = chain[chain.len() - 1];
                let v2 = chain[chain.len() - 2];
                (v1 * (v1 / v2)).max(1e-290)
            }
        };
        let zero = det.abs() < gap_tol * trend;
        if zero && period.is_none() {
            period = Some(n);
        }
        verdicts.push(CayleyVerdict { n, det, zero });
    }
    Ok(CayleyFloatReport {
        rho,
        verdicts,
        period,
    })
}

pub const FLOAT_GAP_TOL: f64 = 1e-6;

/// Bracketing scan for curves of target closure N: walks the (a,b) grid,
/// brackets sign changes of the designated determinant along a, and
/// bisects each bracket down to `refine_width`.
pub fn cayley_zero_set_scan(
    a_range: (f64, f64, f64),
    b_range: (f64, f64, f64),
    n: u32,
    refine_width: f64,
) -> Vec<EulerBaxterCurve> {
    let (a_lo, a_hi, da) = a_range;
    let (b_lo, b_hi, db) = b_range;
    let mut out = Vec::new();
    if da <= 0.0 || db <= 0.0 {
        return out;
    }
    let det_at = |a: f64, b: f64| -> Option<f64> {
        let c = EulerBaxterCurve::new(a, b);
        designated_hankel_float(&c, n).ok()
    };
    let mut b = b_lo;
    while b <= b_hi + 1e-12 {
        let mut a_prev = a_lo;
        let mut d_prev = det_at(a_prev, b);
        let mut a = a_lo + da;
        while a <= a_hi + 1e-12 {
            let d = det_at(a, b);
            if let (Some(d0), Some(d1)) = (d_prev, d) {
                if d0 != 0.0 && d1 != 0.0 && d0.signum() != d1.signum() {
                    let (mut lo, mut hi) = (a_prev, a);
                    let mut f_lo = d0;
                    while hi - lo > refine_width {
                        let mid = 0.5 * (lo + hi);
                        match det_at(mid, b) {
                            Some(fm) if fm.signum() == f_lo.signum() => {
                                lo = mid;
                                f_lo = fm;
                            }
                            Some(_) => hi = mid,
                            None => break,
                        }
                    }
                    out.push(EulerBaxterCurve::new(0.5 * (lo + hi), b));
                }
            }
            a_prev = a;
            d_prev = d;
            a += da;
        }
        b += db;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rational_to_f64};
    use crate::elliptic::construct_periodic;
    use crate::john::{detect_period, JohnState};

    fn rc(a: (i64, i64), b: (i64, i64)) -> RationalCurve {
        RationalCurve::new(rat(a.0, a.1), rat(b.0, b.1))
    }

    #[test]
    fn example_curve_has_poncelet_period_four() {
        // a = 1 gives T² = id (John period 2), Poncelet period 4: the N=4
        // verdict is exactly zero and N=3 is not.
        let report = cayley_classify(&rc((1, 1), (-3, 1)), 10).unwrap();
        assert_eq!(report.period, Some(4));
        let v3 = &report.verdicts[0];
        assert_eq!(v3.n, 3);
        assert_eq!(v3.det, rat(3, 4));
        assert!(!v3.zero);
        let v4 = &report.verdicts[1];
        assert!(v4.zero);
        // multiples of the period vanish as well
        let v8 = report.verdicts.iter().find(|v| v.n == 8).unwrap();
        assert!(v8.zero);
    }

    #[test]
    fn rational_period_three_family() {
        // b = (a²−1)/(2a) makes c₂ vanish exactly; a = 1/4 keeps the curve
        // in the bounded class.
        let report = cayley_classify(&rc((1, 4), (-15, 8)), 12).unwrap();
        assert_eq!(report.period, Some(3));
        let zeros: Vec<u32> = report
            .verdicts
            .iter()
            .filter(|v| v.zero)
            .map(|v| v.n)
            .collect();
        assert_eq!(zeros, vec![3, 6, 9, 12]);
        // cross-check against the orbit
        let c = rc((1, 4), (-15, 8)).to_float();
        let p = crate::elliptic::fit_params(&c).unwrap();
        let seed = p.john_seed(0.29).unwrap();
        assert_eq!(
            detect_period(&c, &seed, 32, 1e-8).unwrap().period(),
            Some(3)
        );
    }

    #[test]
    fn generic_rational_curve_all_nonzero() {
        let report = cayley_classify(&rc((1, 3), (-5, 2)), 16).unwrap();
        assert_eq!(report.period, None);
        assert!(report.verdicts.iter().all(|v| !v.zero));
    }

    #[test]
    fn degenerate_pencil_flagged() {
        // b − a = ±1 collapses the quadratic factor: repeated root at work.
        // a=1, b=2 gives c=1: f = -a(1-c²)λ³ + ... degree drops to 2.
        let err = cayley_classify(&rc((1, 1), (2, 1)), 8).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn scale_invariance_of_zero_status() {
        // Scaling f by s rescales each determinant but never its zero
        // status; the normalized series g = f/f(0) is literally invariant.
        let c = rc((1, 1), (-3, 1));
        let f = rational_pencil_poly(&c);
        let s = rat(7, 3);
        let scaled = f.scale(&s);
        let f0 = f.coeff(0);
        let sf0 = scaled.coeff(0);
        for i in 0..=3 {
            assert_eq!(f.coeff(i) / &f0, scaled.coeff(i) / &sf0);
        }
    }

    #[test]
    fn float_ladder_designated_small_on_constructed() {
        for (k, m, n, np) in [(0.6, 1, 5, 10u32), (0.5, 2, 3, 3), (0.7, 1, 4, 8)] {
            let cc = construct_periodic(k, m, n).unwrap();
            let det = designated_hankel_float(&cc.curve, np).unwrap();
            assert!(det.abs() < 1e-8, "NP={np}: {det:.3e}");
        }
    }

    #[test]
    fn float_classifier_finds_constructed_periods() {
        for (k, m, n, np) in [(0.6, 1, 5, 10u32), (0.5, 2, 3, 3), (0.7, 1, 4, 8), (0.62, 2, 7, 7)] {
            let cc = construct_periodic(k, m, n).unwrap();
            let report = cayley_classify_float(&cc.curve, 16, FLOAT_GAP_TOL).unwrap();
            assert_eq!(report.period, Some(np), "k={k} m={m} n={n}");
        }
    }

    #[test]
    fn float_classifier_open_on_generic() {
        for (a, b) in [(1.37, -3.21), (0.8, 2.9), (2.1, -4.6)] {
            let report =
                cayley_classify_float(&EulerBaxterCurve::new(a, b), 16, FLOAT_GAP_TOL).unwrap();
            assert_eq!(report.period, None, "(a,b)=({a},{b})");
        }
    }

    #[test]
    fn float_agrees_with_exact_on_comfortable_magnitudes() {
        let cases = [rc((1, 1), (-3, 1)), rc((1, 4), (-15, 8)), rc((1, 3), (-5, 2))];
        for c in cases {
            let exact = cayley_classify(&c, 12).unwrap();
            let float = cayley_classify_float(&c.to_float(), 12, FLOAT_GAP_TOL).unwrap();
            for (ve, vf) in exact.verdicts.iter().zip(&float.verdicts) {
                if vf.det.abs() > 1e-12 {
                    assert_eq!(ve.zero, vf.zero, "N={}", ve.n);
                }
                let _ = rational_to_f64(&ve.det);
            }
        }
    }

    #[test]
    fn scan_brackets_period_three_curves() {
        // The rational period-3 family b = (a²−1)/(2a) crosses this window.
        let found = cayley_zero_set_scan((0.2, 0.3, 0.02), (-2.4, -1.6, 0.2), 3, 1e-12);
        assert!(!found.is_empty());
        for c in &found {
            let expected_b = (c.a * c.a - 1.0) / (2.0 * c.a);
            assert!(
                (c.b - expected_b).abs() < 1e-6,
                "bracketed ({}, {}) expected b {}",
                c.a,
                c.b,
                expected_b
            );
            // orbit oracle
            let p = crate::elliptic::fit_params(c).unwrap();
            let seed = p.john_seed(0.3).unwrap();
            let verdict = detect_period(c, &seed, 64, 1e-6).unwrap();
            assert_eq!(verdict.period(), Some(3));
        }
        let _ = JohnState::new(0.0, 0.0);
    }

    #[test]
    fn scan_empty_and_single_point_grids() {
        assert!(cayley_zero_set_scan((1.0, 0.0, 0.1), (0.0, 1.0, 0.1), 3, 1e-10).is_empty());
        assert!(cayley_zero_set_scan((1.0, 1.0, 1.0), (-3.0, -3.0, 1.0), 3, 1e-10).is_empty());
    }

    #[test]
    fn report_serialization_shape() {
        let report = cayley_classify(&rc((1, 1), (-3, 1)), 6).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert!(json["f"].as_array().unwrap().iter().all(|v| v.is_string()));
        assert_eq!(json["verdicts"][0]["N"], 3);
        assert_eq!(json["verdicts"][0]["det"], "3/4");
        assert_eq!(json["verdicts"][1]["zero"], true);
    }

    #[test]
    fn truncation_order_serves_largest_determinant() {
        assert_eq!(truncation_order(16), 17);
        assert_eq!(truncation_order(15), 15);
        // order 15 covers H2 at p=7 (needs c_14) and H1 at p=7 (needs c_13)
    }
}
