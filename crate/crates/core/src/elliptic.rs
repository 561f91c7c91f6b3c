//! Jacobi elliptic kernel (sn, cn, dn, complete integrals via AGM), the
//! explicit sn-parametrization of the Euler–Baxter curve, parameter fitting
//! (a,b) ↔ (k,q), inverse construction of exactly periodic curves, and the
//! lattice periodicity test qN = 2ω₁m₁ + 2ω₂m₂.
//!
//! The bounded class a > 0 is generated by a purely imaginary step
//! q = 2iβ: along the argument line Re w = K the parametrization reduces to
//! the real form xₙ = √k·nd(t₀+2βn, k′) with
//!
//!   a = cn²(β,k′) / (k·sn²(β,k′)),   b = −dn(β,k′) / (k·sn²(β,k′)),
//!
//! derived from the sn addition theorem. A real step q produces the mirror
//! family with a < 0, outside the bounded class, and is flagged as such.

use crate::curve::EulerBaxterCurve;
use crate::error::{Error, Result};
use crate::john::{detect_period, Closure, JohnState};
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

const AGM_MAX_ITER: usize = 40;
const AGM_EPS: f64 = 1e-15;

/// Arithmetic–geometric mean of (a, b), both positive.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_EPS * a.abs() {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    0.5 * (a + b)
}

/// Number of AGM iterations until convergence, for diagnostics.
pub fn agm_iterations(mut a: f64, mut b: f64) -> usize {
    for i in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_EPS * a.abs() {
            return i;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    AGM_MAX_ITER
}

/// Complete elliptic integral K(k) = π / (2·AGM(1, k′)), 0 ≤ k < 1.
pub fn complete_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!(
            "complete_k requires 0 <= k < 1, got {k} (K diverges as k -> 1)"
        )));
    }
    let kp = (1.0 - k * k).sqrt();
    Ok(std::f64::consts::PI / (2.0 * agm(1.0, kp)))
}

/// Jacobi sn, cn, dn at real argument via the descending Gauss/Landen
/// transformation chain.
pub fn jacobi_sn_cn_dn(u: f64, k: f64) -> Result<(f64, f64, f64)> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::Domain(format!("modulus {k} outside [0,1]")));
    }
    let emmc = 1.0 - k * k; // complementary parameter k'^2
    if emmc == 0.0 {
        let sech = 1.0 / u.cosh();
        return Ok((u.tanh(), sech, sech));
    }
    const CA: f64 = 1e-8; // result accuracy ~ CA^2
    let mut em = [0.0f64; 16];
    let mut en = [0.0f64; 16];
    let mut emc = emmc;
    let mut a = 1.0f64;
    let mut dn = 1.0f64;
    let mut c = 1.0f64;
    let mut l = 0;
    for i in 0..16 {
        l = i;
        em[i] = a;
        emc = emc.sqrt();
        en[i] = emc;
        c = 0.5 * (a + emc);
        if (a - emc).abs() <= CA * a {
            break;
        }
        emc *= a;
        a = c;
    }
    let arg = c * u;
    let mut sn = arg.sin();
    let mut cn = arg.cos();
    if sn != 0.0 {
        a = cn / sn;
        c *= a;
        for i in (0..=l).rev() {
            let b = em[i];
            a *= c;
            c *= dn;
            dn = (en[i] + a) / (b + a);
            a = c / b;
        }
        let amp = 1.0 / (c * c + 1.0).sqrt();
        sn = if sn >= 0.0 { amp } else { -amp };
        cn = c * sn;
    }
    Ok((sn, cn, dn))
}

/// Jacobi functions at complex argument u = x + iy, by the standard
/// real/imaginary split. The pole lattice u ≡ iK′ (mod periods) is flagged.
pub fn jacobi_sn_cn_dn_complex(
    u: Complex64,
    k: f64,
) -> Result<(Complex64, Complex64, Complex64)> {
    let kp = (1.0 - k * k).sqrt();
    let (s, c, d) = jacobi_sn_cn_dn(u.re, k)?;
    let (s1, c1, d1) = jacobi_sn_cn_dn(u.im, kp)?;
    let denom = c1 * c1 + k * k * s * s * s1 * s1;
    if denom.abs() < 1e-12 {
        return Err(Error::Numeric(format!(
            "jacobi functions overflow near the pole u = iK' (denominator {denom:.3e})"
        )));
    }
    let i = Complex64::new(0.0, 1.0);
    let sn = (Complex64::new(s * d1, 0.0) + i * (c * d * s1 * c1)) / denom;
    let cn = (Complex64::new(c * c1, 0.0) - i * (s * d * s1 * d1)) / denom;
    let dn = (Complex64::new(d * c1 * d1, 0.0) - i * (k * k * s * c * s1)) / denom;
    Ok((sn, cn, dn))
}

/// Inverse of sn on [0, K(k)] by bisection (sn is monotone there).
pub fn inv_sn(s: f64, k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("inv_sn target {s} outside [0,1]")));
    }
    let big_k = complete_k(k)?;
    let (mut lo, mut hi) = (0.0, big_k);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let (sm, _, _) = jacobi_sn_cn_dn(mid, k)?;
        if sm < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Inverse of dn on [0, K(k)] (dn decreases from 1 to k′ there).
pub fn inv_dn(d: f64, k: f64) -> Result<f64> {
    let kp = (1.0 - k * k).sqrt();
    if !(kp - 1e-12..=1.0 + 1e-12).contains(&d) {
        return Err(Error::Domain(format!(
            "inv_dn target {d} outside [k', 1] = [{kp}, 1]"
        )));
    }
    let big_k = complete_k(k)?;
    let (mut lo, mut hi) = (0.0, big_k);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let (_, _, dm) = jacobi_sn_cn_dn(mid, k)?;
        if dm > d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Axis of the step q in the argument plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepAxis {
    /// q real: xₙ = √k·sn(t₀+qn, k); generates curves with a < 0.
    Real,
    /// q = i·|q|: the bounded class a > 0 via xₙ = √k·nd(t₀+|q|n, k′).
    Imaginary,
}

/// Parameters of the sn-form solution xₙ = √k·sn(q(n−n₀), k) and its
/// bounded-class real reduction.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
pub struct EllipticParams {
    pub k: f64,
    pub axis: StepAxis,
    /// |q|: the step magnitude along its axis (one T-step per unit n).
    pub q_magnitude: f64,
    /// Phase offset t₀ in argument units.
    pub n0: f64,
    /// −1 mirrors y for curves with b > 0.
    pub y_sign: f64,
    /// K(k).
    pub big_k: f64,
    /// K(k′), the complementary complete integral.
    pub big_k_prime: f64,
}

impl Serialize for EllipticParams {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Q {
            re: f64,
            im: f64,
        }
        let q = match self.axis {
            StepAxis::Real => Q {
                re: self.q_magnitude,
                im: 0.0,
            },
            StepAxis::Imaginary => Q {
                re: 0.0,
                im: self.q_magnitude,
            },
        };
        let mut st = s.serialize_struct("EllipticParams", 6)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("q", &q)?;
        st.serialize_field("n0", &self.n0)?;
        st.serialize_field("K", &self.big_k)?;
        st.serialize_field("Kprime", &self.big_k_prime)?;
        st.serialize_field("y_sign", &self.y_sign)?;
        st.end()
    }
}

impl EllipticParams {
    pub fn half_step(&self) -> f64 {
        0.5 * self.q_magnitude
    }

    /// Real period of the parameter line carrying the orbit.
    fn parameter_period(&self) -> f64 {
        match self.axis {
            StepAxis::Real => 4.0 * self.big_k,
            StepAxis::Imaginary => 2.0 * self.big_k_prime,
        }
    }

    /// x-value at argument-line position t.
    pub fn x_at(&self, t: f64) -> Result<f64> {
        let period = self.parameter_period();
        let t = t.rem_euclid(period);
        match self.axis {
            StepAxis::Real => {
                let (sn, _, _) = jacobi_sn_cn_dn(t, self.k)?;
                Ok(self.k.sqrt() * sn)
            }
            StepAxis::Imaginary => {
                let kp = (1.0 - self.k * self.k).sqrt();
                let (_, _, dn) = jacobi_sn_cn_dn(t, kp)?;
                Ok(self.k.sqrt() / dn)
            }
        }
    }

    /// The point (xₙ, yₙ) at (possibly fractional) index n.
    pub fn point(&self, n: f64) -> Result<(f64, f64)> {
        let t = self.n0 + self.q_magnitude * n;
        let x = self.x_at(t)?;
        let y = self.y_sign * self.x_at(t + self.half_step())?;
        Ok((x, y))
    }

    pub fn john_seed(&self, n: f64) -> Result<JohnState> {
        let (x, y) = self.point(n)?;
        Ok(JohnState::new(x, y))
    }
}

/// The sequence (xₙ, yₙ) over an index range; every pair lies on the
/// associated curve and consecutive pairs satisfy the John involutions.
pub fn generate_sequence(
    p: &EllipticParams,
    range: std::ops::RangeInclusive<i64>,
) -> Result<Vec<(f64, f64)>> {
    range.map(|n| p.point(n as f64)).collect()
}

/// Closed-form fit of (k, q) from the curve parameters: k is the root in
/// (0,1) of a·k² + (1+a²−b²)·k + a = 0 and sn²(β, k′) = 1/(1+ak), with
/// q = 2iβ and y mirrored for b > 0.
pub fn fit_params(c: &EulerBaxterCurve) -> Result<EllipticParams> {
    if let Some(p) = c.violated_predicate() {
        return Err(Error::InvalidCurve(p.into()));
    }
    if c.b.abs() <= c.a {
        return Err(Error::Domain(
            "empty real curve: |b| <= a has no real points".into(),
        ));
    }
    let k = c.tangency_modulus()?;
    let kp = (1.0 - k * k).sqrt();
    let s = 1.0 / (1.0 + c.a * k).sqrt();
    let beta = inv_sn(s, kp)?;
    Ok(EllipticParams {
        k,
        axis: StepAxis::Imaginary,
        q_magnitude: 2.0 * beta,
        n0: 0.0,
        y_sign: if c.b < 0.0 { 1.0 } else { -1.0 },
        big_k: complete_k(k)?,
        big_k_prime: complete_k(kp)?,
    })
}

/// A constructed curve together with its generating parameters. Curves
/// outside the bounded class (a ≤ 0 or (|b|−a)² ≤ 1) are flagged, not
/// rejected: the dynamics remain well-defined on them.
#[derive(Clone, Debug, Serialize)]
pub struct ConstructedCurve {
    pub curve: EulerBaxterCurve,
    pub params: EllipticParams,
    pub bounded_class: bool,
}

/// Builds the curve whose sn-form solution has modulus k and step q along
/// the given axis.
pub fn construct_curve(k: f64, axis: StepAxis, q_magnitude: f64) -> Result<ConstructedCurve> {
    if !(0.0 < k && k < 1.0) {
        return Err(Error::Domain(format!("modulus {k} outside (0,1)")));
    }
    if q_magnitude == 0.0 {
        return Err(Error::Degenerate(
            "q = 0 generates a constant sequence".into(),
        ));
    }
    let kp = (1.0 - k * k).sqrt();
    let big_k = complete_k(k)?;
    let big_k_prime = complete_k(kp)?;
    let beta = 0.5 * q_magnitude;
    let (a, b) = match axis {
        StepAxis::Imaginary => {
            if beta <= 0.0 || beta >= big_k_prime {
                return Err(Error::Domain(format!(
                    "imaginary half-step {beta} outside (0, K') = (0, {big_k_prime})"
                )));
            }
            let (s, c, d) = jacobi_sn_cn_dn(beta, kp)?;
            (c * c / (k * s * s), -d / (k * s * s))
        }
        StepAxis::Real => {
            let (s, c, d) = jacobi_sn_cn_dn(beta, k)?;
            if s.abs() < 1e-12 {
                return Err(Error::Degenerate("half-step is a lattice point".into()));
            }
            (-1.0 / (k * s * s), c * d / (k * s * s))
        }
    };
    let curve = EulerBaxterCurve::new(a, b);
    let params = EllipticParams {
        k,
        axis,
        q_magnitude,
        n0: 0.0,
        y_sign: 1.0,
        big_k,
        big_k_prime,
    };
    Ok(ConstructedCurve {
        bounded_class: curve.is_valid(),
        curve,
        params,
    })
}

/// Ground-truth periodic instance: q = 2iK′·(m/n) gives John period n
/// (gcd(m,n) = 1, 0 < m < n). The reported period is measured, not assumed.
pub fn construct_periodic(k: f64, m: u32, n: u32) -> Result<ConstructedCurve> {
    if m == 0 || m >= n {
        return Err(Error::Domain(format!("need 0 < m < n, got m={m}, n={n}")));
    }
    if num_integer::gcd(m, n) != 1 {
        return Err(Error::Domain(format!("m={m}, n={n} must be coprime")));
    }
    let kp = (1.0 - k * k).sqrt();
    let big_k_prime = complete_k(kp)?;
    let beta = big_k_prime * m as f64 / n as f64;
    construct_curve(k, StepAxis::Imaginary, 2.0 * beta)
}

/// Measured John period of a constructed instance, from a generic seed.
pub fn measured_period(cc: &ConstructedCurve, nmax: usize, tol: f64) -> Result<Closure> {
    let seed = cc.params.john_seed(0.37)?;
    detect_period(&cc.curve, &seed, nmax, tol)
}

/// Verdict of the lattice periodicity search qN = 2ω₁m₁ + 2ω₂m₂ with
/// (2ω₁, 2ω₂) = (4K, 2iK′), the period lattice of sn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LatticeVerdict {
    Rational {
        n: u32,
        m1: i64,
        m2: i64,
        err: f64,
    },
    Irrational {
        best_n: u32,
        best_m1: i64,
        best_m2: i64,
        best_err: f64,
    },
}

/// Searches N ≤ nmax for integer lattice membership of qN; a real q reduces
/// to the rationality of q/(4K), an imaginary one to |q|/(2K′).
pub fn lattice_period_test(p: &EllipticParams, nmax: u32, tol: f64) -> LatticeVerdict {
    let denom = match p.axis {
        StepAxis::Real => 4.0 * p.big_k,
        StepAxis::Imaginary => 2.0 * p.big_k_prime,
    };
    let ratio = p.q_magnitude / denom;
    let mut best = (1u32, 0i64, f64::INFINITY);
    for n in 1..=nmax {
        let m = (ratio * n as f64).round();
        let err = (p.q_magnitude * n as f64 - denom * m).abs();
        if err < best.2 {
            best = (n, m as i64, err);
        }
        if err < tol {
            let (m1, m2) = match p.axis {
                StepAxis::Real => (m as i64, 0),
                StepAxis::Imaginary => (0, m as i64),
            };
            return LatticeVerdict::Rational {
                n,
                m1,
                m2,
                err,
            };
        }
    }
    let (m1, m2) = match p.axis {
        StepAxis::Real => (best.1, 0),
        StepAxis::Imaginary => (0, best.1),
    };
    LatticeVerdict::Irrational {
        best_n: best.0,
        best_m1: m1,
        best_m2: m2,
        best_err: best.2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::john::john_map;
    use std::f64::consts::PI;

    #[test]
    fn standard_values() {
        for k in [0.1, 0.5, 0.9] {
            let (s, c, d) = jacobi_sn_cn_dn(0.0, k).unwrap();
            assert!(s.abs() < 1e-15 && (c - 1.0).abs() < 1e-15 && (d - 1.0).abs() < 1e-15);
            let big_k = complete_k(k).unwrap();
            let (s, _, _) = jacobi_sn_cn_dn(big_k, k).unwrap();
            assert!((s - 1.0).abs() < 1e-13, "sn(K) = {s} for k = {k}");
        }
    }

    #[test]
    fn degenerate_modulus_is_sine() {
        for u in [0.3, 1.1, 2.5] {
            let (s, c, d) = jacobi_sn_cn_dn(u, 0.0).unwrap();
            assert!((s - u.sin()).abs() < 1e-12);
            assert!((c - u.cos()).abs() < 1e-12);
            assert!((d - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pythagorean_identities() {
        for k in [0.05, 0.3, 0.6, 0.9, 0.99] {
            let big_k = complete_k(k).unwrap();
            for i in 0..200 {
                let u = 4.0 * big_k * i as f64 / 200.0;
                let (s, c, d) = jacobi_sn_cn_dn(u, k).unwrap();
                assert!((s * s + c * c - 1.0).abs() < 1e-13, "k={k} u={u}");
                assert!((d * d + k * k * s * s - 1.0).abs() < 1e-13, "k={k} u={u}");
            }
        }
    }

    #[test]
    fn complete_k_at_zero() {
        assert!((complete_k(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn complete_k_matches_ascending_series() {
        // K(k) = (π/2)·Σ ((2n)! / (2^{2n} (n!)²))² k^{2n}
        let k: f64 = 0.1;
        let mut sum = 0.0;
        let mut term: f64 = 1.0; // ((2n-1)!!/(2n)!!)² k^{2n} at n=0
        for n in 0..60 {
            sum += term;
            let ratio = (2.0 * n as f64 + 1.0) / (2.0 * n as f64 + 2.0);
            term *= ratio * ratio * k * k;
        }
        let series = PI / 2.0 * sum;
        assert!((complete_k(k).unwrap() - series).abs() < 1e-12);
    }

    #[test]
    fn agm_converges_quadratically() {
        for k in [0.1_f64, 0.5, 0.9, 0.999] {
            let kp = (1.0 - k * k).sqrt();
            assert!(agm_iterations(1.0, kp) <= 8, "k = {k}");
        }
    }

    #[test]
    fn complete_k_rejects_k_one() {
        assert!(complete_k(1.0).is_err());
    }

    #[test]
    fn complex_split_matches_imaginary_transform() {
        // sn(it, k) = i·sc(t, k'), and sn(K + it, k) = nd(t, k')
        let k: f64 = 0.6;
        let kp = (1.0 - k * k).sqrt();
        let t = 0.47;
        let (sn, _, _) = jacobi_sn_cn_dn_complex(Complex64::new(0.0, t), k).unwrap();
        let (s1, c1, _) = jacobi_sn_cn_dn(t, kp).unwrap();
        assert!((sn.im - s1 / c1).abs() < 1e-13 && sn.re.abs() < 1e-13);
        let big_k = complete_k(k).unwrap();
        let (sn2, _, _) = jacobi_sn_cn_dn_complex(Complex64::new(big_k, t), k).unwrap();
        let (_, _, d1) = jacobi_sn_cn_dn(t, kp).unwrap();
        assert!((sn2.re - 1.0 / d1).abs() < 1e-13 && sn2.im.abs() < 1e-13);
    }

    #[test]
    fn pole_flagged() {
        let k: f64 = 0.5;
        let kp = (1.0 - k * k).sqrt();
        let big_k_prime = complete_k(kp).unwrap();
        assert!(jacobi_sn_cn_dn_complex(Complex64::new(0.0, big_k_prime), k).is_err());
    }

    #[test]
    fn generated_points_lie_on_curve() {
        for (k, m, n) in [(0.6, 1, 5), (0.3, 1, 5), (0.8, 1, 4), (0.5, 2, 3)] {
            let cc = construct_periodic(k, m, n).unwrap();
            assert!(cc.bounded_class);
            let pts = generate_sequence(&cc.params, -10..=10).unwrap();
            for (x, y) in pts {
                let res = cc.curve.eval(x, y).abs() / cc.curve.eval_scale(x, y).max(1.0);
                assert!(res < 1e-12, "res {res}");
            }
        }
    }

    #[test]
    fn half_shift_definition() {
        let cc = construct_periodic(0.6, 1, 5).unwrap();
        let (x_half, _) = cc.params.point(0.5).unwrap();
        let (_, y0) = cc.params.point(0.0).unwrap();
        assert!((x_half - y0).abs() < 1e-13);
    }

    #[test]
    fn sequence_matches_john_iteration() {
        let cc = construct_periodic(0.62, 2, 7).unwrap();
        let pts = generate_sequence(&cc.params, 0..=100).unwrap();
        let mut s = JohnState::new(pts[0].0, pts[0].1);
        // T advances n by ±1; match the measured direction.
        let fwd = john_map(&cc.curve, &s).unwrap().state;
        let next = JohnState::new(pts[1].0, pts[1].1);
        let prev_pt = cc.params.point(-1.0).unwrap();
        let prev = JohnState::new(prev_pt.0, prev_pt.1);
        let step_is_forward = fwd.dist(&next) < fwd.dist(&prev);
        for (i, &(x, y)) in pts.iter().enumerate().skip(1).take(99) {
            s = john_map(&cc.curve, &s).unwrap().state;
            let expect = if step_is_forward {
                JohnState::new(x, y)
            } else {
                let p = cc.params.point(-(i as f64)).unwrap();
                JohnState::new(p.0, p.1)
            };
            assert!(s.dist(&expect) < 1e-8, "step {i}: {}", s.dist(&expect));
        }
    }

    #[test]
    fn real_axis_sequence_has_exact_period() {
        let k = 0.55;
        let big_k = complete_k(k).unwrap();
        let cc = construct_curve(k, StepAxis::Real, 4.0 * big_k / 5.0).unwrap();
        assert!(!cc.bounded_class);
        assert!(cc.curve.a < 0.0);
        let pts = generate_sequence(&cc.params, 0..=10).unwrap();
        for i in 0..=5 {
            let (x0, y0) = pts[i];
            let (x5, y5) = pts[i + 5];
            assert!((x0 - x5).abs() < 1e-11 && (y0 - y5).abs() < 1e-11);
        }
    }

    #[test]
    fn fit_round_trip() {
        for (k, m, n) in [(0.6, 1, 5), (0.5, 2, 3), (0.7, 1, 4)] {
            let cc = construct_periodic(k, m, n).unwrap();
            let fitted = fit_params(&cc.curve).unwrap();
            assert!((fitted.k - k).abs() < 1e-10, "k: {} vs {k}", fitted.k);
            assert!(
                (fitted.q_magnitude - cc.params.q_magnitude).abs() < 1e-9,
                "q: {} vs {}",
                fitted.q_magnitude,
                cc.params.q_magnitude
            );
        }
    }

    #[test]
    fn fit_example_curve() {
        // (a,b) = (1,-3): k solves k²−7k+1 = 0 and β = K'/2.
        let c = EulerBaxterCurve::new(1.0, -3.0);
        let p = fit_params(&c).unwrap();
        assert!((p.k - (7.0 - 45.0_f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((p.q_magnitude / 2.0 - p.big_k_prime / 2.0).abs() < 1e-10);
        // lockstep over 100 steps
        let seed = p.john_seed(0.0).unwrap();
        let mut s = seed;
        for n in 1..=100 {
            s = john_map(&c, &s).unwrap().state;
            let fwd = p.john_seed(n as f64).unwrap();
            let bwd = p.john_seed(-(n as f64)).unwrap();
            assert!(s.dist(&fwd).min(s.dist(&bwd)) < 1e-8, "n = {n}");
        }
    }

    #[test]
    fn fit_rejects_invalid() {
        assert!(fit_params(&EulerBaxterCurve::new(-1.0, -3.0)).is_err());
        assert!(fit_params(&EulerBaxterCurve::new(1.0, -1.5)).is_err());
    }

    #[test]
    fn construct_rejects_degenerate() {
        assert!(construct_curve(0.5, StepAxis::Imaginary, 0.0).is_err());
        assert!(construct_curve(1.5, StepAxis::Imaginary, 0.1).is_err());
        assert!(construct_periodic(0.5, 2, 4).is_err());
    }

    #[test]
    fn constructed_period_measured() {
        for (k, m, n) in [(0.6, 1, 5), (0.45, 1, 6), (0.5, 2, 3)] {
            let cc = construct_periodic(k, m, n).unwrap();
            let verdict = measured_period(&cc, 64, 1e-8).unwrap();
            assert_eq!(verdict.period(), Some(n as usize), "k={k} m={m} n={n}");
        }
    }

    #[test]
    fn lattice_rational_case() {
        let k = 0.44;
        let big_k = complete_k(k).unwrap();
        let p = EllipticParams {
            k,
            axis: StepAxis::Real,
            q_magnitude: 4.0 * big_k * 2.0 / 7.0,
            n0: 0.0,
            y_sign: 1.0,
            big_k,
            big_k_prime: complete_k((1.0 - k * k).sqrt()).unwrap(),
        };
        match lattice_period_test(&p, 100, 1e-9) {
            LatticeVerdict::Rational { n, m1, m2, .. } => {
                assert_eq!((n, m1, m2), (7, 2, 0));
            }
            v => panic!("expected rational, got {v:?}"),
        }
    }

    #[test]
    fn lattice_irrational_case() {
        let k = 0.44;
        let big_k = complete_k(k).unwrap();
        let p = EllipticParams {
            k,
            axis: StepAxis::Real,
            q_magnitude: 4.0 * big_k / 2.0_f64.sqrt(),
            n0: 0.0,
            y_sign: 1.0,
            big_k,
            big_k_prime: complete_k((1.0 - k * k).sqrt()).unwrap(),
        };
        match lattice_period_test(&p, 1000, 1e-9) {
            LatticeVerdict::Irrational { best_err, .. } => assert!(best_err > 1e-9),
            v => panic!("expected irrational, got {v:?}"),
        }
    }

    #[test]
    fn params_serialize_shape() {
        let cc = construct_periodic(0.6, 1, 5).unwrap();
        let json = serde_json::to_value(&cc.params).unwrap();
        assert!(json.get("k").is_some());
        assert!(json["q"].get("im").is_some());
        assert!(json.get("K").is_some() && json.get("Kprime").is_some());
    }
}
