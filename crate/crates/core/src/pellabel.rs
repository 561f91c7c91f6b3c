//! The Pell–Abel polynomial equation A² − F·B² = 1 for a quartic F:
//! solvability prediction through the Cayley ladder and explicit
//! construction of (A, B) by the continued-fraction expansion of √F in the
//! field of Laurent series at infinity.
//!
//! The expansion runs over exact rationals when the instance is exact and
//! over f64 otherwise; a float solution is upgraded to exact only after
//! rational reconstruction verifies the identity bit-exactly.
//!
//! The printed equation of an instance carries a sign: linked instances
//! produced by coefficient reversal of the pencil cubic have negative
//! leading coefficient (= f(0) < 0), for which A² + f̃B² = 1 is the
//! orientation with real solutions. The solver normalizes to the
//! positive-leading-coefficient operative quartic F = ±f̃ and records which
//! sign it used; an orientation whose operative F has a non-positive
//! leading coefficient admits no real solutions at all (the leading terms
//! of A² and −F·B² cannot cancel) and returns NotFound immediately.

use crate::algebra::{rational_to_f64, rationalize_f64, series_sqrt, Poly, PowerSeries, Rational};
use crate::cayley::CayleyReport;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Num, One, Signed, Zero};
use serde::Serialize;
use std::ops::Neg;

/// Which sign of A² ∓ f̃B² = 1 is requested against the instance's own f̃.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PellSign {
    /// A² + f̃B² = 1 (the operative quartic is −f̃).
    Plus,
    /// A² − f̃B² = 1 (the operative quartic is f̃ itself).
    Minus,
    /// Pick the orientation whose operative quartic has positive leading
    /// coefficient, the only one that can carry real solutions.
    Auto,
}

/// A quartic Pell–Abel instance; `linked_from_cubic` records that f̃ arose
/// as the degree-4 coefficient reversal of a pencil cubic.
#[derive(Clone, Debug)]
pub struct PellAbelInstance<T> {
    pub f_tilde: Poly<T>,
    pub linked_from_cubic: bool,
}

impl<T: Clone + Num + Neg<Output = T>> PellAbelInstance<T> {
    pub fn degenerate(&self) -> bool {
        self.f_tilde.degree() != Some(4)
    }
}

/// f̃(λ) = λ⁴·f(1/λ): the degree-4 coefficient reversal of a cubic. Always
/// returns the instance; a degree drop (f with zero constant term) leaves
/// it flagged through `degenerate()`.
pub fn reverse_link<T: Clone + Num + Neg<Output = T>>(f: &Poly<T>) -> Result<PellAbelInstance<T>> {
    if f.degree().is_some_and(|d| d > 3) {
        return Err(Error::Domain("reverse_link expects a cubic".into()));
    }
    Ok(PellAbelInstance {
        f_tilde: f.reverse(4)?,
        linked_from_cubic: true,
    })
}

#[derive(Clone, Debug)]
pub struct PellAbelSolution<T> {
    pub a: Poly<T>,
    pub b: Poly<T>,
    /// Max-norm of A² − F·B² − 1; exactly zero after rational verification.
    pub residual: f64,
    pub exact: bool,
    /// The sign of the printed equation A² ∓ f̃B² = 1 this solution satisfies.
    pub equation_sign: PellSign,
}

#[derive(Clone, Debug)]
pub enum PellOutcome<T> {
    Found(PellAbelSolution<T>),
    NotFound { degree_reached: usize, reason: String },
}

impl<T> PellOutcome<T> {
    pub fn found(&self) -> bool {
        matches!(self, PellOutcome::Found(_))
    }
}

/// JSON coefficient rendering: numbers for floats, "p/q" for rationals.
pub trait CoeffRepr {
    fn json_repr(&self) -> serde_json::Value;
}

impl CoeffRepr for f64 {
    fn json_repr(&self) -> serde_json::Value {
        serde_json::json!(self)
    }
}

impl CoeffRepr for Rational {
    fn json_repr(&self) -> serde_json::Value {
        serde_json::Value::String(crate::algebra::rational_to_string(self))
    }
}

impl<T: CoeffRepr> PellAbelSolution<T> {
    /// {"A": [coeffs], "B": [coeffs], "residual": float-or-"0", ...}
    pub fn to_json(&self) -> serde_json::Value {
        let coeffs = |p: &Poly<T>| -> serde_json::Value {
            serde_json::Value::Array(p.coeffs().iter().map(|c| c.json_repr()).collect())
        };
        serde_json::json!({
            "A": coeffs(&self.a),
            "B": coeffs(&self.b),
            "residual": if self.exact {
                serde_json::Value::String("0".into())
            } else {
                serde_json::json!(self.residual)
            },
            "exact": self.exact,
            "equation_sign": match self.equation_sign {
                PellSign::Plus => "plus",
                PellSign::Minus => "minus",
                PellSign::Auto => "auto",
            },
        })
    }
}

impl<T: CoeffRepr> PellOutcome<T> {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            PellOutcome::Found(sol) => {
                let mut v = sol.to_json();
                v["outcome"] = serde_json::json!("found");
                v
            }
            PellOutcome::NotFound {
                degree_reached,
                reason,
            } => serde_json::json!({
                "outcome": "not_found",
                "degree_reached": degree_reached,
                "reason": reason,
            }),
        }
    }
}

/// Scalar operations the continued fraction needs beyond ring arithmetic.
trait CfScalar: Clone + Num + Neg<Output = Self> + PartialOrd {
    fn negligible(&self, scale: &Self) -> bool;
    fn abs_val(&self) -> Self;
    fn try_sqrt(&self) -> Option<Self>;
    fn to_f64_lossy(&self) -> f64;
    /// Representation size; exact scalars report bit length, floats 0.
    fn height_bits(&self) -> u64;
    /// Whether polynomial division is exact; float remainders are noise.
    fn exact_division(&self) -> bool {
        true
    }
}

impl CfScalar for f64 {
    fn negligible(&self, scale: &f64) -> bool {
        self.abs() <= 1e-12 * scale.max(1e-30)
    }
    fn abs_val(&self) -> f64 {
        self.abs()
    }
    fn try_sqrt(&self) -> Option<f64> {
        (*self >= 0.0).then(|| self.sqrt())
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
    fn height_bits(&self) -> u64 {
        0
    }
    fn exact_division(&self) -> bool {
        false
    }
}

impl CfScalar for Rational {
    fn negligible(&self, _scale: &Rational) -> bool {
        self.is_zero()
    }
    fn abs_val(&self) -> Rational {
        self.abs()
    }
    fn try_sqrt(&self) -> Option<Rational> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        (&(&n * &n) == self.numer() && &(&d * &d) == self.denom())
            .then(|| Rational::new(n, d))
    }
    fn to_f64_lossy(&self) -> f64 {
        rational_to_f64(self)
    }
    fn height_bits(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }
}

/// Exact-path termination: a solvable instance has a periodic expansion with
/// bounded partial-quotient heights, while non-torsion instances blow up
/// roughly doubling per step. Past this bound no desk-scale solution exists.
const HEIGHT_CAP_BITS: u64 = 6_000;

fn poly_max_abs<T: CfScalar>(p: &Poly<T>) -> T {
    let mut m = T::zero();
    for c in p.coeffs() {
        let a = c.abs_val();
        if a > m {
            m = a;
        }
    }
    m
}

fn trim_negligible<T: CfScalar>(p: &Poly<T>, scale: &T) -> Poly<T> {
    let coeffs: Vec<T> = p
        .coeffs()
        .iter()
        .map(|c| {
            if c.negligible(scale) {
                T::zero()
            } else {
                c.clone()
            }
        })
        .collect();
    Poly::new(coeffs)
}

/// √F as a Laurent series at infinity: √F = s₀·Σ_{j≥0} c_j λ^{2−j}, with
/// s₀ = √lead(F), c₀ = 1.
fn sqrt_laurent<T: CfScalar>(f: &Poly<T>, depth: usize) -> Result<(T, PowerSeries<T>)> {
    if f.degree() != Some(4) {
        return Err(Error::Degenerate(format!(
            "operative quartic must have degree 4, got degree {:?}",
            f.degree()
        )));
    }
    let lead = f.coeff(4);
    let s0 = lead.try_sqrt().ok_or_else(|| {
        Error::Domain("leading coefficient has no square root in the scalar field".into())
    })?;
    let rev = f.reverse(4)?;
    let g: Vec<T> = rev.coeffs().iter().map(|c| c.clone() / lead.clone()).collect();
    let series = series_sqrt(&PowerSeries::from_poly_coeffs(&g, depth), depth)?;
    Ok((s0, series))
}

/// Polynomial part of (√F + p)/q in the Laurent field at infinity.
fn polynomial_part<T: CfScalar>(
    s0: &T,
    sqrt_series: &PowerSeries<T>,
    p: &Poly<T>,
    q: &Poly<T>,
) -> Result<Poly<T>> {
    let depth = sqrt_series.order();
    let p_deg = p.degree().map_or(-1, |d| d as i64);
    let top = 2i64.max(p_deg);
    let qd = q
        .degree()
        .ok_or_else(|| Error::Domain("zero partial denominator".into()))? as i64;
    let q_lead = q.leading().unwrap().clone();
    let low = 2 - depth as i64;
    // Numerator Laurent coefficients, index 0 = degree `top`, descending.
    let mut cur: Vec<T> = (low..=top)
        .rev()
        .map(|deg| {
            let mut c = T::zero();
            if deg <= 2 {
                c = c + s0.clone() * sqrt_series.coeff((2 - deg) as usize);
            }
            if deg >= 0 && deg <= p_deg {
                c = c + p.coeff(deg as usize);
            }
            c
        })
        .collect();
    let mut quot: Vec<(i64, T)> = Vec::new();
    for i in 0..cur.len() {
        let deg_i = top - i as i64;
        let lead_deg = deg_i - qd;
        if lead_deg < 0 {
            break;
        }
        let c = cur[i].clone() / q_lead.clone();
        quot.push((lead_deg, c.clone()));
        for (qj, qc) in q.coeffs().iter().enumerate() {
            let deg = lead_deg + qj as i64;
            let idx = (top - deg) as usize;
            if deg <= top && idx < cur.len() {
                cur[idx] = cur[idx].clone() - c.clone() * qc.clone();
            }
        }
    }
    let max_deg = quot.iter().map(|(d, _)| *d).max().unwrap_or(0);
    let mut coeffs = vec![T::zero(); max_deg as usize + 1];
    for (d, c) in quot {
        coeffs[d as usize] = c;
    }
    Ok(Poly::new(coeffs))
}

/// Turns p² − Fq² = κ into A² − FB² = 1: divide by √κ when κ is a positive
/// square in the scalar field, otherwise compose the solution with itself
/// (A = (p² + Fq²)/κ, B = 2pq/κ), which clears κ of either sign.
fn normalize_solution<T: CfScalar>(
    p: &Poly<T>,
    q: &Poly<T>,
    kappa: &T,
    f: &Poly<T>,
) -> (Poly<T>, Poly<T>) {
    if kappa > &T::zero() {
        if let Some(sk) = kappa.try_sqrt() {
            let inv = T::one() / sk;
            return (p.scale(&inv), q.scale(&inv));
        }
    }
    let inv = T::one() / kappa.clone();
    let a = p.mul(p).add(&f.mul(&q.mul(q))).scale(&inv);
    let b = p.mul(q).scale(&(inv.clone() + inv));
    (a, b)
}

fn residual_max_norm<T: CfScalar>(a: &Poly<T>, b: &Poly<T>, f: &Poly<T>) -> f64 {
    let r = a
        .mul(a)
        .sub(&f.mul(&b.mul(b)))
        .sub(&Poly::constant(T::one()));
    r.coeffs()
        .iter()
        .map(|c| c.abs_val().to_f64_lossy())
        .fold(0.0, f64::max)
}

/// Quadratic-surd continued fraction of √F. A convergent whose remainder
/// p² − Fq² is a nonzero constant (the quasi-period event) yields the
/// solution; degrees grow monotonically, so the search is bounded by dmax.
/// On the float path an event whose normalized residual exceeds
/// `accept_tol` is trim noise, not a quasi-period, and the expansion
/// continues past it.
fn cf_pell<T: CfScalar>(
    f: &Poly<T>,
    dmax: usize,
    sign_reported: PellSign,
    accept_tol: Option<f64>,
) -> Result<PellOutcome<T>> {
    let depth = 2 * dmax + 12;
    let (s0, sqrt_series) = sqrt_laurent(f, depth)?;
    let f_scale = poly_max_abs(f);
    let mut surd_p = Poly::zero();
    let mut surd_q = Poly::constant(T::one());
    let mut p_prev2 = Poly::zero();
    let mut p_prev = Poly::constant(T::one());
    let mut q_prev2 = Poly::constant(T::one());
    let mut q_prev = Poly::zero();
    let mut degree_reached = 0usize;
    for iteration in 0..4 * dmax + 8 {
        let a_n = polynomial_part(&s0, &sqrt_series, &surd_p, &surd_q)?;
        if a_n.is_zero() {
            return Err(Error::Numeric(
                "vanishing partial quotient in the continued fraction".into(),
            ));
        }
        let height: u64 = a_n.coeffs().iter().map(|c| c.height_bits()).max().unwrap_or(0);
        if height > HEIGHT_CAP_BITS {
            return Ok(PellOutcome::NotFound {
                degree_reached,
                reason: format!(
                    "partial-quotient height exceeded {HEIGHT_CAP_BITS} bits: expansion is not quasi-periodic"
                ),
            });
        }
        let p_cur = a_n.mul(&p_prev).add(&p_prev2);
        let q_cur = a_n.mul(&q_prev).add(&q_prev2);
        degree_reached = p_cur.degree().unwrap_or(0);
        let p_sq = p_cur.mul(&p_cur);
        let r_raw = p_sq.sub(&f.mul(&q_cur.mul(&q_cur)));
        // cancellation noise in the remainder lives at the scale of p²
        let scale = {
            let s = poly_max_abs(&p_sq);
            if s > f_scale {
                s
            } else {
                f_scale.clone()
            }
        };
        let r = trim_negligible(&r_raw, &scale);
        if r.is_zero() {
            if T::zero().exact_division() {
                return Err(Error::Degenerate(
                    "quartic is a perfect square of a quadratic".into(),
                ));
            }
            return Ok(PellOutcome::NotFound {
                degree_reached,
                reason: format!(
                    "float precision exhausted at convergent degree {degree_reached}"
                ),
            });
        }
        if r.degree() == Some(0) {
            let kappa = r.coeff(0);
            let (a, b) = normalize_solution(&p_cur, &q_cur, &kappa, f);
            let residual = residual_max_norm(&a, &b, f);
            if accept_tol.is_none_or(|tol| residual <= tol) {
                return Ok(PellOutcome::Found(PellAbelSolution {
                    a,
                    b,
                    residual,
                    exact: false,
                    equation_sign: sign_reported,
                }));
            }
            // spurious event: keep expanding
        }
        if degree_reached > dmax {
            return Ok(PellOutcome::NotFound {
                degree_reached,
                reason: format!("no constant remainder up to degree bound {dmax}"),
            });
        }
        p_prev2 = std::mem::replace(&mut p_prev, p_cur);
        q_prev2 = std::mem::replace(&mut q_prev, q_cur);
        // surd step: P' = a·Q − P, Q' = (F − P'²)/Q
        let surd_p_next = a_n.mul(&surd_q).sub(&surd_p);
        let num = f.sub(&surd_p_next.mul(&surd_p_next));
        let (q_next, rem) = num.divrem(&surd_q)?;
        if T::zero().exact_division() {
            let rem = trim_negligible(&rem, &poly_max_abs(&num));
            if !rem.is_zero() {
                return Err(Error::Numeric(format!(
                    "continued fraction lost exactness at iteration {iteration}"
                )));
            }
        }
        let q_next = trim_negligible(&q_next, &poly_max_abs(&q_next));
        if q_next.is_zero() {
            return Err(Error::Numeric("degenerate surd denominator".into()));
        }
        surd_p = surd_p_next;
        surd_q = q_next;
    }
    Ok(PellOutcome::NotFound {
        degree_reached,
        reason: "iteration budget exhausted".into(),
    })
}

fn oriented<T: Clone + Num + Neg<Output = T>>(
    f_tilde: &Poly<T>,
    sign: PellSign,
    lead_positive: bool,
) -> (Poly<T>, PellSign, bool) {
    match sign {
        PellSign::Minus => (f_tilde.clone(), PellSign::Minus, lead_positive),
        PellSign::Plus => (f_tilde.neg(), PellSign::Plus, !lead_positive),
        PellSign::Auto => {
            if lead_positive {
                (f_tilde.clone(), PellSign::Minus, true)
            } else {
                (f_tilde.neg(), PellSign::Plus, true)
            }
        }
    }
}

/// Exact construction over rationals. The leading coefficient of the
/// operative quartic must be a perfect rational square (always true for
/// linked instances, where it is −f(0) = 4); otherwise use the float path.
pub fn pell_construct_exact(
    inst: &PellAbelInstance<Rational>,
    sign: PellSign,
    dmax: usize,
) -> Result<PellOutcome<Rational>> {
    if inst.degenerate() {
        return Err(Error::Degenerate(
            "instance quartic must have degree 4".into(),
        ));
    }
    let lead_positive = inst.f_tilde.coeff(4).is_positive();
    let (f, used, operative_positive) = oriented(&inst.f_tilde, sign, lead_positive);
    if !operative_positive {
        return Ok(PellOutcome::NotFound {
            degree_reached: 0,
            reason: "operative quartic has negative leading coefficient: no real solutions".into(),
        });
    }
    match cf_pell(&f, dmax, used, None)? {
        PellOutcome::Found(mut sol) => {
            sol.exact = sol.residual == 0.0;
            Ok(PellOutcome::Found(sol))
        }
        nf => Ok(nf),
    }
}

/// Float construction with rational reconstruction: a passing solution is
/// upgraded to exact only when its rationalized coefficients verify the
/// identity bit-exactly.
pub fn pell_construct_float(
    inst: &PellAbelInstance<f64>,
    sign: PellSign,
    dmax: usize,
    tol: f64,
) -> Result<PellOutcome<f64>> {
    if inst.degenerate() {
        return Err(Error::Degenerate(
            "instance quartic must have degree 4".into(),
        ));
    }
    let lead_positive = inst.f_tilde.coeff(4) > 0.0;
    let (f, used, operative_positive) = oriented(&inst.f_tilde, sign, lead_positive);
    if !operative_positive {
        return Ok(PellOutcome::NotFound {
            degree_reached: 0,
            reason: "operative quartic has negative leading coefficient: no real solutions".into(),
        });
    }
    match cf_pell(&f, dmax, used, Some(tol))? {
        PellOutcome::Found(mut sol) => {
            if sol.residual > tol {
                return Ok(PellOutcome::NotFound {
                    degree_reached: sol.a.degree().unwrap_or(0),
                    reason: format!("residual {:.3e} above tolerance {tol:.1e}", sol.residual),
                });
            }
            if let Some((ae, be)) = reconstruct_exact(&sol.a, &sol.b, &f) {
                sol.a = ae.map(rational_to_f64);
                sol.b = be.map(rational_to_f64);
                sol.residual = 0.0;
                sol.exact = true;
            }
            Ok(PellOutcome::Found(sol))
        }
        nf => Ok(nf),
    }
}

fn reconstruct_exact(
    a: &Poly<f64>,
    b: &Poly<f64>,
    f: &Poly<f64>,
) -> Option<(Poly<Rational>, Poly<Rational>)> {
    let lift = |p: &Poly<f64>| -> Option<Poly<Rational>> {
        let coeffs: Option<Vec<Rational>> = p
            .coeffs()
            .iter()
            .map(|&c| {
                let r = rationalize_f64(c, 1e-9 * (1.0 + c.abs())).ok()?;
                (r.denom() <= &BigInt::from(1_000_000_000u64)).then_some(r)
            })
            .collect();
        Some(Poly::new(coeffs?))
    };
    let (ar, br, fr) = (lift(a)?, lift(b)?, lift(f)?);
    let r = ar
        .mul(&ar)
        .sub(&fr.mul(&br.mul(&br)))
        .sub(&Poly::constant(Rational::one()));
    r.is_zero().then_some((ar, br))
}

/// Solvability verdict per the even-period rule over the Cayley ladder.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SolvableVerdict {
    Solvable { poncelet_period: u32 },
    UnsolvableUpTo { nmax: u32 },
}

#[derive(Clone, Debug, Serialize)]
pub struct PellSolvability {
    pub verdict: SolvableVerdict,
    pub cayley_period: Option<u32>,
}

/// Delegates to the Cayley report of the linked pencil: Solvable iff the
/// smallest vanishing verdict has even N. The construction path is the
/// operational check of this prediction; the two are compared, never
/// conflated.
pub fn pell_solvable(report: &CayleyReport, nmax: u32) -> PellSolvability {
    let verdict = match report.period {
        Some(n) if n % 2 == 0 => SolvableVerdict::Solvable { poncelet_period: n },
        _ => SolvableVerdict::UnsolvableUpTo { nmax },
    };
    PellSolvability {
        verdict,
        cayley_period: report.period,
    }
}
