//! John reflection dynamics on a bi-quadratic curve: vertical/horizontal
//! involutions, the composed map T = I₂∘I₁, orbit generation, and numeric
//! period detection.
//!
//! Orbit generation is a pure iteration from a seed; independent seeds and
//! curves can be processed in parallel.

use crate::curve::{v_transform, Biquadratic};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which involution the walker applies next.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NextMove {
    Vertical,
    Horizontal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JohnState {
    pub x: f64,
    pub y: f64,
    pub parity: NextMove,
}

impl JohnState {
    pub fn new(x: f64, y: f64) -> Self {
        JohnState {
            x,
            y,
            parity: NextMove::Vertical,
        }
    }

    pub fn dist(&self, other: &JohnState) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// Involution result; tangency means the step hit a double root and the
/// point was returned unchanged.
#[derive(Clone, Copy, Debug)]
pub struct StepInfo {
    pub state: JohnState,
    pub tangency: bool,
}

/// Root selection switches from the Vieta product form to the sum form when
/// the fixed-coordinate partner is near zero.
const VIETA_SWITCH: f64 = 1e-6;
/// Relative on-curve residual accepted on input states.
const ON_CURVE_TOL: f64 = 1e-6;
/// Relative discriminant size below which a double root is declared. The
/// Vieta forms remain exact at a double root (they return the same point),
/// so the flag is informational and the step always proceeds.
const TANGENCY_TOL: f64 = 1e-14;

fn check_on_curve<C: Biquadratic>(c: &C, s: &JohnState) -> Result<()> {
    let scale = c.eval_scale(s.x, s.y).max(1.0);
    let residual = c.eval(s.x, s.y).abs() / scale;
    if residual > ON_CURVE_TOL {
        return Err(Error::OffCurve { residual });
    }
    Ok(())
}

/// One Newton step re-projecting the modified coordinate onto the curve,
/// countering float drift over long orbits. Kept only when it actually
/// reduces the quadratic residual (near a double root the derivative
/// vanishes and the raw Vieta value is already the right answer).
fn newton_polish(aq: f64, bq: f64, cq: f64, root: f64) -> f64 {
    let quad = |r: f64| (aq * r + bq) * r + cq;
    let f = quad(root);
    let df = 2.0 * aq * root + bq;
    if df.abs() < 1e-30 {
        return root;
    }
    let polished = root - f / df;
    if quad(polished).abs() < f.abs() {
        polished
    } else {
        root
    }
}

fn other_root(aq: f64, bq: f64, cq: f64, current: f64) -> (f64, bool) {
    let disc = bq * bq - 4.0 * aq * cq;
    let scale = (bq * bq).max((4.0 * aq * cq).abs()).max(1e-300);
    let tangency = disc / scale < TANGENCY_TOL;
    let raw = if current.abs() > VIETA_SWITCH {
        cq / (aq * current)
    } else {
        -bq / aq - current
    };
    (newton_polish(aq, bq, cq, raw), tangency)
}

/// I₁: reflect along the vertical chord, x fixed.
pub fn involution_vertical<C: Biquadratic>(c: &C, s: &JohnState) -> Result<StepInfo> {
    check_on_curve(c, s)?;
    let (aq, bq, cq) = c.y_quadratic(s.x);
    if aq.abs() < 1e-14 {
        return Err(Error::Degenerate("vertical chord is not quadratic".into()));
    }
    let (y, tangency) = other_root(aq, bq, cq, s.y);
    Ok(StepInfo {
        state: JohnState {
            x: s.x,
            y,
            parity: NextMove::Horizontal,
        },
        tangency,
    })
}

/// I₂: reflect along the horizontal chord, y fixed (bit-identical).
pub fn involution_horizontal<C: Biquadratic>(c: &C, s: &JohnState) -> Result<StepInfo> {
    check_on_curve(c, s)?;
    let (aq, bq, cq) = c.x_quadratic(s.y);
    if aq.abs() < 1e-14 {
        return Err(Error::Degenerate("horizontal chord is not quadratic".into()));
    }
    let (x, tangency) = other_root(aq, bq, cq, s.x);
    Ok(StepInfo {
        state: JohnState {
            x,
            y: s.y,
            parity: NextMove::Vertical,
        },
        tangency,
    })
}

/// T = I₂ ∘ I₁.
pub fn john_map<C: Biquadratic>(c: &C, s: &JohnState) -> Result<StepInfo> {
    let v = involution_vertical(c, s)?;
    let h = involution_horizontal(c, &v.state)?;
    Ok(StepInfo {
        state: h.state,
        tangency: v.tangency || h.tangency,
    })
}

/// T⁻¹ = I₁ ∘ I₂.
pub fn john_map_inverse<C: Biquadratic>(c: &C, s: &JohnState) -> Result<StepInfo> {
    let h = involution_horizontal(c, s)?;
    let v = involution_vertical(c, &h.state)?;
    Ok(StepInfo {
        state: v.state,
        tangency: h.tangency || v.tangency,
    })
}

/// Closure verdict of a period search. Open is a value, not an error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "closure", rename_all = "lowercase")]
pub enum Closure {
    Open { min_return_distance: f64 },
    Closed { n: usize, return_distance: f64 },
}

impl Closure {
    pub fn period(&self) -> Option<usize> {
        match self {
            Closure::Closed { n, .. } => Some(*n),
            Closure::Open { .. } => None,
        }
    }
}

/// Smallest N ≤ nmax with Euclidean return distance < tol under T, else
/// Open with the minimal distance observed.
pub fn detect_period<C: Biquadratic>(
    c: &C,
    seed: &JohnState,
    nmax: usize,
    tol: f64,
) -> Result<Closure> {
    if nmax < 1 {
        return Err(Error::Domain("nmax must be >= 1".into()));
    }
    if tol <= 0.0 {
        return Err(Error::Domain("tol must be positive".into()));
    }
    let mut s = *seed;
    let mut min_dist = f64::INFINITY;
    for n in 1..=nmax {
        // tangency flags are informational here: the step formulas stay
        // exact through a double root, so detection continues
        let step = john_map(c, &s)?;
        s = step.state;
        let d = s.dist(seed);
        if d < min_dist {
            min_dist = d;
        }
        if d < tol {
            return Ok(Closure::Closed {
                n,
                return_distance: d,
            });
        }
    }
    Ok(Closure::Open {
        min_return_distance: min_dist,
    })
}

/// Orbit record over half-steps (alternating I₁, I₂ applications).
#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub states: Vec<JohnState>,
    pub closure: Closure,
    pub max_residual: f64,
    pub tangency_flagged: bool,
    /// T-period when closed.
    pub t_period: Option<usize>,
    /// Half-step count of the closed loop (2 × T-period).
    pub half_step_count: Option<usize>,
}

/// Generates `half_steps` alternating involution applications from the seed,
/// tracking the on-curve residual, and runs period detection alongside.
pub fn orbit<C: Biquadratic>(
    c: &C,
    seed: &JohnState,
    half_steps: usize,
    period_tol: f64,
) -> Result<OrbitRecord> {
    let mut states = Vec::with_capacity(half_steps + 1);
    let mut s = JohnState {
        parity: NextMove::Vertical,
        ..*seed
    };
    states.push(s);
    let mut max_residual: f64 = 0.0;
    let mut tangency_flagged = false;
    let mut closure = Closure::Open {
        min_return_distance: f64::INFINITY,
    };
    let mut min_dist = f64::INFINITY;
    for i in 1..=half_steps {
        let step = match s.parity {
            NextMove::Vertical => involution_vertical(c, &s)?,
            NextMove::Horizontal => involution_horizontal(c, &s)?,
        };
        tangency_flagged |= step.tangency;
        s = step.state;
        states.push(s);
        let scale = c.eval_scale(s.x, s.y).max(1.0);
        max_residual = max_residual.max(c.eval(s.x, s.y).abs() / scale);
        if i % 2 == 0 {
            let d = s.dist(seed);
            min_dist = min_dist.min(d);
            if d < period_tol && matches!(closure, Closure::Open { .. }) {
                closure = Closure::Closed {
                    n: i / 2,
                    return_distance: d,
                };
            }
        }
    }
    if let Closure::Open { .. } = closure {
        closure = Closure::Open {
            min_return_distance: min_dist,
        };
    }
    let t_period = closure.period();
    Ok(OrbitRecord {
        states,
        closure,
        max_residual,
        tangency_flagged,
        t_period,
        half_step_count: t_period.map(|n| 2 * n),
    })
}

/// CSV export: header n,x,y,u,v, one row per half-step.
pub fn orbit_csv(rec: &OrbitRecord) -> String {
    let mut out = String::from("n,x,y,u,v\n");
    for (n, s) in rec.states.iter().enumerate() {
        let (u, v) = v_transform(s.x, s.y);
        out.push_str(&format!("{n},{},{},{u},{v}\n", s.x, s.y));
    }
    out
}

/// JSON summary {closure, N, max_residual}.
#[derive(Serialize)]
pub struct OrbitSummary {
    pub closure: &'static str,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub max_residual: f64,
    pub half_steps: Option<usize>,
}

pub fn orbit_summary(rec: &OrbitRecord) -> OrbitSummary {
    OrbitSummary {
        closure: match rec.closure {
            Closure::Closed { .. } => "closed",
            Closure::Open { .. } => "open",
        },
        n: rec.t_period,
        max_residual: rec.max_residual,
        half_steps: rec.half_step_count,
    }
}

/// A point on the curve at abscissa x, taking the upper or lower y-root.
pub fn seed_on_curve<C: Biquadratic>(c: &C, x: f64, upper: bool) -> Result<JohnState> {
    let (aq, bq, cq) = c.y_quadratic(x);
    let mut disc = bq * bq - 4.0 * aq * cq;
    let scale = (bq * bq).max((4.0 * aq * cq).abs()).max(1.0);
    if disc < 0.0 {
        if disc > -1e-12 * scale {
            disc = 0.0;
        } else {
            return Err(Error::Domain(format!("no real y-roots at x = {x}")));
        }
    }
    let sq = disc.sqrt();
    let r1 = (-bq + sq) / (2.0 * aq);
    let r2 = (-bq - sq) / (2.0 * aq);
    let (hi, lo) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
    Ok(JohnState::new(x, if upper { hi } else { lo }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{EulerBaxterCurve, GeneralBiquadratic};

    const EX: EulerBaxterCurve = EulerBaxterCurve { a: 1.0, b: -3.0 };

    fn diag_seed() -> JohnState {
        let t = (2.0 + 3.0_f64.sqrt()).sqrt();
        JohnState::new(t, t)
    }

    #[test]
    fn vertical_involution_product_form() {
        // On (1,-3), y·y' = 1, so I1(t,t) = (t, 1/t).
        let s = diag_seed();
        let out = involution_vertical(&EX, &s).unwrap();
        assert!(!out.tangency);
        assert!((out.state.y - 1.0 / s.y).abs() < 1e-12);
        assert!((out.state.y - 0.517_638_090_205_041_5).abs() < 1e-9);
        assert!(EX.eval(out.state.x, out.state.y).abs() < 1e-12);
    }

    #[test]
    fn vertical_involution_sum_check() {
        let s = diag_seed();
        let out = involution_vertical(&EX, &s).unwrap();
        let t = s.x;
        let expected_sum = 6.0 * t / (t * t + 1.0);
        assert!((s.y + out.state.y - expected_sum).abs() < 1e-12);
        assert!((expected_sum - 2.449_489_742_783_178).abs() < 1e-12);
    }

    #[test]
    fn involutions_are_involutions() {
        let s = diag_seed();
        let once = involution_vertical(&EX, &s).unwrap().state;
        let twice = involution_vertical(&EX, &once).unwrap().state;
        assert!(s.dist(&twice) < 1e-12);
        let once_h = involution_horizontal(&EX, &s).unwrap().state;
        let twice_h = involution_horizontal(&EX, &once_h).unwrap().state;
        assert!(s.dist(&twice_h) < 1e-12);
        // x·x' = 1 on (1,-3)
        assert!((once_h.x * s.x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn horizontal_fixes_y_bit_identical() {
        let s = diag_seed();
        let out = involution_horizontal(&EX, &s).unwrap().state;
        assert!(out.y == s.y);
    }

    #[test]
    fn t_roundtrip_identity() {
        let s = seed_on_curve(&EX, 1.3, true).unwrap();
        let fwd = john_map(&EX, &s).unwrap().state;
        let back = john_map_inverse(&EX, &fwd).unwrap().state;
        assert!(s.dist(&back) < 1e-12);
    }

    #[test]
    fn orbit_stays_on_curve() {
        let s = seed_on_curve(&EX, 0.9, true).unwrap();
        let rec = orbit(&EX, &s, 10_000, 1e-8).unwrap();
        assert!(rec.max_residual < 1e-9, "residual {}", rec.max_residual);
    }

    #[test]
    fn a_equals_one_has_t_period_two() {
        // For a = 1 the curve is (x²+1)(y²+1) = -2bxy and T(x,y) = (1/x, 1/y).
        let s = seed_on_curve(&EX, 1.3, true).unwrap();
        let verdict = detect_period(&EX, &s, 16, 1e-8).unwrap();
        assert_eq!(verdict.period(), Some(2));
    }

    #[test]
    fn generic_curve_open() {
        let c = EulerBaxterCurve::new(1.37, -3.21);
        let s = seed_on_curve(&c, 1.0, true).unwrap();
        let verdict = detect_period(&c, &s, 2000, 1e-8).unwrap();
        match verdict {
            Closure::Open {
                min_return_distance,
            } => assert!(min_return_distance > 1e-8),
            Closure::Closed { n, .. } => panic!("unexpected closure at {n}"),
        }
    }

    #[test]
    fn off_curve_rejected() {
        let s = JohnState::new(1.0, 1.0);
        assert!(matches!(
            involution_vertical(&EX, &s),
            Err(Error::OffCurve { .. })
        ));
    }

    #[test]
    fn preconditions_checked() {
        let s = seed_on_curve(&EX, 1.3, true).unwrap();
        assert!(detect_period(&EX, &s, 0, 1e-8).is_err());
        assert!(detect_period(&EX, &s, 10, -1.0).is_err());
    }

    #[test]
    fn tangency_flagged_at_branch_edge() {
        let (lo, _) = EX.branch_x_interval().unwrap();
        let s = seed_on_curve(&EX, lo, true).unwrap();
        let out = involution_vertical(&EX, &s).unwrap();
        assert!(out.tangency);
        assert!(s.dist(&out.state) < 1e-9);
    }

    #[test]
    fn general_biquadratic_dynamics_match() {
        let g = GeneralBiquadratic::from_euler_baxter(&EX);
        let s = seed_on_curve(&EX, 1.21, false).unwrap();
        let a = john_map(&EX, &s).unwrap().state;
        let b = john_map(&g, &s).unwrap().state;
        assert!(a.dist(&b) < 1e-12);
    }

    #[test]
    fn orbit_csv_format() {
        let s = seed_on_curve(&EX, 1.3, true).unwrap();
        let rec = orbit(&EX, &s, 4, 1e-8).unwrap();
        let csv = orbit_csv(&rec);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,x,y,u,v"));
        assert_eq!(csv.lines().count(), 6);
    }

    #[test]
    fn transitive_orbit_fills_a_fine_net() {
        // Non-periodic case: the orbit of any seed visits a 1e-3-net of its
        // branch within 10^5 steps. Cells are (x-position, y-side) pairs at
        // resolution 5e-4 in normalized x.
        let c = EulerBaxterCurve::new(1.37, -3.21);
        let (lo, hi) = c.branch_x_interval().unwrap();
        let cells = 2000usize;
        let mut visited = vec![false; 2 * cells];
        let mut s = seed_on_curve(&c, 1.0, true).unwrap();
        for i in 0..100_000usize {
            let info = if i % 2 == 0 {
                involution_vertical(&c, &s).unwrap()
            } else {
                involution_horizontal(&c, &s).unwrap()
            };
            s = info.state;
            let u = ((s.x - lo) / (hi - lo)).clamp(0.0, 1.0);
            let cell = ((u * cells as f64) as usize).min(cells - 1);
            let (aq, bq, _) = c.y_quadratic(s.x);
            let upper = s.y >= -bq / (2.0 * aq);
            visited[2 * cell + usize::from(upper)] = true;
        }
        let unfilled = visited.iter().filter(|&&v| !v).count();
        assert_eq!(unfilled, 0, "{unfilled} of {} cells unvisited", 2 * cells);
    }

    #[test]
    fn dichotomy_periodic_curve_closes_from_any_seed() {
        use crate::elliptic::construct_periodic;
        let cc = construct_periodic(0.57, 1, 6).unwrap();
        for i in 0..25 {
            let seed = cc.params.john_seed(0.03 + 0.153 * i as f64).unwrap();
            let v = detect_period(&cc.curve, &seed, 64, 1e-8).unwrap();
            assert_eq!(v.period(), Some(6), "seed {i}");
        }
    }
}
