//! Poncelet tangent-chord dynamics for the pencil (parabola D, quadric B):
//! tangent construction through the dual conic, the Poncelet step, closure
//! detection, and the correspondence with the John half-step sequence.
//!
//! States carry the incoming line because a point alone does not determine
//! the next step; the second tangent from the landing point is the one to
//! follow.

use crate::curve::{v_transform, Conic, ConicPencil};
use crate::error::{Error, Result};
use crate::john::Closure;

pub type Vec3 = [f64; 3];

pub fn normalize(v: Vec3) -> Vec3 {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n == 0.0 {
        v
    } else {
        [v[0] / n, v[1] / n, v[2] / n]
    }
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Distance on the projective sphere (antipodal points identified).
pub fn chordal_distance(p: &Vec3, q: &Vec3) -> f64 {
    let p = normalize(*p);
    let q = normalize(*q);
    let dm: f64 = (0..3).map(|i| (p[i] - q[i]).powi(2)).sum();
    let dp: f64 = (0..3).map(|i| (p[i] + q[i]).powi(2)).sum();
    dm.min(dp).sqrt()
}

#[derive(Clone, Copy, Debug)]
pub struct PonceletState {
    /// Projective point on the quadric B, unit-normalized.
    pub point: Vec3,
    /// Tangent line of D along which the point was reached. The seed state
    /// stores the tangent NOT to be taken first.
    pub incoming: Option<Vec3>,
}

/// The tangent lines to conic `d` through point `p`, via the dual conic
/// adj(d): a line ℓ is tangent iff ℓᵀ·adj(d)·ℓ = 0.
pub enum TangentLines {
    Two(Vec3, Vec3),
    /// p lies on d: the tangents coincide.
    One(Vec3),
}

pub fn tangents_from(p: &Vec3, d: &Conic) -> Result<TangentLines> {
    let adj = d.adjugate();
    let quad = |l: &Vec3| {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += l[i] * adj[i][j] * l[j];
            }
        }
        acc
    };
    // Pencil of lines through p, spanned by the two best coordinate joins.
    let mut joins: Vec<Vec3> = (0..3)
        .map(|i| {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            cross(p, &e)
        })
        .collect();
    joins.sort_by(|a, b| dot(b, b).total_cmp(&dot(a, a)));
    let g = normalize(joins[0]);
    // Orthogonalize the second generator against the first.
    let mut h = joins[1];
    let gh = dot(&h, &g);
    for i in 0..3 {
        h[i] -= gh * g[i];
    }
    let h = normalize(h);
    let qa = quad(&h);
    let qc = quad(&g);
    let mut qb = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            qb += g[i] * adj[i][j] * h[j];
        }
    }
    // lines g + t h: qa t^2 + 2 qb t + qc = 0
    let disc = qb * qb - qa * qc;
    let scale = (qb * qb).abs().max((qa * qc).abs()).max(1e-300);
    if disc < 0.0 && disc.abs() > 1e-12 * scale {
        return Err(Error::Domain(
            "no real tangents: point lies inside the conic".into(),
        ));
    }
    if disc.abs() <= 1e-12 * scale {
        let t = -qb / qa;
        let line = normalize([g[0] + t * h[0], g[1] + t * h[1], g[2] + t * h[2]]);
        return Ok(TangentLines::One(line));
    }
    let sq = disc.sqrt();
    // Stable quadratic roots.
    let q = -(qb + qb.signum() * sq);
    let (t1, t2) = if qa.abs() > 1e-300 && q.abs() > 1e-300 {
        (q / qa, qc / q)
    } else {
        ((-qb + sq) / qa, (-qb - sq) / qa)
    };
    let mk = |t: f64| normalize([g[0] + t * h[0], g[1] + t * h[1], g[2] + t * h[2]]);
    Ok(TangentLines::Two(mk(t1), mk(t2)))
}

/// Tangency parameter x₀ of a parabola tangent v = x₀u − x₀², from the line
/// coefficients ℓ·(1, u, v) = 0.
pub fn parabola_tangent_param(line: &Vec3) -> Option<f64> {
    if line[2].abs() < 1e-14 {
        None
    } else {
        Some(-line[1] / line[2])
    }
}

/// Second intersection of a line with conic B, given a point p already on
/// both.
fn other_intersection(p: &Vec3, line: &Vec3, b: &Conic) -> Result<Vec3> {
    // A second point q on the line, orthogonalized against p.
    let mut best: Option<Vec3> = None;
    let mut best_norm = -1.0;
    for i in 0..3 {
        let mut e = [0.0; 3];
        e[i] = 1.0;
        let cand = cross(line, &e);
        let mut q = cand;
        let qp = dot(&q, p);
        for j in 0..3 {
            q[j] -= qp * p[j];
        }
        let n = dot(&q, &q);
        if n > best_norm {
            best_norm = n;
            best = Some(q);
        }
    }
    let q = normalize(best.ok_or_else(|| Error::Numeric("degenerate line".into()))?);
    let pbq = dot(p, &b.mat_vec(&q));
    let qbq = dot(&q, &b.mat_vec(&q));
    if qbq.abs() < 1e-300 {
        return Err(Error::Numeric("chord direction annihilates the conic".into()));
    }
    let t = -2.0 * pbq / qbq;
    if t.abs() < 1e-12 {
        return Err(Error::Tangency(
            "chord is tangent to the point conic (double intersection)".into(),
        ));
    }
    Ok(normalize([
        p[0] + t * q[0],
        p[1] + t * q[1],
        p[2] + t * q[2],
    ]))
}

/// Seed state at the projective point `p` on B. `first_tangent_param`
/// selects the branch: the first chord follows the tangent whose parabola
/// parameter is closest to it.
pub fn seed_state(p: Vec3, first_tangent_param: Option<f64>, pencil: &ConicPencil) -> Result<PonceletState> {
    let p = normalize(p);
    let incoming = match tangents_from(&p, &pencil.tangent_conic)? {
        TangentLines::One(l) => Some(l),
        TangentLines::Two(l1, l2) => match first_tangent_param {
            None => Some(l2),
            Some(target) => {
                let d1 = parabola_tangent_param(&l1).map(|t| (t - target).abs());
                let d2 = parabola_tangent_param(&l2).map(|t| (t - target).abs());
                // Store the tangent NOT to take: the one farther from target.
                match (d1, d2) {
                    (Some(a), Some(b)) if a <= b => Some(l2),
                    (Some(_), Some(_)) => Some(l1),
                    (Some(_), None) => Some(l2),
                    _ => Some(l1),
                }
            }
        },
    };
    Ok(PonceletState { point: p, incoming })
}

/// Seed state from the V-image of a John state (x, y); the first chord is
/// the image of the vertical move, i.e. the tangent with parameter x.
pub fn from_john(x: f64, y: f64, pencil: &ConicPencil) -> Result<PonceletState> {
    let (u, v) = v_transform(x, y);
    seed_state([1.0, u, v], Some(x), pencil)
}

/// One Poncelet step: follow the tangent other than the incoming line to
/// the second intersection with B.
pub fn poncelet_step(s: &PonceletState, pencil: &ConicPencil) -> Result<PonceletState> {
    let chord = match tangents_from(&s.point, &pencil.tangent_conic)? {
        TangentLines::One(l) => l,
        TangentLines::Two(l1, l2) => match &s.incoming {
            None => l1,
            Some(inc) => {
                // take the tangent farther from the incoming line
                let d1 = chordal_distance(&l1, inc);
                let d2 = chordal_distance(&l2, inc);
                if d1 >= d2 {
                    l1
                } else {
                    l2
                }
            }
        },
    };
    let next = other_intersection(&s.point, &chord, &pencil.point_conic)?;
    Ok(PonceletState {
        point: next,
        incoming: Some(chord),
    })
}

/// Smallest N ≤ nmax with chordal return distance < tol, else Open.
pub fn detect_closure(
    seed: &PonceletState,
    pencil: &ConicPencil,
    nmax: usize,
    tol: f64,
) -> Result<Closure> {
    if nmax < 1 {
        return Err(Error::Domain("nmax must be >= 1".into()));
    }
    let mut s = *seed;
    let mut min_dist = f64::INFINITY;
    for n in 1..=nmax {
        s = poncelet_step(&s, pencil)?;
        let d = chordal_distance(&s.point, &seed.point);
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

/// Trajectory rows (point + incoming line) for export.
pub fn trajectory(seed: &PonceletState, pencil: &ConicPencil, steps: usize) -> Result<Vec<PonceletState>> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = *seed;
    out.push(s);
    for _ in 0..steps {
        s = poncelet_step(&s, pencil)?;
        out.push(s);
    }
    Ok(out)
}

/// CSV export: header n,u,v,line0,line1,line2.
pub fn trajectory_csv(states: &[PonceletState]) -> String {
    let mut out = String::from("n,u,v,line0,line1,line2\n");
    for (n, s) in states.iter().enumerate() {
        let u = s.point[1] / s.point[0];
        let v = s.point[2] / s.point[0];
        let l = s.incoming.unwrap_or([0.0; 3]);
        out.push_str(&format!("{n},{u},{v},{},{},{}\n", l[0], l[1], l[2]));
    }
    out
}
