//! The analyze pipeline: runs every criterion on one curve with shared
//! configuration and assembles the cross-criterion agreement matrix.

use anyhow::{anyhow, Result};
use bicurve_core::algebra::{parse_rational, rational_to_f64};
use bicurve_core::boundary::{
    build_nontrivial_solution, dirichlet_to_neumann, propagate_boundary_values,
};
use bicurve_core::cayley::{cayley_classify, cayley_classify_float, FLOAT_GAP_TOL};
use bicurve_core::curve::{build_pencil, rational_pencil_poly, EulerBaxterCurve, RationalCurve};
use bicurve_core::elliptic::{fit_params, lattice_period_test, EllipticParams, LatticeVerdict};
use bicurve_core::john::{detect_period, Closure};
use bicurve_core::pellabel::{
    pell_construct_exact, pell_construct_float, pell_solvable, reverse_link, PellSign,
};
use bicurve_core::poncelet::{detect_closure, from_john};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

pub struct AnalyzeConfig {
    pub max_period: u32,
    pub tol: f64,
    pub seeds: u32,
    pub rng_seed: u64,
    pub force: bool,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            max_period: 64,
            tol: 1e-10,
            seeds: 8,
            rng_seed: 0xB1C0DE,
            force: false,
        }
    }
}

/// Periodicity content of one criterion, normalized to the John count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Normalized {
    Periodic { john_period: u32 },
    Open,
    /// Boolean-only criteria (Pell construction, Dirichlet builder).
    PeriodicUnnumbered,
    Unavailable,
}

fn johnize_poncelet(n_p: u32) -> u32 {
    if n_p.is_multiple_of(2) {
        n_p / 2
    } else {
        n_p
    }
}

fn agree(a: &Normalized, b: &Normalized) -> Option<bool> {
    use Normalized::*;
    match (a, b) {
        (Unavailable, _) | (_, Unavailable) => None,
        (Open, Open) => Some(true),
        (Open, _) | (_, Open) => Some(false),
        (Periodic { john_period: x }, Periodic { john_period: y }) => Some(x == y),
        (PeriodicUnnumbered, Periodic { .. }) | (Periodic { .. }, PeriodicUnnumbered) => Some(true),
        (PeriodicUnnumbered, PeriodicUnnumbered) => Some(true),
    }
}

pub struct AnalysisOutcome {
    pub report: Value,
    pub all_agree: bool,
}

pub fn analyze(
    curve: EulerBaxterCurve,
    exact: Option<RationalCurve>,
    cfg: &AnalyzeConfig,
) -> Result<AnalysisOutcome> {
    if let Some(p) = curve.violated_predicate() {
        if !cfg.force {
            return Err(anyhow!("invalid curve: violated predicate {p}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut labels: Vec<&str> = Vec::new();
    let mut norms: Vec<Normalized> = Vec::new();
    let mut report = serde_json::Map::new();

    report.insert(
        "curve".into(),
        json!({
            "a": curve.a,
            "b": curve.b,
            "a_exact": exact.as_ref().map(|c| bicurve_core::algebra::rational_to_string(&c.a)),
            "b_exact": exact.as_ref().map(|c| bicurve_core::algebra::rational_to_string(&c.b)),
            "valid": curve.is_valid(),
        }),
    );

    // elliptic fit first: it supplies on-curve seeds for the dynamics
    let params: Option<EllipticParams> = fit_params(&curve).ok();

    // --- John orbit periodicity ---
    let john_norm;
    let john_json;
    if let Some(p) = &params {
        let mut verdicts: Vec<Option<usize>> = Vec::new();
        let mut first: Option<Closure> = None;
        for s in 0..cfg.seeds {
            let offset = 0.37 + 0.613 * s as f64 + rng.gen_range(0.0..0.1);
            let seed = p
                .john_seed(offset)
                .map_err(|e| anyhow!("seeding failed: {e}"))?;
            match detect_period(&curve, &seed, cfg.max_period as usize, cfg.tol.max(1e-12)) {
                Ok(v) => {
                    verdicts.push(v.period());
                    if first.is_none() {
                        first = Some(v);
                    }
                }
                Err(_) => verdicts.push(None), // tangency orbit: excluded
            }
        }
        let agree_all = verdicts.windows(2).all(|w| w[0] == w[1]);
        let period = verdicts.first().cloned().flatten();
        john_norm = match period {
            Some(n) => Normalized::Periodic {
                john_period: n as u32,
            },
            None => Normalized::Open,
        };
        john_json = json!({
            "closure": if period.is_some() { "closed" } else { "open" },
            "N": period,
            "seeds_checked": cfg.seeds,
            "seeds_agree": agree_all,
            "detail": first.map(|c| serde_json::to_value(c).unwrap()),
        });
    } else {
        john_norm = Normalized::Unavailable;
        john_json = json!({"closure": "unavailable", "reason": "no elliptic fit (curve outside the fit family)"});
    }
    labels.push("john");
    norms.push(john_norm);
    report.insert("john".into(), john_json);

    // --- Poncelet closure ---
    let pencil = build_pencil(&curve).ok();
    let ponc_norm;
    let ponc_json;
    if let (Some(p), Some(pencil)) = (&params, &pencil) {
        let seed_j = p.john_seed(0.37).map_err(|e| anyhow!("{e}"))?;
        let seed = from_john(seed_j.x, seed_j.y, pencil).map_err(|e| anyhow!("{e}"))?;
        match detect_closure(&seed, pencil, 2 * cfg.max_period as usize + 2, cfg.tol.max(1e-12)) {
            Ok(v) => {
                let np = v.period();
                ponc_norm = match np {
                    Some(n) => Normalized::Periodic {
                        john_period: johnize_poncelet(n as u32),
                    },
                    None => Normalized::Open,
                };
                ponc_json = json!({
                    "closure": if np.is_some() { "closed" } else { "open" },
                    "N_P": np,
                    "john_equivalent": np.map(|n| johnize_poncelet(n as u32)),
                });
            }
            Err(e) => {
                ponc_norm = Normalized::Unavailable;
                ponc_json = json!({"closure": "unavailable", "reason": e.to_string()});
            }
        }
    } else {
        ponc_norm = Normalized::Unavailable;
        ponc_json = json!({"closure": "unavailable"});
    }
    labels.push("poncelet");
    norms.push(ponc_norm);
    report.insert("poncelet".into(), ponc_json);

    // --- Cayley criterion ---
    let ladder_max = cfg.max_period.max(4);
    let mut cayley_period: Option<u32> = None;
    let mut exact_report = None;
    let cayley_json = if let Some(rc) = &exact {
        match cayley_classify(rc, ladder_max) {
            Ok(rep) => {
                cayley_period = rep.period;
                let v = serde_json::to_value(&rep)?;
                exact_report = Some(rep);
                json!({"mode": "exact", "period": cayley_period, "report": v})
            }
            Err(e) => json!({"mode": "exact", "error": e.to_string()}),
        }
    } else {
        match cayley_classify_float(&curve, ladder_max.min(20), FLOAT_GAP_TOL) {
            Ok(rep) => {
                cayley_period = rep.period;
                json!({
                    "mode": "float",
                    "period": rep.period,
                    "rho": rep.rho,
                    "verdicts": serde_json::to_value(&rep.verdicts)?,
                    "note": "float ladder is a heuristic; rational inputs classify exactly",
                })
            }
            Err(e) => json!({"mode": "float", "error": e.to_string()}),
        }
    };
    let cayley_errored = cayley_json.get("error").is_some();
    let cayley_norm = match cayley_period {
        Some(n) => Normalized::Periodic {
            john_period: johnize_poncelet(n),
        },
        None => {
            if cayley_errored {
                Normalized::Unavailable
            } else {
                Normalized::Open
            }
        }
    };
    labels.push("cayley");
    norms.push(cayley_norm);
    report.insert("cayley".into(), cayley_json);

    // --- Pell-Abel ---
    let dmax = (2 * cfg.max_period as usize).max(32);
    let pell_norm;
    let pell_json;
    {
        let construct_found;
        let construct_json;
        if let Some(rc) = &exact {
            let f = rational_pencil_poly(rc);
            let inst = reverse_link(&f).map_err(|e| anyhow!("{e}"))?;
            match pell_construct_exact(&inst, PellSign::Auto, dmax) {
                Ok(out) => {
                    construct_found = Some(out.found());
                    construct_json = out.to_json();
                }
                Err(e) => {
                    construct_found = None;
                    construct_json = json!({"error": e.to_string()});
                }
            }
        } else if let Some(pencil) = &pencil {
            let inst = reverse_link(&pencil.f).map_err(|e| anyhow!("{e}"))?;
            match pell_construct_float(&inst, PellSign::Auto, dmax, 1e-8) {
                Ok(out) => {
                    construct_found = Some(out.found());
                    construct_json = out.to_json();
                }
                Err(e) => {
                    construct_found = None;
                    construct_json = json!({"error": e.to_string()});
                }
            }
        } else {
            construct_found = None;
            construct_json = json!({"error": "no pencil"});
        }
        let solvable_json = exact_report
            .as_ref()
            .map(|rep| serde_json::to_value(pell_solvable(rep, ladder_max)).unwrap())
            .unwrap_or(Value::Null);
        // parity rule under test: even minimal Poncelet period <=> solvable
        // (an empty ladder predicts unsolvable up to the bound)
        let proposition_consistent = match (cayley_period, construct_found) {
            (Some(n), Some(f)) => Some((n % 2 == 0) == f),
            (None, Some(f)) if !cayley_errored => Some(!f),
            _ => None,
        };
        pell_norm = match construct_found {
            Some(true) => Normalized::PeriodicUnnumbered,
            Some(false) => Normalized::Open,
            None => Normalized::Unavailable,
        };
        pell_json = json!({
            "construct": construct_json,
            "solvable_by_even_period_rule": solvable_json,
            "proposition_even_iff_solvable_consistent": proposition_consistent,
        });
    }
    labels.push("pell");
    norms.push(pell_norm);
    report.insert("pell".into(), pell_json);

    // --- Elliptic lattice test ---
    let ell_norm;
    let ell_json;
    if let Some(p) = &params {
        let verdict = lattice_period_test(p, cfg.max_period.max(16), 1e-9);
        match verdict {
            LatticeVerdict::Rational { n, m1, m2, err } => {
                ell_norm = Normalized::Periodic { john_period: n };
                ell_json = json!({
                    "params": serde_json::to_value(p)?,
                    "lattice": {"kind": "rational", "N": n, "m1": m1, "m2": m2, "err": err},
                });
            }
            LatticeVerdict::Irrational {
                best_n,
                best_m1,
                best_m2,
                best_err,
            } => {
                ell_norm = Normalized::Open;
                ell_json = json!({
                    "params": serde_json::to_value(p)?,
                    "lattice": {"kind": "irrational", "best_N": best_n, "best_m1": best_m1,
                                 "best_m2": best_m2, "best_err": best_err},
                });
            }
        }
    } else {
        ell_norm = Normalized::Unavailable;
        ell_json = json!({"error": "no elliptic fit"});
    }
    labels.push("elliptic");
    norms.push(ell_norm);
    report.insert("elliptic".into(), ell_json);

    // --- Dirichlet / Neumann certificates ---
    let dir_norm;
    let dir_json;
    if let Some(p) = &params {
        match build_nontrivial_solution(p, 1) {
            Ok(sol) => {
                let neumann = dirichlet_to_neumann(&sol).ok();
                dir_norm = Normalized::PeriodicUnnumbered;
                dir_json = json!({
                    "nontrivial_solution": sol.summary_json(),
                    "neumann": neumann.map(|n| n.summary_json()),
                });
            }
            Err(_) => {
                // non-periodic (or rejected): run the propagation certificate
                let seed = p.john_seed(0.37).map_err(|e| anyhow!("{e}"))?;
                match propagate_boundary_values(&curve, &seed, 10_000, 1e-2) {
                    Ok(cert) => {
                        dir_norm = if cert.forced_constant {
                            Normalized::Open
                        } else if cert.closure.period().is_some() {
                            Normalized::Periodic {
                                john_period: cert.closure.period().unwrap() as u32,
                            }
                        } else {
                            Normalized::Unavailable
                        };
                        dir_json = json!({"propagation": serde_json::to_value(&cert)?});
                    }
                    Err(e) => {
                        dir_norm = Normalized::Unavailable;
                        dir_json = json!({"error": e.to_string()});
                    }
                }
            }
        }
    } else {
        dir_norm = Normalized::Unavailable;
        dir_json = json!({"error": "no elliptic fit"});
    }
    labels.push("dirichlet");
    norms.push(dir_norm);
    report.insert("dirichlet".into(), dir_json);

    // --- agreement matrix ---
    let n = labels.len();
    let mut matrix = vec![vec![Value::Null; n]; n];
    let mut all_agree = true;
    let mut disagreements: Vec<String> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            match agree(&norms[i], &norms[j]) {
                Some(v) => {
                    matrix[i][j] = json!(v);
                    if !v && i < j {
                        all_agree = false;
                        disagreements.push(format!(
                            "{} ({:?}) vs {} ({:?})",
                            labels[i], norms[i], labels[j], norms[j]
                        ));
                    }
                }
                None => matrix[i][j] = Value::Null,
            }
        }
    }
    report.insert(
        "agreement".into(),
        json!({
            "labels": labels,
            "matrix": matrix,
            "all_agree": all_agree,
            "disagreements": disagreements,
        }),
    );

    Ok(AnalysisOutcome {
        report: Value::Object(report),
        all_agree,
    })
}

/// Parses a CLI curve parameter: exact when "p/q", integer, or decimal.
pub fn parse_curve_param(s: &str) -> Result<(f64, Option<bicurve_core::algebra::Rational>)> {
    if let Ok(r) = parse_rational(s) {
        let f = rational_to_f64(&r);
        return Ok((f, Some(r)));
    }
    let f: f64 = s
        .parse()
        .map_err(|_| anyhow!("cannot parse {s:?} as a number or p/q rational"))?;
    Ok((f, None))
}

/// Renders the report as aligned text for human eyes.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    let curve = &v["curve"];
    out.push_str(&format!(
        "curve: a = {}, b = {} (valid: {})\n",
        curve["a"], curve["b"], curve["valid"]
    ));
    let row = |name: &str, summary: String| format!("{name:<10} {summary}\n");
    out.push_str(&row(
        "john",
        format!("closure={} N={}", v["john"]["closure"], v["john"]["N"]),
    ));
    out.push_str(&row(
        "poncelet",
        format!(
            "closure={} N_P={} john_equiv={}",
            v["poncelet"]["closure"], v["poncelet"]["N_P"], v["poncelet"]["john_equivalent"]
        ),
    ));
    out.push_str(&row(
        "cayley",
        format!(
            "mode={} period={}",
            v["cayley"]["mode"], v["cayley"]["period"]
        ),
    ));
    out.push_str(&row(
        "pell",
        format!(
            "construct={} proposition_consistent={}",
            v["pell"]["construct"]["outcome"],
            v["pell"]["proposition_even_iff_solvable_consistent"]
        ),
    ));
    out.push_str(&row(
        "elliptic",
        format!("lattice={}", v["elliptic"]["lattice"]),
    ));
    let dirichlet = if v["dirichlet"]["nontrivial_solution"].is_object() {
        format!(
            "nontrivial solution: residual={} interior={}",
            v["dirichlet"]["nontrivial_solution"]["boundary_residual"],
            v["dirichlet"]["nontrivial_solution"]["interior_magnitude"]
        )
    } else {
        format!("propagation: {}", v["dirichlet"]["propagation"])
    };
    out.push_str(&row("dirichlet", dirichlet));
    out.push_str(&format!(
        "agreement: all_agree={}",
        v["agreement"]["all_agree"]
    ));
    let empty = Vec::new();
    let disagreements = v["agreement"]["disagreements"].as_array().unwrap_or(&empty);
    if !disagreements.is_empty() {
        out.push_str("\nDISAGREEMENTS:\n");
        for d in disagreements {
            out.push_str(&format!("  !! {d}\n"));
        }
    }
    out.push('\n');
    out
}
