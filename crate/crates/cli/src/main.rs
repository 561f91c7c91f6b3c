mod report;

use anyhow::{anyhow, bail, Context, Result};
use bicurve_core::algebra::parse_rational;
use bicurve_core::cayley::{cayley_classify_float, FLOAT_GAP_TOL};
use bicurve_core::curve::{build_pencil, EulerBaxterCurve, RationalCurve};
use bicurve_core::elliptic::{construct_periodic, fit_params};
use bicurve_core::john::{orbit, orbit_csv, orbit_summary};
use bicurve_core::pellabel::{
    pell_construct_exact, pell_construct_float, PellAbelInstance, PellSign,
};
use bicurve_core::poncelet::{from_john, trajectory, trajectory_csv};
use bicurve_core::Error as CoreError;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use report::{analyze, parse_curve_param, render_text, AnalyzeConfig};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

const SCHEMA: &str = include_str!("../schema/analysis_report.schema.json");

#[derive(Parser)]
#[command(
    name = "bicurve",
    about = "Classify bi-quadratic boundary curves: John orbits, Poncelet closure, \
             Cayley-Hankel criterion, Pell-Abel solvability, and string-equation certificates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CurveArgs {
    /// Curve parameter a (number or exact "p/q")
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Curve parameter b (number or exact "p/q")
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Construct the curve from elliptic data instead of --a/--b
    #[arg(long, default_value_t = false)]
    construct: bool,
    /// Modulus k for --construct
    #[arg(long)]
    k: Option<f64>,
    /// Target John period N for --construct
    #[arg(long)]
    period: Option<u32>,
    /// Lattice numerator m for --construct (coprime to N)
    #[arg(long, default_value_t = 1)]
    m: u32,
}

impl CurveArgs {
    fn resolve(&self) -> Result<(EulerBaxterCurve, Option<RationalCurve>)> {
        if self.construct {
            let k = self.k.ok_or_else(|| anyhow!("--construct requires --k"))?;
            let n = self
                .period
                .ok_or_else(|| anyhow!("--construct requires --period"))?;
            let cc = construct_periodic(k, self.m, n)
                .map_err(|e| anyhow!("construction failed: {e}"))?;
            return Ok((cc.curve, None));
        }
        let a = self.a.as_deref().ok_or_else(|| anyhow!("missing --a"))?;
        let b = self.b.as_deref().ok_or_else(|| anyhow!("missing --b"))?;
        let (af, ar) = parse_curve_param(a)?;
        let (bf, br) = parse_curve_param(b)?;
        let exact = match (ar, br) {
            (Some(ar), Some(br)) => Some(RationalCurve::new(ar, br)),
            _ => None,
        };
        Ok((EulerBaxterCurve::new(af, bf), exact))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run all criteria on one curve and report agreement
    Analyze {
        #[command(flatten)]
        curve: CurveArgs,
        /// Largest period searched by every criterion
        #[arg(long, default_value_t = 64)]
        max_period: u32,
        /// Closure tolerance for the orbit detectors
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Output format: json or text
        #[arg(long, default_value = "text")]
        format: String,
        /// Number of independent seeds for the orbit criterion
        #[arg(long, default_value_t = 8)]
        seeds: u32,
        /// RNG seed for sampling-based checks
        #[arg(long, default_value_t = 0xB1C0DE)]
        seed: u64,
        /// Analyze even if the validity predicates fail
        #[arg(long, default_value_t = false)]
        force: bool,
    },
    /// Export a John orbit (and optionally its Poncelet trajectory) as CSV
    Orbit {
        #[command(flatten)]
        curve: CurveArgs,
        /// Number of half-steps to export
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Output CSV path (header n,x,y,u,v)
        #[arg(long)]
        out: PathBuf,
        /// Optional Poncelet trajectory CSV (header n,u,v,line0,line1,line2)
        #[arg(long)]
        poncelet_out: Option<PathBuf>,
        /// Optional JSON summary path
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Seed abscissa on the curve (defaults to mid-branch)
        #[arg(long)]
        seed_x: Option<f64>,
    },
    /// Rasterize classifications over an (a,b) grid to CSV
    Sweep {
        /// a range as lo:hi:step
        #[arg(long)]
        a_range: String,
        /// b range as lo:hi:step
        #[arg(long, allow_hyphen_values = true)]
        b_range: String,
        /// Ladder depth for the float classifier
        #[arg(long, default_value_t = 12)]
        max_period: u32,
        /// Output CSV path (header a,b,verdict,N)
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the Pell-Abel equation for a user-given quartic
    Pell {
        /// Quartic coefficients, highest degree first, e.g. "4,0,-4,0,0"
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        /// Equation sign: minus (A²− f̃B²=1), plus (A²+ f̃B²=1), or auto
        #[arg(long, default_value = "minus")]
        sign: String,
        /// Degree bound for A
        #[arg(long, default_value_t = 32)]
        dmax: usize,
        /// Residual tolerance on the float path
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Print the JSON schema of the analyze report
    Schema,
}

fn parse_range(s: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!("range must be lo:hi:step, got {s:?}");
    }
    let lo: f64 = parts[0].parse().context("range lo")?;
    let hi: f64 = parts[1].parse().context("range hi")?;
    let step: f64 = parts[2].parse().context("range step")?;
    if step <= 0.0 || hi < lo {
        bail!("range must satisfy lo <= hi and step > 0");
    }
    Ok((lo, hi, step))
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

fn pell_float(parts: &[&str], sign: PellSign, dmax: usize, tol: f64) -> Result<serde_json::Value> {
    let mut floats = Vec::with_capacity(parts.len());
    for s in parts {
        let f = s.parse::<f64>().or_else(|_| {
            parse_rational(s)
                .map(|r| bicurve_core::algebra::rational_to_f64(&r))
                .map_err(|e| anyhow!("coefficient {s:?}: {e}"))
        })?;
        floats.push(f);
    }
    floats.reverse();
    let inst = PellAbelInstance {
        f_tilde: bicurve_core::algebra::Poly::new(floats),
        linked_from_cubic: false,
    };
    Ok(pell_construct_float(&inst, sign, dmax, tol)
        .map_err(|e| anyhow!("{e}"))?
        .to_json())
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("PONCELET_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| anyhow!("PONCELET_THREADS must be an integer"))?;
        builder = builder.num_threads(n.max(1));
    }
    Ok(builder.build()?)
}

fn run() -> Result<u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            curve,
            max_period,
            tol,
            format,
            seeds,
            seed,
            force,
        } => {
            let (c, mut exact) = curve.resolve()?;
            if curve.construct {
                exact = None;
            }
            if let Some(p) = c.violated_predicate() {
                if !force {
                    eprintln!("error: invalid curve, violated predicate: {p}");
                    return Ok(1);
                }
            }
            let cfg = AnalyzeConfig {
                max_period,
                tol,
                seeds,
                rng_seed: seed,
                force,
            };
            let outcome = analyze(c, exact, &cfg)?;
            match format.as_str() {
                "json" => println!("{}", serde_json::to_string_pretty(&outcome.report)?),
                "text" => print!("{}", render_text(&outcome.report)),
                other => bail!("unknown format {other:?} (use json or text)"),
            }
            Ok(if outcome.all_agree { 0 } else { 2 })
        }
        Command::Orbit {
            curve,
            steps,
            out,
            poncelet_out,
            summary,
            seed_x,
        } => {
            let (c, _) = curve.resolve()?;
            if let Some(p) = c.violated_predicate() {
                eprintln!("error: invalid curve, violated predicate: {p}");
                return Ok(1);
            }
            let params = fit_params(&c).map_err(|e| anyhow!("{e}"))?;
            let seed = match seed_x {
                Some(x) => bicurve_core::john::seed_on_curve(&c, x, true)
                    .map_err(|e| anyhow!("seed_x rejected: {e}"))?,
                None => params.john_seed(0.37).map_err(|e| anyhow!("{e}"))?,
            };
            let rec = orbit(&c, &seed, steps, 1e-8).map_err(|e| anyhow!("{e}"))?;
            fs::write(&out, orbit_csv(&rec)).with_context(|| format!("writing {out:?}"))?;
            if let Some(path) = summary {
                let json = serde_json::to_string_pretty(&orbit_summary(&rec))?;
                fs::write(&path, json).with_context(|| format!("writing {path:?}"))?;
            }
            if let Some(path) = poncelet_out {
                let pencil = build_pencil(&c).map_err(|e| anyhow!("{e}"))?;
                let pseed = from_john(seed.x, seed.y, &pencil).map_err(|e| anyhow!("{e}"))?;
                let traj = trajectory(&pseed, &pencil, steps).map_err(|e| anyhow!("{e}"))?;
                fs::write(&path, trajectory_csv(&traj))
                    .with_context(|| format!("writing {path:?}"))?;
            }
            Ok(0)
        }
        Command::Sweep {
            a_range,
            b_range,
            max_period,
            out,
        } => {
            let (a_lo, a_hi, da) = parse_range(&a_range)?;
            let (b_lo, b_hi, db) = parse_range(&b_range)?;
            let avals = grid(a_lo, a_hi, da);
            let bvals = grid(b_lo, b_hi, db);
            let cells: Vec<(f64, f64)> = bvals
                .iter()
                .flat_map(|&b| avals.iter().map(move |&a| (a, b)))
                .collect();
            let pool = thread_pool()?;
            let rows: Vec<String> = pool.install(|| {
                cells
                    .par_iter()
                    .map(|&(a, b)| {
                        let c = EulerBaxterCurve::new(a, b);
                        let (verdict, n) = if !c.is_valid() {
                            ("invalid", String::new())
                        } else {
                            match cayley_classify_float(&c, max_period, FLOAT_GAP_TOL) {
                                Ok(rep) => match rep.period {
                                    Some(n) => ("periodic", n.to_string()),
                                    None => ("open", String::new()),
                                },
                                Err(CoreError::Degenerate(_)) => ("degenerate", String::new()),
                                Err(_) => ("error", String::new()),
                            }
                        };
                        format!("{a},{b},{verdict},{n}")
                    })
                    .collect()
            });
            let mut csv = String::from("a,b,verdict,N\n");
            for row in rows {
                csv.push_str(&row);
                csv.push('\n');
            }
            fs::write(&out, csv).with_context(|| format!("writing {out:?}"))?;
            Ok(0)
        }
        Command::Pell {
            poly,
            sign,
            dmax,
            tol,
        } => {
            let sign = match sign.as_str() {
                "minus" => PellSign::Minus,
                "plus" => PellSign::Plus,
                "auto" => PellSign::Auto,
                other => bail!("unknown sign {other:?} (use plus, minus, or auto)"),
            };
            let parts: Vec<&str> = poly.split(',').map(str::trim).collect();
            if parts.len() != 5 {
                bail!("--poly needs 5 coefficients (degree 4, highest first)");
            }
            // exact path when every coefficient parses as a rational;
            // non-square leading coefficients fall back to floats
            let rats: Option<Vec<_>> = parts.iter().map(|s| parse_rational(s).ok()).collect();
            let json = match rats {
                Some(mut rats) => {
                    rats.reverse();
                    let inst = PellAbelInstance {
                        f_tilde: bicurve_core::algebra::Poly::new(rats),
                        linked_from_cubic: false,
                    };
                    match pell_construct_exact(&inst, sign, dmax) {
                        Ok(out) => out.to_json(),
                        Err(_) => pell_float(&parts, sign, dmax, tol)?,
                    }
                }
                None => pell_float(&parts, sign, dmax, tol)?,
            };
            println!("{}", serde_json::to_string_pretty(&json)?);
            Ok(0)
        }
        Command::Schema => {
            println!("{SCHEMA}");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
