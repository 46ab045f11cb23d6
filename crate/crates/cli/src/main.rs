mod args;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ellsigma::classes::{f_eval_scaled, r_eval};
use ellsigma::theta::{self, DEFAULT_TRUNCATION_TOL};
use ellsigma::verify::{self, SUITES};
use ellsigma::{lift, CurveParams, CurvePoint, Jet, JetShape, RunConfig, ThetaFunction, ToyBundle};
use num_complex::Complex64;

use args::{format_complex, parse_complex, parse_ints, IntList};

#[derive(Parser)]
#[command(
    name = "ellsigma",
    version,
    about = "Sigma orientation evaluators and verification suites"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a single function and print the value.
    Eval {
        #[command(subcommand)]
        what: Eval,
    },
    /// Run a verification suite (or `all`) and emit a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct Curve {
    /// Period ratio τ, as `re,im`, `i` or `a+bi`.
    #[arg(long, default_value = "i", value_parser = parse_complex, allow_hyphen_values = true)]
    tau: Complex64,
}

#[derive(Args, Clone)]
struct Point {
    /// Torsion point `s,t` with rational coordinates, e.g. `0,1/2`.
    #[arg(long, allow_hyphen_values = true)]
    a: CurvePoint,
    /// Lift shift along `2πi`.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    shift_s: i64,
    /// Lift shift along `2πiτ`.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    shift_t: i64,
}

#[derive(Subcommand)]
enum Eval {
    /// σ(z).
    Sigma {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        #[command(flatten)]
        curve: Curve,
    },
    /// σ_d(z₁, …, z_d); repeat `--z` once per coordinate.
    #[command(name = "sigma_d")]
    SigmaD {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, required = true)]
        z: Vec<Complex64>,
        #[command(flatten)]
        curve: Curve,
    },
    /// F(θ, m̄, ā) at the point `m̄ z`.
    #[command(name = "F")]
    F {
        /// Theta descriptor, e.g. `sigma_d(2)` or `pow(sigma_d(1),2)`.
        #[arg(long)]
        theta: String,
        #[arg(long, value_parser = parse_ints, allow_hyphen_values = true)]
        m: IntList,
        #[command(flatten)]
        point: Point,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        #[command(flatten)]
        curve: Curve,
    },
    /// R(V, ā) for the split Spin bundle with rotation numbers `m` and zero roots.
    #[command(name = "R")]
    R {
        #[arg(long, value_parser = parse_ints, allow_hyphen_values = true)]
        m: IntList,
        #[command(flatten)]
        point: Point,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        #[command(flatten)]
        curve: Curve,
    },
    /// The Weil pairing w(a, q^{1/n}).
    Weil {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        curve: Curve,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// One of the suite names, or `all`.
    suite: String,
    #[command(flatten)]
    curve: Curve,
    /// Largest spin rank sampled.
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Trials per suite; each suite has its own default.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = ellsigma::jet::DEFAULT_DEGREE_CAP)]
    degree_cap: usize,
    #[arg(long, default_value_t = 6)]
    torsion_bound: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

fn params(c: &Curve) -> Result<CurveParams> {
    Ok(CurveParams::new(c.tau)?)
}

fn print_truncation(z: Complex64, p: &CurveParams) {
    println!(
        "tau: {}  q-product factors: {}  truncation tol: {:e}",
        format_complex(p.tau()),
        theta::truncation_terms(z, p, DEFAULT_TRUNCATION_TOL),
        DEFAULT_TRUNCATION_TOL
    );
}

fn constant_points(m: &[i64], z: Complex64) -> (Vec<Jet>, JetShape) {
    let shape = JetShape::new(0, 0);
    (
        m.iter()
            .map(|&mi| Jet::constant(z * mi as f64, shape))
            .collect(),
        shape,
    )
}

fn eval(what: Eval) -> Result<()> {
    match what {
        Eval::Sigma { z, curve } => {
            let p = params(&curve)?;
            println!("sigma: {}", format_complex(theta::sigma(z, &p)));
            print_truncation(z, &p);
        }
        Eval::SigmaD { z, curve } => {
            let p = params(&curve)?;
            println!("sigma_d: {}", format_complex(theta::sigma_d(&z, &p)));
            let worst = z
                .iter()
                .copied()
                .max_by(|a, b| a.im.abs().total_cmp(&b.im.abs()));
            print_truncation(worst.unwrap_or_default(), &p);
        }
        Eval::F {
            theta: desc,
            m: IntList(m),
            point,
            z,
            curve,
        } => {
            let p = params(&curve)?;
            let th = ThetaFunction::parse(&desc)?;
            let l = lift(&point.a, point.shift_s, point.shift_t, &p);
            let (pts, shape) = constant_points(&m, z);
            let f = f_eval_scaled(&th, &m, &l, &pts, shape, &p)?.into_jet()?;
            println!("F: {}", format_complex(f.constant_term()));
            let (ell, k) = l.ell_k();
            println!(
                "theta: {th}  n: {}  (l, k): ({ell}, {k})  abar: {}",
                l.order(),
                format_complex(l.abar())
            );
            print_truncation(
                l.abar() * m.iter().map(|x| x.abs()).max().unwrap_or(0) as f64 + z,
                &p,
            );
        }
        Eval::R {
            m: IntList(m),
            point,
            z,
            curve,
        } => {
            let p = params(&curve)?;
            let shape = JetShape::new(0, 0);
            let roots = vec![Jet::zero(shape); m.len()];
            let v = ToyBundle::spin(m, roots, shape)?;
            let l = lift(&point.a, point.shift_s, point.shift_t, &p);
            let r = r_eval(&v, &l, z, &p)?.into_jet()?;
            println!("R: {}", format_complex(r.constant_term()));
            println!(
                "n: {}  fixed indices: {:?}",
                l.order(),
                v.fixed_indices(l.order())
            );
        }
        Eval::Weil { point, curve } => {
            let p = params(&curve)?;
            let l = lift(&point.a, point.shift_s, point.shift_t, &p);
            let w = ellsigma::weil_pairing(&point.a, &l, &p)?;
            println!("weil: {}", format_complex(w));
            let (ell, k) = l.ell_k();
            println!("n: {}  (l, k): ({ell}, {k})", l.order());
        }
    }
    Ok(())
}

/// Exit status: 0 when every suite passes, 1 when one fails.
fn verify(a: VerifyArgs) -> Result<bool> {
    if a.suite != "all" && !SUITES.contains(&a.suite.as_str()) {
        bail!(
            "unknown suite `{}`; expected one of {} or all",
            a.suite,
            SUITES.join(", ")
        );
    }
    let cfg = RunConfig {
        tau: a.curve.tau,
        d: a.d,
        torsion_bound: a.torsion_bound,
        trials: a.trials,
        seed: a.seed,
        tol: a.tol,
        degree_cap: a.degree_cap,
        jobs: a.jobs,
    };
    let report = verify::run(&a.suite, &cfg)?;
    for s in &report.suites {
        eprintln!(
            "{:<20} {}  trials {:>5}  max residual {:.3e}  tolerance {:.0e}  {:.2}s",
            s.name,
            if s.pass { "pass" } else { "FAIL" },
            s.trials,
            s.max_residual,
            s.tolerance,
            s.wall_time_s
        );
        for c in s.checks.iter().filter(|c| !c.pass) {
            eprintln!(
                "    {} = {:e} ({:?} {:e})",
                c.name, c.value, c.comparison, c.threshold
            );
        }
        for e in s.errors.iter().take(3) {
            eprintln!("    {e}");
        }
    }
    let json = report.to_json();
    match &a.out {
        Some(path) => std::fs::write(path, json + "\n")
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{json}"),
    }
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Eval { what } => eval(what).map(|_| true),
        Cmd::Verify(a) => verify(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
