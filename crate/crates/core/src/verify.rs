//! Randomized verification suites and their JSON report.
//!
//! Every trial draws from its own ChaCha stream keyed by `(seed, suite, trial)`,
//! so a report depends only on the configuration, never on thread scheduling.

use std::time::Instant;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classes::{f_eval_scaled, f_lift_transform, r_eval};
use crate::curve::{lift, CurveParams, CurvePoint, LiftedPoint};
use crate::error::{Error, Result};
use crate::gen;
use crate::jet::{Jet, JetShape, ScaledJet};
use crate::lattice::LatticeWithForm;
use crate::theta::{sample_point, sigma, sigma_jet, verify_level, ThetaFunction};
use crate::thom::{cocycle_check, law_checks, special_points, transfer_check, Sections};

pub const SCHEMA_VERSION: &str = "1";

pub const GLUING_TOL: f64 = 1e-8;
pub const WEIL_TOL: f64 = 1e-12;
pub const UNIT_FLOOR: f64 = 1e-6;
pub const R_TRIVIAL_TOL: f64 = 1e-10;

/// Suite names in `all` order.
pub const SUITES: [&str; 11] = [
    "sigma_laws",
    "theta_level",
    "lattice_identities",
    "F_lemmas",
    "weil",
    "R_unit",
    "cocycle",
    "gamma_thm8",
    "gamma_thm9",
    "laws",
    "transfer",
];

/// The fixed τ values the sigma laws are always checked at.
pub const SIGMA_TAUS: [Complex64; 3] = [
    Complex64::new(0.0, 1.0),
    Complex64::new(0.3, 0.8),
    Complex64::new(0.0, 1.5),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub tau: Complex64,
    /// Largest spin rank `d` sampled.
    pub d: usize,
    pub torsion_bound: u64,
    /// Overrides every suite's default trial count.
    pub trials: Option<usize>,
    pub seed: u64,
    pub tol: f64,
    pub degree_cap: usize,
    /// Worker threads; `None` uses rayon's default.
    #[serde(skip)]
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tau: Complex64::new(0.0, 1.0),
            d: 3,
            torsion_bound: 6,
            trials: None,
            seed: 0,
            tol: 1e-9,
            degree_cap: crate::jet::DEFAULT_DEGREE_CAP,
            jobs: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<CurveParams> {
        if !(self.tol > 0.0) {
            return Err(Error::Parameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.trials == Some(0) {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        if self.degree_cap < 2 {
            return Err(Error::Parameter(format!(
                "degree cap must be at least 2, got {}",
                self.degree_cap
            )));
        }
        if self.d == 0 {
            return Err(Error::Parameter("d must be at least 1".into()));
        }
        if self.torsion_bound == 0 {
            return Err(Error::Parameter("torsion bound must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Parameter("jobs must be at least 1".into()));
        }
        CurveParams::new(self.tau)
    }

    fn shape(&self) -> JetShape {
        JetShape::new(2, self.degree_cap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Comparison {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    /// Worst value over all trials: the max for `AtMost`, the min for `AtLeast`.
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub trials: usize,
    /// Largest residual among the `AtMost` checks.
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub wall_time_s: f64,
    pub errors: Vec<String>,
    pub checks: Vec<CheckReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: String,
    pub config: RunConfig,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// A copy with every wall time zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Report {
        let mut r = self.clone();
        for s in &mut r.suites {
            s.wall_time_s = 0.0;
        }
        r
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.name == name)
    }
}

/// One measured quantity of a trial.
#[derive(Clone, Debug)]
struct Check {
    name: String,
    value: f64,
    threshold: f64,
    comparison: Comparison,
}

fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Check {
    Check {
        name: name.into(),
        value: if value.is_nan() { f64::INFINITY } else { value },
        threshold,
        comparison: Comparison::AtMost,
    }
}

fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Check {
    Check {
        name: name.into(),
        value: if value.is_nan() { 0.0 } else { value },
        threshold,
        comparison: Comparison::AtLeast,
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    params: CurveParams,
    shape: JetShape,
}

type Trial = fn(&mut ChaCha8Rng, &Ctx, usize) -> Result<Vec<Check>>;

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn trial_rng(seed: u64, suite: &str, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(suite));
    rng.set_stream(trial as u64);
    rng
}

/// Resamples on the errors that only signal an unlucky random point.
fn retry<T>(rng: &mut ChaCha8Rng, mut f: impl FnMut(&mut ChaCha8Rng) -> Result<T>) -> Result<T> {
    let mut last = None;
    for _ in 0..16 {
        match f(rng) {
            Err(e @ (Error::SampleAtZero | Error::DivisionNearZero(_) | Error::NotAUnit(_))) => {
                last = Some(e)
            }
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn abs_constant(s: &ScaledJet) -> f64 {
    s.log_abs_constant().exp()
}

fn default_trials(suite: &str) -> usize {
    match suite {
        "sigma_laws" => 500,
        "lattice_identities" => 1000,
        "theta_level" | "F_lemmas" => 200,
        "weil" => CurvePoint::torsion_up_to(12).len(),
        _ => 100,
    }
}

fn suite_tolerance(suite: &str, cfg: &RunConfig) -> f64 {
    match suite {
        "lattice_identities" => 0.0,
        "weil" => WEIL_TOL,
        "gamma_thm8" | "gamma_thm9" | "laws" => GLUING_TOL,
        "R_unit" => R_TRIVIAL_TOL,
        _ => cfg.tol,
    }
}

fn trial_fn(suite: &str) -> Option<Trial> {
    Some(match suite {
        "sigma_laws" => sigma_laws,
        "theta_level" => theta_level,
        "lattice_identities" => lattice_identities,
        "F_lemmas" => f_lemmas,
        "weil" => weil,
        "R_unit" => r_unit,
        "cocycle" => cocycle,
        "gamma_thm8" => gamma_thm8,
        "gamma_thm9" => gamma_thm9,
        "laws" => laws,
        "transfer" => transfer,
        _ => return None,
    })
}

fn run_suite(name: &str, cfg: &RunConfig, params: &CurveParams) -> Result<SuiteReport> {
    let f = trial_fn(name).ok_or_else(|| Error::UnknownSuite(name.to_string()))?;
    let trials = cfg.trials.unwrap_or_else(|| default_trials(name));
    let ctx = Ctx {
        cfg,
        params: *params,
        shape: cfg.shape(),
    };
    let start = Instant::now();
    let outcomes: Vec<Result<Vec<Check>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, name, t);
            f(&mut rng, &ctx, t)
        })
        .collect();
    let wall = start.elapsed().as_secs_f64();

    let mut checks: Vec<CheckReport> = Vec::new();
    let mut errors = Vec::new();
    for (t, out) in outcomes.into_iter().enumerate() {
        match out {
            Err(e) => errors.push(format!("trial {t}: {e}")),
            Ok(cs) => {
                for c in cs {
                    match checks.iter_mut().find(|r| r.name == c.name) {
                        Some(r) => {
                            r.value = match c.comparison {
                                Comparison::AtMost => r.value.max(c.value),
                                Comparison::AtLeast => r.value.min(c.value),
                            }
                        }
                        None => checks.push(CheckReport {
                            name: c.name,
                            value: c.value,
                            threshold: c.threshold,
                            comparison: c.comparison,
                            pass: false,
                        }),
                    }
                }
            }
        }
    }
    for c in &mut checks {
        c.pass = match c.comparison {
            Comparison::AtMost => c.value <= c.threshold,
            Comparison::AtLeast => c.value >= c.threshold,
        };
    }
    let mut max_residual = checks
        .iter()
        .filter(|c| c.comparison == Comparison::AtMost)
        .map(|c| c.value)
        .fold(0.0f64, f64::max);
    if !errors.is_empty() {
        max_residual = f64::INFINITY;
    }
    Ok(SuiteReport {
        name: name.to_string(),
        trials,
        max_residual,
        tolerance: suite_tolerance(name, cfg),
        pass: errors.is_empty() && !checks.is_empty() && checks.iter().all(|c| c.pass),
        wall_time_s: wall,
        errors,
        checks,
    })
}

/// Runs `suite` (or every suite for `"all"`).
pub fn run(suite: &str, cfg: &RunConfig) -> Result<Report> {
    let params = cfg.validate()?;
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(Error::UnknownSuite(suite.to_string()));
    };
    let go = || -> Result<Vec<SuiteReport>> {
        names.iter().map(|n| run_suite(n, cfg, &params)).collect()
    };
    let suites = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::Parameter(e.to_string()))?
            .install(go)?,
        None => go()?,
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION.to_string(),
        config: cfg.clone(),
        pass: suites.iter().all(|s| s.pass),
        suites,
    })
}

fn tau_label(t: Complex64) -> String {
    format!("{}{:+}i", t.re, t.im)
}

fn sigma_laws(rng: &mut ChaCha8Rng, ctx: &Ctx, _: usize) -> Result<Vec<Check>> {
    let tol = ctx.cfg.tol;
    let mut taus = SIGMA_TAUS.to_vec();
    if !taus.contains(&ctx.cfg.tau) {
        taus.push(ctx.cfg.tau);
    }
    let mut out = Vec::new();
    for tau in taus {
        let p = CurveParams::new(tau)?;
        let label = tau_label(tau);
        let z = sample_point(rng, &p, 0.05);
        let n: i64 = rng.gen_range(-3..=3);
        let s = sigma(z, &p);
        out.push(at_most(
            format!("oddness[tau={label}]"),
            rel(-sigma(-z, &p), s),
            tol,
        ));
        // σ(z + 2πiτn) = (−1)ⁿ e^{−nz} q^{−n²/2} σ(z)
        let nf = n as f64;
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let predicted = (-z * nf - p.tau_period() * (0.5 * nf * nf)).exp() * s * sign;
        out.push(at_most(
            format!("quasi_periodicity[tau={label}]"),
            rel(sigma(z + p.tau_period() * nf, &p), predicted),
            tol,
        ));
        let j = sigma_jet(Complex64::new(0.0, 0.0), &p, 2);
        let dev = j.coeff(&[0]).norm() + (j.coeff(&[1]) - 1.0).norm();
        out.push(at_most(format!("normalization[tau={label}]"), dev, tol));
    }
    Ok(out)
}

fn random_theta_point(rng: &mut ChaCha8Rng, p: &CurveParams, d: usize) -> Vec<Complex64> {
    (0..d).map(|_| sample_point(rng, p, 0.1)).collect()
}

fn theta_level(rng: &mut ChaCha8Rng, ctx: &Ctx, _: usize) -> Result<Vec<Check>> {
    let tol = ctx.cfg.tol;
    let p = &ctx.params;
    let d = rng.gen_range(1..=ctx.cfg.d);
    let theta = ThetaFunction::sigma_d(d)?;
    let m = theta.lattice().random_member(rng, 3);
    let w = theta.lattice().random_weyl(rng);
    let res = retry(rng, |rng| {
        let z = random_theta_point(rng, p, d);
        verify_level(&theta, &m, &w, &[z], p)
    })?;
    let mut out = vec![
        at_most("quasi_periodicity", res.quasi, tol),
        at_most("weyl_invariance", res.weyl.unwrap_or(f64::INFINITY), tol),
    ];
    // products and powers carry summed and scaled level data
    let combo = if rng.gen::<bool>() {
        ThetaFunction::power(theta.clone(), 2)
    } else {
        ThetaFunction::product(vec![theta.clone(), ThetaFunction::sigma_d(1)?])
    };
    let cm = combo.lattice().random_member(rng, 3);
    let cw = combo.lattice().random_weyl(rng);
    let cres = retry(rng, |rng| {
        let z = random_theta_point(rng, p, combo.rank());
        verify_level(&combo, &cm, &cw, &[z], p)
    })?;
    out.push(at_most("combinators", cres.max(), tol));
    Ok(out)
}

fn lattice_identities(rng: &mut ChaCha8Rng, ctx: &Ctx, _: usize) -> Result<Vec<Check>> {
    let d = rng.gen_range(1..=ctx.cfg.d + 1);
    let l = LatticeWithForm::spin(d)?;
    let a = l.random_member(rng, 6);
    let b = l.random_member(rng, 6);
    let delta = l.random_member(rng, 3);
    let n: i64 = rng.gen_range(1..=6);
    let w = l.random_weyl(rng);
    let sum: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    let na: Vec<i64> = a.iter().map(|x| n * x).collect();
    let shifted: Vec<i64> = a.iter().zip(&delta).map(|(x, y)| x + n * y).collect();
    let (wa, wb) = (w.apply_i64(&a), w.apply_i64(&b));
    let fails = |ok: bool| if ok { 0.0 } else { 1.0 };

    let mut off = a.clone();
    off[0] += 1;
    let mut out = vec![
        at_most(
            "phi_additivity",
            fails(l.phi(&sum)? == l.phi(&a)? + l.pairing(&a, &b)? + l.phi(&b)?),
            0.0,
        ),
        at_most(
            "phi_homogeneity",
            fails(l.phi(&na)? == n * n * l.phi(&a)?),
            0.0,
        ),
        at_most("phi_weyl", fails(l.phi(&wa)? == l.phi(&a)?), 0.0),
        at_most(
            "pairing_weyl",
            fails(l.pairing(&wa, &wb)? == l.pairing(&a, &b)?),
            0.0,
        ),
        at_most(
            "phi_mod_lift",
            fails(l.phi_mod(&shifted, n as u64)? == l.phi_mod(&a, n as u64)?),
            0.0,
        ),
        at_most(
            "phi_integrality",
            fails(l.twice_phi(&a) % 2 == 0 && !l.is_member(&off) && l.twice_phi(&off) % 2 != 0),
            0.0,
        ),
    ];

    // c₂ of the Borel construction: recomputed from its z², z, 1 parts, and
    // unchanged by a simultaneous Weyl move
    let s = JetShape::new(2, ctx.cfg.degree_cap);
    let roots = gen::integer_roots(rng, d, s);
    let c2 = l.borel_c2(&a, &roots)?;
    let big = c2.shape();
    let z = Jet::variable(2, big);
    let phi = l.phi(&a)? as f64;
    let lin = a.iter().zip(&roots).fold(Jet::zero(big), |acc, (&m, x)| {
        &acc + &x.embed(big).scale(Complex64::new(m as f64, 0.0))
    });
    let quad = roots.iter().fold(Jet::zero(big), |acc, x| {
        &acc + &(&x.embed(big) * &x.embed(big)).scale(Complex64::new(0.5, 0.0))
    });
    let expected = &(&(&z * &z).scale(Complex64::new(phi, 0.0)) + &(&lin * &z)) + &quad;
    out.push(at_most("borel_c2_parts", fails(c2 == expected), 0.0));
    let moved = l.borel_c2(&wa, &w.apply_jets(&roots))?;
    out.push(at_most("borel_c2_weyl", fails(moved == c2), 0.0));

    // the worked rank-two example: z² + (x₁ + x₂)z + ½(x₁² + x₂²)
    let s2 = JetShape::new(2, 4);
    let ex = LatticeWithForm::spin(2)?
        .borel_c2(&[1, 1], &[Jet::variable(0, s2), Jet::variable(1, s2)])?;
    let half = Complex64::new(0.5, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let display = Jet::from_terms(
        ex.shape(),
        &[
            (&[0, 0, 2], one),
            (&[1, 0, 1], one),
            (&[0, 1, 1], one),
            (&[2, 0, 0], half),
            (&[0, 2, 0], half),
        ],
    );
    out.push(at_most("borel_c2_example", fails(ex == display), 0.0));
    Ok(out)
}

fn random_lift(rng: &mut ChaCha8Rng, a: &CurvePoint, p: &CurveParams) -> LiftedPoint {
    lift(a, rng.gen_range(-1..=1), rng.gen_range(-1..=1), p)
}

fn f_lemmas(rng: &mut ChaCha8Rng, ctx: &Ctx, _: usize) -> Result<Vec<Check>> {
    let tol = ctx.cfg.tol;
    let p = &ctx.params;
    let s = ctx.shape;
    let d = rng.gen_range(1..=ctx.cfg.d);
    let base = ThetaFunction::sigma_d(d)?;
    let theta = if rng.gen::<bool>() {
        base
    } else {
        ThetaFunction::power(base, 2)
    };
    let l = theta.lattice().clone();
    let n = rng.gen_range(1..=ctx.cfg.torsion_bound);
    let a = gen::random_point_of_order(rng, n);
    let la = random_lift(rng, &a, p);
    let lb = random_lift(rng, &a, p);
    let mbar = l.random_member(rng, 3);
    let delta = LatticeWithForm::spin(d)?.random_member(rng, 1);
    let lifted_m: Vec<i64> = mbar
        .iter()
        .zip(&delta)
        .map(|(m, x)| m + n as i64 * x)
        .collect();
    let w_stab = l.stabilizer_sample(&mbar, Some(n), rng, 1)?.remove(0);
    let w_any = l.random_weyl(rng);
    let roots = gen::random_roots(rng, d, s);
    retry(rng, |rng| {
        // these identities hold at every point, so each coordinate gets a generic
        // offset and zero entries of m̄ do not leave σ(x_i) without a constant
        let pt: Vec<Jet> = roots
            .iter()
            .map(|x| {
                x.add_scalar(Complex64::new(
                    rng.gen_range(-1.0..=1.0),
                    rng.gen_range(-1.0..=1.0),
                ))
            })
            .collect();
        let f = f_eval_scaled(&theta, &mbar, &la, &pt, s, p)?;
        if abs_constant(&f) < 1e-12 {
            return Err(Error::DivisionNearZero(abs_constant(&f)));
        }
        let lifted = f_eval_scaled(&theta, &lifted_m, &la, &pt, s, p)?;
        let stab = f_eval_scaled(&theta, &mbar, &la, &w_stab.apply_jets(&pt), s, p)?;
        let moved_m = w_any.apply_i64(&mbar);
        let reduced = f_eval_scaled(&theta, &moved_m, &la, &w_any.apply_jets(&pt), s, p)?;
        let tr = f_lift_transform(&theta, &mbar, &la, &lb, &pt, s, p)?;
        Ok(vec![
            at_most("lift_independence", lifted.rel_diff(&f), tol),
            at_most("weyl_stabilizer_invariance", stab.rel_diff(&f), tol),
            at_most("reduction_independence", reduced.rel_diff(&f), tol),
            at_most("abar_transformation", rel(tr.ratio, tr.predicted), tol),
        ])
    })
}

fn weil(rng: &mut ChaCha8Rng, ctx: &Ctx, t: usize) -> Result<Vec<Check>> {
    let p = &ctx.params;
    let pts = CurvePoint::torsion_up_to(12);
    let a = pts[t % pts.len()];
    let n = a.order();
    let base = lift(&a, 0, 0, p);
    let w0 = base.weil(p);
    let mut root = (pow_i(w0, n) - 1.0).norm();
    let mut indep = 0.0f64;
    for _ in 0..4 {
        let l = lift(&a, rng.gen_range(-3..=3), rng.gen_range(-3..=3), p);
        let w = crate::curve::weil_pairing(&a, &l, p)?;
        root = root.max((pow_i(w, n) - 1.0).norm());
        indep = indep.max(rel(w, w0));
    }
    let h1 = CurvePoint::from_fractions(1, 0, 2)?;
    let h2 = CurvePoint::from_fractions(0, 1, 2)?;
    let hand = (lift(&h1, 0, 0, p).weil(p) + 1.0)
        .norm()
        .max((lift(&h2, 0, 0, p).weil(p) - 1.0).norm());
    Ok(vec![
        at_most("nth_root_of_unity", root, WEIL_TOL),
        at_most("lift_independence", indep, WEIL_TOL),
        at_most("two_torsion_values", hand, WEIL_TOL),
    ])
}

fn pow_i(w: Complex64, n: u64) -> Complex64 {
    (0..n).fold(Complex64::new(1.0, 0.0), |acc, _| acc * w)
}

/// A nonzero special point of `v` when one exists, otherwise `0`.
fn pick_special(rng: &mut ChaCha8Rng, specials: &[CurvePoint]) -> CurvePoint {
    let nonzero: Vec<_> = specials.iter().filter(|a| !a.is_zero()).copied().collect();
    nonzero
        .choose(rng)
        .copied()
        .unwrap_or_else(CurvePoint::zero)
}

fn random_rank(rng: &mut ChaCha8Rng, ctx: &Ctx) -> usize {
    rng.gen_range(1..=ctx.cfg.d)
}

fn rotation_bound(ctx: &Ctx) -> i64 {
    ctx.cfg.torsion_bound as i64
}

fn r_unit(rng: &mut ChaCha8Rng, ctx: &Ctx, _: usize) -> Result<Vec<Check>> {
    let p = &ctx.params;
    let d = random_rank(rng, ctx);
    let v = gen::random_spin_bundle(rng, d, rotation_bound(ctx), ctx.shape)?;
    let a = pick_special(rng, &special_points(&v, ctx.cfg.torsion_bound));
    let l = random_lift(rng, &a, p);
    let mut zs = gen::annulus(rng, 6, 0.05, 0.1);
    zs.push(Complex64::new(0.0, 0.0));
    let mut floor = f64::INFINITY;
    for z in zs {
        floor = floor.min(abs_constant(&r_eval(&v, &l, z, p)?));
    }
    let zero = lift(&CurvePoint::zero(), 0, 0, p);
    let z = gen::annulus(rng, 1, 0.0, 0.1)[0];
    let trivial = r_eval(&v, &zero, z, p)?.rel_diff(&ScaledJet::one(ctx.shape));
    Ok(vec![
        at_least("min_abs_constant", floor, UNIT_FLOOR),
        at_most("trivial_lift_is_one", trivial, R_TRIVIAL_TOL),
    ])
}

fn cocycle(rng: &mut ChaCha8Rng, ctx: &Ctx, _: usize) -> Result<Vec<Check>> {
    let p = &ctx.params;
    let d = random_rank(rng, ctx);
    let v = gen::random_spin_bundle(rng, d, rotation_bound(ctx), ctx.shape)?;
    let a = pick_special(rng, &special_points(&v, ctx.cfg.torsion_bound));
    let b = gen::random_ordinary(rng, v.max_rotation());
    let c = loop {
        let c = gen::random_ordinary(rng, v.max_rotation());
        if c != b {
            break c;
        }
    };
    let mut triple = [a, b, c];
    triple.shuffle(rng);
    let zs = gen::annulus(rng, 4, 0.05, 0.2);
    let tol = ctx.cfg.tol;
    Ok(vec![
        at_most(
            "one_special",
            cocycle_check(&v, &triple[0], &triple[1], &triple[2], &zs, p)?,
            tol,
        ),
        at_most("all_ordinary", cocycle_check(&v, &b, &c, &b, &zs, p)?, tol),
        at_most(
            "repeated_point",
            cocycle_check(&v, &a, &a, &b, &zs, p)?,
            tol,
        ),
    ])
}

/// Gluing, lift independence and `Λ`-invariance of a section at up to three
/// special points.
fn section_checks(
    rng: &mut ChaCha8Rng,
    ctx: &Ctx,
    sec: &Sections,
    avoid: &[i64],
    out: &mut Vec<Check>,
) -> Result<Vec<CurvePoint>> {
    let p = &ctx.params;
    let zs = gen::annulus(rng, 3, 0.05, 0.2);
    let ordinary: Vec<Complex64> = (0..2)
        .map(|_| gen::generic_point(rng, p, avoid, 0.05))
        .collect();
    out.push(at_most(
        "lambda_invariance",
        sec.lambda_invariance(&ordinary, p)?,
        GLUING_TOL,
    ));
    let mut specials = sec.special_points(ctx.cfg.torsion_bound);
    specials.shuffle(rng);
    specials.truncate(3);
    if !specials.contains(&CurvePoint::zero()) {
        specials.push(CurvePoint::zero());
    }
    let mut glue = 0.0f64;
    let mut indep = 0.0f64;
    for a in &specials {
        let l1 = random_lift(rng, a, p);
        let l2 = random_lift(rng, a, p);
        glue = glue.max(sec.gluing_check(&l1, &zs, p)?);
        indep = indep.max(sec.lift_independence(&l1, &l2, &zs, p)?);
    }
    out.push(at_most("gluing", glue, GLUING_TOL));
    out.push(at_most("lift_independence", indep, GLUING_TOL));
    Ok(specials)
}

fn gamma_thm8(rng: &mut ChaCha8Rng, ctx: &Ctx, _: usize) -> Result<Vec<Check>> {
    let power = rng.gen_range(1..=2);
    let dprime = rng.gen_range(1..=ctx.cfg.d);
    let bound = rotation_bound(ctx).min(4);
    let data = gen::random_level_data(rng, dprime, power, bound, ctx.shape)?;
    let mut avoid = data.v.rotation_numbers().to_vec();
    avoid.extend_from_slice(data.vprime.rotation_numbers());
    let sec = Sections::Level(data);
    let mut out = Vec::new();
    section_checks(rng, ctx, &sec, &avoid, &mut out)?;
    Ok(out)
}

fn pair_sections(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<crate::thom::VirtualPair> {
    let d = random_rank(rng, ctx);
    let pad = rng.gen_range(0..=1);
    gen::random_pair(rng, d, rotation_bound(ctx), ctx.shape, Some(pad))
}

fn gamma_thm9(rng: &mut ChaCha8Rng, ctx: &Ctx, _: usize) -> Result<Vec<Check>> {
    let p = &ctx.params;
    let pair = pair_sections(rng, ctx)?;
    let p2 = pair_sections(rng, ctx)?;
    let dw = random_rank(rng, ctx);
    let w = gen::random_spin_bundle(rng, dw, rotation_bound(ctx), ctx.shape)?;
    let mut avoid = pair.v0.rotation_numbers().to_vec();
    avoid.extend_from_slice(pair.v1.rotation_numbers());
    let sec = Sections::Pair(pair.clone());
    let mut out = Vec::new();
    let specials = section_checks(rng, ctx, &sec, &avoid, &mut out)?;
    let zs = gen::annulus(rng, 3, 0.05, 0.2);
    let mut floor = f64::INFINITY;
    for a in &specials {
        let l = random_lift(rng, a, p);
        for &z in &zs {
            floor = floor.min(abs_constant(&sec.gamma_special(&l, z, p)?));
        }
    }
    out.push(at_least("unit_gamma_special", floor, UNIT_FLOOR));
    let z_ord: Vec<Complex64> = (0..2)
        .map(|_| gen::generic_point(rng, p, &avoid, 0.05))
        .collect();
    let images: Vec<Jet> = (0..ctx.shape.nvars)
        .map(|i| Jet::variable(i, ctx.shape))
        .collect();
    let rep = law_checks(&pair, &p2, &w, &images, &specials, &z_ord, &zs, p)?;
    out.push(at_most("stability", rep.stability, GLUING_TOL));
    out.push(at_most("exponential", rep.exponential, GLUING_TOL));
    Ok(out)
}

fn laws(rng: &mut ChaCha8Rng, ctx: &Ctx, _: usize) -> Result<Vec<Check>> {
    let p = &ctx.params;
    let pair = pair_sections(rng, ctx)?;
    let p2 = pair_sections(rng, ctx)?;
    let dw = random_rank(rng, ctx);
    let w = gen::random_spin_bundle(rng, dw, rotation_bound(ctx), ctx.shape)?;
    let images = gen::random_images(rng, ctx.shape.nvars, ctx.shape);
    let sec = Sections::Pair(pair.clone());
    let mut specials = sec.special_points(ctx.cfg.torsion_bound);
    specials.shuffle(rng);
    specials.truncate(2);
    let mut avoid = pair.v0.rotation_numbers().to_vec();
    avoid.extend_from_slice(pair.v1.rotation_numbers());
    avoid.extend_from_slice(p2.v0.rotation_numbers());
    avoid.extend_from_slice(p2.v1.rotation_numbers());
    avoid.extend_from_slice(w.rotation_numbers());
    let z_ord: Vec<Complex64> = (0..2)
        .map(|_| gen::generic_point(rng, p, &avoid, 0.05))
        .collect();
    let zs = gen::annulus(rng, 2, 0.05, 0.2);
    let rep = law_checks(&pair, &p2, &w, &images, &specials, &z_ord, &zs, p)?;
    Ok(vec![
        at_most("stability", rep.stability, GLUING_TOL),
        at_most("exponential", rep.exponential, GLUING_TOL),
        at_most("naturality", rep.naturality, GLUING_TOL),
    ])
}

fn transfer(rng: &mut ChaCha8Rng, ctx: &Ctx, _: usize) -> Result<Vec<Check>> {
    let p = &ctx.params;
    let d = random_rank(rng, ctx);
    let v = gen::random_spin_bundle(rng, d, rotation_bound(ctx), ctx.shape)?;
    let theta = ThetaFunction::sigma_d(d)?;
    let n = rng.gen_range(1..=ctx.cfg.torsion_bound);
    let a = gen::random_point_of_order(rng, n);
    let l = random_lift(rng, &a, p);
    let zs: Vec<Complex64> = (0..3)
        .map(|_| gen::generic_point(rng, p, v.rotation_numbers(), 0.1))
        .collect();
    Ok(vec![at_most(
        "transfer",
        transfer_check(&theta, &v, &l, &zs, p)?,
        ctx.cfg.tol,
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(trials: usize) -> RunConfig {
        RunConfig {
            trials: Some(trials),
            ..RunConfig::default()
        }
    }

    #[test]
    fn rejects_bad_config() {
        let c = RunConfig {
            tol: 0.0,
            ..RunConfig::default()
        };
        assert!(run("weil", &c).is_err());
        let c = RunConfig {
            tau: Complex64::new(0.0, -1.0),
            ..RunConfig::default()
        };
        assert!(run("weil", &c).is_err());
        assert!(matches!(
            run("nope", &RunConfig::default()),
            Err(Error::UnknownSuite(_))
        ));
    }

    #[test]
    fn every_suite_passes_a_few_trials() {
        for s in SUITES {
            let r = run(s, &small(3)).unwrap();
            let sr = &r.suites[0];
            assert!(sr.pass, "{s}: {sr:?}");
        }
    }

    #[test]
    fn trial_streams_are_independent_of_threads() {
        let mut a = small(4);
        a.jobs = Some(1);
        let mut b = small(4);
        b.jobs = Some(3);
        let ra = run("cocycle", &a).unwrap().without_timing();
        let rb = run("cocycle", &b).unwrap().without_timing();
        assert_eq!(ra.suites, rb.suites);
    }
}
