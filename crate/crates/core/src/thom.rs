//! Thom cocycle and the sections `γ` on toy fixed-point data.
//!
//! Near an ordinary point the section is the quotient `γ̄_B` of Euler-type
//! classes; near a special point `a` it is built from the unit `R(V, ā)`.
//! Both are written in the local coordinate `z` of the curve at the point, so
//! the gluing relation reads `γ_a(z) / e(z) = γ̄_B(z + ā)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::classes::{f_eval_scaled, r_eval, EvaluatedClass, ToyBundle, NEAR_ZERO};
use crate::curve::{lift, CurveParams, CurvePoint, LiftedPoint};
use crate::error::{Error, Result};
use crate::jet::{Jet, JetShape, ScaledJet, DEFAULT_UNIT_TOL};
use crate::lattice::SignedPermutation;
use crate::theta::{sigma_of_jet, ThetaFunction, DEFAULT_TRUNCATION_TOL};

/// Relative tolerance for the `c₂` matching hypotheses.
pub const C2_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn sign_ratio(a: i8, b: i8) -> f64 {
    (a * b) as f64
}

fn c2_mismatch(a: &Jet, b: &Jet) -> f64 {
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    (a - b).max_abs() / scale
}

/// `∏ σ(v_j)` over the given indices, with a unit check on every factor.
fn sigma_product(
    v: &ToyBundle,
    idx: impl Iterator<Item = usize>,
    z: Complex64,
    params: &CurveParams,
) -> Result<ScaledJet> {
    let pts = v.point(z);
    let mut acc = ScaledJet::one(v.shape());
    for j in idx {
        let s = sigma_of_jet(&pts[j], params, DEFAULT_TRUNCATION_TOL);
        if !(s.log_abs_constant() > NEAR_ZERO.ln()) {
            return Err(Error::NotAUnit(
                s.jet.constant_term().norm() * s.log_scale.exp(),
            ));
        }
        acc = acc.mul(&s);
    }
    Ok(acc)
}

fn moving_indices(v: &ToyBundle) -> impl Iterator<Item = usize> + '_ {
    (0..v.rank()).filter(move |&j| v.rotation_numbers()[j] != 0)
}

/// Torsion points of order at most `bound` where some nonzero rotation number
/// vanishes, together with `0`.
pub fn special_points(v: &ToyBundle, bound: u64) -> Vec<CurvePoint> {
    CurvePoint::torsion_up_to(bound)
        .into_iter()
        .filter(|a| a.is_zero() || is_special(v, a))
        .collect()
}

/// Whether `m_j·a = 0` for some `m_j ≠ 0`.
pub fn is_special(v: &ToyBundle, a: &CurvePoint) -> bool {
    v.rotation_numbers()
        .iter()
        .any(|&mj| mj != 0 && a.is_killed_by(mj))
}

/// `(ε_n/ε_0) ∏_{0 ≠ m_j ≡ 0 mod n} σ(m_j z + x_j)`.
pub fn euler_ratio_e(
    v: &ToyBundle,
    n: u64,
    z: Complex64,
    params: &CurveParams,
) -> Result<ScaledJet> {
    let m = v.rotation_numbers();
    let idx = (0..v.rank()).filter(|&j| m[j] != 0 && m[j].rem_euclid(n.max(1) as i64) == 0);
    let prod = sigma_product(v, idx, z, params)?;
    Ok(prod.scale(c(sign_ratio(v.sign(n), v.sign(0)))))
}

/// A pair `(V₀, V₁)` with equal Borel `c₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct VirtualPair {
    pub v0: ToyBundle,
    pub v1: ToyBundle,
}

impl VirtualPair {
    pub fn new(v0: ToyBundle, v1: ToyBundle) -> Result<Self> {
        let (a, b) = (v0.borel_c2()?, v1.borel_c2()?);
        let gap = c2_mismatch(&a, &b);
        if !(gap <= C2_TOL) {
            return Err(Error::HypothesisViolated(format!(
                "c2(V0) and c2(V1) differ by {gap:e}"
            )));
        }
        Ok(Self { v0, v1 })
    }

    pub fn shape(&self) -> JetShape {
        self.v0.shape().join(self.v1.shape())
    }

    /// `(V₀ ⊕ V₀′, V₁ ⊕ V₁′)`.
    pub fn direct_sum(&self, other: &VirtualPair) -> Result<Self> {
        Self::new(
            self.v0.direct_sum(&other.v0)?,
            self.v1.direct_sum(&other.v1)?,
        )
    }

    /// `(V₀ ⊕ W, V₁ ⊕ W)`.
    pub fn pad(&self, w: &ToyBundle) -> Result<Self> {
        Self::new(self.v0.direct_sum(w)?, self.v1.direct_sum(w)?)
    }

    pub fn substitute(&self, images: &[Jet]) -> Result<Self> {
        Self::new(self.v0.substitute(images)?, self.v1.substitute(images)?)
    }

    pub fn weyl_move(&self, w0: &SignedPermutation, w1: &SignedPermutation) -> Result<Self> {
        Self::new(self.v0.weyl_move(w0)?, self.v1.weyl_move(w1)?)
    }

    pub fn max_rotation(&self) -> i64 {
        self.v0.max_rotation().max(self.v1.max_rotation())
    }
}

/// Data of the level-`ξ′` construction: `V` and `V′` with
/// `c₂(V_𝕋) = ξ′(V′_𝕋)`, and a theta function `θ′` of level `ξ′`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelData {
    pub v: ToyBundle,
    pub vprime: ToyBundle,
    pub theta: ThetaFunction,
}

impl LevelData {
    pub fn new(v: ToyBundle, vprime: ToyBundle, theta: ThetaFunction) -> Result<Self> {
        let lat = theta.lattice();
        if lat.rank() != vprime.rank() {
            return Err(Error::IncompatibleLattices(format!(
                "rank-{} theta function for a rank-{} bundle",
                lat.rank(),
                vprime.rank()
            )));
        }
        lat.check_member(vprime.rotation_numbers())?;
        let lhs = v.borel_c2()?;
        let shape = JetShape::new(vprime.shape().nvars + 1, vprime.shape().cap);
        let rhs = if lat.rank() == 0 {
            Jet::zero(shape)
        } else {
            lat.borel_c2(vprime.rotation_numbers(), vprime.roots())?
        };
        let gap = c2_mismatch(&lhs, &rhs);
        if !(gap <= C2_TOL) {
            return Err(Error::HypothesisViolated(format!(
                "c2(V) and the level of theta' on V' differ by {gap:e}"
            )));
        }
        Ok(Self { v, vprime, theta })
    }
}

/// The two constructions of `γ`.
#[derive(Clone, Debug, PartialEq)]
pub enum Sections {
    /// `γ = θ′(V′)·σ(V^𝕋)/σ(V)` from a theta function whose level matches `c₂(V)`.
    Level(LevelData),
    /// `γ(V₀, V₁)` for a `c₂`-matched pair.
    Pair(VirtualPair),
}

impl Sections {
    pub fn shape(&self) -> JetShape {
        match self {
            Sections::Level(d) => d.v.shape().join(d.vprime.shape()),
            Sections::Pair(p) => p.shape(),
        }
    }

    pub fn is_special(&self, a: &CurvePoint) -> bool {
        match self {
            Sections::Level(d) => is_special(&d.v, a),
            Sections::Pair(p) => is_special(&p.v0, a) || is_special(&p.v1, a),
        }
    }

    pub fn special_points(&self, bound: u64) -> Vec<CurvePoint> {
        CurvePoint::torsion_up_to(bound)
            .into_iter()
            .filter(|a| a.is_zero() || self.is_special(a))
            .collect()
    }

    pub fn max_rotation(&self) -> i64 {
        match self {
            Sections::Level(d) => d.v.max_rotation().max(d.vprime.max_rotation()),
            Sections::Pair(p) => p.max_rotation(),
        }
    }

    /// `γ̄_B` near an ordinary point, as a function of `z ∈ ℂ`.
    pub fn gamma_ordinary(&self, z: Complex64, params: &CurveParams) -> Result<ScaledJet> {
        match self {
            Sections::Level(d) => {
                let shape = self.shape();
                let th = d.theta.eval_scaled(
                    &d.vprime.point(z),
                    shape,
                    params,
                    DEFAULT_TRUNCATION_TOL,
                )?;
                let den = sigma_product(&d.v, moving_indices(&d.v), z, params)?;
                Ok(th
                    .div(&den, DEFAULT_UNIT_TOL)?
                    .scale(c(sign_ratio(d.v.sign(0), d.v.sign(1)))))
            }
            Sections::Pair(p) => {
                let num = sigma_product(&p.v0, moving_indices(&p.v0), z, params)?;
                let den = sigma_product(&p.v1, moving_indices(&p.v1), z, params)?;
                let sign =
                    sign_ratio(p.v0.sign(1), p.v0.sign(0)) * sign_ratio(p.v1.sign(0), p.v1.sign(1));
                Ok(num.div(&den, DEFAULT_UNIT_TOL)?.scale(c(sign)))
            }
        }
    }

    /// `γ_a` in the local coordinate at the special point lifted to `ā`.
    pub fn gamma_special(
        &self,
        lift: &LiftedPoint,
        z: Complex64,
        params: &CurveParams,
    ) -> Result<ScaledJet> {
        match self {
            Sections::Level(d) => {
                let r = r_eval(&d.v, lift, z, params)?;
                let f = f_eval_scaled(
                    &d.theta,
                    d.vprime.rotation_numbers(),
                    lift,
                    &d.vprime.point(z),
                    self.shape(),
                    params,
                )?;
                Ok(r.mul(&f))
            }
            Sections::Pair(p) => {
                let r1 = r_eval(&p.v1, lift, z, params)?;
                let r0 = r_eval(&p.v0, lift, z, params)?;
                r1.div(&r0, DEFAULT_UNIT_TOL)
            }
        }
    }

    /// The transition factor `e(a, b)` between `a` and an ordinary point.
    pub fn transition(&self, n: u64, z: Complex64, params: &CurveParams) -> Result<ScaledJet> {
        match self {
            Sections::Level(d) => euler_ratio_e(&d.v, n, z, params),
            Sections::Pair(p) => {
                let e1 = euler_ratio_e(&p.v1, n, z, params)?;
                let e0 = euler_ratio_e(&p.v0, n, z, params)?;
                e1.div(&e0, DEFAULT_UNIT_TOL)
            }
        }
    }

    /// Max relative residual of `γ_a(z)/e(z) = γ̄_B(z + ā)` over the samples.
    pub fn gluing_check(
        &self,
        lift: &LiftedPoint,
        zs: &[Complex64],
        params: &CurveParams,
    ) -> Result<f64> {
        let n = lift.order();
        let mut worst = 0.0f64;
        for &z in zs {
            let lhs = self
                .gamma_special(lift, z, params)?
                .div(&self.transition(n, z, params)?, DEFAULT_UNIT_TOL)?;
            let rhs = self.gamma_ordinary(z + lift.abar(), params)?;
            worst = worst.max(finite(lhs.rel_diff(&rhs)));
        }
        Ok(worst)
    }

    /// Max relative change of `γ̄_B` under translation by `2πi` and `2πiτ`.
    pub fn lambda_invariance(&self, zs: &[Complex64], params: &CurveParams) -> Result<f64> {
        let mut worst = 0.0f64;
        for &z in zs {
            let base = self.gamma_ordinary(z, params)?;
            for lam in [params.lattice_point(1, 0), params.lattice_point(0, 1)] {
                let moved = self.gamma_ordinary(z + lam, params)?;
                worst = worst.max(finite(moved.rel_diff(&base)));
            }
        }
        Ok(worst)
    }

    /// Max relative change of `γ_a` between two lifts of the same point.
    pub fn lift_independence(
        &self,
        l1: &LiftedPoint,
        l2: &LiftedPoint,
        zs: &[Complex64],
        params: &CurveParams,
    ) -> Result<f64> {
        let mut worst = 0.0f64;
        for &z in zs {
            let a = self.gamma_special(l1, z, params)?;
            let b = self.gamma_special(l2, z, params)?;
            worst = worst.max(finite(a.rel_diff(&b)));
        }
        Ok(worst)
    }

    /// Collects `γ̄_B(z_ord)` and `γ_a(z)`, `e(a, ·)(z)` at the given special points.
    pub fn section_data(
        &self,
        z_ordinary: Complex64,
        specials: &[CurvePoint],
        z: Complex64,
        params: &CurveParams,
    ) -> Result<SectionData> {
        let ord = EvaluatedClass {
            z: z_ordinary,
            value: self.gamma_ordinary(z_ordinary, params)?,
            provenance: "gamma at an ordinary point".into(),
        };
        let mut gamma_special = BTreeMap::new();
        let mut transitions = BTreeMap::new();
        for a in specials {
            let l = lift(a, 0, 0, params);
            gamma_special.insert(
                *a,
                EvaluatedClass {
                    z,
                    value: self.gamma_special(&l, z, params)?,
                    provenance: format!("gamma at {a}"),
                },
            );
            transitions.insert(
                *a,
                EvaluatedClass {
                    z,
                    value: self.transition(a.order(), z, params)?,
                    provenance: format!("e({a}, ordinary)"),
                },
            );
        }
        Ok(SectionData {
            gamma_ordinary: ord,
            gamma_special,
            transitions,
        })
    }
}

/// Local pieces of a section and its transition factors.
#[derive(Clone, Debug)]
pub struct SectionData {
    pub gamma_ordinary: EvaluatedClass,
    pub gamma_special: BTreeMap<CurvePoint, EvaluatedClass>,
    pub transitions: BTreeMap<CurvePoint, EvaluatedClass>,
}

fn finite(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

/// Residual of the cocycle identity
/// `ψ_bc(ψ_ab(e(a,b))·e(b,c)) = ψ_ac(e(a,c))` in the local coordinate at `c`,
/// with `ψ_xy f(w) = f(w + ȳ − x̄)`. At most one of the points may be special.
pub fn cocycle_check(
    v: &ToyBundle,
    a: &CurvePoint,
    b: &CurvePoint,
    cpt: &CurvePoint,
    zs: &[Complex64],
    params: &CurveParams,
) -> Result<f64> {
    let pts = [a, b, cpt];
    let specials: Vec<_> = pts.iter().filter(|p| is_special(v, p)).collect();
    let distinct_specials: std::collections::BTreeSet<_> = specials.iter().map(|p| ***p).collect();
    if distinct_specials.len() > 1 {
        return Err(Error::Parameter(
            "at most one of the three points may be special".into(),
        ));
    }
    let lifted: Vec<LiftedPoint> = pts.iter().map(|p| lift(p, 0, 0, params)).collect();
    let (la, lb, lc) = (&lifted[0], &lifted[1], &lifted[2]);
    let shape = v.shape();
    // e(x, y) as a function of the local coordinate at x
    let e = |x: &LiftedPoint, y: &LiftedPoint, w: Complex64| -> Result<ScaledJet> {
        let (xs, ys) = (is_special(v, x.base()), is_special(v, y.base()));
        if x.base() == y.base() || (!xs && !ys) {
            Ok(ScaledJet::one(shape))
        } else if xs {
            euler_ratio_e(v, x.order(), w, params)
        } else {
            euler_ratio_e(v, y.order(), w + x.abar() - y.abar(), params)?.invert(DEFAULT_UNIT_TOL)
        }
    };
    let mut worst = 0.0f64;
    for &w in zs {
        let in_b = w + (lc.abar() - lb.abar());
        let lhs = e(la, lb, in_b + (lb.abar() - la.abar()))?.mul(&e(lb, lc, in_b)?);
        let rhs = e(la, lc, w + (lc.abar() - la.abar()))?;
        worst = worst.max(finite(lhs.rel_diff(&rhs)));
    }
    Ok(worst)
}

/// Residuals of the stability, exponential and naturality laws of the pair
/// construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct LawReport {
    pub stability: f64,
    pub exponential: f64,
    pub naturality: f64,
}

/// Evaluates the laws at the ordinary samples `zs` and at each special point
/// (in its local coordinate at the samples `zs_local`).
#[allow(clippy::too_many_arguments)]
pub fn law_checks(
    p: &VirtualPair,
    p2: &VirtualPair,
    w: &ToyBundle,
    images: &[Jet],
    specials: &[CurvePoint],
    zs: &[Complex64],
    zs_local: &[Complex64],
    params: &CurveParams,
) -> Result<LawReport> {
    let base = Sections::Pair(p.clone());
    let padded = Sections::Pair(p.pad(w)?);
    let other = Sections::Pair(p2.clone());
    let sum = Sections::Pair(p.direct_sum(p2)?);
    let pulled = Sections::Pair(p.substitute(images)?);
    let mut rep = LawReport::default();
    let mut record = |g: &dyn Fn(&Sections) -> Result<ScaledJet>| -> Result<()> {
        let g0 = g(&base)?;
        rep.stability = rep.stability.max(finite(g(&padded)?.rel_diff(&g0)));
        let prod = g0.mul(&g(&other)?);
        rep.exponential = rep.exponential.max(finite(g(&sum)?.rel_diff(&prod)));
        let pushed = ScaledJet {
            jet: g0.jet.substitute(images)?,
            log_scale: g0.log_scale,
        };
        rep.naturality = rep.naturality.max(finite(g(&pulled)?.rel_diff(&pushed)));
        Ok(())
    };
    for &z in zs {
        record(&|s: &Sections| s.gamma_ordinary(z, params))?;
    }
    for a in specials {
        let l = lift(a, 0, 0, params);
        for &z in zs_local {
            record(&|s: &Sections| s.gamma_special(&l, z, params))?;
        }
    }
    Ok(rep)
}

/// Residual of `θ(m(z + ā) + x) = (τ_{mā}θ)(mz + x)` over the samples.
pub fn transfer_check(
    theta: &ThetaFunction,
    v: &ToyBundle,
    lift: &LiftedPoint,
    zs: &[Complex64],
    params: &CurveParams,
) -> Result<f64> {
    theta.require_lattice(v.lattice())?;
    let shift: Vec<Complex64> = v
        .rotation_numbers()
        .iter()
        .map(|&mi| lift.abar() * mi as f64)
        .collect();
    let translated = ThetaFunction::translate(theta.clone(), shift)?;
    let shape = v.shape();
    let mut worst = 0.0f64;
    for &z in zs {
        let lhs = theta.eval_scaled(
            &v.point(z + lift.abar()),
            shape,
            params,
            DEFAULT_TRUNCATION_TOL,
        )?;
        let rhs = translated.eval_scaled(&v.point(z), shape, params, DEFAULT_TRUNCATION_TOL)?;
        worst = worst.max(finite(lhs.rel_diff(&rhs)));
    }
    Ok(worst)
}
