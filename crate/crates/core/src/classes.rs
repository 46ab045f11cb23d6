//! Equivariant classes on toy fixed-point data.
//!
//! A [`ToyBundle`] is a split spin bundle over a fixed component `F`: line
//! summands with rotation numbers `m_j` and Chern roots `x_j` (nilpotent jets),
//! plus a chosen orientation sign for each fixed sub-bundle `V^{𝕋[n]}`.
//! Pulling back along the classifying map is the substitution
//! `u_j ↦ exp(m_j z + x_j)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::curve::{CurveParams, LiftedPoint};
use crate::error::{Error, Result};
use crate::jet::{Jet, JetShape, ScaledJet, DEFAULT_UNIT_TOL};
use crate::lattice::{LatticeWithForm, SignedPermutation};
use crate::theta::{sigma_of_jet, ThetaFunction, DEFAULT_TRUNCATION_TOL};

/// Below this modulus a class is treated as vanishing.
pub const NEAR_ZERO: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn parity_sign(x: i64) -> f64 {
    if x.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Split equivariant bundle data at a fixed component.
#[derive(Clone, Debug, PartialEq)]
pub struct ToyBundle {
    lattice: LatticeWithForm,
    m: Vec<i64>,
    roots: Vec<Jet>,
    shape: JetShape,
    /// `n ↦ ε(V^{𝕋[n]})`; `0` stands for the circle-fixed part and `1` for `V`.
    signs: BTreeMap<u64, i8>,
}

impl ToyBundle {
    pub fn new(
        lattice: LatticeWithForm,
        m: Vec<i64>,
        roots: Vec<Jet>,
        shape: JetShape,
        signs: BTreeMap<u64, i8>,
    ) -> Result<Self> {
        let d = lattice.rank();
        if m.len() != d || roots.len() != d {
            return Err(Error::Parameter(format!(
                "rank-{d} bundle needs {d} rotation numbers and roots, got {} and {}",
                m.len(),
                roots.len()
            )));
        }
        lattice.check_member(&m)?;
        if roots.iter().any(|x| x.constant_term().norm() != 0.0) {
            return Err(Error::Parameter("Chern roots must be nilpotent".into()));
        }
        if roots.iter().any(|x| x.nvars() > shape.nvars) {
            return Err(Error::Parameter(
                "roots use more generators than the component has".into(),
            ));
        }
        if signs.values().any(|&s| s != 1 && s != -1) {
            return Err(Error::Parameter("orientation signs must be ±1".into()));
        }
        let roots = roots.iter().map(|x| x.embed(shape)).collect();
        Ok(Self {
            lattice,
            m,
            roots,
            shape,
            signs,
        })
    }

    /// Spin bundle with all orientation signs `+1`.
    pub fn spin(m: Vec<i64>, roots: Vec<Jet>, shape: JetShape) -> Result<Self> {
        let lattice = LatticeWithForm::spin(m.len())?;
        Self::new(lattice, m, roots, shape, BTreeMap::new())
    }

    /// The rank-0 bundle.
    pub fn zero(shape: JetShape) -> Self {
        Self {
            lattice: LatticeWithForm::trivial(),
            m: Vec::new(),
            roots: Vec::new(),
            shape,
            signs: BTreeMap::new(),
        }
    }

    pub fn lattice(&self) -> &LatticeWithForm {
        &self.lattice
    }

    pub fn rotation_numbers(&self) -> &[i64] {
        &self.m
    }

    pub fn roots(&self) -> &[Jet] {
        &self.roots
    }

    pub fn shape(&self) -> JetShape {
        self.shape
    }

    pub fn rank(&self) -> usize {
        self.m.len()
    }

    pub fn max_rotation(&self) -> i64 {
        self.m.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    /// Indices of the summands in `V^{𝕋[n]}`: `n | m_j`, or `m_j = 0` for `n = 0`.
    pub fn fixed_indices(&self, n: u64) -> Vec<usize> {
        (0..self.rank())
            .filter(|&j| match n {
                0 => self.m[j] == 0,
                n => self.m[j].rem_euclid(n as i64) == 0,
            })
            .collect()
    }

    /// `ε(V^{𝕋[n]})`. Subgroups with the same fixed sub-bundle share a sign:
    /// if `V^{𝕋[n]} = V` the sign of `V` is used, if it equals `V^𝕋` the sign
    /// of `V^𝕋`.
    pub fn sign(&self, n: u64) -> i8 {
        let jn = self.fixed_indices(n);
        let key = if n == 1 || jn.len() == self.rank() {
            1
        } else if n == 0 || jn == self.fixed_indices(0) {
            0
        } else {
            n
        };
        self.signs.get(&key).copied().unwrap_or(1)
    }

    pub fn signs(&self) -> &BTreeMap<u64, i8> {
        &self.signs
    }

    fn explicit_signs(&self, up_to: i64) -> BTreeMap<u64, i8> {
        (0..=up_to.max(1) as u64)
            .map(|n| (n, self.sign(n)))
            .collect()
    }

    /// Moves the data by a Weyl element: `(m, x) ↦ (wm, wx)`. Reversing a line
    /// summand reverses the orientation of every fixed sub-bundle containing it.
    pub fn weyl_move(&self, w: &SignedPermutation) -> Result<Self> {
        if w.rank() != self.rank() {
            return Err(Error::Parameter("Weyl element of the wrong rank".into()));
        }
        let m = w.apply_i64(&self.m);
        let roots = w.apply_jets(&self.roots);
        let mut moved = Self {
            lattice: self.lattice.clone(),
            m,
            roots,
            shape: self.shape,
            signs: BTreeMap::new(),
        };
        self.lattice.check_member(&moved.m)?;
        let bound = self.max_rotation();
        let mut signs = BTreeMap::new();
        for n in 0..=bound.max(1) as u64 {
            let flips = moved
                .fixed_indices(n)
                .iter()
                .filter(|&&j| w.signs()[j] < 0)
                .count();
            let s = if flips % 2 == 0 {
                self.sign(n)
            } else {
                -self.sign(n)
            };
            signs.insert(n, s);
        }
        moved.signs = signs;
        Ok(moved)
    }

    /// Replaces the roots by `x′_i = Σ_j O_ij x_j` for a real matrix `O`.
    pub fn mix_roots(&self, o: &[Vec<f64>]) -> Result<Self> {
        let d = self.rank();
        if o.len() != d || o.iter().any(|row| row.len() != d) {
            return Err(Error::Parameter("mixing matrix of the wrong size".into()));
        }
        let roots = o
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.roots)
                    .fold(Jet::zero(self.shape), |acc, (&a, x)| &acc + &x.scale(c(a)))
            })
            .collect();
        Ok(Self {
            roots,
            ..self.clone()
        })
    }

    pub fn with_signs(&self, signs: BTreeMap<u64, i8>) -> Result<Self> {
        Self::new(
            self.lattice.clone(),
            self.m.clone(),
            self.roots.clone(),
            self.shape,
            signs,
        )
    }

    /// `V ⊕ W`, oriented by the product orientation on each fixed sub-bundle.
    pub fn direct_sum(&self, other: &ToyBundle) -> Result<Self> {
        let shape = self.shape.join(other.shape);
        let lattice = LatticeWithForm::direct_sum(&[self.lattice.clone(), other.lattice.clone()]);
        let mut m = self.m.clone();
        m.extend(&other.m);
        let roots: Vec<Jet> = self
            .roots
            .iter()
            .chain(&other.roots)
            .map(|x| x.embed(shape))
            .collect();
        let bound = self.max_rotation().max(other.max_rotation());
        let a = self.explicit_signs(bound);
        let b = other.explicit_signs(bound);
        let signs = a.iter().map(|(&n, &s)| (n, s * b[&n])).collect();
        Self::new(lattice, m, roots, shape, signs)
    }

    /// Pulls the data back along a map of components, given by the images of
    /// the Chern-root generators.
    pub fn substitute(&self, images: &[Jet]) -> Result<Self> {
        let roots: Vec<Jet> = self
            .roots
            .iter()
            .map(|x| x.substitute(images))
            .collect::<Result<_>>()?;
        let shape = images
            .iter()
            .fold(JetShape::new(0, self.shape.cap), |s, j| s.join(j.shape()));
        Self::new(
            self.lattice.clone(),
            self.m.clone(),
            roots,
            shape,
            self.signs.clone(),
        )
    }

    /// `v_j = m_j z + x_j`.
    pub fn point(&self, z: Complex64) -> Vec<Jet> {
        self.m
            .iter()
            .zip(&self.roots)
            .map(|(&mj, x)| x.add_scalar(z * mj as f64))
            .collect()
    }

    /// `½ Σ G_ij (m_i z + x_i)(m_j z + x_j)` with `z` a formal variable.
    pub fn borel_c2(&self) -> Result<Jet> {
        let shape = JetShape::new(self.shape.nvars + 1, self.shape.cap);
        if self.rank() == 0 {
            return Ok(Jet::zero(shape));
        }
        Ok(self.lattice.borel_c2(&self.m, &self.roots)?.embed(shape))
    }
}

/// A class evaluated at a sample point `z` of the circle direction.
#[derive(Clone, Debug)]
pub struct EvaluatedClass {
    pub z: Complex64,
    pub value: ScaledJet,
    pub provenance: String,
}

impl EvaluatedClass {
    pub fn jet(&self) -> Result<Jet> {
        self.value.clone().into_jet()
    }

    pub fn constant(&self) -> Complex64 {
        self.value.jet.constant_term() * self.value.log_scale.exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LiftRatio {
    pub ratio: Complex64,
    pub predicted: Complex64,
}

/// `F(θ, m̄, ā)` at the point `v`:
/// `exp((k/n) Σ_i (Gm̄)_i v_i) · exp((k/n) φ(m̄) ā) · θ(v + m̄ā)`.
pub fn f_eval_scaled(
    theta: &ThetaFunction,
    mbar: &[i64],
    lift: &LiftedPoint,
    point: &[Jet],
    shape: JetShape,
    params: &CurveParams,
) -> Result<ScaledJet> {
    let lattice = theta.lattice();
    lattice.check_member(mbar)?;
    if point.len() != lattice.rank() {
        return Err(Error::Parameter(format!(
            "rank-{} theta function evaluated at {} coordinates",
            lattice.rank(),
            point.len()
        )));
    }
    let (_, k) = lift.ell_k();
    let r = k as f64 / lift.order() as f64;
    let abar = lift.abar();
    let gm = lattice.ihat_unchecked(mbar);
    let phi = lattice.twice_phi(mbar) as f64 / 2.0;
    let mut e = Jet::constant(abar * (r * phi), shape);
    for (g, v) in gm.iter().zip(point) {
        if *g != 0 {
            e = &e + &v.scale(c(r * *g as f64));
        }
    }
    let args: Vec<Jet> = point
        .iter()
        .zip(mbar)
        .map(|(v, &mi)| v.add_scalar(abar * mi as f64))
        .collect();
    let th = theta.eval_scaled(&args, shape, params, DEFAULT_TRUNCATION_TOL)?;
    Ok(ScaledJet::exp_of(&e).mul(&th))
}

pub fn f_eval(
    theta: &ThetaFunction,
    mbar: &[i64],
    lift: &LiftedPoint,
    point: &[Jet],
    shape: JetShape,
    params: &CurveParams,
) -> Result<Jet> {
    f_eval_scaled(theta, mbar, lift, point, shape, params)?.into_jet()
}

/// `F(lift′)/F(lift)` on constant terms, against the predicted
/// `w(a,q^{1/n})^{δφ(m̄)}` (with the root-of-unity correction when the lifts
/// also differ along `2πi`).
pub fn f_lift_transform(
    theta: &ThetaFunction,
    mbar: &[i64],
    lift: &LiftedPoint,
    lift2: &LiftedPoint,
    point: &[Jet],
    shape: JetShape,
    params: &CurveParams,
) -> Result<LiftRatio> {
    let (ds, delta) = lift.shift_to(lift2)?;
    let f1 = f_eval_scaled(theta, mbar, lift, point, shape, params)?;
    let f2 = f_eval_scaled(theta, mbar, lift2, point, shape, params)?;
    let c1 = f1.jet.constant_term();
    if !(f1.log_abs_constant() > NEAR_ZERO.ln()) {
        return Err(Error::DivisionNearZero(c1.norm() * f1.log_scale.exp()));
    }
    let ratio = f2.jet.constant_term() / c1 * (f2.log_scale - f1.log_scale).exp();
    let phi = theta.lattice().phi(mbar)?;
    let parity: i64 = theta.parity().iter().zip(mbar).map(|(p, m)| p * m).sum();
    let predicted =
        lift.lift_change_factor(lift2, phi, params)? * parity_sign(parity * (ds + delta));
    Ok(LiftRatio { ratio, predicted })
}

/// `θ(Q, ā)` for the bundle `V`: `F(θ, m, ā)` at `v = mz + x`.
pub fn theta_of_bundle(
    theta: &ThetaFunction,
    v: &ToyBundle,
    lift: &LiftedPoint,
    z: Complex64,
    params: &CurveParams,
) -> Result<EvaluatedClass> {
    theta.require_lattice(v.lattice())?;
    let value = f_eval_scaled(
        theta,
        v.rotation_numbers(),
        lift,
        &v.point(z),
        v.shape(),
        params,
    )?;
    Ok(EvaluatedClass {
        z,
        value,
        provenance: format!(
            "{theta} on m={:?} at a={}",
            v.rotation_numbers(),
            lift.base()
        ),
    })
}

/// The unit `R(V, ā)` comparing the Euler class of the fixed sub-bundle
/// `V^{𝕋[n]}` with `F(σ_d, m, ā)`:
///
/// `R = (ε_n/ε_1) ∏_{n | m_j} σ(v_j) / F(σ_d, m, ā)(v)`.
///
/// For `n | m_j` the shift `m_j ā = 2πiA + 2πiτB` is a lattice vector, so the
/// quotient `σ(v_j)/σ(v_j + m_j ā) = (−1)^{A+B} e^{B v_j} q^{B²/2}` is taken in
/// closed form and only the factors with `n ∤ m_j` are divided numerically.
pub fn r_eval(
    v: &ToyBundle,
    lift: &LiftedPoint,
    z: Complex64,
    params: &CurveParams,
) -> Result<ScaledJet> {
    let shape = v.shape();
    let n = lift.order();
    let (ell, k) = lift.ell_k();
    let abar = lift.abar();
    let m = v.rotation_numbers();
    let pts = v.point(z);
    let jn = v.fixed_indices(n);
    let mut sign = v.sign(n) as f64 * v.sign(1) as f64;
    let r = k as f64 / n as f64;
    let phi = m.iter().map(|x| x * x).sum::<i64>() as f64 / 2.0;
    let mut e = Jet::constant(-abar * (r * phi), shape);
    let mut denom = ScaledJet::one(shape);
    for (j, vj) in pts.iter().enumerate() {
        let mj = m[j];
        if mj != 0 {
            e = &e - &vj.scale(c(r * mj as f64));
        }
        if jn.contains(&j) {
            let p = mj / n as i64;
            let (a, b) = (p * ell, p * k);
            sign *= parity_sign(a + b);
            e = &(&e + &vj.scale(c(b as f64)))
                + &Jet::constant(params.tau_period() * (0.5 * (b * b) as f64), shape);
        } else {
            denom = denom.mul(&sigma_of_jet(
                &vj.add_scalar(abar * mj as f64),
                params,
                DEFAULT_TRUNCATION_TOL,
            ));
        }
    }
    let inv = denom.invert(DEFAULT_UNIT_TOL)?;
    Ok(ScaledJet::exp_of(&e).mul(&inv).scale(c(sign)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{lift, CurvePoint};
    use crate::theta::sigma_d_jets;

    fn params() -> CurveParams {
        CurveParams::square()
    }

    fn roots2(shape: JetShape) -> Vec<Jet> {
        vec![
            Jet::variable(0, shape).scale(c(0.7)),
            &Jet::variable(1, shape) - &Jet::variable(0, shape).scale(c(0.2)),
        ]
    }

    #[test]
    fn fixed_indices_and_sign_lookup() {
        let s = JetShape::new(2, 4);
        let mut signs = BTreeMap::new();
        signs.insert(1, -1);
        signs.insert(0, 1);
        signs.insert(2, -1);
        let v = ToyBundle::new(
            LatticeWithForm::spin(3).unwrap(),
            vec![2, 0, 4],
            vec![Jet::variable(0, s), Jet::variable(1, s), Jet::zero(s)],
            s,
            signs,
        )
        .unwrap();
        assert_eq!(v.fixed_indices(0), vec![1]);
        assert_eq!(v.fixed_indices(4), vec![1, 2]);
        // every summand is fixed by the subgroup of order 2
        assert_eq!(v.fixed_indices(2), vec![0, 1, 2]);
        assert_eq!(v.sign(2), -1);
        assert_eq!(v.sign(7), v.sign(0));
        assert!(ToyBundle::spin(vec![1, 0], roots2(s), s).is_err());
    }

    #[test]
    fn weyl_move_flips_orientations() {
        let s = JetShape::new(2, 4);
        let v = ToyBundle::spin(vec![2, 0], roots2(s), s).unwrap();
        let w = SignedPermutation::sign_change(2, &[0, 1]);
        let moved = v.weyl_move(&w).unwrap();
        assert_eq!(moved.rotation_numbers(), &[-2, 0]);
        // both summands flip inside V, only one inside V^𝕋
        assert_eq!(moved.sign(1), 1);
        assert_eq!(moved.sign(0), -1);
    }

    #[test]
    fn f_at_zero_point_is_theta() {
        let p = params();
        let s = JetShape::new(2, 3);
        let v = ToyBundle::spin(vec![1, 1], roots2(s), s).unwrap();
        let theta = ThetaFunction::sigma_d(2).unwrap();
        let z = Complex64::new(0.3, 0.2);
        let l0 = lift(&CurvePoint::zero(), 0, 0, &p);
        let f = theta_of_bundle(&theta, &v, &l0, z, &p).unwrap();
        let direct = sigma_d_jets(&v.point(z), s, &p, DEFAULT_TRUNCATION_TOL);
        assert!(f.value.rel_diff(&direct) < 1e-14);
    }

    #[test]
    fn zero_rotation_bundle_is_translation_free() {
        let p = params();
        let s = JetShape::new(2, 3);
        let v = ToyBundle::spin(vec![0, 0], roots2(s), s).unwrap();
        let theta = ThetaFunction::sigma_d(2).unwrap();
        let a = CurvePoint::from_fractions(1, 2, 3).unwrap();
        let l = lift(&a, 0, 0, &p);
        let f1 = theta_of_bundle(&theta, &v, &l, Complex64::new(0.1, 0.0), &p).unwrap();
        let f2 = theta_of_bundle(&theta, &v, &l, Complex64::new(-0.4, 0.3), &p).unwrap();
        assert!(f1.value.rel_diff(&f2.value) < 1e-14);
    }

    #[test]
    fn lift_transform_examples() {
        let p = params();
        let s = JetShape::new(2, 3);
        let theta = ThetaFunction::sigma_d(2).unwrap();
        let a = CurvePoint::from_fractions(1, 0, 2).unwrap();
        let l0 = lift(&a, 0, 0, &p);
        let pt = ToyBundle::spin(vec![1, 1], roots2(s), s)
            .unwrap()
            .point(Complex64::new(0.2, 0.1));
        let same = f_lift_transform(&theta, &[1, 1], &l0, &l0, &pt, s, &p).unwrap();
        assert!((same.ratio - 1.0).norm() < 1e-14);
        assert!((same.predicted - 1.0).norm() < 1e-14);
        let l1 = lift(&a, 0, 1, &p);
        let one = f_lift_transform(&theta, &[1, 1], &l0, &l1, &pt, s, &p).unwrap();
        assert!((one.predicted + 1.0).norm() < 1e-12);
        assert!((one.ratio - one.predicted).norm() < 1e-9);
        let b = CurvePoint::from_fractions(1, 2, 3).unwrap();
        let (m0, m2) = (lift(&b, 0, 0, &p), lift(&b, 0, 2, &p));
        let two = f_lift_transform(&theta, &[2, 0], &m0, &m2, &pt, s, &p).unwrap();
        assert!((two.ratio - two.predicted).norm() < 1e-9 * two.predicted.norm());
        // a shift along 2πi as well
        let m3 = lift(&b, 1, -1, &p);
        let mixed = f_lift_transform(&theta, &[1, 1], &m0, &m3, &pt, s, &p).unwrap();
        assert!((mixed.ratio - mixed.predicted).norm() < 1e-9 * mixed.predicted.norm());
    }

    #[test]
    fn r_trivial_at_zero() {
        let p = params();
        let s = JetShape::new(2, 4);
        let v = ToyBundle::spin(vec![2, 4], roots2(s), s).unwrap();
        let l0 = lift(&CurvePoint::zero(), 0, 0, &p);
        let r = r_eval(&v, &l0, Complex64::new(0.07, -0.03), &p).unwrap();
        assert!(r.rel_diff(&ScaledJet::one(s)) < 1e-14);
    }

    #[test]
    fn r_matches_the_quotient_it_replaces() {
        // when every fixed factor is a unit, R·F(σ_d) is the signed Euler class
        let p = params();
        let s = JetShape::new(2, 4);
        let mut signs = BTreeMap::new();
        signs.insert(2, -1);
        let v = ToyBundle::new(
            LatticeWithForm::spin(3).unwrap(),
            vec![2, 3, 1],
            {
                let mut r = roots2(s);
                r.push(Jet::variable(1, s).scale(c(0.3)));
                r
            },
            s,
            signs,
        )
        .unwrap();
        let a = CurvePoint::from_fractions(1, 1, 2).unwrap();
        for (ss, st) in [(0, 0), (1, -1), (0, 2)] {
            let l = lift(&a, ss, st, &p);
            let z = Complex64::new(0.11, 0.05);
            let r = r_eval(&v, &l, z, &p).unwrap();
            let theta = ThetaFunction::sigma_d(3).unwrap();
            let f = f_eval_scaled(&theta, v.rotation_numbers(), &l, &v.point(z), s, &p).unwrap();
            let pts = v.point(z);
            let num = sigma_of_jet(&pts[0], &p, DEFAULT_TRUNCATION_TOL).scale(c(-1.0));
            assert!(r.mul(&f).rel_diff(&num) < 1e-10);
        }
    }

    #[test]
    fn r_spin4_example_is_a_unit() {
        let p = params();
        let s = JetShape::new(2, 4);
        let v = ToyBundle::spin(vec![2, 0], roots2(s), s).unwrap();
        let a = CurvePoint::from_fractions(0, 1, 2).unwrap();
        let l = lift(&a, 0, 0, &p);
        for z in [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.1, 0.0),
            Complex64::new(0.0, -0.1),
        ] {
            let r = r_eval(&v, &l, z, &p).unwrap().into_jet().unwrap();
            assert!(r.constant_term().norm() > 1e-6);
        }
    }

    #[test]
    fn direct_sum_signs_multiply() {
        let s = JetShape::new(2, 3);
        let mut sa = BTreeMap::new();
        sa.insert(1, -1);
        let a = ToyBundle::new(
            LatticeWithForm::spin(2).unwrap(),
            vec![1, 1],
            roots2(s),
            s,
            sa,
        )
        .unwrap();
        let mut sb = BTreeMap::new();
        sb.insert(1, -1);
        sb.insert(0, -1);
        let b = ToyBundle::new(
            LatticeWithForm::spin(2).unwrap(),
            vec![2, 0],
            roots2(s),
            s,
            sb,
        )
        .unwrap();
        let sum = a.direct_sum(&b).unwrap();
        assert_eq!(sum.rotation_numbers(), &[1, 1, 2, 0]);
        assert_eq!(sum.sign(1), 1);
        assert_eq!(sum.sign(0), -1);
        assert_eq!(sum.sign(2), a.sign(2) * b.sign(2));
        let z = ToyBundle::zero(s);
        assert_eq!(
            a.direct_sum(&z).unwrap().rotation_numbers(),
            a.rotation_numbers()
        );
    }
}
