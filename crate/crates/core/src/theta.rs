//! The Weierstrass sigma function and theta functions on cocharacter lattices.
//!
//! `σ(z) = (u^{1/2} − u^{−1/2}) ∏_{n≥1} (1 − qⁿu)(1 − qⁿu⁻¹)/(1 − qⁿ)²` with
//! `u^r = e^{rz}`. All evaluations run the product formula on jets and keep
//! the result as a [`ScaledJet`], since theta values at large arguments grow
//! like `e^{π·Im τ·|m|²}`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::curve::CurveParams;
use crate::error::{Error, Result};
use crate::jet::{Jet, JetShape, ScaledJet};
use crate::lattice::{LatticeWithForm, SignedPermutation};

/// Truncation tolerance for the q-product.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-18;
const TRUNCATION_MARGIN: usize = 5;
const ZERO_SAMPLE_TOL: f64 = 1e-14;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Number of q-product factors needed at `z` for the given tolerance.
pub fn truncation_terms(z: Complex64, params: &CurveParams, tol: f64) -> usize {
    let r = z.re.abs();
    // ln(1 + |u| + |u|⁻¹) without overflow
    let ln_size = r + (1.0 + (-r).exp() + (-2.0 * r).exp()).ln();
    let ln_q = -2.0 * PI * params.tau().im;
    let n = ((tol.ln() - ln_size) / ln_q).ceil();
    (n.max(0.0) as usize) + TRUNCATION_MARGIN
}

/// `1 − e^{e}` as a scaled jet.
fn one_minus_exp(e: &Jet) -> ScaledJet {
    let re = e.constant_term().re;
    if re > 0.0 {
        let shifted = e.add_scalar(c(-re)).exp();
        ScaledJet {
            jet: (&Jet::constant(c((-re).exp()), e.shape()) - &shifted),
            log_scale: re,
        }
    } else {
        ScaledJet {
            jet: (&Jet::one(e.shape()) - &e.exp()),
            log_scale: 0.0,
        }
    }
}

/// `e^{a} − e^{b}` as a scaled jet.
fn exp_difference(a: &Jet, b: &Jet) -> ScaledJet {
    let s = a.constant_term().re.max(b.constant_term().re);
    let ea = a.add_scalar(c(-s)).exp();
    let eb = b.add_scalar(c(-s)).exp();
    ScaledJet {
        jet: &ea - &eb,
        log_scale: s,
    }
}

/// σ on the univariate jet `z0 + ε` with an explicit number of product factors.
pub fn sigma_jet_terms(z0: Complex64, params: &CurveParams, cap: usize, terms: usize) -> ScaledJet {
    let shape = JetShape::new(1, cap);
    let v = Jet::variable(0, shape).add_scalar(z0);
    let half = v.scale(c(0.5));
    let mut acc = exp_difference(&half, &(-&half));
    let tp = params.tau_period();
    for n in 1..=terms {
        let shift = tp * n as f64;
        let qn = shift.exp();
        let denom = (ONE - qn) * (ONE - qn);
        let f1 = one_minus_exp(&v.add_scalar(shift));
        let f2 = one_minus_exp(&(-&v).add_scalar(shift));
        acc = acc.mul(&f1).mul(&f2).scale(denom.inv());
    }
    acc
}

/// Taylor data of σ at `z0` to order `cap`, scaled.
pub fn sigma_jet_scaled(z0: Complex64, params: &CurveParams, cap: usize, tol: f64) -> ScaledJet {
    sigma_jet_terms(z0, params, cap, truncation_terms(z0, params, tol))
}

/// The jet of σ at `z0` to order `cap`, as the coefficients of a univariate jet.
pub fn sigma_jet(z0: Complex64, params: &CurveParams, cap: usize) -> Jet {
    let s = sigma_jet_scaled(z0, params, cap, DEFAULT_TRUNCATION_TOL);
    s.jet.scale(c(s.log_scale.exp()))
}

/// `σ(z)`.
pub fn sigma(z: Complex64, params: &CurveParams) -> Complex64 {
    sigma_with_tol(z, params, DEFAULT_TRUNCATION_TOL)
}

pub fn sigma_with_tol(z: Complex64, params: &CurveParams, tol: f64) -> Complex64 {
    let s = sigma_jet_scaled(z, params, 0, tol);
    s.jet.constant_term() * s.log_scale.exp()
}

/// `σ(v)` for a jet `v`, through the Taylor data at its constant term.
pub fn sigma_of_jet(v: &Jet, params: &CurveParams, tol: f64) -> ScaledJet {
    let s = sigma_jet_scaled(v.constant_term(), params, v.degree_cap(), tol);
    ScaledJet {
        jet: v
            .compose_analytic(s.jet.univariate_coeffs())
            .expect("sigma jet has cap + 1 coefficients"),
        log_scale: s.log_scale,
    }
}

/// `σ_d(z) = ∏ σ(z_i)` on jets.
pub fn sigma_d_jets(z: &[Jet], shape: JetShape, params: &CurveParams, tol: f64) -> ScaledJet {
    z.iter().fold(ScaledJet::one(shape), |acc, zi| {
        acc.mul(&sigma_of_jet(zi, params, tol))
    })
}

pub fn sigma_d(z: &[Complex64], params: &CurveParams) -> Complex64 {
    z.iter().map(|&zi| sigma(zi, params)).product()
}

/// `(−1)^{A+B} e^{−Bw} q^{−B²/2}`, the factor with
/// `σ(w + 2πiA + 2πiτB) = (−1)^{A+B} e^{−Bw} q^{−B²/2} σ(w)`.
pub fn sigma_period_multiplier(w: &Jet, a: i64, b: i64, params: &CurveParams) -> ScaledJet {
    let sign = if (a + b).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let e = w
        .scale(c(-(b as f64)))
        .add_scalar(-params.tau_period() * (0.5 * (b * b) as f64));
    ScaledJet::exp_of(&e).scale(c(sign))
}

#[derive(Clone, Debug, PartialEq)]
pub enum ThetaDescriptor {
    SigmaD(usize),
    Product(Vec<ThetaFunction>),
    Power(Box<ThetaFunction>, u32),
    Translate(Box<ThetaFunction>, Vec<Complex64>),
}

/// A theta function on `Ť ⊗ ℂ` together with its level data.
///
/// With `G` the Gram matrix of the lattice, `p` the parity vector and `c` the
/// accumulated translation,
/// `θ(z + 2πiτm) = (−1)^{⟨p,m⟩} exp(−Σ (Gm)_i (z_i + c_i)) q^{−φ(m)} θ(z)`.
/// For members of the lattice the sign is `+1` whenever `p` pairs evenly with
/// it, which is the case for `σ_d` on `Spin(2d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaFunction {
    desc: ThetaDescriptor,
    lattice: LatticeWithForm,
    parity: Vec<i64>,
    shift: Vec<Complex64>,
}

impl ThetaFunction {
    /// `σ_d` on the `Spin(2d)` lattice at level `c₂`.
    pub fn sigma_d(d: usize) -> Result<Self> {
        Ok(Self {
            desc: ThetaDescriptor::SigmaD(d),
            lattice: LatticeWithForm::spin(d)?,
            parity: vec![1; d],
            shift: vec![Complex64::new(0.0, 0.0); d],
        })
    }

    /// Pointwise product on the direct sum of the factors' lattices.
    pub fn product(factors: Vec<ThetaFunction>) -> Self {
        let lattice = LatticeWithForm::direct_sum(
            &factors
                .iter()
                .map(|f| f.lattice.clone())
                .collect::<Vec<_>>(),
        );
        let parity = factors
            .iter()
            .flat_map(|f| f.parity.iter().copied())
            .collect();
        let shift = factors
            .iter()
            .flat_map(|f| f.shift.iter().copied())
            .collect();
        Self {
            desc: ThetaDescriptor::Product(factors),
            lattice,
            parity,
            shift,
        }
    }

    /// The constant `1` on the rank-0 lattice.
    pub fn one() -> Self {
        Self::product(Vec::new())
    }

    /// `θ^k`, of level `k` times that of `θ`.
    pub fn power(theta: ThetaFunction, k: u32) -> Self {
        if k == 1 {
            return theta;
        }
        let lattice = theta.lattice.scaled(k as i64);
        let parity = theta.parity.iter().map(|p| p * k as i64).collect();
        let shift = theta.shift.clone();
        Self {
            desc: ThetaDescriptor::Power(Box::new(theta), k),
            lattice,
            parity,
            shift,
        }
    }

    /// `z ↦ θ(z + c)`.
    pub fn translate(theta: ThetaFunction, c: Vec<Complex64>) -> Result<Self> {
        if c.len() != theta.rank() {
            return Err(Error::IncompatibleLattices(format!(
                "translation of length {} for a rank-{} theta function",
                c.len(),
                theta.rank()
            )));
        }
        let shift = theta.shift.iter().zip(&c).map(|(a, b)| a + b).collect();
        Ok(Self {
            lattice: theta.lattice.clone(),
            parity: theta.parity.clone(),
            shift,
            desc: ThetaDescriptor::Translate(Box::new(theta), c),
        })
    }

    pub fn descriptor(&self) -> &ThetaDescriptor {
        &self.desc
    }

    pub fn lattice(&self) -> &LatticeWithForm {
        &self.lattice
    }

    pub fn parity(&self) -> &[i64] {
        &self.parity
    }

    pub fn shift(&self) -> &[Complex64] {
        &self.shift
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    /// Whether the Weyl invariance `θ(wz) = θ(z)` is part of the level data.
    pub fn has_weyl_symmetry(&self) -> bool {
        match &self.desc {
            ThetaDescriptor::SigmaD(_) => true,
            ThetaDescriptor::Product(fs) => fs.iter().all(ThetaFunction::has_weyl_symmetry),
            ThetaDescriptor::Power(t, _) => t.has_weyl_symmetry(),
            ThetaDescriptor::Translate(..) => false,
        }
    }

    /// Checks that `other` lives on the same lattice with the same form.
    pub fn require_lattice(&self, other: &LatticeWithForm) -> Result<()> {
        if self.lattice.rank() != other.rank() || self.lattice.gram() != other.gram() {
            return Err(Error::IncompatibleLattices(format!(
                "theta function on {} applied to data on {}",
                self.lattice, other
            )));
        }
        Ok(())
    }

    /// `θ(z)` on jets; `shape` fixes the shape of constant results.
    pub fn eval_scaled(
        &self,
        z: &[Jet],
        shape: JetShape,
        params: &CurveParams,
        tol: f64,
    ) -> Result<ScaledJet> {
        if z.len() != self.rank() {
            return Err(Error::Parameter(format!(
                "rank-{} theta function evaluated at {} arguments",
                self.rank(),
                z.len()
            )));
        }
        Ok(match &self.desc {
            ThetaDescriptor::SigmaD(_) => sigma_d_jets(z, shape, params, tol),
            ThetaDescriptor::Product(fs) => {
                let mut acc = ScaledJet::one(shape);
                let mut off = 0;
                for f in fs {
                    let r = f.rank();
                    acc = acc.mul(&f.eval_scaled(&z[off..off + r], shape, params, tol)?);
                    off += r;
                }
                acc
            }
            ThetaDescriptor::Power(t, k) => {
                t.eval_scaled(z, shape, params, tol)?.powi(*k as i64)?
            }
            ThetaDescriptor::Translate(t, cs) => {
                let moved: Vec<Jet> = z
                    .iter()
                    .zip(cs)
                    .map(|(zi, ci)| zi.add_scalar(*ci))
                    .collect();
                t.eval_scaled(&moved, shape, params, tol)?
            }
        })
    }

    pub fn eval_jets(&self, z: &[Jet], shape: JetShape, params: &CurveParams) -> Result<ScaledJet> {
        self.eval_scaled(z, shape, params, DEFAULT_TRUNCATION_TOL)
    }

    /// `θ(z)` at a point, possibly `±∞` outside floating-point range.
    pub fn eval(&self, z: &[Complex64], params: &CurveParams) -> Result<Complex64> {
        let s = self.eval_scaled_point(z, params)?;
        Ok(s.jet.constant_term() * s.log_scale.exp())
    }

    pub fn eval_scaled_point(&self, z: &[Complex64], params: &CurveParams) -> Result<ScaledJet> {
        let shape = JetShape::new(0, 0);
        let jets: Vec<Jet> = z.iter().map(|&zi| Jet::constant(zi, shape)).collect();
        self.eval_jets(&jets, shape, params)
    }

    /// The predicted factor `θ(z + 2πiτm) / θ(z)` as a scaled jet.
    pub fn level_multiplier(
        &self,
        m: &[i64],
        z: &[Jet],
        shape: JetShape,
        params: &CurveParams,
    ) -> Result<ScaledJet> {
        self.lattice.check_member(m)?;
        let gm = self.lattice.ihat_unchecked(m);
        let phi = self.lattice.twice_phi(m) as f64 / 2.0;
        let mut e = Jet::constant(-params.tau_period() * phi, shape);
        for ((g, zi), ci) in gm.iter().zip(z).zip(&self.shift) {
            if *g != 0 {
                e = &e - &zi.add_scalar(*ci).scale(c(*g as f64));
            }
        }
        let parity: i64 = self.parity.iter().zip(m).map(|(p, mi)| p * mi).sum();
        let sign = if parity.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Ok(ScaledJet::exp_of(&e).scale(c(sign)))
    }

    /// Parses `sigma`, `sigma_d(d)`, `pow(θ,k)`, `prod(θ,...)` and `one`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser {
            s: text.as_bytes(),
            pos: 0,
            src: text,
        };
        let t = p.theta()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(t)
    }
}

impl fmt::Display for ThetaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.desc {
            ThetaDescriptor::SigmaD(d) => write!(f, "sigma_d({d})"),
            ThetaDescriptor::Product(fs) if fs.is_empty() => write!(f, "one"),
            ThetaDescriptor::Product(fs) => {
                write!(f, "prod(")?;
                for (i, t) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            ThetaDescriptor::Power(t, k) => write!(f, "pow({t},{k})"),
            ThetaDescriptor::Translate(t, cs) => {
                write!(f, "translate({t}")?;
                for c in cs {
                    write!(f, ",{}{:+}i", c.re, c.im)?;
                }
                write!(f, ")")
            }
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at position {} in `{}`", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, ch: u8) -> Result<()> {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", ch as char)))
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len()
            && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
        {
            self.pos += 1;
        }
        self.src[start..self.pos].to_string()
    }

    fn number(&mut self) -> Result<u32> {
        let id = self.ident();
        id.parse()
            .map_err(|_| self.err("expected a non-negative integer"))
    }

    fn theta(&mut self) -> Result<ThetaFunction> {
        let name = self.ident();
        match name.as_str() {
            "sigma" => ThetaFunction::sigma_d(1),
            "one" => Ok(ThetaFunction::one()),
            "sigma_d" => {
                self.eat(b'(')?;
                let d = self.number()?;
                self.eat(b')')?;
                if d == 0 {
                    return Err(self.err("sigma_d needs a positive rank"));
                }
                ThetaFunction::sigma_d(d as usize)
            }
            "pow" => {
                self.eat(b'(')?;
                let t = self.theta()?;
                self.eat(b',')?;
                let k = self.number()?;
                self.eat(b')')?;
                Ok(ThetaFunction::power(t, k))
            }
            "prod" => {
                self.eat(b'(')?;
                let mut fs = vec![self.theta()?];
                loop {
                    self.skip_ws();
                    if self.s.get(self.pos) == Some(&b',') {
                        self.pos += 1;
                        fs.push(self.theta()?);
                    } else {
                        break;
                    }
                }
                self.eat(b')')?;
                Ok(ThetaFunction::product(fs))
            }
            "" => Err(self.err("expected a theta function")),
            other => Err(self.err(&format!("unknown theta function `{other}`"))),
        }
    }
}

/// Residuals of the functional equations at sampled points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelResidual {
    /// `max |θ(z + 2πiτm) − predicted·θ(z)| / |predicted·θ(z)|`.
    pub quasi: f64,
    /// `max |θ(wz) − θ(z)| / |θ(z)|`, when Weyl symmetry is declared.
    pub weyl: Option<f64>,
}

impl LevelResidual {
    pub fn max(&self) -> f64 {
        self.quasi.max(self.weyl.unwrap_or(0.0))
    }
}

/// Checks the declared level of `theta` for the cocharacter `m` and the Weyl
/// element `w` at the given sample points.
pub fn verify_level(
    theta: &ThetaFunction,
    m: &[i64],
    w: &SignedPermutation,
    samples: &[Vec<Complex64>],
    params: &CurveParams,
) -> Result<LevelResidual> {
    theta.lattice.check_member(m)?;
    let check_weyl = theta.has_weyl_symmetry();
    if check_weyl && !theta.lattice.contains_weyl(w) {
        return Err(Error::Parameter(format!(
            "{w} is not in the Weyl group of {}",
            theta.lattice
        )));
    }
    let shape = JetShape::new(0, 0);
    let tp = params.tau_period();
    let mut quasi = 0.0f64;
    let mut weyl = 0.0f64;
    for z in samples {
        let base = theta.eval_scaled_point(z, params)?;
        if !(base.jet.constant_term().norm() > ZERO_SAMPLE_TOL) {
            return Err(Error::SampleAtZero);
        }
        let moved: Vec<Complex64> = z
            .iter()
            .zip(m)
            .map(|(zi, &mi)| zi + tp * mi as f64)
            .collect();
        let lhs = theta.eval_scaled_point(&moved, params)?;
        let zj: Vec<Jet> = z.iter().map(|&zi| Jet::constant(zi, shape)).collect();
        let rhs = theta.level_multiplier(m, &zj, shape, params)?.mul(&base);
        quasi = quasi.max(nan_max(lhs.rel_diff(&rhs)));
        if check_weyl {
            let wz = w.apply_complex(z);
            let lw = theta.eval_scaled_point(&wz, params)?;
            weyl = weyl.max(nan_max(lw.rel_diff(&base)));
        }
    }
    Ok(LevelResidual {
        quasi,
        weyl: check_weyl.then_some(weyl),
    })
}

fn nan_max(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

/// A point with `|Re z|, |Im z| ≤ π·min(1, Im τ)` at distance at least
/// `margin` from every lattice point.
pub fn sample_point<R: Rng + ?Sized>(rng: &mut R, params: &CurveParams, margin: f64) -> Complex64 {
    let r = PI * params.tau().im.min(1.0);
    loop {
        let z = Complex64::new(rng.gen_range(-r..=r), rng.gen_range(-r..=r));
        if crate::curve::lattice_distance(z, params) >= margin {
            return z;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::TWO_PI_I;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params() -> CurveParams {
        CurveParams::square()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn sigma_vanishes_at_zero_and_is_odd() {
        let p = params();
        assert_eq!(
            sigma(Complex64::new(0.0, 0.0), &p),
            Complex64::new(0.0, 0.0)
        );
        let z = Complex64::new(0.3, 0.1);
        assert!(rel(sigma(-z, &p), -sigma(z, &p)) < 1e-12);
    }

    #[test]
    fn derivative_at_zero_is_one() {
        let j = sigma_jet(Complex64::new(0.0, 0.0), &params(), 1);
        assert!(j.constant_term().norm() < 1e-15);
        assert!((j.coeff(&[1]) - 1.0).norm() < 1e-10);
    }

    #[test]
    fn jet_constant_term_matches_value() {
        let p = CurveParams::new(Complex64::new(0.3, 0.8)).unwrap();
        let z = Complex64::new(0.5, -0.7);
        assert!(rel(sigma_jet(z, &p, 3).constant_term(), sigma(z, &p)) < 1e-12);
    }

    #[test]
    fn second_derivative_matches_finite_differences() {
        let p = params();
        let z0 = Complex64::new(0.5, 0.0);
        let h = 1e-3;
        let f = |x: f64| sigma(z0 + x, &p);
        let fd2 = (f(h) - f(0.0) * 2.0 + f(-h)) / (h * h) / 2.0;
        let j = sigma_jet(z0, &p, 2);
        assert!((j.coeff(&[2]) - fd2).norm() < 1e-6);
        // composing the Taylor data at 0.4 reproduces the derivatives
        let z1 = Complex64::new(0.4, 0.0);
        let a = Jet::variable(0, JetShape::new(1, 2)).add_scalar(z1);
        let comp = sigma_of_jet(&a, &p, DEFAULT_TRUNCATION_TOL);
        let g = |x: f64| sigma(z1 + x, &p);
        let fd1 = (g(h) - g(-h)) / (2.0 * h);
        let comp = comp.into_jet().unwrap();
        assert!((comp.coeff(&[1]) - fd1).norm() < 1e-6);
    }

    #[test]
    fn quasi_periodicity() {
        let p = CurveParams::new(Complex64::new(0.3, 0.8)).unwrap();
        let z = Complex64::new(0.4, 0.9);
        for n in -3i32..=3 {
            let lhs = sigma(z + p.tau_period() * n as f64, &p);
            let u = z.exp();
            let rhs =
                sigma(z, &p) * (-1.0f64).powi(n) * u.powi(-n) * p.q_pow(-(n * n) as f64 / 2.0);
            assert!(rel(lhs, rhs) < 1e-10, "n={n}");
        }
        assert!(rel(sigma(z + TWO_PI_I, &p), -sigma(z, &p)) < 1e-12);
    }

    #[test]
    fn truncation_converges() {
        let p = params();
        let z = Complex64::new(1.1, -2.0);
        let n = truncation_terms(z, &p, 1e-12);
        let a = sigma_jet_terms(z, &p, 0, n).jet.constant_term();
        let b = sigma_jet_terms(z, &p, 0, 2 * n).jet.constant_term();
        assert!((a - b).norm() / b.norm() < 1e-13);
    }

    #[test]
    fn huge_arguments_stay_finite_in_scaled_form() {
        let p = params();
        let z = Complex64::new(-2.0 * PI * 14.0 + 0.3, 0.2);
        let s = sigma_jet_scaled(z, &p, 2, DEFAULT_TRUNCATION_TOL);
        assert!(s.jet.is_finite());
        assert!(s.log_scale > 600.0);
        let pred = sigma_period_multiplier(
            &Jet::variable(0, JetShape::new(1, 2)).add_scalar(Complex64::new(0.3, 0.2)),
            0,
            14,
            &p,
        );
        let base = sigma_jet_scaled(Complex64::new(0.3, 0.2), &p, 2, DEFAULT_TRUNCATION_TOL);
        assert!(s.rel_diff(&pred.mul(&base)) < 1e-9);
    }

    #[test]
    fn sigma_d_zero_weyl_and_rank_one() {
        let p = params();
        let z = [
            Complex64::new(0.2, 0.1),
            Complex64::new(0.0, 0.0),
            Complex64::new(-0.4, 0.3),
        ];
        assert_eq!(sigma_d(&z, &p), Complex64::new(0.0, 0.0));
        let s1 = ThetaFunction::sigma_d(1).unwrap();
        let w = Complex64::new(0.7, -0.2);
        assert!(rel(s1.eval(&[w], &p).unwrap(), sigma(w, &p)) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s3 = ThetaFunction::sigma_d(3).unwrap();
        let z = [
            Complex64::new(0.2, 0.1),
            Complex64::new(0.5, -0.3),
            Complex64::new(-0.4, 0.3),
        ];
        for _ in 0..20 {
            let w = s3.lattice().random_weyl(&mut rng);
            let a = s3.eval(&w.apply_complex(&z), &p).unwrap();
            assert!(rel(a, s3.eval(&z, &p).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn level_examples() {
        let p = params();
        let samples = vec![
            vec![Complex64::new(0.3, 0.4)],
            vec![Complex64::new(-0.8, 1.2)],
        ];
        let s1 = ThetaFunction::sigma_d(1).unwrap();
        let id = SignedPermutation::identity(1);
        let r0 = verify_level(&s1, &[0], &id, &samples, &p).unwrap();
        assert_eq!(r0.max(), 0.0);
        // σ(uq) = −u⁻¹q^{-1/2}σ(u)
        let z = Complex64::new(0.3, 0.4);
        let lhs = sigma(z + p.tau_period(), &p);
        let rhs = -sigma(z, &p) / z.exp() * p.q_pow(-0.5);
        assert!(rel(lhs, rhs) < 1e-9);

        let s22 = ThetaFunction::product(vec![
            ThetaFunction::sigma_d(2).unwrap(),
            ThetaFunction::sigma_d(2).unwrap(),
        ]);
        let samples4 = vec![vec![
            Complex64::new(0.3, 0.4),
            Complex64::new(-0.2, 0.1),
            Complex64::new(0.9, -1.0),
            Complex64::new(0.1, 0.6),
        ]];
        let w = SignedPermutation::sign_change(4, &[0, 1]);
        let r = verify_level(&s22, &[2, 0, 0, 0], &w, &samples4, &p).unwrap();
        assert!(r.max() < 1e-9, "{r:?}");
    }

    #[test]
    fn combinators() {
        let p = params();
        let s2 = ThetaFunction::sigma_d(2).unwrap();
        assert_eq!(ThetaFunction::power(s2.clone(), 1), s2);
        let one = ThetaFunction::one();
        assert_eq!(one.rank(), 0);
        assert_eq!(one.eval(&[], &p).unwrap(), Complex64::new(1.0, 0.0));

        let sq = ThetaFunction::power(ThetaFunction::sigma_d(1).unwrap(), 2);
        assert_eq!(sq.lattice().phi(&[2]).unwrap(), 4);
        let samples = vec![vec![Complex64::new(0.3, -0.5)]];
        let r = verify_level(&sq, &[2], &SignedPermutation::identity(1), &samples, &p).unwrap();
        assert!(r.max() < 1e-9);

        let tr = ThetaFunction::translate(s2.clone(), vec![Complex64::new(0.1, 0.2); 2]).unwrap();
        let samples = vec![vec![Complex64::new(0.3, -0.5), Complex64::new(0.7, 0.1)]];
        let r = verify_level(&tr, &[1, 1], &SignedPermutation::identity(2), &samples, &p).unwrap();
        assert!(r.weyl.is_none());
        assert!(r.quasi < 1e-9);
        assert!(ThetaFunction::translate(s2, vec![]).is_err());
    }

    #[test]
    fn sample_at_zero_is_reported() {
        let p = params();
        let s1 = ThetaFunction::sigma_d(1).unwrap();
        let samples = vec![vec![Complex64::new(0.0, 0.0)]];
        assert_eq!(
            verify_level(&s1, &[2], &SignedPermutation::identity(1), &samples, &p),
            Err(Error::SampleAtZero)
        );
    }

    #[test]
    fn descriptors_round_trip() {
        for text in [
            "sigma_d(3)",
            "pow(sigma_d(2),2)",
            "prod(sigma_d(1),pow(sigma_d(2),3))",
            "one",
        ] {
            let t = ThetaFunction::parse(text).unwrap();
            assert_eq!(t.to_string(), text);
        }
        assert_eq!(
            ThetaFunction::parse("sigma").unwrap(),
            ThetaFunction::sigma_d(1).unwrap()
        );
        assert!(ThetaFunction::parse("sigma_d(0)").is_err());
        assert!(ThetaFunction::parse("pow(sigma_d(2)").is_err());
        assert!(ThetaFunction::parse("theta(2)").is_err());
        assert!(ThetaFunction::parse("sigma_d(2) x").is_err());
    }
}
