//! Truncated multivariate power series over ℂ.
//!
//! A [`Jet`] in `r` nilpotent generators with degree cap `D` stores one complex
//! coefficient per monomial of total degree `≤ D`, densely, in graded order.
//! Monomial bookkeeping (ordering and the product table) is shared between
//! all jets of the same shape through a process-wide cache.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_DEGREE_CAP: usize = 4;
pub const DEFAULT_UNIT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JetShape {
    pub nvars: usize,
    pub cap: usize,
}

impl JetShape {
    pub fn new(nvars: usize, cap: usize) -> Self {
        Self { nvars, cap }
    }

    /// Largest variable set, smallest cap.
    pub fn join(self, other: Self) -> Self {
        Self::new(self.nvars.max(other.nvars), self.cap.min(other.cap))
    }
}

struct MonomialTable {
    shape: JetShape,
    exps: Vec<Vec<u8>>,
    degrees: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    /// `(i, j, k)` with `mono[i]·mono[j] = mono[k]` and total degree within the cap.
    products: Vec<(u32, u32, u32)>,
}

impl MonomialTable {
    fn build(shape: JetShape) -> Self {
        let mut exps = Vec::new();
        let mut current = vec![0u8; shape.nvars];
        enumerate(&mut current, 0, shape.cap, &mut exps);
        // graded, then reverse lexicographic so x1² precedes x1x2
        exps.sort_by(|a, b| {
            let da: usize = a.iter().map(|&e| e as usize).sum();
            let db: usize = b.iter().map(|&e| e as usize).sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let degrees: Vec<usize> = exps
            .iter()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .collect();
        let index: HashMap<Vec<u8>, usize> = exps
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        let mut products = Vec::new();
        for (i, ei) in exps.iter().enumerate() {
            for (j, ej) in exps.iter().enumerate() {
                if degrees[i] + degrees[j] > shape.cap {
                    continue;
                }
                let ek: Vec<u8> = ei.iter().zip(ej).map(|(a, b)| a + b).collect();
                products.push((i as u32, j as u32, index[&ek] as u32));
            }
        }
        Self {
            shape,
            exps,
            degrees,
            index,
            products,
        }
    }

    fn len(&self) -> usize {
        self.exps.len()
    }
}

fn enumerate(current: &mut Vec<u8>, var: usize, remaining: usize, out: &mut Vec<Vec<u8>>) {
    if var == current.len() {
        out.push(current.clone());
        return;
    }
    for e in 0..=remaining {
        current[var] = e as u8;
        enumerate(current, var + 1, remaining - e, out);
    }
    current[var] = 0;
}

fn table(shape: JetShape) -> Arc<MonomialTable> {
    static CACHE: OnceLock<Mutex<HashMap<JetShape, Arc<MonomialTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("monomial table cache poisoned");
    guard
        .entry(shape)
        .or_insert_with(|| Arc::new(MonomialTable::build(shape)))
        .clone()
}

/// Truncated power series in nilpotent generators `x_0 .. x_{r-1}`.
#[derive(Clone)]
pub struct Jet {
    table: Arc<MonomialTable>,
    coeffs: Vec<Complex64>,
}

impl Jet {
    pub fn zero(shape: JetShape) -> Self {
        let table = table(shape);
        let coeffs = vec![ZERO; table.len()];
        Self { table, coeffs }
    }

    pub fn constant(c: Complex64, shape: JetShape) -> Self {
        let mut j = Self::zero(shape);
        j.coeffs[0] = c;
        j
    }

    pub fn one(shape: JetShape) -> Self {
        Self::constant(ONE, shape)
    }

    /// The generator `x_i`; zero when the cap is 0.
    pub fn variable(i: usize, shape: JetShape) -> Self {
        assert!(i < shape.nvars, "variable index {i} out of range");
        let mut j = Self::zero(shape);
        if shape.cap >= 1 {
            let mut e = vec![0u8; shape.nvars];
            e[i] = 1;
            let idx = j.table.index[&e];
            j.coeffs[idx] = ONE;
        }
        j
    }

    /// Builds a jet from `(exponents, coefficient)` pairs; terms above the cap are dropped.
    pub fn from_terms(shape: JetShape, terms: &[(&[u8], Complex64)]) -> Self {
        let mut j = Self::zero(shape);
        for (e, c) in terms {
            assert_eq!(e.len(), shape.nvars, "exponent length mismatch");
            if let Some(&idx) = j.table.index.get(*e) {
                j.coeffs[idx] += *c;
            }
        }
        j
    }

    pub fn shape(&self) -> JetShape {
        self.table.shape
    }

    pub fn nvars(&self) -> usize {
        self.table.shape.nvars
    }

    pub fn degree_cap(&self) -> usize {
        self.table.shape.cap
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn coeff(&self, exps: &[u8]) -> Complex64 {
        let mut padded = exps.to_vec();
        if padded.len() > self.nvars() {
            if padded[self.nvars()..].iter().any(|&e| e != 0) {
                return ZERO;
            }
            padded.truncate(self.nvars());
        }
        padded.resize(self.nvars(), 0);
        self.table
            .index
            .get(&padded)
            .map_or(ZERO, |&i| self.coeffs[i])
    }

    /// `(exponents, coefficient)` for every stored monomial, in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u8], Complex64)> + '_ {
        self.table
            .exps
            .iter()
            .zip(&self.coeffs)
            .map(|(e, &c)| (e.as_slice(), c))
    }

    /// Coefficients of a one-variable jet, indexed by degree.
    pub fn univariate_coeffs(&self) -> &[Complex64] {
        assert!(
            self.nvars() <= 1,
            "univariate_coeffs on a {}-variable jet",
            self.nvars()
        );
        &self.coeffs
    }

    /// Re-expresses the jet with at least as many variables and the given cap.
    pub fn embed(&self, shape: JetShape) -> Self {
        assert!(
            shape.nvars >= self.nvars(),
            "cannot drop variables by embedding"
        );
        if shape == self.shape() {
            return self.clone();
        }
        let mut out = Self::zero(shape);
        for (e, c) in self.terms() {
            if c == ZERO {
                continue;
            }
            let mut padded = e.to_vec();
            padded.resize(shape.nvars, 0);
            if let Some(&idx) = out.table.index.get(&padded) {
                out.coeffs[idx] = c;
            }
        }
        out
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let shape = self.shape().join(other.shape());
        (self.embed(shape), other.embed(shape))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add_scalar(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    /// The nilpotent part `a − a₀`.
    pub fn nilpotent_part(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = ZERO;
        out
    }

    fn mul_same_shape(&self, other: &Self) -> Self {
        let mut out = vec![ZERO; self.coeffs.len()];
        for &(i, j, k) in &self.table.products {
            out[k as usize] += self.coeffs[i as usize] * other.coeffs[j as usize];
        }
        Self {
            table: self.table.clone(),
            coeffs: out,
        }
    }

    /// Multiplicative inverse at truncation order.
    ///
    /// Fails with [`Error::NotAUnit`] when `|a₀| ≤ unit_tol`.
    pub fn invert(&self, unit_tol: f64) -> Result<Self> {
        let a0 = self.constant_term();
        if !(a0.norm() > unit_tol) {
            return Err(Error::NotAUnit(a0.norm()));
        }
        // 1/(a0(1+h)) = a0^{-1} Σ (-h)^k
        let h = self.nilpotent_part().scale(-a0.inv());
        let mut taylor = vec![ONE; self.degree_cap() + 1];
        taylor[0] = ONE;
        let series = h.horner(&taylor);
        Ok(series.scale(a0.inv()))
    }

    /// `Σ_k taylor[k]·h^k` for nilpotent `h`, truncated at the cap.
    fn horner(&self, taylor: &[Complex64]) -> Self {
        let cap = self.degree_cap();
        let mut acc = Self::constant(taylor[cap.min(taylor.len() - 1)], self.shape());
        for k in (0..cap.min(taylor.len() - 1)).rev() {
            acc = acc.mul_same_shape(self).add_scalar(taylor[k]);
        }
        acc
    }

    /// `f(a)` from the Taylor coefficients of `f` at `a₀`: `Σ_k f_k·(a − a₀)^k`.
    pub fn compose_analytic(&self, taylor: &[Complex64]) -> Result<Self> {
        if taylor.len() < self.degree_cap() + 1 {
            return Err(Error::Parameter(format!(
                "need {} Taylor coefficients, got {}",
                self.degree_cap() + 1,
                taylor.len()
            )));
        }
        Ok(self.nilpotent_part().horner(taylor))
    }

    pub fn exp(&self) -> Self {
        let e0 = self.constant_term().exp();
        let mut taylor = Vec::with_capacity(self.degree_cap() + 1);
        let mut fact = 1.0;
        for k in 0..=self.degree_cap() {
            if k > 0 {
                fact *= k as f64;
            }
            taylor.push(e0 / fact);
        }
        self.nilpotent_part().horner(&taylor)
    }

    /// Integer power; negative exponents require a unit.
    pub fn powi(&self, k: i64) -> Result<Self> {
        let base = if k < 0 {
            self.invert(DEFAULT_UNIT_TOL)?
        } else {
            self.clone()
        };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one(self.shape());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_same_shape(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_same_shape(&sq);
            }
        }
        Ok(acc)
    }

    /// Substitutes nilpotent jets for the generators (a ring map on jets).
    pub fn substitute(&self, images: &[Jet]) -> Result<Self> {
        if images.len() != self.nvars() {
            return Err(Error::Parameter(format!(
                "substitution needs {} images, got {}",
                self.nvars(),
                images.len()
            )));
        }
        if images.iter().any(|j| j.constant_term() != ZERO) {
            return Err(Error::Parameter(
                "substituted images must be nilpotent".into(),
            ));
        }
        let shape = images
            .iter()
            .fold(JetShape::new(0, self.degree_cap()), |s, j| {
                s.join(j.shape())
            });
        let images: Vec<Jet> = images.iter().map(|j| j.embed(shape)).collect();
        let powers: Vec<Vec<Jet>> = images
            .iter()
            .map(|x| {
                let mut p = vec![Jet::one(shape)];
                for _ in 0..shape.cap {
                    let next = p.last().unwrap().mul_same_shape(x);
                    p.push(next);
                }
                p
            })
            .collect();
        let mut out = Jet::zero(shape);
        for (e, c) in self.terms() {
            if c == ZERO {
                continue;
            }
            let mut term = Jet::constant(c, shape);
            for (v, &p) in e.iter().enumerate() {
                if p > 0 {
                    term = term.mul_same_shape(&powers[v][p as usize]);
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `‖self − other‖∞ / ‖other‖∞` over coefficients (absolute when `other = 0`).
    pub fn rel_diff(&self, other: &Self) -> f64 {
        let (a, b) = self.aligned(other);
        let diff = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        let scale = b.max_abs();
        if !diff.is_finite() || !scale.is_finite() {
            return f64::NAN;
        }
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }

    /// Coefficient vector in graded order (for serialization and exact comparison).
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Total degree of each stored monomial, matching [`Jet::coefficients`].
    pub fn degrees(&self) -> &[usize] {
        &self.table.degrees
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.coeffs == b.coeffs
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet[r={}, D={}](", self.nvars(), self.degree_cap())?;
        let mut first = true;
        for (e, c) in self.terms() {
            if c == ZERO {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (v, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "x{}", v + 1)?,
                    _ => write!(f, "x{}^{}", v + 1, p)?,
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let (mut a, b) = self.aligned(rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let (mut a, b) = self.aligned(rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x -= y;
        }
        a
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let (a, b) = self.aligned(rhs);
        a.mul_same_shape(&b)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-ONE)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// A jet times `e^{log_scale}`, used where intermediate magnitudes leave the
/// range of `f64` (products of sigma values at large arguments).
#[derive(Clone, Debug)]
pub struct ScaledJet {
    pub jet: Jet,
    pub log_scale: f64,
}

impl ScaledJet {
    pub fn new(jet: Jet) -> Self {
        Self {
            jet,
            log_scale: 0.0,
        }
        .normalized()
    }

    pub fn one(shape: JetShape) -> Self {
        Self {
            jet: Jet::one(shape),
            log_scale: 0.0,
        }
    }

    /// `exp(e)` with the real part of the constant term moved into the scale.
    pub fn exp_of(e: &Jet) -> Self {
        let re = e.constant_term().re;
        Self {
            jet: e.add_scalar(Complex64::new(-re, 0.0)).exp(),
            log_scale: re,
        }
    }

    fn normalized(mut self) -> Self {
        let m = self.jet.max_abs();
        if m > 0.0 && m.is_finite() && !(1e-100..=1e100).contains(&m) {
            let l = m.ln();
            self.jet = self.jet.scale(Complex64::new((-l).exp(), 0.0));
            self.log_scale += l;
        }
        self
    }

    pub fn mul(&self, other: &ScaledJet) -> ScaledJet {
        ScaledJet {
            jet: &self.jet * &other.jet,
            log_scale: self.log_scale + other.log_scale,
        }
        .normalized()
    }

    pub fn scale(&self, c: Complex64) -> ScaledJet {
        ScaledJet {
            jet: self.jet.scale(c),
            log_scale: self.log_scale,
        }
        .normalized()
    }

    pub fn invert(&self, unit_tol: f64) -> Result<ScaledJet> {
        let m = self.jet.max_abs();
        if m == 0.0 || !m.is_finite() {
            return Err(Error::NotAUnit(0.0));
        }
        // relative test: the constant term against the jet's own size
        let j = self
            .jet
            .scale(Complex64::new(1.0 / m, 0.0))
            .invert(unit_tol)?;
        Ok(ScaledJet {
            jet: j.scale(Complex64::new(1.0 / m, 0.0)),
            log_scale: -self.log_scale,
        }
        .normalized())
    }

    pub fn powi(&self, k: i64) -> Result<ScaledJet> {
        Ok(ScaledJet {
            jet: self.jet.powi(k)?,
            log_scale: self.log_scale * k as f64,
        }
        .normalized())
    }

    /// `self / other` computed as a quotient of ratios, no overflow.
    pub fn div(&self, other: &ScaledJet, unit_tol: f64) -> Result<ScaledJet> {
        Ok(self.mul(&other.invert(unit_tol)?))
    }

    /// Materializes the jet; fails when `e^{log_scale}` leaves `f64` range.
    pub fn into_jet(self) -> Result<Jet> {
        if self.jet.max_abs() == 0.0 {
            return Ok(self.jet);
        }
        if self.log_scale > 700.0 || self.log_scale < -700.0 {
            return Err(Error::Overflow(self.log_scale));
        }
        Ok(self.jet.scale(Complex64::new(self.log_scale.exp(), 0.0)))
    }

    /// Relative difference, computed at `other`'s scale.
    pub fn rel_diff(&self, other: &ScaledJet) -> f64 {
        let shift = self.log_scale - other.log_scale;
        if self.jet.max_abs() == 0.0 {
            return if other.jet.max_abs() == 0.0 { 0.0 } else { 1.0 };
        }
        if shift > 700.0 {
            return f64::INFINITY;
        }
        let a = self.jet.scale(Complex64::new(shift.exp(), 0.0));
        a.rel_diff(&other.jet)
    }

    /// `|constant term|` on the log scale.
    pub fn log_abs_constant(&self) -> f64 {
        self.jet.constant_term().norm().ln() + self.log_scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn x(i: usize, shape: JetShape) -> Jet {
        Jet::variable(i, shape)
    }

    #[test]
    fn difference_of_squares() {
        let s = JetShape::new(1, 2);
        let one = Jet::one(s);
        let p = (&one + &x(0, s)) * (&one - &x(0, s));
        let expect = Jet::from_terms(s, &[(&[0], c(1.0)), (&[2], c(-1.0))]);
        assert_eq!(p, expect);
    }

    #[test]
    fn truncation_kills_high_degree() {
        let s = JetShape::new(2, 1);
        assert_eq!(x(0, s) * x(1, s), Jet::zero(s));
    }

    #[test]
    fn square_of_linear_form() {
        // symbolic expansion: (1 + x1 + x2)² = 1 + 2x1 + 2x2 + x1² + 2x1x2 + x2²
        let s = JetShape::new(2, 2);
        let a = Jet::one(s) + x(0, s) + x(1, s);
        let sq = &a * &a;
        let expect = Jet::from_terms(
            s,
            &[
                (&[0, 0], c(1.0)),
                (&[1, 0], c(2.0)),
                (&[0, 1], c(2.0)),
                (&[2, 0], c(1.0)),
                (&[1, 1], c(2.0)),
                (&[0, 2], c(1.0)),
            ],
        );
        assert_eq!(sq, expect);
    }

    #[test]
    fn geometric_series_inverse() {
        let s = JetShape::new(1, 3);
        let inv = (Jet::one(s) + x(0, s)).invert(DEFAULT_UNIT_TOL).unwrap();
        let expect = Jet::from_terms(
            s,
            &[
                (&[0], c(1.0)),
                (&[1], c(-1.0)),
                (&[2], c(1.0)),
                (&[3], c(-1.0)),
            ],
        );
        assert_eq!(inv, expect);
        assert_eq!(Jet::one(s).invert(DEFAULT_UNIT_TOL).unwrap(), Jet::one(s));
    }

    #[test]
    fn inverse_two_variables() {
        // (2 + x1 + x2)^{-1} = ½ Σ (-(x1+x2)/2)^k; coefficients by the binomial oracle
        let s = JetShape::new(2, 2);
        let a = Jet::constant(c(2.0), s) + x(0, s) + x(1, s);
        let inv = a.invert(DEFAULT_UNIT_TOL).unwrap();
        let expect = Jet::from_terms(
            s,
            &[
                (&[0, 0], c(0.5)),
                (&[1, 0], c(-0.25)),
                (&[0, 1], c(-0.25)),
                (&[2, 0], c(0.125)),
                (&[1, 1], c(0.25)),
                (&[0, 2], c(0.125)),
            ],
        );
        assert!(inv.rel_diff(&expect) < 1e-15);
        assert!((&a * &inv).rel_diff(&Jet::one(s)) < 1e-15);
    }

    #[test]
    fn non_unit_rejected() {
        let s = JetShape::new(1, 2);
        assert!(matches!(
            x(0, s).invert(DEFAULT_UNIT_TOL),
            Err(Error::NotAUnit(_))
        ));
    }

    #[test]
    fn exp_and_identity_composition() {
        let s = JetShape::new(1, 3);
        let e = x(0, s).exp();
        let expect = Jet::from_terms(
            s,
            &[
                (&[0], c(1.0)),
                (&[1], c(1.0)),
                (&[2], c(0.5)),
                (&[3], c(1.0 / 6.0)),
            ],
        );
        assert!(e.rel_diff(&expect) < 1e-15);

        let a = Jet::constant(Complex64::new(0.3, -0.2), s) + x(0, s).scale(c(2.0));
        let ident = [c(0.0), c(1.0), c(0.0), c(0.0)];
        let composed = a.compose_analytic(&ident).unwrap();
        assert_eq!(composed, a.nilpotent_part());
        assert!(a.compose_analytic(&ident[..2]).is_err());
    }

    #[test]
    fn mixed_shapes_follow_max_vars_min_cap() {
        let a = x(0, JetShape::new(1, 4));
        let b = x(1, JetShape::new(2, 2));
        let p = &a + &b;
        assert_eq!(p.shape(), JetShape::new(2, 2));
        assert_eq!(p.coeff(&[1, 0]), c(1.0));
        assert_eq!(p.coeff(&[0, 1]), c(1.0));
    }

    #[test]
    fn powers_and_negative_powers() {
        let s = JetShape::new(2, 4);
        let a = Jet::constant(c(1.5), s) + x(0, s) - x(1, s).scale(c(0.5));
        let cube = a.powi(3).unwrap();
        assert!(cube.rel_diff(&(&(&a * &a) * &a)) < 1e-15);
        let back = &a.powi(-2).unwrap() * &(&a * &a);
        assert!(back.rel_diff(&Jet::one(s)) < 1e-14);
    }

    #[test]
    fn substitution_is_a_ring_map() {
        let s = JetShape::new(2, 3);
        let a = Jet::constant(c(0.7), s) + x(0, s) + (x(0, s) * x(1, s)).scale(c(3.0));
        let b = Jet::constant(c(-1.1), s) + x(1, s).scale(c(2.0));
        let t = JetShape::new(1, 3);
        let images = [x(0, t), x(0, t).scale(c(-2.0))];
        let lhs = (&a * &b).substitute(&images).unwrap();
        let rhs = &a.substitute(&images).unwrap() * &b.substitute(&images).unwrap();
        assert!(lhs.rel_diff(&rhs) < 1e-14);
    }

    #[test]
    fn scaled_jets_survive_large_magnitudes() {
        let s = JetShape::new(1, 2);
        let big = ScaledJet::exp_of(&(Jet::constant(c(900.0), s) + x(0, s)));
        let small = ScaledJet::exp_of(&(Jet::constant(c(-899.0), s) - x(0, s)));
        let prod = big.mul(&small).into_jet().unwrap();
        assert!(prod.rel_diff(&Jet::constant(c(1.0f64.exp()), s)) < 1e-12);
        assert!(big.clone().into_jet().is_err());
    }
}
