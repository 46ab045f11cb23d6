//! The elliptic curve `C = ℂ/Λ` with `Λ = 2πiℤ + 2πiτℤ`.
//!
//! Torsion points are stored exactly as pairs of rationals `(s, t)` standing
//! for the class of `2πi·s + 2πiτ·t`. Lifts to `ℂ` carry the integers `(ℓ, k)`
//! with `n·ā = 2πiℓ + 2πiτk`, which is all the Weil pairing needs.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// `2πi`, the first period.
pub const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// Modular parameter `τ` together with `q = e^{2πiτ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveParams {
    tau: Complex64,
    q: Complex64,
}

impl CurveParams {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::Parameter(format!(
                "tau must lie in the upper half plane, got {tau}"
            )));
        }
        Ok(Self {
            tau,
            q: (TWO_PI_I * tau).exp(),
        })
    }

    /// `τ = i`, the default curve.
    pub fn square() -> Self {
        Self::new(Complex64::new(0.0, 1.0)).expect("i is in the upper half plane")
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    /// Second period `2πiτ`.
    pub fn tau_period(&self) -> Complex64 {
        TWO_PI_I * self.tau
    }

    /// `q^r = e^{2πirτ}` for real `r`.
    pub fn q_pow(&self, r: f64) -> Complex64 {
        (self.tau_period() * r).exp()
    }

    /// The lattice vector `2πi·a + 2πiτ·b`.
    pub fn lattice_point(&self, a: i64, b: i64) -> Complex64 {
        TWO_PI_I * a as f64 + self.tau_period() * b as f64
    }

    /// Real coordinates `(s, t)` of `z` in the basis `(2πi, 2πiτ)`.
    pub fn coordinates(&self, z: Complex64) -> (f64, f64) {
        let w = z / TWO_PI_I;
        let t = w.im / self.tau.im;
        let s = w.re - self.tau.re * t;
        (s, t)
    }
}

fn fractional(x: f64) -> f64 {
    let f = x.rem_euclid(1.0);
    if !(1e-12..1.0 - 1e-12).contains(&f) {
        0.0
    } else {
        f
    }
}

/// Canonical representative of `z` in the fundamental parallelogram.
///
/// Returns `(s, t) ∈ [0,1)²` with `z − 2πi·s − 2πiτ·t ∈ Λ`. Coordinates within
/// `1e-12` of an integer are snapped to zero.
pub fn reduce_mod_lattice(z: Complex64, params: &CurveParams) -> (f64, f64) {
    let (s, t) = params.coordinates(z);
    (fractional(s), fractional(t))
}

/// Distance from `z` to the nearest lattice point.
pub fn lattice_distance(z: Complex64, params: &CurveParams) -> f64 {
    let (s, t) = params.coordinates(z);
    let (s0, t0) = (s.floor() as i64, t.floor() as i64);
    let mut best = f64::INFINITY;
    for a in (s0 - 1)..=(s0 + 2) {
        for b in (t0 - 1)..=(t0 + 2) {
            best = best.min((z - params.lattice_point(a, b)).norm());
        }
    }
    best
}

/// A torsion point of `C`, the class of `2πi·s + 2πiτ·t` with `s, t ∈ [0,1) ∩ ℚ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurvePoint {
    s: Rational,
    t: Rational,
}

fn frac_rational(x: Rational) -> Rational {
    x - x.floor()
}

impl CurvePoint {
    pub fn new(s: Rational, t: Rational) -> Self {
        Self {
            s: frac_rational(s),
            t: frac_rational(t),
        }
    }

    pub fn zero() -> Self {
        Self::new(Rational::from_integer(0), Rational::from_integer(0))
    }

    /// The point `(s_num/n, t_num/n)`.
    pub fn from_fractions(s_num: i64, t_num: i64, n: i64) -> Result<Self> {
        if n <= 0 {
            return Err(Error::Parameter(format!(
                "denominator must be positive, got {n}"
            )));
        }
        Ok(Self::new(Rational::new(s_num, n), Rational::new(t_num, n)))
    }

    pub fn s(&self) -> Rational {
        self.s
    }

    pub fn t(&self) -> Rational {
        self.t
    }

    pub fn is_zero(&self) -> bool {
        *self.s.numer() == 0 && *self.t.numer() == 0
    }

    /// Least `n ≥ 1` with `n·a = 0`.
    pub fn order(&self) -> u64 {
        self.s.denom().lcm(self.t.denom()) as u64
    }

    /// Exact test for `m·a = 0` in `C`.
    pub fn is_killed_by(&self, m: i64) -> bool {
        m % self.order() as i64 == 0
    }

    pub fn scale(&self, m: i64) -> Self {
        Self::new(self.s * m, self.t * m)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.s + other.s, self.t + other.t)
    }

    /// Every point of order dividing `n`.
    pub fn torsion_subgroup(n: u64) -> Vec<Self> {
        let n = n as i64;
        let mut out = Vec::with_capacity((n * n) as usize);
        for i in 0..n {
            for j in 0..n {
                out.push(Self::new(Rational::new(i, n), Rational::new(j, n)));
            }
        }
        out
    }

    /// All torsion points of order at most `bound`, sorted by `(order, s, t)`.
    pub fn torsion_up_to(bound: u64) -> Vec<Self> {
        let mut pts: Vec<Self> = (1..=bound.max(1))
            .flat_map(Self::torsion_subgroup)
            .filter(|p| p.order() <= bound.max(1))
            .collect();
        pts.sort_by_key(|p| (p.order(), *p));
        pts.dedup();
        pts
    }

    /// The canonical complex representative `2πi·s + 2πiτ·t`.
    pub fn to_complex(&self, params: &CurveParams) -> Complex64 {
        TWO_PI_I * ratio_f64(self.s) + params.tau_period() * ratio_f64(self.t)
    }
}

fn ratio_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.s, self.t)
    }
}

impl FromStr for CurvePoint {
    type Err = Error;

    /// Parses `"s,t"` where each coordinate is an integer or `p/q`.
    fn from_str(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!("expected `s,t`, got `{text}`")));
        }
        Ok(Self::new(
            parse_rational(parts[0])?,
            parse_rational(parts[1])?,
        ))
    }
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad rational `{text}`"));
    match text.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(
            text.trim().parse().map_err(|_| bad())?,
        )),
    }
}

/// A chosen preimage `ā ∈ ℂ` of a torsion point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiftedPoint {
    base: CurvePoint,
    shift_s: i64,
    shift_t: i64,
    order: u64,
    ell: i64,
    k: i64,
    abar: Complex64,
    alpha: Complex64,
}

/// Lift `a` to `ā = 2πi(s + shift_s) + 2πiτ(t + shift_t)`.
pub fn lift(a: &CurvePoint, shift_s: i64, shift_t: i64, params: &CurveParams) -> LiftedPoint {
    let n = a.order() as i64;
    let s = a.s() + shift_s;
    let t = a.t() + shift_t;
    let ell = s * n;
    let k = t * n;
    debug_assert!(ell.is_integer() && k.is_integer());
    let abar = TWO_PI_I * ratio_f64(s) + params.tau_period() * ratio_f64(t);
    LiftedPoint {
        base: *a,
        shift_s,
        shift_t,
        order: n as u64,
        ell: ell.to_integer(),
        k: k.to_integer(),
        abar,
        alpha: abar.exp(),
    }
}

impl LiftedPoint {
    pub fn base(&self) -> &CurvePoint {
        &self.base
    }

    pub fn shifts(&self) -> (i64, i64) {
        (self.shift_s, self.shift_t)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `(ℓ, k)` with `n·ā = 2πiℓ + 2πiτk`.
    pub fn ell_k(&self) -> (i64, i64) {
        (self.ell, self.k)
    }

    pub fn abar(&self) -> Complex64 {
        self.abar
    }

    /// `α = e^{ā}`.
    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// `α^r = e^{rā}` for rational exponents.
    pub fn alpha_pow(&self, r: f64) -> Complex64 {
        (self.abar * r).exp()
    }

    /// The Weil pairing `w(a, q^{1/n}) = α^{-1} q^{k/n}`.
    pub fn weil(&self, params: &CurveParams) -> Complex64 {
        (-self.abar).exp() * params.q_pow(self.k as f64 / self.order as f64)
    }

    /// `e^{2πik/n}`, the root of unity picked up by `α^{(k/n)φ}` when the lift
    /// moves by a multiple of `2πi`.
    pub fn cycle_root(&self) -> Complex64 {
        (TWO_PI_I * (self.k as f64 / self.order as f64)).exp()
    }

    /// `(Δs, δ)` such that `other = self + 2πi·Δs + 2πiτ·δ`.
    pub fn shift_to(&self, other: &LiftedPoint) -> Result<(i64, i64)> {
        if self.base != other.base {
            return Err(Error::Parameter(format!(
                "lifts lie over different points {} and {}",
                self.base, other.base
            )));
        }
        Ok((other.shift_s - self.shift_s, other.shift_t - self.shift_t))
    }

    /// Factor by which a class of quadratic weight `phi` changes when the lift
    /// moves from `self` to `other`: `w^{δφ} · (e^{2πik/n})^{Δs·φ}`.
    ///
    /// For lifts differing only in the `τ` direction this is `w(a,q^{1/n})^{δφ}`.
    pub fn lift_change_factor(
        &self,
        other: &LiftedPoint,
        phi: i64,
        params: &CurveParams,
    ) -> Result<Complex64> {
        let (ds, delta) = self.shift_to(other)?;
        let w = self.weil(params);
        Ok(pow_root(w, delta * phi) * pow_root(self.cycle_root(), ds * phi))
    }
}

/// Integer power of a unit-modulus number, computed through its argument.
fn pow_root(w: Complex64, e: i64) -> Complex64 {
    Complex64::from_polar(w.norm().powi(e as i32), w.arg() * e as f64)
}

/// Weil pairing of `a` with `q^{1/n}`, evaluated with the given lift.
pub fn weil_pairing(a: &CurvePoint, lift: &LiftedPoint, params: &CurveParams) -> Result<Complex64> {
    if lift.base() != a {
        return Err(Error::Parameter(format!(
            "lift lies over {} rather than {}",
            lift.base(),
            a
        )));
    }
    Ok(lift.weil(params))
}
