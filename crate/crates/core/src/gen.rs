//! Random toy data for the verification suites.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::classes::ToyBundle;
use crate::curve::{lattice_distance, CurveParams, CurvePoint};
use crate::error::Result;
use crate::jet::{Jet, JetShape};
use crate::lattice::LatticeWithForm;
use crate::theta::ThetaFunction;
use crate::thom::{LevelData, VirtualPair};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `d` roots, each a random real linear form in the generators of `shape`.
pub fn random_roots<R: Rng + ?Sized>(rng: &mut R, d: usize, shape: JetShape) -> Vec<Jet> {
    (0..d)
        .map(|_| {
            (0..shape.nvars).fold(Jet::zero(shape), |acc, k| {
                &acc + &Jet::variable(k, shape).scale(c(rng.gen_range(-1.0..=1.0)))
            })
        })
        .collect()
}

/// Roots with small integer coefficients, for exact comparisons.
pub fn integer_roots<R: Rng + ?Sized>(rng: &mut R, d: usize, shape: JetShape) -> Vec<Jet> {
    (0..d)
        .map(|_| {
            (0..shape.nvars).fold(Jet::zero(shape), |acc, k| {
                &acc + &Jet::variable(k, shape).scale(c(rng.gen_range(-3..=3) as f64))
            })
        })
        .collect()
}

pub fn random_signs<R: Rng + ?Sized>(rng: &mut R, up_to: u64) -> BTreeMap<u64, i8> {
    (0..=up_to.max(1))
        .map(|n| (n, if rng.gen::<bool>() { 1 } else { -1 }))
        .collect()
}

/// A random split bundle on `Spin(2d)` with rotation numbers in `[-bound, bound]`.
pub fn random_spin_bundle<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    bound: i64,
    shape: JetShape,
) -> Result<ToyBundle> {
    let lattice = LatticeWithForm::spin(d)?;
    let m = lattice.random_member(rng, bound);
    let roots = random_roots(rng, d, shape);
    let signs = random_signs(rng, bound as u64);
    ToyBundle::new(lattice, m, roots, shape, signs)
}

/// A real orthogonal matrix fixing `m`: a product of two reflections in
/// random hyperplanes containing `m`.
pub fn orthogonal_fixing<R: Rng + ?Sized>(rng: &mut R, m: &[i64]) -> Vec<Vec<f64>> {
    let d = m.len();
    let mut o: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mf: Vec<f64> = m.iter().map(|&x| x as f64).collect();
    let mm: f64 = mf.iter().map(|x| x * x).sum();
    for _ in 0..2 {
        let mut h: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if mm > 0.0 {
            let t = h.iter().zip(&mf).map(|(a, b)| a * b).sum::<f64>() / mm;
            for (hi, mi) in h.iter_mut().zip(&mf) {
                *hi -= t * mi;
            }
        }
        let hh: f64 = h.iter().map(|x| x * x).sum();
        if hh < 1e-6 {
            continue;
        }
        // o ← (I − 2hhᵀ/hh)·o
        let mut next = o.clone();
        for i in 0..d {
            for j in 0..d {
                let proj: f64 = (0..d).map(|k| h[k] * o[k][j]).sum();
                next[i][j] = o[i][j] - 2.0 * h[i] * proj / hh;
            }
        }
        o = next;
    }
    o
}

/// `V` mixed by an orthogonal matrix fixing `m`, then moved by a random Weyl
/// element, with fresh orientation signs. The result has the same Borel `c₂`.
pub fn c2_preserving_move<R: Rng + ?Sized>(rng: &mut R, v: &ToyBundle) -> Result<ToyBundle> {
    let o = orthogonal_fixing(rng, v.rotation_numbers());
    let w = v.lattice().random_weyl(rng);
    let moved = v.mix_roots(&o)?.weyl_move(&w)?;
    moved.with_signs(random_signs(rng, v.max_rotation() as u64))
}

/// A `c₂`-matched pair `(V₀, V₁)`, optionally padded by a common summand.
pub fn random_pair<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    bound: i64,
    shape: JetShape,
    padding: Option<usize>,
) -> Result<VirtualPair> {
    let v0 = random_spin_bundle(rng, d, bound, shape)?;
    let v1 = c2_preserving_move(rng, &v0)?;
    let pair = VirtualPair::new(v0, v1)?;
    match padding {
        Some(k) if k > 0 => {
            let w = random_spin_bundle(rng, k, bound, shape)?;
            pair.pad(&w)
        }
        _ => Ok(pair),
    }
}

/// Level data with `θ′ = σ_{d′}` (`power = 1`) or `θ′ = σ_{d′}²` (`power = 2`).
pub fn random_level_data<R: Rng + ?Sized>(
    rng: &mut R,
    dprime: usize,
    power: u32,
    bound: i64,
    shape: JetShape,
) -> Result<LevelData> {
    let vprime = random_spin_bundle(rng, dprime, bound, shape)?;
    let base = ThetaFunction::sigma_d(dprime)?;
    let theta = ThetaFunction::power(base, power);
    let k = power as usize;
    let mut m = Vec::with_capacity(k * dprime);
    let mut roots = Vec::with_capacity(k * dprime);
    for _ in 0..k {
        m.extend_from_slice(vprime.rotation_numbers());
        roots.extend_from_slice(vprime.roots());
    }
    let stacked = ToyBundle::new(
        LatticeWithForm::spin(k * dprime)?,
        m,
        roots,
        shape,
        BTreeMap::new(),
    )?;
    let v = c2_preserving_move(rng, &stacked)?;
    LevelData::new(v, vprime, theta)
}

/// A uniformly chosen nonzero point of exact order `n`.
pub fn random_point_of_order<R: Rng + ?Sized>(rng: &mut R, n: u64) -> CurvePoint {
    let pts: Vec<CurvePoint> = CurvePoint::torsion_subgroup(n)
        .into_iter()
        .filter(|p| p.order() == n)
        .collect();
    *pts.choose(rng).unwrap_or(&CurvePoint::zero())
}

/// The smallest prime exceeding `k`.
pub fn prime_above(k: i64) -> u64 {
    let mut p = (k.max(1) + 1) as u64;
    loop {
        if (2..p)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
        {
            return p;
        }
        p += 1;
    }
}

/// A point no nonzero rotation number up to `max_m` can kill.
pub fn random_ordinary<R: Rng + ?Sized>(rng: &mut R, max_m: i64) -> CurvePoint {
    random_point_of_order(rng, prime_above(max_m))
}

/// `count` points with `rmin ≤ |z| ≤ rmax`.
pub fn annulus<R: Rng + ?Sized>(rng: &mut R, count: usize, rmin: f64, rmax: f64) -> Vec<Complex64> {
    (0..count)
        .map(|_| {
            let r = rng.gen_range(rmin..=rmax);
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(r, t)
        })
        .collect()
}

/// A point `z` in the default sampling box with `m z` at least `margin` away
/// from the lattice for every given nonzero `m`.
pub fn generic_point<R: Rng + ?Sized>(
    rng: &mut R,
    params: &CurveParams,
    ms: &[i64],
    margin: f64,
) -> Complex64 {
    loop {
        let z = crate::theta::sample_point(rng, params, margin);
        if ms
            .iter()
            .filter(|&&m| m != 0)
            .all(|&m| lattice_distance(z * m as f64, params) >= margin)
        {
            return z;
        }
    }
}

/// Random nilpotent images of `r` generators in `r2` new generators.
pub fn random_images<R: Rng + ?Sized>(rng: &mut R, r: usize, shape2: JetShape) -> Vec<Jet> {
    (0..r)
        .map(|_| {
            let lin = (0..shape2.nvars).fold(Jet::zero(shape2), |acc, k| {
                &acc + &Jet::variable(k, shape2).scale(c(rng.gen_range(-1.0..=1.0)))
            });
            // a quadratic correction keeps the map from being linear
            let q = Jet::variable(0, shape2);
            &lin + &(&q * &q).scale(c(rng.gen_range(-0.5..=0.5)))
        })
        .collect()
}
