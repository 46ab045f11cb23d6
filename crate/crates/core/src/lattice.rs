//! Cocharacter lattices with the integral quadratic form of a degree-four
//! class, and their Weyl groups acting by signed permutations.
//!
//! A lattice is a block-diagonal direct sum of [`LatticeBlock`]s. Each block
//! carries its own Gram matrix, membership rule and Weyl group; direct sums and
//! integer rescalings (used by products and powers of theta functions) keep the
//! block structure so that the Weyl group of a sum is the product of the
//! blocks' groups.

use std::fmt;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetShape};

/// Groups with at most this many elements are enumerated exhaustively.
const ENUMERATION_LIMIT: usize = 5000;
const REJECTION_ATTEMPTS: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Membership {
    /// `Σ m_i` even (the cocharacters of `Spin(2d)`).
    EvenSum,
    All,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum WeylKind {
    /// Type `D_d`: signed permutations with an even number of sign changes.
    SignedEven,
    /// All signed permutations (type `B_d`).
    SignedFull,
    /// Coordinate permutations that preserve the Gram matrix.
    Permutations,
    /// An explicit list of group elements.
    Custom(Vec<SignedPermutation>),
}

/// `w·v` with `(w·v)_i = signs_i · v_{perm_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let d = perm.len();
        if signs.len() != d {
            return Err(Error::Parameter(
                "permutation and sign lengths differ".into(),
            ));
        }
        let mut seen = vec![false; d];
        for &p in &perm {
            if p >= d || seen[p] {
                return Err(Error::Parameter(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Parameter("signs must be ±1".into()));
        }
        Ok(Self { perm, signs })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            perm: (0..d).collect(),
            signs: vec![1; d],
        }
    }

    pub fn swap(d: usize, i: usize, j: usize) -> Self {
        let mut w = Self::identity(d);
        w.perm.swap(i, j);
        w
    }

    pub fn sign_change(d: usize, indices: &[usize]) -> Self {
        let mut w = Self::identity(d);
        for &i in indices {
            w.signs[i] = -w.signs[i];
        }
        w
    }

    pub fn rank(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn num_sign_changes(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rank())
    }

    /// `self ∘ other`, acting as `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let perm = self.perm.iter().map(|&p| other.perm[p]).collect();
        let signs = self
            .perm
            .iter()
            .zip(&self.signs)
            .map(|(&p, &s)| s * other.signs[p])
            .collect();
        Self { perm, signs }
    }

    pub fn inverse(&self) -> Self {
        let d = self.rank();
        let mut perm = vec![0; d];
        let mut signs = vec![1; d];
        for i in 0..d {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        Self { perm, signs }
    }

    pub fn apply_with<T: Clone>(&self, v: &[T], neg: impl Fn(&T) -> T) -> Vec<T> {
        assert_eq!(v.len(), self.rank(), "rank mismatch in Weyl action");
        self.perm
            .iter()
            .zip(&self.signs)
            .map(|(&p, &s)| if s < 0 { neg(&v[p]) } else { v[p].clone() })
            .collect()
    }

    pub fn apply_i64(&self, v: &[i64]) -> Vec<i64> {
        self.apply_with(v, |x| -x)
    }

    pub fn apply_complex(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.apply_with(v, |x| -x)
    }

    pub fn apply_jets(&self, v: &[Jet]) -> Vec<Jet> {
        self.apply_with(v, |x| -x)
    }

    /// Applies a real matrix-free action to real vectors.
    pub fn apply_real(&self, v: &[f64]) -> Vec<f64> {
        self.apply_with(v, |x| -x)
    }

    fn offset(&self, by: usize) -> (Vec<usize>, Vec<i8>) {
        (
            self.perm.iter().map(|p| p + by).collect(),
            self.signs.clone(),
        )
    }

    /// Block-diagonal concatenation.
    pub fn concat(parts: &[SignedPermutation]) -> Self {
        let mut perm = Vec::new();
        let mut signs = Vec::new();
        let mut off = 0;
        for p in parts {
            let (pp, ss) = p.offset(off);
            perm.extend(pp);
            signs.extend(ss);
            off += p.rank();
        }
        Self { perm, signs }
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (&p, &s)) in self.perm.iter().zip(&self.signs).enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", if s < 0 { "-" } else { "+" }, p + 1)?;
        }
        write!(f, "]")
    }
}

/// `(w·m)_i = m_i` for all `i`, or modulo `n` coordinatewise when given.
pub fn fixes(w: &SignedPermutation, m: &[i64], modulus: Option<u64>) -> bool {
    let wm = w.apply_i64(m);
    match modulus {
        None => wm == m,
        Some(n) => wm
            .iter()
            .zip(m)
            .all(|(a, b)| (a - b).rem_euclid(n as i64) == 0),
    }
}

pub fn weyl_apply(w: &SignedPermutation, m: &Cocharacter) -> Cocharacter {
    Cocharacter {
        m: w.apply_i64(&m.m),
        modulus: m.modulus,
    }
}

/// A cocharacter `m ∈ Ť`, or a lift `m̄` of `m: ℤ/n → T` when a modulus is set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Cocharacter {
    pub m: Vec<i64>,
    pub modulus: Option<u64>,
}

impl Cocharacter {
    pub fn new(lattice: &LatticeWithForm, m: Vec<i64>) -> Result<Self> {
        lattice.check_member(&m)?;
        Ok(Self { m, modulus: None })
    }

    pub fn with_modulus(lattice: &LatticeWithForm, m: Vec<i64>, n: u64) -> Result<Self> {
        lattice.check_member(&m)?;
        if n == 0 {
            return Err(Error::Parameter("modulus must be positive".into()));
        }
        Ok(Self {
            m,
            modulus: Some(n),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeBlock {
    name: String,
    gram: Vec<Vec<i64>>,
    membership: Membership,
    weyl: WeylKind,
}

impl LatticeBlock {
    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    fn is_member(&self, m: &[i64]) -> bool {
        match self.membership {
            Membership::All => true,
            Membership::EvenSum => m.iter().sum::<i64>().rem_euclid(2) == 0,
        }
    }

    fn group_order(&self) -> Option<usize> {
        let d = self.rank();
        let fact: usize = (1..=d).product();
        match &self.weyl {
            WeylKind::SignedEven => Some(fact << d.saturating_sub(1)),
            WeylKind::SignedFull => Some(fact << d),
            WeylKind::Permutations => {
                if d <= 7 {
                    Some(self.elements().len())
                } else {
                    None
                }
            }
            WeylKind::Custom(list) => Some(list.len()),
        }
    }

    fn preserves_gram(&self, w: &SignedPermutation) -> bool {
        let d = self.rank();
        (0..d).all(|i| {
            (0..d).all(|j| {
                let s = w.signs[i] as i64 * w.signs[j] as i64;
                s * self.gram[w.perm[i]][w.perm[j]] == self.gram[i][j]
            })
        })
    }

    fn elements(&self) -> Vec<SignedPermutation> {
        let d = self.rank();
        if let WeylKind::Custom(list) = &self.weyl {
            return list.clone();
        }
        let mut out = Vec::new();
        for perm in permutations(d) {
            match self.weyl {
                WeylKind::Permutations => {
                    let w = SignedPermutation {
                        perm,
                        signs: vec![1; d],
                    };
                    if self.preserves_gram(&w) {
                        out.push(w);
                    }
                }
                _ => {
                    for mask in 0u32..(1 << d) {
                        if self.weyl == WeylKind::SignedEven && mask.count_ones() % 2 == 1 {
                            continue;
                        }
                        let signs = (0..d)
                            .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                            .collect();
                        out.push(SignedPermutation {
                            perm: perm.clone(),
                            signs,
                        });
                    }
                }
            }
        }
        out
    }

    fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> SignedPermutation {
        let d = self.rank();
        match &self.weyl {
            WeylKind::Custom(list) => list
                .choose(rng)
                .cloned()
                .unwrap_or_else(|| SignedPermutation::identity(d)),
            WeylKind::Permutations => {
                let all = self.elements();
                all.choose(rng)
                    .cloned()
                    .unwrap_or_else(|| SignedPermutation::identity(d))
            }
            kind => {
                let mut perm: Vec<usize> = (0..d).collect();
                perm.shuffle(rng);
                let mut signs: Vec<i8> = (0..d)
                    .map(|_| if rng.gen::<bool>() { -1 } else { 1 })
                    .collect();
                if *kind == WeylKind::SignedEven
                    && d > 0
                    && signs.iter().filter(|&&s| s < 0).count() % 2 == 1
                {
                    let i = rng.gen_range(0..d);
                    signs[i] = -signs[i];
                }
                SignedPermutation { perm, signs }
            }
        }
    }

    fn random_member<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> Vec<i64> {
        let d = self.rank();
        let mut m: Vec<i64> = (0..d).map(|_| rng.gen_range(-bound..=bound)).collect();
        if self.membership == Membership::EvenSum
            && d > 0
            && m.iter().sum::<i64>().rem_euclid(2) == 1
        {
            let last = m[d - 1];
            m[d - 1] = if last == bound {
                last - 1
            } else if last == -bound || rng.gen::<bool>() {
                last + 1
            } else {
                last - 1
            };
        }
        m
    }
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; d], &mut out);
    out
}

/// A cocharacter lattice `Ť ⊂ ℤ^d` with quadratic form `φ(m) = ½ mᵀGm`,
/// pairing `I(a, b) = aᵀGb` and adjoint `Î(m) = Gm`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeWithForm {
    blocks: Vec<LatticeBlock>,
}

impl LatticeWithForm {
    /// The cocharacters of `Spin(2d)` with the form of `c₂`: identity Gram,
    /// even coordinate sum, Weyl group of type `D_d`.
    pub fn spin(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Parameter("spin rank must be positive".into()));
        }
        let gram = (0..d)
            .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
            .collect();
        Ok(Self {
            blocks: vec![LatticeBlock {
                name: format!("spin({})", 2 * d),
                gram,
                membership: Membership::EvenSum,
                weyl: WeylKind::SignedEven,
            }],
        })
    }

    /// `ℤ^d` with a user-supplied even symmetric Gram matrix; the Weyl group is
    /// the group of coordinate permutations preserving the Gram matrix.
    pub fn torus(gram: Vec<Vec<i64>>) -> Result<Self> {
        let d = gram.len();
        if gram.iter().any(|row| row.len() != d) {
            return Err(Error::Parameter("gram matrix must be square".into()));
        }
        for i in 0..d {
            if gram[i][i].rem_euclid(2) != 0 {
                return Err(Error::Parameter(
                    "gram matrix must have even diagonal so that φ is integral".into(),
                ));
            }
            for j in 0..d {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::Parameter("gram matrix must be symmetric".into()));
                }
            }
        }
        Ok(Self {
            blocks: vec![LatticeBlock {
                name: format!("torus({d})"),
                gram,
                membership: Membership::All,
                weyl: WeylKind::Permutations,
            }],
        })
    }

    /// A single block with an explicit group.
    pub fn custom(
        name: &str,
        gram: Vec<Vec<i64>>,
        membership: Membership,
        elements: Vec<SignedPermutation>,
    ) -> Result<Self> {
        let mut l = Self::torus(gram)?;
        let b = &mut l.blocks[0];
        b.name = name.to_string();
        b.membership = membership;
        for w in &elements {
            if w.rank() != b.rank() || !b.preserves_gram(w) {
                return Err(Error::Parameter(format!("{w} does not preserve the form")));
            }
        }
        b.weyl = WeylKind::Custom(elements);
        Ok(l)
    }

    /// The rank-0 lattice.
    pub fn trivial() -> Self {
        Self { blocks: Vec::new() }
    }

    pub fn direct_sum(parts: &[LatticeWithForm]) -> Self {
        Self {
            blocks: parts
                .iter()
                .flat_map(|p| p.blocks.iter().cloned())
                .collect(),
        }
    }

    /// The same lattice with form multiplied by `k` (level `k·ξ`).
    pub fn scaled(&self, k: i64) -> Self {
        let mut out = self.clone();
        for b in &mut out.blocks {
            for row in &mut b.gram {
                for g in row.iter_mut() {
                    *g *= k;
                }
            }
            if k != 1 {
                b.name = format!("{}*{}", k, b.name);
            }
        }
        out
    }

    pub fn blocks(&self) -> &[LatticeBlock] {
        &self.blocks
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(LatticeBlock::rank).sum()
    }

    pub fn name(&self) -> String {
        if self.blocks.is_empty() {
            return "trivial".into();
        }
        self.blocks
            .iter()
            .map(|b| b.name.clone())
            .collect::<Vec<_>>()
            .join("+")
    }

    /// The full block-diagonal Gram matrix.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        let d = self.rank();
        let mut g = vec![vec![0; d]; d];
        let mut off = 0;
        for b in &self.blocks {
            for i in 0..b.rank() {
                for j in 0..b.rank() {
                    g[off + i][off + j] = b.gram[i][j];
                }
            }
            off += b.rank();
        }
        g
    }

    /// Whether all blocks have the same underlying lattice and form as `other`.
    pub fn same_form(&self, other: &Self) -> bool {
        self.rank() == other.rank()
            && self.gram() == other.gram()
            && self.blocks.len() == other.blocks.len()
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a.membership == b.membership && a.rank() == b.rank())
    }

    fn split<'a, T>(&self, v: &'a [T]) -> Vec<&'a [T]> {
        let mut out = Vec::with_capacity(self.blocks.len());
        let mut off = 0;
        for b in &self.blocks {
            out.push(&v[off..off + b.rank()]);
            off += b.rank();
        }
        out
    }

    pub fn is_member(&self, m: &[i64]) -> bool {
        m.len() == self.rank()
            && self
                .blocks
                .iter()
                .zip(self.split(m))
                .all(|(b, part)| b.is_member(part))
    }

    pub fn check_member(&self, m: &[i64]) -> Result<()> {
        if self.is_member(m) {
            Ok(())
        } else {
            Err(Error::NotInLattice(m.to_vec()))
        }
    }

    /// `mᵀGm = 2φ(m)`, defined on all of `ℤ^d`.
    pub fn twice_phi(&self, m: &[i64]) -> i64 {
        self.bilinear(m, m)
    }

    fn bilinear(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut acc = 0;
        let mut off = 0;
        for blk in &self.blocks {
            for i in 0..blk.rank() {
                for j in 0..blk.rank() {
                    acc += a[off + i] * blk.gram[i][j] * b[off + j];
                }
            }
            off += blk.rank();
        }
        acc
    }

    pub fn phi(&self, m: &[i64]) -> Result<i64> {
        self.check_member(m)?;
        let t = self.twice_phi(m);
        debug_assert!(t % 2 == 0);
        Ok(t / 2)
    }

    pub fn pairing(&self, a: &[i64], b: &[i64]) -> Result<i64> {
        self.check_member(a)?;
        self.check_member(b)?;
        Ok(self.bilinear(a, b))
    }

    pub fn ihat(&self, m: &[i64]) -> Result<Vec<i64>> {
        self.check_member(m)?;
        Ok(self.ihat_unchecked(m))
    }

    /// `Gm` for any integer vector.
    pub fn ihat_unchecked(&self, m: &[i64]) -> Vec<i64> {
        let g = self.gram();
        g.iter()
            .map(|row| row.iter().zip(m).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `φ(m) mod n`.
    pub fn phi_mod(&self, m: &[i64], n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::Parameter("modulus must be positive".into()));
        }
        Ok(self.phi(m)?.rem_euclid(n as i64) as u64)
    }

    pub fn group_order(&self) -> Option<usize> {
        self.blocks.iter().try_fold(1usize, |acc, b| {
            b.group_order().and_then(|o| acc.checked_mul(o))
        })
    }

    /// Every Weyl group element, when the group is small enough to list.
    pub fn weyl_elements(&self) -> Option<Vec<SignedPermutation>> {
        let order = self.group_order()?;
        if order > ENUMERATION_LIMIT {
            return None;
        }
        let mut acc = vec![Vec::<SignedPermutation>::new()];
        for b in &self.blocks {
            let elems = b.elements();
            let mut next = Vec::with_capacity(acc.len() * elems.len());
            for prefix in &acc {
                for e in &elems {
                    let mut p = prefix.clone();
                    p.push(e.clone());
                    next.push(p);
                }
            }
            acc = next;
        }
        Some(
            acc.iter()
                .map(|parts| SignedPermutation::concat(parts))
                .collect(),
        )
    }

    pub fn random_weyl<R: Rng + ?Sized>(&self, rng: &mut R) -> SignedPermutation {
        let parts: Vec<_> = self.blocks.iter().map(|b| b.random_element(rng)).collect();
        SignedPermutation::concat(&parts)
    }

    pub fn contains_weyl(&self, w: &SignedPermutation) -> bool {
        if w.rank() != self.rank() {
            return false;
        }
        match self.weyl_elements() {
            Some(all) => all.contains(w),
            None => {
                // only the built-in signed kinds are too large to list
                let mut off = 0;
                self.blocks.iter().all(|b| {
                    let d = b.rank();
                    let ok = (off..off + d).all(|i| w.perm[i] >= off && w.perm[i] < off + d)
                        && match b.weyl {
                            WeylKind::SignedEven => {
                                w.signs[off..off + d].iter().filter(|&&s| s < 0).count() % 2 == 0
                            }
                            _ => true,
                        };
                    off += d;
                    ok
                })
            }
        }
    }

    /// `wm = m`, or for a lift `m̄` of `m: ℤ/n → T`, `wm̄ − m̄ ∈ nŤ`.
    ///
    /// Coordinatewise congruence is not enough: on `Spin(2d)` with `n` even,
    /// `(wm̄ − m̄)/n` may have odd sum, and then `w` does not fix `m`.
    pub fn fixes(&self, w: &SignedPermutation, m: &[i64], modulus: Option<u64>) -> bool {
        if !fixes(w, m, modulus) {
            return false;
        }
        match modulus {
            None => true,
            Some(n) => {
                let q: Vec<i64> = w
                    .apply_i64(m)
                    .iter()
                    .zip(m)
                    .map(|(a, b)| (a - b) / n as i64)
                    .collect();
                self.is_member(&q)
            }
        }
    }

    /// Samples elements of `W(m) = {w : wm = m}` (modulo `n` when given).
    ///
    /// Small groups are enumerated and sampled uniformly from the stabilizer;
    /// larger ones use rejection sampling, falling back to the identity.
    pub fn stabilizer_sample<R: Rng + ?Sized>(
        &self,
        m: &[i64],
        modulus: Option<u64>,
        rng: &mut R,
        count: usize,
    ) -> Result<Vec<SignedPermutation>> {
        self.check_member(m)?;
        if let Some(all) = self.weyl_elements() {
            let stab: Vec<_> = all
                .into_iter()
                .filter(|w| self.fixes(w, m, modulus))
                .collect();
            return Ok((0..count)
                .map(|_| stab.choose(rng).expect("identity fixes m").clone())
                .collect());
        }
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let mut found = SignedPermutation::identity(self.rank());
            for _ in 0..REJECTION_ATTEMPTS {
                let w = self.random_weyl(rng);
                if self.fixes(&w, m, modulus) {
                    found = w;
                    break;
                }
            }
            out.push(found);
        }
        Ok(out)
    }

    /// The full stabilizer, when the group can be enumerated.
    pub fn stabilizer(&self, m: &[i64], modulus: Option<u64>) -> Option<Vec<SignedPermutation>> {
        self.weyl_elements().map(|all| {
            all.into_iter()
                .filter(|w| self.fixes(w, m, modulus))
                .collect()
        })
    }

    /// A uniformly random member with entries in `[-bound, bound]`.
    pub fn random_member<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> Vec<i64> {
        self.blocks
            .iter()
            .flat_map(|b| b.random_member(rng, bound))
            .collect()
    }

    /// `½ Σ G_ij (m_i z + x_i)(m_j z + x_j)` with `z` adjoined as the last
    /// jet variable (index `r` for roots in `r` generators).
    pub fn borel_c2(&self, m: &[i64], roots: &[Jet]) -> Result<Jet> {
        let d = self.rank();
        if m.len() != d || roots.len() != d {
            return Err(Error::Parameter(format!(
                "borel_c2 needs {d} rotation numbers and roots, got {} and {}",
                m.len(),
                roots.len()
            )));
        }
        let r = roots.iter().map(Jet::nvars).max().unwrap_or(0);
        let cap = roots
            .iter()
            .map(Jet::degree_cap)
            .min()
            .unwrap_or(crate::jet::DEFAULT_DEGREE_CAP);
        let shape = JetShape::new(r + 1, cap);
        let z = Jet::variable(r, shape);
        let lin: Vec<Jet> = m
            .iter()
            .zip(roots)
            .map(|(&mi, x)| &z.scale(Complex64::new(mi as f64, 0.0)) + &x.embed(shape))
            .collect();
        let g = self.gram();
        let mut acc = Jet::zero(shape);
        for i in 0..d {
            for j in 0..d {
                if g[i][j] != 0 {
                    let t = (&lin[i] * &lin[j]).scale(Complex64::new(0.5 * g[i][j] as f64, 0.0));
                    acc = &acc + &t;
                }
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for LatticeWithForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spin4_values() {
        let l = LatticeWithForm::spin(2).unwrap();
        assert_eq!(l.phi(&[1, 1]).unwrap(), 1);
        assert_eq!(l.ihat(&[1, 1]).unwrap(), vec![1, 1]);
        assert_eq!(l.phi(&[0, 0]).unwrap(), 0);
        assert_eq!(l.pairing(&[0, 0], &[1, 1]).unwrap(), 0);
        let (a, b) = ([1, 1], [1, -1]);
        assert_eq!(l.phi(&[2, 0]).unwrap(), 2);
        assert_eq!(
            l.phi(&a).unwrap() + l.pairing(&a, &b).unwrap() + l.phi(&b).unwrap(),
            2
        );
        assert_eq!(l.phi_mod(&[1, 1], 2).unwrap(), 1);
        assert_eq!(l.phi_mod(&[0, 0], 5).unwrap(), 0);
    }

    #[test]
    fn odd_sum_is_rejected() {
        let l = LatticeWithForm::spin(2).unwrap();
        assert_eq!(l.phi(&[1, 0]), Err(Error::NotInLattice(vec![1, 0])));
        // half-integral off the lattice
        assert_eq!(l.twice_phi(&[1, 0]) % 2, 1);
    }

    #[test]
    fn d_type_group_orders() {
        for (d, order) in [(1, 1), (2, 4), (3, 24), (4, 192)] {
            let l = LatticeWithForm::spin(d).unwrap();
            assert_eq!(l.weyl_elements().unwrap().len(), order);
            assert_eq!(l.group_order(), Some(order));
        }
    }

    #[test]
    fn swap_fixes_diagonal() {
        let w = SignedPermutation::swap(2, 0, 1);
        let m = Cocharacter::new(&LatticeWithForm::spin(2).unwrap(), vec![1, 1]).unwrap();
        assert_eq!(weyl_apply(&w, &m).m, vec![1, 1]);
        assert_eq!(weyl_apply(&SignedPermutation::identity(2), &m), m);
    }

    #[test]
    fn spin6_stabilizer_by_brute_force() {
        let l = LatticeWithForm::spin(3).unwrap();
        let m = [2, 2, 0];
        let stab = l.stabilizer(&m, None).unwrap();
        // oracle: filter all 2^3·3! signed permutations, keep even sign changes
        let mut brute = 0;
        for perm in permutations(3) {
            for mask in 0u32..8 {
                if mask.count_ones() % 2 == 1 {
                    continue;
                }
                let signs: Vec<i8> = (0..3)
                    .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                    .collect();
                let w = SignedPermutation::new(perm.clone(), signs).unwrap();
                if w.apply_i64(&m) == m {
                    brute += 1;
                }
            }
        }
        assert_eq!(stab.len(), brute);
        assert_eq!(brute, 2);
        assert!(stab.contains(&SignedPermutation::swap(3, 0, 1)));
        // flipping the third coordinate alone is odd, so not in D_3
        assert!(!stab.contains(&SignedPermutation::sign_change(3, &[2])));
    }

    #[test]
    fn compose_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = LatticeWithForm::spin(4).unwrap();
        for _ in 0..50 {
            let a = l.random_weyl(&mut rng);
            let b = l.random_weyl(&mut rng);
            let v = [3, -1, 4, 2];
            assert_eq!(a.compose(&b).apply_i64(&v), a.apply_i64(&b.apply_i64(&v)));
            assert!(a.compose(&a.inverse()).is_identity());
            assert!(l.contains_weyl(&a));
        }
    }

    #[test]
    fn example_c2_display() {
        let l = LatticeWithForm::spin(2).unwrap();
        let s = JetShape::new(2, 4);
        let roots = [Jet::variable(0, s), Jet::variable(1, s)];
        let c2 = l.borel_c2(&[1, 1], &roots).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let half = Complex64::new(0.5, 0.0);
        // variables: x1, x2, z
        let expect = Jet::from_terms(
            JetShape::new(3, 4),
            &[
                (&[0, 0, 2], one),
                (&[1, 0, 1], one),
                (&[0, 1, 1], one),
                (&[2, 0, 0], half),
                (&[0, 2, 0], half),
            ],
        );
        assert_eq!(c2, expect);
        let zero_roots = [Jet::zero(s), Jet::zero(s)];
        assert_eq!(
            l.borel_c2(&[0, 0], &zero_roots).unwrap(),
            Jet::zero(JetShape::new(3, 4))
        );
    }

    #[test]
    fn torus_preset() {
        assert!(LatticeWithForm::torus(vec![vec![1]]).is_err());
        assert!(LatticeWithForm::torus(vec![vec![2, 1], vec![0, 2]]).is_err());
        let l = LatticeWithForm::torus(vec![vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(l.phi(&[1, 0]).unwrap(), 1);
        assert_eq!(l.phi(&[1, 1]).unwrap(), 3);
        assert_eq!(l.weyl_elements().unwrap().len(), 2);
        let skew = LatticeWithForm::torus(vec![vec![2, 1], vec![1, 4]]).unwrap();
        assert_eq!(skew.weyl_elements().unwrap().len(), 1);
    }

    #[test]
    fn direct_sums_and_scaling() {
        let s2 = LatticeWithForm::spin(2).unwrap();
        let sum = LatticeWithForm::direct_sum(&[s2.clone(), s2.clone()]);
        assert_eq!(sum.rank(), 4);
        assert!(sum.is_member(&[1, 1, 2, 0]));
        assert!(!sum.is_member(&[1, 0, 1, 0]));
        assert_eq!(sum.group_order(), Some(16));
        let twice = s2.scaled(2);
        assert_eq!(twice.phi(&[1, 1]).unwrap(), 2);
    }

    #[test]
    fn random_members_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..=4 {
            let l = LatticeWithForm::spin(d).unwrap();
            for _ in 0..100 {
                let m = l.random_member(&mut rng, 3);
                assert!(l.is_member(&m));
                assert!(m.iter().all(|x| x.abs() <= 3));
            }
        }
    }

    #[test]
    fn modular_stabilizer() {
        let l = LatticeWithForm::spin(2).unwrap();
        let stab = l.stabilizer(&[1, 1], Some(2)).unwrap();
        // every element of D_2 fixes (1,1) mod 2
        assert_eq!(stab.len(), 4);
    }

    #[test]
    fn stabilizer_mod_n_is_taken_in_the_lattice() {
        let l = LatticeWithForm::spin(3).unwrap();
        let m = [1, 1, 0];
        let w = SignedPermutation::sign_change(3, &[0, 2]);
        // (−1, 1, 0) ≡ (1, 1, 0) mod 2 coordinatewise, but the difference is 2·(−1, 0, 0)
        assert!(fixes(&w, &m, Some(2)));
        assert!(!l.fixes(&w, &m, Some(2)));
        let w = SignedPermutation::sign_change(3, &[0, 1]);
        assert!(l.fixes(&w, &m, Some(2)));
        assert!(l.stabilizer(&m, Some(2)).unwrap().iter().all(|w| {
            let d: Vec<i64> = w
                .apply_i64(&m)
                .iter()
                .zip(&m)
                .map(|(a, b)| (a - b) / 2)
                .collect();
            l.is_member(&d)
        }));
    }
}
