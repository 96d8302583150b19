//! Signed permutation groups `SP_v`, sequences over `{0} ∪ SP_v` and perfect-sequence assembly.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::GcsSet;
use crate::gauss::GaussInt;
use crate::seq::{CorrMode, QSeq};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpError {
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("order {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("image is not a permutation or a sign is not ±1")]
    InvalidPermutation,
    #[error("entry {value} at index {index} is not a unit")]
    NotUnit { index: usize, value: GaussInt },
    #[error("supports overlap at index {index}")]
    NotDisjoint { index: usize },
    #[error("sequence {which} is not quasi-symmetric")]
    NotQuasiSymmetric { which: char },
    #[error("sequence {which}: correlation differs from its flip at lag {lag}")]
    FlipCorrMismatch { which: char, lag: i64 },
    #[error("entries a[{i}] and b[{j}] do not commute")]
    NonCommutingEntries { i: usize, j: usize },
    #[error("shape violation: {0}")]
    ShapeViolation(String),
    #[error("input {0} is not certified")]
    NotCertifiedInput(usize),
    #[error("zero entry left at index {index}")]
    ZeroEntry { index: usize },
    #[error("periodic correlation is wrong at lag {lag}")]
    PerfectionFailed { lag: usize },
}

pub type Result<T> = std::result::Result<T, SpError>;

/// Signed permutation matrix: row `r` has `sign[r]` in column `image[r]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedPerm {
    image: Vec<u32>,
    sign: Vec<i8>,
}

impl SignedPerm {
    pub fn new(image: Vec<u32>, sign: Vec<i8>) -> Result<Self> {
        let v = image.len();
        if !v.is_power_of_two() {
            return Err(SpError::NotPowerOfTwo(v));
        }
        if sign.len() != v || sign.iter().any(|&s| s != 1 && s != -1) {
            return Err(SpError::InvalidPermutation);
        }
        let mut seen = vec![false; v];
        for &c in &image {
            let c = c as usize;
            if c >= v || seen[c] {
                return Err(SpError::InvalidPermutation);
            }
            seen[c] = true;
        }
        Ok(SignedPerm { image, sign })
    }

    pub fn identity(v: usize) -> Self {
        assert!(v.is_power_of_two(), "order must be a power of two");
        SignedPerm { image: (0..v as u32).collect(), sign: vec![1; v] }
    }

    /// `i ↦ [[0, −1], [1, 0]]` in `SP_2`.
    pub fn sp_i() -> Self {
        SignedPerm { image: vec![1, 0], sign: vec![-1, 1] }
    }

    /// `j ↦ [[1, 0], [0, −1]]` in `SP_2`.
    pub fn sp_j() -> Self {
        SignedPerm { image: vec![0, 1], sign: vec![1, -1] }
    }

    /// A unit of `{±1, ±i}` as an element of `SP_2`.
    pub fn from_unit(x: GaussInt) -> Option<Self> {
        let k = x.unit_exponent()?;
        let base = if k % 2 == 0 { Self::identity(2) } else { Self::sp_i() };
        Some(if k >= 2 { base.neg() } else { base })
    }

    pub fn order(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[u32] {
        &self.image
    }

    pub fn sign(&self) -> &[i8] {
        &self.sign
    }

    pub fn neg(&self) -> Self {
        SignedPerm { image: self.image.clone(), sign: self.sign.iter().map(|s| -s).collect() }
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &SignedPerm) -> Result<SignedPerm> {
        if self.order() != other.order() {
            return Err(SpError::OrderMismatch { left: self.order(), right: other.order() });
        }
        let (image, sign) = self
            .image
            .iter()
            .zip(&self.sign)
            .map(|(&c, &s)| (other.image[c as usize], s * other.sign[c as usize]))
            .unzip();
        Ok(SignedPerm { image, sign })
    }

    pub fn transpose(&self) -> SignedPerm {
        let v = self.order();
        let mut image = vec![0; v];
        let mut sign = vec![0; v];
        for (r, (&c, &s)) in self.image.iter().zip(&self.sign).enumerate() {
            image[c as usize] = r as u32;
            sign[c as usize] = s;
        }
        SignedPerm { image, sign }
    }

    /// Block-diagonal doubling `diag(x, x)`.
    pub fn embed(&self) -> SignedPerm {
        let v = self.order() as u32;
        SignedPerm {
            image: self.image.iter().copied().chain(self.image.iter().map(|c| c + v)).collect(),
            sign: self.sign.iter().chain(&self.sign).copied().collect(),
        }
    }

    /// Repeated doubling up to order `v`.
    pub fn embed_to(&self, v: usize) -> Result<SignedPerm> {
        if !v.is_power_of_two() {
            return Err(SpError::NotPowerOfTwo(v));
        }
        if v < self.order() {
            return Err(SpError::OrderMismatch { left: self.order(), right: v });
        }
        let mut x = self.clone();
        while x.order() < v {
            x = x.embed();
        }
        Ok(x)
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(r, &c)| c as usize == r) && self.sign.iter().all(|&s| s == 1)
    }

    /// Dense `±1/0` matrix, row-major.
    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let v = self.order();
        let mut m = vec![vec![0; v]; v];
        for (r, (&c, &s)) in self.image.iter().zip(&self.sign).enumerate() {
            m[r][c as usize] = s as i64;
        }
        m
    }

    /// Adds `self` into a dense `v×v` accumulator.
    fn accumulate(&self, acc: &mut [i64]) {
        let v = self.order();
        for (r, (&c, &s)) in self.image.iter().zip(&self.sign).enumerate() {
            acc[r * v + c as usize] += s as i64;
        }
    }
}

impl fmt::Display for SignedPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im: Vec<String> = self.image.iter().map(|x| x.to_string()).collect();
        let sg: Vec<String> = self.sign.iter().map(|x| x.to_string()).collect();
        write!(f, "perm:{};sign:{}", im.join(","), sg.join(","))
    }
}

/// Sequence over `{0} ∪ SP_v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SPSeq {
    order: usize,
    entries: Vec<Option<SignedPerm>>,
}

impl SPSeq {
    pub fn new(order: usize, entries: Vec<Option<SignedPerm>>) -> Result<Self> {
        if !order.is_power_of_two() {
            return Err(SpError::NotPowerOfTwo(order));
        }
        for x in entries.iter().flatten() {
            if x.order() != order {
                return Err(SpError::OrderMismatch { left: order, right: x.order() });
            }
        }
        Ok(SPSeq { order, entries })
    }

    /// Phase sequence as a sequence over `{0} ∪ SP_2`.
    pub fn from_complex(a: &QSeq) -> Result<Self> {
        let entries = a
            .iter()
            .enumerate()
            .map(|(index, &x)| {
                if x.is_zero() {
                    Ok(None)
                } else {
                    SignedPerm::from_unit(x).map(Some).ok_or(SpError::NotUnit { index, value: x })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SPSeq { order: 2, entries })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Option<SignedPerm>] {
        &self.entries
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.entries[i].is_some()).collect()
    }

    pub fn is_quasi_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| self.entries[i].is_some() == self.entries[n - 1 - i].is_some())
    }

    /// `a*`: reversed with transposed entries.
    pub fn flip_transpose(&self) -> SPSeq {
        SPSeq {
            order: self.order,
            entries: self.entries.iter().rev().map(|x| x.as_ref().map(|p| p.transpose())).collect(),
        }
    }

    pub fn embed_to(&self, v: usize) -> Result<SPSeq> {
        let entries = self
            .entries
            .iter()
            .map(|x| x.as_ref().map(|p| p.embed_to(v)).transpose())
            .collect::<Result<Vec<_>>>()?;
        Ok(SPSeq { order: v, entries })
    }

    /// No zero entries.
    pub fn is_full(&self) -> bool {
        self.entries.iter().all(|x| x.is_some())
    }
}

/// Lag-indexed `v×v` integer matrices, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatProfile {
    pub mode: CorrMode,
    pub n: usize,
    pub v: usize,
    /// Aperiodic: lags `1−n..n−1`; periodic: lags `0..n−1`.
    pub values: Vec<Vec<i64>>,
}

impl MatProfile {
    pub fn at(&self, lag: i64) -> &[i64] {
        match self.mode {
            CorrMode::Aperiodic => &self.values[(lag + self.n as i64 - 1) as usize],
            CorrMode::Periodic => &self.values[lag.rem_euclid(self.n as i64) as usize],
        }
    }

    pub fn lags(&self) -> impl Iterator<Item = i64> {
        let n = self.n as i64;
        match self.mode {
            CorrMode::Aperiodic => (1 - n)..n,
            CorrMode::Periodic => 0..n,
        }
    }

    /// `c·I` at lag 0 and zero elsewhere; returns the first failing lag.
    pub fn first_non_delta(&self, c: i64) -> Option<i64> {
        self.lags().find(|&lag| {
            let m = self.at(lag);
            (0..self.v).any(|r| {
                (0..self.v).any(|k| m[r * self.v + k] != if lag == 0 && r == k { c } else { 0 })
            })
        })
    }
}

/// `R_ab(τ) = Σ_i a_i · b_{i−τ}ᵀ` (aperiodic) or with cyclic indices (periodic).
pub fn spseq_corr(a: &SPSeq, b: &SPSeq, mode: CorrMode) -> Result<MatProfile> {
    if a.order != b.order {
        return Err(SpError::OrderMismatch { left: a.order, right: b.order });
    }
    let (n, v) = (a.len().max(b.len()), a.order);
    if mode == CorrMode::Periodic && a.len() != b.len() {
        return Err(SpError::LengthMismatch { left: a.len(), right: b.len() });
    }
    let lags: Vec<i64> = match mode {
        CorrMode::Aperiodic => (1 - n as i64..n as i64).collect(),
        CorrMode::Periodic => (0..n as i64).collect(),
    };
    let bt: Vec<Option<SignedPerm>> = b.entries.iter().map(|x| x.as_ref().map(|p| p.transpose())).collect();
    let values = lags
        .iter()
        .map(|&tau| {
            let mut acc = vec![0i64; v * v];
            for (i, x) in a.entries.iter().enumerate() {
                let Some(x) = x else { continue };
                let j = i as i64 - tau;
                let j = match mode {
                    CorrMode::Aperiodic if j < 0 || j >= b.len() as i64 => continue,
                    CorrMode::Aperiodic => j as usize,
                    CorrMode::Periodic => j.rem_euclid(n as i64) as usize,
                };
                if let Some(y) = &bt[j] {
                    x.mul(y).expect("orders agree").accumulate(&mut acc);
                }
            }
            acc
        })
        .collect();
    Ok(MatProfile { mode, n, v, values })
}

pub fn sp_auto(a: &SPSeq, mode: CorrMode) -> MatProfile {
    spseq_corr(a, a, mode).expect("same sequence")
}

fn check_flip(a: &SPSeq, which: char) -> Result<MatProfile> {
    let r = sp_auto(a, CorrMode::Aperiodic);
    let rs = sp_auto(&a.flip_transpose(), CorrMode::Aperiodic);
    if let Some(lag) = r.lags().find(|&l| r.at(l) != rs.at(l)) {
        return Err(SpError::FlipCorrMismatch { which, lag });
    }
    Ok(r)
}

/// Sequence over `SP_{2v}` with `c_i = [[a_i, b_i], [−bᵀ_{n−1−i}, aᵀ_{n−1−i}]]`.
///
/// Requires disjoint quasi-symmetric inputs with `R_a = R_{a*}`, `R_b = R_{b*}` and
/// commuting entries; then `R_c = R_{c*} = diag(R_a + R_b, R_a + R_b)`.
pub fn combine(a: &SPSeq, b: &SPSeq) -> Result<SPSeq> {
    if a.order != b.order {
        return Err(SpError::OrderMismatch { left: a.order, right: b.order });
    }
    if a.len() != b.len() {
        return Err(SpError::LengthMismatch { left: a.len(), right: b.len() });
    }
    let n = a.len();
    if let Some(index) = (0..n).find(|&i| a.entries[i].is_some() && b.entries[i].is_some()) {
        return Err(SpError::NotDisjoint { index });
    }
    if !a.is_quasi_symmetric() {
        return Err(SpError::NotQuasiSymmetric { which: 'a' });
    }
    if !b.is_quasi_symmetric() {
        return Err(SpError::NotQuasiSymmetric { which: 'b' });
    }
    check_flip(a, 'a')?;
    check_flip(b, 'b')?;
    for (i, x) in a.entries.iter().enumerate() {
        let Some(x) = x else { continue };
        for (j, y) in b.entries.iter().enumerate() {
            let Some(y) = y else { continue };
            if x.mul(y)? != y.mul(x)? {
                return Err(SpError::NonCommutingEntries { i, j });
            }
        }
    }
    let v = a.order as u32;
    let entries = (0..n)
        .map(|i| {
            let k = n - 1 - i;
            match (&a.entries[i], &b.entries[i]) {
                (Some(x), None) => {
                    let xt = a.entries[k].as_ref().expect("quasi-symmetric").transpose();
                    Some(SignedPerm {
                        image: x.image.iter().copied().chain(xt.image.iter().map(|c| c + v)).collect(),
                        sign: x.sign.iter().chain(&xt.sign).copied().collect(),
                    })
                }
                (None, Some(y)) => {
                    let yt = b.entries[k].as_ref().expect("quasi-symmetric").transpose();
                    Some(SignedPerm {
                        image: y.image.iter().map(|c| c + v).chain(yt.image.iter().copied()).collect(),
                        sign: y.sign.iter().copied().chain(yt.sign.iter().map(|s| -s)).collect(),
                    })
                }
                _ => None,
            }
        })
        .collect();
    Ok(SPSeq { order: 2 * a.order, entries })
}

/// Output of the supplementary-sequence construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thm4Output {
    pub n: usize,
    /// Cumulative block offsets, starting at 0.
    pub lambda: Vec<usize>,
    /// `a_1, b_1, a_2, b_2, …`.
    pub seqs: Vec<QSeq>,
}

/// One block `(e, f)` with its multiplier pair `(g, h)`.
struct Block<'a> {
    e: &'a QSeq,
    f: &'a QSeq,
    g: &'a QSeq,
    h: &'a QSeq,
}

fn pair_members(s: &GcsSet, idx: usize) -> Result<(&QSeq, &QSeq)> {
    if s.certification() == crate::constructions::Certification::Unchecked {
        return Err(SpError::NotCertifiedInput(idx));
    }
    match s.seqs() {
        [x, y] if x.len() == y.len() => Ok((x, y)),
        _ => Err(SpError::ShapeViolation(format!("input {idx} is not a pair"))),
    }
}

/// Quasi-symmetric, disjoint, supplementary sequences of length
/// `n = 4Σ l_i·m_i + 4Σ (s_{2i−1} + s_{2i})·t_i` from `k` pairs with multipliers and `d` CBS with
/// two multiplier pairs each.
pub fn thm4_sequences(pairs: &[(GcsSet, GcsSet)], cbs_list: &[(GcsSet, GcsSet, GcsSet)]) -> Result<Thm4Output> {
    let mut blocks = Vec::new();
    let mut idx = 0;
    for (p, m) in pairs {
        let (e, f) = pair_members(p, idx)?;
        let (g, h) = pair_members(m, idx + 1)?;
        idx += 2;
        blocks.push(Block { e, f, g, h });
    }
    for (c, m1, m2) in cbs_list {
        if c.certification() == crate::constructions::Certification::Unchecked {
            return Err(SpError::NotCertifiedInput(idx));
        }
        if c.cbs_shape().is_none() {
            return Err(SpError::ShapeViolation(format!("input {idx} is not a CBS")));
        }
        let (g1, h1) = pair_members(m1, idx + 1)?;
        let (g2, h2) = pair_members(m2, idx + 2)?;
        if g1.len() != g2.len() {
            return Err(SpError::ShapeViolation(format!(
                "multipliers of CBS input {idx} have lengths {} and {}",
                g1.len(),
                g2.len()
            )));
        }
        idx += 3;
        let s = c.seqs();
        blocks.push(Block { e: &s[0], f: &s[1], g: g1, h: h1 });
        blocks.push(Block { e: &s[2], f: &s[3], g: g2, h: h2 });
    }
    if blocks.is_empty() {
        return Err(SpError::ShapeViolation("no inputs".into()));
    }
    let mut lambda = vec![0];
    for b in &blocks {
        lambda.push(lambda.last().unwrap() + b.e.len() * b.g.len());
    }
    let n = 4 * lambda.last().unwrap();
    let z = QSeq::zeros;
    let mut seqs = Vec::with_capacity(2 * blocks.len());
    for (i, b) in blocks.iter().enumerate() {
        let (li, ln) = (lambda[i], lambda[i + 1]);
        seqs.push(QSeq::concat(&[&z(li), &b.e.kron(b.g), &z(n - 2 * ln), &b.f.kron(b.h), &z(li)]));
        seqs.push(QSeq::concat(&[
            &z(n / 2 - ln),
            &b.e.flip_conj().neg().kron(b.h),
            &z(2 * li),
            &b.f.flip_conj().kron(b.g),
            &z(n / 2 - ln),
        ]));
    }
    Ok(Thm4Output { n, lambda, seqs })
}

/// Support bookkeeping for a family of sequences: pairwise disjoint and covering every index.
pub fn is_supplementary(seqs: &[QSeq]) -> bool {
    let n = seqs.first().map(|s| s.len()).unwrap_or(0);
    (0..n).all(|i| seqs.iter().filter(|s| s.len() == n && !s[i].is_zero()).count() == 1)
        && seqs.iter().all(|s| s.len() == n)
}

/// Folds `combine` over the sequences in order, embedding each newcomer as scalar blocks.
///
/// With `check_stages`, every stage also asserts `R_c = R_{c*} = diag(R_a + R_b, R_a + R_b)`.
pub fn fold_combine(seqs: &[QSeq], check_stages: bool) -> Result<SPSeq> {
    let (first, rest) = seqs.split_first().ok_or_else(|| SpError::ShapeViolation("no sequences".into()))?;
    let mut c = SPSeq::from_complex(first)?;
    for s in rest {
        let b = SPSeq::from_complex(s)?.embed_to(c.order)?;
        let next = combine(&c, &b)?;
        if check_stages && !combine_identity_holds(&c, &b, &next) {
            return Err(SpError::ShapeViolation("combined correlation identity failed".into()));
        }
        c = next;
    }
    Ok(c)
}

/// `R_c = R_{c*}` and `R_c = diag(R_a + R_b, R_a + R_b)` at every aperiodic lag.
pub fn combine_identity_holds(a: &SPSeq, b: &SPSeq, c: &SPSeq) -> bool {
    let (ra, rb) = (sp_auto(a, CorrMode::Aperiodic), sp_auto(b, CorrMode::Aperiodic));
    let rc = sp_auto(c, CorrMode::Aperiodic);
    let rcs = sp_auto(&c.flip_transpose(), CorrMode::Aperiodic);
    let v = a.order;
    rc.lags().all(|lag| {
        let m = rc.at(lag);
        let s: Vec<i64> = ra.at(lag).iter().zip(rb.at(lag)).map(|(x, y)| x + y).collect();
        let mut want = vec![0; 4 * v * v];
        for r in 0..v {
            for k in 0..v {
                want[r * 2 * v + k] = s[r * v + k];
                want[(r + v) * 2 * v + k + v] = s[r * v + k];
            }
        }
        m == want.as_slice() && m == rcs.at(lag)
    })
}

/// Perfect sequence over `SP_{2^m}` from `m` supplementary sequences.
pub fn perfect_from_inputs(out: &Thm4Output) -> Result<SPSeq> {
    let c = fold_combine(&out.seqs, false)?;
    if let Some(index) = c.entries.iter().position(|x| x.is_none()) {
        return Err(SpError::ZeroEntry { index });
    }
    check_perfect(&c)?;
    Ok(c)
}

/// Periodic autocorrelation `n·I` at lag 0 and zero elsewhere.
pub fn check_perfect(c: &SPSeq) -> Result<()> {
    if let Some(index) = c.entries.iter().position(|x| x.is_none()) {
        return Err(SpError::ZeroEntry { index });
    }
    let p = sp_auto(c, CorrMode::Periodic);
    match p.first_non_delta(c.len() as i64) {
        Some(lag) => Err(SpError::PerfectionFailed { lag: lag as usize }),
        None => Ok(()),
    }
}
