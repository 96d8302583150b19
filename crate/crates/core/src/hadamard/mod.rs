//! Bit-packed `±1` matrices and Hadamard constructions.

mod asymptotic;

pub use asymptotic::{
    asymptotic_plan, asymptotic_plan_with, realize_plan, AsymptoticConfig, AsymptoticPlan, DigitClaim, DigitPlan,
    PlanError, Thresholds, ThresholdSource,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::{Certification, GcsSet};
use crate::gauss::GaussInt;
use crate::signed_perm::{check_perfect, SPSeq, SignedPerm, SpError};

/// Orders up to this size get the full row-pair check by default.
pub const FULL_CHECK_BUDGET: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HadamardError {
    #[error("expected 4 sequences of equal length, got lengths {0:?}")]
    NotQuad(Vec<usize>),
    #[error("input quad is not certified")]
    NotCertified,
    #[error("entry {0} is not one of ±1, ±i")]
    NotPhase(GaussInt),
    #[error("sequence is not perfect: {0}")]
    NotPerfect(SpError),
    #[error("seed matrix of order {0} is not a Hadamard matrix of the block order")]
    NotHadamardSeed(usize),
    #[error("verification failed: {0:?}")]
    VerificationFailed(Box<HadamardReport>),
}

pub type Result<T> = std::result::Result<T, HadamardError>;

/// Square `±1` matrix; bit 0 is `+1`, bit 1 is `−1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PMMatrix {
    order: usize,
    words: usize,
    bits: Vec<u64>,
    /// Block size when the matrix is block-circulant.
    block: Option<usize>,
}

impl PMMatrix {
    /// All-`+1` matrix.
    pub fn ones(order: usize) -> Self {
        let words = order.div_ceil(64);
        PMMatrix { order, words, bits: vec![0; order * words], block: None }
    }

    pub fn from_rows(rows: &[Vec<i8>]) -> Option<Self> {
        let n = rows.len();
        let mut m = Self::ones(n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return None;
            }
            for (c, &x) in row.iter().enumerate() {
                match x {
                    1 => {}
                    -1 => m.set(r, c, -1),
                    _ => return None,
                }
            }
        }
        Some(m)
    }

    /// Builds from raw packed words; bits beyond `order` in each row must be clear.
    pub fn from_words(order: usize, block: Option<usize>, bits: Vec<u64>) -> Option<Self> {
        let words = order.div_ceil(64);
        if bits.len() != order * words {
            return None;
        }
        let m = PMMatrix { order, words, bits, block };
        let tail = order % 64;
        if tail != 0 && (0..order).any(|r| m.row(r)[words - 1] >> tail != 0) {
            return None;
        }
        Some(m)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn block(&self) -> Option<usize> {
        self.block
    }

    pub fn with_block(mut self, block: Option<usize>) -> Self {
        self.block = block;
        self
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    pub fn get(&self, r: usize, c: usize) -> i8 {
        if self.bits[r * self.words + c / 64] >> (c % 64) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn set(&mut self, r: usize, c: usize, x: i8) {
        let w = &mut self.bits[r * self.words + c / 64];
        if x < 0 {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.bits[r * self.words + c / 64] ^= 1 << (c % 64);
    }

    pub fn to_rows(&self) -> Vec<Vec<i8>> {
        (0..self.order).map(|r| (0..self.order).map(|c| self.get(r, c)).collect()).collect()
    }

    /// `Σ_k H[r][k]·H[s][k]`.
    pub fn row_dot(&self, r: usize, s: usize) -> i64 {
        let diff: u32 = self.row(r).iter().zip(self.row(s)).map(|(a, b)| (a ^ b).count_ones()).sum();
        self.order as i64 - 2 * diff as i64
    }

    /// Block-row `k` equals block-row 0 cyclically shifted by `k` blocks.
    pub fn is_block_circulant(&self, v: usize) -> bool {
        if v == 0 || self.order % v != 0 {
            return false;
        }
        let nb = self.order / v;
        (0..self.order).into_par_iter().all(|r| {
            let (k, a) = (r / v, r % v);
            (0..nb).all(|l| {
                let src = ((l + nb - k) % nb) * v;
                (0..v).all(|b| self.get(r, l * v + b) == self.get(a, src + b))
            })
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HadamardMethod {
    Full,
    /// Block row 0 against all rows, plus a bit-exact block-circulant check.
    BlockCirculant { block: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HadamardReport {
    pub ok: bool,
    pub order: usize,
    pub method: HadamardMethod,
    /// First row pair `(r, s, dot)` with the wrong inner product.
    pub failure: Option<(usize, usize, i64)>,
    pub structure_ok: bool,
}

fn check_rows(h: &PMMatrix, rows: std::ops::Range<usize>) -> Option<(usize, usize, i64)> {
    let n = h.order;
    rows.into_par_iter()
        .filter_map(|r| {
            (0..n).find_map(|s| {
                let d = h.row_dot(r, s);
                let want = if r == s { n as i64 } else { 0 };
                (d != want).then_some((r.min(s), r.max(s), d))
            })
        })
        .min()
}

/// Every pair of rows: `H·Hᵀ = n·I`.
pub fn verify_hadamard_full(h: &PMMatrix) -> HadamardReport {
    let n = h.order;
    let failure = (0..n)
        .into_par_iter()
        .filter_map(|r| {
            (r..n).find_map(|s| {
                let d = h.row_dot(r, s);
                let want = if r == s { n as i64 } else { 0 };
                (d != want).then_some((r, s, d))
            })
        })
        .min();
    HadamardReport { ok: failure.is_none(), order: n, method: HadamardMethod::Full, failure, structure_ok: true }
}

/// Full check up to [`FULL_CHECK_BUDGET`]; larger block-circulant matrices use the block-row shortcut.
pub fn verify_hadamard(h: &PMMatrix) -> HadamardReport {
    match h.block {
        Some(v) if h.order > FULL_CHECK_BUDGET => verify_hadamard_shortcut(h, v),
        _ => verify_hadamard_full(h),
    }
}

/// Checks block-circulant structure, then block row 0 against every row.
pub fn verify_hadamard_shortcut(h: &PMMatrix, v: usize) -> HadamardReport {
    let structure_ok = h.is_block_circulant(v);
    let method = HadamardMethod::BlockCirculant { block: v };
    if !structure_ok {
        return HadamardReport { ok: false, order: h.order, method, failure: None, structure_ok };
    }
    let failure = check_rows(h, 0..v.min(h.order));
    HadamardReport { ok: failure.is_none(), order: h.order, method, failure, structure_ok }
}

fn verified(h: PMMatrix) -> Result<PMMatrix> {
    let rep = verify_hadamard(&h);
    if rep.ok {
        Ok(h)
    } else {
        Err(HadamardError::VerificationFailed(Box::new(rep)))
    }
}

/// Order `2^t`: `H[r][c] = (−1)^{popcount(r & c)}`.
pub fn sylvester(t: u32) -> PMMatrix {
    let n = 1usize << t;
    let mut m = PMMatrix::ones(n);
    for r in 0..n {
        for c in 0..n {
            if (r & c).count_ones() % 2 == 1 {
                m.set(r, c, -1);
            }
        }
    }
    m
}

/// The 2×2 `±1` block replacing an element of `SP_2`.
fn substitute(x: &SignedPerm) -> [[i8; 2]; 2] {
    let one = SignedPerm::identity(2);
    let (i, j) = (SignedPerm::sp_i(), SignedPerm::sp_j());
    let ij = i.mul(&j).expect("order 2");
    let table: [(&SignedPerm, [[i8; 2]; 2]); 4] =
        [(&one, [[1, 1], [1, -1]]), (&i, [[-1, 1], [1, 1]]), (&j, [[1, 1], [-1, 1]]), (&ij, [[1, -1], [1, 1]])];
    for (k, m) in table {
        if x == k {
            return m;
        }
        if *x == k.neg() {
            return m.map(|r| r.map(|e| -e));
        }
    }
    unreachable!("SP_2 has eight elements")
}

/// Order-`8n` Hadamard matrix from a quad of length-`n` 4-phase complementary sequences.
///
/// Block layout, with `X·R·j` meaning each block of `X·R` multiplied on the right by `j`:
/// ```text
///  A     −BRj   −CRj   −DRj
///  BRj    A     −D*Rj   C*Rj
///  CRj    D*Rj   A     −B*Rj
///  DRj   −C*Rj   B*Rj   A
/// ```
pub fn goethals_seidel_8n(quad: &GcsSet) -> Result<PMMatrix> {
    let lens = quad.lengths();
    if lens.len() != 4 || lens.iter().any(|&l| l != lens[0]) || lens[0] == 0 {
        return Err(HadamardError::NotQuad(lens));
    }
    if quad.certification() == Certification::Unchecked {
        return Err(HadamardError::NotCertified);
    }
    let n = lens[0];
    let to_sp = |s: &crate::seq::QSeq| -> Result<Vec<SignedPerm>> {
        s.iter().map(|&x| SignedPerm::from_unit(x).ok_or(HadamardError::NotPhase(x))).collect()
    };
    let s = quad.seqs();
    let (a, b, c, d) = (to_sp(&s[0])?, to_sp(&s[1])?, to_sp(&s[2])?, to_sp(&s[3])?);
    let (bs, cs, ds) = (to_sp(&s[1].flip_conj())?, to_sp(&s[2].flip_conj())?, to_sp(&s[3].flip_conj())?);
    let j = SignedPerm::sp_j();
    // (circulant of x, sign, multiplied by R and j)
    let layout: [[(&[SignedPerm], i8, bool); 4]; 4] = [
        [(&a, 1, false), (&b, -1, true), (&c, -1, true), (&d, -1, true)],
        [(&b, 1, true), (&a, 1, false), (&ds, -1, true), (&cs, 1, true)],
        [(&c, 1, true), (&ds, 1, true), (&a, 1, false), (&bs, -1, true)],
        [(&d, 1, true), (&cs, -1, true), (&bs, 1, true), (&a, 1, false)],
    ];
    let mut h = PMMatrix::ones(8 * n);
    for (bi, row) in layout.iter().enumerate() {
        for (bj, &(x, sign, rj)) in row.iter().enumerate() {
            for k in 0..n {
                for l in 0..n {
                    // circulant entry x[(l − k) mod n]; right-multiplying by R reverses columns
                    let col = if rj { n - 1 - l } else { l };
                    let mut e = x[(col + n - k) % n].clone();
                    if rj {
                        e = e.mul(&j).expect("order 2");
                    }
                    if sign < 0 {
                        e = e.neg();
                    }
                    let m = substitute(&e);
                    let (r0, c0) = (2 * (bi * n + k), 2 * (bj * n + l));
                    for (dr, mr) in m.iter().enumerate() {
                        for (dc, &v) in mr.iter().enumerate() {
                            h.set(r0 + dr, c0 + dc, v);
                        }
                    }
                }
            }
        }
    }
    verified(h)
}

/// The `{0, ±1}` matrix `D` of order `vn` whose block `(k, l)` is `c_{(l−k) mod n}`, as dense rows.
pub fn expand_circulant(c: &SPSeq) -> Vec<Vec<i8>> {
    let (n, v) = (c.len(), c.order());
    let mut d = vec![vec![0i8; n * v]; n * v];
    for k in 0..n {
        for l in 0..n {
            if let Some(x) = &c.entries()[(l + n - k) % n] {
                for a in 0..v {
                    d[k * v + a][l * v + x.image()[a] as usize] = x.sign()[a];
                }
            }
        }
    }
    d
}

/// Block-circulant Hadamard matrix `D·(I_n ⊗ H_v)` of order `vn` with block size `v`.
pub fn block_circulant_from_perfect(c: &SPSeq, hv: &PMMatrix) -> Result<PMMatrix> {
    let (n, v) = (c.len(), c.order());
    if hv.order() != v || !verify_hadamard_full(hv).ok {
        return Err(HadamardError::NotHadamardSeed(hv.order()));
    }
    check_perfect(c).map_err(HadamardError::NotPerfect)?;
    let mut h = PMMatrix::ones(n * v);
    for k in 0..n {
        for l in 0..n {
            let x = c.entries()[(l + n - k) % n].as_ref().expect("perfect sequences have no zeros");
            for a in 0..v {
                // row a of (x · H_v) is sign[a] times row image[a] of H_v
                let (src, neg) = (x.image()[a] as usize, x.sign()[a] < 0);
                for b in 0..v {
                    let e = hv.get(src, b);
                    h.set(k * v + a, l * v + b, if neg { -e } else { e });
                }
            }
        }
    }
    verified(h.with_block(Some(v)))
}
