//! Feasible-length arithmetic: 4-phase Golay numbers, the sets `S_k`, their
//! denser variants built from base-sequence lengths, and Table-style b-values.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ntt;

/// Largest transform used for dense sumsets (two `u32` buffers of this length).
const NTT_SUMSET_MAX: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GolayError {
    #[error("bit set for bound {bound} needs {needed} bytes, cap is {cap}")]
    BudgetExceeded { bound: u64, needed: u64, cap: u64 },
    #[error("the base-sequence corpus is required but not loaded")]
    CorpusRequired,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Largest base-sequence parameter `b` for which `CBS(b+1, b)` is known in the literature.
pub const LITERATURE_MAX_B: u64 = 38;

/// Environment variable holding a memory cap override in bytes (suffixes K, M, G allowed).
pub const MEMORY_CAP_ENV: &str = "GCS_MEMORY_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MemoryBudget {
    pub cap_bytes: u64,
}

impl Default for MemoryBudget {
    fn default() -> Self {
        MemoryBudget { cap_bytes: 2 << 30 }
    }
}

impl MemoryBudget {
    pub fn new(cap_bytes: u64) -> Self {
        MemoryBudget { cap_bytes }
    }

    pub fn unlimited() -> Self {
        MemoryBudget { cap_bytes: u64::MAX }
    }

    /// Default cap, overridden by `GCS_MEMORY_CAP` when set and parseable.
    pub fn from_env() -> Self {
        std::env::var(MEMORY_CAP_ENV)
            .ok()
            .and_then(|s| parse_bytes(&s))
            .map(MemoryBudget::new)
            .unwrap_or_default()
    }

    /// Fails when `sets` simultaneous bit sets over `1..=bound` exceed the cap.
    pub fn check(&self, sets: u64, bound: u64) -> Result<(), GolayError> {
        let needed = sets.saturating_mul(bound / 8 + 8);
        if needed > self.cap_bytes {
            Err(GolayError::BudgetExceeded { bound, needed, cap: self.cap_bytes })
        } else {
            Ok(())
        }
    }
}

/// Parses `1234`, `64K`, `512M`, `2G`.
pub fn parse_bytes(s: &str) -> Option<u64> {
    let s = s.trim();
    let (num, mul) = match s.chars().last()? {
        'k' | 'K' => (&s[..s.len() - 1], 1u64 << 10),
        'm' | 'M' => (&s[..s.len() - 1], 1 << 20),
        'g' | 'G' => (&s[..s.len() - 1], 1 << 30),
        _ => (s, 1),
    };
    num.trim().parse::<u64>().ok()?.checked_mul(mul)
}

/// Exponents of `n = 2^(a+u)·3^b·5^c·11^d·13^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GolayExponents {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub e: u32,
    pub u: u32,
}

impl GolayExponents {
    pub fn value(&self) -> u64 {
        2u64.pow(self.a + self.u)
            * 3u64.pow(self.b)
            * 5u64.pow(self.c)
            * 11u64.pow(self.d)
            * 13u64.pow(self.e)
    }

    /// `b+c+d+e ≤ a+2u+k` and `u ≤ c+e`.
    pub fn satisfies(&self, k: u32) -> bool {
        self.b + self.c + self.d + self.e <= self.a + 2 * self.u + k && self.u <= self.c + self.e
    }
}

/// Exponents of 2, 3, 5, 11, 13 when `n` has no other prime factor.
pub fn smooth_exponents(mut n: u64) -> Option<[u32; 5]> {
    if n == 0 {
        return None;
    }
    let mut ex = [0u32; 5];
    for (k, p) in [2u64, 3, 5, 11, 13].into_iter().enumerate() {
        while n % p == 0 {
            n /= p;
            ex[k] += 1;
        }
    }
    (n == 1).then_some(ex)
}

fn exponents_for(n: u64, k: u32) -> Option<GolayExponents> {
    let [x, b, c, d, e] = smooth_exponents(n)?;
    // Moving a factor of 2 from a to u relaxes the bound, so take u maximal.
    let u = x.min(c + e);
    let g = GolayExponents { a: x - u, b, c, d, e, u };
    g.satisfies(k).then_some(g)
}

/// Exponents witnessing that `n` is a 4-phase Golay number.
pub fn golay_membership(n: u64) -> Option<GolayExponents> {
    exponents_for(n, 1)
}

pub fn is_golay(n: u64) -> bool {
    golay_membership(n).is_some()
}

/// Exponents under the relaxed bound plus a factorization into `k` Golay numbers
/// (factors of 1 allowed), in non-increasing order.
pub fn golay_product_membership(n: u64, k: u32) -> Option<(GolayExponents, Vec<u64>)> {
    if n == 0 || k == 0 {
        return None;
    }
    let ex = exponents_for(n, k)?;
    let divisors = {
        let mut v: Vec<u64> = smooth_numbers(n).into_iter().filter(|&d| n % d == 0 && is_golay(d)).collect();
        v.reverse();
        v
    };
    fn search(n: u64, k: u32, max: u64, divs: &[u64], out: &mut Vec<u64>) -> bool {
        if n == 1 {
            out.resize(out.len() + k as usize, 1);
            return true;
        }
        if k == 0 {
            return false;
        }
        for &d in divs {
            if d > max || d == 1 || n % d != 0 {
                continue;
            }
            out.push(d);
            if search(n / d, k - 1, d, divs, out) {
                return true;
            }
            out.pop();
        }
        false
    }
    let mut w = Vec::new();
    search(n, k, n, &divisors, &mut w).then_some((ex, w))
}

/// All `{2,3,5,11,13}`-smooth numbers in `1..=n`, ascending.
pub fn smooth_numbers(n: u64) -> Vec<u64> {
    let mut out = vec![];
    fn rec(cur: u64, idx: usize, n: u64, out: &mut Vec<u64>) {
        const PR: [u64; 5] = [2, 3, 5, 11, 13];
        out.push(cur);
        for (k, &p) in PR.iter().enumerate().skip(idx) {
            if let Some(next) = cur.checked_mul(p) {
                if next <= n {
                    rec(next, k, n, out);
                }
            }
        }
    }
    if n >= 1 {
        rec(1, 0, n, &mut out);
    }
    out.sort_unstable();
    out
}

/// Golay numbers in `1..=n`, ascending.
pub fn golay_numbers(n: u64) -> Vec<u64> {
    smooth_numbers(n).into_iter().filter(|&x| is_golay(x)).collect()
}

/// Lengths of 2-phase Golay pair seeds used as scaling factors.
pub const TWO_PHASE_SEEDS: [u64; 3] = [2, 10, 26];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LengthKind {
    S1,
    Sk(u32),
    SkD(u32),
    B,
    E,
    F,
    UnderS,
    Other,
}

impl LengthKind {
    pub fn tag(&self) -> (u8, u8) {
        match *self {
            LengthKind::S1 => (1, 1),
            LengthKind::Sk(k) => (2, k as u8),
            LengthKind::SkD(k) => (3, k as u8),
            LengthKind::B => (4, 0),
            LengthKind::E => (5, 0),
            LengthKind::F => (6, 0),
            LengthKind::UnderS => (7, 0),
            LengthKind::Other => (0, 0),
        }
    }

    pub fn from_tag(kind: u8, k: u8) -> Option<LengthKind> {
        Some(match kind {
            0 => LengthKind::Other,
            1 => LengthKind::S1,
            2 => LengthKind::Sk(k as u32),
            3 => LengthKind::SkD(k as u32),
            4 => LengthKind::B,
            5 => LengthKind::E,
            6 => LengthKind::F,
            7 => LengthKind::UnderS,
            _ => return None,
        })
    }
}

impl fmt::Display for LengthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LengthKind::S1 => write!(f, "S1"),
            LengthKind::Sk(k) => write!(f, "S{k}"),
            LengthKind::SkD(k) => write!(f, "S{k}D"),
            LengthKind::B => write!(f, "B"),
            LengthKind::E => write!(f, "E"),
            LengthKind::F => write!(f, "F"),
            LengthKind::UnderS => write!(f, "underS"),
            LengthKind::Other => write!(f, "set"),
        }
    }
}

/// A set of nonnegative integers up to `bound`, members `1..=bound` as packed bits and 0 as a flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthSet {
    kind: LengthKind,
    bound: u64,
    zero: bool,
    words: Vec<u64>,
}

impl LengthSet {
    pub fn empty(kind: LengthKind, bound: u64) -> Self {
        LengthSet { kind, bound, zero: false, words: vec![0; (bound / 64 + 1) as usize] }
    }

    pub fn from_values<I: IntoIterator<Item = u64>>(kind: LengthKind, bound: u64, values: I) -> Self {
        let mut s = LengthSet::empty(kind, bound);
        for v in values {
            s.insert(v);
        }
        s
    }

    /// Rebuilds a set from raw words (bit `x` of the stream is member `x`).
    pub fn from_words(kind: LengthKind, bound: u64, zero: bool, mut words: Vec<u64>) -> Option<Self> {
        if words.len() as u64 != bound / 64 + 1 {
            return None;
        }
        words[0] &= !1;
        let mut s = LengthSet { kind, bound, zero, words };
        s.mask_tail();
        Some(s)
    }

    pub fn kind(&self) -> LengthKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: LengthKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn has_zero(&self) -> bool {
        self.zero
    }

    pub fn set_zero(&mut self, z: bool) {
        self.zero = z;
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn insert(&mut self, v: u64) {
        if v == 0 {
            self.zero = true;
        } else if v <= self.bound {
            self.words[(v / 64) as usize] |= 1 << (v % 64);
        }
    }

    pub fn remove(&mut self, v: u64) {
        if v == 0 {
            self.zero = false;
        } else if v <= self.bound {
            self.words[(v / 64) as usize] &= !(1 << (v % 64));
        }
    }

    pub fn contains(&self, v: u64) -> bool {
        if v == 0 {
            self.zero
        } else {
            v <= self.bound && self.words[(v / 64) as usize] >> (v % 64) & 1 == 1
        }
    }

    fn mask_tail(&mut self) {
        let r = (self.bound % 64) as u32;
        let last = self.words.len() - 1;
        self.words[last] &= if r == 63 { u64::MAX } else { (1u64 << (r + 1)) - 1 };
    }

    /// Members in `1..=bound`.
    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Members in `1..=n`.
    pub fn count_upto(&self, n: u64) -> u64 {
        let n = n.min(self.bound);
        let full = (n / 64) as usize;
        let mut c: u64 = self.words[..full].iter().map(|w| w.count_ones() as u64).sum();
        let r = n % 64;
        let mask = if r == 63 { u64::MAX } else { (1u64 << (r + 1)) - 1 };
        c += (self.words[full] & mask).count_ones() as u64;
        c
    }

    /// Members in `1..=n` divided by `n`.
    pub fn density(&self, n: u64) -> f64 {
        self.count_upto(n) as f64 / n as f64
    }

    /// Smallest `n` in `1..=bound` that is not a member.
    pub fn first_gap(&self) -> Option<u64> {
        for (w, &word) in self.words.iter().enumerate() {
            let mut miss = !word;
            if w == 0 {
                miss &= !1;
            }
            if miss != 0 {
                let v = w as u64 * 64 + miss.trailing_zeros() as u64;
                return (v <= self.bound).then_some(v);
            }
        }
        None
    }

    /// Members of `1..=bound`, ascending.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut x = word;
            std::iter::from_fn(move || {
                if x == 0 {
                    None
                } else {
                    let t = x.trailing_zeros();
                    x &= x - 1;
                    Some(w as u64 * 64 + t as u64)
                }
            })
        })
    }

    /// Members not in `1..=bound`, ascending.
    pub fn gaps(&self) -> impl Iterator<Item = u64> + '_ {
        let bound = self.bound;
        self.words.iter().enumerate().flat_map(move |(w, &word)| {
            let mut x = !word;
            if w == 0 {
                x &= !1;
            }
            std::iter::from_fn(move || {
                if x == 0 {
                    None
                } else {
                    let t = x.trailing_zeros();
                    x &= x - 1;
                    Some(w as u64 * 64 + t as u64)
                }
            })
            .take_while(move |&v| v <= bound)
        })
    }

    pub fn is_subset_of(&self, o: &LengthSet) -> bool {
        (!self.zero || o.zero)
            && self.bound == o.bound
            && self.words.iter().zip(&o.words).all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, o: &LengthSet) {
        assert_eq!(self.bound, o.bound, "bounds must match");
        self.zero |= o.zero;
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a |= b;
        }
    }

    /// `{c·x}` restricted to the bound (0 maps to 0).
    pub fn scaled(&self, c: u64) -> LengthSet {
        let mut out = LengthSet::empty(LengthKind::Other, self.bound);
        out.zero = self.zero;
        if c == 0 {
            out.zero |= self.count() > 0;
            return out;
        }
        for x in self.iter() {
            match x.checked_mul(c) {
                Some(v) if v <= self.bound => out.insert(v),
                _ => break,
            }
        }
        out
    }

    /// `{x + c}` restricted to the bound, including `0 + c` when 0 is a member.
    pub fn shifted(&self, c: u64) -> LengthSet {
        let mut out = LengthSet::empty(LengthKind::Other, self.bound);
        if c == 0 {
            out = self.clone();
            out.kind = LengthKind::Other;
            return out;
        }
        if self.zero {
            out.insert(c);
        }
        for x in self.iter() {
            if x + c > self.bound {
                break;
            }
            out.insert(x + c);
        }
        out
    }

    /// `{x + y}` over members (0 included when flagged), restricted to the bound.
    ///
    /// Sparse operands use shifted-OR with a targeted finish; dense ones an exact
    /// indicator convolution.
    pub fn sumset(&self, o: &LengthSet) -> LengthSet {
        assert_eq!(self.bound, o.bound, "bounds must match");
        let (small, big) = if self.count() <= o.count() { (self, o) } else { (o, self) };
        let nwords = self.words.len() as u64;
        if let Some(size) = ntt::sumset_size(self.bound).filter(|&s| s <= NTT_SUMSET_MAX) {
            let ntt_cost = size as u64 * (size.trailing_zeros() as u64) * 6;
            if small.count().saturating_mul(nwords) > ntt_cost {
                return self.sumset_ntt(o);
            }
        }
        let mut out = LengthSet::empty(LengthKind::Other, self.bound);
        if small.zero {
            out.union_with(big);
        }
        if big.zero {
            out.union_with(small);
        }
        out.zero = small.zero && big.zero;
        let shifts: Vec<u64> = small.iter().collect();
        let mut done = 0usize;
        while done < shifts.len() {
            let end = (done + 16).min(shifts.len());
            for &a in &shifts[done..end] {
                shift_or(&mut out.words, &big.words, a);
            }
            done = end;
            out.mask_tail();
            let missing = self.bound - out.count();
            if missing == 0 {
                return out;
            }
            if missing < nwords && done < shifts.len() {
                let rest = &shifts[done..];
                let gaps: Vec<u64> = out.gaps().collect();
                for m in gaps {
                    if rest.iter().take_while(|&&a| a < m).any(|&a| big.contains(m - a)) {
                        out.insert(m);
                    }
                }
                return out;
            }
        }
        out.mask_tail();
        out
    }

    fn with_zero_bit(&self) -> Vec<u64> {
        let mut w = self.words.clone();
        if self.zero {
            w[0] |= 1;
        }
        w
    }

    fn sumset_ntt(&self, o: &LengthSet) -> LengthSet {
        let a = self.with_zero_bit();
        let words = if std::ptr::eq(self, o) {
            ntt::indicator_sumset(&a, &a, self.bound)
        } else {
            ntt::indicator_sumset(&a, &o.with_zero_bit(), self.bound)
        };
        let zero = words[0] & 1 == 1;
        LengthSet::from_words(LengthKind::Other, self.bound, zero, words).expect("word count matches")
    }

    /// `{x·y}` over members (0 included when flagged), restricted to the bound.
    pub fn productset(&self, o: &LengthSet) -> LengthSet {
        assert_eq!(self.bound, o.bound, "bounds must match");
        let n = self.bound;
        let (ca, cb) = (self.count(), o.count());
        let mut out = LengthSet::empty(LengthKind::Other, n);
        out.zero = (self.zero && (o.zero || cb > 0)) || (o.zero && ca > 0);
        let (small, big) = if ca <= cb { (self, o) } else { (o, self) };
        let (cs, cbig) = (small.count(), big.count());
        let forward_cost: f64 = small.iter().map(|a| (n / a) as f64 * cbig as f64 / n as f64).sum();
        if small.contains(1) {
            let missing = n - cbig;
            let backward_cost = missing as f64 * cs as f64;
            if backward_cost < forward_cost {
                out.union_with(big);
                out.zero = (self.zero && (o.zero || cb > 0)) || (o.zero && ca > 0);
                let factors: Vec<u64> = small.iter().skip(1).collect();
                let gaps: Vec<u64> = out.gaps().collect();
                for m in gaps {
                    if factors.iter().take_while(|&&a| a <= m).any(|&a| m % a == 0 && big.contains(m / a)) {
                        out.insert(m);
                    }
                }
                return out;
            }
        }
        for a in small.iter() {
            let lim = n / a;
            for b in big.iter() {
                if b > lim {
                    break;
                }
                out.insert(a * b);
            }
        }
        out
    }
}

/// `dst |= src << a` on packed words.
fn shift_or(dst: &mut [u64], src: &[u64], a: u64) {
    let q = (a / 64) as usize;
    let r = (a % 64) as u32;
    let n = dst.len();
    if q >= n {
        return;
    }
    if r == 0 {
        for w in q..n {
            dst[w] |= src[w - q];
        }
    } else {
        dst[q] |= src[0] << r;
        for w in q + 1..n {
            dst[w] |= (src[w - q] << r) | (src[w - q - 1] >> (64 - r));
        }
    }
}

/// `S_1 = {0} ∪ G_4p` up to `n`.
pub fn enumerate_s1(n: u64) -> LengthSet {
    let mut s = LengthSet::from_values(LengthKind::S1, n, golay_numbers(n));
    s.set_zero(true);
    s
}

/// `{2,10,26}·S_1` without 0, up to `n`.
pub fn enumerate_under_s(n: u64) -> LengthSet {
    let g = golay_numbers(n / 2);
    let mut s = LengthSet::empty(LengthKind::UnderS, n);
    for f in TWO_PHASE_SEEDS {
        for &x in &g {
            match x.checked_mul(f) {
                Some(v) if v <= n => s.insert(v),
                _ => break,
            }
        }
    }
    s
}

/// Largest element of `{2,10,26}·S_1` not exceeding `n_verified + 1`.
pub fn choose_p(n_verified: u64) -> u64 {
    let lim = n_verified.saturating_add(1);
    let mut best = 0;
    for x in golay_numbers(lim / 2) {
        for f in TWO_PHASE_SEEDS {
            if let Some(v) = x.checked_mul(f) {
                if v <= lim && v > best {
                    best = v;
                }
            }
        }
    }
    best
}

/// Where the base-sequence lengths `CBS(b+1, b)` come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupplyOrigin {
    /// Every `b ≤ 38`, taken from the literature without sequences.
    Literature,
    /// Verified sequences loaded from a corpus file.
    Corpus,
    /// Only pair-derived lengths and the length-(8, 7) seed.
    Restricted,
}

/// The parameters `b` with a known `CBS(b+1, b)` beyond those built from pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseSupply {
    pub origin: SupplyOrigin,
    pub extra_b: BTreeSet<u64>,
}

impl BaseSupply {
    pub fn literature() -> Self {
        BaseSupply { origin: SupplyOrigin::Literature, extra_b: (1..=LITERATURE_MAX_B).collect() }
    }

    pub fn restricted() -> Self {
        BaseSupply { origin: SupplyOrigin::Restricted, extra_b: [7].into_iter().collect() }
    }

    pub fn corpus<I: IntoIterator<Item = u64>>(bs: I) -> Self {
        let mut extra_b: BTreeSet<u64> = bs.into_iter().collect();
        extra_b.insert(7);
        BaseSupply { origin: SupplyOrigin::Corpus, extra_b }
    }

    /// `b ≤ 38` values not available from pairs, the seed or this supply.
    pub fn missing_literature(&self) -> Vec<u64> {
        (1..=LITERATURE_MAX_B).filter(|&b| !self.extra_b.contains(&b) && !is_golay(b)).collect()
    }

    pub fn label(&self) -> String {
        match self.origin {
            SupplyOrigin::Literature => "literature-B".into(),
            SupplyOrigin::Restricted => "restricted-B".into(),
            SupplyOrigin::Corpus => {
                let miss = self.missing_literature();
                if miss.is_empty() {
                    "corpus-B".into()
                } else {
                    let m: Vec<String> = miss.iter().map(|b| b.to_string()).collect();
                    format!("partial-B(missing b={})", m.join(","))
                }
            }
        }
    }
}

/// The sets `B`, `E`, `F` of base and intermediate lengths.
#[derive(Clone, Debug)]
pub struct DenseSets {
    pub s1: LengthSet,
    pub b: LengthSet,
    pub e: LengthSet,
    pub f: LengthSet,
    pub rounds: u32,
}

/// Builds `B`, `E = B ∪ 2·S1·B ∪ 2(S1²+S1²)`, `F = E²`, then refines
/// `E ← E ∪ 4·S1·F`, `F ← E²` until stable.
pub fn build_dense_sets(n: u64, supply: &BaseSupply, budget: &MemoryBudget) -> Result<DenseSets, GolayError> {
    budget.check(10, n)?;
    let s1 = enumerate_s1(n);
    let mut b = s1.scaled(2).shifted(1);
    for &x in &supply.extra_b {
        b.insert(2 * x + 1);
    }
    b.set_zero(false);
    let b = b.with_kind(LengthKind::B);
    let s1sq = s1.productset(&s1);
    let mut e = b.clone();
    e.union_with(&s1.productset(&b).scaled(2));
    e.union_with(&s1sq.sumset(&s1sq).scaled(2));
    e.set_zero(false);
    let mut f = e.productset(&e);
    let mut rounds = 0;
    loop {
        let mut next = e.clone();
        next.union_with(&s1.productset(&f).scaled(4));
        next.set_zero(false);
        if next == e {
            break;
        }
        e = next;
        f = e.productset(&e);
        rounds += 1;
    }
    Ok(DenseSets {
        s1,
        b,
        e: e.with_kind(LengthKind::E),
        f: f.with_kind(LengthKind::F),
        rounds,
    })
}

/// `S_2^D = S1·((S1+S1) ∪ B ∪ 2F) ∪ F`: quads from two pairs, from a
/// `CBS(b+1, b)` or from a `CBS(f, f)` wrapped by a pair, plus the `CBS(f, f)` quads themselves.
pub fn s2_dense(d: &DenseSets) -> LengthSet {
    let mut c = d.s1.sumset(&d.s1);
    c.union_with(&d.b);
    c.union_with(&d.f.scaled(2));
    let mut s2 = d.s1.productset(&c);
    s2.union_with(&d.f);
    s2.set_zero(true);
    s2
}

/// `S_k = S1·(S_{k-1}+S_{k-1})`; with `dense`, `S_2` is replaced by `S_2^D` first.
pub fn build_sk(
    n: u64,
    k: u32,
    dense: bool,
    supply: &BaseSupply,
    budget: &MemoryBudget,
) -> Result<LengthSet, GolayError> {
    if k == 0 {
        return Err(GolayError::InvalidArgument("k must be at least 1".into()));
    }
    budget.check(if dense { 10 } else { 4 }, n)?;
    let s1 = enumerate_s1(n);
    if k == 1 {
        return Ok(s1);
    }
    let mut cur = if dense {
        s2_dense(&build_dense_sets(n, supply, budget)?)
    } else {
        s1.productset(&s1.sumset(&s1))
    };
    for _ in 3..=k {
        cur = s1.productset(&cur.sumset(&cur));
    }
    cur.set_zero(true);
    Ok(cur.with_kind(if dense { LengthKind::SkD(k) } else { LengthKind::Sk(k) }))
}

/// A witness `(s, t, u)` in `S1` with `n = s·(t+u)`, smallest `s` then smallest `t`.
pub fn s2_witness(n: u64, s1: &LengthSet) -> Option<(u64, u64, u64)> {
    for s in s1.iter() {
        if s > n {
            break;
        }
        if n % s != 0 {
            continue;
        }
        let m = n / s;
        for t in std::iter::once(0).chain(s1.iter()) {
            if t > m {
                break;
            }
            if s1.contains(m - t) {
                return Some((s, t, m - t));
            }
        }
    }
    None
}

/// Largest `b` such that `2^i·b'` is representable for every `b' ≤ b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BValue {
    pub gamma: u32,
    pub i: u32,
    pub b: u64,
    /// The search reached `limit` without a gap.
    pub at_limit: bool,
    pub supply: String,
}

/// Representable totals of `Σ l·m + Σ (s1+s2)·t` with `γ = 2k + 4d`, zero terms allowed.
pub fn representable_set(
    gamma: u32,
    bound: u64,
    supply: &BaseSupply,
    budget: &MemoryBudget,
) -> Result<LengthSet, GolayError> {
    if !matches!(gamma, 4 | 6 | 8) {
        return Err(GolayError::InvalidArgument(format!("gamma must be 4, 6 or 8, got {gamma}")));
    }
    budget.check(14, bound)?;
    let d = build_dense_sets(bound, supply, budget)?;
    let g = {
        let mut g = d.s1.clone();
        g.set_zero(false);
        g
    };
    let mut gg = g.productset(&g);
    gg.set_zero(true);
    let mut sums = d.b.clone();
    sums.union_with(&d.f.scaled(2));
    sums.set_zero(false);
    let mut ct = sums.productset(&g);
    ct.set_zero(true);
    let gg2 = gg.sumset(&gg);
    let mut out = match gamma {
        4 => {
            let mut r = gg2;
            r.union_with(&ct);
            r
        }
        6 => {
            let mut r = gg2.sumset(&gg);
            r.union_with(&gg.sumset(&ct));
            r
        }
        _ => {
            let mut r = gg2.sumset(&gg2);
            r.union_with(&gg2.sumset(&ct));
            r.union_with(&ct.sumset(&ct));
            r
        }
    };
    out.set_zero(true);
    Ok(out)
}

/// Table-style `b_γ^(i)` with `κ = 2`, searched up to `limit`.
pub fn compute_b_table(
    gamma: u32,
    i: u32,
    limit: u64,
    supply: &BaseSupply,
    require_corpus: bool,
    budget: &MemoryBudget,
) -> Result<BValue, GolayError> {
    if require_corpus && supply.origin == SupplyOrigin::Restricted {
        return Err(GolayError::CorpusRequired);
    }
    let scale = 1u64
        .checked_shl(i)
        .filter(|&s| s.checked_mul(limit).is_some())
        .ok_or_else(|| GolayError::InvalidArgument("scale overflow".into()))?;
    let r = representable_set(gamma, limit * scale, supply, budget)?;
    let b = (1..=limit).find(|&b| !r.contains(b * scale)).map(|b| b - 1).unwrap_or(limit);
    Ok(BValue { gamma, i, b, at_limit: b == limit, supply: supply.label() })
}

/// `(n, ρ(n), ρ(n)/n)` at each sample point.
pub fn density_rows(set: &LengthSet, samples: &[u64]) -> Vec<(u64, u64, f64)> {
    samples
        .iter()
        .filter(|&&n| n >= 1 && n <= set.bound())
        .map(|&n| {
            let rho = set.count_upto(n);
            (n, rho, rho as f64 / n as f64)
        })
        .collect()
}

/// Roughly logarithmically spaced sample points in `1..=n` (1, 2, 5 per decade, plus `n`).
pub fn log_samples(n: u64) -> Vec<u64> {
    let mut out = BTreeSet::new();
    let mut p = 1u64;
    while p <= n {
        for m in [1, 2, 5] {
            if let Some(v) = p.checked_mul(m) {
                if v <= n {
                    out.insert(v);
                }
            }
        }
        p = match p.checked_mul(10) {
            Some(x) => x,
            None => break,
        };
    }
    out.insert(n);
    out.into_iter().collect()
}

/// First gap and counts of a set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub kind: String,
    pub bound: u64,
    pub first_gap: Option<u64>,
    pub members: u64,
    pub gaps: u64,
}

pub fn coverage_report(set: &LengthSet) -> CoverageReport {
    let members = set.count();
    CoverageReport {
        kind: set.kind().to_string(),
        bound: set.bound(),
        first_gap: set.first_gap(),
        members,
        gaps: set.bound() - members,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_is_golay(n: u64) -> bool {
        let Some([x, b, c, d, e]) = smooth_exponents(n) else { return false };
        (0..=x).any(|u| {
            let g = GolayExponents { a: x - u, b, c, d, e, u };
            g.satisfies(1)
        })
    }

    #[test]
    fn membership_examples() {
        assert_eq!(golay_membership(13), Some(GolayExponents { a: 0, b: 0, c: 0, d: 0, e: 1, u: 0 }));
        assert_eq!(golay_membership(9), None);
        let ten = golay_membership(10).unwrap();
        assert_eq!(ten, GolayExponents { a: 0, b: 0, c: 1, d: 0, e: 0, u: 1 });
        assert_eq!(ten.value(), 10);
        assert_eq!(golay_membership(7), None);
        assert_eq!(golay_membership(1).map(|g| g.value()), Some(1));
    }

    #[test]
    fn membership_matches_exhaustive_split() {
        for n in 1..20000 {
            assert_eq!(is_golay(n), brute_is_golay(n), "n={n}");
        }
    }

    #[test]
    fn product_membership_examples() {
        let (_, w) = golay_product_membership(9, 2).unwrap();
        assert_eq!(w, vec![3, 3]);
        assert!(golay_product_membership(9, 1).is_none());
        assert!(golay_product_membership(2025, 4).is_none());
        let (_, w) = golay_product_membership(2025, 6).unwrap();
        assert_eq!(w.iter().product::<u64>(), 2025);
        assert!(w.iter().all(|&f| is_golay(f)));
    }

    #[test]
    fn product_membership_agrees_with_exponent_bound() {
        for k in 1..4 {
            for n in smooth_numbers(5000) {
                let by_exp = exponents_for(n, k).is_some();
                let by_witness = golay_product_membership(n, k).is_some();
                assert_eq!(by_exp, by_witness, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn s1_small_and_brute_count() {
        let s = enumerate_s1(13);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 2, 3, 4, 5, 6, 8, 10, 11, 12, 13]);
        assert!(s.contains(0));
        let big = enumerate_s1(1_000_000);
        let brute = (1..=1_000_000u64).filter(|&n| brute_is_golay(n)).count() as u64;
        assert_eq!(big.count(), brute);
    }

    #[test]
    fn shift_or_matches_naive_sumset() {
        let a = LengthSet::from_values(LengthKind::Other, 500, [0, 3, 64, 65, 130, 200]);
        let b = LengthSet::from_values(LengthKind::Other, 500, [1, 63, 64, 127, 300, 499]);
        let s = a.sumset(&b);
        let mut naive = BTreeSet::new();
        for x in std::iter::once(0).chain(a.iter()) {
            for y in b.iter() {
                if x + y <= 500 {
                    naive.insert(x + y);
                }
            }
        }
        assert_eq!(s.iter().collect::<BTreeSet<_>>(), naive);
        assert!(!s.has_zero());
    }

    #[test]
    fn dense_sumset_switches_to_targeted_search() {
        let n = 200_000;
        let a = LengthSet::from_values(LengthKind::Other, n, (1..=n).filter(|x| x % 7 != 3));
        let s = a.sumset(&a);
        let naive_first_gaps: Vec<u64> = (1..=n)
            .filter(|&m| !(1..m).any(|x| a.contains(x) && a.contains(m - x)))
            .take(5)
            .collect();
        assert_eq!(s.gaps().take(5).collect::<Vec<_>>(), naive_first_gaps);
    }

    #[test]
    fn sumset_paths_agree() {
        let n = 5000;
        let mut a = LengthSet::from_values(LengthKind::Other, n, (1..=n).filter(|x| x % 3 != 1 && x % 11 != 4));
        let b = LengthSet::from_values(LengthKind::Other, n, (1..=n).filter(|x| x % 5 == 2 || x % 97 == 0));
        for z in [false, true] {
            a.set_zero(z);
            let fast = a.sumset_ntt(&b);
            let slow = a.sumset(&b);
            assert_eq!(fast, slow);
            assert_eq!(a.sumset_ntt(&a), a.sumset(&a));
        }
    }

    #[test]
    fn productset_paths_agree() {
        let n = 30_000;
        let s1 = enumerate_s1(n);
        let dense = LengthSet::from_values(LengthKind::Other, n, (1..=n).filter(|x| x % 5 != 0 || x % 3 == 0));
        let p = s1.productset(&dense);
        for m in 1..=n {
            let naive = s1.iter().any(|a| m % a == 0 && dense.contains(m / a));
            assert_eq!(p.contains(m), naive, "m={m}");
        }
        assert!(p.has_zero());
    }

    #[test]
    fn s2_contains_87_and_has_witnesses() {
        let sup = BaseSupply::restricted();
        let bud = MemoryBudget::default();
        let n = 10_000;
        let s1 = enumerate_s1(n);
        let s2 = build_sk(n, 2, false, &sup, &bud).unwrap();
        assert!(s2.contains(87));
        for m in 1..=n {
            assert_eq!(s2.contains(m), s2_witness(m, &s1).is_some(), "m={m}");
        }
        let (s, t, u) = s2_witness(87, &s1).unwrap();
        assert_eq!(s * (t + u), 87);
    }

    #[test]
    fn chain_and_dense_containment() {
        let bud = MemoryBudget::default();
        let sup = BaseSupply::literature();
        let n = 20_000;
        let s1 = build_sk(n, 1, false, &sup, &bud).unwrap();
        let s2 = build_sk(n, 2, false, &sup, &bud).unwrap();
        let s3 = build_sk(n, 3, false, &sup, &bud).unwrap();
        assert!(s1.is_subset_of(&s2) && s2.is_subset_of(&s3));
        for k in 2..=3 {
            let p = build_sk(n, k, false, &sup, &bud).unwrap();
            let d = build_sk(n, k, true, &sup, &bud).unwrap();
            assert!(p.is_subset_of(&d));
        }
        let p2 = build_sk(10_000, 2, false, &sup, &bud).unwrap();
        let d2 = build_sk(10_000, 2, true, &sup, &bud).unwrap();
        assert!(d2.count() > p2.count());
    }

    #[test]
    fn dense_set_examples() {
        let d = build_dense_sets(5000, &BaseSupply::restricted(), &MemoryBudget::default()).unwrap();
        assert!(d.b.contains(15));
        assert!(d.f.contains(225));
        assert!(d.b.contains(1) && d.b.contains(3));
        assert!(!d.b.contains(19));
        let lit = build_dense_sets(5000, &BaseSupply::literature(), &MemoryBudget::default()).unwrap();
        assert!(lit.b.contains(19));
    }

    #[test]
    fn choose_p_examples() {
        assert_eq!(choose_p(25), 26);
        assert_eq!(choose_p(10_000_000_000_000), 10_000_000_000_000);
        let n = 10_000_000;
        let u = enumerate_under_s(n + 1);
        let top = u.iter().last().unwrap();
        assert_eq!(choose_p(n), top);
    }

    #[test]
    fn budget_is_enforced() {
        let tiny = MemoryBudget::new(1000);
        let r = build_sk(1_000_000, 2, false, &BaseSupply::restricted(), &tiny);
        assert!(matches!(r, Err(GolayError::BudgetExceeded { .. })));
        assert_eq!(parse_bytes("2G"), Some(2 << 30));
        assert_eq!(parse_bytes("512k"), Some(512 << 10));
        assert_eq!(parse_bytes("x"), None);
    }

    #[test]
    fn b_table_small_cases() {
        let bud = MemoryBudget::default();
        let lit = BaseSupply::literature();
        assert_eq!(compute_b_table(4, 0, 2000, &lit, false, &bud).unwrap().b, 546);
        let r = compute_b_table(4, 0, 2000, &BaseSupply::restricted(), false, &bud).unwrap();
        assert_eq!(r.supply, "restricted-B");
        assert!(r.b <= 546);
        assert!(matches!(
            compute_b_table(4, 0, 100, &BaseSupply::restricted(), true, &bud),
            Err(GolayError::CorpusRequired)
        ));
        assert!(compute_b_table(5, 0, 100, &lit, false, &bud).is_err());
    }

    #[test]
    fn gap_and_density_bookkeeping() {
        let s = LengthSet::from_values(LengthKind::Other, 10, [1, 2, 3, 5, 10]);
        assert_eq!(s.first_gap(), Some(4));
        assert_eq!(s.gaps().collect::<Vec<_>>(), vec![4, 6, 7, 8, 9]);
        assert_eq!(density_rows(&s, &[5, 10]), vec![(5, 4, 0.8), (10, 5, 0.5)]);
        assert_eq!(log_samples(100), vec![1, 2, 5, 10, 20, 50, 100]);
        let full = LengthSet::from_values(LengthKind::Other, 130, 1..=130);
        assert_eq!(full.first_gap(), None);
    }
}
