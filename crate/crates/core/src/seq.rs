//! 4-phase sequences, correlations and complementary-set verification.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauss::GaussInt;
use crate::ntt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("sequence {seq} has non-phase entry {value} at index {index}")]
    NotPolyphase { seq: usize, index: usize, value: GaussInt },
}

/// A finite sequence of Gaussian integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QSeq(Vec<GaussInt>);

impl QSeq {
    pub fn new(entries: Vec<GaussInt>) -> Self {
        QSeq(entries)
    }

    pub fn empty() -> Self {
        QSeq(Vec::new())
    }

    pub fn zeros(n: usize) -> Self {
        QSeq(vec![GaussInt::ZERO; n])
    }

    /// Real entries from integers.
    pub fn from_ints(v: &[i64]) -> Self {
        QSeq(v.iter().map(|&x| GaussInt::real(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[GaussInt] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<GaussInt> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GaussInt> {
        self.0.iter()
    }

    /// Every entry in `{0, ±1, ±i}`.
    pub fn is_polyphase(&self) -> bool {
        self.0.iter().all(|x| x.is_phase())
    }

    /// Every entry in `{±1, ±i}`.
    pub fn is_unimodular(&self) -> bool {
        self.0.iter().all(|x| x.is_unit())
    }

    /// Every entry in `{±1}`.
    pub fn is_two_phase(&self) -> bool {
        self.0.iter().all(|x| x.im == 0 && x.re.abs() == 1)
    }

    /// `Σ |a_i|²`.
    pub fn weight(&self) -> i64 {
        self.0.iter().map(|x| x.norm()).sum()
    }

    /// Indices of nonzero entries.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.0[i].is_zero()).collect()
    }

    /// Reversed and conjugated.
    pub fn flip_conj(&self) -> QSeq {
        QSeq(self.0.iter().rev().map(|x| x.conj()).collect())
    }

    pub fn conj(&self) -> QSeq {
        QSeq(self.0.iter().map(|x| x.conj()).collect())
    }

    pub fn reversed(&self) -> QSeq {
        QSeq(self.0.iter().rev().copied().collect())
    }

    pub fn neg(&self) -> QSeq {
        self.scale(GaussInt::NEG_ONE)
    }

    pub fn scale(&self, c: GaussInt) -> QSeq {
        QSeq(self.0.iter().map(|&x| x * c).collect())
    }

    /// `result[i·|b| + j] = a[i]·b[j]`.
    pub fn kron(&self, b: &QSeq) -> QSeq {
        let mut out = Vec::with_capacity(self.len() * b.len());
        for &x in &self.0 {
            out.extend(b.0.iter().map(|&y| x * y));
        }
        QSeq(out)
    }

    /// `[u0, v0, u1, v1, …, u_m]` for `|u| = |v| + 1`.
    pub fn interleave(u: &QSeq, v: &QSeq) -> Result<QSeq, SeqError> {
        if u.len() != v.len() + 1 {
            return Err(SeqError::LengthMismatch { left: u.len(), right: v.len() + 1 });
        }
        let mut out = Vec::with_capacity(u.len() + v.len());
        for i in 0..v.len() {
            out.push(u.0[i]);
            out.push(v.0[i]);
        }
        out.push(u.0[v.len()]);
        Ok(QSeq(out))
    }

    pub fn concat(parts: &[&QSeq]) -> QSeq {
        QSeq(parts.iter().flat_map(|p| p.0.iter().copied()).collect())
    }

    /// Right zero-padding to length `n` (no-op when already longer).
    pub fn padded(&self, n: usize) -> QSeq {
        let mut v = self.0.clone();
        if v.len() < n {
            v.resize(n, GaussInt::ZERO);
        }
        QSeq(v)
    }

    pub fn try_add(&self, o: &QSeq) -> Result<QSeq, SeqError> {
        if self.len() != o.len() {
            return Err(SeqError::LengthMismatch { left: self.len(), right: o.len() });
        }
        Ok(QSeq(self.0.iter().zip(&o.0).map(|(&a, &b)| a + b).collect()))
    }

    pub fn try_sub(&self, o: &QSeq) -> Result<QSeq, SeqError> {
        self.try_add(&o.neg())
    }

    /// Entrywise exact division; `None` if some entry is not divisible.
    pub fn div_exact(&self, d: i64) -> Option<QSeq> {
        self.0.iter().map(|x| x.div_exact(d)).collect::<Option<Vec<_>>>().map(QSeq)
    }
}

impl Index<usize> for QSeq {
    type Output = GaussInt;
    fn index(&self, i: usize) -> &GaussInt {
        &self.0[i]
    }
}

impl From<Vec<GaussInt>> for QSeq {
    fn from(v: Vec<GaussInt>) -> Self {
        QSeq(v)
    }
}

impl fmt::Display for QSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// A malformed entry token with its 1-based column among the comma-separated tokens.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad token `{token}` at position {position}")]
pub struct TokenError {
    pub position: usize,
    pub token: String,
}

/// Parses one of `0`, `1`, `-1`, `i`, `-i` (also `+1`, `+i`).
pub fn parse_token(t: &str) -> Option<GaussInt> {
    Some(match t {
        "0" | "-0" | "+0" => GaussInt::ZERO,
        "1" | "+1" => GaussInt::ONE,
        "-1" => GaussInt::NEG_ONE,
        "i" | "+i" => GaussInt::I,
        "-i" => GaussInt::NEG_I,
        _ => return None,
    })
}

impl std::str::FromStr for QSeq {
    type Err = TokenError;

    /// Comma-separated phase tokens; whitespace is ignored and an empty string is the empty sequence.
    fn from_str(s: &str) -> Result<Self, TokenError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Ok(QSeq::empty());
        }
        compact
            .split(',')
            .enumerate()
            .map(|(k, t)| parse_token(t).ok_or_else(|| TokenError { position: k + 1, token: t.to_string() }))
            .collect::<Result<Vec<_>, _>>()
            .map(QSeq)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CorrMode {
    Aperiodic,
    Periodic,
}

/// Lag-indexed correlation values.
///
/// Aperiodic profiles store lags `1-n..=n-1` (index `τ + n - 1`);
/// periodic profiles store lags `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrProfile {
    pub mode: CorrMode,
    pub n: usize,
    pub values: Vec<GaussInt>,
}

impl CorrProfile {
    /// Value at `lag`; zero outside the stored range.
    pub fn at(&self, lag: i64) -> GaussInt {
        let n = self.n as i64;
        match self.mode {
            CorrMode::Aperiodic => {
                if n == 0 || lag <= -n || lag >= n {
                    GaussInt::ZERO
                } else {
                    self.values[(lag + n - 1) as usize]
                }
            }
            CorrMode::Periodic => {
                if n == 0 {
                    GaussInt::ZERO
                } else {
                    self.values[lag.rem_euclid(n) as usize]
                }
            }
        }
    }

    pub fn first_lag(&self) -> i64 {
        match self.mode {
            CorrMode::Aperiodic => 1 - self.n as i64,
            CorrMode::Periodic => 0,
        }
    }

    pub fn add_assign(&mut self, o: &CorrProfile) -> Result<(), SeqError> {
        if self.mode != o.mode || self.n != o.n {
            return Err(SeqError::LengthMismatch { left: self.n, right: o.n });
        }
        for (x, &y) in self.values.iter_mut().zip(&o.values) {
            *x += y;
        }
        Ok(())
    }
}

/// `R_ab(τ) = Σ a_i conj(b_{i-τ})` with out-of-range entries read as 0.
pub fn aperiodic_at(a: &[GaussInt], b: &[GaussInt], tau: i64) -> GaussInt {
    let mut acc = GaussInt::ZERO;
    if tau >= 0 {
        let t = tau as usize;
        for i in t..a.len() {
            if i - t < b.len() {
                acc += a[i] * b[i - t].conj();
            }
        }
    } else {
        let t = (-tau) as usize;
        for i in 0..a.len() {
            if i + t < b.len() {
                acc += a[i] * b[i + t].conj();
            }
        }
    }
    acc
}

pub fn corr_profile(a: &QSeq, b: &QSeq, mode: CorrMode) -> Result<CorrProfile, SeqError> {
    match mode {
        CorrMode::Aperiodic => {
            let n = a.len().max(b.len());
            let values = (1 - n as i64..n as i64)
                .map(|t| aperiodic_at(a.as_slice(), b.as_slice(), t))
                .collect();
            Ok(CorrProfile { mode, n, values })
        }
        CorrMode::Periodic => {
            if a.len() != b.len() {
                return Err(SeqError::LengthMismatch { left: a.len(), right: b.len() });
            }
            let n = a.len();
            let values = (0..n)
                .map(|t| {
                    let mut acc = GaussInt::ZERO;
                    for i in 0..n {
                        acc += a[i] * b[(i + n - t) % n].conj();
                    }
                    acc
                })
                .collect();
            Ok(CorrProfile { mode, n, values })
        }
    }
}

pub fn auto_profile(a: &QSeq, mode: CorrMode) -> CorrProfile {
    corr_profile(a, a, mode).expect("autocorrelation has matching lengths")
}

/// How a verification was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerifyMethod {
    Direct,
    Ntt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagResidue {
    pub lag: i64,
    pub value: GaussInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub length: usize,
    pub cardinality: usize,
    pub lag0: GaussInt,
    pub expected_lag0: i64,
    /// First failing lag in the order `0, 1, 2, …` with its residue.
    pub failure: Option<LagResidue>,
    pub method: VerifyMethod,
}

/// Above this many entry products a set is verified through the NTT path.
const DIRECT_WORK_LIMIT: usize = 1 << 22;

/// Sum of aperiodic autocorrelations at lags `0..n` over sequences right-padded to `n`.
pub fn sum_aperiodic_nonneg(seqs: &[QSeq]) -> (Vec<GaussInt>, VerifyMethod) {
    let n = seqs.iter().map(|s| s.len()).max().unwrap_or(0);
    let work: usize = seqs.iter().map(|s| s.len() * s.len() / 2).sum();
    if work > DIRECT_WORK_LIMIT && ntt::supports(n) {
        let slices: Vec<&[GaussInt]> = seqs.iter().map(|s| s.as_slice()).collect();
        (ntt::sum_autocorrelations(&slices, n), VerifyMethod::Ntt)
    } else {
        let mut out = vec![GaussInt::ZERO; n];
        for s in seqs {
            let a = s.as_slice();
            for (t, o) in out.iter_mut().enumerate().take(a.len()) {
                *o += aperiodic_at(a, a, t as i64);
            }
        }
        (out, VerifyMethod::Direct)
    }
}

/// Checks the Golay complementary property of a set.
pub fn verify_gcs_set(seqs: &[QSeq]) -> Result<VerificationReport, SeqError> {
    for (k, s) in seqs.iter().enumerate() {
        if let Some(index) = s.iter().position(|x| !x.is_phase()) {
            return Err(SeqError::NotPolyphase { seq: k, index, value: s[index] });
        }
    }
    let expected: i64 = seqs.iter().map(|s| s.weight()).sum();
    let (sums, method) = sum_aperiodic_nonneg(seqs);
    Ok(report_from_sums(seqs, &sums, expected, method))
}

fn report_from_sums(
    seqs: &[QSeq],
    sums: &[GaussInt],
    expected: i64,
    method: VerifyMethod,
) -> VerificationReport {
    let length = sums.len();
    let lag0 = sums.first().copied().unwrap_or(GaussInt::ZERO);
    let mut failure = None;
    if lag0 != GaussInt::real(expected) {
        failure = Some(LagResidue { lag: 0, value: lag0 });
    } else if let Some(t) = (1..length).find(|&t| !sums[t].is_zero()) {
        failure = Some(LagResidue { lag: t as i64, value: sums[t] });
    }
    VerificationReport {
        ok: failure.is_none(),
        length,
        cardinality: seqs.len(),
        lag0,
        expected_lag0: expected,
        failure,
        method,
    }
}

/// Sum of periodic autocorrelations of equal-length sequences.
pub fn sum_periodic(seqs: &[QSeq]) -> Result<Vec<GaussInt>, SeqError> {
    let n = seqs.first().map(|s| s.len()).unwrap_or(0);
    let mut out = vec![GaussInt::ZERO; n];
    for s in seqs {
        if s.len() != n {
            return Err(SeqError::LengthMismatch { left: n, right: s.len() });
        }
        let p = auto_profile(s, CorrMode::Periodic);
        for (o, v) in out.iter_mut().zip(p.values) {
            *o += v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(v: &[i64]) -> QSeq {
        QSeq::from_ints(v)
    }

    fn brute_r(a: &QSeq, tau: i64) -> GaussInt {
        let n = a.len() as i64;
        let mut acc = GaussInt::ZERO;
        for i in 0..n {
            let j = i - tau;
            if (0..n).contains(&j) {
                acc += a[i as usize] * a[j as usize].conj();
            }
        }
        acc
    }

    fn phase_seq(max: usize) -> impl Strategy<Value = QSeq> {
        prop::collection::vec(0u32..5, 0..max).prop_map(|v| {
            QSeq::new(v.into_iter().map(|k| if k == 4 { GaussInt::ZERO } else { GaussInt::unit(k) }).collect())
        })
    }

    #[test]
    fn flip_conj_examples() {
        let a = QSeq::new(vec![GaussInt::ONE, GaussInt::I]);
        assert_eq!(a.flip_conj(), QSeq::new(vec![GaussInt::NEG_I, GaussInt::ONE]));
        assert_eq!(g(&[1]).flip_conj(), g(&[1]));
        assert!(QSeq::empty().flip_conj().is_empty());
    }

    #[test]
    fn profile_examples() {
        let a = g(&[1, 1]);
        let p = auto_profile(&a, CorrMode::Aperiodic);
        assert_eq!(p.values, vec![GaussInt::real(1), GaussInt::real(2), GaussInt::real(1)]);
        let c = auto_profile(&a, CorrMode::Periodic);
        assert_eq!(c.values, vec![GaussInt::real(2), GaussInt::real(2)]);
        assert_eq!(c.at(1), p.at(1) + p.at(-1));
        assert!(corr_profile(&a, &g(&[1]), CorrMode::Periodic).is_err());
    }

    #[test]
    fn kron_and_interleave() {
        let a = g(&[1, -1]);
        let b = QSeq::new(vec![GaussInt::ONE, GaussInt::I]);
        assert_eq!(
            a.kron(&b),
            QSeq::new(vec![GaussInt::ONE, GaussInt::I, GaussInt::NEG_ONE, GaussInt::NEG_I])
        );
        assert_eq!(QSeq::zeros(3).kron(&b), QSeq::zeros(6));
        assert_eq!(QSeq::interleave(&g(&[1, 1]), &g(&[0])).unwrap(), g(&[1, 0, 1]));
        assert_eq!(QSeq::interleave(&g(&[1]), &QSeq::empty()).unwrap(), g(&[1]));
        assert!(QSeq::interleave(&g(&[1]), &g(&[1])).is_err());
    }

    #[test]
    fn interleave_with_zeros_supports_even_positions() {
        let a = g(&[1, -1, 1, 1]);
        let e = QSeq::interleave(&a, &QSeq::zeros(3)).unwrap();
        assert_eq!(e.support(), vec![0, 2, 4, 6]);
    }

    #[test]
    fn token_parsing() {
        let a: QSeq = " 1, -i ,i,-1,0".parse().unwrap();
        assert_eq!(a.to_string(), "1,-i,i,-1,0");
        assert_eq!("".parse::<QSeq>().unwrap(), QSeq::empty());
        let e = "1,2,i".parse::<QSeq>().unwrap_err();
        assert_eq!(e.position, 2);
        assert_eq!(e.token, "2");
    }

    #[test]
    fn verify_small_sets() {
        let r = verify_gcs_set(&[g(&[1, 1]), g(&[1, -1])]).unwrap();
        assert!(r.ok);
        assert_eq!(r.lag0, GaussInt::real(4));
        let r = verify_gcs_set(&[g(&[1, 1]), g(&[1, 1])]).unwrap();
        assert!(!r.ok);
        assert_eq!(r.failure, Some(LagResidue { lag: 1, value: GaussInt::real(2) }));
        let bad = QSeq::new(vec![GaussInt::new(1, 1)]);
        assert!(matches!(verify_gcs_set(&[bad]), Err(SeqError::NotPolyphase { seq: 0, index: 0, .. })));
        assert!(verify_gcs_set(&[]).unwrap().ok);
    }

    #[test]
    fn flip_conj_of_ten_seed_keeps_profile() {
        let a = g(&[1, -1, -1, 1, -1, 1, -1, -1, -1, 1]);
        let f = a.flip_conj();
        assert_eq!(f, a.reversed());
        for t in -9..=9 {
            assert_eq!(brute_r(&f, t), brute_r(&a, t));
        }
    }

    proptest! {
        #[test]
        fn flip_conj_preserves_autocorrelation(a in phase_seq(40)) {
            let f = a.flip_conj();
            prop_assert_eq!(f.flip_conj(), a.clone());
            for t in 1 - a.len() as i64..a.len() as i64 {
                prop_assert_eq!(brute_r(&f, t), brute_r(&a, t));
            }
        }

        #[test]
        fn periodic_is_folded_aperiodic(a in phase_seq(40)) {
            let n = a.len() as i64;
            let ap = auto_profile(&a, CorrMode::Aperiodic);
            let p = auto_profile(&a, CorrMode::Periodic);
            for t in 0..n {
                prop_assert_eq!(p.at(t), ap.at(t) + ap.at(t - n));
            }
        }

        #[test]
        fn aperiodic_lag_symmetry(a in phase_seq(30), b in phase_seq(30)) {
            let ab = corr_profile(&a, &b, CorrMode::Aperiodic).unwrap();
            let ba = corr_profile(&b, &a, CorrMode::Aperiodic).unwrap();
            for t in ab.first_lag()..=-ab.first_lag() {
                prop_assert_eq!(ab.at(t), ba.at(-t).conj());
            }
            let aa = auto_profile(&a, CorrMode::Aperiodic);
            for t in aa.first_lag()..=-aa.first_lag() {
                prop_assert_eq!(aa.at(t), aa.at(-t).conj());
            }
        }

        #[test]
        fn polynomial_product_matches_profile(a in phase_seq(64)) {
            let n = a.len();
            prop_assume!(n > 0);
            let f = a.flip_conj();
            let mut prod = vec![GaussInt::ZERO; 2 * n - 1];
            for i in 0..n {
                for j in 0..n {
                    prod[i + j] += a[i] * f[j];
                }
            }
            let ap = auto_profile(&a, CorrMode::Aperiodic);
            prop_assert_eq!(prod, ap.values);
        }

        #[test]
        fn kron_weight_multiplies(a in phase_seq(20), b in phase_seq(20)) {
            prop_assert_eq!(a.kron(&b).weight(), a.weight() * b.weight());
        }

        #[test]
        fn verification_invariances(k in 0usize..4, u in 0u32..4) {
            let mut set = vec![
                g(&[1, 1, 1, -1, 1, 1, -1, 1]),
                g(&[1, 1, 1, -1, -1, -1, 1, -1]),
                QSeq::new(vec![GaussInt::ONE, GaussInt::ONE, GaussInt::NEG_ONE]),
                QSeq::new(vec![GaussInt::ONE, GaussInt::I, GaussInt::ONE]),
            ];
            let base = verify_gcs_set(&set).unwrap();
            prop_assert!(base.ok);
            set.rotate_left(k);
            prop_assert!(verify_gcs_set(&set).unwrap().ok);
            set[k] = set[k].flip_conj();
            prop_assert!(verify_gcs_set(&set).unwrap().ok);
            set[(k + 1) % 4] = set[(k + 1) % 4].scale(GaussInt::unit(u));
            prop_assert!(verify_gcs_set(&set).unwrap().ok);
        }
    }
}
