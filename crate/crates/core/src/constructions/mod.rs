//! Builders for complementary sets and complex base sequences.

mod compose;
mod corpus;
mod plan;
mod planner;
mod seeds;

pub use compose::{
    cbs_from_pair, cbs_from_two_pairs, craigen_compose, pair_sets, pad_empty, prop3_compose, quarter_sequences, split_cbs,
    thm1_compose, yang_combine, yang_compose, YangQuad, YangRoute,
};
pub use corpus::{load_base_corpus, parse_base_corpus, BaseCorpus};
pub use plan::{execute_plan, ConstructionPlan, Grouping, PlanNode, YangPart};
pub use planner::{build_arbitrary, golay_pair_plan, plan_arbitrary, ArbitraryConfig, Planner};
pub use seeds::{cbs_seed_87, seed_pair, trivial_set, SEED_LENGTHS, TWO_PHASE_LENGTHS};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::golay::GolayError;
use crate::seq::{verify_gcs_set, QSeq, SeqError, VerificationReport};

/// Sets with more entries than this are checked structurally instead of verified.
pub const CERTIFY_BUDGET: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("no seed pair of length {0}")]
    UnsupportedSeedLength(usize),
    #[error("input pair is not 2-phase")]
    NotTwoPhase,
    #[error("2-phase input pair is trivial (length {0})")]
    TrivialTwoPhase(usize),
    #[error("quarter sequence entry {index} is not divisible by 4")]
    QuarterScaleViolation { index: usize },
    #[error("grouping ({t}, {u}) does not match member {member} of length {len}")]
    GroupingMismatch { t: usize, u: usize, member: usize, len: usize },
    #[error("set has odd cardinality {0}")]
    OddCardinality(usize),
    #[error("expected a certified pair, got cardinality {card}")]
    NotPair { card: usize },
    #[error("input set is not certified")]
    NotCertified,
    #[error("corpus record {record} (line {line}): {msg}")]
    CorpusParse { record: usize, line: usize, msg: String },
    #[error("corpus record {record} is not a valid CBS: {msg}")]
    CorpusVerificationFailed { record: usize, msg: String },
    #[error("concat route needs t1 = t2 ({t1} vs {t2}) unless the CBS splits into two pairs")]
    RouteConstraintViolated { t1: usize, t2: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("digit {digit} at position {position} is not covered")]
    DigitNotCovered { position: usize, digit: u64 },
    #[error("plan expects length {expected_len} and cardinality {expected_card}, built {len} and {card}")]
    PlanArithmeticMismatch { expected_len: usize, expected_card: usize, len: usize, card: usize },
    #[error("verification failed: {0:?}")]
    VerificationFailed(Box<VerificationReport>),
    #[error("no construction for length {0}")]
    Uncovered(u64),
    #[error("corpus has no CBS({}, {b})", b + 1)]
    MissingCorpusRecord { b: u64 },
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Golay(#[from] GolayError),
}

pub type Result<T> = std::result::Result<T, ConstructionError>;

/// How much is known about a set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certification {
    /// Passed `verify_gcs_set`.
    Verified,
    /// Built from certified inputs but too large to verify within budget.
    Derived,
    Unchecked,
}

/// A list of sequences with a certification status and optional CBS shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcsSet {
    seqs: Vec<QSeq>,
    status: Certification,
    cbs: Option<(usize, usize)>,
}

impl GcsSet {
    /// Wraps sequences without any claim.
    pub fn uncertified(seqs: Vec<QSeq>) -> Self {
        GcsSet { seqs, status: Certification::Unchecked, cbs: None }
    }

    /// Verifies and returns a certified set.
    pub fn certify(seqs: Vec<QSeq>) -> Result<Self> {
        let report = verify_gcs_set(&seqs)?;
        if !report.ok {
            return Err(ConstructionError::VerificationFailed(Box::new(report)));
        }
        Ok(GcsSet { seqs, status: Certification::Verified, cbs: None })
    }

    /// Verifies when the set fits the budget, else marks it as derived.
    pub fn certify_within_budget(seqs: Vec<QSeq>) -> Result<Self> {
        if seqs.iter().map(|s| s.len()).sum::<usize>() <= CERTIFY_BUDGET {
            Self::certify(seqs)
        } else {
            Ok(GcsSet { seqs, status: Certification::Derived, cbs: None })
        }
    }

    /// Verifies as a `CBS(s1, s2)`: members 0,1 of length `s1` and 2,3 of length `s2`.
    pub fn certify_cbs(seqs: Vec<QSeq>) -> Result<Self> {
        if seqs.len() != 4 || seqs[0].len() != seqs[1].len() || seqs[2].len() != seqs[3].len() {
            return Err(ConstructionError::ShapeMismatch("CBS needs lengths (s1, s1, s2, s2)".into()));
        }
        if !seqs.iter().all(|s| s.is_unimodular()) {
            return Err(ConstructionError::ShapeMismatch("CBS entries must be unimodular".into()));
        }
        let shape = (seqs[0].len(), seqs[2].len());
        let mut set = Self::certify(seqs)?;
        set.cbs = Some(shape);
        Ok(set)
    }

    pub fn verify(&self) -> Result<VerificationReport> {
        Ok(verify_gcs_set(&self.seqs)?)
    }

    pub fn seqs(&self) -> &[QSeq] {
        &self.seqs
    }

    pub fn into_seqs(self) -> Vec<QSeq> {
        self.seqs
    }

    pub fn cardinality(&self) -> usize {
        self.seqs.len()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.seqs.iter().map(|s| s.len()).collect()
    }

    /// Length of the longest member.
    pub fn max_len(&self) -> usize {
        self.seqs.iter().map(|s| s.len()).max().unwrap_or(0)
    }

    /// Common member length, if all members agree.
    pub fn uniform_len(&self) -> Option<usize> {
        let n = self.seqs.first().map(|s| s.len()).unwrap_or(0);
        self.seqs.iter().all(|s| s.len() == n).then_some(n)
    }

    /// True only for verified sets.
    pub fn is_certified(&self) -> bool {
        self.status == Certification::Verified
    }

    pub fn certification(&self) -> Certification {
        self.status
    }

    pub fn cbs_shape(&self) -> Option<(usize, usize)> {
        self.cbs
    }

    /// Every member has entries in `{±1, ±i}`.
    pub fn is_unimodular(&self) -> bool {
        self.seqs.iter().all(|s| s.is_unimodular())
    }

    pub fn total_entries(&self) -> usize {
        self.seqs.iter().map(|s| s.len()).sum()
    }

    fn require_certified(&self) -> Result<()> {
        if self.status != Certification::Unchecked {
            Ok(())
        } else {
            Err(ConstructionError::NotCertified)
        }
    }

    fn require_pair(&self) -> Result<usize> {
        self.require_certified()?;
        match (self.cardinality(), self.uniform_len()) {
            (2, Some(n)) => Ok(n),
            (card, _) => Err(ConstructionError::NotPair { card }),
        }
    }
}
