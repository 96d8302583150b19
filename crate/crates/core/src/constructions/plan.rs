//! Serializable recipes and their execution.

use serde::{Deserialize, Serialize};

use super::compose::{
    cbs_from_pair, cbs_from_two_pairs, craigen_compose, pad_empty, pair_sets, prop3_compose, split_cbs,
    thm1_compose, yang_combine, yang_compose, YangQuad, YangRoute,
};
use super::corpus::BaseCorpus;
use super::seeds::{cbs_seed_87, seed_pair, trivial_set};
use super::{ConstructionError, GcsSet, Result};
use crate::golay::{is_golay, TWO_PHASE_SEEDS};

/// A recipe node with the length and cardinality it must produce.
///
/// For CBS-valued nodes `length` is the longer member length and `cbs` holds `(s1, s2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstructionPlan {
    pub length: u64,
    pub cardinality: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cbs: Option<[u64; 2]>,
    pub node: PlanNode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    /// `B` interleaves two sets of equal cardinality.
    PairSets,
    /// `B` interleaves one set with empty sequences.
    PadEmpty,
    /// `B` is a reordered CBS.
    SplitCbs,
}

/// One intermediate quad: a CBS (or two pairs forming one) plus the pairs the route consumes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct YangPart {
    pub route: YangRoute,
    pub cbs: Vec<ConstructionPlan>,
    #[serde(default)]
    pub pairs: Vec<ConstructionPlan>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanNode {
    Seed { seed: u64 },
    /// `cardinality` empty sequences.
    Trivial,
    Craigen { two_phase: u64, t: Box<ConstructionPlan>, u: Box<ConstructionPlan> },
    Thm1 { grouping: Grouping, a: Box<ConstructionPlan>, b: Vec<ConstructionPlan> },
    Prop3 { two_phase: u64, a: Box<ConstructionPlan>, b: Box<ConstructionPlan> },
    Yang { parts: Vec<YangPart> },
    CbsSeed { id: String },
    CbsFromPair { pair: Box<ConstructionPlan> },
    /// Multiplies the length by `factor = u·s` with `u ∈ {2, 10, 26}` and `s` a Golay number.
    Scale { factor: u64, plan: Box<ConstructionPlan> },
    /// Concatenation tree over equal-cardinality children, padded to a power of two.
    Hier { children: Vec<ConstructionPlan> },
}

fn mismatch(expected: &ConstructionPlan, len: u64, card: usize) -> ConstructionError {
    ConstructionError::PlanArithmeticMismatch {
        expected_len: expected.length as usize,
        expected_card: expected.cardinality,
        len: len as usize,
        card,
    }
}

/// Splits a scale factor into `(u, s)` with the smallest 2-phase length `u`.
pub fn split_factor(factor: u64) -> Option<(u64, u64)> {
    TWO_PHASE_SEEDS
        .iter()
        .find(|&&u| factor % u == 0 && is_golay(factor / u))
        .map(|&u| (u, factor / u))
}

impl ConstructionPlan {
    pub fn new(length: u64, cardinality: usize, node: PlanNode) -> Self {
        ConstructionPlan { length, cardinality, cbs: None, node }
    }

    pub fn with_cbs(mut self, s1: u64, s2: u64) -> Self {
        self.cbs = Some([s1, s2]);
        self
    }

    pub fn trivial(cardinality: usize) -> Self {
        Self::new(0, cardinality, PlanNode::Trivial)
    }

    /// Total number of nodes.
    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    fn children(&self) -> Vec<&ConstructionPlan> {
        match &self.node {
            PlanNode::Seed { .. } | PlanNode::Trivial | PlanNode::CbsSeed { .. } => vec![],
            PlanNode::Craigen { t, u, .. } => vec![t, u],
            PlanNode::Thm1 { a, b, .. } => std::iter::once(a.as_ref()).chain(b).collect(),
            PlanNode::Prop3 { a, b, .. } => vec![a, b],
            PlanNode::Yang { parts } => parts.iter().flat_map(|p| p.cbs.iter().chain(&p.pairs)).collect(),
            PlanNode::CbsFromPair { pair } => vec![pair],
            PlanNode::Scale { plan, .. } => vec![plan],
            PlanNode::Hier { children } => children.iter().collect(),
        }
    }

    fn shape(&self) -> (u64, usize) {
        (self.length, self.cardinality)
    }

    /// Recomputes length, cardinality and CBS shape bottom-up and compares them with the recorded ones.
    pub fn check(&self) -> Result<()> {
        for c in self.children() {
            c.check()?;
        }
        let (len, card, cbs) = self.derive()?;
        if (len, card) != self.shape() || cbs != self.cbs {
            return Err(mismatch(self, len, card));
        }
        Ok(())
    }

    fn derive(&self) -> Result<(u64, usize, Option<[u64; 2]>)> {
        let bad = |m: &str| ConstructionError::ShapeMismatch(m.to_string());
        Ok(match &self.node {
            PlanNode::Seed { seed } => (*seed, 2, None),
            PlanNode::Trivial => (0, self.cardinality, None),
            PlanNode::Craigen { two_phase, t, u } => {
                if t.cardinality != 2 || u.cardinality != 2 {
                    return Err(bad("craigen takes pairs"));
                }
                (two_phase * t.length * u.length, 2, None)
            }
            PlanNode::Thm1 { grouping, a, b } => {
                let (t, u, m) = match (grouping, b.as_slice()) {
                    (Grouping::PairSets, [x, y]) if x.cardinality == y.cardinality => {
                        (x.length, y.length, x.cardinality)
                    }
                    (Grouping::PadEmpty, [x]) => (x.length, 0, x.cardinality),
                    (Grouping::SplitCbs, [x]) => {
                        let [s1, s2] = x.cbs.ok_or_else(|| bad("split_cbs needs a CBS"))?;
                        (s1, s2, 2)
                    }
                    _ => return Err(bad("thm1 grouping does not match its inputs")),
                };
                (a.length * (t + u), a.cardinality * m, None)
            }
            PlanNode::Prop3 { two_phase, a, b } => (a.length * b.length * two_phase, a.cardinality * b.cardinality / 2, None),
            PlanNode::Yang { parts } => {
                if parts.len() != 2 {
                    return Err(bad("yang combines two parts"));
                }
                let l = part_len(&parts[0])? * part_len(&parts[1])?;
                (l, 4, Some([l, l]))
            }
            PlanNode::CbsSeed { id } => {
                let b = cbs_seed_b(id).ok_or_else(|| bad("unknown CBS seed id"))?;
                (b + 1, 4, Some([b + 1, b]))
            }
            PlanNode::CbsFromPair { pair } => (pair.length + 1, 4, Some([pair.length + 1, pair.length])),
            PlanNode::Scale { factor, plan } => {
                split_factor(*factor).ok_or_else(|| bad("scale factor outside {2,10,26}·S1"))?;
                (plan.length * factor, plan.cardinality, None)
            }
            PlanNode::Hier { children } => {
                let card = children.first().map(|c| c.cardinality).unwrap_or(0);
                if children.is_empty() || children.iter().any(|c| c.cardinality != card) {
                    return Err(bad("hier children need one cardinality"));
                }
                let levels = children.len().next_power_of_two().trailing_zeros();
                (children.iter().map(|c| c.length).sum(), card << levels, None)
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plans serialize")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

fn cbs_seed_b(id: &str) -> Option<u64> {
    if id == "cbs87" {
        return Some(7);
    }
    id.strip_prefix("corpus-b")?.parse().ok()
}

fn part_len(p: &YangPart) -> Result<u64> {
    let bad = |m: &str| ConstructionError::ShapeMismatch(m.to_string());
    let (s1, s2) = match p.cbs.as_slice() {
        [c] => {
            let [s1, s2] = c.cbs.ok_or_else(|| bad("yang part needs a CBS"))?;
            (s1, s2)
        }
        [x, y] if x.cardinality == 2 && y.cardinality == 2 => (x.length, y.length),
        _ => return Err(bad("yang part needs one CBS or two pairs")),
    };
    match (p.route, p.pairs.as_slice()) {
        (YangRoute::Interleave, []) => Ok(s1 + s2),
        (YangRoute::Concat, [i, k]) => Ok(2 * (s1 * i.length + s2 * k.length)),
        _ => Err(bad("yang route does not match its pairs")),
    }
}

/// Builds the set a plan describes, checking every node's shape.
pub fn execute_plan(plan: &ConstructionPlan, corpus: Option<&BaseCorpus>) -> Result<GcsSet> {
    let built = match &plan.node {
        PlanNode::Seed { seed } => seed_pair(*seed as usize)?,
        PlanNode::Trivial => trivial_set(plan.cardinality),
        PlanNode::Craigen { two_phase, t, u } => craigen_compose(
            &seed_pair(*two_phase as usize)?,
            &execute_plan(t, corpus)?,
            &execute_plan(u, corpus)?,
        )?,
        PlanNode::Thm1 { grouping, a, b } => {
            let a = execute_plan(a, corpus)?;
            let parts = b.iter().map(|p| execute_plan(p, corpus)).collect::<Result<Vec<_>>>()?;
            let (set_b, g) = match (grouping, parts.as_slice()) {
                (Grouping::PairSets, [x, y]) => (pair_sets(x, y)?, (x.max_len(), y.max_len())),
                (Grouping::PadEmpty, [x]) => (pad_empty(x)?, (x.max_len(), 0)),
                (Grouping::SplitCbs, [x]) => {
                    let (s1, s2) = x.cbs_shape().ok_or_else(|| ConstructionError::ShapeMismatch("not a CBS".into()))?;
                    (split_cbs(x)?, (s1, s2))
                }
                _ => return Err(ConstructionError::ShapeMismatch("thm1 grouping does not match its inputs".into())),
            };
            thm1_compose(&a, &set_b, g)?
        }
        PlanNode::Prop3 { two_phase, a, b } => prop3_compose(
            &execute_plan(a, corpus)?,
            &execute_plan(b, corpus)?,
            &seed_pair(*two_phase as usize)?,
        )?,
        PlanNode::Yang { parts } => {
            let quads = parts.iter().map(|p| yang_part(p, corpus)).collect::<Result<Vec<_>>>()?;
            match quads.as_slice() {
                [x, y] => yang_combine(x, y)?,
                _ => return Err(ConstructionError::ShapeMismatch("yang combines two parts".into())),
            }
        }
        PlanNode::CbsSeed { id } => match (id.as_str(), cbs_seed_b(id)) {
            ("cbs87", _) => cbs_seed_87(),
            (_, Some(b)) => corpus
                .and_then(|c| c.get(b))
                .cloned()
                .ok_or(ConstructionError::MissingCorpusRecord { b })?,
            _ => return Err(ConstructionError::ShapeMismatch(format!("unknown CBS seed `{id}`"))),
        },
        PlanNode::CbsFromPair { pair } => cbs_from_pair(&execute_plan(pair, corpus)?)?,
        PlanNode::Scale { factor, plan: inner } => {
            let (u, s) = split_factor(*factor).ok_or_else(|| {
                ConstructionError::ShapeMismatch(format!("scale factor {factor} outside {{2,10,26}}·S1"))
            })?;
            let s_pair = super::planner::golay_pair_plan(s).ok_or(ConstructionError::Uncovered(s))?;
            prop3_compose(
                &execute_plan(&s_pair, corpus)?,
                &execute_plan(inner, corpus)?,
                &seed_pair(u as usize)?,
            )?
        }
        PlanNode::Hier { children } => {
            let mut level = children.iter().map(|c| execute_plan(c, corpus)).collect::<Result<Vec<_>>>()?;
            let card = level.first().map(|s| s.cardinality()).unwrap_or(0);
            level.resize_with(level.len().next_power_of_two(), || trivial_set(card));
            let one = seed_pair(1)?;
            while level.len() > 1 {
                level = level
                    .chunks(2)
                    .map(|xy| {
                        let b = pair_sets(&xy[0], &xy[1])?;
                        thm1_compose(&one, &b, (xy[0].max_len(), xy[1].max_len()))
                    })
                    .collect::<Result<Vec<_>>>()?;
            }
            level.pop().expect("hier has children")
        }
    };
    let (len, card) = (built.max_len() as u64, built.cardinality());
    let cbs = built.cbs_shape().map(|(a, b)| [a as u64, b as u64]);
    if (len, card) != plan.shape() || (plan.cbs.is_some() && cbs != plan.cbs) {
        return Err(mismatch(plan, len, card));
    }
    Ok(built)
}

fn yang_part(p: &YangPart, corpus: Option<&BaseCorpus>) -> Result<YangQuad> {
    let cbs = match p.cbs.as_slice() {
        [c] => execute_plan(c, corpus)?,
        [x, y] => cbs_from_two_pairs(&execute_plan(x, corpus)?, &execute_plan(y, corpus)?)?,
        _ => return Err(ConstructionError::ShapeMismatch("yang part needs one CBS or two pairs".into())),
    };
    let pairs = p.pairs.iter().map(|x| execute_plan(x, corpus)).collect::<Result<Vec<_>>>()?;
    match pairs.as_slice() {
        [] => yang_compose(&cbs, None, p.route),
        [i, k] => yang_compose(&cbs, Some((i, k)), p.route),
        _ => Err(ConstructionError::ShapeMismatch("yang route takes zero or two pairs".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed(n: u64) -> ConstructionPlan {
        ConstructionPlan::new(n, 2, PlanNode::Seed { seed: n })
    }

    fn quad87() -> ConstructionPlan {
        ConstructionPlan::new(
            87,
            4,
            PlanNode::Thm1 { grouping: Grouping::PairSets, a: Box::new(seed(3)), b: vec![seed(3), seed(26)] },
        )
    }

    #[test]
    fn quad_plan_executes() {
        let p = quad87();
        p.check().unwrap();
        let s = execute_plan(&p, None).unwrap();
        assert!(s.is_certified());
        assert_eq!(s.uniform_len(), Some(87));
        assert_eq!(p.node_count(), 4);
    }

    #[test]
    fn json_round_trip_and_tags() {
        let interleave = YangPart {
            route: YangRoute::Interleave,
            cbs: vec![ConstructionPlan::new(8, 4, PlanNode::CbsSeed { id: "cbs87".into() }).with_cbs(8, 7)],
            pairs: vec![],
        };
        let p = ConstructionPlan::new(225, 4, PlanNode::Yang { parts: vec![interleave.clone(), interleave] })
            .with_cbs(225, 225);
        p.check().unwrap();
        let text = p.to_json();
        assert!(text.contains("\"kind\": \"yang\"") && text.contains("\"kind\": \"cbs_seed\""));
        assert_eq!(ConstructionPlan::from_json(&text).unwrap(), p);
        let s = execute_plan(&p, None).unwrap();
        assert_eq!(s.cbs_shape(), Some((225, 225)));
    }

    #[test]
    fn wrong_arithmetic_is_rejected() {
        let mut p = quad87();
        p.length = 88;
        assert!(matches!(p.check(), Err(ConstructionError::PlanArithmeticMismatch { .. })));
        assert!(matches!(execute_plan(&p, None), Err(ConstructionError::PlanArithmeticMismatch { .. })));
    }

    #[test]
    fn hier_and_scale() {
        let h = ConstructionPlan::new(
            3 + 5 + 26,
            8,
            PlanNode::Hier { children: vec![seed(3), seed(5), seed(26)] },
        );
        h.check().unwrap();
        let s = execute_plan(&h, None).unwrap();
        assert!(s.is_certified());
        assert_eq!((s.cardinality(), s.uniform_len()), (8, Some(34)));

        let sc = ConstructionPlan::new(3 * 20, 4, PlanNode::Scale { factor: 20, plan: Box::new(quad87()) });
        assert!(sc.check().is_err());
        let sc = ConstructionPlan::new(87 * 20, 4, PlanNode::Scale { factor: 20, plan: Box::new(quad87()) });
        sc.check().unwrap();
        assert!(execute_plan(&sc, None).unwrap().is_certified());
    }

    #[test]
    fn missing_corpus_record() {
        let p = ConstructionPlan::new(10, 4, PlanNode::CbsSeed { id: "corpus-b9".into() }).with_cbs(10, 9);
        assert_eq!(execute_plan(&p, None), Err(ConstructionError::MissingCorpusRecord { b: 9 }));
    }
}
