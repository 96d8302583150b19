//! Chooses recipes for requested lengths.

use super::compose::YangRoute;
use super::corpus::BaseCorpus;
use super::plan::{execute_plan, ConstructionPlan, Grouping, PlanNode, YangPart};
use super::seeds::SEED_LENGTHS;
use super::{ConstructionError, GcsSet, Result};
use crate::golay::{
    build_dense_sets, choose_p, is_golay, s2_dense, BaseSupply, DenseSets, GolayError, LengthKind, LengthSet,
    MemoryBudget, TWO_PHASE_SEEDS,
};

/// Pair recipe for a Golay number by recursive Craigen composition over the stored seeds.
pub fn golay_pair_plan(g: u64) -> Option<ConstructionPlan> {
    if g == 0 {
        return Some(ConstructionPlan::trivial(2));
    }
    if SEED_LENGTHS.contains(&(g as usize)) {
        return Some(ConstructionPlan::new(g, 2, PlanNode::Seed { seed: g }));
    }
    if !is_golay(g) {
        return None;
    }
    for s in TWO_PHASE_SEEDS {
        if g % s != 0 {
            continue;
        }
        let m = g / s;
        for t in (1..=m).take_while(|t| t * t <= m).filter(|t| m % t == 0) {
            let u = m / t;
            if !is_golay(t) || !is_golay(u) {
                continue;
            }
            if let (Some(tp), Some(up)) = (golay_pair_plan(t), golay_pair_plan(u)) {
                return Some(ConstructionPlan::new(
                    g,
                    2,
                    PlanNode::Craigen { two_phase: s, t: Box::new(tp), u: Box::new(up) },
                ));
            }
        }
    }
    None
}

/// Radix and verified range for arbitrary-length builds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArbitraryConfig {
    /// Radix; taken from `choose_p(verified_bound)` when absent.
    pub p: Option<u64>,
    /// Range over which digit coverage is enumerated.
    pub verified_bound: u64,
}

impl Default for ArbitraryConfig {
    fn default() -> Self {
        ArbitraryConfig { p: None, verified_bound: 100_000 }
    }
}

/// Length sets over the verified range plus the base sequences they rely on.
pub struct Planner {
    bound: u64,
    p: u64,
    corpus: BaseCorpus,
    s1: LengthSet,
    s1sq: LengthSet,
    dense: DenseSets,
    s2d: LengthSet,
    s3d: LengthSet,
}

impl Planner {
    pub fn new(config: ArbitraryConfig, corpus: Option<BaseCorpus>) -> Result<Self> {
        let bound = config.verified_bound.max(2);
        let p = config.p.unwrap_or_else(|| choose_p(bound));
        if super::plan::split_factor(p).is_none() {
            return Err(ConstructionError::Golay(GolayError::InvalidArgument(format!(
                "radix {p} is not in {{2,10,26}}·S1"
            ))));
        }
        let corpus = corpus.unwrap_or_default();
        let supply = if corpus.is_empty() { BaseSupply::restricted() } else { corpus.supply() };
        let dense = build_dense_sets(bound, &supply, &MemoryBudget::from_env())?;
        let s1 = dense.s1.clone();
        let mut s1sq = s1.productset(&s1);
        s1sq.set_zero(true);
        let s2d = s2_dense(&dense);
        let mut s3d = s1.productset(&s2d.sumset(&s2d)).with_kind(LengthKind::SkD(3));
        s3d.set_zero(true);
        Ok(Planner { bound, p, corpus, s1, s1sq, dense, s2d, s3d })
    }

    pub fn radix(&self) -> u64 {
        self.p
    }

    pub fn verified_bound(&self) -> u64 {
        self.bound
    }

    pub fn corpus(&self) -> &BaseCorpus {
        &self.corpus
    }

    /// Digits below the radix that the sets cover.
    pub fn digit_covered(&self, d: u64) -> bool {
        d < self.p && self.s3d.contains(d)
    }

    fn divisors_in_s1(&self, n: u64) -> impl Iterator<Item = u64> + '_ {
        self.s1.iter().take_while(move |&s| s <= n).filter(move |&s| n % s == 0)
    }

    fn pair(&self, g: u64) -> ConstructionPlan {
        golay_pair_plan(g).expect("members of S1 have pair recipes")
    }

    /// `CBS(b+1, b)` recipe for `x = 2b + 1 ∈ B`.
    fn base_cbs(&self, x: u64) -> Option<ConstructionPlan> {
        if x % 2 == 0 || !self.dense.b.contains(x) {
            return None;
        }
        let b = x / 2;
        let node = if self.s1.contains(b) {
            PlanNode::CbsFromPair { pair: Box::new(self.pair(b)) }
        } else if b == 7 {
            PlanNode::CbsSeed { id: "cbs87".into() }
        } else if self.corpus.get(b).is_some() {
            PlanNode::CbsSeed { id: format!("corpus-b{b}") }
        } else {
            return None;
        };
        Some(ConstructionPlan::new(b + 1, 4, node).with_cbs(b + 1, b))
    }

    /// Intermediate quad of length `e ∈ E`.
    fn e_part(&self, e: u64) -> Option<YangPart> {
        if !self.dense.e.contains(e) {
            return None;
        }
        if let Some(c) = self.base_cbs(e) {
            return Some(YangPart { route: YangRoute::Interleave, cbs: vec![c], pairs: vec![] });
        }
        if e % 2 != 0 {
            return None;
        }
        let h = e / 2;
        // 2·t·(2b+1) from a CBS(b+1, b) and two pairs of length t
        for t in self.divisors_in_s1(h) {
            if let Some(c) = self.base_cbs(h / t) {
                let pt = self.pair(t);
                return Some(YangPart { route: YangRoute::Concat, cbs: vec![c], pairs: vec![pt.clone(), pt] });
            }
        }
        // 2(s1·t1 + s2·t2) from two pairs split into CBS(s1, s2)
        for x in std::iter::once(0).chain(self.s1sq.iter().take_while(|&x| x <= h)) {
            if !self.s1sq.contains(h - x) {
                continue;
            }
            let (s1, t1) = self.factor_s1sq(x);
            let (s2, t2) = self.factor_s1sq(h - x);
            return Some(YangPart {
                route: YangRoute::Concat,
                cbs: vec![self.pair(s1), self.pair(s2)],
                pairs: vec![self.pair(t1), self.pair(t2)],
            });
        }
        if e % 4 == 0 {
            let q = e / 4;
            for t in self.divisors_in_s1(q) {
                if let Some(c) = self.f_cbs(q / t) {
                    let pt = self.pair(t);
                    return Some(YangPart { route: YangRoute::Concat, cbs: vec![c], pairs: vec![pt.clone(), pt] });
                }
            }
        }
        None
    }

    /// `x = s·t` with `s, t ∈ S1`, smallest `s`; `0 ↦ (0, 0)`.
    fn factor_s1sq(&self, x: u64) -> (u64, u64) {
        if x == 0 {
            return (0, 0);
        }
        self.divisors_in_s1(x)
            .find(|&s| self.s1.contains(x / s))
            .map(|s| (s, x / s))
            .expect("member of S1·S1")
    }

    /// `CBS(f, f)` recipe for `f ∈ F`.
    fn f_cbs(&self, f: u64) -> Option<ConstructionPlan> {
        if f == 0 || !self.dense.f.contains(f) {
            return None;
        }
        for e1 in (1..=f).take_while(|x| x * x <= f).filter(|x| f % x == 0) {
            let e2 = f / e1;
            if !self.dense.e.contains(e1) || !self.dense.e.contains(e2) {
                continue;
            }
            if let (Some(p1), Some(p2)) = (self.e_part(e1), self.e_part(e2)) {
                return Some(ConstructionPlan::new(f, 4, PlanNode::Yang { parts: vec![p1, p2] }).with_cbs(f, f));
            }
        }
        None
    }

    /// `CBS(s1, s2)` recipe for `s1 = s2 + 1` or `s1 = s2 ∈ F`.
    pub fn cbs_plan(&self, s1: u64, s2: u64) -> Option<ConstructionPlan> {
        if s1 == s2 + 1 {
            self.base_cbs(s1 + s2)
        } else if s1 == s2 {
            self.f_cbs(s1)
        } else {
            None
        }
    }

    /// Quad of uniform length `n ∈ S2^D`.
    pub fn quad_plan(&self, n: u64) -> Option<ConstructionPlan> {
        if n == 0 || n > self.bound || !self.s2d.contains(n) {
            return None;
        }
        let thm1 = |grouping, s: u64, b: Vec<ConstructionPlan>| {
            ConstructionPlan::new(n, 4, PlanNode::Thm1 { grouping, a: Box::new(self.pair(s)), b })
        };
        for s in self.divisors_in_s1(n) {
            let c = n / s;
            for t in std::iter::once(0).chain(self.s1.iter()).take_while(|&t| 2 * t <= c) {
                if !self.s1.contains(c - t) {
                    continue;
                }
                return Some(if t == 0 {
                    thm1(Grouping::PadEmpty, s, vec![self.pair(c)])
                } else {
                    thm1(Grouping::PairSets, s, vec![self.pair(t), self.pair(c - t)])
                });
            }
        }
        for s in self.divisors_in_s1(n) {
            if let Some(cbs) = self.base_cbs(n / s) {
                return Some(thm1(Grouping::SplitCbs, s, vec![cbs]));
            }
        }
        for s in self.divisors_in_s1(n) {
            let c = n / s;
            if c % 2 == 0 {
                if let Some(cbs) = self.f_cbs(c / 2) {
                    return Some(thm1(Grouping::SplitCbs, s, vec![cbs]));
                }
            }
        }
        self.f_cbs(n)
    }

    /// Quad recipe for `q ∈ S2^D ∪ {0}`.
    fn quad_or_empty(&self, q: u64) -> Option<ConstructionPlan> {
        if q == 0 {
            Some(ConstructionPlan::trivial(4))
        } else {
            self.quad_plan(q)
        }
    }

    /// Octet of uniform length `n = s(q1 + q2)`.
    pub fn octet_plan(&self, n: u64) -> Option<ConstructionPlan> {
        if n == 0 || n > self.bound || !self.s3d.contains(n) {
            return None;
        }
        for s in self.divisors_in_s1(n) {
            let m = n / s;
            for q1 in std::iter::once(0).chain(self.s2d.iter()).take_while(|&q| 2 * q <= m) {
                if !self.s2d.contains(m - q1) {
                    continue;
                }
                let (x, y) = (self.quad_or_empty(q1)?, self.quad_or_empty(m - q1)?);
                let node = if q1 == 0 {
                    PlanNode::Thm1 { grouping: Grouping::PadEmpty, a: Box::new(self.pair(s)), b: vec![y] }
                } else {
                    PlanNode::Thm1 { grouping: Grouping::PairSets, a: Box::new(self.pair(s)), b: vec![x, y] }
                };
                return Some(ConstructionPlan::new(n, 8, node));
            }
        }
        None
    }

    /// Smallest-cardinality recipe for a covered digit.
    pub fn digit_plan(&self, d: u64) -> Option<ConstructionPlan> {
        if d > self.bound {
            return None;
        }
        if self.s1.contains(d) {
            return golay_pair_plan(d);
        }
        self.quad_plan(d).or_else(|| self.octet_plan(d))
    }

    /// Nonzero base-P digits `(position, digit)` of `n`.
    pub fn digits(&self, n: u64) -> Vec<(usize, u64)> {
        let mut out = Vec::new();
        let (mut m, mut pos) = (n, 0);
        while m > 0 {
            if m % self.p != 0 {
                out.push((pos, m % self.p));
            }
            m /= self.p;
            pos += 1;
        }
        out
    }

    /// Recipe for length `n`: per-digit sets scaled by powers of P, then concatenated.
    pub fn plan(&self, n: u64) -> Result<ConstructionPlan> {
        if n == 0 {
            return Err(ConstructionError::Uncovered(0));
        }
        let digits = self.digits(n);
        let mut parts = Vec::with_capacity(digits.len());
        for &(position, digit) in &digits {
            let mut p = self
                .digit_plan(digit)
                .filter(|_| self.digit_covered(digit))
                .ok_or(ConstructionError::DigitNotCovered { position, digit })?;
            for _ in 0..position {
                p = ConstructionPlan::new(p.length * self.p, p.cardinality, PlanNode::Scale {
                    factor: self.p,
                    plan: Box::new(p),
                });
            }
            parts.push(p);
        }
        if parts.len() == 1 {
            return Ok(parts.pop().unwrap());
        }
        let card = parts.iter().map(|p| p.cardinality).max().unwrap();
        let children: Vec<ConstructionPlan> = parts
            .into_iter()
            .map(|mut p| {
                while p.cardinality < card {
                    p = ConstructionPlan::new(p.length, p.cardinality * 2, PlanNode::Thm1 {
                        grouping: Grouping::PadEmpty,
                        a: Box::new(ConstructionPlan::new(1, 2, PlanNode::Seed { seed: 1 })),
                        b: vec![p],
                    });
                }
                p
            })
            .collect();
        let levels = children.len().next_power_of_two().trailing_zeros();
        let plan = ConstructionPlan::new(n, card << levels, PlanNode::Hier { children });
        plan.check()?;
        Ok(plan)
    }
}

/// Plans length `n` without building it.
pub fn plan_arbitrary(n: u64, config: ArbitraryConfig, corpus: Option<BaseCorpus>) -> Result<ConstructionPlan> {
    Planner::new(config, corpus)?.plan(n)
}

/// Plans and builds length `n`; sets above the verification budget come back as derived.
pub fn build_arbitrary(
    n: u64,
    config: ArbitraryConfig,
    corpus: Option<BaseCorpus>,
) -> Result<(ConstructionPlan, GcsSet)> {
    let planner = Planner::new(config, corpus)?;
    let plan = planner.plan(n)?;
    let set = execute_plan(&plan, Some(planner.corpus()))?;
    Ok((plan, set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golay::golay_numbers;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_planner() -> Planner {
        Planner::new(ArbitraryConfig { p: None, verified_bound: 1000 }, None).unwrap()
    }

    #[test]
    fn every_golay_number_has_a_pair_recipe() {
        for g in golay_numbers(100_000) {
            let p = golay_pair_plan(g).unwrap_or_else(|| panic!("no recipe for {g}"));
            assert_eq!(p.length, g);
            p.check().unwrap();
        }
        assert!(golay_pair_plan(9).is_none());
    }

    #[test]
    fn small_pairs_build() {
        for g in golay_numbers(300) {
            let s = execute_plan(&golay_pair_plan(g).unwrap(), None).unwrap();
            assert!(s.is_certified() && s.is_unimodular());
            assert_eq!(s.uniform_len(), Some(g as usize));
        }
    }

    #[test]
    fn radix_from_bound() {
        assert_eq!(small_planner().radix(), 1000);
    }

    #[test]
    fn worked_length_87() {
        let pl = small_planner();
        let p = pl.plan(87).unwrap();
        assert_eq!(p.cardinality, 4);
        let PlanNode::Thm1 { grouping, a, b } = &p.node else { panic!("expected thm1") };
        assert_eq!(*grouping, Grouping::PairSets);
        assert_eq!((a.length, b[0].length, b[1].length), (3, 3, 26));
        let s = execute_plan(&p, None).unwrap();
        assert_eq!(s.verify().unwrap().lag0.re, 348);
    }

    #[test]
    fn quads_and_octets_build() {
        let pl = small_planner();
        let mut quads = 0;
        let mut octets = 0;
        for n in 1..=300u64 {
            let p = pl.digit_plan(n).unwrap_or_else(|| panic!("no plan for {n}"));
            p.check().unwrap();
            let s = execute_plan(&p, None).unwrap();
            assert!(s.is_certified(), "{n}");
            assert_eq!(s.uniform_len(), Some(n as usize));
            match p.cardinality {
                4 => quads += 1,
                8 => octets += 1,
                _ => {}
            }
        }
        assert!(quads > 0 && octets > 0);
    }

    #[test]
    fn dense_routes_build() {
        let pl = small_planner();
        for n in [15u64, 225, 9 * 15, 2 * 225, 90] {
            let c = pl.f_cbs(n).or_else(|| pl.quad_plan(n)).unwrap();
            let s = execute_plan(&c, None).unwrap();
            assert!(s.is_certified() && s.is_unimodular(), "{n}");
        }
    }

    #[test]
    fn two_digits_give_sixteen() {
        let pl = small_planner();
        // 999 is not a quad length, so both digits need octets
        let n = 999 + 7 * 1000;
        let p = pl.plan(n).unwrap();
        assert_eq!(pl.digits(n).len(), 2);
        assert!(p.cardinality <= 16);
        let s = execute_plan(&p, None).unwrap();
        assert!(s.is_certified());
        assert_eq!(s.uniform_len(), Some(n as usize));
    }

    #[test]
    fn random_plans_respect_cardinality_bound() {
        let pl = small_planner();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=1_000_000u64);
            let p = pl.plan(n).unwrap();
            p.check().unwrap();
            let r = pl.digits(n).len() as u32;
            let bound = 1usize << (3 + r.next_power_of_two().trailing_zeros());
            assert!(p.cardinality <= bound, "n={n} card={}", p.cardinality);
            assert_eq!(p.length, n);
            let text = p.to_json();
            assert_eq!(ConstructionPlan::from_json(&text).unwrap(), p);
        }
    }

    #[test]
    fn every_covered_digit_has_a_recipe() {
        let pl = Planner::new(ArbitraryConfig { p: None, verified_bound: 20_000 }, None).unwrap();
        for d in 1..pl.radix() {
            assert!(pl.digit_covered(d));
            let p = pl.digit_plan(d).unwrap_or_else(|| panic!("no recipe for {d}"));
            assert_eq!(p.length, d);
            p.check().unwrap();
        }
    }

    #[test]
    fn cbs_recipes() {
        let pl = small_planner();
        for (s1, s2) in [(2, 1), (8, 7), (11, 10)] {
            let c = execute_plan(&pl.cbs_plan(s1, s2).unwrap(), None).unwrap();
            assert_eq!(c.cbs_shape(), Some((s1 as usize, s2 as usize)));
        }
        assert!(pl.cbs_plan(5, 3).is_none());
        assert!(pl.cbs_plan(10, 9).is_none());
    }

    #[test]
    fn uncovered_digit_is_reported() {
        let pl = Planner::new(ArbitraryConfig { p: Some(1000), verified_bound: 100 }, None).unwrap();
        assert!(matches!(pl.plan(1500), Err(ConstructionError::DigitNotCovered { position: 0, digit: 500 })));
        assert!(Planner::new(ArbitraryConfig { p: Some(7), verified_bound: 100 }, None).is_err());
    }
}
