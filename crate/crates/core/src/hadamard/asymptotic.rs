//! Exponent planning for block-circulant Hadamard matrices of order `2^t·m`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{block_circulant_from_perfect, sylvester, HadamardError, PMMatrix};
use crate::constructions::{
    cbs_from_pair, cbs_seed_87, execute_plan, golay_pair_plan, BaseCorpus, ConstructionError, GcsSet,
};
use crate::golay::{build_dense_sets, compute_b_table, is_golay, BaseSupply, GolayError, LengthSet, MemoryBudget};
use crate::signed_perm::{perfect_from_inputs, thm4_sequences, SpError};

/// Largest order [`realize_plan`] builds.
pub const REALIZE_BUDGET: u128 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("m must be odd and positive, got {0}")]
    InvalidTarget(u128),
    #[error("digit {digit} at position {position} needs a witness above the search bound {bound}")]
    ThresholdUnavailable { position: u32, digit: u64, bound: u64 },
    #[error("no witness found for {target} with gamma {gamma}")]
    WitnessMissing { target: u64, gamma: u32 },
    #[error("thresholds give no usable radix")]
    NoRadix,
    #[error("plan check failed: {0}")]
    CheckFailed(String),
    #[error("plan cannot be realized: {0}")]
    NotRealizable(String),
    #[error(transparent)]
    Golay(#[from] GolayError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    SignedPerm(#[from] SpError),
    #[error(transparent)]
    Hadamard(#[from] HadamardError),
}

pub type Result<T> = std::result::Result<T, PlanError>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ThresholdSource {
    /// Published table values, accepted without recomputation.
    Trusted,
    /// Recomputed here; values at the search limit are lower bounds.
    Recomputed { limit: u64, supply: String },
}

/// `b_γ^(i)` for `κ = 2`: every `2^i·b'` with `b' ≤ b` is representable with `γ = 2k + 4d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub b4: Vec<u64>,
    pub b6: Vec<u64>,
    pub b8_0: u64,
    pub source: ThresholdSource,
}

impl Thresholds {
    pub fn trusted() -> Self {
        Thresholds {
            b4: vec![546, 1030, 1030, 1030, 1030],
            b6: vec![436146, 161926498, 11736430180, 313523649186, 1 << 40],
            b8_0: 1 << 44,
            source: ThresholdSource::Trusted,
        }
    }

    /// Recomputes `b_4^(i)`, `b_6^(i)` for `i ≤ i_max` and `b_8^(0)` up to `limit`.
    pub fn recomputed(limit: u64, i_max: u32, supply: &BaseSupply, budget: &MemoryBudget) -> Result<Self> {
        let row = |gamma| {
            (0..=i_max)
                .map(|i| compute_b_table(gamma, i, limit, supply, false, budget).map(|b| b.b))
                .collect::<std::result::Result<Vec<_>, _>>()
        };
        Ok(Thresholds {
            b4: row(4)?,
            b6: row(6)?,
            b8_0: compute_b_table(8, 0, limit, supply, false, budget)?.b,
            source: ThresholdSource::Recomputed { limit, supply: supply.label() },
        })
    }

    /// `(γ_0, i_0, ξ)`: the largest `b_γ^(i)` over `γ ∈ {4, 6}` with `i ≤ ξ`, and
    /// `ξ = ⌊log₂ min(b_{γ_0}^(i_0), b_8^(0))⌋`.
    pub fn radix(&self) -> Option<(u32, u32, u32)> {
        let mut best: Option<(u64, u32, u32, u32)> = None;
        for (gamma, row) in [(4u32, &self.b4), (6, &self.b6)] {
            for (i, &b) in row.iter().enumerate() {
                let m = b.min(self.b8_0);
                if m == 0 {
                    continue;
                }
                let xi = 63 - m.leading_zeros();
                if (i as u32) <= xi && best.is_none_or(|(bb, ..)| b > bb) {
                    best = Some((b, gamma, i as u32, xi));
                }
            }
        }
        best.map(|(_, g, i, xi)| (g, i, xi))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymptoticConfig {
    pub thresholds: Thresholds,
    /// Targets up to this bound get an explicit witness.
    pub witness_bound: u64,
    /// Accept table values above the witness bound.
    pub allow_trusted: bool,
    pub supply: BaseSupply,
}

impl Default for AsymptoticConfig {
    fn default() -> Self {
        AsymptoticConfig {
            thresholds: Thresholds::trusted(),
            witness_bound: 1 << 16,
            allow_trusted: true,
            supply: BaseSupply::restricted(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DigitClaim {
    /// `target = Σ l·m + Σ (s1 + s2)·t` with Golay `l, m, t` and a `CBS(s1, s2)` per triple.
    Witness { pairs: Vec<[u64; 2]>, cbs: Vec<[u64; 3]> },
    /// Covered by the named table threshold.
    Trusted { threshold: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitPlan {
    pub position: u32,
    pub digit: u64,
    pub gamma: u32,
    /// `digit` for position 0, else `digit·2^{i_0}`.
    pub target: u64,
    /// Multiplier lengths are scaled by `2^log2_scale`, giving `digit·P^position`.
    pub log2_scale: u64,
    pub claim: DigitClaim,
}

impl DigitPlan {
    /// `(k, d)` used by the witness, or the budget for the trusted claim.
    pub fn terms(&self) -> (usize, usize) {
        match &self.claim {
            DigitClaim::Witness { pairs, cbs } => (pairs.len(), cbs.len()),
            DigitClaim::Trusted { .. } => (0, 0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymptoticPlan {
    pub m: u128,
    /// `6⌊log₂(m)/40⌋ + 10` scaled to the radix: `γ_0·⌊log₂(m)/ξ⌋ + 10`.
    pub t: u32,
    /// `γ(m) = 8 + γ_0·r`, `r` the number of nonzero digits above position 0.
    pub gamma: u32,
    pub gamma0: u32,
    pub i0: u32,
    pub xi: u32,
    pub digits: Vec<DigitPlan>,
    pub thresholds: ThresholdSource,
}

impl AsymptoticPlan {
    /// Smallest exponent the plan guarantees: `γ(m) + 2`.
    pub fn t_min(&self) -> u32 {
        self.gamma + 2
    }

    pub fn p(&self) -> u128 {
        1u128 << self.xi
    }

    /// Digits reconstruct `m`, witnesses sum to their targets with valid components, and `t_min ≤ t`.
    pub fn check(&self, supply: &BaseSupply) -> Result<()> {
        let fail = |s: String| Err(PlanError::CheckFailed(s));
        let mut total: u128 = 0;
        for d in &self.digits {
            let w = (d.digit as u128)
                .checked_mul(self.p().checked_pow(d.position).unwrap_or(0))
                .ok_or_else(|| PlanError::CheckFailed("digit overflow".into()))?;
            total += w;
            let want_target = if d.position == 0 { d.digit } else { d.digit << self.i0 };
            if d.target != want_target {
                return fail(format!("digit {} has target {}", d.position, d.target));
            }
            if d.position > 0 && d.log2_scale != d.position as u64 * self.xi as u64 - self.i0 as u64 {
                return fail(format!("digit {} has scale 2^{}", d.position, d.log2_scale));
            }
            if let DigitClaim::Witness { pairs, cbs } = &d.claim {
                if 2 * pairs.len() + 4 * cbs.len() > d.gamma as usize {
                    return fail(format!("digit {} uses more than gamma {}", d.position, d.gamma));
                }
                let mut sum: u64 = 0;
                for &[l, m] in pairs {
                    if !is_golay(l) || !is_golay(m) {
                        return fail(format!("pair lengths ({l}, {m}) are not Golay numbers"));
                    }
                    sum += l * m;
                }
                let bound = cbs.iter().map(|c| c[0] + c[1]).max().unwrap_or(0);
                let dense = if cbs.is_empty() {
                    None
                } else {
                    Some(build_dense_sets(bound, supply, &MemoryBudget::unlimited())?)
                };
                for &[s1, s2, t] in cbs {
                    let d = dense.as_ref().expect("built for nonempty cbs");
                    if !is_golay(t) || !cbs_length_ok(&d.b, &d.f, s1, s2) {
                        return fail(format!("CBS term ({s1}, {s2}; {t}) is not available"));
                    }
                    sum += (s1 + s2) * t;
                }
                if sum != d.target {
                    return fail(format!("digit {} witness sums to {sum}, not {}", d.position, d.target));
                }
            }
        }
        if total != self.m {
            return fail(format!("digits reconstruct {total}, not {}", self.m));
        }
        let sum_gamma: u32 = self.digits.iter().map(|d| d.gamma).sum();
        if sum_gamma != self.gamma || self.t_min() > self.t {
            return fail(format!("gamma {} and t {} are inconsistent", self.gamma, self.t));
        }
        Ok(())
    }
}

fn cbs_length_ok(b: &LengthSet, f: &LengthSet, s1: u64, s2: u64) -> bool {
    (s1 == s2 + 1 && b.contains(s1 + s2)) || (s1 == s2 && f.contains(s1))
}

/// Plan with the published thresholds and default witness bound.
pub fn asymptotic_plan(m: u128) -> Result<AsymptoticPlan> {
    asymptotic_plan_with(m, &AsymptoticConfig::default())
}

pub fn asymptotic_plan_with(m: u128, config: &AsymptoticConfig) -> Result<AsymptoticPlan> {
    if m == 0 || m % 2 == 0 {
        return Err(PlanError::InvalidTarget(m));
    }
    let (gamma0, i0, xi) = config.thresholds.radix().ok_or(PlanError::NoRadix)?;
    let mut raw = Vec::new();
    let mut rest = m;
    let mut position = 0u32;
    while rest > 0 {
        let digit = (rest & ((1u128 << xi) - 1)) as u64;
        if digit != 0 {
            raw.push((position, digit));
        }
        rest >>= xi;
        position += 1;
    }
    let q = position - 1;
    let targets: Vec<(u32, u64, u32, u64)> = raw
        .iter()
        .map(|&(position, digit)| {
            if position == 0 {
                (position, digit, 8, digit)
            } else {
                (position, digit, gamma0, digit << i0)
            }
        })
        .collect();
    let need = targets.iter().filter(|t| t.3 <= config.witness_bound).map(|t| t.3).max();
    let search = match need {
        Some(bound) => Some(WitnessSearch::new(bound, &config.supply)?),
        None => None,
    };
    let mut digits = Vec::new();
    for (position, digit, gamma, target) in targets {
        let claim = if target <= config.witness_bound {
            let (pairs, cbs) = search
                .as_ref()
                .and_then(|s| s.find(target, gamma))
                .ok_or(PlanError::WitnessMissing { target, gamma })?;
            DigitClaim::Witness { pairs, cbs }
        } else if config.allow_trusted {
            let threshold = if position == 0 {
                format!("b_8^(0) = {}", config.thresholds.b8_0)
            } else {
                let row = if gamma0 == 4 { &config.thresholds.b4 } else { &config.thresholds.b6 };
                format!("b_{gamma0}^({i0}) = {}", row[i0 as usize])
            };
            DigitClaim::Trusted { threshold }
        } else {
            return Err(PlanError::ThresholdUnavailable { position, digit, bound: config.witness_bound });
        };
        let log2_scale = if position == 0 { 0 } else { position as u64 * xi as u64 - i0 as u64 };
        digits.push(DigitPlan { position, digit, gamma, target, log2_scale, claim });
    }
    let gamma = digits.iter().map(|d| d.gamma).sum();
    let t = gamma0 * q + 10;
    let plan = AsymptoticPlan {
        m,
        t,
        gamma,
        gamma0,
        i0,
        xi,
        digits,
        thresholds: config.thresholds.source.clone(),
    };
    plan.check(&config.supply)?;
    Ok(plan)
}

/// Representable sets for explicit witnesses.
struct WitnessSearch {
    g: LengthSet,
    b: LengthSet,
    f: LengthSet,
    gg: LengthSet,
    ct: LengthSet,
    gg2: LengthSet,
    gg3: LengthSet,
    gg_ct: LengthSet,
    gg2_ct: LengthSet,
    ct2: LengthSet,
}

#[derive(Clone, Copy)]
enum Term {
    Pair,
    Cbs,
}

impl WitnessSearch {
    fn new(bound: u64, supply: &BaseSupply) -> Result<Self> {
        let d = build_dense_sets(bound, supply, &MemoryBudget::from_env())?;
        let mut g = d.s1.clone();
        g.set_zero(false);
        let mut gg = g.productset(&g);
        gg.set_zero(true);
        let mut sums = d.b.clone();
        sums.union_with(&d.f.scaled(2));
        sums.set_zero(false);
        let mut ct = sums.productset(&g);
        ct.set_zero(true);
        let gg2 = gg.sumset(&gg);
        let gg3 = gg2.sumset(&gg);
        let gg_ct = gg.sumset(&ct);
        let gg2_ct = gg2.sumset(&ct);
        let ct2 = ct.sumset(&ct);
        Ok(WitnessSearch { g, b: d.b, f: d.f, gg, ct, gg2, gg3, gg_ct, gg2_ct, ct2 })
    }

    fn set(&self, terms: &[Term]) -> &LengthSet {
        let pairs = terms.iter().filter(|t| matches!(t, Term::Pair)).count();
        match (pairs, terms.len() - pairs) {
            (1, 0) => &self.gg,
            (2, 0) => &self.gg2,
            (3, 0) => &self.gg3,
            (0, 1) => &self.ct,
            (1, 1) => &self.gg_ct,
            (2, 1) => &self.gg2_ct,
            (0, 2) => &self.ct2,
            _ => unreachable!("at most four pair terms or two CBS terms"),
        }
    }

    /// Pair-only decompositions first, then those using CBS terms.
    fn find(&self, target: u64, gamma: u32) -> Option<(Vec<[u64; 2]>, Vec<[u64; 3]>)> {
        use Term::*;
        let options: &[&[Term]] = match gamma {
            4 => &[&[Pair, Pair], &[Cbs]],
            6 => &[&[Pair, Pair, Pair], &[Cbs, Pair]],
            _ => &[&[Pair, Pair, Pair, Pair], &[Cbs, Pair, Pair], &[Cbs, Cbs]],
        };
        options.iter().find_map(|terms| {
            let values = self.split(target, terms)?;
            let mut pairs = Vec::new();
            let mut cbs = Vec::new();
            for (&term, v) in terms.iter().zip(values) {
                if v == 0 {
                    continue;
                }
                match term {
                    Pair => pairs.push(self.pair_factors(v)?),
                    Cbs => cbs.push(self.cbs_factors(v)?),
                }
            }
            Some((pairs, cbs))
        })
    }

    /// Values `x_1, …, x_k` with `x_j` in the set of term `j` summing to `target`.
    fn split(&self, target: u64, terms: &[Term]) -> Option<Vec<u64>> {
        let (first, rest) = terms.split_first()?;
        let own = self.set(&[*first]);
        if rest.is_empty() {
            return own.contains(target).then(|| vec![target]);
        }
        let tail = self.set(rest);
        let mut candidates: Vec<u64> = own.iter().take_while(|&x| x <= target).collect();
        if own.has_zero() && !candidates.contains(&0) {
            candidates.insert(0, 0);
        }
        candidates.iter().rev().find_map(|&x| {
            let r = target - x;
            if !(tail.contains(r) || (r == 0 && tail.has_zero())) {
                return None;
            }
            let mut out = vec![x];
            out.extend(self.split(r, rest)?);
            Some(out)
        })
    }

    fn pair_factors(&self, v: u64) -> Option<[u64; 2]> {
        self.g.iter().take_while(|&l| l * l <= v).filter(|&l| v % l == 0 && self.g.contains(v / l)).last().map(|l| [v / l, l])
    }

    fn cbs_factors(&self, v: u64) -> Option<[u64; 3]> {
        self.g.iter().take_while(|&t| t <= v).filter(|&t| v % t == 0).find_map(|t| {
            let s = v / t;
            if s % 2 == 1 && self.b.contains(s) {
                Some([s / 2 + 1, s / 2, t])
            } else if s % 2 == 0 && self.f.contains(s / 2) {
                Some([s / 2, s / 2, t])
            } else {
                None
            }
        })
    }
}

fn pair_of(len: u64) -> Result<GcsSet> {
    let plan = golay_pair_plan(len).ok_or_else(|| PlanError::NotRealizable(format!("no pair of length {len}")))?;
    Ok(execute_plan(&plan, None)?)
}

fn cbs_of(s1: u64, s2: u64, corpus: Option<&BaseCorpus>) -> Result<GcsSet> {
    if s1 == s2 + 1 {
        if s2 == 7 {
            return Ok(cbs_seed_87());
        }
        if is_golay(s2) {
            return Ok(cbs_from_pair(&pair_of(s2)?)?);
        }
        if let Some(c) = corpus.and_then(|c| c.get(s2)) {
            return Ok(c.clone());
        }
    }
    Err(PlanError::NotRealizable(format!("no stored CBS({s1}, {s2})")))
}

/// Builds the block-circulant matrix of a fully witnessed plan; the order is `2^{2k+4d+2}·m`
/// for the `k` pairs and `d` CBS terms actually used.
pub fn realize_plan(plan: &AsymptoticPlan, corpus: Option<&BaseCorpus>) -> Result<PMMatrix> {
    let mut pairs = Vec::new();
    let mut cbs = Vec::new();
    for d in &plan.digits {
        let DigitClaim::Witness { pairs: ps, cbs: cs } = &d.claim else {
            return Err(PlanError::NotRealizable(format!("digit {} rests on a table threshold", d.position)));
        };
        let scale = 1u64.checked_shl(d.log2_scale as u32).filter(|_| d.log2_scale < 64);
        let scale = scale.ok_or_else(|| PlanError::NotRealizable("multiplier scale overflow".into()))?;
        for &[l, m] in ps {
            pairs.push((pair_of(l)?, pair_of(m * scale)?));
        }
        for &[s1, s2, t] in cs {
            let mult = pair_of(t * scale)?;
            cbs.push((cbs_of(s1, s2, corpus)?, mult.clone(), mult));
        }
    }
    let gamma = 2 * pairs.len() + 4 * cbs.len();
    let order = (plan.m) << (gamma + 2);
    if order > REALIZE_BUDGET {
        return Err(PlanError::NotRealizable(format!("order {order} exceeds {REALIZE_BUDGET}")));
    }
    let out = thm4_sequences(&pairs, &cbs)?;
    let c = perfect_from_inputs(&out)?;
    Ok(block_circulant_from_perfect(&c, &sylvester(gamma as u32))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::verify_hadamard_full;
    use rand::{Rng, SeedableRng};

    #[test]
    fn below_radix_gives_t10() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(40);
        for _ in 0..100 {
            let m = rng.gen_range(0..1u128 << 39) * 2 + 1;
            let p = asymptotic_plan(m).unwrap();
            assert_eq!(p.t, 10);
            assert_eq!(p.digits.len(), 1);
            p.check(&BaseSupply::restricted()).unwrap();
        }
    }

    #[test]
    fn radix_from_table() {
        assert_eq!(Thresholds::trusted().radix(), Some((6, 4, 40)));
    }

    #[test]
    fn large_targets_follow_the_formula() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let m: u128 = rng.gen::<u128>() >> rng.gen_range(0..88) | 1;
            let p = asymptotic_plan(m).unwrap();
            let lg = 127 - m.leading_zeros();
            assert_eq!(p.t, 6 * (lg / 40) + 10, "m = {m}");
            assert!(p.t_min() <= p.t);
        }
        let m = (1u128 << 80) + (3 << 40) + 1;
        let p = asymptotic_plan(m).unwrap();
        assert_eq!((p.gamma, p.t), (8 + 12, 22));
    }

    #[test]
    fn small_witnesses_and_realization() {
        let p = asymptotic_plan(3).unwrap();
        assert!(p.gamma <= 8);
        let DigitClaim::Witness { pairs, cbs } = &p.digits[0].claim else { panic!() };
        let sum: u64 = pairs.iter().map(|[l, m]| l * m).sum::<u64>() + cbs.iter().map(|c| (c[0] + c[1]) * c[2]).sum::<u64>();
        assert_eq!(sum, 3);
        let h = realize_plan(&p, None).unwrap();
        assert!(verify_hadamard_full(&h).ok);
        assert_eq!(h.order() % 3, 0);
    }

    #[test]
    fn every_small_odd_target_has_a_witness() {
        let config = AsymptoticConfig { witness_bound: 2000, ..Default::default() };
        for m in (1..2000u128).step_by(2) {
            let p = asymptotic_plan_with(m, &config).unwrap();
            assert!(matches!(p.digits[0].claim, DigitClaim::Witness { .. }), "m = {m}");
        }
    }

    #[test]
    fn recomputed_thresholds_plan_at_desk_scale() {
        let th = Thresholds::recomputed(4096, 2, &BaseSupply::restricted(), &MemoryBudget::unlimited()).unwrap();
        let (_, i0, xi) = th.radix().unwrap();
        assert!(xi >= 9);
        let config = AsymptoticConfig { thresholds: th, witness_bound: 1 << 16, allow_trusted: false, ..Default::default() };
        let m = (5u128 << (2 * xi)) + (7 << xi) + 9;
        let p = asymptotic_plan_with(m, &config).unwrap();
        assert_eq!(p.digits.len(), 3);
        assert!(p.digits.iter().all(|d| matches!(d.claim, DigitClaim::Witness { .. })));
        assert_eq!(p.digits[1].target, 7 << i0);
        let far = asymptotic_plan_with((1u128 << 60) + 1, &AsymptoticConfig { allow_trusted: false, ..Default::default() });
        assert!(matches!(far, Err(PlanError::ThresholdUnavailable { .. })));
    }

    #[test]
    fn rejects_even_and_serializes() {
        assert_eq!(asymptotic_plan(10), Err(PlanError::InvalidTarget(10)));
        let p = asymptotic_plan(1_000_001).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<AsymptoticPlan>(&s).unwrap(), p);
    }
}
