//! Composition rules that turn smaller complementary sets into larger ones.

use serde::{Deserialize, Serialize};

use super::{seeds::trivial_set, Certification, ConstructionError, GcsSet, Result};
use crate::gauss::GaussInt;
use crate::seq::{verify_gcs_set, QSeq};

fn sum(a: &QSeq, b: &QSeq) -> QSeq {
    a.try_add(b).expect("equal lengths by construction")
}

fn diff(a: &QSeq, b: &QSeq) -> QSeq {
    a.try_sub(b).expect("equal lengths by construction")
}

/// The quarter sequences `p = (a+b+b*-a*)/4`, `q = (a+b-b*+a*)/4` of a nontrivial 2-phase pair.
pub fn quarter_sequences(two_phase: &GcsSet) -> Result<(QSeq, QSeq)> {
    let n = two_phase.require_pair()?;
    let (a, b) = (&two_phase.seqs()[0], &two_phase.seqs()[1]);
    if !a.is_two_phase() || !b.is_two_phase() {
        return Err(ConstructionError::NotTwoPhase);
    }
    if n < 2 {
        return Err(ConstructionError::TrivialTwoPhase(n));
    }
    let plus = sum(a, b);
    let turn = diff(&b.flip_conj(), &a.flip_conj());
    let quarter = |x: QSeq| -> Result<QSeq> {
        x.iter()
            .enumerate()
            .map(|(index, v)| v.div_exact(4).ok_or(ConstructionError::QuarterScaleViolation { index }))
            .collect::<Result<Vec<_>>>()
            .map(QSeq::new)
    };
    Ok((quarter(sum(&plus, &turn))?, quarter(diff(&plus, &turn))?))
}

/// `{x, y} ↦ ({p⊗x + q⊗y}, {q*⊗x − p*⊗y})`.
fn sandwich(p: &QSeq, q: &QSeq, x: &QSeq, y: &QSeq) -> (QSeq, QSeq) {
    (sum(&p.kron(x), &q.kron(y)), diff(&q.flip_conj().kron(x), &p.flip_conj().kron(y)))
}

/// Pair of length `s·t·u` from a 2-phase pair of length `s` and pairs of lengths `t`, `u`.
pub fn craigen_compose(two_phase: &GcsSet, t_pair: &GcsSet, u_pair: &GcsSet) -> Result<GcsSet> {
    let (p, q) = quarter_sequences(two_phase)?;
    t_pair.require_pair()?;
    u_pair.require_pair()?;
    let (c, d) = (&t_pair.seqs()[0], &t_pair.seqs()[1]);
    let (e, f) = (&u_pair.seqs()[0], &u_pair.seqs()[1]);
    let (x, y) = sandwich(&p, &q, c, d);
    let g = sum(&x.kron(e), &y.kron(f));
    let h = diff(&y.flip_conj().kron(e), &x.flip_conj().kron(f));
    GcsSet::certify_within_budget(vec![g, h])
}

/// Interleaves the members of two sets of equal cardinality: `x0, y0, x1, y1, …`.
pub fn pair_sets(x: &GcsSet, y: &GcsSet) -> Result<GcsSet> {
    x.require_certified()?;
    y.require_certified()?;
    if x.cardinality() != y.cardinality() {
        return Err(ConstructionError::ShapeMismatch(format!(
            "cannot interleave sets of cardinality {} and {}",
            x.cardinality(),
            y.cardinality()
        )));
    }
    let seqs = x.seqs().iter().zip(y.seqs()).flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    Ok(GcsSet { seqs, status: weakest(&[x, y]), cbs: None })
}

/// Interleaves a set with the same number of empty sequences.
pub fn pad_empty(x: &GcsSet) -> Result<GcsSet> {
    pair_sets(x, &trivial_set(x.cardinality()))
}

/// Reorders a `CBS(s1, s2)` `{a, b, c, d}` as `{a, c, b, d}`.
pub fn split_cbs(cbs: &GcsSet) -> Result<GcsSet> {
    cbs.require_certified()?;
    if cbs.cbs_shape().is_none() {
        return Err(ConstructionError::ShapeMismatch("not a CBS".into()));
    }
    let s = cbs.seqs();
    Ok(GcsSet {
        seqs: vec![s[0].clone(), s[2].clone(), s[1].clone(), s[3].clone()],
        status: cbs.status,
        cbs: None,
    })
}

fn weakest(sets: &[&GcsSet]) -> Certification {
    if sets.iter().all(|s| s.status == Certification::Verified) {
        Certification::Verified
    } else if sets.iter().all(|s| s.status != Certification::Unchecked) {
        Certification::Derived
    } else {
        Certification::Unchecked
    }
}

fn uniform_even(set: &GcsSet) -> Result<usize> {
    set.require_certified()?;
    if set.cardinality() % 2 != 0 {
        return Err(ConstructionError::OddCardinality(set.cardinality()));
    }
    set.uniform_len()
        .ok_or_else(|| ConstructionError::ShapeMismatch("members must share one length".into()))
}

fn check_grouping(b: &GcsSet, t: usize, u: usize) -> Result<()> {
    b.require_certified()?;
    if b.cardinality() % 2 != 0 {
        return Err(ConstructionError::OddCardinality(b.cardinality()));
    }
    for (member, s) in b.seqs().iter().enumerate() {
        let want = if member % 2 == 0 { t } else { u };
        if s.len() != want {
            return Err(ConstructionError::GroupingMismatch { t, u, member, len: s.len() });
        }
    }
    Ok(())
}

/// `c = a_{2l-1}⊗b'_{2m-1} + a_{2l}⊗b'_{2m}`, `d = a*_{2l}⊗b'_{2m-1} − a*_{2l-1}⊗b'_{2m}` over all `l, m`.
fn sum_product(a: &[QSeq], b_prime: &[QSeq]) -> Vec<QSeq> {
    let mut out = Vec::with_capacity(a.len() * b_prime.len() / 2);
    for al in a.chunks(2) {
        let (a1, a2) = (&al[0], &al[1]);
        let (a1s, a2s) = (a1.flip_conj(), a2.flip_conj());
        for bm in b_prime.chunks(2) {
            let (b1, b2) = (&bm[0], &bm[1]);
            out.push(sum(&a1.kron(b1), &a2.kron(b2)));
            out.push(diff(&a2s.kron(b1), &a1s.kron(b2)));
        }
    }
    out
}

/// Set of cardinality `2LM` and length `s(t+u)` from `A` (`2L` members of length `s`) and
/// `B` (`2M` members, odd positions of length `t`, even positions of length `u`).
pub fn thm1_compose(set_a: &GcsSet, set_b: &GcsSet, grouping: (usize, usize)) -> Result<GcsSet> {
    let (t, u) = grouping;
    uniform_even(set_a)?;
    check_grouping(set_b, t, u)?;
    let b_prime: Vec<QSeq> = set_b
        .seqs()
        .chunks(2)
        .flat_map(|bm| {
            [QSeq::concat(&[&bm[0], &QSeq::zeros(u)]), QSeq::concat(&[&QSeq::zeros(t), &bm[1]])]
        })
        .collect();
    finish(sum_product(set_a.seqs(), &b_prime), &[set_a, set_b])
}

/// Set of cardinality `2LM` and length `s·t·u` from `A` (length `s`), `B` (length `t`) and a
/// nontrivial 2-phase pair of length `u`.
pub fn prop3_compose(set_a: &GcsSet, set_b: &GcsSet, two_phase: &GcsSet) -> Result<GcsSet> {
    let (p, q) = quarter_sequences(two_phase)?;
    uniform_even(set_a)?;
    uniform_even(set_b)?;
    let b_prime: Vec<QSeq> = set_b
        .seqs()
        .chunks(2)
        .flat_map(|bm| {
            let (x, y) = sandwich(&p, &q, &bm[0], &bm[1]);
            [x, y]
        })
        .collect();
    finish(sum_product(set_a.seqs(), &b_prime), &[set_a, set_b])
}

fn finish(seqs: Vec<QSeq>, inputs: &[&GcsSet]) -> Result<GcsSet> {
    if weakest(inputs) == Certification::Unchecked {
        return Err(ConstructionError::NotCertified);
    }
    GcsSet::certify_within_budget(seqs)
}

/// `{a|1, a|−1, b, b}` as a `CBS(g+1, g)` from a pair of length `g`.
pub fn cbs_from_pair(pair: &GcsSet) -> Result<GcsSet> {
    pair.require_pair()?;
    let (a, b) = (&pair.seqs()[0], &pair.seqs()[1]);
    let plus = QSeq::concat(&[a, &QSeq::new(vec![GaussInt::ONE])]);
    let minus = QSeq::concat(&[a, &QSeq::new(vec![GaussInt::NEG_ONE])]);
    GcsSet::certify_cbs(vec![plus, minus, b.clone(), b.clone()])
}

/// A `CBS(s1, s2)` made of two pairs.
pub fn cbs_from_two_pairs(first: &GcsSet, second: &GcsSet) -> Result<GcsSet> {
    first.require_pair()?;
    second.require_pair()?;
    let mut seqs = first.seqs().to_vec();
    seqs.extend_from_slice(second.seqs());
    GcsSet::certify_cbs(seqs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YangRoute {
    Concat,
    Interleave,
}

/// The disjointly supported intermediate `{e, f, g, h}` of equal length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YangQuad {
    pub e: QSeq,
    pub f: QSeq,
    pub g: QSeq,
    pub h: QSeq,
}

impl YangQuad {
    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    pub fn seqs(&self) -> [&QSeq; 4] {
        [&self.e, &self.f, &self.g, &self.h]
    }
}

fn halves_are_pairs(cbs: &GcsSet) -> Result<bool> {
    let s = cbs.seqs();
    Ok(verify_gcs_set(&s[..2])?.ok && verify_gcs_set(&s[2..])?.ok)
}

/// The intermediate quad of a `CBS(s1, s2)`.
///
/// `Concat` takes pairs `{i, j}`, `{k, l}` of lengths `t1`, `t2` and yields length `2(s1·t1 + s2·t2)`;
/// `t1 ≠ t2` is accepted only when the CBS splits into two complementary pairs.
/// `Interleave` requires `s1 = s2 + 1`, takes no pairs and yields length `2·s2 + 1`.
pub fn yang_compose(cbs: &GcsSet, pairs: Option<(&GcsSet, &GcsSet)>, route: YangRoute) -> Result<YangQuad> {
    cbs.require_certified()?;
    let (s1, s2) = cbs
        .cbs_shape()
        .ok_or_else(|| ConstructionError::ShapeMismatch("expected a CBS".into()))?;
    let [a, b, c, d] = cbs.seqs() else { unreachable!("CBS has four members") };
    match (route, pairs) {
        (YangRoute::Interleave, None) => {
            if s1 != s2 + 1 {
                return Err(ConstructionError::ShapeMismatch(format!(
                    "interleave needs CBS(s+1, s), got CBS({s1}, {s2})"
                )));
            }
            let z2 = QSeq::zeros(s2);
            let z1 = QSeq::zeros(s1);
            Ok(YangQuad {
                e: QSeq::interleave(a, &z2)?,
                f: QSeq::interleave(&z1, c)?,
                g: QSeq::interleave(b, &z2)?,
                h: QSeq::interleave(&z1, d)?,
            })
        }
        (YangRoute::Concat, Some((p1, p2))) => {
            let t1 = p1.require_pair()?;
            let t2 = p2.require_pair()?;
            if t1 != t2 && !halves_are_pairs(cbs)? {
                return Err(ConstructionError::RouteConstraintViolated { t1, t2 });
            }
            let (i, j) = (&p1.seqs()[0], &p1.seqs()[1]);
            let (k, l) = (&p2.seqs()[0], &p2.seqs()[1]);
            let z1 = QSeq::zeros(s1 * t1);
            let z2 = QSeq::zeros(s2 * t2);
            Ok(YangQuad {
                e: QSeq::concat(&[&a.kron(i), &z2, &z2, &b.kron(j)]),
                f: QSeq::concat(&[&z1, &c.kron(k), &d.kron(l), &z1]),
                g: QSeq::concat(&[&b.flip_conj().kron(i), &z2, &z2, &a.neg().flip_conj().kron(j)]),
                h: QSeq::concat(&[&z1, &d.flip_conj().kron(k), &c.neg().flip_conj().kron(l), &z1]),
            })
        }
        (YangRoute::Interleave, Some(_)) => {
            Err(ConstructionError::ShapeMismatch("interleave route takes no pairs".into()))
        }
        (YangRoute::Concat, None) => Err(ConstructionError::ShapeMismatch("concat route needs two pairs".into())),
    }
}

/// Combines two intermediates into a `CBS(s, s)` with `s = |q1|·|q2|`.
pub fn yang_combine(q1: &YangQuad, q2: &YangQuad) -> Result<GcsSet> {
    let (e1, f1, g1, h1) = (&q1.e, &q1.f, &q1.g, &q1.h);
    let (e2, f2, g2, h2) = (&q2.e, &q2.f, &q2.g, &q2.h);
    let sum4 = |xs: [QSeq; 4], signs: [bool; 4]| -> QSeq {
        let mut acc = QSeq::zeros(xs[0].len());
        for (x, neg) in xs.iter().zip(signs) {
            acc = if neg { diff(&acc, x) } else { sum(&acc, x) };
        }
        acc
    };
    let fc = |x: &QSeq| x.flip_conj();
    let p = sum4(
        [e1.kron(&fc(f2)), fc(g1).kron(e2), f1.kron(g2), h1.kron(h2)],
        [false, true, false, false],
    );
    let q = sum4(
        [fc(e1).kron(e2), g1.kron(&fc(f2)), f1.kron(&fc(h2)), h1.kron(&fc(g2))],
        [false, false, true, false],
    );
    let r = sum4(
        [fc(f1).kron(e2), h1.kron(f2), e1.kron(&fc(h2)), g1.kron(g2)],
        [false, true, false, false],
    );
    let s = sum4(
        [f1.kron(f2), fc(h1).kron(e2), e1.kron(&fc(g2)), g1.kron(h2)],
        [true, true, false, true],
    );
    let n = p.len();
    let seqs = vec![p, q, r, s];
    if seqs.iter().map(|x| x.len()).sum::<usize>() <= super::CERTIFY_BUDGET {
        GcsSet::certify_cbs(seqs)
    } else {
        Ok(GcsSet { seqs, status: Certification::Derived, cbs: Some((n, n)) })
    }
}

#[cfg(test)]
mod tests {
    use super::super::seeds::{cbs_seed_87, seed_pair};
    use super::*;
    use proptest::prelude::*;

    fn pair(n: usize) -> GcsSet {
        seed_pair(n).unwrap()
    }

    #[test]
    fn quarter_identities() {
        for s in [2, 10, 26] {
            let two = pair(s);
            let (p, q) = quarter_sequences(&two).unwrap();
            let (a, b) = (&two.seqs()[0], &two.seqs()[1]);
            // p + q = (a+b)/2 and p − q = (b*−a*)/2
            assert_eq!(sum(&p, &q).scale(GaussInt::real(2)), sum(a, b));
            assert_eq!(diff(&p, &q).scale(GaussInt::real(2)), diff(&b.flip_conj(), &a.flip_conj()));
            for t in [1, 3, 5] {
                let tp = pair(t);
                let (x, _) = sandwich(&p, &q, &tp.seqs()[0], &tp.seqs()[1]);
                assert!(x.is_polyphase());
            }
        }
    }

    #[test]
    fn quarter_rejections() {
        assert_eq!(quarter_sequences(&pair(3)), Err(ConstructionError::NotTwoPhase));
        assert_eq!(quarter_sequences(&pair(1)), Err(ConstructionError::TrivialTwoPhase(1)));
        let bad = GcsSet::uncertified(vec![QSeq::from_ints(&[1, 1]), QSeq::from_ints(&[1, 1])]);
        assert_eq!(quarter_sequences(&bad), Err(ConstructionError::NotCertified));
    }

    #[test]
    fn craigen_lengths() {
        for (s, t, u) in [(2, 1, 1), (2, 3, 5), (10, 1, 13), (26, 11, 2)] {
            let g = craigen_compose(&pair(s), &pair(t), &pair(u)).unwrap();
            assert!(g.is_certified());
            assert!(g.is_unimodular());
            assert_eq!(g.uniform_len(), Some(s * t * u));
        }
    }

    #[test]
    fn worked_quad_87() {
        let (p3, p26) = (pair(3), pair(26));
        let b = pair_sets(&p3, &p26).unwrap();
        let q = thm1_compose(&pair(3), &b, (3, 26)).unwrap();
        assert!(q.is_certified());
        assert_eq!(q.cardinality(), 4);
        assert_eq!(q.uniform_len(), Some(87));
        assert_eq!(q.verify().unwrap().lag0, GaussInt::real(348));
    }

    #[test]
    fn thm1_with_empty_half() {
        let b = pad_empty(&pair(5)).unwrap();
        let q = thm1_compose(&pair(2), &b, (5, 0)).unwrap();
        assert!(q.is_certified());
        assert_eq!(q.uniform_len(), Some(10));
    }

    #[test]
    fn thm1_grouping_errors() {
        let b = pair_sets(&pair(3), &pair(5)).unwrap();
        assert!(matches!(
            thm1_compose(&pair(2), &b, (5, 3)),
            Err(ConstructionError::GroupingMismatch { member: 0, .. })
        ));
        let odd = GcsSet::certify(vec![QSeq::from_ints(&[1])]).unwrap();
        assert_eq!(thm1_compose(&odd, &b, (3, 5)), Err(ConstructionError::OddCardinality(1)));
    }

    fn direct_quad(a: &GcsSet, p: &GcsSet, r: &GcsSet) -> Vec<QSeq> {
        // c = a1⊗(p1|0) + a2⊗(0|r1), d = a2*⊗(p1|0) − a1*⊗(0|r1), then the same with p2, r2
        let (a1, a2) = (&a.seqs()[0], &a.seqs()[1]);
        let (t, u) = (p.seqs()[0].len(), r.seqs()[0].len());
        let mut out = Vec::new();
        for m in 0..2 {
            let x = QSeq::concat(&[&p.seqs()[m], &QSeq::zeros(u)]);
            let y = QSeq::concat(&[&QSeq::zeros(t), &r.seqs()[m]]);
            let mut c = Vec::new();
            let mut d = Vec::new();
            for i in 0..a1.len() {
                for j in 0..t + u {
                    c.push(a1[i] * x[j] + a2[i] * y[j]);
                    let k = a1.len() - 1 - i;
                    d.push(a2[k].conj() * x[j] - a1[k].conj() * y[j]);
                }
            }
            out.push(QSeq::new(c));
            out.push(QSeq::new(d));
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn thm1_matches_direct_expansion(ai in 0usize..8, pi in 0usize..8, ri in 0usize..8) {
            let lens = [1, 2, 3, 5, 10, 11, 13, 26];
            let (a, p, r) = (pair(lens[ai]), pair(lens[pi]), pair(lens[ri]));
            let b = pair_sets(&p, &r).unwrap();
            let q = thm1_compose(&a, &b, (lens[pi], lens[ri])).unwrap();
            prop_assert!(q.is_certified());
            prop_assert_eq!(q.seqs().to_vec(), direct_quad(&a, &p, &r));
        }
    }

    #[test]
    fn prop3_examples() {
        let r = prop3_compose(&pair(3), &pair(5), &pair(2)).unwrap();
        assert!(r.is_certified() && r.is_unimodular());
        assert_eq!((r.cardinality(), r.uniform_len()), (2, Some(30)));

        let q = thm1_compose(&pair(2), &pair_sets(&pair(3), &pair(5)).unwrap(), (3, 5)).unwrap();
        let octet = thm1_compose(&pair(1), &pair_sets(&q, &q).unwrap(), (16, 16)).unwrap();
        assert_eq!(octet.cardinality(), 8);
        let scaled = prop3_compose(&pair(10), &octet, &pair(2)).unwrap();
        assert!(scaled.is_certified());
        assert_eq!((scaled.cardinality(), scaled.uniform_len()), (8, Some(32 * 20)));
        let big = prop3_compose(&pair(1), &octet, &pair(26)).unwrap();
        assert!(big.is_certified() && big.is_unimodular());
        assert_eq!(big.uniform_len(), Some(32 * 26));
    }

    #[test]
    fn cbs_from_pairs() {
        let c = cbs_from_pair(&pair(1)).unwrap();
        let want: Vec<QSeq> = ["1,1", "1,-1", "1", "1"].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(c.seqs(), &want[..]);
        assert_eq!(c.cbs_shape(), Some((2, 1)));
        for g in [3, 26] {
            let c = cbs_from_pair(&pair(g)).unwrap();
            assert!(c.is_certified());
            assert_eq!(c.cbs_shape(), Some((g + 1, g)));
        }
        assert!(matches!(cbs_from_pair(&cbs_seed_87()), Err(ConstructionError::NotPair { card: 4 })));
    }

    #[test]
    fn interleave_route() {
        let c21 = cbs_from_pair(&pair(1)).unwrap();
        let q = yang_compose(&c21, None, YangRoute::Interleave).unwrap();
        let ints = |s: &str| s.parse::<QSeq>().unwrap();
        assert_eq!(q.e, ints("1,0,1"));
        assert_eq!(q.g, ints("1,0,-1"));
        assert_eq!(q.f, ints("0,1,0"));
        assert_eq!(q.h, ints("0,1,0"));
        let r = yang_combine(&q, &q).unwrap();
        assert_eq!(r.cbs_shape(), Some((9, 9)));
        assert!(r.is_certified() && r.is_unimodular());

        let q87 = yang_compose(&cbs_seed_87(), None, YangRoute::Interleave).unwrap();
        assert_eq!(q87.len(), 15);
        let r = yang_combine(&q87, &q87).unwrap();
        assert_eq!(r.cbs_shape(), Some((225, 225)));
        assert!(r.is_certified() && r.is_unimodular());
    }

    #[test]
    fn concat_route() {
        let c33 = cbs_from_two_pairs(&pair(3), &pair(3)).unwrap();
        let q = yang_compose(&c33, Some((&pair(1), &pair(1))), YangRoute::Concat).unwrap();
        assert_eq!(q.len(), 12);
        assert!(verify_gcs_set(&q.seqs().map(|s| s.clone())).unwrap().ok);
        let r = yang_combine(&q, &q).unwrap();
        assert_eq!(r.cbs_shape(), Some((144, 144)));
        assert!(r.is_unimodular());

        let split = yang_compose(&c33, Some((&pair(2), &pair(5))), YangRoute::Concat).unwrap();
        assert_eq!(split.len(), 2 * (3 * 2 + 3 * 5));
        let q87 = yang_compose(&cbs_seed_87(), Some((&pair(3), &pair(3))), YangRoute::Concat).unwrap();
        assert_eq!(q87.len(), 90);
        let r = yang_combine(&q87, &split).unwrap();
        assert!(r.is_certified() && r.is_unimodular());
        assert_eq!(
            yang_compose(&cbs_seed_87(), Some((&pair(2), &pair(5))), YangRoute::Concat),
            Err(ConstructionError::RouteConstraintViolated { t1: 2, t2: 5 })
        );
    }

    #[test]
    fn concat_with_empty_half() {
        let c30 = cbs_from_two_pairs(&pair(3), &trivial_set(2)).unwrap();
        assert_eq!(c30.cbs_shape(), Some((3, 0)));
        let q = yang_compose(&c30, Some((&pair(1), &pair(2))), YangRoute::Concat).unwrap();
        assert_eq!(q.len(), 6);
        let i = yang_compose(&cbs_from_pair(&pair(1)).unwrap(), None, YangRoute::Interleave).unwrap();
        for (x, y) in [(&q, &i), (&i, &q), (&q, &q)] {
            let r = yang_combine(x, y).unwrap();
            assert!(r.is_certified() && r.is_unimodular());
        }
    }
}
