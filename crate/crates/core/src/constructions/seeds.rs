//! Seed pairs and the length-(8, 7) base sequences.

use super::{Certification, ConstructionError, GcsSet, Result};
use crate::seq::QSeq;

/// Lengths with a stored seed pair.
pub const SEED_LENGTHS: [usize; 8] = [1, 2, 3, 5, 10, 11, 13, 26];

/// Seed lengths whose pair is 2-phase and nontrivial.
pub const TWO_PHASE_LENGTHS: [usize; 3] = [2, 10, 26];

fn seed_text(length: usize) -> Option<(&'static str, &'static str)> {
    Some(match length {
        1 => ("1", "1"),
        2 => ("1,1", "1,-1"),
        3 => ("1,1,-1", "1,i,1"),
        5 => ("i,i,1,-1,1", "i,1,1,i,-1"),
        10 => ("1,-1,-1,1,-1,1,-1,-1,-1,1", "1,-1,-1,-1,-1,-1,-1,1,1,-1"),
        11 => ("1,i,-1,1,-1,i,-i,-1,i,i,1", "1,1,-i,-i,-i,1,1,i,-1,1,-1"),
        13 => ("1,1,1,i,-1,1,1,-i,1,-1,1,-i,i", "1,i,-1,-1,-1,i,-1,1,1,-i,-1,1,-i"),
        26 => (
            "-1,1,-1,-1,1,1,-1,1,1,1,1,-1,-1,-1,-1,-1,-1,-1,1,1,-1,-1,-1,1,-1,1",
            "-1,1,-1,-1,1,1,-1,1,1,1,1,-1,1,-1,1,1,1,1,-1,-1,1,1,1,-1,1,-1",
        ),
        _ => return None,
    })
}

fn parse(s: &str) -> QSeq {
    s.parse().expect("seed tables are well formed")
}

/// The stored pair of the given length, certified.
pub fn seed_pair(length: usize) -> Result<GcsSet> {
    let (a, b) = seed_text(length).ok_or(ConstructionError::UnsupportedSeedLength(length))?;
    GcsSet::certify(vec![parse(a), parse(b)])
}

/// `card` empty sequences.
pub fn trivial_set(card: usize) -> GcsSet {
    GcsSet { seqs: vec![QSeq::empty(); card], status: Certification::Verified, cbs: None }
}

/// The stored `CBS(8, 7)`.
pub fn cbs_seed_87() -> GcsSet {
    GcsSet::certify_cbs(vec![
        parse("-1,1,1,1,1,1,-1,1"),
        parse("1,1,1,-1,-1,1,-1,1"),
        parse("-1,1,1,-1,1,1,1"),
        parse("1,-1,1,1,1,-1,-1"),
    ])
    .expect("stored CBS(8, 7) verifies")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_have_expected_lag0() {
        for n in SEED_LENGTHS {
            let p = seed_pair(n).unwrap();
            assert!(p.is_certified());
            assert_eq!(p.verify().unwrap().expected_lag0, 2 * n as i64);
            assert!(p.is_unimodular());
        }
        for n in TWO_PHASE_LENGTHS {
            assert!(seed_pair(n).unwrap().seqs().iter().all(|s| s.is_two_phase()));
        }
    }

    #[test]
    fn unsupported_length() {
        assert_eq!(seed_pair(4), Err(ConstructionError::UnsupportedSeedLength(4)));
    }

    #[test]
    fn fixed_examples() {
        assert_eq!(seed_pair(2).unwrap().seqs()[1], QSeq::from_ints(&[1, -1]));
        assert_eq!(seed_pair(5).unwrap().seqs()[0].to_string(), "i,i,1,-1,1");
        let c = cbs_seed_87();
        assert_eq!(c.cbs_shape(), Some((8, 7)));
        assert_eq!(c.verify().unwrap().lag0.re, 30);
    }
}
