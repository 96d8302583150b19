//! Verified `CBS(b+1, b)` records loaded from a sequence file.

use std::collections::BTreeMap;
use std::path::Path;

use super::{ConstructionError, GcsSet, Result};
use crate::codec::parse_gcs_records;
use crate::golay::BaseSupply;

/// Base sequences keyed by `b`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BaseCorpus {
    by_b: BTreeMap<u64, GcsSet>,
}

impl BaseCorpus {
    pub fn get(&self, b: u64) -> Option<&GcsSet> {
        self.by_b.get(&b)
    }

    pub fn bs(&self) -> impl Iterator<Item = u64> + '_ {
        self.by_b.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.by_b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_b.is_empty()
    }

    pub fn sets(&self) -> impl Iterator<Item = &GcsSet> {
        self.by_b.values()
    }

    /// Length supply with these records plus the stored `CBS(8, 7)`.
    pub fn supply(&self) -> BaseSupply {
        BaseSupply::corpus(self.bs())
    }
}

/// Parses and verifies every record; the first bad record aborts with its 1-based index.
pub fn parse_base_corpus(text: &str) -> Result<BaseCorpus> {
    let records = parse_gcs_records(text).map_err(|e| ConstructionError::CorpusParse {
        record: 0,
        line: e.line,
        msg: e.msg,
    })?;
    let mut by_b = BTreeMap::new();
    for (k, seqs) in records.into_iter().enumerate() {
        let record = k + 1;
        let bad = |msg: String| ConstructionError::CorpusVerificationFailed { record, msg };
        if seqs.len() != 4 {
            return Err(bad(format!("expected 4 sequences, found {}", seqs.len())));
        }
        let b = seqs[2].len();
        if seqs[0].len() != b + 1 {
            return Err(bad(format!("lengths {:?} are not (b+1, b+1, b, b)", seqs.iter().map(|s| s.len()).collect::<Vec<_>>())));
        }
        let set = GcsSet::certify_cbs(seqs).map_err(|e| bad(e.to_string()))?;
        by_b.insert(b as u64, set);
    }
    Ok(BaseCorpus { by_b })
}

pub fn load_base_corpus(path: &Path) -> Result<BaseCorpus> {
    let text = std::fs::read_to_string(path).map_err(|e| ConstructionError::CorpusParse {
        record: 0,
        line: 0,
        msg: format!("{}: {e}", path.display()),
    })?;
    parse_base_corpus(&text)
}

#[cfg(test)]
mod tests {
    use super::super::{cbs_from_pair, cbs_seed_87, seed_pair};
    use super::*;
    use crate::codec::write_gcs;

    #[test]
    fn loads_and_rejects() {
        let mut text = write_gcs(cbs_from_pair(&seed_pair(1).unwrap()).unwrap().seqs());
        text.push_str(&write_gcs(cbs_seed_87().seqs()));
        let c = parse_base_corpus(&text).unwrap();
        assert_eq!(c.bs().collect::<Vec<_>>(), vec![1, 7]);
        assert_eq!(c.get(1).unwrap().cbs_shape(), Some((2, 1)));

        let mut seqs = cbs_seed_87().into_seqs();
        let mut v = seqs[2].clone().into_vec();
        v[3] = -v[3];
        seqs[2] = v.into();
        let mut bad = write_gcs(cbs_from_pair(&seed_pair(1).unwrap()).unwrap().seqs());
        bad.push_str(&write_gcs(&seqs));
        assert!(matches!(
            parse_base_corpus(&bad),
            Err(ConstructionError::CorpusVerificationFailed { record: 2, .. })
        ));
    }

    #[test]
    fn shipped_corpus_verifies() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/base_corpus.gcs");
        let c = load_base_corpus(&path).unwrap();
        assert_eq!(c.bs().collect::<Vec<_>>(), vec![1, 9, 14, 15, 17]);
        assert!(c.sets().all(|s| s.is_certified()));
    }
}
