//! Seeded train/validation/test partition by whole sequence.

use mocap_core::data::mix_seed;
use mocap_core::MotionSequence;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::config::SplitFractions;
use crate::error::{Failure, Outcome};

const STREAM_SPLIT: u64 = 0x5B17;

/// Sequence indices of each part, ascending within a part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    /// Shuffles `0..n` with `seed` and cuts it at the rounded fractions;
    /// the test part takes the remainder.
    pub fn new(n: usize, fractions: SplitFractions, seed: u64) -> Outcome<Self> {
        let n_train = (n as f64 * fractions.train).round() as usize;
        let n_val = ((n as f64 * fractions.val).round() as usize).min(n - n_train.min(n));
        if n_train == 0 || n_train > n {
            return Err(Failure::Usage(format!(
                "{n} sequences leave no training data at fraction {}",
                fractions.train
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(mix_seed(seed, STREAM_SPLIT, n as u64)));
        let part = |range: std::ops::Range<usize>| {
            let mut v = order[range].to_vec();
            v.sort_unstable();
            v
        };
        Ok(Self {
            train: part(0..n_train),
            val: part(n_train..n_train + n_val),
            test: part(n_train + n_val..n),
        })
    }

    /// One line per part: name, SHA-256 of its sequence ids, count, ids.
    pub fn manifest(&self, seqs: &[MotionSequence]) -> String {
        let mut s = String::from("part\tsha256\tcount\tids\n");
        for (name, idx) in [("train", &self.train), ("val", &self.val), ("test", &self.test)] {
            let ids: Vec<&str> = idx.iter().map(|&i| seqs[i].id.as_str()).collect();
            s.push_str(&format!("{name}\t{}\t{}\t{}\n", ids_hash(&ids), ids.len(), ids.join(",")));
        }
        s
    }
}

/// SHA-256 over newline-terminated sequence ids.
pub fn ids_hash(ids: &[&str]) -> String {
    let mut h = Sha256::new();
    for id in ids {
        h.update(id.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

/// Reads the `sha256` column of one part from a manifest.
pub fn manifest_hash<'a>(manifest: &'a str, part: &str) -> Option<&'a str> {
    manifest
        .lines()
        .skip(1)
        .map(|l| l.split('\t').collect::<Vec<_>>())
        .find(|f| f.first() == Some(&part))
        .and_then(|f| f.get(1).copied())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_split_is_70_15_15_and_disjoint() {
        let s = Split::new(100, SplitFractions::default(), 3).unwrap();
        assert_eq!((s.train.len(), s.val.len(), s.test.len()), (70, 15, 15));
        let mut all: Vec<usize> = s.train.iter().chain(&s.val).chain(&s.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        assert_eq!(s, Split::new(100, SplitFractions::default(), 3).unwrap());
        assert_ne!(s, Split::new(100, SplitFractions::default(), 4).unwrap());
    }

    #[test]
    fn tiny_sets_still_train() {
        let s = Split::new(3, SplitFractions::default(), 0).unwrap();
        assert_eq!(s.train.len(), 2);
        assert_eq!(s.train.len() + s.val.len() + s.test.len(), 3);
    }
}
