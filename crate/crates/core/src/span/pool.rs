//! Candidate control words for a spanning-set search.
//!
//! When the alphabet is small enough every word of length τ is a
//! candidate. Otherwise a seeded stratified sample is drawn: the index
//! space `[0, |U|^τ)` is cut into `cap` equal strata and one word is drawn
//! uniformly from each, which keeps the pool spread over all prefixes.
//! Words are stored in lexicographic order either way.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{ControlWord, Error, Result};

pub const DEFAULT_POOL_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePool {
    alphabet_size: usize,
    tau: usize,
    /// Flat, `tau` entries per word, sorted lexicographically.
    entries: Vec<u32>,
    sampled: bool,
}

impl CandidatePool {
    /// All words when `|U|^τ ≤ cap`, a stratified sample of `cap` words
    /// otherwise.
    pub fn build(alphabet_size: usize, tau: usize, cap: usize, seed: u64) -> Result<Self> {
        if tau == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if alphabet_size == 0 || cap == 0 {
            return Err(Error::Config("empty alphabet or zero pool cap".into()));
        }
        let total = (alphabet_size as u128).checked_pow(tau as u32);
        match total {
            Some(t) if t <= cap as u128 => Ok(Self::full(alphabet_size, tau, t as usize)),
            Some(t) => Ok(Self::sample(alphabet_size, tau, t, cap, seed)),
            None => Err(Error::Unsupported(format!("|U|^tau overflows for |U| = {alphabet_size}, tau = {tau}"))),
        }
    }

    fn full(alphabet_size: usize, tau: usize, total: usize) -> Self {
        let mut entries = Vec::with_capacity(total * tau);
        let mut word = alloc::vec![0u32; tau];
        for _ in 0..total {
            entries.extend_from_slice(&word);
            for k in (0..tau).rev() {
                word[k] += 1;
                if (word[k] as usize) < alphabet_size {
                    break;
                }
                word[k] = 0;
            }
        }
        CandidatePool { alphabet_size, tau, entries, sampled: false }
    }

    fn sample(alphabet_size: usize, tau: usize, total: u128, cap: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut entries = Vec::with_capacity(cap * tau);
        let base = alphabet_size as u128;
        let mut word = alloc::vec![0u32; tau];
        for s in 0..cap as u128 {
            let lo = total * s / cap as u128;
            let hi = total * (s + 1) / cap as u128;
            let mut idx = rng.random_range(lo..hi);
            for k in (0..tau).rev() {
                word[k] = (idx % base) as u32;
                idx /= base;
            }
            entries.extend_from_slice(&word);
        }
        CandidatePool { alphabet_size, tau, entries, sampled: true }
    }

    /// Pool made of given words; sorted and deduplicated.
    pub fn from_words(alphabet_size: usize, tau: usize, words: &[ControlWord]) -> Result<Self> {
        let mut ws: Vec<&ControlWord> = words.iter().collect();
        for w in &ws {
            if w.len() != tau {
                return Err(Error::Config(format!("word of length {} in a pool of horizon {tau}", w.len())));
            }
            if let Some(&u) = w.entries.iter().find(|&&u| u as usize >= alphabet_size) {
                return Err(Error::ControlIndex { index: u as usize, size: alphabet_size });
            }
        }
        ws.sort();
        ws.dedup();
        let entries = ws.iter().flat_map(|w| w.entries.iter().copied()).collect();
        Ok(CandidatePool { alphabet_size, tau, entries, sampled: false })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len() / self.tau
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn is_sampled(&self) -> bool {
        self.sampled
    }

    #[inline]
    pub fn entries(&self, i: usize) -> &[u32] {
        &self.entries[i * self.tau..(i + 1) * self.tau]
    }

    pub fn word(&self, i: usize) -> ControlWord {
        ControlWord::new(self.entries(i).to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_enumeration_is_lexicographic() {
        let p = CandidatePool::build(3, 2, 100, 0).unwrap();
        assert_eq!(p.len(), 9);
        assert!(!p.is_sampled());
        assert_eq!(p.entries(0), [0, 0]);
        assert_eq!(p.entries(5), [1, 2]);
        assert_eq!(p.entries(8), [2, 2]);
    }

    #[test]
    fn sampled_pool_is_sorted_distinct_and_seeded() {
        let p = CandidatePool::build(5, 6, 1000, 7).unwrap();
        assert!(p.is_sampled());
        assert_eq!(p.len(), 1000);
        for i in 1..p.len() {
            assert!(p.entries(i - 1) < p.entries(i));
        }
        assert_eq!(p, CandidatePool::build(5, 6, 1000, 7).unwrap());
        assert_ne!(p, CandidatePool::build(5, 6, 1000, 8).unwrap());
    }

    #[test]
    fn explicit_words_dedup() {
        let w = [ControlWord::new(alloc::vec![1, 0]), ControlWord::new(alloc::vec![0, 1]), ControlWord::new(alloc::vec![1, 0])];
        let p = CandidatePool::from_words(2, 2, &w).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.entries(0), [0, 1]);
    }
}
