use std::collections::HashMap;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A Hermite multi-index `β = (β₁,…,βₙ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn level(&self) -> usize {
        self.0.iter().map(|&b| b as usize).sum()
    }

    /// The index with slot `j` shifted by `delta`, if it stays non-negative.
    pub fn shifted(&self, j: usize, delta: i32) -> Option<Self> {
        let v = self.0[j] as i64 + delta as i64;
        if v < 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[j] = v as u32;
        Some(MultiIndex(e))
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Graded-lexicographic enumeration of all `β` with `|β| ≤ L`.
#[derive(Debug, Clone)]
pub struct FiberBasis {
    n: usize,
    max_level: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    level_starts: Vec<usize>,
}

impl PartialEq for FiberBasis {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.max_level == other.max_level
    }
}

impl FiberBasis {
    /// Builds the basis for half-dimension `n` truncated at level `max_level`.
    pub fn new(n: usize, max_level: usize) -> Result<Arc<Self>> {
        if n < 1 {
            return Err(Error::InvalidParameter(format!("fiber half-dimension n = {n} < 1")));
        }
        if max_level < 2 {
            return Err(Error::InvalidParameter(format!(
                "truncation level L = {max_level} < 2"
            )));
        }
        Ok(Arc::new(Self::build(n, max_level)))
    }

    pub(crate) fn build(n: usize, max_level: usize) -> Self {
        let mut indices = Vec::with_capacity(binomial(n + max_level, max_level));
        let mut level_starts = Vec::with_capacity(max_level + 2);
        for level in 0..=max_level {
            level_starts.push(indices.len());
            let mut prefix = Vec::with_capacity(n);
            push_level(n, level, &mut prefix, &mut indices);
        }
        level_starts.push(indices.len());
        let lookup = indices.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        FiberBasis { n, max_level, indices, lookup, level_starts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn multi_index(&self, ordinal: usize) -> &MultiIndex {
        &self.indices[ordinal]
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn ordinal(&self, beta: &MultiIndex) -> Option<usize> {
        self.lookup.get(beta).copied()
    }

    pub fn level_of(&self, ordinal: usize) -> usize {
        self.indices[ordinal].level()
    }

    /// Ordinals of the level-`ℓ` block.
    pub fn level_range(&self, level: usize) -> Result<Range<usize>> {
        if level > self.max_level {
            return Err(Error::LevelOutOfRange { level, max: self.max_level });
        }
        Ok(self.level_starts[level]..self.level_starts[level + 1])
    }

    /// Number of states with level `≤ level` (clamped to the basis).
    pub fn dim_up_to(&self, level: usize) -> usize {
        self.level_starts[level.min(self.max_level) + 1]
    }
}

fn push_level(slots: usize, remaining: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if slots == 1 {
        prefix.push(remaining as u32);
        out.push(MultiIndex(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in 0..=remaining {
        prefix.push(first as u32);
        push_level(slots - 1, remaining - first, prefix, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(FiberBasis::new(1, 8).unwrap().dim(), 9);
        let b = FiberBasis::new(2, 3).unwrap();
        assert_eq!(b.dim(), 10);
        assert_eq!(b.level_range(3).unwrap().len(), 4);
        assert_eq!(b.dim(), binomial(5, 3));
    }

    #[test]
    fn ordering_is_graded_lex() {
        let b = FiberBasis::new(2, 2).unwrap();
        let got: Vec<Vec<u32>> = b.indices().iter().map(|m| m.entries().to_vec()).collect();
        assert_eq!(
            got,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2], vec![1, 1], vec![2, 0]]
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FiberBasis::new(0, 4).is_err());
        assert!(FiberBasis::new(1, 1).is_err());
        assert!(FiberBasis::new(1, 2).unwrap().level_range(3).is_err());
    }

    #[test]
    fn lookup_inverts_enumeration() {
        let b = FiberBasis::new(3, 4).unwrap();
        for (i, beta) in b.indices().iter().enumerate() {
            assert_eq!(b.ordinal(beta), Some(i));
        }
    }
}
