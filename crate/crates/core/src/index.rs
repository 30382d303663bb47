//! Multi-indices and downward-closed index sets in graded-lexicographic order.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    pub fn unit(d: usize, j: usize) -> Self {
        let mut k = vec![0; d];
        k[j] = 1;
        MultiIndex(k)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|k| = Σ k_j`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0[j]
    }

    pub fn plus(&self, j: usize) -> Self {
        let mut k = self.clone();
        k.0[j] += 1;
        k
    }

    pub fn minus(&self, j: usize) -> Option<Self> {
        if self.0[j] == 0 {
            return None;
        }
        let mut k = self.clone();
        k.0[j] -= 1;
        Some(k)
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `Π (1 + k_j)`.
    pub fn hyperbolic_weight(&self) -> u64 {
        self.0.iter().map(|&k| 1 + k as u64).product()
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        self.0.iter().position(|&k| k > 0)
    }

    /// Graded-lexicographic comparison: by `|k|`, then lexicographically.
    pub fn graded_cmp(&self, other: &Self) -> Ordering {
        self.order().cmp(&other.order()).then_with(|| self.0.cmp(&other.0))
    }

    /// All `ν ≤ self`, in graded-lexicographic order.
    pub fn lower_box(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(self.dim())];
        for j in 0..self.dim() {
            let mut next = Vec::with_capacity(out.len() * (self.0[j] as usize + 1));
            for base in &out {
                for v in 0..=self.0[j] {
                    let mut k = base.clone();
                    k.0[j] = v;
                    next.push(k);
                }
            }
            out = next;
        }
        out.sort_by(|a, b| a.graded_cmp(b));
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

const NONE: usize = usize::MAX;

/// A finite downward-closed set of multi-indices in graded-lexicographic
/// order, with neighbour tables for the recurrences.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexSet {
    dim: usize,
    indices: Vec<MultiIndex>,
    lookup: BTreeMap<MultiIndex, usize>,
    // back[i*d + j] = position of k_i − e_j.
    back: Vec<usize>,
}

impl IndexSet {
    /// Sorts and deduplicates; fails unless the result is downward closed.
    pub fn new(dim: usize, indices: impl IntoIterator<Item = MultiIndex>) -> Result<Self> {
        let mut v: Vec<MultiIndex> = indices.into_iter().collect();
        for k in &v {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.dim() });
            }
        }
        v.sort_by(|a, b| a.graded_cmp(b));
        v.dedup();
        let lookup: BTreeMap<MultiIndex, usize> =
            v.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let mut back = vec![NONE; v.len() * dim];
        for (i, k) in v.iter().enumerate() {
            for j in 0..dim {
                if let Some(km) = k.minus(j) {
                    back[i * dim + j] = *lookup.get(&km).ok_or(Error::NotDownwardClosed)?;
                }
            }
        }
        Ok(IndexSet { dim, indices: v, lookup, back })
    }

    /// Smallest downward-closed set containing every given index.
    pub fn closure(dim: usize, indices: impl IntoIterator<Item = MultiIndex>) -> Result<Self> {
        let mut all = BTreeMap::new();
        let mut stack: Vec<MultiIndex> = indices.into_iter().collect();
        while let Some(k) = stack.pop() {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.dim() });
            }
            if all.insert(k.clone(), ()).is_none() {
                for j in 0..dim {
                    if let Some(km) = k.minus(j) {
                        stack.push(km);
                    }
                }
            }
        }
        Self::new(dim, all.into_keys())
    }

    /// `{k : |k| ≤ n}`.
    pub fn total_degree(dim: usize, n: u32) -> Self {
        let mut out = vec![MultiIndex::zero(dim)];
        let mut shell = out.clone();
        for _ in 0..n {
            let mut next = BTreeMap::new();
            for k in &shell {
                for j in 0..dim {
                    next.insert(k.plus(j), ());
                }
            }
            shell = next.into_keys().collect();
            out.extend(shell.iter().cloned());
        }
        Self::new(dim, out).expect("total-degree sets are downward closed")
    }

    /// `{k : Π(1 + k_j) ≤ K}`; empty when `K = 0`.
    pub fn hyperbolic(dim: usize, cap: u64) -> Self {
        let mut out = Vec::new();
        if cap >= 1 {
            let mut cur = vec![0u32; dim];
            hyperbolic_rec(&mut cur, 0, 1, cap, &mut out);
        }
        Self::new(dim, out).expect("hyperbolic sets are downward closed")
    }

    /// The box `{ν ≤ k}`.
    pub fn lower_box(k: &MultiIndex) -> Self {
        Self::new(k.dim(), k.lower_box()).expect("boxes are downward closed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn get(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }

    pub fn position(&self, k: &MultiIndex) -> Option<usize> {
        self.lookup.get(k).copied()
    }

    pub fn contains(&self, k: &MultiIndex) -> bool {
        self.lookup.contains_key(k)
    }

    /// Position of `k_i − e_j`.
    pub fn back(&self, i: usize, j: usize) -> Option<usize> {
        let b = self.back[i * self.dim + j];
        (b != NONE).then_some(b)
    }

    pub fn max_order(&self) -> u32 {
        self.indices.last().map_or(0, |k| k.order())
    }

    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.indices.iter()
    }
}

fn hyperbolic_rec(cur: &mut Vec<u32>, j: usize, weight: u64, cap: u64, out: &mut Vec<MultiIndex>) {
    if j == cur.len() {
        out.push(MultiIndex(cur.clone()));
        return;
    }
    let mut k = 0u32;
    while weight * (1 + k as u64) <= cap {
        cur[j] = k;
        hyperbolic_rec(cur, j + 1, weight * (1 + k as u64), cap, out);
        k += 1;
    }
    cur[j] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperbolic_two_three() {
        let s = IndexSet::hyperbolic(2, 3);
        let want: Vec<MultiIndex> = [[0, 0], [0, 1], [1, 0], [0, 2], [2, 0]]
            .iter()
            .map(|k| MultiIndex(k.to_vec()))
            .collect();
        assert_eq!(s.indices(), &want[..]);
    }

    #[test]
    fn hyperbolic_one_and_zero() {
        assert_eq!(IndexSet::hyperbolic(3, 1).len(), 1);
        assert!(IndexSet::hyperbolic(3, 0).is_empty());
    }

    #[test]
    fn rejects_gaps() {
        let r = IndexSet::new(1, [MultiIndex(vec![0]), MultiIndex(vec![2])]);
        assert!(matches!(r, Err(Error::NotDownwardClosed)));
    }

    #[test]
    fn total_degree_counts() {
        assert_eq!(IndexSet::total_degree(2, 3).len(), 10);
        assert_eq!(IndexSet::total_degree(3, 2).len(), 10);
    }
}
