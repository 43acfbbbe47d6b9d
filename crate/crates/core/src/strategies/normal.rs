//! Search sequences and normal strategies: fixed open orders followed with the
//! rule that a box already revealed empty is skipped.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::LookMode;
use crate::scalar::Scalar;

/// A fixed open order. Multi-look: length `n k` with every box exactly `k`
/// times. Single-look: a permutation of the boxes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SearchSequence(Vec<usize>);

impl SearchSequence {
    pub fn new(seq: Vec<usize>, n: usize, k: u32, look: LookMode) -> Result<Self> {
        let per_box = match look {
            LookMode::Multi => k as usize,
            LookMode::Single => 1,
        };
        if seq.len() != n * per_box {
            return Err(Error::MalformedSequence(format!(
                "expected length {}, got {}",
                n * per_box,
                seq.len()
            )));
        }
        let mut counts = vec![0usize; n];
        for &b in &seq {
            if b >= n {
                return Err(Error::MalformedSequence(format!("box {} out of range", b + 1)));
            }
            counts[b] += 1;
        }
        if let Some(b) = counts.iter().position(|&c| c != per_box) {
            return Err(Error::MalformedSequence(format!(
                "box {} appears {} times, expected {per_box}",
                b + 1,
                counts[b]
            )));
        }
        Ok(Self(seq))
    }

    /// Builds from 1-based box numbers.
    pub fn from_one_based(seq: &[usize], n: usize, k: u32, look: LookMode) -> Result<Self> {
        if seq.contains(&0) {
            return Err(Error::MalformedSequence("box numbers start at 1".into()));
        }
        Self::new(seq.iter().map(|b| b - 1).collect(), n, k, look)
    }

    pub fn boxes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// How often each box appears among the last `k` entries.
    pub fn ending(&self, n: usize, k: u32) -> Vec<u32> {
        let mut y = vec![0u32; n];
        for &b in &self.0[self.0.len() - k as usize..] {
            y[b] += 1;
        }
        y
    }
}

impl fmt::Display for SearchSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|b| (b + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// A mixture of search sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalStrategy<T> {
    n: usize,
    k: u32,
    look: LookMode,
    mixture: Vec<(SearchSequence, T)>,
}

impl<T: Scalar> NormalStrategy<T> {
    /// Merges duplicate sequences and checks the weights form a distribution.
    pub fn new(n: usize, k: u32, look: LookMode, entries: Vec<(SearchSequence, T)>) -> Result<Self> {
        let mut merged: BTreeMap<SearchSequence, T> = BTreeMap::new();
        let mut total = T::zero();
        for (seq, p) in entries {
            if p < T::zero() {
                return Err(Error::NotADistribution(format!("negative weight on {seq}")));
            }
            total += &p;
            *merged.entry(seq).or_insert_with(T::zero) += &p;
        }
        let tol = if T::EXACT { T::zero() } else { T::from_f64(1e-9) };
        if !total.approx_eq(&T::one(), &tol) {
            return Err(Error::NotADistribution(format!("sequence weights sum to {total}")));
        }
        let mixture = merged.into_iter().filter(|(_, p)| *p > T::zero()).collect();
        Ok(Self { n, k, look, mixture })
    }

    pub fn point(seq: SearchSequence, n: usize, k: u32, look: LookMode) -> Result<Self> {
        Self::new(n, k, look, vec![(seq, T::one())])
    }

    /// `sum_i w_i * s_i` for weights summing to one.
    pub fn combine(parts: Vec<(T, NormalStrategy<T>)>) -> Result<Self> {
        let first = parts.first().ok_or(Error::EmptySupport)?;
        let (n, k, look) = (first.1.n, first.1.k, first.1.look);
        let mut entries = Vec::new();
        for (w, s) in parts {
            for (seq, p) in s.mixture {
                entries.push((seq, w.clone() * p));
            }
        }
        Self::new(n, k, look, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn look(&self) -> LookMode {
        self.look
    }

    pub fn mixture(&self) -> &[(SearchSequence, T)] {
        &self.mixture
    }

    /// Probability that the sequence ends with box `j` (single-ball and
    /// single-look strategies).
    pub fn last_box_distribution(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        for (seq, p) in &self.mixture {
            out[*seq.boxes().last().expect("non-empty")] += p;
        }
        out
    }
}

/// All orderings of `items`, in lexicographic order of positions.
pub(crate) fn permutations<X: Clone>(items: &[X]) -> Vec<Vec<X>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// Every distinct arrangement of the multiset with `k` copies of each of `n`
/// boxes, in lexicographic order.
pub fn all_sequences(n: usize, k: u32) -> Vec<Vec<usize>> {
    fn rec(left: &mut [u32], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, len: usize) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for b in 0..left.len() {
            if left[b] > 0 {
                left[b] -= 1;
                cur.push(b);
                rec(left, cur, out, len);
                cur.pop();
                left[b] += 1;
            }
        }
    }
    let mut left = vec![k; n];
    let mut out = Vec::new();
    rec(&mut left, &mut Vec::new(), &mut out, n * k as usize);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn sequence_validation() {
        assert!(SearchSequence::from_one_based(&[1, 3, 3, 2, 1, 2], 3, 2, LookMode::Multi).is_ok());
        assert!(matches!(
            SearchSequence::from_one_based(&[1, 3, 3, 2, 1, 1], 3, 2, LookMode::Multi),
            Err(Error::MalformedSequence(_))
        ));
        assert!(SearchSequence::from_one_based(&[1, 3, 3], 3, 1, LookMode::Single).is_err());
        assert!(SearchSequence::from_one_based(&[2, 3, 1], 3, 1, LookMode::Single).is_ok());
    }

    #[test]
    fn sequence_counts() {
        assert_eq!(all_sequences(3, 2).len(), 90);
        assert_eq!(all_sequences(2, 3).len(), 20);
        assert_eq!(permutations(&[1, 2, 3, 4]).len(), 24);
    }

    #[test]
    fn duplicates_merge() {
        let s = SearchSequence::new(vec![0, 1], 2, 1, LookMode::Single).unwrap();
        let half = Rational::ratio(1, 2);
        let m = NormalStrategy::new(2, 1, LookMode::Single, vec![(s.clone(), half.clone()), (s, half)]).unwrap();
        assert_eq!(m.mixture().len(), 1);
        assert_eq!(
            m.last_box_distribution(),
            vec![Rational::from_u64(0), Rational::from_u64(1)]
        );
    }
}
