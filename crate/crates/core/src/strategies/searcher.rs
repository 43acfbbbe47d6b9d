//! Searcher strategy constructors and their mixing weights.

use super::normal::{permutations, NormalStrategy, SearchSequence};
use super::SearcherPolicy;
use crate::error::{Error, Result};
use crate::model::{canonicalize, enumerate_allocations, Allocation, CostVector, LookMode};
use crate::scalar::Scalar;
use crate::symfun::{SymKind, SymTable};
use crate::values::{cutoff_b_multi_n2, cutoff_b_single};

/// `p_j = lambda (k' + 1 - j)` for `j = 1..=k'`, with `lambda = 2 / (k'(k'+1))`.
/// Entry `j - 1` holds `p_j`.
pub fn equal_cost_commit_probs<T: Scalar>(balls_left: u32) -> Vec<T> {
    let k = balls_left as u64;
    (1..=k).map(|j| T::ratio(2 * (k + 1 - j), k * (k + 1))).collect()
}

/// `q_k(j) = 1 - k c1^{k-j} c2^j / T_k([2])`: probability of opening box 1
/// at most `j` times before switching, for `j = 0..=k`. Sums to one; all
/// entries are non-negative when `q_k(0) >= 0`.
pub fn n2_cost_weights<T: Scalar>(c1: &T, c2: &T, k: u32) -> Vec<T> {
    let costs = CostVector::new(vec![c1.clone(), c2.clone()]).expect("positive costs");
    let t = SymTable::new(&costs, k as usize, SymKind::Complete).full(k as i64);
    let kk = T::from_u64(k as u64);
    (0..=k)
        .map(|j| T::one() - kk.clone() * c1.powi(k - j) * c2.powi(j) / t.clone())
        .collect()
}

/// Probability of opening the last box of `[m]` for up to `s` balls when
/// `k` balls are sought in boxes `1..=m`, for `s = 0..=k`. Requires `m >= 2`.
pub fn multi_regret_column_weights<T: Scalar>(t: &SymTable<T>, m: usize, k: u32) -> Vec<T> {
    let k = k as i64;
    let ratio = |j: i64| t.get(j, m) / t.get(j + 1, m - 1);
    let norm = ratio(k);
    (0..=k)
        .map(|s| {
            let hi = ratio(k - s);
            let lo = if k - s - 1 < 0 { T::zero() } else { ratio(k - s - 1) };
            (hi - lo) / norm.clone()
        })
        .collect()
}

/// `q_n(j) = 1 - (n - 1) (1/c_j) / sum_i 1/c_i`: probability that box `j` is
/// left for last in the single-look game with `n - 1` balls.
pub fn single_last_box_probs<T: Scalar>(costs: &CostVector<T>) -> Vec<T> {
    let n = costs.len();
    let mut inv_sum = T::zero();
    for c in costs.as_slice() {
        inv_sum += &(T::one() / c.clone());
    }
    costs
        .as_slice()
        .iter()
        .map(|c| T::one() - T::from_u64(n as u64 - 1) / c.clone() / inv_sum.clone())
        .collect()
}

pub fn searcher_uniform_adaptive<T: Scalar>() -> SearcherPolicy<T> {
    SearcherPolicy::UniformAdaptive
}

/// Optimal for equal costs in the multi-look cost game.
pub fn searcher_equal_cost<T: Scalar>(n: usize, k: u32) -> Result<SearcherPolicy<T>> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidInstance("need n >= 1 and k >= 1".into()));
    }
    Ok(SearcherPolicy::EqualCost)
}

/// Two-box multi-look cost game with `c1 >= c2`.
pub fn searcher_n2_cost<T: Scalar>(c1: &T, c2: &T, k: u32) -> Result<SearcherPolicy<T>> {
    let cut = cutoff_b_multi_n2(c1, c2, k)?;
    let q = n2_cost_weights(c1, c2, cut.b);
    if let Some(bad) = q.iter().find(|p| p.definitely_less(&T::zero())) {
        return Err(Error::NotADistribution(format!("negative mixing weight {bad}")));
    }
    Ok(SearcherPolicy::N2Cost {
        set_aside: k - cut.b,
        q,
    })
}

/// [`searcher_n2_cost`] for two costs in either order.
pub fn searcher_n2_cost_any<T: Scalar>(costs: &CostVector<T>, k: u32) -> Result<SearcherPolicy<T>> {
    if costs.len() != 2 {
        return Err(Error::InvalidInstance(
            "two-box strategy needs exactly two boxes".into(),
        ));
    }
    let (sorted, perm) = canonicalize(costs);
    Ok(searcher_n2_cost(sorted.get(0), sorted.get(1), k)?.relabeled(perm))
}

/// Recursive regret search: open the last box for up to `s` balls, then
/// search the remaining boxes for the rest.
pub fn searcher_multi_regret<T: Scalar>(costs: &CostVector<T>, k: u32) -> SearcherPolicy<T> {
    let n = costs.len();
    let t = SymTable::new(costs, k as usize + 1, SymKind::Complete);
    let draws = (0..=n)
        .map(|m| {
            (0..=k)
                .map(|quota| {
                    if m >= 2 {
                        multi_regret_column_weights(&t, m, quota)
                    } else {
                        let mut point = vec![T::zero(); quota as usize + 1];
                        point[quota as usize] = T::one();
                        point
                    }
                })
                .collect()
        })
        .collect();
    SearcherPolicy::MultiRegret { draws }
}

/// One ball: end at box `j` with probability `c_j / sum c`, the other boxes
/// in uniformly random order before it.
pub fn searcher_normal_k1<T: Scalar>(costs: &CostVector<T>, look: LookMode) -> Result<NormalStrategy<T>> {
    let n = costs.len();
    let total = costs.total();
    let mut parts = Vec::with_capacity(n);
    for j in 0..n {
        parts.push((costs.get(j).clone() / total.clone(), normal_ending_at(n, j, look)?));
    }
    NormalStrategy::combine(parts)
}

/// Uniform over the `(n-1)!` single-ball sequences ending with box `j`.
pub fn normal_ending_at<T: Scalar>(n: usize, j: usize, look: LookMode) -> Result<NormalStrategy<T>> {
    let others: Vec<usize> = (0..n).filter(|&i| i != j).collect();
    let perms = permutations(&others);
    let p = T::ratio(1, perms.len() as u64);
    let entries = perms
        .into_iter()
        .map(|mut s| {
            s.push(j);
            Ok((SearchSequence::new(s, n, 1, look)?, p.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    NormalStrategy::new(n, 1, look, entries)
}

/// The two-ball normal strategy that ends with pattern `y`.
///
/// `y = 2 e_i`: the other boxes in random order, each opened twice in a row,
/// then `i, i`. `y = e_i + e_j`: with probability 1/3 each,
/// `sigma(others) sigma(all)`, `i sigma(pairs of others) j` or
/// `j sigma(pairs of others) i`, followed by `i, j`.
pub fn normal_pattern_k2<T: Scalar>(n: usize, y: &Allocation) -> Result<NormalStrategy<T>> {
    if y.n() != n || y.total() != 2 {
        return Err(Error::InvalidInstance(format!("{y} is not a two-ball ending pattern")));
    }
    let ends: Vec<usize> = (0..n)
        .flat_map(|b| std::iter::repeat_n(b, y.balls()[b] as usize))
        .collect();
    let (i, j) = (ends[0], ends[1]);
    let others: Vec<usize> = (0..n).filter(|&b| b != i && b != j).collect();
    let paired = |order: &[usize]| order.iter().flat_map(|&b| [b, b]).collect::<Vec<_>>();
    let mut raw: Vec<(Vec<usize>, T)> = Vec::new();
    if i == j {
        let perms = permutations(&others);
        let p = T::ratio(1, perms.len() as u64);
        for o in perms {
            raw.push(([paired(&o), vec![i, i]].concat(), p.clone()));
        }
    } else {
        let third = T::ratio(1, 3);
        let outer = permutations(&others);
        let all = permutations(&(0..n).collect::<Vec<_>>());
        let pa = third.clone() * T::ratio(1, (outer.len() * all.len()) as u64);
        for o in &outer {
            for a in &all {
                raw.push(([o.clone(), a.clone(), vec![i, j]].concat(), pa.clone()));
            }
        }
        let pb = third * T::ratio(1, outer.len() as u64);
        for o in &outer {
            raw.push(([vec![i], paired(o), vec![j, i, j]].concat(), pb.clone()));
            raw.push(([vec![j], paired(o), vec![i, i, j]].concat(), pb.clone()));
        }
    }
    let entries = raw
        .into_iter()
        .map(|(s, p)| Ok((SearchSequence::new(s, n, 2, LookMode::Multi)?, p)))
        .collect::<Result<Vec<_>>>()?;
    NormalStrategy::new(n, 2, LookMode::Multi, entries)
}

/// Two balls: pick ending pattern `y` with probability
/// `prod c_i^{y_i} / T_2([n])`, then play [`normal_pattern_k2`].
pub fn searcher_normal_k2<T: Scalar>(costs: &CostVector<T>) -> Result<SearcherPolicy<T>> {
    let n = costs.len();
    let t2 = SymTable::new(costs, 2, SymKind::Complete).full(2);
    let mut parts = Vec::new();
    for y in enumerate_allocations(n, 2, LookMode::Multi)? {
        parts.push((costs.monomial(&y) / t2.clone(), normal_pattern_k2(n, &y)?));
    }
    Ok(SearcherPolicy::Normal(NormalStrategy::combine(parts)?))
}

/// Single-look regret game with `k = n - 1` and costs non-increasing: open
/// boxes `b+1..=n` first; if one is empty, open the rest in order; otherwise
/// leave box `j <= b` for last with probability `q_b(j)`.
pub fn searcher_single_regret_full<T: Scalar>(costs: &CostVector<T>, k: u32) -> Result<SearcherPolicy<T>> {
    if k as usize + 1 != costs.len() {
        return Err(Error::InvalidInstance(format!(
            "this strategy needs k = n - 1, got n = {} and k = {k}",
            costs.len()
        )));
    }
    let cut = cutoff_b_single(costs)?;
    let b = cut.b as usize;
    let last = single_last_box_probs(&costs.prefix(b)?);
    if let Some(bad) = last.iter().find(|p| p.definitely_less(&T::zero())) {
        return Err(Error::NotADistribution(format!("negative last-box probability {bad}")));
    }
    Ok(SearcherPolicy::SingleRegretFull { b, last })
}

/// [`searcher_single_regret_full`] for costs in any order.
pub fn searcher_single_regret_full_any<T: Scalar>(costs: &CostVector<T>, k: u32) -> Result<SearcherPolicy<T>> {
    let (sorted, perm) = canonicalize(costs);
    Ok(searcher_single_regret_full(&sorted, k)?.relabeled(perm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn r(n: u64, d: u64) -> Rational {
        Rational::ratio(n, d)
    }

    fn cv(c: &[f64]) -> CostVector<Rational> {
        CostVector::from_f64s(c).unwrap()
    }

    fn sum(v: &[Rational]) -> Rational {
        v.iter().fold(r(0, 1), |a, b| a + b.clone())
    }

    #[test]
    fn commit_probs() {
        assert_eq!(equal_cost_commit_probs::<Rational>(1), vec![r(1, 1)]);
        assert_eq!(equal_cost_commit_probs::<Rational>(2), vec![r(2, 3), r(1, 3)]);
        assert_eq!(equal_cost_commit_probs::<Rational>(3), vec![r(1, 2), r(1, 3), r(1, 6)]);
    }

    #[test]
    fn n2_weights() {
        let one = r(1, 1);
        assert_eq!(n2_cost_weights(&one, &one, 1), vec![r(1, 2), r(1, 2)]);
        assert_eq!(n2_cost_weights(&r(10, 1), &one, 1), vec![r(1, 11), r(10, 11)]);
        match searcher_n2_cost(&r(10, 1), &one, 2).unwrap() {
            SearcherPolicy::N2Cost { set_aside, q } => {
                assert_eq!(set_aside, 1);
                assert_eq!(q, vec![r(1, 11), r(10, 11)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn regret_columns() {
        let c = cv(&[3.0, 5.0]);
        let t = SymTable::new(&c, 2, SymKind::Complete);
        assert_eq!(multi_regret_column_weights(&t, 2, 1), vec![r(5, 8), r(3, 8)]);
    }

    #[test]
    fn normal_k1_endings() {
        let s = searcher_normal_k1(&cv(&[2.0, 1.0, 1.0]), LookMode::Multi).unwrap();
        assert_eq!(s.last_box_distribution(), vec![r(1, 2), r(1, 4), r(1, 4)]);
        assert_eq!(s.mixture().len(), 6);
    }

    #[test]
    fn normal_k2_shapes() {
        let same = normal_pattern_k2::<Rational>(4, &"(0,2,0,0)".parse().unwrap()).unwrap();
        assert_eq!(same.mixture().len(), 6);
        let split = normal_pattern_k2::<Rational>(4, &"(1,0,1,0)".parse().unwrap()).unwrap();
        assert_eq!(split.mixture().len(), 2 * 24 + 4);
        for (seq, _) in split.mixture() {
            assert_eq!(seq.ending(4, 2), vec![1, 0, 1, 0]);
        }
        let p = searcher_normal_k2(&cv(&[1.0, 2.0])).unwrap();
        assert!(matches!(p, SearcherPolicy::Normal(_)));
    }

    #[test]
    fn single_full() {
        match searcher_single_regret_full(&cv(&[100.0, 100.0, 1.0]), 2).unwrap() {
            SearcherPolicy::SingleRegretFull { b, last } => {
                assert_eq!(b, 2);
                assert_eq!(last, vec![r(1, 2), r(1, 2)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            single_last_box_probs(&cv(&[1.0, 1.0, 1.0])),
            vec![r(1, 3), r(1, 3), r(1, 3)]
        );
        match searcher_single_regret_full(&cv(&[3.0, 2.0, 1.0]), 2).unwrap() {
            SearcherPolicy::SingleRegretFull { b, last } => {
                assert_eq!(b, 2);
                assert_eq!(sum(&last), r(1, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(searcher_single_regret_full(&cv(&[3.0, 2.0, 1.0]), 1).is_err());
    }

    proptest! {
        #[test]
        fn column_weights_are_distributions(c in prop::collection::vec(1u64..30, 2..=5), k in 1u32..=4) {
            let costs = CostVector::new(c.iter().map(|&x| Rational::from_u64(x)).collect()).unwrap();
            let t = SymTable::new(&costs, k as usize + 1, SymKind::Complete);
            for m in 2..=costs.len() {
                for quota in 0..=k {
                    let w = multi_regret_column_weights(&t, m, quota);
                    prop_assert!(w.iter().all(|p| !p.is_negative()));
                    prop_assert_eq!(sum(&w), r(1, 1));
                }
            }
        }

        #[test]
        fn n2_weights_monotone(a in 1u64..50, b in 1u64..50, k in 1u32..=6) {
            let (c1, c2) = (Rational::from_u64(a.max(b)), Rational::from_u64(a.min(b)));
            let q = n2_cost_weights(&c1, &c2, k);
            prop_assert_eq!(sum(&q), r(1, 1));
            for w in q.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            let cut = cutoff_b_multi_n2(&c1, &c2, k).unwrap();
            let q = n2_cost_weights(&c1, &c2, cut.b);
            prop_assert!(q.iter().all(|p| !p.is_negative()));
            prop_assert_eq!(sum(&q), r(1, 1));
        }

        #[test]
        fn commit_probs_sum_to_one(k in 1u32..=12) {
            prop_assert_eq!(sum(&equal_cost_commit_probs::<Rational>(k)), r(1, 1));
        }

        #[test]
        fn last_box_probs_in_regime(c in prop::collection::vec(1u64..40, 2..=6)) {
            let mut c = c;
            c.sort_unstable_by(|a, b| b.cmp(a));
            let costs = CostVector::new(c.iter().map(|&x| Rational::from_u64(x)).collect()).unwrap();
            let b = cutoff_b_single(&costs).unwrap().b as usize;
            let q = single_last_box_probs(&costs.prefix(b).unwrap());
            prop_assert!(q.iter().all(|p| !p.is_negative()));
            prop_assert_eq!(sum(&q), r(1, 1));
        }
    }
}
