//! Hider distributions.

use crate::error::{Error, Result};
use crate::model::{canonicalize, enumerate_allocations, invert, Allocation, CostVector, HiderMixed, LookMode};
use crate::scalar::Scalar;
use crate::values::{cutoff_b_multi_n2, cutoff_b_single};

/// Probability of `x` proportional to `prod c_i^{x_i}` over every multi-look
/// allocation.
pub fn hider_equalizing_multi<T: Scalar>(costs: &CostVector<T>, k: u32) -> Result<HiderMixed<T>> {
    let support = enumerate_allocations(costs.len(), k, LookMode::Multi)?;
    hider_restricted_equalizing(costs, k, LookMode::Multi, &support)
}

/// Probability of the 0/1 vector `x` proportional to `prod c_i^{x_i}`.
pub fn hider_equalizing_single<T: Scalar>(costs: &CostVector<T>, k: u32) -> Result<HiderMixed<T>> {
    let support = enumerate_allocations(costs.len(), k, LookMode::Single)?;
    hider_restricted_equalizing(costs, k, LookMode::Single, &support)
}

/// Equalizing weights renormalized on `support`.
pub fn hider_restricted_equalizing<T: Scalar>(
    costs: &CostVector<T>,
    k: u32,
    look: LookMode,
    support: &[Allocation],
) -> Result<HiderMixed<T>> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let weights = support.iter().map(|x| (x.clone(), costs.monomial(x))).collect();
    HiderMixed::from_weights(costs.len(), k, look, weights)
}

/// Two boxes, `c1 >= c2`: `k - b` balls surely in box 1, the other `b` by the
/// equalizing rule.
pub fn hider_set_aside_n2<T: Scalar>(c1: &T, c2: &T, k: u32) -> Result<HiderMixed<T>> {
    let cut = cutoff_b_multi_n2(c1, c2, k)?;
    let costs = CostVector::new(vec![c1.clone(), c2.clone()])?;
    let inner = hider_equalizing_multi(&costs, cut.b)?;
    let set_aside = k - cut.b;
    let entries = inner
        .support()
        .iter()
        .map(|(x, p)| (Allocation::new(vec![x.balls()[0] + set_aside, x.balls()[1]]), p.clone()))
        .collect();
    HiderMixed::new(2, k, LookMode::Multi, entries)
}

/// Single-look with `k = n - 1` and costs non-increasing: one ball surely in
/// each of boxes `b+1..=n`, the remaining `b - 1` over boxes `1..=b` by the
/// equalizing rule.
pub fn hider_prefill_single<T: Scalar>(costs: &CostVector<T>) -> Result<HiderMixed<T>> {
    let cut = cutoff_b_single(costs)?;
    let n = costs.len();
    let b = cut.b as usize;
    let inner = hider_equalizing_single(&costs.prefix(b)?, cut.b - 1)?;
    let entries = inner
        .support()
        .iter()
        .map(|(x, p)| {
            let mut balls = x.balls().to_vec();
            balls.resize(n, 1);
            (Allocation::new(balls), p.clone())
        })
        .collect();
    HiderMixed::new(n, n as u32 - 1, LookMode::Single, entries)
}

/// [`hider_set_aside_n2`] for two costs in either order.
pub fn hider_set_aside_n2_any<T: Scalar>(costs: &CostVector<T>, k: u32) -> Result<HiderMixed<T>> {
    if costs.len() != 2 {
        return Err(Error::InvalidInstance(
            "set-aside strategy needs exactly two boxes".into(),
        ));
    }
    let (sorted, perm) = canonicalize(costs);
    hider_set_aside_n2(sorted.get(0), sorted.get(1), k)?.permuted(&invert(&perm))
}

/// [`hider_prefill_single`] for costs in any order.
pub fn hider_prefill_single_any<T: Scalar>(costs: &CostVector<T>) -> Result<HiderMixed<T>> {
    let (sorted, perm) = canonicalize(costs);
    hider_prefill_single(&sorted)?.permuted(&invert(&perm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn cv(c: &[f64]) -> CostVector<Rational> {
        CostVector::from_f64s(c).unwrap()
    }

    fn alloc(b: &[u32]) -> Allocation {
        Allocation::new(b.to_vec())
    }

    #[test]
    fn equalizing_multi() {
        let h = hider_equalizing_multi(&cv(&[1.0, 1.0, 1.0]), 2).unwrap();
        assert_eq!(h.support().len(), 6);
        assert!(h.support().iter().all(|(_, p)| *p == Rational::ratio(1, 6)));
        let h = hider_equalizing_multi(&cv(&[2.0, 1.0]), 1).unwrap();
        assert_eq!(h.prob(&alloc(&[1, 0])), Rational::ratio(2, 3));
        assert_eq!(h.prob(&alloc(&[0, 1])), Rational::ratio(1, 3));
        let h = hider_equalizing_multi(&cv(&[4.0]), 3).unwrap();
        assert_eq!(h.support().len(), 1);
    }

    #[test]
    fn equalizing_single() {
        let h = hider_equalizing_single(&cv(&[1.0, 1.0, 1.0, 1.0]), 2).unwrap();
        assert_eq!(h.support().len(), 6);
        let h = hider_equalizing_single(&cv(&[2.0, 1.0]), 1).unwrap();
        assert_eq!(h.prob(&alloc(&[1, 0])), Rational::ratio(2, 3));
        let h = hider_equalizing_single(&cv(&[3.0, 2.0]), 2).unwrap();
        assert_eq!(h.prob(&alloc(&[1, 1])), Rational::ratio(1, 1));
        assert!(matches!(
            hider_equalizing_single(&cv(&[1.0]), 2),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn set_aside() {
        let ten = Rational::from_u64(10);
        let one = Rational::from_u64(1);
        let h = hider_set_aside_n2(&ten, &one, 2).unwrap();
        assert_eq!(h.prob(&alloc(&[2, 0])), Rational::ratio(10, 11));
        assert_eq!(h.prob(&alloc(&[1, 1])), Rational::ratio(1, 11));
        assert_eq!(h.prob(&alloc(&[0, 2])), Rational::from_u64(0));
        let h = hider_set_aside_n2(&one, &one, 3).unwrap();
        assert_eq!(h, hider_equalizing_multi(&cv(&[1.0, 1.0]), 3).unwrap());
        assert!(matches!(hider_set_aside_n2(&one, &ten, 2), Err(Error::InvalidOrder(_))));
        let h = hider_set_aside_n2_any(&cv(&[1.0, 10.0]), 2).unwrap();
        assert_eq!(h.prob(&alloc(&[0, 2])), Rational::ratio(10, 11));
    }

    #[test]
    fn prefill() {
        let h = hider_prefill_single(&cv(&[100.0, 100.0, 1.0])).unwrap();
        assert_eq!(h.prob(&alloc(&[1, 0, 1])), Rational::ratio(1, 2));
        assert_eq!(h.prob(&alloc(&[0, 1, 1])), Rational::ratio(1, 2));
        let h = hider_prefill_single(&cv(&[100.0, 10.0, 1.0])).unwrap();
        assert_eq!(h.prob(&alloc(&[1, 0, 1])), Rational::ratio(10, 11));
        assert_eq!(h.prob(&alloc(&[0, 1, 1])), Rational::ratio(1, 11));
        let eq = cv(&[1.0, 1.0, 1.0]);
        assert_eq!(
            hider_prefill_single(&eq).unwrap(),
            hider_equalizing_single(&eq, 2).unwrap()
        );
        assert!(matches!(
            hider_prefill_single(&cv(&[1.0, 2.0])),
            Err(Error::InvalidOrder(_))
        ));
        let h = hider_prefill_single_any(&cv(&[1.0, 100.0, 10.0])).unwrap();
        assert_eq!(h.prob(&alloc(&[1, 1, 0])), Rational::ratio(10, 11));
    }

    #[test]
    fn restricted() {
        let c = cv(&[100.0, 10.0, 1.0, 0.99]);
        let support: Vec<_> = ["(2,0,0,0)", "(1,1,0,0)", "(1,0,1,0)", "(1,0,0,1)"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let h = hider_restricted_equalizing(&c, 2, LookMode::Multi, &support).unwrap();
        let total = Rational::from_u64(11199);
        assert_eq!(h.prob(&support[0]), Rational::from_u64(10000) / total.clone());
        assert_eq!(h.prob(&support[3]), Rational::from_u64(99) / total);
        assert!(matches!(
            hider_restricted_equalizing(&c, 2, LookMode::Multi, &[]),
            Err(Error::EmptySupport)
        ));
    }
}
