//! Closed-form game values and the threshold rules that pick between them.

use crate::error::{Error, Result};
use crate::model::{canonicalize, CostVector, Instance, LookMode, PayoffMode};
use crate::scalar::Scalar;
use crate::solver::MatrixGame;
use crate::symfun::{SymKind, SymTable};

/// Expected cost of any searcher strategy against the multi-look equalizing
/// hider: `k T_{k+1} / T_k`.
pub fn value_multi_cost_equalizing<T: Scalar>(costs: &CostVector<T>, k: u32) -> T {
    let t = SymTable::new(costs, k as usize + 1, SymKind::Complete);
    T::from_u64(k as u64) * t.full(k as i64 + 1) / t.full(k as i64)
}

/// Value of the multi-look cost game with unit costs: `(n + k)(1 - 1/(k+1))`.
pub fn value_equal_cost<T: Scalar>(n: usize, k: u32) -> T {
    let k = k as u64;
    T::from_u64(n as u64 + k) * (T::one() - T::ratio(1, k + 1))
}

/// Value of the multi-look regret game: `T_1 - T_{k+1} / T_k`.
pub fn value_multi_regret<T: Scalar>(costs: &CostVector<T>, k: u32) -> T {
    let t = SymTable::new(costs, k as usize + 1, SymKind::Complete);
    t.full(1) - t.full(k as i64 + 1) / t.full(k as i64)
}

/// Expected regret of any single-look searcher against the single-look
/// equalizing hider: `k S_{k+1} / S_k`.
pub fn value_single_regret<T: Scalar>(costs: &CostVector<T>, k: u32) -> Result<T> {
    if k as usize > costs.len() {
        return Err(Error::InvalidInstance(format!(
            "single-look needs k <= n, got k = {k}, n = {}",
            costs.len()
        )));
    }
    let s = SymTable::new(costs, k as usize + 1, SymKind::Elementary);
    Ok(T::from_u64(k as u64) * s.full(k as i64 + 1) / s.full(k as i64))
}

/// `f_m(r) = -(m-1) + r + r^2 + ... + r^m`.
pub fn f_m<T: Scalar>(m: u32, r: &T) -> T {
    let mut acc = T::zero() - T::from_u64(m.saturating_sub(1) as u64);
    let mut p = T::one();
    for _ in 0..m {
        p = p * r.clone();
        acc += &p;
    }
    acc
}

/// The unique root of `f_m` in `(0, 1)`, by bisection until the bracket is
/// narrower than `tol`. `r_1 = 0` extends the sequence downwards.
pub fn root_fm(m: u32, tol: f64) -> f64 {
    assert!(tol > 0.0, "tolerance must be positive");
    if m <= 1 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f_m(m, &mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Outcome of a threshold rule: the cutoff index `b`, the sequence it was
/// read from (`r_1..r_k` or `a_2..a_n`) and the resulting game value.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult<T> {
    pub b: u32,
    pub sequence: Vec<T>,
    pub value: T,
}

/// Multi-look cost game on two boxes with `c1 >= c2`.
///
/// `b` is the largest `m <= k` with `r_m <= c2/c1`. The comparison is made
/// through the sign of `f_m(c2/c1)` (which is increasing in `r`), so the
/// cutoff is exact in rational mode. When `b < k` the hider sets `k - b`
/// balls aside in box 1 and the value is `(k - b) c1 + U([2], b)`.
pub fn cutoff_b_multi_n2<T: Scalar>(c1: &T, c2: &T, k: u32) -> Result<ThresholdResult<T>> {
    if c1 < c2 {
        return Err(Error::InvalidOrder(format!("c1 = {c1} < c2 = {c2}")));
    }
    if k == 0 {
        return Err(Error::InvalidInstance("at least one ball is required".into()));
    }
    let ratio = c2.clone() / c1.clone();
    let mut b = 1;
    for m in 2..=k {
        if f_m(m, &ratio) < T::zero() {
            break;
        }
        b = m;
    }
    let sequence = (1..=k).map(|m| T::from_f64(root_fm(m, 1e-12))).collect();
    let costs = CostVector::new(vec![c1.clone(), c2.clone()])?;
    let t = SymTable::new(&costs, b as usize, SymKind::Complete);
    let q0 = T::one() - T::from_u64(b as u64) * c1.powi(b) / t.full(b as i64);
    assert!(!q0.definitely_less(&T::zero()), "q_b(0) = {q0} < 0 at the cutoff");
    let value = T::from_u64((k - b) as u64) * c1.clone() + value_multi_cost_equalizing(&costs, b);
    Ok(ThresholdResult { b, sequence, value })
}

/// `a_m = sum_{i<m} 1/c_i - (m-2)/c_m` for `m = 2..=n`.
pub fn single_thresholds<T: Scalar>(costs: &CostVector<T>) -> Vec<T> {
    let mut out = Vec::new();
    let mut inv_sum = T::zero();
    for m in 2..=costs.len() {
        inv_sum += &(T::one() / costs.get(m - 2).clone());
        out.push(inv_sum.clone() - T::from_u64(m as u64 - 2) / costs.get(m - 1).clone());
    }
    out
}

/// Single-look regret game with `k = n - 1` and costs sorted non-increasing.
///
/// `b = max{m : a_m >= 0}` (at least 2, since `a_2 = 1/c_1`). The value is
/// `W([b], b - 1)` on the `b` most expensive boxes.
pub fn cutoff_b_single<T: Scalar>(costs: &CostVector<T>) -> Result<ThresholdResult<T>> {
    if !costs.is_sorted_decreasing() {
        return Err(Error::InvalidOrder(format!("{:?}", costs.as_slice())));
    }
    if costs.len() < 2 {
        return Err(Error::InvalidInstance("k = n - 1 needs at least two boxes".into()));
    }
    let sequence = single_thresholds(costs);
    let b = sequence
        .iter()
        .enumerate()
        .filter(|(_, a)| **a >= T::zero())
        .map(|(i, _)| i as u32 + 2)
        .max()
        .expect("a_2 is positive");
    let value = value_single_regret(&costs.prefix(b as usize)?, b - 1)?;
    Ok(ThresholdResult { b, sequence, value })
}

/// Total cost on two boxes when the hider puts `i` balls in box 1 and the
/// searcher opens box 1 at most `j` times before switching.
pub fn n2_cost_matrix_entry<T: Scalar>(i: u32, j: u32, c1: &T, c2: &T, k: u32) -> T {
    let base = T::from_u64(i as u64) * c1.clone() + T::from_u64((k - i) as u64) * c2.clone();
    match i.cmp(&j) {
        std::cmp::Ordering::Less => base + c1.clone(),
        std::cmp::Ordering::Equal => base,
        std::cmp::Ordering::Greater => base + c2.clone(),
    }
}

/// The `(k+1) x (k+1)` game that decides how many balls the hider puts in
/// the last box (row `t`) against how many times the searcher opens it
/// first (column `s`), with the remaining boxes valued by
/// [`value_multi_regret`].
pub fn regret_reduction_matrix<T: Scalar>(costs: &CostVector<T>, k: u32) -> Result<MatrixGame<T>> {
    let n = costs.len();
    if n < 2 || k == 0 {
        return Err(Error::InvalidInstance("reduction needs n >= 2 and k >= 1".into()));
    }
    let rest = costs.prefix(n - 1)?;
    let rest_total = rest.total();
    let last = costs.get(n - 1).clone();
    let sub: Vec<T> = (0..=k).map(|j| value_multi_regret(&rest, j)).collect();
    let payoffs = (0..=k)
        .map(|t| {
            (0..=k)
                .map(|s| match t.cmp(&s) {
                    std::cmp::Ordering::Less => last.clone() + sub[(k - t) as usize].clone(),
                    std::cmp::Ordering::Equal => sub[(k - t) as usize].clone(),
                    std::cmp::Ordering::Greater => rest_total.clone(),
                })
                .collect()
        })
        .collect();
    let labels: Vec<String> = (0..=k).map(|t| t.to_string()).collect();
    MatrixGame::with_labels(payoffs, labels.clone(), labels)
}

/// A closed-form value together with the formula it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm<T> {
    pub value: T,
    pub formula: String,
}

/// The closed-form value of `inst`, when its regime has one.
pub fn closed_form_value<T: Scalar>(inst: &Instance<T>) -> Result<ClosedForm<T>> {
    let (n, k, costs) = (inst.n(), inst.k, &inst.costs);
    let done = |value: T, formula: &str| {
        Ok(ClosedForm {
            value,
            formula: formula.to_string(),
        })
    };
    let (sorted, _) = canonicalize(costs);
    match (inst.variant.look, inst.variant.payoff) {
        (LookMode::Multi, PayoffMode::Cost) => {
            if n == 1 {
                done(T::from_u64(k as u64) * costs.get(0).clone(), "k c_1")
            } else if costs.all_equal() {
                done(
                    value_equal_cost::<T>(n, k) * costs.get(0).clone(),
                    "c (n + k)(1 - 1/(k+1))",
                )
            } else if n == 2 {
                let r = cutoff_b_multi_n2(sorted.get(0), sorted.get(1), k)?;
                let formula = format!("(k - b) c_1 + b T_(b+1)/T_b with b = {}", r.b);
                done(r.value, &formula)
            } else {
                Err(Error::NoClosedForm(format!(
                    "multi-cost with n = {n} and unequal costs"
                )))
            }
        }
        (LookMode::Multi, PayoffMode::Regret) => done(value_multi_regret(costs, k), "T_1 - T_(k+1)/T_k"),
        (LookMode::Single, PayoffMode::Regret) => {
            if k as usize == n {
                done(T::zero(), "0 (every box holds a ball)")
            } else if k == 1 {
                done(value_multi_regret(costs, 1), "T_1 - T_2/T_1")
            } else if k as usize + 1 == n {
                let r = cutoff_b_single(&sorted)?;
                let formula = format!("(b - 1) S_b/S_(b-1) on the b most expensive boxes, b = {}", r.b);
                done(r.value, &formula)
            } else {
                Err(Error::NoClosedForm(format!("single-regret with n = {n}, k = {k}")))
            }
        }
        (LookMode::Single, PayoffMode::Cost) => {
            if k as usize == n {
                done(costs.total(), "c_1 + ... + c_n")
            } else {
                Err(Error::NoClosedForm(format!("single-cost with n = {n}, k = {k}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn r(n: u64, d: u64) -> Rational {
        Rational::ratio(n, d)
    }

    fn cv(c: &[f64]) -> CostVector<Rational> {
        CostVector::from_f64s(c).unwrap()
    }

    #[test]
    fn multi_cost_equalizing_values() {
        assert_eq!(value_multi_cost_equalizing(&cv(&[10.0, 1.0]), 2), r(2222, 111));
        assert_eq!(value_multi_cost_equalizing(&cv(&[7.0]), 3), r(21, 1));
        assert_eq!(value_multi_cost_equalizing(&cv(&[1.0, 1.0]), 1), r(3, 2));
    }

    #[test]
    fn equal_cost_values() {
        assert_eq!(value_equal_cost::<Rational>(2, 2), r(8, 3));
        assert_eq!(value_equal_cost::<Rational>(1, 1), r(1, 1));
        assert_eq!(value_equal_cost::<Rational>(3, 2), r(10, 3));
        for n in 1..=8 {
            for k in 1..=8 {
                let ones = CostVector::uniform(n, Rational::from_u64(1)).unwrap();
                assert_eq!(
                    value_equal_cost::<Rational>(n, k),
                    value_multi_cost_equalizing(&ones, k)
                );
            }
        }
    }

    #[test]
    fn multi_regret_values() {
        assert_eq!(value_multi_regret(&cv(&[3.5]), 4), r(0, 1));
        assert_eq!(value_multi_regret(&cv(&[1.0, 1.0]), 1), r(1, 2));
        assert_eq!(value_multi_regret(&cv(&[1.0, 1.0, 1.0]), 2), r(4, 3));
    }

    #[test]
    fn closed_form_dispatch() {
        use crate::model::{GameVariant, Instance};
        let inst = |c: &[f64], k, v| Instance::new(cv(c), k, v).unwrap();
        let v = closed_form_value(&inst(&[1.0, 1.0], 2, GameVariant::MULTI_COST)).unwrap();
        assert_eq!(v.value, r(8, 3));
        let v = closed_form_value(&inst(&[10.0, 9.0, 1.0, 1.0], 2, GameVariant::MULTI_REGRET)).unwrap();
        assert_eq!(v.value, value_multi_regret(&cv(&[10.0, 9.0, 1.0, 1.0]), 2));
        let v = closed_form_value(&inst(&[4.0, 2.0, 1.0], 3, GameVariant::SINGLE_REGRET)).unwrap();
        assert_eq!(v.value, r(0, 1));
        let v = closed_form_value(&inst(&[1.0, 10.0], 2, GameVariant::MULTI_COST)).unwrap();
        assert_eq!(v.value, r(221, 11));
        let e = closed_form_value(&inst(&[3.0, 2.0, 1.0], 2, GameVariant::MULTI_COST)).unwrap_err();
        assert!(matches!(e, Error::NoClosedForm(_)));
        assert!(e.to_string().contains("use `solve`"));
    }

    #[test]
    fn single_regret_values() {
        assert_eq!(value_single_regret(&cv(&[3.0, 2.0]), 2).unwrap(), r(0, 1));
        assert_eq!(value_single_regret(&cv(&[100.0, 100.0]), 1).unwrap(), r(50, 1));
        // One ball, three unit boxes: the ball is found on open 1, 2 or 3.
        assert_eq!(value_single_regret(&cv(&[1.0, 1.0, 1.0]), 1).unwrap(), r(1, 1));
        assert!(value_single_regret(&cv(&[1.0]), 2).is_err());
    }

    #[test]
    fn roots_of_f() {
        let r2 = root_fm(2, 1e-12);
        assert!((r2 - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-10);
        let r3 = root_fm(3, 1e-12);
        assert!((r3 - 0.810536).abs() < 1e-6);
        assert!(f_m(3, &r3).abs() < 1e-10);
        assert!(r3 > r2);
        let mut prev = 0.0;
        for m in 2..=12 {
            let rm = root_fm(m, 1e-12);
            assert!(rm > prev && rm < 1.0);
            prev = rm;
        }
    }

    #[test]
    fn multi_n2_cutoffs() {
        let t = cutoff_b_multi_n2(&r(10, 1), &r(1, 1), 2).unwrap();
        assert_eq!(t.b, 1);
        assert_eq!(t.value, r(10, 1) + r(111, 11));
        assert!((t.value.to_f64() - 20.0909).abs() < 1e-4);

        for k in 1..=6 {
            let t = cutoff_b_multi_n2(&r(3, 1), &r(3, 1), k).unwrap();
            assert_eq!(t.b, k);
            assert_eq!(t.value, value_multi_cost_equalizing(&cv(&[3.0, 3.0]), k));
        }

        let t = cutoff_b_multi_n2(&r(1, 1), &r(7, 10), 3).unwrap();
        assert_eq!(t.b, 2);
        assert!(matches!(
            cutoff_b_multi_n2(&r(1, 1), &r(2, 1), 2),
            Err(Error::InvalidOrder(_))
        ));
    }

    #[test]
    fn single_cutoffs() {
        let t = cutoff_b_single(&cv(&[100.0, 100.0, 1.0])).unwrap();
        assert_eq!(t.b, 2);
        assert_eq!(t.value, r(50, 1));

        let t = cutoff_b_single(&cv(&[4.0, 4.0, 4.0])).unwrap();
        assert_eq!(t.b, 3);
        assert_eq!(t.value, value_single_regret(&cv(&[4.0, 4.0, 4.0]), 2).unwrap());

        let t = cutoff_b_single(&cv(&[100.0, 10.0, 1.0])).unwrap();
        assert_eq!(t.b, 2);
        assert_eq!(t.value, r(1000, 110));

        assert!(matches!(cutoff_b_single(&cv(&[1.0, 2.0])), Err(Error::InvalidOrder(_))));
    }

    #[test]
    fn n2_matrix_entries() {
        let (c1, c2) = (r(10, 1), r(1, 1));
        assert_eq!(n2_cost_matrix_entry(2, 2, &c1, &c2, 2), r(20, 1));
        assert_eq!(n2_cost_matrix_entry(0, 1, &c1, &c2, 2), r(12, 1));
        assert_eq!(n2_cost_matrix_entry(2, 0, &c1, &c2, 2), r(21, 1));
    }

    #[test]
    fn reduction_matrix_shape() {
        let m = regret_reduction_matrix(&cv(&[1.0, 1.0]), 1).unwrap();
        assert_eq!(m.payoffs(), &[vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(0, 1)]]);

        let c = cv(&[3.0, 2.0, 5.0]);
        let m = regret_reduction_matrix(&c, 3).unwrap();
        assert_eq!(m.payoffs()[3][3], r(0, 1));
        for t in 1..=3 {
            assert_eq!(m.payoffs()[t][0], r(5, 1));
        }
    }

    proptest! {
        #[test]
        fn thresholds_decrease(mut c in prop::collection::vec(1u64..50, 2..=10)) {
            c.sort_unstable_by(|a, b| b.cmp(a));
            let cv = CostVector::new(c.iter().map(|&x| Rational::from_u64(x)).collect()).unwrap();
            let a = single_thresholds(&cv);
            for w in a.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
        }

        #[test]
        fn regret_value_bounds(c in prop::collection::vec(1u64..30, 1..=5), k in 1u32..=4) {
            let cv = CostVector::new(c.iter().map(|&x| Rational::from_u64(x)).collect()).unwrap();
            let v = value_multi_regret(&cv, k);
            prop_assert!(v >= Rational::from_u64(0));
            prop_assert!(v <= cv.total());
        }
    }
}
