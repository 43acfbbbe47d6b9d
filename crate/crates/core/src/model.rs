//! Core domain types: costs, game variants, hider allocations and the
//! searcher's information state.
//!
//! Boxes are 0-based internally and 1-based in every user-facing rendering.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Positive per-box search costs.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector<T> {
    costs: Vec<T>,
}

impl<T: Scalar> CostVector<T> {
    pub fn new(costs: Vec<T>) -> Result<Self> {
        if costs.is_empty() {
            return Err(Error::InvalidInstance("at least one box is required".into()));
        }
        if let Some(i) = costs.iter().position(|c| *c <= T::zero()) {
            return Err(Error::InvalidInstance(format!(
                "cost of box {} must be strictly positive, got {}",
                i + 1,
                costs[i]
            )));
        }
        Ok(Self { costs })
    }

    pub fn from_f64s(costs: &[f64]) -> Result<Self> {
        Self::new(costs.iter().map(|&c| T::from_f64(c)).collect())
    }

    /// All boxes cost the same `c`.
    pub fn uniform(n: usize, c: T) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.costs
    }

    pub fn get(&self, i: usize) -> &T {
        &self.costs[i]
    }

    pub fn total(&self) -> T {
        let mut s = T::zero();
        for c in &self.costs {
            s += c;
        }
        s
    }

    /// The first `m` boxes.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        Self::new(self.costs[..m].to_vec())
    }

    pub fn all_equal(&self) -> bool {
        self.costs.iter().all(|c| *c == self.costs[0])
    }

    pub fn is_sorted_decreasing(&self) -> bool {
        self.costs.windows(2).all(|w| w[0] >= w[1])
    }

    /// Product of `c_i^{x_i}` over all boxes.
    pub fn monomial(&self, x: &Allocation) -> T {
        let mut w = T::one();
        for (c, &b) in self.costs.iter().zip(x.balls()) {
            w = w * c.powi(b);
        }
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LookMode {
    /// A box may hold any number of balls; each open yields at most one.
    Multi,
    /// A box holds at most one ball.
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayoffMode {
    /// Total cost of every open.
    Cost,
    /// Cost of opens that reveal an empty box.
    Regret,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameVariant {
    pub look: LookMode,
    pub payoff: PayoffMode,
}

impl GameVariant {
    pub const MULTI_COST: Self = Self {
        look: LookMode::Multi,
        payoff: PayoffMode::Cost,
    };
    pub const MULTI_REGRET: Self = Self {
        look: LookMode::Multi,
        payoff: PayoffMode::Regret,
    };
    pub const SINGLE_COST: Self = Self {
        look: LookMode::Single,
        payoff: PayoffMode::Cost,
    };
    pub const SINGLE_REGRET: Self = Self {
        look: LookMode::Single,
        payoff: PayoffMode::Regret,
    };

    pub const ALL: [Self; 4] = [
        Self::MULTI_COST,
        Self::MULTI_REGRET,
        Self::SINGLE_COST,
        Self::SINGLE_REGRET,
    ];

    /// Checks the `(n, k)` pair is playable under this variant.
    pub fn check(&self, n: usize, k: u32) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidInstance("at least one box is required".into()));
        }
        if self.look == LookMode::Single && k as usize > n {
            return Err(Error::InvalidInstance(format!(
                "single-look needs k <= n, got k = {k}, n = {n}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for GameVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let look = match self.look {
            LookMode::Multi => "multi",
            LookMode::Single => "single",
        };
        let payoff = match self.payoff {
            PayoffMode::Cost => "cost",
            PayoffMode::Regret => "regret",
        };
        write!(f, "{look}-{payoff}")
    }
}

impl FromStr for GameVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multi-cost" => Ok(Self::MULTI_COST),
            "multi-regret" => Ok(Self::MULTI_REGRET),
            "single-cost" => Ok(Self::SINGLE_COST),
            "single-regret" => Ok(Self::SINGLE_REGRET),
            other => Err(Error::Parse(format!(
                "unknown variant {other:?} (expected multi-cost, multi-regret, single-cost or single-regret)"
            ))),
        }
    }
}

/// A hider pure strategy: how many balls go in each box.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation(Vec<u32>);

impl Allocation {
    pub fn new(balls: Vec<u32>) -> Self {
        Self(balls)
    }

    pub fn balls(&self) -> &[u32] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_single_look(&self) -> bool {
        self.0.iter().all(|&b| b <= 1)
    }

    /// Reorders boxes: entry `i` of the result is entry `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self(perm.iter().map(|&p| self.0[p]).collect())
    }
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Allocation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad allocation {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Allocation)
    }
}

/// All hider pure strategies in lexicographic order.
pub fn enumerate_allocations(n: usize, k: u32, look: LookMode) -> Result<Vec<Allocation>> {
    if n == 0 {
        return Err(Error::InvalidInstance("at least one box is required".into()));
    }
    if look == LookMode::Single && k as usize > n {
        return Err(Error::InvalidInstance(format!(
            "single-look needs k <= n, got k = {k}, n = {n}"
        )));
    }
    let cap = match look {
        LookMode::Multi => k,
        LookMode::Single => 1,
    };
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fill(0, k, cap, &mut cur, &mut out);
    Ok(out)
}

fn fill(i: usize, left: u32, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Allocation>) {
    let n = cur.len();
    if i == n - 1 {
        if left <= cap {
            cur[i] = left;
            out.push(Allocation(cur.clone()));
        }
        return;
    }
    for b in 0..=left.min(cap) {
        cur[i] = b;
        fill(i + 1, left - b, cap, cur, out);
    }
    cur[i] = 0;
}

/// What a searcher who knew the allocation would pay: `sum x_i c_i`.
pub fn clairvoyant_cost<T: Scalar>(costs: &CostVector<T>, x: &Allocation) -> T {
    let mut s = T::zero();
    for (c, &b) in costs.as_slice().iter().zip(x.balls()) {
        s += &(c.clone() * T::from_u64(b as u64));
    }
    s
}

/// A finitely supported distribution over allocations.
///
/// Entries are kept sorted by allocation so serialized strategies are
/// reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct HiderMixed<T> {
    n: usize,
    k: u32,
    look: LookMode,
    support: Vec<(Allocation, T)>,
}

impl<T: Scalar> HiderMixed<T> {
    /// Validates and sorts. Zero-probability entries are dropped; duplicate
    /// allocations are merged.
    pub fn new(n: usize, k: u32, look: LookMode, entries: Vec<(Allocation, T)>) -> Result<Self> {
        let mut merged: BTreeMap<Allocation, T> = BTreeMap::new();
        for (x, p) in entries {
            if x.n() != n || x.total() != k {
                return Err(Error::NotADistribution(format!(
                    "allocation {x} does not place {k} balls in {n} boxes"
                )));
            }
            if look == LookMode::Single && !x.is_single_look() {
                return Err(Error::NotADistribution(format!(
                    "allocation {x} puts two balls in one box under single-look"
                )));
            }
            if p < T::zero() && !p.approx_eq(&T::zero(), &T::from_f64(1e-9)) {
                return Err(Error::NotADistribution(format!("negative probability {p} on {x}")));
            }
            let slot = merged.entry(x).or_insert_with(T::zero);
            *slot += &p;
        }
        let support: Vec<_> = merged.into_iter().filter(|(_, p)| *p > T::zero()).collect();
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut total = T::zero();
        for (_, p) in &support {
            total += p;
        }
        let tol = if T::EXACT { T::zero() } else { T::from_f64(1e-9) };
        if !total.approx_eq(&T::one(), &tol) {
            return Err(Error::NotADistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { n, k, look, support })
    }

    /// Builds a distribution proportional to the given non-negative weights.
    pub fn from_weights(n: usize, k: u32, look: LookMode, weights: Vec<(Allocation, T)>) -> Result<Self> {
        let mut total = T::zero();
        for (_, w) in &weights {
            total += w;
        }
        if total <= T::zero() {
            return Err(Error::EmptySupport);
        }
        let entries = weights.into_iter().map(|(x, w)| (x, w / total.clone())).collect();
        Self::new(n, k, look, entries)
    }

    pub fn point(x: Allocation, look: LookMode) -> Result<Self> {
        let (n, k) = (x.n(), x.total());
        Self::new(n, k, look, vec![(x, T::one())])
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

    pub fn support(&self) -> &[(Allocation, T)] {
        &self.support
    }

    pub fn prob(&self, x: &Allocation) -> T {
        self.support
            .binary_search_by(|(y, _)| y.cmp(x))
            .map(|i| self.support[i].1.clone())
            .unwrap_or_else(|_| T::zero())
    }

    /// Relabels boxes: box `i` of the result is box `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let entries = self
            .support
            .iter()
            .map(|(x, p)| (x.permuted(perm), p.clone()))
            .collect();
        Self::new(self.n, self.k, self.look, entries)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "k": self.k,
            "look": self.look,
            "support": self.support.iter().map(|(x, p)| json!({
                "balls": x.balls(),
                "prob": p.to_json(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("hider strategy: {what}"));
        let entries = v
            .get("support")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing support list"))?;
        let mut support = Vec::with_capacity(entries.len());
        for e in entries {
            let balls: Vec<u32> = serde_json::from_value(e.get("balls").cloned().unwrap_or(Value::Null))
                .map_err(|e| bad(&e.to_string()))?;
            let p = T::from_json(e.get("prob").ok_or_else(|| bad("missing prob"))?)?;
            support.push((Allocation(balls), p));
        }
        let first = support.first().ok_or(Error::EmptySupport)?;
        let (n, k) = (first.0.n(), first.0.total());
        let look = match v.get("look") {
            Some(l) => serde_json::from_value(l.clone()).map_err(|e| bad(&e.to_string()))?,
            None if support.iter().all(|(x, _)| x.is_single_look()) && k as usize <= n => LookMode::Single,
            None => LookMode::Multi,
        };
        Self::new(n, k, look, support)
    }
}

/// What the searcher knows: balls found per box and which boxes have been
/// revealed empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InfoState {
    pub found: Vec<u32>,
    pub dead: Vec<bool>,
}

impl InfoState {
    pub fn start(n: usize) -> Self {
        Self {
            found: vec![0; n],
            dead: vec![false; n],
        }
    }

    pub fn n(&self) -> usize {
        self.found.len()
    }

    pub fn total_found(&self) -> u32 {
        self.found.iter().sum()
    }

    pub fn remaining(&self, k: u32) -> u32 {
        k.saturating_sub(self.total_found())
    }

    /// May box `i` be opened now? Dead boxes never; under single-look, no box
    /// twice.
    pub fn admissible(&self, i: usize, look: LookMode) -> bool {
        !self.dead[i] && (look == LookMode::Multi || self.found[i] == 0)
    }

    pub fn admissible_boxes(&self, look: LookMode) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.admissible(i, look)).collect()
    }

    pub fn after_ball(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.found[i] += 1;
        s
    }

    pub fn after_empty(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.dead[i] = true;
        s
    }

    /// Is allocation `x` consistent with what has been observed?
    pub fn consistent_with(&self, x: &Allocation) -> bool {
        x.balls()
            .iter()
            .zip(&self.found)
            .zip(&self.dead)
            .all(|((&xi, &f), &d)| if d { xi == f } else { xi >= f })
    }

    /// View of this state with boxes relabeled: box `i` of the result is box
    /// `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            found: perm.iter().map(|&p| self.found[p]).collect(),
            dead: perm.iter().map(|&p| self.dead[p]).collect(),
        }
    }
}

/// A full game instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    pub costs: CostVector<T>,
    pub k: u32,
    pub variant: GameVariant,
}

impl<T: Scalar> Instance<T> {
    pub fn new(costs: CostVector<T>, k: u32, variant: GameVariant) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInstance("at least one ball is required".into()));
        }
        variant.check(costs.len(), k)?;
        Ok(Self { costs, k, variant })
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn allocations(&self) -> Vec<Allocation> {
        enumerate_allocations(self.n(), self.k, self.variant.look).expect("validated instance")
    }

    /// Parses `{"costs": [...], "balls": k, "variant": "multi-cost"}`. Costs
    /// may be JSON numbers or decimal strings; both parse exactly in rational
    /// mode.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("instance: {what}"));
        let costs = v
            .get("costs")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing costs array"))?
            .iter()
            .map(T::from_json)
            .collect::<Result<Vec<_>>>()?;
        let k = v
            .get("balls")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing integer `balls`"))?;
        let variant: GameVariant = v
            .get("variant")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing `variant`"))?
            .parse()?;
        Self::new(CostVector::new(costs)?, k as u32, variant)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "costs": self.costs.as_slice().iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "balls": self.k,
            "variant": self.variant.to_string(),
        })
    }
}

/// Sorts costs into non-increasing order. Returns the sorted vector and
/// `perm` with `sorted[i] = costs[perm[i]]`; ties keep their original order.
pub fn canonicalize<T: Scalar>(costs: &CostVector<T>) -> (CostVector<T>, Vec<usize>) {
    let mut perm: Vec<usize> = (0..costs.len()).collect();
    perm.sort_by(|&a, &b| costs.get(b).partial_cmp(costs.get(a)).expect("comparable costs"));
    let sorted = CostVector {
        costs: perm.iter().map(|&p| costs.get(p).clone()).collect(),
    };
    (sorted, perm)
}

/// Inverse of a permutation.
pub fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn two_boxes_two_balls() {
        let xs = enumerate_allocations(2, 2, LookMode::Multi).unwrap();
        let got: Vec<_> = xs.iter().map(|x| x.balls().to_vec()).collect();
        assert_eq!(got, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn single_box_is_forced() {
        let xs = enumerate_allocations(1, 5, LookMode::Multi).unwrap();
        assert_eq!(xs, vec![Allocation::new(vec![5])]);
    }

    #[test]
    fn single_look_counts() {
        assert_eq!(enumerate_allocations(4, 2, LookMode::Single).unwrap().len(), 6);
        assert!(matches!(
            enumerate_allocations(2, 3, LookMode::Single),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn allocation_counts_are_binomial() {
        for n in 1..=6u64 {
            for k in 0..=6u64 {
                let multi = enumerate_allocations(n as usize, k as u32, LookMode::Multi).unwrap();
                assert_eq!(multi.len() as u64, binom(n + k - 1, k), "multi n={n} k={k}");
                assert!(multi.windows(2).all(|w| w[0] < w[1]));
                if k <= n {
                    let single = enumerate_allocations(n as usize, k as u32, LookMode::Single).unwrap();
                    assert_eq!(single.len() as u64, binom(n, k), "single n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn clairvoyant_examples() {
        let c = CostVector::<Rational>::from_f64s(&[10.0, 1.0]).unwrap();
        assert_eq!(
            clairvoyant_cost(&c, &Allocation::new(vec![5, 0])),
            Rational::from_u64(50)
        );
        let c = CostVector::<Rational>::from_f64s(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(
            clairvoyant_cost(&c, &Allocation::new(vec![0, 1, 1])),
            Rational::from_u64(5)
        );
        assert_eq!(
            clairvoyant_cost(&c, &Allocation::new(vec![0, 0, 0])),
            Rational::from_u64(0)
        );
    }

    #[test]
    fn costs_must_be_positive() {
        assert!(CostVector::<f64>::new(vec![]).is_err());
        assert!(CostVector::<f64>::new(vec![1.0, 0.0]).is_err());
        assert!(CostVector::<f64>::new(vec![1.0, -2.0]).is_err());
    }

    #[test]
    fn hider_mixed_must_sum_to_one() {
        let x = Allocation::new(vec![1, 0]);
        let y = Allocation::new(vec![0, 1]);
        let half = Rational::ratio(1, 2);
        let ok = HiderMixed::new(
            2,
            1,
            LookMode::Multi,
            vec![(x.clone(), half.clone()), (y.clone(), half.clone())],
        );
        assert!(ok.is_ok());
        let bad = HiderMixed::new(2, 1, LookMode::Multi, vec![(x, half)]);
        assert!(matches!(bad, Err(Error::NotADistribution(_))));
        let two = HiderMixed::<Rational>::new(
            2,
            2,
            LookMode::Single,
            vec![(Allocation::new(vec![2, 0]), Rational::from_u64(1))],
        );
        assert!(two.is_err());
    }

    #[test]
    fn instance_json_parses_decimal_strings_exactly() {
        let v: Value =
            serde_json::from_str(r#"{"costs":["100",10,1,"0.99"],"balls":2,"variant":"multi-cost"}"#).unwrap();
        let inst = Instance::<Rational>::from_json(&v).unwrap();
        assert_eq!(inst.costs.get(3), &Rational::ratio(99, 100));
        assert_eq!(inst.variant, GameVariant::MULTI_COST);
        let back = Instance::<Rational>::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);

        let v: Value = serde_json::from_str(r#"{"costs":[1,2],"balls":3,"variant":"single-regret"}"#).unwrap();
        assert!(Instance::<f64>::from_json(&v).is_err());
    }

    #[test]
    fn info_state_consistency() {
        let s = InfoState::start(3).after_ball(0).after_empty(1);
        assert!(s.consistent_with(&Allocation::new(vec![1, 0, 1])));
        assert!(s.consistent_with(&Allocation::new(vec![2, 0, 0])));
        assert!(!s.consistent_with(&Allocation::new(vec![0, 0, 2])));
        assert!(!s.consistent_with(&Allocation::new(vec![1, 1, 0])));
        assert!(!s.admissible(1, LookMode::Multi));
        assert!(s.admissible(0, LookMode::Multi));
        assert!(!s.admissible(0, LookMode::Single));
    }

    #[test]
    fn canonicalize_sorts_and_records_permutation() {
        let c = CostVector::<Rational>::from_f64s(&[1.0, 10.0, 9.0, 1.0]).unwrap();
        let (sorted, perm) = canonicalize(&c);
        assert!(sorted.is_sorted_decreasing());
        assert_eq!(perm, vec![1, 2, 0, 3]);
        assert_eq!(invert(&perm), vec![2, 0, 1, 3]);
    }
}
