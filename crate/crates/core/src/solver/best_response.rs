//! Exact searcher best response by dynamic programming over info states.

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{Allocation, CostVector, GameVariant, HiderMixed, InfoState, PayoffMode};
use crate::scalar::Scalar;

/// Default cap on the number of info states a best response may touch.
pub const DEFAULT_STATE_BUDGET: usize = 2_000_000;

/// A pure searcher strategy: one box per info state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecisionTreePolicy {
    n: usize,
    entries: BTreeMap<InfoState, usize>,
}

impl DecisionTreePolicy {
    pub fn new(n: usize, entries: BTreeMap<InfoState, usize>) -> Self {
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn action(&self, info: &InfoState) -> Option<usize> {
        self.entries.get(info).copied()
    }

    pub fn entries(&self) -> &BTreeMap<InfoState, usize> {
        &self.entries
    }

    /// Boxes are 1-based in the JSON form.
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "entries": self.entries.iter().map(|(s, &b)| json!({
                "found": s.found,
                "dead": s.dead,
                "open": b + 1,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("decision tree: {what}"));
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| bad("missing n"))? as usize;
        let mut entries = BTreeMap::new();
        for e in v
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing entries"))?
        {
            let found: Vec<u32> = serde_json::from_value(e.get("found").cloned().unwrap_or(Value::Null))
                .map_err(|e| bad(&e.to_string()))?;
            let dead: Vec<bool> = serde_json::from_value(e.get("dead").cloned().unwrap_or(Value::Null))
                .map_err(|e| bad(&e.to_string()))?;
            let open = e
                .get("open")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("missing open"))? as usize;
            if found.len() != n || dead.len() != n || open == 0 || open > n {
                return Err(bad("entry does not match n"));
            }
            entries.insert(InfoState { found, dead }, open - 1);
        }
        Ok(Self { n, entries })
    }
}

#[derive(Debug, Clone)]
pub struct BestResponse<T> {
    /// Minimal expected payoff against the hider mixture.
    pub value: T,
    pub policy: DecisionTreePolicy,
    /// Info states the dynamic program evaluated.
    pub states: usize,
}

struct Dp<'a, T> {
    costs: &'a CostVector<T>,
    variant: GameVariant,
    k: u32,
    /// Every allocation of the game (so the tree covers all hider choices),
    /// with its probability under the hider mixture.
    allocs: Vec<(Allocation, T)>,
    memo: HashMap<InfoState, (T, Option<usize>)>,
    budget: usize,
}

impl<T: Scalar> Dp<'_, T> {
    /// Unnormalized value: expected future payoff times the probability of
    /// reaching `info`. Returns the value and the chosen box.
    fn solve(&mut self, info: &InfoState, consistent: &[usize]) -> Result<T> {
        if let Some((v, _)) = self.memo.get(info) {
            return Ok(v.clone());
        }
        if info.total_found() == self.k {
            self.memo.insert(info.clone(), (T::zero(), None));
            return Ok(T::zero());
        }
        if self.memo.len() >= self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        let look = self.variant.look;
        let mut weight = T::zero();
        for &a in consistent {
            weight += &self.allocs[a].1;
        }
        let admissible = info.admissible_boxes(look);
        if admissible.is_empty() {
            return Err(Error::PolicyViolation(format!("no admissible box at {info:?}")));
        }
        if weight.is_zero() {
            // Unreachable under this hider: any admissible action is optimal.
            self.memo.insert(info.clone(), (T::zero(), Some(admissible[0])));
            return Ok(T::zero());
        }
        let mut best: Option<(T, usize)> = None;
        for i in admissible {
            let (ball, empty): (Vec<usize>, Vec<usize>) = consistent
                .iter()
                .partition(|&&a| self.allocs[a].0.balls()[i] > info.found[i]);
            let mut charged = weight.clone();
            if self.variant.payoff == PayoffMode::Regret {
                charged = T::zero();
                for &a in &empty {
                    charged += &self.allocs[a].1;
                }
            }
            let mut total = self.costs.get(i).clone() * charged;
            if !ball.is_empty() {
                total += &self.solve(&info.after_ball(i), &ball)?;
            }
            if !empty.is_empty() {
                total += &self.solve(&info.after_empty(i), &empty)?;
            }
            let improves = match &best {
                None => true,
                Some((b, _)) => total.definitely_less(b),
            };
            if improves {
                best = Some((total, i));
            }
        }
        let (v, i) = best.expect("at least one admissible box");
        self.memo.insert(info.clone(), (v.clone(), Some(i)));
        Ok(v)
    }

    /// Follows chosen actions from `info` over every allocation, filling in
    /// actions for states the hider never reaches.
    fn collect(&mut self, info: &InfoState, consistent: &[usize], out: &mut BTreeMap<InfoState, usize>) -> Result<()> {
        if info.total_found() == self.k || out.contains_key(info) {
            return Ok(());
        }
        self.solve(info, consistent)?;
        let i = self.memo[info].1.expect("non-terminal state has an action");
        out.insert(info.clone(), i);
        let (ball, empty): (Vec<usize>, Vec<usize>) = consistent
            .iter()
            .partition(|&&a| self.allocs[a].0.balls()[i] > info.found[i]);
        if !ball.is_empty() {
            self.collect(&info.after_ball(i), &ball, out)?;
        }
        if !empty.is_empty() {
            self.collect(&info.after_empty(i), &empty, out)?;
        }
        Ok(())
    }
}

/// Minimal expected payoff over all adaptive searcher strategies against
/// `hider`, and a pure strategy attaining it. Ties go to the lowest box.
pub fn best_response<T: Scalar>(
    costs: &CostVector<T>,
    hider: &HiderMixed<T>,
    variant: GameVariant,
    budget: usize,
) -> Result<BestResponse<T>> {
    let n = costs.len();
    if hider.n() != n || hider.look() != variant.look {
        return Err(Error::InvalidInstance("hider strategy does not match the game".into()));
    }
    let k = hider.k();
    let allocs: Vec<(Allocation, T)> = crate::model::enumerate_allocations(n, k, variant.look)?
        .into_iter()
        .map(|x| {
            let p = hider.prob(&x);
            (x, p)
        })
        .collect();
    let all: Vec<usize> = (0..allocs.len()).collect();
    let mut dp = Dp {
        costs,
        variant,
        k,
        allocs,
        memo: HashMap::new(),
        budget,
    };
    let start = InfoState::start(n);
    let value = dp.solve(&start, &all)?;
    let mut entries = BTreeMap::new();
    dp.collect(&start, &all, &mut entries)?;
    Ok(BestResponse {
        value,
        policy: DecisionTreePolicy::new(n, entries),
        states: dp.memo.len(),
    })
}
