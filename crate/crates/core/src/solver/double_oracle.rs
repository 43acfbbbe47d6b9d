//! Double oracle: restricted matrix games over generated searcher columns,
//! closed by exact best responses.

use serde_json::{json, Value};

use super::best_response::{best_response, DEFAULT_STATE_BUDGET};
use super::matrix::MatrixGame;
use crate::engine::{payoff_vector, sequence_outcome};
use crate::error::{Error, Result};
use crate::model::{Allocation, HiderMixed, Instance, LookMode, PayoffMode};
use crate::scalar::Scalar;
use crate::strategies::{
    all_sequences, hider_equalizing_multi, hider_equalizing_single, permutations, searcher_equal_cost,
    searcher_multi_regret, searcher_n2_cost_any, searcher_normal_k1, searcher_normal_k2,
    searcher_single_regret_full_any, NormalStrategy, SearchSequence, SearcherPolicy,
};

#[derive(Debug, Clone)]
pub struct SolveOptions<T> {
    /// Stop once the best response improves on the restricted value by at
    /// most this much. Zero in exact mode.
    pub eps: T,
    /// Start from the constructive strategies known for the variant.
    pub seed_constructive: bool,
    pub state_budget: usize,
    pub max_iterations: usize,
}

impl<T: Scalar> Default for SolveOptions<T> {
    fn default() -> Self {
        Self {
            eps: if T::EXACT { T::zero() } else { T::from_f64(1e-9) },
            seed_constructive: true,
            state_budget: DEFAULT_STATE_BUDGET,
            max_iterations: 500,
        }
    }
}

/// A searcher strategy used as a column of the restricted game.
#[derive(Debug, Clone)]
pub struct Column<T> {
    pub label: String,
    pub policy: SearcherPolicy<T>,
    /// Payoff against each allocation, in enumeration order.
    pub payoffs: Vec<T>,
}

#[derive(Debug, Clone)]
pub struct SolveResult<T> {
    pub value: T,
    pub hider: HiderMixed<T>,
    pub columns: Vec<Column<T>>,
    /// Searcher probability per column.
    pub searcher_weights: Vec<T>,
    pub iterations: usize,
    /// Restricted value minus the best-response value to the final hider.
    pub duality_gap: T,
    /// Best-response value against the final hider: a lower bound on the
    /// game value. `value` is the matching upper bound.
    pub lower_bound: T,
}

impl<T: Scalar> SolveResult<T> {
    /// Columns with positive searcher weight.
    pub fn searcher_support(&self) -> Vec<(&Column<T>, &T)> {
        self.columns
            .iter()
            .zip(&self.searcher_weights)
            .filter(|(_, w)| **w > T::zero())
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value.to_json(),
            "lower_bound": self.lower_bound.to_json(),
            "duality_gap": self.duality_gap.to_json(),
            "iterations": self.iterations,
            "columns": self.columns.len(),
            "hider": self.hider.to_json(),
            "searcher": self.searcher_support().into_iter().map(|(c, w)| json!({
                "label": c.label,
                "prob": w.to_json(),
                "strategy": c.policy.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Constructive strategies that apply to `inst`, with labels.
pub fn constructive_policies<T: Scalar>(inst: &Instance<T>) -> Vec<(String, SearcherPolicy<T>)> {
    let (n, k, costs) = (inst.n(), inst.k, &inst.costs);
    let mut out = Vec::new();
    match (inst.variant.look, inst.variant.payoff) {
        (LookMode::Multi, PayoffMode::Cost) => {
            if costs.all_equal() {
                if let Ok(p) = searcher_equal_cost(n, k) {
                    out.push(("equal-cost".to_string(), p));
                }
            }
            if n == 2 {
                if let Ok(p) = searcher_n2_cost_any(costs, k) {
                    out.push(("n2-cost".to_string(), p));
                }
            }
        }
        (LookMode::Multi, PayoffMode::Regret) => {
            out.push(("multi-regret".to_string(), searcher_multi_regret(costs, k)));
            if k == 1 {
                if let Ok(m) = searcher_normal_k1(costs, LookMode::Multi) {
                    out.push(("normal-k1".to_string(), SearcherPolicy::Normal(m)));
                }
            }
            if k == 2 && n <= 4 {
                if let Ok(p) = searcher_normal_k2(costs) {
                    out.push(("normal-k2".to_string(), p));
                }
            }
        }
        (LookMode::Single, PayoffMode::Regret) => {
            if k as usize + 1 == n {
                if let Ok(p) = searcher_single_regret_full_any(costs, k) {
                    out.push(("single-regret-full".to_string(), p));
                }
            }
            if k == 1 {
                if let Ok(m) = searcher_normal_k1(costs, LookMode::Single) {
                    out.push(("normal-k1".to_string(), SearcherPolicy::Normal(m)));
                }
            }
        }
        (LookMode::Single, PayoffMode::Cost) => {}
    }
    out
}

/// The equalizing hider for the variant's look mode.
pub fn equalizing_hider<T: Scalar>(inst: &Instance<T>) -> Result<HiderMixed<T>> {
    match inst.variant.look {
        LookMode::Multi => hider_equalizing_multi(&inst.costs, inst.k),
        LookMode::Single => hider_equalizing_single(&inst.costs, inst.k),
    }
}

fn restricted_game<T: Scalar>(allocs: &[Allocation], columns: &[Column<T>]) -> Result<MatrixGame<T>> {
    let payoffs = (0..allocs.len())
        .map(|i| columns.iter().map(|c| c.payoffs[i].clone()).collect())
        .collect();
    MatrixGame::with_labels(
        payoffs,
        allocs.iter().map(ToString::to_string).collect(),
        columns.iter().map(|c| c.label.clone()).collect(),
    )
}

/// Float LP output can carry tiny negative or stray weights; drop them and
/// renormalize.
fn clean_distribution<T: Scalar>(p: Vec<T>) -> Vec<T> {
    if T::EXACT {
        return p;
    }
    let floor = T::from_f64(1e-12);
    let kept: Vec<T> = p.into_iter().map(|v| if v <= floor { T::zero() } else { v }).collect();
    let mut total = T::zero();
    for v in &kept {
        total += v;
    }
    kept.into_iter().map(|v| v / total.clone()).collect()
}

/// Solves the game over the full adaptive searcher space.
///
/// Rows are all hider allocations. Columns start from a best response to
/// the equalizing hider (plus the constructive strategies when enabled);
/// each round solves the restricted game and adds the best response to the
/// hider's restricted optimum until it no longer improves by more than
/// `eps`.
pub fn solve_game<T: Scalar>(inst: &Instance<T>, opts: &SolveOptions<T>) -> Result<SolveResult<T>> {
    let allocs = inst.allocations();
    let variant = inst.variant;
    let costs = &inst.costs;
    let mut columns: Vec<Column<T>> = Vec::new();
    let add = |label: String, policy: SearcherPolicy<T>, columns: &mut Vec<Column<T>>| -> Result<bool> {
        let payoffs = payoff_vector(costs, &policy, &allocs, variant)?;
        if columns.iter().any(|c| c.payoffs == payoffs) {
            return Ok(false);
        }
        columns.push(Column { label, policy, payoffs });
        Ok(true)
    };

    let eq = equalizing_hider(inst)?;
    let br = best_response(costs, &eq, variant, opts.state_budget)?;
    add(
        "br-0".to_string(),
        SearcherPolicy::DecisionTree(br.policy),
        &mut columns,
    )?;
    if opts.seed_constructive {
        for (label, p) in constructive_policies(inst) {
            add(label, p, &mut columns)?;
        }
    }

    let mut iterations = 0;
    loop {
        iterations += 1;
        let game = restricted_game(&allocs, &columns)?;
        let sol = game.solve();
        let row = clean_distribution(sol.row);
        let hider = HiderMixed::new(
            inst.n(),
            inst.k,
            variant.look,
            allocs.iter().cloned().zip(row).collect(),
        )?;
        let br = best_response(costs, &hider, variant, opts.state_budget)?;
        let gap = sol.value.clone() - br.value.clone();
        let improves = gap > opts.eps;
        let added = improves
            && add(
                format!("br-{iterations}"),
                SearcherPolicy::DecisionTree(br.policy),
                &mut columns,
            )?;
        if !added || iterations >= opts.max_iterations {
            if improves && !added && T::EXACT {
                return Err(Error::PolicyViolation(
                    "best response repeated an existing column".into(),
                ));
            }
            let weights = clean_distribution(sol.col);
            let mut searcher_weights = weights;
            searcher_weights.resize(columns.len(), T::zero());
            return Ok(SolveResult {
                value: sol.value,
                hider,
                columns,
                searcher_weights,
                iterations,
                duality_gap: gap,
                lower_bound: br.value,
            });
        }
    }
}

/// Solves the regret game with the searcher restricted to normal
/// strategies: every search sequence is a column, duplicates removed.
pub fn solve_normal_only<T: Scalar>(inst: &Instance<T>) -> Result<SolveResult<T>> {
    let (n, k) = (inst.n(), inst.k);
    let look = inst.variant.look;
    let allocs = inst.allocations();
    let sequences: Vec<Vec<usize>> = match look {
        LookMode::Multi => all_sequences(n, k),
        LookMode::Single => permutations(&(0..n).collect::<Vec<_>>()),
    };
    let mut columns: Vec<Column<T>> = Vec::new();
    for s in sequences {
        let seq = SearchSequence::new(s, n, k, look)?;
        let payoffs = allocs
            .iter()
            .map(|x| {
                let (cost, regret) = sequence_outcome(&inst.costs, &seq, x)?;
                Ok(match inst.variant.payoff {
                    PayoffMode::Cost => cost,
                    PayoffMode::Regret => regret,
                })
            })
            .collect::<Result<Vec<T>>>()?;
        if columns.iter().any(|c| c.payoffs == payoffs) {
            continue;
        }
        let label = seq.to_string();
        let policy = SearcherPolicy::Normal(NormalStrategy::point(seq, n, k, look)?);
        columns.push(Column { label, policy, payoffs });
    }
    let game = restricted_game(&allocs, &columns)?;
    let sol = game.solve();
    let hider = HiderMixed::new(
        n,
        k,
        look,
        allocs.iter().cloned().zip(clean_distribution(sol.row)).collect(),
    )?;
    Ok(SolveResult {
        value: sol.value.clone(),
        hider,
        columns,
        searcher_weights: clean_distribution(sol.col),
        iterations: 1,
        duality_gap: T::zero(),
        lower_bound: sol.value,
    })
}

/// Searcher mixture of a solve result as one normal strategy, when every
/// column with positive weight is normal.
pub fn searcher_as_normal<T: Scalar>(res: &SolveResult<T>) -> Option<NormalStrategy<T>> {
    let mut parts = Vec::new();
    for (c, w) in res.searcher_support() {
        match &c.policy {
            SearcherPolicy::Normal(m) => parts.push((w.clone(), m.clone())),
            _ => return None,
        }
    }
    NormalStrategy::combine(parts).ok()
}
