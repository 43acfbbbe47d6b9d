//! Property suites over randomized and exhaustive instances, run in exact
//! arithmetic. Each suite reports counterexamples verbatim.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::engine::{evaluate_mixed, normal_expected_regret, sequence_regret};
use crate::error::{Error, Result};
use crate::model::{enumerate_allocations, Allocation, CostVector, GameVariant, HiderMixed, Instance, LookMode};
use crate::oracle::{enumerate_pure_strategies, oracle_best_response_value, oracle_matrix_game};
use crate::scalar::{Rational, Scalar};
use crate::solver::{
    best_response, constructive_policies, equalizing_hider, solve_game, SolveOptions, DEFAULT_STATE_BUDGET,
};
use crate::strategies::{
    all_sequences, hider_equalizing_multi, hider_equalizing_single, multi_regret_column_weights, normal_pattern_k2,
    permutations, searcher_uniform_adaptive, NormalStrategy, SearchSequence, SearcherPolicy,
};
use crate::symfun::{SymKind, SymTable};
use crate::values::{
    cutoff_b_multi_n2, cutoff_b_single, regret_reduction_matrix, value_equal_cost, value_multi_cost_equalizing,
    value_multi_regret, value_single_regret,
};

pub const SUITES: [&str; 8] = [
    "equalizer",
    "symmetry-k2",
    "permutation-invariance",
    "ending-symmetry",
    "closed-form",
    "oracle",
    "last-box-reduction",
    "all",
];

/// Older suite names still accepted.
pub const SUITE_ALIASES: [(&str, &str); 3] = [
    ("lemma5", "permutation-invariance"),
    ("lemma6", "ending-symmetry"),
    ("table2", "last-box-reduction"),
];

/// Canonical name of a suite, resolving aliases.
pub fn suite_name(name: &str) -> Option<&'static str> {
    SUITES
        .iter()
        .copied()
        .find(|s| *s == name)
        .or_else(|| SUITE_ALIASES.iter().find(|(a, _)| *a == name).map(|(_, s)| *s))
}

const SEED: u64 = 0x5eed_b0c5;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub checked: usize,
    pub counterexamples: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            checked: 0,
            counterexamples: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.counterexamples.push(what());
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "checked": self.checked,
            "passed": self.checked - self.counterexamples.len(),
            "counterexamples": self.counterexamples,
        })
    }
}

/// Runs one named suite. `budget` is the number of random draws; `None`
/// uses the suite's default.
pub fn run_suite(name: &str, budget: Option<usize>) -> Result<Vec<SuiteReport>> {
    let one = |r: Result<SuiteReport>| r.map(|r| vec![r]);
    let name = suite_name(name).unwrap_or(name);
    match name {
        "equalizer" => one(equalizer(budget.unwrap_or(100))),
        "symmetry-k2" => one(symmetry_k2(budget.unwrap_or(4))),
        "permutation-invariance" => one(permutation_invariance(budget.unwrap_or(2))),
        "ending-symmetry" => one(ending_symmetry(budget.unwrap_or(2))),
        "closed-form" => one(closed_form(budget.unwrap_or(5))),
        "oracle" => one(oracle(budget.unwrap_or(10))),
        "last-box-reduction" => one(last_box_reduction(budget.unwrap_or(25))),
        "all" => {
            let mut out = Vec::new();
            for s in SUITES.iter().filter(|s| **s != "all") {
                out.extend(run_suite(s, budget)?);
            }
            Ok(out)
        }
        other => Err(Error::Parse(format!(
            "unknown suite {other:?}; expected one of {}",
            SUITES.join(", ")
        ))),
    }
}

/// Random costs `a / b` with `1 <= a <= 40`, `1 <= b <= 4`.
pub fn random_costs(rng: &mut ChaCha8Rng, n: usize) -> CostVector<Rational> {
    let costs = (0..n)
        .map(|_| Rational::ratio(rng.gen_range(1..=40), rng.gen_range(1..=4)))
        .collect();
    CostVector::new(costs).expect("positive")
}

fn sorted_desc(mut c: CostVector<Rational>) -> CostVector<Rational> {
    let mut v = c.as_slice().to_vec();
    v.sort_by(|a, b| b.cmp(a));
    c = CostVector::new(v).expect("positive");
    c
}

fn show(c: &CostVector<Rational>) -> String {
    let parts: Vec<String> = c.as_slice().iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// Closed-form value an equalizing hider forces, where one is known.
fn equalized_value(
    costs: &CostVector<Rational>,
    k: u32,
    variant: GameVariant,
) -> Option<(HiderMixed<Rational>, Rational)> {
    match (variant.look, variant.payoff) {
        (LookMode::Multi, crate::model::PayoffMode::Cost) => Some((
            hider_equalizing_multi(costs, k).ok()?,
            value_multi_cost_equalizing(costs, k),
        )),
        (LookMode::Multi, crate::model::PayoffMode::Regret) => {
            Some((hider_equalizing_multi(costs, k).ok()?, value_multi_regret(costs, k)))
        }
        (LookMode::Single, crate::model::PayoffMode::Regret) => Some((
            hider_equalizing_single(costs, k).ok()?,
            value_single_regret(costs, k).ok()?,
        )),
        (LookMode::Single, crate::model::PayoffMode::Cost) => None,
    }
}

/// Every policy is indifferent against the equalizing hider. Each draw
/// picks an instance with `n <= 4`, `k <= 3` and tests a random admissible
/// policy, the uniform policy and every constructive policy that applies.
pub fn equalizer(budget: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut rep = SuiteReport::new("equalizer");
    let variants = [
        GameVariant::MULTI_COST,
        GameVariant::MULTI_REGRET,
        GameVariant::SINGLE_REGRET,
    ];
    for _ in 0..budget {
        let variant = variants[rng.gen_range(0..variants.len())];
        let n = rng.gen_range(1..=4usize);
        let k = rng.gen_range(1..=3u32);
        if variant.look == LookMode::Single && k as usize > n {
            continue;
        }
        let costs = random_costs(&mut rng, n);
        let inst = Instance::new(costs.clone(), k, variant)?;
        let (hider, want) = equalized_value(&costs, k, variant).expect("variant has an equalizer");
        let mut policies: Vec<(String, SearcherPolicy<Rational>)> = vec![
            ("random".into(), SearcherPolicy::Random { seed: rng.gen() }),
            ("uniform-adaptive".into(), searcher_uniform_adaptive()),
        ];
        policies.extend(constructive_policies(&inst));
        for (label, p) in policies {
            let got = evaluate_mixed(&costs, &p, &hider, variant)?.expected_payoff;
            rep.check(got == want, || {
                format!("{variant} costs={} k={k} {label}: got {got}, want {want}", show(&costs))
            });
        }
    }
    Ok(rep)
}

/// Expected regret of the two-ball pattern strategy ending in `y` against
/// `x`, where the case analysis gives it in closed form.
pub fn k2_case_value(costs: &CostVector<Rational>, y: &Allocation, x: &Allocation) -> Option<Rational> {
    let n = costs.len();
    let boxes = |a: &Allocation| -> Vec<usize> {
        (0..n)
            .flat_map(|b| std::iter::repeat_n(b, a.balls()[b] as usize))
            .collect()
    };
    let sum_except = |skip: &[usize]| {
        (0..n)
            .filter(|t| !skip.contains(t))
            .fold(Rational::from_u64(0), |acc, t| acc + costs.get(t).clone())
    };
    let (yb, xb) = (boxes(y), boxes(x));
    let double = |b: &[usize]| b[0] == b[1];
    if x == y {
        return None;
    }
    if let Some(i) = (0..n).find(|&i| x.balls()[i] + y.balls()[i] > 2) {
        return Some(sum_except(&[i]));
    }
    let half = Rational::ratio(1, 2);
    let third = Rational::ratio(1, 3);
    let two_thirds = Rational::ratio(2, 3);
    let pair = |a: usize, b: usize| costs.get(a).clone() + costs.get(b).clone();
    Some(match (double(&yb), double(&xb)) {
        (true, true) => half * sum_except(&[yb[0], xb[0]]),
        (true, false) => half * pair(xb[0], xb[1]) + two_thirds * sum_except(&[yb[0], xb[0], xb[1]]),
        (false, true) => half * pair(yb[0], yb[1]) + two_thirds * sum_except(&[xb[0], yb[0], yb[1]]),
        (false, false) => {
            let shared: Vec<usize> = yb.iter().copied().filter(|b| xb.contains(b)).collect();
            if shared.len() == 1 {
                let s = shared[0];
                let a = *yb.iter().find(|&&b| b != s).expect("distinct");
                let c = *xb.iter().find(|&&b| b != s).expect("distinct");
                half * pair(a, c) + Rational::ratio(5, 6) * sum_except(&[a, s, c])
            } else {
                third * (pair(yb[0], yb[1]) + pair(xb[0], xb[1]))
                    + two_thirds * sum_except(&[yb[0], yb[1], xb[0], xb[1]])
            }
        }
    })
}

/// `R(T_y, x) = R(T_x, y)` for the two-ball pattern strategies, and the
/// case values, for `n = 2..=5` on `budget` random cost vectors each.
pub fn symmetry_k2(budget: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let mut rep = SuiteReport::new("symmetry-k2");
    for n in 2..=5usize {
        let patterns = enumerate_allocations(n, 2, LookMode::Multi)?;
        let strategies: Vec<NormalStrategy<Rational>> = patterns
            .iter()
            .map(|y| normal_pattern_k2(n, y))
            .collect::<Result<_>>()?;
        for _ in 0..budget {
            let costs = random_costs(&mut rng, n);
            let table: Vec<Vec<Rational>> = strategies
                .iter()
                .map(|s| {
                    patterns
                        .iter()
                        .map(|x| normal_expected_regret(&costs, s, x))
                        .collect::<Result<_>>()
                })
                .collect::<Result<_>>()?;
            for (a, y) in patterns.iter().enumerate() {
                for (b, x) in patterns.iter().enumerate() {
                    let (ryx, rxy) = (&table[a][b], &table[b][a]);
                    rep.check(ryx == rxy, || {
                        format!("costs={} y={y} x={x}: R(T_y,x)={ryx} R(T_x,y)={rxy}", show(&costs))
                    });
                    if let Some(want) = k2_case_value(&costs, y, x) {
                        rep.check(*ryx == want, || {
                            format!("costs={} y={y} x={x}: got {ryx}, case value {want}", show(&costs))
                        });
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Distinct orderings of `v`.
fn distinct_orders(v: &[usize]) -> Vec<Vec<usize>> {
    let mut out = permutations(v);
    out.sort();
    out.dedup();
    out
}

/// Reordering the first or last `k` entries of a search sequence never
/// changes its regret; exhaustive for `n, k <= 3`.
pub fn permutation_invariance(budget: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let mut rep = SuiteReport::new("permutation-invariance");
    for _ in 0..budget {
        for n in 1..=3usize {
            for k in 1..=3u32 {
                let costs = random_costs(&mut rng, n);
                let allocs = enumerate_allocations(n, k, LookMode::Multi)?;
                let ku = k as usize;
                for s in all_sequences(n, k) {
                    let base = SearchSequence::new(s.clone(), n, k, LookMode::Multi)?;
                    let want: Vec<Rational> = allocs
                        .iter()
                        .map(|x| sequence_regret(&costs, &base, x))
                        .collect::<Result<_>>()?;
                    let len = s.len();
                    let mut variants = Vec::new();
                    for head in distinct_orders(&s[..ku]) {
                        variants.push([head, s[ku..].to_vec()].concat());
                    }
                    for tail in distinct_orders(&s[len - ku..]) {
                        variants.push([s[..len - ku].to_vec(), tail].concat());
                    }
                    for v in variants {
                        let seq = SearchSequence::new(v, n, k, LookMode::Multi)?;
                        for (x, w) in allocs.iter().zip(&want) {
                            let got = sequence_regret(&costs, &seq, x)?;
                            rep.check(got == *w, || {
                                format!("costs={} {base} vs {seq} on {x}: {w} != {got}", show(&costs))
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// A sequence ending with `x` against `y` with `x_i + y_i > k` has regret
/// `sum_{j != i} c_j`, hence the symmetry; exhaustive for `n, k <= 3`.
pub fn ending_symmetry(budget: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let mut rep = SuiteReport::new("ending-symmetry");
    for _ in 0..budget {
        for n in 2..=3usize {
            for k in 1..=3u32 {
                let costs = random_costs(&mut rng, n);
                let total = costs.total();
                let allocs = enumerate_allocations(n, k, LookMode::Multi)?;
                for s in all_sequences(n, k) {
                    let a = SearchSequence::new(s, n, k, LookMode::Multi)?;
                    let x = a.ending(n, k);
                    for y in &allocs {
                        if let Some(i) = (0..n).find(|&i| x[i] + y.balls()[i] > k) {
                            let want = total.clone() - costs.get(i).clone();
                            let got = sequence_regret(&costs, &a, y)?;
                            rep.check(got == want, || {
                                format!("costs={} a={a} y={y}: got {got}, want {want}", show(&costs))
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Solver value equals the closed form in each solved regime. `budget`
/// instances per regime.
pub fn closed_form(budget: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let mut rep = SuiteReport::new("closed-form");
    let opts = SolveOptions::<Rational> {
        seed_constructive: false,
        ..SolveOptions::default()
    };
    for _ in 0..budget {
        for (label, inst, want) in closed_form_instances(&mut rng)? {
            let got = solve_game(&inst, &opts)?.value;
            rep.check(got == want, || {
                format!(
                    "{label} costs={} k={}: solver {got}, closed form {want}",
                    show(&inst.costs),
                    inst.k
                )
            });
        }
    }
    Ok(rep)
}

/// One random instance per regime with its closed-form value.
pub fn closed_form_instances(rng: &mut ChaCha8Rng) -> Result<Vec<(&'static str, Instance<Rational>, Rational)>> {
    let mut out = Vec::new();

    let n = rng.gen_range(1..=4usize);
    let k = rng.gen_range(1..=4u32);
    let c = Rational::ratio(rng.gen_range(1..=20), 1);
    let costs = CostVector::uniform(n, c.clone())?;
    out.push((
        "equal-cost",
        Instance::new(costs, k, GameVariant::MULTI_COST)?,
        value_equal_cost::<Rational>(n, k) * c,
    ));

    let costs = sorted_desc(random_costs(rng, 2));
    let k = rng.gen_range(1..=4u32);
    let want = cutoff_b_multi_n2(costs.get(0), costs.get(1), k)?.value;
    out.push(("n2-cost", Instance::new(costs, k, GameVariant::MULTI_COST)?, want));

    let n = rng.gen_range(1..=4usize);
    let k = rng.gen_range(1..=3u32);
    let costs = random_costs(rng, n);
    let want = value_multi_regret(&costs, k);
    out.push((
        "multi-regret",
        Instance::new(costs, k, GameVariant::MULTI_REGRET)?,
        want,
    ));

    let n = rng.gen_range(2..=5usize);
    let costs = sorted_desc(random_costs(rng, n));
    let want = cutoff_b_single(&costs)?.value;
    out.push((
        "single-regret",
        Instance::new(costs, n as u32 - 1, GameVariant::SINGLE_REGRET)?,
        want,
    ));
    Ok(out)
}

/// Best response equals brute-force enumeration of pure strategies, and the
/// solved game value equals the brute-force matrix game, on two boxes with
/// at most two balls.
pub fn oracle(budget: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 11);
    let mut rep = SuiteReport::new("oracle");
    let variants = [
        GameVariant::MULTI_COST,
        GameVariant::MULTI_REGRET,
        GameVariant::SINGLE_COST,
        GameVariant::SINGLE_REGRET,
    ];
    for variant in variants {
        for k in 1..=2u32 {
            let trees = enumerate_pure_strategies(2, k, variant)?;
            let allocs = enumerate_allocations(2, k, variant.look)?;
            for _ in 0..budget {
                let costs = random_costs(&mut rng, 2);
                let inst = Instance::new(costs.clone(), k, variant)?;
                let mut hiders = vec![equalizing_hider(&inst)?];
                let weights: Vec<(Allocation, Rational)> = allocs
                    .iter()
                    .map(|x| (x.clone(), Rational::from_u64(rng.gen_range(0..=5))))
                    .collect();
                if let Ok(h) = HiderMixed::from_weights(2, k, variant.look, weights) {
                    hiders.push(h);
                }
                let x = allocs[rng.gen_range(0..allocs.len())].clone();
                hiders.push(HiderMixed::point(x, variant.look)?);
                for h in hiders {
                    let dp = best_response(&costs, &h, variant, DEFAULT_STATE_BUDGET)?.value;
                    let brute = oracle_best_response_value(&costs, &h, variant, &trees);
                    rep.check(dp == brute, || {
                        format!(
                            "{variant} costs={} k={k} hider={}: dp {dp}, brute force {brute}",
                            show(&costs),
                            h.to_json()
                        )
                    });
                }
                let solved = solve_game(&inst, &SolveOptions::default())?.value;
                let brute = oracle_matrix_game(&costs, k, variant)?.solve().value;
                rep.check(solved == brute, || {
                    format!(
                        "{variant} costs={} k={k}: solver {solved}, brute-force game {brute}",
                        show(&costs)
                    )
                });
            }
        }
    }
    Ok(rep)
}

/// The last-box reduction matrix has value `V([n],k)` and the column
/// weights `P_s` hold every row to it.
pub fn last_box_reduction(budget: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 13);
    let mut rep = SuiteReport::new("last-box-reduction");
    for _ in 0..budget {
        let n = rng.gen_range(2..=4usize);
        let k = rng.gen_range(1..=3u32);
        let costs = random_costs(&mut rng, n);
        let v = value_multi_regret(&costs, k);
        let g = regret_reduction_matrix(&costs, k)?;
        let sol = g.solve();
        rep.check(sol.value == v, || {
            format!("costs={} k={k}: matrix value {}, V = {v}", show(&costs), sol.value)
        });
        let t = SymTable::new(&costs, k as usize + 1, SymKind::Complete);
        let p = multi_regret_column_weights(&t, n, k);
        let total = p.iter().fold(Rational::from_u64(0), |a, b| a + b.clone());
        rep.check(
            total == Rational::from_u64(1) && p.iter().all(|w| *w >= Rational::from_u64(0)),
            || format!("costs={} k={k}: P_s = {p:?} is not a distribution", show(&costs)),
        );
        for row in 0..g.rows() {
            let got = g.col_payoff_against(&p, row);
            rep.check(got == v, || {
                format!("costs={} k={k} row {row}: P_s gives {got}, V = {v}", show(&costs))
            });
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", None).is_err());
    }

    #[test]
    fn small_budgets_pass() {
        for s in ["equalizer", "last-box-reduction", "ending-symmetry"] {
            for r in run_suite(s, Some(2)).unwrap() {
                assert!(r.passed(), "{:?}", r.counterexamples);
                assert!(r.checked > 0);
            }
        }
    }
}
