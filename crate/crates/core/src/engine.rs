//! Exact evaluation of searcher policies.
//!
//! Given an allocation the game is deterministic apart from the policy's own
//! randomization: opening box `i` yields a ball iff `found_i < x_i`. The
//! engine recurses over `(InfoState, PolicyState)` pairs and memoizes them,
//! charging cost on every open and regret on every empty reveal.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{
    clairvoyant_cost, Allocation, CostVector, GameVariant, HiderMixed, InfoState, LookMode, PayoffMode,
};
use crate::scalar::Scalar;
use crate::strategies::{NormalStrategy, PolicyState, SearchSequence, SearcherPolicy};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult<T> {
    pub expected_payoff: T,
    pub expected_cost: T,
    pub expected_regret: T,
    /// Distinct `(info, policy state)` nodes visited.
    pub node_count: usize,
    /// Conditional payoff per allocation, in the hider's support order.
    pub breakdown: Vec<(Allocation, T)>,
}

impl<T: Scalar> EvalResult<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "expected_payoff": self.expected_payoff.to_json(),
            "expected_cost": self.expected_cost.to_json(),
            "expected_regret": self.expected_regret.to_json(),
            "node_count": self.node_count,
            "breakdown": self.breakdown.iter().map(|(x, v)| json!({
                "allocation": x.to_string(),
                "payoff": v.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

struct Evaluator<'a, T> {
    costs: &'a CostVector<T>,
    policy: &'a SearcherPolicy<T>,
    look: LookMode,
    x: &'a Allocation,
    k: u32,
    max_opens: u32,
    memo: HashMap<(InfoState, PolicyState), (T, T)>,
}

impl<T: Scalar> Evaluator<'_, T> {
    /// Expected (cost, regret) from here to the end.
    fn run(&mut self, info: &InfoState, state: &PolicyState, opens: u32) -> Result<(T, T)> {
        if info.total_found() == self.k {
            return Ok((T::zero(), T::zero()));
        }
        let key = (info.clone(), state.clone());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        if opens >= self.max_opens {
            return Err(Error::PolicyViolation(format!(
                "policy exceeded {} opens without finding every ball",
                self.max_opens
            )));
        }
        let branches = self.policy.decide(info, state, self.k, self.look)?;
        check_distribution(&branches.iter().map(|b| b.prob.clone()).collect::<Vec<_>>())?;
        let (mut cost, mut regret) = (T::zero(), T::zero());
        for b in branches {
            let i = b.open;
            if i >= info.n() || !info.admissible(i, self.look) {
                return Err(Error::PolicyViolation(format!(
                    "{} opened box {} at found={:?} dead={:?}",
                    self.policy.kind(),
                    i + 1,
                    info.found,
                    info.dead
                )));
            }
            let c = self.costs.get(i).clone();
            let has_ball = info.found[i] < self.x.balls()[i];
            let next = if has_ball {
                info.after_ball(i)
            } else {
                info.after_empty(i)
            };
            let (fc, fr) = self.run(&next, &b.next, opens + 1)?;
            let step_regret = if has_ball { fr } else { fr + c.clone() };
            cost += &(b.prob.clone() * (c + fc));
            regret += &(b.prob * step_regret);
        }
        self.memo.insert(key, (cost.clone(), regret.clone()));
        Ok((cost, regret))
    }
}

fn check_distribution<T: Scalar>(probs: &[T]) -> Result<()> {
    let mut total = T::zero();
    for p in probs {
        if *p < T::zero() {
            return Err(Error::NotADistribution(format!("negative branch probability {p}")));
        }
        total += p;
    }
    let tol = if T::EXACT { T::zero() } else { T::from_f64(1e-9) };
    if probs.is_empty() || !total.approx_eq(&T::one(), &tol) {
        return Err(Error::NotADistribution(format!("branch probabilities sum to {total}")));
    }
    Ok(())
}

fn payoff_of<T: Scalar>(variant: GameVariant, cost: &T, regret: &T) -> T {
    match variant.payoff {
        PayoffMode::Cost => cost.clone(),
        PayoffMode::Regret => regret.clone(),
    }
}

/// Expected cost and regret of `policy` against the pure allocation `x`.
pub fn evaluate<T: Scalar>(
    costs: &CostVector<T>,
    policy: &SearcherPolicy<T>,
    x: &Allocation,
    variant: GameVariant,
) -> Result<EvalResult<T>> {
    let n = costs.len();
    if x.n() != n {
        return Err(Error::InvalidInstance(format!(
            "allocation {x} does not have {n} boxes"
        )));
    }
    if variant.look == LookMode::Single && !x.is_single_look() {
        return Err(Error::InvalidInstance(format!("{x} is not a single-look allocation")));
    }
    let k = x.total();
    variant.check(n, k)?;
    let mut ev = Evaluator {
        costs,
        policy,
        look: variant.look,
        x,
        k,
        max_opens: n as u32 + k,
        memo: HashMap::new(),
    };
    let (cost, regret) = ev.run(&InfoState::start(n), &policy.start(), 0)?;
    debug_assert!(
        !T::EXACT || cost.clone() - clairvoyant_cost(costs, x) == regret,
        "cost/regret decomposition"
    );
    let payoff = payoff_of(variant, &cost, &regret);
    Ok(EvalResult {
        expected_payoff: payoff.clone(),
        expected_cost: cost,
        expected_regret: regret,
        node_count: ev.memo.len(),
        breakdown: vec![(x.clone(), payoff)],
    })
}

/// Probability-weighted evaluation over the hider's support.
pub fn evaluate_mixed<T: Scalar>(
    costs: &CostVector<T>,
    policy: &SearcherPolicy<T>,
    hider: &HiderMixed<T>,
    variant: GameVariant,
) -> Result<EvalResult<T>> {
    let (mut payoff, mut cost, mut regret) = (T::zero(), T::zero(), T::zero());
    let mut nodes = 0;
    let mut breakdown = Vec::with_capacity(hider.support().len());
    for (x, p) in hider.support() {
        let r = evaluate(costs, policy, x, variant)?;
        payoff += &(p.clone() * r.expected_payoff.clone());
        cost += &(p.clone() * r.expected_cost);
        regret += &(p.clone() * r.expected_regret);
        nodes += r.node_count;
        breakdown.push((x.clone(), r.expected_payoff));
    }
    Ok(EvalResult {
        expected_payoff: payoff,
        expected_cost: cost,
        expected_regret: regret,
        node_count: nodes,
        breakdown,
    })
}

/// Payoff of `policy` against each allocation in `allocs`.
pub fn payoff_vector<T: Scalar>(
    costs: &CostVector<T>,
    policy: &SearcherPolicy<T>,
    allocs: &[Allocation],
    variant: GameVariant,
) -> Result<Vec<T>> {
    allocs
        .iter()
        .map(|x| Ok(evaluate(costs, policy, x, variant)?.expected_payoff))
        .collect()
}

/// Follows `a` with the skip rule; returns (total cost, total regret).
pub fn sequence_outcome<T: Scalar>(costs: &CostVector<T>, a: &SearchSequence, x: &Allocation) -> Result<(T, T)> {
    let n = costs.len();
    if x.n() != n {
        return Err(Error::InvalidInstance(format!(
            "allocation {x} does not have {n} boxes"
        )));
    }
    let mut info = InfoState::start(n);
    let (mut cost, mut regret) = (T::zero(), T::zero());
    for &i in a.boxes() {
        if info.total_found() == x.total() {
            break;
        }
        if info.dead[i] {
            continue;
        }
        cost += costs.get(i);
        if info.found[i] < x.balls()[i] {
            info = info.after_ball(i);
        } else {
            regret += costs.get(i);
            info = info.after_empty(i);
        }
    }
    if info.total_found() < x.total() {
        return Err(Error::MalformedSequence(format!("{a} does not find every ball of {x}")));
    }
    Ok((cost, regret))
}

/// `R(a, x)`: regret of search sequence `a` against `x`.
pub fn sequence_regret<T: Scalar>(costs: &CostVector<T>, a: &SearchSequence, x: &Allocation) -> Result<T> {
    Ok(sequence_outcome(costs, a, x)?.1)
}

/// Mixture-weighted [`sequence_regret`].
pub fn normal_expected_regret<T: Scalar>(costs: &CostVector<T>, m: &NormalStrategy<T>, x: &Allocation) -> Result<T> {
    let mut out = T::zero();
    for (a, p) in m.mixture() {
        out += &(p.clone() * sequence_regret(costs, a, x)?);
    }
    Ok(out)
}

/// One simulated game.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayTrace {
    pub allocation: Allocation,
    /// `(box, found a ball)` per open.
    pub opens: Vec<(usize, bool)>,
    pub cost: f64,
    pub regret: f64,
}

/// Samples the policy's randomization (and the hider's, if mixed) with a
/// seeded generator. A cross-check only; exact claims use [`evaluate`].
pub fn play<T: Scalar>(
    costs: &CostVector<T>,
    policy: &SearcherPolicy<T>,
    hider: &HiderMixed<T>,
    variant: GameVariant,
    rng: &mut ChaCha8Rng,
) -> Result<PlayTrace> {
    let weights: Vec<f64> = hider.support().iter().map(|(_, p)| p.to_f64()).collect();
    let x = hider.support()[sample(&weights, rng)].0.clone();
    let n = costs.len();
    let k = x.total();
    let mut info = InfoState::start(n);
    let mut state = policy.start();
    let mut trace = PlayTrace {
        allocation: x.clone(),
        opens: Vec::new(),
        cost: 0.0,
        regret: 0.0,
    };
    while info.total_found() < k {
        if trace.opens.len() as u32 >= n as u32 + k {
            return Err(Error::PolicyViolation("policy did not terminate".into()));
        }
        let branches = policy.decide(&info, &state, k, variant.look)?;
        let probs: Vec<f64> = branches.iter().map(|b| b.prob.to_f64()).collect();
        let b = &branches[sample(&probs, rng)];
        let i = b.open;
        if !info.admissible(i, variant.look) {
            return Err(Error::PolicyViolation(format!("opened inadmissible box {}", i + 1)));
        }
        let c = costs.get(i).to_f64();
        trace.cost += c;
        let ball = info.found[i] < x.balls()[i];
        if ball {
            info = info.after_ball(i);
        } else {
            trace.regret += c;
            info = info.after_empty(i);
        }
        trace.opens.push((i, ball));
        state = b.next.clone();
    }
    Ok(trace)
}

/// Mean payoff over `trials` seeded games.
pub fn simulate<T: Scalar>(
    costs: &CostVector<T>,
    policy: &SearcherPolicy<T>,
    hider: &HiderMixed<T>,
    variant: GameVariant,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..trials {
        let t = play(costs, policy, hider, variant, &mut rng)?;
        total += match variant.payoff {
            PayoffMode::Cost => t.cost,
            PayoffMode::Regret => t.regret,
        };
    }
    Ok(total / trials.max(1) as f64)
}

fn sample(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::strategies::{searcher_equal_cost, searcher_uniform_adaptive};

    fn cv(c: &[f64]) -> CostVector<Rational> {
        CostVector::from_f64s(c).unwrap()
    }

    fn x(s: &str) -> Allocation {
        s.parse().unwrap()
    }

    #[test]
    fn equal_cost_worked_example() {
        let c = cv(&[1.0, 1.0]);
        let p = searcher_equal_cost(2, 2).unwrap();
        for a in ["(2,0)", "(1,1)", "(0,2)"] {
            let r = evaluate(&c, &p, &x(a), GameVariant::MULTI_COST).unwrap();
            assert_eq!(r.expected_payoff, Rational::ratio(8, 3), "{a}");
        }
    }

    #[test]
    fn uniform_adaptive_worked_example() {
        let r = evaluate(
            &cv(&[1.0, 1.0]),
            &searcher_uniform_adaptive(),
            &x("(2,0)"),
            GameVariant::MULTI_COST,
        )
        .unwrap();
        assert_eq!(r.expected_payoff, Rational::ratio(11, 4));
    }

    #[test]
    fn one_box() {
        let r = evaluate(
            &cv(&[3.0]),
            &searcher_uniform_adaptive(),
            &x("(4)"),
            GameVariant::MULTI_REGRET,
        )
        .unwrap();
        assert_eq!(r.expected_cost, Rational::from_u64(12));
        assert_eq!(r.expected_regret, Rational::from_u64(0));
    }

    #[test]
    fn sequences() {
        let c = cv(&[2.0, 3.0, 5.0]);
        let a = SearchSequence::from_one_based(&[1, 3, 3, 2, 1, 2], 3, 2, LookMode::Multi).unwrap();
        assert_eq!(sequence_regret(&c, &a, &x("(0,1,1)")).unwrap(), Rational::from_u64(7));
        assert_eq!(sequence_regret(&c, &a, &x("(2,0,0)")).unwrap(), Rational::from_u64(8));
        assert_eq!(sequence_regret(&c, &a, &x("(1,0,1)")).unwrap(), Rational::from_u64(0));
    }

    #[test]
    fn single_look_second_open_is_rejected() {
        let tree = crate::solver::DecisionTreePolicy::new(
            2,
            [
                (InfoState::start(2), 0),
                (
                    InfoState {
                        found: vec![1, 0],
                        dead: vec![false, false],
                    },
                    0,
                ),
            ]
            .into_iter()
            .collect(),
        );
        let p = SearcherPolicy::<Rational>::DecisionTree(tree);
        let err = evaluate(&cv(&[1.0, 1.0]), &p, &x("(1,1)"), GameVariant::SINGLE_COST).unwrap_err();
        assert!(matches!(err, Error::PolicyViolation(_)));
    }

    #[test]
    fn seeded_play_is_reproducible() {
        let c = cv(&[2.0, 1.0]);
        let h = crate::strategies::hider_equalizing_multi(&c, 2).unwrap();
        let p = searcher_uniform_adaptive();
        let a = simulate(&c, &p, &h, GameVariant::MULTI_COST, 200, 7).unwrap();
        let b = simulate(&c, &p, &h, GameVariant::MULTI_COST, 200, 7).unwrap();
        assert_eq!(a, b);
        let exact = crate::values::value_multi_cost_equalizing(&c, 2).to_f64();
        assert!((simulate(&c, &p, &h, GameVariant::MULTI_COST, 20_000, 1).unwrap() - exact).abs() < 0.1);
    }
}
