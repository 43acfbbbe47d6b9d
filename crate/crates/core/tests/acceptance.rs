//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the target
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use boxsearch::engine::{evaluate, evaluate_mixed};
use boxsearch::solver::{check_equalizing_property, solve_game, SolveOptions};
use boxsearch::strategies::*;
use boxsearch::values::{value_multi_cost_equalizing, value_multi_regret, value_single_regret};
use boxsearch::verify::{self, closed_form_instances, SuiteReport};
use boxsearch::{Allocation, CostVector, GameVariant, HiderMixed, Instance, LookMode, Rational, Scalar};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const VALUE_TOL: f64 = 5e-5;
const RATIO_TOL: f64 = 1e-6;
const FLOAT_AGREEMENT: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn allocs(xs: &[&str]) -> BTreeSet<Allocation> {
    xs.iter().map(|s| s.parse().unwrap()).collect()
}

/// Solves in float and rational mode and checks value, support and the
/// equalizing property.
fn check_example(
    costs: &[&str],
    variant: GameVariant,
    expected: f64,
    support: &BTreeSet<Allocation>,
    limit: Duration,
) -> Outcome {
    let start = Instant::now();
    let cf: Vec<f64> = costs.iter().map(|c| f64::parse(c).unwrap()).collect();
    let inst = Instance::new(CostVector::new(cf).unwrap(), 2, variant).unwrap();
    let res = solve_game(&inst, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let report = check_equalizing_property(&res.hider, &inst.costs, RATIO_TOL);
    let got: BTreeSet<Allocation> = report.support.iter().cloned().collect();
    let mut problems = Vec::new();
    if (res.value - expected).abs() > VALUE_TOL {
        problems.push(format!("value {} vs {expected}", res.value));
    }
    if &got != support {
        problems.push(format!("support {got:?}"));
    }
    if report.max_deviation >= RATIO_TOL {
        problems.push(format!("ratio deviation {}", report.max_deviation));
    }
    if elapsed > limit {
        problems.push(format!("took {elapsed:?}"));
    }

    let cr: Vec<Rational> = costs.iter().map(|c| Rational::parse(c).unwrap()).collect();
    let inst_r = Instance::new(CostVector::new(cr).unwrap(), 2, variant).unwrap();
    let res_r = solve_game(&inst_r, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let report_r = check_equalizing_property(&res_r.hider, &inst_r.costs, 0.0);
    if !report_r.holds {
        problems.push("exact ratios differ".into());
    }
    if report_r.support.iter().cloned().collect::<BTreeSet<_>>() != *support {
        problems.push(format!("exact support {:?}", report_r.support));
    }
    if (res_r.value.to_f64() - res.value).abs() > FLOAT_AGREEMENT {
        problems.push(format!("exact value {} vs float {}", res_r.value, res.value));
    }
    if problems.is_empty() {
        Ok(format!(
            "value {:.6} (exact {}), {} support points, {elapsed:?}",
            res.value,
            res_r.value,
            got.len()
        ))
    } else {
        Err(problems.join("; "))
    }
}

fn criterion_1() -> Outcome {
    let limit = Duration::from_secs(30);
    let all = enumerate_all(4, 2);
    let ex1: BTreeSet<_> = all
        .difference(&allocs(&["(0,0,2,0)", "(0,0,1,1)", "(0,0,0,2)"]))
        .cloned()
        .collect();
    let a = check_example(&["10", "9", "1", "1"], GameVariant::MULTI_COST, 25.9515, &ex1, limit)?;
    let ex2 = allocs(&["(2,0,0,0)", "(1,1,0,0)", "(1,0,1,0)", "(1,0,0,1)"]);
    let b = check_example(
        &["100", "10", "1", "0.99"],
        GameVariant::MULTI_COST,
        201.0972,
        &ex2,
        limit,
    )?;
    Ok(format!("{a} | {b}"))
}

fn criterion_2() -> Outcome {
    let limit = Duration::from_secs(30);
    let all: BTreeSet<Allocation> = boxsearch::model::enumerate_allocations(4, 2, LookMode::Single)
        .unwrap()
        .into_iter()
        .collect();
    let ex3: BTreeSet<_> = all.difference(&allocs(&["(1,1,0,0)"])).cloned().collect();
    let a = check_example(
        &["100", "10", "1", "0.99"],
        GameVariant::SINGLE_REGRET,
        10.0405,
        &ex3,
        limit,
    )?;
    let ex4 = allocs(&["(1,0,0,1)", "(0,1,0,1)", "(0,0,1,1)"]);
    let b = check_example(
        &["100", "10", "9.9", "1"],
        GameVariant::SINGLE_REGRET,
        17.4229,
        &ex4,
        limit,
    )?;
    Ok(format!("{a} | {b}"))
}

fn enumerate_all(n: usize, k: u32) -> BTreeSet<Allocation> {
    boxsearch::model::enumerate_allocations(n, k, LookMode::Multi)
        .unwrap()
        .into_iter()
        .collect()
}

/// Every searcher constructor that is admissible for the look mode.
fn all_constructors(costs: &CostVector<Rational>, k: u32, look: LookMode) -> Vec<(String, SearcherPolicy<Rational>)> {
    let n = costs.len();
    let mut out: Vec<(String, SearcherPolicy<Rational>)> =
        vec![("uniform-adaptive".into(), searcher_uniform_adaptive())];
    if k == 1 {
        out.push((
            "normal-k1".into(),
            SearcherPolicy::Normal(searcher_normal_k1(costs, look).unwrap()),
        ));
        for j in 0..n {
            let m = normal_ending_at::<Rational>(n, j, look).unwrap();
            out.push((format!("normal-ending-at-{}", j + 1), SearcherPolicy::Normal(m)));
        }
    }
    match look {
        LookMode::Multi => {
            if let Ok(p) = searcher_equal_cost(n, k) {
                out.push(("equal-cost".into(), p));
            }
            if n == 2 {
                out.push(("n2-cost".into(), searcher_n2_cost_any(costs, k).unwrap()));
            }
            out.push(("multi-regret".into(), searcher_multi_regret(costs, k)));
            if k == 2 {
                out.push(("normal-k2".into(), searcher_normal_k2(costs).unwrap()));
                for y in boxsearch::model::enumerate_allocations(n, 2, LookMode::Multi).unwrap() {
                    let m = normal_pattern_k2::<Rational>(n, &y).unwrap();
                    out.push((format!("pattern-{y}"), SearcherPolicy::Normal(m)));
                }
            }
        }
        LookMode::Single => {
            if k as usize + 1 == n {
                out.push((
                    "single-regret-full".into(),
                    searcher_single_regret_full_any(costs, k).unwrap(),
                ));
            }
        }
    }
    out
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    let mut failures = Vec::new();
    for n in 1..=4usize {
        for k in 1..=3u32 {
            let costs = verify::random_costs(&mut rng, n);
            let mut cases: Vec<(GameVariant, HiderMixed<Rational>, Rational)> = vec![
                (
                    GameVariant::MULTI_COST,
                    hider_equalizing_multi(&costs, k).unwrap(),
                    value_multi_cost_equalizing(&costs, k),
                ),
                (
                    GameVariant::MULTI_REGRET,
                    hider_equalizing_multi(&costs, k).unwrap(),
                    value_multi_regret(&costs, k),
                ),
            ];
            if k as usize <= n {
                cases.push((
                    GameVariant::SINGLE_REGRET,
                    hider_equalizing_single(&costs, k).unwrap(),
                    value_single_regret(&costs, k).unwrap(),
                ));
            }
            for (variant, hider, want) in cases {
                let mut policies = all_constructors(&costs, k, variant.look);
                for _ in 0..50 {
                    policies.push(("random".into(), SearcherPolicy::Random { seed: rng.gen() }));
                }
                for (label, p) in policies {
                    checked += 1;
                    match evaluate_mixed(&costs, &p, &hider, variant) {
                        Ok(r) if r.expected_payoff == want => {}
                        Ok(r) => failures.push(format!(
                            "{variant} n={n} k={k} {label}: {} != {want}",
                            r.expected_payoff
                        )),
                        Err(e) => failures.push(format!("{variant} n={n} k={k} {label}: {e}")),
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(60) {
        failures.push(format!("took {elapsed:?}"));
    }
    if failures.is_empty() {
        Ok(format!("{checked} policy/hider pairs exact, {elapsed:?}"))
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let exact = SolveOptions::<Rational> {
        seed_constructive: false,
        ..SolveOptions::default()
    };
    let float = SolveOptions::<f64> {
        seed_constructive: false,
        ..SolveOptions::default()
    };
    let mut checked = 0;
    let mut failures = Vec::new();
    for _ in 0..25 {
        for (label, inst, want) in closed_form_instances(&mut rng).unwrap() {
            checked += 1;
            let got = solve_game(&inst, &exact).map_err(|e| e.to_string())?.value;
            if got != want {
                failures.push(format!(
                    "{label} {:?} k={}: exact {got} vs {want}",
                    inst.costs.as_slice(),
                    inst.k
                ));
            }
            let cf: Vec<f64> = inst.costs.as_slice().iter().map(Scalar::to_f64).collect();
            let inst_f = Instance::new(CostVector::new(cf).unwrap(), inst.k, inst.variant).unwrap();
            let got_f = solve_game(&inst_f, &float).map_err(|e| e.to_string())?.value;
            if (got_f - want.to_f64()).abs() > FLOAT_AGREEMENT {
                failures.push(format!(
                    "{label} {:?} k={}: float {got_f} vs {want}",
                    inst.costs.as_slice(),
                    inst.k
                ));
            }
        }
    }
    if failures.is_empty() {
        Ok(format!("{checked} instances over 4 regimes, exact and float"))
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_5() -> Outcome {
    let r = |n, d| Rational::ratio(n, d);
    let unit = CostVector::<Rational>::uniform(2, Rational::from_u64(1)).unwrap();
    let policy = searcher_equal_cost::<Rational>(2, 2).unwrap();
    let mut problems = Vec::new();
    for x in ["(2,0)", "(1,1)", "(0,2)"] {
        let v = evaluate(&unit, &policy, &x.parse().unwrap(), GameVariant::MULTI_COST)
            .unwrap()
            .expected_payoff;
        if v != r(8, 3) {
            problems.push(format!("equal-cost vs {x}: {v}"));
        }
    }
    let v = evaluate(
        &unit,
        &searcher_uniform_adaptive(),
        &"(2,0)".parse().unwrap(),
        GameVariant::MULTI_COST,
    )
    .unwrap()
    .expected_payoff;
    if v != r(11, 4) {
        problems.push(format!("uniform vs (2,0): {v}"));
    }
    let c = CostVector::<Rational>::new(vec![r(10, 1), r(1, 1)]).unwrap();
    let u2 = value_multi_cost_equalizing(&c, 2);
    let u1 = value_multi_cost_equalizing(&c, 1);
    if u2 != r(2222, 111) {
        problems.push(format!("U([2],2) = {u2}"));
    }
    if r(10, 1) + u1.clone() <= u2 {
        problems.push(format!("10 + U([2],1) = {} not above {u2}", r(10, 1) + u1.clone()));
    }
    if problems.is_empty() {
        Ok(format!(
            "8/3 on every support, 11/4, U([2],2) = {u2} < 10 + U([2],1) = {}",
            r(10, 1) + u1
        ))
    } else {
        Err(problems.join("; "))
    }
}

fn suites_outcome(reports: Vec<SuiteReport>) -> Outcome {
    let summary: Vec<String> = reports.iter().map(|r| format!("{} {}", r.suite, r.checked)).collect();
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed() || r.checked == 0)
        .map(|r| {
            format!(
                "{}: {:?}",
                r.suite,
                r.counterexamples.iter().take(3).collect::<Vec<_>>()
            )
        })
        .collect();
    if bad.is_empty() {
        Ok(format!("zero counterexamples ({})", summary.join(", ")))
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_6() -> Outcome {
    let mut reports = Vec::new();
    for s in [
        "permutation-invariance",
        "ending-symmetry",
        "symmetry-k2",
        "last-box-reduction",
    ] {
        reports.extend(verify::run_suite(s, None).map_err(|e| e.to_string())?);
    }
    suites_outcome(reports)
}

fn criterion_7() -> Outcome {
    suites_outcome(verify::run_suite("oracle", None).map_err(|e| e.to_string())?)
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("multi-cost examples", criterion_1),
        ("single-regret examples", criterion_2),
        ("equalizer indifference", criterion_3),
        ("closed form vs solver", criterion_4),
        ("worked micro-examples", criterion_5),
        ("structural property suites", criterion_6),
        ("oracle equivalence", criterion_7),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} ({name}): PASS - {detail}", i + 1),
            Err(detail) => {
                println!("criterion {} ({name}): FAIL - {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
