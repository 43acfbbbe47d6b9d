use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use boxsearch::engine::{evaluate_mixed, play, simulate};
use boxsearch::scalar::format_sig;
use boxsearch::solver::{
    check_equalizing_property, constructive_policies, equalizing_hider, solve_game, solve_normal_only, SolveOptions,
};
use boxsearch::strategies::{
    hider_prefill_single_any, hider_set_aside_n2_any, searcher_uniform_adaptive, SearcherPolicy,
};
use boxsearch::values::closed_form_value;
use boxsearch::verify::{run_suite, suite_name, SUITES};
use boxsearch::{Allocation, CostVector, GameVariant, HiderMixed, Instance, LookMode, PayoffMode, Rational, Scalar};
use clap::{Args, Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

mod reproduce;

#[derive(Parser)]
#[command(
    name = "boxsearch",
    version,
    about = "Solve and analyse hide-and-search games with k balls in n boxes"
)]
struct Cli {
    /// Exact rational arithmetic; values print as fractions.
    #[arg(long, global = true)]
    exact: bool,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form game value, where one is known.
    Value(InstanceArgs),
    /// Constructive strategies for both players.
    Strategy {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Print only this searcher strategy, as JSON.
        #[arg(long)]
        kind: Option<String>,
    },
    /// Exact expected payoff of a searcher strategy against a hider strategy.
    Evaluate {
        #[command(flatten)]
        inst: InstanceArgs,
        #[command(flatten)]
        players: PlayerArgs,
    },
    /// Solve the game by double oracle over adaptive searcher strategies.
    Solve {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Stopping tolerance on the duality gap (float mode).
        #[arg(long)]
        eps: Option<f64>,
        /// Best-response state budget.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = 500)]
        max_iterations: usize,
        /// Start column generation from a best response only.
        #[arg(long)]
        no_constructive: bool,
        /// Restrict the searcher to normal strategies (mixtures of search sequences).
        #[arg(long)]
        normal_only: bool,
    },
    /// Simulate games with a seeded generator.
    Play {
        #[command(flatten)]
        inst: InstanceArgs,
        #[command(flatten)]
        players: PlayerArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
    /// Run a property suite and report counterexamples.
    Verify {
        /// equalizer, symmetry-k2, permutation-invariance, ending-symmetry,
        /// closed-form, oracle, last-box-reduction or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Random draws per suite; each suite has its own default.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Recompute the published examples and compare.
    ReproducePaper {
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Instance JSON: {"costs": [...], "balls": k, "variant": "multi-cost"}.
    #[arg(long, conflicts_with_all = ["costs", "balls"])]
    instance: Option<PathBuf>,
    /// Comma-separated box costs, e.g. 10,9,1,1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    costs: Vec<String>,
    #[arg(long, short = 'k')]
    balls: Option<u32>,
    /// multi-cost, multi-regret, single-cost or single-regret.
    #[arg(long)]
    variant: Option<GameVariant>,
}

#[derive(Args, Clone)]
struct PlayerArgs {
    /// Searcher strategy JSON file.
    #[arg(long, conflicts_with = "kind")]
    strategy: Option<PathBuf>,
    /// Named searcher strategy (see `strategy`); defaults to uniform-adaptive.
    #[arg(long)]
    kind: Option<String>,
    /// Hider mixed strategy JSON file; defaults to the equalizing hider.
    #[arg(long, conflicts_with = "allocation")]
    hider: Option<PathBuf>,
    /// A single hider allocation such as (2,0).
    #[arg(long)]
    allocation: Option<Allocation>,
}

struct Out {
    exact: bool,
    json: bool,
}

impl Out {
    fn num<T: Scalar>(&self, x: &T) -> String {
        if self.exact {
            x.to_string()
        } else {
            format_sig(x.to_f64(), 6)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Out {
        exact: cli.exact,
        json: cli.json,
    };
    let result = if cli.exact {
        run::<Rational>(cli.command, &out)
    } else {
        run::<f64>(cli.command, &out)
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            if out.json {
                println!("{}", json!({ "error": format!("{e:#}") }));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
    }
}

/// Returns whether every check the command made passed.
fn run<T: Scalar>(cmd: Command, out: &Out) -> Result<bool> {
    match cmd {
        Command::Value(args) => cmd_value::<T>(&load_instance(&args)?, out),
        Command::Strategy { inst, kind } => cmd_strategy::<T>(&load_instance(&inst)?, kind.as_deref(), out),
        Command::Evaluate { inst, players } => cmd_evaluate::<T>(&load_instance(&inst)?, &players, out),
        Command::Solve {
            inst,
            eps,
            budget,
            max_iterations,
            no_constructive,
            normal_only,
        } => {
            let inst = load_instance::<T>(&inst)?;
            let mut opts = SolveOptions::<T> {
                max_iterations,
                seed_constructive: !no_constructive,
                ..SolveOptions::default()
            };
            if let Some(e) = eps {
                if e < 0.0 {
                    bail!("--eps must be non-negative");
                }
                opts.eps = T::from_f64(e);
            }
            if let Some(b) = budget {
                opts.state_budget = b;
            }
            cmd_solve(&inst, &opts, normal_only, out)
        }
        Command::Play {
            inst,
            players,
            seed,
            trials,
        } => cmd_play::<T>(&load_instance(&inst)?, &players, seed, trials, out),
        Command::Verify { suite, budget } => cmd_verify(&suite, budget, out),
        Command::ReproducePaper { csv } => reproduce::run::<T>(csv.as_deref(), out),
    }
}

fn load_instance<T: Scalar>(args: &InstanceArgs) -> Result<Instance<T>> {
    if let Some(path) = &args.instance {
        let mut v = read_json(path)?;
        if let Some(variant) = args.variant {
            v["variant"] = json!(variant.to_string());
        }
        return Ok(Instance::from_json(&v)?);
    }
    if args.costs.is_empty() {
        bail!("give an instance with --instance FILE or --costs C1,C2,... --balls K");
    }
    let costs = args
        .costs
        .iter()
        .map(|c| T::parse(c.trim()))
        .collect::<boxsearch::Result<Vec<_>>>()?;
    let k = args.balls.context("--balls is required with --costs")?;
    let variant = args.variant.unwrap_or(GameVariant::MULTI_COST);
    Ok(Instance::new(CostVector::new(costs)?, k, variant)?)
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn cmd_value<T: Scalar>(inst: &Instance<T>, out: &Out) -> Result<bool> {
    let cf = closed_form_value(inst)?;
    if out.json {
        print_json(&json!({
            "instance": inst.to_json(),
            "value": cf.value.to_json(),
            "formula": cf.formula,
        }));
    } else {
        println!("value   {}", out.num(&cf.value));
        println!("formula {}", cf.formula);
    }
    Ok(true)
}

/// Best known hider strategy: the set-aside and prefill constructions where
/// they apply, the equalizing hider otherwise.
fn constructive_hider<T: Scalar>(inst: &Instance<T>) -> Result<(String, HiderMixed<T>)> {
    let n = inst.n();
    match (inst.variant.look, inst.variant.payoff) {
        (LookMode::Multi, PayoffMode::Cost) if n == 2 => {
            Ok(("set-aside".into(), hider_set_aside_n2_any(&inst.costs, inst.k)?))
        }
        (LookMode::Single, PayoffMode::Regret) if inst.k as usize + 1 == n => {
            Ok(("prefill".into(), hider_prefill_single_any(&inst.costs)?))
        }
        _ => Ok(("equalizing".into(), equalizing_hider(inst)?)),
    }
}

fn named_policies<T: Scalar>(inst: &Instance<T>) -> Vec<(String, SearcherPolicy<T>)> {
    let mut all = constructive_policies(inst);
    all.push(("uniform-adaptive".into(), searcher_uniform_adaptive()));
    all
}

fn policy_by_kind<T: Scalar>(inst: &Instance<T>, kind: &str) -> Result<SearcherPolicy<T>> {
    let all = named_policies(inst);
    let names: Vec<&str> = all.iter().map(|(l, _)| l.as_str()).collect();
    let names = names.join(", ");
    all.into_iter()
        .find(|(l, _)| l == kind)
        .map(|(_, p)| p)
        .with_context(|| format!("no strategy {kind:?} for this instance; available: {names}"))
}

fn cmd_strategy<T: Scalar>(inst: &Instance<T>, kind: Option<&str>, out: &Out) -> Result<bool> {
    if let Some(kind) = kind {
        print_json(&policy_by_kind(inst, kind)?.to_json());
        return Ok(true);
    }
    let (hider_label, hider) = constructive_hider(inst)?;
    let policies = named_policies(inst);
    if out.json {
        print_json(&json!({
            "instance": inst.to_json(),
            "hider": { "label": hider_label, "strategy": hider.to_json() },
            "searcher": policies.iter().map(|(l, p)| json!({
                "label": l,
                "description": p.describe(),
                "strategy": p.to_json(),
            })).collect::<Vec<_>>(),
        }));
        return Ok(true);
    }
    println!("hider ({hider_label}):");
    for (x, p) in hider.support() {
        println!("  {x}  {}", out.num(p));
    }
    println!("searcher:");
    for (l, p) in &policies {
        println!("  {l}: {}", p.describe());
    }
    Ok(true)
}

fn players<T: Scalar>(inst: &Instance<T>, args: &PlayerArgs) -> Result<(SearcherPolicy<T>, HiderMixed<T>)> {
    let policy = match (&args.strategy, &args.kind) {
        (Some(path), _) => SearcherPolicy::from_json(&read_json(path)?, inst)?,
        (None, Some(kind)) => policy_by_kind(inst, kind)?,
        (None, None) => searcher_uniform_adaptive(),
    };
    let hider = match (&args.hider, &args.allocation) {
        (Some(path), _) => HiderMixed::from_json(&read_json(path)?)?,
        (None, Some(x)) => HiderMixed::point(x.clone(), inst.variant.look)?,
        (None, None) => equalizing_hider(inst)?,
    };
    if hider.n() != inst.n() || hider.k() != inst.k || hider.look() != inst.variant.look {
        bail!(
            "hider strategy does not match the instance (n = {}, k = {}, {})",
            inst.n(),
            inst.k,
            inst.variant
        );
    }
    Ok((policy, hider))
}

fn cmd_evaluate<T: Scalar>(inst: &Instance<T>, args: &PlayerArgs, out: &Out) -> Result<bool> {
    let (policy, hider) = players(inst, args)?;
    let r = evaluate_mixed(&inst.costs, &policy, &hider, inst.variant)?;
    if out.json {
        print_json(&r.to_json());
    } else {
        println!("expected payoff {}", out.num(&r.expected_payoff));
        println!("expected cost   {}", out.num(&r.expected_cost));
        println!("expected regret {}", out.num(&r.expected_regret));
        println!("nodes           {}", r.node_count);
    }
    Ok(true)
}

fn cmd_solve<T: Scalar>(inst: &Instance<T>, opts: &SolveOptions<T>, normal_only: bool, out: &Out) -> Result<bool> {
    let res = if normal_only {
        solve_normal_only(inst)?
    } else {
        solve_game(inst, opts)?
    };
    let report = check_equalizing_property(&res.hider, &inst.costs, 1e-6);
    if out.json {
        let mut v = res.to_json();
        v["instance"] = inst.to_json();
        v["equalizing"] = report.to_json();
        print_json(&v);
        return Ok(true);
    }
    println!("value        {}", out.num(&res.value));
    println!("duality gap  {}", out.num(&res.duality_gap));
    println!("iterations   {} ({} columns)", res.iterations, res.columns.len());
    println!("hider support:");
    for (x, p) in res.hider.support() {
        println!("  {x}  {}", out.num(p));
    }
    let excluded: Vec<String> = report.excluded.iter().map(ToString::to_string).collect();
    if !excluded.is_empty() {
        println!("excluded     {}", excluded.join(" "));
    }
    println!(
        "equalizing   {} (max deviation {})",
        if report.holds { "yes" } else { "no" },
        format_sig(report.max_deviation, 3)
    );
    println!("searcher support:");
    for (c, w) in res.searcher_support() {
        println!("  {}  {}", out.num(w), c.label);
    }
    Ok(true)
}

fn cmd_play<T: Scalar>(inst: &Instance<T>, args: &PlayerArgs, seed: u64, trials: usize, out: &Out) -> Result<bool> {
    let (policy, hider) = players(inst, args)?;
    if trials == 0 {
        bail!("--trials must be positive");
    }
    if trials == 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = play(&inst.costs, &policy, &hider, inst.variant, &mut rng)?;
        if out.json {
            print_json(&json!({
                "seed": seed,
                "allocation": t.allocation.to_string(),
                "opens": t.opens.iter().map(|(b, ball)| json!({ "box": b + 1, "ball": ball })).collect::<Vec<_>>(),
                "cost": t.cost,
                "regret": t.regret,
            }));
        } else {
            println!("seed       {seed}");
            println!("allocation {}", t.allocation);
            let opens: Vec<String> = t
                .opens
                .iter()
                .map(|(b, ball)| format!("{}{}", b + 1, if *ball { "*" } else { "" }))
                .collect();
            println!("opens      {}", opens.join(" "));
            println!("cost       {}", format_sig(t.cost, 6));
            println!("regret     {}", format_sig(t.regret, 6));
        }
        return Ok(true);
    }
    let mean = simulate(&inst.costs, &policy, &hider, inst.variant, trials, seed)?;
    let exact = evaluate_mixed(&inst.costs, &policy, &hider, inst.variant)?.expected_payoff;
    if out.json {
        print_json(&json!({ "seed": seed, "trials": trials, "mean": mean, "expected": exact.to_json() }));
    } else {
        println!("seed     {seed}");
        println!("mean     {} over {trials} games", format_sig(mean, 6));
        println!("expected {}", out.num(&exact));
    }
    Ok(true)
}

fn cmd_verify(suite: &str, budget: Option<usize>, out: &Out) -> Result<bool> {
    if suite_name(suite).is_none() {
        bail!("unknown suite {suite:?}; expected one of {}", SUITES.join(", "));
    }
    let reports = run_suite(suite, budget)?;
    let ok = reports.iter().all(|r| r.passed());
    if out.json {
        print_json(&json!({ "passed": ok, "suites": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>() }));
    } else {
        for r in &reports {
            let passed = r.checked - r.counterexamples.len();
            println!(
                "{:<22} {passed}/{} {}",
                r.suite,
                r.checked,
                if r.passed() { "pass" } else { "FAIL" }
            );
            for c in &r.counterexamples {
                println!("  {c}");
            }
        }
    }
    Ok(ok)
}
