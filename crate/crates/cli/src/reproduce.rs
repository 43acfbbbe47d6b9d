//! Reference instances with known values, recomputed.

use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{Context, Result};
use boxsearch::engine::evaluate;
use boxsearch::solver::{check_equalizing_property, solve_game, SolveOptions};
use boxsearch::strategies::{searcher_equal_cost, searcher_uniform_adaptive};
use boxsearch::{Allocation, CostVector, GameVariant, Instance, Scalar};
use serde_json::{json, Value};

use crate::{print_json, Out};

pub const TOLERANCE: f64 = 5e-5;

pub struct Row {
    pub name: String,
    pub computed: String,
    pub computed_f64: f64,
    pub expected: f64,
    pub expected_text: &'static str,
    /// Support claim and whether it held.
    pub support: Option<(String, bool)>,
    pub pass: bool,
}

enum Support {
    Exactly(&'static [&'static str]),
    Excludes(&'static [&'static str]),
}

fn set(xs: &[&str]) -> BTreeSet<Allocation> {
    xs.iter().map(|s| s.parse().expect("valid allocation")).collect()
}

fn solved_row<T: Scalar>(
    name: &str,
    costs: &[&str],
    k: u32,
    variant: GameVariant,
    expected: (f64, &'static str),
    support: Option<Support>,
    out: &Out,
) -> Result<Row> {
    let costs = costs
        .iter()
        .map(|c| T::parse(c))
        .collect::<boxsearch::Result<Vec<_>>>()?;
    let inst = Instance::new(CostVector::new(costs)?, k, variant)?;
    let res = solve_game(&inst, &SolveOptions::default()).with_context(|| name.to_string())?;
    let report = check_equalizing_property(&res.hider, &inst.costs, 1e-6);
    let got: BTreeSet<Allocation> = report.support.iter().cloned().collect();
    let all: BTreeSet<Allocation> = inst.allocations().into_iter().collect();
    let support = support.map(|s| {
        let (claim, want) = match s {
            Support::Exactly(xs) => (format!("support = {}", xs.join(" ")), set(xs)),
            Support::Excludes(xs) => (
                format!("excludes {}", xs.join(" ")),
                all.difference(&set(xs)).cloned().collect(),
            ),
        };
        let ok = got == want && report.holds;
        (claim, ok)
    });
    Ok(row(name, &res.value, expected, support, out))
}

fn row<T: Scalar>(
    name: &str,
    value: &T,
    (expected, expected_text): (f64, &'static str),
    support: Option<(String, bool)>,
    out: &Out,
) -> Row {
    let computed_f64 = value.to_f64();
    let pass = (computed_f64 - expected).abs() <= TOLERANCE && support.as_ref().is_none_or(|(_, ok)| *ok);
    Row {
        name: name.to_string(),
        computed: out.num(value),
        computed_f64,
        expected,
        expected_text,
        support,
        pass,
    }
}

pub fn rows<T: Scalar>(out: &Out) -> Result<Vec<Row>> {
    let mc = GameVariant::MULTI_COST;
    let sr = GameVariant::SINGLE_REGRET;
    let mut rows = vec![
        solved_row::<T>(
            "multi-cost (10,9,1,1), k=2",
            &["10", "9", "1", "1"],
            2,
            mc,
            (25.9515, "25.9515"),
            Some(Support::Excludes(&["(0,0,2,0)", "(0,0,1,1)", "(0,0,0,2)"])),
            out,
        )?,
        solved_row::<T>(
            "multi-cost (100,10,1,0.99), k=2",
            &["100", "10", "1", "0.99"],
            2,
            mc,
            (201.0972, "201.0972"),
            Some(Support::Exactly(&["(2,0,0,0)", "(1,1,0,0)", "(1,0,1,0)", "(1,0,0,1)"])),
            out,
        )?,
        solved_row::<T>(
            "single-regret (100,10,1,0.99), k=2",
            &["100", "10", "1", "0.99"],
            2,
            sr,
            (10.0405, "10.0405"),
            Some(Support::Excludes(&["(1,1,0,0)"])),
            out,
        )?,
        solved_row::<T>(
            "single-regret (100,10,9.9,1), k=2",
            &["100", "10", "9.9", "1"],
            2,
            sr,
            (17.4229, "17.4229"),
            Some(Support::Exactly(&["(1,0,0,1)", "(0,1,0,1)", "(0,0,1,1)"])),
            out,
        )?,
        solved_row::<T>(
            "equal costs n=k=2: game value",
            &["1", "1"],
            2,
            mc,
            (8.0 / 3.0, "8/3"),
            None,
            out,
        )?,
    ];

    let unit = CostVector::<T>::uniform(2, T::one())?;
    let equal_cost = searcher_equal_cost::<T>(2, 2)?;
    for x in ["(2,0)", "(1,1)"] {
        let alloc: Allocation = x.parse()?;
        let v = evaluate(&unit, &equal_cost, &alloc, mc)?.expected_payoff;
        rows.push(row(
            &format!("equal costs n=k=2: optimal searcher vs {x}"),
            &v,
            (8.0 / 3.0, "8/3"),
            None,
            out,
        ));
    }
    let v = evaluate(&unit, &searcher_uniform_adaptive(), &"(2,0)".parse()?, mc)?.expected_payoff;
    rows.push(row(
        "equal costs n=k=2: uniform searcher vs (2,0)",
        &v,
        (2.75, "2+3/4"),
        None,
        out,
    ));

    rows.push(solved_row::<T>(
        "two boxes (10,1), k=2: set one ball aside",
        &["10", "1"],
        2,
        mc,
        (10.0 + 111.0 / 11.0, "10+111/11"),
        None,
        out,
    )?);
    rows.push(solved_row::<T>(
        "single-regret (100,100,1), k=2",
        &["100", "100", "1"],
        2,
        sr,
        (50.0, "50"),
        Some(Support::Exactly(&["(1,0,1)", "(0,1,1)"])),
        out,
    )?);
    Ok(rows)
}

fn to_json(r: &Row) -> Value {
    json!({
        "name": r.name,
        "computed": r.computed,
        "expected": r.expected_text,
        "abs_error": (r.computed_f64 - r.expected).abs(),
        "support": r.support.as_ref().map(|(c, ok)| json!({ "claim": c, "holds": ok })),
        "pass": r.pass,
    })
}

fn write_csv(path: &Path, rows: &[Row]) -> Result<()> {
    let quote = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
    let mut text = String::from("name,computed,expected,abs_error,support,support_holds,pass\n");
    for r in rows {
        let (claim, holds) = match &r.support {
            Some((c, ok)) => (c.as_str(), ok.to_string()),
            None => ("", String::new()),
        };
        text.push_str(&format!(
            "{},{},{},{:e},{},{},{}\n",
            quote(&r.name),
            quote(&r.computed),
            quote(r.expected_text),
            (r.computed_f64 - r.expected).abs(),
            quote(claim),
            holds,
            r.pass
        ));
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn run<T: Scalar>(csv: Option<&Path>, out: &Out) -> Result<bool> {
    let rows = rows::<T>(out)?;
    let ok = rows.iter().all(|r| r.pass);
    if let Some(path) = csv {
        write_csv(path, &rows)?;
    }
    if out.json {
        print_json(
            &json!({ "tolerance": TOLERANCE, "passed": ok, "rows": rows.iter().map(to_json).collect::<Vec<_>>() }),
        );
        return Ok(ok);
    }
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    println!("{:<width$}  {:>12}  {:>12}  result", "instance", "computed", "expected");
    for r in &rows {
        println!(
            "{:<width$}  {:>12}  {:>12}  {}",
            r.name,
            r.computed,
            r.expected_text,
            if r.pass { "pass" } else { "FAIL" }
        );
        if let Some((claim, holds)) = &r.support {
            println!("{:<width$}    {claim}: {}", "", if *holds { "yes" } else { "no" });
        }
    }
    println!("{}", if ok { "all rows pass" } else { "some rows FAIL" });
    Ok(ok)
}
