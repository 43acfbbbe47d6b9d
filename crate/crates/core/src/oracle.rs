//! Brute-force reference: every deterministic, history-dependent searcher
//! strategy of a tiny game, written out as an explicit tree.
//!
//! Independent of the dynamic program in [`crate::solver`]; used to check
//! it. The number of trees grows doubly exponentially, so keep `n = 2` and
//! `k <= 2` (or comparably small).

use crate::error::{Error, Result};
use crate::model::{enumerate_allocations, Allocation, CostVector, GameVariant, HiderMixed, InfoState, PayoffMode};
use crate::scalar::Scalar;
use crate::solver::MatrixGame;

/// A pure strategy as a tree over observed outcomes. A missing child means
/// that outcome is impossible or ends the game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryTree {
    pub open: usize,
    pub on_ball: Option<Box<HistoryTree>>,
    pub on_empty: Option<Box<HistoryTree>>,
}

/// Hard cap on how many trees [`enumerate_pure_strategies`] will build.
pub const MAX_TREES: usize = 1_000_000;

/// Every pure searcher strategy.
pub fn enumerate_pure_strategies(n: usize, k: u32, variant: GameVariant) -> Result<Vec<HistoryTree>> {
    let allocs = enumerate_allocations(n, k, variant.look)?;
    trees_from(&InfoState::start(n), &allocs, k, variant)
}

fn trees_from(info: &InfoState, allocs: &[Allocation], k: u32, variant: GameVariant) -> Result<Vec<HistoryTree>> {
    let mut out = Vec::new();
    for i in info.admissible_boxes(variant.look) {
        let ball = info.after_ball(i);
        let empty = info.after_empty(i);
        let live = |s: &InfoState| s.total_found() < k && allocs.iter().any(|x| s.consistent_with(x));
        let ball_subtrees = if live(&ball) {
            Some(trees_from(&ball, allocs, k, variant)?)
        } else {
            None
        };
        let empty_subtrees = if live(&empty) {
            Some(trees_from(&empty, allocs, k, variant)?)
        } else {
            None
        };
        let nb = ball_subtrees.as_ref().map_or(1, Vec::len);
        let ne = empty_subtrees.as_ref().map_or(1, Vec::len);
        if out.len() + nb * ne > MAX_TREES {
            return Err(Error::BudgetExceeded(MAX_TREES));
        }
        for bi in 0..nb {
            for ei in 0..ne {
                out.push(HistoryTree {
                    open: i,
                    on_ball: ball_subtrees.as_ref().map(|v| Box::new(v[bi].clone())),
                    on_empty: empty_subtrees.as_ref().map(|v| Box::new(v[ei].clone())),
                });
            }
        }
    }
    Ok(out)
}

/// Payoff of following `tree` against `x`.
pub fn tree_payoff<T: Scalar>(costs: &CostVector<T>, tree: &HistoryTree, x: &Allocation, variant: GameVariant) -> T {
    let mut found = vec![0u32; x.n()];
    let mut node = Some(tree);
    let mut total = T::zero();
    while let Some(t) = node {
        let i = t.open;
        let ball = found[i] < x.balls()[i];
        if variant.payoff == PayoffMode::Cost || !ball {
            total += costs.get(i);
        }
        if ball {
            found[i] += 1;
            node = t.on_ball.as_deref();
        } else {
            node = t.on_empty.as_deref();
        }
    }
    total
}

/// Minimal expected payoff over all pure strategies.
pub fn oracle_best_response_value<T: Scalar>(
    costs: &CostVector<T>,
    hider: &HiderMixed<T>,
    variant: GameVariant,
    trees: &[HistoryTree],
) -> T {
    trees
        .iter()
        .map(|t| {
            let mut v = T::zero();
            for (x, p) in hider.support() {
                v += &(p.clone() * tree_payoff(costs, t, x, variant));
            }
            v
        })
        .reduce(|a, b| if b < a { b } else { a })
        .expect("at least one strategy")
}

/// The full matrix game: every allocation against every pure strategy.
pub fn oracle_matrix_game<T: Scalar>(costs: &CostVector<T>, k: u32, variant: GameVariant) -> Result<MatrixGame<T>> {
    let allocs = enumerate_allocations(costs.len(), k, variant.look)?;
    let trees = enumerate_pure_strategies(costs.len(), k, variant)?;
    let payoffs = allocs
        .iter()
        .map(|x| trees.iter().map(|t| tree_payoff(costs, t, x, variant)).collect())
        .collect();
    MatrixGame::new(payoffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn tree_counts() {
        // One ball, two boxes: open either box; on an empty reveal the other
        // box is forced.
        assert_eq!(
            enumerate_pure_strategies(2, 1, GameVariant::MULTI_COST).unwrap().len(),
            2
        );
        assert!(enumerate_pure_strategies(2, 2, GameVariant::MULTI_COST).unwrap().len() > 2);
    }

    #[test]
    fn regret_counts_only_empty_opens() {
        let costs = CostVector::<Rational>::from_f64s(&[3.0, 5.0]).unwrap();
        let t = HistoryTree {
            open: 0,
            on_ball: None,
            on_empty: Some(Box::new(HistoryTree {
                open: 1,
                on_ball: None,
                on_empty: None,
            })),
        };
        let x: Allocation = "(0,1)".parse().unwrap();
        assert_eq!(
            tree_payoff(&costs, &t, &x, GameVariant::MULTI_REGRET),
            Rational::from_u64(3)
        );
        assert_eq!(
            tree_payoff(&costs, &t, &x, GameVariant::MULTI_COST),
            Rational::from_u64(8)
        );
    }
}
