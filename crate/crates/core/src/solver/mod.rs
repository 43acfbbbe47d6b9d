//! Numerical solution of the games: matrix-game LP, best-response dynamic
//! programming, the double oracle loop and the equalizing-property check.

mod best_response;
mod double_oracle;
mod equalizing;
mod matrix;

pub use best_response::{best_response, BestResponse, DecisionTreePolicy, DEFAULT_STATE_BUDGET};
pub use double_oracle::{
    constructive_policies, equalizing_hider, searcher_as_normal, solve_game, solve_normal_only, Column, SolveOptions,
    SolveResult,
};
pub use equalizing::{check_equalizing_property, EqualizingReport};
pub use matrix::{MatrixGame, MatrixSolution};

/// `solve_matrix_game(g)`: value and optimal mixtures of a matrix game.
pub fn solve_matrix_game<T: crate::scalar::Scalar>(g: &MatrixGame<T>) -> MatrixSolution<T> {
    g.solve()
}
