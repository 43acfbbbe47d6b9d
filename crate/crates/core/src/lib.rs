//! Hider/Searcher box-search games.
//!
//! A hider places `k` balls in `n` boxes; a searcher opens boxes, paying a
//! cost per open, until every ball is found. Boxes hold any number of balls
//! (multi-look) or at most one (single-look), and the searcher pays either
//! the total search cost or the regret (cost of opens that reveal an empty
//! box).
//!
//! The crate provides closed-form game values, the known optimal
//! strategies, exact evaluation of arbitrary adaptive strategies and an
//! exact solver for small instances. Everything is generic over
//! [`Scalar`], implemented for `f64` and exact [`Rational`] numbers.

pub mod engine;
pub mod error;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod solver;
pub mod strategies;
pub mod symfun;
pub mod values;
pub mod verify;

pub use error::{Error, Result};
pub use model::{Allocation, CostVector, GameVariant, HiderMixed, InfoState, Instance, LookMode, PayoffMode};
pub use scalar::{Rational, Scalar};
