//! Checks whether a hider mixture has support probabilities proportional to
//! `prod c_i^{x_i}`.

use serde_json::{json, Value};

use crate::model::{enumerate_allocations, Allocation, CostVector, HiderMixed};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct EqualizingReport {
    pub holds: bool,
    pub support: Vec<Allocation>,
    /// Allocations of the game that get probability zero.
    pub excluded: Vec<Allocation>,
    /// Largest relative deviation of `p(x) / prod c^x` from its mean over
    /// the support.
    pub max_deviation: f64,
}

impl EqualizingReport {
    pub fn to_json(&self) -> Value {
        json!({
            "holds": self.holds,
            "support": self.support.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "excluded": self.excluded.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "max_deviation": self.max_deviation,
        })
    }
}

/// In exact mode the ratios must agree exactly; otherwise within relative
/// tolerance `tol`.
pub fn check_equalizing_property<T: Scalar>(
    hider: &HiderMixed<T>,
    costs: &CostVector<T>,
    tol: f64,
) -> EqualizingReport {
    let ratios: Vec<T> = hider
        .support()
        .iter()
        .map(|(x, p)| p.clone() / costs.monomial(x))
        .collect();
    let support: Vec<Allocation> = hider.support().iter().map(|(x, _)| x.clone()).collect();
    let excluded = enumerate_allocations(hider.n(), hider.k(), hider.look())
        .unwrap_or_default()
        .into_iter()
        .filter(|x| hider.prob(x).is_zero())
        .collect();
    let mean = ratios.iter().map(Scalar::to_f64).sum::<f64>() / ratios.len() as f64;
    let max_deviation = ratios
        .iter()
        .map(|r| ((r.to_f64() - mean) / mean).abs())
        .fold(0.0, f64::max);
    let holds = if T::EXACT {
        ratios.windows(2).all(|w| w[0] == w[1])
    } else {
        max_deviation <= tol
    };
    EqualizingReport {
        holds,
        support,
        excluded,
        max_deviation,
    }
}
