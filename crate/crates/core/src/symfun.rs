//! Complete homogeneous (`T_k`) and elementary (`S_k`) symmetric functions of
//! the search costs, evaluated on prefixes `[m] = {1, ..., m}`.
//!
//! Both are built with the prefix recurrences
//!
//! ```text
//! T_j([m]) = c_m T_{j-1}([m]) + T_j([m-1])
//! S_j([m]) = c_m S_{j-1}([m-1]) + S_j([m-1])
//! ```
//!
//! with `T_{-1} = S_{-1} = 0` and `T_0 = S_0 = 1` on every prefix, including
//! the empty one. Float tables grow combinatorially; they are only sensible
//! while `n * k` stays below about 64.

use crate::model::CostVector;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymKind {
    Complete,
    Elementary,
}

/// `table[m][j]` holds the degree-`j` function of the first `m` costs, for
/// `0 <= m <= n` and `0 <= j <= k_max`.
#[derive(Debug, Clone)]
pub struct SymTable<T> {
    kind: SymKind,
    table: Vec<Vec<T>>,
}

impl<T: Scalar> SymTable<T> {
    pub fn new(costs: &CostVector<T>, k_max: usize, kind: SymKind) -> Self {
        let n = costs.len();
        let mut table = vec![vec![T::zero(); k_max + 1]; n + 1];
        table[0][0] = T::one();
        for m in 1..=n {
            let c = costs.get(m - 1);
            table[m][0] = T::one();
            for j in 1..=k_max {
                let carry = match kind {
                    SymKind::Complete => table[m][j - 1].clone(),
                    SymKind::Elementary => table[m - 1][j - 1].clone(),
                };
                table[m][j] = c.clone() * carry + table[m - 1][j].clone();
            }
        }
        Self { kind, table }
    }

    pub fn kind(&self) -> SymKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.table.len() - 1
    }

    pub fn k_max(&self) -> usize {
        self.table[0].len() - 1
    }

    /// Degree `j` on prefix `[m]`; negative degrees are zero.
    ///
    /// Panics if `j` exceeds the table's `k_max` or `m > n`.
    pub fn get(&self, j: i64, m: usize) -> T {
        if j < 0 {
            return T::zero();
        }
        self.table[m][j as usize].clone()
    }

    /// Degree `j` on the full cost vector.
    pub fn full(&self, j: i64) -> T {
        self.get(j, self.n())
    }
}

/// `T_k` of the full cost vector.
pub fn complete_homogeneous<T: Scalar>(costs: &CostVector<T>, k: usize) -> T {
    SymTable::new(costs, k, SymKind::Complete).full(k as i64)
}

/// `S_k` of the full cost vector; zero when `k > n`.
pub fn elementary_symmetric<T: Scalar>(costs: &CostVector<T>, k: usize) -> T {
    SymTable::new(costs, k, SymKind::Elementary).full(k as i64)
}

pub fn sym_table<T: Scalar>(costs: &CostVector<T>, k_max: usize, kind: SymKind) -> SymTable<T> {
    SymTable::new(costs, k_max, kind)
}
