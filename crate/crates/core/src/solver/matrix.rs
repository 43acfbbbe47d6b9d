//! Zero-sum matrix games solved by a dense simplex method.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Payoffs to the row player (the hider, maximizing); the column player
/// (the searcher) minimizes.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame<T> {
    payoffs: Vec<Vec<T>>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSolution<T> {
    pub value: T,
    pub row: Vec<T>,
    pub col: Vec<T>,
}

impl<T: Scalar> MatrixGame<T> {
    pub fn new(payoffs: Vec<Vec<T>>) -> Result<Self> {
        let rows = (0..payoffs.len()).map(|i| i.to_string()).collect();
        let cols = (0..payoffs.first().map_or(0, Vec::len))
            .map(|j| j.to_string())
            .collect();
        Self::with_labels(payoffs, rows, cols)
    }

    pub fn with_labels(payoffs: Vec<Vec<T>>, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        let width = payoffs.first().map_or(0, Vec::len);
        if payoffs.is_empty() || width == 0 {
            return Err(Error::InvalidInstance(
                "matrix game needs at least one row and column".into(),
            ));
        }
        if payoffs.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidInstance("matrix game rows differ in length".into()));
        }
        if row_labels.len() != payoffs.len() || col_labels.len() != width {
            return Err(Error::InvalidInstance("label count does not match matrix shape".into()));
        }
        Ok(Self {
            payoffs,
            row_labels,
            col_labels,
        })
    }

    pub fn payoffs(&self) -> &[Vec<T>] {
        &self.payoffs
    }

    pub fn entry(&self, i: usize, j: usize) -> &T {
        &self.payoffs[i][j]
    }

    pub fn rows(&self) -> usize {
        self.payoffs.len()
    }

    pub fn cols(&self) -> usize {
        self.payoffs[0].len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    /// Expected payoff of row mixture `x` against column `j`.
    pub fn row_payoff_against(&self, x: &[T], j: usize) -> T {
        let mut v = T::zero();
        for (i, p) in x.iter().enumerate() {
            if !p.is_zero() {
                v += &(p.clone() * self.payoffs[i][j].clone());
            }
        }
        v
    }

    /// Expected payoff of column mixture `y` against row `i`.
    pub fn col_payoff_against(&self, y: &[T], i: usize) -> T {
        let mut v = T::zero();
        for (j, q) in y.iter().enumerate() {
            if !q.is_zero() {
                v += &(q.clone() * self.payoffs[i][j].clone());
            }
        }
        v
    }

    /// Optimal mixed strategies for both players and the game value.
    ///
    /// Shifts payoffs to be at least 1 and solves
    /// `max sum y  s.t.  A y <= 1, y >= 0` for the column player; the row
    /// player's strategy is read off the dual.
    pub fn solve(&self) -> MatrixSolution<T> {
        let (m, n) = (self.rows(), self.cols());
        let mut min = self.payoffs[0][0].clone();
        for row in &self.payoffs {
            for a in row {
                if *a < min {
                    min = a.clone();
                }
            }
        }
        let shift = T::one() - min;
        let a: Vec<Vec<T>> = self
            .payoffs
            .iter()
            .map(|r| r.iter().map(|v| v.clone() + shift.clone()).collect())
            .collect();
        let lp = simplex_max_ones(&a);
        let z = lp.objective.clone();
        let scale = T::one() / z.clone();
        let col: Vec<T> = lp.primal.into_iter().map(|y| clean(y * scale.clone())).collect();
        let row: Vec<T> = lp.dual.into_iter().map(|x| clean(x * scale.clone())).collect();
        debug_assert_eq!(col.len(), n);
        debug_assert_eq!(row.len(), m);
        MatrixSolution {
            value: scale - shift,
            row: normalize(row),
            col: normalize(col),
        }
    }
}

/// Zeroes float noise below the comparison slack.
fn clean<T: Scalar>(x: T) -> T {
    if x.abs() <= T::slack() {
        T::zero()
    } else {
        x
    }
}

fn normalize<T: Scalar>(v: Vec<T>) -> Vec<T> {
    if T::EXACT {
        return v;
    }
    let mut total = T::zero();
    for x in &v {
        total += x;
    }
    v.into_iter().map(|x| x / total.clone()).collect()
}

struct LpSolution<T> {
    objective: T,
    primal: Vec<T>,
    dual: Vec<T>,
}

/// `max 1'y  s.t.  A y <= 1, y >= 0` for strictly positive `A`, by a tableau
/// simplex with Bland's rule. The problem is feasible (y = 0) and bounded
/// (every column of `A` is positive), so it always terminates at an optimum.
fn simplex_max_ones<T: Scalar>(a: &[Vec<T>]) -> LpSolution<T> {
    let (m, n) = (a.len(), a[0].len());
    let width = n + m;
    // Tableau rows are constraints; the last column is the right-hand side.
    let mut tab: Vec<Vec<T>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(width + 1);
            row.extend(a[i].iter().cloned());
            row.extend((0..m).map(|s| if s == i { T::one() } else { T::zero() }));
            row.push(T::one());
            row
        })
        .collect();
    // Reduced costs for the maximization, negated: entering columns are
    // those with a negative entry.
    let mut obj: Vec<T> = (0..=width).map(|j| if j < n { -T::one() } else { T::zero() }).collect();
    let mut basis: Vec<usize> = (n..width).collect();
    let eps = tolerance::<T>();

    while let Some(enter) = (0..width).find(|&j| obj[j] < -eps.clone()) {
        let mut leave: Option<usize> = None;
        let mut best = T::zero();
        for i in 0..m {
            if tab[i][enter] > eps {
                let ratio = tab[i][width].clone() / tab[i][enter].clone();
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best || (ratio == best && basis[i] < basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let r = leave.expect("bounded problem has a leaving row");
        pivot(&mut tab, &mut obj, r, enter);
        basis[r] = enter;
    }

    let mut primal = vec![T::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            primal[b] = tab[i][width].clone();
        }
    }
    let dual = (0..m).map(|i| obj[n + i].clone()).collect();
    LpSolution {
        objective: obj[width].clone(),
        primal,
        dual,
    }
}

fn pivot<T: Scalar>(tab: &mut [Vec<T>], obj: &mut [T], r: usize, c: usize) {
    let p = tab[r][c].clone();
    for v in tab[r].iter_mut() {
        *v = v.clone() / p.clone();
    }
    let pivot_row = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (v, pr) in row.iter_mut().zip(&pivot_row) {
            if !pr.is_zero() {
                *v = v.clone() - f.clone() * pr.clone();
            }
        }
    }
    if !obj[c].is_zero() {
        let f = obj[c].clone();
        for (v, pr) in obj.iter_mut().zip(&pivot_row) {
            if !pr.is_zero() {
                *v = v.clone() - f.clone() * pr.clone();
            }
        }
    }
}

fn tolerance<T: Scalar>() -> T {
    if T::EXACT {
        T::zero()
    } else {
        T::from_f64(1e-11)
    }
}
