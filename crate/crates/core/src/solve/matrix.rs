use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::SolverError;

/// Distribution over pure strategies; only positive entries are kept.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedStrategy<P> {
    pub support: Vec<(P, f64)>,
}

impl<P> MixedStrategy<P> {
    pub fn total(&self) -> f64 {
        self.support.iter().map(|s| s.1).sum()
    }
}

/// Dense payoff matrix for the row player (maximizer).
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixGame {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl MatrixGame {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, SolverError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if r == 0 || c == 0 {
            return Err(SolverError::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(SolverError::NotTwoPlayerZeroSum("ragged payoff matrix".into()));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(SolverError::NotTwoPlayerZeroSum("non-finite payoff".into()));
            }
            data.extend(row);
        }
        Ok(MatrixGame { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    fn transposed_negated(&self) -> MatrixGame {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(-self.get(i, j));
            }
        }
        MatrixGame { rows: self.cols, cols: self.rows, data }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSolution {
    pub row: MixedStrategy<usize>,
    pub col: MixedStrategy<usize>,
    pub value: f64,
    /// `value` minus the worst column payoff against `row`.
    pub row_gap: f64,
    /// Best row payoff against `col` minus `value`.
    pub col_gap: f64,
}

/// Solves the game exactly (up to rounding) with a dense simplex and checks
/// that neither player gains more than `tol` by a pure deviation.
pub fn matrix_game_solve(m: &MatrixGame, tol: f64) -> Result<MatrixSolution, SolverError> {
    let (x, y) = if m.rows > m.cols {
        let (y, x) = simplex_strategies(&m.transposed_negated());
        (x, y)
    } else {
        simplex_strategies(m)
    };
    let value: f64 = (0..m.rows).map(|i| x[i] * (0..m.cols).map(|j| m.get(i, j) * y[j]).sum::<f64>()).sum();
    let lower = (0..m.cols).map(|j| (0..m.rows).map(|i| x[i] * m.get(i, j)).sum::<f64>()).fold(f64::INFINITY, f64::min);
    let upper = (0..m.rows).map(|i| (0..m.cols).map(|j| m.get(i, j) * y[j]).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max);
    let row_gap = (value - lower).max(0.0);
    let col_gap = (upper - value).max(0.0);
    if row_gap > tol || col_gap > tol {
        return Err(SolverError::NoConvergence(format!("pure-response gaps {row_gap:e} and {col_gap:e} exceed {tol:e}")));
    }
    let keep = |v: Vec<f64>| MixedStrategy { support: v.into_iter().enumerate().filter(|e| e.1 > 0.0).collect() };
    Ok(MatrixSolution { row: keep(x), col: keep(y), value, row_gap, col_gap })
}

/// Equilibrium strategies via `max sum(y) s.t. (U + s) y <= 1, y >= 0`,
/// with `s` making every entry positive. The column strategy is `y`
/// normalized; the row strategy is the dual, read from the slack columns.
fn simplex_strategies(m: &MatrixGame) -> (Vec<f64>, Vec<f64>) {
    const EPS: f64 = 1e-12;
    let (r, c) = (m.rows, m.cols);
    let min = m.data.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min;
    let width = c + r + 1;
    let mut t = vec![0.0f64; (r + 1) * width];
    for i in 0..r {
        for j in 0..c {
            t[i * width + j] = m.get(i, j) + shift;
        }
        t[i * width + c + i] = 1.0;
        t[i * width + width - 1] = 1.0;
    }
    for j in 0..c {
        t[r * width + j] = -1.0;
    }
    let mut basis: Vec<usize> = (c..c + r).collect();
    loop {
        // Bland's rule: lowest-index improving column, lowest-index basis
        // variable among ratio ties.
        let Some(enter) = (0..width - 1).find(|&j| t[r * width + j] < -EPS) else { break };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..r {
            let a = t[i * width + enter];
            if a > EPS {
                let ratio = t[i * width + width - 1] / a;
                let better = match leave {
                    None => true,
                    Some((l, best)) => ratio < best - EPS || (ratio <= best + EPS && basis[i] < basis[l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pivot_row, _)) = leave else { break };
        let p = t[pivot_row * width + enter];
        for j in 0..width {
            t[pivot_row * width + j] /= p;
        }
        for i in 0..=r {
            if i == pivot_row {
                continue;
            }
            let f = t[i * width + enter];
            if f != 0.0 {
                for j in 0..width {
                    t[i * width + j] -= f * t[pivot_row * width + j];
                }
            }
        }
        basis[pivot_row] = enter;
    }
    let mut y = vec![0.0; c];
    for (i, &b) in basis.iter().enumerate() {
        if b < c {
            y[b] = t[i * width + width - 1].max(0.0);
        }
    }
    let mut x: Vec<f64> = (0..r).map(|i| t[r * width + c + i].max(0.0)).collect();
    normalize(&mut x);
    normalize(&mut y);
    (x, y)
}

fn normalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        for x in v.iter_mut() {
            *x /= s;
        }
    } else {
        let k = v.len() as f64;
        v.fill(1.0 / k);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(rows: Vec<Vec<f64>>) -> MatrixSolution {
        matrix_game_solve(&MatrixGame::new(rows).unwrap(), 1e-9).unwrap()
    }

    #[test]
    fn closed_forms() {
        assert!(solve(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).value.abs() < 1e-12);
        let one = solve(vec![vec![2.0]]);
        assert_eq!(one.value, 2.0);
        assert_eq!(one.row.support, vec![(0, 1.0)]);
        assert!((solve(vec![vec![3.0, 0.0], vec![1.0, 2.0]]).value - 1.5).abs() < 1e-12);
    }

    #[test]
    fn tall_and_wide_matrices() {
        let tall = solve(vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.2, 0.2]]);
        assert!((tall.value - 0.5).abs() < 1e-12);
        let wide = solve(vec![vec![0.0, 1.0, 0.7], vec![1.0, 0.0, 0.7]]);
        assert!((wide.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_is_rejected() {
        assert_eq!(MatrixGame::new(vec![]), Err(SolverError::EmptyMatrix));
        assert_eq!(MatrixGame::new(vec![vec![]]), Err(SolverError::EmptyMatrix));
    }
}
