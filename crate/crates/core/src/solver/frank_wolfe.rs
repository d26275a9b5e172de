//! Least squares over the probability simplex,
//! `min ‖y − Aλ‖₂  s.t.  λ ≥ 0, Σλ = 1`.
//!
//! Fully-corrective Frank–Wolfe in the form of Wolfe's minimum-norm-point
//! method. Each major step adds the column with the best linear score (the
//! Frank–Wolfe vertex, i.e. a pricing step over candidate columns). Minor
//! steps re-optimise over the active columns exactly, sliding towards their
//! affine minimiser and dropping any column whose weight reaches zero; these
//! drops are the away steps.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::solver::matrix::{dot, norm2, solve_dense, DenseMatrix};

#[derive(Clone, Debug)]
pub struct NnlsOptions<T> {
    /// Largest number of columns with positive weight.
    pub max_atoms: usize,
    /// Stop once `‖y − Aλ‖₂ ≤ tol`.
    pub tol: T,
    /// Added to a column's linear score before vertex selection; a positive
    /// bias makes the column less attractive. Never changes the objective.
    pub column_bias: Option<Vec<T>>,
    pub max_iterations: usize,
    /// Columns the vertex oracle may pick; `None` means all.
    pub allowed: Option<Vec<bool>>,
}

impl<T: Scalar> NnlsOptions<T> {
    pub fn new(max_atoms: usize, tol: T) -> Self {
        Self {
            max_atoms,
            tol,
            column_bias: None,
            max_iterations: 10_000,
            allowed: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// Residual reached the tolerance.
    Converged,
    /// No admissible column improves the objective.
    Stalled,
    /// The active set is full and the next vertex would grow it.
    AtomBudget,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct NnlsResult<T> {
    /// `(column, weight)` pairs with positive weight, by ascending column.
    pub weights: Vec<(usize, T)>,
    pub residual_norm: T,
    /// Residual after each major iteration, starting with the initial vertex.
    pub history: Vec<T>,
    pub iterations: usize,
    /// Columns removed by away steps.
    pub drops: usize,
    pub stop: StopReason,
}

impl<T: Scalar> NnlsResult<T> {
    /// Dense weight vector of length `ncols`.
    pub fn dense(&self, ncols: usize) -> Vec<T> {
        let mut out = vec![T::zero(); ncols];
        for &(j, w) in &self.weights {
            out[j] = w;
        }
        out
    }
}

/// Convenience wrapper around [`nnls_simplex_with`].
pub fn nnls_simplex<T: Scalar>(
    a: &DenseMatrix<T>,
    y: &[T],
    max_atoms: usize,
    tol: T,
) -> Result<NnlsResult<T>> {
    nnls_simplex_with(a, y, &NnlsOptions::new(max_atoms, tol))
}

pub fn nnls_simplex_with<T: Scalar>(
    a: &DenseMatrix<T>,
    y: &[T],
    opts: &NnlsOptions<T>,
) -> Result<NnlsResult<T>> {
    let (m, n) = (a.nrows(), a.ncols());
    if n == 0 {
        return Err(Error::DimensionMismatch("matrix has no columns".into()));
    }
    if y.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "target has {} entries, matrix has {m} rows",
            y.len()
        )));
    }
    if opts.max_atoms < 1 {
        return Err(Error::InvalidConfig("max_atoms must be at least 1".into()));
    }
    if let Some(bias) = &opts.column_bias {
        if bias.len() != n {
            return Err(Error::DimensionMismatch("column bias length".into()));
        }
    }
    if let Some(allowed) = &opts.allowed {
        if allowed.len() != n {
            return Err(Error::DimensionMismatch("allowed mask length".into()));
        }
        if !allowed.iter().any(|&b| b) {
            return Err(Error::InvalidConfig("no admissible columns".into()));
        }
    }
    if !a.is_finite() || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("least-squares data".into()));
    }

    let bias = |j: usize| opts.column_bias.as_ref().map_or(T::zero(), |b| b[j]);
    let admissible = |j: usize| opts.allowed.as_ref().is_none_or(|a| a[j]);
    // column j shifted by the target: q_j = a_j − y
    let shifted = |j: usize| -> Vec<T> { a.col(j).iter().zip(y).map(|(&v, &t)| v - t).collect() };

    let mut first: Option<(T, usize)> = None;
    for j in (0..n).filter(|&j| admissible(j)) {
        let q = shifted(j);
        let score = dot(&q, &q) * T::lit(0.5) + bias(j);
        if first.is_none_or(|(best, _)| score < best) {
            first = Some((score, j));
        }
    }
    let (_, j0) = first.expect("at least one admissible column");

    let mut corral: Vec<usize> = vec![j0];
    let mut points: Vec<Vec<T>> = vec![shifted(j0)];
    let mut weights: Vec<T> = vec![T::one()];
    let mut x = points[0].clone();
    let mut history = vec![norm2(&x)];
    let mut drops = 0usize;
    let mut iterations = 0usize;
    let gap_tol = T::lit(1e-14);

    let stop = loop {
        let res = norm2(&x);
        if res <= opts.tol {
            break StopReason::Converged;
        }
        if iterations >= opts.max_iterations {
            break StopReason::IterationLimit;
        }
        iterations += 1;

        let xy = dot(&x, y);
        let mut pick: Option<(T, usize)> = None;
        for j in (0..n).filter(|&j| admissible(j)) {
            let score = dot(a.col(j), &x) - xy + bias(j);
            if pick.is_none_or(|(best, _)| score < best) {
                pick = Some((score, j));
            }
        }
        let (_, j) = pick.expect("admissible column");
        let q = shifted(j);
        let xx = dot(&x, &x);
        let gap = xx - dot(&x, &q);
        if gap <= gap_tol * xx.max(T::one()) || corral.contains(&j) {
            break StopReason::Stalled;
        }
        if corral.len() >= opts.max_atoms {
            break StopReason::AtomBudget;
        }
        corral.push(j);
        points.push(q);
        weights.push(T::zero());

        loop {
            let Some(alpha) = affine_minimizer(&points) else {
                // numerically dependent corral: undo the insertion
                corral.pop();
                points.pop();
                weights.pop();
                break;
            };
            let floor = T::lit(1e-15);
            if alpha.iter().all(|&v| v > floor) {
                weights = alpha;
                break;
            }
            let mut theta = T::one();
            for (&w, &al) in weights.iter().zip(&alpha) {
                if al <= floor && w - al > T::zero() {
                    theta = theta.min(w / (w - al));
                }
            }
            for (w, &al) in weights.iter_mut().zip(&alpha) {
                *w = (T::one() - theta) * *w + theta * al;
            }
            let mut k = 0;
            let mut removed = false;
            while k < weights.len() {
                if weights[k] <= floor && weights.len() > 1 {
                    weights.remove(k);
                    points.remove(k);
                    corral.remove(k);
                    drops += 1;
                    removed = true;
                } else {
                    k += 1;
                }
            }
            if !removed {
                break;
            }
        }
        let total: T = weights.iter().copied().sum();
        for w in &mut weights {
            *w = *w / total;
        }
        x = combine(&points, &weights, m);
        let new_res = norm2(&x);
        history.push(new_res);
        if new_res >= res && new_res > opts.tol {
            break StopReason::Stalled;
        }
    };

    let mut pairs: Vec<(usize, T)> = corral.into_iter().zip(weights).collect();
    pairs.sort_by_key(|&(j, _)| j);
    let dense: Vec<T> = {
        let mut d = vec![T::zero(); n];
        for &(j, w) in &pairs {
            d[j] = w;
        }
        d
    };
    let fitted = a.mul_vec(&dense);
    let residual_norm = norm2(
        &fitted
            .iter()
            .zip(y)
            .map(|(&f, &t)| f - t)
            .collect::<Vec<_>>(),
    );
    Ok(NnlsResult {
        weights: pairs,
        residual_norm,
        history,
        iterations,
        drops,
        stop,
    })
}

fn combine<T: Scalar>(points: &[Vec<T>], weights: &[T], m: usize) -> Vec<T> {
    let mut x = vec![T::zero(); m];
    for (p, &w) in points.iter().zip(weights) {
        for (xi, &pi) in x.iter_mut().zip(p) {
            *xi = *xi + w * pi;
        }
    }
    x
}

/// Minimiser of `‖Σ α_k p_k‖²` subject to `Σ α_k = 1` (no sign constraint).
fn affine_minimizer<T: Scalar>(points: &[Vec<T>]) -> Option<Vec<T>> {
    let k = points.len();
    if k == 1 {
        return Some(vec![T::one()]);
    }
    let mut kkt = vec![vec![T::zero(); k + 1]; k + 1];
    for r in 0..k {
        for c in r..k {
            let g = dot(&points[r], &points[c]);
            kkt[r][c] = g;
            kkt[c][r] = g;
        }
        kkt[r][k] = T::one();
        kkt[k][r] = T::one();
    }
    let mut rhs = vec![T::zero(); k + 1];
    rhs[k] = T::one();
    let sol = solve_dense(kkt, rhs, T::lit(1e-14))?;
    Some(sol[..k].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_matching_column() {
        let a = DenseMatrix::from_columns(3, &[vec![0.2, 0.5, 0.3]]).unwrap();
        let r = nnls_simplex(&a, &[0.2, 0.5, 0.3], 5, 1e-12).unwrap();
        assert_eq!(r.weights, vec![(0, 1.0)]);
        assert_eq!(r.residual_norm, 0.0);
        assert_eq!(r.stop, StopReason::Converged);
    }

    #[test]
    fn midpoint_of_two_vertices() {
        let a = DenseMatrix::from_columns(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = nnls_simplex(&a, &[0.5, 0.5], 5, 1e-12).unwrap();
        assert_eq!(r.weights.len(), 2);
        assert!((r.weights[0].1 - 0.5_f64).abs() < 1e-12);
        assert!(r.residual_norm < 1e-12);
    }

    #[test]
    fn outside_hull_projects() {
        // columns e1, e2; target (1, 1) projects to (0.5, 0.5) at distance 1/√2
        let a = DenseMatrix::from_columns(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = nnls_simplex(&a, &[1.0, 1.0], 5, 1e-12).unwrap();
        assert!((r.residual_norm - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.stop, StopReason::Stalled);
    }

    #[test]
    fn budget_limits_support() {
        let cols: Vec<Vec<f64>> = (0..4)
            .map(|k| (0..4).map(|i| if i == k { 1.0 } else { 0.0 }).collect())
            .collect();
        let a = DenseMatrix::from_columns(4, &cols).unwrap();
        let r = nnls_simplex(&a, &[0.25; 4], 2, 1e-12).unwrap();
        assert_eq!(r.weights.len(), 2);
        assert_eq!(r.stop, StopReason::AtomBudget);
    }

    #[test]
    fn bias_steers_selection() {
        let a = DenseMatrix::from_columns(2, &[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let mut opts = NnlsOptions::new(3, 1e-12);
        opts.column_bias = Some(vec![1.0, 0.0]);
        let r = nnls_simplex_with(&a, &[1.0, 0.0], &opts).unwrap();
        assert_eq!(r.weights, vec![(1, 1.0)]);
    }

    #[test]
    fn errors() {
        let a = DenseMatrix::<f64>::zeros(2, 0);
        assert!(nnls_simplex(&a, &[0.0, 0.0], 1, 1e-9).is_err());
        let a = DenseMatrix::<f64>::zeros(2, 1);
        assert!(nnls_simplex(&a, &[0.0], 1, 1e-9).is_err());
        assert!(nnls_simplex(&a, &[0.0, 0.0], 0, 1e-9).is_err());
    }
}
