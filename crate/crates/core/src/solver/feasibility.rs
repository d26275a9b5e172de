//! Decides `A x = b, x ≥ 0` with a phase-one simplex and returns either a
//! solution or a Farkas certificate `y` with `Aᵀy ≥ 0` and `bᵀy < 0`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::solver::matrix::{dot, DenseMatrix};

/// Residual bound that a feasible solution must meet (`‖Ax − b‖∞`).
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Slack allowed on non-negativity of solutions and of `Aᵀy`.
pub const NONNEG_TOL: f64 = 1e-9;
/// A certificate must satisfy `bᵀy < −CERTIFICATE_GAP`.
pub const CERTIFICATE_GAP: f64 = 1e-7;

/// Equality-constrained system over non-negative variables.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFeasibilityProblem<T> {
    matrix: DenseMatrix<T>,
    rhs: Vec<T>,
}

impl<T: Scalar> LinearFeasibilityProblem<T> {
    pub fn new(matrix: DenseMatrix<T>, rhs: Vec<T>) -> Result<Self> {
        if matrix.nrows() != rhs.len() {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} rows but rhs has {} entries",
                matrix.nrows(),
                rhs.len()
            )));
        }
        if !matrix.is_finite() || rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feasibility problem data".into()));
        }
        Ok(Self { matrix, rhs })
    }

    pub fn from_rows(rows: &[Vec<T>], rhs: Vec<T>) -> Result<Self> {
        Self::new(DenseMatrix::from_rows(rows)?, rhs)
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn rhs(&self) -> &[T] {
        &self.rhs
    }

    /// `‖A x − b‖∞`.
    pub fn residual_inf(&self, x: &[T]) -> T {
        self.matrix
            .mul_vec(x)
            .iter()
            .zip(&self.rhs)
            .fold(T::zero(), |acc, (&ax, &b)| acc.max((ax - b).abs()))
    }

    /// True iff `x` solves the system within the feasibility tolerances.
    pub fn validates_solution(&self, x: &[T]) -> bool {
        x.len() == self.matrix.ncols()
            && x.iter().all(|&v| v >= -T::lit(NONNEG_TOL))
            && self.residual_inf(x) <= T::lit(FEASIBILITY_TOL)
    }

    /// True iff `y` is a Farkas certificate: `Aᵀy ≥ −1e-9` and `bᵀy < −1e-7`.
    pub fn validates_certificate(&self, y: &[T]) -> bool {
        if y.len() != self.rhs.len() {
            return false;
        }
        let floor = -T::lit(NONNEG_TOL);
        (0..self.matrix.ncols()).all(|j| dot(self.matrix.col(j), y) >= floor)
            && dot(&self.rhs, y) < -T::lit(CERTIFICATE_GAP)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityResult<T> {
    pub status: FeasibilityStatus,
    /// Non-negative solution, present when feasible.
    pub solution: Option<Vec<T>>,
    /// Farkas certificate, present when infeasible; scaled to `max |y_i| = 1`.
    pub certificate: Option<Vec<T>>,
    pub pivots: usize,
}

impl<T> FeasibilityResult<T> {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub max_rows: usize,
    /// Column count above which column generation is used.
    pub dense_column_cap: usize,
    pub max_columns: usize,
    pub pivot_tol: f64,
    pub max_pivots: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_rows: 200,
            dense_column_cap: 5_000,
            max_columns: 500_000,
            pivot_tol: 1e-9,
            max_pivots: 200_000,
        }
    }
}

/// Decides feasibility of `A x = b, x ≥ 0`.
///
/// The returned solution or certificate is re-checked against the original
/// data before returning.
pub fn solve_feasibility<T: Scalar>(
    problem: &LinearFeasibilityProblem<T>,
    config: &SolverConfig,
) -> Result<FeasibilityResult<T>> {
    let (m, n) = (problem.matrix.nrows(), problem.matrix.ncols());
    if m > config.max_rows {
        return Err(Error::CapExceeded {
            what: "constraint count".into(),
            size: m,
            cap: config.max_rows,
        });
    }
    if n > config.max_columns {
        return Err(Error::CapExceeded {
            what: "variable count".into(),
            size: n,
            cap: config.max_columns,
        });
    }
    let result = if n <= config.dense_column_cap {
        phase_one(&problem.matrix, &problem.rhs, config)?
    } else {
        column_generation(problem, config)?
    };
    match result.status {
        FeasibilityStatus::Feasible => {
            let x = result.solution.as_deref().unwrap_or_default();
            if !problem.validates_solution(x) {
                return Err(Error::Numerical(format!(
                    "simplex solution failed verification (residual {})",
                    problem.residual_inf(x)
                )));
            }
        }
        FeasibilityStatus::Infeasible => {
            let y = result.certificate.as_deref().unwrap_or_default();
            if !problem.validates_certificate(y) {
                return Err(Error::Numerical(
                    "Farkas certificate failed verification; system is ill-conditioned".into(),
                ));
            }
        }
    }
    Ok(result)
}

/// Restricted-master loop: solve on a column subset, price the remaining
/// columns against the certificate, and add the most violated ones.
fn column_generation<T: Scalar>(
    problem: &LinearFeasibilityProblem<T>,
    config: &SolverConfig,
) -> Result<FeasibilityResult<T>> {
    let a = &problem.matrix;
    let n = a.ncols();
    let batch = a.nrows().max(1);
    let mut active: Vec<usize> = (0..config.dense_column_cap.min(n).max(1)).collect();
    let mut in_active = vec![false; n];
    for &j in &active {
        in_active[j] = true;
    }
    let mut pivots = 0;
    loop {
        let restricted = a.select_columns(&active);
        let sub = phase_one(&restricted, &problem.rhs, config)?;
        pivots += sub.pivots;
        match sub.status {
            FeasibilityStatus::Feasible => {
                let mut x = vec![T::zero(); n];
                for (k, &j) in active.iter().enumerate() {
                    x[j] = sub.solution.as_ref().expect("feasible solution")[k];
                }
                return Ok(FeasibilityResult {
                    status: FeasibilityStatus::Feasible,
                    solution: Some(x),
                    certificate: None,
                    pivots,
                });
            }
            FeasibilityStatus::Infeasible => {
                let y = sub.certificate.expect("certificate");
                let floor = -T::lit(NONNEG_TOL);
                let mut violated: Vec<(T, usize)> = (0..n)
                    .filter(|&j| !in_active[j])
                    .map(|j| (dot(a.col(j), &y), j))
                    .filter(|&(v, _)| v < floor)
                    .collect();
                if violated.is_empty() {
                    return Ok(FeasibilityResult {
                        status: FeasibilityStatus::Infeasible,
                        solution: None,
                        certificate: Some(y),
                        pivots,
                    });
                }
                violated.sort_by(|p, q| {
                    p.0.partial_cmp(&q.0)
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(p.1.cmp(&q.1))
                });
                for &(_, j) in violated.iter().take(batch) {
                    in_active[j] = true;
                    active.push(j);
                }
                active.sort_unstable();
            }
        }
    }
}

/// Phase-one simplex on a dense tableau with Bland's rule.
///
/// Minimises the sum of artificial variables in `A x + a = b` (rows flipped
/// so that `b ≥ 0`). A zero optimum yields a solution; a positive optimum
/// yields the Farkas certificate `y = −s ∘ (c_B B⁻¹)`, read from the reduced
/// costs of the artificial columns.
fn phase_one<T: Scalar>(
    a: &DenseMatrix<T>,
    b: &[T],
    config: &SolverConfig,
) -> Result<FeasibilityResult<T>> {
    let (m, n) = (a.nrows(), a.ncols());
    let width = n + m + 1;
    let rhs_col = n + m;
    let eps = T::lit(config.pivot_tol);

    let sign: Vec<T> = b
        .iter()
        .map(|&v| if v < T::zero() { -T::one() } else { T::one() })
        .collect();
    let mut tab = vec![T::zero(); m * width];
    for i in 0..m {
        let row = &mut tab[i * width..(i + 1) * width];
        for (j, cell) in row[..n].iter_mut().enumerate() {
            *cell = sign[i] * a.get(i, j);
        }
        row[n + i] = T::one();
        row[rhs_col] = sign[i] * b[i];
    }
    // reduced costs; the last slot holds −(objective value)
    let mut cost = vec![T::zero(); width];
    for i in 0..m {
        for j in 0..n {
            cost[j] = cost[j] - tab[i * width + j];
        }
        cost[rhs_col] = cost[rhs_col] - tab[i * width + rhs_col];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut pivots = 0usize;

    loop {
        let entering = (0..n + m).find(|&j| cost[j] < -eps);
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            let coef = tab[i * width + e];
            if coef > eps {
                let ratio = tab[i * width + rhs_col] / coef;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best - eps
                            || ((ratio - best).abs() <= eps && basis[i] < basis[r])
                        {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
        }
        // phase one is bounded below by zero, so an entering column always has
        // a positive entry; a missing one means the reduced cost is noise
        let Some((r, _)) = leave else {
            cost[e] = T::zero();
            continue;
        };
        pivot(&mut tab, &mut cost, width, m, r, e);
        basis[r] = e;
        pivots += 1;
        if pivots > config.max_pivots {
            return Err(Error::Numerical(format!(
                "simplex exceeded {} pivots",
                config.max_pivots
            )));
        }
    }

    let objective = -cost[rhs_col];
    if objective <= T::lit(FEASIBILITY_TOL) * T::lit(0.1) {
        let mut x = vec![T::zero(); n];
        for (i, &bv) in basis.iter().enumerate() {
            if bv < n {
                x[bv] = tab[i * width + rhs_col].max(T::zero());
            }
        }
        return Ok(FeasibilityResult {
            status: FeasibilityStatus::Feasible,
            solution: Some(x),
            certificate: None,
            pivots,
        });
    }
    // cost of artificial column i is 1 − y_i
    let mut y: Vec<T> = (0..m)
        .map(|i| -(T::one() - cost[n + i]) * sign[i])
        .collect();
    let scale = y.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    if scale > T::zero() {
        for v in &mut y {
            *v = *v / scale;
        }
    }
    Ok(FeasibilityResult {
        status: FeasibilityStatus::Infeasible,
        solution: None,
        certificate: Some(y),
        pivots,
    })
}

fn pivot<T: Scalar>(tab: &mut [T], cost: &mut [T], width: usize, m: usize, r: usize, e: usize) {
    let p = tab[r * width + e];
    for v in &mut tab[r * width..(r + 1) * width] {
        *v = *v / p;
    }
    let pivot_row: Vec<T> = tab[r * width..(r + 1) * width].to_vec();
    for i in 0..m {
        if i == r {
            continue;
        }
        let factor = tab[i * width + e];
        if factor == T::zero() {
            continue;
        }
        let row = &mut tab[i * width..(i + 1) * width];
        for (v, &pv) in row.iter_mut().zip(&pivot_row) {
            *v = *v - factor * pv;
        }
        row[e] = T::zero();
    }
    let factor = cost[e];
    if factor != T::zero() {
        for (v, &pv) in cost.iter_mut().zip(&pivot_row) {
            *v = *v - factor * pv;
        }
        cost[e] = T::zero();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_feasible() {
        let p =
            LinearFeasibilityProblem::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]], vec![1.0, 1.0])
                .unwrap();
        let r = solve_feasibility(&p, &SolverConfig::default()).unwrap();
        assert!(r.is_feasible());
        assert_eq!(r.solution.unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn negative_rhs_is_infeasible() {
        let p = LinearFeasibilityProblem::from_rows(&[vec![1.0, 1.0]], vec![-1.0]).unwrap();
        let r = solve_feasibility(&p, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, FeasibilityStatus::Infeasible);
        let y = r.certificate.unwrap();
        assert!(y[0] > 0.0);
        assert!(p.validates_certificate(&y));
    }

    #[test]
    fn mixed_sign_rows() {
        // x1 - x2 = -1, x1 + x2 = 3  ->  x = (1, 2)
        let p = LinearFeasibilityProblem::from_rows(
            &[vec![1.0, -1.0], vec![1.0, 1.0]],
            vec![-1.0, 3.0],
        )
        .unwrap();
        let r = solve_feasibility(&p, &SolverConfig::default()).unwrap();
        let x = r.solution.unwrap();
        assert!((x[0] - 1.0_f64).abs() < 1e-12 && (x[1] - 2.0_f64).abs() < 1e-12);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let p = LinearFeasibilityProblem::from_rows(
            &[
                vec![1.0, 1.0, 0.0],
                vec![1.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            vec![0.5, 0.5, 0.5],
        )
        .unwrap();
        let r = solve_feasibility(&p, &SolverConfig::default()).unwrap();
        assert!(p.validates_solution(&r.solution.unwrap()));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(LinearFeasibilityProblem::from_rows(&[vec![1.0]], vec![1.0, 2.0]).is_err());
        assert!(LinearFeasibilityProblem::from_rows(&[vec![f64::INFINITY]], vec![1.0]).is_err());
        let p = LinearFeasibilityProblem::from_rows(&vec![vec![1.0]; 3], vec![1.0; 3]).unwrap();
        let tight = SolverConfig {
            max_rows: 2,
            ..SolverConfig::default()
        };
        assert!(matches!(
            solve_feasibility(&p, &tight),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn column_generation_matches_dense() {
        // 2-row system with many columns; only the last column is useful
        let mut cols: Vec<Vec<f64>> = (0..40).map(|_| vec![1.0, 0.0]).collect();
        cols.push(vec![0.0, 1.0]);
        let a = DenseMatrix::from_columns(2, &cols).unwrap();
        let p = LinearFeasibilityProblem::new(a, vec![0.3, 0.7]).unwrap();
        let cg = SolverConfig {
            dense_column_cap: 5,
            ..SolverConfig::default()
        };
        let r = solve_feasibility(&p, &cg).unwrap();
        assert!(p.validates_solution(r.solution.as_ref().unwrap()));

        let bad = LinearFeasibilityProblem::new(p.matrix().clone(), vec![0.3, -0.7]).unwrap();
        let r = solve_feasibility(&bad, &cg).unwrap();
        assert!(bad.validates_certificate(r.certificate.as_ref().unwrap()));
    }
}
