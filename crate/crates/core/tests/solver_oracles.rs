mod common;

use common::*;
use gsp_core::estimation::{fit, ChoiceDataset, FitConfig};
use gsp_core::solver::{
    nnls_simplex, solve_feasibility, DenseMatrix, FeasibilityStatus, LinearFeasibilityProblem,
    SolverConfig,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Plain Gauss-Jordan with partial pivoting, kept separate from the crate's
/// own elimination so the oracle shares no code with the solver.
#[allow(clippy::needless_range_loop)]
fn gauss_jordan(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = m.len();
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[p][c].abs() < 1e-10 {
            return None;
        }
        m.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..=n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    Some((0..n).map(|r| m[r][n] / m[r][r]).collect())
}

/// `min ‖y − Aλ‖` over the simplex by enumerating supports: on each support
/// solve the equality-constrained least squares through its KKT system and
/// keep non-negative solutions.
fn simplex_ls_oracle(cols: &[Vec<f64>], y: &[f64]) -> f64 {
    let n = cols.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
        let k = support.len();
        let mut kkt = vec![vec![0.0; k + 2]; k + 1];
        for (a, &i) in support.iter().enumerate() {
            for (b, &j) in support.iter().enumerate() {
                kkt[a][b] = cols[i].iter().zip(&cols[j]).map(|(p, q)| p * q).sum();
            }
            kkt[a][k] = 1.0;
            kkt[k][a] = 1.0;
            kkt[a][k + 1] = cols[i].iter().zip(y).map(|(p, q)| p * q).sum();
        }
        kkt[k][k + 1] = 1.0;
        let Some(sol) = gauss_jordan(kkt) else {
            continue;
        };
        if sol[..k].iter().any(|&w| w < -1e-12) {
            continue;
        }
        let fitted: Vec<f64> = (0..y.len())
            .map(|r| support.iter().zip(&sol).map(|(&j, w)| cols[j][r] * w).sum())
            .collect();
        let res = fitted
            .iter()
            .zip(y)
            .map(|(f, t)| (f - t).powi(2))
            .sum::<f64>()
            .sqrt();
        best = best.min(res);
    }
    best
}

fn random_instance(seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=5);
    let n = rng.gen_range(1..=7);
    let cols = (0..n)
        .map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let y = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (cols, y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn nnls_matches_support_enumeration(seed in any::<u64>()) {
        let (cols, y) = random_instance(seed);
        let a = DenseMatrix::from_columns(y.len(), &cols).unwrap();
        let r = nnls_simplex(&a, &y, cols.len(), 0.0).unwrap();
        let oracle = simplex_ls_oracle(&cols, &y);
        prop_assert!((r.residual_norm - oracle).abs() < 1e-8, "solver {} oracle {}", r.residual_norm, oracle);
        let total: f64 = r.weights.iter().map(|(_, w)| w).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(r.weights.iter().all(|&(_, w)| w > 0.0));
    }

    #[test]
    fn residual_history_never_increases(seed in any::<u64>()) {
        let (cols, y) = random_instance(seed);
        let a = DenseMatrix::from_columns(y.len(), &cols).unwrap();
        let r = nnls_simplex(&a, &y, cols.len(), 0.0).unwrap();
        for w in r.history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12, "history {:?}", r.history);
        }
    }

    #[test]
    fn atom_budget_is_respected(seed in any::<u64>(), budget in 1usize..=3) {
        let (cols, y) = random_instance(seed);
        let a = DenseMatrix::from_columns(y.len(), &cols).unwrap();
        let r = nnls_simplex(&a, &y, budget, 0.0).unwrap();
        prop_assert!(r.weights.len() <= budget);
    }

    #[test]
    fn feasible_systems_are_solved(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=12);
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| f64::from(rng.gen_range(0..2u8))).collect())
            .collect();
        let x: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.5) { rng.gen_range(0.0..1.0) } else { 0.0 }).collect();
        let b: Vec<f64> = (0..m).map(|i| cols.iter().zip(&x).map(|(c, w)| c[i] * w).sum()).collect();
        let p = LinearFeasibilityProblem::new(DenseMatrix::from_columns(m, &cols).unwrap(), b).unwrap();
        let r = solve_feasibility(&p, &SolverConfig::default()).unwrap();
        prop_assert_eq!(r.status, FeasibilityStatus::Feasible);
        prop_assert!(p.validates_solution(r.solution.as_ref().unwrap()));
    }

    #[test]
    fn verdicts_carry_valid_evidence(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=8);
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.gen_range(-2i8..=2).into()).collect())
            .collect();
        let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-2i8..=2).into()).collect();
        let p = LinearFeasibilityProblem::new(DenseMatrix::from_columns(m, &cols).unwrap(), b).unwrap();
        let r = solve_feasibility(&p, &SolverConfig::default()).unwrap();
        match r.status {
            FeasibilityStatus::Feasible => prop_assert!(p.validates_solution(r.solution.as_ref().unwrap())),
            FeasibilityStatus::Infeasible => prop_assert!(p.validates_certificate(r.certificate.as_ref().unwrap())),
        }
    }
}

fn random_dataset(seed: u64, n: usize) -> ChoiceDataset<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = random_model(&mut rng, n, 6, false);
    // perturb so the fit is not exact and budgets matter
    let table = model.full_table().unwrap();
    let rows = table
        .rows()
        .iter()
        .map(|row| {
            let raw: Vec<f64> = row
                .entries()
                .map(|(_, p)| p + rng.gen_range(0.0..0.1))
                .collect();
            let total: f64 = raw.iter().sum();
            let members = raw[..raw.len() - 1].iter().map(|p| p / total).collect();
            gsp_core::estimation::Observation::new(
                row.assortment().clone(),
                members,
                raw[raw.len() - 1] / total,
                None,
            )
            .unwrap()
        })
        .collect();
    ChoiceDataset::new(n, rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn larger_budget_never_hurts(seed in any::<u64>(), k in 1usize..=6) {
        let data = random_dataset(seed, 3);
        let small = fit(&data, &FitConfig::new(k)).unwrap();
        let large = fit(&data, &FitConfig::new(k + 1)).unwrap();
        prop_assert!(large.residual_norm <= small.residual_norm + 1e-9,
            "k={} {} vs k+1 {}", k, small.residual_norm, large.residual_norm);
        prop_assert!(small.model.support_size() <= k);
    }

    #[test]
    fn excluded_irrational_types_stay_out(seed in any::<u64>()) {
        let data = random_dataset(seed, 3);
        let free = fit(&data, &FitConfig::new(20)).unwrap();
        let rational = fit(&data, &FitConfig::new(20).with_irrational_penalty(f64::INFINITY)).unwrap();
        prop_assert_eq!(rational.irrational_mass, 0.0);
        prop_assert!(rational.model.atoms().iter().all(|a| a.consumer.is_rational()));
        prop_assert!(free.residual_norm <= rational.residual_norm + 1e-9);
    }

    #[test]
    fn reported_diagnostics_match_model(seed in any::<u64>()) {
        let data = random_dataset(seed, 3);
        let r = fit(&data, &FitConfig::new(8).with_irrational_penalty(0.05)).unwrap();
        let recomputed = gsp_core::estimation::row_residuals(&r.model, &data).unwrap();
        let norm = recomputed.iter().map(|(_, e)| e * e).sum::<f64>().sqrt();
        prop_assert!((norm - r.residual_norm).abs() < 1e-9);
        prop_assert!((r.irrational_mass - r.model.irrational_mass()).abs() < 1e-12);
    }
}

#[test]
fn exact_data_is_fit_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let model = random_model(&mut rng, 4, 5, false);
        let data = ChoiceDataset::from_table(&model.full_table().unwrap()).unwrap();
        let r = fit(&data, &FitConfig::new(15)).unwrap();
        assert!(r.residual_norm <= 1e-6, "residual {}", r.residual_norm);
    }
}
