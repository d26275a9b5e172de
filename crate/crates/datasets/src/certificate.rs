//! The four-equation system behind the proof that the deterministic
//! counterexample is not a GSP model.
//!
//! The twelve variables are the weights of the full-length types with
//! position 1 or 2. The rows state `P(3,{1,3}) = 1`, `P(2,{2,3}) = 1`,
//! `P(1,{1,2}) = 1` and that the weights sum to one, in that order, so the
//! published dual vector `(−1, −1, −1, 2)` applies verbatim. Reversing the
//! row order gives the equivalent vector `(2, −1, −1, −1)`.

use gsp_core::solver::{DenseMatrix, LinearFeasibilityProblem};
use gsp_core::{AltId, Assortment, ConsumerType};

/// Farkas multipliers for [`counterexample_system`], one per row.
pub const PUBLISHED_CERTIFICATE: [f64; 4] = [-1.0, -1.0, -1.0, 2.0];

/// Column order of the twelve variables.
const VARIABLES: [([AltId; 3], usize); 12] = [
    ([1, 2, 3], 1),
    ([1, 3, 2], 1),
    ([3, 1, 2], 1),
    ([2, 3, 1], 1),
    ([2, 1, 3], 1),
    ([3, 2, 1], 1),
    ([2, 1, 3], 2),
    ([2, 3, 1], 2),
    ([3, 2, 1], 2),
    ([3, 1, 2], 2),
    ([1, 3, 2], 2),
    ([1, 2, 3], 2),
];

pub struct CounterexampleSystem {
    pub problem: LinearFeasibilityProblem<f64>,
    pub variables: Vec<ConsumerType>,
    pub constraints: Vec<String>,
}

/// Builds the system by evaluating each variable's type on the three
/// deterministic rows.
pub fn counterexample_system() -> CounterexampleSystem {
    let variables: Vec<ConsumerType> = VARIABLES
        .iter()
        .map(|(seq, pos)| ConsumerType::new(seq.to_vec(), *pos).expect("valid type"))
        .collect();
    let conditions: [(AltId, &[AltId]); 3] = [(3, &[1, 3]), (2, &[2, 3]), (1, &[1, 2])];
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut constraints = Vec::new();
    for (x, ids) in conditions {
        let offer = Assortment::new(ids.iter().copied()).expect("valid assortment");
        rows.push(
            variables
                .iter()
                .map(|t| if t.choose(&offer) == x { 1.0 } else { 0.0 })
                .collect(),
        );
        constraints.push(format!("P({x},{offer}) = 1"));
    }
    rows.push(vec![1.0; variables.len()]);
    constraints.push("total mass = 1".into());
    let matrix = DenseMatrix::from_rows(&rows).expect("rectangular");
    CounterexampleSystem {
        problem: LinearFeasibilityProblem::new(matrix, vec![1.0; 4]).expect("finite system"),
        variables,
        constraints,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificate_orders() {
        let sys = counterexample_system();
        assert!(sys.problem.validates_certificate(&PUBLISHED_CERTIFICATE));
        let mut reversed = PUBLISHED_CERTIFICATE;
        reversed.reverse();
        assert!(!sys.problem.validates_certificate(&reversed));
    }
}
