//! Re-derives the documented numbers of every example from its fixture.

use gsp_core::analysis::{
    check_demand_monotonicity, check_regularity, gsp_membership, ram_membership, MembershipVerdict,
    RamVerdict,
};
use gsp_core::solver::{solve_feasibility, FeasibilityStatus, SolverConfig};

use crate::certificate::{counterexample_system, PUBLISHED_CERTIFICATE};
use crate::{load_example, ReferenceExample, EXAMPLE_NAMES};

/// Reproduction tolerance against the stored decimals.
pub const REPRODUCTION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExampleReport {
    pub name: String,
    pub checks: Vec<Check>,
}

impl ExampleReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }
}

fn check(label: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        label: label.to_string(),
        passed,
        detail: detail.into(),
    }
}

pub fn verify_example(example: &ReferenceExample) -> ExampleReport {
    let mut checks = Vec::new();
    if let Some(model) = &example.reference_model {
        reference_model_checks(example, model, &mut checks);
    }
    if let Some(table) = &example.reference_table {
        full_table_checks(example, table, &mut checks);
    }
    if checks.is_empty() {
        checks.push(check("fixture", false, "nothing to verify"));
    }
    ExampleReport {
        name: example.name.clone(),
        checks,
    }
}

fn reference_model_checks(
    example: &ReferenceExample,
    model: &gsp_core::Model,
    checks: &mut Vec<Check>,
) {
    let observed = match example.dataset.to_table() {
        Ok(t) => t,
        Err(e) => {
            checks.push(check("dataset", false, e.to_string()));
            return;
        }
    };
    match model.choice_table(&example.dataset.assortments()) {
        Ok(predicted) => {
            let diff = predicted.max_abs_diff(&observed).unwrap_or(f64::INFINITY);
            checks.push(check(
                "reference model reproduces the observed shares",
                diff <= REPRODUCTION_TOL,
                format!("max |difference| = {diff:.3e}"),
            ));
        }
        Err(e) => checks.push(check(
            "reference model reproduces the observed shares",
            false,
            e.to_string(),
        )),
    }
    if let Some(expected) = example.expected_irrational_mass {
        let mass = model.irrational_mass();
        checks.push(check(
            "irrational mass",
            (mass - expected).abs() <= REPRODUCTION_TOL,
            format!("{mass:.4} (documented {expected:.2})"),
        ));
    }
    let violations = check_regularity(&observed);
    if observed.is_complete() {
        checks.push(check(
            "regularity holds",
            violations.is_empty(),
            format!("{} violation(s)", violations.len()),
        ));
    } else {
        let detail = violations
            .first()
            .map(|v| {
                format!(
                    "P({},{}) = {:.2} < P({},{}) = {:.2}",
                    v.alternative, v.smaller_set, v.p_small, v.alternative, v.larger_set, v.p_large
                )
            })
            .unwrap_or_else(|| "none".into());
        checks.push(check(
            "regularity violated (no RUM fits)",
            !violations.is_empty(),
            detail,
        ));
    }
}

fn full_table_checks(example: &ReferenceExample, table: &gsp_core::Table, checks: &mut Vec<Check>) {
    let monotone = check_demand_monotonicity(table);
    checks.push(check(
        "purchase probability monotone in the offer set",
        monotone.is_empty(),
        format!("{} violating pair(s)", monotone.len()),
    ));
    let verdict = gsp_membership(table, table.universe_size());
    let expect_member = example.reference_model.is_some();
    match (&verdict, expect_member) {
        (MembershipVerdict::InGsp { model, max_error }, true) => checks.push(check(
            "membership: InGSP",
            *max_error <= 1e-7,
            format!(
                "witness with {} types, max error {max_error:.1e}",
                model.support_size()
            ),
        )),
        (MembershipVerdict::NotInGsp(cert), false) => checks.push(check(
            "membership: NotInGSP with validating certificate",
            cert.rhs_value < -1e-7 && cert.min_column_value >= -1e-9,
            format!(
                "b'y = {:.3}, min (A'y)_j = {:.1e}",
                cert.rhs_value, cert.min_column_value
            ),
        )),
        (other, _) => checks.push(check(
            "membership",
            false,
            format!("unexpected verdict {}", other.label()),
        )),
    }
    if !expect_member {
        let ram = ram_membership(table);
        checks.push(check(
            "random attention representable",
            ram == RamVerdict::Representable,
            format!("{ram:?}"),
        ));
        let sys = counterexample_system();
        checks.push(check(
            "published dual vector (-1,-1,-1,2) certifies the 4x12 system",
            sys.problem.validates_certificate(&PUBLISHED_CERTIFICATE),
            "A'y >= 0 and b'y = -1",
        ));
        let solved = solve_feasibility(&sys.problem, &SolverConfig::default());
        checks.push(check(
            "4x12 system infeasible",
            matches!(&solved, Ok(r) if r.status == FeasibilityStatus::Infeasible),
            match &solved {
                Ok(r) => format!("{:?}", r.status),
                Err(e) => e.to_string(),
            },
        ));
    }
}

/// Verifies the six built-in examples; a fixture that fails to load yields
/// a failing report.
pub fn verify_all() -> Vec<ExampleReport> {
    EXAMPLE_NAMES
        .iter()
        .map(|name| match load_example(name) {
            Ok(example) => verify_example(&example),
            Err(e) => ExampleReport {
                name: name.to_string(),
                checks: vec![check("fixture loads", false, e.to_string())],
            },
        })
        .collect()
}
