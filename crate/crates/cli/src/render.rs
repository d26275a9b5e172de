//! Plain-text layouts.

use gsp_core::analysis::{
    MembershipVerdict, MonotonicityViolation, PrecedenceRelation, RamVerdict, RegularityViolation,
};
use gsp_core::assortment::{AssortmentSolution, RatioReport};
use gsp_core::{Model, Table};

/// Left-aligns the first column and right-aligns the rest.
pub fn aligned(headers: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(k, (c, &w))| {
                if k == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(headers);
    out.push('\n');
    out.push_str(
        &widths
            .iter()
            .map(|&w| "-".repeat(w))
            .collect::<Vec<_>>()
            .join("  "),
    );
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

pub fn percent(p: f64) -> String {
    format!("{:.2}%", 100.0 * p)
}

/// One row per assortment, one column per alternative plus no-choice.
pub fn choice_table(table: &Table) -> String {
    let n = table.universe_size();
    let mut headers = vec!["S".to_string()];
    headers.extend((1..=n).map(|i| i.to_string()));
    headers.push("none".into());
    let rows: Vec<Vec<String>> = table
        .rows()
        .iter()
        .map(|row| {
            let mut cells = vec![row.assortment().to_string()];
            for id in 1..=n as u32 {
                cells.push(if row.assortment().contains(id) {
                    percent(row.prob(id))
                } else {
                    "-".into()
                });
            }
            cells.push(percent(row.no_choice()));
            cells
        })
        .collect();
    aligned(&headers, &rows)
}

pub fn model(model: &Model) -> String {
    let headers = ["type", "weight", "kind"].map(String::from);
    let rows: Vec<Vec<String>> = model
        .atoms()
        .iter()
        .map(|a| {
            vec![
                a.consumer.to_string(),
                format!("{:.6}", a.weight),
                if a.consumer.is_rational() {
                    "rational"
                } else {
                    "irrational"
                }
                .into(),
            ]
        })
        .collect();
    aligned(&headers, &rows)
}

pub fn regularity(violations: &[RegularityViolation<f64>]) -> String {
    if violations.is_empty() {
        return "regularity: no violations\n".into();
    }
    let mut out = format!("regularity: {} violation(s)\n", violations.len());
    for v in violations {
        out.push_str(&format!(
            "  P({x},{}) = {} < P({x},{}) = {}\n",
            v.smaller_set,
            percent(v.p_small),
            v.larger_set,
            percent(v.p_large),
            x = v.alternative,
        ));
    }
    out
}

pub fn monotonicity(violations: &[MonotonicityViolation<f64>]) -> String {
    if violations.is_empty() {
        return "purchase monotonicity: holds\n".into();
    }
    let mut out = format!(
        "purchase monotonicity: {} violating pair(s)\n",
        violations.len()
    );
    for v in violations {
        out.push_str(&format!(
            "  purchase({}) = {} > purchase({}) = {}\n",
            v.smaller_set,
            percent(v.mass_small),
            v.larger_set,
            percent(v.mass_large)
        ));
    }
    out
}

pub fn ram(verdict: &RamVerdict, relation: &PrecedenceRelation) -> String {
    let mut out = match verdict {
        RamVerdict::Representable => {
            "random attention: representable (precedence relation is acyclic)\n".to_string()
        }
        RamVerdict::NotRepresentable { cycle } => {
            let mut path: Vec<String> = cycle.iter().map(u32::to_string).collect();
            path.push(cycle[0].to_string());
            format!(
                "random attention: not representable, cycle {}\n",
                path.join(" -> ")
            )
        }
        RamVerdict::Undetermined { missing } => format!(
            "random attention: undetermined ({} assortment(s) missing from the table)\n",
            missing.len()
        ),
    };
    for ((x, y), witness) in &relation.edges {
        out.push_str(&format!("  {x} < {y}  via S = {witness}\n"));
    }
    out
}

pub fn membership(verdict: &MembershipVerdict<f64>) -> String {
    match verdict {
        MembershipVerdict::InGsp {
            model: m,
            max_error,
        } => format!(
            "GSP membership: InGSP (witness reproduces the table within {max_error:.1e})\n{}",
            model(m)
        ),
        MembershipVerdict::NotInGsp(cert) => {
            format!("GSP membership: NotInGSP\n{}", cert.derivation)
        }
        MembershipVerdict::Unknown(reason) => format!("GSP membership: undetermined ({reason})\n"),
    }
}

fn solution_row(s: &AssortmentSolution<f64>) -> Vec<String> {
    vec![
        s.method.name().to_string(),
        s.assortment.to_string(),
        format!("{:.4}", s.expected_revenue),
        s.evaluations.to_string(),
    ]
}

pub fn solutions(solutions: &[&AssortmentSolution<f64>]) -> String {
    let headers = ["method", "assortment", "expected revenue", "evaluations"].map(String::from);
    let rows: Vec<Vec<String>> = solutions.iter().map(|s| solution_row(s)).collect();
    aligned(&headers, &rows)
}

pub fn ratio(report: &RatioReport<f64>) -> String {
    format!(
        "{}ratio {:.4}  bound r1/rk {:.4}  revenue levels {}\n",
        solutions(&[&report.optimal, &report.heuristic]),
        report.ratio,
        report.bound,
        report.levels
    )
}
