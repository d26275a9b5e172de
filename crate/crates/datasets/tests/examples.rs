use gsp_core::analysis::{
    gsp_membership, ram_membership, ram_relation, MembershipVerdict, RamVerdict,
};
use gsp_core::estimation::{fit, FitConfig};
use gsp_core::{AltId, Assortment, ConsumerType, GspModel};
use gsp_datasets::*;

fn s(ids: &[AltId]) -> Assortment {
    Assortment::new(ids.iter().copied()).unwrap()
}

fn t(seq: &[AltId], pos: usize) -> ConsumerType {
    ConsumerType::new(seq.to_vec(), pos).unwrap()
}

#[test]
fn all_examples_verify() {
    for report in verify_all() {
        for c in &report.checks {
            assert!(c.passed, "{}: {} ({})", report.name, c.label, c.detail);
        }
        assert!(report.passed());
    }
}

#[test]
fn camera_model_matches_condition_two() {
    let ex = load_example("cameras").unwrap();
    let row = ex
        .reference_model
        .unwrap()
        .choice_row(&s(&[1, 2, 3]))
        .unwrap();
    for (got, want) in row.member_probs().iter().zip([0.22, 0.57, 0.21]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn counterexample_top_row() {
    let table = load_example("counterexample")
        .unwrap()
        .reference_table
        .unwrap();
    let row = table.row(&s(&[1, 2, 3])).unwrap();
    assert_eq!((row.prob(1), row.prob(2), row.prob(3)), (1.0, 0.0, 0.0));
}

#[test]
fn shipped_table_file_equals_builtin() {
    let builtin = load_example("counterexample")
        .unwrap()
        .reference_table
        .unwrap();
    assert_eq!(counterexample_table().unwrap(), builtin);
}

#[test]
fn documented_irrational_masses() {
    let expected = [
        ("cameras", 0.28),
        ("economist", 0.84),
        ("microwaves", 0.17),
        ("mcfadden", 0.20),
        ("herne", 0.10),
    ];
    for (name, mass) in expected {
        let model = load_example(name).unwrap().reference_model.unwrap();
        assert!((model.irrational_mass() - mass).abs() < 1e-12, "{name}");
    }
    let mcfadden = load_example("mcfadden").unwrap().reference_model.unwrap();
    assert_eq!(
        (mcfadden.support_size(), mcfadden.irrational_support()),
        (11, 3)
    );
}

/// The three-type magazine model as usually quoted buys the bundle from
/// every assortment containing it, so it cannot produce the 16% online share.
#[test]
fn quoted_magazine_model_misses_the_table() {
    let quoted: gsp_core::Model = GspModel::new(
        3,
        [
            (t(&[3, 1, 2], 1), 0.16),
            (t(&[3, 2, 1], 1), 0.16),
            (t(&[2, 3, 1], 2), 0.68),
        ],
    )
    .unwrap();
    assert!((quoted.irrational_mass() - 0.68).abs() < 1e-12);
    assert!((quoted.choice_prob(1, &s(&[1, 3])).unwrap() - 0.68).abs() < 1e-12);
    assert_eq!(quoted.choice_prob(1, &s(&[1, 2, 3])).unwrap(), 0.0);
    assert!((quoted.choice_prob(3, &s(&[1, 2, 3])).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn herne_and_cameras_are_fit_exactly() {
    for (name, k) in [
        ("cameras", 4),
        ("herne", 3),
        ("microwaves", 4),
        ("economist", 3),
    ] {
        let ex = load_example(name).unwrap();
        let r = fit(&ex.dataset, &FitConfig::new(k)).unwrap();
        assert!(r.residual_norm <= 1e-7, "{name}: {}", r.residual_norm);
        assert!(r.model.support_size() <= k);
    }
}

#[test]
fn mcfadden_is_regular_gsp_and_attention_representable() {
    let table = load_example("mcfadden").unwrap().reference_table.unwrap();
    assert!(ram_relation(&table).is_empty());
    assert_eq!(ram_membership(&table), RamVerdict::Representable);
    match gsp_membership(&table, 3) {
        MembershipVerdict::InGsp { model, .. } => {
            assert!(model.full_table().unwrap().max_abs_diff(&table).unwrap() <= 1e-7)
        }
        other => panic!("expected InGSP, got {}", other.label()),
    }
}

#[test]
fn attention_cycle_instance() {
    let model = attention_cycle_model().unwrap();
    let p = |x, ids: &[AltId]| model.choice_prob(x, &s(ids)).unwrap();
    // the six probabilities used to exhibit the cycle
    for (got, want) in [
        (p(1, &[1, 2, 3, 4]), 0.11),
        (p(1, &[1, 3, 4]), 0.01),
        (p(2, &[2, 3, 4]), 0.6),
        (p(2, &[2, 4]), 0.5),
        (p(3, &[1, 3]), 0.6),
        (p(3, &[3]), 0.5),
    ] {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
    let table = model.full_table().unwrap();
    let rel = ram_relation(&table);
    for edge in [(1, 2), (2, 3), (3, 1)] {
        assert!(rel.edges.contains_key(&edge), "missing {edge:?}");
    }
    let verdict = ram_membership(&table);
    assert_eq!(verdict.is_ram(), Some(false));
    assert_eq!(verdict.cycle(), Some(&[1, 2, 3][..]));
}

#[test]
fn printed_farkas_matrix_matches_the_system() {
    // transpose of the constraint matrix exactly as printed, one row per variable
    const PRINTED: [[f64; 4]; 12] = [
        [0., 1., 1., 1.],
        [0., 0., 1., 1.],
        [1., 0., 1., 1.],
        [1., 1., 0., 1.],
        [0., 1., 0., 1.],
        [1., 0., 0., 1.],
        [1., 0., 1., 1.],
        [0., 0., 1., 1.],
        [0., 1., 1., 1.],
        [0., 1., 0., 1.],
        [1., 1., 0., 1.],
        [1., 0., 0., 1.],
    ];
    // the primal matrix as printed, rows: total, P(1,{1,2}), P(2,{2,3}), P(3,{1,3})
    const PRIMAL: [[f64; 12]; 4] = [
        [1., 1., 1., 1., 1., 1., 1., 1., 1., 1., 1., 1.],
        [1., 1., 1., 0., 0., 0., 1., 1., 1., 0., 0., 0.],
        [1., 0., 0., 1., 1., 0., 0., 0., 1., 1., 1., 0.],
        [0., 0., 1., 1., 0., 1., 1., 0., 0., 0., 1., 1.],
    ];
    let sys = counterexample_system();
    let a = sys.problem.matrix();
    for j in 0..12 {
        assert_eq!(a.col(j), &PRINTED[j][..], "variable {}", sys.variables[j]);
        for i in 0..4 {
            assert_eq!(a.get(i, j), PRIMAL[3 - i][j]);
        }
    }
    let y = PUBLISHED_CERTIFICATE;
    for row in PRINTED {
        assert!(row.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() >= 0.0);
    }
    assert_eq!(y.iter().sum::<f64>(), -1.0);
}

#[test]
fn export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let written = export_all(dir.path()).unwrap();
    assert!(written.iter().all(|p| p.exists()));
    let back = import_dir(dir.path()).unwrap();
    assert_eq!(back, all_examples().unwrap());
    let text = std::fs::read_to_string(dir.path().join("counterexample.table.json")).unwrap();
    assert_eq!(
        gsp_core::io::table_from_json::<f64>(&text).unwrap(),
        counterexample_table().unwrap()
    );
}

#[test]
fn worst_case_fixture() {
    let (model, revenues) = worst_case_instance().unwrap();
    let report = gsp_core::assortment::ratio_report(&model, &revenues).unwrap();
    assert_eq!(
        (
            report.optimal.expected_revenue,
            report.heuristic.expected_revenue
        ),
        (2.0, 1.0)
    );
    assert_eq!((report.ratio, report.bound), (0.5, 0.5));
}
