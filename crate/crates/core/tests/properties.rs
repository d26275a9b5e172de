mod common;

use std::collections::HashSet;

use common::*;
use gsp_core::analysis::{
    check_demand_monotonicity_with, check_regularity, gsp_membership, ram_relation,
    MembershipVerdict,
};
use gsp_core::assortment::{expected_revenue, RevenueFunction};
use gsp_core::io;
use gsp_core::{enumerate_types, ranked_list_to_gsp, type_count, Assortment, GspModel, NO_CHOICE};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_rows_satisfy_axioms(seed in any::<u64>(), n in 1usize..=5) {
        let model = random_model(&mut rng(seed), n, 8, false);
        let table = model.full_table().unwrap();
        prop_assert!(table.is_complete());
        for row in table.rows() {
            let total: f64 = row.entries().map(|(_, p)| p).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(row.entries().all(|(_, p)| (0.0..=1.0).contains(&p)));
        }
    }

    #[test]
    fn choice_lands_in_offer_or_nothing(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let ty = random_type(&mut r, n, false);
        for offer in Assortment::all_nonempty(n).unwrap() {
            let pick = ty.choose(&offer);
            prop_assert!(pick == NO_CHOICE || offer.contains(pick));
            let restricted = gsp_core::restrict(ty.sequence(), &offer);
            let expected = match ty.position() {
                0 => NO_CHOICE,
                p => restricted.get(p - 1).copied().unwrap_or(NO_CHOICE),
            };
            prop_assert_eq!(pick, expected);
        }
    }

    #[test]
    fn purchase_mass_is_monotone(seed in any::<u64>(), n in 1usize..=5) {
        let model = random_model(&mut rng(seed), n, 8, false);
        let table = model.full_table().unwrap();
        prop_assert!(check_demand_monotonicity_with(&table, 1e-12).is_empty());
    }

    #[test]
    fn rational_models_are_regular(seed in any::<u64>(), n in 1usize..=5) {
        let model = random_model(&mut rng(seed), n, 8, true);
        let table = model.full_table().unwrap();
        prop_assert!(check_regularity(&table).is_empty());
        prop_assert!(ram_relation(&table).is_empty());
    }

    #[test]
    fn ranked_lists_embed_exactly(seed in any::<u64>(), n in 1usize..=5, k in 1usize..=8) {
        let mut r = rng(seed);
        let weights = dyadic_weights(&mut r, k);
        let rankings: Vec<_> = weights.iter().map(|&w| (random_ranking(&mut r, n), w)).collect();
        let model = ranked_list_to_gsp(n, &rankings).unwrap();
        prop_assert_eq!(model.irrational_mass(), 0.0);
        for offer in Assortment::all_nonempty(n).unwrap() {
            for x in offer.members().iter().copied().chain([NO_CHOICE]) {
                let direct: f64 = rankings
                    .iter()
                    .filter(|(rank, _)| first_available(rank, &offer) == x)
                    .map(|(_, w)| *w)
                    .sum();
                prop_assert_eq!(model.choice_prob(x, &offer).unwrap(), direct);
            }
        }
    }

    #[test]
    fn revenue_is_linear_in_weights(seed in any::<u64>(), n in 1usize..=5, alpha in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let a = random_model(&mut r, n, 5, false);
        let b = random_model(&mut r, n, 5, false);
        let revenues = RevenueFunction::new((0..n).map(|_| r.gen_range(0.5..10.0)).collect()).unwrap();
        let mixed = a.mix(&b, alpha).unwrap();
        for offer in Assortment::all_nonempty(n).unwrap() {
            let lhs = expected_revenue(&mixed, &offer, &revenues).unwrap();
            let rhs = alpha * expected_revenue(&a, &offer, &revenues).unwrap()
                + (1.0 - alpha) * expected_revenue(&b, &offer, &revenues).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn single_precision_tracks_double(seed in any::<u64>(), n in 1usize..=4) {
        let model = random_model(&mut rng(seed), n, 6, false);
        let narrow = GspModel::<f32>::new(
            n,
            model.atoms().iter().map(|a| (a.consumer.clone(), a.weight as f32)),
        )
        .unwrap();
        for offer in Assortment::all_nonempty(n).unwrap() {
            for &x in offer.members() {
                let wide = model.choice_prob(x, &offer).unwrap();
                let single = narrow.choice_prob(x, &offer).unwrap();
                prop_assert!((wide - f64::from(single)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), n in 1usize..=4) {
        let model = random_model(&mut rng(seed), n, 6, false);
        let back: GspModel<f64> = io::model_from_json(&io::model_to_json(&model)).unwrap();
        prop_assert_eq!(&back, &model);
        let table = model.full_table().unwrap();
        let again = io::table_from_json::<f64>(&io::table_to_json(&table)).unwrap();
        prop_assert_eq!(again, table);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_tables_are_members(seed in any::<u64>(), n in 1usize..=4) {
        let model = random_model(&mut rng(seed), n, 6, false);
        let table = model.full_table().unwrap();
        match gsp_membership(&table, n) {
            MembershipVerdict::InGsp { model: witness, max_error } => {
                prop_assert!(max_error <= 1e-7);
                let rebuilt = witness.full_table().unwrap();
                prop_assert!(rebuilt.max_abs_diff(&table).unwrap() <= 1e-7);
            }
            other => prop_assert!(false, "expected InGsp, got {}", other.label()),
        }
    }
}

#[test]
fn enumeration_matches_count() {
    for n in 1..=5 {
        let types = enumerate_types(n, None).unwrap();
        assert_eq!(types.len() as u128, type_count(n, None));
        let unique: HashSet<_> = types.iter().collect();
        assert_eq!(unique.len(), types.len());
        for cap in 1..=n {
            assert_eq!(
                enumerate_types(n, Some(cap)).unwrap().len() as u128,
                type_count(n, Some(cap))
            );
        }
    }
}
