#![allow(dead_code)]

use gsp_core::{AltId, Assortment, ConsumerType, GspModel};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn s(ids: &[AltId]) -> Assortment {
    Assortment::new(ids.iter().copied()).unwrap()
}

pub fn t(seq: &[AltId], pos: usize) -> ConsumerType {
    ConsumerType::new(seq.to_vec(), pos).unwrap()
}

/// A uniformly shuffled sequence over a random non-empty subset of `1..=n`.
pub fn random_sequence<R: Rng>(rng: &mut R, n: usize) -> Vec<AltId> {
    let mut ids: Vec<AltId> = (1..=n as AltId).collect();
    ids.shuffle(rng);
    let len = rng.gen_range(1..=n);
    ids.truncate(len);
    ids
}

pub fn random_type<R: Rng>(rng: &mut R, n: usize, rational_only: bool) -> ConsumerType {
    let seq = random_sequence(rng, n);
    let pos = if rational_only {
        rng.gen_range(0..=1)
    } else {
        rng.gen_range(0..=seq.len())
    };
    ConsumerType::new(seq, pos).unwrap()
}

/// Weights are multiples of `2^-10` summing to exactly one, so every partial
/// sum of them is exact in binary floating point.
pub fn dyadic_weights<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    const UNITS: u32 = 1024;
    let mut cuts: Vec<u32> = (0..k - 1).map(|_| rng.gen_range(1..UNITS)).collect();
    cuts.push(0);
    cuts.push(UNITS);
    cuts.sort_unstable();
    cuts.windows(2)
        .map(|w| f64::from(w[1] - w[0]) / f64::from(UNITS))
        .collect()
}

pub fn random_weights<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

pub fn random_model<R: Rng>(
    rng: &mut R,
    n: usize,
    max_atoms: usize,
    rational_only: bool,
) -> GspModel<f64> {
    let k = rng.gen_range(1..=max_atoms);
    let weights = random_weights(rng, k);
    let atoms: Vec<_> = weights
        .into_iter()
        .map(|w| (random_type(rng, n, rational_only), w))
        .collect();
    GspModel::new(n, atoms).unwrap()
}

/// A random permutation of `0..=n`.
pub fn random_ranking<R: Rng>(rng: &mut R, n: usize) -> Vec<AltId> {
    let mut ids: Vec<AltId> = (0..=n as AltId).collect();
    ids.shuffle(rng);
    ids
}

/// First-available choice under a ranking that includes the no-choice
/// marker 0; evaluated directly on the ranking without any conversion.
pub fn first_available(ranking: &[AltId], offer: &Assortment) -> AltId {
    *ranking
        .iter()
        .find(|&&id| id == 0 || offer.contains(id))
        .expect("0 is always available")
}
