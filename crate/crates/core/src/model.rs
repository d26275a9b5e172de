//! Finitely supported distributions over consumer types.

use std::collections::HashMap;

use crate::choice::{AltId, Assortment, ConsumerType, MAX_UNIVERSE, NO_CHOICE};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};
use crate::table::{ChoiceRow, ChoiceTable};

/// Tolerance on the total mass of a model after renormalisation.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;
/// Inputs whose total mass is within this distance of one are renormalised.
pub const RENORMALIZE_TOL: f64 = 1e-6;

/// A weighted consumer type.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom<T> {
    pub consumer: ConsumerType,
    pub weight: T,
}

/// A probability distribution over consumer types on the universe `{1..N}`.
///
/// Construction drops zero weights, merges repeated types by summing their
/// weights and renormalises totals that are within `1e-6` of one.
#[derive(Clone, Debug, PartialEq)]
pub struct GspModel<T> {
    universe_size: usize,
    atoms: Vec<Atom<T>>,
}

impl<T: Scalar> GspModel<T> {
    pub fn new(
        universe_size: usize,
        atoms: impl IntoIterator<Item = (ConsumerType, T)>,
    ) -> Result<Self> {
        if !(1..=MAX_UNIVERSE).contains(&universe_size) {
            return Err(Error::InvalidModel(format!(
                "universe size {universe_size} must lie in 1..={MAX_UNIVERSE}"
            )));
        }
        let mut merged: Vec<Atom<T>> = Vec::new();
        let mut index: HashMap<ConsumerType, usize> = HashMap::new();
        for (k, (consumer, weight)) in atoms.into_iter().enumerate() {
            if !weight.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "atom {k} {consumer}: weight is not finite"
                )));
            }
            if weight < T::zero() {
                return Err(Error::InvalidModel(format!(
                    "atom {k} {consumer}: negative weight {weight}"
                )));
            }
            if consumer.max_id() as usize > universe_size {
                return Err(Error::InvalidModel(format!(
                    "atom {k} {consumer}: references alternative {} outside 1..={universe_size}",
                    consumer.max_id()
                )));
            }
            if weight == T::zero() {
                continue;
            }
            match index.get(&consumer) {
                Some(&slot) => merged[slot].weight = merged[slot].weight + weight,
                None => {
                    index.insert(consumer.clone(), merged.len());
                    merged.push(Atom { consumer, weight });
                }
            }
        }
        let total = compensated_sum(merged.iter().map(|a| a.weight));
        let gap = (total - T::one()).abs();
        if merged.is_empty() || gap > T::lit(RENORMALIZE_TOL) {
            return Err(Error::InvalidModel(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        if gap > T::lit(WEIGHT_SUM_TOL) {
            for atom in &mut merged {
                atom.weight = atom.weight / total;
            }
        }
        Ok(Self {
            universe_size,
            atoms: merged,
        })
    }

    /// A model putting all mass on one type.
    pub fn single(universe_size: usize, consumer: ConsumerType) -> Result<Self> {
        Self::new(universe_size, [(consumer, T::one())])
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    /// Total weight of irrational types (position of two or more).
    pub fn irrational_mass(&self) -> T {
        compensated_sum(
            self.atoms
                .iter()
                .filter(|a| !a.consumer.is_rational())
                .map(|a| a.weight),
        )
    }

    pub fn irrational_support(&self) -> usize {
        self.atoms
            .iter()
            .filter(|a| !a.consumer.is_rational())
            .count()
    }

    fn check_offer(&self, offer: &Assortment) -> Result<()> {
        if offer.max_id() as usize > self.universe_size {
            return Err(Error::InvalidAssortment(format!(
                "{offer} is not a subset of 1..={}",
                self.universe_size
            )));
        }
        Ok(())
    }

    /// `P(x, S)`: the total weight of types choosing `x` from `offer`.
    pub fn choice_prob(&self, x: AltId, offer: &Assortment) -> Result<T> {
        self.check_offer(offer)?;
        if x != NO_CHOICE && !offer.contains(x) {
            return Err(Error::InvalidAlternative {
                id: x,
                reason: format!("not a member of {offer} and not the no-choice option"),
            });
        }
        Ok(compensated_sum(
            self.atoms
                .iter()
                .filter(|a| a.consumer.choose(offer) == x)
                .map(|a| a.weight),
        ))
    }

    /// All choice probabilities for `offer` in one pass.
    pub fn choice_row(&self, offer: &Assortment) -> Result<ChoiceRow<T>> {
        self.check_offer(offer)?;
        let members = offer.members();
        let mut buckets: Vec<Vec<T>> = vec![Vec::new(); members.len() + 1];
        for atom in &self.atoms {
            let pick = atom.consumer.choose(offer);
            let slot = if pick == NO_CHOICE {
                members.len()
            } else {
                members
                    .binary_search(&pick)
                    .expect("choice lies in the offer")
            };
            buckets[slot].push(atom.weight);
        }
        let mut probs: Vec<T> = buckets.into_iter().map(compensated_sum).collect();
        let no_choice = probs.pop().expect("no-choice bucket");
        ChoiceRow::new(offer.clone(), probs, no_choice)
    }

    /// Evaluates the model on each assortment.
    pub fn choice_table(&self, assortments: &[Assortment]) -> Result<ChoiceTable<T>> {
        if assortments.is_empty() {
            return Err(Error::InvalidTable("no assortments requested".into()));
        }
        let rows = assortments
            .iter()
            .map(|s| self.choice_row(s))
            .collect::<Result<Vec<_>>>()?;
        ChoiceTable::new(self.universe_size, rows)
    }

    /// Evaluates the model on every non-empty subset of the universe.
    pub fn full_table(&self) -> Result<ChoiceTable<T>> {
        self.choice_table(&Assortment::all_nonempty(self.universe_size)?)
    }

    /// Mixture `alpha · self + (1 − alpha) · other`.
    pub fn mix(&self, other: &GspModel<T>, alpha: T) -> Result<GspModel<T>> {
        if self.universe_size != other.universe_size {
            return Err(Error::DimensionMismatch(
                "mixing models over different universes".into(),
            ));
        }
        if alpha < T::zero() || alpha > T::one() {
            return Err(Error::InvalidConfig(
                "mixture weight must lie in [0, 1]".into(),
            ));
        }
        let left = self
            .atoms
            .iter()
            .map(|a| (a.consumer.clone(), a.weight * alpha));
        let right = other
            .atoms
            .iter()
            .map(|a| (a.consumer.clone(), a.weight * (T::one() - alpha)));
        GspModel::new(self.universe_size, left.chain(right))
    }
}

/// Free-function form of [`GspModel::choice_prob`].
pub fn choice_prob<T: Scalar>(model: &GspModel<T>, x: AltId, offer: &Assortment) -> Result<T> {
    model.choice_prob(x, offer)
}

/// Free-function form of [`GspModel::choice_table`].
pub fn choice_table<T: Scalar>(
    model: &GspModel<T>,
    assortments: &[Assortment],
) -> Result<ChoiceTable<T>> {
    model.choice_table(assortments)
}

/// Converts a distribution over rankings of `{0, 1, ..., N}` into a rational
/// GSP model.
///
/// Each ranking lists every alternative plus the no-choice marker `0`
/// exactly once; alternatives ranked below `0` are never purchased. The
/// prefix before `0` becomes a position-1 type, and a ranking that starts
/// with `0` becomes the always-abstaining type over the remaining order.
pub fn ranked_list_to_gsp<T: Scalar>(
    universe_size: usize,
    rankings: &[(Vec<AltId>, T)],
) -> Result<GspModel<T>> {
    if !(1..=MAX_UNIVERSE).contains(&universe_size) {
        return Err(Error::InvalidRanking(format!(
            "universe size {universe_size} must lie in 1..={MAX_UNIVERSE}"
        )));
    }
    let mut atoms = Vec::with_capacity(rankings.len());
    for (k, (ranking, weight)) in rankings.iter().enumerate() {
        if ranking.len() != universe_size + 1 {
            return Err(Error::InvalidRanking(format!(
                "ranking {k} has {} entries, expected {} (alternatives plus 0)",
                ranking.len(),
                universe_size + 1
            )));
        }
        let mut seen = vec![false; universe_size + 1];
        for &id in ranking {
            let slot = id as usize;
            if slot > universe_size || seen[slot] {
                return Err(Error::InvalidRanking(format!(
                    "ranking {k} is not a permutation of 0..={universe_size}"
                )));
            }
            seen[slot] = true;
        }
        let cut = ranking
            .iter()
            .position(|&id| id == NO_CHOICE)
            .expect("permutation contains 0");
        let consumer = if cut == 0 {
            ConsumerType::new(ranking[1..].to_vec(), 0)?
        } else {
            ConsumerType::new(ranking[..cut].to_vec(), 1)?
        };
        atoms.push((consumer, *weight));
    }
    GspModel::new(universe_size, atoms)
}
