//! Systems of choice probabilities indexed by assortment.

use std::collections::HashMap;

use crate::choice::{AltId, Assortment, MAX_UNIVERSE, NO_CHOICE};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

/// Tolerance for the probability axioms on a table row.
pub const AXIOM_TOL: f64 = 1e-9;

/// Choice probabilities for one assortment.
///
/// `probs[k]` is the probability of `assortment.members()[k]`; non-members
/// have probability zero and are not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceRow<T> {
    assortment: Assortment,
    probs: Vec<T>,
    no_choice: T,
}

impl<T: Scalar> ChoiceRow<T> {
    pub fn new(assortment: Assortment, probs: Vec<T>, no_choice: T) -> Result<Self> {
        Self::with_tolerance(assortment, probs, no_choice, AXIOM_TOL)
    }

    /// Builds a row whose no-choice share is `1 − Σ probs`.
    pub fn from_member_probs(assortment: Assortment, probs: Vec<T>) -> Result<Self> {
        let total = compensated_sum(probs.iter().copied());
        let rest = (T::one() - total).max(T::zero());
        Self::new(assortment, probs, rest)
    }

    /// Like [`ChoiceRow::new`] with a caller-chosen tolerance on the row total.
    pub fn with_tolerance(
        assortment: Assortment,
        probs: Vec<T>,
        no_choice: T,
        tol: f64,
    ) -> Result<Self> {
        if assortment.is_empty() {
            return Err(Error::InvalidTable("empty assortment row".into()));
        }
        if probs.len() != assortment.len() {
            return Err(Error::InvalidTable(format!(
                "row {assortment}: {} probabilities for {} members",
                probs.len(),
                assortment.len()
            )));
        }
        let slack = T::lit(AXIOM_TOL);
        let labelled = assortment
            .members()
            .iter()
            .copied()
            .zip(probs.iter().copied())
            .chain(std::iter::once((NO_CHOICE, no_choice)));
        for (id, p) in labelled {
            if !p.is_finite() {
                return Err(Error::NonFinite(format!(
                    "row {assortment}, alternative {id}"
                )));
            }
            if p < -slack || p > T::one() + slack {
                return Err(Error::InvalidTable(format!(
                    "row {assortment}: P({id}) = {p} outside [0, 1]"
                )));
            }
        }
        let chosen = compensated_sum(probs.iter().copied());
        if chosen > T::one() + T::lit(tol) {
            return Err(Error::InvalidTable(format!(
                "row {assortment}: member probabilities sum to {chosen} > 1"
            )));
        }
        let total = chosen + no_choice;
        if (total - T::one()).abs() > T::lit(tol) {
            return Err(Error::InvalidTable(format!(
                "row {assortment}: probabilities including no-choice sum to {total}, expected 1"
            )));
        }
        let clamp = |p: T| p.max(T::zero()).min(T::one());
        Ok(Self {
            assortment,
            probs: probs.into_iter().map(clamp).collect(),
            no_choice: clamp(no_choice),
        })
    }

    pub fn assortment(&self) -> &Assortment {
        &self.assortment
    }

    /// Probabilities aligned with `assortment().members()`.
    pub fn member_probs(&self) -> &[T] {
        &self.probs
    }

    pub fn no_choice(&self) -> T {
        self.no_choice
    }

    /// `P(x, S)`; zero for alternatives outside the assortment.
    pub fn prob(&self, x: AltId) -> T {
        if x == NO_CHOICE {
            return self.no_choice;
        }
        match self.assortment.members().binary_search(&x) {
            Ok(k) => self.probs[k],
            Err(_) => T::zero(),
        }
    }

    /// `Σ_{x ∈ S} P(x, S)`.
    pub fn purchase_mass(&self) -> T {
        compensated_sum(self.probs.iter().copied())
    }

    /// `(id, probability)` pairs for the members followed by the no-choice entry.
    pub fn entries(&self) -> impl Iterator<Item = (AltId, T)> + '_ {
        self.assortment
            .members()
            .iter()
            .copied()
            .zip(self.probs.iter().copied())
            .chain(std::iter::once((NO_CHOICE, self.no_choice)))
    }
}

/// A complete or partial system of choice probabilities.
///
/// Rows keep their insertion order; lookups by assortment go through an index.
#[derive(Clone, Debug)]
pub struct ChoiceTable<T> {
    universe_size: usize,
    rows: Vec<ChoiceRow<T>>,
    index: HashMap<Assortment, usize>,
}

impl<T: Scalar> PartialEq for ChoiceTable<T> {
    fn eq(&self, other: &Self) -> bool {
        self.universe_size == other.universe_size && self.rows == other.rows
    }
}

impl<T: Scalar> ChoiceTable<T> {
    pub fn new(universe_size: usize, rows: Vec<ChoiceRow<T>>) -> Result<Self> {
        if !(1..=MAX_UNIVERSE).contains(&universe_size) {
            return Err(Error::InvalidTable(format!(
                "universe size {universe_size} must lie in 1..={MAX_UNIVERSE}"
            )));
        }
        let mut index = HashMap::with_capacity(rows.len());
        for (k, row) in rows.iter().enumerate() {
            if row.assortment.max_id() as usize > universe_size {
                return Err(Error::InvalidTable(format!(
                    "row {} is not a subset of 1..={universe_size}",
                    row.assortment
                )));
            }
            if index.insert(row.assortment.clone(), k).is_some() {
                return Err(Error::InvalidTable(format!(
                    "assortment {} appears twice",
                    row.assortment
                )));
            }
        }
        Ok(Self {
            universe_size,
            rows,
            index,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn rows(&self) -> &[ChoiceRow<T>] {
        &self.rows
    }

    pub fn row(&self, offer: &Assortment) -> Option<&ChoiceRow<T>> {
        self.index.get(offer).map(|&k| &self.rows[k])
    }

    /// `P(x, S)` if the row for `S` is present.
    pub fn prob(&self, x: AltId, offer: &Assortment) -> Option<T> {
        self.row(offer).map(|r| r.prob(x))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Non-empty subsets of the universe that have no row, or `None` when the
    /// universe is too large to enumerate.
    pub fn missing_assortments(&self) -> Option<Vec<Assortment>> {
        let all = Assortment::all_nonempty(self.universe_size).ok()?;
        Some(
            all.into_iter()
                .filter(|s| !self.index.contains_key(s))
                .collect(),
        )
    }

    /// True when every non-empty subset of the universe has a row.
    pub fn is_complete(&self) -> bool {
        self.universe_size <= 20 && self.rows.len() == (1usize << self.universe_size) - 1
    }

    /// Largest absolute entry-wise difference over shared rows, including the
    /// no-choice column. `None` if the row sets differ.
    pub fn max_abs_diff(&self, other: &ChoiceTable<T>) -> Option<T> {
        if self.rows.len() != other.rows.len() {
            return None;
        }
        let mut worst = T::zero();
        for row in &self.rows {
            let theirs = other.row(&row.assortment)?;
            for (id, p) in row.entries() {
                worst = worst.max((p - theirs.prob(id)).abs());
            }
        }
        Some(worst)
    }
}
