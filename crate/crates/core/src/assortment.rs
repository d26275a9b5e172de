//! Revenue-maximising assortments under a GSP model.

use std::collections::BTreeMap;

use crate::choice::{AltId, Assortment, NO_CHOICE};
use crate::error::{Error, Result};
use crate::model::GspModel;
use crate::scalar::Scalar;

/// Largest universe searched exhaustively by default.
pub const DEFAULT_EXACT_CAP: usize = 20;
/// Revenues closer than this are treated as tied.
pub const TIE_TOL: f64 = 1e-12;

/// Strictly positive revenue `r(i)` for each alternative `1..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct RevenueFunction<T> {
    values: Vec<T>,
}

impl<T: Scalar> RevenueFunction<T> {
    /// `values[i - 1]` is the revenue of alternative `i`.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidRevenue("no revenues given".into()));
        }
        for (k, &v) in values.iter().enumerate() {
            if !v.is_finite() || v <= T::zero() {
                return Err(Error::InvalidRevenue(format!(
                    "revenue of alternative {} is {v}; revenues must be finite and > 0",
                    k + 1
                )));
            }
        }
        Ok(Self { values })
    }

    /// Builds from an id map that must cover exactly `1..=universe_size`.
    pub fn from_map(universe_size: usize, map: &BTreeMap<AltId, T>) -> Result<Self> {
        let mut values = Vec::with_capacity(universe_size);
        for id in 1..=universe_size as AltId {
            match map.get(&id) {
                Some(&v) => values.push(v),
                None => {
                    return Err(Error::InvalidRevenue(format!(
                        "missing revenue for alternative {id}"
                    )))
                }
            }
        }
        if let Some(extra) = map
            .keys()
            .find(|&&id| id == 0 || id as usize > universe_size)
        {
            return Err(Error::InvalidRevenue(format!(
                "revenue given for alternative {extra} outside 1..={universe_size}"
            )));
        }
        Self::new(values)
    }

    pub fn universe_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Revenue of `id`, zero for the no-choice option.
    pub fn get(&self, id: AltId) -> T {
        if id == NO_CHOICE {
            T::zero()
        } else {
            self.values[id as usize - 1]
        }
    }

    /// Distinct revenue levels in ascending order (exact comparison).
    pub fn levels(&self) -> Vec<T> {
        let mut levels = self.values.clone();
        levels.sort_by(|a, b| a.partial_cmp(b).expect("finite revenues"));
        levels.dedup();
        levels
    }

    /// `{ i : r(i) ≥ threshold }`.
    pub fn at_least(&self, threshold: T) -> Assortment {
        let ids = (1..=self.values.len() as AltId).filter(|&i| self.get(i) >= threshold);
        Assortment::new(ids).expect("ids lie in 1..=N")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    RevenueOrdered,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::RevenueOrdered => "revenue-ordered",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssortmentSolution<T> {
    pub assortment: Assortment,
    pub expected_revenue: T,
    pub method: Method,
    /// Number of candidate assortments evaluated.
    pub evaluations: usize,
}

fn check_universe<T: Scalar>(model: &GspModel<T>, revenues: &RevenueFunction<T>) -> Result<()> {
    if model.universe_size() != revenues.universe_size() {
        return Err(Error::DimensionMismatch(format!(
            "model has {} alternatives but revenues cover {}",
            model.universe_size(),
            revenues.universe_size()
        )));
    }
    Ok(())
}

/// `Σ_{i∈S} P(i, S)·r(i)`.
pub fn expected_revenue<T: Scalar>(
    model: &GspModel<T>,
    offer: &Assortment,
    revenues: &RevenueFunction<T>,
) -> Result<T> {
    check_universe(model, revenues)?;
    if offer.is_empty() {
        return Err(Error::InvalidAssortment("empty assortment".into()));
    }
    if offer.max_id() as usize > revenues.universe_size() {
        return Err(Error::InvalidAssortment(format!(
            "{offer} is not a subset of 1..={}",
            revenues.universe_size()
        )));
    }
    Ok(revenue_unchecked(model, offer, revenues))
}

fn revenue_unchecked<T: Scalar>(
    model: &GspModel<T>,
    offer: &Assortment,
    revenues: &RevenueFunction<T>,
) -> T {
    model
        .atoms()
        .iter()
        .map(|a| a.weight * revenues.get(a.consumer.choose(offer)))
        .sum()
}

/// Exhaustive search with the default cap.
pub fn optimal_assortment<T: Scalar>(
    model: &GspModel<T>,
    revenues: &RevenueFunction<T>,
) -> Result<AssortmentSolution<T>> {
    optimal_assortment_capped(model, revenues, DEFAULT_EXACT_CAP)
}

/// Evaluates all `2^N − 1` non-empty assortments. Ties go to the smaller set,
/// then to the lexicographically smaller member list.
pub fn optimal_assortment_capped<T: Scalar>(
    model: &GspModel<T>,
    revenues: &RevenueFunction<T>,
    cap: usize,
) -> Result<AssortmentSolution<T>> {
    check_universe(model, revenues)?;
    let n = model.universe_size();
    if n > cap.min(63) {
        return Err(Error::CapExceeded {
            what: "exact assortment search universe".into(),
            size: n,
            cap,
        });
    }
    let tie = T::lit(TIE_TOL);
    let mut best: Option<(Assortment, T)> = None;
    let mut evaluations = 0usize;
    for mask in 1u64..(1u64 << n) {
        let offer = Assortment::from_mask(mask);
        let value = revenue_unchecked(model, &offer, revenues);
        evaluations += 1;
        let replace = match &best {
            None => true,
            Some((incumbent, v)) => {
                value > *v + tie
                    || ((value - *v).abs() <= tie
                        && (offer.len(), offer.members()) < (incumbent.len(), incumbent.members()))
            }
        };
        if replace {
            best = Some((offer, value));
        }
    }
    let (assortment, expected_revenue) = best.expect("universe is non-empty");
    Ok(AssortmentSolution {
        assortment,
        expected_revenue,
        method: Method::Exact,
        evaluations,
    })
}

/// Best of the nested sets `S_i = { j : r(j) ≥ r_i }`, one per distinct
/// revenue level; ties go to the larger set.
pub fn revenue_ordered<T: Scalar>(
    model: &GspModel<T>,
    revenues: &RevenueFunction<T>,
) -> Result<AssortmentSolution<T>> {
    check_universe(model, revenues)?;
    let tie = T::lit(TIE_TOL);
    let mut best: Option<(Assortment, T)> = None;
    let mut evaluations = 0usize;
    for level in revenues.levels() {
        let offer = revenues.at_least(level);
        let value = revenue_unchecked(model, &offer, revenues);
        evaluations += 1;
        if best.as_ref().is_none_or(|(_, v)| value > *v + tie) {
            best = Some((offer, value));
        }
    }
    let (assortment, expected_revenue) = best.expect("at least one revenue level");
    Ok(AssortmentSolution {
        assortment,
        expected_revenue,
        method: Method::RevenueOrdered,
        evaluations,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport<T> {
    pub heuristic: AssortmentSolution<T>,
    pub optimal: AssortmentSolution<T>,
    /// `heuristic / optimal`, or 1 when the optimum is zero.
    pub ratio: T,
    /// `r_1 / r_k` over the distinct revenue levels.
    pub bound: T,
    pub levels: usize,
}

pub fn ratio_report<T: Scalar>(
    model: &GspModel<T>,
    revenues: &RevenueFunction<T>,
) -> Result<RatioReport<T>> {
    ratio_report_capped(model, revenues, DEFAULT_EXACT_CAP)
}

pub fn ratio_report_capped<T: Scalar>(
    model: &GspModel<T>,
    revenues: &RevenueFunction<T>,
    cap: usize,
) -> Result<RatioReport<T>> {
    let optimal = optimal_assortment_capped(model, revenues, cap)?;
    let heuristic = revenue_ordered(model, revenues)?;
    let levels = revenues.levels();
    let bound = levels[0] / levels[levels.len() - 1];
    let ratio = if optimal.expected_revenue > T::zero() {
        heuristic.expected_revenue / optimal.expected_revenue
    } else {
        T::one()
    };
    Ok(RatioReport {
        heuristic,
        optimal,
        ratio,
        bound,
        levels: levels.len(),
    })
}
