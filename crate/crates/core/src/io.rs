//! JSON formats for models, tables, datasets, revenues and reports.
//!
//! ```text
//! model:    { "universe_size": N, "atoms": [ { "sequence": [..], "position": k, "weight": w } ] }
//! table:    { "universe_size": N, "rows": [ { "assortment": [..], "shares": { "<id>": p, "0": p } } ] }
//! dataset:  table rows plus an optional "sample_size" per row
//! revenues: { "<id>": r, ... }
//! ```
//!
//! Readers validate every invariant and report the offending atom, row or
//! field. Writers emit the canonical form (rows in stored order, share keys
//! in ascending id order with no-choice first).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{MembershipVerdict, RamVerdict, RegularityViolation};
use crate::assortment::{AssortmentSolution, RatioReport, RevenueFunction};
use crate::choice::{AltId, Assortment, ConsumerType, NO_CHOICE};
use crate::error::{Error, Result};
use crate::estimation::{ChoiceDataset, FitResult, Observation};
use crate::model::GspModel;
use crate::scalar::Scalar;
use crate::table::{ChoiceRow, ChoiceTable, AXIOM_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub sequence: Vec<AltId>,
    pub position: usize,
    pub weight: f64,
}

/// Unknown top-level fields are ignored so fit output (which adds a
/// `diagnostics` object) can be read back as a model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelJson {
    pub universe_size: usize,
    pub atoms: Vec<AtomJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowJson {
    pub assortment: Vec<AltId>,
    pub shares: BTreeMap<AltId, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableJson {
    pub universe_size: usize,
    pub rows: Vec<RowJson>,
}

fn parse_err(context: impl Into<String>, message: impl std::fmt::Display) -> Error {
    Error::Parse {
        context: context.into(),
        message: message.to_string(),
    }
}

fn from_str<D: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| parse_err(format!("{what} JSON"), e))
}

fn to_pretty(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("JSON values always serialise")
}

impl ModelJson {
    pub fn from_model<T: Scalar>(model: &GspModel<T>) -> Self {
        Self {
            universe_size: model.universe_size(),
            atoms: model
                .atoms()
                .iter()
                .map(|a| AtomJson {
                    sequence: a.consumer.sequence().to_vec(),
                    position: a.consumer.position(),
                    weight: a.weight.as_f64(),
                })
                .collect(),
        }
    }

    pub fn to_model<T: Scalar>(&self) -> Result<GspModel<T>> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for (k, atom) in self.atoms.iter().enumerate() {
            let consumer = ConsumerType::new(atom.sequence.clone(), atom.position)
                .map_err(|e| parse_err(format!("atoms[{k}]"), e))?;
            if !atom.weight.is_finite() || atom.weight < 0.0 {
                return Err(parse_err(
                    format!("atoms[{k}] {consumer}"),
                    format!("weight {} must be finite and non-negative", atom.weight),
                ));
            }
            atoms.push((consumer, T::lit(atom.weight)));
        }
        GspModel::new(self.universe_size, atoms).map_err(|e| parse_err("model", e))
    }
}

impl RowJson {
    fn from_row<T: Scalar>(row: &ChoiceRow<T>, sample_size: Option<u64>) -> Self {
        Self {
            assortment: row.assortment().members().to_vec(),
            shares: row.entries().map(|(id, p)| (id, p.as_f64())).collect(),
            sample_size,
        }
    }

    /// Member shares and the no-choice share. A missing `"0"` entry is filled
    /// in as one minus the member total.
    fn split<T: Scalar>(&self, k: usize) -> Result<(Assortment, Vec<T>, Option<T>)> {
        let offer = Assortment::new(self.assortment.iter().copied())
            .map_err(|e| parse_err(format!("rows[{k}]"), e))?;
        if offer.len() != self.assortment.len() {
            return Err(parse_err(
                format!("rows[{k}]"),
                "assortment lists an alternative twice",
            ));
        }
        if offer.is_empty() {
            return Err(parse_err(format!("rows[{k}]"), "assortment is empty"));
        }
        let context = || format!("rows[{k}] (assortment {offer})");
        for (&id, &p) in &self.shares {
            if id != NO_CHOICE && !offer.contains(id) {
                return Err(parse_err(
                    context(),
                    format!("share given for alternative {id}, which is not offered"),
                ));
            }
            if !p.is_finite() {
                return Err(parse_err(context(), format!("share of {id} is not finite")));
            }
        }
        let mut members = Vec::with_capacity(offer.len());
        for &id in offer.members() {
            match self.shares.get(&id) {
                Some(&p) => members.push(T::lit(p)),
                None => {
                    return Err(parse_err(
                        context(),
                        format!("missing share for alternative {id}"),
                    ))
                }
            }
        }
        let no_choice = self.shares.get(&NO_CHOICE).map(|&p| T::lit(p));
        Ok((offer, members, no_choice))
    }
}

impl TableJson {
    pub fn from_table<T: Scalar>(table: &ChoiceTable<T>) -> Self {
        Self {
            universe_size: table.universe_size(),
            rows: table
                .rows()
                .iter()
                .map(|r| RowJson::from_row(r, None))
                .collect(),
        }
    }

    pub fn from_dataset<T: Scalar>(dataset: &ChoiceDataset<T>) -> Self {
        Self {
            universe_size: dataset.universe_size(),
            rows: dataset
                .observations()
                .iter()
                .map(|o| RowJson::from_row(&o.shares, o.sample_size))
                .collect(),
        }
    }

    pub fn to_table<T: Scalar>(&self) -> Result<ChoiceTable<T>> {
        let mut rows = Vec::with_capacity(self.rows.len());
        for (k, row) in self.rows.iter().enumerate() {
            let (offer, members, no_choice) = row.split::<T>(k)?;
            let context = format!("rows[{k}] (assortment {offer})");
            let built = match no_choice {
                Some(nc) => ChoiceRow::with_tolerance(offer, members, nc, AXIOM_TOL),
                None => ChoiceRow::from_member_probs(offer, members),
            };
            rows.push(built.map_err(|e| parse_err(context, e))?);
        }
        ChoiceTable::new(self.universe_size, rows).map_err(|e| parse_err("table", e))
    }

    pub fn to_dataset<T: Scalar>(&self) -> Result<ChoiceDataset<T>> {
        let mut observations = Vec::with_capacity(self.rows.len());
        for (k, row) in self.rows.iter().enumerate() {
            let (offer, members, no_choice) = row.split::<T>(k)?;
            let context = format!("rows[{k}] (assortment {offer})");
            let nc = match no_choice {
                Some(nc) => nc,
                None => {
                    let total: T = members.iter().copied().sum();
                    (T::one() - total).max(T::zero())
                }
            };
            observations.push(
                Observation::new(offer, members, nc, row.sample_size)
                    .map_err(|e| parse_err(context, e))?,
            );
        }
        ChoiceDataset::new(self.universe_size, observations).map_err(|e| parse_err("dataset", e))
    }
}

pub fn model_from_json<T: Scalar>(text: &str) -> Result<GspModel<T>> {
    from_str::<ModelJson>(text, "model")?.to_model()
}

pub fn model_to_json<T: Scalar>(model: &GspModel<T>) -> String {
    to_pretty(&ModelJson::from_model(model))
}

pub fn table_from_json<T: Scalar>(text: &str) -> Result<ChoiceTable<T>> {
    from_str::<TableJson>(text, "table")?.to_table()
}

pub fn table_to_json<T: Scalar>(table: &ChoiceTable<T>) -> String {
    to_pretty(&TableJson::from_table(table))
}

pub fn dataset_from_json<T: Scalar>(text: &str) -> Result<ChoiceDataset<T>> {
    from_str::<TableJson>(text, "dataset")?.to_dataset()
}

pub fn dataset_to_json<T: Scalar>(dataset: &ChoiceDataset<T>) -> String {
    to_pretty(&TableJson::from_dataset(dataset))
}

/// Revenues keyed by alternative id. With `universe_size = None` the universe
/// is taken to be `1..=max id`.
pub fn revenues_from_json<T: Scalar>(
    text: &str,
    universe_size: Option<usize>,
) -> Result<RevenueFunction<T>> {
    let raw: BTreeMap<AltId, f64> = from_str(text, "revenue")?;
    let n = universe_size.unwrap_or_else(|| raw.keys().max().copied().unwrap_or(0) as usize);
    let map = raw.into_iter().map(|(k, v)| (k, T::lit(v))).collect();
    RevenueFunction::from_map(n, &map).map_err(|e| parse_err("revenues", e))
}

pub fn revenues_to_json<T: Scalar>(revenues: &RevenueFunction<T>) -> String {
    let map: BTreeMap<AltId, f64> = revenues
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| (k as AltId + 1, v.as_f64()))
        .collect();
    to_pretty(&map)
}

/// The fitted model in model format plus a `diagnostics` object.
pub fn fit_result_value<T: Scalar>(result: &FitResult<T>) -> Value {
    let mut value =
        serde_json::to_value(ModelJson::from_model(&result.model)).expect("serialisable");
    value["diagnostics"] = json!({
        "residual": result.residual_norm.as_f64(),
        "irrational_mass": result.irrational_mass.as_f64(),
        "iterations": result.iterations,
        "support_size": result.model.support_size(),
        "candidate_columns": result.candidate_columns,
        "stop": format!("{:?}", result.stop),
    });
    value
}

pub fn fit_result_to_json<T: Scalar>(result: &FitResult<T>) -> String {
    to_pretty(&fit_result_value(result))
}

pub fn table_value<T: Scalar>(table: &ChoiceTable<T>) -> Value {
    serde_json::to_value(TableJson::from_table(table)).expect("serialisable")
}

pub fn regularity_value<T: Scalar>(violations: &[RegularityViolation<T>]) -> Value {
    Value::Array(
        violations
            .iter()
            .map(|v| {
                json!({
                    "alternative": v.alternative,
                    "smaller_set": v.smaller_set.members(),
                    "larger_set": v.larger_set.members(),
                    "p_small": v.p_small.as_f64(),
                    "p_large": v.p_large.as_f64(),
                })
            })
            .collect(),
    )
}

pub fn ram_value(verdict: &RamVerdict) -> Value {
    match verdict {
        RamVerdict::Representable => json!({ "verdict": "representable", "cycle": null }),
        RamVerdict::NotRepresentable { cycle } => {
            json!({ "verdict": "not_representable", "cycle": cycle })
        }
        RamVerdict::Undetermined { missing } => json!({
            "verdict": "undetermined",
            "missing_rows": missing.iter().map(|s| s.members().to_vec()).collect::<Vec<_>>(),
        }),
    }
}

pub fn membership_value<T: Scalar>(verdict: &MembershipVerdict<T>) -> Value {
    match verdict {
        MembershipVerdict::InGsp { model, max_error } => json!({
            "verdict": "InGSP",
            "max_error": max_error.as_f64(),
            "witness": ModelJson::from_model(model),
        }),
        MembershipVerdict::NotInGsp(cert) => json!({
            "verdict": "NotInGSP",
            "certificate": {
                "constraints": cert.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
                "multipliers": cert.multipliers.iter().map(|y| y.as_f64()).collect::<Vec<_>>(),
                "rhs_value": cert.rhs_value.as_f64(),
                "min_column_value": cert.min_column_value.as_f64(),
                "derivation": cert.derivation,
            },
        }),
        MembershipVerdict::Unknown(reason) => {
            json!({ "verdict": "undetermined", "reason": reason })
        }
    }
}

pub fn solution_value<T: Scalar>(solution: &AssortmentSolution<T>) -> Value {
    json!({
        "method": solution.method.name(),
        "assortment": solution.assortment.members(),
        "expected_revenue": solution.expected_revenue.as_f64(),
        "evaluations": solution.evaluations,
    })
}

pub fn ratio_report_value<T: Scalar>(report: &RatioReport<T>) -> Value {
    json!({
        "heuristic": solution_value(&report.heuristic),
        "optimal": solution_value(&report.optimal),
        "ratio": report.ratio.as_f64(),
        "bound": report.bound.as_f64(),
        "levels": report.levels,
    })
}
