//! Worked examples for GSP models, shipped as JSON fixtures.
//!
//! Six examples are available through [`load_example`]: four decoy
//! experiments with a fitted reference model (`cameras`, `economist`,
//! `microwaves`, `herne`), a regular system that is not a random utility
//! model (`mcfadden`) and a deterministic system that no GSP model reproduces
//! (`counterexample`). Two further fixtures cover the GSP model whose
//! precedence relation has a cycle and the single-type instance on which
//! revenue-ordered assortments are worst.

use std::fs;
use std::path::{Path, PathBuf};

use gsp_core::io::{ModelJson, TableJson};
use gsp_core::{Dataset, Model, Revenues, Table};
use serde::{Deserialize, Serialize};

pub mod certificate;
pub mod verify;

pub use certificate::{counterexample_system, CounterexampleSystem, PUBLISHED_CERTIFICATE};
pub use verify::{verify_all, verify_example, Check, ExampleReport};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("unknown example '{0}' (available: cameras, economist, microwaves, mcfadden, herne, counterexample)")]
    UnknownExample(String),
    #[error("example '{name}': {source}")]
    Invalid {
        name: String,
        #[source]
        source: gsp_core::Error,
    },
    #[error("malformed example file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = DatasetError> = std::result::Result<T, E>;

pub const EXAMPLE_NAMES: [&str; 6] = [
    "cameras",
    "economist",
    "microwaves",
    "mcfadden",
    "herne",
    "counterexample",
];

const FIXTURES: [(&str, &str); 6] = [
    ("cameras", include_str!("../data/cameras.json")),
    ("economist", include_str!("../data/economist.json")),
    ("microwaves", include_str!("../data/microwaves.json")),
    ("mcfadden", include_str!("../data/mcfadden.json")),
    ("herne", include_str!("../data/herne.json")),
    (
        "counterexample",
        include_str!("../data/counterexample.json"),
    ),
];

pub const ATTENTION_CYCLE_JSON: &str = include_str!("../data/attention_cycle.json");
pub const WORST_CASE_MODEL_JSON: &str = include_str!("../data/worst_case_model.json");
pub const WORST_CASE_REVENUES_JSON: &str = include_str!("../data/worst_case_revenues.json");
pub const COUNTEREXAMPLE_TABLE_JSON: &str = include_str!("../data/counterexample_table.json");

/// On-disk layout of an example file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleFile {
    pub name: String,
    pub title: String,
    pub notes: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alternatives: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_irrational_mass: Option<f64>,
    pub dataset: TableJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_model: Option<ModelJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_table: Option<TableJson>,
}

/// A validated example.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceExample {
    pub name: String,
    pub title: String,
    pub notes: String,
    /// Display names for alternatives `1..=N`; empty when ids are the names.
    pub alternatives: Vec<String>,
    pub dataset: Dataset,
    pub reference_model: Option<Model>,
    pub reference_table: Option<Table>,
    /// Irrational weight of the reference model as documented for the example.
    pub expected_irrational_mass: Option<f64>,
}

impl ReferenceExample {
    pub fn from_file(file: &ExampleFile) -> Result<Self> {
        let invalid = |source| DatasetError::Invalid {
            name: file.name.clone(),
            source,
        };
        Ok(Self {
            name: file.name.clone(),
            title: file.title.clone(),
            notes: file.notes.clone(),
            alternatives: file.alternatives.clone(),
            dataset: file.dataset.to_dataset().map_err(invalid)?,
            reference_model: file
                .reference_model
                .as_ref()
                .map(|m| m.to_model())
                .transpose()
                .map_err(invalid)?,
            reference_table: file
                .reference_table
                .as_ref()
                .map(|t| t.to_table())
                .transpose()
                .map_err(invalid)?,
            expected_irrational_mass: file.expected_irrational_mass,
        })
    }

    pub fn to_file(&self) -> ExampleFile {
        ExampleFile {
            name: self.name.clone(),
            title: self.title.clone(),
            notes: self.notes.clone(),
            alternatives: self.alternatives.clone(),
            expected_irrational_mass: self.expected_irrational_mass,
            dataset: TableJson::from_dataset(&self.dataset),
            reference_model: self.reference_model.as_ref().map(ModelJson::from_model),
            reference_table: self.reference_table.as_ref().map(TableJson::from_table),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("example files always serialise")
    }

    /// Name of alternative `id`, falling back to the id itself.
    pub fn label(&self, id: u32) -> String {
        self.alternatives
            .get(id as usize - 1)
            .cloned()
            .unwrap_or_else(|| id.to_string())
    }
}

pub fn load_example(name: &str) -> Result<ReferenceExample> {
    let (_, text) = FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| DatasetError::UnknownExample(name.to_string()))?;
    ReferenceExample::parse(text)
}

pub fn all_examples() -> Result<Vec<ReferenceExample>> {
    EXAMPLE_NAMES.iter().map(|n| load_example(n)).collect()
}

fn core_err(name: &str) -> impl Fn(gsp_core::Error) -> DatasetError + '_ {
    move |source| DatasetError::Invalid {
        name: name.to_string(),
        source,
    }
}

/// The four-alternative GSP model whose precedence relation contains the
/// cycle `1 ≺ 2 ≺ 3 ≺ 1`.
pub fn attention_cycle_model() -> Result<Model> {
    gsp_core::io::model_from_json(ATTENTION_CYCLE_JSON).map_err(core_err("attention_cycle"))
}

/// Single type `((1,2,3),2)` with revenues `(1,1,2)`: the revenue-ordered
/// heuristic earns half of the optimum.
pub fn worst_case_instance() -> Result<(Model, Revenues)> {
    let model =
        gsp_core::io::model_from_json(WORST_CASE_MODEL_JSON).map_err(core_err("worst_case"))?;
    let revenues = gsp_core::io::revenues_from_json(WORST_CASE_REVENUES_JSON, Some(3))
        .map_err(core_err("worst_case"))?;
    Ok((model, revenues))
}

pub fn counterexample_table() -> Result<Table> {
    gsp_core::io::table_from_json(COUNTEREXAMPLE_TABLE_JSON).map_err(core_err("counterexample"))
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    fs::write(&path, text).map_err(|source| DatasetError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes every example to `dir` as `<name>.json`, plus the plain
/// `<name>.dataset.json`, `<name>.model.json` and `<name>.table.json` files
/// the command-line tool consumes, and the two auxiliary fixtures.
pub fn export_all(dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| DatasetError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for example in all_examples()? {
        let name = &example.name;
        written.push(write(dir.join(format!("{name}.json")), &example.to_json())?);
        written.push(write(
            dir.join(format!("{name}.dataset.json")),
            &gsp_core::io::dataset_to_json(&example.dataset),
        )?);
        if let Some(model) = &example.reference_model {
            written.push(write(
                dir.join(format!("{name}.model.json")),
                &gsp_core::io::model_to_json(model),
            )?);
        }
        if let Some(table) = &example.reference_table {
            written.push(write(
                dir.join(format!("{name}.table.json")),
                &gsp_core::io::table_to_json(table),
            )?);
        }
    }
    written.push(write(
        dir.join("attention_cycle.model.json"),
        ATTENTION_CYCLE_JSON,
    )?);
    written.push(write(
        dir.join("worst_case.model.json"),
        WORST_CASE_MODEL_JSON,
    )?);
    written.push(write(
        dir.join("worst_case.revenues.json"),
        WORST_CASE_REVENUES_JSON,
    )?);
    Ok(written)
}

/// Reads back the `<name>.json` files written by [`export_all`].
pub fn import_dir(dir: &Path) -> Result<Vec<ReferenceExample>> {
    EXAMPLE_NAMES
        .iter()
        .map(|name| {
            let path = dir.join(format!("{name}.json"));
            let text =
                fs::read_to_string(&path).map_err(|source| DatasetError::Io { path, source })?;
            ReferenceExample::parse(&text)
        })
        .collect()
}
