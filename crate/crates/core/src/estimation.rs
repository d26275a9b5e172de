//! Sparse estimation of GSP models from aggregate choice shares.
//!
//! The fit minimises `‖y − Aλ‖₂` over the probability simplex, where `y`
//! stacks the observed shares `f(i, S)` and column `j` of the 0-1 design
//! matrix `A` records which alternative type `j` picks from each observed
//! assortment. Sparsity is controlled by an atom budget and irrational types
//! are discouraged by biasing their selection score.

use std::collections::HashMap;

use crate::choice::{enumerate_types, type_count, AltId, Assortment, ConsumerType};
use crate::error::{Error, Result};
use crate::model::GspModel;
use crate::scalar::{compensated_sum, Scalar};
use crate::solver::{nnls_simplex_with, DenseMatrix, NnlsOptions, StopReason};
use crate::table::{ChoiceRow, ChoiceTable};

/// Tolerance on the per-observation share total.
pub const SHARE_SUM_TOL: f64 = 1e-6;
/// Largest universe for which the full type space is enumerated by default.
pub const DEFAULT_UNIVERSE_CAP: usize = 6;
/// Hard limit on the number of candidate types for capped universes.
pub const MAX_CANDIDATE_TYPES: u128 = 2_000_000;

/// Observed shares for one assortment.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation<T> {
    pub shares: ChoiceRow<T>,
    pub sample_size: Option<u64>,
}

impl<T: Scalar> Observation<T> {
    /// Validates shares against `SHARE_SUM_TOL` (looser than table rows, since
    /// empirical fractions are usually rounded).
    pub fn new(
        assortment: Assortment,
        member_shares: Vec<T>,
        no_choice: T,
        sample_size: Option<u64>,
    ) -> Result<Self> {
        let shares = ChoiceRow::with_tolerance(assortment, member_shares, no_choice, SHARE_SUM_TOL)
            .map_err(|e| Error::InvalidDataset(e.to_string()))?;
        Ok(Self {
            shares,
            sample_size,
        })
    }

    pub fn assortment(&self) -> &Assortment {
        self.shares.assortment()
    }
}

/// Observed assortments with their empirical choice shares.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceDataset<T> {
    universe_size: usize,
    observations: Vec<Observation<T>>,
}

impl<T: Scalar> ChoiceDataset<T> {
    pub fn new(universe_size: usize, observations: Vec<Observation<T>>) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::InvalidDataset("no observations".into()));
        }
        // reuse the table's duplicate and range checks
        ChoiceTable::new(
            universe_size,
            observations.iter().map(|o| o.shares.clone()).collect(),
        )
        .map_err(|e| Error::InvalidDataset(e.to_string()))?;
        Ok(Self {
            universe_size,
            observations,
        })
    }

    pub fn from_table(table: &ChoiceTable<T>) -> Result<Self> {
        let observations = table
            .rows()
            .iter()
            .map(|row| Observation {
                shares: row.clone(),
                sample_size: None,
            })
            .collect();
        Self::new(table.universe_size(), observations)
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn observations(&self) -> &[Observation<T>] {
        &self.observations
    }

    pub fn assortments(&self) -> Vec<Assortment> {
        self.observations
            .iter()
            .map(|o| o.assortment().clone())
            .collect()
    }

    pub fn to_table(&self) -> Result<ChoiceTable<T>> {
        ChoiceTable::new(
            self.universe_size,
            self.observations.iter().map(|o| o.shares.clone()).collect(),
        )
    }

    /// `(alternative, assortment)` labels for the purchase rows, in
    /// observation order and ascending alternative id within an observation.
    pub fn row_labels(&self) -> Vec<(AltId, Assortment)> {
        self.observations
            .iter()
            .flat_map(|o| {
                o.assortment()
                    .members()
                    .iter()
                    .map(move |&i| (i, o.assortment().clone()))
            })
            .collect()
    }

    /// Stacked purchase shares `y`, aligned with [`ChoiceDataset::row_labels`].
    pub fn target(&self) -> Vec<T> {
        self.observations
            .iter()
            .flat_map(|o| o.shares.member_probs().iter().copied())
            .collect()
    }
}

/// One design-matrix column: a behaviour class of consumer types.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignColumn {
    /// Type reported for this column in fitted models.
    pub representative: ConsumerType,
    /// How many supplied types share this column's behaviour.
    pub multiplicity: usize,
    /// True when at least one type in the class is rational.
    pub rational: bool,
}

/// 0-1 matrix with `A[(i, S), j] = 1` iff type `j` picks `i` from `S`.
#[derive(Clone, Debug)]
pub struct DesignMatrix<T> {
    pub matrix: DenseMatrix<T>,
    pub rows: Vec<(AltId, Assortment)>,
    pub columns: Vec<DesignColumn>,
}

/// Builds the design matrix with one column per supplied type.
///
/// Rows follow the dataset's observation order with ascending alternative id
/// inside each observation. No-choice rows are left out because they are
/// determined by the purchase rows and the simplex constraint.
pub fn build_design_matrix<T: Scalar>(
    types: &[ConsumerType],
    dataset: &ChoiceDataset<T>,
) -> Result<DesignMatrix<T>> {
    if types.is_empty() {
        return Err(Error::InvalidConfig("no candidate types".into()));
    }
    let n = dataset.universe_size();
    if let Some(bad) = types.iter().find(|t| t.max_id() as usize > n) {
        return Err(Error::InvalidType(format!(
            "{bad} references an alternative outside 1..={n}"
        )));
    }
    let rows = dataset.row_labels();
    let mut matrix = DenseMatrix::zeros(rows.len(), types.len());
    for (j, ty) in types.iter().enumerate() {
        let mut offset = 0;
        for obs in dataset.observations() {
            let members = obs.assortment().members();
            let pick = ty.choose(obs.assortment());
            if let Ok(k) = members.binary_search(&pick) {
                matrix.set(offset + k, j, T::one());
            }
            offset += members.len();
        }
    }
    let columns = types
        .iter()
        .map(|t| DesignColumn {
            representative: t.clone(),
            multiplicity: 1,
            rational: t.is_rational(),
        })
        .collect();
    Ok(DesignMatrix {
        matrix,
        rows,
        columns,
    })
}

impl<T: Scalar> DesignMatrix<T> {
    /// Merges columns with identical entries, keeping first-occurrence order.
    ///
    /// The representative of a merged class is its first rational type if it
    /// has one, otherwise its first type, so that a behaviour reachable by a
    /// rational type is never reported (or penalised) as irrational.
    pub fn dedup(&self) -> DesignMatrix<T> {
        let m = self.matrix.nrows();
        let mut classes: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut keep: Vec<usize> = Vec::new();
        let mut columns: Vec<DesignColumn> = Vec::new();
        for (j, col) in self.columns.iter().enumerate() {
            let key: Vec<u64> = self
                .matrix
                .col(j)
                .iter()
                .map(|v| v.as_f64().to_bits())
                .collect();
            match classes.get(&key) {
                Some(&c) => {
                    let merged = &mut columns[c];
                    merged.multiplicity += col.multiplicity;
                    if col.rational && !merged.rational {
                        merged.representative = col.representative.clone();
                        merged.rational = true;
                    }
                }
                None => {
                    classes.insert(key, columns.len());
                    keep.push(j);
                    columns.push(col.clone());
                }
            }
        }
        debug_assert_eq!(self.matrix.select_columns(&keep).nrows(), m);
        DesignMatrix {
            matrix: self.matrix.select_columns(&keep),
            rows: self.rows.clone(),
            columns,
        }
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Candidate type space for a fit.
#[derive(Clone, Debug, PartialEq)]
pub enum TypeUniverse {
    /// Every consumer type over the dataset's universe.
    Full,
    /// Types whose sequences have at most this many entries.
    Capped(usize),
    Custom(Vec<ConsumerType>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LossNorm {
    L2,
}

#[derive(Clone, Debug)]
pub struct FitConfig<T> {
    /// Largest number of atoms in the fitted model.
    pub max_atoms: usize,
    /// Score handicap for irrational columns; `∞` excludes them entirely.
    pub irrational_penalty: T,
    /// Per-atom charge used by [`loss`]; the fit itself enforces sparsity
    /// through `max_atoms`.
    pub complexity_penalty: T,
    /// Residual at which the fit stops early.
    pub tol: T,
    pub norm: LossNorm,
    pub type_universe: TypeUniverse,
    /// Largest universe accepted with [`TypeUniverse::Full`].
    pub universe_cap: usize,
    pub max_iterations: usize,
    /// Atoms lighter than this are pruned before the final re-fit.
    pub prune_below: T,
}

impl<T: Scalar> FitConfig<T> {
    pub fn new(max_atoms: usize) -> Self {
        Self {
            max_atoms,
            irrational_penalty: T::zero(),
            complexity_penalty: T::zero(),
            tol: T::lit(1e-9),
            norm: LossNorm::L2,
            type_universe: TypeUniverse::Full,
            universe_cap: DEFAULT_UNIVERSE_CAP,
            max_iterations: 10_000,
            prune_below: T::lit(1e-6),
        }
    }

    pub fn with_irrational_penalty(mut self, penalty: T) -> Self {
        self.irrational_penalty = penalty;
        self
    }

    pub fn with_universe(mut self, universe: TypeUniverse) -> Self {
        self.type_universe = universe;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_atoms < 1 {
            return Err(Error::InvalidConfig("max_atoms must be at least 1".into()));
        }
        if self.irrational_penalty.is_nan() || self.irrational_penalty < T::zero() {
            return Err(Error::InvalidConfig(
                "irrational_penalty must be non-negative".into(),
            ));
        }
        if [self.complexity_penalty, self.tol]
            .iter()
            .any(|v| v.is_nan() || *v < T::zero())
        {
            return Err(Error::InvalidConfig(
                "complexity_penalty and tol must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct FitResult<T> {
    pub model: GspModel<T>,
    /// `‖y − x(model)‖₂`, recomputed from the returned model.
    pub residual_norm: T,
    /// `x(model) − y` for every purchase row.
    pub row_residuals: Vec<((AltId, Assortment), T)>,
    pub irrational_mass: T,
    pub iterations: usize,
    pub stop: StopReason,
    /// Behaviour classes offered to the solver.
    pub candidate_columns: usize,
}

fn candidate_types<T: Scalar>(n: usize, config: &FitConfig<T>) -> Result<Vec<ConsumerType>> {
    match &config.type_universe {
        TypeUniverse::Full => {
            if n > config.universe_cap {
                return Err(Error::CapExceeded {
                    what: "universe size for the full type space".into(),
                    size: n,
                    cap: config.universe_cap,
                });
            }
            enumerate_types(n, None)
        }
        TypeUniverse::Capped(len) => {
            let count = type_count(n, Some(*len));
            if count > MAX_CANDIDATE_TYPES {
                return Err(Error::CapExceeded {
                    what: "candidate type count".into(),
                    size: usize::try_from(count).unwrap_or(usize::MAX),
                    cap: MAX_CANDIDATE_TYPES as usize,
                });
            }
            enumerate_types(n, Some(*len))
        }
        TypeUniverse::Custom(types) => Ok(types.clone()),
    }
}

/// Fits a sparse GSP model to `dataset`.
pub fn fit<T: Scalar>(dataset: &ChoiceDataset<T>, config: &FitConfig<T>) -> Result<FitResult<T>> {
    config.validate()?;
    let n = dataset.universe_size();
    let types = candidate_types(n, config)?;
    let design = build_design_matrix(&types, dataset)?.dedup();
    let y = dataset.target();

    let mut opts = NnlsOptions::new(config.max_atoms, config.tol);
    opts.max_iterations = config.max_iterations;
    if config.irrational_penalty.is_infinite() {
        let allowed: Vec<bool> = design.columns.iter().map(|c| c.rational).collect();
        if !allowed.iter().any(|&b| b) {
            return Err(Error::InvalidConfig(
                "infinite irrational penalty leaves no rational candidate types".into(),
            ));
        }
        opts.allowed = Some(allowed);
    } else if config.irrational_penalty > T::zero() {
        opts.column_bias = Some(
            design
                .columns
                .iter()
                .map(|c| {
                    if c.rational {
                        T::zero()
                    } else {
                        config.irrational_penalty
                    }
                })
                .collect(),
        );
    }
    let mut solution = nnls_simplex_with(&design.matrix, &y, &opts)?;
    let mut iterations = solution.iterations;

    let light = solution
        .weights
        .iter()
        .any(|&(_, w)| w < config.prune_below);
    if light {
        let mut allowed = vec![false; design.ncols()];
        for &(j, w) in &solution.weights {
            if w >= config.prune_below {
                allowed[j] = true;
            }
        }
        // re-projection onto the simplex over the surviving atoms
        opts.allowed = Some(allowed);
        opts.column_bias = None;
        solution = nnls_simplex_with(&design.matrix, &y, &opts)?;
        iterations += solution.iterations;
    }

    let atoms = solution
        .weights
        .iter()
        .map(|&(j, w)| (design.columns[j].representative.clone(), w));
    let model = GspModel::new(n, atoms)?;
    let row_residuals = row_residuals(&model, dataset)?;
    let residual_norm = compensated_sum(row_residuals.iter().map(|(_, r)| *r * *r)).sqrt();
    Ok(FitResult {
        irrational_mass: model.irrational_mass(),
        model,
        residual_norm,
        row_residuals,
        iterations,
        stop: solution.stop,
        candidate_columns: design.ncols(),
    })
}

/// `x(model) − y` on every purchase row of the dataset.
pub fn row_residuals<T: Scalar>(
    model: &GspModel<T>,
    dataset: &ChoiceDataset<T>,
) -> Result<Vec<((AltId, Assortment), T)>> {
    if model.universe_size() != dataset.universe_size() {
        return Err(Error::DimensionMismatch(format!(
            "model universe {} differs from dataset universe {}",
            model.universe_size(),
            dataset.universe_size()
        )));
    }
    let mut out = Vec::new();
    for obs in dataset.observations() {
        let predicted = model.choice_row(obs.assortment())?;
        for (&i, (&p, &f)) in obs.assortment().members().iter().zip(
            predicted
                .member_probs()
                .iter()
                .zip(obs.shares.member_probs()),
        ) {
            out.push(((i, obs.assortment().clone()), p - f));
        }
    }
    Ok(out)
}

/// Penalised objective `‖y − x(model)‖₂ + c·|support| + c₂·|irrational support|`
/// with `c = complexity_penalty` and `c₂ = irrational_penalty`.
pub fn loss<T: Scalar>(
    model: &GspModel<T>,
    dataset: &ChoiceDataset<T>,
    config: &FitConfig<T>,
) -> Result<T> {
    let residuals = row_residuals(model, dataset)?;
    let mut value = compensated_sum(residuals.iter().map(|(_, r)| *r * *r)).sqrt();
    if model.support_size() > 0 && config.complexity_penalty > T::zero() {
        value = value + config.complexity_penalty * T::lit(model.support_size() as f64);
    }
    let irrational = model.irrational_support();
    if irrational > 0 && config.irrational_penalty > T::zero() {
        value = value + config.irrational_penalty * T::lit(irrational as f64);
    }
    Ok(value)
}
