//! Generalized stochastic preference (GSP) choice models.
//!
//! A GSP model is a probability distribution over consumer types
//! `(sequence, position)`: offered an assortment, a type keeps the part of its
//! sequence that is on offer and picks the entry at `position`. Types with
//! position 0 or 1 are rational; the rest can produce regularity violations
//! such as decoy effects.
//!
//! The crate is generic over the [`Scalar`] type; the aliases at the crate
//! root fix it to `f64`, which is what the solvers are tuned for.

pub mod analysis;
pub mod assortment;
pub mod choice;
pub mod error;
pub mod estimation;
pub mod io;
pub mod model;
pub mod scalar;
pub mod solver;
pub mod table;

pub use choice::{
    choose, enumerate_types, is_rational, restrict, type_count, AltId, Assortment, ConsumerType,
    NO_CHOICE,
};
pub use error::{Error, Result};
pub use model::{choice_prob, choice_table, ranked_list_to_gsp, Atom, GspModel};
pub use scalar::Scalar;
pub use table::{ChoiceRow, ChoiceTable};

pub type Model = GspModel<f64>;
pub type Table = ChoiceTable<f64>;
pub type Row = ChoiceRow<f64>;
pub type Dataset = estimation::ChoiceDataset<f64>;
pub type Observation = estimation::Observation<f64>;
pub type FitResult = estimation::FitResult<f64>;
pub type Revenues = assortment::RevenueFunction<f64>;
pub type Verdict = analysis::MembershipVerdict<f64>;
