//! Singular wave fields and their topological indices.
//!
//! Generators for screw dislocations in complex scalar waves and the pure screw
//! disclination in the electromagnetic four-potential, detectors for the
//! resulting defects, a small discrete exterior calculus for period integrals,
//! and residual checks for the gauge condition and the wave equation.

// negated comparisons are deliberate: they reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod defects;
pub mod diff;
pub mod error;
pub mod field;
pub mod forms;
pub mod gauge;
pub mod grid;
pub mod io;
pub mod ledger;
pub mod models;

pub use error::{Error, Result};
pub use field::{sample_potential, sample_scalar, Component, ComplexScalarField, FieldKind, PotentialField};
pub use grid::{Axis, GridSpec, SpaceTimePoint};
pub use models::{AnalyticModel, DisclinationModel, DislocationModel, ModelValue, WaveParams};
