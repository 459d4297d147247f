//! Stability verification for positive nonlinear systems with unbounded
//! time-varying delays.
//!
//! The crate works on vector fields given as signed monomial sums:
//!
//! * [`model`] checks cooperativity, monotonicity, homogeneity and the
//!   Ω-condition, exactly where a symbolic rule applies and by seeded sampling
//!   otherwise;
//! * [`transform`] builds the `z = x^(1/r)` fields in closed monomial form;
//! * [`criterion`] evaluates the μ-stability margins and their limit terms;
//! * [`dde`] integrates the delayed system over long horizons, monitors the
//!   Lyapunov supremum and fits empirical decay rates;
//! * [`harness`] drives the whole pipeline from a JSON document.

// Negated comparisons below reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criterion;
pub mod dde;
pub mod error;
pub(crate) mod ext_float;
pub mod generate;
pub mod harness;
pub mod model;
pub mod sampling;
pub mod transform;

pub use criterion::{
    compute_limits, criterion_margins, evaluate_criterion, CriterionReport, CriterionVerdict, DelayFunction,
    LimitPair, MuFunction,
};
pub use dde::{fit_rate, lyapunov_monitor, simulate, HistorySpec, MonitorReport, SimConfig, Trajectory};
pub use error::{Error, Result};
pub use model::{DilationMap, Monomial, PolyMap, StructureReport, Verdict};
pub use transform::{state_to_z, transform_field, z_to_state, TransformedSystem};
