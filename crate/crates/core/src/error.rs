use thiserror::Error;

/// Errors produced by the analysis and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point must lie in the {0}")]
    OutsideDomain(&'static str),

    #[error("monomial exponent {exponent} is invalid for a source field (component {component})")]
    InvalidExponent { component: usize, exponent: f64 },

    #[error("evaluation is singular at a boundary point (component {component})")]
    SingularAtBoundary { component: usize },

    #[error("dilation weights must be strictly positive and finite (index {index}: {value})")]
    InvalidDilation { index: usize, value: f64 },

    #[error("homogeneity degree is undefined for the zero map")]
    ZeroMap,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time {t} is outside the validity interval [{lo}, {hi}]")]
    OutsideValidity { t: f64, lo: f64, hi: f64 },

    #[error("tabulated domain too short for limit estimation (ends at {end})")]
    DomainTooShort { end: f64 },

    #[error("causality violated: delayed time {delayed} exceeds current time {t}")]
    Causality { t: f64, delayed: f64 },

    #[error("step underflow at t = {t}: state more than doubled within a minimum-size step")]
    StepUnderflow { t: f64 },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("not enough usable nodes for a fit: {got} (need {need})")]
    TooFewNodes { got: usize, need: usize },

    #[error("input document: {0}")]
    Document(String),

    #[error("stage `{stage}` requires `{requires}`")]
    StageDependency { stage: &'static str, requires: &'static str },

    #[error("I/O error at {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
