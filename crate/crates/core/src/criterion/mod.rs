//! Margin criterion for μ-stability and its ingredients.

pub mod delay;
pub mod limits;
pub mod margins;
pub mod mu;

pub use delay::{DelayFunction, DelayTable};
pub use limits::{
    analytic_derivative, analytic_ratio, compute_limits, estimate_derivative, estimate_ratio,
    instantaneous_derivative, instantaneous_ratio, Estimate, LimitMethod, LimitPair,
};
pub use margins::{
    criterion_margins, evaluate_criterion, preset_log_stability, preset_loglog_stability, search_xi,
    CriterionInput, CriterionReport, CriterionVerdict, HypothesisFlag, PresetReport, RateStatement, XiSearch,
    MARGIN_EPS,
};
pub use mu::{MuFunction, MuTable};
