//! The asymptotic quantities entering the margin:
//! `L = lim mu(t) / mu(d(t))` and `D = lim mu'(t) / mu(t)^(1 - p/r*)`.

use serde::Serialize;

use super::delay::DelayFunction;
use super::mu::MuFunction;
use crate::error::{Error, Result};

/// Sample times of the numeric estimator.
pub const ESTIMATOR_TIMES: [f64; 4] = [1e4, 1e6, 1e8, 1e10];
/// Relative agreement required between the last two estimator samples.
pub const ESTIMATOR_REL_TOL: f64 = 0.01;
/// Sequences whose last two samples are both below this are treated as vanishing.
pub const ESTIMATOR_ZERO_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitMethod {
    Analytic,
    NumericEstimate,
}

/// Numeric estimate of one limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    /// `(t, value)` pairs in increasing `t`.
    pub samples: Vec<(f64, f64)>,
    #[serde(serialize_with = "crate::ext_float::serialize")]
    pub value: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitPair {
    #[serde(rename = "L", serialize_with = "crate::ext_float::serialize")]
    pub l: f64,
    #[serde(rename = "D", serialize_with = "crate::ext_float::serialize")]
    pub d: f64,
    pub method: LimitMethod,
    /// False when a numeric estimate failed its agreement test.
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_estimate: Option<Estimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivative_estimate: Option<Estimate>,
}

impl LimitPair {
    pub fn analytic(l: f64, d: f64) -> Self {
        Self { l, d, method: LimitMethod::Analytic, converged: true, ratio_estimate: None, derivative_estimate: None }
    }

    pub fn is_finite(&self) -> bool {
        self.l.is_finite() && self.d.is_finite()
    }
}

/// Closed-form `L` for the supported `(mu, delay)` pairs.
pub fn analytic_ratio(mu: &MuFunction, delay: &DelayFunction) -> Option<f64> {
    use DelayFunction as Dl;
    use MuFunction as M;
    match (mu, delay) {
        (M::Exponential { eps }, Dl::Bounded { tau_max }) => Some((eps * tau_max).exp()),
        (M::Power { .. } | M::Log | M::LogLog, Dl::Bounded { .. }) => Some(1.0),
        (M::Power { beta }, Dl::Proportional { q }) => Some(q.powf(-beta)),
        (M::Log | M::LogLog, Dl::Proportional { .. }) => Some(1.0),
        (M::Log, Dl::LogFraction) => Some(1.0),
        (M::LogLog, Dl::PowerLag { .. }) => Some(1.0),
        _ => None,
    }
}

/// Closed-form `D` for the parametric families, with `kappa = p / r*`.
pub fn analytic_derivative(mu: &MuFunction, p: f64, r_star: f64) -> Option<f64> {
    let kappa = p / r_star;
    match mu {
        MuFunction::Exponential { eps } => Some(if p == 0.0 { *eps } else { f64::INFINITY }),
        MuFunction::Power { beta } => {
            let e = beta * kappa;
            Some(if (e - 1.0).abs() <= 1e-12 {
                *beta
            } else if e < 1.0 {
                0.0
            } else {
                f64::INFINITY
            })
        }
        MuFunction::Log | MuFunction::LogLog => Some(0.0),
        MuFunction::Tabulated(_) => None,
    }
}

/// `mu(t) / mu(d(t))` at one time.
pub fn instantaneous_ratio(mu: &MuFunction, delay: &DelayFunction, t: f64) -> Result<f64> {
    let d = delay.delayed_time(t)?.max(0.0);
    Ok((mu.ln_eval(t)? - mu.ln_eval(d)?).exp())
}

/// `mu'(t) / mu(t)^(1 - p/r*)` at one time.
pub fn instantaneous_derivative(mu: &MuFunction, p: f64, r_star: f64, t: f64) -> Result<f64> {
    Ok((mu.ln_derivative(t)? - (1.0 - p / r_star) * mu.ln_eval(t)?).exp())
}

fn estimator_times(mu: &MuFunction, delay: Option<&DelayFunction>) -> Result<Vec<f64>> {
    let mut hi = f64::INFINITY;
    let mut lo = 0.0_f64;
    if let MuFunction::Tabulated(tab) = mu {
        hi = hi.min(tab.end());
    }
    if let Some(d) = delay {
        let (vlo, vhi) = d.validity();
        lo = lo.max(vlo);
        hi = hi.min(vhi);
    }
    let times: Vec<f64> = ESTIMATOR_TIMES.iter().copied().filter(|t| *t >= lo && *t <= hi).collect();
    if times.len() < 2 {
        return Err(Error::DomainTooShort { end: hi });
    }
    Ok(times)
}

fn estimate(times: &[f64], eval: impl Fn(f64) -> Result<f64>) -> Result<Estimate> {
    let samples = times.iter().map(|&t| Ok((t, eval(t)?))).collect::<Result<Vec<_>>>()?;
    let a = samples[samples.len() - 2].1;
    let b = samples[samples.len() - 1].1;
    let converged = a.is_finite()
        && b.is_finite()
        && ((a - b).abs() <= ESTIMATOR_REL_TOL * a.abs().max(b.abs())
            || a.abs().max(b.abs()) <= ESTIMATOR_ZERO_FLOOR);
    Ok(Estimate { samples, value: b, converged })
}

/// Numeric estimate of `L` over [`ESTIMATOR_TIMES`].
pub fn estimate_ratio(mu: &MuFunction, delay: &DelayFunction) -> Result<Estimate> {
    let times = estimator_times(mu, Some(delay))?;
    estimate(&times, |t| instantaneous_ratio(mu, delay, t))
}

/// Numeric estimate of `D` over [`ESTIMATOR_TIMES`].
pub fn estimate_derivative(mu: &MuFunction, p: f64, r_star: f64) -> Result<Estimate> {
    let times = estimator_times(mu, None)?;
    estimate(&times, |t| instantaneous_derivative(mu, p, r_star, t))
}

/// Analytic limits where the table covers the pair, numeric estimates otherwise.
pub fn compute_limits(mu: &MuFunction, delay: &DelayFunction, p: f64, r_star: f64) -> Result<LimitPair> {
    mu.validate()?;
    delay.validate()?;
    if !(r_star > 0.0) {
        return Err(Error::InvalidParameter { name: "r_star", reason: format!("must be > 0, got {r_star}") });
    }
    let (l, ratio_estimate) = match analytic_ratio(mu, delay) {
        Some(l) => (l, None),
        None => {
            let e = estimate_ratio(mu, delay)?;
            (e.value, Some(e))
        }
    };
    let (d, derivative_estimate) = match analytic_derivative(mu, p, r_star) {
        Some(d) => (d, None),
        None => {
            let e = estimate_derivative(mu, p, r_star)?;
            (e.value, Some(e))
        }
    };
    let numeric = ratio_estimate.is_some() || derivative_estimate.is_some();
    let converged = ratio_estimate.as_ref().is_none_or(|e| e.converged)
        && derivative_estimate.as_ref().is_none_or(|e| e.converged);
    Ok(LimitPair {
        l,
        d,
        method: if numeric { LimitMethod::NumericEstimate } else { LimitMethod::Analytic },
        converged,
        ratio_estimate,
        derivative_estimate,
    })
}
