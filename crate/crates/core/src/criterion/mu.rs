//! Rate functions `mu(t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A positive nondecreasing rate function with `mu(t) -> infinity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum MuFunction {
    /// `e^(eps t)`
    #[serde(rename = "exp")]
    Exponential { eps: f64 },
    /// `(1 + t)^beta`
    Power { beta: f64 },
    /// `ln(t + 1)`
    Log,
    /// `ln ln(t + 3)`
    #[serde(rename = "loglog")]
    LogLog,
    #[serde(rename = "table")]
    Tabulated(MuTable),
}

impl MuFunction {
    pub fn validate(&self) -> Result<()> {
        match self {
            MuFunction::Exponential { eps } if !(*eps > 0.0 && eps.is_finite()) => {
                Err(Error::InvalidParameter { name: "eps", reason: format!("must be > 0, got {eps}") })
            }
            MuFunction::Power { beta } if !(*beta > 0.0 && beta.is_finite()) => {
                Err(Error::InvalidParameter { name: "beta", reason: format!("must be > 0, got {beta}") })
            }
            _ => Ok(()),
        }
    }

    fn check_t(t: f64) -> Result<()> {
        if !(t >= 0.0) {
            return Err(Error::OutsideValidity { t, lo: 0.0, hi: f64::INFINITY });
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        Self::check_t(t)?;
        Ok(match self {
            MuFunction::Exponential { eps } => (eps * t).exp(),
            MuFunction::Power { beta } => (1.0 + t).powf(*beta),
            MuFunction::Log => t.ln_1p(),
            MuFunction::LogLog => (t + 3.0).ln().ln(),
            MuFunction::Tabulated(tab) => tab.eval(t),
        })
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        Self::check_t(t)?;
        Ok(match self {
            MuFunction::Exponential { eps } => eps * (eps * t).exp(),
            MuFunction::Power { beta } => beta * (1.0 + t).powf(beta - 1.0),
            MuFunction::Log => 1.0 / (1.0 + t),
            MuFunction::LogLog => 1.0 / ((t + 3.0) * (t + 3.0).ln()),
            MuFunction::Tabulated(tab) => tab.derivative(t),
        })
    }

    /// `ln mu(t)`, computed without overflowing for the exponential family.
    pub fn ln_eval(&self, t: f64) -> Result<f64> {
        Self::check_t(t)?;
        Ok(match self {
            MuFunction::Exponential { eps } => eps * t,
            MuFunction::Power { beta } => beta * t.ln_1p(),
            _ => self.eval(t)?.ln(),
        })
    }

    /// `ln mu'(t)`.
    pub fn ln_derivative(&self, t: f64) -> Result<f64> {
        Self::check_t(t)?;
        Ok(match self {
            MuFunction::Exponential { eps } => eps.ln() + eps * t,
            MuFunction::Power { beta } => beta.ln() + (beta - 1.0) * t.ln_1p(),
            MuFunction::Log => -t.ln_1p(),
            MuFunction::LogLog => -((t + 3.0).ln() + (t + 3.0).ln().ln()),
            MuFunction::Tabulated(tab) => tab.derivative(t).ln(),
        })
    }

    /// Unboundedness trend test: strictly increasing over the last decade of
    /// samples for tables; parametric families always pass.
    pub fn is_unbounded(&self) -> bool {
        match self {
            MuFunction::Tabulated(tab) => tab.increasing_over_last_decade(),
            _ => true,
        }
    }

    pub fn label(&self) -> String {
        match self {
            MuFunction::Exponential { eps } => format!("exp({eps} t)"),
            MuFunction::Power { beta } => format!("(1+t)^{beta}"),
            MuFunction::Log => "ln(t+1)".into(),
            MuFunction::LogLog => "ln ln(t+3)".into(),
            MuFunction::Tabulated(_) => "tabulated".into(),
        }
    }
}

/// Samples of `mu` interpolated by a monotone piecewise cubic (Fritsch-Carlson).
/// Outside the sampled range the table is extended by constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMuTable")]
pub struct MuTable {
    t: Vec<f64>,
    mu: Vec<f64>,
    #[serde(skip)]
    slopes: Vec<f64>,
}

#[derive(Deserialize)]
struct RawMuTable {
    t: Vec<f64>,
    mu: Vec<f64>,
}

impl TryFrom<RawMuTable> for MuTable {
    type Error = Error;
    fn try_from(raw: RawMuTable) -> Result<Self> {
        MuTable::new(raw.t, raw.mu)
    }
}

impl MuTable {
    pub fn new(t: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        if t.len() != mu.len() || t.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "mu.table",
                reason: "needs at least two (t, mu) pairs of equal length".into(),
            });
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter { name: "mu.t", reason: "must be strictly increasing".into() });
        }
        if mu.iter().any(|v| !(*v > 0.0)) || mu.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter { name: "mu.mu", reason: "must be positive and nondecreasing".into() });
        }
        let slopes = fritsch_carlson_slopes(&t, &mu);
        Ok(Self { t, mu, slopes })
    }

    pub fn end(&self) -> f64 {
        *self.t.last().unwrap()
    }

    fn locate(&self, t: f64) -> Option<usize> {
        if t <= self.t[0] || t >= self.end() {
            return None;
        }
        Some(self.t.partition_point(|v| *v <= t) - 1)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.locate(t) {
            None if t <= self.t[0] => self.mu[0],
            None => *self.mu.last().unwrap(),
            Some(k) => {
                let h = self.t[k + 1] - self.t[k];
                let s = (t - self.t[k]) / h;
                let (h00, h10, h01, h11) = hermite_basis(s);
                h00 * self.mu[k] + h10 * h * self.slopes[k] + h01 * self.mu[k + 1] + h11 * h * self.slopes[k + 1]
            }
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self.locate(t) {
            None => 0.0,
            Some(k) => {
                let h = self.t[k + 1] - self.t[k];
                let s = (t - self.t[k]) / h;
                let (d00, d10, d01, d11) = hermite_basis_derivative(s);
                (d00 * self.mu[k] + d01 * self.mu[k + 1]) / h + d10 * self.slopes[k] + d11 * self.slopes[k + 1]
            }
        }
    }

    fn increasing_over_last_decade(&self) -> bool {
        let cut = self.end() / 10.0;
        let tail: Vec<f64> = self.t.iter().zip(&self.mu).filter(|(t, _)| **t >= cut).map(|(_, m)| *m).collect();
        tail.len() >= 2 && tail.windows(2).all(|w| w[1] > w[0])
    }
}

pub(crate) fn hermite_basis(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s, -2.0 * s3 + 3.0 * s2, s3 - s2)
}

pub(crate) fn hermite_basis_derivative(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    (6.0 * s2 - 6.0 * s, 3.0 * s2 - 4.0 * s + 1.0, -6.0 * s2 + 6.0 * s, 3.0 * s2 - 2.0 * s)
}

fn fritsch_carlson_slopes(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / (t[k + 1] - t[k])).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for k in 1..n - 1 {
        m[k] = if delta[k - 1] * delta[k] <= 0.0 { 0.0 } else { 0.5 * (delta[k - 1] + delta[k]) };
    }
    for k in 0..n - 1 {
        if delta[k] == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let a = m[k] / delta[k];
        let b = m[k + 1] / delta[k];
        let norm = a * a + b * b;
        if norm > 9.0 {
            let tau = 3.0 / norm.sqrt();
            m[k] = tau * a * delta[k];
            m[k + 1] = tau * b * delta[k];
        }
    }
    m
}
