//! Time-varying delays, expressed through the delayed time `d(t) = t - tau(t)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::E;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum DelayFunction {
    /// `tau(t) = tau_max`
    Bounded { tau_max: f64 },
    /// `d(t) = q t`
    Proportional { q: f64 },
    /// `tau(t) = t - t / ln t`, valid for `t >= e`
    #[serde(rename = "logfraction")]
    LogFraction,
    /// `tau(t) = t - t^alpha`, valid for `t >= 1`
    #[serde(rename = "powerlag")]
    PowerLag { alpha: f64 },
    #[serde(rename = "table")]
    Tabulated(DelayTable),
}

impl DelayFunction {
    pub fn validate(&self) -> Result<()> {
        let unit = |name, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: format!("must lie in (0, 1), got {v}") })
            }
        };
        match self {
            DelayFunction::Bounded { tau_max } if !(*tau_max >= 0.0 && tau_max.is_finite()) => {
                Err(Error::InvalidParameter { name: "tau_max", reason: format!("must be >= 0, got {tau_max}") })
            }
            DelayFunction::Proportional { q } => unit("q", *q),
            DelayFunction::PowerLag { alpha } => unit("alpha", *alpha),
            _ => Ok(()),
        }
    }

    /// Interval on which `d(t)` is defined and satisfies `d(t) <= t`.
    pub fn validity(&self) -> (f64, f64) {
        match self {
            DelayFunction::LogFraction => (E, f64::INFINITY),
            DelayFunction::PowerLag { .. } => (1.0, f64::INFINITY),
            DelayFunction::Tabulated(tab) => (tab.t[0], *tab.t.last().unwrap()),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// `d(t) = t - tau(t)`.
    pub fn delayed_time(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.validity();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutsideValidity { t, lo, hi });
        }
        Ok(self.delayed_time_unchecked(t))
    }

    pub(crate) fn delayed_time_unchecked(&self, t: f64) -> f64 {
        match self {
            DelayFunction::Bounded { tau_max } => t - tau_max,
            DelayFunction::Proportional { q } => q * t,
            DelayFunction::LogFraction => t / t.ln(),
            DelayFunction::PowerLag { alpha } => t.powf(*alpha),
            DelayFunction::Tabulated(tab) => tab.eval(t),
        }
    }

    pub fn tau(&self, t: f64) -> Result<f64> {
        Ok(t - self.delayed_time(t)?)
    }

    /// Samples `d` on `[lo, hi]` and returns the first time where `d(t) > t`
    /// or `d` decreases.
    pub fn find_violation(&self, lo: f64, hi: f64, samples: usize) -> Option<f64> {
        let (vlo, vhi) = self.validity();
        let (lo, hi) = (lo.max(vlo), hi.min(vhi));
        if !(hi > lo) {
            return None;
        }
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=samples {
            let t = if lo > 0.0 {
                lo * (hi / lo).powf(k as f64 / samples as f64)
            } else {
                lo + (hi - lo) * k as f64 / samples as f64
            };
            let d = self.delayed_time_unchecked(t);
            if d > t || d < prev {
                return Some(t);
            }
            prev = d;
        }
        None
    }

    pub fn label(&self) -> String {
        match self {
            DelayFunction::Bounded { tau_max } => format!("tau = {tau_max}"),
            DelayFunction::Proportional { q } => format!("d(t) = {q} t"),
            DelayFunction::LogFraction => "tau = t - t/ln t".into(),
            DelayFunction::PowerLag { alpha } => format!("tau = t - t^{alpha}"),
            DelayFunction::Tabulated(_) => "tabulated".into(),
        }
    }
}

/// Samples of `d(t)`, linearly interpolated; defined only on the sampled range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDelayTable")]
pub struct DelayTable {
    t: Vec<f64>,
    d: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDelayTable {
    t: Vec<f64>,
    d: Vec<f64>,
}

impl TryFrom<RawDelayTable> for DelayTable {
    type Error = Error;
    fn try_from(raw: RawDelayTable) -> Result<Self> {
        DelayTable::new(raw.t, raw.d)
    }
}

impl DelayTable {
    pub fn new(t: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        if t.len() != d.len() || t.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "delay.table",
                reason: "needs at least two (t, d) pairs of equal length".into(),
            });
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter { name: "delay.t", reason: "must be strictly increasing".into() });
        }
        if t.iter().zip(&d).any(|(t, d)| d > t) {
            return Err(Error::InvalidParameter { name: "delay.d", reason: "requires d(t) <= t".into() });
        }
        Ok(Self { t, d })
    }

    pub fn end(&self) -> f64 {
        *self.t.last().unwrap()
    }

    fn eval(&self, t: f64) -> f64 {
        let k = (self.t.partition_point(|v| *v <= t).max(1) - 1).min(self.t.len() - 2);
        let s = (t - self.t[k]) / (self.t[k + 1] - self.t[k]);
        self.d[k] + s * (self.d[k + 1] - self.d[k])
    }
}
