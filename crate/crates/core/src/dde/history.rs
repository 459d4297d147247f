use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Initial function on `(-inf, t_start]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistorySpec {
    /// `phi(t) = phi0` for all `t <= t_start`.
    Constant(Vec<f64>),
    /// Samples on a finite interval, linearly interpolated and extended by
    /// constants on both sides.
    Tabulated { t: Vec<f64>, x: Vec<Vec<f64>> },
}

impl HistorySpec {
    pub fn dim(&self) -> usize {
        match self {
            HistorySpec::Constant(phi) => phi.len(),
            HistorySpec::Tabulated { x, .. } => x.first().map_or(0, Vec::len),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |v: &[f64]| v.iter().all(|x| *x >= 0.0 && x.is_finite());
        match self {
            HistorySpec::Constant(phi) if !nonneg(phi) => Err(Error::InvalidParameter {
                name: "history.phi0",
                reason: "must be finite and componentwise >= 0".into(),
            }),
            HistorySpec::Tabulated { t, x } => {
                let n = self.dim();
                if t.is_empty() || t.len() != x.len() || x.iter().any(|row| row.len() != n) {
                    return Err(Error::InvalidParameter {
                        name: "history.table",
                        reason: "times and states must be non-empty with consistent lengths".into(),
                    });
                }
                if t.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidParameter { name: "history.t", reason: "must be strictly increasing".into() });
                }
                if !x.iter().all(|row| nonneg(row)) {
                    return Err(Error::InvalidParameter {
                        name: "history.x",
                        reason: "must be finite and componentwise >= 0".into(),
                    });
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn value_into(&self, s: f64, out: &mut [f64]) {
        match self {
            HistorySpec::Constant(phi) => out.copy_from_slice(phi),
            HistorySpec::Tabulated { t, x } => {
                if s <= t[0] {
                    out.copy_from_slice(&x[0]);
                } else if s >= *t.last().unwrap() {
                    out.copy_from_slice(x.last().unwrap());
                } else {
                    let k = t.partition_point(|v| *v <= s) - 1;
                    let w = (s - t[k]) / (t[k + 1] - t[k]);
                    for (o, (a, b)) in out.iter_mut().zip(x[k].iter().zip(&x[k + 1])) {
                        *o = a + w * (b - a);
                    }
                }
            }
        }
    }
}
