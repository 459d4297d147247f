//! The JSON system document: one file holds the system and the analysis settings.

use serde::{Deserialize, Serialize};

use crate::criterion::{DelayFunction, MuFunction};
use crate::dde::{HistorySpec, SimConfig};
use crate::error::{Error, Result};
use crate::model::{DilationMap, PolyMap};

/// Initial function: `{"phi0": [...]}` or `{"t": [...], "x": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistoryDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<Vec<f64>>>,
}

impl HistoryDoc {
    pub fn spec(&self) -> Result<HistorySpec> {
        match (&self.phi0, &self.t, &self.x) {
            (Some(phi), None, None) => Ok(HistorySpec::Constant(phi.clone())),
            (None, Some(t), Some(x)) => Ok(HistorySpec::Tabulated { t: t.clone(), x: x.clone() }),
            _ => Err(Error::Document("history: give either `phi0` or both `t` and `x`".into())),
        }
    }
}

/// Simulation settings as written in a document; `t_start` may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimDoc {
    #[serde(default)]
    t_start: Option<f64>,
    t_end: f64,
    #[serde(default)]
    rho: Option<f64>,
    #[serde(default)]
    h_min: Option<f64>,
    #[serde(default)]
    h_max: Option<f64>,
    #[serde(default)]
    x_floor: Option<f64>,
    #[serde(default)]
    stability_factor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    n: usize,
    f: PolyMap,
    g: PolyMap,
    r: DilationMap,
    delay: DelayFunction,
    mu: MuFunction,
    #[serde(default)]
    xi: Option<Vec<f64>>,
    #[serde(default)]
    r_star: Option<f64>,
    history: HistoryDoc,
    #[serde(default)]
    sim: Option<SimDoc>,
}

/// A validated document with every default resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemDocument {
    pub n: usize,
    pub f: PolyMap,
    pub g: PolyMap,
    pub r: DilationMap,
    pub delay: DelayFunction,
    pub mu: MuFunction,
    pub xi: Vec<f64>,
    pub r_star: f64,
    pub history: HistoryDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimConfig>,
}

/// Parses and validates a document, applying `xi = 1`, `r* = max r_i`,
/// `t_start = ` start of the delay's validity interval, and the integrator defaults.
pub fn parse_system(text: &str) -> Result<SystemDocument> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Document(format!("at `{path}`: {inner}"))
    })?;
    let doc = resolve(raw)?;
    doc.validate()?;
    Ok(doc)
}

fn resolve(raw: RawDocument) -> Result<SystemDocument> {
    let n = raw.n;
    let sim = raw.sim.map(|s| {
        let mut cfg = SimConfig::new(s.t_start.unwrap_or_else(|| raw.delay.validity().0), s.t_end);
        cfg.rho = s.rho.unwrap_or(cfg.rho);
        cfg.h_min = s.h_min.unwrap_or(cfg.h_min);
        cfg.h_max = s.h_max;
        cfg.x_floor = s.x_floor.unwrap_or(cfg.x_floor);
        cfg.stability_factor = s.stability_factor.unwrap_or(cfg.stability_factor);
        cfg
    });
    Ok(SystemDocument {
        xi: raw.xi.unwrap_or_else(|| vec![1.0; n]),
        r_star: raw.r_star.unwrap_or_else(|| raw.r.max_weight()),
        n,
        f: raw.f,
        g: raw.g,
        r: raw.r,
        delay: raw.delay,
        mu: raw.mu,
        history: raw.history,
        sim,
    })
}

impl SystemDocument {
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let field = |name: &str, got: usize| {
            if got == n {
                Ok(())
            } else {
                Err(Error::Document(format!("at `{name}`: expected dimension {n}, got {got}")))
            }
        };
        if n == 0 {
            return Err(Error::Document("at `n`: must be at least 1".into()));
        }
        field("f", self.f.dim())?;
        field("g", self.g.dim())?;
        field("r", self.r.dim())?;
        field("xi", self.xi.len())?;
        for (name, map) in [("f", &self.f), ("g", &self.g)] {
            for (i, comp) in map.components().iter().enumerate() {
                if let Some(k) = comp.iter().position(|m| m.exponents.len() != n) {
                    return Err(Error::Document(format!("at `{name}[{i}][{k}].e`: expected {n} exponents")));
                }
            }
        }
        let history = self.history.spec()?;
        field("history", history.dim())?;
        history.validate().map_err(|e| Error::Document(format!("at `history`: {e}")))?;
        if self.xi.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Document("at `xi`: entries must be positive and finite".into()));
        }
        if !(self.r_star > 0.0 && self.r_star.is_finite()) {
            return Err(Error::Document("at `r_star`: must be positive and finite".into()));
        }
        self.delay.validate().map_err(|e| Error::Document(format!("at `delay`: {e}")))?;
        self.mu.validate().map_err(|e| Error::Document(format!("at `mu`: {e}")))?;
        if let Some(cfg) = &self.sim {
            cfg.validate().map_err(|e| Error::Document(format!("at `sim`: {e}")))?;
            let (lo, hi) = self.delay.validity();
            if cfg.t_start < lo || cfg.t_end > hi {
                return Err(Error::Document(format!(
                    "at `sim`: [{}, {}] leaves the delay's validity interval [{lo}, {hi}]",
                    cfg.t_start, cfg.t_end
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn history_spec(&self) -> Result<HistorySpec> {
        self.history.spec()
    }
}

/// The worked two-dimensional example as a document.
pub const WORKED_EXAMPLE: &str = include_str!("../../examples/worked_example.json");
