//! Classical RK4 for `x' = f(x(t)) + g(x(d(t)))` on a growing step grid.

use serde::{Deserialize, Serialize};

use super::history::HistorySpec;
use super::trajectory::Trajectory;
use crate::criterion::DelayFunction;
use crate::error::{Error, Result};
use crate::model::PolyMap;

/// Integration settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub t_start: f64,
    pub t_end: f64,
    /// Relative step: `h = clamp(rho * t, h_min, h_max)`.
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_h_min")]
    pub h_min: f64,
    /// Upper step bound; `None` means `t / 10`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_max: Option<f64>,
    #[serde(default = "default_x_floor")]
    pub x_floor: f64,
    /// Steps are also capped at `stability_factor / ||J_f(x)||_inf`, never below
    /// `h_min`. Explicit RK4 is stable for real eigenvalues down to about -2.78/h.
    #[serde(default = "default_stability_factor")]
    pub stability_factor: f64,
}

fn default_rho() -> f64 {
    1e-3
}
fn default_h_min() -> f64 {
    1e-3
}
fn default_x_floor() -> f64 {
    1e-300
}
fn default_stability_factor() -> f64 {
    1.5
}

impl SimConfig {
    pub fn new(t_start: f64, t_end: f64) -> Self {
        Self {
            t_start,
            t_end,
            rho: default_rho(),
            h_min: default_h_min(),
            h_max: None,
            x_floor: default_x_floor(),
            stability_factor: default_stability_factor(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| Err(Error::InvalidParameter { name, reason: reason.into() });
        if !(self.t_start.is_finite() && self.t_end.is_finite() && self.t_start < self.t_end) {
            return bad("sim.t_end", "need finite t_start < t_end");
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return bad("sim.rho", "must be finite and >= 0");
        }
        if !(self.h_min > 0.0 && self.h_min.is_finite()) {
            return bad("sim.h_min", "must be finite and > 0");
        }
        if let Some(h) = self.h_max {
            if !(h >= self.h_min) {
                return bad("sim.h_max", "must be >= h_min");
            }
        }
        if !(self.x_floor >= 0.0 && self.x_floor.is_finite()) {
            return bad("sim.x_floor", "must be finite and >= 0");
        }
        if !(self.stability_factor > 0.0) {
            return bad("sim.stability_factor", "must be > 0 (use inf to disable)");
        }
        Ok(())
    }

    /// Step from the prescribed policy at time `t`, before the stiffness cap.
    pub fn policy_step(&self, t: f64) -> f64 {
        let h_max = self.h_max.unwrap_or(t.abs() / 10.0).max(self.h_min);
        (self.rho * t).clamp(self.h_min, h_max)
    }
}

/// Relative width below which a final step is merged into its predecessor.
const END_SNAP: f64 = 1e-9;
/// Relative excess of `d(s)` over `s` attributed to rounding.
const CAUSALITY_SLACK: f64 = 1e-12;

struct Integrator<'a> {
    f: &'a PolyMap,
    g: &'a PolyMap,
    delay: &'a DelayFunction,
    history: &'a HistorySpec,
    cfg: &'a SimConfig,
    traj: Trajectory,
    n: usize,
}

impl Integrator<'_> {
    /// `x(s)` for `s <= t_stage`; returns `true` when the value is extrapolated.
    fn delayed_state(&self, s: f64, out: &mut [f64]) -> bool {
        if s <= self.cfg.t_start {
            self.history.value_into(s, out);
            return false;
        }
        let last = self.traj.len() - 1;
        let t_last = self.traj.time(last);
        if last == 0 {
            let (x, d) = (self.traj.state(0), self.traj.derivative(0));
            for i in 0..self.n {
                out[i] = x[i] + (s - t_last) * d[i];
            }
            return s > t_last;
        }
        if s <= t_last {
            self.traj.hermite_into(self.traj.bracket(s), s, out);
            false
        } else {
            self.traj.hermite_into(last - 1, s, out);
            true
        }
    }

    /// `f(y) + g(x(d(s)))`, with `y` projected onto the orthant for evaluation.
    fn rhs(&mut self, s: f64, y: &[f64], h: f64, scratch: &mut Scratch) -> Result<()> {
        let mut d = self.delay.delayed_time_unchecked(s);
        if !(d <= s) {
            // Interpolated zero lags may overshoot by rounding.
            if d - s <= CAUSALITY_SLACK * s.abs().max(1.0) {
                d = s;
            } else {
                return Err(Error::Causality { t: s, delayed: d });
            }
        }
        let mut lag = std::mem::take(&mut scratch.lag);
        if self.delayed_state(d, &mut lag) {
            self.traj.stats.extrapolated_lookups += 1;
            let t_last = self.traj.time(self.traj.len() - 1);
            if d > t_last + h {
                self.traj.stats.far_extrapolations += 1;
            }
        }
        for v in lag.iter_mut() {
            *v = v.max(0.0);
        }
        for (p, v) in scratch.proj.iter_mut().zip(y) {
            *p = v.max(0.0);
        }
        self.f.eval_into(&scratch.proj, &mut scratch.out);
        self.g.eval_into(&lag, &mut scratch.gout);
        for (o, g) in scratch.out.iter_mut().zip(&scratch.gout) {
            *o += g;
        }
        scratch.lag = lag;
        Ok(())
    }

    fn step_size(&mut self, t: f64, x: &[f64]) -> f64 {
        let mut h = self.cfg.policy_step(t);
        if self.cfg.stability_factor.is_finite() {
            let bound = self.f.jacobian_row_sum_bound(x);
            if bound > 0.0 {
                let cap = (self.cfg.stability_factor / bound).max(self.cfg.h_min);
                if cap < h {
                    h = cap;
                    self.traj.stats.stability_limited_steps += 1;
                }
            }
        }
        let remaining = self.cfg.t_end - t;
        if h >= remaining * (1.0 - END_SNAP) {
            remaining
        } else {
            h
        }
    }
}

#[derive(Default)]
struct Scratch {
    lag: Vec<f64>,
    proj: Vec<f64>,
    out: Vec<f64>,
    gout: Vec<f64>,
}

/// Integrates from `cfg.t_start` to `cfg.t_end`, storing every node.
///
/// Delayed values come from the history when `d(s) <= t_start`, from cubic
/// Hermite interpolation on the stored nodes otherwise, and from the Hermite
/// extension of the last completed interval when `d(s)` falls inside the
/// current step. States are clamped below at `x_floor` after each step.
pub fn simulate(
    f: &PolyMap,
    g: &PolyMap,
    delay: &DelayFunction,
    history: &HistorySpec,
    cfg: &SimConfig,
) -> Result<Trajectory> {
    let n = f.dim();
    for dim in [g.dim(), history.dim()] {
        if dim != n {
            return Err(Error::DimensionMismatch { expected: n, got: dim });
        }
    }
    cfg.validate()?;
    delay.validate()?;
    history.validate()?;
    let (lo, hi) = delay.validity();
    if cfg.t_start < lo || cfg.t_end > hi {
        let t = if cfg.t_start < lo { cfg.t_start } else { cfg.t_end };
        return Err(Error::OutsideValidity { t, lo, hi });
    }

    let estimate = estimate_nodes(cfg);
    let mut it = Integrator { f, g, delay, history, cfg, traj: Trajectory::with_capacity(n, estimate), n };
    let mut sc = Scratch { lag: vec![0.0; n], proj: vec![0.0; n], out: vec![0.0; n], gout: vec![0.0; n] };

    let mut x = vec![0.0; n];
    history.value_into(cfg.t_start, &mut x);
    let mut t = cfg.t_start;
    it.rhs(t, &x, 0.0, &mut sc)?;
    it.traj.push(t, &x, &sc.out);
    let k1 = sc.out.clone();

    let (mut k1, mut k2, mut k3, mut k4) = (k1, vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut y = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    while t < cfg.t_end {
        let h = it.step_size(t, &x);
        let t_new = if h == cfg.t_end - t { cfg.t_end } else { t + h };

        for i in 0..n {
            y[i] = x[i] + 0.5 * h * k1[i];
        }
        it.rhs(t + 0.5 * h, &y, h, &mut sc)?;
        k2.copy_from_slice(&sc.out);
        for i in 0..n {
            y[i] = x[i] + 0.5 * h * k2[i];
        }
        it.rhs(t + 0.5 * h, &y, h, &mut sc)?;
        k3.copy_from_slice(&sc.out);
        for i in 0..n {
            y[i] = x[i] + h * k3[i];
        }
        it.rhs(t_new, &y, h, &mut sc)?;
        k4.copy_from_slice(&sc.out);

        for i in 0..n {
            x_new[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x_new.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: t_new });
        }
        let old_norm = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let new_norm = x_new.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if h <= cfg.h_min && old_norm > 1e-200 && new_norm > 2.0 * old_norm {
            return Err(Error::StepUnderflow { t: t_new });
        }
        for v in x_new.iter_mut() {
            *v = v.max(cfg.x_floor);
        }

        // d(t_new) may exceed t: the lookup then extends the last completed interval.
        it.rhs(t_new, &x_new, h, &mut sc)?;
        it.traj.push(t_new, &x_new, &sc.out);
        it.traj.stats.steps += 1;

        k1.copy_from_slice(&sc.out);
        x.copy_from_slice(&x_new);
        t = t_new;
    }
    Ok(it.traj)
}

fn estimate_nodes(cfg: &SimConfig) -> usize {
    let (a, b) = (cfg.t_start, cfg.t_end);
    let linear = ((b - a) / cfg.h_min).min(1e6);
    let geometric = if a > 0.0 && cfg.rho > 0.0 { (b / a).ln() / cfg.rho } else { linear };
    linear.min(geometric + cfg.rho.max(cfg.h_min).recip()).clamp(16.0, 4e6) as usize
}
