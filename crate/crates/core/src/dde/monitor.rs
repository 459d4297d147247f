//! The Lyapunov quantity `V(t) = mu(t) max_i (z_i / xi_i)^r*` and its running supremum.

use serde::Serialize;

use super::trajectory::Trajectory;
use crate::criterion::limits::{instantaneous_derivative, instantaneous_ratio};
use crate::criterion::{DelayFunction, MuFunction, MARGIN_EPS};
use crate::model::DilationMap;
use crate::transform::{root, TransformedSystem};

/// How the burn-in node `T` is chosen.
#[derive(Debug, Clone, Copy)]
pub enum BurnIn<'a> {
    FirstNode,
    /// First node with `t_k >= t`.
    AtTime(f64),
    /// First node from which the pointwise margins, built from
    /// `mu(t)/mu(d(t))` and `mu'(t)/mu(t)^(1-p/r*)`, stay negative to the end.
    Criterion { system: &'a TransformedSystem, delay: &'a DelayFunction },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorReport {
    #[serde(skip)]
    pub v: Vec<f64>,
    /// `max(1, sup_{s <= t_k} V(s))`; nondecreasing.
    #[serde(skip)]
    pub sup: Vec<f64>,
    pub burn_in_time: Option<f64>,
    pub burn_in_index: Option<usize>,
    /// `sup(t_end) / sup(T)`; absent when no burn-in node exists.
    pub growth_ratio: Option<f64>,
    pub final_v: f64,
    pub final_sup: f64,
}

/// Builds the `V` series, its running supremum and the growth ratio after burn-in.
///
/// `mu` is evaluated at `max(t, 0)`; states are projected onto the orthant.
pub fn lyapunov_monitor(
    traj: &Trajectory,
    mu: &MuFunction,
    xi: &[f64],
    r: &DilationMap,
    r_star: f64,
    burn_in: BurnIn<'_>,
) -> MonitorReport {
    let w = r.weights();
    let mut v = Vec::with_capacity(traj.len());
    let mut sup = Vec::with_capacity(traj.len());
    let mut running = 1.0_f64;
    for k in 0..traj.len() {
        let norm = traj
            .state(k)
            .iter()
            .zip(w)
            .zip(xi)
            .map(|((x, rj), xij)| root(x.max(0.0), *rj) / xij)
            .fold(0.0_f64, f64::max);
        let vk = mu.eval(traj.time(k).max(0.0)).unwrap_or(f64::NAN) * norm.powf(r_star);
        if vk > running {
            running = vk;
        }
        v.push(vk);
        sup.push(running);
    }
    let burn_in_index = match burn_in {
        BurnIn::FirstNode => (!traj.is_empty()).then_some(0),
        BurnIn::AtTime(t) => {
            let k = traj.times().partition_point(|s| *s < t);
            (k < traj.len()).then_some(k)
        }
        BurnIn::Criterion { system, delay } => criterion_burn_in(traj, mu, xi, r_star, system, delay),
    };
    let growth_ratio = burn_in_index.map(|k| sup[sup.len() - 1] / sup[k]);
    MonitorReport {
        burn_in_time: burn_in_index.map(|k| traj.time(k)),
        burn_in_index,
        growth_ratio,
        final_v: v.last().copied().unwrap_or(f64::NAN),
        final_sup: sup.last().copied().unwrap_or(1.0),
        v,
        sup,
    }
}

/// Pointwise margins at `t`, or `None` where the ratio or derivative is undefined.
pub fn pointwise_margins(
    system: &TransformedSystem,
    mu: &MuFunction,
    delay: &DelayFunction,
    xi: &[f64],
    r_star: f64,
    t: f64,
) -> Option<Vec<f64>> {
    let p = system.p.unwrap_or(0.0);
    let ratio = instantaneous_ratio(mu, delay, t).ok()?;
    let deriv = instantaneous_derivative(mu, p, r_star, t).ok()?;
    crate::criterion::criterion_margins(&system.fbar, &system.gbar, xi, &system.r, r_star, p, ratio, deriv).ok()
}

fn criterion_burn_in(
    traj: &Trajectory,
    mu: &MuFunction,
    xi: &[f64],
    r_star: f64,
    system: &TransformedSystem,
    delay: &DelayFunction,
) -> Option<usize> {
    let mut first = None;
    for k in (0..traj.len()).rev() {
        let ok = pointwise_margins(system, mu, delay, xi, r_star, traj.time(k))
            .is_some_and(|m| m.iter().all(|v| *v < -MARGIN_EPS));
        if !ok {
            break;
        }
        first = Some(k);
    }
    first
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::MuTable;

    fn traj(times: &[f64], xs: &[Vec<f64>]) -> Trajectory {
        let n = xs[0].len();
        Trajectory::from_nodes(times.to_vec(), xs.to_vec(), vec![vec![0.0; n]; xs.len()]).unwrap()
    }

    #[test]
    fn constant_mu_gives_z_norm() {
        let mu = MuFunction::Tabulated(MuTable::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap());
        let r = DilationMap::new(vec![1.0, 2.0]).unwrap();
        let tr = traj(&[0.0, 1.0, 2.0], &[vec![0.5, 4.0], vec![3.0, 1.0], vec![0.1, 0.01]]);
        let rep = lyapunov_monitor(&tr, &mu, &[1.0, 1.0], &r, 1.0, BurnIn::FirstNode);
        assert_eq!(rep.v, vec![2.0, 3.0, 0.1]);
        assert_eq!(rep.sup, vec![2.0, 3.0, 3.0]);
        assert_eq!(rep.growth_ratio, Some(1.5));
    }

    #[test]
    fn divergent_trajectory_flags_growth() {
        let times: Vec<f64> = (1..=20).map(f64::from).collect();
        let xs: Vec<Vec<f64>> = times.iter().map(|t| vec![t.exp()]).collect();
        let rep = lyapunov_monitor(&traj(&times, &xs), &MuFunction::Log, &[1.0], &DilationMap::standard(1), 1.0,
            BurnIn::FirstNode);
        assert!(rep.growth_ratio.unwrap() > 1e6);
    }

    #[test]
    fn criterion_burn_in_on_example() {
        let (f, g) = (crate::model::example::f(), crate::model::example::g());
        let sys = TransformedSystem::new(&f, &g, &crate::model::example::r(), Some(2.0)).unwrap();
        let times: Vec<f64> = (1..=40).map(|k| 3.0 * 1.3_f64.powi(k)).collect();
        let xs = vec![vec![0.5, 0.5]; times.len()];
        let rep = lyapunov_monitor(&traj(&times, &xs), &MuFunction::Log, &[1.0, 1.0], &sys.r, 2.0,
            BurnIn::Criterion { system: &sys, delay: &DelayFunction::LogFraction });
        let k = rep.burn_in_index.unwrap();
        for t in &times[k..] {
            let m = pointwise_margins(&sys, &MuFunction::Log, &DelayFunction::LogFraction, &[1.0, 1.0], 2.0, *t).unwrap();
            assert!(m.iter().all(|v| *v < 0.0));
        }
    }
}
