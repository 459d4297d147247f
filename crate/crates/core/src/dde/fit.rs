use serde::Serialize;

use super::trajectory::Trajectory;
use crate::criterion::MuFunction;
use crate::error::{Error, Result};

/// States at or below this are excluded from the fit.
pub const FIT_FLOOR: f64 = 1e-15;
pub const MIN_FIT_NODES: usize = 10;

/// Least-squares fit `ln x_j = s_j ln mu(t) + c_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub slopes: Vec<f64>,
    pub intercepts: Vec<f64>,
    pub nodes_used: usize,
    pub window_start: f64,
}

/// Fits over the trailing `window` fraction of the node range measured in `ln t`.
pub fn fit_rate(traj: &Trajectory, mu: &MuFunction, window: f64) -> Result<RateFit> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::InvalidParameter { name: "window", reason: "must lie in (0, 1]".into() });
    }
    let n = traj.dim();
    let positive: Vec<usize> = (0..traj.len()).filter(|&k| traj.time(k) > 0.0).collect();
    let (Some(&k0), Some(&k1)) = (positive.first(), positive.last()) else {
        return Err(Error::TooFewNodes { got: 0, need: MIN_FIT_NODES });
    };
    let (lo, hi) = (traj.time(k0).ln(), traj.time(k1).ln());
    let cut = hi - window * (hi - lo);
    let window_start = cut.exp();

    let mut lm = Vec::new();
    let mut lx: Vec<Vec<f64>> = vec![Vec::new(); n];
    for &k in &positive {
        let t = traj.time(k);
        if t.ln() < cut {
            continue;
        }
        let x = traj.state(k);
        if x.iter().any(|v| !(*v > FIT_FLOOR)) {
            continue;
        }
        let Ok(l) = mu.ln_eval(t) else { continue };
        if !l.is_finite() {
            continue;
        }
        lm.push(l);
        for j in 0..n {
            lx[j].push(x[j].ln());
        }
    }
    if lm.len() < MIN_FIT_NODES {
        return Err(Error::TooFewNodes { got: lm.len(), need: MIN_FIT_NODES });
    }
    let m = lm.len() as f64;
    let mean_m = lm.iter().sum::<f64>() / m;
    let sxx: f64 = lm.iter().map(|a| (a - mean_m).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Precondition("ln mu is constant on the fit window".into()));
    }
    let mut slopes = Vec::with_capacity(n);
    let mut intercepts = Vec::with_capacity(n);
    for ys in &lx {
        let mean_y = ys.iter().sum::<f64>() / m;
        let sxy: f64 = lm.iter().zip(ys).map(|(a, y)| (a - mean_m) * (y - mean_y)).sum();
        let s = sxy / sxx;
        slopes.push(s);
        intercepts.push(mean_y - s * mean_m);
    }
    Ok(RateFit { slopes, intercepts, nodes_used: lm.len(), window_start })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(c: f64) -> Trajectory {
        let times: Vec<f64> = (0..200).map(|k| 3.0 * 1.1_f64.powi(k)).collect();
        let xs = times.iter().map(|t| vec![(t + 1.0).ln().powf(-c), 2.0]).collect();
        Trajectory::from_nodes(times.clone(), xs, vec![vec![0.0, 0.0]; times.len()]).unwrap()
    }

    #[test]
    fn exact_power_law() {
        let fit = fit_rate(&synthetic(1.5), &MuFunction::Log, 0.5).unwrap();
        assert!((fit.slopes[0] + 1.5).abs() < 1e-10);
        assert!(fit.slopes[1].abs() < 1e-12);
        assert!((fit.intercepts[1] - 2.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn too_few_nodes() {
        let tr = Trajectory::from_nodes(vec![1.0, 2.0], vec![vec![1.0]; 2], vec![vec![0.0]; 2]).unwrap();
        assert!(matches!(fit_rate(&tr, &MuFunction::Log, 0.5), Err(Error::TooFewNodes { .. })));
    }

    #[test]
    fn excludes_floored_nodes() {
        let times: Vec<f64> = (1..=30).map(f64::from).collect();
        let xs = times.iter().map(|t| vec![if *t > 25.0 { 0.0 } else { 1.0 }]).collect();
        let tr = Trajectory::from_nodes(times, xs, vec![vec![0.0]; 30]).unwrap();
        assert!(fit_rate(&tr, &MuFunction::Log, 1.0).unwrap().nodes_used < 30);
    }
}
