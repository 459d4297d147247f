//! Stored integration nodes with cubic Hermite dense output.

use std::io::Write;

use serde::Serialize;

use crate::criterion::mu::hermite_basis;
use crate::error::{Error, Result};

/// Counters collected while integrating.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SimStats {
    pub steps: usize,
    /// Delayed lookups that fell past the last completed node.
    pub extrapolated_lookups: usize,
    /// Lookups more than one step past the last completed node.
    pub far_extrapolations: usize,
    /// Steps shortened by the stiffness cap.
    pub stability_limited_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    n: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    derivs: Vec<f64>,
    pub stats: SimStats,
}

impl Trajectory {
    pub(crate) fn with_capacity(n: usize, cap: usize) -> Self {
        Self {
            n,
            times: Vec::with_capacity(cap),
            states: Vec::with_capacity(cap * n),
            derivs: Vec::with_capacity(cap * n),
            stats: SimStats::default(),
        }
    }

    /// Builds a trajectory from explicit nodes (e.g. synthetic test data).
    pub fn from_nodes(times: Vec<f64>, states: Vec<Vec<f64>>, derivs: Vec<Vec<f64>>) -> Result<Self> {
        let n = states.first().map_or(0, Vec::len);
        if times.is_empty() || states.len() != times.len() || derivs.len() != times.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), got: states.len().min(derivs.len()) });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition("node times must be strictly increasing".into()));
        }
        let mut traj = Self::with_capacity(n, times.len());
        for ((t, x), d) in times.into_iter().zip(states).zip(derivs) {
            if x.len() != n || d.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: x.len().min(d.len()) });
            }
            traj.push(t, &x, &d);
        }
        Ok(traj)
    }

    pub(crate) fn push(&mut self, t: f64, x: &[f64], d: &[f64]) {
        self.times.push(t);
        self.states.extend_from_slice(x);
        self.derivs.extend_from_slice(d);
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, k: usize) -> f64 {
        self.times[k]
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.n..(k + 1) * self.n]
    }

    pub fn derivative(&self, k: usize) -> &[f64] {
        &self.derivs[k * self.n..(k + 1) * self.n]
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    /// Index `k` of the interval `[t_k, t_(k+1)]` containing `t`.
    pub(crate) fn bracket(&self, t: f64) -> usize {
        let k = self.times.partition_point(|v| *v <= t);
        k.saturating_sub(1).min(self.len().saturating_sub(2))
    }

    /// Cubic Hermite on interval `k`; `theta` outside [0, 1] extrapolates.
    pub(crate) fn hermite_into(&self, k: usize, t: f64, out: &mut [f64]) {
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let h = t1 - t0;
        let (h00, h10, h01, h11) = hermite_basis((t - t0) / h);
        let (x0, x1) = (self.state(k), self.state(k + 1));
        let (d0, d1) = (self.derivative(k), self.derivative(k + 1));
        for i in 0..self.n {
            out[i] = h00 * x0[i] + h10 * h * d0[i] + h01 * x1[i] + h11 * h * d1[i];
        }
    }

    /// Dense output at any `t` within the node range; exact at nodes.
    pub fn sample(&self, t: f64) -> Result<Vec<f64>> {
        let (lo, hi) = (self.times[0], *self.times.last().unwrap());
        if !(t >= lo && t <= hi) {
            return Err(Error::OutsideValidity { t, lo, hi });
        }
        if self.len() == 1 {
            return Ok(self.state(0).to_vec());
        }
        let mut out = vec![0.0; self.n];
        self.hermite_into(self.bracket(t), t, &mut out);
        Ok(out)
    }

    /// CSV with header `t,x1,...,xn[,V]`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W, v: Option<&[f64]>) -> std::io::Result<()> {
        let mut header = String::from("t");
        for i in 1..=self.n {
            header.push_str(&format!(",x{i}"));
        }
        if v.is_some() {
            header.push_str(",V");
        }
        writeln!(w, "{header}")?;
        for k in 0..self.len() {
            write!(w, "{:.16e}", self.times[k])?;
            for x in self.state(k) {
                write!(w, ",{x:.16e}")?;
            }
            if let Some(v) = v {
                write!(w, ",{:.16e}", v[k])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_traj() -> Trajectory {
        let times = vec![0.0, 1.0, 3.0];
        let states = times.iter().map(|t| vec![2.0 + 0.5 * t]).collect();
        let derivs = vec![vec![0.5]; 3];
        Trajectory::from_nodes(times, states, derivs).unwrap()
    }

    #[test]
    fn exact_at_nodes_and_linear_between() {
        let tr = linear_traj();
        for k in 0..3 {
            assert_eq!(tr.sample(tr.time(k)).unwrap(), tr.state(k));
        }
        for t in [0.25, 1.7, 2.9] {
            assert!((tr.sample(t).unwrap()[0] - (2.0 + 0.5 * t)).abs() < 1e-14);
        }
        assert!(tr.sample(3.5).is_err());
    }

    #[test]
    fn csv_layout() {
        let tr = linear_traj();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf, Some(&[1.0, 2.0, 3.0])).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,x1,V"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row, vec![0.0, 2.0, 1.0]);
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn rejects_unsorted_nodes() {
        assert!(Trajectory::from_nodes(vec![1.0, 1.0], vec![vec![0.0]; 2], vec![vec![0.0]; 2]).is_err());
    }
}
