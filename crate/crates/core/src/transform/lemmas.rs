//! Sampled regression suites for the three properties of the transformed
//! fields: standard-dilation homogeneity, cooperativity in the pinned
//! coordinate, and monotonicity of `gbar` under the Ω-condition.

use rand::Rng;
use serde::Serialize;

use super::transform_field;
use crate::error::{Error, Result};
use crate::model::{
    check_cooperative, check_nondecreasing, check_omega_condition, homogeneity_degree, DilationMap,
    Homogeneity, PolyMap, Verdict,
};
use crate::sampling::{log_uniform, log_uniform_point, Sampling};

/// Relative tolerance of the homogeneity identity.
pub const HOMOGENEITY_TOL: f64 = 1e-9;
/// Tolerance of the monotonicity comparisons, scaled by `1 + sum |terms|`.
pub const MONOTONE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaFailure {
    pub component: usize,
    pub z: Vec<f64>,
    /// Comparison point (`w`) or, for the homogeneity check, `[lambda]`.
    pub other: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LemmaCheck {
    Pass,
    Fail { failure: LemmaFailure },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub lemma: u8,
    pub trials: usize,
    pub check: LemmaCheck,
    /// Verdict of the hypothesis the property relies on.
    pub hypothesis: Verdict,
    /// Components left out because their Ω-condition is not certified.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub excluded: Vec<usize>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        matches!(self.check, LemmaCheck::Pass)
    }
}

/// `fbar_i(lambda z) = lambda^(p+1) fbar_i(z)` at random `z > 0`, `lambda in [0.5, 2]`.
pub fn verify_lemma1(f: &PolyMap, r: &DilationMap, trials: usize, seed: u64) -> Result<LemmaReport> {
    let p = match homogeneity_degree(f, r)? {
        Homogeneity::Degree { p } => p,
        Homogeneity::NotHomogeneous { component, monomial } => {
            return Err(Error::Precondition(format!(
                "field is not homogeneous for the given weights (component {component}, monomial {monomial})"
            )))
        }
    };
    let fbar = transform_field(f, r)?;
    let s = Sampling::lemma(trials, seed);
    let mut rng = s.rng();
    let n = f.dim();
    for _ in 0..trials {
        let z = log_uniform_point(&mut rng, n, s.lo, s.hi);
        let lambda = rng.gen_range(0.5..=2.0);
        if let Some(failure) = homogeneity_failure(&fbar, &z, lambda, p) {
            return Ok(report(1, trials, LemmaCheck::Fail { failure }, Verdict::Certified, vec![]));
        }
    }
    Ok(report(1, trials, LemmaCheck::Pass, Verdict::Certified, vec![]))
}

pub(crate) fn homogeneity_failure(fbar: &PolyMap, z: &[f64], lambda: f64, p: f64) -> Option<LemmaFailure> {
    let scaled: Vec<f64> = z.iter().map(|v| lambda * v).collect();
    let factor = lambda.powf(p + 1.0);
    (0..fbar.dim()).find_map(|i| {
        let lhs = fbar.eval_component(i, &scaled);
        let rhs = factor * fbar.eval_component(i, z);
        ((lhs - rhs).abs() > HOMOGENEITY_TOL * (1.0 + lhs.abs())).then(|| LemmaFailure {
            component: i,
            z: z.to_vec(),
            other: vec![lambda],
            lhs,
            rhs,
        })
    })
}

/// For `w <= z` with `z_i = w_i`: `fbar_i(z) >= fbar_i(w)`.
///
/// The pinned coordinate cycles through `0..n` across trials.
pub fn verify_lemma2(f: &PolyMap, r: &DilationMap, trials: usize, seed: u64) -> Result<LemmaReport> {
    let hypothesis = check_cooperative(f, &Sampling::structural(seed));
    let fbar = transform_field(f, r)?;
    let s = Sampling::lemma(trials, seed);
    let mut rng = s.rng();
    let n = f.dim();
    for k in 0..trials {
        let i = k % n;
        let w = log_uniform_point(&mut rng, n, s.lo, s.hi);
        let z = dominating_point(&mut rng, &w, Some(i));
        if let Some(failure) = monotone_failure(&fbar, &z, &w, i) {
            return Ok(report(2, trials, LemmaCheck::Fail { failure }, hypothesis, vec![]));
        }
    }
    Ok(report(2, trials, LemmaCheck::Pass, hypothesis, vec![]))
}

/// For `w <= z`: `gbar_i(z) >= gbar_i(w)` on every component whose Ω-condition is certified.
pub fn verify_lemma3(g: &PolyMap, r: &DilationMap, trials: usize, seed: u64) -> Result<LemmaReport> {
    let hypothesis = check_nondecreasing(g, &Sampling::structural(seed));
    let gbar = transform_field(g, r)?;
    let n = g.dim();
    let excluded: Vec<usize> = (0..n)
        .filter(|&i| !check_omega_condition(g, i, &Sampling::structural(seed)).is_certified())
        .collect();
    let s = Sampling::lemma(trials, seed);
    let mut rng = s.rng();
    for _ in 0..trials {
        let w = log_uniform_point(&mut rng, n, s.lo, s.hi);
        let z = dominating_point(&mut rng, &w, None);
        for i in (0..n).filter(|i| !excluded.contains(i)) {
            if let Some(failure) = monotone_failure(&gbar, &z, &w, i) {
                return Ok(report(3, trials, LemmaCheck::Fail { failure }, hypothesis, excluded));
            }
        }
    }
    Ok(report(3, trials, LemmaCheck::Pass, hypothesis, excluded))
}

fn report(lemma: u8, trials: usize, check: LemmaCheck, hypothesis: Verdict, excluded: Vec<usize>) -> LemmaReport {
    LemmaReport { lemma, trials, check, hypothesis, excluded }
}

/// A point `z >= w`; a quarter of the free coordinates stay equal to `w`.
fn dominating_point<R: Rng>(rng: &mut R, w: &[f64], pinned: Option<usize>) -> Vec<f64> {
    w.iter()
        .enumerate()
        .map(|(j, &wj)| {
            if Some(j) == pinned || rng.gen_bool(0.25) {
                wj
            } else {
                wj * log_uniform(rng, 1.0, 10.0)
            }
        })
        .collect()
}

pub(crate) fn monotone_failure(map: &PolyMap, z: &[f64], w: &[f64], i: usize) -> Option<LemmaFailure> {
    let lhs = map.eval_component(i, z);
    let rhs = map.eval_component(i, w);
    let scale = map.term_scale(i, z).max(map.term_scale(i, w));
    (lhs < rhs - MONOTONE_TOL * (1.0 + scale)).then(|| LemmaFailure {
        component: i,
        z: z.to_vec(),
        other: w.to_vec(),
        lhs,
        rhs,
    })
}
