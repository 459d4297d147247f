//! Cooperative / nondecreasing / homogeneity / Ω-condition checks.
//!
//! Symbolic rules are sufficient conditions only. When they do not apply the
//! checks fall back to seeded sampling, which can refute (with a witness that
//! re-evaluates to a violation) but never certifies.

use serde::Serialize;

use super::poly::{DilationMap, PolyMap};
use crate::error::{Error, Result};
use crate::sampling::{log_uniform, log_uniform_point, Sampling};

/// Off-diagonal Jacobian entries below `-TOL_COOP` refute a sampled check.
pub const TOL_COOP: f64 = 1e-9;
/// Absolute tolerance on weighted exponent sums.
pub const TOL_HOM: f64 = 1e-9;

/// Concrete evidence for a refutation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub point: Vec<f64>,
    /// Jacobian entry `(row, col)`, zero-based, when the violation is a partial derivative.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry: Option<(usize, usize)>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Refuted { witness: Witness },
    Undecided,
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified)
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Homogeneity {
    Degree { p: f64 },
    NotHomogeneous { component: usize, monomial: usize },
}

impl Homogeneity {
    pub fn degree(&self) -> Option<f64> {
        match self {
            Homogeneity::Degree { p } => Some(*p),
            Homogeneity::NotHomogeneous { .. } => None,
        }
    }
}

/// Outcome of all structural checks on a pair `(f, g)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub cooperative: Verdict,
    pub nondecreasing: Verdict,
    pub f_homogeneity: Homogeneity,
    /// `None` when `g` is the zero map.
    pub g_homogeneity: Option<Homogeneity>,
    /// Common degree of `f` and `g`, when both are homogeneous with the same degree.
    pub degree: Option<f64>,
    /// Ω-condition of `g`, one verdict per component.
    pub omega_condition: Vec<Verdict>,
    pub boundary_note: &'static str,
}

impl StructureReport {
    /// Cooperative `f`, nondecreasing `g`, and a shared degree.
    pub fn assumptions_certified(&self) -> bool {
        self.cooperative.is_certified() && self.nondecreasing.is_certified() && self.degree.is_some()
    }
}

const BOUNDARY_NOTE: &str =
    "Jacobian conditions are certified on the open positive orthant; partials with fractional exponents may be singular on the boundary";

/// Runs every structural check.
pub fn analyze_structure(
    f: &PolyMap,
    g: &PolyMap,
    r: &DilationMap,
    sampling: &Sampling,
) -> Result<StructureReport> {
    let n = f.dim();
    for d in [g.dim(), r.dim()] {
        if d != n {
            return Err(Error::DimensionMismatch { expected: n, got: d });
        }
    }
    let f_homogeneity = homogeneity_degree(f, r)?;
    let g_homogeneity = if g.is_zero() { None } else { Some(homogeneity_degree(g, r)?) };
    let degree = match (&f_homogeneity, &g_homogeneity) {
        (Homogeneity::Degree { p }, None) => Some(*p),
        (Homogeneity::Degree { p }, Some(Homogeneity::Degree { p: q })) if (p - q).abs() <= TOL_HOM => {
            Some(*p)
        }
        _ => None,
    };
    let omega_condition = (0..n)
        .map(|i| check_omega_condition(g, i, &Sampling { seed: sampling.seed.wrapping_add(i as u64 + 1), ..*sampling }))
        .collect();
    Ok(StructureReport {
        cooperative: check_cooperative(f, sampling),
        nondecreasing: check_nondecreasing(g, sampling),
        f_homogeneity,
        g_homogeneity,
        degree,
        omega_condition,
        boundary_note: BOUNDARY_NOTE,
    })
}

/// Is the Jacobian of `f` Metzler on the positive orthant?
pub fn check_cooperative(f: &PolyMap, sampling: &Sampling) -> Verdict {
    let n = f.dim();
    let symbolic = (0..n).all(|i| {
        f.component(i).iter().all(|m| {
            m.coeff >= 0.0 || m.exponents.iter().enumerate().all(|(j, a)| j == i || *a == 0.0)
        })
    });
    if symbolic {
        return Verdict::Certified;
    }
    sampled_jacobian_search(f, sampling, |i, j| i != j)
}

/// Is `g` order preserving on the nonnegative orthant?
pub fn check_nondecreasing(g: &PolyMap, sampling: &Sampling) -> Verdict {
    if g.components().iter().flatten().all(|m| m.coeff >= 0.0) {
        return Verdict::Certified;
    }
    sampled_jacobian_search(g, sampling, |_, _| true)
}

fn sampled_jacobian_search(
    f: &PolyMap,
    sampling: &Sampling,
    entry_filter: impl Fn(usize, usize) -> bool,
) -> Verdict {
    let n = f.dim();
    let mut rng = sampling.rng();
    for _ in 0..sampling.points {
        let x = log_uniform_point(&mut rng, n, sampling.lo, sampling.hi);
        let jac = f.jacobian_unchecked(&x);
        for (i, row) in jac.iter().enumerate() {
            for (j, &value) in row.iter().enumerate() {
                if entry_filter(i, j) && value < -TOL_COOP {
                    return Verdict::Refuted { witness: Witness { point: x, entry: Some((i, j)), value } };
                }
            }
        }
    }
    Verdict::Undecided
}

/// Degree `p` such that `f(delta_lambda^r(x)) = lambda^p delta_lambda^r(f(x))`.
///
/// Requires every monomial of component `i` to satisfy
/// `sum_j a_j r_j = p + r_i` with one shared `p >= 0`.
pub fn homogeneity_degree(f: &PolyMap, r: &DilationMap) -> Result<Homogeneity> {
    if r.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: r.dim() });
    }
    if f.is_zero() {
        return Err(Error::ZeroMap);
    }
    let w = r.weights();
    let mut degree: Option<f64> = None;
    for (i, comp) in f.components().iter().enumerate() {
        for (k, m) in comp.iter().enumerate() {
            let p = m.weighted_degree(w) - w[i];
            match degree {
                None if p < -TOL_HOM => {
                    return Ok(Homogeneity::NotHomogeneous { component: i, monomial: k })
                }
                None => degree = Some(p.max(0.0)),
                Some(p0) if (p - p0).abs() > TOL_HOM => {
                    return Ok(Homogeneity::NotHomogeneous { component: i, monomial: k })
                }
                Some(_) => {}
            }
        }
    }
    Ok(Homogeneity::Degree { p: degree.expect("nonzero map has a monomial") })
}

/// Does `g_i(x) >= d(x_{-i}) x_i` hold for some positive `d`?
///
/// Certified when all coefficients are nonnegative and some monomial is
/// linear in `x_i`. Refuted when a sweep of `x_i` toward 0 or infinity drives
/// `g_i(x) / x_i` to zero, or when `g_i` is negative somewhere.
pub fn check_omega_condition(g: &PolyMap, i: usize, sampling: &Sampling) -> Verdict {
    let comp = g.component(i);
    let n = g.dim();
    let all_nonneg = comp.iter().all(|m| m.coeff >= 0.0);
    let has_linear = comp
        .iter()
        .any(|m| m.coeff > 0.0 && (m.exponents[i] - 1.0).abs() <= TOL_HOM);
    if all_nonneg && has_linear {
        return Verdict::Certified;
    }

    let mut rng = sampling.rng();
    let bases = sampling.points.clamp(1, 20);
    for _ in 0..bases {
        let base: Vec<f64> = (0..n).map(|_| log_uniform(&mut rng, sampling.lo, sampling.hi)).collect();
        let ratio = |xi: f64| {
            let mut x = base.clone();
            x[i] = xi;
            (g.eval_component(i, &x) / xi, x)
        };
        for direction in [-1.0_f64, 1.0] {
            let sweep: Vec<(f64, Vec<f64>)> =
                (0..=12).map(|k| ratio(10f64.powf(direction * k as f64))).collect();
            if let Some((v, x)) = sweep.iter().find(|(v, _)| *v < 0.0) {
                return Verdict::Refuted { witness: Witness { point: x.clone(), entry: None, value: *v } };
            }
            let first = sweep[0].0;
            let (last, last_x) = sweep.last().cloned().unwrap();
            let nonincreasing = sweep.windows(2).all(|w| w[1].0 <= w[0].0 * (1.0 + 1e-12));
            if nonincreasing && (first == 0.0 || last <= 1e-6 * first) {
                return Verdict::Refuted { witness: Witness { point: last_x, entry: None, value: last } };
            }
        }
    }
    Verdict::Undecided
}
