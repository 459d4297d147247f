//! Stability margins, verdicts, the Log / Log-Log presets and the ξ search.

use serde::Serialize;

use super::delay::DelayFunction;
use super::limits::{compute_limits, LimitPair};
use super::mu::MuFunction;
use crate::error::{Error, Result};
use crate::model::{DilationMap, PolyMap, StructureReport, Verdict};
use crate::transform::TransformedSystem;

/// Margins must be below `-MARGIN_EPS` to certify.
pub const MARGIN_EPS: f64 = 1e-12;

/// `margin_j = (r*/r_j) [fbar_j(ξ)/ξ_j + L^((p+1)/r*) gbar_j(ξ)/ξ_j] + D`.
///
/// With `r* = 1` this is the delay-margin condition in its original form.
/// Non-finite limits give `+inf` margins.
#[allow(clippy::too_many_arguments)]
pub fn criterion_margins(
    fbar: &PolyMap,
    gbar: &PolyMap,
    xi: &[f64],
    r: &DilationMap,
    r_star: f64,
    p: f64,
    l: f64,
    d: f64,
) -> Result<Vec<f64>> {
    let n = r.dim();
    for dim in [fbar.dim(), gbar.dim(), xi.len()] {
        if dim != n {
            return Err(Error::DimensionMismatch { expected: n, got: dim });
        }
    }
    if xi.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::OutsideDomain("open positive orthant (xi)"));
    }
    if !(l.is_finite() && d.is_finite()) {
        return Ok(vec![f64::INFINITY; n]);
    }
    let weight = l.powf((p + 1.0) / r_star);
    Ok((0..n)
        .map(|j| {
            let fj = fbar.eval_component(j, xi) / xi[j];
            let gj = gbar.eval_component(j, xi) / xi[j];
            r_star / r.weights()[j] * (fj + weight * gj) + d
        })
        .collect())
}

fn all_negative(margins: &[f64]) -> bool {
    margins.iter().all(|m| *m < -MARGIN_EPS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CriterionVerdict {
    StableCertified,
    Inconclusive,
}

/// Reasons a verdict is qualified or withheld.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "flag", rename_all = "snake_case")]
pub enum HypothesisFlag {
    StructureNotChecked,
    CooperativeNotCertified,
    NondecreasingNotCertified,
    NoCommonDegree,
    /// Ω-condition of `g_i` not certified; the monotonicity of `gbar_i` is not guaranteed.
    OmegaCondition { component: usize, refuted: bool },
    /// `gbar_i` carries a negative exponent in `z_i`.
    GbarNegativeExponent { component: usize },
    LimitsNotConverged,
    MuNotUnbounded,
}

impl HypothesisFlag {
    /// Flags that withhold certification (as opposed to annotating it).
    pub fn is_blocking(&self) -> bool {
        !matches!(self, HypothesisFlag::OmegaCondition { .. } | HypothesisFlag::GbarNegativeExponent { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateStatement {
    pub mu: String,
    /// `z_j = O(mu^z_exponent)`.
    pub z_exponent: f64,
    /// `x_j = O(mu^x_exponents[j])`.
    pub x_exponents: Vec<f64>,
    /// Exponents under the stronger reading `z_j = O(mu^-1)`; reported, not certified.
    pub strong_x_exponents: Vec<f64>,
    pub text: String,
}

impl RateStatement {
    pub fn new(mu: &MuFunction, r: &DilationMap, r_star: f64) -> Self {
        let w = r.weights();
        let x_exponents: Vec<f64> = w.iter().map(|rj| -rj / r_star).collect();
        let label = mu.label();
        let text = format!(
            "z_j = O(({label})^(-1/{r_star})); x_j = O(({label})^(-r_j/{r_star})), r = {w:?}"
        );
        Self {
            mu: label,
            z_exponent: -1.0 / r_star,
            x_exponents,
            strong_x_exponents: w.iter().map(|rj| -rj).collect(),
            text,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub xi: Vec<f64>,
    pub r_star: f64,
    pub p: f64,
    #[serde(serialize_with = "crate::ext_float::serialize_vec")]
    pub margins: Vec<f64>,
    #[serde(flatten)]
    pub limits: LimitPair,
    pub verdict: CriterionVerdict,
    pub rate: RateStatement,
    pub hypothesis_flags: Vec<HypothesisFlag>,
}

/// Settings for [`evaluate_criterion`].
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionInput<'a> {
    pub mu: &'a MuFunction,
    pub delay: &'a DelayFunction,
    pub xi: Option<Vec<f64>>,
    pub r_star: Option<f64>,
}

/// Full evaluation: limits, margins, verdict and flags.
pub fn evaluate_criterion(
    system: &TransformedSystem,
    structure: Option<&StructureReport>,
    input: &CriterionInput<'_>,
) -> Result<CriterionReport> {
    let n = system.r.dim();
    let p = system
        .p
        .ok_or_else(|| Error::Precondition("no common homogeneity degree for f and g".into()))?;
    let r_star = input.r_star.unwrap_or_else(|| system.r.max_weight());
    let xi = input.xi.clone().unwrap_or_else(|| vec![1.0; n]);
    let limits = compute_limits(input.mu, input.delay, p, r_star)?;
    let margins = criterion_margins(&system.fbar, &system.gbar, &xi, &system.r, r_star, p, limits.l, limits.d)?;

    let mut flags = Vec::new();
    match structure {
        None => flags.push(HypothesisFlag::StructureNotChecked),
        Some(s) => {
            if !s.cooperative.is_certified() {
                flags.push(HypothesisFlag::CooperativeNotCertified);
            }
            if !s.nondecreasing.is_certified() {
                flags.push(HypothesisFlag::NondecreasingNotCertified);
            }
            if s.degree.is_none() {
                flags.push(HypothesisFlag::NoCommonDegree);
            }
            for (component, v) in s.omega_condition.iter().enumerate() {
                if !v.is_certified() && !system.gbar.component(component).is_empty() {
                    flags.push(HypothesisFlag::OmegaCondition {
                        component,
                        refuted: matches!(v, Verdict::Refuted { .. }),
                    });
                }
            }
        }
    }
    flags.extend(system.gbar_flags.iter().map(|&component| HypothesisFlag::GbarNegativeExponent { component }));
    if !limits.converged {
        flags.push(HypothesisFlag::LimitsNotConverged);
    }
    if !input.mu.is_unbounded() {
        flags.push(HypothesisFlag::MuNotUnbounded);
    }
    let certified = all_negative(&margins) && !flags.iter().any(HypothesisFlag::is_blocking);
    Ok(CriterionReport {
        rate: RateStatement::new(input.mu, &system.r, r_star),
        xi,
        r_star,
        p,
        margins,
        limits,
        verdict: if certified { CriterionVerdict::StableCertified } else { CriterionVerdict::Inconclusive },
        hypothesis_flags: flags,
    })
}

/// Outcome of the degree-zero presets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PresetReport {
    pub certified: bool,
    /// `fbar_j(ξ) + gbar_j(ξ)` per component.
    pub condition_values: Vec<f64>,
    pub margins: Vec<f64>,
    /// `None` when the caller did not declare a delay.
    pub delay_admissible: Option<bool>,
    pub rate: String,
}

fn preset(
    system: &TransformedSystem,
    xi: &[f64],
    delay_admissible: Option<bool>,
    rate: String,
) -> Result<PresetReport> {
    match system.p {
        Some(0.0) => {}
        other => return Err(Error::Precondition(format!("preset requires degree p = 0, got {other:?}"))),
    }
    let margins = criterion_margins(&system.fbar, &system.gbar, xi, &system.r, 1.0, 0.0, 1.0, 0.0)?;
    let condition_values = (0..xi.len())
        .map(|j| system.fbar.eval_component(j, xi) + system.gbar.eval_component(j, xi))
        .collect();
    Ok(PresetReport {
        certified: all_negative(&margins) && delay_admissible != Some(false),
        condition_values,
        margins,
        delay_admissible,
        rate,
    })
}

/// Log-stability: `mu = ln(t+1)`, `r* = 1`, `L = 1`, `D = 0`; admissible
/// delays satisfy `tau(t) <= t - t/ln t` eventually.
pub fn preset_log_stability(
    system: &TransformedSystem,
    xi: &[f64],
    delay: Option<&DelayFunction>,
) -> Result<PresetReport> {
    let admissible = delay.map(|d| match d {
        DelayFunction::PowerLag { .. } => false,
        DelayFunction::Tabulated(_) => {
            let t = d.validity().1;
            d.delayed_time_unchecked(t) >= t / t.ln()
        }
        _ => true,
    });
    preset(system, xi, admissible, "z_j = O(1/ln(t+1))".into())
}

/// Log-Log stability for `tau(t) <= t - t^alpha`, `alpha in (0, 1)`.
pub fn preset_loglog_stability(
    system: &TransformedSystem,
    xi: &[f64],
    alpha: f64,
    delay: Option<&DelayFunction>,
) -> Result<PresetReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter { name: "alpha", reason: format!("must lie in (0, 1), got {alpha}") });
    }
    let admissible = delay.map(|d| match d {
        DelayFunction::PowerLag { alpha: a } => *a >= alpha,
        DelayFunction::Tabulated(_) => {
            let t = d.validity().1;
            d.delayed_time_unchecked(t) >= t.powf(alpha)
        }
        _ => true,
    });
    preset(system, xi, admissible, "z_j = O(1/ln ln(t+3))".into())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XiSearch {
    pub found: bool,
    pub xi: Vec<f64>,
    pub max_margin: f64,
}

const XI_FACTORS: [f64; 4] = [0.5, 0.8, 1.25, 2.0];
const XI_SWEEPS: usize = 16;

/// Multiplicative coordinate descent on `max_j margin_j` starting at ξ = 1.
pub fn search_xi(
    fbar: &PolyMap,
    gbar: &PolyMap,
    r: &DilationMap,
    r_star: f64,
    p: f64,
    limits: &LimitPair,
) -> Result<XiSearch> {
    let objective = |xi: &[f64]| -> Result<f64> {
        let m = criterion_margins(fbar, gbar, xi, r, r_star, p, limits.l, limits.d)?;
        Ok(m.into_iter().fold(f64::NEG_INFINITY, f64::max))
    };
    let mut xi = vec![1.0; r.dim()];
    let mut best = objective(&xi)?;
    if best < -MARGIN_EPS {
        return Ok(XiSearch { found: true, xi, max_margin: best });
    }
    for _ in 0..XI_SWEEPS {
        for j in 0..xi.len() {
            let mut step = None;
            for factor in XI_FACTORS {
                let mut cand = xi.clone();
                cand[j] *= factor;
                let v = objective(&cand)?;
                if v < best {
                    best = v;
                    step = Some(cand);
                }
            }
            if let Some(cand) = step {
                xi = cand;
                if best < -MARGIN_EPS {
                    return Ok(XiSearch { found: true, xi, max_margin: best });
                }
            }
        }
    }
    Ok(XiSearch { found: false, xi, max_margin: best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{example, Monomial};

    fn example_system() -> TransformedSystem {
        TransformedSystem::new(&example::f(), &example::g(), &example::r(), Some(2.0)).unwrap()
    }

    fn linear(c: f64) -> PolyMap {
        PolyMap::new(vec![vec![Monomial::new(c, vec![1.0])]]).unwrap()
    }

    fn scalar_system(f: f64, g: f64) -> TransformedSystem {
        TransformedSystem::from_parts(linear(f), linear(g), DilationMap::standard(1), Some(0.0)).unwrap()
    }

    #[test]
    fn example_margins() {
        let s = example_system();
        let m = criterion_margins(&s.fbar, &s.gbar, &[1.0, 1.0], &s.r, 2.0, 2.0, 1.0, 0.0).unwrap();
        assert!((m[0] + 4.0).abs() < 1e-12 && (m[1] + 1.0).abs() < 1e-12, "{m:?}");
        let m1 = criterion_margins(&s.fbar, &s.gbar, &[1.0, 1.0], &s.r, 1.0, 2.0, 1.0, 0.0).unwrap();
        assert!((m1[0] + 2.0).abs() < 1e-12 && (m1[1] + 0.5).abs() < 1e-12, "{m1:?}");
    }

    #[test]
    fn zero_maps_give_zero_margins() {
        let z = PolyMap::zero(2);
        let m = criterion_margins(&z, &z, &[1.0, 3.0], &example::r(), 2.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(m, vec![0.0, 0.0]);
        assert!(!all_negative(&m));
    }

    #[test]
    fn infinite_limits_give_infinite_margins() {
        let s = example_system();
        let m = criterion_margins(&s.fbar, &s.gbar, &[1.0, 1.0], &s.r, 2.0, 2.0, f64::INFINITY, 0.0).unwrap();
        assert!(m.iter().all(|v| *v == f64::INFINITY));
        assert!(criterion_margins(&s.fbar, &s.gbar, &[0.0, 1.0], &s.r, 2.0, 2.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn example_report() {
        let s = example_system();
        let structure = crate::model::analyze_structure(
            &example::f(),
            &example::g(),
            &example::r(),
            &crate::sampling::Sampling::default(),
        )
        .unwrap();
        let input = CriterionInput { mu: &MuFunction::Log, delay: &DelayFunction::LogFraction, xi: None, r_star: None };
        let rep = evaluate_criterion(&s, Some(&structure), &input).unwrap();
        assert_eq!(rep.r_star, 2.0);
        assert_eq!(rep.verdict, CriterionVerdict::StableCertified);
        assert!(rep.hypothesis_flags.contains(&HypothesisFlag::OmegaCondition { component: 1, refuted: true }));
        assert!(rep.hypothesis_flags.contains(&HypothesisFlag::GbarNegativeExponent { component: 1 }));
        assert_eq!(rep.rate.x_exponents, vec![-0.5, -1.0]);
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["L"], 1.0);
        assert_eq!(json["verdict"], "STABLE_CERTIFIED");
    }

    #[test]
    fn log_presets() {
        let rep = preset_log_stability(&scalar_system(-2.0, 1.0), &[1.0], Some(&DelayFunction::LogFraction)).unwrap();
        assert!(rep.certified);
        assert_eq!(rep.condition_values, vec![-1.0]);
        let rep = preset_log_stability(&scalar_system(-1.0, 1.0), &[1.0], None).unwrap();
        assert!(!rep.certified);
        assert_eq!(rep.condition_values, vec![0.0]);
        let rep = preset_log_stability(&scalar_system(-1.0, 2.0), &[1.0], None).unwrap();
        assert!(!rep.certified);
        assert_eq!(rep.condition_values, vec![1.0]);
        let rep =
            preset_log_stability(&scalar_system(-2.0, 1.0), &[1.0], Some(&DelayFunction::PowerLag { alpha: 0.5 }))
                .unwrap();
        assert!(!rep.certified);
        assert!(preset_log_stability(&example_system(), &[1.0, 1.0], None).is_err());
    }

    #[test]
    fn loglog_presets() {
        for (f, g, ok, value) in [(-2.0, 1.0, true, -1.0), (-1.0, 1.0, false, 0.0), (-1.0, 2.0, false, 1.0)] {
            let rep = preset_loglog_stability(&scalar_system(f, g), &[1.0], 0.5, None).unwrap();
            assert_eq!(rep.certified, ok);
            assert_eq!(rep.condition_values, vec![value]);
            assert!(rep.rate.contains("ln ln"));
        }
        assert!(preset_loglog_stability(&scalar_system(-2.0, 1.0), &[1.0], 1.0, None).is_err());
        let d = DelayFunction::PowerLag { alpha: 0.3 };
        assert!(!preset_loglog_stability(&scalar_system(-2.0, 1.0), &[1.0], 0.5, Some(&d)).unwrap().certified);
    }

    #[test]
    fn p0_margins_scale_invariant() {
        let s = TransformedSystem::from_parts(
            PolyMap::linear(&[vec![-3.0, 1.0], vec![0.5, -2.0]]).unwrap(),
            PolyMap::linear(&[vec![0.2, 0.3], vec![0.1, 0.4]]).unwrap(),
            DilationMap::standard(2),
            Some(0.0),
        )
        .unwrap();
        let a = preset_log_stability(&s, &[1.0, 2.0], None).unwrap().margins;
        let b = preset_log_stability(&s, &[7.0, 14.0], None).unwrap().margins;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-14 * x.abs().max(1.0));
        }
    }

    #[test]
    fn xi_search() {
        let s = example_system();
        let lp = LimitPair::analytic(1.0, 0.0);
        let found = search_xi(&s.fbar, &s.gbar, &s.r, 2.0, 2.0, &lp).unwrap();
        assert!(found.found);
        assert_eq!(found.xi, vec![1.0, 1.0]);

        let unstable = search_xi(&linear(1.0), &PolyMap::zero(1), &DilationMap::standard(1), 1.0, 0.0, &lp).unwrap();
        assert!(!unstable.found);
        assert!(unstable.max_margin > 0.0);
    }

    #[test]
    fn xi_search_finds_non_unit_weights() {
        // At ξ = 1 row 0 has margin -1 + 1.5 > 0; weighting x1 more fixes it.
        let f = PolyMap::linear(&[vec![-1.0, 1.5], vec![0.1, -3.0]]).unwrap();
        let g = PolyMap::zero(2);
        let lp = LimitPair::analytic(1.0, 0.0);
        let r = DilationMap::standard(2);
        let res = search_xi(&f, &g, &r, 1.0, 0.0, &lp).unwrap();
        assert!(res.found, "{res:?}");
        let m = criterion_margins(&f, &g, &res.xi, &r, 1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(m.iter().all(|v| *v < 0.0));
    }
}
