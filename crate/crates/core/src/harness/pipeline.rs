//! Stage orchestration: check → transform → criterion → simulate → fit.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::document::SystemDocument;
use crate::criterion::{evaluate_criterion, CriterionInput, CriterionReport, CriterionVerdict, RateStatement};
use crate::dde::{fit_rate, lyapunov_monitor, simulate, BurnIn, MonitorReport, RateFit, SimStats, Trajectory};
use crate::error::{Error, Result};
use crate::model::{analyze_structure, homogeneity_degree, Homogeneity, PolyMap, StructureReport};
use crate::sampling::{Sampling, DEFAULT_SEED};
use crate::transform::{verify_lemma1, verify_lemma2, verify_lemma3, LemmaReport, TransformedSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Check,
    Transform,
    Criterion,
    Simulate,
    Fit,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Check, Stage::Transform, Stage::Criterion, Stage::Simulate, Stage::Fit];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Check => "check",
            Stage::Transform => "transform",
            Stage::Criterion => "criterion",
            Stage::Simulate => "simulate",
            Stage::Fit => "fit",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidParameter { name: "stage", reason: format!("unknown stage `{s}`") })
    }
}

/// Parses stage words (each may be a comma list; `all` selects every stage)
/// into a sorted, deduplicated list.
pub fn parse_stages<S: AsRef<str>>(words: &[S]) -> Result<Vec<Stage>> {
    let mut out = Vec::new();
    for word in words {
        for part in word.as_ref().split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                out.extend(Stage::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter { name: "stage", reason: "no stages selected".into() });
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOptions {
    pub seed: u64,
    pub lemma_trials: usize,
    /// Trailing fraction of the node range in `ln t` used by the rate fit.
    pub fit_window: f64,
    /// Slack on the fitted slope bounds `s_j <= -r_j/r* + slack`.
    pub slope_slack: f64,
    /// Growth ratio above which the simulate stage fails.
    pub growth_tolerance: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, lemma_trials: 200, fit_window: 0.5, slope_slack: 0.1, growth_tolerance: 1.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformSummary {
    pub fbar: PolyMap,
    pub gbar: PolyMap,
    pub p: Option<f64>,
    pub fbar_flags: Vec<usize>,
    pub gbar_flags: Vec<usize>,
    pub lemmas: Vec<LemmaReport>,
    /// Lemma suites that could not run, with the reason.
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub t_start: f64,
    pub t_end: f64,
    pub nodes: usize,
    pub stats: SimStats,
    pub final_state: Vec<f64>,
    #[serde(serialize_with = "crate::ext_float::serialize_opt")]
    pub v_growth_ratio: Option<f64>,
    pub monitor: MonitorReport,
    pub slopes: Option<Vec<f64>>,
    pub fit: Option<RateFit>,
    /// Slope bounds `-r_j/r* + slack` used by the fit verdict.
    pub slope_bounds: Vec<f64>,
    /// Exponents under the stronger reading `x_j = O(mu^-r_j)`; informational.
    pub strong_slopes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageOutcome {
    pub stage: Stage,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    /// SHA-256 of the resolved document's JSON.
    pub config_hash: String,
    pub seed: u64,
    pub stages: Vec<Stage>,
    pub options: RunOptions,
    pub input: SystemDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub structure: Option<StructureReport>,
    pub transform: Option<TransformSummary>,
    pub criterion: Option<CriterionReport>,
    pub simulation: Option<SimulationSummary>,
    pub stages: Vec<StageOutcome>,
    pub exit_code: i32,
    pub provenance: Provenance,
}

/// Exit code when every requested stage passes.
pub const EXIT_PASS: i32 = 0;
/// Exit code for an inconclusive or refuted verdict.
pub const EXIT_VERDICT: i32 = 1;
/// Exit code for input, dependency and I/O errors.
pub const EXIT_INPUT: i32 = 2;

/// Report plus the bulk data that goes to CSV rather than JSON.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub trajectory: Option<Trajectory>,
}

pub fn config_hash(doc: &SystemDocument) -> String {
    let bytes = serde_json::to_vec(doc).expect("documents serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn check_dependencies(stages: &[Stage]) -> Result<()> {
    let has = |s| stages.contains(&s);
    if has(Stage::Criterion) && !has(Stage::Transform) {
        return Err(Error::StageDependency { stage: "criterion", requires: "transform" });
    }
    if has(Stage::Fit) && !has(Stage::Simulate) {
        return Err(Error::StageDependency { stage: "fit", requires: "simulate" });
    }
    Ok(())
}

fn common_degree(doc: &SystemDocument) -> Result<Option<f64>> {
    let f = homogeneity_degree(&doc.f, &doc.r)?;
    let g = if doc.g.is_zero() { None } else { Some(homogeneity_degree(&doc.g, &doc.r)?) };
    Ok(match (f, g) {
        (Homogeneity::Degree { p }, None) => Some(p),
        (Homogeneity::Degree { p }, Some(Homogeneity::Degree { p: q })) if (p - q).abs() <= 1e-9 => Some(p),
        _ => None,
    })
}

/// Runs the requested stages in order and assembles the report.
///
/// Errors are input problems (exit 2); verdicts that are not certified are
/// recorded in the report and give exit code 1.
pub fn run_pipeline(doc: &SystemDocument, stages: &[Stage], opts: &RunOptions) -> Result<RunOutput> {
    doc.validate()?;
    let mut stages = stages.to_vec();
    stages.sort();
    stages.dedup();
    check_dependencies(&stages)?;
    let has = |s| stages.contains(&s);
    let mut outcomes = Vec::new();

    let need_structure = has(Stage::Check) || has(Stage::Transform);
    let structure = if need_structure {
        Some(analyze_structure(&doc.f, &doc.g, &doc.r, &Sampling::structural(opts.seed))?)
    } else {
        None
    };
    if has(Stage::Check) {
        let s = structure.as_ref().expect("computed above");
        outcomes.push(StageOutcome {
            stage: Stage::Check,
            passed: s.assumptions_certified(),
            detail: format!(
                "cooperative: {}, nondecreasing: {}, degree: {:?}",
                verdict_word(&s.cooperative),
                verdict_word(&s.nondecreasing),
                s.degree
            ),
        });
    }

    let mut system = None;
    let mut transform = None;
    if has(Stage::Transform) {
        let p = structure.as_ref().and_then(|s| s.degree);
        let sys = TransformedSystem::new(&doc.f, &doc.g, &doc.r, p)?;
        let (lemmas, skipped) = run_lemmas(doc, opts);
        let passed = skipped.is_empty() && lemmas.iter().all(LemmaReport::passed);
        outcomes.push(StageOutcome {
            stage: Stage::Transform,
            passed,
            detail: format!(
                "{} lemma suites passed, {} skipped; gbar flags {:?}",
                lemmas.iter().filter(|l| l.passed()).count(),
                skipped.len(),
                sys.gbar_flags
            ),
        });
        transform = Some(TransformSummary {
            fbar: sys.fbar.clone(),
            gbar: sys.gbar.clone(),
            p: sys.p,
            fbar_flags: sys.fbar_flags.clone(),
            gbar_flags: sys.gbar_flags.clone(),
            lemmas,
            skipped,
        });
        system = Some(sys);
    }

    let mut criterion = None;
    if has(Stage::Criterion) {
        let sys = system.as_ref().expect("dependency checked");
        let input = CriterionInput { mu: &doc.mu, delay: &doc.delay, xi: Some(doc.xi.clone()), r_star: Some(doc.r_star) };
        let (passed, detail, report) = match evaluate_criterion(sys, structure.as_ref(), &input) {
            Ok(rep) => {
                let passed = rep.verdict == CriterionVerdict::StableCertified;
                let detail = format!("{:?}; margins {:?}", rep.verdict, rep.margins);
                (passed, detail, Some(rep))
            }
            Err(e @ Error::Precondition(_)) => (false, e.to_string(), None),
            Err(e) => return Err(e),
        };
        outcomes.push(StageOutcome { stage: Stage::Criterion, passed, detail });
        criterion = report;
    }

    let mut simulation = None;
    let mut trajectory = None;
    if has(Stage::Simulate) {
        let cfg = doc
            .sim
            .as_ref()
            .ok_or_else(|| Error::Document("the simulate stage needs a `sim` section".into()))?;
        let history = doc.history_spec()?;
        match simulate(&doc.f, &doc.g, &doc.delay, &history, cfg) {
            Ok(traj) => {
                let p = match &system {
                    Some(s) => s.p,
                    None => common_degree(doc)?,
                };
                let burn_sys = match (&system, p) {
                    (Some(s), Some(_)) => Some(s.clone()),
                    (None, Some(p)) => Some(TransformedSystem::new(&doc.f, &doc.g, &doc.r, Some(p))?),
                    _ => None,
                };
                let burn_in = match &burn_sys {
                    Some(sys) => BurnIn::Criterion { system: sys, delay: &doc.delay },
                    None => BurnIn::FirstNode,
                };
                let monitor = lyapunov_monitor(&traj, &doc.mu, &doc.xi, &doc.r, doc.r_star, burn_in);
                let growth = monitor.growth_ratio;
                let passed = growth.is_some_and(|g| g <= opts.growth_tolerance);
                outcomes.push(StageOutcome {
                    stage: Stage::Simulate,
                    passed,
                    detail: format!(
                        "{} nodes; burn-in {:?}; growth ratio {:?}",
                        traj.len(),
                        monitor.burn_in_time,
                        growth
                    ),
                });
                let rate = RateStatement::new(&doc.mu, &doc.r, doc.r_star);
                simulation = Some(SimulationSummary {
                    t_start: cfg.t_start,
                    t_end: cfg.t_end,
                    nodes: traj.len(),
                    stats: traj.stats.clone(),
                    final_state: traj.final_state().to_vec(),
                    v_growth_ratio: growth,
                    monitor,
                    slopes: None,
                    fit: None,
                    slope_bounds: rate.x_exponents.iter().map(|e| e + opts.slope_slack).collect(),
                    strong_slopes: rate.strong_x_exponents,
                });
                trajectory = Some(traj);
            }
            Err(e @ (Error::StepUnderflow { .. } | Error::NonFinite { .. })) => {
                outcomes.push(StageOutcome { stage: Stage::Simulate, passed: false, detail: e.to_string() });
            }
            Err(e) => return Err(e),
        }
    }

    if has(Stage::Fit) {
        let outcome = match (&trajectory, simulation.as_mut()) {
            (Some(traj), Some(sim)) => match fit_rate(traj, &doc.mu, opts.fit_window) {
                Ok(fit) => {
                    let passed = fit.slopes.iter().zip(&sim.slope_bounds).all(|(s, b)| s <= b);
                    let detail = format!("slopes {:?} vs bounds {:?}", fit.slopes, sim.slope_bounds);
                    sim.slopes = Some(fit.slopes.clone());
                    sim.fit = Some(fit);
                    StageOutcome { stage: Stage::Fit, passed, detail }
                }
                Err(e) => StageOutcome { stage: Stage::Fit, passed: false, detail: e.to_string() },
            },
            _ => StageOutcome { stage: Stage::Fit, passed: false, detail: "no trajectory".into() },
        };
        outcomes.push(outcome);
    }

    let exit_code = if outcomes.iter().all(|o| o.passed) { EXIT_PASS } else { EXIT_VERDICT };
    let report = RunReport {
        structure,
        transform,
        criterion,
        simulation,
        stages: outcomes,
        exit_code,
        provenance: Provenance {
            tool: "mustab",
            version: env!("CARGO_PKG_VERSION"),
            config_hash: config_hash(doc),
            seed: opts.seed,
            stages,
            options: opts.clone(),
            input: doc.clone(),
        },
    };
    Ok(RunOutput { report, trajectory })
}

fn verdict_word(v: &crate::model::Verdict) -> &'static str {
    match v {
        crate::model::Verdict::Certified => "certified",
        crate::model::Verdict::Refuted { .. } => "refuted",
        crate::model::Verdict::Undecided => "undecided",
    }
}

fn run_lemmas(doc: &SystemDocument, opts: &RunOptions) -> (Vec<LemmaReport>, Vec<String>) {
    let (trials, seed) = (opts.lemma_trials, opts.seed);
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    let mut take = |name: &str, r: Result<LemmaReport>| match r {
        Ok(rep) => reports.push(rep),
        Err(e) => skipped.push(format!("{name}: {e}")),
    };
    take("lemma1(f)", verify_lemma1(&doc.f, &doc.r, trials, seed));
    if !doc.g.is_zero() {
        take("lemma1(g)", verify_lemma1(&doc.g, &doc.r, trials, seed));
    }
    take("lemma2(f)", verify_lemma2(&doc.f, &doc.r, trials, seed));
    take("lemma3(g)", verify_lemma3(&doc.g, &doc.r, trials, seed));
    (reports, skipped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::document::{parse_system, WORKED_EXAMPLE};

    fn short_doc() -> SystemDocument {
        let mut doc = parse_system(WORKED_EXAMPLE).unwrap();
        doc.sim.as_mut().unwrap().t_end = 200.0;
        doc
    }

    #[test]
    fn stage_parsing() {
        assert_eq!(parse_stages(&["all"]).unwrap(), Stage::ALL.to_vec());
        assert_eq!(parse_stages(&["fit,check", "check"]).unwrap(), vec![Stage::Check, Stage::Fit]);
        assert!(parse_stages(&["bogus"]).is_err());
        assert!(parse_stages::<&str>(&[]).is_err());
    }

    #[test]
    fn dependency_errors() {
        let doc = short_doc();
        for stages in [vec![Stage::Fit], vec![Stage::Criterion]] {
            assert!(matches!(run_pipeline(&doc, &stages, &RunOptions::default()), Err(Error::StageDependency { .. })));
        }
    }

    #[test]
    fn check_and_criterion_on_example() {
        let out = run_pipeline(&short_doc(), &[Stage::Check, Stage::Transform, Stage::Criterion], &RunOptions::default())
            .unwrap();
        let crit = out.report.criterion.unwrap();
        assert_eq!(crit.margins, vec![-4.0, -1.0]);
        assert_eq!(crit.verdict, CriterionVerdict::StableCertified);
        assert_eq!(out.report.exit_code, EXIT_PASS);
        assert!(out.trajectory.is_none());
    }

    #[test]
    fn hash_depends_on_content() {
        let a = short_doc();
        let mut b = a.clone();
        b.xi = vec![1.0, 2.0];
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a), config_hash(&a.clone()));
    }
}
