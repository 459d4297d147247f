//! Property tests for the invariants of every module.

use mustab_core::criterion::{compute_limits, criterion_margins, CriterionInput, CriterionVerdict};
use mustab_core::dde::{fit_rate, lyapunov_monitor, simulate, BurnIn, HistorySpec, SimConfig, Trajectory};
use mustab_core::generate::{random_homogeneous_system, GeneratedSystem, GeneratorConfig};
use mustab_core::harness::parse_system;
use mustab_core::model::{analyze_structure, check_cooperative, check_nondecreasing, Monomial, PolyMap, Verdict, Witness};
use mustab_core::sampling::Sampling;
use mustab_core::transform::{state_to_z, transform_field, z_to_state, TransformedSystem};
use mustab_core::{evaluate_criterion, DelayFunction, DilationMap, MuFunction};
use proptest::prelude::*;
use rand::Rng;

fn system(seed: u64) -> GeneratedSystem {
    random_homogeneous_system(&mut Sampling::structural(seed).rng(), &GeneratorConfig::default())
}

fn degree_zero_system(seed: u64) -> GeneratedSystem {
    let cfg = GeneratorConfig { degree: Some(0.0), ..GeneratorConfig::default() };
    random_homogeneous_system(&mut Sampling::structural(seed).rng(), &cfg)
}

/// `n` coordinates log-uniform on `[10^-2, 10^2]`, drawn from `seed`.
fn point(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = Sampling::structural(seed ^ 0x5eed).rng();
    (0..n).map(|_| 10f64.powf(rng.gen_range(-2.0..2.0))).collect()
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn homogeneity_matches_sampling_oracle(seed in any::<u64>(), xs in any::<u64>(), lambda in 0.5f64..2.0) {
        let sys = system(seed);
        let x = point(xs, sys.r.dim());
        let scaled = sys.r.apply(lambda, &x);
        let w = sys.r.weights();
        for map in [&sys.f, &sys.g] {
            let (a, b) = (map.eval(&scaled).unwrap(), map.eval(&x).unwrap());
            for i in 0..w.len() {
                let expected = lambda.powf(sys.p + w[i]) * b[i];
                let scale = 1.0 + map.term_scale(i, &scaled);
                prop_assert!((a[i] - expected).abs() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn cooperative_certificate_holds_at_samples(seed in any::<u64>(), xs in any::<u64>()) {
        let sys = system(seed);
        prop_assert!(check_cooperative(&sys.f, &Sampling::structural(seed)).is_certified());
        let x = point(xs, sys.r.dim());
        let jac = sys.f.jacobian(&x).unwrap();
        for (i, row) in jac.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if i != j {
                    prop_assert!(*v >= -1e-12);
                }
            }
        }
    }

    #[test]
    fn nondecreasing_certificate_holds_on_ordered_pairs(seed in any::<u64>(), xs in any::<u64>(), k in 1.0f64..10.0) {
        let sys = system(seed);
        prop_assert!(check_nondecreasing(&sys.g, &Sampling::structural(seed)).is_certified());
        let y = point(xs, sys.r.dim());
        let x: Vec<f64> = y.iter().enumerate().map(|(j, v)| if j % 2 == 0 { v * k } else { *v }).collect();
        let (gx, gy) = (sys.g.eval(&x).unwrap(), sys.g.eval(&y).unwrap());
        for i in 0..gx.len() {
            prop_assert!(gx[i] >= gy[i] - 1e-12 * (1.0 + gx[i].abs()));
        }
    }

    #[test]
    fn jacobian_matches_central_differences(seed in any::<u64>(), xs in any::<u64>()) {
        let sys = system(seed);
        let n = sys.r.dim();
        let x = point(xs, n);
        let jac = sys.f.jacobian(&x).unwrap();
        for j in 0..n {
            let h = 1e-6 * x[j].abs().max(1.0);
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[j] += h;
            xm[j] -= h;
            if xm[j] <= 0.0 {
                continue;
            }
            let (fp, fm) = (sys.f.eval(&xp).unwrap(), sys.f.eval(&xm).unwrap());
            for i in 0..n {
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                let scale = jac[i][j].abs().max(sys.f.term_scale(i, &x) / x[j]).max(1e-8);
                prop_assert!(rel(fd, jac[i][j], scale) <= 1e-5, "entry ({i},{j}): fd {fd} vs {}", jac[i][j]);
            }
        }
    }

    #[test]
    fn evaluation_is_linear_in_coefficients(seed in any::<u64>(), xs in any::<u64>(), alpha in -5.0f64..5.0) {
        let sys = system(seed);
        let x = point(xs, sys.r.dim());
        let (a, b) = (sys.f.scaled(alpha).eval(&x).unwrap(), sys.f.eval(&x).unwrap());
        for i in 0..a.len() {
            let scale = alpha.abs() * sys.f.term_scale(i, &x);
            prop_assert!((a[i] - alpha * b[i]).abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn transform_matches_defining_quotient(seed in any::<u64>(), zs in any::<u64>()) {
        let sys = system(seed);
        let z = point(zs, sys.r.dim());
        let w = sys.r.weights();
        let x: Vec<f64> = z.iter().zip(w).map(|(zi, ri)| zi.powf(*ri)).collect();
        for map in [&sys.f, &sys.g] {
            let bar = transform_field(map, &sys.r).unwrap();
            let (fx, fz) = (map.eval(&x).unwrap(), bar.eval(&z).unwrap());
            for i in 0..w.len() {
                let quotient = fx[i] / z[i].powf(w[i] - 1.0);
                prop_assert!(rel(quotient, fz[i], bar.term_scale(i, &z)) <= 1e-10);
            }
        }
    }

    #[test]
    fn transformed_exponent_sums_equal_degree_plus_one(seed in any::<u64>()) {
        let sys = system(seed);
        for map in [&sys.f, &sys.g] {
            let bar = transform_field(map, &sys.r).unwrap();
            for m in bar.components().iter().flatten() {
                let sum: f64 = m.exponents.iter().sum();
                prop_assert!((sum - (sys.p + 1.0)).abs() <= 1e-9, "sum {sum}, p {}", sys.p);
            }
        }
    }

    #[test]
    fn unit_weights_transform_is_identity(seed in any::<u64>()) {
        let sys = system(seed);
        let r = DilationMap::standard(sys.r.dim());
        prop_assert_eq!(transform_field(&sys.f, &r).unwrap(), sys.f.clone());
        prop_assert_eq!(transform_field(&sys.g, &r).unwrap(), sys.g);
    }

    #[test]
    fn state_z_round_trip(x in prop::collection::vec(0.0f64..1e6, 1..5), rs in prop::collection::vec(0.25f64..4.0, 4)) {
        let r = DilationMap::new(rs[..x.len()].to_vec()).unwrap();
        let back = z_to_state(&state_to_z(&x, &r).unwrap(), &r).unwrap();
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn theorem_form_is_the_unit_r_star_instance(seed in any::<u64>(), xs in any::<u64>(), l in 1.0f64..3.0, d in 0.0f64..1.0) {
        let sys = system(seed);
        let n = sys.r.dim();
        let xi = point(xs, n);
        let t = TransformedSystem::new(&sys.f, &sys.g, &sys.r, Some(sys.p)).unwrap();
        let got = criterion_margins(&t.fbar, &t.gbar, &xi, &sys.r, 1.0, sys.p, l, d).unwrap();
        let w = sys.r.weights();
        for j in 0..n {
            let a = t.fbar.eval_component(j, &xi) / xi[j];
            let b = l.powf(sys.p + 1.0) * t.gbar.eval_component(j, &xi) / xi[j];
            let expected = (a + b) / w[j] + d;
            prop_assert!((got[j] - expected).abs() <= 1e-14 * ((a.abs() + b.abs()) / w[j] + d + 1.0));
        }
    }

    #[test]
    fn degree_zero_margins_are_scale_invariant(seed in any::<u64>(), xs in any::<u64>(), c in 0.1f64..10.0) {
        let sys = degree_zero_system(seed);
        let t = TransformedSystem::new(&sys.f, &sys.g, &sys.r, Some(0.0)).unwrap();
        let xi = point(xs, sys.r.dim());
        let scaled: Vec<f64> = xi.iter().map(|v| v * c).collect();
        let a = criterion_margins(&t.fbar, &t.gbar, &xi, &sys.r, 1.0, 0.0, 1.0, 0.0).unwrap();
        let b = criterion_margins(&t.fbar, &t.gbar, &scaled, &sys.r, 1.0, 0.0, 1.0, 0.0).unwrap();
        for (j, (u, v)) in a.iter().zip(&b).enumerate() {
            let scale = (t.fbar.term_scale(j, &xi) + t.gbar.term_scale(j, &xi)) / xi[j] + 1.0;
            prop_assert!((u - v).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn power_proportional_limit_grows_with_delay(beta in 0.1f64..3.0, q1 in 0.05f64..0.95, dq in 0.001f64..0.5) {
        let q2 = (q1 + dq).min(0.99);
        let mu = MuFunction::Power { beta };
        let a = compute_limits(&mu, &DelayFunction::Proportional { q: q1 }, 0.0, 1.0).unwrap();
        let b = compute_limits(&mu, &DelayFunction::Proportional { q: q2 }, 0.0, 1.0).unwrap();
        // Smaller q means a longer delay d(t) = q t.
        prop_assert!(a.l >= b.l);
    }

    #[test]
    fn certified_verdicts_carry_negative_margins(seed in any::<u64>(), xs in any::<u64>()) {
        let sys = system(seed);
        let structure = analyze_structure(&sys.f, &sys.g, &sys.r, &Sampling::structural(seed)).unwrap();
        let t = TransformedSystem::new(&sys.f, &sys.g, &sys.r, structure.degree).unwrap();
        let mu = MuFunction::Log;
        let delay = DelayFunction::Bounded { tau_max: 1.0 };
        let input = CriterionInput { mu: &mu, delay: &delay, xi: Some(point(xs, sys.r.dim())), r_star: None };
        let rep = evaluate_criterion(&t, Some(&structure), &input).unwrap();
        if rep.verdict == CriterionVerdict::StableCertified {
            prop_assert!(rep.margins.iter().all(|m| *m < 0.0));
            prop_assert!(structure.assumptions_certified());
        }
        for (i, v) in structure.omega_condition.iter().enumerate() {
            if !v.is_certified() && !t.gbar.component(i).is_empty() {
                let flagged = rep.hypothesis_flags.iter().any(|f| matches!(f,
                    mustab_core::criterion::HypothesisFlag::OmegaCondition { component, .. } if *component == i));
                prop_assert!(flagged);
            }
        }
    }

    #[test]
    fn refuted_cooperativity_witness_reevaluates(c in 0.1f64..5.0, e in 0.5f64..3.0) {
        let f = PolyMap::new(vec![
            vec![Monomial::new(-1.0, vec![2.0, 0.0]), Monomial::new(-c, vec![1.0, e])],
            vec![Monomial::new(-1.0, vec![0.0, 2.0])],
        ])
        .unwrap();
        match check_cooperative(&f, &Sampling::default()) {
            Verdict::Refuted { witness: Witness { point, entry: Some((i, j)), value } } => {
                prop_assert!(i != j);
                let jac = f.jacobian(&point).unwrap();
                prop_assert_eq!(jac[i][j], value);
                prop_assert!(value < 0.0);
            }
            other => prop_assert!(false, "expected a refutation, got {:?}", other),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn simulated_states_stay_nonnegative(seed in any::<u64>(), phi in prop::collection::vec(0.0f64..2.0, 4)) {
        let sys = system(seed);
        let n = sys.r.dim();
        let history = HistorySpec::Constant(phi[..n].to_vec());
        let cfg = SimConfig::new(0.0, 2.0);
        match simulate(&sys.f, &sys.g, &DelayFunction::Bounded { tau_max: 0.5 }, &history, &cfg) {
            Ok(tr) => {
                for k in 0..tr.len() {
                    prop_assert!(tr.state(k).iter().all(|v| *v >= 0.0));
                }
            }
            Err(e) => prop_assert!(matches!(e,
                mustab_core::Error::StepUnderflow { .. } | mustab_core::Error::NonFinite { .. }), "{e}"),
        }
    }

    #[test]
    fn simulation_is_deterministic(seed in any::<u64>()) {
        let sys = degree_zero_system(seed);
        let history = HistorySpec::Constant(vec![1.0; sys.r.dim()]);
        let cfg = SimConfig::new(1.0, 20.0);
        let delay = DelayFunction::PowerLag { alpha: 0.5 };
        let a = simulate(&sys.f, &sys.g, &delay, &history, &cfg);
        let b = simulate(&sys.f, &sys.g, &delay, &history, &cfg);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn dense_output_is_exact_at_nodes_and_continuous(seed in any::<u64>()) {
        let sys = degree_zero_system(seed);
        let history = HistorySpec::Constant(vec![1.0; sys.r.dim()]);
        let tr = simulate(&sys.f, &sys.g, &DelayFunction::Proportional { q: 0.5 }, &history, &SimConfig::new(0.0, 5.0))
            .unwrap();
        for k in 1..tr.len() - 1 {
            let t = tr.time(k);
            prop_assert_eq!(tr.sample(t).unwrap(), tr.state(k).to_vec());
            let eps = 1e-9 * (tr.time(k + 1) - t);
            let (left, right) = (tr.sample(t - eps).unwrap(), tr.sample(t + eps).unwrap());
            for i in 0..left.len() {
                prop_assert!((left[i] - right[i]).abs() <= 1e-8 * (1.0 + left[i].abs()));
            }
        }
    }

    #[test]
    fn monitor_sup_is_nondecreasing_and_flat_after_peak(values in prop::collection::vec(0.0f64..10.0, 3..40), peak in 0usize..40) {
        let n = values.len();
        let peak = peak % n;
        let mut v = values.clone();
        let top = 20.0;
        v[peak] = top;
        for k in peak + 1..n {
            v[k] = v[k].min(v[k - 1]);
        }
        // Constant tabulated mu and unit weights make V equal to the state.
        let times: Vec<f64> = (0..n).map(|k| k as f64 + 1.0).collect();
        let tr = Trajectory::from_nodes(times.clone(), v.iter().map(|x| vec![*x]).collect(), vec![vec![0.0]; n]).unwrap();
        let mu = MuFunction::Tabulated(mustab_core::criterion::MuTable::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap());
        let rep = lyapunov_monitor(&tr, &mu, &[1.0], &DilationMap::standard(1), 1.0, BurnIn::AtTime(times[peak]));
        prop_assert!(rep.sup.windows(2).all(|w| w[1] >= w[0]));
        prop_assert_eq!(rep.growth_ratio, Some(1.0));
    }

    #[test]
    fn fit_recovers_injected_power_law(c in 0.05f64..4.0, amp in 0.1f64..10.0) {
        let times: Vec<f64> = (0..120).map(|k| 2.0 * 1.15f64.powi(k)).collect();
        let mu = MuFunction::LogLog;
        let xs = times.iter().map(|t| vec![amp * mu.eval(*t).unwrap().powf(-c)]).collect();
        let tr = Trajectory::from_nodes(times.clone(), xs, vec![vec![0.0]; times.len()]).unwrap();
        let fit = fit_rate(&tr, &mu, 0.5).unwrap();
        prop_assert!((fit.slopes[0] + c).abs() <= 1e-10);
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>(), t_end in 10.0f64..1e4, q in 0.1f64..0.9) {
        let sys = system(seed);
        let n = sys.r.dim();
        let json = serde_json::json!({
            "n": n,
            "f": sys.f,
            "g": sys.g,
            "r": sys.r,
            "delay": {"family": "proportional", "q": q},
            "mu": {"family": "power", "beta": 0.5},
            "history": {"phi0": vec![1.0; n]},
            "sim": {"t_end": t_end},
        });
        let doc = parse_system(&json.to_string()).unwrap();
        prop_assert_eq!(parse_system(&doc.to_json()).unwrap(), doc);
    }
}
