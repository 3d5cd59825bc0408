//! Independent-oracle cross-checks for the Monte Carlo verifiers: closed-form
//! second moments against driftless ensembles, exponential first-jump laws,
//! confinement floors from large-jump rates, and estimator self-consistency.

use jumpflow_core::assumptions::{
    verify_a1_2_small_noise, verify_a1_3_local_boundedness, A13Params,
};
use jumpflow_core::ergodicity::{
    lyapunov_moment_check, occupation_measure, wasserstein1_1d, LyapunovConfig, Observable,
};
use jumpflow_core::integrator::evolve_full;
use jumpflow_core::levy::Band;
use jumpflow_core::operators::conditions::{calibrate_decay_envelope, ProbeConfig};
use jumpflow_core::operators::HKind;
use jumpflow_core::{
    stats, DriftOperator, GridFunction, LevyNoiseModel, NormSuite, RngStream, SimConfig,
};

fn mixed_unit(ns: &NormSuite, n: usize) -> GridFunction {
    let mut x = GridFunction::zeros(n);
    for j in 1..=8 {
        x.axpy(1.0 / j as f64, &GridFunction::sine_mode(j, n));
    }
    let norm = ns.h_norm(&x);
    x.scaled(1.0 / norm)
}

#[test]
fn driftless_gap_matches_compound_poisson_second_moment() {
    // with the drift frozen, the truncated path is a pure compound-Poisson
    // sum, so E||X - Y||^2 = t * band-variance exactly
    let n = 16;
    let op = DriftOperator::p_laplace(2.0).unwrap().with_conductivity(0.0);
    let ns = NormSuite::for_operator(&op);
    let noise =
        LevyNoiseModel::cylindrical_stable(1.5, vec![0.3, 0.2], n, HKind::L2, 1e-3).unwrap();
    let t = 0.25;
    let eps = 0.5;
    let x = GridFunction::zeros(n);
    let template = SimConfig::new(t, RngStream::new(70, 0)).with_record_dt(t);
    let report = verify_a1_2_small_noise(
        &x,
        &op,
        &ns,
        &noise,
        t,
        &[eps, 0.25],
        600,
        &template,
    )
    .unwrap();
    let measured = report
        .statistic(&format!("gap_sq_at_{eps}"))
        .unwrap();
    let expected =
        t * (noise.small_jump_variance(eps) - noise.small_jump_variance(noise.inner_cutoff()));
    assert!(
        (measured.value - expected).abs() <= 3.0 * measured.std_err.unwrap(),
        "measured {} expected {expected}",
        measured.value
    );
}

#[test]
fn a1_2_estimates_consistent_under_path_doubling() {
    let n = 24;
    let op = DriftOperator::p_laplace(1.5).unwrap();
    let ns = NormSuite::for_operator(&op);
    let noise =
        LevyNoiseModel::cylindrical_stable(1.5, (1..=6).map(|j| 0.1 / j as f64).collect(), n, HKind::L2, 0.01)
            .unwrap();
    let x = mixed_unit(&ns, n);
    let t = 0.25;
    let run = |paths: usize, stream: u64| {
        let template = SimConfig::new(t, RngStream::new(71, stream))
            .with_max_dt(2e-3)
            .with_step_tolerance(0.02);
        let report =
            verify_a1_2_small_noise(&x, &op, &ns, &noise, t, &[0.5, 0.25], paths, &template)
                .unwrap();
        let s = report.statistic("gap_sq_at_0.5").unwrap();
        (s.value, s.std_err.unwrap())
    };
    let (m1, s1) = run(400, 0);
    let (m2, s2) = run(800, 1);
    let combined = (s1 * s1 + s2 * s2).sqrt();
    assert!(
        (m1 - m2).abs() <= 3.0 * combined,
        "m1 {m1} +- {s1}, m2 {m2} +- {s2}"
    );
}

#[test]
fn a1_3_success_floor_from_large_jump_rate() {
    // oracle: a path from the zeta-sphere stays confined whenever no jump of
    // norm above (eta - zeta)/2 arrives before t and the small jumps stay
    // quiet, so the success fraction must beat half the no-jump probability
    let n = 24;
    let op = DriftOperator::p_laplace(1.5).unwrap();
    let ns = NormSuite::for_operator(&op);
    let noise = LevyNoiseModel::cylindrical_stable(
        1.5,
        (1..=6).map(|j| 0.02 / j as f64).collect(),
        n,
        HKind::L2,
        0.005,
    )
    .unwrap();
    let params = A13Params {
        eta: 0.5,
        zeta: 0.25,
        t: 0.5,
        points: 8,
        paths_per_point: 200,
    };
    let template = SimConfig::new(params.t, RngStream::new(72, 0));
    let report = verify_a1_3_local_boundedness(&params, &op, &ns, &noise, &template).unwrap();
    assert!(report.pass);
    let threshold = (params.eta - params.zeta) / 2.0;
    let lambda = noise.large_jump_rate(threshold).unwrap();
    let floor = (-lambda * params.t).exp() / 2.0;
    let min_fraction = report.statistic("min_success_fraction").unwrap().value;
    assert!(
        min_fraction >= floor,
        "min fraction {min_fraction} below floor {floor}"
    );
}

#[test]
fn a1_3_probability_monotone_in_eta() {
    let n = 16;
    let op = DriftOperator::p_laplace(1.5).unwrap();
    let ns = NormSuite::for_operator(&op);
    let noise =
        LevyNoiseModel::cylindrical_stable(1.5, vec![0.1, 0.05], n, HKind::L2, 0.01).unwrap();
    let run = |eta: f64| {
        let params = A13Params {
            eta,
            zeta: 0.1,
            t: 0.3,
            points: 4,
            paths_per_point: 100,
        };
        let template = SimConfig::new(params.t, RngStream::new(73, 0));
        let report =
            verify_a1_3_local_boundedness(&params, &op, &ns, &noise, &template).unwrap();
        report.statistic("min_success_fraction").unwrap().value
    };
    // identical seeds: enlarging eta never loses a success
    assert!(run(0.4) >= run(0.25));
}

#[test]
fn first_large_jump_time_is_exponential() {
    // the first jump above a threshold along full paths follows the
    // exponential law with the tail rate of that threshold
    let n = 8;
    let op = DriftOperator::p_laplace(2.0).unwrap().with_conductivity(0.0);
    let ns = NormSuite::for_operator(&op);
    let noise =
        LevyNoiseModel::cylindrical_stable(1.5, vec![0.6, 0.3], n, HKind::L2, 0.5).unwrap();
    let threshold = 1.0;
    let lambda = noise.large_jump_rate(threshold).unwrap();
    let horizon = 14.0 / lambda;
    let x = GridFunction::zeros(n);
    let mut first_times = Vec::new();
    for k in 0..4000u64 {
        let cfg = SimConfig::new(horizon, RngStream::new(74, k)).with_record_dt(horizon);
        let path = evolve_full(&x, &op, &ns, &noise, &cfg).unwrap();
        let first = path.points.iter().find_map(|p| {
            p.pre_jump.as_ref().and_then(|pre| {
                let jump_norm = ns.h_norm(&p.state.sub(pre));
                (jump_norm > threshold).then_some(p.time)
            })
        });
        if let Some(t) = first {
            first_times.push(t);
        }
    }
    // censoring at the horizon loses mass e^{-14}; negligible at this size
    assert!(first_times.len() > 3900);
    let (_, p) = stats::ks_one_sample(&first_times, |t| 1.0 - (-lambda * t).exp());
    assert!(p > 0.01, "KS p = {p}");
}

#[test]
fn driftless_terminal_mean_is_centered() {
    let n = 8;
    let op = DriftOperator::p_laplace(2.0).unwrap().with_conductivity(0.0);
    let ns = NormSuite::for_operator(&op);
    let noise =
        LevyNoiseModel::cylindrical_stable(1.5, vec![0.4, 0.2], n, HKind::L2, 0.05).unwrap();
    let probe = GridFunction::sine_mode(1, n);
    let x = GridFunction::zeros(n);
    let samples: Vec<f64> = (0..1000u64)
        .map(|k| {
            let cfg = SimConfig::new(2.0, RngStream::new(75, k)).with_record_dt(2.0);
            let path = evolve_full(&x, &op, &ns, &noise, &cfg).unwrap();
            path.terminal().state.dot_l2(&probe)
        })
        .collect();
    let (mean, se) = stats::mean_se(&samples);
    assert!(mean.abs() <= 3.0 * se, "mean {mean} +- {se}");
}

#[test]
fn occupation_measure_stationarity_diagnostics() {
    let n = 24;
    let op = DriftOperator::p_laplace(1.5).unwrap();
    let ns = NormSuite::for_operator(&op);
    let noise = LevyNoiseModel::cylindrical_stable(
        1.5,
        (1..=6).map(|j| 0.1 / j as f64).collect(),
        n,
        HKind::L2,
        0.01,
    )
    .unwrap();
    let x = mixed_unit(&ns, n);
    let template = SimConfig::new(40.0, RngStream::new(76, 0)).with_record_dt(0.05);

    // doubling the horizon at fixed burn-in moves the mean by < 3 combined SE
    let m1 = occupation_measure(&x, &op, &ns, &noise, Observable::HNorm, 5.0, 40.0, &template)
        .unwrap();
    let template2 = SimConfig::new(80.0, RngStream::new(76, 1)).with_record_dt(0.05);
    let m2 = occupation_measure(&x, &op, &ns, &noise, Observable::HNorm, 5.0, 80.0, &template2)
        .unwrap();
    let (mean1, se1) = stats::batch_means_se(&m1.samples, 20);
    let (mean2, se2) = stats::batch_means_se(&m2.samples, 20);
    let combined = (se1 * se1 + se2 * se2).sqrt();
    assert!(
        (mean1 - mean2).abs() < 3.0 * combined,
        "mean1 {mean1} +- {se1}, mean2 {mean2} +- {se2}"
    );

    // two independent seeds from the same start: W1 below the tolerance
    let template3 = SimConfig::new(80.0, RngStream::new(76, 2)).with_record_dt(0.05);
    let m3 = occupation_measure(&x, &op, &ns, &noise, Observable::HNorm, 5.0, 80.0, &template3)
        .unwrap();
    let w1 = wasserstein1_1d(&m2.samples, &m3.samples).unwrap();
    assert!(w1 < 0.05, "W1 = {w1}");
}

#[test]
fn lyapunov_estimator_invariant_under_record_resolution() {
    let n = 24;
    let op = DriftOperator::p_laplace(1.5).unwrap();
    let ns = NormSuite::for_operator(&op);
    let noise = LevyNoiseModel::cylindrical_stable(
        1.5,
        (1..=6).map(|j| 0.1 / j as f64).collect(),
        n,
        HKind::L2,
        0.01,
    )
    .unwrap();
    let x = mixed_unit(&ns, n);
    let lc = LyapunovConfig { theta_hat: 1.0 };
    let run = |record_dt: f64| {
        let template = SimConfig::new(10.0, RngStream::new(77, 0)).with_record_dt(record_dt);
        let report =
            lyapunov_moment_check(&x, &op, &ns, &noise, &lc, &[5.0, 10.0], 60, &template)
                .unwrap();
        (report.rows[1].m_of_t, report.rows[1].se)
    };
    let (coarse, se_c) = run(0.2);
    let (fine, se_f) = run(0.1);
    let combined = (se_c * se_c + se_f * se_f).sqrt();
    assert!(
        (coarse - fine).abs() <= 2.0 * combined,
        "coarse {coarse} +- {se_c}, fine {fine} +- {se_f}"
    );
}

#[test]
fn decay_envelope_beats_discrete_poincare_bound() {
    // for the p-Laplace pairing, |u_i| <= (1/2) h sum|D u| telescopes to
    // v_norm >= 2 h_norm exactly on the Dirichlet grid, so the calibrated
    // envelope constant at the coercivity exponent is at least 2 * 2^p
    let op = DriftOperator::p_laplace(1.5).unwrap().with_regularization(0.0);
    let ns = NormSuite::for_operator(&op);
    let cal = calibrate_decay_envelope(
        &op,
        &ns,
        32,
        &[1.5],
        400,
        &ProbeConfig::default(),
        RngStream::new(78, 0),
    )
    .unwrap();
    let bound = 2.0 * 2.0f64.powf(1.5);
    assert!(
        cal.best.c_tilde >= bound * 0.999,
        "calibrated {} below Poincare bound {bound}",
        cal.best.c_tilde
    );
}

#[test]
fn full_equals_truncated_when_no_mass_above_one() {
    // a compactly supported measure has an empty large-jump band, so the
    // full evolution coincides with the truncated one at level 1
    use jumpflow_core::integrator::{evolve_full, evolve_truncated, Truncation};
    use jumpflow_core::{NoiseKind, OneDimMeasure};
    let n = 12;
    let op = DriftOperator::p_laplace(1.5).unwrap();
    let ns = NormSuite::for_operator(&op);
    let noise = LevyNoiseModel::new(
        NoiseKind::CylindricalGeneric {
            measure: OneDimMeasure::TruncatedStable { alpha: 1.5, support: 1.0 },
            coefficients: vec![1.0],
        },
        n,
        HKind::L2,
        0.05,
    )
    .unwrap();
    let x = GridFunction::sine_mode(1, n);
    let cfg = SimConfig::new(1.0, RngStream::new(79, 0))
        .with_truncation(Truncation::Level(1.0))
        .with_record_dt(0.25);
    let truncated = evolve_truncated(&x, &op, &ns, &noise, &cfg).unwrap();
    let full = evolve_full(&x, &op, &ns, &noise, &cfg).unwrap();
    assert_eq!(truncated.points.len(), full.points.len());
    for (a, b) in truncated.points.iter().zip(&full.points) {
        assert_eq!(a.state.values(), b.state.values());
    }
}

#[test]
fn verifier_reports_are_deterministic_and_carry_replay_seed() {
    use jumpflow_core::assumptions::verify_a0_symmetry;
    let noise =
        LevyNoiseModel::cylindrical_stable(1.5, vec![0.4], 8, HKind::L2, 0.01).unwrap();
    let stream = RngStream::new(80, 123);
    let a = verify_a0_symmetry(&noise, Band::above(0.01), 2000, stream).unwrap();
    let b = verify_a0_symmetry(&noise, Band::above(0.01), 2000, stream).unwrap();
    assert_eq!(a.seed, 80);
    assert_eq!(a.stream_id, 123);
    assert_eq!(a.pass, b.pass);
    for (x, y) in a.statistics.iter().zip(&b.statistics) {
        assert_eq!(x.value, y.value);
    }
}

#[test]
fn identical_states_same_seed_give_zero_wasserstein() {
    let n = 16;
    let op = DriftOperator::p_laplace(1.5).unwrap();
    let ns = NormSuite::for_operator(&op);
    let noise =
        LevyNoiseModel::cylindrical_stable(1.5, vec![0.1], n, HKind::L2, 0.02).unwrap();
    let x = mixed_unit(&ns, n);
    let template = SimConfig::new(10.0, RngStream::new(81, 0)).with_record_dt(0.25);
    let m1 = occupation_measure(&x, &op, &ns, &noise, Observable::HNorm, 2.0, 10.0, &template)
        .unwrap();
    let m2 = occupation_measure(&x, &op, &ns, &noise, Observable::HNorm, 2.0, 10.0, &template)
        .unwrap();
    assert_eq!(wasserstein1_1d(&m1.samples, &m2.samples).unwrap(), 0.0);
}

#[test]
fn lyapunov_weight_closed_form() {
    let lc = LyapunovConfig { theta_hat: 1.0 };
    let op = DriftOperator::p_laplace(1.5).unwrap();
    let ns = NormSuite::for_operator(&op);
    let zero = GridFunction::zeros(8);
    assert_eq!(lc.weight(&ns, &zero), 1.0);
    let e1 = GridFunction::sine_mode(1, 8);
    let expected = (ns.h_norm_sq(&e1) + 1.0).sqrt();
    assert!((lc.weight(&ns, &e1) - expected).abs() < 1e-14);
}
