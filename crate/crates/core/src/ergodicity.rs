//! Accessibility-to-zero estimation, occupation measures along long
//! trajectories, empirical 1-D Wasserstein comparison, and the Lyapunov
//! moment diagnostic behind invariant-measure existence.

use rayon::prelude::*;

use crate::assumptions::{par_paths, Statistic, VerifierReport, STREAM_BLOCK};
use crate::error::CoreError;
use crate::grid::GridFunction;
use crate::integrator::{evolve_full, SimConfig, Truncation};
use crate::levy::{LevyNoiseModel, TailMoment};
use crate::operators::{DriftOperator, NormSuite};
use crate::stats;

/// Scalar observable evaluated along trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    HNorm,
    VNorm,
    /// H-inner product against the j-th H-normalized sine mode.
    SineFunctional(usize),
}

impl Observable {
    pub fn label(&self) -> String {
        match self {
            Observable::HNorm => "h-norm".into(),
            Observable::VNorm => "v-norm".into(),
            Observable::SineFunctional(j) => format!("mode-{j}"),
        }
    }

    pub fn eval(&self, ns: &NormSuite, state: &GridFunction) -> f64 {
        match self {
            Observable::HNorm => ns.h_norm(state),
            Observable::VNorm => ns.v_norm(state),
            Observable::SineFunctional(j) => {
                let probe = ns.h_normalized_sine_mode(*j, state.len());
                ns.h_inner(state, &probe)
            }
        }
    }
}

/// Accessibility query: initial state, target radius, and the time grid.
#[derive(Debug, Clone)]
pub struct AccessibilityQuery {
    pub initial: GridFunction,
    pub radius: f64,
    pub times: Vec<f64>,
    pub paths: usize,
}

impl AccessibilityQuery {
    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.radius > 0.0) {
            return Err(CoreError::invalid("radius must be positive"));
        }
        if self.times.is_empty() || self.times.iter().any(|&t| t <= 0.0) {
            return Err(CoreError::invalid("time grid must be positive"));
        }
        for w in self.times.windows(2) {
            if w[1] <= w[0] {
                return Err(CoreError::invalid("time grid must strictly increase"));
            }
        }
        if self.paths == 0 {
            return Err(CoreError::invalid("need at least one path"));
        }
        Ok(())
    }
}

/// Per-time-point accessibility statistics.
#[derive(Debug, Clone, Copy)]
pub struct TimePointStat {
    pub time: f64,
    pub paths: usize,
    pub successes: u64,
    pub p_hat: f64,
    pub cp_lower: f64,
}

/// Accessibility evidence report. A failed search is budget-limited evidence,
/// never a refutation.
#[derive(Debug, Clone)]
pub struct AccessibilityReport {
    pub per_time: Vec<TimePointStat>,
    /// Positive exact lower bound somewhere on the grid.
    pub evidence: bool,
    /// Longest contiguous run of grid times with a positive lower bound.
    pub window: Option<(f64, f64)>,
    pub window_len: usize,
    pub note: Option<String>,
}

/// Estimate `P(||X(t)|| <= radius)` over an ensemble of full paths evaluated
/// at every grid time, with exact binomial lower confidence bounds.
pub fn estimate_accessibility(
    query: &AccessibilityQuery,
    op: &DriftOperator,
    ns: &NormSuite,
    noise: &LevyNoiseModel,
    template: &SimConfig,
) -> Result<AccessibilityReport, CoreError> {
    query.validate()?;
    let horizon = *query.times.last().unwrap();
    let per_path: Vec<Vec<bool>> = par_paths(query.paths, |i| {
        let cfg = SimConfig {
            horizon,
            record_dt: horizon,
            truncation: Truncation::Full,
            extra_record_times: query.times.clone(),
            stream: template.stream.child(STREAM_BLOCK + i as u64),
            ..template.clone()
        };
        let path = evolve_full(&query.initial, op, ns, noise, &cfg)?;
        Ok(query
            .times
            .iter()
            .map(|&t| path.state_at(t).h_norm <= query.radius)
            .collect())
    })?;

    let mut per_time = Vec::with_capacity(query.times.len());
    for (k, &t) in query.times.iter().enumerate() {
        let successes = per_path.iter().filter(|hits| hits[k]).count() as u64;
        let p_hat = successes as f64 / query.paths as f64;
        let cp_lower = stats::clopper_pearson_lower(successes, query.paths as u64, 0.05);
        per_time.push(TimePointStat {
            time: t,
            paths: query.paths,
            successes,
            p_hat,
            cp_lower,
        });
    }

    let mut best: Option<(usize, usize)> = None;
    let mut run_start = None;
    for (k, stat) in per_time.iter().enumerate() {
        if stat.cp_lower > 0.0 {
            let start = *run_start.get_or_insert(k);
            let len = k - start + 1;
            if best.map_or(true, |(s, e)| len > e - s + 1) {
                best = Some((start, k));
            }
        } else {
            run_start = None;
        }
    }
    let evidence = best.is_some();
    let window = best.map(|(s, e)| (per_time[s].time, per_time[e].time));
    let window_len = best.map_or(0, |(s, e)| e - s + 1);
    Ok(AccessibilityReport {
        per_time,
        evidence,
        window,
        window_len,
        note: if evidence {
            None
        } else {
            Some("no evidence at this budget".into())
        },
    })
}

/// Weighted empirical samples of one observable along a single long path
/// after burn-in, collected on the regular record grid.
#[derive(Debug, Clone)]
pub struct OccupationMeasure {
    pub observable: Observable,
    pub samples: Vec<f64>,
    pub burn_in: f64,
    pub horizon: f64,
    pub record_dt: f64,
}

/// Build the occupation measure of one observable from a single full path.
pub fn occupation_measure(
    x: &GridFunction,
    op: &DriftOperator,
    ns: &NormSuite,
    noise: &LevyNoiseModel,
    observable: Observable,
    burn_in: f64,
    horizon: f64,
    template: &SimConfig,
) -> Result<OccupationMeasure, CoreError> {
    let measures = occupation_measures(
        x,
        op,
        ns,
        noise,
        &[observable],
        burn_in,
        horizon,
        template,
    )?;
    Ok(measures.into_iter().next().unwrap())
}

/// Same as [`occupation_measure`] for several observables sharing one path.
pub fn occupation_measures(
    x: &GridFunction,
    op: &DriftOperator,
    ns: &NormSuite,
    noise: &LevyNoiseModel,
    observables: &[Observable],
    burn_in: f64,
    horizon: f64,
    template: &SimConfig,
) -> Result<Vec<OccupationMeasure>, CoreError> {
    if !(burn_in >= 0.0 && burn_in < horizon) {
        return Err(CoreError::invalid("burn-in must lie inside the horizon"));
    }
    let record_dt = template.record_dt;
    let cfg = SimConfig {
        horizon,
        truncation: Truncation::Full,
        extra_record_times: Vec::new(),
        ..template.clone()
    };
    let path = evolve_full(x, op, ns, noise, &cfg)?;
    let m_start = (burn_in / record_dt + 1e-9).floor() as u64 + 1;
    let m_end = (horizon / record_dt + 1e-9).floor() as u64;
    let mut out: Vec<OccupationMeasure> = observables
        .iter()
        .map(|&observable| OccupationMeasure {
            observable,
            samples: Vec::with_capacity((m_end - m_start + 1) as usize),
            burn_in,
            horizon,
            record_dt,
        })
        .collect();
    for m in m_start..=m_end {
        let t = m as f64 * record_dt;
        let point = path.state_at(t);
        for measure in &mut out {
            measure
                .samples
                .push(measure.observable.eval(ns, &point.state));
        }
    }
    Ok(out)
}

/// First Wasserstein distance between two empirical laws on the line: the
/// mean absolute difference of sorted samples for equal sizes, quantile
/// interpolation at the coarser grid otherwise.
pub fn wasserstein1_1d(a: &[f64], b: &[f64]) -> Result<f64, CoreError> {
    if a.is_empty() || b.is_empty() {
        return Err(CoreError::EmptySamples {
            context: "wasserstein distance",
        });
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|u, v| u.partial_cmp(v).unwrap());
    ys.sort_by(|u, v| u.partial_cmp(v).unwrap());
    if xs.len() == ys.len() {
        let total: f64 = xs.iter().zip(&ys).map(|(u, v)| (u - v).abs()).sum();
        return Ok(total / xs.len() as f64);
    }
    let m = xs.len().min(ys.len());
    let mut total = 0.0;
    for i in 0..m {
        let q = (i as f64 + 0.5) / m as f64;
        total += (stats::quantile_sorted(&xs, q) - stats::quantile_sorted(&ys, q)).abs();
    }
    Ok(total / m as f64)
}

/// One horizon/observable row of the uniqueness ladder.
#[derive(Debug, Clone)]
pub struct UniquenessRow {
    pub horizon: f64,
    pub observable: String,
    pub w1_mean: f64,
    pub w1_se: f64,
}

#[derive(Debug, Clone)]
pub struct UniquenessReport {
    pub rows: Vec<UniquenessRow>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Invariant-measure uniqueness diagnostic: occupation measures from two
/// initial states must drift together along a horizon ladder. W1 distances
/// are averaged over seed replicates; passing requires nonincreasing means
/// within two combined standard errors and a final mean below the tolerance
/// for every observable.
#[allow(clippy::too_many_arguments)]
pub fn verify_uniqueness(
    x1: &GridFunction,
    x2: &GridFunction,
    op: &DriftOperator,
    ns: &NormSuite,
    noise: &LevyNoiseModel,
    observables: &[Observable],
    burn_in: f64,
    horizons: &[f64],
    replicates: usize,
    tolerance: f64,
    template: &SimConfig,
) -> Result<UniquenessReport, CoreError> {
    if horizons.len() < 2 {
        return Err(CoreError::invalid("horizon ladder needs at least two entries"));
    }
    if replicates < 2 {
        return Err(CoreError::invalid("need at least two seed replicates"));
    }
    // one pair of long paths per (horizon, replicate); observables share them
    let mut means = vec![Vec::with_capacity(horizons.len()); observables.len()];
    let mut ses = vec![Vec::with_capacity(horizons.len()); observables.len()];
    let mut rows = Vec::new();
    for (hi, &horizon) in horizons.iter().enumerate() {
        let per_rep: Vec<Vec<f64>> = (0..replicates)
            .into_par_iter()
            .map(|r| {
                let base = (hi * replicates + r) as u64;
                let cfg1 = SimConfig {
                    stream: template.stream.child(STREAM_BLOCK + 2 * base),
                    ..template.clone()
                };
                let cfg2 = SimConfig {
                    stream: template.stream.child(STREAM_BLOCK + 2 * base + 1),
                    ..template.clone()
                };
                let m1 =
                    occupation_measures(x1, op, ns, noise, observables, burn_in, horizon, &cfg1)?;
                let m2 =
                    occupation_measures(x2, op, ns, noise, observables, burn_in, horizon, &cfg2)?;
                (0..observables.len())
                    .map(|k| wasserstein1_1d(&m1[k].samples, &m2[k].samples))
                    .collect::<Result<Vec<f64>, CoreError>>()
            })
            .collect::<Result<Vec<Vec<f64>>, CoreError>>()?;
        for (k, observable) in observables.iter().enumerate() {
            let w1s: Vec<f64> = per_rep.iter().map(|rep| rep[k]).collect();
            let (mean, se) = stats::mean_se(&w1s);
            rows.push(UniquenessRow {
                horizon,
                observable: observable.label(),
                w1_mean: mean,
                w1_se: se,
            });
            means[k].push(mean);
            ses[k].push(se);
        }
    }
    let mut pass = true;
    for k in 0..observables.len() {
        for i in 0..horizons.len() - 1 {
            let slack = 2.0 * (ses[k][i] * ses[k][i] + ses[k][i + 1] * ses[k][i + 1]).sqrt();
            if means[k][i + 1] > means[k][i] + slack {
                pass = false;
            }
        }
        if *means[k].last().unwrap() > tolerance {
            pass = false;
        }
    }
    Ok(UniquenessReport {
        rows,
        tolerance,
        pass,
    })
}

/// Lyapunov weight configuration: `f(u) = (||u||_H^2 + 1)^{theta_hat / 2}`.
#[derive(Debug, Clone, Copy)]
pub struct LyapunovConfig {
    pub theta_hat: f64,
}

impl LyapunovConfig {
    /// Validity: the order must exceed `(2 - alpha) v 0` for the operator's
    /// coercivity exponent, stay at most 2, and the noise must have a finite
    /// tail moment of that order.
    pub fn validate(&self, op: &DriftOperator, noise: &LevyNoiseModel) -> Result<(), CoreError> {
        let alpha_op = op.coercivity_exponent();
        let lower = (2.0 - alpha_op).max(0.0);
        if !(self.theta_hat > lower && self.theta_hat <= 2.0) {
            return Err(CoreError::invalid(format!(
                "theta_hat = {} outside ({lower}, 2] for coercivity exponent {alpha_op}",
                self.theta_hat
            )));
        }
        match noise.tail_moment(self.theta_hat)? {
            TailMoment::Finite(_) => Ok(()),
            TailMoment::Infinite => Err(CoreError::InfiniteTailMoment {
                order: self.theta_hat,
                alpha: noise.stability_index().unwrap_or(f64::NAN),
            }),
        }
    }

    pub fn weight(&self, ns: &NormSuite, u: &GridFunction) -> f64 {
        (ns.h_norm_sq(u) + 1.0).powf(self.theta_hat / 2.0)
    }
}

/// One ladder entry of the moment check.
#[derive(Debug, Clone, Copy)]
pub struct LyapunovRow {
    pub t: f64,
    pub m_of_t: f64,
    pub m_over_t: f64,
    pub se: f64,
}

#[derive(Debug, Clone)]
pub struct LyapunovReport {
    pub rows: Vec<LyapunovRow>,
    /// max/min of `M(t)/t` across the ladder.
    pub ratio: f64,
    pub exponent: f64,
    pub pass: bool,
}

/// Moment bound diagnostic: estimates
/// `M(t) = E int_0^t ||X(s)||_V^{alpha + theta_hat - 2} ds`
/// by left-endpoint trajectory quadrature over an ensemble, then checks that
/// `M(t)/t` stays within a factor two across the horizon ladder — the
/// affine-in-time growth that powers occupation-measure tightness.
pub fn lyapunov_moment_check(
    x: &GridFunction,
    op: &DriftOperator,
    ns: &NormSuite,
    noise: &LevyNoiseModel,
    lc: &LyapunovConfig,
    horizons: &[f64],
    paths: usize,
    template: &SimConfig,
) -> Result<LyapunovReport, CoreError> {
    lc.validate(op, noise)?;
    if horizons.len() < 2 {
        return Err(CoreError::invalid("horizon ladder needs at least two entries"));
    }
    let exponent = op.coercivity_exponent() + lc.theta_hat - 2.0;
    let horizon = *horizons.last().unwrap();
    let per_path: Vec<Vec<f64>> = par_paths(paths, |i| {
        let cfg = SimConfig {
            horizon,
            truncation: Truncation::Full,
            extra_record_times: horizons.to_vec(),
            stream: template.stream.child(STREAM_BLOCK + i as u64),
            ..template.clone()
        };
        let path = evolve_full(x, op, ns, noise, &cfg)?;
        let mut integrals = Vec::with_capacity(horizons.len());
        let mut acc = 0.0;
        let mut ladder_idx = 0;
        for w in path.points.windows(2) {
            let dt = w[1].time - w[0].time;
            acc += w[0].v_norm.powf(exponent) * dt;
            while ladder_idx < horizons.len() && w[1].time >= horizons[ladder_idx] - 1e-12 {
                integrals.push(acc);
                ladder_idx += 1;
            }
        }
        while integrals.len() < horizons.len() {
            integrals.push(acc);
        }
        Ok(integrals)
    })?;

    let mut rows = Vec::with_capacity(horizons.len());
    for (k, &t) in horizons.iter().enumerate() {
        let vals: Vec<f64> = per_path.iter().map(|v| v[k]).collect();
        let (mean, se) = stats::mean_se(&vals);
        rows.push(LyapunovRow {
            t,
            m_of_t: mean,
            m_over_t: mean / t,
            se,
        });
    }
    let rates: Vec<f64> = rows.iter().map(|r| r.m_over_t).collect();
    let max = rates.iter().cloned().fold(f64::MIN, f64::max);
    let min = rates.iter().cloned().fold(f64::MAX, f64::min);
    let (ratio, pass) = if max <= 0.0 {
        (1.0, true)
    } else {
        let ratio = max / min.max(1e-300);
        (ratio, ratio <= 2.0)
    };
    Ok(LyapunovReport {
        rows,
        ratio,
        exponent,
        pass,
    })
}

/// Convenience conversion of an accessibility report into the generic
/// verifier format.
pub fn accessibility_as_report(
    report: &AccessibilityReport,
    template: &SimConfig,
) -> VerifierReport {
    let mut out = VerifierReport {
        claim: "accessibility".into(),
        pass: report.evidence,
        statistics: Vec::new(),
        parameters: Vec::new(),
        seed: template.stream.seed,
        stream_id: template.stream.stream_id,
        notes: report.note.iter().cloned().collect(),
    };
    for s in &report.per_time {
        out.statistics.push(Statistic::with_ci(
            format!("p_hat_at_{}", s.time),
            s.p_hat,
            s.cp_lower,
            1.0,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::HKind;
    use crate::rng::RngStream;

    #[test]
    fn wasserstein_basics() {
        assert_eq!(wasserstein1_1d(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        // translation by c
        let w = wasserstein1_1d(&[0.0, 0.0, 0.0], &[0.7, 0.7, 0.7]).unwrap();
        assert!((w - 0.7).abs() < 1e-15);
        // exhaustive optimal matching on three points gives exactly 1
        let w = wasserstein1_1d(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
        assert!((w - 1.0).abs() < 1e-15);
        assert!(wasserstein1_1d(&[], &[1.0]).is_err());
    }

    #[test]
    fn wasserstein_is_a_metric_on_samples() {
        let mut rng = RngStream::new(50, 0).rng();
        use rand::Rng;
        for _ in 0..100 {
            let a: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
            let b: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
            let c: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
            let ab = wasserstein1_1d(&a, &b).unwrap();
            let ba = wasserstein1_1d(&b, &a).unwrap();
            assert_eq!(ab, ba);
            let ac = wasserstein1_1d(&a, &c).unwrap();
            let cb = wasserstein1_1d(&c, &b).unwrap();
            assert!(ab <= ac + cb + 1e-12);
        }
        // zero iff sorted-equal
        let a = vec![3.0, 1.0, 2.0];
        let b = vec![1.0, 2.0, 3.0];
        assert_eq!(wasserstein1_1d(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn accessibility_vacuous_radius() {
        let op = DriftOperator::p_laplace(1.5).unwrap();
        let ns = NormSuite::for_operator(&op);
        let noise =
            LevyNoiseModel::cylindrical_stable(1.5, vec![0.1], 16, HKind::L2, 0.05).unwrap();
        let query = AccessibilityQuery {
            initial: GridFunction::sine_mode(1, 16),
            radius: 1e9,
            times: vec![0.5, 1.0],
            paths: 32,
        };
        let template = SimConfig::new(1.0, RngStream::new(60, 0));
        let report = estimate_accessibility(&query, &op, &ns, &noise, &template).unwrap();
        for s in &report.per_time {
            assert_eq!(s.p_hat, 1.0);
        }
        assert!(report.evidence);
        assert_eq!(report.window_len, 2);
    }

    #[test]
    fn accessibility_noise_free_decay_reaches_ball() {
        let op = DriftOperator::p_laplace(1.5).unwrap();
        let ns = NormSuite::for_operator(&op);
        let noise = LevyNoiseModel::silent(16, HKind::L2);
        let x = GridFunction::sine_mode(1, 16);
        let query = AccessibilityQuery {
            initial: x,
            radius: 0.1,
            times: vec![4.0, 5.0],
            paths: 8,
        };
        let template = SimConfig::new(5.0, RngStream::new(61, 0));
        let report = estimate_accessibility(&query, &op, &ns, &noise, &template).unwrap();
        assert!(report.evidence);
        assert_eq!(report.per_time.last().unwrap().p_hat, 1.0);
    }

    #[test]
    fn accessibility_monotone_in_radius() {
        let op = DriftOperator::p_laplace(1.5).unwrap();
        let ns = NormSuite::for_operator(&op);
        let noise =
            LevyNoiseModel::cylindrical_stable(1.5, vec![0.2, 0.1], 16, HKind::L2, 0.02).unwrap();
        let x = GridFunction::sine_mode(1, 16);
        let template = SimConfig::new(2.0, RngStream::new(62, 0));
        let run = |radius: f64| {
            let query = AccessibilityQuery {
                initial: x.clone(),
                radius,
                times: vec![1.0, 2.0],
                paths: 64,
            };
            estimate_accessibility(&query, &op, &ns, &noise, &template).unwrap()
        };
        let small = run(0.1);
        let large = run(0.3);
        for (a, b) in small.per_time.iter().zip(&large.per_time) {
            assert!(b.successes >= a.successes);
        }
    }

    #[test]
    fn occupation_sample_count_matches_grid_formula() {
        let op = DriftOperator::p_laplace(1.5).unwrap();
        let ns = NormSuite::for_operator(&op);
        let noise =
            LevyNoiseModel::cylindrical_stable(1.5, vec![0.2], 16, HKind::L2, 0.05).unwrap();
        let x = GridFunction::sine_mode(1, 16);
        let template = SimConfig::new(8.0, RngStream::new(63, 0)).with_record_dt(0.25);
        let m = occupation_measure(&x, &op, &ns, &noise, Observable::HNorm, 2.0, 8.0, &template)
            .unwrap();
        assert_eq!(m.samples.len(), ((8.0 - 2.0) / 0.25) as usize);
    }

    #[test]
    fn occupation_collapses_without_noise() {
        let op = DriftOperator::p_laplace(1.5).unwrap();
        let ns = NormSuite::for_operator(&op);
        let noise = LevyNoiseModel::silent(16, HKind::L2);
        let x = GridFunction::sine_mode(1, 16);
        let template = SimConfig::new(10.0, RngStream::new(64, 0)).with_record_dt(0.5);
        let m = occupation_measure(&x, &op, &ns, &noise, Observable::HNorm, 5.0, 10.0, &template)
            .unwrap();
        assert!(m.samples.iter().all(|&v| v < 1e-6), "samples {:?}", m.samples);
    }

    #[test]
    fn lyapunov_rejects_heavy_order() {
        let op = DriftOperator::p_laplace(1.5).unwrap();
        let noise =
            LevyNoiseModel::cylindrical_stable(1.5, vec![0.2], 16, HKind::L2, 0.05).unwrap();
        let lc = LyapunovConfig { theta_hat: 1.5 };
        assert!(matches!(
            lc.validate(&op, &noise),
            Err(CoreError::InfiniteTailMoment { .. })
        ));
        let lc = LyapunovConfig { theta_hat: 0.4 };
        assert!(lc.validate(&op, &noise).is_err());
        let lc = LyapunovConfig { theta_hat: 1.0 };
        assert!(lc.validate(&op, &noise).is_ok());
    }

    #[test]
    fn lyapunov_zero_noise_ratio_boundary() {
        // without noise M(t) converges, so M/t halves per horizon doubling;
        // the factor-two bound holds on the tail of the ladder
        let op = DriftOperator::p_laplace(1.5).unwrap();
        let ns = NormSuite::for_operator(&op);
        let noise = LevyNoiseModel::silent(16, HKind::L2);
        let x = GridFunction::sine_mode(1, 16);
        let lc = LyapunovConfig { theta_hat: 1.0 };
        let template = SimConfig::new(20.0, RngStream::new(65, 0)).with_record_dt(0.05);
        let report =
            lyapunov_moment_check(&x, &op, &ns, &noise, &lc, &[10.0, 20.0], 2, &template)
                .unwrap();
        // decayed path contributes nothing beyond extinction
        assert!(report.rows[1].m_of_t <= report.rows[0].m_of_t * 1.001);
        assert!(report.ratio <= 2.0 + 1e-9, "ratio = {}", report.ratio);
    }
}
