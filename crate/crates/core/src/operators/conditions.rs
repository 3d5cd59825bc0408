//! Sampling-based checkers for the structural conditions on the drift:
//! hemicontinuity, the decay envelope, weak dissipativity, and the absence of
//! strong dissipativity for the sub-quadratic exponents.

use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::CoreError;
use crate::grid::GridFunction;
use crate::operators::{duality, pairing, pairing_diff, DriftOperator, NormSuite};
use crate::rng::RngStream;

/// Random probe states: independent Gaussian coefficients on the sine modes
/// with algebraic spectral decay, drawn at several amplitude scales so both
/// the near-zero singular regime and the large-amplitude regime are exercised.
#[derive(Debug, Clone)]
pub struct ProbeConfig {
    pub decay_exponent: f64,
    pub scales: Vec<f64>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            decay_exponent: 1.0,
            scales: vec![0.01, 1.0, 100.0],
        }
    }
}

impl ProbeConfig {
    pub fn sample(&self, n: usize, scale: f64, rng: &mut ChaCha12Rng) -> GridFunction {
        let mut u = GridFunction::zeros(n);
        for j in 1..=n {
            let xi: f64 = StandardNormal.sample(rng);
            let a = scale * xi / (j as f64).powf(self.decay_exponent);
            u.axpy(a, &GridFunction::sine_mode(j, n));
        }
        u
    }

    fn scale_for(&self, index: usize) -> f64 {
        self.scales[index % self.scales.len()]
    }
}

/// Outcome of the weak dissipativity sweep.
#[derive(Debug, Clone)]
pub struct DissipativityReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest observed `<A(v1)-A(v2), v1-v2>`; nonpositive up to roundoff
    /// for a monotone drift.
    pub max_pairing: f64,
    pub tolerance: f64,
}

/// Weak dissipativity: `<A(v1) - A(v2), v1 - v2> <= 0` on random pairs.
pub fn check_weak_dissipativity(
    op: &DriftOperator,
    ns: &NormSuite,
    n: usize,
    sample_count: usize,
    probe: &ProbeConfig,
    stream: RngStream,
) -> DissipativityReport {
    let tolerance = 1e-10;
    let mut rng = stream.rng();
    let mut max_pairing = f64::NEG_INFINITY;
    let mut violations = 0;
    for k in 0..sample_count {
        let v1 = probe.sample(n, probe.scale_for(k), &mut rng);
        let v2 = probe.sample(n, probe.scale_for(k / probe.scales.len()), &mut rng);
        let d = pairing_diff(op, ns, &v1, &v2);
        if d > max_pairing {
            max_pairing = d;
        }
        if d > tolerance {
            violations += 1;
        }
    }
    DissipativityReport {
        samples: sample_count,
        violations,
        max_pairing,
        tolerance,
    }
}

/// Calibrated decay envelope for one exponent.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeEntry {
    pub varpi: f64,
    pub c_tilde: f64,
}

/// Result of calibrating `2<A(v),v> + c_tilde ||v||_H^varpi <= 0` over random
/// probes: the per-exponent largest admissible constants and the entry that
/// predicts the fastest collapse of unit energy.
#[derive(Debug, Clone)]
pub struct DecayCalibration {
    pub table: Vec<EnvelopeEntry>,
    pub best: EnvelopeEntry,
    pub samples: usize,
}

/// Largest `c_tilde` per exponent such that the envelope holds on every probe.
pub fn calibrate_decay_envelope(
    op: &DriftOperator,
    ns: &NormSuite,
    n: usize,
    varpi_grid: &[f64],
    sample_count: usize,
    probe: &ProbeConfig,
    stream: RngStream,
) -> Result<DecayCalibration, CoreError> {
    if varpi_grid.is_empty() {
        return Err(CoreError::invalid("empty exponent grid"));
    }
    let mut rng = stream.rng();
    let mut states = Vec::with_capacity(sample_count);
    while states.len() < sample_count {
        let v = probe.sample(n, probe.scale_for(states.len()), &mut rng);
        if ns.h_norm_sq(&v) > 1e-28 {
            states.push(v);
        }
    }
    let mut table = Vec::with_capacity(varpi_grid.len());
    for &varpi in varpi_grid {
        if varpi <= 0.0 {
            return Err(CoreError::invalid(format!("exponent {varpi} must be positive")));
        }
        let mut c_tilde = f64::INFINITY;
        for v in &states {
            let num = -2.0 * pairing(op, ns, v);
            let den = ns.h_norm(v).powf(varpi);
            let ratio = num / den;
            if ratio < c_tilde {
                c_tilde = ratio;
            }
        }
        table.push(EnvelopeEntry { varpi, c_tilde });
    }
    let best = table
        .iter()
        .copied()
        .filter(|e| e.c_tilde > 0.0 && e.c_tilde.is_finite())
        .min_by(|a, b| {
            let ta = predicted_collapse_time(a.c_tilde, a.varpi, 1.0, 1e-4);
            let tb = predicted_collapse_time(b.c_tilde, b.varpi, 1.0, 1e-4);
            ta.partial_cmp(&tb).unwrap()
        })
        .ok_or_else(|| CoreError::invalid("no exponent admits a positive envelope constant"))?;
    Ok(DecayCalibration {
        table,
        best,
        samples: sample_count,
    })
}

/// Time for the envelope ODE `dE/dt = -c E^{varpi/2}` to drive the squared
/// H-norm from `e0` down to `e_target`.
pub fn predicted_collapse_time(c: f64, varpi: f64, e0: f64, e_target: f64) -> f64 {
    assert!(c > 0.0 && e0 > 0.0 && e_target > 0.0 && e_target <= e0);
    if (varpi - 2.0).abs() < 1e-12 {
        (e0 / e_target).ln() / c
    } else {
        let ex = 1.0 - varpi / 2.0;
        (e0.powf(ex) - e_target.powf(ex)) / (c * ex)
    }
}

/// Hemicontinuity scan along random lines.
#[derive(Debug, Clone)]
pub struct HemicontinuityReport {
    pub lines: usize,
    pub coarse_step: f64,
    pub max_increment: f64,
    pub modulus_bound: f64,
    pub flagged: usize,
}

/// Samples `s -> <A(v1 + s v2), v>` on a uniform grid over [-1, 1] and flags
/// increments exceeding the modulus bound. Probes are normalized in the
/// V-norm (the drift's natural domain). Advisory: a flag means the scan
/// resolution saw a near-jump, not that the map is discontinuous.
pub fn check_hemicontinuity(
    op: &DriftOperator,
    ns: &NormSuite,
    n: usize,
    line_count: usize,
    coarse_step: f64,
    modulus_bound: f64,
    stream: RngStream,
) -> HemicontinuityReport {
    let mut rng = stream.rng();
    let probe = ProbeConfig {
        decay_exponent: 1.0,
        scales: vec![1.0],
    };
    let mut max_increment: f64 = 0.0;
    let mut flagged = 0;
    for _ in 0..line_count {
        let v1 = normalized(&probe.sample(n, 1.0, &mut rng), ns);
        let v2 = normalized(&probe.sample(n, 1.0, &mut rng), ns);
        let v = normalized(&probe.sample(n, 1.0, &mut rng), ns);
        let steps = (2.0 / coarse_step).round() as usize;
        let mut prev = line_value(op, ns, &v1, &v2, &v, -1.0);
        let mut line_max: f64 = 0.0;
        for k in 1..=steps {
            let s = -1.0 + k as f64 * coarse_step;
            let cur = line_value(op, ns, &v1, &v2, &v, s);
            line_max = line_max.max((cur - prev).abs());
            prev = cur;
        }
        if line_max > modulus_bound {
            flagged += 1;
        }
        max_increment = max_increment.max(line_max);
    }
    HemicontinuityReport {
        lines: line_count,
        coarse_step,
        max_increment,
        modulus_bound,
        flagged,
    }
}

pub(crate) fn line_value(
    op: &DriftOperator,
    ns: &NormSuite,
    v1: &GridFunction,
    v2: &GridFunction,
    v: &GridFunction,
    s: f64,
) -> f64 {
    let mut w = v1.clone();
    w.axpy(s, v2);
    duality(op, ns, &w, v)
}

fn normalized(u: &GridFunction, ns: &NormSuite) -> GridFunction {
    let norm = ns.v_norm(u);
    if norm == 0.0 {
        u.clone()
    } else {
        u.scaled(1.0 / norm)
    }
}

/// Scan for a strong dissipativity constant
/// `-<A(v1)-A(v2), v1-v2> >= delta ||v1-v2||_V^alpha` with `alpha = max(2, coercivity)`.
#[derive(Debug, Clone)]
pub struct StrongDissipativityScan {
    pub exponent: f64,
    /// (amplitude, ratio) along the designed one-mode family of growing
    /// amplitude; for the sub-quadratic drifts the ratio decays to zero,
    /// so no positive `delta` exists.
    pub family: Vec<(f64, f64)>,
    /// Infimum of the ratio over random pairs and the designed family.
    pub infimum: f64,
}

pub fn scan_strong_dissipativity(
    op: &DriftOperator,
    ns: &NormSuite,
    n: usize,
    sample_count: usize,
    probe: &ProbeConfig,
    stream: RngStream,
) -> StrongDissipativityScan {
    let exponent = 2.0f64.max(op.coercivity_exponent());
    let mut rng = stream.rng();
    let mut infimum = f64::INFINITY;
    for k in 0..sample_count {
        let v1 = probe.sample(n, probe.scale_for(k), &mut rng);
        let v2 = probe.sample(n, probe.scale_for(k + 1), &mut rng);
        let d = v1.sub(&v2);
        let den = ns.v_norm(&d).powf(exponent);
        if den < 1e-300 {
            continue;
        }
        let ratio = -pairing_diff(op, ns, &v1, &v2) / den;
        if ratio < infimum {
            infimum = ratio;
        }
    }
    let e1 = GridFunction::sine_mode(1, n);
    let mut family = Vec::new();
    for k in 0..=16 {
        let amplitude = 2.0f64.powi(k);
        let v1 = e1.scaled(amplitude);
        let v2 = GridFunction::zeros(n);
        let den = ns.v_norm(&v1).powf(exponent);
        let ratio = -pairing_diff(op, ns, &v1, &v2) / den;
        family.push((amplitude, ratio));
        if ratio < infimum {
            infimum = ratio;
        }
    }
    StrongDissipativityScan {
        exponent,
        family,
        infimum,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p15() -> (DriftOperator, NormSuite) {
        let op = DriftOperator::p_laplace(1.5).unwrap().with_regularization(0.0);
        let ns = NormSuite::for_operator(&op);
        (op, ns)
    }

    fn fd05() -> (DriftOperator, NormSuite) {
        let op = DriftOperator::fast_diffusion(0.5).unwrap();
        let ns = NormSuite::for_operator(&op);
        (op, ns)
    }

    #[test]
    fn identical_pair_has_zero_difference_pairing() {
        let (op, ns) = p15();
        let u = GridFunction::sine_mode(2, 8).scaled(3.0);
        assert_eq!(pairing_diff(&op, &ns, &u, &u), 0.0);
    }

    #[test]
    fn weak_dissipativity_no_violations_p_laplace() {
        let (op, ns) = p15();
        let report = check_weak_dissipativity(
            &op,
            &ns,
            32,
            1000,
            &ProbeConfig::default(),
            RngStream::new(101, 0),
        );
        assert_eq!(report.violations, 0, "max = {}", report.max_pairing);
        assert!(report.max_pairing <= 1e-10);
    }

    #[test]
    fn weak_dissipativity_no_violations_fast_diffusion() {
        let (op, ns) = fd05();
        let report = check_weak_dissipativity(
            &op,
            &ns,
            32,
            1000,
            &ProbeConfig::default(),
            RngStream::new(102, 0),
        );
        assert_eq!(report.violations, 0, "max = {}", report.max_pairing);
    }

    #[test]
    fn decay_envelope_p_laplace_picks_coercivity_exponent() {
        let (op, ns) = p15();
        let cal = calibrate_decay_envelope(
            &op,
            &ns,
            32,
            &[1.25, 1.5, 1.75, 2.0],
            300,
            &ProbeConfig::default(),
            RngStream::new(103, 0),
        )
        .unwrap();
        assert!(cal.best.c_tilde > 0.0);
        assert!((cal.best.varpi - 1.5).abs() < 1e-12, "best varpi = {}", cal.best.varpi);
        // Oracle: explicit minimization of -2*pairing / h_norm^varpi over the
        // same probes is what the calibration does; cross-check the envelope
        // constant is a genuine lower bound on fresh samples.
        let mut rng = RngStream::new(104, 0).rng();
        let probe = ProbeConfig::default();
        for k in 0..200 {
            let v = probe.sample(32, probe.scales[k % 3], &mut rng);
            let lhs = 2.0 * pairing(&op, &ns, &v) + cal.best.c_tilde * ns.h_norm(&v).powf(1.5);
            assert!(lhs <= 1e-7 * ns.h_norm(&v).powf(1.5).max(1e-12));
        }
    }

    #[test]
    fn decay_envelope_fast_diffusion_picks_coercivity_exponent() {
        let (op, ns) = fd05();
        let cal = calibrate_decay_envelope(
            &op,
            &ns,
            32,
            &[1.25, 1.5, 1.75, 2.0],
            300,
            &ProbeConfig::default(),
            RngStream::new(105, 0),
        )
        .unwrap();
        assert!(cal.best.c_tilde > 0.0);
        assert!((cal.best.varpi - 1.5).abs() < 1e-12);
    }

    #[test]
    fn hemicontinuity_small_increments() {
        let (mut op, ns) = p15();
        op = op.with_regularization(1e-8);
        let report = check_hemicontinuity(&op, &ns, 16, 8, 1e-3, 1e-1, RngStream::new(106, 0));
        assert_eq!(report.flagged, 0, "max increment {}", report.max_increment);
        assert!(report.max_increment < 1e-1);

        let (op, ns) = fd05();
        let report = check_hemicontinuity(&op, &ns, 16, 8, 1e-3, 1e-1, RngStream::new(107, 0));
        assert_eq!(report.flagged, 0, "max increment {}", report.max_increment);
    }

    #[test]
    fn hemicontinuity_constant_line_is_constant() {
        let (op, ns) = p15();
        let v1 = GridFunction::sine_mode(1, 8);
        let v2 = GridFunction::zeros(8);
        let v = GridFunction::sine_mode(2, 8);
        let a = line_value(&op, &ns, &v1, &v2, &v, -0.7);
        let b = line_value(&op, &ns, &v1, &v2, &v, 0.9);
        assert_eq!(a, b);
    }

    #[test]
    fn hemicontinuity_dense_resample_agrees() {
        // Oracle: around the coarse maximum, resampling at step 1e-5 must not
        // reveal increments larger than the coarse scan suggested.
        let (op, ns) = p15();
        let mut rng = RngStream::new(108, 0).rng();
        let probe = ProbeConfig {
            decay_exponent: 1.0,
            scales: vec![1.0],
        };
        let v1 = probe.sample(16, 1.0, &mut rng);
        let v2 = probe.sample(16, 1.0, &mut rng);
        let v = probe.sample(16, 1.0, &mut rng);
        let mut max_fine: f64 = 0.0;
        let mut prev = line_value(&op, &ns, &v1, &v2, &v, -0.001);
        for k in 1..=200 {
            let s = -0.001 + k as f64 * 1e-5;
            let cur = line_value(&op, &ns, &v1, &v2, &v, s);
            max_fine = max_fine.max((cur - prev).abs());
            prev = cur;
        }
        // Fine increments are two orders below the coarse modulus bound.
        assert!(max_fine < 1e-3, "max_fine = {max_fine}");
    }

    #[test]
    fn strong_dissipativity_ratio_vanishes_for_singular_p() {
        let (op, ns) = p15();
        let scan = scan_strong_dissipativity(
            &op,
            &ns,
            32,
            200,
            &ProbeConfig::default(),
            RngStream::new(109, 0),
        );
        // Closed form on the one-mode family: ratio = ||v||_V^{p-2}, so the
        // largest amplitude gives the smallest ratio.
        let (_, first) = scan.family[0];
        let (_, last) = scan.family[scan.family.len() - 1];
        assert!(last < first * 1e-2, "ratio failed to decay: {first} -> {last}");
        assert!(scan.infimum < 1e-2);
    }

    #[test]
    fn strong_dissipativity_holds_in_linear_case() {
        let op = DriftOperator::p_laplace(2.0).unwrap();
        let ns = NormSuite::for_operator(&op);
        let scan = scan_strong_dissipativity(
            &op,
            &ns,
            32,
            200,
            &ProbeConfig::default(),
            RngStream::new(110, 0),
        );
        // For the Laplacian the pairing equals the squared gradient-L2 norm,
        // so the ratio is identically 1.
        assert!(scan.infimum > 0.9, "infimum = {}", scan.infimum);
    }
}
