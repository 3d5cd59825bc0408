//! Symmetric pure-jump noise models on the discretized state space.
//!
//! A [`LevyNoiseModel`] carries a symmetric jump intensity on the grid's
//! H-space together with exact samplers for every band of jump norms above
//! the model's inner cutoff. Three constructions are supported:
//!
//! * **cylindrical stable** — independent one-dimensional symmetric stable
//!   jumps with measure `dx / |x|^{1+alpha}` on each basis mode, weighted by
//!   the mode coefficients (zero coefficients deactivate their modes, so the
//!   noise may be degenerate);
//! * **cylindrical generic** — the same construction driven by any symmetric
//!   [`OneDimMeasure`];
//! * **subordinated Wiener** — the jump measure of a Q-Wiener process time
//!   changed by an independent alpha/2-stable subordinator, realized by
//!   sampling subordinator jumps above a derived cutoff and mixing them with
//!   centered Gaussians of covariance `s Q`.
//!
//! Jumps with norm below the inner cutoff are discarded, not replaced by a
//! Gaussian surrogate; because the measures are symmetric the discarded
//! compensator is exactly zero and only a small martingale term is lost. The
//! discarded variance is exposed via [`LevyNoiseModel::discarded_variance`]
//! so every run can report the omission.

mod measure;
mod schedule;

pub use measure::{BandSampler, OneDimMeasure};
pub use schedule::{Band, JumpEvent, JumpSchedule};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::gamma;

use crate::error::CoreError;
use crate::grid::GridFunction;
use crate::operators::HKind;
use crate::rng::RngStream;

/// Tail moment of the jump measure beyond the unit ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailMoment {
    Finite(f64),
    Infinite,
}

impl TailMoment {
    pub fn is_finite(&self) -> bool {
        matches!(self, TailMoment::Finite(_))
    }
}

/// Spectral description of the noise.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseKind {
    CylindricalStable {
        alpha: f64,
        coefficients: Vec<f64>,
    },
    CylindricalGeneric {
        measure: OneDimMeasure,
        coefficients: Vec<f64>,
    },
    SubordinatedWiener {
        alpha: f64,
        covariance_diag: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
struct ActiveMode {
    /// Mode coefficient: beta_j for cylindrical noise, sqrt(q_j) for the
    /// subordinated construction.
    coeff: f64,
    vector: GridFunction,
}

/// A symmetric jump noise model bound to one grid and one H-space.
#[derive(Debug, Clone)]
pub struct LevyNoiseModel {
    kind: NoiseKind,
    n: usize,
    h_kind: HKind,
    inner_cutoff: f64,
    active: Vec<ActiveMode>,
    /// E[(sum q_j xi_j^2)^{alpha/2}] for the subordinated kind; evaluated once
    /// on a fixed internal stream so the value is reproducible.
    mixing_moment: f64,
}

impl LevyNoiseModel {
    pub fn new(
        kind: NoiseKind,
        n: usize,
        h_kind: HKind,
        inner_cutoff: f64,
    ) -> Result<LevyNoiseModel, CoreError> {
        if n == 0 {
            return Err(CoreError::invalid("grid dimension must be positive"));
        }
        if !(inner_cutoff > 0.0) || !inner_cutoff.is_finite() {
            return Err(CoreError::invalid(format!(
                "inner cutoff {inner_cutoff} must be positive and finite"
            )));
        }
        let coefficients: &[f64] = match &kind {
            NoiseKind::CylindricalStable { alpha, coefficients } => {
                OneDimMeasure::Stable { alpha: *alpha }.validate()?;
                coefficients
            }
            NoiseKind::CylindricalGeneric { measure, coefficients } => {
                measure.validate()?;
                coefficients
            }
            NoiseKind::SubordinatedWiener { alpha, covariance_diag } => {
                OneDimMeasure::Stable { alpha: *alpha }.validate()?;
                if covariance_diag.iter().any(|&q| q < 0.0 || !q.is_finite()) {
                    return Err(CoreError::invalid(
                        "covariance diagonal entries must be nonnegative and finite",
                    ));
                }
                covariance_diag
            }
        };
        if coefficients.len() > n {
            return Err(CoreError::invalid(format!(
                "{} mode coefficients exceed the grid dimension {n}",
                coefficients.len()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(CoreError::invalid("mode coefficients must be finite"));
        }
        let subordinated = matches!(kind, NoiseKind::SubordinatedWiener { .. });
        let active: Vec<ActiveMode> = coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(idx, &c)| ActiveMode {
                coeff: if subordinated { c.sqrt() } else { c },
                vector: h_orthonormal_sine_mode(h_kind, idx + 1, n),
            })
            .collect();
        let mut model = LevyNoiseModel {
            kind,
            n,
            h_kind,
            inner_cutoff,
            active,
            mixing_moment: 0.0,
        };
        if subordinated {
            model.mixing_moment = model.compute_mixing_moment();
        }
        Ok(model)
    }

    /// Cylindrical symmetric stable noise with measure `dx/|x|^{1+alpha}` per
    /// active mode.
    pub fn cylindrical_stable(
        alpha: f64,
        coefficients: Vec<f64>,
        n: usize,
        h_kind: HKind,
        inner_cutoff: f64,
    ) -> Result<LevyNoiseModel, CoreError> {
        LevyNoiseModel::new(
            NoiseKind::CylindricalStable { alpha, coefficients },
            n,
            h_kind,
            inner_cutoff,
        )
    }

    /// Model with no jumps at all (every coefficient zero).
    pub fn silent(n: usize, h_kind: HKind) -> LevyNoiseModel {
        LevyNoiseModel::cylindrical_stable(1.5, Vec::new(), n, h_kind, 1e-4).unwrap()
    }

    pub fn kind(&self) -> &NoiseKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn h_kind(&self) -> HKind {
        self.h_kind
    }

    pub fn inner_cutoff(&self) -> f64 {
        self.inner_cutoff
    }

    pub fn stability_index(&self) -> Option<f64> {
        match &self.kind {
            NoiseKind::CylindricalStable { alpha, .. }
            | NoiseKind::SubordinatedWiener { alpha, .. } => Some(*alpha),
            NoiseKind::CylindricalGeneric { measure, .. } => Some(measure.alpha()),
        }
    }

    pub fn is_silent(&self) -> bool {
        self.active.is_empty()
    }

    fn one_d_measure(&self) -> Option<OneDimMeasure> {
        match &self.kind {
            NoiseKind::CylindricalStable { alpha, .. } => {
                Some(OneDimMeasure::Stable { alpha: *alpha })
            }
            NoiseKind::CylindricalGeneric { measure, .. } => Some(measure.clone()),
            NoiseKind::SubordinatedWiener { .. } => None,
        }
    }

    /// Levy measure scale `(alpha/2) / Gamma(1 - alpha/2)` of the alpha/2
    /// stable subordinator with Laplace exponent `s^{alpha/2}`.
    fn subordinator_scale(alpha: f64) -> f64 {
        (alpha / 2.0) / gamma(1.0 - alpha / 2.0)
    }

    /// Subordinator jump cutoff derived from the inner norm cutoff through
    /// `E ||z||^2 = s * trace(Q)`.
    fn subordinator_cutoff(&self) -> Option<f64> {
        let trace: f64 = self.active.iter().map(|m| m.coeff * m.coeff).sum();
        if trace <= 0.0 {
            None
        } else {
            Some(self.inner_cutoff * self.inner_cutoff / trace)
        }
    }

    fn compute_mixing_moment(&self) -> f64 {
        let alpha = match &self.kind {
            NoiseKind::SubordinatedWiener { alpha, .. } => *alpha,
            _ => unreachable!(),
        };
        if self.active.is_empty() {
            return 0.0;
        }
        if self.active.len() == 1 {
            let q = self.active[0].coeff * self.active[0].coeff;
            // E |xi|^alpha = 2^{alpha/2} Gamma((alpha+1)/2) / sqrt(pi)
            let abs_moment =
                2.0f64.powf(alpha / 2.0) * gamma((alpha + 1.0) / 2.0) / std::f64::consts::PI.sqrt();
            return q.powf(alpha / 2.0) * abs_moment;
        }
        let mut rng = RngStream::new(0x6d69_7869_6e67, 0).rng();
        let samples = 1 << 16;
        let mut acc = 0.0;
        for _ in 0..samples {
            let mut g = 0.0;
            for mode in &self.active {
                let xi: f64 = StandardNormal.sample(&mut rng);
                g += mode.coeff * mode.coeff * xi * xi;
            }
            acc += g.powf(alpha / 2.0);
        }
        acc / samples as f64
    }

    /// Rate of jumps with norm above `eps`: `nu(||z||_H > eps)`.
    pub fn large_jump_rate(&self, eps: f64) -> Result<f64, CoreError> {
        if eps < self.inner_cutoff {
            return Err(CoreError::CutoffViolation {
                requested: eps,
                cutoff: self.inner_cutoff,
            });
        }
        Ok(self.tail_rate_unchecked(eps))
    }

    fn tail_rate_unchecked(&self, eps: f64) -> f64 {
        match &self.kind {
            NoiseKind::SubordinatedWiener { alpha, .. } => {
                Self::subordinator_scale(*alpha) * (2.0 / alpha) * eps.powf(-alpha)
                    * self.mixing_moment
            }
            _ => {
                let measure = self.one_d_measure().unwrap();
                self.active
                    .iter()
                    .map(|m| measure.tail(eps / m.coeff.abs()))
                    .sum()
            }
        }
    }

    /// Truncated second moment `int_{||z|| <= eps} ||z||^2 nu(dz)`; monotone
    /// nondecreasing in `eps`.
    pub fn small_jump_variance(&self, eps: f64) -> f64 {
        assert!(eps > 0.0, "cutoff must be positive");
        match &self.kind {
            NoiseKind::SubordinatedWiener { alpha, .. } => {
                Self::subordinator_scale(*alpha) * (2.0 / (2.0 - alpha)) * eps.powf(2.0 - alpha)
                    * self.mixing_moment
            }
            _ => {
                let measure = self.one_d_measure().unwrap();
                self.active
                    .iter()
                    .map(|m| {
                        m.coeff * m.coeff * measure.trunc_second_moment(eps / m.coeff.abs())
                    })
                    .sum()
            }
        }
    }

    /// Variance discarded below the inner cutoff; reported in run manifests.
    pub fn discarded_variance(&self) -> f64 {
        if self.is_silent() {
            0.0
        } else {
            self.small_jump_variance(self.inner_cutoff)
        }
    }

    /// `int_{||z|| > 1} ||z||^theta nu(dz)`, with an explicit infinity flag.
    pub fn tail_moment(&self, theta: f64) -> Result<TailMoment, CoreError> {
        if !(theta > 0.0 && theta <= 2.0) {
            return Err(CoreError::invalid(format!(
                "tail moment order {theta} outside (0, 2]"
            )));
        }
        match &self.kind {
            NoiseKind::SubordinatedWiener { alpha, .. } => {
                if self.active.is_empty() {
                    return Ok(TailMoment::Finite(0.0));
                }
                if theta < *alpha {
                    Ok(TailMoment::Finite(
                        Self::subordinator_scale(*alpha) * (2.0 / (alpha - theta))
                            * self.mixing_moment,
                    ))
                } else {
                    Ok(TailMoment::Infinite)
                }
            }
            _ => {
                let measure = self.one_d_measure().unwrap();
                let mut total = 0.0;
                for m in &self.active {
                    let beta = m.coeff.abs();
                    match measure.tail_moment_above(1.0 / beta, theta) {
                        Some(v) => total += beta.powf(theta) * v,
                        None => return Ok(TailMoment::Infinite),
                    }
                }
                Ok(TailMoment::Finite(total))
            }
        }
    }

    /// Compensator `int_band z nu(dz)`; identically zero for these symmetric
    /// measures (each mode's signed first moment cancels exactly), kept as an
    /// explicit operation for asymmetric extensions.
    pub fn compensator_drift(&self, band: Band) -> GridFunction {
        let mut out = GridFunction::zeros(self.n);
        if band.is_degenerate() {
            return out;
        }
        match &self.kind {
            NoiseKind::SubordinatedWiener { .. } => out,
            _ => {
                let measure = self.one_d_measure().unwrap();
                for m in &self.active {
                    let beta = m.coeff.abs();
                    let moment =
                        measure.signed_first_moment_band(band.lo / beta, band.hi / beta);
                    out.axpy(m.coeff * moment, &m.vector);
                }
                out
            }
        }
    }

    fn check_band(&self, band: Band) -> Result<(), CoreError> {
        if band.lo < self.inner_cutoff {
            return Err(CoreError::CutoffViolation {
                requested: band.lo,
                cutoff: self.inner_cutoff,
            });
        }
        Ok(())
    }

    /// Compound-Poisson realization of all jumps with norm in `band` over
    /// `[0, horizon]`. Deterministic given the stream.
    pub fn sample_schedule(
        &self,
        band: Band,
        horizon: f64,
        stream: RngStream,
    ) -> Result<JumpSchedule, CoreError> {
        self.check_band(band)?;
        if !(horizon > 0.0) {
            return Err(CoreError::invalid("horizon must be positive"));
        }
        if band.is_degenerate() || self.is_silent() {
            return Ok(JumpSchedule::empty(horizon, band));
        }
        match &self.kind {
            NoiseKind::SubordinatedWiener { .. } => {
                self.subordinated_schedule(band, horizon, stream)
            }
            _ => {
                let measure = self.one_d_measure().unwrap();
                let mut channels = Vec::new();
                let mut total_rate = 0.0;
                for m in &self.active {
                    let beta = m.coeff.abs();
                    let rate = measure.band_mass(band.lo / beta, band.hi / beta);
                    if rate > 0.0 {
                        total_rate += rate;
                        channels.push((
                            total_rate,
                            m,
                            measure.band_sampler(band.lo / beta, band.hi / beta),
                        ));
                    }
                }
                if total_rate <= 0.0 {
                    return Ok(JumpSchedule::empty(horizon, band));
                }
                let mut rng = stream.rng();
                let mut events = Vec::new();
                let mut t = 0.0;
                loop {
                    let u: f64 = rng.random();
                    t += -(1.0 - u).ln() / total_rate;
                    if t > horizon {
                        break;
                    }
                    let pick: f64 = rng.random::<f64>() * total_rate;
                    let (_, mode, sampler) = channels
                        .iter()
                        .find(|(cum, _, _)| pick < *cum)
                        .unwrap_or(channels.last().unwrap());
                    let magnitude = sampler.sample_abs(rng.random());
                    let signed = if rng.random::<f64>() < 0.5 {
                        magnitude
                    } else {
                        -magnitude
                    };
                    let amplitude = mode.coeff * signed;
                    events.push(JumpEvent {
                        time: t,
                        vector: mode.vector.scaled(amplitude),
                        norm: amplitude.abs(),
                    });
                }
                Ok(JumpSchedule { events, horizon, band })
            }
        }
    }

    /// Jump schedule of the subordinated construction: subordinator jumps
    /// `s_k` above the derived cutoff, each mixed into a centered Gaussian
    /// with covariance `s_k Q`; events outside the band are thinned away.
    pub fn subordinated_schedule(
        &self,
        band: Band,
        horizon: f64,
        stream: RngStream,
    ) -> Result<JumpSchedule, CoreError> {
        let alpha = match &self.kind {
            NoiseKind::SubordinatedWiener { alpha, .. } => *alpha,
            _ => {
                return Err(CoreError::invalid(
                    "subordinated schedule requires a subordinated-Wiener model",
                ))
            }
        };
        self.check_band(band)?;
        let s_min = match self.subordinator_cutoff() {
            Some(s) => s,
            None => return Ok(JumpSchedule::empty(horizon, band)),
        };
        let base_rate =
            Self::subordinator_scale(alpha) * (2.0 / alpha) * s_min.powf(-alpha / 2.0);
        let mut rng = stream.rng();
        let mut events = Vec::new();
        let mut t = 0.0;
        loop {
            let u: f64 = rng.random();
            t += -(1.0 - u).ln() / base_rate;
            if t > horizon {
                break;
            }
            let v: f64 = rng.random();
            let s = s_min * (1.0 - v).powf(-2.0 / alpha);
            let sqrt_s = s.sqrt();
            let mut vector = GridFunction::zeros(self.n);
            let mut norm_sq = 0.0;
            for mode in &self.active {
                let xi: f64 = StandardNormal.sample(&mut rng);
                let amp = sqrt_s * mode.coeff * xi;
                norm_sq += amp * amp;
                vector.axpy(amp, &mode.vector);
            }
            let norm = norm_sq.sqrt();
            if band.contains(norm) {
                events.push(JumpEvent { time: t, vector, norm });
            }
        }
        Ok(JumpSchedule { events, horizon, band })
    }

    /// Draw jump vectors from the band-restricted normalized measure,
    /// independent of arrival times. Used by the symmetry and tail verifiers.
    pub fn sample_jumps(
        &self,
        band: Band,
        count: usize,
        stream: RngStream,
    ) -> Result<Vec<GridFunction>, CoreError> {
        self.check_band(band)?;
        if self.is_silent() || band.is_degenerate() {
            return Ok(Vec::new());
        }
        let mut rng = stream.rng();
        match &self.kind {
            NoiseKind::SubordinatedWiener { alpha, .. } => {
                let s_min = match self.subordinator_cutoff() {
                    Some(s) => s,
                    None => return Ok(Vec::new()),
                };
                let mut jumps = Vec::with_capacity(count);
                let mut attempts = 0usize;
                let budget = count.saturating_mul(100_000).max(1_000_000);
                while jumps.len() < count {
                    attempts += 1;
                    if attempts > budget {
                        return Err(CoreError::invalid(
                            "band mass too small for rejection sampling of subordinated jumps",
                        ));
                    }
                    let v: f64 = rng.random();
                    let s = s_min * (1.0 - v).powf(-2.0 / alpha);
                    let sqrt_s = s.sqrt();
                    let mut vector = GridFunction::zeros(self.n);
                    let mut norm_sq = 0.0;
                    for mode in &self.active {
                        let xi: f64 = StandardNormal.sample(&mut rng);
                        let amp = sqrt_s * mode.coeff * xi;
                        norm_sq += amp * amp;
                        vector.axpy(amp, &mode.vector);
                    }
                    if band.contains(norm_sq.sqrt()) {
                        jumps.push(vector);
                    }
                }
                Ok(jumps)
            }
            _ => {
                let measure = self.one_d_measure().unwrap();
                let mut channels = Vec::new();
                let mut total_rate = 0.0;
                for m in &self.active {
                    let beta = m.coeff.abs();
                    let rate = measure.band_mass(band.lo / beta, band.hi / beta);
                    if rate > 0.0 {
                        total_rate += rate;
                        channels.push((
                            total_rate,
                            m,
                            measure.band_sampler(band.lo / beta, band.hi / beta),
                        ));
                    }
                }
                if total_rate <= 0.0 {
                    return Ok(Vec::new());
                }
                let mut jumps = Vec::with_capacity(count);
                for _ in 0..count {
                    let pick: f64 = rng.random::<f64>() * total_rate;
                    let (_, mode, sampler) = channels
                        .iter()
                        .find(|(cum, _, _)| pick < *cum)
                        .unwrap_or(channels.last().unwrap());
                    let magnitude = sampler.sample_abs(rng.random());
                    let signed = if rng.random::<f64>() < 0.5 {
                        magnitude
                    } else {
                        -magnitude
                    };
                    jumps.push(mode.vector.scaled(mode.coeff * signed));
                }
                Ok(jumps)
            }
        }
    }
}

/// Sine mode normalized to unit norm in the given H-space.
pub fn h_orthonormal_sine_mode(h_kind: HKind, j: usize, n: usize) -> GridFunction {
    let mut e = GridFunction::sine_mode(j, n);
    if h_kind == HKind::HMinus1 {
        e.scale(GridFunction::laplacian_eigenvalue(j, n).sqrt());
    }
    e
}
