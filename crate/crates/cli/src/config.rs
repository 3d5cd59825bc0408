//! Experiment configuration: TOML parsing, cross-field validation that
//! reports every violation (not only the first), and construction of the
//! core model objects.

use std::fmt;
use std::path::Path;

use serde::Deserialize;

use jumpflow_core::operators::HKind;
use jumpflow_core::{
    DriftOperator, GridFunction, LevyNoiseModel, NoiseKind, NormSuite, OneDimMeasure, RngStream,
    SimConfig, Truncation,
};

#[derive(Debug)]
pub enum ConfigError {
    Io(std::io::Error),
    Syntax(String),
    Violations(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(e) => write!(f, "cannot read config: {e}"),
            ConfigError::Syntax(e) => write!(f, "config syntax error: {e}"),
            ConfigError::Violations(v) => {
                writeln!(f, "config has {} violation(s):", v.len())?;
                for msg in v {
                    writeln!(f, "  - {msg}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub operator: OperatorBlock,
    pub noise: NoiseBlock,
    pub sim: SimBlock,
    pub seeds: SeedBlock,
    #[serde(default)]
    pub initial: InitialBlock,
    #[serde(default)]
    pub task: TaskBlock,
    /// Raw file contents, kept for the manifest echo.
    #[serde(skip)]
    pub raw: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorBlock {
    pub kind: String,
    pub p: Option<f64>,
    pub r: Option<f64>,
    #[serde(default = "default_delta_reg")]
    pub delta_reg: f64,
    pub grid_size: usize,
    #[serde(default = "default_one")]
    pub conductivity: f64,
}

fn default_delta_reg() -> f64 {
    1e-8
}

fn default_one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseBlock {
    pub kind: String,
    pub alpha: Option<f64>,
    #[serde(default)]
    pub mode_coefficients: Vec<f64>,
    #[serde(default)]
    pub covariance_diag: Vec<f64>,
    pub measure: Option<MeasureBlock>,
    pub inner_cutoff: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureBlock {
    pub family: String,
    pub alpha: f64,
    pub support: Option<f64>,
    pub tempering: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TruncationValue {
    Level(f64),
    Keyword(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimBlock {
    pub horizon: f64,
    pub max_dt: f64,
    #[serde(default = "default_step_tolerance")]
    pub step_tolerance: f64,
    pub truncation: TruncationValue,
    pub record_dt: f64,
}

fn default_step_tolerance() -> f64 {
    0.1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedBlock {
    pub master: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialBlock {
    #[serde(default = "default_initial_kind")]
    pub kind: String,
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default = "default_mode_index")]
    pub mode: usize,
    #[serde(default = "default_one")]
    pub norm: f64,
}

fn default_initial_kind() -> String {
    "mixed".into()
}

fn default_modes() -> usize {
    8
}

fn default_mode_index() -> usize {
    1
}

impl Default for InitialBlock {
    fn default() -> Self {
        InitialBlock {
            kind: default_initial_kind(),
            modes: default_modes(),
            mode: default_mode_index(),
            norm: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskBlock {
    #[serde(default)]
    pub noise_test: NoiseTestTask,
    #[serde(default)]
    pub conditions: ConditionsTask,
    #[serde(default)]
    pub verify: VerifyTask,
    #[serde(default)]
    pub access: AccessTask,
    #[serde(default)]
    pub ergodic: ErgodicTask,
    #[serde(default)]
    pub lyapunov: LyapunovTask,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseTestTask {
    #[serde(default = "default_events")]
    pub events: usize,
    #[serde(default = "default_tail_samples")]
    pub tail_samples: usize,
    #[serde(default = "default_replicates_1000")]
    pub count_replicates: usize,
    #[serde(default = "default_stat_band_lo")]
    pub stat_band_lo: f64,
    #[serde(default = "default_tail_order")]
    pub tail_moment_order: f64,
}

fn default_events() -> usize {
    10_000
}
fn default_tail_samples() -> usize {
    100_000
}
fn default_replicates_1000() -> usize {
    1000
}
fn default_stat_band_lo() -> f64 {
    1.0
}
fn default_tail_order() -> f64 {
    1.0
}

impl Default for NoiseTestTask {
    fn default() -> Self {
        NoiseTestTask {
            events: default_events(),
            tail_samples: default_tail_samples(),
            count_replicates: default_replicates_1000(),
            stat_band_lo: default_stat_band_lo(),
            tail_moment_order: default_tail_order(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionsTask {
    #[serde(default = "default_samples_1000")]
    pub samples: usize,
    #[serde(default = "default_grids")]
    pub grids: Vec<usize>,
    #[serde(default = "default_lines")]
    pub hemicontinuity_lines: usize,
}

fn default_samples_1000() -> usize {
    1000
}
fn default_grids() -> Vec<usize> {
    vec![8, 32, 128]
}
fn default_lines() -> usize {
    16
}

impl Default for ConditionsTask {
    fn default() -> Self {
        ConditionsTask {
            samples: default_samples_1000(),
            grids: default_grids(),
            hemicontinuity_lines: default_lines(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyTask {
    #[serde(default = "default_claims")]
    pub claims: Vec<String>,
    #[serde(default = "default_decay_horizon")]
    pub decay_horizon: f64,
    #[serde(default = "default_decay_target")]
    pub decay_target: f64,
    #[serde(default = "default_a0_samples")]
    pub a0_samples: usize,
    #[serde(default = "default_a12_time")]
    pub a12_time: f64,
    #[serde(default = "default_a12_ladder")]
    pub a12_ladder: Vec<f64>,
    #[serde(default = "default_a12_paths")]
    pub a12_paths: usize,
    #[serde(default = "default_a12_max_dt")]
    pub a12_max_dt: f64,
    #[serde(default = "default_a12_step_tolerance")]
    pub a12_step_tolerance: f64,
    #[serde(default = "default_a13_eta")]
    pub a13_eta: f64,
    #[serde(default = "default_a13_zeta")]
    pub a13_zeta: f64,
    #[serde(default = "default_a13_time")]
    pub a13_time: f64,
    #[serde(default = "default_a13_points")]
    pub a13_points: usize,
    #[serde(default = "default_a13_paths")]
    pub a13_paths: usize,
    #[serde(default = "default_ep_times")]
    pub e_property_times: Vec<f64>,
    #[serde(default = "default_ep_paths")]
    pub e_property_paths: usize,
}

fn default_claims() -> Vec<String> {
    vec![
        "A0".into(),
        "A1-1".into(),
        "A1-2".into(),
        "A1-3".into(),
        "e-property".into(),
    ]
}
fn default_decay_horizon() -> f64 {
    5.0
}
fn default_decay_target() -> f64 {
    1e-2
}
fn default_a0_samples() -> usize {
    10_000
}
fn default_a12_time() -> f64 {
    0.5
}
fn default_a12_ladder() -> Vec<f64> {
    vec![0.5, 0.25, 0.125]
}
fn default_a12_paths() -> usize {
    2000
}
fn default_a12_max_dt() -> f64 {
    0.002
}
fn default_a12_step_tolerance() -> f64 {
    0.02
}
fn default_a13_eta() -> f64 {
    0.5
}
fn default_a13_zeta() -> f64 {
    0.25
}
fn default_a13_time() -> f64 {
    0.5
}
fn default_a13_points() -> usize {
    8
}
fn default_a13_paths() -> usize {
    500
}
fn default_ep_times() -> Vec<f64> {
    vec![0.1, 0.5, 1.0]
}
fn default_ep_paths() -> usize {
    1000
}

impl Default for VerifyTask {
    fn default() -> Self {
        VerifyTask {
            claims: default_claims(),
            decay_horizon: default_decay_horizon(),
            decay_target: default_decay_target(),
            a0_samples: default_a0_samples(),
            a12_time: default_a12_time(),
            a12_ladder: default_a12_ladder(),
            a12_paths: default_a12_paths(),
            a12_max_dt: default_a12_max_dt(),
            a12_step_tolerance: default_a12_step_tolerance(),
            a13_eta: default_a13_eta(),
            a13_zeta: default_a13_zeta(),
            a13_time: default_a13_time(),
            a13_points: default_a13_points(),
            a13_paths: default_a13_paths(),
            e_property_times: default_ep_times(),
            e_property_paths: default_ep_paths(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccessTask {
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_access_times")]
    pub times: Vec<f64>,
    #[serde(default = "default_access_paths")]
    pub paths: usize,
}

fn default_radius() -> f64 {
    0.1
}
fn default_access_times() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0]
}
fn default_access_paths() -> usize {
    4000
}

impl Default for AccessTask {
    fn default() -> Self {
        AccessTask {
            radius: default_radius(),
            times: default_access_times(),
            paths: default_access_paths(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErgodicTask {
    #[serde(default = "default_horizons")]
    pub horizons: Vec<f64>,
    #[serde(default = "default_ergodic_record_dt")]
    pub record_dt: f64,
    #[serde(default = "default_burn_in")]
    pub burn_in: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_replicates_4")]
    pub replicates: usize,
    #[serde(default = "default_observables")]
    pub observables: Vec<String>,
}

fn default_horizons() -> Vec<f64> {
    vec![20.0, 40.0, 80.0]
}
fn default_ergodic_record_dt() -> f64 {
    0.05
}
fn default_burn_in() -> f64 {
    10.0
}
fn default_tolerance() -> f64 {
    0.05
}
fn default_replicates_4() -> usize {
    8
}
fn default_observables() -> Vec<String> {
    vec![
        "h-norm".into(),
        "mode-1".into(),
        "mode-2".into(),
        "mode-3".into(),
    ]
}

impl Default for ErgodicTask {
    fn default() -> Self {
        ErgodicTask {
            horizons: default_horizons(),
            record_dt: default_ergodic_record_dt(),
            burn_in: default_burn_in(),
            tolerance: default_tolerance(),
            replicates: default_replicates_4(),
            observables: default_observables(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LyapunovTask {
    #[serde(default = "default_theta_hat")]
    pub theta_hat: f64,
    #[serde(default = "default_lyapunov_horizons")]
    pub horizons: Vec<f64>,
    #[serde(default = "default_lyapunov_paths")]
    pub paths: usize,
}

fn default_theta_hat() -> f64 {
    1.0
}
fn default_lyapunov_horizons() -> Vec<f64> {
    vec![10.0, 20.0, 40.0]
}
fn default_lyapunov_paths() -> usize {
    200
}

impl Default for LyapunovTask {
    fn default() -> Self {
        LyapunovTask {
            theta_hat: default_theta_hat(),
            horizons: default_lyapunov_horizons(),
            paths: default_lyapunov_paths(),
        }
    }
}

/// Parse and validate a configuration file. Every violation is collected and
/// reported, not only the first.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let raw = std::fs::read_to_string(path).map_err(ConfigError::Io)?;
    let mut cfg: ExperimentConfig =
        toml::from_str(&raw).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    cfg.raw = raw;
    let violations = cfg.validate();
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Violations(violations))
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        let op = &self.operator;
        match op.kind.as_str() {
            "p-laplace" => match op.p {
                None => v.push("operator.p is required for kind = \"p-laplace\"".into()),
                Some(p) if !(p > 1.0 && p <= 2.0) => v.push(format!(
                    "operator.p = {p} outside the admissible singular range (1, 2] (p = 2 is the linear oracle case)"
                )),
                _ => {}
            },
            "fast-diffusion" => match op.r {
                None => v.push("operator.r is required for kind = \"fast-diffusion\"".into()),
                Some(r) if !(r > 0.0 && r <= 1.0) => v.push(format!(
                    "operator.r = {r} outside the admissible fast range (0, 1] (r = 1 is the linear oracle case)"
                )),
                _ => {}
            },
            other => v.push(format!(
                "operator.kind = \"{other}\" unknown (expected \"p-laplace\" or \"fast-diffusion\")"
            )),
        }
        if op.grid_size == 0 || op.grid_size > 8192 {
            v.push(format!(
                "operator.grid_size = {} outside [1, 8192]",
                op.grid_size
            ));
        }
        if op.delta_reg < 0.0 {
            v.push("operator.delta_reg must be nonnegative".into());
        }
        if op.conductivity < 0.0 {
            v.push("operator.conductivity must be nonnegative".into());
        }

        let noise = &self.noise;
        match noise.kind.as_str() {
            "cylindrical-stable" | "subordinated-wiener" => match noise.alpha {
                None => v.push(format!(
                    "noise.alpha is required for kind = \"{}\"",
                    noise.kind
                )),
                Some(a) if !(a > 0.0 && a < 2.0) => {
                    v.push(format!("noise.alpha = {a} outside (0, 2)"))
                }
                _ => {}
            },
            "cylindrical-generic" => match &noise.measure {
                None => v.push("noise.measure is required for kind = \"cylindrical-generic\"".into()),
                Some(m) => {
                    if !(m.alpha > 0.0 && m.alpha < 2.0) {
                        v.push(format!("noise.measure.alpha = {} outside (0, 2)", m.alpha));
                    }
                    match m.family.as_str() {
                        "stable" => {}
                        "truncated-stable" => {
                            if m.support.map_or(true, |s| s <= 0.0) {
                                v.push("noise.measure.support must be positive for family = \"truncated-stable\"".into());
                            }
                        }
                        "tempered-stable" => {
                            if m.tempering.map_or(true, |t| t <= 0.0) {
                                v.push("noise.measure.tempering must be positive for family = \"tempered-stable\"".into());
                            }
                        }
                        other => v.push(format!(
                            "noise.measure.family = \"{other}\" unknown (expected stable, truncated-stable, tempered-stable)"
                        )),
                    }
                }
            },
            other => v.push(format!(
                "noise.kind = \"{other}\" unknown (expected cylindrical-stable, cylindrical-generic, subordinated-wiener)"
            )),
        }
        if !(noise.inner_cutoff > 0.0) {
            v.push(format!(
                "noise.inner_cutoff = {} must be positive",
                noise.inner_cutoff
            ));
        }
        let coeffs = if noise.kind == "subordinated-wiener" {
            &noise.covariance_diag
        } else {
            &noise.mode_coefficients
        };
        if coeffs.len() > op.grid_size {
            v.push(format!(
                "noise coefficient count {} exceeds operator.grid_size {}",
                coeffs.len(),
                op.grid_size
            ));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            v.push("noise coefficients must be finite".into());
        }
        if noise.kind == "subordinated-wiener" && noise.covariance_diag.iter().any(|&q| q < 0.0) {
            v.push("noise.covariance_diag entries must be nonnegative".into());
        }

        let sim = &self.sim;
        if !(sim.horizon > 0.0) {
            v.push(format!("sim.horizon = {} must be positive", sim.horizon));
        }
        if !(sim.max_dt > 0.0) {
            v.push(format!("sim.max_dt = {} must be positive", sim.max_dt));
        }
        if !(sim.step_tolerance > 0.0) {
            v.push("sim.step_tolerance must be positive".into());
        }
        if !(sim.record_dt > 0.0) {
            v.push(format!("sim.record_dt = {} must be positive", sim.record_dt));
        }
        match &sim.truncation {
            TruncationValue::Level(eps) => {
                if !(*eps > 0.0 && *eps <= 1.0) {
                    v.push(format!(
                        "sim.truncation = {eps} outside (0, 1] (compensated band stops at the unit norm)"
                    ));
                }
                if *eps < noise.inner_cutoff {
                    v.push(format!(
                        "sim.truncation = {eps} below noise.inner_cutoff = {} (jumps under the cutoff are not simulated)",
                        noise.inner_cutoff
                    ));
                }
            }
            TruncationValue::Keyword(k) if k == "full" => {}
            TruncationValue::Keyword(k) => v.push(format!(
                "sim.truncation = \"{k}\" unknown (expected \"full\" or a level in (0, 1])"
            )),
        }

        match self.initial.kind.as_str() {
            "mixed" => {
                if self.initial.modes == 0 || self.initial.modes > op.grid_size {
                    v.push(format!(
                        "initial.modes = {} outside [1, grid_size]",
                        self.initial.modes
                    ));
                }
            }
            "mode" => {
                if self.initial.mode == 0 || self.initial.mode > op.grid_size {
                    v.push(format!(
                        "initial.mode = {} outside [1, grid_size]",
                        self.initial.mode
                    ));
                }
            }
            other => v.push(format!(
                "initial.kind = \"{other}\" unknown (expected \"mixed\" or \"mode\")"
            )),
        }
        if !(self.initial.norm >= 0.0) {
            v.push("initial.norm must be nonnegative".into());
        }

        // cross-field: Lyapunov order against both the coercivity exponent
        // and the noise tail
        let theta = self.task.lyapunov.theta_hat;
        let alpha_op = match (op.kind.as_str(), op.p, op.r) {
            ("p-laplace", Some(p), _) => Some(p),
            ("fast-diffusion", _, Some(r)) => Some(r + 1.0),
            _ => None,
        };
        if let Some(a) = alpha_op {
            let lower = (2.0 - a).max(0.0);
            if !(theta > lower && theta <= 2.0) {
                v.push(format!(
                    "task.lyapunov.theta_hat = {theta} outside ({lower}, 2] for coercivity exponent {a}"
                ));
            }
        }
        if let Some(alpha) = noise.alpha.or(noise.measure.as_ref().map(|m| m.alpha)) {
            if theta >= alpha && noise.kind != "cylindrical-generic" {
                v.push(format!(
                    "task.lyapunov.theta_hat = {theta} >= noise.alpha = {alpha}: the required noise tail moment diverges"
                ));
            }
        }
        for w in self.task.verify.a12_ladder.windows(2) {
            if w[1] >= w[0] {
                v.push("task.verify.a12_ladder must strictly decrease".into());
                break;
            }
        }
        if !(self.task.verify.a13_zeta > 0.0
            && self.task.verify.a13_zeta <= self.task.verify.a13_eta / 2.0)
        {
            v.push(format!(
                "task.verify.a13_zeta = {} outside (0, eta/2] with eta = {}",
                self.task.verify.a13_zeta, self.task.verify.a13_eta
            ));
        }
        v
    }

    pub fn h_kind(&self) -> HKind {
        match self.operator.kind.as_str() {
            "fast-diffusion" => HKind::HMinus1,
            _ => HKind::L2,
        }
    }

    pub fn build_operator(&self) -> anyhow::Result<(DriftOperator, NormSuite)> {
        let op = match self.operator.kind.as_str() {
            "p-laplace" => DriftOperator::p_laplace(self.operator.p.unwrap())?
                .with_regularization(self.operator.delta_reg)
                .with_conductivity(self.operator.conductivity),
            "fast-diffusion" => DriftOperator::fast_diffusion(self.operator.r.unwrap())?
                .with_conductivity(self.operator.conductivity),
            other => anyhow::bail!("unknown operator kind {other}"),
        };
        let ns = NormSuite::for_operator(&op);
        Ok((op, ns))
    }

    pub fn build_noise(&self) -> anyhow::Result<LevyNoiseModel> {
        let n = self.operator.grid_size;
        let h_kind = self.h_kind();
        let kind = match self.noise.kind.as_str() {
            "cylindrical-stable" => NoiseKind::CylindricalStable {
                alpha: self.noise.alpha.unwrap(),
                coefficients: self.noise.mode_coefficients.clone(),
            },
            "cylindrical-generic" => {
                let m = self.noise.measure.as_ref().unwrap();
                let measure = match m.family.as_str() {
                    "stable" => OneDimMeasure::Stable { alpha: m.alpha },
                    "truncated-stable" => OneDimMeasure::TruncatedStable {
                        alpha: m.alpha,
                        support: m.support.unwrap(),
                    },
                    "tempered-stable" => OneDimMeasure::TemperedStable {
                        alpha: m.alpha,
                        tempering: m.tempering.unwrap(),
                    },
                    other => anyhow::bail!("unknown measure family {other}"),
                };
                NoiseKind::CylindricalGeneric {
                    measure,
                    coefficients: self.noise.mode_coefficients.clone(),
                }
            }
            "subordinated-wiener" => NoiseKind::SubordinatedWiener {
                alpha: self.noise.alpha.unwrap(),
                covariance_diag: self.noise.covariance_diag.clone(),
            },
            other => anyhow::bail!("unknown noise kind {other}"),
        };
        Ok(LevyNoiseModel::new(
            kind,
            n,
            h_kind,
            self.noise.inner_cutoff,
        )?)
    }

    /// Simulation template bound to one purpose stream.
    pub fn build_sim(&self, seed: u64, purpose: u64) -> SimConfig {
        let truncation = match &self.sim.truncation {
            TruncationValue::Level(eps) => Truncation::Level(*eps),
            TruncationValue::Keyword(_) => Truncation::Full,
        };
        SimConfig {
            horizon: self.sim.horizon,
            max_dt: self.sim.max_dt,
            step_tolerance: self.sim.step_tolerance,
            truncation,
            record_dt: self.sim.record_dt,
            extra_record_times: Vec::new(),
            stream: RngStream::new(seed, purpose << 40),
            extinction_floor: 1e-12,
        }
    }

    /// Initial state in the configured H geometry.
    pub fn build_initial(&self, ns: &NormSuite) -> GridFunction {
        let n = self.operator.grid_size;
        let mut x = match self.initial.kind.as_str() {
            "mode" => ns.h_normalized_sine_mode(self.initial.mode, n),
            _ => {
                let mut x = GridFunction::zeros(n);
                for j in 1..=self.initial.modes.min(n) {
                    x.axpy(1.0 / j as f64, &GridFunction::sine_mode(j, n));
                }
                x
            }
        };
        let norm = ns.h_norm(&x);
        if norm > 0.0 {
            x.scale(self.initial.norm / norm);
        }
        x
    }
}
