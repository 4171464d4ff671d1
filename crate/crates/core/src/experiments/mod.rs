//! Named, reproducible experiments: configuration, run directories with
//! hashed outputs, and the individual studies.

pub mod backward;
pub mod config;
pub mod h_half;
pub mod manifest;
pub mod nonuniform;
pub mod output;
pub mod runs;

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use config::{ExperimentConfig, ExperimentKind, ResolvedConfig};
pub use manifest::{check_manifest, Assertion, CheckReport, RunManifest, RunWriter};

use crate::error::Result;
use crate::spectral::{GridSpec, SpectralField, C64};

/// Everything a run reports besides its data files.
#[derive(Debug, Default)]
pub struct RunLog {
    pub assertions: Vec<Assertion>,
    pub calibration: BTreeMap<String, f64>,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub notes: Vec<String>,
}

impl RunLog {
    pub fn check(&mut self, assertion: Assertion) {
        log::info!(
            "{} {}: {}",
            if assertion.passed { "PASS" } else { "FAIL" },
            assertion.name,
            assertion.detail
        );
        self.assertions.push(assertion);
    }

    pub fn calibrate(&mut self, name: &str, value: f64) {
        self.calibration.insert(name.to_string(), value);
    }

    pub fn param(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.parameters.insert(name.to_string(), v);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

/// Runs the configured experiment, writing data files and `manifest.json`
/// into `config.output_dir`.
pub fn run_experiment(config: &ResolvedConfig) -> Result<RunManifest> {
    config.validate()?;
    let start = Instant::now();
    let mut writer = RunWriter::create(&config.output_dir)?;
    let mut log = RunLog::default();
    match config.experiment {
        ExperimentKind::L2law => runs::run_l2law(config, &mut writer, &mut log)?,
        ExperimentKind::SingleMode => runs::run_single_mode(config, &mut writer, &mut log)?,
        ExperimentKind::PicardDemo => runs::run_picard_demo(config, &mut writer, &mut log)?,
        ExperimentKind::GlobalDecay => runs::run_global_decay(config, &mut writer, &mut log)?,
        ExperimentKind::Nonuniform => nonuniform::run_nonuniform(config, &mut writer, &mut log)?,
        ExperimentKind::Backward => backward::run_backward(config, &mut writer, &mut log)?,
        ExperimentKind::HHalf => h_half::run_h_half(config, &mut writer, &mut log)?,
    }
    let manifest = RunManifest {
        experiment: config.experiment,
        config: config.clone(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        parameters: log.parameters,
        wall_time_s: start.elapsed().as_secs_f64(),
        assertions: log.assertions,
        calibration: log.calibration,
        notes: log.notes,
        files: Vec::new(),
        passed: false,
    };
    writer.finish(manifest)
}

/// Uniform phases in `[0, 2π)` in the order `k = 0, 1, -1, 2, -2, …`, so a
/// field on a larger grid extends the one on a smaller grid.
pub fn seeded_phases(seed: u64, k_max: usize) -> impl Fn(i64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phases: Vec<f64> = (0..2 * k_max + 1).map(|_| rng.gen_range(0.0..TAU)).collect();
    move |k: i64| {
        let idx = if k > 0 { 2 * k - 1 } else { -2 * k };
        phases[idx as usize]
    }
}

/// `|û(k)| = profile(k)` with seeded random phases.
pub fn random_phase_field(grid: GridSpec, seed: u64, profile: impl Fn(i64) -> f64) -> SpectralField {
    let phase = seeded_phases(seed, grid.k_max());
    SpectralField::from_fn(grid, |k| C64::from_polar(profile(k), phase(k)))
}

/// Rescales `field` to `‖·‖_{H^s} = size`.
pub fn with_sobolev_size(field: &SpectralField, s: f64, size: f64) -> SpectralField {
    let norm = field.sobolev_norm(s);
    if norm == 0.0 {
        return field.clone();
    }
    field.scale(C64::new(size / norm, 0.0))
}

/// Analytic data `|û(k)| ∝ e^{-a|k|}` with seeded phases and `H^s` size `size`.
pub fn analytic_data(grid: GridSpec, seed: u64, rate: f64, s: f64, size: f64) -> SpectralField {
    let f = random_phase_field(grid, seed, |k| (-rate * k.abs() as f64).exp());
    with_sobolev_size(&f, s, size)
}

/// Rough data `|û(k)| ∝ ⟨k⟩^{-p}` with seeded phases and `H^s` size `size`.
pub fn rough_data(grid: GridSpec, seed: u64, power: f64, s: f64, size: f64) -> SpectralField {
    let f = random_phase_field(grid, seed, |k| (1.0 + (k * k) as f64).powf(-power / 2.0));
    with_sobolev_size(&f, s, size)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phases_extend_across_grids() {
        let small = random_phase_field(GridSpec::with_modes(4).unwrap(), 3, |_| 1.0);
        let large = random_phase_field(GridSpec::with_modes(16).unwrap(), 3, |_| 1.0);
        for k in -4..=4 {
            assert_eq!(small.coeff(k), large.coeff(k));
        }
        let other = random_phase_field(GridSpec::with_modes(4).unwrap(), 4, |_| 1.0);
        assert_ne!(small, other);
    }

    #[test]
    fn sizes() {
        let g = GridSpec::with_modes(16).unwrap();
        let u = analytic_data(g, 1, 0.5, 1.0, 0.05);
        assert!((u.sobolev_norm(1.0) - 0.05).abs() < 1e-15);
        let v = rough_data(g, 1, 1.6, 0.0, 0.3);
        assert!((v.l2_sq().sqrt() - 0.3).abs() < 1e-15);
        let ratio = v.coeff(8).norm() / v.coeff(4).norm();
        assert!((ratio - (65.0f64 / 17.0).powf(-0.8)).abs() < 1e-12);
    }
}
