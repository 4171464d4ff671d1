//! Exact linear flows: the dissipative-dispersive semigroup, gauge
//! translations and the closed-form solutions used as oracles.

use std::f64::consts::PI;

use log::warn;

use crate::error::{KdnlsError, Result};
use crate::spectral::{GridSpec, SpectralField, C64};

/// Per-mode symbol `ω(k) = i(α/π)k + (β/2π)|k|` of the reduced equation.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedSymbol {
    grid: GridSpec,
    omega: Vec<C64>,
}

impl ReducedSymbol {
    pub fn new(grid: GridSpec, alpha: f64, beta: f64) -> Self {
        let omega = grid
            .wavenumbers()
            .map(|k| reduced_omega(k, alpha, beta))
            .collect();
        Self { grid, omega }
    }

    pub fn omega(&self, k: i64) -> C64 {
        let kk = self.grid.k_max() as i64;
        assert!(k.abs() <= kk);
        self.omega[(k + kk) as usize]
    }

    pub fn values(&self) -> &[C64] {
        &self.omega
    }
}

pub fn reduced_omega(k: i64, alpha: f64, beta: f64) -> C64 {
    let kf = k as f64;
    C64::new(beta / (2.0 * PI) * kf.abs(), alpha / PI * kf)
}

/// `μ = (|β|/2π)‖u₀‖²_{L²}`; rejects `β ≥ 0` (use [`EquationParams::new`]
/// directly for non-dissipative experiments).
///
/// [`EquationParams::new`]: crate::nonlinearity::EquationParams::new
pub fn compute_mu(u0: &SpectralField, beta: f64) -> Result<f64> {
    if beta >= 0.0 {
        return Err(KdnlsError::NonDissipative(beta));
    }
    Ok(beta.abs() * u0.l2_sq() / (2.0 * PI))
}

/// `U_μ(t)φ = F⁻¹[e^{-ik²t - μ|k||t|} φ̂(k)]`; contractive for either sign of `t`.
pub fn apply_semigroup(field: &SpectralField, t: f64, mu: f64) -> SpectralField {
    debug_assert!(mu >= 0.0);
    field.map_modes(|k, c| {
        let kf = k as f64;
        c * C64::new(-mu * kf.abs() * t.abs(), -kf * kf * t).exp()
    })
}

/// Exact solution `û(t,k) = e^{-ik²t + ω(k)‖u₀‖²t} û₀(k)` of the reduced
/// equation. Backward evaluation with `β < 0` is allowed but grows.
pub fn reduced_exact_solution(u0: &SpectralField, t: f64, alpha: f64, beta: f64) -> SpectralField {
    if t < 0.0 && beta < 0.0 {
        warn!("reduced solution evaluated backward in time (t = {t}); modes grow");
    }
    let l2 = u0.l2_sq();
    u0.map_modes(|k, c| {
        let kf = k as f64;
        let exponent = C64::new(0.0, -kf * kf * t) + reduced_omega(k, alpha, beta) * (l2 * t);
        c * exponent.exp()
    })
}

/// Orthonormal coefficient at time `t` of the exact solution with data
/// `(c/√(2π)) e^{ikx}`: `c·e^{-ik²t + iα(|c|²/2π)kt}`.
pub fn single_mode_exact(c: C64, k: i64, t: f64, alpha: f64) -> C64 {
    let kf = k as f64;
    let phase = -kf * kf * t + alpha * c.norm_sqr() / (2.0 * PI) * kf * t;
    c * C64::new(0.0, phase).exp()
}

/// Spatial translation `x ↦ x - νt`, i.e. `û(k) ↦ e^{-ikνt} û(k)`.
pub fn gauge_translate(field: &SpectralField, nu: f64, t: f64) -> SpectralField {
    field.map_modes(|k, c| c * C64::new(0.0, -(k as f64) * nu * t).exp())
}

/// `2μ|k| / ((τ+k²)² + μ²k²)`, the time transform of `e^{-ik²t-μ|k||t|}`.
pub fn poisson_kernel(k: i64, mu: f64, tau: f64) -> f64 {
    let kf = k as f64;
    let a = mu * kf.abs();
    2.0 * a / ((tau + kf * kf).powi(2) + a * a)
}

/// Trapezoidal approximation of `∫_{-W}^{W} e^{-iτt} e^{-ik²t-μ|k||t|} dt`.
pub fn semigroup_time_transform(k: i64, mu: f64, tau: f64, half_window: f64, step: f64) -> C64 {
    let kf = k as f64;
    let n = (half_window / step).round() as i64;
    let h = half_window / n as f64;
    let a = mu * kf.abs();
    let mut sum = C64::new(0.0, 0.0);
    for j in -n..=n {
        let t = j as f64 * h;
        let w = if j.abs() == n { 0.5 } else { 1.0 };
        sum += w * C64::new(-a * t.abs(), -(tau + kf * kf) * t).exp();
    }
    sum * h
}
