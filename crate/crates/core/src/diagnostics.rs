//! Post-processing of trajectories: norm series, the L² law residual,
//! tail decay and a priori bound monitors.

use serde::{Deserialize, Serialize};

use crate::error::{KdnlsError, Result};
use crate::integrator::Trajectory;

/// Per-step slack used by the monotonicity checks on `‖u‖²_{L²}`.
pub const MONOTONE_SLACK: f64 = 1e-10;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub times: Vec<f64>,
    pub l2_sq: Vec<f64>,
    /// Sobolev indices of the `hs_norm` series.
    pub hs_indices: Vec<f64>,
    /// `hs_norm[i][j]` is `‖u(t_j)‖_{H^{s_i}}`.
    pub hs_norm: Vec<Vec<f64>>,
    pub h1_norm: Vec<f64>,
    pub dissipation_integrand: Vec<f64>,
    pub l2_identity_residual: Vec<f64>,
    /// Fraction of `‖u‖²_{L²}` carried by `|k| > K/2`.
    pub tail_fraction: Vec<f64>,
}

impl DiagnosticsRecord {
    pub fn from_trajectory(traj: &Trajectory, hs_indices: &[f64]) -> Self {
        let half = traj.initial().grid().k_max() / 2;
        let l2_sq: Vec<f64> = traj.states.iter().map(|u| u.l2_sq()).collect();
        let tail_fraction = traj
            .states
            .iter()
            .zip(&l2_sq)
            .map(|(u, &total)| {
                if total > 0.0 {
                    u.tail_l2_sq(half) / total
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            times: traj.times.clone(),
            hs_indices: hs_indices.to_vec(),
            hs_norm: hs_indices
                .iter()
                .map(|&s| traj.states.iter().map(|u| u.sobolev_norm(s)).collect())
                .collect(),
            h1_norm: traj.states.iter().map(|u| u.sobolev_norm(1.0)).collect(),
            dissipation_integrand: traj.dissipation_integrand.clone(),
            l2_identity_residual: l2_identity_residual(traj),
            l2_sq,
            tail_fraction,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_abs_residual(&self) -> f64 {
        max_abs(&self.l2_identity_residual)
    }
}

/// `‖u(t)‖² - ∫₀ᵗ β‖D_x^{1/2}(|u|²)‖² dτ - ‖u₀‖²`, trapezoid over stored integrands.
pub fn l2_identity_residual(traj: &Trajectory) -> Vec<f64> {
    let l0 = traj.initial().l2_sq();
    let mut integral = 0.0;
    let mut out = Vec::with_capacity(traj.len());
    out.push(0.0);
    for j in 1..traj.len() {
        let h = traj.times[j] - traj.times[j - 1];
        integral += 0.5 * h * (traj.dissipation_integrand[j] + traj.dissipation_integrand[j - 1]);
        out.push(traj.states[j].l2_sq() - integral - l0);
    }
    out
}

/// `‖P_{>cutoff}u(t)‖_{L²} / ‖P_{>cutoff}u₀‖_{L²}`.
pub fn smoothing_metric(traj: &Trajectory, cutoff: usize) -> Result<Vec<f64>> {
    let base = traj.initial().tail_l2_sq(cutoff);
    if base <= 0.0 {
        return Err(KdnlsError::Undefined(format!(
            "initial data carry no energy above |k| = {cutoff}"
        )));
    }
    Ok(traj
        .states
        .iter()
        .map(|u| (u.tail_l2_sq(cutoff) / base).sqrt())
        .collect())
}

/// Admissible tail ratio `2e^{-μ·cutoff·t/2} + floor`.
pub fn smoothing_bound(mu: f64, cutoff: usize, t: f64, floor: f64) -> f64 {
    2.0 * (-mu * cutoff as f64 * t / 2.0).exp() + floor
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundSummary {
    pub sup_h1_ratio: f64,
    pub min_l2_ratio: f64,
    /// `s₀ = 1/(3 - 2s)`.
    pub s0: f64,
    pub sup_hs0: f64,
    pub h1_ratio: Vec<f64>,
    pub l2_ratio: Vec<f64>,
    pub hs0_norm: Vec<f64>,
    pub l2_non_increasing: bool,
}

/// Size ratios against the initial data; zero data report ratio 1.
pub fn bound_monitors(traj: &Trajectory, s: f64) -> BoundSummary {
    let s0 = 1.0 / (3.0 - 2.0 * s);
    let ratio = |series: Vec<f64>| -> Vec<f64> {
        let base = series[0];
        series
            .iter()
            .map(|&x| if base > 0.0 { x / base } else { 1.0 })
            .collect()
    };
    let h1_ratio = ratio(traj.states.iter().map(|u| u.sobolev_norm(1.0)).collect());
    let l2_ratio = ratio(traj.states.iter().map(|u| u.l2_sq().sqrt()).collect());
    let hs0_norm: Vec<f64> = traj.states.iter().map(|u| u.sobolev_norm(s0)).collect();
    let l2_sq: Vec<f64> = traj.states.iter().map(|u| u.l2_sq()).collect();
    BoundSummary {
        sup_h1_ratio: h1_ratio.iter().copied().fold(f64::MIN, f64::max),
        min_l2_ratio: l2_ratio.iter().copied().fold(f64::MAX, f64::min),
        s0,
        sup_hs0: hs0_norm.iter().copied().fold(0.0, f64::max),
        l2_non_increasing: is_non_increasing(&l2_sq, MONOTONE_SLACK),
        h1_ratio,
        l2_ratio,
        hs0_norm,
    }
}

pub fn is_non_increasing(series: &[f64], slack: f64) -> bool {
    series.windows(2).all(|w| w[1] <= w[0] + slack)
}

pub fn is_non_decreasing(series: &[f64], slack: f64) -> bool {
    series.windows(2).all(|w| w[1] >= w[0] - slack)
}

pub fn max_abs(series: &[f64]) -> f64 {
    series.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `log₂(e_i / e_{i+1})` for errors measured at successively halved steps.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{solve, SolverConfig};
    use crate::nonlinearity::EquationParams;
    use crate::propagator::apply_semigroup;
    use crate::spectral::{GridSpec, SpectralField, C64};

    fn single_mode_run() -> Trajectory {
        let g = GridSpec::with_modes(8).unwrap();
        let u = SpectralField::single_mode(g, 2, C64::new(0.7, 0.2));
        let params = EquationParams::for_data(1.0, -1.0, &u);
        solve(&u, &params, &SolverConfig::new(1e-2, 0.5)).unwrap()
    }

    #[test]
    fn residual_vanishes_for_single_mode() {
        let traj = single_mode_run();
        let r = l2_identity_residual(&traj);
        assert_eq!(r[0], 0.0);
        assert!(max_abs(&r) <= 1e-12);
        assert!(max_abs(&traj.dissipation_integrand) < 1e-14);
    }

    #[test]
    fn monitors_for_single_mode_are_one() {
        let m = bound_monitors(&single_mode_run(), 0.75);
        assert!((m.sup_h1_ratio - 1.0).abs() < 1e-12);
        assert!((m.min_l2_ratio - 1.0).abs() < 1e-12);
        assert!((m.s0 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn monitors_for_zero_data() {
        let g = GridSpec::with_modes(4).unwrap();
        let z = SpectralField::zeros(g);
        let params = EquationParams::for_data(1.0, -1.0, &z);
        let traj = solve(&z, &params, &SolverConfig::new(0.1, 0.3)).unwrap();
        let m = bound_monitors(&traj, 1.0);
        assert_eq!(m.sup_h1_ratio, 1.0);
        assert_eq!(m.min_l2_ratio, 1.0);
        assert!(m.l2_non_increasing);
        assert!(smoothing_metric(&traj, 2).is_err());
    }

    fn linear_trajectory(mu: f64) -> Trajectory {
        let g = GridSpec::with_modes(16).unwrap();
        let u = SpectralField::from_fn(g, |k| C64::new(1.0 / (1.0 + (k * k) as f64), 0.1));
        let params = EquationParams::new(0.0, 0.0, 0.0);
        let mut traj = solve(&u, &params, &SolverConfig::new(0.05, 1.0).experiment()).unwrap();
        traj.states = traj
            .times
            .iter()
            .map(|&t| apply_semigroup(&u, t, mu))
            .collect();
        traj
    }

    #[test]
    fn smoothing_metric_for_linear_flows() {
        let unitary = smoothing_metric(&linear_trajectory(0.0), 8).unwrap();
        assert!(unitary.iter().all(|r| (r - 1.0).abs() < 1e-13));
        let mu = 0.3;
        let traj = linear_trajectory(mu);
        let ratio = smoothing_metric(&traj, 8).unwrap();
        for (r, &t) in ratio.iter().zip(&traj.times) {
            assert!(*r <= (-mu * 8.0 * t).exp() * (1.0 + 1e-14));
            assert!(*r <= smoothing_bound(mu, 8, t, 0.0));
        }
    }

    #[test]
    fn record_alignment() {
        let traj = single_mode_run();
        let rec = DiagnosticsRecord::from_trajectory(&traj, &[0.5, 2.0]);
        assert_eq!(rec.len(), traj.len());
        assert_eq!(rec.hs_norm.len(), 2);
        assert!(rec.hs_norm.iter().all(|s| s.len() == traj.len()));
        assert_eq!(rec.l2_identity_residual[0], 0.0);
        assert!(rec.tail_fraction.iter().all(|&f| f < 1e-20));
    }

    #[test]
    fn orders_and_monotonicity() {
        let o = observed_orders(&[1.0, 0.25, 0.0625]);
        assert_eq!(o, vec![2.0, 2.0]);
        assert!(is_non_increasing(&[3.0, 2.0, 2.0 + 1e-11], 1e-10));
        assert!(!is_non_increasing(&[1.0, 1.1], 1e-10));
        assert!(is_non_decreasing(&[1.0, 1.1, 1.1], 0.0));
    }
}
