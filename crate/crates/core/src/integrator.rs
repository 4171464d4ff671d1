//! Time evolution: integrating-factor RK4 in either frame, Picard iteration
//! on the Duhamel formula, and backward integration with a blow-up guard.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{KdnlsError, Result};
use crate::nonlinearity::{renormalized_remainder, EquationParams};
use crate::propagator::{apply_semigroup, gauge_translate};
use crate::spectral::{dissipation_rate, SpectralField, C64};

/// Which form of the equation is integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    /// Equation after the gauge translation; linear part `i∂²_x + (β/2π)‖u₀‖²D_x`.
    Renormalized,
    /// The equation as posed; linear part additionally carries `(α/π)‖u₀‖²∂_x`.
    Original,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    Ifrk4,
    Picard,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub frame: Frame,
    pub scheme: Scheme,
    pub dt: f64,
    pub t_final: f64,
    pub picard_iterations: usize,
    pub picard_quadrature_nodes: usize,
    /// Abort once `‖u(t)‖_{H^s}/‖u₀‖_{H^s}` exceeds this factor.
    pub blowup_guard: f64,
    /// Sobolev index used by the guard, the smallness check and Picard differences.
    pub sobolev_index: f64,
    /// Data above this `H^s` size trigger a warning (calibration constant).
    pub smallness_threshold: f64,
    /// Permits `β ≥ 0`.
    pub experiment_mode: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            frame: Frame::Renormalized,
            scheme: Scheme::Ifrk4,
            dt: 1e-3,
            t_final: 1.0,
            picard_iterations: 6,
            picard_quadrature_nodes: 1001,
            blowup_guard: 1e6,
            sobolev_index: 1.0,
            smallness_threshold: DEFAULT_SMALLNESS,
            experiment_mode: false,
        }
    }
}

/// Calibrated `H¹` smallness used by the contraction and smoothing runs.
pub const DEFAULT_SMALLNESS: f64 = 0.1;

impl SolverConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self {
            dt,
            t_final,
            ..Self::default()
        }
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn experiment(mut self) -> Self {
        self.experiment_mode = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(KdnlsError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(KdnlsError::Config(format!(
                "T must be positive, got {}",
                self.t_final
            )));
        }
        if self.dt > self.t_final * (1.0 + 1e-12) {
            return Err(KdnlsError::Config("dt must not exceed T".into()));
        }
        if self.blowup_guard <= 1.0 {
            return Err(KdnlsError::Config("blowup_guard must exceed 1".into()));
        }
        if self.picard_iterations == 0 {
            return Err(KdnlsError::Config("picard_iterations must be at least 1".into()));
        }
        if self.picard_quadrature_nodes < 2 {
            return Err(KdnlsError::Config(
                "picard_quadrature_nodes must be at least 2".into(),
            ));
        }
        Ok(())
    }

    /// Number of equal steps covering `[0, T]` with step at most `dt`.
    pub fn n_steps(&self) -> usize {
        ((self.t_final / self.dt) - 1e-9).ceil().max(1.0) as usize
    }
}

/// `min(0.1/(K·max(1, ‖u₀‖²_{H^s})), 10⁻²)`.
pub fn recommended_dt(k_max: usize, hs_norm_sq: f64) -> f64 {
    (0.1 / (k_max as f64 * hs_norm_sq.max(1.0))).min(1e-2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuardTrip {
    pub time: f64,
    pub growth: f64,
}

/// Stored solution: one state per accepted step.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Monotone in the direction of integration, starting at 0.
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    /// `β‖D_x^{1/2}(|u|²)‖²_{L²}` at every stored time.
    pub dissipation_integrand: Vec<f64>,
    pub params: EquationParams,
    /// Frame in which `states` are expressed.
    pub frame: Frame,
    pub guard_trip: Option<GuardTrip>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    fn start(u0: &SpectralField, params: EquationParams, frame: Frame) -> Self {
        Self {
            times: vec![0.0],
            states: vec![u0.clone()],
            dissipation_integrand: vec![params.beta * dissipation_rate(u0)],
            params,
            frame,
            guard_trip: None,
            warnings: Vec::new(),
        }
    }

    fn push(&mut self, t: f64, state: SpectralField) {
        self.dissipation_integrand
            .push(self.params.beta * dissipation_rate(&state));
        self.times.push(t);
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial(&self) -> &SpectralField {
        &self.states[0]
    }

    pub fn last(&self) -> &SpectralField {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    /// State nearest to time `t`.
    pub fn state_at(&self, t: f64) -> &SpectralField {
        let idx = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
            .expect("non-empty");
        &self.states[idx]
    }

    /// The same trajectory expressed in the original frame.
    pub fn to_original_frame(&self) -> Trajectory {
        if self.frame == Frame::Original {
            return self.clone();
        }
        let nu = self.params.drift();
        let states = self
            .times
            .iter()
            .zip(&self.states)
            .map(|(&t, v)| gauge_translate(v, -nu, t))
            .collect();
        Trajectory {
            states,
            frame: Frame::Original,
            ..self.clone()
        }
    }

    /// `sup_t ‖self(t) - other(t)‖_{H^s}` over common nodes.
    pub fn sup_distance(&self, other: &Trajectory, s: f64) -> Result<f64> {
        if self.len() != other.len() {
            return Err(KdnlsError::Config(format!(
                "trajectories have different lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        self.states
            .iter()
            .zip(&other.states)
            .try_fold(0.0_f64, |acc, (a, b)| Ok(acc.max(a.distance(b, s)?)))
    }
}

/// Symbol of the exactly integrated linear part in the given frame.
pub fn linear_symbol(k: i64, params: &EquationParams, frame: Frame) -> C64 {
    let kf = k as f64;
    let drift = match frame {
        Frame::Renormalized => 0.0,
        Frame::Original => params.drift() * kf,
    };
    C64::new(params.linear_damping() * kf.abs(), -kf * kf + drift)
}

/// Lawson RK4 stepper with precomputed integrating factors.
struct Ifrk4 {
    params: EquationParams,
    dt: f64,
    half: Vec<C64>,
    full: Vec<C64>,
}

impl Ifrk4 {
    fn new(grid_field: &SpectralField, dt: f64, params: EquationParams, frame: Frame) -> Self {
        let g = grid_field.grid();
        let half = g
            .wavenumbers()
            .map(|k| (linear_symbol(k, &params, frame) * (0.5 * dt)).exp())
            .collect();
        let full = g
            .wavenumbers()
            .map(|k| (linear_symbol(k, &params, frame) * dt).exp())
            .collect();
        Self {
            params,
            dt,
            half,
            full,
        }
    }

    fn rhs(&self, u: &SpectralField) -> SpectralField {
        renormalized_remainder(u, &self.params)
    }

    fn step(&self, u: &SpectralField) -> SpectralField {
        let h = self.dt;
        let e_half = |f: &SpectralField| {
            let mut out = f.clone();
            for (c, e) in out.coeffs_mut().iter_mut().zip(&self.half) {
                *c *= e;
            }
            out
        };
        let e_full = |f: &SpectralField| {
            let mut out = f.clone();
            for (c, e) in out.coeffs_mut().iter_mut().zip(&self.full) {
                *c *= e;
            }
            out
        };
        let hc = |x: f64| C64::new(x, 0.0);

        let k1 = self.rhs(u);
        let eu = e_half(u);
        let mut a = eu.clone();
        a.axpy(hc(0.5 * h), &e_half(&k1)).expect("grid");
        let k2 = self.rhs(&a);
        let mut b = eu;
        b.axpy(hc(0.5 * h), &k2).expect("grid");
        let k3 = self.rhs(&b);
        let mut c = e_full(u);
        c.axpy(hc(h), &e_half(&k3)).expect("grid");
        let k4 = self.rhs(&c);

        let mut out = e_full(u);
        out.axpy(hc(h / 6.0), &e_full(&k1)).expect("grid");
        let mid = k2.add(&k3).expect("grid");
        out.axpy(hc(h / 3.0), &e_half(&mid)).expect("grid");
        out.axpy(hc(h / 6.0), &k4).expect("grid");
        out
    }
}

/// One integrating-factor RK4 step of size `dt` (negative `dt` steps backward).
pub fn step_ifrk4(
    state: &SpectralField,
    dt: f64,
    params: &EquationParams,
    frame: Frame,
) -> Result<SpectralField> {
    let out = Ifrk4::new(state, dt, *params, frame).step(state);
    if !out.is_finite() {
        return Err(KdnlsError::Integration {
            time: dt,
            reason: "non-finite coefficients".into(),
        });
    }
    Ok(out)
}

fn check_regime(params: &EquationParams, config: &SolverConfig) -> Result<()> {
    config.validate()?;
    if !params.is_dissipative() && !config.experiment_mode {
        return Err(KdnlsError::NonDissipative(params.beta));
    }
    Ok(())
}

fn smallness_warning(u0: &SpectralField, config: &SolverConfig) -> Option<String> {
    let size = u0.sobolev_norm(config.sobolev_index);
    (size > config.smallness_threshold).then(|| {
        let msg = format!(
            "‖u₀‖_H^{} = {size:.3e} exceeds the calibrated smallness threshold {:.3e}",
            config.sobolev_index, config.smallness_threshold
        );
        warn!("{msg}");
        msg
    })
}

/// Steps `n` times with signed step `h` in `frame`, stopping at the guard.
/// The state that tripped the guard is kept unless it overflowed.
fn march(
    u0: &SpectralField,
    params: &EquationParams,
    config: &SolverConfig,
    frame: Frame,
    h: f64,
    n: usize,
) -> Result<Trajectory> {
    let mut traj = Trajectory::start(u0, *params, frame);
    traj.warnings.extend(smallness_warning(u0, config));
    let stepper = Ifrk4::new(u0, h, *params, frame);
    let base = u0.sobolev_norm(config.sobolev_index);
    let mut u = u0.clone();
    for j in 1..=n {
        u = stepper.step(&u);
        let t = j as f64 * h;
        if !u.is_finite() {
            // Overflow is the limit of unbounded growth: a guard trip, not a failure.
            traj.guard_trip = Some(GuardTrip {
                time: t,
                growth: f64::INFINITY,
            });
            break;
        }
        let growth = if base > 0.0 {
            u.sobolev_norm(config.sobolev_index) / base
        } else {
            1.0
        };
        traj.push(t, u.clone());
        if growth > config.blowup_guard {
            traj.guard_trip = Some(GuardTrip { time: t, growth });
            break;
        }
    }
    Ok(traj)
}

/// Integrates on `[0, T]` and returns states in the integration frame.
pub fn integrate_frame(
    u0: &SpectralField,
    params: &EquationParams,
    config: &SolverConfig,
) -> Result<Trajectory> {
    check_regime(params, config)?;
    let n = config.n_steps();
    march(u0, params, config, config.frame, config.t_final / n as f64, n)
}

/// Solution of the original equation on `[0, T]`. In the renormalized frame
/// the states are mapped back by the inverse gauge translation.
pub fn solve(
    u0: &SpectralField,
    params: &EquationParams,
    config: &SolverConfig,
) -> Result<Trajectory> {
    Ok(integrate_frame(u0, params, config)?.to_original_frame())
}

/// Integrates the equation backward to `t = -T` (or until the guard trips).
/// With `β < 0` the dissipative factor amplifies high modes; guard trips are
/// returned as data.
pub fn solve_backward(
    u0: &SpectralField,
    params: &EquationParams,
    config: &SolverConfig,
) -> Result<Trajectory> {
    config.validate()?;
    let n = config.n_steps();
    let traj = march(u0, params, config, config.frame, -config.t_final / n as f64, n)?;
    Ok(traj.to_original_frame())
}

/// Iterates of the Picard scheme with contraction bookkeeping.
#[derive(Clone, Debug)]
pub struct PicardRun {
    /// `iterates[m]` is `u^{(m)}` on the time mesh (renormalized frame).
    pub iterates: Vec<Trajectory>,
    /// `d_m = sup_t ‖u^{(m+1)} - u^{(m)}‖_{H^s}`.
    pub differences: Vec<f64>,
    /// `d_{m+1}/d_m`, recorded while `d_m` stays above `roundoff_floor`.
    pub ratios: Vec<f64>,
    /// Differences below this level are rounding noise; once reached, the
    /// iteration has converged to working precision.
    pub roundoff_floor: f64,
    /// Ratio `≥ 1` on three consecutive iterates.
    pub diverged: bool,
}

impl PicardRun {
    pub fn last(&self) -> &Trajectory {
        self.iterates.last().expect("at least iterate 0")
    }
}

/// `φ₁(z) = (e^z - 1)/z` and `φ₂(z) = (e^z - 1 - z)/z²`.
fn phi12(z: C64) -> (C64, C64) {
    if z.norm() < 0.5 {
        let mut term = C64::new(1.0, 0.0);
        let mut phi1 = C64::new(0.0, 0.0);
        let mut phi2 = C64::new(0.0, 0.0);
        // term = z^n / n!
        for n in 0..30 {
            phi1 += term / (n + 1) as f64;
            phi2 += term / ((n + 1) * (n + 2)) as f64;
            term = term * z / (n + 1) as f64;
        }
        (phi1, phi2)
    } else {
        let e = z.exp();
        ((e - 1.0) / z, (e - 1.0 - z) / (z * z))
    }
}

/// Picard iteration for the Duhamel formulation of the renormalized equation,
/// `u^{(m+1)}(t) = U_μ(t)u₀ + ∫₀ᵗ U_μ(t-t')(N1+N2+N3)(u^{(m)}(t'))dt'`.
///
/// The time integral interpolates the nonlinearity linearly between mesh
/// nodes and integrates the semigroup kernel exactly against it.
pub fn picard_solve(
    u0: &SpectralField,
    params: &EquationParams,
    config: &SolverConfig,
) -> Result<PicardRun> {
    config.validate()?;
    if !(params.is_dissipative() && params.mu > 0.0) {
        return Err(KdnlsError::Config(format!(
            "Picard iteration needs mu > 0 (beta = {}, mu = {})",
            params.beta, params.mu
        )));
    }
    let nodes = config.picard_quadrature_nodes;
    let h = config.t_final / (nodes - 1) as f64;
    let times: Vec<f64> = (0..nodes).map(|j| j as f64 * h).collect();
    let grid = u0.grid();
    let mu = params.mu;

    let weights: Vec<(C64, C64, C64)> = grid
        .wavenumbers()
        .map(|k| {
            let kf = k as f64;
            let z = C64::new(-mu * kf.abs(), -kf * kf) * h;
            let (p1, p2) = phi12(z);
            (z.exp(), (p1 - p2) * h, p2 * h)
        })
        .collect();

    let linear: Vec<SpectralField> = times.iter().map(|&t| apply_semigroup(u0, t, mu)).collect();
    let warning = smallness_warning(u0, config);
    let make_traj = |states: Vec<SpectralField>| {
        let mut traj = Trajectory::start(u0, *params, Frame::Renormalized);
        traj.warnings.extend(warning.clone());
        for (&t, s) in times.iter().zip(states).skip(1) {
            traj.push(t, s);
        }
        traj
    };

    let scale = linear
        .iter()
        .map(|u| u.sobolev_norm(config.sobolev_index))
        .fold(0.0, f64::max);
    let roundoff_floor = 1e3 * f64::EPSILON * scale;
    let mut iterates = vec![make_traj(linear.clone())];
    let mut differences = Vec::new();
    let mut ratios = Vec::new();
    let mut streak = 0;
    let mut diverged = false;
    for _ in 0..config.picard_iterations {
        let prev = iterates.last().expect("iterate 0");
        let forcing: Vec<SpectralField> = prev
            .states
            .iter()
            .map(|u| renormalized_remainder(u, params))
            .collect();
        let mut integral = SpectralField::zeros(grid);
        let mut states = Vec::with_capacity(nodes);
        states.push(u0.clone());
        for j in 1..nodes {
            let (f_prev, f_cur) = (&forcing[j - 1], &forcing[j]);
            for (i, c) in integral.coeffs_mut().iter_mut().enumerate() {
                let (e, w_prev, w_cur) = weights[i];
                *c = e * *c + w_prev * f_prev.coeffs()[i] + w_cur * f_cur.coeffs()[i];
            }
            states.push(linear[j].add(&integral)?);
        }
        if states.iter().any(|s| !s.is_finite()) {
            return Err(KdnlsError::Integration {
                time: config.t_final,
                reason: "non-finite Picard iterate".into(),
            });
        }
        let next = make_traj(states);
        let d = next.sup_distance(prev, config.sobolev_index)?;
        if let Some(&last) = differences.last().filter(|&&l| l > roundoff_floor) {
            let ratio = d / last;
            ratios.push(ratio);
            streak = if ratio >= 1.0 { streak + 1 } else { 0 };
            if streak >= 3 {
                diverged = true;
            }
        }
        differences.push(d);
        iterates.push(next);
    }
    if diverged {
        warn!("Picard iteration failed to contract: ratios {ratios:?}");
    }
    Ok(PicardRun {
        iterates,
        differences,
        ratios,
        roundoff_floor,
        diverged,
    })
}

/// `u(x) ↦ conj(u(x))` at the coefficient level: `û(k) ↦ conj(û(-k))`.
/// Combined with `t ↦ -t` and `(α,β) ↦ (-α,-β)` it maps solutions to solutions.
pub fn time_reversal_mirror(field: &SpectralField) -> SpectralField {
    field.conj_reflect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::propagator::single_mode_exact;
    use crate::spectral::GridSpec;

    fn grid(k: usize) -> GridSpec {
        GridSpec::with_modes(k).unwrap()
    }

    fn smooth_data(g: GridSpec, amp: f64) -> SpectralField {
        let f = SpectralField::from_fn(g, |k| {
            let kf = k as f64;
            C64::new((1.3 * kf).cos(), (0.4 * kf + 0.2).sin()) * (-0.5 * kf.abs()).exp()
        });
        let n = f.sobolev_norm(1.0);
        f.scale((amp / n).into())
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(0.1, 1.0).validate().is_ok());
        assert!(SolverConfig::new(2.0, 1.0).validate().is_err());
        assert!(SolverConfig::new(-0.1, 1.0).validate().is_err());
        let mut c = SolverConfig::new(0.1, 1.0);
        c.blowup_guard = 1.0;
        assert!(c.validate().is_err());
        assert_eq!(SolverConfig::new(1e-3, 1.0).n_steps(), 1000);
        assert_eq!(SolverConfig::new(0.3, 1.0).n_steps(), 4);
    }

    #[test]
    fn recommended_dt_values() {
        assert_eq!(recommended_dt(4, 0.5), 1e-2);
        assert!((recommended_dt(64, 0.01) - 0.1 / 64.0).abs() < 1e-18);
        assert!((recommended_dt(10, 4.0) - 0.0025).abs() < 1e-18);
    }

    #[test]
    fn zero_nonlinearity_step_is_semigroup() {
        let g = grid(8);
        let u = smooth_data(g, 0.3);
        let params = EquationParams::new(0.0, 0.0, 0.0);
        let out = step_ifrk4(&u, 0.01, &params, Frame::Renormalized).unwrap();
        let lin = apply_semigroup(&u, 0.01, 0.0);
        assert!(out.max_abs_diff(&lin).unwrap() < 1e-15);
    }

    #[test]
    fn single_step_local_error_is_fifth_order() {
        let g = grid(8);
        let (k, c, alpha) = (3i64, C64::new(2.0, 0.5), 1.0);
        let u = SpectralField::single_mode(g, k, c);
        let params = EquationParams::for_data(alpha, -1.0, &u);
        let err = |h: f64| {
            let out = step_ifrk4(&u, h, &params, Frame::Original).unwrap();
            let exact = single_mode_exact(c, k, h, alpha) / (2.0 * PI).sqrt();
            (out.coeff(k) - exact).norm()
        };
        let (e1, e2) = (err(0.1), err(0.05));
        let order = (e1 / e2).log2();
        assert!((order - 5.0).abs() < 0.3, "local order {order}");
    }

    #[test]
    fn zero_data_gives_zero_trajectory() {
        let g = grid(8);
        let z = SpectralField::zeros(g);
        let params = EquationParams::for_data(1.0, -1.0, &z);
        let traj = solve(&z, &params, &SolverConfig::new(0.01, 0.1)).unwrap();
        assert_eq!(traj.len(), 11);
        assert!(traj.states.iter().all(|s| s.coeffs().iter().all(|c| c.norm() == 0.0)));
    }

    #[test]
    fn non_dissipative_requires_experiment_mode() {
        let g = grid(4);
        let u = smooth_data(g, 0.1);
        let params = EquationParams::for_data(1.0, 0.5, &u);
        let config = SolverConfig::new(0.01, 0.05);
        assert!(matches!(
            solve(&u, &params, &config),
            Err(KdnlsError::NonDissipative(_))
        ));
        assert!(solve(&u, &params, &config.experiment()).is_ok());
    }

    #[test]
    fn trajectory_invariants() {
        let g = grid(8);
        let u = smooth_data(g, 0.05);
        let params = EquationParams::for_data(1.0, -1.0, &u);
        let traj = solve(&u, &params, &SolverConfig::new(0.01, 0.2)).unwrap();
        assert_eq!(traj.times.len(), traj.states.len());
        assert_eq!(traj.times.len(), traj.dissipation_integrand.len());
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(traj.initial(), &u);
        assert!(traj.dissipation_integrand.iter().all(|&d| d <= 0.0));
    }

    #[test]
    fn frames_agree_on_small_two_mode_data() {
        let g = grid(8);
        let mut u = SpectralField::zeros(g);
        u.set(1, C64::new(0.05, 0.01));
        u.set(-2, C64::new(0.02, -0.03));
        let params = EquationParams::for_data(1.0, -1.0, &u);
        let config = SolverConfig::new(1e-3, 0.5);
        let a = solve(&u, &params, &config).unwrap();
        let b = solve(&u, &params, &config.clone().with_frame(Frame::Original)).unwrap();
        assert!(a.last().distance(b.last(), 1.0).unwrap() < 1e-7);
    }

    #[test]
    fn guard_trip_truncates_backward_run() {
        let g = grid(32);
        let u = SpectralField::from_fn(g, |k| C64::new(0.05 / (1.0 + k.abs() as f64).powf(1.6), 0.0));
        let params = EquationParams::for_data(0.0, -20.0, &u);
        let mut config = SolverConfig::new(1e-3, 5.0);
        config.blowup_guard = 10.0;
        let traj = solve_backward(&u, &params, &config).unwrap();
        let trip = traj.guard_trip.expect("guard trips");
        assert!(trip.time < 0.0 && trip.growth > 10.0);
        assert!((traj.final_time() - trip.time).abs() < 1e-15);
        assert!(traj.times.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn picard_basics() {
        let g = grid(8);
        let z = SpectralField::zeros(g);
        let params = EquationParams::new(1.0, -1.0, 1.0);
        let mut config = SolverConfig::new(0.01, 0.2);
        config.picard_quadrature_nodes = 21;
        config.picard_iterations = 3;
        let run = picard_solve(&z, &params, &config).unwrap();
        assert!(run
            .iterates
            .iter()
            .all(|it| it.states.iter().all(|s| s.coeffs().iter().all(|c| c.norm() == 0.0))));

        let u = smooth_data(g, 0.05);
        let params = EquationParams::for_data(1.0, -1.0, &u);
        let run = picard_solve(&u, &params, &config).unwrap();
        for (j, &t) in run.iterates[0].times.iter().enumerate() {
            assert_eq!(run.iterates[0].states[j], apply_semigroup(&u, t, params.mu));
        }
        assert!(run.ratios.iter().all(|&r| r < 1.0), "{:?}", run.ratios);

        let no_mu = EquationParams::for_data(1.0, 0.0, &u);
        assert!(picard_solve(&u, &no_mu, &config).is_err());
    }

    #[test]
    fn phi_functions_continuous_across_branch() {
        for z in [C64::new(0.49, 0.0), C64::new(-0.3, 0.39), C64::new(0.0, 0.499)] {
            let (a1, a2) = phi12(z);
            let e = z.exp();
            let (b1, b2) = ((e - 1.0) / z, (e - 1.0 - z) / (z * z));
            assert!((a1 - b1).norm() < 1e-14);
            assert!((a2 - b2).norm() < 1e-13);
        }
        let (p1, p2) = phi12(C64::new(0.0, 0.0));
        assert_eq!(p1, C64::new(1.0, 0.0));
        assert_eq!(p2, C64::new(0.5, 0.0));
    }
}
