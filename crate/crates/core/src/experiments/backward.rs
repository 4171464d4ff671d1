//! Refinement study of the unstable time direction.
//!
//! For `β < 0` the equation is integrated backward; rough data blow past the
//! guard sooner as the grid resolves more modes, while analytic data survive a
//! short round trip. For `β > 0` the conjugation mirror makes the forward
//! direction the unstable one, and that is what runs.

use super::manifest::{Assertion, RunWriter};
use super::output::{table_csv, trajectory_csv};
use super::{random_phase_field, rough_data, with_sobolev_size, ResolvedConfig, RunLog};
use crate::diagnostics::DiagnosticsRecord;
use crate::error::Result;
use crate::integrator::{
    solve, solve_backward, step_ifrk4, time_reversal_mirror, Frame, SolverConfig, Trajectory,
};
use crate::nonlinearity::EquationParams;
use crate::spectral::{GridSpec, SpectralField};

/// Rough data `|û(k)| ∝ ⟨k⟩^{-ROUGH_POWER}`.
pub const ROUGH_POWER: f64 = 1.6;
pub const ROUND_TRIP_T: f64 = 0.05;
const ROUND_TRIP_L2: f64 = 0.05;
const ROUND_TRIP_TOL: f64 = 1e-6;
const MIRROR_TOL: f64 = 1e-12;

/// Integrates in the unstable direction: backward for `β < 0`, forward
/// otherwise. Times are signed.
fn unstable_run(u0: &SpectralField, params: &EquationParams, solver: &SolverConfig) -> Result<Trajectory> {
    if params.beta < 0.0 {
        solve_backward(u0, params, solver)
    } else {
        solve(u0, params, &solver.clone().experiment())
    }
}

/// Integrates in the stable direction.
fn stable_run(u0: &SpectralField, params: &EquationParams, solver: &SolverConfig) -> Result<Trajectory> {
    if params.beta < 0.0 {
        solve(u0, params, solver)
    } else {
        solve_backward(u0, params, solver)
    }
}

fn max_coeff_gap(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    a.states
        .iter()
        .zip(&b.states)
        .try_fold(0.0_f64, |acc, (x, y)| Ok(acc.max(x.max_abs_diff(y)?)))
}

pub fn run_backward(cfg: &ResolvedConfig, writer: &mut RunWriter, log: &mut RunLog) -> Result<()> {
    let mut solver = SolverConfig::new(cfg.dt, cfg.t_final);
    solver.sobolev_index = cfg.s;
    // Rough data are large on purpose.
    solver.smallness_threshold = f64::INFINITY;
    log.param("direction", if cfg.beta < 0.0 { "backward" } else { "forward" });
    log.param("rough_power", ROUGH_POWER);
    log.param("rough_l2", cfg.r);
    log.calibrate("blowup_guard", solver.blowup_guard);

    let mut rows = Vec::new();
    let mut durations = Vec::new();
    for &k in &cfg.n_list {
        let grid = GridSpec::with_modes(k)?;
        let u0 = rough_data(grid, cfg.seed, ROUGH_POWER, 0.0, cfg.r);
        let params = EquationParams::for_data(cfg.alpha, cfg.beta, &u0);
        let traj = unstable_run(&u0, &params, &solver)?;
        let (time, growth) = match traj.guard_trip {
            Some(trip) => (trip.time, trip.growth),
            None => (f64::NAN, traj.last().sobolev_norm(cfg.s) / u0.sobolev_norm(cfg.s)),
        };
        log.check(Assertion::holds(
            &format!("guard_trip_K{k}"),
            traj.guard_trip.is_some(),
            format!("trip time {time}, growth {growth:.3e}"),
        ));
        durations.push(time.abs());
        rows.push(vec![k.into(), params.mu.into(), time.into(), growth.into()]);
    }
    log.check(Assertion::holds(
        "trip_time_strictly_decreasing",
        durations.iter().all(|d| d.is_finite()) && durations.windows(2).all(|w| w[1] < w[0]),
        format!("|t_trip| by K: {durations:?}"),
    ));
    writer.write(
        "backward_trips.csv",
        &table_csv(&["K", "mu", "trip_time", "growth"], &rows)?,
    )?;

    // Analytic data: out along the stable direction, then back.
    let grid = GridSpec::with_modes(cfg.n_list[0])?;
    let f = random_phase_field(grid, cfg.seed, |k| (-(k.abs() as f64)).exp());
    let u0 = with_sobolev_size(&f, 0.0, ROUND_TRIP_L2);
    let params = EquationParams::for_data(cfg.alpha, cfg.beta, &u0);
    let mut short = SolverConfig::new(cfg.dt.min(ROUND_TRIP_T), ROUND_TRIP_T);
    short.sobolev_index = cfg.s;
    let out = stable_run(&u0, &params, &short)?;
    let back = unstable_run(out.last(), &params, &short)?;
    let round_trip = back.last().distance(&u0, 1.0)? / u0.sobolev_norm(1.0);
    log.check(Assertion::at_most("analytic_round_trip", round_trip, ROUND_TRIP_TOL));
    log.check(Assertion::holds(
        "analytic_no_guard_trip",
        back.guard_trip.is_none(),
        format!("{:?}", back.guard_trip),
    ));
    let rec = DiagnosticsRecord::from_trajectory(&back, &[cfg.s]);
    writer.write("backward_analytic.csv", &trajectory_csv(&rec)?)?;

    // Conjugation mirror: the unstable run equals, mode by mode, the mirrored
    // stable-direction run with (−α, −β).
    let mirror_params = EquationParams::for_data(-cfg.alpha, -cfg.beta, &u0);
    let v0 = time_reversal_mirror(out.last());
    let direct = unstable_run(out.last(), &params, &short)?;
    let mirrored_solver = short.clone().experiment();
    let mirrored = if cfg.beta < 0.0 {
        solve(&v0, &mirror_params, &mirrored_solver)?
    } else {
        solve_backward(&v0, &mirror_params, &mirrored_solver)?
    };
    let mirrored_back = Trajectory {
        states: mirrored.states.iter().map(time_reversal_mirror).collect(),
        ..mirrored
    };
    log.check(Assertion::at_most(
        "mirror_run",
        max_coeff_gap(&direct, &mirrored_back)?,
        MIRROR_TOL,
    ));
    let h = if cfg.beta < 0.0 { -short.dt } else { short.dt };
    let one = step_ifrk4(out.last(), h, &params, Frame::Renormalized)?;
    let one_mirror = step_ifrk4(&v0, -h, &mirror_params, Frame::Renormalized)?;
    log.check(Assertion::at_most(
        "mirror_single_step",
        one.max_abs_diff(&time_reversal_mirror(&one_mirror))?,
        MIRROR_TOL,
    ));
    Ok(())
}
