//! Two-mode data that start `N^{-σ}` apart and separate by a fixed amount
//! within time `t_N → 0`.

use std::f64::consts::PI;

use super::manifest::{Assertion, RunWriter};
use super::output::{table_csv, Cell};
use super::{ResolvedConfig, RunLog};
use crate::error::{KdnlsError, Result};
use crate::integrator::{solve, Frame, SolverConfig, DEFAULT_SMALLNESS};
use crate::nonlinearity::EquationParams;
use crate::propagator::reduced_exact_solution;
use crate::spectral::{GridSpec, SpectralField, C64};

pub const DEFAULT_SIGMA: f64 = 0.25;
/// Largest `N` for which the full solver is run (on `K = 4N`).
pub const FULL_SOLVER_MAX_N: usize = 1024;
/// Steps per `t_N` in the full-solver runs.
const STEPS_PER_WINDOW: usize = 200;

#[derive(Clone, Debug)]
pub struct NonuniformPair {
    pub u0: SpectralField,
    pub v0: SpectralField,
    pub t_n: f64,
}

/// `u₀ = (a₀ + b₀e^{iNx})/√(2π)` and `ũ₀ = (ã₀ + b₀e^{iNx})/√(2π)` with
/// `a₀ = N^{-σ}`, `ã₀ = 2N^{-σ}`, `b₀ = (r/2)N^{-s}`, and
/// `t_N = N^{-1+2σ}/(100|ω|)`, `ω = iα/π + β/2π`.
pub fn construct_nonuniform_pair(
    grid: GridSpec,
    n: usize,
    s: f64,
    r: f64,
    sigma: f64,
    alpha: f64,
    beta: f64,
) -> Result<NonuniformPair> {
    if n < 2 || n > grid.k_max() {
        return Err(KdnlsError::Config(format!(
            "need 2 <= N <= K, got N = {n}, K = {}",
            grid.k_max()
        )));
    }
    if !(r > 0.0 && r < 1.0 && s > 0.5) {
        return Err(KdnlsError::Config(format!("need 0 < r < 1 and s > 1/2, got r = {r}, s = {s}")));
    }
    if !(sigma > 0.0 && sigma < s.min(0.5)) {
        return Err(KdnlsError::Config(format!("sigma = {sigma} outside (0, min(s, 1/2))")));
    }
    let omega = C64::new(beta / (2.0 * PI), alpha / PI).norm();
    if omega == 0.0 {
        return Err(KdnlsError::Config("alpha and beta vanish together".into()));
    }
    let nf = n as f64;
    let a0 = nf.powf(-sigma);
    let b0 = 0.5 * r * nf.powf(-s);
    let mode = |a: f64| {
        let mut f = SpectralField::zeros(grid);
        f.set(0, C64::new(a, 0.0));
        f.set(n as i64, C64::new(b0, 0.0));
        f.scale(C64::new((2.0 * PI).sqrt().recip(), 0.0))
    };
    Ok(NonuniformPair {
        u0: mode(a0),
        v0: mode(2.0 * a0),
        t_n: nf.powf(-1.0 + 2.0 * sigma) / (100.0 * omega),
    })
}

struct Row {
    n: usize,
    t_n: f64,
    initial_distance: f64,
    reduced_separation: f64,
    full_separation: f64,
    nonlinear_error: f64,
}

fn reduced_separation(cfg: &ResolvedConfig, k_max: usize, n: usize) -> Result<(f64, NonuniformPair)> {
    let grid = GridSpec::with_modes(k_max)?;
    let pair = construct_nonuniform_pair(grid, n, cfg.s, cfg.r, DEFAULT_SIGMA, cfg.alpha, cfg.beta)?;
    let u = reduced_exact_solution(&pair.u0, pair.t_n, cfg.alpha, cfg.beta);
    let v = reduced_exact_solution(&pair.v0, pair.t_n, cfg.alpha, cfg.beta);
    Ok((u.distance(&v, cfg.s)?, pair))
}

/// Full-solver separation at `t_N` and the largest deviation from the reduced
/// solution over `[0, t_N]`.
fn full_run(cfg: &ResolvedConfig, n: usize) -> Result<(f64, f64)> {
    let grid = GridSpec::with_modes(4 * n)?;
    let pair = construct_nonuniform_pair(grid, n, cfg.s, cfg.r, DEFAULT_SIGMA, cfg.alpha, cfg.beta)?;
    let solver = SolverConfig::new(pair.t_n / STEPS_PER_WINDOW as f64, pair.t_n)
        .with_frame(Frame::Original);
    let mut ends = Vec::new();
    let mut error = 0.0_f64;
    for data in [&pair.u0, &pair.v0] {
        let params = EquationParams::for_data(cfg.alpha, cfg.beta, data);
        let traj = solve(data, &params, &solver)?;
        for (&t, state) in traj.times.iter().zip(&traj.states) {
            let reduced = reduced_exact_solution(data, t, cfg.alpha, cfg.beta);
            error = error.max(state.distance(&reduced, cfg.s)?);
        }
        ends.push(traj.last().clone());
    }
    Ok((ends[0].distance(&ends[1], cfg.s)?, error))
}

pub fn run_nonuniform(cfg: &ResolvedConfig, writer: &mut RunWriter, log: &mut RunLog) -> Result<()> {
    let reduced_bound = 3.0 * cfg.r / 400.0;
    let full_bound = cfg.r / 400.0;
    log.param("sigma", DEFAULT_SIGMA);
    log.param("full_solver_max_n", FULL_SOLVER_MAX_N);
    log.param("full_solver_k", "4N");
    log.param("full_solver_dt", format!("t_N/{STEPS_PER_WINDOW}"));
    log.calibrate("eta", DEFAULT_SMALLNESS);
    log.check(Assertion::at_most("r_within_eta", cfg.r, DEFAULT_SMALLNESS));

    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let (sep, pair) = reduced_separation(cfg, n, n)?;
        let (sep_wide, _) = reduced_separation(cfg, 2 * n, n)?;
        let initial_distance = pair.u0.distance(&pair.v0, cfg.s)?;
        let expected = (n as f64).powf(-DEFAULT_SIGMA);
        log.check(Assertion::at_least(&format!("reduced_separation_N{n}"), sep, reduced_bound));
        log.check(Assertion::at_most(
            &format!("grid_independence_N{n}"),
            (sep - sep_wide).abs(),
            1e-14,
        ));
        log.check(Assertion::at_most(
            &format!("initial_distance_N{n}"),
            (initial_distance - expected).abs() / expected,
            1e-14,
        ));

        let (full_separation, nonlinear_error) = if n <= FULL_SOLVER_MAX_N {
            match full_run(cfg, n) {
                Ok((full, err)) => {
                    log.check(Assertion::at_least(&format!("full_separation_N{n}"), full, full_bound));
                    (full, err)
                }
                Err(e) => {
                    log.check(Assertion::holds(
                        &format!("full_separation_N{n}"),
                        false,
                        format!("solver failed: {e}"),
                    ));
                    (f64::NAN, f64::NAN)
                }
            }
        } else {
            log.note(format!("N = {n} above {FULL_SOLVER_MAX_N}: reduced check only"));
            (f64::NAN, f64::NAN)
        };
        rows.push(Row {
            n,
            t_n: pair.t_n,
            initial_distance,
            reduced_separation: sep,
            full_separation,
            nonlinear_error,
        });
    }
    let distances: Vec<f64> = rows.iter().map(|r| r.initial_distance).collect();
    log.check(Assertion::holds(
        "initial_distance_decreasing",
        distances.windows(2).all(|w| w[1] < w[0]),
        format!("{distances:?}"),
    ));

    let table: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.into(),
                r.t_n.into(),
                r.initial_distance.into(),
                r.reduced_separation.into(),
                reduced_bound.into(),
                r.full_separation.into(),
                full_bound.into(),
                r.nonlinear_error.into(),
            ]
        })
        .collect();
    writer.write(
        "nonuniform.csv",
        &table_csv(
            &[
                "N",
                "t_N",
                "initial_distance",
                "reduced_separation",
                "reduced_bound",
                "full_separation",
                "full_bound",
                "nonlinear_error",
            ],
            &table,
        )?,
    )?;
    Ok(())
}
