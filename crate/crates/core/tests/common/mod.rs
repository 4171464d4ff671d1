//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

use kdnls::nonlinearity::EquationParams;
use kdnls::spectral::{sgn, GridSpec, SpectralField, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coefficients uniform in the unit disk, damped by `⟨k⟩^{-1}`, scaled by `amp`.
pub fn random_field(rng: &mut ChaCha8Rng, k_max: usize, amp: f64) -> SpectralField {
    let grid = GridSpec::with_modes(k_max).unwrap();
    SpectralField::from_fn(grid, |k| {
        let r: f64 = rng.gen::<f64>().sqrt();
        let th: f64 = rng.gen_range(0.0..TAU);
        C64::from_polar(amp * r, th) / (1.0 + (k * k) as f64).sqrt()
    })
}

/// `ik Σ_{k₁-k₂+k₃=k} [α - iβ sgn(k₁-k₂)] û₁(k₁) conj(û₂(k₂)) û₃(k₃)` over the
/// retained band, optionally dropping the `k₂ = k₁` and `k₂ = k₃` diagonals.
pub fn cubic_oracle(
    u1: &SpectralField,
    u2: &SpectralField,
    u3: &SpectralField,
    params: &EquationParams,
    off_diagonal_only: bool,
) -> SpectralField {
    let kk = u1.grid().k_max() as i64;
    let mut out = SpectralField::zeros(u1.grid());
    for k1 in -kk..=kk {
        for k2 in -kk..=kk {
            for k3 in -kk..=kk {
                if off_diagonal_only && (k2 == k1 || k2 == k3) {
                    continue;
                }
                let k = k1 - k2 + k3;
                if k.abs() > kk {
                    continue;
                }
                let weight = C64::new(params.alpha, -params.beta * sgn(k1 - k2) as f64);
                let term = C64::new(0.0, k as f64)
                    * weight
                    * u1.coeff(k1)
                    * u2.coeff(k2).conj()
                    * u3.coeff(k3);
                out.set(k, out.coeff(k) + term);
            }
        }
    }
    out
}

/// Direct double loop over `(k, k')` of the `N2` formula.
pub fn n2_oracle(
    u1: &SpectralField,
    u2: &SpectralField,
    u3: &SpectralField,
    params: &EquationParams,
) -> SpectralField {
    let kk = u1.grid().k_max() as i64;
    SpectralField::from_fn(u1.grid(), |k| {
        let kf = k as f64;
        let mut acc = C64::new(0.0, -params.alpha * kf) * u1.coeff(k) * u2.coeff(k).conj();
        for kp in -kk..=kk {
            let g = u1.coeff(kp) * u2.coeff(kp).conj();
            acc += params.beta * kf * (sgn(k - kp) - sgn(k)) as f64 * g;
        }
        acc * u3.coeff(k)
    })
}

/// `‖u‖²_{L²}` from physical samples by the trapezoid rule (exact for
/// trigonometric polynomials of degree below the sample count).
pub fn l2_from_samples(samples: &[C64]) -> f64 {
    TAU / samples.len() as f64 * samples.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Classical RK4 on `y' = λy`, as an independent check of closed-form exponentials.
pub fn rk4_scalar(lambda: C64, y0: C64, t: f64, steps: usize) -> C64 {
    let h = t / steps as f64;
    let mut y = y0;
    for _ in 0..steps {
        let k1 = lambda * y;
        let k2 = lambda * (y + k1 * (h / 2.0));
        let k3 = lambda * (y + k2 * (h / 2.0));
        let k4 = lambda * (y + k3 * h);
        y += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
    }
    y
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        sum += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

pub fn rel_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    let scale = b.sobolev_norm(0.0).max(1e-300);
    a.sub(b).unwrap().sobolev_norm(0.0) / scale
}

pub fn params(alpha: f64, beta: f64, u0: &SpectralField) -> EquationParams {
    EquationParams::for_data(alpha, beta, u0)
}

