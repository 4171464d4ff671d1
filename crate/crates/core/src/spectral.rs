//! Fourier-side representation of 2π-periodic complex fields.
//!
//! Coefficients follow the convention `û(k) = (1/2π) ∫₀^{2π} e^{-ikx} u(x) dx`,
//! so that `u(x) = Σ_k û(k) e^{ikx}` and products of fields are plain
//! convolutions of coefficient sequences. Norms insert the `√(2π)` factor
//! that turns `û(k)` into coordinates in the orthonormal basis
//! `e^{ikx}/√(2π)`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{KdnlsError, Result};

pub type C64 = Complex64;

const TWO_PI: f64 = 2.0 * PI;

/// Mode range `{-K, …, K}` together with the size `M` of the physical grid
/// used for products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    k_max: usize,
    m_grid: usize,
}

impl GridSpec {
    /// Grid with an explicit physical size. Requires `K ≥ 1` and `M ≥ 4K+1`,
    /// which makes every cubic product exact on the retained modes.
    pub fn new(k_max: usize, m_grid: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(KdnlsError::Config("K must be at least 1".into()));
        }
        if m_grid < 4 * k_max + 1 {
            return Err(KdnlsError::Config(format!(
                "physical grid M={m_grid} is below the dealiasing bound 4K+1={}",
                4 * k_max + 1
            )));
        }
        Ok(Self { k_max, m_grid })
    }

    /// Grid with the default physical size: `4(K+1)` rounded up to the next
    /// 5-smooth integer.
    pub fn with_modes(k_max: usize) -> Result<Self> {
        Self::new(k_max, next_smooth(4 * (k_max + 1)))
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn m_grid(&self) -> usize {
        self.m_grid
    }

    pub fn n_modes(&self) -> usize {
        2 * self.k_max + 1
    }

    pub fn wavenumbers(&self) -> impl Iterator<Item = i64> {
        let k = self.k_max as i64;
        -k..=k
    }

    /// Physical nodes `x_j = 2πj/M`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m_grid)
            .map(|j| TWO_PI * j as f64 / self.m_grid as f64)
            .collect()
    }

    fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(KdnlsError::GridMismatch {
                expected_k: self.k_max,
                expected_m: self.m_grid,
                got_k: other.k_max,
                got_m: other.m_grid,
            });
        }
        Ok(())
    }
}

fn next_smooth(mut n: usize) -> usize {
    loop {
        let mut r = n;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return n;
        }
        n += 1;
    }
}

/// Fourier multipliers used by the equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Multiplier {
    /// `∂_x`: symbol `ik`.
    Derivative,
    /// `D_x = (-∂_x²)^{1/2}`: symbol `|k|`.
    AbsDerivative,
    /// `D_x^{1/2}`: symbol `|k|^{1/2}`.
    HalfDerivative,
    /// Hilbert transform: symbol `-i sgn(k)` with `sgn(0) = 0`.
    Hilbert,
}

impl Multiplier {
    pub fn symbol(self, k: i64) -> C64 {
        let kf = k as f64;
        match self {
            Multiplier::Derivative => C64::new(0.0, kf),
            Multiplier::AbsDerivative => C64::new(kf.abs(), 0.0),
            Multiplier::HalfDerivative => C64::new(kf.abs().sqrt(), 0.0),
            Multiplier::Hilbert => C64::new(0.0, -sgn(k) as f64),
        }
    }
}

/// Sign with `sgn(0) = 0`.
#[inline]
pub fn sgn(k: i64) -> i64 {
    k.signum()
}

/// Japanese bracket `⟨k⟩ = (1 + k²)^{1/2}`.
#[inline]
pub fn bracket(k: f64) -> f64 {
    (1.0 + k * k).sqrt()
}

/// A band-limited field: coefficients `û(k)` for `|k| ≤ K`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<C64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![C64::new(0.0, 0.0); grid.n_modes()],
        }
    }

    /// Wraps a coefficient vector ordered from `k = -K` to `k = K`.
    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != grid.n_modes() {
            return Err(KdnlsError::LengthMismatch {
                expected: grid.n_modes(),
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(KdnlsError::Config("non-finite Fourier coefficient".into()));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(i64) -> C64) -> Self {
        let coeffs = grid.wavenumbers().map(&mut f).collect();
        Self { grid, coeffs }
    }

    /// The field `(c/√(2π)) e^{ikx}`, i.e. orthonormal coefficient `c` on mode `k`.
    pub fn single_mode(grid: GridSpec, k: i64, c: C64) -> Self {
        let mut f = Self::zeros(grid);
        f.set(k, c / TWO_PI.sqrt());
        f
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// `û(k)`, zero outside the retained band.
    pub fn coeff(&self, k: i64) -> C64 {
        let kk = self.grid.k_max as i64;
        if k.abs() > kk {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + kk) as usize]
        }
    }

    /// Sets `û(k)`; panics if `|k| > K`.
    pub fn set(&mut self, k: i64, value: C64) {
        let kk = self.grid.k_max as i64;
        assert!(k.abs() <= kk, "mode {k} outside band |k| <= {kk}");
        self.coeffs[(k + kk) as usize] = value;
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        self.grid.check_same(&other.grid)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn iter_modes(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.grid.wavenumbers().zip(self.coeffs.iter().copied())
    }

    pub fn map_modes(&self, mut f: impl FnMut(i64, C64) -> C64) -> Self {
        let coeffs = self.iter_modes().map(|(k, c)| f(k, c)).collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        self.map_modes(|_, c| c * factor)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(self.zip_unchecked(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(self.zip_unchecked(other, |a, b| a - b))
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: C64, other: &Self) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += factor * b;
        }
        Ok(())
    }

    pub(crate) fn zip_unchecked(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    pub fn conj(&self) -> Self {
        self.map_modes(|_, c| c.conj())
    }

    /// `conj(û(-k))`: the coefficients of the pointwise conjugate field.
    pub fn conj_reflect(&self) -> Self {
        Self::from_fn(self.grid, |k| self.coeff(-k).conj())
    }

    pub fn apply_multiplier(&self, symbol: Multiplier) -> Self {
        self.map_modes(|k, c| symbol.symbol(k) * c)
    }

    /// `‖u‖²_{L²(T)} = 2π Σ |û(k)|²`.
    pub fn l2_sq(&self) -> f64 {
        TWO_PI * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// `(Σ ⟨k⟩^{2s} |c_k|²)^{1/2}` with orthonormal coefficients `c_k = √(2π) û(k)`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        sobolev_norm(self, s)
    }

    /// `‖P_{>cutoff} u‖²_{L²}`, the energy in modes with `|k| > cutoff`.
    pub fn tail_l2_sq(&self, cutoff: usize) -> f64 {
        TWO_PI
            * self
                .iter_modes()
                .filter(|(k, _)| k.unsigned_abs() as usize > cutoff)
                .map(|(_, c)| c.norm_sqr())
                .sum::<f64>()
    }

    /// Complex `L²` pairing `∫ f ḡ dx = 2π Σ f̂(k) conj(ĝ(k))`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum::<C64>()
            * TWO_PI)
    }

    /// `max_k |û(k) - v̂(k)|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `‖self - other‖_{H^s}`.
    pub fn distance(&self, other: &Self, s: f64) -> Result<f64> {
        Ok(self.sub(other)?.sobolev_norm(s))
    }

    pub fn to_physical(&self) -> Vec<C64> {
        to_physical(self)
    }

    /// Same coefficients on a larger band (zero padding in Fourier space).
    pub fn embed(&self, grid: GridSpec) -> Result<Self> {
        if grid.k_max < self.grid.k_max {
            return Err(KdnlsError::Config(format!(
                "cannot embed K={} into smaller band K={}",
                self.grid.k_max, grid.k_max
            )));
        }
        Ok(Self::from_fn(grid, |k| self.coeff(k)))
    }
}

/// Coefficients on an arbitrary band `|m| ≤ B`, used for the exact quadratic
/// products whose bandwidth is `2K`.
#[derive(Clone, Debug, PartialEq)]
pub struct WideSpectrum {
    bandwidth: usize,
    coeffs: Vec<C64>,
}

impl WideSpectrum {
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, m: i64) -> C64 {
        let b = self.bandwidth as i64;
        if m.abs() > b {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(m + b) as usize]
        }
    }

    pub fn iter_modes(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let b = self.bandwidth as i64;
        (-b..=b).zip(self.coeffs.iter().copied())
    }

    pub fn apply_multiplier(&self, symbol: Multiplier) -> Self {
        let coeffs = self
            .iter_modes()
            .map(|(m, c)| symbol.symbol(m) * c)
            .collect();
        Self {
            bandwidth: self.bandwidth,
            coeffs,
        }
    }
}

/// Forward and inverse plans of one length.
type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static PLANS: RefCell<HashMap<usize, PlanPair>> =
        RefCell::new(HashMap::new());
}

fn plans(m: usize) -> PlanPair {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry(m)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                (planner.plan_fft_forward(m), planner.plan_fft_inverse(m))
            })
            .clone()
    })
}

/// Samples `Σ_{|m|≤B} c_m e^{imx_j}` on `M` points.
pub(crate) fn band_to_grid(m_grid: usize, bandwidth: usize, coeffs: &[C64]) -> Vec<C64> {
    debug_assert!(2 * bandwidth < m_grid);
    let mut buf = vec![C64::new(0.0, 0.0); m_grid];
    let b = bandwidth as i64;
    for (i, &c) in coeffs.iter().enumerate() {
        let m = i as i64 - b;
        buf[m.rem_euclid(m_grid as i64) as usize] = c;
    }
    let (_, inverse) = plans(m_grid);
    inverse.process(&mut buf);
    buf
}

/// Discrete coefficients `(1/M) Σ_j e^{-imx_j} u_j` for `|m| ≤ B`.
pub(crate) fn grid_to_band(mut samples: Vec<C64>, bandwidth: usize) -> Vec<C64> {
    let m_grid = samples.len();
    let (forward, _) = plans(m_grid);
    forward.process(&mut samples);
    let scale = 1.0 / m_grid as f64;
    let b = bandwidth as i64;
    (-b..=b)
        .map(|m| samples[m.rem_euclid(m_grid as i64) as usize] * scale)
        .collect()
}

/// Forward transform of `M` physical samples, truncated to `|k| ≤ K`.
pub fn to_spectral(grid: GridSpec, samples: &[C64]) -> Result<SpectralField> {
    if samples.len() != grid.m_grid {
        return Err(KdnlsError::LengthMismatch {
            expected: grid.m_grid,
            got: samples.len(),
        });
    }
    let coeffs = grid_to_band(samples.to_vec(), grid.k_max);
    SpectralField::from_coeffs(grid, coeffs)
}

/// `u(x_j) = Σ_{|k|≤K} û(k) e^{ikx_j}` on the `M`-point grid.
pub fn to_physical(field: &SpectralField) -> Vec<C64> {
    band_to_grid(field.grid.m_grid, field.grid.k_max, &field.coeffs)
}

pub fn apply_multiplier(field: &SpectralField, symbol: Multiplier) -> SpectralField {
    field.apply_multiplier(symbol)
}

pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    let sum: f64 = field
        .iter_modes()
        .map(|(k, c)| bracket(k as f64).powf(2.0 * s) * c.norm_sqr())
        .sum();
    (TWO_PI * sum).sqrt()
}

/// Product `a·b` (or `a·conj(b)`) evaluated on the physical grid and
/// transformed back on the band `|m| ≤ 2K`; exact because `M ≥ 4K+1`.
pub fn dealiased_product(
    a: &SpectralField,
    b: &SpectralField,
    conjugate_b: bool,
) -> Result<WideSpectrum> {
    a.grid.check_same(&b.grid)?;
    let pa = to_physical(a);
    let pb = to_physical(b);
    let prod: Vec<C64> = pa
        .iter()
        .zip(&pb)
        .map(|(x, y)| if conjugate_b { x * y.conj() } else { x * y })
        .collect();
    let bandwidth = 2 * a.grid.k_max;
    Ok(WideSpectrum {
        bandwidth,
        coeffs: grid_to_band(prod, bandwidth),
    })
}

/// `‖D_x^{1/2}(|u|²)‖²_{L²} = 2π Σ_m |m| |ŵ(m)|²` with `w = |u|²`.
pub fn dissipation_rate(field: &SpectralField) -> f64 {
    let w = dealiased_product(field, field, true).expect("same grid");
    TWO_PI
        * w.iter_modes()
            .map(|(m, c)| m.unsigned_abs() as f64 * c.norm_sqr())
            .sum::<f64>()
}
