//! The cubic nonlinearity `α∂_x(|u|²u) + β∂_x[H(|u|²)u]` and its exact
//! splitting into renormalized linear terms plus the operators `N1`, `N2`,
//! `N3`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spectral::{
    band_to_grid, dealiased_product, grid_to_band, sgn, Multiplier, SpectralField, C64,
};

/// Coefficients of the equation together with `‖u₀‖²_{L²}` and the derived
/// dissipation strength `μ = |β|‖u₀‖²/(2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationParams {
    pub alpha: f64,
    pub beta: f64,
    pub u0_l2_sq: f64,
    pub mu: f64,
}

impl EquationParams {
    pub fn new(alpha: f64, beta: f64, u0_l2_sq: f64) -> Self {
        assert!(u0_l2_sq >= 0.0, "‖u₀‖² must be non-negative");
        Self {
            alpha,
            beta,
            u0_l2_sq,
            mu: beta.abs() * u0_l2_sq / (2.0 * PI),
        }
    }

    pub fn for_data(alpha: f64, beta: f64, u0: &SpectralField) -> Self {
        Self::new(alpha, beta, u0.l2_sq())
    }

    /// Same coefficients with `‖u₀‖²` replaced by that of new initial data.
    pub fn rebased(&self, u0: &SpectralField) -> Self {
        Self::for_data(self.alpha, self.beta, u0)
    }

    pub fn is_consistent(&self) -> bool {
        let mu = self.beta.abs() * self.u0_l2_sq / (2.0 * PI);
        (mu - self.mu).abs() <= 1e-15 * mu.max(1.0)
    }

    pub fn is_dissipative(&self) -> bool {
        self.beta < 0.0
    }

    /// Drift speed `ν = (α/π)‖u₀‖²` of the gauge translation.
    pub fn drift(&self) -> f64 {
        self.alpha / PI * self.u0_l2_sq
    }

    /// Signed coefficient `(β/2π)‖u₀‖²` of `D_x` in the effective linear part
    /// (equal to `-μ` when `β < 0`).
    pub fn linear_damping(&self) -> f64 {
        self.beta / (2.0 * PI) * self.u0_l2_sq
    }
}

/// The decomposition of the full nonlinearity into five fields whose sum
/// reproduces it exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct NonlinearityParts {
    pub n1: SpectralField,
    pub n2: SpectralField,
    pub n3: SpectralField,
    /// `(α/π)‖u₀‖² ∂_x u`.
    pub renorm_derivative: SpectralField,
    /// `(β/2π)‖u₀‖² D_x u`.
    pub renorm_dissipative: SpectralField,
}

impl NonlinearityParts {
    pub fn sum(&self) -> SpectralField {
        let mut total = self.n1.clone();
        for part in [
            &self.n2,
            &self.n3,
            &self.renorm_derivative,
            &self.renorm_dissipative,
        ] {
            total.axpy(C64::new(1.0, 0.0), part).expect("same grid");
        }
        total
    }
}

/// `R(k₁,k₂,k₃) = 2(k₁-k₂)(k₃-k₂)`.
///
/// Computed in `i128`, so no input in `i64` can overflow.
pub fn resonance_function(k1: i64, k2: i64, k3: i64) -> i128 {
    2 * (k1 as i128 - k2 as i128) * (k3 as i128 - k2 as i128)
}

/// `α∂_x(|u|²u) + β∂_x[H(|u|²)u]` truncated to `|k| ≤ K`.
pub fn full_nonlinearity(u: &SpectralField, params: &EquationParams) -> SpectralField {
    derivative_cubic(u, u, u, params).expect("same grid")
}

/// `α∂_x[(u₁ ū₂) u₃] + β∂_x[H(u₁ ū₂) u₃]` with unconstrained frequency sums.
fn derivative_cubic(
    u1: &SpectralField,
    u2: &SpectralField,
    u3: &SpectralField,
    params: &EquationParams,
) -> Result<SpectralField> {
    let grid = u1.grid();
    let m = grid.m_grid();
    let k = grid.k_max();
    let p = dealiased_product(u1, u2, true)?;
    let mixed: Vec<C64> = p
        .iter_modes()
        .map(|(mm, c)| c * (params.alpha + params.beta * Multiplier::Hilbert.symbol(mm)))
        .collect();
    let mixed_phys = band_to_grid(m, 2 * k, &mixed);
    let phys3 = u3.to_physical();
    let prod: Vec<C64> = mixed_phys.iter().zip(&phys3).map(|(a, b)| a * b).collect();
    let coeffs = grid_to_band(prod, k);
    let field = SpectralField::from_coeffs(grid, coeffs)?;
    Ok(field.apply_multiplier(Multiplier::Derivative))
}

/// `N1[u,v;u₃] = (‖u‖² - ‖v‖²)((α/π)∂_x u₃ + (β/2π)D_x u₃)`, with `‖v‖²`
/// passed directly.
pub fn n1(
    u: &SpectralField,
    v_l2_sq: f64,
    u3: &SpectralField,
    params: &EquationParams,
) -> SpectralField {
    let factor = u.l2_sq() - v_l2_sq;
    u3.map_modes(|k, c| {
        let sym = params.alpha / PI * Multiplier::Derivative.symbol(k)
            + params.beta / (2.0 * PI) * Multiplier::AbsDerivative.symbol(k);
        factor * sym * c
    })
}

/// Prefix-sum evaluation of `S(k) = Σ_{k'} sgn(k - k') g(k')` for every
/// retained `k`, where `g` is indexed like a field (`k' = -K..=K`).
fn signed_sums(g: &[C64]) -> Vec<C64> {
    let total: C64 = g.iter().sum();
    let mut below = C64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(g.len());
    for &gk in g {
        // entries strictly below k contribute +1, strictly above -1
        let above = total - below - gk;
        out.push(below - above);
        below += gk;
    }
    out
}

/// `N2[u₁,u₂,u₃]`: the diagonal `-iαk û₁ conj(û₂) û₃` plus the `β` bracket
/// `Σ_{k'} k[sgn(k-k') - sgn(k)] û₁(k') conj(û₂(k'))` times `û₃(k)`.
pub fn n2(
    u1: &SpectralField,
    u2: &SpectralField,
    u3: &SpectralField,
    params: &EquationParams,
) -> Result<SpectralField> {
    u1.same_grid(u2)?;
    u1.same_grid(u3)?;
    let g: Vec<C64> = u1
        .coeffs()
        .iter()
        .zip(u2.coeffs())
        .map(|(a, b)| a * b.conj())
        .collect();
    let total: C64 = g.iter().sum();
    let signed = signed_sums(&g);
    let coeffs = u3
        .iter_modes()
        .zip(g.iter().zip(&signed))
        .map(|((k, c3), (&gk, &sk))| {
            let kf = k as f64;
            let diagonal = C64::new(0.0, -params.alpha * kf) * gk;
            let bracket = kf * (sk - sgn(k) as f64 * total);
            (diagonal + params.beta * bracket) * c3
        })
        .collect();
    SpectralField::from_coeffs(u1.grid(), coeffs)
}

/// `N3[u₁,u₂,u₃] = ik Σ_{k₁-k₂+k₃=k, k₂≠k₁,k₃} [α - iβ sgn(k₁-k₂)] û₁(k₁) conj(û₂(k₂)) û₃(k₃)`.
///
/// The unconstrained sum comes from dealiased products; the `k₂=k₁` and
/// `k₂=k₃` diagonals are then removed in `O(K)` and the doubly removed
/// `k₁=k₂=k₃` term is added back.
pub fn n3(
    u1: &SpectralField,
    u2: &SpectralField,
    u3: &SpectralField,
    params: &EquationParams,
) -> Result<SpectralField> {
    let unconstrained = derivative_cubic(u1, u2, u3, params)?;
    let (alpha, beta) = (params.alpha, params.beta);

    let p_total: C64 = u1
        .coeffs()
        .iter()
        .zip(u2.coeffs())
        .map(|(a, b)| a * b.conj())
        .sum();
    let h: Vec<C64> = u2
        .coeffs()
        .iter()
        .zip(u3.coeffs())
        .map(|(a, b)| a.conj() * b)
        .collect();
    let h_total: C64 = h.iter().sum();
    let h_signed = signed_sums(&h);

    let coeffs = unconstrained
        .iter_modes()
        .enumerate()
        .map(|(i, (k, full))| {
            let ik = C64::new(0.0, k as f64);
            let q = alpha * h_total - C64::new(0.0, beta) * h_signed[i];
            let c1 = u1.coeffs()[i];
            let c2 = u2.coeffs()[i];
            let c3 = u3.coeffs()[i];
            full - ik * alpha * p_total * c3 - ik * c1 * q + ik * alpha * c1 * c2.conj() * c3
        })
        .collect();
    SpectralField::from_coeffs(u1.grid(), coeffs)
}

/// All five parts of the rewritten nonlinearity at state `u`, with `‖u₀‖²`
/// taken from `params`.
pub fn decompose(u: &SpectralField, params: &EquationParams) -> NonlinearityParts {
    let l2 = params.u0_l2_sq;
    NonlinearityParts {
        n1: n1(u, l2, u, params),
        n2: n2(u, u, u, params).expect("same grid"),
        n3: n3(u, u, u, params).expect("same grid"),
        renorm_derivative: u
            .apply_multiplier(Multiplier::Derivative)
            .scale((params.alpha / PI * l2).into()),
        renorm_dissipative: u
            .apply_multiplier(Multiplier::AbsDerivative)
            .scale((params.beta / (2.0 * PI) * l2).into()),
    }
}

/// `N1[u,u₀;u] + N2[u,u,u] + N3[u,u,u]`, evaluated as the full nonlinearity
/// minus the two renormalized linear terms.
pub fn renormalized_remainder(u: &SpectralField, params: &EquationParams) -> SpectralField {
    let l2 = params.u0_l2_sq;
    let full = full_nonlinearity(u, params);
    let drift = params.alpha / PI * l2;
    let damping = params.beta / (2.0 * PI) * l2;
    full.map_modes(|k, f| f - C64::new(damping * k.abs() as f64, drift * k as f64) * u.coeff(k))
}

/// `‖full_nonlinearity(u) - Σ parts‖_{L²}`.
pub fn decomposition_residual(u: &SpectralField, params: &EquationParams) -> f64 {
    let full = full_nonlinearity(u, params);
    let parts = decompose(u, params).sum();
    full.sub(&parts).expect("same grid").sobolev_norm(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    fn grid(k: usize) -> GridSpec {
        GridSpec::with_modes(k).unwrap()
    }

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn resonance_examples() {
        assert_eq!(resonance_function(1, 1, 5), 0);
        assert_eq!(resonance_function(5, 2, 2), 0);
        assert_eq!(resonance_function(3, 1, 0), -4);
        let big = 1i64 << 40;
        assert_eq!(
            resonance_function(big, -big, big),
            2 * (2 * big as i128) * (2 * big as i128)
        );
    }

    #[test]
    fn params_mu() {
        let p = EquationParams::new(1.0, -1.0, 2.0 * PI);
        assert!((p.mu - 1.0).abs() < 1e-15);
        assert!(p.is_consistent());
        assert!((p.linear_damping() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_mode_full_nonlinearity() {
        let g = grid(6);
        let (alpha, beta) = (0.7, -1.3);
        let c = C64::new(0.4, 0.9);
        let k = 4;
        let u = SpectralField::single_mode(g, k, c);
        let params = EquationParams::for_data(alpha, beta, &u);
        let out = full_nonlinearity(&u, &params);
        let expected = u.scale(C64::new(0.0, alpha * k as f64 * c.norm_sqr() / (2.0 * PI)));
        assert!(out.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn constant_field_has_zero_nonlinearity() {
        let g = grid(4);
        let mut u = SpectralField::zeros(g);
        u.set(0, C64::new(0.8, 0.0));
        let params = EquationParams::for_data(1.0, -1.0, &u);
        let out = full_nonlinearity(&u, &params);
        assert!(out.coeffs().iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn n1_examples() {
        let g = grid(5);
        let params = EquationParams::new(0.6, -1.1, 0.0);
        let u = SpectralField::from_fn(g, |k| C64::new(0.1 * k as f64, 0.05));
        let zero = n1(&u, u.l2_sq(), &u, &params);
        assert!(zero.coeffs().iter().all(|c| c.norm() == 0.0));

        let k = 3;
        let mut e = SpectralField::zeros(g);
        e.set(k, one());
        let out = n1(&u, u.l2_sq() - 1.0, &e, &params);
        let expected = C64::new(params.beta / (2.0 * PI) * 3.0, params.alpha / PI * 3.0);
        assert!((out.coeff(k) - expected).norm() < 1e-13);
    }

    #[test]
    fn n2_singleton_examples() {
        let g = grid(6);
        let params = EquationParams::new(0.9, -1.7, 0.0);
        let mut u1 = SpectralField::zeros(g);
        u1.set(5, C64::new(0.3, 0.2));
        let mut u2 = SpectralField::zeros(g);
        u2.set(5, C64::new(-0.1, 0.4));
        let mut u3 = SpectralField::zeros(g);
        u3.set(1, C64::new(0.5, -0.6));
        let out = n2(&u1, &u2, &u3, &params).unwrap();
        let expected =
            params.beta * 1.0 * -2.0 * u1.coeff(5) * u2.coeff(5).conj() * u3.coeff(1);
        assert!((out.coeff(1) - expected).norm() < 1e-15);

        let mut v1 = SpectralField::zeros(g);
        v1.set(1, one());
        let mut v3 = SpectralField::zeros(g);
        v3.set(5, one());
        let zero = n2(&v1, &v1, &v3, &params).unwrap();
        assert!(zero.coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn n3_singleton_examples() {
        let g = grid(4);
        let (alpha, beta) = (0.8, -1.4);
        let params = EquationParams::new(alpha, beta, 0.0);
        let mut u1 = SpectralField::zeros(g);
        u1.set(1, one());
        let mut u2 = SpectralField::zeros(g);
        u2.set(0, one());
        let mut u3 = SpectralField::zeros(g);
        u3.set(2, one());
        let out = n3(&u1, &u2, &u3, &params).unwrap();
        for (k, c) in out.iter_modes() {
            let expected = if k == 3 {
                C64::new(3.0 * beta, 3.0 * alpha)
            } else {
                C64::new(0.0, 0.0)
            };
            assert!((c - expected).norm() < 1e-14, "k={k}: {c}");
        }

        let mut single = SpectralField::zeros(g);
        single.set(2, C64::new(0.3, 0.7));
        let zero = n3(&single, &single, &single, &params).unwrap();
        assert!(zero.coeffs().iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn decomposition_single_mode_and_zero() {
        let g = grid(8);
        let u = SpectralField::single_mode(g, -3, C64::new(0.5, 0.5));
        let params = EquationParams::for_data(1.2, -0.8, &u);
        assert!(decomposition_residual(&u, &params) <= 1e-12);
        let z = SpectralField::zeros(g);
        assert_eq!(decomposition_residual(&z, &params), 0.0);
    }

    #[test]
    fn remainder_matches_parts() {
        let g = grid(6);
        let u = SpectralField::from_fn(g, |k| C64::new(0.1 / (1.0 + k.abs() as f64), 0.03 * k as f64));
        let params = EquationParams::new(0.5, -2.0, 0.3);
        let parts = decompose(&u, &params);
        let mut expected = parts.n1.clone();
        expected.axpy(one(), &parts.n2).unwrap();
        expected.axpy(one(), &parts.n3).unwrap();
        let rem = renormalized_remainder(&u, &params);
        assert!(rem.max_abs_diff(&expected).unwrap() < 1e-15);
    }
}
