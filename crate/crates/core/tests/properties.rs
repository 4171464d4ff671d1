mod common;

use common::l2_from_samples;
use kdnls::diagnostics::l2_identity_residual;
use kdnls::integrator::{solve, time_reversal_mirror, SolverConfig};
use kdnls::nonlinearity::{n3, resonance_function, EquationParams};
use kdnls::propagator::{apply_semigroup, gauge_translate};
use kdnls::spectral::{to_spectral, GridSpec, Multiplier, SpectralField, C64};
use proptest::prelude::*;

fn field_strategy(max_k: usize) -> impl Strategy<Value = SpectralField> {
    (1..=max_k).prop_flat_map(|k| {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2 * k + 1).prop_map(move |v| {
            let grid = GridSpec::with_modes(k).unwrap();
            SpectralField::from_coeffs(grid, v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
                .unwrap()
        })
    })
}

/// Three fields on one grid.
fn triple_strategy(max_k: usize) -> impl Strategy<Value = [SpectralField; 3]> {
    (1..=max_k).prop_flat_map(|k| {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 3 * (2 * k + 1)).prop_map(move |v| {
            let grid = GridSpec::with_modes(k).unwrap();
            let n = 2 * k + 1;
            let make = |i: usize| {
                SpectralField::from_coeffs(
                    grid,
                    v[i * n..(i + 1) * n].iter().map(|&(a, b)| C64::new(a, b)).collect(),
                )
                .unwrap()
            };
            [make(0), make(1), make(2)]
        })
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(u in field_strategy(12)) {
        let samples = u.to_physical();
        prop_assert!(close(l2_from_samples(&samples), u.l2_sq(), 1e-13));
        let back = to_spectral(u.grid(), &samples).unwrap();
        prop_assert!(back.max_abs_diff(&u).unwrap() < 1e-14);
    }

    #[test]
    fn hilbert_is_skew_adjoint(f in triple_strategy(10)) {
        let [a, b, _] = f;
        let lhs = a.apply_multiplier(Multiplier::Hilbert).inner(&b).unwrap();
        let rhs = a.inner(&b.apply_multiplier(Multiplier::Hilbert)).unwrap();
        prop_assert!((lhs + rhs).norm() < 1e-12);
    }

    #[test]
    fn hilbert_squared_is_minus_identity_off_zero(u in field_strategy(10)) {
        let hh = u.apply_multiplier(Multiplier::Hilbert).apply_multiplier(Multiplier::Hilbert);
        prop_assert_eq!(hh.coeff(0), C64::new(0.0, 0.0));
        for k in 1..=u.grid().k_max() as i64 {
            prop_assert_eq!(hh.coeff(k), -u.coeff(k));
            prop_assert_eq!(hh.coeff(-k), -u.coeff(-k));
        }
    }

    #[test]
    fn sobolev_norms_are_monotone_in_s(u in field_strategy(10), s1 in -1.0..2.0f64, ds in 0.0..1.5f64) {
        prop_assert!(u.sobolev_norm(s1) <= u.sobolev_norm(s1 + ds) * (1.0 + 1e-15));
    }

    #[test]
    fn n3_is_linear_in_first_and_antilinear_in_second(
        f in triple_strategy(6),
        re in -2.0..2.0f64,
        im in -2.0..2.0f64,
    ) {
        let [a, b, c] = f;
        let z = C64::new(re, im);
        let p = EquationParams::new(0.9, -1.1, 0.3);
        let base = n3(&a, &b, &c, &p).unwrap();
        let scale = base.sobolev_norm(0.0) * (1.0 + z.norm()) + 1e-12;
        let first = n3(&a.scale(z), &b, &c, &p).unwrap();
        prop_assert!(first.sub(&base.scale(z)).unwrap().sobolev_norm(0.0) < 1e-12 * scale);
        let second = n3(&a, &b.scale(z), &c, &p).unwrap();
        prop_assert!(second.sub(&base.scale(z.conj())).unwrap().sobolev_norm(0.0) < 1e-12 * scale);
        let sum = n3(&a.add(&c).unwrap(), &b, &c, &p).unwrap();
        let split = base.add(&n3(&c, &b, &c, &p).unwrap()).unwrap();
        prop_assert!(sum.sub(&split).unwrap().sobolev_norm(0.0) < 1e-12 * (1.0 + split.sobolev_norm(0.0)));
    }

    #[test]
    fn resonance_identity(k1 in -10_000i64..10_000, k2 in -10_000i64..10_000, k3 in -10_000i64..10_000) {
        let k = (k1 - k2 + k3) as i128;
        let (a, b, c) = (k1 as i128, k2 as i128, k3 as i128);
        prop_assert_eq!(resonance_function(k1, k2, k3), k * k - a * a + b * b - c * c);
    }

    #[test]
    fn gauge_translation_preserves_norms(u in field_strategy(10), nu in -5.0..5.0f64, t in -3.0..3.0f64, s in 0.0..2.0f64) {
        let v = gauge_translate(&u, nu, t);
        prop_assert!(close(v.sobolev_norm(s), u.sobolev_norm(s), 1e-14));
        let back = gauge_translate(&v, -nu, t);
        prop_assert!(back.max_abs_diff(&u).unwrap() < 1e-14);
    }

    #[test]
    fn semigroup_is_contractive(u in field_strategy(10), t in -2.0..2.0f64, mu in 0.0..1.0f64, s in 0.0..2.0f64) {
        prop_assert!(apply_semigroup(&u, t, mu).sobolev_norm(s) <= u.sobolev_norm(s) * (1.0 + 1e-15));
    }

    #[test]
    fn mirror_is_an_involution(u in field_strategy(10)) {
        prop_assert_eq!(time_reversal_mirror(&time_reversal_mirror(&u)), u.clone());
        prop_assert!(close(time_reversal_mirror(&u).l2_sq(), u.l2_sq(), 1e-15));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Small dissipative runs: the identity holds exactly at the start and
    /// the L² series does not increase.
    #[test]
    fn short_runs_obey_the_l2_law(u in field_strategy(6), amp in 0.01..0.1f64, beta in -3.0..-0.1f64) {
        let u = u.scale(C64::new(amp / u.sobolev_norm(1.0).max(1e-12), 0.0));
        let p = EquationParams::for_data(1.0, beta, &u);
        let traj = solve(&u, &p, &SolverConfig::new(0.01, 0.2)).unwrap();
        let res = l2_identity_residual(&traj);
        prop_assert_eq!(res[0], 0.0);
        let l2: Vec<f64> = traj.states.iter().map(|v| v.l2_sq()).collect();
        prop_assert!(l2.windows(2).all(|w| w[1] <= w[0] + 1e-10));
    }
}
