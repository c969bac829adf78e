use std::f64::consts::TAU;

use dualpol_core::constants::{mhz_to_rad, C, HBAR};
use dualpol_core::polariton::{
    analytic_dark_mode, build_polariton_matrix, dressed_state, find_dark_mode, group_velocity, group_velocity_dressed,
    PolaritonParams,
};
use dualpol_core::Complex64;
use proptest::prelude::*;

fn polar(m: f64, ph: f64) -> Complex64 {
    Complex64::from_polar(m, ph)
}

/// Far-detuned parameter sets with |Ω₁/Δ₁| ≤ 0.05, Ω₃/Δ₃ ≥ 0.05 and ω_c′ = ck = 0. Rates in MHz.
fn far_detuned() -> impl Strategy<Value = PolaritonParams> {
    (
        (0.1f64..50.0, 0.001f64..0.05, 0.1f64..50.0, 0.05f64..1.0),
        (20.0f64..200.0, any::<bool>(), 5.0f64..100.0, 100.0f64..5000.0, 100.0f64..5000.0),
        [0.0f64..TAU, 0.0..TAU, 0.0..TAU, 0.0..TAU],
    )
        .prop_map(|((w, r1, w2, w3), (d1, neg, d3, g, gp), ph)| {
            let delta1 = mhz_to_rad(d1) * if neg { -1.0 } else { 1.0 };
            PolaritonParams {
                omega: polar(mhz_to_rad(w), ph[0]),
                omega1: polar(r1 * delta1.abs(), ph[1]),
                omega2: polar(mhz_to_rad(w2), ph[2]),
                omega3: polar(w3 * mhz_to_rad(d3), ph[3]),
                delta1,
                delta3: mhz_to_rad(d3),
                g: mhz_to_rad(g),
                g_prime: mhz_to_rad(gp),
                omega_c_prime: 0.0,
                ck: 0.0,
            }
        })
}

fn spectral_norm(spectrum: &[f64; 6]) -> f64 {
    spectrum.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dark_mode_matches_closed_form(p in far_detuned()) {
        let m = build_polariton_matrix(&p).unwrap();
        let found = find_dark_mode(&m).unwrap();
        let analytic = analytic_dark_mode(&p).unwrap();
        let norm = spectral_norm(&found.spectrum);
        prop_assert!(found.mode.overlap(&analytic) >= 0.999);
        prop_assert!(found.mode.residual(&m) <= 1e-10 * norm);
        let r1 = p.omega1.norm() / p.delta1.abs();
        prop_assert!(found.mode.darkness <= 2.0 * r1 * r1 + 1e-9, "darkness {}", found.mode.darkness);
    }

    #[test]
    fn polariton_matrix_is_hermitian(p in far_detuned()) {
        let m = build_polariton_matrix(&p).unwrap();
        prop_assert!((m - m.adjoint()).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn dressed_state_eigen_residual(w3 in 0.0f64..100.0, d3 in 0.1f64..200.0) {
        let (w3, d3) = (mhz_to_rad(w3), mhz_to_rad(d3));
        let d = dressed_state(w3, d3).unwrap();
        let e = d.e_plus / HBAR;
        // H = [[0, -Ω₃], [-Ω₃, -Δ₃]] in the (b, e) basis.
        let r0 = -w3 * d.c_e - e * d.c_b;
        let r1 = -w3 * d.c_b - d3 * d.c_e - e * d.c_e;
        let h_norm = w3.abs() + d3.abs();
        prop_assert!((r0 * r0 + r1 * r1).sqrt() <= 1e-12 * h_norm);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn group_velocity_ignores_common_phase(p in far_detuned(), phi in 0.0f64..TAU) {
        let rot = Complex64::from_polar(1.0, phi);
        let q = PolaritonParams { omega: p.omega * rot, omega1: p.omega1 * rot, omega2: p.omega2 * rot, omega3: p.omega3 * rot, ..p };
        let (a, b) = (group_velocity(&p).unwrap(), group_velocity(&q).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn group_velocity_increases_with_omega(p in far_detuned(), k in 1.001f64..10.0) {
        let q = PolaritonParams { omega: p.omega * k, ..p };
        prop_assert!(group_velocity(&q).unwrap() > group_velocity(&p).unwrap());
    }

    #[test]
    fn group_velocity_scale_invariant(
        w in 0.0f64..1e9, w1 in 0.0f64..1e8, w2 in 0.0f64..1e9, d1 in 1e6f64..1e9,
        gd in 1e7f64..1e10, gdp in 1e7f64..1e10, lambda in 1e-3f64..1e3,
    ) {
        let a = group_velocity_dressed(w, w1, w2, d1, gd, gdp).unwrap();
        let l = lambda;
        let b = group_velocity_dressed(l * w, l * w1, l * w2, l * d1, l * gd, l * gdp).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * C);
        prop_assert!((0.0..C).contains(&a));
    }

    #[test]
    fn group_velocity_vanishes_with_photonic_weights(p in far_detuned(), s in 1e-9f64..1e-6) {
        let q = PolaritonParams { omega: p.omega * s, omega2: p.omega2 * s, ..p };
        prop_assert!(group_velocity(&q).unwrap() <= 1e-10 * C);
    }
}

#[test]
fn group_velocity_substitution_points() {
    let base = PolaritonParams {
        omega: Complex64::new(0.0, 0.0),
        omega1: Complex64::new(0.0, 0.0),
        omega2: Complex64::new(0.0, 0.0),
        omega3: Complex64::new(mhz_to_rad(3.0), 0.0),
        delta1: mhz_to_rad(31.83),
        delta3: mhz_to_rad(31.83),
        g: 1e9,
        g_prime: 1e9,
        omega_c_prime: 0.0,
        ck: 0.0,
    };
    assert_eq!(group_velocity(&base).unwrap(), 0.0);

    // Remaining points are stated in terms of the dressed couplings.
    let gd = 2e8;
    let gdp = 3e8;
    let v = group_velocity_dressed(gd, 0.0, 0.0, 1e8, gd, gdp).unwrap();
    assert!((v - C / 2.0).abs() <= 1e-12 * C);

    let d1 = 1e8;
    let v = group_velocity_dressed(gd, 0.1 * d1, gdp, d1, gd, gdp).unwrap();
    assert!((v - C / 2.0).abs() <= 1e-12 * C);
}
