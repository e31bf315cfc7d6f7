use nnls_core::pde::{mirror_nonlinearity, FieldSnapshot};
use nnls_core::phase::{nu_hat, Method, Scaling};
use nnls_core::profiles::{check_symmetric, symmetric_grid, InitialProfile, ProfileKind};
use nnls_core::scattering::{PureStepSpectrum, Spectrum, SyntheticCaseII};
use nnls_core::special::{dilog, gamma};
use nnls_core::wedge::{amplitude_q, beta_gamma, phase_coefficients, predict_q, psi, wedge_point, Side};
use nnls_core::C64;
use proptest::prelude::*;
use std::f64::consts::PI;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_point_round_trip(alpha in 0.01f64..1.0, s in 0.05f64..20.0, lt in 0.0f64..30.0) {
        let t = lt.exp();
        let wp = wedge_point(alpha, s, t, Side::PlusX).unwrap();
        prop_assert!((wp.recovered_s() - s).abs() <= 1e-9 * s);
        let sc = Scaling::new(alpha, s, t).unwrap();
        let beta = (1.0 - alpha) / (2.0 - alpha);
        prop_assert!((sc.ln_eps() + beta * sc.log4st).abs() <= 1e-12 * sc.log4st.abs().max(1.0));
        prop_assert!((sc.xi - s * sc.eps).abs() <= 1e-12 * sc.xi);
    }

    #[test]
    fn beta_gamma_identity_case_one(a in 0.5f64..3.0, ls in -2.3f64..2.3, lt in 4.6f64..18.4) {
        let sd = PureStepSpectrum { amplitude: a };
        let bg = beta_gamma(&sd, 0.7, ls.exp(), lt.exp(), Method::DirectQuadrature).unwrap();
        prop_assert!((bg.beta * bg.gamma - bg.nu_hat).norm() < 1e-10);
    }

    #[test]
    fn beta_gamma_identity_case_two(eta in 0.05f64..0.9, theta in -2.0f64..2.0, ls in -2.3f64..2.3, lt in 4.6f64..18.4) {
        let sd = SyntheticCaseII::new(1.0, eta, theta).unwrap();
        let bg = beta_gamma(&sd, 0.6, ls.exp(), lt.exp(), Method::DirectQuadrature).unwrap();
        prop_assert!((bg.beta * bg.gamma - bg.nu_hat).norm() < 1e-10);
    }

    #[test]
    fn leading_term_has_modulus_q(alpha in 0.05f64..0.99, ls in -2.0f64..2.0, lt in 3.0f64..25.0) {
        let sd = SyntheticCaseII::new(1.3, 0.6, 0.4).unwrap();
        let wp = wedge_point(alpha, ls.exp(), lt.exp(), Side::PlusX).unwrap();
        let p = predict_q(&sd, &wp).unwrap();
        let q = amplitude_q(&sd).unwrap();
        prop_assert!((p.leading.norm() - q).abs() <= 1e-13 * q);
    }

    #[test]
    fn nu_hat_real_part_is_nonnegative_for_the_step(a in 0.5f64..3.0, lt in 2.0f64..20.0) {
        // 1 + r₁r₂ = 4k²/(4k² + A²) < 1 on the real line
        let sd = PureStepSpectrum { amplitude: a };
        prop_assert!(nu_hat(&sd, 0.5, 1.0, lt.exp()).unwrap().re >= 0.0);
    }

    #[test]
    fn psi_vanishes_only_at_one(alpha in 0.0f64..1.0) {
        let sd = PureStepSpectrum { amplitude: 1.0 };
        let pc = phase_coefficients(&sd, alpha.max(1e-6), 1.0).unwrap();
        prop_assert!(pc.psi > 0.0);
        prop_assert!((pc.psi - psi(alpha.max(1e-6))).abs() < 1e-15);
        prop_assert!((pc.phi11 + pc.phi12 + 2.0 * pc.psi).abs() < 1e-14);
    }

    #[test]
    fn symmetric_grids_mirror_exactly(half in 0.5f64..600.0, m in 2usize..3000) {
        let g = symmetric_grid(half, 2 * m + 1);
        prop_assert!(check_symmetric(&g).is_ok());
        for j in 0..g.len() {
            prop_assert_eq!(g[j], -g[g.len() - 1 - j]);
        }
    }

    #[test]
    fn even_real_fields_give_cubes(w in 0.2f64..5.0, amp in 0.1f64..3.0) {
        let g = symmetric_grid(10.0, 201);
        let q: Vec<C64> = g.iter().map(|x| C64::new(amp * (-(x / w).powi(2)).exp(), 0.0)).collect();
        let snap = FieldSnapshot::new(g, 0.0, q.clone()).unwrap();
        for (n, q) in mirror_nonlinearity(&snap).iter().zip(&q) {
            prop_assert!((n - 2.0 * q.powi(3)).norm() <= 1e-14 * (1.0 + q.norm().powi(3)));
        }
    }

    #[test]
    fn profiles_are_clamped(a in 0.1f64..5.0, w in 0.0f64..3.0, r in 1.0f64..30.0, x in 0.0f64..100.0) {
        for kind in [ProfileKind::PureStep, ProfileKind::SmoothedStep, ProfileKind::CompactStep] {
            let p = InitialProfile { kind, amplitude: a, width: w, radius: r, phase: 0.0, center: 0.0 };
            prop_assert_eq!(p.eval(-r - x), C64::new(0.0, 0.0));
            prop_assert_eq!(p.eval(r + x), C64::new(a, 0.0));
        }
    }

    #[test]
    fn dilog_reflection(x in 0.001f64..0.999) {
        let lhs = dilog(x) + dilog(1.0 - x);
        let rhs = PI * PI / 6.0 - x.ln() * (1.0 - x).ln();
        prop_assert!((lhs - rhs).abs() < 1e-13);
    }

    #[test]
    fn gamma_on_the_imaginary_axis(y in 0.01f64..20.0) {
        let g = gamma(C64::new(0.0, y)).unwrap();
        let expected = PI / (y * (PI * y).sinh());
        prop_assert!((g.norm_sqr() - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn synthetic_weight_identity(eta in 0.0f64..0.95, theta in -3.0f64..3.0, k in -50.0f64..50.0) {
        prop_assume!(k.abs() > 1e-3);
        let sd = SyntheticCaseII::new(1.0, eta, theta).unwrap();
        let (r1, r2, w) = sd.reflection(k).unwrap();
        prop_assert!((1.0 + r1 * r2 - w).norm() < 1e-12);
    }
}
