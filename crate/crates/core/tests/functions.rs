use std::f64::consts::PI;

use aplab_core::builders;
use aplab_core::metrics::{window_lp_distance, PNormConfig};
use aplab_core::quadrature::{integrate, primitive};
use aplab_core::{FunctionHandle, GridSpec, TimeDomain};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn differentiable() -> Vec<FunctionHandle> {
    vec![
        builders::sin(),
        builders::cos(),
        builders::identity(),
        builders::polynomial(&[1.0, -2.0, 0.5, 0.25]),
        builders::trig_polynomial(TimeDomain::FullLine, &[(0.7, 1.0, 0.3), (-1.2, 2.5, 1.1)]),
        builders::ex4_1_psi(),
        builders::ex4_1_phi(),
        builders::ex4_1_mu(),
        builders::ex4_2_f(),
        builders::ex4_2_phi(),
    ]
}

fn sampled_sine() -> FunctionHandle {
    let grid = GridSpec::with_nodes(0.0, 0.01, 10_001).unwrap();
    let values = (0..grid.nodes).map(|i| grid.node(i).sin()).collect();
    FunctionHandle::sampled(TimeDomain::HalfLine, grid, 1, values).unwrap()
}

#[test]
fn flow_law_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut handles = differentiable();
    handles.push(sampled_sine());
    for f in &handles {
        for _ in 0..5 {
            let (a, b) = (rng.gen_range(0.0..20.0), rng.gen_range(0.0..20.0));
            let twice = f.translate(a).unwrap().translate(b).unwrap();
            let once = f.translate(a + b).unwrap();
            for _ in 0..200 {
                let t = rng.gen_range(0.0..50.0);
                assert_eq!(twice.eval_scalar(t).unwrap(), once.eval_scalar(t).unwrap(), "{} a={a} b={b} t={t}", f.name());
            }
        }
    }
}

#[test]
fn translate_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let phi = builders::ex4_1_phi();
    let same = phi.translate(0.0).unwrap();
    for _ in 0..100 {
        let t = rng.gen_range(0.0..100.0);
        assert_eq!(same.eval_scalar(t).unwrap(), phi.eval_scalar(t).unwrap());
        let c = builders::cos();
        assert!((c.translate(2.0 * PI).unwrap().eval_scalar(t).unwrap() - t.cos()).abs() <= 1e-12);
    }
    assert_eq!(phi.translate(5.0).unwrap().eval_scalar(3.0).unwrap(), phi.eval_scalar(8.0).unwrap());
    assert!(phi.translate(-1.0).is_err());
}

#[test]
fn derivatives_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-5;
    for f in differentiable() {
        let d = f.differentiate().unwrap();
        for _ in 0..100 {
            let t = rng.gen_range(0.1..100.0);
            let fd = (f.eval_scalar(t + h).unwrap() - f.eval_scalar(t - h).unwrap()) / (2.0 * h);
            let exact = d.eval_scalar(t).unwrap();
            assert!((exact - fd).abs() <= 1e-5 * (1.0 + exact.abs()), "{} at {t}: {exact} vs {fd}", f.name());
        }
    }
}

#[test]
fn derivative_of_psi_is_mu() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d = builders::ex4_1_psi().differentiate().unwrap();
    let mu = builders::ex4_1_mu();
    for _ in 0..1000 {
        let t = rng.gen_range(0.0..500.0);
        assert!((d.eval_scalar(t).unwrap() - mu.eval_scalar(t).unwrap()).abs() <= 1e-10, "{t}");
    }
    let zero = builders::constant(4.0).differentiate().unwrap();
    assert_eq!(zero.eval_scalar(17.0).unwrap(), 0.0);
}

#[test]
fn sampled_and_kinked_derivatives_are_unsupported() {
    assert!(sampled_sine().differentiate().is_err());
    let kink = aplab_core::Expr::abs(aplab_core::Expr::affine(1.0, -1.0));
    let f = FunctionHandle::scalar(TimeDomain::HalfLine, kink).unwrap();
    assert!(f.differentiate().is_err());
}

#[test]
fn ex4_2_phi_is_derivative_of_f() {
    let f = builders::ex4_2_f();
    let h = 1e-5;
    let fd = (f.eval_scalar(10.0 + h).unwrap() - f.eval_scalar(10.0 - h).unwrap()) / (2.0 * h);
    assert!((builders::ex4_2_phi().eval_scalar(10.0).unwrap() - fd).abs() <= 1e-6);
    assert!(f.eval_scalar(0.0).unwrap().abs() < 1e-15);
    assert_eq!(builders::ex4_1_phi().eval_scalar(0.0).unwrap(), 1.0);
}

#[test]
fn cubic_quadrature_is_exact() {
    let coeffs = [0.5, -1.0, 0.75, -0.125];
    let p = builders::polynomial(&coeffs);
    for t in [0.5, 3.0, 7.25, 10.0f64] {
        let exact: f64 = coeffs.iter().enumerate().map(|(k, c)| c * t.powi(k as i32 + 1) / (k as f64 + 1.0)).sum();
        let q = primitive(&p, t, 1e-12).unwrap()[0];
        assert!((q - exact).abs() <= 1e-12 * exact.abs().max(1.0), "{t}: {q} vs {exact}");
    }
}

#[test]
fn primitive_examples() {
    assert_eq!(primitive(&builders::zero(), 42.0, 1e-9).unwrap(), vec![0.0]);
    for t in [1.0, 10.0, 100.0, 500.0f64] {
        let v = primitive(&builders::ex4_1_mu(), t, 1e-9).unwrap()[0];
        assert!((v - (t + (1.0 + t).ln()).sin()).abs() <= 1e-7, "{t}");
    }
    for t in [1.0, 10.0, 100.0f64] {
        let v = primitive(&builders::ex4_2_phi(), t, 1e-9).unwrap()[0];
        assert!((v - (PI.powi(3) + t * t).cbrt().sin()).abs() <= 1e-7, "{t}");
    }
}

#[test]
fn printed_integrand_has_three_times_the_primitive() {
    let t = 50.0f64;
    let printed = primitive(&builders::ex4_2_phi_as_printed(), t, 1e-10).unwrap()[0];
    let corrected = primitive(&builders::ex4_2_phi(), t, 1e-10).unwrap()[0];
    assert!((printed - 3.0 * corrected).abs() < 1e-8);
    assert!((printed - (PI.powi(3) + t * t).cbrt().sin()).abs() > 0.1);
}

#[test]
fn primitive_is_additive() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let pool = differentiable();
    let tol = 1e-9;
    for _ in 0..50 {
        let f = &pool[rng.gen_range(0..pool.len())];
        let (a, b) = (rng.gen_range(0.0..80.0), rng.gen_range(0.0..80.0));
        let whole = primitive(f, a + b, tol).unwrap()[0];
        let parts = primitive(f, a, tol).unwrap()[0] + integrate(f, a, a + b, tol).unwrap()[0];
        assert!((whole - parts).abs() <= 2.0 * tol, "{} a={a} b={b}", f.name());
    }
}

#[test]
fn hat_lift_examples() {
    let c = builders::constant(-2.5).hat_lift(9.0, 20).unwrap();
    let (_, values) = c.samples().unwrap();
    assert!(values.iter().all(|&v| v == -2.5));
    let id = builders::identity().hat_lift(3.0, 10).unwrap();
    let (g, values) = id.samples().unwrap();
    for (i, v) in values.iter().enumerate() {
        assert!((v - (3.0 + g.node(i))).abs() < 1e-15);
    }
    let a = builders::sin().hat_lift(0.0, 200).unwrap();
    let b = builders::sin().hat_lift(2.0 * PI, 200).unwrap();
    let d = window_lp_distance(&a, &b, 0.0, 1.0, &PNormConfig::new(2.0, 200).unwrap()).unwrap();
    assert!(d <= 1e-10, "{d}");
    assert!(builders::sin().hat_lift(-0.5, 10).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translation_composes_on_samples(a in 0.0..30.0f64, b in 0.0..30.0f64, t in 0.0..40.0f64) {
        let f = sampled_sine();
        let twice = f.translate(a).unwrap().translate(b).unwrap().eval_scalar(t).unwrap();
        let once = f.translate(a + b).unwrap().eval_scalar(t).unwrap();
        prop_assert_eq!(twice, once);
        // Linear interpolation error of sin on a 0.01 grid.
        prop_assert!((once - (t + a + b).sin()).abs() <= 0.01f64.powi(2) / 8.0 + 1e-15);
    }
}
