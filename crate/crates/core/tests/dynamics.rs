use std::f64::consts::PI;

use aplab_core::builders;
use aplab_core::classify::{Class, Status, TauGrid};
use aplab_core::dynamics::{
    cocycle_primitive, equi_ap_check, fit_translate, jittered_times, omega_limit_candidates, orbit_samples, primitive_theorem_check,
    MinimalFlag, OmegaConfig, OrbitMetric, Outcome, TheoremConfig, PREMISE_BOUNDED, PREMISE_OMEGA_MINIMAL, PREMISE_SP_REMOTE,
};
use aplab_core::{FunctionHandle, GridSpec, LabError, TimeDomain};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn view(f: &FunctionHandle, h: f64, l: f64, per_unit: usize) -> FunctionHandle {
    let nodes = (l * per_unit as f64) as usize + 1;
    f.translate(h).unwrap().resample(GridSpec::with_nodes(0.0, l / (nodes - 1) as f64, nodes).unwrap()).unwrap()
}

fn ex4_2_omega() -> OmegaConfig {
    OmegaConfig { decades: vec![1e5, 1e6, 1e7, 1e8], l_view: 50.0, ..OmegaConfig::default() }
}

#[test]
fn exact_translate_is_recovered() {
    let cand = view(&builders::cos(), 1.3, 20.0, 200);
    let fit = fit_translate(&builders::cos(), &cand, (0.0, 2.0 * PI)).unwrap();
    assert!((fit.tau - 1.3).abs() < 1e-4, "{fit:?}");
    assert!(fit.residual <= 1e-6, "{fit:?}");
}

#[test]
fn perturbed_translate_residual_tracks_noise() {
    let clean = view(&builders::cos(), 1.3, 20.0, 200);
    let (g, values) = clean.samples().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let noisy: Vec<f64> = values.iter().map(|v| v + 0.01 * rng.gen_range(-1.0..=1.0)).collect();
    let cand = FunctionHandle::sampled(TimeDomain::HalfLine, g, 1, noisy).unwrap();
    let fit = fit_translate(&builders::cos(), &cand, (0.0, 2.0 * PI)).unwrap();
    assert!(fit.residual <= 0.0101 && fit.residual >= 0.009, "{fit:?}");
    assert!((fit.tau - 1.3).abs() < 1e-2);
}

#[test]
fn constant_is_far_from_every_cosine() {
    let cand = view(&builders::constant(0.0), 0.0, 20.0, 200);
    let fit = fit_translate(&builders::cos(), &cand, (0.0, 2.0 * PI)).unwrap();
    assert!(fit.residual >= 1.0 - 1e-6, "{fit:?}");
}

#[test]
fn constant_orbit_has_one_minimal_representative() {
    let cfg = OmegaConfig::default();
    let s = orbit_samples(&builders::constant(2.0), &cfg.times(), 20.0, 50, OrbitMetric::CompactOpen).unwrap();
    let c = omega_limit_candidates(&s, 0.05, cfg.tau_range).unwrap();
    assert_eq!(c.representatives.len(), 1);
    assert_eq!(c.minimal_flag, MinimalFlag::ConsistentWithMinimal);
    let grid = TauGrid::new(0.0, 10.0, 0.5).unwrap();
    let r = equi_ap_check(&c, 0.01, grid, (0.0, 5.0), 10).unwrap();
    assert_eq!(r.common.len(), r.taus.len());
    assert!(r.holds);
}

#[test]
fn too_few_late_translates_is_insufficient() {
    let s = orbit_samples(&builders::sin(), &[1.0, 2.0, 3.0, 4.0], 5.0, 20, OrbitMetric::CompactOpen).unwrap();
    assert!(matches!(omega_limit_candidates(&s, 0.05, (0.0, 7.0)), Err(LabError::InsufficientData(_))));
}

#[test]
fn ex4_1_late_translates_are_shifted_cosines() {
    let cfg = OmegaConfig::default();
    let times = cfg.times();
    let s = orbit_samples(&builders::ex4_1_phi(), &times, cfg.l_view, cfg.resolution, cfg.metric).unwrap();
    for (h, t) in times.iter().zip(&s.translates).filter(|(h, _)| **h >= 1e4) {
        let fit = fit_translate(&builders::cos(), t, (0.0, 2.0 * PI)).unwrap();
        assert!(fit.residual < 0.05, "h = {h}: {fit:?}");
        // The drift over the window is about ln(1 + L/h).
        assert!(fit.residual < 2.0 * (1.0 + cfg.l_view / h).ln() + 1e-4, "h = {h}: {fit:?}");
    }
    let c = omega_limit_candidates(&s, cfg.radius, cfg.tau_range).unwrap();
    assert!(c.verify_cover(&s).unwrap());
    assert_eq!(c.minimal_flag, MinimalFlag::ConsistentWithMinimal);
    for rep in &c.representatives {
        let fit = fit_translate(&builders::cos(), &rep.translate, (0.0, 2.0 * PI)).unwrap();
        assert!(fit.residual < 0.05);
    }
    let grid = TauGrid::new(0.0, 14.0, 0.01).unwrap();
    let r = equi_ap_check(&c, 0.1, grid, (0.0, 5.0), 20).unwrap();
    assert!(r.holds, "{:?}", r.worst_case);
    assert!(r.common.iter().filter(|&&t| t > 1.0).all(|&t| (t - 2.0 * PI).abs() < 0.1 || (t - 4.0 * PI).abs() < 0.1));
    assert!(r.common.iter().any(|&t| (t - 2.0 * PI).abs() < 0.05));
}

#[test]
fn incommensurate_pair_shares_a_sparser_set() {
    let l = 200.0;
    let two = |w: f64| builders::trig_polynomial(TimeDomain::HalfLine, &[(1.0, w, 0.0)]);
    let times = [1.0, 2.0, 3.0, 4.0, 5.0];
    let s1 = orbit_samples(&two(1.0), &times, l, 20, OrbitMetric::CompactOpen).unwrap();
    let c1 = omega_limit_candidates(&s1, 0.05, (0.0, 7.0)).unwrap();
    let mut both = c1.clone();
    let s2 = orbit_samples(&two(2f64.sqrt()), &times, l, 20, OrbitMetric::CompactOpen).unwrap();
    both.representatives.extend(omega_limit_candidates(&s2, 0.05, (0.0, 7.0)).unwrap().representatives);
    let grid = TauGrid::new(0.0, 150.0, 0.01).unwrap();
    let single = equi_ap_check(&c1, 0.3, grid, (0.0, 40.0), 10).unwrap();
    let joint = equi_ap_check(&both, 0.3, grid, (0.0, 40.0), 10).unwrap();
    assert!(!joint.common.iter().any(|&t| t > 1.0 && !single.common.contains(&t)));
    assert!(joint.common.iter().filter(|&&t| t > 1.0).count() < single.common.iter().filter(|&&t| t > 1.0).count());
    assert!(joint.common.iter().any(|&t| t > 1.0));
}

#[test]
fn ex4_2_late_translates_are_near_constants() {
    let cfg = ex4_2_omega();
    let s = orbit_samples(&builders::ex4_2_f(), &cfg.times(), cfg.l_view, cfg.resolution, cfg.metric).unwrap();
    let c = omega_limit_candidates(&s, cfg.radius, cfg.tau_range).unwrap();
    assert!(c.late_from >= 1e5);
    assert!(c.representatives.iter().all(|r| r.oscillation < 0.2));
    let means: Vec<f64> = c.representatives.iter().map(|r| r.mean[0]).collect();
    let mut separated: Vec<f64> = Vec::new();
    let mut sorted = means.clone();
    sorted.sort_by(f64::total_cmp);
    for m in sorted {
        if separated.last().is_none_or(|&p| m - p > 0.3) {
            separated.push(m);
        }
    }
    assert!(separated.len() >= 3, "{means:?}");
    assert!(means.iter().all(|m| m.abs() <= 1.0));
    assert_eq!(c.minimal_flag, MinimalFlag::NotMinimal);
}

#[test]
fn cocycle_law_on_fixed_example() {
    let mu = builders::ex4_1_mu();
    let tol = 1e-9;
    let (t, tau) = (3.0, 5.0);
    let lhs = cocycle_primitive(t + tau, &[0.0], &mu, tol).unwrap();
    let mid = cocycle_primitive(tau, &[0.0], &mu, tol).unwrap();
    let rhs = cocycle_primitive(t, &mid, &mu.translate(tau).unwrap(), tol).unwrap();
    assert!((lhs[0] - rhs[0]).abs() <= 2.0 * tol);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cocycle_law_holds(t in 0.0f64..30.0, tau in 0.0f64..30.0, v in -2.0f64..2.0, which in 0usize..5) {
        let psi = [builders::ex4_1_mu(), builders::ex4_1_phi(), builders::ex4_2_phi(), builders::sin(), builders::constant(0.7)][which].clone();
        let tol = 1e-9;
        let lhs = cocycle_primitive(t + tau, &[v], &psi, tol).unwrap();
        let mid = cocycle_primitive(tau, &[v], &psi, tol).unwrap();
        let rhs = cocycle_primitive(t, &mid, &psi.translate(tau).unwrap(), tol).unwrap();
        prop_assert!((lhs[0] - rhs[0]).abs() <= 2.0 * tol, "{} vs {}", lhs[0], rhs[0]);
    }
}

#[test]
fn fit_recovers_random_shifts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for f in [builders::sin(), builders::ex4_1_phi()] {
        for _ in 0..50 {
            let tau = rng.gen_range(0.0..6.0);
            let cand = view(&f, tau, 20.0, 200);
            let fit = fit_translate(&f, &cand, (0.0, 6.0)).unwrap();
            assert!((fit.tau - tau).abs() < 1e-3, "{} τ = {tau}: {fit:?}", f.name());
        }
    }
}

#[test]
fn jitter_spreads_multiplicatively() {
    let t = jittered_times(&[1e2, 1e3], 16, 1);
    assert_eq!(t.len(), 32);
    assert!(t[..16].iter().all(|&h| (100.0..200.0).contains(&h)));
}

#[test]
fn theorem_check_on_ex4_1() {
    let r = primitive_theorem_check(&builders::ex4_1_mu(), &TheoremConfig::default()).unwrap();
    for key in [PREMISE_SP_REMOTE, PREMISE_OMEGA_MINIMAL, PREMISE_BOUNDED] {
        assert_eq!(r.premises[key].status, Status::Holds, "{key}: {:?}", r.premises[key]);
    }
    assert!(r.primitive_sup.0 <= 1.0 + 1e-6 && r.primitive_sup.1 <= 1.0 + 1e-6);
    assert_eq!(r.conclusion_class, Class::RemotelyTauPeriodic);
    assert_eq!(r.conclusion, Status::Holds);
    assert_eq!(r.outcome, Outcome::Consistent);
    let tau = r.primitive_report.tau_star.unwrap();
    assert!((tau - 2.0 * PI).abs() < 1e-3, "{tau}");

    // Halving every tolerance never turns a failing premise into a holding one.
    let tight = primitive_theorem_check(&builders::ex4_1_mu(), &TheoremConfig::default().tightened()).unwrap();
    for (k, p) in &r.premises {
        assert!(!(p.status == Status::Fails && tight.premises[k].status == Status::Holds), "{k}");
    }
}

#[test]
fn theorem_check_on_ex4_2() {
    let cfg = TheoremConfig { omega: ex4_2_omega(), ..TheoremConfig::default() };
    let r = primitive_theorem_check(&builders::ex4_2_phi(), &cfg).unwrap();
    for key in [PREMISE_SP_REMOTE, PREMISE_OMEGA_MINIMAL, PREMISE_BOUNDED] {
        assert_eq!(r.premises[key].status, Status::Holds, "{key}: {:?}", r.premises[key]);
    }
    assert_eq!(r.conclusion_class, Class::RemotelyStationary);
    assert_eq!(r.outcome, Outcome::Consistent);
    assert_eq!(r.primitive_omega.as_ref().unwrap().minimal_flag, MinimalFlag::NotMinimal);
}

#[test]
fn theorem_check_on_cos() {
    let cfg = TheoremConfig { primitive_omega: false, ..TheoremConfig::default() };
    let r = primitive_theorem_check(&builders::cos(), &cfg).unwrap();
    assert_eq!(r.premises_status, Status::Holds);
    assert_eq!(r.outcome, Outcome::Consistent);
    assert_eq!(r.primitive_report.status(Class::BohrAlmostPeriodic), Status::Holds);
}
