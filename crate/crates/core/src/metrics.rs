//! Distances and norms on function space.
//!
//! * `window_lp`: `(∫_t^{t+ℓ} |f|^p)^{1/p}`, the seminorms of `L^p_loc`;
//! * `compact_open_distance`: `sup_L min{max_{|t|≤L} ρ(f(t), g(t)), 1/L}`;
//! * `stepanov_metric`: `sup_ℓ min{(∫_{𝕋_ℓ} |f−g|^p)^{1/p}, 1/ℓ}`;
//! * `stepanov_norm`: `sup_t (∫_t^{t+1} |f|^p)^{1/p}`;
//! * `tail_sup_discrepancy`: sup of `ρ(f, g)` over advancing windows,
//!   estimating `limsup_{t→∞} ρ(f(t), g(t))`.
//!
//! The outer sups over `L`/`ℓ` run over a finite increasing grid. Since every
//! term is capped by `1/L`, the scan stops as soon as `1/L` cannot beat the
//! running value; this never changes the result.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::function::{FunctionHandle, TimeDomain};
use crate::quadrature::{composite_simpson, even_panels, SlidingSimpson};
use crate::search::{golden_min, refined_max};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PNormConfig {
    pub p: f64,
    pub samples_per_unit: usize,
}

impl Default for PNormConfig {
    fn default() -> Self {
        PNormConfig { p: 2.0, samples_per_unit: 100 }
    }
}

impl PNormConfig {
    pub fn new(p: f64, samples_per_unit: usize) -> Result<PNormConfig> {
        let cfg = PNormConfig { p, samples_per_unit };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(LabError::Argument(format!("p must satisfy 1 <= p < inf, got {}", self.p)));
        }
        if self.samples_per_unit == 0 {
            return Err(LabError::Argument("samples_per_unit must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn pow(&self, x: f64) -> f64 {
        if self.p == 1.0 {
            x
        } else if self.p == 2.0 {
            x * x
        } else {
            x.powf(self.p)
        }
    }

    pub(crate) fn root(&self, x: f64) -> f64 {
        if self.p == 1.0 {
            x
        } else if self.p == 2.0 {
            x.sqrt()
        } else {
            x.powf(1.0 / self.p)
        }
    }
}

/// Truncation radii for the outer sup of the compact-open and Stepanov metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupMinEvalConfig {
    pub l_values: Vec<f64>,
}

impl Default for SupMinEvalConfig {
    fn default() -> Self {
        SupMinEvalConfig { l_values: (0..=12).map(|k| 0.25 * 2f64.powi(k)).collect() }
    }
}

impl SupMinEvalConfig {
    pub fn new(l_values: Vec<f64>) -> Result<SupMinEvalConfig> {
        let cfg = SupMinEvalConfig { l_values };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l_values.is_empty() {
            return Err(LabError::Argument("truncation grid is empty".into()));
        }
        if self.l_values[0] <= 0.0 || self.l_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::Argument("truncation radii must be positive and strictly increasing".into()));
        }
        Ok(())
    }
}

/// `(∫_t^{t+ℓ} g^p)^{1/p}` for a nonnegative pointwise integrand `g`.
pub(crate) fn window_lp_of<G: Fn(f64) -> Result<f64>>(g: G, t: f64, ell: f64, cfg: &PNormConfig) -> Result<f64> {
    let panels = even_panels(ell, cfg.samples_per_unit);
    let h = ell / panels as f64;
    let raw = (0..=panels).map(|i| g(if i == panels { t + ell } else { t + i as f64 * h })).collect::<Result<Vec<_>>>()?;
    let scale = raw.iter().fold(0.0, |m: f64, &v| m.max(v));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let values: Vec<f64> = raw.iter().map(|&v| cfg.pow(v / scale)).collect();
    let unit = composite_simpson(&vec![1.0; panels + 1], h);
    Ok(scale * cfg.root((composite_simpson(&values, h) / unit * ell).max(0.0)))
}

const STACK_DIM: usize = 8;

/// `ρ(f(t), 0)`.
pub(crate) fn pointwise_norm(f: &FunctionHandle, t: f64) -> Result<f64> {
    let dim = f.dim();
    if dim <= STACK_DIM {
        let mut buf = [0.0; STACK_DIM];
        f.eval_into(t, &mut buf[..dim])?;
        Ok(f.norm().norm(&buf[..dim]))
    } else {
        Ok(f.norm().norm(&f.evaluate(t)?))
    }
}

/// `ρ(f(s), g(u))`; handles must share the codomain dimension.
pub(crate) fn pointwise_distance(f: &FunctionHandle, s: f64, g: &FunctionHandle, u: f64) -> Result<f64> {
    let dim = f.dim();
    if dim <= STACK_DIM {
        let mut a = [0.0; STACK_DIM];
        let mut b = [0.0; STACK_DIM];
        f.eval_into(s, &mut a[..dim])?;
        g.eval_into(u, &mut b[..dim])?;
        Ok(f.norm().distance(&a[..dim], &b[..dim]))
    } else {
        Ok(f.norm().distance(&f.evaluate(s)?, &g.evaluate(u)?))
    }
}

fn check_length(ell: f64) -> Result<()> {
    if !(ell > 0.0) || !ell.is_finite() {
        return Err(LabError::Argument(format!("window length must be positive, got {ell}")));
    }
    Ok(())
}

/// Windowed `L^p` seminorm of `f` over `[t, t+ℓ]`.
pub fn window_lp(f: &FunctionHandle, t: f64, ell: f64, cfg: &PNormConfig) -> Result<f64> {
    cfg.validate()?;
    check_length(ell)?;
    f.check_window(t, t + ell)?;
    window_lp_of(|s| pointwise_norm(f, s), t, ell, cfg)
}

/// Windowed `L^p` seminorm of `f − g` over `[t, t+ℓ]`.
pub fn window_lp_distance(f: &FunctionHandle, g: &FunctionHandle, t: f64, ell: f64, cfg: &PNormConfig) -> Result<f64> {
    cfg.validate()?;
    check_length(ell)?;
    f.ensure_compatible(g)?;
    f.check_window(t, t + ell)?;
    g.check_window(t, t + ell)?;
    window_lp_of(|s| pointwise_distance(f, s, g, s), t, ell, cfg)
}

/// Intervals making up `𝕋_L \ 𝕋_{L_prev}`.
fn shell(domain: TimeDomain, prev: f64, radius: f64) -> Vec<(f64, f64)> {
    match domain {
        TimeDomain::HalfLine => vec![(prev, radius)],
        TimeDomain::FullLine => vec![(-radius, -prev), (prev, radius)],
    }
}

/// Discretized compact-open distance. The inner max over `|t| ≤ L` samples
/// `sup_resolution` points per unit with local refinement.
pub fn compact_open_distance(f: &FunctionHandle, g: &FunctionHandle, cfg: &SupMinEvalConfig, sup_resolution: usize) -> Result<f64> {
    cfg.validate()?;
    f.ensure_compatible(g)?;
    let mut best: f64 = 0.0;
    let mut running: f64 = 0.0;
    let mut prev = 0.0;
    for &radius in &cfg.l_values {
        let cap = 1.0 / radius;
        if cap <= best {
            break;
        }
        for (a, b) in shell(f.domain(), prev, radius) {
            f.check_window(a, b)?;
            g.check_window(a, b)?;
            let peak = refined_max(|t| pointwise_distance(f, t, g, t), a, b, sup_resolution)?;
            running = running.max(peak.value);
        }
        best = best.max(running.min(cap));
        prev = radius;
    }
    Ok(best)
}

/// Discretized Stepanov metric `d_p`.
pub fn stepanov_metric(f: &FunctionHandle, g: &FunctionHandle, cfg: &PNormConfig, sup_cfg: &SupMinEvalConfig) -> Result<f64> {
    cfg.validate()?;
    sup_cfg.validate()?;
    f.ensure_compatible(g)?;
    let mut best: f64 = 0.0;
    let mut integral = 0.0;
    let mut prev = 0.0;
    for &radius in &sup_cfg.l_values {
        let cap = 1.0 / radius;
        if cap <= best {
            break;
        }
        for (a, b) in shell(f.domain(), prev, radius) {
            f.check_window(a, b)?;
            g.check_window(a, b)?;
            integral += cfg.pow(window_lp_of(|s| pointwise_distance(f, s, g, s), a, b - a, cfg)?);
        }
        best = best.max(cfg.root(integral).min(cap));
        prev = radius;
    }
    Ok(best)
}

/// A Stepanov norm estimate together with where it was attained and the
/// anchor range that was scanned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepanovNorm {
    pub value: f64,
    pub attained_at: f64,
    pub scan_start: f64,
    pub scan_end: f64,
}

/// Samples `g^p` on `[start, start + panels·h]` in parallel (order-preserving).
pub(crate) fn sample_powers<G>(g: G, start: f64, h: f64, count: usize, cfg: &PNormConfig) -> Result<Vec<f64>>
where
    G: Fn(f64) -> Result<f64> + Sync,
{
    (0..count).into_par_iter().with_min_len(1024).map(|i| g(start + i as f64 * h).map(|v| cfg.pow(v))).collect()
}

/// `sup_t (∫_t^{t+1} |f|^p)^{1/p}` over anchors in `[0, t_max]` (half-line) or
/// `[-t_max, t_max]` (line). A lower bound that converges as the resolution
/// and `t_max` grow.
pub fn stepanov_norm(f: &FunctionHandle, cfg: &PNormConfig, t_max: f64) -> Result<StepanovNorm> {
    cfg.validate()?;
    if !(t_max >= 1.0) {
        return Err(LabError::Argument(format!("t_max must be at least 1, got {t_max}")));
    }
    let start = match f.domain() {
        TimeDomain::HalfLine => 0.0,
        TimeDomain::FullLine => -t_max,
    };
    windowed_sup(|s| pointwise_norm(f, s), start, t_max, 1.0, cfg, true, |a, b| f.check_window(a, b))
}

/// Sup over anchors `t ∈ [start, end]` of `(∫_t^{t+ℓ} g^p)^{1/p}`, computed
/// with the sliding Simpson kernel; optionally polished around the best
/// anchor with a golden-section search on the direct window integral.
pub(crate) fn windowed_sup<G, C>(g: G, start: f64, end: f64, ell: f64, cfg: &PNormConfig, polish: bool, check: C) -> Result<StepanovNorm>
where
    G: Fn(f64) -> Result<f64> + Sync,
    C: Fn(f64, f64) -> Result<()>,
{
    let panels = even_panels(ell, cfg.samples_per_unit);
    let h = ell / panels as f64;
    let anchors = ((end - start) / h).round() as usize + 1;
    let end = start + (anchors - 1) as f64 * h;
    check(start, end + ell)?;
    // Integrate (g/M)^p and rescale, so a constant comes out exactly.
    let raw = sample_powers(&g, start, h, anchors + panels, &PNormConfig { p: 1.0, ..*cfg })?;
    let scale = raw.iter().fold(0.0, |m: f64, &v| m.max(v));
    let samples = raw.iter().map(|&v| if scale > 0.0 { cfg.pow(v / scale) } else { 0.0 }).collect();
    let kernel = SlidingSimpson::new(samples, h);
    let unit = SlidingSimpson::new(vec![1.0; panels + 1], h).window(0, panels);
    let (mut best_j, mut best) = (0, f64::NEG_INFINITY);
    for j in 0..anchors {
        let v = kernel.window(j, panels);
        if v > best {
            best = v;
            best_j = j;
        }
    }
    let mut at = start + best_j as f64 * h;
    let mut value = scale * cfg.root((best / unit * ell).max(0.0));
    if polish {
        let lo = (at - h).max(start);
        let hi = (at + h).min(end);
        if hi > lo {
            let (t, neg) = golden_min(|t| window_lp_of(&g, t, ell, cfg).map(|v| -v), lo, hi, 1e-10)?;
            if -neg > value {
                value = -neg;
                at = t;
            }
        }
    }
    Ok(StepanovNorm { value, attained_at: at, scan_start: start, scan_end: end })
}

/// Per-window sups of `ρ(f, g)` along an advancing schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSup {
    /// `(T, sup_{t ∈ [T, T+W]} ρ(f(t), g(t)))`
    pub records: Vec<(f64, f64)>,
    pub window: f64,
    /// Max over the last `k` windows.
    pub limsup_estimate: f64,
    pub k: usize,
}

pub const DEFAULT_LIMSUP_WINDOWS: usize = 3;

/// Sup of a pointwise discrepancy over each `[T, T+W]` of the schedule,
/// windows evaluated in parallel and reported in schedule order.
pub(crate) fn window_sups<G>(g: G, schedule: &[f64], window: f64, resolution: usize) -> Result<Vec<(f64, f64)>>
where
    G: Fn(f64) -> Result<f64> + Sync,
{
    schedule.par_iter().map(|&t0| refined_max(&g, t0, t0 + window, resolution).map(|p| (t0, p.value))).collect()
}

pub(crate) fn check_schedule(schedule: &[f64], window: f64) -> Result<()> {
    if schedule.is_empty() {
        return Err(LabError::Argument("empty window schedule".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::Argument("window schedule must be strictly increasing".into()));
    }
    check_length(window)
}

/// Numerical estimator of `limsup_{t→∞} ρ(f(t), g(t))`.
pub fn tail_sup_discrepancy(f: &FunctionHandle, g: &FunctionHandle, schedule: &[f64], window: f64, resolution: usize) -> Result<TailSup> {
    check_schedule(schedule, window)?;
    f.ensure_compatible(g)?;
    let last = *schedule.last().unwrap();
    f.check_window(schedule[0], last + window)?;
    g.check_window(schedule[0], last + window)?;
    let records = window_sups(|t| pointwise_distance(f, t, g, t), schedule, window, resolution)?;
    let k = DEFAULT_LIMSUP_WINDOWS.min(records.len());
    let limsup_estimate = records[records.len() - k..].iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(TailSup { records, window, limsup_estimate, k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::builders;

    #[test]
    fn window_of_sine_squared_matches_antiderivative() {
        let cfg = PNormConfig::default();
        for t in [0.0, 1.0, std::f64::consts::PI] {
            let got = window_lp(&builders::sin(), t, 1.0, &cfg).unwrap().powi(2);
            let exact = 0.5 - (2.0 * t + 1.0).cos() * 1f64.sin() / 2.0;
            assert!((got - exact).abs() < 1e-8, "t={t}: {got} vs {exact}");
        }
    }

    #[test]
    fn constants_and_zero() {
        let cfg = PNormConfig::new(3.0, 50).unwrap();
        assert_eq!(window_lp(&builders::zero(), 4.0, 2.5, &cfg).unwrap(), 0.0);
        let c = window_lp(&builders::constant(-1.5), 2.0, 1.0, &cfg).unwrap();
        assert!((c - 1.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_infinite_or_small_p() {
        assert!(PNormConfig::new(0.5, 10).is_err());
        assert!(PNormConfig::new(f64::INFINITY, 10).is_err());
        assert!(SupMinEvalConfig::new(vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn window_outside_half_line_is_domain_error() {
        let r = window_lp(&builders::sin(), -0.5, 1.0, &PNormConfig::default());
        assert!(matches!(r, Err(LabError::Domain(_))));
    }

    #[test]
    fn compact_open_of_constant_gap() {
        for c in [0.1, 1.0, 3.9] {
            let d = compact_open_distance(&builders::zero(), &builders::constant(c), &SupMinEvalConfig::default(), 20).unwrap();
            assert!((d - c).abs() < 1e-15, "{c}: {d}");
        }
        // beyond the largest cap 1/L_min = 4 the value saturates
        let d = compact_open_distance(&builders::zero(), &builders::constant(7.0), &SupMinEvalConfig::default(), 20).unwrap();
        assert_eq!(d, 4.0);
    }

    #[test]
    fn stepanov_metric_of_unit_constant() {
        // sup_ℓ min{ℓ, 1/ℓ} = 1 at ℓ = 1, which lies on the default grid
        let cfg = PNormConfig::new(1.0, 20).unwrap();
        let d = stepanov_metric(&builders::zero(), &builders::constant(1.0), &cfg, &SupMinEvalConfig::default()).unwrap();
        assert!((d - 1.0).abs() < 1e-12, "{d}");
    }

    #[test]
    fn stepanov_norm_of_sine() {
        let n = stepanov_norm(&builders::sin(), &PNormConfig::default(), 20.0).unwrap();
        let oracle = (0.5 + 1f64.sin() / 2.0).sqrt();
        assert!((n.value - oracle).abs() < 1e-6, "{} vs {oracle}", n.value);
    }

    #[test]
    fn tail_sup_of_sine_against_zero() {
        let schedule = [50.0, 100.0, 200.0];
        let r = tail_sup_discrepancy(&builders::sin(), &builders::zero(), &schedule, 50.0, 10).unwrap();
        for (_, v) in &r.records {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert!(tail_sup_discrepancy(&builders::sin(), &builders::zero(), &[], 50.0, 10).is_err());
    }
}
