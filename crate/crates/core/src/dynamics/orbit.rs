//! Samples of the translation flow `h ↦ f^h = f(· + h)` restricted to a
//! viewing window `[0, L_view]`.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::function::{FunctionHandle, GridSpec};
use crate::quadrature::SlidingSimpson;

pub const DEFAULT_JITTER_SEED: u64 = 0x5e_ed0f_0b17;

/// Distance between two translates on the viewing window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitMetric {
    /// `max_{[0, L_view]} ρ`, the compact-open distance at scale `L_view`.
    CompactOpen,
    /// Largest unit-window `L^p` distance inside `[0, L_view]`.
    Stepanov { p: f64 },
}

/// Where and how densely the orbit is sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OmegaConfig {
    /// Base translation times; each gets `jitter` multiplicative offsets
    /// `h·(1 + u)`, `u ∈ [0, 1)`.
    pub decades: Vec<f64>,
    pub jitter: usize,
    pub seed: u64,
    pub l_view: f64,
    /// Samples per time unit of the materialized translates.
    pub resolution: usize,
    pub radius: f64,
    /// Shift range searched when fitting one translate to another.
    pub tau_range: (f64, f64),
    pub metric: OrbitMetric,
}

impl Default for OmegaConfig {
    fn default() -> Self {
        OmegaConfig {
            decades: vec![1e2, 1e3, 1e4, 1e5],
            jitter: 16,
            seed: DEFAULT_JITTER_SEED,
            l_view: 20.0,
            resolution: 200,
            radius: 0.05,
            tau_range: (0.0, 10.0),
            metric: OrbitMetric::CompactOpen,
        }
    }
}

impl OmegaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.decades.is_empty() || self.decades.iter().any(|&h| !(h >= 0.0) || !h.is_finite()) {
            return Err(LabError::Argument("orbit times must be nonempty, finite and nonnegative".into()));
        }
        if self.jitter == 0 || self.resolution < 2 || !(self.l_view > 0.0) || !(self.radius > 0.0) {
            return Err(LabError::Argument("jitter, resolution, l_view and radius must be positive".into()));
        }
        if !(self.tau_range.1 > self.tau_range.0) {
            return Err(LabError::Argument(format!("empty fit range {:?}", self.tau_range)));
        }
        if let OrbitMetric::Stepanov { p } = self.metric {
            if !(p >= 1.0) || !p.is_finite() {
                return Err(LabError::Argument(format!("p must be finite and >= 1, got {p}")));
            }
            if !self.resolution.is_multiple_of(2) || self.l_view < 1.0 {
                return Err(LabError::Argument("Stepanov orbit metric needs an even resolution and l_view >= 1".into()));
            }
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        jittered_times(&self.decades, self.jitter, self.seed)
    }
}

/// `h·(1 + u)` for `jitter` seeded uniform `u ∈ [0, 1)` per base time, sorted.
pub fn jittered_times(decades: &[f64], jitter: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = Uniform::new(0.0, 1.0);
    let mut times: Vec<f64> =
        decades.iter().flat_map(|&h| (0..jitter).map(|_| h * (1.0 + u.sample(&mut rng))).collect::<Vec<_>>()).collect();
    times.sort_by(f64::total_cmp);
    times
}

/// Materialized translates `f^h` on `[0, L_view]`.
#[derive(Debug, Clone)]
pub struct OrbitSample {
    pub base: String,
    pub times: Vec<f64>,
    pub l_view: f64,
    pub resolution: usize,
    pub metric: OrbitMetric,
    pub translates: Vec<FunctionHandle>,
    /// Source of translates evaluable past the viewing window.
    pub(crate) lookahead: Lookahead,
}

#[derive(Debug, Clone)]
pub(crate) enum Lookahead {
    Source(FunctionHandle),
    /// One handle per time, sampled on `[0, L_view + extra]`.
    Extended(Vec<FunctionHandle>),
}

pub(crate) fn view_grid(l_view: f64, resolution: usize) -> Result<GridSpec> {
    let nodes = (l_view * resolution as f64).round() as usize + 1;
    GridSpec::with_nodes(0.0, l_view / (nodes - 1) as f64, nodes)
}

pub fn orbit_samples(f: &FunctionHandle, times: &[f64], l_view: f64, resolution: usize, metric: OrbitMetric) -> Result<OrbitSample> {
    if times.is_empty() || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(LabError::Argument("orbit times must be nonempty and strictly increasing".into()));
    }
    if !(l_view > 0.0) || resolution == 0 {
        return Err(LabError::Argument("l_view and resolution must be positive".into()));
    }
    let grid = view_grid(l_view, resolution)?;
    let translates = times
        .par_iter()
        .map(|&h| {
            f.check_window(h, h + l_view)?;
            let t = f.translate(h)?.resample(grid)?;
            Ok(t.with_name(format!("{}^{h}", f.name())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrbitSample {
        base: f.name().to_string(),
        times: times.to_vec(),
        l_view,
        resolution,
        metric,
        translates,
        lookahead: Lookahead::Source(f.clone()),
    })
}

impl OrbitSample {
    /// Distance between translates `i` and `j` under the sample's metric.
    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        view_distance(&self.translates[i], &self.translates[j], self.metric)
    }

    /// `f^{h_i}` as a handle evaluable beyond `[0, L_view]`.
    pub fn lookahead(&self, i: usize) -> Result<FunctionHandle> {
        match &self.lookahead {
            Lookahead::Source(f) => f.translate(self.times[i]),
            Lookahead::Extended(v) => Ok(v[i].clone()),
        }
    }
}

/// Distance of two handles sampled on the same viewing grid.
pub(crate) fn view_distance(a: &FunctionHandle, b: &FunctionHandle, metric: OrbitMetric) -> Result<f64> {
    let ((ga, va), (gb, vb)) = match (a.samples(), b.samples()) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(LabError::Argument("view distance needs sampled handles".into())),
    };
    if ga != gb || a.dim() != b.dim() {
        return Err(LabError::Shape("translates are not sampled on the same grid".into()));
    }
    let dim = a.dim();
    let norm = a.norm();
    let pointwise = va.chunks(dim).zip(vb.chunks(dim)).map(|(x, y)| norm.distance(x, y));
    match metric {
        OrbitMetric::CompactOpen => Ok(pointwise.fold(0.0, f64::max)),
        OrbitMetric::Stepanov { p } => {
            let panels = (1.0 / ga.step).round() as usize;
            if !panels.is_multiple_of(2) || panels + 1 > ga.nodes {
                return Err(LabError::Argument("Stepanov view distance needs an even number of panels per unit".into()));
            }
            let table = SlidingSimpson::new(pointwise.map(|d| d.powf(p)).collect(), ga.step);
            let best = (0..ga.nodes - panels).map(|i| table.window(i, panels)).fold(0.0, f64::max);
            Ok(best.max(0.0).powf(1.0 / p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::builders;
    use std::f64::consts::PI;

    #[test]
    fn jitter_is_reproducible_and_sorted() {
        let a = jittered_times(&[10.0, 100.0], 4, 7);
        assert_eq!(a, jittered_times(&[10.0, 100.0], 4, 7));
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(a[..4].iter().all(|&h| (10.0..20.0).contains(&h)));
    }

    #[test]
    fn periodic_translates_coincide() {
        let times: Vec<f64> = (1..6).map(|k| 2.0 * PI * k as f64).collect();
        let s = orbit_samples(&builders::sin(), &times, 20.0, 50, OrbitMetric::CompactOpen).unwrap();
        let (g, base) = s.translates[0].samples().unwrap();
        for t in &s.translates {
            let (_, v) = t.samples().unwrap();
            for (i, x) in v.iter().enumerate() {
                assert!((x - g.node(i).sin()).abs() < 1e-10);
                assert!((x - base[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn stepanov_view_distance_of_constants() {
        let times = [1.0, 2.0];
        let a = orbit_samples(&builders::constant(1.0), &times, 5.0, 20, OrbitMetric::Stepanov { p: 2.0 }).unwrap();
        let b = orbit_samples(&builders::constant(-0.5), &times, 5.0, 20, OrbitMetric::Stepanov { p: 2.0 }).unwrap();
        let d = view_distance(&a.translates[0], &b.translates[1], OrbitMetric::Stepanov { p: 2.0 }).unwrap();
        assert!((d - 1.5).abs() < 1e-12);
    }
}
