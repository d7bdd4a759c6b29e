//! ω-limit candidates: late translates clustered under the viewing-window
//! metric, translate fits between them and a common-period scan.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::orbit::{view_distance, OrbitMetric, OrbitSample};
use crate::classify::{bohr_discrepancy, inclusion_length, TauGrid};
use crate::error::{LabError, Result};
use crate::function::{FunctionHandle, GridSpec, PointNorm};
use crate::search::golden_min;

/// A dense, uniformly sampled table with linear interpolation.
struct Dense {
    t0: f64,
    step: f64,
    dim: usize,
    norm: PointNorm,
    values: Vec<f64>,
}

impl Dense {
    fn from_handle(f: &FunctionHandle, a: f64, b: f64, step: f64) -> Result<Dense> {
        f.check_window(a, b)?;
        let nodes = ((b - a) / step).ceil() as usize + 1;
        let grid = GridSpec::with_nodes(a, (b - a) / (nodes - 1) as f64, nodes)?;
        let s = f.resample(grid)?;
        let (g, values) = s.samples().expect("resampled handle");
        Ok(Dense { t0: g.t_start, step: g.step, dim: f.dim(), norm: f.norm(), values: values.to_vec() })
    }

    fn at(&self, t: f64, out: &mut [f64]) {
        let last = (self.values.len() / self.dim - 1) as f64;
        let x = ((t - self.t0) / self.step).clamp(0.0, last);
        let i = (x.floor() as usize).min(last as usize - 1);
        let w = x - i as f64;
        let (a, b) = (&self.values[i * self.dim..], &self.values[(i + 1) * self.dim..]);
        for k in 0..self.dim {
            out[k] = a[k] + w * (b[k] - a[k]);
        }
    }
}

/// Best shift `τ₀` and the sup residual `max_{[0,L]} ρ(candidate, base(·+τ₀))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslateFit {
    pub tau: f64,
    pub residual: f64,
}

/// Reusable fitter against one base function.
pub struct TranslateFitter {
    base: Dense,
    range: (f64, f64),
}

const FIT_COARSE_PER_UNIT: f64 = 20.0;
const FIT_BASINS: usize = 3;

impl TranslateFitter {
    /// `base` must be evaluable on `[range.0, l_view + range.1]`.
    pub fn new(base: &FunctionHandle, l_view: f64, resolution: usize, range: (f64, f64)) -> Result<TranslateFitter> {
        if !(range.1 > range.0) {
            return Err(LabError::Argument(format!("empty fit range {range:?}")));
        }
        let step = 1.0 / (4.0 * resolution as f64);
        Ok(TranslateFitter { base: Dense::from_handle(base, range.0, l_view + range.1, step)?, range })
    }

    pub fn fit(&self, candidate: &FunctionHandle) -> Result<TranslateFit> {
        let (g, values) = candidate.samples().ok_or_else(|| LabError::Argument("fit candidate must be a sampled handle".into()))?;
        if candidate.dim() != self.base.dim {
            return Err(LabError::Shape("candidate and base dimensions differ".into()));
        }
        let dim = self.base.dim;
        let norm = self.base.norm;
        let residual = |tau: f64, stride: usize| -> f64 {
            let mut buf = vec![0.0; dim];
            let mut worst: f64 = 0.0;
            let mut i = 0;
            while i < g.nodes {
                self.base.at(g.node(i) + tau, &mut buf);
                worst = worst.max(norm.distance(&values[i * dim..(i + 1) * dim], &buf));
                i += stride;
            }
            worst
        };
        let (lo, hi) = self.range;
        let step = (0.05f64).min((hi - lo) / 64.0);
        let n = ((hi - lo) / step).ceil() as usize;
        let step = (hi - lo) / n as f64;
        let stride = ((1.0 / (FIT_COARSE_PER_UNIT * g.step)).round() as usize).max(1);
        let coarse: Vec<f64> = (0..=n).map(|k| residual(lo + k as f64 * step, stride)).collect();
        let mut basins: Vec<usize> =
            (0..=n).filter(|&k| (k == 0 || coarse[k] <= coarse[k - 1]) && (k == n || coarse[k] <= coarse[k + 1])).collect();
        basins.sort_by(|&a, &b| coarse[a].total_cmp(&coarse[b]).then(a.cmp(&b)));
        basins.truncate(FIT_BASINS);
        let mut best = TranslateFit { tau: f64::NAN, residual: f64::INFINITY };
        for k in basins {
            let center = lo + k as f64 * step;
            let (a, b) = ((center - step).max(lo), (center + step).min(hi));
            let (tau, r) = golden_min(|t| Ok(residual(t, 1)), a, b, 1e-8)?;
            if r < best.residual {
                best = TranslateFit { tau, residual: r };
            }
        }
        Ok(best)
    }
}

/// `τ₀ ∈ tau_range` minimizing the sup distance on the candidate's grid
/// between `candidate` and `base(· + τ)`, by grid search and golden section.
pub fn fit_translate(base: &FunctionHandle, candidate: &FunctionHandle, tau_range: (f64, f64)) -> Result<TranslateFit> {
    let (g, _) = candidate.samples().ok_or_else(|| LabError::Argument("fit candidate must be a sampled handle".into()))?;
    let resolution = (1.0 / g.step).round().max(1.0) as usize;
    TranslateFitter::new(base, g.t_end(), resolution, tau_range)?.fit(candidate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimalFlag {
    ConsistentWithMinimal,
    NotMinimal,
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct Representative {
    /// Translation time of the representative translate.
    pub h: f64,
    /// Largest distance from a clustered translate to this one.
    pub radius: f64,
    pub members: Vec<f64>,
    /// Mean over `[0, L_view]`, per component.
    pub mean: Vec<f64>,
    /// Largest component range over `[0, L_view]`.
    pub oscillation: f64,
    #[serde(skip)]
    pub translate: FunctionHandle,
}

#[derive(Debug, Clone, Serialize)]
pub struct OmegaCluster {
    pub base: String,
    pub l_view: f64,
    pub radius: f64,
    pub metric: OrbitMetric,
    /// Translates at or after this time were clustered.
    pub late_from: f64,
    pub representatives: Vec<Representative>,
    pub distances: Vec<Vec<f64>>,
    /// `fits[i][j]`: representative `j` fitted as a translate of `i`.
    pub fits: Vec<Vec<Option<TranslateFit>>>,
    pub minimal_flag: MinimalFlag,
}

fn median(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn summarize(f: &FunctionHandle) -> (Vec<f64>, f64) {
    let (g, values) = f.samples().expect("orbit translates are sampled");
    let dim = f.dim();
    let mut mean = vec![0.0; dim];
    let mut oscillation: f64 = 0.0;
    for (k, m) in mean.iter_mut().enumerate() {
        let col: Vec<f64> = values.iter().skip(k).step_by(dim).copied().collect();
        let interior: f64 = col[1..col.len() - 1].iter().sum();
        *m = (interior + 0.5 * (col[0] + col[col.len() - 1])) * g.step / (g.t_end() - g.t_start);
        let (lo, hi) = col.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        oscillation = oscillation.max(hi - lo);
    }
    (mean, oscillation)
}

/// Greedy farthest-point cover of the late translates (`h ≥` median time),
/// seeded by the earliest of them; each representative is then fitted as a
/// translate of every other one to flag minimality.
pub fn omega_limit_candidates(sample: &OrbitSample, radius: f64, tau_range: (f64, f64)) -> Result<OmegaCluster> {
    if !(radius > 0.0) {
        return Err(LabError::Argument(format!("cluster radius must be positive, got {radius}")));
    }
    let late_from = median(&sample.times);
    let late: Vec<usize> = (0..sample.times.len()).filter(|&i| sample.times[i] >= late_from).collect();
    if late.len() < 3 {
        return Err(LabError::InsufficientData(format!("{} late translates, need at least 3", late.len())));
    }
    let dist = |i: usize, j: usize| sample.distance(i, j);

    let mut reps = vec![late[0]];
    let mut nearest: Vec<(f64, usize)> = late.par_iter().map(|&i| Ok((dist(i, late[0])?, 0))).collect::<Result<_>>()?;
    loop {
        let (far, far_d) =
            nearest.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (k, &(d, _))| if d > acc.1 { (k, d) } else { acc });
        if far_d <= radius {
            break;
        }
        let r = reps.len();
        reps.push(late[far]);
        let fresh: Vec<f64> = late.par_iter().map(|&i| dist(i, late[far])).collect::<Result<_>>()?;
        for (slot, d) in nearest.iter_mut().zip(fresh) {
            if d < slot.0 {
                *slot = (d, r);
            }
        }
    }

    let mut representatives: Vec<Representative> = reps
        .iter()
        .map(|&i| {
            let (mean, oscillation) = summarize(&sample.translates[i]);
            Representative {
                h: sample.times[i],
                radius: 0.0,
                members: Vec::new(),
                mean,
                oscillation,
                translate: sample.translates[i].clone(),
            }
        })
        .collect();
    for (k, &(d, r)) in nearest.iter().enumerate() {
        let rep = &mut representatives[r];
        rep.radius = rep.radius.max(d);
        rep.members.push(sample.times[late[k]]);
    }

    let m = reps.len();
    let distances = (0..m)
        .map(|a| (0..m).map(|b| if a == b { Ok(0.0) } else { dist(reps[a], reps[b]) }).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let fits = reps
        .par_iter()
        .map(|&i| {
            let fitter = TranslateFitter::new(&sample.lookahead(i)?, sample.l_view, sample.resolution, tau_range)?;
            reps.iter().map(|&j| if i == j { Ok(None) } else { fitter.fit(&sample.translates[j]).map(Some) }).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let residuals: Vec<f64> = fits.iter().flatten().flatten().map(|f| f.residual).collect();
    let minimal_flag = if residuals.iter().all(|&r| r < radius) {
        MinimalFlag::ConsistentWithMinimal
    } else if residuals.iter().any(|&r| r > 4.0 * radius) {
        MinimalFlag::NotMinimal
    } else {
        MinimalFlag::Unknown
    };
    Ok(OmegaCluster {
        base: sample.base.clone(),
        l_view: sample.l_view,
        radius,
        metric: sample.metric,
        late_from,
        representatives,
        distances,
        fits,
        minimal_flag,
    })
}

impl OmegaCluster {
    /// Re-checks that every clustered translate lies within its
    /// representative's recorded radius.
    pub fn verify_cover(&self, sample: &OrbitSample) -> Result<bool> {
        for rep in &self.representatives {
            for &h in &rep.members {
                let i =
                    sample.times.iter().position(|&t| t == h).ok_or_else(|| LabError::Consistency(format!("member {h} not in sample")))?;
                if view_distance(&sample.translates[i], &rep.translate, self.metric)? > rep.radius + 1e-12 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `s, x_1, …, x_dim` of one representative on its viewing grid.
    pub fn representative_csv(&self, index: usize) -> Result<String> {
        let rep = self.representatives.get(index).ok_or_else(|| LabError::Argument(format!("no representative {index}")))?;
        let (g, values) = rep.translate.samples().expect("orbit translates are sampled");
        let dim = rep.translate.dim();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["s".to_string()];
        header.extend((0..dim).map(|k| if dim == 1 { "value".to_string() } else { format!("x{k}") }));
        w.write_record(&header)?;
        for (i, row) in values.chunks(dim).enumerate() {
            let mut rec = vec![format!("{:.6}", g.node(i))];
            rec.extend(row.iter().map(|x| format!("{x:.12e}")));
            w.write_record(&rec)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| LabError::Parse(e.to_string()))?).map_err(|e| LabError::Parse(e.to_string()))
    }

    /// Pairwise distance matrix with the representatives' times as headers.
    pub fn distances_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["h".to_string()];
        header.extend(self.representatives.iter().map(|r| format!("{:.6}", r.h)));
        w.write_record(&header)?;
        for (rep, row) in self.representatives.iter().zip(&self.distances) {
            let mut rec = vec![format!("{:.6}", rep.h)];
            rec.extend(row.iter().map(|d| format!("{d:.12e}")));
            w.write_record(&rec)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| LabError::Parse(e.to_string()))?).map_err(|e| LabError::Parse(e.to_string()))
    }
}

/// Common ε-translation numbers of a set of functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquiAPReport {
    pub epsilon: f64,
    pub scan_range: (f64, f64),
    pub probe_range: (f64, f64),
    pub taus: Vec<f64>,
    /// `max_i sup_{probe} |g_i(t+τ) − g_i(t)|` per tested shift.
    pub discrepancy: Vec<f64>,
    pub common: Vec<f64>,
    pub inclusion_length: Option<f64>,
    /// Largest, over subintervals of half the scan length, of the best
    /// discrepancy found inside the subinterval.
    pub worst_case: f64,
    pub holds: bool,
}

/// Intersection of the Bohr scans of all representatives; holds when every
/// subinterval of half the scan range contains a common ε-translation number.
pub fn equi_ap_check(cluster: &OmegaCluster, epsilon: f64, grid: TauGrid, probe: (f64, f64), resolution: usize) -> Result<EquiAPReport> {
    if cluster.representatives.is_empty() {
        return Err(LabError::InsufficientData("empty cluster".into()));
    }
    if !(epsilon > 0.0) {
        return Err(LabError::Argument(format!("epsilon must be positive, got {epsilon}")));
    }
    let taus = grid.nodes()?;
    let discrepancy = taus
        .par_iter()
        .map(|&tau| {
            cluster
                .representatives
                .iter()
                .map(|r| bohr_discrepancy(&r.translate, tau, probe, resolution))
                .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
        })
        .collect::<Result<Vec<_>>>()?;
    let common: Vec<f64> = taus.iter().zip(&discrepancy).filter(|(_, &d)| d < epsilon).map(|(&t, _)| t).collect();
    let half = 0.5 * (grid.end - grid.start);
    let mut worst_case: f64 = 0.0;
    for (i, &t) in taus.iter().enumerate() {
        if t + half > grid.end + 1e-12 {
            break;
        }
        let best = taus[i..]
            .iter()
            .zip(&discrepancy[i..])
            .take_while(|(&s, _)| s <= t + half + 1e-12)
            .map(|(_, &d)| d)
            .fold(f64::INFINITY, f64::min);
        worst_case = worst_case.max(best);
    }
    Ok(EquiAPReport {
        epsilon,
        scan_range: (grid.start, grid.end),
        probe_range: probe,
        inclusion_length: inclusion_length(&common, (grid.start, grid.end)),
        taus,
        discrepancy,
        common,
        worst_case,
        holds: worst_case < epsilon,
    })
}
