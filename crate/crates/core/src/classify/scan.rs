//! Translation-number scans: Bohr ε-almost periods over a finite probe
//! range and remote ε-translation numbers with per-τ tail thresholds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::{remote_period_decay, sp_remote_period_decay, DecayProfile, ScheduleConfig};
use crate::error::{LabError, Result};
use crate::function::FunctionHandle;
use crate::metrics::{pointwise_distance, PNormConfig};
use crate::search::refined_max;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    BohrUniform,
    RemoteUniform,
    RemoteSp,
}

/// Uniform grid of candidate shifts `start, start + step, …, end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauGrid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
    /// Subdivision used once at every acceptance boundary crossing.
    #[serde(default = "default_refine")]
    pub refine: usize,
}

fn default_refine() -> usize {
    10
}

impl TauGrid {
    pub fn new(start: f64, end: f64, step: f64) -> Result<TauGrid> {
        let g = TauGrid { start, end, step, refine: default_refine() };
        g.nodes()?;
        Ok(g)
    }

    pub fn nodes(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.end > self.start) || !self.start.is_finite() || !self.end.is_finite() {
            return Err(LabError::Argument(format!("empty shift grid [{}, {}] step {}", self.start, self.end, self.step)));
        }
        let n = ((self.end - self.start) / self.step).round() as usize;
        Ok((0..=n).map(|i| if i == n { self.end } else { self.start + i as f64 * self.step }).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlmostPeriodSet {
    pub epsilon: f64,
    pub mode: ScanMode,
    pub taus: Vec<f64>,
    /// Tail threshold `L(ε, f, τ)` per accepted τ (remote modes).
    pub per_tau_l: Option<Vec<f64>>,
    pub scan_range: (f64, f64),
    pub grid_step: f64,
    pub inclusion_length: Option<f64>,
}

impl AlmostPeriodSet {
    /// Accepted shifts at or above `min`.
    pub fn taus_from(&self, min: f64) -> impl Iterator<Item = f64> + '_ {
        self.taus.iter().copied().filter(move |&t| t >= min)
    }
}

/// Largest gap in `scan_start, taus…, scan_end`: every subinterval of the
/// scan range of this length meets the set. `None` when the set is empty.
pub fn inclusion_length(taus: &[f64], scan_range: (f64, f64)) -> Option<f64> {
    let (first, last) = (*taus.first()?, *taus.last()?);
    let inner = taus.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    Some(inner.max(first - scan_range.0).max(scan_range.1 - last))
}

/// Per-shift measurements on the base grid, reusable across ε levels.
pub(crate) struct GridMeasure<M> {
    pub grid: TauGrid,
    pub taus: Vec<f64>,
    pub values: Vec<M>,
}

impl<M: Send + Sync> GridMeasure<M> {
    pub fn compute<F>(grid: TauGrid, measure: &F) -> Result<GridMeasure<M>>
    where
        F: Fn(f64) -> Result<M> + Sync,
    {
        let taus = grid.nodes()?;
        let values = taus.par_iter().map(|&t| measure(t)).collect::<Result<Vec<_>>>()?;
        Ok(GridMeasure { grid, taus, values })
    }

    /// Accepted shifts at one level: `accept` returns the tail threshold of
    /// an accepted measurement. Boundary crossings between neighbouring grid
    /// points are refined once.
    pub fn select<F, A>(&self, measure: &F, accept: &A) -> Result<(Vec<f64>, Vec<f64>)>
    where
        F: Fn(f64) -> Result<M> + Sync,
        A: Fn(&M) -> Option<f64> + Sync,
    {
        let verdicts: Vec<Option<f64>> = self.values.iter().map(accept).collect();
        let mut out: Vec<(f64, f64)> = Vec::new();
        let crossings: Vec<usize> =
            (0..self.taus.len().saturating_sub(1)).filter(|&i| verdicts[i].is_some() != verdicts[i + 1].is_some()).collect();
        let refined: Vec<Vec<(f64, f64)>> = crossings
            .par_iter()
            .map(|&i| {
                let (a, b) = (self.taus[i], self.taus[i + 1]);
                let r = self.grid.refine.max(1);
                (1..r)
                    .map(|j| {
                        let t = a + (b - a) * j as f64 / r as f64;
                        Ok(accept(&measure(t)?).map(|l| (t, l)))
                    })
                    .filter_map(|x| x.transpose())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        for (i, v) in verdicts.iter().enumerate() {
            if let Some(l) = v {
                out.push((self.taus[i], *l));
            }
        }
        out.extend(refined.into_iter().flatten());
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(out.into_iter().unzip())
    }
}

/// `sup_{t ∈ probe} |f(t+τ) − f(t)|`.
pub fn bohr_discrepancy(f: &FunctionHandle, tau: f64, probe: (f64, f64), resolution: usize) -> Result<f64> {
    f.check_window(probe.0, probe.1)?;
    f.check_window(probe.0 + tau, probe.1 + tau)?;
    Ok(refined_max(|t| pointwise_distance(f, t + tau, f, t), probe.0, probe.1, resolution)?.value)
}

/// Bohr scans at each level of a ladder from a single set of measurements.
pub fn bohr_scan_ladder(
    f: &FunctionHandle,
    epsilons: &[f64],
    grid: TauGrid,
    probe: (f64, f64),
    resolution: usize,
) -> Result<Vec<AlmostPeriodSet>> {
    if !(probe.1 > probe.0) {
        return Err(LabError::Argument(format!("empty probe range {probe:?}")));
    }
    let measure = |tau: f64| bohr_discrepancy(f, tau, probe, resolution);
    let m = GridMeasure::compute(grid, &measure)?;
    epsilons
        .iter()
        .map(|&eps| {
            check_eps(eps)?;
            let (taus, _) = m.select(&measure, &|v: &f64| (*v < eps).then_some(0.0))?;
            Ok(AlmostPeriodSet {
                epsilon: eps,
                mode: ScanMode::BohrUniform,
                inclusion_length: inclusion_length(&taus, (grid.start, grid.end)),
                taus,
                per_tau_l: None,
                scan_range: (grid.start, grid.end),
                grid_step: grid.step,
            })
        })
        .collect()
}

/// Shifts `τ` on the grid with `sup_{t ∈ probe}|f(t+τ) − f(t)| < ε`.
pub fn bohr_scan(f: &FunctionHandle, epsilon: f64, grid: TauGrid, probe: (f64, f64), resolution: usize) -> Result<AlmostPeriodSet> {
    Ok(bohr_scan_ladder(f, &[epsilon], grid, probe, resolution)?.remove(0))
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(LabError::Argument(format!("epsilon must be positive, got {eps}")));
    }
    Ok(())
}

/// Which discrepancy a remote scan measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RemoteMode {
    Uniform { resolution: usize },
    Sp { cfg: PNormConfig },
}

pub(crate) fn remote_profile(f: &FunctionHandle, tau: f64, schedule: &ScheduleConfig, mode: RemoteMode) -> Result<DecayProfile> {
    match mode {
        RemoteMode::Uniform { resolution } => remote_period_decay(f, tau, schedule, resolution),
        RemoteMode::Sp { cfg } => sp_remote_period_decay(f, tau, 1.0, &cfg, schedule),
    }
}

/// Remote scans at each level of a ladder; profiles are computed once per
/// grid shift. A shift is accepted at `ε` when its profile stays below `ε`
/// from some window start on, over at least `k_confirm` windows.
pub fn remote_ap_scan_ladder(
    f: &FunctionHandle,
    epsilons: &[f64],
    grid: TauGrid,
    schedule: &ScheduleConfig,
    mode: RemoteMode,
) -> Result<(Vec<AlmostPeriodSet>, Vec<DecayProfile>)> {
    let measure = |tau: f64| remote_profile(f, tau, schedule, mode);
    let m = GridMeasure::compute(grid, &measure)?;
    let sets = epsilons
        .iter()
        .map(|&eps| {
            check_eps(eps)?;
            let (taus, ls) = m.select(&measure, &|p: &DecayProfile| p.tail_threshold(eps))?;
            Ok(AlmostPeriodSet {
                epsilon: eps,
                mode: match mode {
                    RemoteMode::Uniform { .. } => ScanMode::RemoteUniform,
                    RemoteMode::Sp { .. } => ScanMode::RemoteSp,
                },
                inclusion_length: inclusion_length(&taus, (grid.start, grid.end)),
                taus,
                per_tau_l: Some(ls),
                scan_range: (grid.start, grid.end),
                grid_step: grid.step,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((sets, m.values))
}

pub fn remote_ap_scan(
    f: &FunctionHandle,
    epsilon: f64,
    grid: TauGrid,
    schedule: &ScheduleConfig,
    mode: RemoteMode,
) -> Result<AlmostPeriodSet> {
    Ok(remote_ap_scan_ladder(f, &[epsilon], grid, schedule, mode)?.0.remove(0))
}
