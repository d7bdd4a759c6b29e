//! Decay profiles: a discrepancy measured over advancing windows
//! `[T_k, T_k + W]` and a three-valued verdict on whether it tends to zero.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::function::{FunctionHandle, TimeDomain};
use crate::metrics::{check_schedule, pointwise_distance, pointwise_norm, window_sups, windowed_sup, PNormConfig};
use crate::quadrature::{composite_simpson, even_panels};

/// Advancing window schedule `T_k = start·ratio^k`, `k < count`, together
/// with the rule that turns a profile into a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub start: f64,
    pub ratio: f64,
    pub count: usize,
    pub window: f64,
    /// Number of trailing windows that must agree for a verdict.
    pub k_confirm: usize,
    pub threshold: f64,
    /// A profile stagnates at `θ` when its trailing values stay above
    /// `fail_factor·θ`.
    pub fail_factor: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { start: 50.0, ratio: 2.0, count: 9, window: 50.0, k_confirm: 3, threshold: 0.05, fail_factor: 10.0 }
    }
}

impl ScheduleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.start > 0.0) || !(self.ratio > 1.0) || !(self.window > 0.0) {
            return Err(LabError::Argument("schedule needs start > 0, ratio > 1 and window > 0".into()));
        }
        if self.count == 0 || self.k_confirm == 0 || self.k_confirm > self.count {
            return Err(LabError::Argument(format!(
                "schedule needs 1 <= k_confirm <= count, got k_confirm = {}, count = {}",
                self.k_confirm, self.count
            )));
        }
        if !(self.threshold > 0.0) || !(self.fail_factor >= 1.0) {
            return Err(LabError::Argument("threshold must be positive and fail_factor >= 1".into()));
        }
        Ok(())
    }

    pub fn starts(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.start * self.ratio.powi(k as i32)).collect()
    }

    /// End of the last window.
    pub fn horizon(&self) -> f64 {
        self.start * self.ratio.powi(self.count as i32 - 1) + self.window
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    DecaysBelow { threshold: f64 },
    Stagnates { floor: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMode {
    /// Window sup of a pointwise discrepancy.
    UniformSup,
    /// Window sup over anchors of a normalized `L^p` window integral.
    SpWindow,
}

/// What is being measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Quantity {
    /// `|f(t+τ) − f(t)|`
    Shift,
    /// `|f(t+mτ) − f(t)|` with `m = ⌈T_k/τ⌉` fixed per window.
    LongShift,
    /// `|f(t) − c|`, `c` the mean of `f` over the trailing windows' span.
    Deviation { limit: f64 },
    /// `|f(t)|`
    Magnitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub tau: f64,
    pub mode: ProfileMode,
    pub quantity: Quantity,
    /// Window length `ℓ` of the `L^p` integral (S^p mode only).
    pub ell: Option<f64>,
    pub p: Option<f64>,
    /// `(T_k, value)`, sorted by `T_k`.
    pub records: Vec<(f64, f64)>,
    pub window: f64,
    pub k_confirm: usize,
    pub fail_factor: f64,
    pub verdict: Verdict,
}

impl DecayProfile {
    fn tail(&self) -> &[(f64, f64)] {
        &self.records[self.records.len() - self.k_confirm.min(self.records.len())..]
    }

    /// Max over the trailing `k_confirm` windows.
    pub fn limsup_estimate(&self) -> f64 {
        self.tail().iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn verdict_at(&self, threshold: f64) -> Verdict {
        let tail = self.tail();
        if tail.iter().all(|r| r.1 <= threshold) {
            Verdict::DecaysBelow { threshold }
        } else if tail.iter().all(|r| r.1 >= self.fail_factor * threshold) {
            Verdict::Stagnates { floor: self.fail_factor * threshold }
        } else {
            Verdict::Inconclusive
        }
    }

    /// First window start from which every remaining value is below `eps`,
    /// provided at least `k_confirm` windows remain.
    pub fn tail_threshold(&self, eps: f64) -> Option<f64> {
        let n = self.records.len();
        let mut first = n;
        while first > 0 && self.records[first - 1].1 < eps {
            first -= 1;
        }
        (n - first >= self.k_confirm.min(n)).then(|| self.records.get(first).map(|r| r.0)).flatten()
    }

    pub(crate) fn assemble(
        tau: f64,
        mode: ProfileMode,
        quantity: Quantity,
        sp: Option<(f64, &PNormConfig)>,
        records: Vec<(f64, f64)>,
        schedule: &ScheduleConfig,
    ) -> DecayProfile {
        let mut profile = DecayProfile {
            tau,
            mode,
            quantity,
            ell: sp.map(|s| s.0),
            p: sp.map(|s| s.1.p),
            records,
            window: schedule.window,
            k_confirm: schedule.k_confirm,
            fail_factor: schedule.fail_factor,
            verdict: Verdict::Inconclusive,
        };
        profile.verdict = profile.verdict_at(schedule.threshold);
        profile
    }
}

/// Window sups of `d` along the schedule; on the line the mirrored windows
/// `[−T−W, −T]` are scanned too and the larger value is kept.
fn uniform_records<D>(d: D, domain: TimeDomain, schedule: &ScheduleConfig, resolution: usize) -> Result<Vec<(f64, f64)>>
where
    D: Fn(f64) -> Result<f64> + Sync,
{
    let starts = schedule.starts();
    check_schedule(&starts, schedule.window)?;
    let mut records = window_sups(&d, &starts, schedule.window, resolution)?;
    if domain == TimeDomain::FullLine {
        let left = window_sups(|s| d(-s), &starts, schedule.window, resolution)?;
        for (r, l) in records.iter_mut().zip(left) {
            r.1 = r.1.max(l.1);
        }
    }
    Ok(records)
}

/// Sup over anchors `t ∈ [T, T+W]` of `(ℓ^{-1}∫_t^{t+ℓ} g^p)^{1/p}`.
fn sp_records<G>(g: G, domain: TimeDomain, ell: f64, cfg: &PNormConfig, schedule: &ScheduleConfig) -> Result<Vec<(f64, f64)>>
where
    G: Fn(f64) -> Result<f64> + Sync,
{
    cfg.validate()?;
    if !(ell > 0.0) {
        return Err(LabError::Argument(format!("window length must be positive, got {ell}")));
    }
    let starts = schedule.starts();
    check_schedule(&starts, schedule.window)?;
    let scale = cfg.root(1.0 / ell);
    let sup = |g: &(dyn Fn(f64) -> Result<f64> + Sync), t0: f64| -> Result<f64> {
        Ok(scale * windowed_sup(g, t0, t0 + schedule.window, ell, cfg, false, |_, _| Ok(()))?.value)
    };
    starts
        .iter()
        .map(|&t0| {
            let mut v = sup(&g, t0)?;
            if domain == TimeDomain::FullLine {
                v = v.max(sup(&|s| g(-s), t0)?);
            }
            Ok((t0, v))
        })
        .collect()
}

fn check_tau(f: &FunctionHandle, tau: f64) -> Result<()> {
    if !tau.is_finite() || (f.domain() == TimeDomain::HalfLine && tau < 0.0) {
        return Err(LabError::Argument(format!("shift {tau} is not admissible on {:?}", f.domain())));
    }
    Ok(())
}

/// Profile of `sup_{[T_k, T_k+W]} |f(t+τ) − f(t)|`.
pub fn remote_period_decay(f: &FunctionHandle, tau: f64, schedule: &ScheduleConfig, resolution: usize) -> Result<DecayProfile> {
    schedule.validate()?;
    check_tau(f, tau)?;
    let records = uniform_records(|t| pointwise_distance(f, t + tau, f, t), f.domain(), schedule, resolution)?;
    Ok(DecayProfile::assemble(tau, ProfileMode::UniformSup, Quantity::Shift, None, records, schedule))
}

/// Profile of the windowed `L^p` discrepancy `(ℓ^{-1}∫_t^{t+ℓ}|f(s+τ) − f(s)|^p ds)^{1/p}`.
pub fn sp_remote_period_decay(
    f: &FunctionHandle,
    tau: f64,
    ell: f64,
    cfg: &PNormConfig,
    schedule: &ScheduleConfig,
) -> Result<DecayProfile> {
    schedule.validate()?;
    check_tau(f, tau)?;
    let records = sp_records(|s| pointwise_distance(f, s + tau, f, s), f.domain(), ell, cfg, schedule)?;
    Ok(DecayProfile::assemble(tau, ProfileMode::SpWindow, Quantity::Shift, Some((ell, cfg)), records, schedule))
}

/// Profile of `(ℓ^{-1}∫_t^{t+ℓ}|f|^p)^{1/p}`: vanishing at infinity in the
/// Stepanov sense.
pub fn vanishing_test(f: &FunctionHandle, ell: f64, cfg: &PNormConfig, schedule: &ScheduleConfig) -> Result<DecayProfile> {
    schedule.validate()?;
    let records = sp_records(|s| pointwise_norm(f, s), f.domain(), ell, cfg, schedule)?;
    Ok(DecayProfile::assemble(0.0, ProfileMode::SpWindow, Quantity::Magnitude, Some((ell, cfg)), records, schedule))
}

/// Profile of `sup |f(t+mτ) − f(t)|` with `m = ⌈T_k/τ⌉`. If `f` is
/// asymptotically τ-periodic, `f = p + q` with `q → 0`, the values are
/// bounded by `2 sup_{s ≥ T_k}|q(s)|`.
pub fn long_shift_decay(f: &FunctionHandle, tau: f64, schedule: &ScheduleConfig, resolution: usize) -> Result<DecayProfile> {
    schedule.validate()?;
    check_tau(f, tau)?;
    if !(tau > 0.0) {
        return Err(LabError::Argument("long-shift profile needs tau > 0".into()));
    }
    let starts = schedule.starts();
    check_schedule(&starts, schedule.window)?;
    let mut records = Vec::with_capacity(starts.len());
    for &t0 in &starts {
        let shift = (t0 / tau).ceil() * tau;
        let right = window_sups(|t| pointwise_distance(f, t + shift, f, t), &[t0], schedule.window, resolution)?[0].1;
        let value = if f.domain() == TimeDomain::FullLine {
            let left = window_sups(|s| pointwise_distance(f, -s - shift, f, -s), &[t0], schedule.window, resolution)?[0].1;
            right.max(left)
        } else {
            right
        };
        records.push((t0, value));
    }
    Ok(DecayProfile::assemble(tau, ProfileMode::UniformSup, Quantity::LongShift, None, records, schedule))
}

/// Mean of a scalar or vector handle over `[a, b]`, composite Simpson.
fn window_mean(f: &FunctionHandle, a: f64, b: f64, samples_per_unit: usize) -> Result<Vec<f64>> {
    let panels = even_panels(b - a, samples_per_unit);
    let h = (b - a) / panels as f64;
    let dim = f.dim();
    let mut columns = vec![Vec::with_capacity(panels + 1); dim];
    for i in 0..=panels {
        let v = f.evaluate(if i == panels { b } else { a + i as f64 * h })?;
        for (c, x) in columns.iter_mut().zip(v) {
            c.push(x);
        }
    }
    Ok(columns.iter().map(|c| composite_simpson(c, h) / (b - a)).collect())
}

/// Profile of `sup |f(t) − c|` where `c` is the mean of `f` over the span
/// of the trailing `k_confirm` windows. Decays iff `f` converges, up to
/// the accuracy of `c`.
pub fn stationarity_decay(f: &FunctionHandle, schedule: &ScheduleConfig, resolution: usize) -> Result<DecayProfile> {
    schedule.validate()?;
    let starts = schedule.starts();
    let span_start = starts[starts.len() - schedule.k_confirm];
    let limit = window_mean(f, span_start, schedule.horizon(), resolution)?;
    let right = uniform_records(
        |t| {
            let v = f.evaluate(t)?;
            Ok(f.norm().distance(&v, &limit))
        },
        TimeDomain::HalfLine,
        schedule,
        resolution,
    )?;
    let records = if f.domain() == TimeDomain::FullLine {
        let left_limit = window_mean(f, -schedule.horizon(), -span_start, resolution)?;
        let left = uniform_records(|s| Ok(f.norm().distance(&f.evaluate(-s)?, &left_limit)), TimeDomain::HalfLine, schedule, resolution)?;
        right.into_iter().zip(left).map(|(r, l)| (r.0, r.1.max(l.1))).collect()
    } else {
        right
    };
    let quantity = Quantity::Deviation { limit: f.norm().norm(&limit) };
    Ok(DecayProfile::assemble(0.0, ProfileMode::UniformSup, quantity, None, records, schedule))
}

/// Largest `|f(t) − c|` over `range`, with `c` the tail mean of
/// [`stationarity_decay`].
pub(crate) fn deviation_on(f: &FunctionHandle, schedule: &ScheduleConfig, range: (f64, f64), resolution: usize) -> Result<f64> {
    let starts = schedule.starts();
    let span_start = starts[starts.len() - schedule.k_confirm];
    let limit = window_mean(f, span_start, schedule.horizon(), resolution)?;
    let sups = window_sups(|t| Ok(f.norm().distance(&f.evaluate(t)?, &limit)), &[range.0], range.1 - range.0, resolution)?;
    Ok(sups[0].1)
}
