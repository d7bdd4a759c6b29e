//! The classification ladder: runs the scanners, turns their evidence into
//! per-class verdicts and closes the verdicts under the implication lattice.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::profile::{
    deviation_on, long_shift_decay, remote_period_decay, sp_remote_period_decay, stationarity_decay, vanishing_test, DecayProfile,
    ScheduleConfig, Verdict,
};
use super::scan::{bohr_discrepancy, bohr_scan_ladder, remote_ap_scan_ladder, AlmostPeriodSet, RemoteMode, TauGrid};
use super::stepanov::{sp_bounded_test, sp_modulus_of_continuity, SpBound, SpModulus};
use crate::error::{LabError, Result};
use crate::function::{FunctionHandle, TimeDomain};
use crate::metrics::{pointwise_distance, window_sups, PNormConfig};
use crate::search::golden_min;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    Periodic,
    BohrAlmostPeriodic,
    AsymptoticallyAlmostPeriodic,
    AsymptoticallyTauPeriodic,
    AsymptoticallyStationary,
    RemotelyAlmostPeriodic,
    RemotelyTauPeriodic,
    RemotelyStationary,
    SpRemotelyAlmostPeriodic,
    SpRemotelyTauPeriodic,
    SpRemotelyStationary,
    SpVanishing,
    SpBounded,
    SpUniformlyContinuous,
}

impl Class {
    pub const ALL: [Class; 14] = [
        Class::Periodic,
        Class::BohrAlmostPeriodic,
        Class::AsymptoticallyAlmostPeriodic,
        Class::AsymptoticallyTauPeriodic,
        Class::AsymptoticallyStationary,
        Class::RemotelyAlmostPeriodic,
        Class::RemotelyTauPeriodic,
        Class::RemotelyStationary,
        Class::SpRemotelyAlmostPeriodic,
        Class::SpRemotelyTauPeriodic,
        Class::SpRemotelyStationary,
        Class::SpVanishing,
        Class::SpBounded,
        Class::SpUniformlyContinuous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Class::Periodic => "periodic",
            Class::BohrAlmostPeriodic => "bohr_almost_periodic",
            Class::AsymptoticallyAlmostPeriodic => "asymptotically_almost_periodic",
            Class::AsymptoticallyTauPeriodic => "asymptotically_tau_periodic",
            Class::AsymptoticallyStationary => "asymptotically_stationary",
            Class::RemotelyAlmostPeriodic => "remotely_almost_periodic",
            Class::RemotelyTauPeriodic => "remotely_tau_periodic",
            Class::RemotelyStationary => "remotely_stationary",
            Class::SpRemotelyAlmostPeriodic => "sp_remotely_almost_periodic",
            Class::SpRemotelyTauPeriodic => "sp_remotely_tau_periodic",
            Class::SpRemotelyStationary => "sp_remotely_stationary",
            Class::SpVanishing => "sp_vanishing",
            Class::SpBounded => "sp_bounded",
            Class::SpUniformlyContinuous => "sp_uniformly_continuous",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `A ⇒ B` edges of the class lattice. τ-parametrized classes share the
/// detected shift τ*.
pub const IMPLICATIONS: &[(Class, Class)] = &[
    (Class::Periodic, Class::BohrAlmostPeriodic),
    (Class::BohrAlmostPeriodic, Class::AsymptoticallyAlmostPeriodic),
    (Class::AsymptoticallyAlmostPeriodic, Class::RemotelyAlmostPeriodic),
    (Class::AsymptoticallyStationary, Class::AsymptoticallyTauPeriodic),
    (Class::AsymptoticallyTauPeriodic, Class::AsymptoticallyAlmostPeriodic),
    (Class::AsymptoticallyTauPeriodic, Class::RemotelyTauPeriodic),
    (Class::AsymptoticallyStationary, Class::RemotelyStationary),
    (Class::RemotelyStationary, Class::RemotelyTauPeriodic),
    (Class::RemotelyTauPeriodic, Class::RemotelyAlmostPeriodic),
    (Class::RemotelyTauPeriodic, Class::SpRemotelyTauPeriodic),
    (Class::RemotelyStationary, Class::SpRemotelyStationary),
    (Class::RemotelyAlmostPeriodic, Class::SpRemotelyAlmostPeriodic),
    (Class::SpVanishing, Class::SpRemotelyStationary),
    (Class::SpRemotelyStationary, Class::SpRemotelyTauPeriodic),
    (Class::SpRemotelyTauPeriodic, Class::SpRemotelyAlmostPeriodic),
];

/// `A ∧ B ⇒ C`. An asymptotically almost periodic `f = p + q` that is also
/// remotely τ-periodic has `p(·+τ) − p` almost periodic and tending to
/// zero, hence `p` τ-periodic; with every τ, `p` is constant.
pub const CONJUNCTIONS: &[(Class, Class, Class)] = &[
    (Class::AsymptoticallyAlmostPeriodic, Class::RemotelyTauPeriodic, Class::AsymptoticallyTauPeriodic),
    (Class::AsymptoticallyAlmostPeriodic, Class::RemotelyStationary, Class::AsymptoticallyStationary),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub status: Status,
    /// The shift the verdict refers to, for τ-parametrized classes.
    pub tau: Option<f64>,
    /// Keys into [`ClassificationReport::evidence`].
    pub evidence: Vec<String>,
    pub basis: String,
}

impl ClassVerdict {
    fn new(status: Status, evidence: Vec<String>, basis: impl Into<String>) -> ClassVerdict {
        ClassVerdict { status, tau: None, evidence, basis: basis.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Evidence {
    Profile(DecayProfile),
    Set(AlmostPeriodSet),
    Bound(SpBound),
    Modulus(SpModulus),
    /// A refined scalar witness, such as the residual at a detected period.
    Witness {
        tau: f64,
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    pub epsilons: Vec<f64>,
    pub schedule: ScheduleConfig,
    /// Samples per time unit for window sups.
    pub resolution: usize,
    pub p: PNormConfig,
    pub bohr_grid: TauGrid,
    pub bohr_probe: (f64, f64),
    pub remote_grid: TauGrid,
    /// Probe shifts for remote stationarity; shifts in `(0, 1]` suffice
    /// because the discrepancy at `τ₁ + τ₂` is at most the sum of the two.
    pub stationary_taus: Vec<f64>,
    /// Smallest shift considered as a period.
    pub min_period: f64,
    pub period_tol: f64,
    /// Second window length for the `S^p` cross-check.
    pub cross_check_ell: f64,
    pub sp_t_max: f64,
    pub modulus_h: Vec<f64>,
    /// Run the `S^p` remote scan over the whole shift grid.
    pub sp_scan: bool,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            epsilons: vec![0.2, 0.1, 0.05],
            schedule: ScheduleConfig::default(),
            resolution: 20,
            p: PNormConfig::default(),
            bohr_grid: TauGrid { start: 0.0, end: 30.0, step: 0.05, refine: 10 },
            bohr_probe: (0.0, 100.0),
            remote_grid: TauGrid { start: 0.0, end: 30.0, step: 0.05, refine: 10 },
            stationary_taus: vec![0.25, 0.5, 0.75, 1.0],
            min_period: 1.0,
            period_tol: 1e-6,
            cross_check_ell: 5.0,
            sp_t_max: 200.0,
            modulus_h: vec![0.01, 0.02, 0.05, 0.1],
            sp_scan: true,
        }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() || self.epsilons.iter().any(|&e| !(e > 0.0)) {
            return Err(LabError::Argument("epsilon ladder must be nonempty and positive".into()));
        }
        self.schedule.validate()?;
        self.p.validate()?;
        self.bohr_grid.nodes()?;
        self.remote_grid.nodes()?;
        if self.resolution == 0 || !(self.bohr_probe.1 > self.bohr_probe.0) {
            return Err(LabError::Argument("resolution and probe range must be positive".into()));
        }
        if self.stationary_taus.is_empty() || self.stationary_taus.iter().any(|&t| !(t > 0.0)) {
            return Err(LabError::Argument("stationary probe shifts must be positive".into()));
        }
        if !(self.min_period > 0.0) || !(self.period_tol > 0.0) || !(self.cross_check_ell > 0.0) || !(self.sp_t_max >= 1.0) {
            return Err(LabError::Argument("min_period, period_tol, cross_check_ell must be positive, sp_t_max >= 1".into()));
        }
        if self.modulus_h.is_empty() || self.modulus_h.iter().any(|&h| !(h > 0.0)) {
            return Err(LabError::Argument("modulus grid must be nonempty and positive".into()));
        }
        Ok(())
    }

    /// Largest time at which [`classify`] may evaluate a subject on the
    /// positive side (and, on the line, its mirror on the negative side).
    pub fn reach(&self) -> f64 {
        let shift = self.remote_grid.end.max(self.bohr_grid.end);
        let last_start = self.schedule.start * self.schedule.ratio.powi(self.schedule.count as i32 - 1);
        let tails = self.schedule.horizon() + last_start + 2.0 * shift + self.cross_check_ell + 1.0;
        let bohr = self.bohr_probe.1 + self.bohr_grid.end;
        let h_max = self.modulus_h.iter().copied().fold(0.0, f64::max);
        let stepanov = 2.0 * self.sp_t_max + 1.0 + h_max;
        tails.max(bohr).max(stepanov)
    }

    pub(crate) fn eps_min(&self) -> f64 {
        self.epsilons.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn eps_max(&self) -> f64 {
        self.epsilons.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema_version: u32,
    pub subject: String,
    pub domain: TimeDomain,
    /// The detected remote period τ*, if any.
    pub tau_star: Option<f64>,
    pub verdicts: BTreeMap<Class, ClassVerdict>,
    pub evidence: BTreeMap<String, Evidence>,
    pub config: ClassifyConfig,
}

impl ClassificationReport {
    pub fn status(&self, class: Class) -> Status {
        self.verdicts[&class].status
    }

    pub fn profiles(&self) -> impl Iterator<Item = (&String, &DecayProfile)> {
        self.evidence.iter().filter_map(|(k, e)| match e {
            Evidence::Profile(p) => Some((k, p)),
            _ => None,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn key(prefix: &str, x: f64) -> String {
    format!("{prefix}={x:.6}")
}

/// Holds when every profile decays below every level; fails when some
/// profile stagnates at some level.
fn ladder_status(profiles: &[&DecayProfile], epsilons: &[f64]) -> Status {
    let verdicts: Vec<Verdict> = profiles.iter().flat_map(|p| epsilons.iter().map(|&e| p.verdict_at(e))).collect();
    if verdicts.iter().all(|v| matches!(v, Verdict::DecaysBelow { .. })) {
        Status::Holds
    } else if verdicts.iter().any(|v| matches!(v, Verdict::Stagnates { .. })) {
        Status::Fails
    } else {
        Status::Inconclusive
    }
}

/// Relative density at scan scale: some shift at or beyond `min_period`
/// and no gap longer than half the scan range, at every level.
fn set_dense(sets: &[AlmostPeriodSet], min_period: f64) -> bool {
    sets.iter().all(|s| {
        let span = s.scan_range.1 - s.scan_range.0;
        s.taus_from(min_period).next().is_some() && s.inclusion_length.is_some_and(|l| l <= 0.5 * span)
    })
}

/// Search interval around the first accepted run reaching `min_period`.
fn first_run(set: &AlmostPeriodSet, min_period: f64) -> Option<(f64, f64)> {
    let taus = &set.taus;
    let gap = set.grid_step * 1.000_001;
    let mut i = taus.iter().position(|&t| t >= min_period)?;
    while i > 0 && taus[i] - taus[i - 1] <= gap {
        i -= 1;
    }
    let mut j = i;
    while j + 1 < taus.len() && taus[j + 1] - taus[j] <= gap {
        j += 1;
    }
    let lo = (taus[i] - set.grid_step).max(min_period).max(set.scan_range.0);
    let hi = (taus[j] + set.grid_step).min(set.scan_range.1);
    (hi > lo).then_some((lo, hi))
}

/// The remote period inside `[lo, hi]`. The shift minimizing the
/// discrepancy over a window at `T` drifts like `c/T` for slowly modulated
/// functions, so the minimizers over the last two windows are extrapolated
/// to `T → ∞`.
fn remote_period_estimate(f: &FunctionHandle, lo: f64, hi: f64, sched: &ScheduleConfig, res: usize) -> Result<f64> {
    let starts = sched.starts();
    let minimizer = |t0: f64| -> Result<f64> {
        let sup = |tau: f64| Ok(window_sups(|t| pointwise_distance(f, t + tau, f, t), &[t0], sched.window, res)?[0].1);
        Ok(golden_min(sup, lo, hi, 1e-10)?.0)
    };
    let tb = starts[starts.len() - 1];
    let xb = minimizer(tb)?;
    if starts.len() < 2 {
        return Ok(xb);
    }
    let ta = starts[starts.len() - 2];
    let xa = minimizer(ta)?;
    Ok(((tb * xb - ta * xa) / (tb - ta)).clamp(lo, hi))
}

/// Applies the implication lattice until nothing changes. A holding premise
/// upgrades an inconclusive conclusion; a failing conclusion downgrades an
/// inconclusive premise. A holding premise with a failing conclusion is a
/// consistency error.
pub fn enforce_lattice(verdicts: &mut BTreeMap<Class, ClassVerdict>) -> Result<()> {
    let status = |v: &BTreeMap<Class, ClassVerdict>, c: Class| v[&c].status;
    loop {
        let mut changed = false;
        for &(a, b) in IMPLICATIONS {
            match (status(verdicts, a), status(verdicts, b)) {
                (Status::Holds, Status::Fails) => {
                    return Err(LabError::Consistency(format!("{a} holds but its consequence {b} fails")));
                }
                (Status::Holds, Status::Inconclusive) => {
                    let v = verdicts.get_mut(&b).unwrap();
                    v.status = Status::Holds;
                    v.basis = format!("implied by {a}");
                    changed = true;
                }
                (Status::Inconclusive, Status::Fails) => {
                    let v = verdicts.get_mut(&a).unwrap();
                    v.status = Status::Fails;
                    v.basis = format!("{b} fails");
                    changed = true;
                }
                _ => {}
            }
        }
        for &(a, b, c) in CONJUNCTIONS {
            match (status(verdicts, a), status(verdicts, b), status(verdicts, c)) {
                (Status::Holds, Status::Holds, Status::Fails) => {
                    return Err(LabError::Consistency(format!("{a} and {b} hold but {c} fails")));
                }
                (Status::Holds, Status::Holds, Status::Inconclusive) => {
                    let v = verdicts.get_mut(&c).unwrap();
                    v.status = Status::Holds;
                    v.basis = format!("implied by {a} and {b}");
                    changed = true;
                }
                (Status::Inconclusive, Status::Holds, Status::Fails) => {
                    let v = verdicts.get_mut(&a).unwrap();
                    v.status = Status::Fails;
                    v.basis = format!("{b} holds and {c} fails");
                    changed = true;
                }
                (Status::Holds, Status::Inconclusive, Status::Fails) => {
                    let v = verdicts.get_mut(&b).unwrap();
                    v.status = Status::Fails;
                    v.basis = format!("{a} holds and {c} fails");
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

/// Places `f` in the hierarchy. Every verdict links the evidence it rests
/// on; verdicts are relative to the declared schedules and levels.
pub fn classify(f: &FunctionHandle, cfg: &ClassifyConfig) -> Result<ClassificationReport> {
    cfg.validate()?;
    let eps = &cfg.epsilons;
    let (eps_min, eps_max) = (cfg.eps_min(), cfg.eps_max());
    let min_index = eps.iter().position(|&e| e == eps_min).unwrap();
    let sched = &cfg.schedule;
    let res = cfg.resolution;
    let mut evidence: BTreeMap<String, Evidence> = BTreeMap::new();
    let mut verdicts: BTreeMap<Class, ClassVerdict> = BTreeMap::new();

    // Bohr scans and an exact period, if one is in range.
    let bohr = bohr_scan_ladder(f, eps, cfg.bohr_grid, cfg.bohr_probe, res)?;
    let bohr_keys: Vec<String> = bohr.iter().map(|s| key("bohr/eps", s.epsilon)).collect();
    for (k, s) in bohr_keys.iter().zip(&bohr) {
        evidence.insert(k.clone(), Evidence::Set(s.clone()));
    }
    let bohr_status = if set_dense(&bohr, cfg.min_period) {
        Status::Holds
    } else if bohr.iter().any(|s| s.epsilon == eps_max && s.taus_from(cfg.min_period).next().is_none()) {
        Status::Fails
    } else {
        Status::Inconclusive
    };
    verdicts.insert(Class::BohrAlmostPeriodic, ClassVerdict::new(bohr_status, bohr_keys.clone(), "ε-almost periods over the probe range"));
    let mut periodic = ClassVerdict::new(Status::Inconclusive, bohr_keys.clone(), "no exact period found in range");
    if let Some((lo, hi)) = first_run(&bohr[min_index], cfg.min_period) {
        let (tau, value) = golden_min(|t| bohr_discrepancy(f, t, cfg.bohr_probe, res), lo, hi, 1e-10)?;
        let k = key("period/tau", tau);
        evidence.insert(k.clone(), Evidence::Witness { tau, value });
        periodic.evidence.push(k);
        if value < cfg.period_tol {
            periodic.status = Status::Holds;
            periodic.tau = Some(tau);
            periodic.basis = format!("sup discrepancy {value:.3e} at τ = {tau:.9}");
        }
    }
    verdicts.insert(Class::Periodic, periodic);

    // Remote scans over the shift grid.
    let (remote, remote_profiles) = remote_ap_scan_ladder(f, eps, cfg.remote_grid, sched, RemoteMode::Uniform { resolution: res })?;
    let remote_keys: Vec<String> = remote.iter().map(|s| key("remote/eps", s.epsilon)).collect();
    for (k, s) in remote_keys.iter().zip(&remote) {
        evidence.insert(k.clone(), Evidence::Set(s.clone()));
    }
    let grid_taus = cfg.remote_grid.nodes()?;
    let all_stagnate = |profiles: &[DecayProfile], e: f64| {
        grid_taus
            .iter()
            .zip(profiles)
            .filter(|(t, _)| **t >= cfg.min_period)
            .all(|(_, p)| matches!(p.verdict_at(e), Verdict::Stagnates { .. }))
    };
    let remote_status = if set_dense(&remote, cfg.min_period) {
        Status::Holds
    } else if eps.iter().any(|&e| all_stagnate(&remote_profiles, e)) {
        Status::Fails
    } else {
        Status::Inconclusive
    };
    verdicts.insert(
        Class::RemotelyAlmostPeriodic,
        ClassVerdict::new(remote_status, remote_keys.clone(), "remote ε-translation numbers with tail thresholds"),
    );

    let tau_star = match first_run(&remote[min_index], cfg.min_period) {
        Some((lo, hi)) => Some(remote_period_estimate(f, lo, hi, sched, res)?),
        None => None,
    };

    let tau_verdict =
        |status: Status, evidence: Vec<String>, basis: &str| ClassVerdict { status, tau: tau_star, evidence, basis: basis.to_string() };
    if let Some(tau) = tau_star {
        let shift = remote_period_decay(f, tau, sched, res)?;
        let long = long_shift_decay(f, tau, sched, res)?;
        let sp1 = sp_remote_period_decay(f, tau, 1.0, &cfg.p, sched)?;
        let sp_l = sp_remote_period_decay(f, tau, cfg.cross_check_ell, &cfg.p, sched)?;
        let (k_shift, k_long) = (key("shift/tau", tau), key("long_shift/tau", tau));
        let (k_sp1, k_spl) = (key("sp_shift/ell=1/tau", tau), key(&format!("sp_shift/ell={}/tau", cfg.cross_check_ell), tau));
        verdicts.insert(
            Class::RemotelyTauPeriodic,
            tau_verdict(ladder_status(&[&shift], eps), vec![k_shift.clone()], "window sups of |f(t+τ*) − f(t)|"),
        );
        verdicts.insert(
            Class::AsymptoticallyTauPeriodic,
            tau_verdict(ladder_status(&[&long], eps), vec![k_long.clone()], "window sups of |f(t+mτ*) − f(t)|, mτ* ≥ T"),
        );
        verdicts.insert(
            Class::SpRemotelyTauPeriodic,
            tau_verdict(ladder_status(&[&sp1], eps), vec![k_sp1.clone(), k_spl.clone()], "unit-window L^p discrepancy at τ*"),
        );
        evidence.insert(k_shift, Evidence::Profile(shift));
        evidence.insert(k_long, Evidence::Profile(long));
        evidence.insert(k_sp1, Evidence::Profile(sp1));
        evidence.insert(k_spl, Evidence::Profile(sp_l));
    } else {
        for class in [Class::RemotelyTauPeriodic, Class::AsymptoticallyTauPeriodic, Class::SpRemotelyTauPeriodic] {
            verdicts.insert(class, tau_verdict(Status::Inconclusive, remote_keys.clone(), "no remote period at or above min_period"));
        }
    }

    // Stationarity.
    let dev = stationarity_decay(f, sched, res)?;
    let k_dev = "deviation_from_limit".to_string();
    verdicts.insert(
        Class::AsymptoticallyStationary,
        ClassVerdict::new(ladder_status(&[&dev], eps), vec![k_dev.clone()], "window sups of |f(t) − c|, c the tail mean"),
    );
    // Bohr almost periodic and convergent means constant.
    if verdicts[&Class::BohrAlmostPeriodic].status == Status::Inconclusive
        && verdicts[&Class::AsymptoticallyStationary].status == Status::Holds
    {
        let spread = deviation_on(f, sched, cfg.bohr_probe, res)?;
        if spread - dev.limsup_estimate() > eps_min {
            let v = verdicts.get_mut(&Class::BohrAlmostPeriodic).unwrap();
            v.status = Status::Fails;
            v.evidence.push(k_dev.clone());
            v.basis = format!("converges, yet deviates from its limit by {spread:.3e} on the probe range");
        }
    }
    evidence.insert(k_dev, Evidence::Profile(dev));

    let mut uniform = Vec::new();
    let mut sp = Vec::new();
    for &tau in &cfg.stationary_taus {
        uniform.push((key("shift/tau", tau), remote_period_decay(f, tau, sched, res)?));
        sp.push((key("sp_shift/ell=1/tau", tau), sp_remote_period_decay(f, tau, 1.0, &cfg.p, sched)?));
    }
    for (class, items, basis) in [
        (Class::RemotelyStationary, uniform, "shift profiles at every probe τ"),
        (Class::SpRemotelyStationary, sp, "unit-window L^p shift profiles at every probe τ"),
    ] {
        let refs: Vec<&DecayProfile> = items.iter().map(|(_, p)| p).collect();
        let status = ladder_status(&refs, eps);
        verdicts.insert(class, ClassVerdict::new(status, items.iter().map(|(k, _)| k.clone()).collect(), basis));
        for (k, p) in items {
            evidence.insert(k, Evidence::Profile(p));
        }
    }

    // Stepanov classes.
    let sp_keys: Vec<String>;
    let sp_status = if cfg.sp_scan {
        let (sets, profiles) = remote_ap_scan_ladder(f, eps, cfg.remote_grid, sched, RemoteMode::Sp { cfg: cfg.p })?;
        sp_keys = sets.iter().map(|s| key("sp_remote/eps", s.epsilon)).collect();
        let status = if set_dense(&sets, cfg.min_period) {
            Status::Holds
        } else if eps.iter().any(|&e| all_stagnate(&profiles, e)) {
            Status::Fails
        } else {
            Status::Inconclusive
        };
        for (k, s) in sp_keys.iter().zip(sets) {
            evidence.insert(k.clone(), Evidence::Set(s));
        }
        status
    } else {
        sp_keys = Vec::new();
        Status::Inconclusive
    };
    verdicts.insert(Class::SpRemotelyAlmostPeriodic, ClassVerdict::new(sp_status, sp_keys, "remote L^p ε-translation numbers"));

    let van1 = vanishing_test(f, 1.0, &cfg.p, sched)?;
    let van_l = vanishing_test(f, cfg.cross_check_ell, &cfg.p, sched)?;
    let (k_v1, k_vl) = ("vanishing/ell=1".to_string(), format!("vanishing/ell={}", cfg.cross_check_ell));
    verdicts.insert(
        Class::SpVanishing,
        ClassVerdict::new(ladder_status(&[&van1], eps), vec![k_v1.clone(), k_vl.clone()], "unit-window L^p norms"),
    );
    evidence.insert(k_v1, Evidence::Profile(van1));
    evidence.insert(k_vl, Evidence::Profile(van_l));

    let bound = sp_bounded_test(f, &cfg.p, cfg.sp_t_max)?;
    let bound_status = if !bound.norm.value.is_finite() || bound.later_half > 1.5 * bound.norm.value + eps_max {
        Status::Fails
    } else if bound.later_half <= 1.25 * bound.norm.value + eps_min {
        Status::Holds
    } else {
        Status::Inconclusive
    };
    verdicts.insert(
        Class::SpBounded,
        ClassVerdict::new(bound_status, vec!["sp_norm".into()], "S^p norm on [0, t_max] against [t_max, 2 t_max]"),
    );
    evidence.insert("sp_norm".into(), Evidence::Bound(bound));

    let modulus = sp_modulus_of_continuity(f, &cfg.p, &cfg.modulus_h, cfg.sp_t_max)?;
    let h_min_value = modulus.h.iter().zip(&modulus.values).min_by(|a, b| a.0.total_cmp(b.0)).map(|(_, v)| *v).unwrap_or(f64::INFINITY);
    let uc_status = if h_min_value <= eps_min {
        Status::Holds
    } else if h_min_value >= sched.fail_factor * eps_max {
        Status::Fails
    } else {
        Status::Inconclusive
    };
    verdicts.insert(
        Class::SpUniformlyContinuous,
        ClassVerdict::new(uc_status, vec!["sp_modulus".into()], "S^p modulus of continuity at the smallest h"),
    );
    evidence.insert("sp_modulus".into(), Evidence::Modulus(modulus));

    verdicts.insert(
        Class::AsymptoticallyAlmostPeriodic,
        ClassVerdict::new(Status::Inconclusive, Vec::new(), "decided through the lattice only"),
    );

    enforce_lattice(&mut verdicts)?;
    Ok(ClassificationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        subject: f.name().to_string(),
        domain: f.domain(),
        tau_star,
        verdicts,
        evidence,
        config: cfg.clone(),
    })
}
