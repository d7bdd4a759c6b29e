//! Executable consistency check of the integration theorem: a bounded
//! primitive of an `S^p` remotely almost periodic function with minimal
//! ω-limit set is remotely almost periodic (τ-periodic, stationary).
//!
//! The premises and the conclusion are measured, never proved; the outcome
//! only says whether the finite-horizon evidence is consistent.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cocycle::{primitive_orbit, sampled_primitive};
use super::omega::{omega_limit_candidates, MinimalFlag, OmegaCluster};
use super::orbit::{orbit_samples, OmegaConfig};
use crate::classify::{classify, Class, ClassificationReport, ClassifyConfig, Status};
use crate::error::{LabError, Result};
use crate::function::{FunctionHandle, TimeDomain};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TheoremConfig {
    pub classify: ClassifyConfig,
    pub omega: OmegaConfig,
    /// Step of the sampled primitive that gets classified.
    pub primitive_step: f64,
    pub quad_tol: f64,
    /// Also cluster the ω-limit set of the primitive.
    pub primitive_omega: bool,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        TheoremConfig {
            classify: ClassifyConfig::default(),
            omega: OmegaConfig::default(),
            primitive_step: 0.01,
            quad_tol: 1e-8,
            primitive_omega: true,
        }
    }
}

impl TheoremConfig {
    pub fn validate(&self) -> Result<()> {
        self.classify.validate()?;
        self.omega.validate()?;
        if !(self.primitive_step > 0.0) || !(self.quad_tol > 0.0) {
            return Err(LabError::Argument("primitive_step and quad_tol must be positive".into()));
        }
        Ok(())
    }

    /// The same check with every tolerance halved.
    pub fn tightened(&self) -> TheoremConfig {
        let mut c = self.clone();
        c.classify.epsilons.iter_mut().for_each(|e| *e *= 0.5);
        c.omega.radius *= 0.5;
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Premise {
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Premises and conclusion hold on the measured horizon.
    Consistent,
    /// Premises hold but the conclusion fails.
    Contradicted,
    PremisesFail,
    Inconclusive,
}

pub const PREMISE_SP_REMOTE: &str = "sp_remotely_almost_periodic";
pub const PREMISE_OMEGA_MINIMAL: &str = "omega_minimal";
pub const PREMISE_BOUNDED: &str = "primitive_bounded";

#[derive(Debug, Clone, Serialize)]
pub struct PrimitiveTheoremReport {
    pub subject: String,
    pub premises: BTreeMap<String, Premise>,
    pub premises_status: Status,
    /// The class the primitive is expected to belong to.
    pub conclusion_class: Class,
    pub conclusion: Status,
    pub outcome: Outcome,
    /// `max |F|` over the first and the second half of the sampled range.
    pub primitive_sup: (f64, f64),
    pub omega: Option<OmegaCluster>,
    pub primitive_omega: Option<OmegaCluster>,
    pub subject_report: ClassificationReport,
    pub primitive_report: ClassificationReport,
}

fn combine(statuses: impl IntoIterator<Item = Status>) -> Status {
    let all: Vec<Status> = statuses.into_iter().collect();
    if all.contains(&Status::Fails) {
        Status::Fails
    } else if all.iter().all(|&s| s == Status::Holds) {
        Status::Holds
    } else {
        Status::Inconclusive
    }
}

fn minimal_premise(cluster: &Result<OmegaCluster>) -> Premise {
    match cluster {
        Ok(c) => Premise {
            status: match c.minimal_flag {
                MinimalFlag::ConsistentWithMinimal => Status::Holds,
                MinimalFlag::NotMinimal => Status::Fails,
                MinimalFlag::Unknown => Status::Inconclusive,
            },
            detail: format!("{} representatives, flag {:?}", c.representatives.len(), c.minimal_flag),
        },
        Err(e) => Premise { status: Status::Inconclusive, detail: e.to_string() },
    }
}

fn cluster_orbit(f: &FunctionHandle, cfg: &OmegaConfig) -> Result<OmegaCluster> {
    let sample = orbit_samples(f, &cfg.times(), cfg.l_view, cfg.resolution, cfg.metric)?;
    omega_limit_candidates(&sample, cfg.radius, cfg.tau_range)
}

/// `max |F|` over nodes with `|t| ≤ reach/2` and over the rest.
fn halves_sup(prim: &FunctionHandle, reach: f64) -> (f64, f64) {
    let (g, values) = prim.samples().expect("sampled primitive");
    let dim = prim.dim();
    let norm = prim.norm();
    let mut early: f64 = 0.0;
    let mut later: f64 = 0.0;
    for (i, row) in values.chunks(dim).enumerate() {
        let v = norm.norm(row);
        if g.node(i).abs() <= 0.5 * reach {
            early = early.max(v);
        } else {
            later = later.max(v);
        }
    }
    (early, later)
}

/// Measures the three premises on `phi`, classifies a sampled primitive
/// and compares it with the expected class.
pub fn primitive_theorem_check(phi: &FunctionHandle, cfg: &TheoremConfig) -> Result<PrimitiveTheoremReport> {
    cfg.validate()?;
    let ccfg = &cfg.classify;
    let subject_report = classify(phi, ccfg)?;
    let mut premises = BTreeMap::new();

    let sp_status = subject_report.status(Class::SpRemotelyAlmostPeriodic);
    premises.insert(PREMISE_SP_REMOTE.to_string(), Premise { status: sp_status, detail: format!("τ* = {:?}", subject_report.tau_star) });

    let omega = cluster_orbit(phi, &cfg.omega);
    premises.insert(PREMISE_OMEGA_MINIMAL.to_string(), minimal_premise(&omega));

    let reach = ccfg.reach() + 1.0;
    let lower = if phi.domain() == TimeDomain::FullLine { -reach } else { 0.0 };
    let prim = sampled_primitive(phi, lower, reach, cfg.primitive_step)?;
    let (early, later) = halves_sup(&prim, reach);
    let bounded = if later <= 1.25 * early + ccfg.eps_min() {
        Status::Holds
    } else if later > 1.5 * early + ccfg.eps_max() {
        Status::Fails
    } else {
        Status::Inconclusive
    };
    premises.insert(
        PREMISE_BOUNDED.to_string(),
        Premise { status: bounded, detail: format!("sup |F| = {early:.6} on the first half, {later:.6} on the second") },
    );
    let premises_status = combine(premises.values().map(|p| p.status));

    let conclusion_class = if subject_report.status(Class::SpRemotelyStationary) == Status::Holds {
        Class::RemotelyStationary
    } else if subject_report.status(Class::SpRemotelyTauPeriodic) == Status::Holds {
        Class::RemotelyTauPeriodic
    } else {
        Class::RemotelyAlmostPeriodic
    };
    let primitive_report = classify(&prim, ccfg)?;
    let conclusion = primitive_report.status(conclusion_class);
    let outcome = match (premises_status, conclusion) {
        (Status::Fails, _) => Outcome::PremisesFail,
        (Status::Holds, Status::Holds) => Outcome::Consistent,
        (Status::Holds, Status::Fails) => Outcome::Contradicted,
        _ => Outcome::Inconclusive,
    };

    let primitive_omega = if cfg.primitive_omega && phi.domain() == TimeDomain::HalfLine {
        let o = &cfg.omega;
        let sample = primitive_orbit(phi, &o.times(), o.l_view, o.resolution, o.metric, o.tau_range.1, cfg.quad_tol)?;
        omega_limit_candidates(&sample, o.radius, o.tau_range).ok()
    } else {
        None
    };

    Ok(PrimitiveTheoremReport {
        subject: phi.name().to_string(),
        premises,
        premises_status,
        conclusion_class,
        conclusion,
        outcome,
        primitive_sup: (early, later),
        omega: omega.ok(),
        primitive_omega,
        subject_report,
        primitive_report,
    })
}
