//! The translation (Bebutov) flow: orbit samples, ω-limit candidates,
//! translate fits, the primitive cocycle and the integration theorem check.

mod cocycle;
mod omega;
mod orbit;
mod theorem;

pub use cocycle::{cocycle_primitive, integrate_long, primitive_orbit, sampled_primitive};
pub use omega::{
    equi_ap_check, fit_translate, omega_limit_candidates, EquiAPReport, MinimalFlag, OmegaCluster, Representative, TranslateFit,
    TranslateFitter,
};
pub use orbit::{jittered_times, orbit_samples, OmegaConfig, OrbitMetric, OrbitSample, DEFAULT_JITTER_SEED};
pub use theorem::{
    primitive_theorem_check, Outcome, Premise, PrimitiveTheoremReport, TheoremConfig, PREMISE_BOUNDED, PREMISE_OMEGA_MINIMAL,
    PREMISE_SP_REMOTE,
};
