//! Where a function sits in the almost-periodicity hierarchy, decided from
//! explicit numerical evidence.
//!
//! Limits are operationalized over an advancing window schedule: a
//! discrepancy "decays below θ" when its last `k_confirm` window values are
//! at most θ, and "stagnates" when they all stay above `fail_factor·θ`.
//! Only a stagnating witness marks a class as failing; anything in between
//! is inconclusive.

mod profile;
mod report;
mod scan;
mod stepanov;

pub use profile::{
    long_shift_decay, remote_period_decay, sp_remote_period_decay, stationarity_decay, vanishing_test, DecayProfile, ProfileMode, Quantity,
    ScheduleConfig, Verdict,
};
pub use report::{
    classify, enforce_lattice, Class, ClassVerdict, ClassificationReport, ClassifyConfig, Evidence, Status, CONJUNCTIONS, IMPLICATIONS,
    REPORT_SCHEMA_VERSION,
};
pub use scan::{
    bohr_discrepancy, bohr_scan, bohr_scan_ladder, inclusion_length, remote_ap_scan, remote_ap_scan_ladder, AlmostPeriodSet, RemoteMode,
    ScanMode, TauGrid,
};
pub use stepanov::{sp_bounded_test, sp_modulus_of_continuity, SpBound, SpModulus};
