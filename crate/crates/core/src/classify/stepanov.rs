//! Stepanov boundedness and the `S^p` modulus of continuity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::function::{FunctionHandle, TimeDomain};
use crate::metrics::{pointwise_distance, stepanov_norm, windowed_sup, PNormConfig, StepanovNorm};

/// `‖f‖_{S^p}` over `[0, t_max]` and, separately, over `[t_max, 2·t_max]`;
/// a bounded function shows no growth between the two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpBound {
    pub p: f64,
    pub norm: StepanovNorm,
    pub later_half: f64,
}

pub fn sp_bounded_test(f: &FunctionHandle, cfg: &PNormConfig, t_max: f64) -> Result<SpBound> {
    let norm = stepanov_norm(f, cfg, t_max)?;
    let g = |s: f64| crate::metrics::pointwise_norm(f, s);
    let later = windowed_sup(g, t_max, 2.0 * t_max, 1.0, cfg, false, |a, b| f.check_window(a, b))?.value;
    let later = if f.domain() == TimeDomain::FullLine {
        let mirrored = |s: f64| crate::metrics::pointwise_norm(f, -s);
        later.max(windowed_sup(mirrored, t_max, 2.0 * t_max, 1.0, cfg, false, |_, _| Ok(()))?.value)
    } else {
        later
    };
    Ok(SpBound { p: cfg.p, norm, later_half: later })
}

/// `h ↦ sup_{t} (∫_t^{t+1}|f(s+h) − f(s)|^p ds)^{1/p}` over anchors in
/// `[0, t_max]` (or `[−t_max, t_max]` on the line).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpModulus {
    pub p: f64,
    pub t_max: f64,
    pub h: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn sp_modulus_of_continuity(f: &FunctionHandle, cfg: &PNormConfig, h_grid: &[f64], t_max: f64) -> Result<SpModulus> {
    cfg.validate()?;
    if h_grid.is_empty() || h_grid.iter().any(|&h| !(h > 0.0)) {
        return Err(LabError::Argument("modulus grid must be nonempty and positive".into()));
    }
    if !(t_max > 0.0) {
        return Err(LabError::Argument(format!("t_max must be positive, got {t_max}")));
    }
    let start = match f.domain() {
        TimeDomain::HalfLine => 0.0,
        TimeDomain::FullLine => -t_max,
    };
    let values = h_grid
        .par_iter()
        .map(|&h| {
            let g = |s: f64| pointwise_distance(f, s + h, f, s);
            Ok(windowed_sup(g, start, t_max, 1.0, cfg, false, |a, b| f.check_window(a, b + h))?.value)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpModulus { p: cfg.p, t_max, h: h_grid.to_vec(), values })
}
