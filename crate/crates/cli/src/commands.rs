//! Subcommand bodies. Each writes its artifacts into the run directory and
//! returns a few lines for the terminal.

use std::f64::consts::PI;

use aplab_core::bounds::{ex4_1_bound, ex4_2_bound, ex4_2_bound_corrected};
use aplab_core::classify::{classify, remote_period_decay, sp_remote_period_decay, ClassificationReport, DecayProfile, Evidence, Verdict};
use aplab_core::dynamics::{omega_limit_candidates, orbit_samples, OmegaCluster, TranslateFit, TranslateFitter};
use aplab_core::metrics::{compact_open_distance, stepanov_metric, stepanov_norm, StepanovNorm, SupMinEvalConfig};
use aplab_core::FunctionHandle;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, RuntimeContext};
use crate::plot::{decay_svg, Series, Style};
use crate::run_dir::{num, RunDir};

#[derive(Serialize)]
struct Wrapped<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

pub fn write_report(dir: &mut RunDir, prefix: &str, report: &ClassificationReport) -> Result<(), CliError> {
    let verdicts: Vec<Vec<String>> = report
        .verdicts
        .iter()
        .map(|(c, v)| {
            vec![c.name().to_string(), format!("{:?}", v.status).to_lowercase(), v.tau.map(num).unwrap_or_default(), v.basis.clone()]
        })
        .collect();
    dir.csv(&format!("{prefix}verdicts.csv"), &["class", "status", "tau", "basis"], &verdicts)?;
    let mut profiles = Vec::new();
    let mut sets = Vec::new();
    for (key, e) in &report.evidence {
        match e {
            Evidence::Profile(p) => {
                profiles.extend(p.records.iter().map(|r| vec![key.clone(), num(p.tau), num(r.0), num(r.1)]));
            }
            Evidence::Set(s) => {
                let ls = s.per_tau_l.clone().unwrap_or_default();
                for (i, t) in s.taus.iter().enumerate() {
                    sets.push(vec![key.clone(), num(s.epsilon), num(*t), ls.get(i).copied().map(num).unwrap_or_default()]);
                }
            }
            _ => {}
        }
    }
    dir.csv(&format!("{prefix}profiles.csv"), &["profile", "tau", "T", "value"], &profiles)?;
    dir.csv(&format!("{prefix}sets.csv"), &["set", "epsilon", "tau", "L"], &sets)?;
    Ok(())
}

pub fn verdict_lines(report: &ClassificationReport) -> Vec<String> {
    report.verdicts.iter().map(|(c, v)| format!("{:<32} {}", c.name(), format!("{:?}", v.status).to_lowercase())).collect()
}

pub fn classify_cmd(cfg: &RunConfig, f: &FunctionHandle, dir: &mut RunDir) -> Result<Vec<String>, CliError> {
    let report = classify(f, &cfg.classify).at_runtime()?;
    #[derive(Serialize)]
    struct Body<'a> {
        report: &'a ClassificationReport,
    }
    dir.json("classify.json", &Wrapped { config: cfg, body: Body { report: &report } })?;
    write_report(dir, "", &report)?;
    let mut lines = vec![format!("subject {}  tau* {}", report.subject, report.tau_star.map(num).unwrap_or_else(|| "-".into()))];
    lines.extend(verdict_lines(&report));
    Ok(lines)
}

/// A named analytic bound `T ↦ b(T)`.
pub type Bound = (&'static str, Box<dyn Fn(f64) -> f64>);

/// Analytic bounds known for the canned examples, by name.
pub fn bounds_for(builder: Option<&str>, tau: f64) -> Vec<Bound> {
    match builder {
        Some("ex4_1_phi") if (tau - 2.0 * PI).abs() < 1e-9 => vec![("bound", Box::new(ex4_1_bound))],
        Some("ex4_2_F") | Some("ex4_2_f") => {
            vec![("bound", Box::new(move |t| ex4_2_bound_corrected(t, tau))), ("printed_bound", Box::new(move |t| ex4_2_bound(t, tau)))]
        }
        _ => Vec::new(),
    }
}

pub fn decay_profile(cfg: &RunConfig, f: &FunctionHandle, tau: f64) -> Result<DecayProfile, CliError> {
    let c = &cfg.classify;
    match cfg.ell {
        None => remote_period_decay(f, tau, &c.schedule, c.resolution),
        Some(ell) => sp_remote_period_decay(f, tau, ell, &c.p, &c.schedule),
    }
    .at_runtime()
}

/// Writes `<stem>.csv` and `<stem>.svg` for a profile with bound overlays.
pub fn write_decay(dir: &mut RunDir, stem: &str, title: &str, profile: &DecayProfile, bounds: &[Bound]) -> Result<(), CliError> {
    let mut header = vec!["T", "value"];
    header.extend(bounds.iter().map(|b| b.0));
    let rows: Vec<Vec<String>> = profile
        .records
        .iter()
        .map(|&(t, v)| {
            let mut row = vec![num(t), num(v)];
            row.extend(bounds.iter().map(|b| num((b.1)(t))));
            row
        })
        .collect();
    dir.csv(&format!("{stem}.csv"), &header, &rows)?;
    let mut series = vec![Series { label: "measured".into(), points: profile.records.clone(), style: Style::Measured }];
    for (name, b) in bounds {
        let t0 = profile.records.first().map_or(1.0, |r| r.0);
        let t1 = profile.records.last().map_or(10.0, |r| r.0);
        let pts = (0..=64).map(|k| t0 * (t1 / t0).powf(k as f64 / 64.0)).map(|t| (t, b(t))).collect();
        series.push(Series { label: name.replace('_', " "), points: pts, style: Style::Bound });
    }
    dir.svg(&format!("{stem}.svg"), &decay_svg(title, &series))
}

pub fn verdict_text(v: Verdict) -> String {
    match v {
        Verdict::DecaysBelow { threshold } => format!("decays_below({threshold})"),
        Verdict::Stagnates { floor } => format!("stagnates(>= {floor})"),
        Verdict::Inconclusive => "inconclusive".into(),
    }
}

pub fn decay_cmd(cfg: &RunConfig, f: &FunctionHandle, dir: &mut RunDir) -> Result<Vec<String>, CliError> {
    let profile = decay_profile(cfg, f, cfg.tau)?;
    let builder = cfg.subject.as_ref().and_then(|s| s.builder());
    let bounds = bounds_for(builder, cfg.tau);
    let dominated = bounds.first().map(|(_, b)| profile.records.iter().all(|&(t, v)| v <= b(t)));
    #[derive(Serialize)]
    struct Body<'a> {
        profile: &'a DecayProfile,
        bounds: Vec<&'static str>,
        under_bound: Option<bool>,
    }
    dir.json(
        "decay.json",
        &Wrapped { config: cfg, body: Body { profile: &profile, bounds: bounds.iter().map(|b| b.0).collect(), under_bound: dominated } },
    )?;
    let title = format!("{}: shift {:.6}", f.name(), cfg.tau);
    write_decay(dir, "decay", &title, &profile, &bounds)?;
    let mut lines = vec![format!("verdict {}", verdict_text(profile.verdict))];
    lines.extend(profile.records.iter().map(|r| format!("T = {:<10} {:.6e}", r.0, r.1)));
    if let Some(d) = dominated {
        lines.push(format!("every value under the bound: {d}"));
    }
    Ok(lines)
}

#[derive(Debug, Clone, Serialize)]
pub struct FitRow {
    pub h: f64,
    pub tau: f64,
    pub residual: f64,
}

/// Fits every translate with `h >= from` against `reference` (or the
/// first representative).
pub fn late_fits(
    sample: &aplab_core::dynamics::OrbitSample,
    cluster: &OmegaCluster,
    reference: Option<&FunctionHandle>,
    range: (f64, f64),
    from: f64,
) -> Result<Vec<FitRow>, CliError> {
    let base = match reference {
        Some(r) => r.clone(),
        None => {
            let h0 = cluster.representatives[0].h;
            let i = sample.times.iter().position(|&h| h == h0).expect("representative is a sample time");
            sample.lookahead(i).at_runtime()?
        }
    };
    let fitter = TranslateFitter::new(&base, sample.l_view, sample.resolution, range).at_runtime()?;
    sample
        .times
        .iter()
        .zip(&sample.translates)
        .filter(|(h, _)| **h >= from)
        .map(|(&h, t)| fitter.fit(t).map(|TranslateFit { tau, residual }| FitRow { h, tau, residual }).at_runtime())
        .collect()
}

pub fn write_cluster(dir: &mut RunDir, prefix: &str, cluster: &OmegaCluster, fits: &[FitRow]) -> Result<(), CliError> {
    let reps: Vec<Vec<String>> = cluster
        .representatives
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mean = r.mean.iter().map(|m| num(*m)).collect::<Vec<_>>().join(";");
            vec![i.to_string(), num(r.h), r.members.len().to_string(), mean, num(r.oscillation)]
        })
        .collect();
    dir.csv(&format!("{prefix}representatives.csv"), &["rep", "h", "members", "mean", "oscillation"], &reps)?;
    for i in 0..cluster.representatives.len() {
        dir.csv_text(&format!("{prefix}representative_{i}.csv"), &cluster.representative_csv(i).at_runtime()?)?;
    }
    dir.csv_text(&format!("{prefix}distances.csv"), &cluster.distances_csv().at_runtime()?)?;
    let rows: Vec<Vec<String>> = fits.iter().map(|r| vec![num(r.h), num(r.tau), num(r.residual)]).collect();
    dir.csv(&format!("{prefix}fits.csv"), &["h", "tau", "residual"], &rows)
}

pub fn omega_cmd(
    cfg: &RunConfig,
    f: &FunctionHandle,
    reference: Option<&FunctionHandle>,
    dir: &mut RunDir,
) -> Result<Vec<String>, CliError> {
    let o = &cfg.omega;
    let sample = orbit_samples(f, &o.times(), o.l_view, o.resolution, o.metric).at_runtime()?;
    let cluster = omega_limit_candidates(&sample, o.radius, o.tau_range).at_runtime()?;
    let fits = late_fits(&sample, &cluster, reference, o.tau_range, cluster.late_from)?;
    #[derive(Serialize)]
    struct Body<'a> {
        cluster: &'a OmegaCluster,
        fit_reference: Option<&'a str>,
        fits: &'a [FitRow],
    }
    dir.json(
        "omega.json",
        &Wrapped { config: cfg, body: Body { cluster: &cluster, fit_reference: reference.map(|r| r.name()), fits: &fits } },
    )?;
    write_cluster(dir, "", &cluster, &fits)?;
    let worst = fits.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(vec![
        format!("{} representatives, late from h = {}", cluster.representatives.len(), num(cluster.late_from)),
        format!("minimal flag {:?}", cluster.minimal_flag),
        format!("{} late fits, worst residual {worst:.3e}", fits.len()),
    ])
}

pub fn norm_cmd(cfg: &RunConfig, f: &FunctionHandle, dir: &mut RunDir) -> Result<Vec<String>, CliError> {
    let n = stepanov_norm(f, &cfg.classify.p, cfg.t_max).at_runtime()?;
    #[derive(Serialize)]
    struct Body<'a> {
        p: f64,
        norm: &'a StepanovNorm,
    }
    dir.json("norm.json", &Wrapped { config: cfg, body: Body { p: cfg.classify.p.p, norm: &n } })?;
    let row = vec![num(cfg.classify.p.p), num(cfg.t_max), num(n.value), num(n.attained_at), num(n.scan_start), num(n.scan_end)];
    dir.csv("norm.csv", &["p", "t_max", "value", "attained_at", "scan_start", "scan_end"], &[row])?;
    Ok(vec![format!("S^{} norm {:.9} attained at t = {:.6}", cfg.classify.p.p, n.value, n.attained_at)])
}

pub fn metric_cmd(cfg: &RunConfig, f: &FunctionHandle, g: &FunctionHandle, dir: &mut RunDir) -> Result<Vec<String>, CliError> {
    let sup = SupMinEvalConfig::new(cfg.l_values.clone())?;
    let d = compact_open_distance(f, g, &sup, cfg.sup_resolution).at_runtime()?;
    let dp = stepanov_metric(f, g, &cfg.classify.p, &sup).at_runtime()?;
    #[derive(Serialize)]
    struct Body {
        compact_open: f64,
        stepanov: f64,
        p: f64,
    }
    dir.json("metric.json", &Wrapped { config: cfg, body: Body { compact_open: d, stepanov: dp, p: cfg.classify.p.p } })?;
    let rows = vec![vec!["compact_open".to_string(), num(d)], vec![format!("stepanov_p{}", cfg.classify.p.p), num(dp)]];
    dir.csv("metric.csv", &["metric", "value"], &rows)?;
    Ok(vec![format!("d   = {d:.9}"), format!("d_p = {dp:.9}")])
}
