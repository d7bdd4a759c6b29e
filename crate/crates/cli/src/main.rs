//! `ap-lab`: classify functions, measure shift decay, sample ω-limit sets
//! and run the two canned scenarios.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod example;
mod plot;
mod run_dir;

use std::path::PathBuf;
use std::process::ExitCode;

use aplab_core::dynamics::OrbitMetric;
use aplab_core::{builders, FunctionHandle, TimeDomain};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{Format, RunConfig, Subject, OUT_ENV};
use error::CliError;
use run_dir::RunDir;

const CLASSIFY_CSV: &str = "\
Outputs (in the run directory):
  classify.json   effective config and the full report
  verdicts.csv    class, status, tau, basis
                  status is holds|fails|inconclusive; tau is the witnessing shift or empty
  profiles.csv    profile, tau, T, value
                  one row per window start T of every decay profile used as evidence
  sets.csv        set, epsilon, tau, L
                  accepted shifts of every almost-period scan, L is the acceptance start (empty for Bohr sets)";

const DECAY_CSV: &str = "\
Outputs (in the run directory):
  decay.json      effective config, the profile, bound names and whether every value sits under the first bound
  decay.csv       T, value[, bound[, printed_bound]]
                  T is the window start, value the sup (or S^p window norm with --ell) of |f(t+tau) - f(t)| over [T, T+W];
                  bound columns appear for ex4_1_phi at tau = 2pi and for ex4_2_F
  decay.svg       log-log plot of value against T with dashed bound overlays";

const OMEGA_CSV: &str = "\
Outputs (in the run directory):
  omega.json            effective config, the cluster and the late fits
  representatives.csv   rep, h, members, mean, oscillation
                        mean is ';'-separated per component
  representative_<i>.csv  t, value[_j]: representative i sampled on [0, L_view]
  distances.csv         i, j, distance between representatives
  fits.csv              h, tau, residual
                        every late translate fitted as a shift of the reference (or of representative 0)";

const EXAMPLE_CSV: &str = "\
Outputs (in the run directory):
  summary.md            conclusions with [x]/[ ] marks and the tables behind them
  example.json          effective config and every measured quantity
  <stem>.csv / .svg     decay profiles: T, value, bound[, printed_bound]
                        ex4-1: phi_decay; ex4-2: F_decay_0..2 at tau = 1, sqrt 2, pi
  <prefix>verdicts.csv, <prefix>profiles.csv, <prefix>sets.csv
                        as in `classify`, for phi_, mu_, psi_ (ex4-1) or phi_, F_ (ex4-2)
  <prefix>omega_*.csv   as in `omega`, for phi (ex4-1) or F (ex4-2)";

const NORM_CSV: &str = "\
Outputs (in the run directory):
  norm.json   effective config and the norm
  norm.csv    p, t_max, value, attained_at, scan_start, scan_end
              value is sup over anchors t in [scan_start, scan_end] of the unit-window L^p norm";

const METRIC_CSV: &str = "\
Outputs (in the run directory):
  metric.json   effective config and both distances
  metric.csv    metric, value
                rows compact_open and stepanov_p<p>";

#[derive(Parser)]
#[command(name = "ap-lab", version, about = "Numerical lab for almost-periodic, remotely almost-periodic and Stepanov classes")]
#[command(after_help = "Exit codes: 0 completed, 2 usage error, 3 runtime error.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every class test and print the verdict lattice.
    #[command(after_help = CLASSIFY_CSV)]
    Classify {
        #[command(flatten)]
        subject: SubjectArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Decay profile of |f(t + tau) - f(t)| over late windows.
    #[command(after_help = DECAY_CSV)]
    Decay {
        #[command(flatten)]
        subject: SubjectArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Shift (default 2pi).
        #[arg(long)]
        tau: Option<f64>,
        /// Stepanov window length; the uniform sup is used when absent.
        #[arg(long)]
        ell: Option<f64>,
    },
    /// Sample late translates and cluster them into ω-limit candidates.
    #[command(after_help = OMEGA_CSV)]
    Omega {
        #[command(flatten)]
        subject: SubjectArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        omega: OmegaArgs,
        /// Builder every late translate is fitted against.
        #[arg(long)]
        reference: Option<String>,
    },
    /// Run a canned scenario.
    #[command(after_help = EXAMPLE_CSV)]
    Example {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(example::NAMES))]
        name: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Stepanov norm sup_t (int_t^{t+1} |f|^p)^{1/p}.
    #[command(after_help = NORM_CSV)]
    Norm {
        #[command(flatten)]
        subject: SubjectArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        t_max: Option<f64>,
    },
    /// Compact-open and Stepanov distances between two functions.
    #[command(after_help = METRIC_CSV)]
    Metric {
        #[command(flatten)]
        subject: SubjectArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Second function by builder name.
        #[arg(long, conflicts_with = "other_expr")]
        other: Option<String>,
        /// Second function from an expression file.
        #[arg(long)]
        other_expr: Option<PathBuf>,
        /// Truncation radii L, comma separated.
        #[arg(long, value_delimiter = ',')]
        l_values: Option<Vec<f64>>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    HalfLine,
    FullLine,
}

#[derive(Args)]
struct SubjectArgs {
    /// Canned function by name (see --list in the README).
    #[arg(long, group = "source", value_parser = clap::builder::PossibleValuesParser::new(builders::BUILDER_NAMES))]
    builder: Option<String>,
    /// JSON expression file.
    #[arg(long, group = "source")]
    expr: Option<PathBuf>,
    /// Sampled CSV with columns t,value[,...].
    #[arg(long, group = "source", requires = "domain")]
    csv: Option<PathBuf>,
    #[arg(long, value_enum)]
    domain: Option<DomainArg>,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = OUT_ENV)]
    out: Option<PathBuf>,
    /// Output formats, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    format: Option<Vec<Format>>,
    /// Exponent of the Stepanov norms.
    #[arg(long)]
    p: Option<f64>,
    /// Epsilon ladder, comma separated.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// First window start of the decay schedule.
    #[arg(long)]
    schedule_start: Option<f64>,
    #[arg(long)]
    schedule_ratio: Option<f64>,
    #[arg(long)]
    schedule_count: Option<usize>,
    /// Window width W.
    #[arg(long)]
    window: Option<f64>,
    #[arg(long)]
    k_confirm: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    fail_factor: Option<f64>,
    /// Samples per time unit of the window sups.
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Args)]
struct OmegaArgs {
    /// Base translation times, comma separated.
    #[arg(long, value_delimiter = ',')]
    decades: Option<Vec<f64>>,
    #[arg(long)]
    l_view: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    /// Jittered times per base time.
    #[arg(long)]
    jitter: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Use the Stepanov distance with this p instead of the sup distance.
    #[arg(long)]
    orbit_p: Option<f64>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl RunArgs {
    fn apply(self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        set(&mut cfg.out_dir, self.out);
        set(&mut cfg.formats, self.format);
        let c = &mut cfg.classify;
        set(&mut c.p.p, self.p);
        set(&mut c.epsilons, self.eps);
        set(&mut c.resolution, self.resolution);
        let s = &mut c.schedule;
        set(&mut s.start, self.schedule_start);
        set(&mut s.ratio, self.schedule_ratio);
        set(&mut s.count, self.schedule_count);
        set(&mut s.window, self.window);
        set(&mut s.k_confirm, self.k_confirm);
        set(&mut s.threshold, self.threshold);
        set(&mut s.fail_factor, self.fail_factor);
        Ok(cfg)
    }
}

impl SubjectArgs {
    fn apply(self, cfg: &mut RunConfig) {
        if let Some(b) = self.builder {
            cfg.subject = Some(Subject::Builder(b));
        } else if let Some(p) = self.expr {
            cfg.subject = Some(Subject::Expr(p));
        } else if let Some(path) = self.csv {
            let domain = match self.domain {
                Some(DomainArg::FullLine) => TimeDomain::FullLine,
                _ => TimeDomain::HalfLine,
            };
            cfg.subject = Some(Subject::Csv { path, domain });
        }
    }
}

impl OmegaArgs {
    fn apply(self, cfg: &mut RunConfig) {
        let o = &mut cfg.omega;
        set(&mut o.decades, self.decades);
        set(&mut o.l_view, self.l_view);
        set(&mut o.radius, self.radius);
        set(&mut o.jitter, self.jitter);
        set(&mut o.seed, self.seed);
        if let Some(p) = self.orbit_p {
            o.metric = OrbitMetric::Stepanov { p };
        }
    }
}

/// Subject and config are resolved and validated before the lock is taken.
fn prepare(run: RunArgs, subject: Option<SubjectArgs>, tweak: impl FnOnce(&mut RunConfig)) -> Result<RunConfig, CliError> {
    let mut cfg = run.apply()?;
    if let Some(s) = subject {
        s.apply(&mut cfg);
    }
    tweak(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<(RunDir, Vec<String>), CliError> {
    match cli.command {
        Command::Classify { subject, run } => {
            let cfg = prepare(run, Some(subject), |_| {})?;
            let f = cfg.subject()?;
            let mut dir = RunDir::open(&cfg)?;
            let lines = commands::classify_cmd(&cfg, &f, &mut dir)?;
            Ok((dir, lines))
        }
        Command::Decay { subject, run, tau, ell } => {
            let cfg = prepare(run, Some(subject), |c| {
                set(&mut c.tau, tau);
                if ell.is_some() {
                    c.ell = ell;
                }
            })?;
            let f = cfg.subject()?;
            let mut dir = RunDir::open(&cfg)?;
            let lines = commands::decay_cmd(&cfg, &f, &mut dir)?;
            Ok((dir, lines))
        }
        Command::Omega { subject, run, omega, reference } => {
            let cfg = prepare(run, Some(subject), |c| omega.apply(c))?;
            let f = cfg.subject()?;
            let reference: Option<FunctionHandle> = reference.map(|r| builders::by_name(&r)).transpose()?;
            let mut dir = RunDir::open(&cfg)?;
            let lines = commands::omega_cmd(&cfg, &f, reference.as_ref(), &mut dir)?;
            Ok((dir, lines))
        }
        Command::Example { name, run } => {
            let cfg = prepare(run, None, |_| {})?;
            let mut dir = RunDir::open(&cfg)?;
            let lines = match name.as_str() {
                "ex4-1" => example::ex4_1(&cfg, &mut dir)?,
                _ => example::ex4_2(&cfg, &mut dir)?,
            };
            Ok((dir, lines))
        }
        Command::Norm { subject, run, t_max } => {
            let cfg = prepare(run, Some(subject), |c| set(&mut c.t_max, t_max))?;
            let f = cfg.subject()?;
            let mut dir = RunDir::open(&cfg)?;
            let lines = commands::norm_cmd(&cfg, &f, &mut dir)?;
            Ok((dir, lines))
        }
        Command::Metric { subject, run, other, other_expr, l_values } => {
            let cfg = prepare(run, Some(subject), |c| {
                if let Some(b) = other {
                    c.other = Some(Subject::Builder(b));
                } else if let Some(p) = other_expr {
                    c.other = Some(Subject::Expr(p));
                }
                set(&mut c.l_values, l_values);
            })?;
            let f = cfg.subject()?;
            let g = cfg.other.as_ref().ok_or_else(|| CliError::Usage("metric needs --other or --other-expr".into()))?.load()?;
            let mut dir = RunDir::open(&cfg)?;
            let lines = commands::metric_cmd(&cfg, &f, &g, &mut dir)?;
            Ok((dir, lines))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok((dir, lines)) => {
            for l in lines {
                println!("{l}");
            }
            println!("wrote {} files to {}", dir.written().len(), dir.path().display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ap-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
