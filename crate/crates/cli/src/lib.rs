//! Command-line driver: exact checks, accessory-parameter solve, metric
//! verification and grid export.

pub mod config;
pub mod pipeline;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::{Job, JobConfig};
pub use pipeline::{export_grid, run_check, run_solve, run_verify, PipelineReport, SolvedArtifact};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INADMISSIBLE: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Unitarize(#[from] spherecone::UnitarizeError),
    #[error(transparent)]
    Fuchsian(#[from] spherecone::FuchsianError),
    #[error(transparent)]
    Metric(#[from] spherecone::MetricError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Unitarize(_) | CliError::Fuchsian(_) => EXIT_SOLVER,
            CliError::Metric(_) => EXIT_VERIFY,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "spherecone", version, about = "Spherical cone metrics on the Riemann sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: GlobalOpts,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Job file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory; overrides the config.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for the random solver starts.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Transport tolerance.
    #[arg(long, global = true, value_name = "FLOAT")]
    pub tol: Option<f64>,
    /// Sample grid size.
    #[arg(long, global = true, value_name = "WxH", value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    /// Print the report as JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Exact admissibility and stability checks.
    Check,
    /// Find the accessory parameters and write solved.json.
    Solve,
    /// Verify the metric of an existing solved.json.
    Verify,
    /// Write grid.csv from an existing solved.json.
    Sample,
    /// Check, solve, verify and sample in one go.
    Report,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
    if w == 0 || h == 0 {
        return Err("grid sides must be positive".into());
    }
    Ok((w, h))
}

/// Loads the job and applies command-line overrides.
pub fn load_job(opts: &GlobalOpts) -> Result<Job, CliError> {
    let path = opts.config.as_ref().ok_or_else(|| CliError::Usage("--config PATH is required".into()))?;
    let mut cfg = JobConfig::load(path)?;
    if let Some(dir) = &opts.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(seed) = opts.seed {
        cfg.solver.seed = seed;
    }
    if let Some(tol) = opts.tol {
        cfg.solver.tol = tol;
    }
    if let Some((w, h)) = opts.grid {
        cfg.grid.width = w;
        cfg.grid.height = h;
    }
    cfg.validate()
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Result of one command.
pub struct Outcome {
    pub report: PipelineReport,
    pub code: u8,
}

fn solved_path(job: &Job) -> PathBuf {
    job.output_path(&job.config.output.solved)
}

/// Runs a command and writes its files into the output directory.
pub fn execute(command: Command, job: &Job) -> Result<Outcome, CliError> {
    let dir = &job.config.output.dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let outcome = match command {
        Command::Check => {
            let report = run_check(job)?;
            let code = if report.exact.admissible { 0 } else { EXIT_INADMISSIBLE };
            Outcome { report, code }
        }
        Command::Solve => {
            let stage = run_solve(job)?;
            if let Some(artifact) = &stage.value {
                write_json(&solved_path(job), artifact)?;
            }
            Outcome { report: stage.report, code: stage.code }
        }
        Command::Verify => {
            let solved = SolvedArtifact::load(&solved_path(job))?;
            let stage = run_verify(job, &solved)?;
            Outcome { report: stage.report, code: stage.code }
        }
        Command::Sample => {
            let solved = SolvedArtifact::load(&solved_path(job))?;
            let mut report = run_check(job)?;
            if !solved.certificate.accepted() {
                return Ok(Outcome { report, code: EXIT_SOLVER });
            }
            report.sampling = Some(export_grid(job, &solved, &job.output_path(&job.config.output.grid))?);
            Outcome { report, code: 0 }
        }
        Command::Report => full_report(job)?,
    };
    write_json(&job.output_path(&job.config.output.report), &outcome.report)?;
    Ok(outcome)
}

fn full_report(job: &Job) -> Result<Outcome, CliError> {
    let stage = run_solve(job)?;
    let Some(solved) = stage.value else {
        return Ok(Outcome { report: stage.report, code: stage.code });
    };
    write_json(&solved_path(job), &solved)?;
    let verified = run_verify(job, &solved)?;
    let mut report = stage.report;
    report.verification = verified.report.verification;
    report.sampling = Some(export_grid(job, &solved, &job.output_path(&job.config.output.grid))?);
    Ok(Outcome { report, code: verified.code })
}

/// Short human-readable summary.
pub fn summary(report: &PipelineReport) -> String {
    let e = &report.exact;
    let mut lines = vec![format!(
        "n = {}, angles [{}]: Gauss-Bonnet {}, angle inequalities {}, stable {} (max parabolic degree {})",
        e.n,
        e.angles.join(", "),
        e.gauss_bonnet,
        e.angle_stability,
        e.stable,
        e.max_parabolic_degree
    )];
    if let Some(s) = &report.solver {
        lines.push(format!("defect {:.3e} (accept {:.0e}), accepted {}", s.defect, s.delta_accept, s.accepted));
        for (k, b) in s.accessory.iter().enumerate() {
            lines.push(format!("  beta{} = {:.12} {:+.12}i", k + 1, b.re, b.im));
        }
        if let Some(sym) = &s.symmetry {
            lines.push(format!("  {sym}"));
        }
        if let Some(f) = &s.failure {
            lines.push(format!("  solver failure: {f}"));
        }
    }
    if let Some(v) = &report.verification {
        lines.push(format!(
            "verification passed {} (recomputed defect {:.3e}, certificate accepted {})",
            v.passed, v.recomputed_defect, v.certificate_accepted
        ));
        if let Some(r) = &v.report {
            let worst = r.cone_angles.iter().map(|a| a.relative_error).fold(0.0, f64::max);
            lines.push(format!(
                "  max|K-1| {:.2e}, cone angle rel err {:.2e}, area {:.6} (expected {:.6}), path {:.2e}, min lambda {:.3e}",
                r.curvature.max_deviation, worst, r.area.area, r.area.gauss_bonnet, r.path_independence, r.transversality_min
            ));
        }
        if let Some(err) = &v.error {
            lines.push(format!("  error: {err}"));
        }
    }
    if let Some(s) = &report.sampling {
        lines.push(format!("{} rows written to {}, {} nodes skipped", s.rows, s.file, s.skipped.len()));
    }
    lines.join("\n")
}
