//! Config-driven experiment runner: reads a JSON problem, performs the
//! requested runs and writes CSV trajectories, checkpoint tables, a
//! feasibility report and a summary.

pub mod artifacts;
pub mod config;

use std::path::{Path, PathBuf};

use driftless::simulator::{RunFailure, RunRegistry, TrajectoryRecord};
use driftless::synthesis::{assess, Assessment};
use driftless::{Error, ProblemSpec};

pub use config::{load, parse_config, ConfigError, ExperimentConfig, LoadError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_BASELINE: i32 = 4;

/// Runs shown side by side by the `compare` verb.
pub const COMPARE_RUNS: [&str; 3] = ["closed_loop", "baseline", "baseline_clamped"];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid problem: {0}")]
    Problem(#[from] Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Config(c) => CliError::Config(c),
            LoadError::Problem(p) => CliError::Problem(p),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Problem(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Replaces the config's `output_dir`.
    pub out: Option<PathBuf>,
    /// Executes independent runs on separate threads.
    pub parallel: bool,
    /// Replaces the config's run list.
    pub runs: Option<Vec<String>>,
}

/// Results of one experiment; artifacts are already on disk.
pub struct Experiment {
    pub out_dir: PathBuf,
    pub spec: ProblemSpec,
    pub assessment: Assessment,
    pub runs: Vec<(String, Result<TrajectoryRecord, RunFailure>)>,
}

impl Experiment {
    pub fn record(&self, name: &str) -> Option<&TrajectoryRecord> {
        self.runs.iter().find(|(n, _)| n == name).and_then(|(_, r)| r.as_ref().ok())
    }

    /// Worst outcome over all runs: divergence beats baseline failure.
    pub fn exit_code(&self) -> i32 {
        let mut code = EXIT_OK;
        for (_, r) in &self.runs {
            if let Err(f) = r {
                let c = match f.error {
                    Error::BaselineSynthesisFailed(_) => EXIT_BASELINE,
                    _ => EXIT_DIVERGED,
                };
                if code == EXIT_OK || c == EXIT_DIVERGED {
                    code = c;
                }
            }
        }
        code
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })
}

fn out_dir(cfg: &ExperimentConfig, opts: &RunOptions) -> PathBuf {
    opts.out.clone().unwrap_or_else(|| cfg.output_dir.clone())
}

/// Computes the synthesis constants and writes `feasibility.txt` only.
pub fn run_feasibility(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<(PathBuf, String), CliError> {
    let spec = cfg.problem_spec()?;
    let assessment = assess(spec.model.as_ref(), spec.x0.as_slice(), spec.xtg.as_slice())?;
    let text = artifacts::feasibility_txt(&spec, &assessment);
    let dir = out_dir(cfg, opts);
    prepare_dir(&dir)?;
    write_file(&dir.join("feasibility.txt"), &text)?;
    Ok((dir, text))
}

/// Performs every requested run and writes all artifacts. Failed runs keep
/// whatever partial record they produced; check [`Experiment::exit_code`].
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Experiment, CliError> {
    let spec = cfg.problem_spec()?;
    let assessment = assess(spec.model.as_ref(), spec.x0.as_slice(), spec.xtg.as_slice())?;
    let names = opts.runs.clone().unwrap_or_else(|| cfg.runs.clone());
    let registry = RunRegistry::with_builtins();
    let strategies = names
        .iter()
        .map(|n| registry.get(n))
        .collect::<Result<Vec<_>, _>>()?;

    let results: Vec<_> = if opts.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = strategies.iter().map(|r| s.spawn(|| r.run(&spec))).collect();
            handles.into_iter().map(|h| h.join().expect("run thread panicked")).collect()
        })
    } else {
        strategies.iter().map(|r| r.run(&spec)).collect()
    };
    let runs: Vec<_> = names.into_iter().zip(results).collect();

    let dir = out_dir(cfg, opts);
    prepare_dir(&dir)?;
    write_file(&dir.join("feasibility.txt"), &artifacts::feasibility_txt(&spec, &assessment))?;
    for (name, result) in &runs {
        let rec = match result {
            Ok(rec) => Some(rec),
            Err(f) => f.partial.as_deref(),
        };
        if let Some(rec) = rec {
            write_file(&dir.join(format!("{name}_trajectory.csv")), &artifacts::trajectory_csv(rec))?;
            write_file(&dir.join(format!("{name}_checkpoints.csv")), &artifacts::checkpoints_csv(rec))?;
        }
    }
    write_file(&dir.join("summary.txt"), &artifacts::summary_txt(spec.epsilon, &runs))?;
    Ok(Experiment { out_dir: dir, spec, assessment, runs })
}
