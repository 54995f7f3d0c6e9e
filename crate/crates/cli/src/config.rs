//! JSON experiment configuration.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use driftless::models::ModelParams;
use driftless::simulator::BUILTIN_RUNS;
use driftless::{CheckpointSchedule, Error, ModelRegistry, ProblemSpec, SystemModel, Vector};
use serde::Deserialize;

pub const DEFAULT_CHECKPOINTS: usize = 200;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    #[serde(default)]
    pub params: ModelParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKindConfig {
    #[default]
    Harmonic,
    Geometric,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    #[serde(default)]
    pub kind: ScheduleKindConfig,
    /// Ratio of the geometric schedule.
    pub a: Option<f64>,
    /// Limit time of the geometric schedule.
    pub t_f: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineConfig {
    /// Operating point of the LQR linearization; the origin when absent.
    pub linearize_at: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub x0: Vec<f64>,
    pub xtg: Vec<f64>,
    /// Required by the harmonic schedule.
    pub t_star: Option<f64>,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default = "default_checkpoints")]
    pub n_checkpoints: usize,
    pub h_max: Option<f64>,
    pub epsilon: Option<f64>,
    #[serde(default = "default_runs")]
    pub runs: Vec<String>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub baseline: BaselineConfig,
}

fn default_checkpoints() -> usize {
    DEFAULT_CHECKPOINTS
}

fn default_runs() -> Vec<String> {
    vec!["closed_loop".to_string()]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// A malformed configuration file.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}{}: {message}", path.display(), line.map(|l| format!(":{l}")).unwrap_or_default())]
pub struct ConfigError {
    pub path: PathBuf,
    pub line: Option<usize>,
    /// The offending key, when one can be identified.
    pub field: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn new(path: &Path, field: Option<&str>, message: impl Into<String>) -> Self {
        ConfigError {
            path: path.to_path_buf(),
            line: None,
            field: field.map(str::to_string),
            message: message.into(),
        }
    }

    fn from_json(path: &Path, err: serde_json::Error) -> Self {
        let message = err.to_string();
        ConfigError {
            path: path.to_path_buf(),
            line: (err.line() > 0).then(|| err.line()),
            field: backticked(&message),
            message,
        }
    }
}

/// serde names the missing or unknown key between backticks.
fn backticked(message: &str) -> Option<String> {
    let (_, rest) = message.split_once('`')?;
    let (name, _) = rest.split_once('`')?;
    Some(name.to_string())
}

/// Errors raised while turning a file into a runnable problem.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Problem(#[from] Error),
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new(path, None, format!("cannot read: {e}")))?;
    parse_config_str(&text, path)
}

/// Parses and checks everything that does not need the model.
pub fn parse_config_str(text: &str, path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let cfg: ExperimentConfig =
        serde_json::from_str(text).map_err(|e| ConfigError::from_json(path, e))?;
    cfg.check(path)?;
    Ok(cfg)
}

impl ExperimentConfig {
    fn check(&self, path: &Path) -> Result<(), ConfigError> {
        if self.n_checkpoints == 0 {
            return Err(ConfigError::new(path, Some("n_checkpoints"), "must be positive"));
        }
        match self.schedule.kind {
            ScheduleKindConfig::Harmonic if self.t_star.is_none() => {
                return Err(ConfigError::new(
                    path,
                    Some("t_star"),
                    "missing field `t_star` (required by the harmonic schedule)",
                ));
            }
            ScheduleKindConfig::Geometric => {
                for (name, v) in [("a", self.schedule.a), ("t_f", self.schedule.t_f)] {
                    if v.is_none() {
                        return Err(ConfigError::new(
                            path,
                            Some(name),
                            format!("missing field `{name}` (required by the geometric schedule)"),
                        ));
                    }
                }
            }
            _ => {}
        }
        if self.runs.is_empty() {
            return Err(ConfigError::new(path, Some("runs"), "at least one run is required"));
        }
        for (i, run) in self.runs.iter().enumerate() {
            if !BUILTIN_RUNS.contains(&run.as_str()) {
                return Err(ConfigError::new(
                    path,
                    Some("runs"),
                    format!("unknown run `{run}`, expected one of {BUILTIN_RUNS:?}"),
                ));
            }
            if self.runs[..i].contains(run) {
                return Err(ConfigError::new(path, Some("runs"), format!("duplicate run `{run}`")));
            }
        }
        Ok(())
    }

    pub fn build_model(&self) -> driftless::Result<Arc<dyn SystemModel>> {
        ModelRegistry::with_builtins().build(&self.model.name, &self.model.params)
    }

    pub fn build_schedule(&self) -> driftless::Result<CheckpointSchedule> {
        let k = self.n_checkpoints;
        match self.schedule.kind {
            ScheduleKindConfig::Harmonic => {
                let t_star = self.t_star.ok_or_else(|| {
                    Error::InvalidSchedule("harmonic schedule needs t_star".into())
                })?;
                CheckpointSchedule::harmonic(t_star, k)
            }
            ScheduleKindConfig::Geometric => {
                let (Some(a), Some(t_f)) = (self.schedule.a, self.schedule.t_f) else {
                    return Err(Error::InvalidSchedule("geometric schedule needs a and t_f".into()));
                };
                CheckpointSchedule::geometric(t_f, a, k)
            }
        }
    }

    /// Builds the validated problem; dimension mismatches surface as
    /// [`Error::InvalidProblem`].
    pub fn problem_spec(&self) -> driftless::Result<ProblemSpec> {
        let model = self.build_model()?;
        let schedule = self.build_schedule()?;
        let mut spec = ProblemSpec::new(
            model,
            Vector::from(self.x0.clone()),
            Vector::from(self.xtg.clone()),
            schedule,
        )?;
        if let Some(h) = self.h_max {
            spec = spec.with_h_max(h)?;
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Error::InvalidProblem(format!("epsilon must be positive, got {eps}")));
            }
            spec = spec.with_epsilon(eps);
        }
        if let Some(x) = &self.baseline.linearize_at {
            spec = spec.with_linearization_point(Vector::from(x.clone()))?;
        }
        Ok(spec)
    }
}

/// Reads a config file and builds its problem in one step.
pub fn load(path: &Path) -> Result<(ExperimentConfig, ProblemSpec), LoadError> {
    let cfg = parse_config(path)?;
    let spec = cfg.problem_spec()?;
    Ok((cfg, spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        parse_config_str(text, Path::new("test.json"))
    }

    #[test]
    fn defaults_applied() {
        let cfg = parse(r#"{"model": {"name": "admire"}, "x0": [1, 2, 3], "xtg": [0, 0, 0], "t_star": 10}"#)
            .unwrap();
        assert_eq!(cfg.n_checkpoints, 200);
        assert_eq!(cfg.schedule.kind, ScheduleKindConfig::Harmonic);
        assert_eq!(cfg.runs, vec!["closed_loop"]);
        assert!(cfg.model.params.is_empty());
    }

    #[test]
    fn missing_and_unknown_fields_are_named() {
        let err = parse("{\n  \"model\": {\"name\": \"vdp\"},\n  \"xtg\": [0, 0],\n  \"t_star\": 7\n}").unwrap_err();
        assert_eq!(err.field.as_deref(), Some("x0"));
        assert!(err.line.is_some());

        let err = parse(r#"{"model": {"name": "vdp"}, "x0": [0, 0], "xtg": [0, 0], "t_star": 7, "tstar": 1}"#)
            .unwrap_err();
        assert_eq!(err.field.as_deref(), Some("tstar"));
    }

    #[test]
    fn schedule_requirements() {
        let err = parse(r#"{"model": {"name": "vdp"}, "x0": [0, 0], "xtg": [0, 0]}"#).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("t_star"));
        let err = parse(
            r#"{"model": {"name": "vdp"}, "x0": [0, 0], "xtg": [0, 0], "schedule": {"kind": "geometric", "a": 2}}"#,
        )
        .unwrap_err();
        assert_eq!(err.field.as_deref(), Some("t_f"));
        let cfg = parse(
            r#"{"model": {"name": "vdp"}, "x0": [0, 0], "xtg": [0, 0], "n_checkpoints": 10,
                "schedule": {"kind": "geometric", "a": 2, "t_f": 5}}"#,
        )
        .unwrap();
        assert_eq!(cfg.problem_spec().unwrap().schedule.final_time(), 5.0 * (1.0 - 2f64.powi(-10)));
    }

    #[test]
    fn bad_runs_rejected() {
        let base = r#"{"model": {"name": "vdp"}, "x0": [0, 0], "xtg": [0, 0], "t_star": 7, "runs": "#;
        for runs in [r#"["nope"]"#, "[]", r#"["baseline", "baseline"]"#] {
            let err = parse(&format!("{base}{runs}}}")).unwrap_err();
            assert_eq!(err.field.as_deref(), Some("runs"), "{runs}");
        }
    }

    #[test]
    fn dimension_mismatch_is_invalid_problem() {
        let cfg = parse(r#"{"model": {"name": "admire"}, "x0": [1, 2], "xtg": [0, 0, 0], "t_star": 10}"#)
            .unwrap();
        assert!(matches!(cfg.problem_spec(), Err(Error::InvalidProblem(_))));
    }
}
