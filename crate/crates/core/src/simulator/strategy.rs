use std::collections::BTreeMap;

use super::{run_baseline, run_closed_loop, run_driftless, ProblemSpec, RunFailure, TrajectoryRecord};
use crate::error::Error;

/// Names of the runs available from [`RunRegistry::with_builtins`], in the
/// order they are reported.
pub const BUILTIN_RUNS: [&str; 4] = ["closed_loop", "driftless", "baseline", "baseline_clamped"];

/// A way of driving a problem, selected by name.
pub trait RunStrategy: Send + Sync {
    fn name(&self) -> &str;

    fn run(&self, spec: &ProblemSpec) -> Result<TrajectoryRecord, RunFailure>;
}

pub struct ClosedLoopRun;

impl RunStrategy for ClosedLoopRun {
    fn name(&self) -> &str {
        "closed_loop"
    }

    fn run(&self, spec: &ProblemSpec) -> Result<TrajectoryRecord, RunFailure> {
        run_closed_loop(spec)
    }
}

pub struct DriftlessRun;

impl RunStrategy for DriftlessRun {
    fn name(&self) -> &str {
        "driftless"
    }

    fn run(&self, spec: &ProblemSpec) -> Result<TrajectoryRecord, RunFailure> {
        run_driftless(spec)
    }
}

pub struct BaselineRun {
    pub clamped: bool,
}

impl RunStrategy for BaselineRun {
    fn name(&self) -> &str {
        if self.clamped {
            "baseline_clamped"
        } else {
            "baseline"
        }
    }

    fn run(&self, spec: &ProblemSpec) -> Result<TrajectoryRecord, RunFailure> {
        run_baseline(spec, self.clamped)
    }
}

pub struct RunRegistry {
    runs: BTreeMap<String, Box<dyn RunStrategy>>,
}

impl RunRegistry {
    pub fn empty() -> Self {
        RunRegistry { runs: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(ClosedLoopRun));
        reg.register(Box::new(DriftlessRun));
        reg.register(Box::new(BaselineRun { clamped: false }));
        reg.register(Box::new(BaselineRun { clamped: true }));
        reg
    }

    pub fn register(&mut self, run: Box<dyn RunStrategy>) {
        self.runs.insert(run.name().to_string(), run);
    }

    pub fn get(&self, name: &str) -> Result<&dyn RunStrategy, Error> {
        self.runs
            .get(name)
            .map(|r| r.as_ref())
            .ok_or_else(|| Error::UnknownName { kind: "run", name: name.to_string() })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.runs.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.runs.keys().map(String::as_str)
    }
}

impl Default for RunRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_registered_by_name() {
        let reg = RunRegistry::with_builtins();
        for name in BUILTIN_RUNS {
            assert_eq!(reg.get(name).unwrap().name(), name);
        }
        assert!(matches!(reg.get("mpc"), Err(Error::UnknownName { kind: "run", .. })));
    }
}
