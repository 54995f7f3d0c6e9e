use crate::error::Error;
use crate::linalg::Vector;

use super::CONSTRAINT_TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: Vector,
    pub u: Vector,
}

/// State and bookkeeping at the end of interval `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub n: usize,
    pub t: f64,
    pub dt: f64,
    pub x: Vector,
    /// `‖x_tg − x_n‖∞`
    pub err: f64,
    pub vbar: Option<f64>,
    /// Input applied at the start of the interval.
    pub u: Vector,
    pub u_inf_max_so_far: f64,
    /// Largest `‖x_tg − x(t)‖∞` over interior substeps of the interval.
    pub intra_err_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub run: String,
    pub xtg: Vector,
    pub samples: Vec<Sample>,
    pub checkpoints: Vec<Checkpoint>,
    pub u_inf_max: f64,
    pub constraint_satisfied: bool,
}

impl TrajectoryRecord {
    pub(crate) fn new(run: &str, xtg: Vector) -> Self {
        TrajectoryRecord {
            run: run.to_string(),
            xtg,
            samples: Vec::new(),
            checkpoints: Vec::new(),
            u_inf_max: 0.0,
            constraint_satisfied: true,
        }
    }

    pub(crate) fn push_sample(&mut self, s: Sample) {
        self.samples.push(s);
    }

    pub(crate) fn observe_input(&mut self, norm: f64) {
        self.u_inf_max = self.u_inf_max.max(norm);
        self.constraint_satisfied = self.u_inf_max <= 1.0 + CONSTRAINT_TOL;
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn push_checkpoint(
        &mut self,
        n: usize,
        t: f64,
        dt: f64,
        x: Vector,
        vbar: Option<f64>,
        u: Vector,
        intra_err_max: f64,
    ) {
        let err = x.sub(&self.xtg).inf_norm();
        self.checkpoints.push(Checkpoint {
            n,
            t,
            dt,
            x,
            err,
            vbar,
            u,
            u_inf_max_so_far: self.u_inf_max,
            intra_err_max,
        });
    }

    pub(crate) fn fail(&self, error: Error) -> RunFailure {
        RunFailure { error, partial: Some(Box::new(self.clone())) }
    }

    pub fn final_checkpoint(&self) -> Option<&Checkpoint> {
        self.checkpoints.last()
    }

    /// `‖x_tg − x_K‖∞` at the last checkpoint.
    pub fn final_error(&self) -> f64 {
        self.final_checkpoint().map_or(f64::NAN, |c| c.err)
    }

    /// Per-component `|x_tg,i − x_K,i|` at the last checkpoint.
    pub fn final_error_components(&self) -> Vec<f64> {
        match self.final_checkpoint() {
            Some(c) => c.x.iter().zip(self.xtg.iter()).map(|(x, t)| (t - x).abs()).collect(),
            None => Vec::new(),
        }
    }
}

/// A run that stopped early. `partial` holds whatever was recorded.
#[derive(Debug, Clone)]
pub struct RunFailure {
    pub error: Error,
    pub partial: Option<Box<TrajectoryRecord>>,
}

impl From<Error> for RunFailure {
    fn from(error: Error) -> Self {
        RunFailure { error, partial: None }
    }
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}
