//! Closed-loop simulation under piecewise-constant inputs.
//!
//! All runs use classical fixed-step RK4. Every schedule interval is split
//! into an integer number of equal substeps so that checkpoints land exactly
//! on the schedule times.

mod record;
mod strategy;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Mat, Vector};
use crate::models::{baseline_feedback, BaselineController, SystemModel};
use crate::schedule::CheckpointSchedule;
use crate::synthesis::{assess, segment_input, vbar_value, Assessment};

pub use record::{Checkpoint, RunFailure, Sample, TrajectoryRecord};
pub use strategy::{
    BaselineRun, ClosedLoopRun, DriftlessRun, RunRegistry, RunStrategy, BUILTIN_RUNS,
};

/// Upper bound on stored dense samples per run.
pub const MAX_SAMPLES: usize = 100_000;
/// Absolute slack on `‖u‖∞ ≤ 1` before a run counts as violating it.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// A fully specified control problem.
#[derive(Clone)]
pub struct ProblemSpec {
    pub model: Arc<dyn SystemModel>,
    pub x0: Vector,
    pub xtg: Vector,
    pub schedule: CheckpointSchedule,
    /// Substep cap for the integrator.
    pub h_max: f64,
    /// Target tolerance used when reporting.
    pub epsilon: f64,
    /// Operating point for the baseline's Jacobian linearization.
    pub linearize_at: Vector,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("model", &self.model.name())
            .field("x0", &self.x0)
            .field("xtg", &self.xtg)
            .field("schedule", &self.schedule.kind())
            .field("count", &self.schedule.count())
            .field("h_max", &self.h_max)
            .finish()
    }
}

/// `min(1e-3 · t*, Δt_K / 16)`: late short intervals keep at least 16 substeps.
pub fn default_h_max(schedule: &CheckpointSchedule) -> f64 {
    let last = schedule.interval_length(schedule.count()).unwrap();
    (1e-3 * schedule.scale()).min(last / 16.0)
}

impl ProblemSpec {
    pub fn new(
        model: Arc<dyn SystemModel>,
        x0: Vector,
        xtg: Vector,
        schedule: CheckpointSchedule,
    ) -> Result<Self> {
        let n = model.state_dim();
        let h_max = default_h_max(&schedule);
        let spec = ProblemSpec {
            model,
            x0,
            xtg,
            schedule,
            h_max,
            epsilon: 0.05,
            linearize_at: Vector::zeros(n),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_h_max(mut self, h_max: f64) -> Result<Self> {
        self.h_max = h_max;
        self.validate()?;
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_linearization_point(mut self, x: Vector) -> Result<Self> {
        self.linearize_at = x;
        self.validate()?;
        Ok(self)
    }

    pub fn t_star(&self) -> f64 {
        self.schedule.scale()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.model.state_dim();
        for (name, v) in [("x0", &self.x0), ("xtg", &self.xtg), ("linearize_at", &self.linearize_at)] {
            if v.len() != n {
                return Err(Error::InvalidProblem(format!(
                    "{name} has length {} but model `{}` has {n} states",
                    v.len(),
                    self.model.name()
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidProblem(format!("{name} must be finite")));
            }
        }
        let smallest = self.schedule.interval_length(self.schedule.count())?;
        if !(self.h_max > 0.0 && self.h_max < smallest) {
            return Err(Error::InvalidProblem(format!(
                "h_max = {} must be positive and below the smallest interval {smallest}",
                self.h_max
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidProblem("epsilon must be positive".into()));
        }
        Ok(())
    }
}

fn substeps(t0: f64, t1: f64, h_max: f64) -> usize {
    (((t1 - t0) / h_max).ceil() as usize).max(1)
}

fn rk4_step<C>(model: &dyn SystemModel, x: &Vector, h: f64, control: &C) -> Result<Vector>
where
    C: Fn(&[f64]) -> Vector,
{
    let field = |x: &Vector| model.vector_field(x.as_slice(), control(x.as_slice()).as_slice());
    let k1 = field(x)?;
    let k2 = field(&x.axpy(0.5 * h, &k1))?;
    let k3 = field(&x.axpy(0.5 * h, &k2))?;
    let k4 = field(&x.axpy(h, &k3))?;
    let incr = k1.axpy(2.0, &k2).axpy(2.0, &k3).add(&k4);
    Ok(x.axpy(h / 6.0, &incr))
}

/// Integrates `[t0, t1]` in equal substeps, calling `visit(t, x, u)` at every
/// interior substep point. Returns the state at `t1`.
fn integrate_with<C, V>(
    model: &dyn SystemModel,
    x_start: &Vector,
    t0: f64,
    t1: f64,
    h_max: f64,
    control: &C,
    mut visit: V,
) -> Result<Vector>
where
    C: Fn(&[f64]) -> Vector,
    V: FnMut(f64, &Vector, &Vector),
{
    let steps = substeps(t0, t1, h_max);
    let h = (t1 - t0) / steps as f64;
    let mut x = x_start.clone();
    for i in 1..=steps {
        x = rk4_step(model, &x, h, control)?;
        let t = if i == steps { t1 } else { t0 + i as f64 * h };
        if !x.is_finite() {
            return Err(Error::Diverged { t });
        }
        if i < steps {
            visit(t, &x, &control(x.as_slice()));
        }
    }
    Ok(x)
}

/// Integrates `ẋ = f(x) + g(x) u` with constant `u` over `[t0, t1]`.
///
/// Substep `h = (t1 − t0) / ceil((t1 − t0) / h_max)`. Returns the final state
/// and the interior substep samples.
pub fn integrate_segment(
    model: &dyn SystemModel,
    x_start: &Vector,
    u_const: &Vector,
    t0: f64,
    t1: f64,
    h_max: f64,
) -> Result<(Vector, Vec<Sample>)> {
    if !(t1 > t0) {
        return Err(Error::InvalidInterval(t1 - t0));
    }
    let mut samples = Vec::new();
    let control = |_: &[f64]| u_const.clone();
    let x_end = integrate_with(model, x_start, t0, t1, h_max, &control, |t, x, u| {
        samples.push(Sample { t, x: x.clone(), u: u.clone() })
    })?;
    Ok((x_end, samples))
}

/// Per-interval control law used by the shared run loop.
enum Law<'a> {
    /// Minimum-energy constant input recomputed at every checkpoint.
    PiecewiseConstant { g0_pinv: &'a Mat },
    /// Continuous state feedback evaluated at every RK stage.
    Feedback(&'a BaselineController),
}

struct RunSetup<'a> {
    name: &'a str,
    model: &'a dyn SystemModel,
    law: Law<'a>,
    /// Intervals to simulate (prefix of the schedule).
    intervals: usize,
    bound: Option<(f64, f64)>,
}

fn simulate(spec: &ProblemSpec, setup: RunSetup<'_>) -> Result<TrajectoryRecord, RunFailure> {
    let schedule = &spec.schedule;
    let xtg = &spec.xtg;
    let mut record = TrajectoryRecord::new(setup.name, xtg.clone());

    let total_steps: usize = schedule
        .intervals()
        .take(setup.intervals)
        .map(|(_, t0, t1)| substeps(t0, t1, spec.h_max))
        .sum();
    let budget = MAX_SAMPLES.saturating_sub(setup.intervals + 1);
    let stride = if budget == 0 { usize::MAX } else { total_steps.div_ceil(budget).max(1) };
    let mut step_counter = 0usize;

    let mut x = spec.x0.clone();
    let mut last_u = Vector::zeros(setup.model.input_dim());
    for (n, t0, t1) in schedule.intervals().take(setup.intervals) {
        let dt = schedule.interval_length(n).map_err(|e| record.fail(e))?;
        let u_n = match &setup.law {
            Law::PiecewiseConstant { g0_pinv } => {
                segment_input(g0_pinv, x.as_slice(), xtg.as_slice(), dt).map_err(|e| record.fail(e))?
            }
            Law::Feedback(ctl) => ctl.control(x.as_slice()),
        };
        record.push_sample(Sample { t: t0, x: x.clone(), u: u_n.clone() });

        let mut intra_max = 0.0f64;
        let mut u_max = u_n.inf_norm();
        let constant = u_n.clone();
        let control = |xs: &[f64]| match &setup.law {
            Law::PiecewiseConstant { .. } => constant.clone(),
            Law::Feedback(ctl) => ctl.control(xs),
        };
        let result = integrate_with(setup.model, &x, t0, t1, spec.h_max, &control, |t, xs, u| {
            step_counter += 1;
            intra_max = intra_max.max(xs.sub(xtg).inf_norm());
            u_max = u_max.max(u.inf_norm());
            if step_counter.is_multiple_of(stride) {
                record.push_sample(Sample { t, x: xs.clone(), u: u.clone() });
            }
        });
        step_counter += 1;
        record.observe_input(u_max);
        x = result.map_err(|e| record.fail(e))?;

        let vbar = setup.bound.map(|(c, d_s)| vbar_value(c, d_s, dt));
        record.push_checkpoint(n, t1, dt, x.clone(), vbar, u_n.clone(), intra_max);
        last_u = u_n;
    }
    let final_t = schedule.time(setup.intervals);
    let final_u = match &setup.law {
        Law::PiecewiseConstant { .. } => last_u,
        Law::Feedback(ctl) => {
            let u = ctl.control(x.as_slice());
            record.observe_input(u.inf_norm());
            u
        }
    };
    record.push_sample(Sample { t: final_t, x, u: final_u });
    Ok(record)
}

fn bound_of(assessment: &Assessment) -> Option<(f64, f64)> {
    assessment.report().map(|r| (r.c, r.d_s))
}

/// Applies `u_n = g0† (x_tg − x_{n−1}) / Δt_n` on every interval of the
/// schedule to the full nonlinear dynamics.
pub fn run_closed_loop(spec: &ProblemSpec) -> Result<TrajectoryRecord, RunFailure> {
    let model = spec.model.as_ref();
    let assessment = assess(model, spec.x0.as_slice(), spec.xtg.as_slice())?;
    let setup = RunSetup {
        name: "closed_loop",
        model,
        law: Law::PiecewiseConstant { g0_pinv: assessment.g0_pinv() },
        intervals: spec.schedule.count(),
        bound: bound_of(&assessment),
    };
    simulate(spec, setup)
}

/// `ẋ = g0 u`: the driftless approximation frozen at the initial state.
struct FrozenInputMap {
    g0: Mat,
}

impl SystemModel for FrozenInputMap {
    fn name(&self) -> &str {
        "driftless"
    }

    fn state_dim(&self) -> usize {
        self.g0.rows()
    }

    fn input_dim(&self) -> usize {
        self.g0.cols()
    }

    fn drift(&self, _x: &[f64]) -> Result<Vector> {
        Ok(Vector::zeros(self.g0.rows()))
    }

    fn input_map(&self, _x: &[f64]) -> Result<Mat> {
        Ok(self.g0.clone())
    }
}

/// Applies `u_1` to the driftless approximation over the first interval.
pub fn run_driftless(spec: &ProblemSpec) -> Result<TrajectoryRecord, RunFailure> {
    let model = spec.model.as_ref();
    let x0 = spec.x0.as_slice();
    let g0 = model.input_map(x0)?;
    let assessment = assess(model, x0, spec.xtg.as_slice())?;
    let frozen = FrozenInputMap { g0 };
    let setup = RunSetup {
        name: "driftless",
        model: &frozen,
        law: Law::PiecewiseConstant { g0_pinv: assessment.g0_pinv() },
        intervals: 1,
        bound: None,
    };
    simulate(spec, setup)
}

/// Linear state feedback from [`baseline_feedback`], optionally clamped.
pub fn run_baseline(spec: &ProblemSpec, clamped: bool) -> Result<TrajectoryRecord, RunFailure> {
    let model = spec.model.as_ref();
    let ctl = baseline_feedback(
        model,
        spec.linearize_at.as_slice(),
        spec.xtg.as_slice(),
        clamped,
    )?;
    let setup = RunSetup {
        name: if clamped { "baseline_clamped" } else { "baseline" },
        model,
        law: Law::Feedback(&ctl),
        intervals: spec.schedule.count(),
        bound: None,
    };
    simulate(spec, setup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{admire_model, vdp_model, LinearModel};
    use crate::schedule::harmonic_schedule;
    use crate::synthesis::compute_constants;

    fn decay() -> LinearModel {
        LinearModel::new(Mat::from_rows(&[[-1.0]]), Mat::from_rows(&[[0.0]]))
    }

    #[test]
    fn exponential_decay() {
        let (x, samples) =
            integrate_segment(&decay(), &Vector::from([1.0]), &Vector::from([0.0]), 0.0, 1.0, 1e-3)
                .unwrap();
        assert!((x[0] - (-1.0f64).exp()).abs() < 1e-10);
        assert_eq!(samples.len(), 999);
        assert!(samples.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn constant_derivative_is_exact() {
        let m = LinearModel::new(Mat::zeros(2, 2), Mat::from_rows(&[[1.0, 2.0], [0.0, -1.0]]));
        let u = Vector::from([0.25, 0.5]);
        for h in [1.0, 0.3, 1e-2] {
            let (x, _) = integrate_segment(&m, &Vector::from([1.0, 1.0]), &u, 0.0, 2.0, h).unwrap();
            // only rounding accumulates across substeps
            assert!((x[0] - 3.5).abs() < 1e-13 && x[1].abs() < 1e-13, "h = {h}: {x:?}");
        }
    }

    #[test]
    fn vdp_step_halving_self_consistency() {
        let m = vdp_model(0.2);
        let x0 = Vector::from([2.90, 0.17]);
        let u = Vector::from([0.0]);
        let (coarse, _) = integrate_segment(&m, &x0, &u, 0.0, 1.0, 1e-2).unwrap();
        let (fine, _) = integrate_segment(&m, &x0, &u, 0.0, 1.0, 5e-3).unwrap();
        let (finest, _) = integrate_segment(&m, &x0, &u, 0.0, 1.0, 2.5e-3).unwrap();
        // Richardson: fourth-order error estimate from the finest pair
        let extrapolated = finest.axpy(1.0 / 15.0, &finest.sub(&fine));
        assert!(fine.sub(&coarse).inf_norm() < 1e-7);
        assert!(finest.sub(&extrapolated).inf_norm() < 1e-8);
    }

    #[test]
    fn reversed_interval_is_rejected() {
        let r = integrate_segment(&decay(), &Vector::from([1.0]), &Vector::from([0.0]), 1.0, 1.0, 0.1);
        assert!(matches!(r, Err(Error::InvalidInterval(_))));
    }

    #[test]
    fn divergence_is_reported() {
        let m = LinearModel::new(Mat::from_rows(&[[800.0]]), Mat::from_rows(&[[1.0]]));
        let r = integrate_segment(&m, &Vector::from([1.0]), &Vector::from([0.0]), 0.0, 10.0, 0.1);
        assert!(matches!(r, Err(Error::Diverged { .. })));
    }

    fn admire_spec(x0: [f64; 3], xtg: [f64; 3], t_star: f64, count: usize) -> ProblemSpec {
        let s = harmonic_schedule(t_star, count).unwrap();
        ProblemSpec::new(Arc::new(admire_model()), x0.into(), xtg.into(), s).unwrap()
    }

    #[test]
    fn driftless_reaches_target() {
        let spec = admire_spec([4.86, 1.23, 3.07], [0.0; 3], 10.0, 5);
        let rec = run_driftless(&spec).unwrap();
        assert_eq!(rec.checkpoints.len(), 1);
        assert!(rec.final_error() < 1e-9);
    }

    #[test]
    fn driftless_vdp_leaves_position_error() {
        let s = harmonic_schedule(7.0, 3).unwrap();
        let spec =
            ProblemSpec::new(Arc::new(vdp_model(0.2)), [2.90, 0.17].into(), [0.0, 0.0].into(), s)
                .unwrap();
        let rec = run_driftless(&spec).unwrap();
        let x1 = &rec.checkpoints[0].x;
        assert!((x1[0] - 2.90).abs() < 1e-12 && x1[1].abs() < 1e-12);
        assert!((rec.final_error() - 2.90).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_start_stays_put() {
        let m = LinearModel::new(Mat::from_rows(&[[-1.0, 0.0], [1.0, -2.0]]), Mat::identity(2));
        let s = harmonic_schedule(2.0, 10).unwrap();
        let spec = ProblemSpec::new(Arc::new(m), [0.0, 0.0].into(), [0.0, 0.0].into(), s).unwrap();
        let rec = run_closed_loop(&spec).unwrap();
        assert_eq!(rec.u_inf_max, 0.0);
        assert!(rec.checkpoints.iter().all(|c| c.err == 0.0 && c.u.inf_norm() == 0.0));
        assert!(run_driftless(&spec).unwrap().final_error() == 0.0);
    }

    #[test]
    fn checkpoint_times_match_schedule_bitwise() {
        let spec = admire_spec([1.0, 0.5, -0.3], [0.0; 3], 3.0, 40);
        let rec = run_closed_loop(&spec).unwrap();
        for (cp, &t) in rec.checkpoints.iter().zip(&spec.schedule.times()[1..]) {
            assert_eq!(cp.t.to_bits(), t.to_bits());
        }
        assert_eq!(rec.samples.last().unwrap().t, spec.schedule.final_time());
    }

    #[test]
    fn closed_loop_attaches_bounds_only_with_lipschitz_data() {
        let spec = admire_spec([0.01, 0.0, 0.0], [0.0; 3], 1.0, 5);
        let rec = run_closed_loop(&spec).unwrap();
        let r = compute_constants(spec.model.as_ref(), &[0.01, 0.0, 0.0], &[0.0; 3]).unwrap();
        let expected = vbar_value(r.c, r.d_s, 1.0 / 3.0);
        assert!((rec.checkpoints[2].vbar.unwrap() - expected).abs() < 1e-15);

        let s = harmonic_schedule(7.0, 3).unwrap();
        let spec =
            ProblemSpec::new(Arc::new(vdp_model(0.2)), [2.90, 0.17].into(), [0.0, 0.0].into(), s)
                .unwrap();
        assert!(run_closed_loop(&spec).unwrap().checkpoints.iter().all(|c| c.vbar.is_none()));
    }

    #[test]
    fn baseline_on_linear_system_converges() {
        let a = Mat::from_rows(&[[-0.5, 1.0], [0.0, -1.0]]);
        let b = Mat::from_rows(&[[0.0], [1.0]]);
        let s = harmonic_schedule(5.0, 60).unwrap();
        let spec = ProblemSpec::new(
            Arc::new(LinearModel::new(a, b)),
            [1.0, -1.0].into(),
            [0.0, 0.0].into(),
            s,
        )
        .unwrap();
        let rec = run_baseline(&spec, false).unwrap();
        assert!(rec.final_error() < 1e-6, "final error {}", rec.final_error());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let s = harmonic_schedule(1.0, 4).unwrap();
        let m: Arc<dyn SystemModel> = Arc::new(admire_model());
        assert!(ProblemSpec::new(m.clone(), [0.0; 2].into(), [0.0; 3].into(), s.clone()).is_err());
        let spec = ProblemSpec::new(m, [0.0; 3].into(), [0.0; 3].into(), s).unwrap();
        assert!(spec.clone().with_h_max(0.3).is_err());
        assert!(spec.with_h_max(0.0).is_err());
    }

    #[test]
    fn sample_budget_is_respected() {
        let s = harmonic_schedule(1.0, 50).unwrap();
        let spec = ProblemSpec::new(Arc::new(admire_model()), [1.0, 0.0, 0.0].into(), [0.0; 3].into(), s)
            .unwrap()
            .with_h_max(2e-5)
            .unwrap();
        let rec = run_closed_loop(&spec).unwrap();
        assert!(rec.samples.len() <= MAX_SAMPLES);
        assert!(rec.samples.len() > MAX_SAMPLES / 2);
        for cp in &rec.checkpoints {
            assert!(rec.samples.iter().any(|s| s.t == cp.t && s.x == cp.x));
        }
    }
}
