//! Constants, feasibility window for `t*`, the checkpoint error bound and the
//! per-interval minimum-energy inputs of the driftless approximation.

use crate::error::{Error, Result};
use crate::linalg::{inf_norm_vec, numerical_rank, pinv, Mat, Vector};
use crate::models::SystemModel;
use crate::schedule::CheckpointSchedule;

/// Lower end of the bracket for the root of `e^y − y/c1 − 1`.
const TBAR_BRACKET_LO: f64 = 1e-9;
/// Absolute bisection tolerance in `y = t·D_S`.
const TBAR_TOL: f64 = 1e-13;

/// Driftless approximation `ẋ = g0 u` at the initial state.
#[derive(Debug, Clone)]
pub struct DriftlessApproximation {
    pub g0: Mat,
    pub g0_pinv: Mat,
    pub rank_ok: bool,
    /// `‖g0† (x_tg − x0)‖∞`, the smallest `t*` keeping `u1` feasible.
    pub t_lower: f64,
    /// `(I − g0 g0†)(x_tg − x0)`.
    pub residual: Vector,
}

#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub d_s: f64,
    pub c: f64,
    pub c1: f64,
    pub t_lower: f64,
    /// Unique positive root `t̄`; `None` unless `0 < c1 < 1`. Infinite when
    /// `D_S = 0`.
    pub t_upper: Option<f64>,
    pub window_nonempty: bool,
    pub g0: Mat,
    pub g0_pinv: Mat,
    pub rank_ok: bool,
    pub residual: Vector,
}

/// Feasibility data for a problem, with or without Lipschitz constants.
#[derive(Debug, Clone)]
pub enum Assessment {
    Certifiable(FeasibilityReport),
    Uncertified(DriftlessApproximation),
}

impl Assessment {
    pub fn g0_pinv(&self) -> &Mat {
        match self {
            Assessment::Certifiable(r) => &r.g0_pinv,
            Assessment::Uncertified(a) => &a.g0_pinv,
        }
    }

    pub fn rank_ok(&self) -> bool {
        match self {
            Assessment::Certifiable(r) => r.rank_ok,
            Assessment::Uncertified(a) => a.rank_ok,
        }
    }

    pub fn t_lower(&self) -> f64 {
        match self {
            Assessment::Certifiable(r) => r.t_lower,
            Assessment::Uncertified(a) => a.t_lower,
        }
    }

    pub fn residual(&self) -> &Vector {
        match self {
            Assessment::Certifiable(r) => &r.residual,
            Assessment::Uncertified(a) => &a.residual,
        }
    }

    pub fn report(&self) -> Option<&FeasibilityReport> {
        match self {
            Assessment::Certifiable(r) => Some(r),
            Assessment::Uncertified(_) => None,
        }
    }

    pub fn verdict(&self, t_star: f64) -> Verdict {
        match self {
            Assessment::Certifiable(r) => check_tstar(r, t_star),
            Assessment::Uncertified(a) => Verdict::from_lower_bound(a.t_lower, t_star),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// `t_lower ≤ t* ≤ t̄`: constraint satisfaction and the bound are guaranteed.
    Certified,
    /// The first input is feasible but no upper bound certifies the rest.
    LowerOnly,
    /// `t* < t_lower`: the first input already violates the constraint.
    Infeasible,
}

impl Verdict {
    fn from_lower_bound(t_lower: f64, t_star: f64) -> Verdict {
        if t_star < t_lower {
            Verdict::Infeasible
        } else {
            Verdict::LowerOnly
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Certified => "certified",
            Verdict::LowerOnly => "lower_only",
            Verdict::Infeasible => "infeasible",
        }
    }
}

fn check_dims(model: &dyn SystemModel, x0: &[f64], xtg: &[f64]) -> Result<()> {
    let n = model.state_dim();
    if x0.len() != n || xtg.len() != n {
        return Err(Error::InvalidProblem(format!(
            "model `{}` has state dimension {n}, got x0 of length {} and x_tg of length {}",
            model.name(),
            x0.len(),
            xtg.len()
        )));
    }
    if !x0.iter().chain(xtg).all(|v| v.is_finite()) {
        return Err(Error::InvalidProblem("x0 and x_tg must be finite".into()));
    }
    Ok(())
}

pub fn driftless_approximation(
    model: &dyn SystemModel,
    x0: &[f64],
    xtg: &[f64],
) -> Result<DriftlessApproximation> {
    check_dims(model, x0, xtg)?;
    let g0 = model.input_map(x0)?;
    let g0_pinv = pinv(&g0, 0.0)?;
    let delta = Vector::from(xtg).sub(&Vector::from(x0));
    let t_lower = g0_pinv.mul_vec(delta.as_slice()).inf_norm();
    let rank_ok = numerical_rank(&g0, 0.0) == model.state_dim();
    let residual = rank_deficiency_residual(&g0, &g0_pinv, x0, xtg);
    Ok(DriftlessApproximation { g0, g0_pinv, rank_ok, t_lower, residual })
}

/// Computes `D_S`, `c`, `c1`, the feasibility window and the driftless data.
pub fn compute_constants(
    model: &dyn SystemModel,
    x0: &[f64],
    xtg: &[f64],
) -> Result<FeasibilityReport> {
    check_dims(model, x0, xtg)?;
    let lip = model
        .lipschitz()
        .ok_or_else(|| Error::LipschitzUnknown(model.name().to_string()))?;
    let approx = driftless_approximation(model, x0, xtg)?;

    let d_s = lip.sum();
    let dist: f64 = x0.iter().zip(xtg).map(|(a, b)| (b - a).abs()).fold(0.0, f64::max);
    let c = model.drift(x0)?.inf_norm() + (d_s + 1.0) * dist;
    let c1 = 2.0 * c * approx.g0_pinv.inf_norm();

    let t_upper = if c1 > 0.0 && c1 < 1.0 {
        if d_s > 0.0 {
            Some(solve_tbar(c1, d_s)?)
        } else {
            // e^{tD} − 1 ≤ tD/c1 holds for every t as D → 0.
            Some(f64::INFINITY)
        }
    } else {
        None
    };
    let window_nonempty = t_upper.is_some_and(|t| approx.t_lower <= t);

    Ok(FeasibilityReport {
        d_s,
        c,
        c1,
        t_lower: approx.t_lower,
        t_upper,
        window_nonempty,
        g0: approx.g0,
        g0_pinv: approx.g0_pinv,
        rank_ok: approx.rank_ok,
        residual: approx.residual,
    })
}

/// Uses the Lipschitz constants when the model has them, otherwise falls
/// back to the uncertified driftless data.
pub fn assess(model: &dyn SystemModel, x0: &[f64], xtg: &[f64]) -> Result<Assessment> {
    match compute_constants(model, x0, xtg) {
        Ok(r) => Ok(Assessment::Certifiable(r)),
        Err(Error::LipschitzUnknown(_)) => {
            Ok(Assessment::Uncertified(driftless_approximation(model, x0, xtg)?))
        }
        Err(e) => Err(e),
    }
}

/// `h(y) = e^y − y/c1 − 1`, evaluated without cancellation near zero.
fn tbar_residual(y: f64, c1: f64) -> f64 {
    y.exp_m1() - y / c1
}

/// Positive root `t̄` of `e^{t D_S} = t D_S / c1 + 1`.
///
/// Bisection in `y = t D_S`. `h` is negative on `(0, y*)` and positive
/// beyond, with its minimum at `y = ln(1/c1)`.
pub fn solve_tbar(c1: f64, d_s: f64) -> Result<f64> {
    if !(c1 > 0.0 && c1 < 1.0) {
        return Err(Error::NoRoot { c1 });
    }
    if !(d_s > 0.0 && d_s.is_finite()) {
        return Err(Error::InvalidProblem(format!("D_S must be positive, got {d_s}")));
    }
    let mut lo = TBAR_BRACKET_LO.min(-c1.ln());
    let mut hi = 1.0;
    while tbar_residual(hi, c1) <= 0.0 {
        hi *= 2.0;
    }
    while hi - lo > TBAR_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tbar_residual(mid, c1) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi) / d_s)
}

/// `(c/D)(e^{Δt D} − 1)`, with the `D → 0` limit `c Δt`.
pub fn vbar_value(c: f64, d_s: f64, dt: f64) -> f64 {
    if d_s == 0.0 {
        c * dt
    } else {
        c * (dt * d_s).exp_m1() / d_s
    }
}

/// Theoretical checkpoint error bounds `v̄_n` over a schedule.
#[derive(Debug, Clone, Copy)]
pub struct BoundSequence<'a> {
    pub c: f64,
    pub d_s: f64,
    pub schedule: &'a CheckpointSchedule,
}

impl<'a> BoundSequence<'a> {
    pub fn new(c: f64, d_s: f64, schedule: &'a CheckpointSchedule) -> Self {
        BoundSequence { c, d_s, schedule }
    }

    pub fn from_report(report: &FeasibilityReport, schedule: &'a CheckpointSchedule) -> Self {
        Self::new(report.c, report.d_s, schedule)
    }

    pub fn vbar(&self, n: usize) -> Result<f64> {
        vbar(self, n)
    }
}

pub fn vbar(b: &BoundSequence<'_>, n: usize) -> Result<f64> {
    Ok(vbar_value(b.c, b.d_s, b.schedule.interval_length(n)?))
}

/// `u = g0† (x_tg − x_prev) / dt`.
pub fn segment_input(g0_pinv: &Mat, x_prev: &[f64], xtg: &[f64], dt: f64) -> Result<Vector> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInterval(dt));
    }
    let delta: Vec<f64> = xtg.iter().zip(x_prev).map(|(t, x)| t - x).collect();
    Ok(g0_pinv.mul_vec(&delta).scale(1.0 / dt))
}

/// `(I − g0 g0†)(x_tg − x0)`: what the driftless system cannot reach.
pub fn rank_deficiency_residual(g0: &Mat, g0_pinv: &Mat, x0: &[f64], xtg: &[f64]) -> Vector {
    let delta = Vector::from(xtg).sub(&Vector::from(x0));
    let reached = g0.mul_vec(g0_pinv.mul_vec(delta.as_slice()).as_slice());
    delta.sub(&reached)
}

pub fn check_tstar(report: &FeasibilityReport, t_star: f64) -> Verdict {
    if t_star < report.t_lower {
        return Verdict::Infeasible;
    }
    match report.t_upper {
        Some(t_bar) if t_star <= t_bar => Verdict::Certified,
        _ => Verdict::LowerOnly,
    }
}

/// `max_i |v_i|` of a slice difference, used by callers comparing states.
pub fn distance_inf(a: &[f64], b: &[f64]) -> f64 {
    inf_norm_vec(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
}
