//! Driving constrained nonlinear systems to a target with piecewise-constant
//! inputs synthesized from a driftless approximation.
//!
//! The controller only uses `g0 = g(x0)`. Over a partition `t_n` of the time
//! axis with shrinking intervals it applies the minimum-energy input
//! `u_n = g0† (x_tg − x_{n−1}) / Δt_n` that would steer `ẋ = g0 u` exactly to
//! the target, then re-plans from wherever the real system ended up.

pub mod error;
pub mod linalg;
pub mod models;
pub mod schedule;
pub mod simulator;
pub mod synthesis;

pub use error::{Error, Result};
pub use linalg::{Mat, Vector};
pub use models::{ModelRegistry, SystemModel};
pub use schedule::CheckpointSchedule;
pub use simulator::{ProblemSpec, RunRegistry, RunStrategy, TrajectoryRecord};
