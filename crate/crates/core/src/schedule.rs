//! Checkpoint sequences partitioning the time horizon.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleKind {
    /// `t_n = t* · H_n`, so `Δt_n = t*/n`.
    Harmonic { t_star: f64 },
    /// `t_n = t_f (aⁿ − 1)/aⁿ`, converging to `t_f`.
    Geometric { t_f: f64, ratio: f64 },
}

/// Materialized checkpoint times `t_0 = 0 < t_1 < … < t_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointSchedule {
    kind: ScheduleKind,
    times: Vec<f64>,
}

impl CheckpointSchedule {
    pub fn harmonic(t_star: f64, count: usize) -> Result<Self> {
        harmonic_schedule(t_star, count)
    }

    pub fn geometric(t_f: f64, ratio: f64, count: usize) -> Result<Self> {
        geometric_schedule(t_f, ratio, count)
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    /// Number of intervals `K`.
    pub fn count(&self) -> usize {
        self.times.len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, n: usize) -> f64 {
        self.times[n]
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Length of interval `n`, in closed form (`t*/n` or `t_f (a−1) a⁻ⁿ`).
    pub fn interval_length(&self, n: usize) -> Result<f64> {
        interval_length(self, n)
    }

    /// Design parameter governing the first interval: `t*` for harmonic, `t_f`
    /// for geometric.
    pub fn scale(&self) -> f64 {
        match self.kind {
            ScheduleKind::Harmonic { t_star } => t_star,
            ScheduleKind::Geometric { t_f, .. } => t_f,
        }
    }

    /// Iterates `(n, t_{n-1}, t_n)` for `n = 1..=K`.
    pub fn intervals(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.times.windows(2).enumerate().map(|(i, w)| (i + 1, w[0], w[1]))
    }
}

pub fn harmonic_schedule(t_star: f64, count: usize) -> Result<CheckpointSchedule> {
    if !(t_star > 0.0 && t_star.is_finite()) {
        return Err(Error::InvalidSchedule(format!("t* must be positive, got {t_star}")));
    }
    if count == 0 {
        return Err(Error::InvalidSchedule("checkpoint count must be positive".into()));
    }
    // Neumaier-compensated running sum of 1/k.
    let mut times = Vec::with_capacity(count + 1);
    times.push(0.0);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for k in 1..=count {
        let term = 1.0 / k as f64;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        times.push(t_star * (sum + comp));
    }
    Ok(CheckpointSchedule { kind: ScheduleKind::Harmonic { t_star }, times })
}

pub fn geometric_schedule(t_f: f64, ratio: f64, count: usize) -> Result<CheckpointSchedule> {
    if !(t_f > 0.0 && t_f.is_finite()) {
        return Err(Error::InvalidSchedule(format!("t_f must be positive, got {t_f}")));
    }
    if !(ratio > 1.0 && ratio.is_finite()) {
        return Err(Error::InvalidSchedule(format!("ratio a must exceed 1, got {ratio}")));
    }
    if count == 0 {
        return Err(Error::InvalidSchedule("checkpoint count must be positive".into()));
    }
    let times: Vec<f64> = (0..=count)
        .map(|n| t_f * (1.0 - ratio.powf(-(n as f64))))
        .collect();
    if let Some(n) = times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSchedule(format!(
            "geometric schedule stalls in floating point at n = {}; reduce the count",
            n + 1
        )));
    }
    Ok(CheckpointSchedule { kind: ScheduleKind::Geometric { t_f, ratio }, times })
}

pub fn interval_length(s: &CheckpointSchedule, n: usize) -> Result<f64> {
    if n == 0 || n > s.count() {
        return Err(Error::IndexError { index: n, count: s.count() });
    }
    Ok(match s.kind {
        ScheduleKind::Harmonic { t_star } => t_star / n as f64,
        ScheduleKind::Geometric { t_f, ratio } => t_f * (ratio - 1.0) * ratio.powf(-(n as f64)),
    })
}
