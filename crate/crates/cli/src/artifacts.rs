//! Text renderings of run results. Every number uses 17 significant digits so
//! files round-trip exactly.

use std::fmt::Write;

use driftless::simulator::{RunFailure, TrajectoryRecord};
use driftless::synthesis::Assessment;
use driftless::ProblemSpec;

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(num).collect::<Vec<_>>().join(",")
}

/// `t,x_1..x_N,u_1..u_m`, one row per stored sample.
pub fn trajectory_csv(rec: &TrajectoryRecord) -> String {
    let n = rec.xtg.len();
    let m = rec.samples.first().map_or(0, |s| s.u.len());
    let mut out = String::from("t");
    for i in 1..=n {
        write!(out, ",x_{i}").unwrap();
    }
    for j in 1..=m {
        write!(out, ",u_{j}").unwrap();
    }
    out.push('\n');
    for s in &rec.samples {
        out.push_str(&num(s.t));
        for v in s.x.iter().chain(s.u.iter()) {
            out.push(',');
            out.push_str(&num(*v));
        }
        out.push('\n');
    }
    out
}

/// `n,t_n,dt_n,err_inf,vbar_n,u_inf_max`; `vbar_n` is blank without Lipschitz data.
pub fn checkpoints_csv(rec: &TrajectoryRecord) -> String {
    let mut out = String::from("n,t_n,dt_n,err_inf,vbar_n,u_inf_max\n");
    for c in &rec.checkpoints {
        let vbar = c.vbar.map(num).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            c.n,
            num(c.t),
            num(c.dt),
            num(c.err),
            vbar,
            num(c.u_inf_max_so_far)
        )
        .unwrap();
    }
    out
}

/// The synthesis constants as `key = value` lines.
pub fn feasibility_txt(spec: &ProblemSpec, assessment: &Assessment) -> String {
    let t_star = spec.schedule.interval_length(1).unwrap();
    let unknown = || "unknown".to_string();
    let report = assessment.report();
    let residual = assessment.residual();
    let t_bar = match report {
        Some(r) => match r.t_upper {
            Some(t) if t.is_infinite() => "inf".to_string(),
            Some(t) => num(t),
            None => "none".to_string(),
        },
        None => unknown(),
    };
    let mut out = String::new();
    let mut line = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
    line("model", spec.model.name().to_string());
    line("t_star", num(t_star));
    line("c", report.map(|r| num(r.c)).unwrap_or_else(unknown));
    line("D_S", report.map(|r| num(r.d_s)).unwrap_or_else(unknown));
    line("c1", report.map(|r| num(r.c1)).unwrap_or_else(unknown));
    line("t_lower", num(assessment.t_lower()));
    line("t_bar", t_bar);
    line("verdict", assessment.verdict(t_star).as_str().to_string());
    line("rank_ok", assessment.rank_ok().to_string());
    line("remark2_residual", num(residual.inf_norm()));
    line("remark2_residual_components", join(residual.iter().copied()));
    out
}

/// One `[run]` block per run with its final error and constraint verdict.
pub fn summary_txt(epsilon: f64, runs: &[(String, Result<TrajectoryRecord, RunFailure>)]) -> String {
    let mut out = String::new();
    for (i, (name, result)) in runs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        writeln!(out, "[{name}]").unwrap();
        let rec = match result {
            Ok(rec) => {
                writeln!(out, "status = ok").unwrap();
                Some(rec)
            }
            Err(f) => {
                writeln!(out, "status = failed: {}", f.error).unwrap();
                f.partial.as_deref()
            }
        };
        let Some(rec) = rec else { continue };
        let last_t = rec.final_checkpoint().map_or(f64::NAN, |c| c.t);
        writeln!(out, "checkpoints = {}", rec.checkpoints.len()).unwrap();
        writeln!(out, "final_time = {}", num(last_t)).unwrap();
        writeln!(out, "final_error = {}", num(rec.final_error())).unwrap();
        writeln!(out, "final_error_components = {}", join(rec.final_error_components())).unwrap();
        writeln!(out, "within_epsilon = {}", rec.final_error() < epsilon).unwrap();
        writeln!(out, "u_inf_max = {}", num(rec.u_inf_max)).unwrap();
        writeln!(out, "constraint_satisfied = {}", rec.constraint_satisfied).unwrap();
    }
    out
}
