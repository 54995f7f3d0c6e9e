//! Linear state feedback used as the comparison baseline: continuous-time
//! LQR (`Q = I`, `R = I`) on a Jacobian linearization.

use super::{default_jacobian_step, numerical_jacobian, SystemModel};
use crate::error::{Error, Result};
use crate::linalg::{pinv, solve, Mat, Vector};

const KLEINMAN_TOL: f64 = 1e-10;
const KLEINMAN_MAX_ITER: usize = 100;

/// Solves `Aᵀ P + P A + Q = 0` through the vectorized Kronecker system.
/// Returns `None` when the operator is singular.
pub fn solve_lyapunov(a: &Mat, q: &Mat) -> Option<Mat> {
    let n = a.rows();
    let idx = |i: usize, j: usize| j * n + i;
    let mut op = Mat::zeros(n * n, n * n);
    let mut rhs = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let row = idx(i, j);
            for k in 0..n {
                op[(row, idx(k, j))] += a[(k, i)];
                op[(row, idx(i, k))] += a[(k, j)];
            }
            rhs[row] = -q[(i, j)];
        }
    }
    let p = solve(&op, &rhs)?;
    let mut out = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = 0.5 * (p[idx(i, j)] + p[idx(j, i)]);
        }
    }
    Some(out)
}

fn is_positive_definite(p: &Mat) -> bool {
    let n = p.rows();
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = p[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return false;
        }
        l[(j, j)] = d.sqrt();
        for i in j + 1..n {
            let mut s = p[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / l[(j, j)];
        }
    }
    true
}

#[derive(Debug, Clone)]
pub struct Lqr {
    pub gain: Mat,
    pub riccati: Mat,
    pub iterations: usize,
}

/// LQR with identity weights by Newton–Kleinman iteration from `K = 0`.
/// The zero seed is only stabilizing when `A` is Hurwitz.
pub fn lqr(a: &Mat, b: &Mat) -> Result<Lqr> {
    let n = a.rows();
    let mut gain = Mat::zeros(b.cols(), n);
    let mut prev: Option<Mat> = None;
    for it in 1..=KLEINMAN_MAX_ITER {
        let closed = a.sub(&b.matmul(&gain));
        let q = Mat::identity(n).add(&gain.transpose().matmul(&gain));
        let p = solve_lyapunov(&closed, &q).ok_or_else(|| {
            Error::BaselineSynthesisFailed(format!("singular Lyapunov operator at iteration {it}"))
        })?;
        if !p.is_finite() || !is_positive_definite(&p) {
            return Err(Error::BaselineSynthesisFailed(format!(
                "closed loop not stabilizing at iteration {it}"
            )));
        }
        gain = b.transpose().matmul(&p);
        if let Some(prev) = &prev {
            if p.sub(prev).inf_norm() < KLEINMAN_TOL {
                return Ok(Lqr { gain, riccati: p, iterations: it });
            }
        }
        prev = Some(p);
    }
    Err(Error::BaselineSynthesisFailed(format!(
        "Newton-Kleinman did not converge in {KLEINMAN_MAX_ITER} iterations"
    )))
}

/// `u(x) = u_ss − K (x − x_tg)`, optionally clipped to `[-1, 1]` per component.
#[derive(Debug, Clone)]
pub struct BaselineController {
    pub gain: Mat,
    pub u_ss: Vector,
    pub x_tg: Vector,
    pub clamped: bool,
}

impl BaselineController {
    pub fn control(&self, x: &[f64]) -> Vector {
        let dx: Vec<f64> = x.iter().zip(self.x_tg.iter()).map(|(a, b)| a - b).collect();
        let mut u = self.u_ss.sub(&self.gain.mul_vec(&dx));
        if self.clamped {
            for i in 0..u.len() {
                u[i] = u[i].clamp(-1.0, 1.0);
            }
        }
        u
    }
}

/// Linearizes at `x_lin` (affine model `f(x_lin) + A (x − x_lin)` with
/// `B = g(x_lin)`), designs the LQR gain and the feedforward that makes
/// `x_tg` an equilibrium of the linear model.
pub fn baseline_feedback(
    model: &dyn SystemModel,
    x_lin: &[f64],
    x_tg: &[f64],
    clamped: bool,
) -> Result<BaselineController> {
    let n = model.state_dim();
    if x_lin.len() != n || x_tg.len() != n {
        return Err(Error::InvalidProblem(format!(
            "baseline expects states of dimension {n}"
        )));
    }
    let a = numerical_jacobian(model, x_lin, default_jacobian_step(x_lin))?;
    let b = model.input_map(x_lin)?;
    let Lqr { gain, .. } = lqr(&a, &b)?;

    let offset: Vec<f64> = x_tg.iter().zip(x_lin).map(|(t, l)| t - l).collect();
    let f_lin_tg = model.drift(x_lin)?.add(&a.mul_vec(&offset));
    let u_ss = pinv(&b, 0.0)?.mul_vec(f_lin_tg.scale(-1.0).as_slice());
    Ok(BaselineController { gain, u_ss, x_tg: Vector::from(x_tg), clamped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{admire_model, LinearModel};

    fn care_residual(a: &Mat, b: &Mat, p: &Mat) -> f64 {
        let pb = p.matmul(b);
        a.transpose()
            .matmul(p)
            .add(&p.matmul(a))
            .sub(&pb.matmul(&pb.transpose()))
            .add(&Mat::identity(a.rows()))
            .inf_norm()
    }

    #[test]
    fn lyapunov_scalar() {
        // 2 a p + q = 0
        let p = solve_lyapunov(&Mat::from_rows(&[[-2.0]]), &Mat::from_rows(&[[3.0]])).unwrap();
        assert!((p[(0, 0)] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn lyapunov_residual() {
        let a = Mat::from_rows(&[[-1.0, 2.0, 0.0], [0.0, -3.0, 1.0], [0.5, 0.0, -2.0]]);
        let q = Mat::identity(3);
        let p = solve_lyapunov(&a, &q).unwrap();
        let r = a.transpose().matmul(&p).add(&p.matmul(&a)).add(&q);
        assert!(r.inf_norm() < 1e-12);
    }

    #[test]
    fn scalar_lqr_matches_closed_form() {
        // 2 a p − p² + 1 = 0 with a = −1 gives p = −1 + √2
        let r = lqr(&Mat::from_rows(&[[-1.0]]), &Mat::from_rows(&[[1.0]])).unwrap();
        let p = 2f64.sqrt() - 1.0;
        assert!((r.riccati[(0, 0)] - p).abs() < 1e-12);
        assert!((r.gain[(0, 0)] - p).abs() < 1e-12);
    }

    #[test]
    fn admire_lqr_solves_care() {
        let m = admire_model();
        let a = numerical_jacobian(&m, &[0.0; 3], 1e-6).unwrap();
        let r = lqr(&a, m.b()).unwrap();
        assert!(care_residual(&a, m.b(), &r.riccati) < 1e-8);
    }

    #[test]
    fn unstable_open_loop_is_rejected() {
        let err = lqr(&Mat::from_rows(&[[1.0]]), &Mat::from_rows(&[[1.0]])).unwrap_err();
        assert!(matches!(err, Error::BaselineSynthesisFailed(_)));
    }

    #[test]
    fn zero_input_at_equilibrium_target() {
        let a = Mat::from_rows(&[[-1.0, 0.5], [0.0, -2.0]]);
        let model = LinearModel::new(a, Mat::identity(2));
        let ctl = baseline_feedback(&model, &[0.0, 0.0], &[0.0, 0.0], false).unwrap();
        assert_eq!(ctl.control(&[0.0, 0.0]).inf_norm(), 0.0);
    }

    #[test]
    fn clamped_output_is_bounded() {
        let m = admire_model();
        let ctl = baseline_feedback(&m, &[0.0; 3], &[3.81, 2.13, 3.73], true).unwrap();
        for x in [[100.0, -50.0, 3.0], [0.0, 0.0, 0.0], [-7.0, 9.0, 1.0]] {
            assert!(ctl.control(&x).iter().all(|u| (-1.0..=1.0).contains(u)));
        }
    }
}
