use super::SystemModel;
use crate::error::{Error, Result};
use crate::linalg::{Mat, Vector};

/// Link masses, lengths and gravitational acceleration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLinkParams {
    pub m1: f64,
    pub m2: f64,
    pub l1: f64,
    pub l2: f64,
    pub g_acc: f64,
}

impl Default for TwoLinkParams {
    fn default() -> Self {
        TwoLinkParams { m1: 0.3, m2: 0.4, l1: 0.2, l2: 0.5, g_acc: 9.81 }
    }
}

/// Two-link planar manipulator, state `[θ1, θ̇1, θ2, θ̇2]`, joint torques as
/// inputs: `θ̈ = M(θ)⁻¹ (τ − C(θ, θ̇) − K(θ))`.
#[derive(Debug, Clone, Copy)]
pub struct TwoLink {
    params: TwoLinkParams,
}

pub fn two_link_model(params: TwoLinkParams) -> Result<TwoLink> {
    let TwoLinkParams { m1, m2, l1, l2, g_acc } = params;
    if [m1, m2, l1, l2, g_acc].iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidProblem(format!(
            "two_link masses, lengths and g must be positive: {params:?}"
        )));
    }
    Ok(TwoLink { params })
}

impl TwoLink {
    pub fn params(&self) -> TwoLinkParams {
        self.params
    }

    pub fn inertia(&self, theta2: f64) -> [[f64; 2]; 2] {
        let TwoLinkParams { m1, m2, l1, l2, .. } = self.params;
        let c2 = theta2.cos();
        let reach_sq = l1 * l1 + l2 * l2 + 2.0 * l1 * l2 * c2;
        let off = m2 * (l2 * l2 + l1 * l2 * c2);
        [[m1 * l1 * l1 + m2 * reach_sq, off], [off, m2 * l2 * l2]]
    }

    pub fn coriolis(&self, x: &[f64]) -> [f64; 2] {
        let TwoLinkParams { m2, l1, l2, .. } = self.params;
        let (w1, th2, w2) = (x[1], x[2], x[3]);
        let k = m2 * l1 * l2 * th2.sin();
        [-k * w2 * (2.0 * w1 + w2), k * w1 * w1]
    }

    pub fn gravity(&self, x: &[f64]) -> [f64; 2] {
        let TwoLinkParams { m1, m2, l1, l2, g_acc } = self.params;
        let (th1, th2) = (x[0], x[2]);
        let s12 = (th1 + th2).sin();
        [(m1 + m2) * g_acc * l1 * th1.sin() + m2 * g_acc * l2 * s12, m2 * g_acc * l2 * s12]
    }

    fn inertia_inverse(&self, x: &[f64]) -> Result<[[f64; 2]; 2]> {
        let [[a, b], [c, d]] = self.inertia(x[2]);
        let det = a * d - b * c;
        if !(det.abs() > 1e-14 * (a.abs() + d.abs()).powi(2)) {
            return Err(Error::SingularInertia { theta1: x[0], theta2: x[2] });
        }
        Ok([[d / det, -b / det], [-c / det, a / det]])
    }
}

impl SystemModel for TwoLink {
    fn name(&self) -> &str {
        "two_link"
    }

    fn state_dim(&self) -> usize {
        4
    }

    fn input_dim(&self) -> usize {
        2
    }

    fn drift(&self, x: &[f64]) -> Result<Vector> {
        let mi = self.inertia_inverse(x)?;
        let c = self.coriolis(x);
        let k = self.gravity(x);
        let r = [-(c[0] + k[0]), -(c[1] + k[1])];
        let acc1 = mi[0][0] * r[0] + mi[0][1] * r[1];
        let acc2 = mi[1][0] * r[0] + mi[1][1] * r[1];
        Ok(Vector::from([x[1], acc1, x[3], acc2]))
    }

    fn input_map(&self, x: &[f64]) -> Result<Mat> {
        let mi = self.inertia_inverse(x)?;
        Ok(Mat::from_rows(&[[0.0, 0.0], mi[0], [0.0, 0.0], mi[1]]))
    }
}
