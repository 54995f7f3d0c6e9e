use super::SystemModel;
use crate::error::Result;
use crate::linalg::{Mat, Vector};

/// Aerodynamic coefficients `c1..c6` at an angle of attack of π/6.
pub const WING_ROCK_COEFFS: [f64; 6] = [5.0, -26.67, 0.765, -2.92, -2.5, 0.75];

/// Wing rock roll dynamics with state `[φ, p]` and aileron input.
#[derive(Debug, Clone, Copy)]
pub struct WingRock {
    pub coeffs: [f64; 6],
}

pub fn wing_rock_model() -> WingRock {
    WingRock { coeffs: WING_ROCK_COEFFS }
}

impl SystemModel for WingRock {
    fn name(&self) -> &str {
        "wing_rock"
    }

    fn state_dim(&self) -> usize {
        2
    }

    fn input_dim(&self) -> usize {
        1
    }

    fn drift(&self, x: &[f64]) -> Result<Vector> {
        let [c1, c2, c3, c4, c5, _] = self.coeffs;
        let (phi, p) = (x[0], x[1]);
        let p_dot = c1 + c2 * phi + c3 * p + c4 * phi.abs() * p + c5 * p.abs() * p;
        Ok(Vector::from([p, p_dot]))
    }

    fn input_map(&self, _x: &[f64]) -> Result<Mat> {
        Ok(Mat::column(&[0.0, self.coeffs[5]]))
    }
}
