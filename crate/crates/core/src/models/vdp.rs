use super::SystemModel;
use crate::error::Result;
use crate::linalg::{Mat, Vector};

/// Forced van der Pol oscillator, `ẍ = μ(1 − x²)ẋ − x + u`.
#[derive(Debug, Clone, Copy)]
pub struct VanDerPol {
    pub mu: f64,
}

pub fn vdp_model(mu: f64) -> VanDerPol {
    VanDerPol { mu }
}

impl SystemModel for VanDerPol {
    fn name(&self) -> &str {
        "vdp"
    }

    fn state_dim(&self) -> usize {
        2
    }

    fn input_dim(&self) -> usize {
        1
    }

    fn drift(&self, x: &[f64]) -> Result<Vector> {
        let (pos, vel) = (x[0], x[1]);
        Ok(Vector::from([vel, self.mu * (1.0 - pos * pos) * vel - pos]))
    }

    fn input_map(&self, _x: &[f64]) -> Result<Mat> {
        Ok(Mat::column(&[0.0, 1.0]))
    }
}
