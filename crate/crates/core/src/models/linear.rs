use super::{Lipschitz, SystemModel};
use crate::error::Result;
use crate::linalg::{Mat, Vector};

/// `ẋ = A x + B u`.
#[derive(Debug, Clone)]
pub struct LinearModel {
    a: Mat,
    b: Mat,
}

impl LinearModel {
    pub fn new(a: Mat, b: Mat) -> Self {
        assert_eq!(a.rows(), a.cols());
        assert_eq!(a.rows(), b.rows());
        LinearModel { a, b }
    }
}

impl SystemModel for LinearModel {
    fn name(&self) -> &str {
        "linear"
    }

    fn state_dim(&self) -> usize {
        self.a.rows()
    }

    fn input_dim(&self) -> usize {
        self.b.cols()
    }

    fn drift(&self, x: &[f64]) -> Result<Vector> {
        Ok(self.a.mul_vec(x))
    }

    fn input_map(&self, _x: &[f64]) -> Result<Mat> {
        Ok(self.b.clone())
    }

    fn lipschitz(&self) -> Option<Lipschitz> {
        Some(Lipschitz { d_f: self.a.inf_norm(), d_g: 0.0 })
    }
}
