use super::{Lipschitz, SystemModel};
use crate::error::Result;
use crate::linalg::{Mat, Vector};

/// Linear roll/pitch/yaw-rate aircraft model with a sinusoidal wind
/// disturbance: `ẋ = A x + f_w(x) + B u`, three states and four control
/// surfaces.
#[derive(Debug, Clone)]
pub struct Admire {
    a: Mat,
    b: Mat,
}

pub const ADMIRE_A: [[f64; 3]; 3] = [
    [-0.9967, 0.0, 0.6176],
    [0.0, -0.5057, 0.0],
    [-0.0939, 0.0, -0.2127],
];

pub const ADMIRE_B: [[f64; 4]; 3] = [
    [0.0, -4.2423, 4.2423, 1.4871],
    [1.6532, -1.2735, -1.2735, 0.0024],
    [0.0, -0.2805, 0.2805, -0.8823],
];

/// `D_f = ‖A‖∞ + 1` (the wind term is 1-Lipschitz), `D_g = 0`.
pub const ADMIRE_LIPSCHITZ: Lipschitz = Lipschitz { d_f: 2.6143, d_g: 0.0 };

pub fn admire_model() -> Admire {
    Admire { a: Mat::from_rows(&ADMIRE_A), b: Mat::from_rows(&ADMIRE_B) }
}

impl Admire {
    pub fn a(&self) -> &Mat {
        &self.a
    }

    pub fn b(&self) -> &Mat {
        &self.b
    }

    pub fn wind(x: &[f64]) -> Vector {
        let (p, q) = (x[0], x[1]);
        let cp = p.cos();
        Vector::from([0.5 * p.sin() * cp * cp, -0.5 * (2.0 * q).sin(), 0.5])
    }
}

impl SystemModel for Admire {
    fn name(&self) -> &str {
        "admire"
    }

    fn state_dim(&self) -> usize {
        3
    }

    fn input_dim(&self) -> usize {
        4
    }

    fn drift(&self, x: &[f64]) -> Result<Vector> {
        Ok(self.a.mul_vec(x).add(&Self::wind(x)))
    }

    fn input_map(&self, _x: &[f64]) -> Result<Mat> {
        Ok(self.b.clone())
    }

    fn lipschitz(&self) -> Option<Lipschitz> {
        Some(ADMIRE_LIPSCHITZ)
    }
}
