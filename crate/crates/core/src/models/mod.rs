//! Dynamical-system interface, the built-in benchmark systems and a by-name
//! registry used by configuration-driven runs.

mod admire;
mod baseline;
mod linear;
mod two_link;
mod vdp;
mod wing_rock;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Mat, Vector};

pub use admire::{admire_model, Admire};
pub use baseline::{baseline_feedback, lqr, solve_lyapunov, BaselineController, Lqr};
pub use linear::LinearModel;
pub use two_link::{two_link_model, TwoLink, TwoLinkParams};
pub use vdp::{vdp_model, VanDerPol};
pub use wing_rock::{wing_rock_model, WingRock, WING_ROCK_COEFFS};

/// Lipschitz constants of `f` and `g` in the ∞-norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lipschitz {
    pub d_f: f64,
    pub d_g: f64,
}

impl Lipschitz {
    pub fn sum(&self) -> f64 {
        self.d_f + self.d_g
    }
}

/// Control-affine dynamics `ẋ = f(x) + g(x) u`.
pub trait SystemModel: Send + Sync {
    fn name(&self) -> &str;

    fn state_dim(&self) -> usize;

    fn input_dim(&self) -> usize;

    /// Drift `f(x)`.
    fn drift(&self, x: &[f64]) -> Result<Vector>;

    /// Input map `g(x)`, `state_dim × input_dim`.
    fn input_map(&self, x: &[f64]) -> Result<Mat>;

    /// Known global Lipschitz constants, if any.
    fn lipschitz(&self) -> Option<Lipschitz> {
        None
    }

    fn vector_field(&self, x: &[f64], u: &[f64]) -> Result<Vector> {
        let f = self.drift(x)?;
        let gu = self.input_map(x)?.mul_vec(u);
        Ok(f.add(&gu))
    }
}

/// Default central-difference step `1e-6 (1 + ‖x‖∞)`.
pub fn default_jacobian_step(x: &[f64]) -> f64 {
    1e-6 * (1.0 + crate::linalg::inf_norm_vec(x))
}

/// Central-difference Jacobian of the drift at `x`.
pub fn numerical_jacobian(model: &dyn SystemModel, x: &[f64], h: f64) -> Result<Mat> {
    let n = model.state_dim();
    let mut jac = Mat::zeros(n, n);
    let mut xp = x.to_vec();
    for j in 0..n {
        xp[j] = x[j] + h;
        let fp = model.drift(&xp)?;
        xp[j] = x[j] - h;
        let fm = model.drift(&xp)?;
        xp[j] = x[j];
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Named scalar parameters for a model builder.
pub type ModelParams = BTreeMap<String, f64>;

type Builder = Box<dyn Fn(&ModelParams) -> Result<Arc<dyn SystemModel>> + Send + Sync>;

/// Maps model names to constructors.
pub struct ModelRegistry {
    builders: BTreeMap<String, Builder>,
}

impl ModelRegistry {
    pub fn empty() -> Self {
        ModelRegistry { builders: BTreeMap::new() }
    }

    /// Registry holding `admire`, `vdp`, `wing_rock` and `two_link`.
    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register("admire", |p| {
            reject_unknown("admire", p, &[])?;
            Ok(Arc::new(admire_model()))
        });
        reg.register("vdp", |p| {
            reject_unknown("vdp", p, &["mu"])?;
            Ok(Arc::new(vdp_model(param(p, "mu", 0.2))))
        });
        reg.register("wing_rock", |p| {
            reject_unknown("wing_rock", p, &[])?;
            Ok(Arc::new(wing_rock_model()))
        });
        reg.register("two_link", |p| {
            reject_unknown("two_link", p, &["m1", "m2", "l1", "l2", "g"])?;
            let d = TwoLinkParams::default();
            let params = TwoLinkParams {
                m1: param(p, "m1", d.m1),
                m2: param(p, "m2", d.m2),
                l1: param(p, "l1", d.l1),
                l2: param(p, "l2", d.l2),
                g_acc: param(p, "g", d.g_acc),
            };
            Ok(Arc::new(two_link_model(params)?))
        });
        reg
    }

    pub fn register<F>(&mut self, name: &str, builder: F)
    where
        F: Fn(&ModelParams) -> Result<Arc<dyn SystemModel>> + Send + Sync + 'static,
    {
        self.builders.insert(name.to_string(), Box::new(builder));
    }

    pub fn build(&self, name: &str, params: &ModelParams) -> Result<Arc<dyn SystemModel>> {
        let builder = self.builders.get(name).ok_or_else(|| Error::UnknownName {
            kind: "model",
            name: name.to_string(),
        })?;
        builder(params)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.builders.keys().map(String::as_str)
    }
}

impl Default for ModelRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

fn param(p: &ModelParams, key: &str, default: f64) -> f64 {
    p.get(key).copied().unwrap_or(default)
}

fn reject_unknown(model: &str, p: &ModelParams, known: &[&str]) -> Result<()> {
    match p.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(Error::InvalidProblem(format!(
            "unknown parameter `{k}` for model `{model}`"
        ))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_builds_builtins() {
        let reg = ModelRegistry::with_builtins();
        let names: Vec<_> = reg.names().collect();
        assert_eq!(names, ["admire", "two_link", "vdp", "wing_rock"]);
        let empty = ModelParams::new();
        for (name, n, m) in [("admire", 3, 4), ("vdp", 2, 1), ("wing_rock", 2, 1), ("two_link", 4, 2)] {
            let model = reg.build(name, &empty).unwrap();
            assert_eq!((model.state_dim(), model.input_dim()), (n, m), "{name}");
            assert_eq!(model.name(), name);
        }
    }

    #[test]
    fn registry_rejects_unknowns() {
        let reg = ModelRegistry::with_builtins();
        assert!(matches!(
            reg.build("pendulum", &ModelParams::new()),
            Err(Error::UnknownName { kind: "model", .. })
        ));
        let mut p = ModelParams::new();
        p.insert("nu".into(), 1.0);
        assert!(matches!(reg.build("vdp", &p), Err(Error::InvalidProblem(_))));
    }

    #[test]
    fn registry_passes_params() {
        let reg = ModelRegistry::with_builtins();
        let mut p = ModelParams::new();
        p.insert("mu".into(), 0.0);
        let vdp = reg.build("vdp", &p).unwrap();
        let f = vdp.drift(&[0.0, 1.0]).unwrap();
        assert_eq!(f.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn jacobian_of_linear_model_is_exact() {
        let a = Mat::from_rows(&[[1.0, -2.0, 0.5], [0.0, 3.0, 1.0], [-1.0, 0.0, 0.25]]);
        let model = LinearModel::new(a.clone(), Mat::identity(3));
        for x in [[0.0, 0.0, 0.0], [10.0, -3.0, 2.5]] {
            let j = numerical_jacobian(&model, &x, default_jacobian_step(&x)).unwrap();
            assert!(j.sub(&a).inf_norm() < 1e-8);
        }
    }

    #[test]
    fn jacobian_of_harmonic_oscillator() {
        let j = numerical_jacobian(&vdp_model(0.0), &[0.0, 0.0], 1e-6).unwrap();
        assert!(j.sub(&Mat::from_rows(&[[0.0, 1.0], [-1.0, 0.0]])).inf_norm() < 1e-9);
    }
}
