//! Constitutive parameters, run configuration and initial data.

mod config_file;

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

pub use config_file::{parse_config, ConfigFile, CONFIG_KEYS};

use crate::femesh::{interpolate, FeFunction, UniformMesh};
use crate::{Error, Result};

/// The twelve constitutive constants of the coupled cable/beam/thermal
/// system together with the span length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Cable mass density.
    pub rho: f64,
    /// Elastic modulus of the string.
    pub alpha: f64,
    /// Suspender stiffness.
    pub lambda: f64,
    /// Cable damping.
    pub mu: f64,
    /// Beam mass density.
    pub rho1: f64,
    /// Shear modulus.
    pub k_shear: f64,
    /// Beam damping.
    pub gamma: f64,
    /// Thermal coupling.
    pub beta: f64,
    /// Bending stiffness.
    pub b: f64,
    /// Thermal inertia.
    pub rho3: f64,
    /// Thermal conductivity.
    pub delta: f64,
    /// Type III dissipation.
    pub kappa: f64,
    /// Span length.
    pub length: f64,
}

impl PhysicalParams {
    /// The reference configuration used for the published figures:
    /// alpha = 6, rho1 = 2, K = 365, every other constant 1, L = 1.
    pub fn reference() -> Self {
        Self {
            rho: 1.0,
            alpha: 6.0,
            lambda: 1.0,
            mu: 1.0,
            rho1: 2.0,
            k_shear: 365.0,
            gamma: 1.0,
            beta: 1.0,
            b: 1.0,
            rho3: 1.0,
            delta: 1.0,
            kappa: 1.0,
            length: 1.0,
        }
    }

    /// `(config key, value)` pairs in declaration order.
    pub fn named_values(&self) -> [(&'static str, f64); 13] {
        [
            ("rho", self.rho),
            ("alpha", self.alpha),
            ("lambda", self.lambda),
            ("mu", self.mu),
            ("rho1", self.rho1),
            ("K", self.k_shear),
            ("gamma", self.gamma),
            ("beta", self.beta),
            ("b", self.b),
            ("rho3", self.rho3),
            ("delta", self.delta),
            ("kappa", self.kappa),
            ("L", self.length),
        ]
    }

    /// Mutable access by config key.
    pub fn field_mut(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "rho" => &mut self.rho,
            "alpha" => &mut self.alpha,
            "lambda" => &mut self.lambda,
            "mu" => &mut self.mu,
            "rho1" => &mut self.rho1,
            "K" => &mut self.k_shear,
            "gamma" => &mut self.gamma,
            "beta" => &mut self.beta,
            "b" => &mut self.b,
            "rho3" => &mut self.rho3,
            "delta" => &mut self.delta,
            "kappa" => &mut self.kappa,
            "L" => &mut self.length,
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.named_values() {
            // `!(v > 0)` also rejects NaN.
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveParameter(name));
            }
        }
        Ok(())
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::reference()
    }
}

/// Discretisation and output settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    /// Number of elements `M`.
    pub elements: usize,
    pub dt: f64,
    pub final_time: f64,
    /// Points in `(0, L)` where time series are recorded.
    pub probes: Vec<f64>,
    pub snapshot_stride: usize,
    pub output_dir: PathBuf,
}

impl SimulationConfig {
    /// `h = 0.01`, `dt = h/2`, run to `T = 10`, probe at `x = 0.6`.
    pub fn reference() -> Self {
        Self {
            elements: 100,
            dt: 0.005,
            final_time: 10.0,
            probes: vec![0.6],
            snapshot_stride: 20,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self::reference()
    }
}

/// A parameter set and configuration that passed [`validate`].
///
/// `final_time` has been snapped to `steps * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub params: PhysicalParams,
    pub config: SimulationConfig,
    pub steps: usize,
}

impl Validated {
    pub fn mesh(&self) -> UniformMesh {
        UniformMesh::new(self.params.length, self.config.elements)
            .expect("validated configuration always yields a mesh")
    }
}

/// Checks every positivity and mesh invariant.
///
/// The number of steps is `round(T / dt)`; the returned configuration has
/// `final_time = steps * dt` so the last reported time is exact. Applying
/// `validate` to an already validated pair returns it unchanged.
pub fn validate(params: PhysicalParams, config: SimulationConfig) -> Result<Validated> {
    params.validate()?;
    if config.elements < 2 {
        return Err(Error::InvalidMesh(format!(
            "M = {} (need at least 2 elements)",
            config.elements
        )));
    }
    if !(config.dt > 0.0) || !config.dt.is_finite() {
        return Err(Error::InvalidTimeStep(format!("dt = {}", config.dt)));
    }
    if !(config.final_time > 0.0) || !config.final_time.is_finite() {
        return Err(Error::InvalidTimeStep(format!("T = {}", config.final_time)));
    }
    let steps = (config.final_time / config.dt).round();
    if steps < 1.0 {
        return Err(Error::InvalidTimeStep(format!(
            "T = {} is shorter than half a step dt = {}",
            config.final_time, config.dt
        )));
    }
    let steps = steps as usize;
    if config.snapshot_stride == 0 {
        return Err(Error::Config("snapshot_stride must be at least 1".into()));
    }
    for &x in &config.probes {
        if !(x > 0.0 && x < params.length) {
            return Err(Error::InvalidProbe {
                x,
                length: params.length,
            });
        }
    }
    let mut config = config;
    config.final_time = steps as f64 * config.dt;
    Ok(Validated {
        params,
        config,
        steps,
    })
}

/// A scalar profile on `[0, L]`.
pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Wraps a closure as a [`Profile`].
pub fn profile(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Profile {
    Arc::new(f)
}

/// Initial data of the integrated (w) formulation. Every profile must vanish
/// at both ends of the span.
#[derive(Clone)]
pub struct InitialData {
    pub u0: Profile,
    pub u1: Profile,
    pub phi0: Profile,
    pub phi1: Profile,
    pub psi0: Profile,
    pub w0: Profile,
    pub w1: Profile,
}

impl fmt::Debug for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialData").finish_non_exhaustive()
    }
}

impl InitialData {
    /// Every field equal to `sin(pi x / L)`.
    pub fn reference(length: f64) -> Self {
        let s = profile(move |x| (std::f64::consts::PI * x / length).sin());
        Self {
            u0: s.clone(),
            u1: s.clone(),
            phi0: s.clone(),
            phi1: s.clone(),
            psi0: s.clone(),
            w0: s.clone(),
            w1: s,
        }
    }

    pub fn zero() -> Self {
        let z = profile(|_| 0.0);
        Self {
            u0: z.clone(),
            u1: z.clone(),
            phi0: z.clone(),
            phi1: z.clone(),
            psi0: z.clone(),
            w0: z.clone(),
            w1: z,
        }
    }

    fn profiles(&self) -> [(&'static str, &Profile); 7] {
        [
            ("u0", &self.u0),
            ("u1", &self.u1),
            ("phi0", &self.phi0),
            ("phi1", &self.phi1),
            ("psi0", &self.psi0),
            ("w0", &self.w0),
            ("w1", &self.w1),
        ]
    }

    /// Rejects data that does not vanish at `x = 0` and `x = L`.
    pub fn check_boundary(&self, length: f64, tol: f64) -> Result<()> {
        for (name, f) in self.profiles() {
            let (a, b) = (f(0.0), f(length));
            if a.abs() > tol || b.abs() > tol {
                return Err(Error::Config(format!(
                    "initial profile {name} does not vanish at the ends ({a:e}, {b:e})"
                )));
            }
        }
        Ok(())
    }

    /// Nodal interpolants in the order `u0, u1, phi0, phi1, psi0, w0, w1`.
    pub fn discretize(&self, mesh: &UniformMesh) -> [FeFunction; 7] {
        self.profiles().map(|(_, f)| interpolate(|x| f(x), mesh))
    }
}

/// Temperature data `theta(x, 0)` and `theta_t(x, 0)`.
#[derive(Clone)]
pub struct ThermalData {
    pub theta0: Profile,
    pub theta1: Profile,
}

impl fmt::Debug for ThermalData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ThermalData").finish_non_exhaustive()
    }
}

impl ThermalData {
    pub fn check_boundary(&self, length: f64, tol: f64) -> Result<()> {
        for (name, f) in [("theta0", &self.theta0), ("theta1", &self.theta1)] {
            if f(0.0).abs() > tol || f(length).abs() > tol {
                return Err(Error::Config(format!(
                    "thermal profile {name} does not vanish at the ends"
                )));
            }
        }
        Ok(())
    }
}
