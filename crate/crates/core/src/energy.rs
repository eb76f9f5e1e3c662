//! Discrete energy, monotone-decay checks and exponential decay fits.

use crate::femesh::{FeMatrices, UniformMesh};
use crate::model::PhysicalParams;
use crate::stepper::{Observer, State};
use crate::{Error, Result};

/// Evaluates
///
/// ```text
/// E = 1/2 ( rho |xi|^2 + alpha |u_x|^2 + lambda |phi - u|^2 + rho1 |Phi|^2
///         + K |phi_x + psi|^2 + b |psi_x|^2 + rho3 |vartheta|^2 + delta |w_x|^2 )
/// ```
///
/// exactly through the mass, stiffness and gradient matrices.
#[derive(Debug, Clone)]
pub struct EnergyFunctional {
    params: PhysicalParams,
    mats: FeMatrices,
}

impl EnergyFunctional {
    pub fn new(params: PhysicalParams, mesh: &UniformMesh) -> Self {
        Self {
            params,
            mats: FeMatrices::new(mesh),
        }
    }

    pub fn evaluate(&self, s: &State) -> f64 {
        let p = &self.params;
        let (m, st, g) = (&self.mats.mass, &self.mats.stiffness, &self.mats.gradient);
        let mq = |v: &[f64]| m.form(v, v);
        let sq = |v: &[f64]| st.form(v, v);
        let stretch = &s.phi - &s.u;
        let (phi, psi) = (s.phi.as_slice(), s.psi.as_slice());
        // |phi_x + psi|^2 = phi^T S phi + 2 psi^T G phi + psi^T M psi
        let shear = sq(phi) + 2.0 * g.form(psi, phi) + mq(psi);
        0.5 * (p.rho * mq(s.xi.as_slice())
            + p.alpha * sq(s.u.as_slice())
            + p.lambda * mq(stretch.as_slice())
            + p.rho1 * mq(s.phi_t.as_slice())
            + p.k_shear * shear
            + p.b * sq(psi)
            + p.rho3 * mq(s.vartheta.as_slice())
            + p.delta * sq(s.w.as_slice()))
    }
}

pub fn discrete_energy(s: &State, mesh: &UniformMesh, params: &PhysicalParams) -> f64 {
    EnergyFunctional::new(*params, mesh).evaluate(s)
}

/// `(t_n, E^n)` samples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergySeries {
    pub steps: Vec<usize>,
    pub t: Vec<f64>,
    pub e: Vec<f64>,
}

impl EnergySeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, step: usize, t: f64, e: f64) {
        self.steps.push(step);
        self.t.push(t);
        self.e.push(e);
    }

    /// Builds a series with step indices `0, 1, ...`.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut s = Self::new();
        for (k, (t, e)) in pairs.into_iter().enumerate() {
            s.push(k, t, e);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `-log(E^n) / t_n`; `None` at `t = 0` or where `E <= 0`.
    pub fn neg_log_over_t(&self) -> Vec<Option<f64>> {
        self.t
            .iter()
            .zip(&self.e)
            .map(|(&t, &e)| (t > 0.0 && e > 0.0).then(|| -e.ln() / t))
            .collect()
    }
}

/// Records the energy of every time level.
#[derive(Debug, Clone)]
pub struct EnergyRecorder {
    functional: EnergyFunctional,
    pub series: EnergySeries,
}

impl EnergyRecorder {
    pub fn new(params: PhysicalParams, mesh: &UniformMesh) -> Self {
        Self {
            functional: EnergyFunctional::new(params, mesh),
            series: EnergySeries::new(),
        }
    }
}

impl Observer for EnergyRecorder {
    fn observe(&mut self, state: &State, _last: bool) -> Result<()> {
        self.series
            .push(state.n, state.t, self.functional.evaluate(state));
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    pub tol_rel: f64,
    /// Indices `n` (into the series) with `E^n > E^{n-1} (1 + tol_rel)`.
    pub violations: Vec<usize>,
}

impl MonotoneReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_monotone(series: &EnergySeries, tol_rel: f64) -> MonotoneReport {
    let violations = series
        .e
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0] * (1.0 + tol_rel))
        .map(|(k, _)| k + 1)
        .collect();
    MonotoneReport {
        tol_rel,
        violations,
    }
}

/// Least-squares fit `log E ~ log sigma0 - sigma1 t` over a time window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySummary {
    pub sigma1_hat: f64,
    pub sigma0_hat: f64,
    pub fit_window: (f64, f64),
    /// `max |log E_n - fit(t_n)| / |log E_n|` over the window.
    pub fit_residual: f64,
    /// `max |log E_n - fit(t_n)|`, i.e. the worst multiplicative
    /// deviation of `E` from the fitted exponential, in log units.
    pub max_log_deviation: f64,
    pub samples: usize,
}

/// Fits an exponential to the samples with `t` in the closed window.
pub fn fit_decay(series: &EnergySeries, window: (f64, f64)) -> Result<DecaySummary> {
    let (t0, t1) = window;
    let pts: Vec<(f64, f64)> = series
        .t
        .iter()
        .zip(&series.e)
        .filter(|(&t, _)| t >= t0 && t <= t1)
        .map(|(&t, &e)| (t, e))
        .collect();
    if pts.len() < 3 {
        return Err(Error::DegenerateWindow { samples: pts.len() });
    }
    if let Some(&(t, e)) = pts.iter().find(|(_, e)| !(*e > 0.0)) {
        return Err(Error::Config(format!(
            "energy must be positive on the fit window (E = {e} at t = {t})"
        )));
    }
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut sty, mut stt) = (0.0, 0.0);
    for &(t, e) in &pts {
        let dt = t - mean_t;
        sty += dt * (e.ln() - mean_y);
        stt += dt * dt;
    }
    let slope = sty / stt;
    let intercept = mean_y - slope * mean_t;
    let (mut fit_residual, mut max_log_deviation) = (0.0f64, 0.0f64);
    for &(t, e) in &pts {
        let dev = (e.ln() - intercept - slope * t).abs();
        max_log_deviation = max_log_deviation.max(dev);
        fit_residual = fit_residual.max(if dev == 0.0 { 0.0 } else { dev / e.ln().abs() });
    }
    Ok(DecaySummary {
        sigma1_hat: -slope,
        sigma0_hat: intercept.exp(),
        fit_window: window,
        fit_residual,
        max_log_deviation,
        samples: pts.len(),
    })
}

/// `[T/2, T]` for a series ending at `T`.
pub fn default_window(series: &EnergySeries) -> (f64, f64) {
    let end = series.t.last().copied().unwrap_or(0.0);
    (0.5 * end, end)
}
