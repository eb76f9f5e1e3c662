//! Manufactured-solution verification.
//!
//! The exact solution is
//!
//! ```text
//! u   = 0.01 t x^2 (x - 1)^2
//! phi = e^t sin(pi x)
//! psi = e^t x cos(pi x / 2)
//! w   = 2 e^t sin(pi x)
//! ```
//!
//! on `L = 1`. Substituting it into the four equations gives the forcing
//!
//! ```text
//! f1 = rho u_tt - alpha u_xx - lambda (phi - u) + mu u_t
//! f2 = rho1 phi_tt - K (phi_x + psi)_x + lambda (phi - u) + gamma phi_t + beta w_xt
//! f3 = -b psi_xx + K (phi_x + psi)
//! f4 = rho3 w_tt - delta w_xx + beta phi_xt - kappa w_xxt
//! ```
//!
//! With `g(x) = x^2 (x - 1)^2`, `g'' = 12x^2 - 12x + 2`, and
//! `q(x) = x cos(pi x / 2)`, `q' = cos(pi x/2) - (pi/2) x sin(pi x/2)`,
//! `q'' = -pi sin(pi x/2) - (pi^2/4) x cos(pi x/2)`, these expand to the
//! closed forms in [`ManufacturedCase::sources`].

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::femesh::{interpolate, quadrature_l2, UniformMesh};
use crate::model::{profile, InitialData, PhysicalParams};
use crate::stepper::{run_with, BlockSystem, SourceTerms, State};
use crate::{Error, Result};

/// Exact fields and the derivatives entering the error norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactFields {
    pub u: f64,
    pub u_t: f64,
    pub u_x: f64,
    pub phi: f64,
    pub phi_t: f64,
    pub phi_x: f64,
    pub psi: f64,
    pub psi_x: f64,
    pub w: f64,
    pub w_t: f64,
    pub w_x: f64,
}

/// The manufactured case with closed-form sources for given parameters.
///
/// The exact solution only satisfies the boundary conditions for `L = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedCase {
    pub params: PhysicalParams,
}

fn g(x: f64) -> f64 {
    x * x * (x - 1.0) * (x - 1.0)
}

fn dg(x: f64) -> f64 {
    2.0 * x * (x - 1.0) * (2.0 * x - 1.0)
}

fn d2g(x: f64) -> f64 {
    12.0 * x * x - 12.0 * x + 2.0
}

fn q(x: f64) -> f64 {
    x * (0.5 * PI * x).cos()
}

fn dq(x: f64) -> f64 {
    (0.5 * PI * x).cos() - 0.5 * PI * x * (0.5 * PI * x).sin()
}

fn d2q(x: f64) -> f64 {
    -PI * (0.5 * PI * x).sin() - 0.25 * PI * PI * x * (0.5 * PI * x).cos()
}

impl ManufacturedCase {
    pub fn reference(params: PhysicalParams) -> Self {
        Self { params }
    }

    pub fn fields(&self, x: f64, t: f64) -> ExactFields {
        let et = t.exp();
        let (s, c) = (PI * x).sin_cos();
        ExactFields {
            u: 0.01 * t * g(x),
            u_t: 0.01 * g(x),
            u_x: 0.01 * t * dg(x),
            phi: et * s,
            phi_t: et * s,
            phi_x: PI * et * c,
            psi: et * q(x),
            psi_x: et * dq(x),
            w: 2.0 * et * s,
            w_t: 2.0 * et * s,
            w_x: 2.0 * PI * et * c,
        }
    }

    /// Initial data read off the exact solution at `t = 0`.
    pub fn initial_data(&self) -> InitialData {
        let case = *self;
        let at0 = move |pick: fn(&ExactFields) -> f64| profile(move |x| pick(&case.fields(x, 0.0)));
        InitialData {
            u0: at0(|f| f.u),
            u1: at0(|f| f.u_t),
            phi0: at0(|f| f.phi),
            phi1: at0(|f| f.phi_t),
            psi0: at0(|f| f.psi),
            w0: at0(|f| f.w),
            w1: at0(|f| f.w_t),
        }
    }

    /// Nodal interpolant of the exact solution at time `t`.
    pub fn interpolated_state(&self, mesh: &UniformMesh, t: f64) -> State {
        let pick = |f: fn(&ExactFields) -> f64| interpolate(|x| f(&self.fields(x, t)), mesh);
        State {
            u: pick(|f| f.u),
            phi: pick(|f| f.phi),
            psi: pick(|f| f.psi),
            w: pick(|f| f.w),
            xi: pick(|f| f.u_t),
            phi_t: pick(|f| f.phi_t),
            vartheta: pick(|f| f.w_t),
            t,
            n: 0,
        }
    }
}

impl SourceTerms for ManufacturedCase {
    fn sources(&self, x: f64, t: f64) -> [f64; 4] {
        let p = &self.params;
        let et = t.exp();
        let (s, c) = (PI * x).sin_cos();
        let pi2 = PI * PI;
        let u = 0.01 * t * g(x);
        let stretch = et * s - u;
        let f1 = -p.alpha * 0.01 * t * d2g(x) - p.lambda * stretch + p.mu * 0.01 * g(x);
        let f2 = p.rho1 * et * s - p.k_shear * (-pi2 * et * s + et * dq(x))
            + p.lambda * stretch
            + p.gamma * et * s
            + p.beta * 2.0 * PI * et * c;
        let f3 = -p.b * et * d2q(x) + p.k_shear * (PI * et * c + et * q(x));
        let f4 = p.rho3 * 2.0 * et * s + p.delta * 2.0 * pi2 * et * s + p.beta * PI * et * c
            + p.kappa * 2.0 * pi2 * et * s;
        [f1, f2, f3, f4]
    }
}

/// Composite error at time `t`:
///
/// ```text
/// ( |xi - u_t|^2 + |u_hx - u_x|^2 + |(phi_h - u_h) - (phi - u)|^2 + |Phi - phi_t|^2
///   + |(phi_hx + psi_h) - (phi_x + psi)|^2 + |psi_hx - psi_x|^2
///   + |vartheta - w_t|^2 + |w_hx - w_x|^2 )^(1/2)
/// ```
///
/// each term integrated with three-point Gauss on every element.
pub fn error_norm(s: &State, case: &ManufacturedCase, mesh: &UniformMesh, t: f64) -> f64 {
    let h = mesh.h();
    let value = |v: &crate::femesh::FeFunction, e: usize, sl: f64| {
        let (a, b) = v.element_ends(e);
        a + (b - a) * sl
    };
    let slope = |v: &crate::femesh::FeFunction, e: usize| {
        let (a, b) = v.element_ends(e);
        (b - a) / h
    };
    let terms: [f64; 8] = [
        quadrature_l2(mesh, |x, e, sl| value(&s.xi, e, sl) - case.fields(x, t).u_t),
        quadrature_l2(mesh, |x, e, _| slope(&s.u, e) - case.fields(x, t).u_x),
        quadrature_l2(mesh, |x, e, sl| {
            let f = case.fields(x, t);
            (value(&s.phi, e, sl) - value(&s.u, e, sl)) - (f.phi - f.u)
        }),
        quadrature_l2(mesh, |x, e, sl| value(&s.phi_t, e, sl) - case.fields(x, t).phi_t),
        quadrature_l2(mesh, |x, e, sl| {
            let f = case.fields(x, t);
            (slope(&s.phi, e) + value(&s.psi, e, sl)) - (f.phi_x + f.psi)
        }),
        quadrature_l2(mesh, |x, e, _| slope(&s.psi, e) - case.fields(x, t).psi_x),
        quadrature_l2(mesh, |x, e, sl| value(&s.vartheta, e, sl) - case.fields(x, t).w_t),
        quadrature_l2(mesh, |x, e, _| slope(&s.w, e) - case.fields(x, t).w_x),
    ];
    terms.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// One refinement level `(M, dt)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub elements: usize,
    pub dt: f64,
}

impl Level {
    /// `dt = c / M`.
    pub fn with_dt_rule(elements: usize, c: f64) -> Self {
        Self {
            elements,
            dt: c / elements as f64,
        }
    }

    pub fn h(&self, length: f64) -> f64 {
        length / self.elements as f64
    }
}

/// The six published levels, `M = 40 .. 1280` with `dt = 0.04 / M`.
pub fn reference_levels() -> Vec<Level> {
    [40, 80, 160, 320, 640, 1280]
        .into_iter()
        .map(|m| Level::with_dt_rule(m, 0.04))
        .collect()
}

/// Published errors at `T = 1.2` for [`reference_levels`].
pub const REFERENCE_ERRORS: [f64; 6] = [4.164e-1, 1.949e-1, 9.567e-2, 4.770e-2, 2.402e-2, 1.241e-2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub elements: usize,
    pub dt: f64,
    pub h: f64,
    pub error: f64,
    /// Previous error over this error.
    pub ratio: Option<f64>,
    /// `log2(ratio)`.
    pub observed_order: Option<f64>,
}

/// Runs the forced problem to `final_time` on one level and returns the
/// composite error there.
pub fn level_error(case: &ManufacturedCase, level: Level, final_time: f64) -> Result<f64> {
    let mesh = UniformMesh::new(case.params.length, level.elements)?;
    let steps = (final_time / level.dt).round();
    if !(steps >= 1.0) {
        return Err(Error::InvalidTimeStep(format!(
            "T = {final_time} with dt = {}",
            level.dt
        )));
    }
    let system = BlockSystem::assemble(case.params, &mesh, level.dt)?;
    let state0 = case.interpolated_state(&mesh, 0.0);
    let end = run_with(&system, state0, steps as usize, Some(case), &mut [])?;
    Ok(error_norm(&end, case, &mesh, end.t))
}

/// Convergence table over `levels` (sorted by increasing `M`), running at
/// most `jobs` levels concurrently. `jobs = 0` uses every available core.
pub fn convergence_table(
    case: &ManufacturedCase,
    levels: &[Level],
    final_time: f64,
    jobs: usize,
) -> Result<Vec<ConvergenceRow>> {
    if levels.windows(2).any(|w| w[1].elements < w[0].elements) {
        return Err(Error::Config("levels must be sorted by increasing M".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    // Largest levels first so the long jobs start immediately.
    let mut order: Vec<usize> = (0..levels.len()).collect();
    order.sort_by_key(|&k| std::cmp::Reverse(levels[k].elements));
    let mut errors: Vec<(usize, Result<f64>)> = pool.install(|| {
        order
            .par_iter()
            .map(|&k| (k, level_error(case, levels[k], final_time)))
            .collect()
    });
    errors.sort_by_key(|(k, _)| *k);

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels.len());
    for (k, err) in errors {
        let level = levels[k];
        let error = err.map_err(|e| Error::Level {
            elements: level.elements,
            source: Box::new(e),
        })?;
        let ratio = rows.last().map(|prev| prev.error / error);
        rows.push(ConvergenceRow {
            elements: level.elements,
            dt: level.dt,
            h: level.h(case.params.length),
            error,
            ratio,
            observed_order: ratio.map(f64::log2),
        });
    }
    Ok(rows)
}

/// Least-squares slope of `log(error)` against `log(h + dt)`.
pub fn observed_slope(rows: &[ConvergenceRow]) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.h + r.dt).ln(), r.error.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
