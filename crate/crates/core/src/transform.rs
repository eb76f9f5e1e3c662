//! Converts temperature initial data into data for the integrated thermal
//! variable `w(x, t) = int_0^t theta ds + eta(x)`.
//!
//! `eta` solves `delta eta'' = rho3 theta1 - kappa theta0'' + beta phi1'`
//! with `eta = 0` at both ends. In weak form, for every test function `v`,
//!
//! ```text
//! delta (eta', v') = -rho3 (theta1, v) - kappa (theta0', v') + beta (phi1, v')
//! ```

use crate::femesh::{
    build_stiffness, derivative_load_vector, interpolate, load_vector, quadrature_l2, FeFunction,
    UniformMesh,
};
use crate::model::{profile, InitialData, PhysicalParams, Profile, ThermalData};
use crate::Result;

/// Data of the auxiliary elliptic problem for `eta`.
#[derive(Clone)]
pub struct EtaProblem {
    pub theta0: Profile,
    pub theta1: Profile,
    pub phi1: Profile,
    pub params: PhysicalParams,
}

impl std::fmt::Debug for EtaProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EtaProblem")
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl EtaProblem {
    pub fn new(thermal: &ThermalData, phi1: Profile, params: PhysicalParams) -> Self {
        Self {
            theta0: thermal.theta0.clone(),
            theta1: thermal.theta1.clone(),
            phi1,
            params,
        }
    }
}

/// P1 Galerkin solution for `eta`.
///
/// `(theta0', v')` is assembled from the nodal interpolant of `theta0`,
/// which is exact for P1 test functions in 1D; the other two terms use
/// three-point Gauss quadrature of the given profiles.
pub fn solve_eta(problem: &EtaProblem, mesh: &UniformMesh) -> Result<FeFunction> {
    let p = &problem.params;
    let stiffness = build_stiffness(mesh);
    let theta0 = interpolate(|x| (problem.theta0)(x), mesh);
    let mut rhs = load_vector(|x| (problem.theta1)(x), mesh);
    for r in rhs.iter_mut() {
        *r *= -p.rho3;
    }
    stiffness.mul_add(-p.kappa, theta0.as_slice(), &mut rhs);
    let phi1 = derivative_load_vector(|x| (problem.phi1)(x), mesh);
    for (r, q) in rhs.iter_mut().zip(&phi1) {
        *r += p.beta * q;
    }
    let eta = stiffness.scaled(p.delta).solve(&rhs)?;
    Ok(FeFunction::from_vec(eta))
}

/// `w(x, 0) = eta` and `w_t(x, 0) = theta(x, 0)`.
pub fn w_initial_data(theta0: &FeFunction, eta: FeFunction) -> (FeFunction, FeFunction) {
    (eta, theta0.clone())
}

/// Builds integrated-formulation initial data from mechanical profiles and
/// temperature data. `w0` is the piecewise-linear `eta` on `mesh`, so it
/// is only exact when later discretised on the same mesh.
pub fn initial_data_from_thermal(
    mechanical: &InitialData,
    thermal: &ThermalData,
    params: PhysicalParams,
    mesh: &UniformMesh,
) -> Result<InitialData> {
    let problem = EtaProblem::new(thermal, mechanical.phi1.clone(), params);
    let eta = solve_eta(&problem, mesh)?;
    let mesh = *mesh;
    let mut out = mechanical.clone();
    out.w0 = profile(move |x| eta.eval(&mesh, x));
    out.w1 = thermal.theta0.clone();
    Ok(out)
}

/// L2 error of the computed `eta` against `exact`, by three-point Gauss.
pub fn eta_error(eta: &FeFunction, exact: impl Fn(f64) -> f64, mesh: &UniformMesh) -> f64 {
    quadrature_l2(mesh, |x, e, s| {
        let (a, b) = eta.element_ends(e);
        a + (b - a) * s - exact(x)
    })
}

/// The manufactured problem with exact solution `eta = sin(pi x / L)`:
/// `theta1 = -(delta / rho3) (pi / L)^2 sin(pi x / L)`, other data zero.
pub fn sine_eta_problem(params: PhysicalParams) -> EtaProblem {
    let k = std::f64::consts::PI / params.length;
    let c = -(params.delta / params.rho3) * k * k;
    EtaProblem {
        theta0: profile(|_| 0.0),
        theta1: profile(move |x| c * (k * x).sin()),
        phi1: profile(|_| 0.0),
        params,
    }
}

/// `(M, L2 error)` of the sine manufactured case for each mesh size.
pub fn eta_convergence(params: PhysicalParams, levels: &[usize]) -> Result<Vec<(usize, f64)>> {
    let problem = sine_eta_problem(params);
    let k = std::f64::consts::PI / params.length;
    levels
        .iter()
        .map(|&m| {
            let mesh = UniformMesh::new(params.length, m)?;
            let eta = solve_eta(&problem, &mesh)?;
            Ok((m, eta_error(&eta, |x| (k * x).sin(), &mesh)))
        })
        .collect()
}
