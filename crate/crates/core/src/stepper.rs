//! Implicit Euler time stepping of the P1 discretisation.
//!
//! Each step solves for the velocities `xi = u_t`, `Phi = phi_t`,
//! `vartheta = w_t` and the rotation `psi` at the new level, with the
//! displacements eliminated through `u^n = u^{n-1} + dt xi^n` (likewise
//! for `phi` and `w`). With `M`, `S`, `G` the mass, stiffness and gradient
//! matrices, the block rows are
//!
//! ```text
//! [(rho/dt + lambda dt + mu) M + alpha dt S] xi - lambda dt M Phi
//!     = F1 + rho/dt M xi' - alpha S u' + lambda M (phi' - u')
//! -lambda dt M xi + [(rho1/dt + lambda dt + gamma) M + K dt S] Phi - K G psi + beta G vartheta
//!     = F2 + rho1/dt M Phi' - K S phi' - lambda M (phi' - u')
//! K dt G Phi + (b S + K M) psi
//!     = F3 - K G phi'
//! beta G Phi + [rho3/dt M + (delta dt + kappa) S] vartheta
//!     = F4 + rho3/dt M vartheta' - delta S w'
//! ```
//!
//! where primes denote the previous level and `F_k = (f_k(t_n), v)`.
//! Unknowns are interleaved per node (`xi_i, Phi_i, psi_i, vartheta_i`), so
//! the matrix has 6 sub- and 6 super-diagonals (the widest coupling is
//! `Phi_i` to `vartheta_{i+1}`). It depends only on the
//! parameters, the mesh and `dt`, and is factorised once.

use crate::banded::{BandLu, BandMatrix};
use crate::femesh::{load_vectors, FeFunction, FeMatrices, TriDiag, UniformMesh};
use crate::model::{InitialData, PhysicalParams, Validated};
use crate::{Error, Result};

/// Unknowns per interior node.
pub const FIELDS: usize = 4;

/// Half-bandwidth of the interleaved block system.
pub const HALF_BANDWIDTH: usize = 6;

/// Relative residual accepted from a linear solve.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Block rows/columns of the step system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    /// Cable velocity `xi = u_t`.
    Xi = 0,
    /// Deck velocity `Phi = phi_t`.
    PhiT = 1,
    /// Rotation `psi`.
    Psi = 2,
    /// Thermal velocity `vartheta = w_t`.
    Vartheta = 3,
}

#[inline]
fn dof(node: usize, field: usize) -> usize {
    FIELDS * node + field
}

/// The seven discrete fields at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: FeFunction,
    pub phi: FeFunction,
    pub psi: FeFunction,
    pub w: FeFunction,
    pub xi: FeFunction,
    pub phi_t: FeFunction,
    pub vartheta: FeFunction,
    pub t: f64,
    pub n: usize,
}

impl State {
    pub fn zeros(dim: usize) -> Self {
        let z = FeFunction::zeros(dim);
        Self {
            u: z.clone(),
            phi: z.clone(),
            psi: z.clone(),
            w: z.clone(),
            xi: z.clone(),
            phi_t: z.clone(),
            vartheta: z,
            t: 0.0,
            n: 0,
        }
    }

    /// Interpolated initial data at `t = 0`.
    pub fn from_initial(init: &InitialData, mesh: &UniformMesh) -> Self {
        let [u, xi, phi, phi_t, psi, w, vartheta] = init.discretize(mesh);
        Self {
            u,
            phi,
            psi,
            w,
            xi,
            phi_t,
            vartheta,
            t: 0.0,
            n: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// Temperature `theta = w_t`.
    pub fn theta(&self) -> &FeFunction {
        &self.vartheta
    }

    /// Difference quotient `(psi^n - psi^{n-1}) / dt`.
    pub fn psi_rate(&self, previous: &State, dt: f64) -> FeFunction {
        (&self.psi - &previous.psi).scale(1.0 / dt)
    }

    fn fields(&self) -> [&FeFunction; 7] {
        [
            &self.u,
            &self.phi,
            &self.psi,
            &self.w,
            &self.xi,
            &self.phi_t,
            &self.vartheta,
        ]
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            u: self.u.scale(factor),
            phi: self.phi.scale(factor),
            psi: self.psi.scale(factor),
            w: self.w.scale(factor),
            xi: self.xi.scale(factor),
            phi_t: self.phi_t.scale(factor),
            vartheta: self.vartheta.scale(factor),
            t: self.t,
            n: self.n,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.fields()
            .iter()
            .all(|f| f.as_slice().iter().all(|v| v.is_finite()))
    }
}

/// Right-hand sides `f_1 .. f_4` of a forced problem.
pub trait SourceTerms: Sync {
    fn sources(&self, x: f64, t: f64) -> [f64; 4];
}

/// Load vectors `(f_k(., t), v)` for all four equations.
pub fn assemble_loads(sources: &dyn SourceTerms, mesh: &UniformMesh, t: f64) -> [Vec<f64>; 4] {
    load_vectors(|x| sources.sources(x, t), mesh)
}

/// Factorised implicit Euler step matrix for fixed parameters, mesh and `dt`.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    params: PhysicalParams,
    mats: FeMatrices,
    dt: f64,
    matrix: BandMatrix,
    matrix_norm: f64,
    lu: BandLu,
}

impl BlockSystem {
    pub fn assemble(params: PhysicalParams, mesh: &UniformMesh, dt: f64) -> Result<Self> {
        params.validate()?;
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidTimeStep(format!("dt = {dt}")));
        }
        let mats = FeMatrices::new(mesh);
        let p = &params;
        let (m, s, g) = (&mats.mass, &mats.stiffness, &mats.gradient);
        let gt = g.transpose();

        use Field::*;
        let blocks: [(Field, Field, TriDiag); 10] = [
            (
                Xi,
                Xi,
                TriDiag::combine(&[(p.rho / dt + p.lambda * dt + p.mu, m), (p.alpha * dt, s)]),
            ),
            (Xi, PhiT, m.scaled(-p.lambda * dt)),
            (PhiT, Xi, m.scaled(-p.lambda * dt)),
            (
                PhiT,
                PhiT,
                TriDiag::combine(&[
                    (p.rho1 / dt + p.lambda * dt + p.gamma, m),
                    (p.k_shear * dt, s),
                ]),
            ),
            (PhiT, Psi, gt.scaled(p.k_shear)),
            (PhiT, Vartheta, g.scaled(p.beta)),
            (Psi, PhiT, g.scaled(p.k_shear * dt)),
            (Psi, Psi, TriDiag::combine(&[(p.b, s), (p.k_shear, m)])),
            (Vartheta, PhiT, g.scaled(p.beta)),
            (
                Vartheta,
                Vartheta,
                TriDiag::combine(&[(p.rho3 / dt, m), (p.delta * dt + p.kappa, s)]),
            ),
        ];

        let nodes = mesh.interior_nodes();
        let mut matrix = BandMatrix::zeros(FIELDS * nodes, HALF_BANDWIDTH, HALF_BANDWIDTH);
        for (row, col, block) in &blocks {
            for i in 0..nodes {
                for j in i.saturating_sub(1)..=(i + 1).min(nodes - 1) {
                    let v = block.get(i, j);
                    if v != 0.0 {
                        matrix.add(dof(i, *row as usize), dof(j, *col as usize), v);
                    }
                }
            }
        }
        let matrix_norm = matrix.norm_inf();
        let lu = matrix.factorize()?;
        Ok(Self {
            params,
            mats,
            dt,
            matrix,
            matrix_norm,
            lu,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn mesh(&self) -> &UniformMesh {
        &self.mats.mesh
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn matrices(&self) -> &FeMatrices {
        &self.mats
    }

    /// The assembled (unfactorised) step matrix.
    pub fn matrix(&self) -> &BandMatrix {
        &self.matrix
    }

    /// Coefficient of unknown `col` at node `j` in equation `row` tested
    /// against the hat function of node `i`.
    pub fn entry(&self, row: Field, i: usize, col: Field, j: usize) -> f64 {
        self.matrix.get(dof(i, row as usize), dof(j, col as usize))
    }

    /// Interleaved right-hand side for a step from `s`.
    pub fn rhs(&self, s: &State, loads: Option<&[Vec<f64>; 4]>) -> Vec<f64> {
        let p = &self.params;
        let dt = self.dt;
        let n = s.dim();
        let (m, st, g) = (&self.mats.mass, &self.mats.stiffness, &self.mats.gradient);
        let mut r: [Vec<f64>; 4] = match loads {
            Some(l) => l.clone(),
            None => std::array::from_fn(|_| vec![0.0; n]),
        };
        let stretch = &s.phi - &s.u;

        m.mul_add(p.rho / dt, s.xi.as_slice(), &mut r[0]);
        st.mul_add(-p.alpha, s.u.as_slice(), &mut r[0]);
        m.mul_add(p.lambda, stretch.as_slice(), &mut r[0]);

        m.mul_add(p.rho1 / dt, s.phi_t.as_slice(), &mut r[1]);
        st.mul_add(-p.k_shear, s.phi.as_slice(), &mut r[1]);
        m.mul_add(-p.lambda, stretch.as_slice(), &mut r[1]);

        g.mul_add(-p.k_shear, s.phi.as_slice(), &mut r[2]);

        m.mul_add(p.rho3 / dt, s.vartheta.as_slice(), &mut r[3]);
        st.mul_add(-p.delta, s.w.as_slice(), &mut r[3]);

        let mut out = vec![0.0; FIELDS * n];
        for (f, rf) in r.iter().enumerate() {
            for (i, v) in rf.iter().enumerate() {
                out[dof(i, f)] = *v;
            }
        }
        out
    }

    /// One implicit Euler step. `loads` must be evaluated at `s.t + dt`.
    pub fn advance(&self, s: &State, loads: Option<&[Vec<f64>; 4]>) -> Result<State> {
        let n = s.dim();
        assert_eq!(n, self.mats.mesh.interior_nodes(), "state does not match mesh");
        let b = self.rhs(s, loads);
        let mut x = b.clone();
        self.lu.solve_in_place(&mut x);

        let ax = self.matrix.mul(&x);
        let resid = ax.iter().zip(&b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        let bnorm = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let xnorm = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = bnorm.max(self.matrix_norm * xnorm);
        let rel = if scale > 0.0 { resid / scale } else { resid };
        if !(rel <= RESIDUAL_TOL) {
            return Err(Error::SolverFailure {
                residual: rel,
                tolerance: RESIDUAL_TOL,
            });
        }

        let split = |f: Field| FeFunction::from_vec((0..n).map(|i| x[dof(i, f as usize)]).collect());
        let xi = split(Field::Xi);
        let phi_t = split(Field::PhiT);
        let psi = split(Field::Psi);
        let vartheta = split(Field::Vartheta);
        let dt = self.dt;
        Ok(State {
            u: s.u.axpy(dt, &xi),
            phi: s.phi.axpy(dt, &phi_t),
            w: s.w.axpy(dt, &vartheta),
            psi,
            xi,
            phi_t,
            vartheta,
            n: s.n + 1,
            t: (s.n + 1) as f64 * dt,
        })
    }

    /// Step with optional forcing evaluated at the new time level.
    pub fn step(&self, s: &State, sources: Option<&dyn SourceTerms>) -> Result<State> {
        let loads = sources.map(|f| assemble_loads(f, self.mesh(), (s.n + 1) as f64 * self.dt));
        self.advance(s, loads.as_ref())
    }
}

/// Receives every time level of a run, starting with the initial state.
pub trait Observer {
    /// `last` is true for the final level.
    fn observe(&mut self, state: &State, last: bool) -> Result<()>;
}

/// Runs `steps` implicit Euler steps from the interpolated initial data.
pub fn run(
    setup: &Validated,
    init: &InitialData,
    sources: Option<&dyn SourceTerms>,
    observers: &mut [&mut dyn Observer],
) -> Result<State> {
    let mesh = setup.mesh();
    let system = BlockSystem::assemble(setup.params, &mesh, setup.config.dt)?;
    run_with(&system, State::from_initial(init, &mesh), setup.steps, sources, observers)
}

/// Runs `steps` steps of a prepared system from `state`.
pub fn run_with(
    system: &BlockSystem,
    mut state: State,
    steps: usize,
    sources: Option<&dyn SourceTerms>,
    observers: &mut [&mut dyn Observer],
) -> Result<State> {
    for o in observers.iter_mut() {
        o.observe(&state, steps == 0)?;
    }
    for k in 1..=steps {
        state = system.step(&state, sources).map_err(|e| Error::Step {
            step: state.n + 1,
            source: Box::new(e),
        })?;
        for o in observers.iter_mut() {
            o.observe(&state, k == steps)
                .map_err(|e| Error::Step {
                    step: state.n,
                    source: Box::new(e),
                })?;
        }
    }
    Ok(state)
}
