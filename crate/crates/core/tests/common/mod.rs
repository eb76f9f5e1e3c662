//! Independent oracles shared by the integration tests. Nothing here calls
//! into the assembly or quadrature code under test.

#![allow(dead_code)]

use std::f64::consts::PI;

use shearbeam::femesh::UniformMesh;

/// Five-point Gauss-Legendre on `[-1, 1]`.
const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Composite 5-point Gauss over `[0, L]` with `sub` panels per element.
pub fn integrate(mesh: &UniformMesh, sub: usize, f: impl Fn(f64) -> f64) -> f64 {
    let panels = mesh.elements() * sub;
    let w = mesh.length() / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = (p as f64 + 0.5) * w;
            GL5.iter()
                .map(|&(s, wt)| wt * 0.5 * w * f(mid + 0.5 * w * s))
                .sum::<f64>()
        })
        .sum()
}

/// Hat function of global node `k`.
pub fn hat(mesh: &UniformMesh, k: usize, x: f64) -> f64 {
    let h = mesh.length() / mesh.elements() as f64;
    let xk = k as f64 * h;
    (1.0 - (x - xk).abs() / h).max(0.0)
}

pub fn hat_dx(mesh: &UniformMesh, k: usize, x: f64) -> f64 {
    let h = mesh.length() / mesh.elements() as f64;
    let xk = k as f64 * h;
    if x > xk - h && x < xk {
        1.0 / h
    } else if x > xk && x < xk + h {
        -1.0 / h
    } else {
        0.0
    }
}

pub type Dense = Vec<Vec<f64>>;

/// Dense interior matrix `A[i][j] = int test(i) trial(j)` over interior
/// nodes `i, j` (global nodes `i + 1, j + 1`).
pub fn oracle_matrix(
    mesh: &UniformMesh,
    test: fn(&UniformMesh, usize, f64) -> f64,
    trial: fn(&UniformMesh, usize, f64) -> f64,
) -> Dense {
    let n = mesh.elements() - 1;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| integrate(mesh, 8, |x| test(mesh, i + 1, x) * trial(mesh, j + 1, x)))
                .collect()
        })
        .collect()
}

pub fn oracle_mass(mesh: &UniformMesh) -> Dense {
    oracle_matrix(mesh, hat, hat)
}

pub fn oracle_stiffness(mesh: &UniformMesh) -> Dense {
    oracle_matrix(mesh, hat_dx, hat_dx)
}

/// Entry `(i, j) = (phi_j', phi_i)`.
pub fn oracle_gradient(mesh: &UniformMesh) -> Dense {
    oracle_matrix(mesh, hat, hat_dx)
}

pub fn matvec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

pub fn transpose(a: &Dense) -> Dense {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Dense, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for r in k + 1..n {
            let l = a[r][k] / a[k][k];
            for c in k..n {
                a[r][c] -= l * a[k][c];
            }
            b[r] -= l * b[k];
        }
    }
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * b[j]).sum();
        b[i] = (b[i] - s) / a[i][i];
    }
    b
}

/// The manufactured solution, written out independently of the library.
pub mod exact {
    use super::PI;

    pub fn u(x: f64, t: f64) -> f64 {
        0.01 * t * x * x * (x - 1.0) * (x - 1.0)
    }
    pub fn phi(x: f64, t: f64) -> f64 {
        t.exp() * (PI * x).sin()
    }
    pub fn psi(x: f64, t: f64) -> f64 {
        t.exp() * x * (0.5 * PI * x).cos()
    }
    pub fn w(x: f64, t: f64) -> f64 {
        2.0 * t.exp() * (PI * x).sin()
    }
}

/// Fourth-order central differences of a space-time field. The large
/// shear modulus makes the residuals small differences of large terms, so
/// second-order stencils are not accurate enough.
pub mod fd {
    fn d1(g: impl Fn(f64) -> f64, e: f64) -> f64 {
        (-g(2.0 * e) + 8.0 * g(e) - 8.0 * g(-e) + g(-2.0 * e)) / (12.0 * e)
    }
    fn d2(g: impl Fn(f64) -> f64, e: f64) -> f64 {
        (-g(2.0 * e) + 16.0 * g(e) - 30.0 * g(0.0) + 16.0 * g(-e) - g(-2.0 * e)) / (12.0 * e * e)
    }
    pub fn dt(f: impl Fn(f64, f64) -> f64, x: f64, t: f64, e: f64) -> f64 {
        d1(|s| f(x, t + s), e)
    }
    pub fn dtt(f: impl Fn(f64, f64) -> f64, x: f64, t: f64, e: f64) -> f64 {
        d2(|s| f(x, t + s), e)
    }
    pub fn dx(f: impl Fn(f64, f64) -> f64, x: f64, t: f64, e: f64) -> f64 {
        d1(|s| f(x + s, t), e)
    }
    pub fn dxx(f: impl Fn(f64, f64) -> f64, x: f64, t: f64, e: f64) -> f64 {
        d2(|s| f(x + s, t), e)
    }
    pub fn dxt(f: impl Fn(f64, f64) -> f64 + Copy, x: f64, t: f64, e: f64) -> f64 {
        d1(|s| dt(f, x + s, t, e), e)
    }
    /// `d/dt` of the second difference in `x`.
    pub fn dxxt(f: impl Fn(f64, f64) -> f64 + Copy, x: f64, t: f64, e: f64) -> f64 {
        d1(|s| dxx(f, x, t + s, e), e)
    }
}

/// The four residuals of the forced system evaluated with finite
/// differences of the exact fields.
pub fn fd_residuals(p: &shearbeam::model::PhysicalParams, x: f64, t: f64) -> [f64; 4] {
    use exact::*;
    let e1 = 1e-4;
    let e2 = 1e-3;
    let stretch = phi(x, t) - u(x, t);
    let f1 = p.rho * fd::dtt(u, x, t, e1) - p.alpha * fd::dxx(u, x, t, e1) - p.lambda * stretch
        + p.mu * fd::dt(u, x, t, e1);
    let shear = |x: f64, t: f64| fd::dx(phi, x, t, e1) + psi(x, t);
    let f2 = p.rho1 * fd::dtt(phi, x, t, e1) - p.k_shear * fd::dx(shear, x, t, e2)
        + p.lambda * stretch
        + p.gamma * fd::dt(phi, x, t, e1)
        + p.beta * fd::dxt(w, x, t, e1);
    let f3 = -p.b * fd::dxx(psi, x, t, e1) + p.k_shear * shear(x, t);
    let f4 = p.rho3 * fd::dtt(w, x, t, e1) - p.delta * fd::dxx(w, x, t, e1)
        + p.beta * fd::dxt(phi, x, t, e1)
        - p.kappa * fd::dxxt(w, x, t, e2);
    [f1, f2, f3, f4]
}

/// Smooth random profile vanishing at `0` and `L`: a few sine modes.
pub fn sine_modes(amplitudes: Vec<f64>, length: f64) -> impl Fn(f64) -> f64 + Send + Sync {
    move |x| {
        amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| a * ((k + 1) as f64 * PI * x / length).sin())
            .sum()
    }
}

/// One implicit Euler step with a single interior node (`M = 2`), written
/// as the 4x4 system in `(xi, Phi, psi, vartheta)`. `old` holds
/// `u, phi, psi, w, xi, Phi, vartheta` and `f` the four nodal loads.
pub fn one_node_step(
    p: &shearbeam::model::PhysicalParams,
    dt: f64,
    old: [f64; 7],
    f: [f64; 4],
) -> Vec<f64> {
    let h = 0.5 * p.length;
    let (mm, ss) = (2.0 * h / 3.0, 2.0 / h);
    // with one interior node the gradient coupling vanishes
    let a = vec![
        vec![
            (p.rho / dt + p.lambda * dt + p.mu) * mm + p.alpha * dt * ss,
            -p.lambda * dt * mm,
            0.0,
            0.0,
        ],
        vec![
            -p.lambda * dt * mm,
            (p.rho1 / dt + p.lambda * dt + p.gamma) * mm + p.k_shear * dt * ss,
            0.0,
            0.0,
        ],
        vec![0.0, 0.0, p.b * ss + p.k_shear * mm, 0.0],
        vec![0.0, 0.0, 0.0, p.rho3 / dt * mm + (p.delta * dt + p.kappa) * ss],
    ];
    let b = vec![
        f[0] + p.rho / dt * mm * old[4] - p.alpha * ss * old[0] + p.lambda * mm * (old[1] - old[0]),
        f[1] + p.rho1 / dt * mm * old[5] - p.k_shear * ss * old[1] - p.lambda * mm * (old[1] - old[0]),
        f[2],
        f[3] + p.rho3 / dt * mm * old[6] - p.delta * ss * old[3],
    ];
    dense_solve(a, b)
}
