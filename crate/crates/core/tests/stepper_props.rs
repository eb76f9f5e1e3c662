mod common;

use proptest::prelude::*;
use shearbeam::energy::{check_monotone, discrete_energy, EnergyFunctional, EnergyRecorder};
use shearbeam::femesh::{FeFunction, UniformMesh};
use shearbeam::mms::{error_norm, ManufacturedCase};
use shearbeam::model::{profile, validate, InitialData, PhysicalParams, SimulationConfig};
use shearbeam::stepper::{run, BlockSystem, Field, State};

fn params_from(v: [f64; 12]) -> PhysicalParams {
    PhysicalParams {
        rho: v[0],
        alpha: v[1],
        lambda: v[2],
        mu: v[3],
        rho1: v[4],
        k_shear: v[5],
        gamma: v[6],
        beta: v[7],
        b: v[8],
        rho3: v[9],
        delta: v[10],
        kappa: v[11],
        length: 1.0,
    }
}

fn odd_params() -> PhysicalParams {
    params_from([1.3, 2.1, 0.7, 0.4, 1.9, 5.5, 0.8, 1.7, 0.6, 2.2, 0.9, 0.35])
}

fn state_from(coeffs: &[Vec<f64>; 7]) -> State {
    let f = |k: usize| FeFunction::from_vec(coeffs[k].clone());
    State {
        u: f(0),
        phi: f(1),
        psi: f(2),
        w: f(3),
        xi: f(4),
        phi_t: f(5),
        vartheta: f(6),
        t: 0.0,
        n: 0,
    }
}

/// Weak-form residuals of one step, evaluated with quadrature matrices,
/// as a function of the unknowns `(xi, Phi, psi, vartheta)` stacked field
/// by field.
fn weak_residual(
    p: &PhysicalParams,
    mesh: &UniformMesh,
    dt: f64,
    old: &State,
    loads: &[Vec<f64>; 4],
    x: &[f64],
) -> Vec<f64> {
    let n = mesh.interior_nodes();
    let (m, s, g) = (
        common::oracle_mass(mesh),
        common::oracle_stiffness(mesh),
        common::oracle_gradient(mesh),
    );
    let gt = common::transpose(&g);
    let (xi, cphi, psi, vth) = (&x[..n], &x[n..2 * n], &x[2 * n..3 * n], &x[3 * n..]);
    let upd = |old: &FeFunction, vel: &[f64]| -> Vec<f64> {
        old.as_slice().iter().zip(vel).map(|(a, v)| a + dt * v).collect()
    };
    let (u, phi, w) = (upd(&old.u, xi), upd(&old.phi, cphi), upd(&old.w, vth));
    let diff = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p - q).collect() };
    let stretch = diff(&phi, &u);
    let mv = |a: &common::Dense, v: &[f64]| common::matvec(a, v);
    let mut out = Vec::with_capacity(4 * n);
    for i in 0..n {
        out.push(
            p.rho / dt * mv(&m, &diff(xi, old.xi.as_slice()))[i] + p.alpha * mv(&s, &u)[i]
                - p.lambda * mv(&m, &stretch)[i]
                + p.mu * mv(&m, xi)[i]
                - loads[0][i],
        );
    }
    for i in 0..n {
        out.push(
            p.rho1 / dt * mv(&m, &diff(cphi, old.phi_t.as_slice()))[i]
                + p.k_shear * (mv(&s, &phi)[i] + mv(&gt, psi)[i])
                + p.lambda * mv(&m, &stretch)[i]
                + p.gamma * mv(&m, cphi)[i]
                + p.beta * mv(&g, vth)[i]
                - loads[1][i],
        );
    }
    for i in 0..n {
        out.push(
            p.b * mv(&s, psi)[i] + p.k_shear * (mv(&g, &phi)[i] + mv(&m, psi)[i]) - loads[2][i],
        );
    }
    for i in 0..n {
        out.push(
            p.rho3 / dt * mv(&m, &diff(vth, old.vartheta.as_slice()))[i]
                + p.delta * mv(&s, &w)[i]
                + p.beta * mv(&g, cphi)[i]
                + p.kappa * mv(&s, vth)[i]
                - loads[3][i],
        );
    }
    out
}

/// Solves the affine weak residual `R(x) = 0` densely: the matrix is
/// recovered column by column from `R(e_k) - R(0)`.
fn dense_oracle_step(
    p: &PhysicalParams,
    mesh: &UniformMesh,
    dt: f64,
    old: &State,
    loads: &[Vec<f64>; 4],
) -> Vec<f64> {
    let dim = 4 * mesh.interior_nodes();
    let r0 = weak_residual(p, mesh, dt, old, loads, &vec![0.0; dim]);
    let mut a = vec![vec![0.0; dim]; dim];
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        let rk = weak_residual(p, mesh, dt, old, loads, &e);
        for i in 0..dim {
            a[i][k] = rk[i] - r0[i];
        }
    }
    common::dense_solve(a, r0.iter().map(|v| -v).collect())
}

fn pseudo_random(n: usize, seed: u64) -> Vec<f64> {
    let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (0..n)
        .map(|_| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((x >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
        .collect()
}

#[test]
fn step_matches_dense_weak_form_oracle() {
    for (m, dt) in [(2usize, 0.1), (3, 0.05), (6, 0.01), (9, 0.3)] {
        let mesh = UniformMesh::new(1.0, m).unwrap();
        let n = m - 1;
        let p = odd_params();
        let old = state_from(&std::array::from_fn(|k| pseudo_random(n, k as u64 + 10 * m as u64)));
        let loads: [Vec<f64>; 4] = std::array::from_fn(|k| pseudo_random(n, 100 + k as u64));
        let sys = BlockSystem::assemble(p, &mesh, dt).unwrap();
        let new = sys.advance(&old, Some(&loads)).unwrap();
        let x = dense_oracle_step(&p, &mesh, dt, &old, &loads);
        let got: Vec<f64> = [&new.xi, &new.phi_t, &new.psi, &new.vartheta]
            .iter()
            .flat_map(|f| f.as_slice().to_vec())
            .collect();
        for (a, b) in got.iter().zip(&x) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "M={m}: {a} vs {b}");
        }
    }
}

#[test]
fn single_interior_node_matches_hand_solve() {
    let p = odd_params();
    let dt = 0.02;
    let old = [0.3, -0.2, 0.5, 0.1, 0.7, -0.4, 0.25];
    let f = [0.9, -1.1, 0.4, 0.6];
    let x = common::one_node_step(&p, dt, old, f);

    let mesh = UniformMesh::new(1.0, 2).unwrap();
    let sys = BlockSystem::assemble(p, &mesh, dt).unwrap();
    let s = state_from(&std::array::from_fn(|k| vec![old[k]]));
    let loads = f.map(|v| vec![v]);
    let new = sys.advance(&s, Some(&loads)).unwrap();
    let got = [new.xi.as_slice()[0], new.phi_t.as_slice()[0], new.psi.as_slice()[0], new.vartheta.as_slice()[0]];
    for (g, e) in got.iter().zip(&x) {
        assert!((g - e).abs() <= 1e-12 * (1.0 + e.abs()), "{got:?} vs {x:?}");
    }
    assert!((new.u.as_slice()[0] - (old[0] + dt * x[0])).abs() < 1e-15);
}

#[test]
fn matrix_entries_are_affine_in_dt_and_inverse_dt() {
    // Every entry has the form a/dt + b + c dt. Fit (a, b, c) from three
    // step sizes and predict a fourth.
    let mesh = UniformMesh::new(1.0, 5).unwrap();
    let p = odd_params();
    let d = 0.01;
    let sys: Vec<BlockSystem> = [d, 2.0 * d, 4.0 * d, 3.0 * d]
        .iter()
        .map(|&dt| BlockSystem::assemble(p, &mesh, dt).unwrap())
        .collect();
    let n = sys[0].matrix().dim();
    for i in 0..n {
        for j in 0..n {
            let y: Vec<f64> = sys.iter().map(|s| s.matrix().get(i, j)).collect();
            let rows: Vec<Vec<f64>> = [d, 2.0 * d, 4.0 * d]
                .iter()
                .map(|&t| vec![1.0 / t, 1.0, t])
                .collect();
            let abc = common::dense_solve(rows, y[..3].to_vec());
            let t = 3.0 * d;
            let predicted = abc[0] / t + abc[1] + abc[2] * t;
            assert!(
                (predicted - y[3]).abs() <= 1e-10 * (1.0 + y[3].abs()),
                "({i},{j}): {predicted} vs {}",
                y[3]
            );
        }
    }
    // Doubling dt: the 1/dt part (mass terms) halves and the dt part doubles.
    let (s1, s2) = (&sys[0], &sys[1]);
    let mass = &s1.matrices().mass;
    let stiff = &s1.matrices().stiffness;
    for i in 0..4 {
        let want = |dt: f64| {
            (p.rho3 / dt) * mass.get(i, i) + (p.delta * dt + p.kappa) * stiff.get(i, i)
        };
        let got1 = s1.entry(Field::Vartheta, i, Field::Vartheta, i);
        let got2 = s2.entry(Field::Vartheta, i, Field::Vartheta, i);
        assert!((got1 - want(d)).abs() < 1e-10 * got1.abs());
        assert!((got2 - want(2.0 * d)).abs() < 1e-10 * got2.abs());
    }
}

#[test]
fn runs_are_deterministic() {
    let mut c = SimulationConfig::reference();
    c.elements = 40;
    c.dt = 0.0125;
    c.final_time = 1.0;
    let v = validate(PhysicalParams::reference(), c).unwrap();
    let go = || {
        let mut rec = EnergyRecorder::new(v.params, &v.mesh());
        let s = run(&v, &InitialData::reference(1.0), None, &mut [&mut rec]).unwrap();
        (s, rec.series)
    };
    let (a, ea) = go();
    let (b, eb) = go();
    assert_eq!(a, b);
    let bits = |e: &[f64]| e.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&ea.e), bits(&eb.e));
}

#[test]
fn one_step_from_exact_data_is_consistent() {
    // Starting from the interpolated exact solution, one forced step stays
    // within C (h + dt) of the exact solution, with C fixed on the coarse mesh.
    let case = ManufacturedCase::reference(PhysicalParams::reference());
    let err = |m: usize| {
        let mesh = UniformMesh::new(1.0, m).unwrap();
        let dt = 0.04 / m as f64;
        let sys = BlockSystem::assemble(case.params, &mesh, dt).unwrap();
        let s0 = case.interpolated_state(&mesh, 0.0);
        let s1 = sys.step(&s0, Some(&case)).unwrap();
        (error_norm(&s1, &case, &mesh, s1.t), mesh.h() + dt)
    };
    let (e40, k40) = err(40);
    let c = e40 / k40;
    for m in [80, 160] {
        let (e, k) = err(m);
        assert!(e <= 1.05 * c * k, "M={m}: {e} > C (h + dt) = {}", c * k);
    }
}

#[test]
fn interpolated_energy_converges_at_second_order() {
    let pi2 = std::f64::consts::PI.powi(2);
    let exact = 0.5 * (0.5 + 3.0 * pi2 + 1.0 + 365.0 * (pi2 / 2.0 + 0.5) + pi2 / 2.0 + 0.5 + pi2 / 2.0);
    let errs: Vec<f64> = [25, 50, 100, 200]
        .iter()
        .map(|&m| {
            let mesh = UniformMesh::new(1.0, m).unwrap();
            let s = State::from_initial(&InitialData::reference(1.0), &mesh);
            (discrete_energy(&s, &mesh, &PhysicalParams::reference()) - exact).abs()
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.1, "{errs:?}");
    }
}

fn log_uniform() -> impl Strategy<Value = f64> {
    (-1.0f64..1.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_never_increases(
        values in prop::array::uniform12(log_uniform()),
        m in 4usize..40,
        dt_scale in 0.1f64..3.0,
        amps in prop::collection::vec(-1.0f64..1.0, 21),
    ) {
        let params = params_from(values);
        let mesh = UniformMesh::new(1.0, m).unwrap();
        let dt = dt_scale * mesh.h();
        let field = |k: usize| profile(common::sine_modes(amps[3 * k..3 * k + 3].to_vec(), 1.0));
        let init = InitialData {
            u0: field(0), u1: field(1), phi0: field(2), phi1: field(3),
            psi0: field(4), w0: field(5), w1: field(6),
        };
        let sys = BlockSystem::assemble(params, &mesh, dt).unwrap();
        let energy = EnergyFunctional::new(params, &mesh);
        let mut s = State::from_initial(&init, &mesh);
        let mut rec = shearbeam::energy::EnergySeries::new();
        rec.push(0, 0.0, energy.evaluate(&s));
        for _ in 0..60 {
            s = sys.step(&s, None).unwrap();
            rec.push(s.n, s.t, energy.evaluate(&s));
        }
        let report = check_monotone(&rec, 1e-9);
        prop_assert!(report.passed(), "violations at {:?}", report.violations);
    }

    #[test]
    fn energy_is_positive_definite(
        values in prop::array::uniform12(log_uniform()),
        coeffs in prop::collection::vec(-1.0f64..1.0, 7 * 6),
    ) {
        let params = params_from(values);
        let mesh = UniformMesh::new(1.0, 7).unwrap();
        let s = state_from(&std::array::from_fn(|k| coeffs[6 * k..6 * k + 6].to_vec()));
        let e = discrete_energy(&s, &mesh, &params);
        if coeffs.iter().any(|&c| c != 0.0) {
            prop_assert!(e > 0.0);
        }
        prop_assert_eq!(discrete_energy(&State::zeros(6), &mesh, &params), 0.0);
    }
}
