mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearbeam::mms::ManufacturedCase;
use shearbeam::model::PhysicalParams;
use shearbeam::stepper::SourceTerms;

fn relative_gap(closed: f64, fd: f64) -> f64 {
    (closed - fd).abs() / closed.abs().max(1.0)
}

#[test]
fn closed_form_sources_match_finite_differences() {
    let case = ManufacturedCase::reference(PhysicalParams::reference());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let x = rng.gen_range(0.02..0.98);
        let t = rng.gen_range(0.01..1.2);
        let closed = case.sources(x, t);
        let fd = common::fd_residuals(&case.params, x, t);
        for k in 0..4 {
            let gap = relative_gap(closed[k], fd[k]);
            worst = worst.max(gap);
            assert!(gap <= 1e-5, "f{} at ({x}, {t}): {} vs {}", k + 1, closed[k], fd[k]);
        }
    }
    println!("worst relative gap {worst:.3e}");
}

#[test]
fn sources_follow_other_parameters() {
    let p = PhysicalParams {
        rho: 0.3,
        alpha: 4.0,
        lambda: 2.5,
        mu: 0.2,
        rho1: 1.7,
        k_shear: 0.9,
        gamma: 3.1,
        beta: 0.6,
        b: 2.2,
        rho3: 0.45,
        delta: 1.3,
        kappa: 2.7,
        length: 1.0,
    };
    let case = ManufacturedCase::reference(p);
    for (x, t) in [(0.13, 0.4), (0.5, 1.0), (0.77, 0.05)] {
        let closed = case.sources(x, t);
        let fd = common::fd_residuals(&p, x, t);
        for k in 0..4 {
            assert!(relative_gap(closed[k], fd[k]) <= 1e-5, "f{}: {} vs {}", k + 1, closed[k], fd[k]);
        }
    }
}

#[test]
fn rotation_source_spot_check() {
    // f3 = -b psi_xx + K (phi_x + psi) with a plain 1e-6 central difference.
    let p = PhysicalParams::reference();
    let case = ManufacturedCase::reference(p);
    let (x, t, e) = (0.37, 0.8, 1e-6);
    let psi_xx = (common::exact::psi(x + e, t) - 2.0 * common::exact::psi(x, t)
        + common::exact::psi(x - e, t))
        / (e * e);
    let phi_x = (common::exact::phi(x + e, t) - common::exact::phi(x - e, t)) / (2.0 * e);
    let f3 = -p.b * psi_xx + p.k_shear * (phi_x + common::exact::psi(x, t));
    let closed = case.sources(x, t)[2];
    assert!((closed - f3).abs() <= 1e-3 * closed.abs().max(1.0), "{closed} vs {f3}");
}
