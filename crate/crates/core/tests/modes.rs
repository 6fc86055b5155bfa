use std::sync::Arc;

use mdqed::coupling::{Coupling, CouplingModel, CouplingSet, CouplingTable, Which};
use mdqed::laplace::InverseMethod;
use mdqed::modes::{
    assemble_lambda, invert_lambda, lambda_reality_scan, mode_coefficients, vacuum_modes, ModeSpec,
};
use mdqed::response::LaplaceResponse;
use mdqed::tensor::{
    block, c, curl_symbol, identity3, norm, norm6, transverse_projector, Matrix6C, PhysicalConstants, Tensor3C, Vec3,
    C64,
};
use mdqed::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn consts() -> PhysicalConstants {
    PhysicalConstants::natural()
}

fn empty(which: Which) -> Arc<dyn Coupling> {
    Arc::new(CouplingSet::empty(which, consts()))
}

fn lorentz_medium() -> LaplaceResponse {
    let e = CouplingModel::lorentz(Which::Electric, 1.2, 1.0, 0.1).with_correlation_length(0.3);
    LaplaceResponse::new(Arc::new(e), empty(Which::Magnetic), consts())
}

fn magnetodielectric() -> LaplaceResponse {
    let e = CouplingModel::anisotropic(Which::Electric, [1.0, 0.8, 1.3], [1.0, 1.4, 0.7], [0.1, 0.2, 0.15]);
    let m = CouplingModel::lorentz(Which::Magnetic, 0.5, 1.1, 0.2);
    LaplaceResponse::new(Arc::new(e), Arc::new(m), consts())
}

fn rel(a: &Tensor3C, b: &Tensor3C, scale: f64) -> f64 {
    norm(&(a - b)) / scale
}

#[test]
fn vacuum_lambda_blocks_and_half_plane() {
    let k = Vec3::new(0.0, 0.0, 1.0);
    let local = LaplaceResponse::vacuum(consts()).at(&k).unwrap();
    let l = assemble_lambda(&local, c(1.0, 0.0)).unwrap();
    let o = curl_symbol(&k);
    assert_eq!(block(&l.value, 0, 0), o);
    assert_eq!(block(&l.value, 1, 1), o);
    assert_eq!(block(&l.value, 0, 1), -identity3());
    assert_eq!(block(&l.value, 1, 0), identity3());
    assert!(matches!(assemble_lambda(&local, c(-0.1, 0.0)), Err(Error::LeftHalfPlane(_))));
}

#[test]
fn vacuum_inverse_matches_transverse_reduction() {
    let k = Vec3::new(0.3, -0.2, 0.9);
    let cs = consts();
    let local = LaplaceResponse::vacuum(cs).at(&k).unwrap();
    for rho in [c(0.7, 0.0), c(0.2, 1.3)] {
        let l = assemble_lambda(&local, rho).unwrap();
        let inv = invert_lambda(&l).unwrap();
        assert!(norm6(&(l.value * inv - Matrix6C::identity())) < 1e-11);
        let pt = transverse_projector(&k).unwrap();
        let pl = identity3() - pt;
        let expect = pt * (rho * cs.mu0 / (rho * rho * cs.eps0 * cs.mu0 + k.norm_squared()))
            + pl / (rho * cs.eps0);
        assert!(norm(&(block(&inv, 0, 1) - expect)) < 1e-12);
    }
    let shell = c(0.0, cs.omega_k(&k));
    let l = assemble_lambda(&local, shell).unwrap();
    assert!(matches!(invert_lambda(&l), Err(Error::SingularLambda { .. })));
}

#[test]
fn conductor_block_adds_sigma() {
    let k = Vec3::new(0.2, 0.1, 0.5);
    let bound = CouplingModel::lorentz(Which::Electric, 1.0, 1.0, 0.1);
    let free = CouplingModel::drude(Which::Electric, 0.8, 0.3);
    let r = LaplaceResponse::new(Arc::new(bound), empty(Which::Magnetic), consts()).with_conductor(Arc::new(free));
    let local = r.at(&k).unwrap();
    let rho = c(0.4, 0.7);
    let l = assemble_lambda(&local, rho).unwrap();
    let expect = local.epsilon(rho).unwrap() * rho + local.sigma(rho).unwrap().unwrap();
    assert!(norm(&(block(&l.value, 1, 0) - expect)) < 1e-14 * norm(&expect));
}

#[test]
fn reality_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ks: Vec<Vec3> = (0..10).map(|_| Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
    let rhos: Vec<C64> = (0..10).map(|_| c(rng.gen_range(0.01..3.0), rng.gen_range(-3.0..3.0))).collect();
    let vac = lambda_reality_scan(&LaplaceResponse::vacuum(consts()), &ks, &rhos).unwrap();
    assert_eq!(vac.max_deviation, 0.0);
    let lor = lambda_reality_scan(&magnetodielectric(), &ks, &rhos).unwrap();
    assert_eq!(lor.samples, 100);
    assert!(lor.max_deviation < 1e-13, "{}", lor.max_deviation);
    assert!(!lor.flagged);

    // A tabulated coupling with a complex Hermitian density breaks reality.
    let omegas: Vec<f64> = (0..=200).map(|i| 0.025 * i as f64).collect();
    let values = omegas
        .iter()
        .map(|w| {
            let a = 0.3 * w * (-w * w).exp();
            Tensor3C::new(c(a, 0.0), c(0.0, a), C64::default(), C64::default(), c(a, 0.0), C64::default(), C64::default(), C64::default(), c(a, 0.0))
        })
        .collect();
    let table = CouplingTable::new(omegas, vec![0.0], values).unwrap();
    let bad = CouplingModel::tabulated(Which::Electric, table);
    let r = LaplaceResponse::new(Arc::new(bad), empty(Which::Magnetic), consts()).with_numeric_order(512);
    let scan = lambda_reality_scan(&r, &ks[..3], &rhos[..3]).unwrap();
    assert!(scan.flagged, "{}", scan.max_deviation);
}

#[test]
fn vacuum_modes_match_closed_form() {
    let k = Vec3::new(0.4, -0.3, 1.1);
    let cs = consts();
    let times: Vec<f64> = (0..=40).map(|i| 0.5 * i as f64).collect();
    let spec = ModeSpec { reservoir_order: 128, ..ModeSpec::default() };
    let m = mode_coefficients(&LaplaceResponse::vacuum(cs), &k, &times, &spec).unwrap();
    assert_eq!(m.method, InverseMethod::RationalExact);
    for (i, t) in times.iter().enumerate() {
        let v = vacuum_modes(&k, *t, &cs).unwrap();
        assert!(rel(&m.gamma[i], &v.gamma, 1.0) < 1e-9, "t={t}");
        assert!(rel(&m.xi[i], &v.xi, 1.0) < 1e-9, "t={t}");
        assert!(rel(&m.gamma_tilde[i], &v.gamma_tilde, 1.0) < 1e-9, "t={t}");
        assert!(rel(&m.xi_tilde[i], &v.xi_tilde, 1.0) < 1e-9, "t={t}");
        for q in 0..m.omega_q.len() {
            assert_eq!(norm(&m.zeta[i][q]) + norm(&m.eta[i][q]), 0.0);
        }
    }
}

#[test]
fn lorentz_initial_values_are_vacuum() {
    let k = Vec3::new(0.5, 0.2, 0.4);
    let spec = ModeSpec { reservoir_order: 64, ..ModeSpec::default() };
    let m = mode_coefficients(&lorentz_medium(), &k, &[0.0], &spec).unwrap();
    let v = vacuum_modes(&k, 0.0, &consts()).unwrap();
    assert!(rel(&m.gamma[0], &v.gamma, 1.0) < 1e-9);
    assert!(rel(&m.xi_tilde[0], &v.xi_tilde, 1.0) < 1e-9);
    assert!(norm(&m.xi[0]) < 1e-9 && norm(&m.gamma_tilde[0]) < 1e-9);
    let f = lorentz_medium().electric.eval(m.omega_q[10], &k).unwrap();
    assert!(rel(&m.eta[0][10], &(-f), norm(&f)) < 1e-8);
    assert!(norm(&m.zeta[0][10]) < 1e-12);
}

fn compare_methods(response: &LaplaceResponse, k: &Vec3, times: &[f64], other: InverseMethod, tol: f64) -> f64 {
    let mut spec = ModeSpec { reservoir_order: 64, ..ModeSpec::default() };
    let a = mode_coefficients(response, k, times, &spec).unwrap();
    spec.inverse.method = other;
    let b = mode_coefficients(response, k, times, &spec).unwrap();
    assert_eq!(b.method, other);
    let mut worst: f64 = 0.0;
    let pairs = [(&a.gamma, &b.gamma), (&a.xi, &b.xi), (&a.gamma_tilde, &b.gamma_tilde), (&a.xi_tilde, &b.xi_tilde)];
    for (x, y) in pairs {
        let s = x.iter().map(norm).fold(0.0, f64::max);
        for (p, q) in x.iter().zip(y) {
            worst = worst.max(rel(p, q, s));
        }
    }
    let res = [(&a.zeta, &b.zeta), (&a.eta, &b.eta), (&a.zeta_tilde, &b.zeta_tilde), (&a.eta_tilde, &b.eta_tilde)];
    for (x, y) in res {
        let s = x.iter().flatten().map(norm).fold(0.0, f64::max);
        if s == 0.0 {
            continue;
        }
        for (p, q) in x.iter().flatten().zip(y.iter().flatten()) {
            worst = worst.max(rel(p, q, s));
        }
    }
    assert!(worst < tol, "{other:?}: {worst:e}");
    worst
}

#[test]
fn talbot_agrees_with_residues() {
    let k = Vec3::new(0.5, 0.2, 0.4);
    let times: Vec<f64> = (1..=8).map(|i| 0.5 * i as f64).collect();
    compare_methods(&lorentz_medium(), &k, &times, InverseMethod::Talbot, 1e-8);
    compare_methods(&magnetodielectric(), &k, &times, InverseMethod::Talbot, 1e-8);
}

#[test]
fn dehoog_agrees_with_residues() {
    let k = Vec3::new(0.5, 0.2, 0.4);
    compare_methods(&lorentz_medium(), &k, &[0.7, 2.5], InverseMethod::DeHoog, 1e-4);
}
