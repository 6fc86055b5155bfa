use mdqed::conductor::{conductor_modes, q_kernel_consistency, split_free_carriers, ConductorScenario};
use mdqed::coupling::{CouplingModel, Which};
use mdqed::modes::{mode_coefficients, vacuum_modes, ModeSpec};
use mdqed::quadrature::QuadratureSpec;
use mdqed::response::TimeGrid;
use mdqed::tensor::{c, identity3, norm, PhysicalConstants, Vec3};

fn consts() -> PhysicalConstants {
    PhysicalConstants::natural()
}

fn lorentz() -> CouplingModel {
    CouplingModel::lorentz(Which::Electric, 1.0, 1.0, 0.2)
}

fn drude() -> CouplingModel {
    CouplingModel::drude(Which::Electric, 0.8, 0.3)
}

fn quad() -> QuadratureSpec {
    QuadratureSpec { rtol: 1e-11, max_order: 1 << 15, ..QuadratureSpec::default() }
}

#[test]
fn splits_drude_terms() {
    let (free, bound) = split_free_carriers(vec![lorentz(), drude(), lorentz()]);
    assert_eq!((free.len(), bound.len()), (1, 2));
    let s = ConductorScenario::from_models(vec![lorentz()], vec![], consts()).unwrap();
    assert!(s.is_dielectric());
    assert!(ConductorScenario::from_models(vec![CouplingModel::lorentz(Which::Magnetic, 1.0, 1.0, 0.1)], vec![], consts()).is_err());
}

#[test]
fn zero_conductivity_is_dielectric() {
    let k = Vec3::new(0.3, 0.2, 0.5);
    let times = [0.0, 1.0, 3.0, 6.0];
    let spec = ModeSpec { reservoir_order: 128, ..ModeSpec::default() };
    let s = ConductorScenario::from_models(vec![lorentz(), CouplingModel::drude(Which::Electric, 0.0, 0.3)], vec![], consts()).unwrap();
    assert!(s.is_dielectric());
    let a = conductor_modes(&s, &k, &times, &spec).unwrap();
    let b = mode_coefficients(&s.dielectric(), &k, &times, &spec).unwrap();
    for i in 0..times.len() {
        for (x, y) in [(&a.gamma, &b.gamma), (&a.xi, &b.xi), (&a.gamma_tilde, &b.gamma_tilde), (&a.xi_tilde, &b.xi_tilde)] {
            assert!(norm(&(x[i] - y[i])) <= 1e-12 * norm(&y[i]).max(1e-300));
        }
        for q in 0..a.omega_q.len() {
            assert!(norm(&(a.eta[i][q] - b.eta[i][q])) <= 1e-12 * norm(&b.eta[i][q]).max(1e-300));
        }
    }
}

#[test]
fn drude_modes_are_passive_and_decay() {
    let k = Vec3::new(0.0, 0.3, 0.4);
    let s = ConductorScenario::from_models(vec![lorentz(), drude()], vec![], consts()).unwrap();
    assert!(!s.is_dielectric());
    let times: Vec<f64> = [0.0, 10.0, 20.0, 40.0].to_vec();
    let spec = ModeSpec { reservoir_order: 128, ..ModeSpec::default() };
    let m = conductor_modes(&s, &k, &times, &spec).unwrap();
    let poles = m.poles.as_ref().unwrap();
    assert!(poles.poles().all(|p| p.re <= 1e-9 * poles.root_scale));
    let v = vacuum_modes(&k, 0.0, &consts()).unwrap();
    assert!(norm(&(m.gamma[0] - v.gamma)) < 1e-9);
    let g: Vec<f64> = m.gamma.iter().map(norm).collect();
    assert!(g[2] < g[1] && g[3] < g[2], "{g:?}");
}

#[test]
fn q_decomposition_lorentz() {
    let k = Vec3::new(0.2, 0.0, 0.3);
    let s = ConductorScenario::from_models(vec![lorentz()], vec![], consts()).unwrap();
    let grid = TimeGrid::uniform(20.0, 2001).unwrap();
    let r = q_kernel_consistency(&s, &k, &grid, &[0.3, 1.0, 2.0, 4.0], &quad()).unwrap();
    assert!(r.decomposition_residual < 1e-5, "{}", r.decomposition_residual);
    assert!(r.noise_current.as_ref().unwrap().max_rel_err < 1e-5, "{}", r.noise_current.unwrap().max_rel_err);
    assert!(r.passed);
}

#[test]
fn q_decomposition_drude() {
    let k = Vec3::new(0.2, 0.0, 0.3);
    let s = ConductorScenario::from_models(vec![drude()], vec![], consts()).unwrap();
    let grid = TimeGrid::uniform(20.0, 2001).unwrap();
    let r = q_kernel_consistency(&s, &k, &grid, &[0.3, 1.0, 2.0], &quad()).unwrap();
    assert!(r.decomposition_residual < 1e-5);
    // Drude: σ(t) = ε₀ω_p² e^{−γt}.
    let expect = identity3() * c(consts().eps0 * 0.64, 0.0);
    assert!(norm(&(r.sigma_initial - expect)) < 1e-6 * norm(&expect), "{}", r.sigma_initial);
    assert!(r.sigma_initial_min_eigenvalue > 0.0);
    assert!(r.noise_current.as_ref().unwrap().max_rel_err < 1e-5, "{}", r.noise_current.unwrap().max_rel_err);
}

#[test]
fn zero_coupling_gives_zero_kernel() {
    let s = ConductorScenario::from_models(vec![], vec![], consts()).unwrap();
    let grid = TimeGrid::uniform(5.0, 101).unwrap();
    let r = q_kernel_consistency(&s, &Vec3::new(0.1, 0.2, 0.3), &grid, &[1.0], &quad()).unwrap();
    assert_eq!(r.decomposition_residual, 0.0);
    assert_eq!(norm(&r.sigma_initial), 0.0);
    assert!(r.noise_current.is_none());
}
