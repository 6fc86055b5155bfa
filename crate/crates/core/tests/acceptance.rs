//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fail.

use std::sync::Arc;
use std::time::Instant;

use mdqed::conductor::{conductor_modes, q_kernel_consistency, ConductorScenario};
use mdqed::coupling::{apply_gauge, coupling_from_target, Coupling, CouplingModel, CouplingSet, GaugeTransform, Which};
use mdqed::laplace::InverseMethod;
use mdqed::modes::{lambda_reality_scan, mode_coefficients, vacuum_modes, ModeCoefficients, ModeSpec};
use mdqed::noise::{noise_commutator, pdot_continuity, NoiseOptions};
use mdqed::observables::{equal_time_commutators, maxwell_residual, vacuum_spectrum, FieldOperatorRepresentation};
use mdqed::quadrature::QuadratureSpec;
use mdqed::response::{chi_kernel, chi_spectrum, kk_check, kk_grid, LaplaceResponse, SpectrumOptions, TimeGrid};
use mdqed::tensor::{c, norm, PhysicalConstants, Tensor3C, Vec3, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

fn consts() -> PhysicalConstants {
    PhysicalConstants::natural()
}

fn empty(which: Which) -> Arc<dyn Coupling> {
    Arc::new(CouplingSet::empty(which, consts()))
}

fn lorentz() -> CouplingModel {
    CouplingModel::lorentz(Which::Electric, 1.0, 1.0, 0.2).with_correlation_length(0.3)
}

fn drude() -> CouplingModel {
    CouplingModel::drude(Which::Electric, 1.0, 0.5)
}

fn anisotropic() -> CouplingModel {
    CouplingModel::anisotropic(Which::Electric, [1.0, 0.8, 1.3], [1.0, 1.4, 0.7], [0.2, 0.3, 0.25])
}

fn lorentz_medium() -> LaplaceResponse {
    LaplaceResponse::new(Arc::new(lorentz()), empty(Which::Magnetic), consts())
}

fn magnetodielectric() -> LaplaceResponse {
    let m = CouplingModel::lorentz(Which::Magnetic, 0.5, 1.1, 0.3);
    LaplaceResponse::new(Arc::new(anisotropic()), Arc::new(m), consts())
}

fn omegas() -> Vec<f64> {
    (0..50).map(|i| 0.1 + 4.9 * i as f64 / 49.0).collect()
}

fn k() -> Vec3 {
    Vec3::new(0.4, -0.2, 0.6)
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn rel(a: &Tensor3C, b: &Tensor3C) -> f64 {
    norm(&(a - b)) / norm(b).max(f64::MIN_POSITIVE)
}

fn fdt() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, m) in [("lorentz", lorentz()), ("drude", drude()), ("anisotropic", anisotropic())] {
        let start = Instant::now();
        let opts = NoiseOptions::for_band(&m, 5.0).map_err(e)?;
        let r = noise_commutator(&m, &k(), &omegas(), &opts).map_err(e)?;
        let secs = start.elapsed().as_secs_f64();
        ok &= r.max_rel_err < 1e-5 && secs < 30.0;
        parts.push(format!("{name} {:.2e} in {secs:.1}s", r.max_rel_err));
    }
    Ok((ok, parts.join(", ")))
}

fn round_trip() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for m in [lorentz(), anisotropic(), CouplingModel::lorentz(Which::Magnetic, 0.5, 1.1, 0.3)] {
        let opts = NoiseOptions::for_band(&m, 5.0).map_err(e)?;
        let kern = chi_kernel(&m, &k(), &opts.time_grid, &opts.quadrature).map_err(e)?;
        let spec = chi_spectrum(&kern, &omegas(), &SpectrumOptions::default()).map_err(e)?;
        for (i, w) in omegas().iter().enumerate() {
            let f = coupling_from_target(&spec.im(i), *w, &k(), m.which(), &consts()).map_err(e)?;
            worst = worst.max(rel(&(f * f.adjoint()), &m.density(*w, &k()).map_err(e)?));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((worst < 1e-6 && secs < 60.0, format!("max {worst:.2e} in {secs:.1}s")))
}

fn kramers_kronig() -> Outcome {
    let m = lorentz();
    let grid = kk_grid(50.0, 4096);
    let opts = NoiseOptions::for_band(&m, 50.0).map_err(e)?;
    let kern = chi_kernel(&m, &k(), &opts.time_grid, &opts.quadrature).map_err(e)?;
    let spec = chi_spectrum(&kern, &grid, &SpectrumOptions::default()).map_err(e)?;
    let causal = kk_check(&spec).map_err(e)?.max_residual;
    let acausal = kk_check(&spec.time_reversed()).map_err(e)?.max_residual;
    Ok((causal < 1e-3 && acausal > 0.1, format!("causal {causal:.2e}, time-reversed {acausal:.2e}")))
}

fn vacuum() -> Outcome {
    let k = Vec3::new(0.4, -0.3, 1.1);
    let times: Vec<f64> = (0..=40).map(|i| 0.5 * i as f64).collect();
    let spec = ModeSpec { reservoir_order: 128, ..ModeSpec::default() };
    let vac = LaplaceResponse::vacuum(consts());
    let m = mode_coefficients(&vac, &k, &times, &spec).map_err(e)?;
    let mut worst: f64 = 0.0;
    let mut reservoir: f64 = 0.0;
    for (i, t) in times.iter().enumerate() {
        let v = vacuum_modes(&k, *t, &consts()).map_err(e)?;
        for (a, b) in [(&m.gamma[i], &v.gamma), (&m.xi[i], &v.xi), (&m.gamma_tilde[i], &v.gamma_tilde), (&m.xi_tilde[i], &v.xi_tilde)] {
            worst = worst.max(norm(&(a - b)));
        }
        for q in 0..m.omega_q.len() {
            reservoir = reservoir.max(norm(&m.zeta[i][q])).max(norm(&m.eta[i][q]));
        }
    }
    let (p, n) = FieldOperatorRepresentation::assemble(&vac, &k, &times, &spec).map_err(e)?;
    let dev = equal_time_commutators(&p, &n).map_err(e)?.max_deviation;
    Ok((
        worst < 1e-9 && reservoir == 0.0 && dev < 1e-10,
        format!("closed forms {worst:.2e}, |zeta|,|eta| {reservoir:.1e}, commutators {dev:.2e}"),
    ))
}

fn lorentz_commutators() -> Outcome {
    let start = Instant::now();
    let times = [0.0, 1.0, 5.0, 20.0];
    let mut devs = Vec::new();
    for order in [512, 1024, 2048] {
        let spec = ModeSpec { reservoir_order: order, ..ModeSpec::default() };
        let (p, m) = FieldOperatorRepresentation::assemble(&lorentz_medium(), &k(), &times, &spec).map_err(e)?;
        devs.push(equal_time_commutators(&p, &m).map_err(e)?.max_deviation);
    }
    let secs = start.elapsed().as_secs_f64();
    let converging = devs.windows(2).all(|w| w[1] <= w[0]);
    Ok((
        devs[2] < 1e-4 && converging && secs < 300.0,
        format!("orders 512/1024/2048: {:.2e} {:.2e} {:.2e} in {secs:.1}s", devs[0], devs[1], devs[2]),
    ))
}

fn random_gauge(rng: &mut ChaCha8Rng) -> GaugeTransform {
    let axis = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    GaugeTransform::Rotation { axis, angle: rng.gen_range(0.0..6.0), angle_rate: rng.gen_range(-2.0..2.0) }
}

fn max_family_change(a: &[Vec<Tensor3C>], b: &[Vec<Tensor3C>]) -> f64 {
    let scale = a.iter().flatten().map(norm).fold(0.0, f64::max);
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| norm(&(x - y))).fold(0.0, f64::max) / scale
}

fn gauge() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let times = [0.0, 2.0, 6.0];
    let spec = ModeSpec { reservoir_order: 256, ..ModeSpec::default() };
    let base = magnetodielectric();
    let (p0, m0) = FieldOperatorRepresentation::assemble(&base, &k(), &times, &spec).map_err(e)?;
    let c0 = equal_time_commutators(&p0, &m0).map_err(e)?;
    let modes0 = mode_coefficients(&base, &k(), &times, &spec).map_err(e)?;
    let grid = TimeGrid::uniform(10.0, 101).map_err(e)?;
    let quad = QuadratureSpec { rtol: 1e-11, max_order: 1 << 15, ..QuadratureSpec::default() };
    let chi0 = chi_kernel(base.electric.as_ref(), &k(), &grid, &quad).map_err(e)?;
    let (mut invariant, mut changed): (f64, f64) = (0.0, f64::INFINITY);
    for _ in 0..10 {
        let ge = apply_gauge(base.electric.clone(), random_gauge(&mut rng)).map_err(e)?;
        let gm = apply_gauge(base.magnetic.clone(), random_gauge(&mut rng)).map_err(e)?;
        let r = LaplaceResponse::new(Arc::new(ge.clone()), Arc::new(gm), consts());
        let chi = chi_kernel(&ge, &k(), &grid, &quad).map_err(e)?;
        for (a, b) in chi.values.iter().zip(&chi0.values) {
            invariant = invariant.max(norm(&(a - b)) / chi0.max_norm());
        }
        let (p, m) = FieldOperatorRepresentation::assemble(&r, &k(), &times, &spec).map_err(e)?;
        let cr = equal_time_commutators(&p, &m).map_err(e)?;
        for (x, y) in [(&cr.ee, &c0.ee), (&cr.eh, &c0.eh), (&cr.hh, &c0.hh)] {
            for (a, b) in x.lhs.iter().zip(&y.lhs) {
                invariant = invariant.max(norm(&(a - b)) / norm(&c0.eh.rhs[0]));
            }
        }
        for ti in 0..times.len() {
            let s = vacuum_spectrum(&p, &m, &Vec3::new(0.2, 0.0, -0.1), ti).map_err(e)?;
            let s0 = vacuum_spectrum(&p0, &m0, &Vec3::new(0.2, 0.0, -0.1), ti).map_err(e)?;
            invariant = invariant.max(rel(&s, &s0));
        }
        let modes = mode_coefficients(&r, &k(), &times, &spec).map_err(e)?;
        changed = changed.min(max_family_change(&modes0.eta, &modes.eta).min(max_family_change(&modes0.zeta, &modes.zeta)));
    }
    Ok((invariant < 1e-10 && changed > 1e-3, format!("invariants {invariant:.2e}, min eta/zeta change {changed:.2e}")))
}

fn maxwell() -> Outcome {
    let dt = 1e-3;
    let times: Vec<f64> = (0..=20).map(|i| 2.0 + dt * i as f64).collect();
    let mut worst: f64 = 0.0;
    for medium in [lorentz_medium(), magnetodielectric()] {
        let r = maxwell_residual(&medium, &k(), &times, &[0.3, 1.0, 2.5], &ModeSpec::default()).map_err(e)?;
        worst = worst.max(r.max_residual);
    }
    Ok((worst < 1e-5, format!("max channel residual {worst:.2e}")))
}

fn reality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ks: Vec<Vec3> = (0..10).map(|_| Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
    let rhos: Vec<C64> = (0..10).map(|_| c(rng.gen_range(0.01..3.0), rng.gen_range(-3.0..3.0))).collect();
    let e_model = anisotropic().with_correlation_length(0.4);
    let m_model = CouplingModel::lorentz(Which::Magnetic, 0.5, 1.1, 0.3).with_correlation_length(0.2);
    let r = LaplaceResponse::new(Arc::new(e_model), Arc::new(m_model), consts());
    let scan = lambda_reality_scan(&r, &ks, &rhos).map_err(e)?;
    Ok((scan.samples == 100 && scan.max_deviation < 1e-13, format!("{} samples, max {:.2e}", scan.samples, scan.max_deviation)))
}

fn pdot() -> Outcome {
    let m = CouplingModel::lorentz(Which::Electric, 1.2, 1.0, 0.5);
    let a = pdot_continuity(&m, &k(), 1e-3).map_err(e)?;
    let b = pdot_continuity(&m, &k(), 5e-4).map_err(e)?;
    Ok((
        a.relative_jump < 1e-5 && b.jump < a.jump,
        format!("relative jump {:.2e} at dt=1e-3, {:.2e} at dt=5e-4", a.relative_jump, b.relative_jump),
    ))
}

fn photon_families(m: &ModeCoefficients) -> [&Vec<Tensor3C>; 4] {
    [&m.gamma, &m.xi, &m.gamma_tilde, &m.xi_tilde]
}

fn conductor() -> Outcome {
    let k = Vec3::new(0.0, 0.3, 0.4);
    let times = [0.0, 1.0, 5.0, 20.0];
    let spec = ModeSpec { reservoir_order: 128, ..ModeSpec::default() };
    let bound = CouplingModel::lorentz(Which::Electric, 1.0, 1.0, 0.2);
    let zero = ConductorScenario::from_models(vec![bound.clone(), CouplingModel::drude(Which::Electric, 0.0, 0.3)], vec![], consts()).map_err(e)?;
    let a = conductor_modes(&zero, &k, &times, &spec).map_err(e)?;
    let b = mode_coefficients(&zero.dielectric(), &k, &times, &spec).map_err(e)?;
    let mut identity: f64 = 0.0;
    for (x, y) in photon_families(&a).into_iter().zip(photon_families(&b)) {
        for (p, q) in x.iter().zip(y) {
            identity = identity.max(norm(&(p - q)) / norm(q).max(1e-300));
        }
    }
    let s = ConductorScenario::from_models(vec![bound, CouplingModel::drude(Which::Electric, 0.8, 0.3)], vec![], consts()).map_err(e)?;
    let m = conductor_modes(&s, &k, &times, &spec).map_err(e)?;
    let (max_re, margin) = m.poles.as_ref().map_or((f64::NAN, 0.0), |p| (p.max_real_part(), s.tolerances.pole_margin * p.root_scale));
    let grid = TimeGrid::uniform(20.0, 2001).map_err(e)?;
    let quad = QuadratureSpec { rtol: 1e-11, max_order: 1 << 15, ..QuadratureSpec::default() };
    let q = q_kernel_consistency(&s, &k, &grid, &[], &quad).map_err(e)?;
    Ok((
        identity <= 1e-12 && max_re <= margin && q.decomposition_residual < 1e-5,
        format!("sigma=0 identity {identity:.1e}, max Re pole {max_re:.2e} (roundoff margin {margin:.1e}), Q residual {:.2e}", q.decomposition_residual),
    ))
}

fn talbot() -> Outcome {
    let k = Vec3::new(0.5, 0.2, 0.4);
    let times: Vec<f64> = (1..=8).map(|i| 0.5 * i as f64).collect();
    let conducting = ConductorScenario::from_models(
        vec![CouplingModel::lorentz(Which::Electric, 1.0, 1.0, 0.2), CouplingModel::drude(Which::Electric, 0.8, 0.3)],
        vec![],
        consts(),
    )
    .map_err(e)?
    .response();
    let drude_only = LaplaceResponse::new(Arc::new(drude()), empty(Which::Magnetic), consts());
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, r) in [("lorentz", lorentz_medium()), ("drude", drude_only), ("lorentz+drude", conducting), ("magnetodielectric", magnetodielectric())] {
        let mut spec = ModeSpec { reservoir_order: 64, ..ModeSpec::default() };
        spec.inverse.method = InverseMethod::RationalExact;
        let a = mode_coefficients(&r, &k, &times, &spec).map_err(e)?;
        spec.inverse.method = InverseMethod::Talbot;
        let b = mode_coefficients(&r, &k, &times, &spec).map_err(e)?;
        let mut worst: f64 = 0.0;
        for (x, y) in photon_families(&a).into_iter().zip(photon_families(&b)) {
            let s = x.iter().map(norm).fold(0.0, f64::max);
            for (p, q) in x.iter().zip(y) {
                worst = worst.max(norm(&(p - q)) / s);
            }
        }
        for (x, y) in [(&a.zeta, &b.zeta), (&a.eta, &b.eta), (&a.zeta_tilde, &b.zeta_tilde), (&a.eta_tilde, &b.eta_tilde)] {
            let s = x.iter().flatten().map(norm).fold(0.0, f64::max);
            if s > 0.0 {
                worst = worst.max(max_family_change(x, y));
            }
        }
        ok &= worst < 1e-8;
        parts.push(format!("{name} {worst:.2e}"));
    }
    Ok((ok, parts.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("fluctuation-dissipation for Lorentz, Drude and anisotropic media", fdt),
        ("coupling round trip through kernel and spectrum", round_trip),
        ("Kramers-Kronig residual and acausal counterexample", kramers_kronig),
        ("vacuum mode closed forms and commutators", vacuum),
        ("Lorentz equal-time commutators under reservoir refinement", lorentz_commutators),
        ("gauge invariance under random orthogonal A(omega)", gauge),
        ("Maxwell residuals per channel", maxwell),
        ("Lambda reality condition", reality),
        ("continuity of dP/dt at t = 0", pdot),
        ("conductor reduction, passivity and Q decomposition", conductor),
        ("Talbot against rational residues", talbot),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok(r) => r,
            Err(err) => (false, format!("error: {err}")),
        };
        if !ok {
            failed += 1;
        }
        let status = if ok { "PASS" } else { "FAIL" };
        println!("{status} [{:2}] {name}: {detail} ({:.1}s)", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
