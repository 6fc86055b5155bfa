use std::sync::Arc;

use mdqed::coupling::{apply_gauge, Coupling, CouplingModel, GaugeTransform, Which};
use mdqed::noise::{noise_commutator, noise_current_coefficient, pdot_continuity, NoiseOptions};
use mdqed::tensor::{norm, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn omegas() -> Vec<f64> {
    (0..50).map(|i| 0.1 + 4.9 * i as f64 / 49.0).collect()
}

fn k() -> Vec3 {
    Vec3::new(0.3, 0.1, -0.2)
}

fn media() -> Vec<(&'static str, CouplingModel)> {
    vec![
        ("lorentz", CouplingModel::lorentz(Which::Electric, 1.2, 1.0, 0.5).with_correlation_length(0.4)),
        ("drude", CouplingModel::drude(Which::Electric, 1.0, 0.5)),
        (
            "anisotropic",
            CouplingModel::anisotropic(Which::Electric, [1.0, 0.7, 0.5], [1.0, 1.3, 0.8], [0.5, 0.6, 0.4]),
        ),
        ("magnetic", CouplingModel::lorentz(Which::Magnetic, 0.8, 1.0, 0.5)),
    ]
}

#[test]
fn zero_coupling_gives_zero_commutators() {
    let m = CouplingModel::lorentz(Which::Electric, 0.0, 1.0, 0.5);
    let opts = NoiseOptions::with_time_grid(20.0, 0.5, 16).unwrap();
    let r = noise_commutator(&m, &k(), &omegas(), &opts).unwrap();
    assert!(r.lhs.iter().chain(&r.rhs).all(|t| norm(t) == 0.0));
    assert_eq!(r.max_rel_err, 0.0);
    let j = noise_current_coefficient(&m, &k(), &omegas(), &opts).unwrap();
    assert_eq!(j.max_rel_err, 0.0);
}

#[test]
fn fluctuation_dissipation_holds_for_each_family() {
    for (name, m) in media() {
        let opts = NoiseOptions::for_model(&m).unwrap();
        let r = noise_commutator(&m, &k(), &omegas(), &opts).unwrap();
        assert!(r.max_rel_err < 1e-5, "{name}: {}", r.max_rel_err);
        for l in &r.lhs {
            assert!(mdqed::tensor::is_hermitian(l, 1e-12 * norm(l).max(1e-300)));
            assert!(mdqed::tensor::min_eigenvalue(l) >= -1e-12 * norm(l));
        }
    }
}

#[test]
fn noise_current_scales_as_omega_squared() {
    let m = CouplingModel::drude(Which::Electric, 1.0, 0.5);
    let opts = NoiseOptions::for_model(&m).unwrap();
    let p = noise_commutator(&m, &k(), &omegas(), &opts).unwrap();
    let j = noise_current_coefficient(&m, &k(), &omegas(), &opts).unwrap();
    for ((w, lp), lj) in omegas().iter().zip(&p.lhs).zip(&j.lhs) {
        let scaled = lp * mdqed::tensor::c(w * w, 0.0);
        assert!(norm(&(lj - scaled)) < 1e-10 * norm(&scaled));
    }
    assert!(j.max_rel_err < 1e-5, "{}", j.max_rel_err);
    let lorentz = CouplingModel::lorentz(Which::Electric, 1.2, 1.0, 0.5);
    let j = noise_current_coefficient(&lorentz, &k(), &omegas(), &NoiseOptions::for_model(&lorentz).unwrap()).unwrap();
    assert!(j.max_rel_err < 1e-5, "{}", j.max_rel_err);
}

#[test]
fn commutators_are_gauge_invariant() {
    let base: Arc<dyn Coupling> =
        Arc::new(CouplingModel::anisotropic(Which::Electric, [1.0, 0.7, 0.5], [1.0, 1.3, 0.8], [0.5, 0.6, 0.4]));
    let opts = NoiseOptions::with_time_grid(100.0, 0.5, 24).unwrap();
    let grid = omegas();
    let reference = noise_commutator(base.as_ref(), &k(), &grid, &opts).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let axis = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let gauge = GaugeTransform::Rotation {
            axis,
            angle: rng.gen_range(0.0..6.3),
            angle_rate: rng.gen_range(-2.0..2.0),
        };
        let g = apply_gauge(base.clone(), gauge).unwrap();
        let r = noise_commutator(&g, &k(), &grid, &opts).unwrap();
        for (a, b) in r.lhs.iter().zip(&reference.lhs) {
            assert!(norm(&(a - b)) <= 1e-12 * norm(b));
        }
    }
}

#[test]
fn pdot_is_continuous_at_origin() {
    let zero = CouplingModel::lorentz(Which::Electric, 0.0, 1.0, 0.5);
    assert_eq!(pdot_continuity(&zero, &k(), 1e-3).unwrap().jump, 0.0);
    let m = CouplingModel::lorentz(Which::Electric, 1.2, 1.0, 0.5);
    let a = pdot_continuity(&m, &k(), 1e-3).unwrap();
    let b = pdot_continuity(&m, &k(), 5e-4).unwrap();
    assert!(a.relative_jump < 1e-5, "{}", a.relative_jump);
    assert!(a.jump >= 2.0 * b.jump, "{} vs {}", a.jump, b.jump);
}
