//! Conducting media: free carriers enter Λ through `σ̂ = ρε₀χ̂_f`, and the
//! response kernel `Q = ε₀∂χ_b/∂t + σ` ties both to the couplings.

use std::sync::Arc;

use serde::Serialize;

use crate::coupling::{Coupling, CouplingModel, CouplingSet, ModelKind, Which};
use crate::modes::{mode_coefficients, ModeCoefficients, ModeSpec};
use crate::noise::{noise_coefficients, CommutatorKind, CommutatorReport, NoiseOptions};
use crate::quadrature::QuadratureSpec;
use crate::response::{conductor_q, q_kernel, LaplaceResponse, TimeGrid};
use crate::tensor::{c, hermitian_part, min_eigenvalue, zero3, PhysicalConstants, Tensor3C, Vec3};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConductorTolerances {
    /// Bound on `‖σ − ε₀∂χ_f/∂t‖ / ‖Q‖`.
    pub decomposition: f64,
    /// Bound on the noise-current commutator error.
    pub noise_current: f64,
    /// Poles with `Re ρ` above this (relative to the pole scale) are rejected.
    pub pole_margin: f64,
}

impl Default for ConductorTolerances {
    fn default() -> Self {
        Self { decomposition: 1e-5, noise_current: 1e-5, pole_margin: 1e-9 }
    }
}

/// A medium split into bound charges, free carriers and magnetization.
#[derive(Debug, Clone)]
pub struct ConductorScenario {
    pub bound: Arc<dyn Coupling>,
    pub free: Option<Arc<dyn Coupling>>,
    pub magnetic: Arc<dyn Coupling>,
    pub constants: PhysicalConstants,
    pub tolerances: ConductorTolerances,
}

impl ConductorScenario {
    /// Drude terms among `electric` become free carriers; the rest are bound.
    pub fn from_models(electric: Vec<CouplingModel>, magnetic: Vec<CouplingModel>, constants: PhysicalConstants) -> Result<Self> {
        if electric.iter().any(|m| m.which != Which::Electric) || magnetic.iter().any(|m| m.which != Which::Magnetic) {
            return Err(Error::InvalidInput("conductor models must match their field".into()));
        }
        let (free, bound) = split_free_carriers(electric);
        let free = if free.is_empty() {
            None
        } else {
            Some(Arc::new(CouplingSet::from_models(Which::Electric, constants, free)?) as Arc<dyn Coupling>)
        };
        Ok(Self {
            bound: Arc::new(CouplingSet::from_models(Which::Electric, constants, bound)?),
            free,
            magnetic: Arc::new(CouplingSet::from_models(Which::Magnetic, constants, magnetic)?),
            constants,
            tolerances: ConductorTolerances::default(),
        })
    }

    /// True when the free-carrier channel is absent or identically zero.
    pub fn is_dielectric(&self) -> bool {
        self.free.as_ref().is_none_or(|f| f.is_zero())
    }

    /// The Λ data with `ρε̂ → ρε̂ + σ̂`.
    pub fn response(&self) -> LaplaceResponse {
        let r = self.dielectric();
        match &self.free {
            Some(f) if !f.is_zero() => r.with_conductor(f.clone()),
            _ => r,
        }
    }

    /// The same medium with the free carriers removed.
    pub fn dielectric(&self) -> LaplaceResponse {
        LaplaceResponse::new(self.bound.clone(), self.magnetic.clone(), self.constants)
    }
}

/// Separates Drude terms (free carriers) from bound terms.
pub fn split_free_carriers(models: Vec<CouplingModel>) -> (Vec<CouplingModel>, Vec<CouplingModel>) {
    models.into_iter().partition(|m| matches!(m.kind, ModelKind::Drude { .. }))
}

/// Mode coefficients of the conducting medium. Fails with `NonPassive` when a
/// located pole lies to the right of the imaginary axis.
pub fn conductor_modes(scenario: &ConductorScenario, k: &Vec3, times: &[f64], spec: &ModeSpec) -> Result<ModeCoefficients> {
    let modes = mode_coefficients(&scenario.response(), k, times, spec)?;
    if let Some(p) = &modes.poles {
        let max_real = p.max_real_part();
        if max_real > scenario.tolerances.pole_margin * p.root_scale {
            return Err(Error::NonPassive { max_real });
        }
    }
    Ok(modes)
}

#[derive(Debug, Clone, Serialize)]
pub struct QConsistencyReport {
    pub k: [f64; 3],
    /// `max‖σ − ε₀∂χ_f/∂t‖ / max‖Q‖` on the grid.
    pub decomposition_residual: f64,
    /// `σ(0⁺)`.
    pub sigma_initial: Tensor3C,
    /// Smallest eigenvalue of the Hermitian part of `σ(0⁺)`.
    pub sigma_initial_min_eigenvalue: f64,
    /// Noise-current commutator against `(ħε₀/π)ω² Im χ̂`, when requested.
    pub noise_current: Option<CommutatorReport>,
    pub passed: bool,
}

/// Checks the `Q` decomposition on a uniform grid and, for nonempty
/// `omegas`, the noise-current commutator of the full electric coupling.
pub fn q_kernel_consistency(
    scenario: &ConductorScenario,
    k: &Vec3,
    grid: &TimeGrid,
    omegas: &[f64],
    spec: &QuadratureSpec,
) -> Result<QConsistencyReport> {
    let kern = conductor_q(scenario.bound.as_ref(), scenario.free.as_deref(), k, grid, spec)?;
    let sigma_initial = kern.sigma[0];
    let noise_current = if omegas.is_empty() {
        None
    } else {
        let mut terms = vec![scenario.bound.clone()];
        terms.extend(scenario.free.clone());
        let all = CouplingSet::new(Which::Electric, scenario.constants, terms)?;
        if all.is_zero() {
            None
        } else {
            Some(noise_current_from_q(&all, k, omegas)?)
        }
    };
    let passed = kern.decomposition_residual < scenario.tolerances.decomposition
        && noise_current.as_ref().is_none_or(|r| r.max_rel_err < scenario.tolerances.noise_current);
    Ok(QConsistencyReport {
        k: [k.x, k.y, k.z],
        decomposition_residual: kern.decomposition_residual,
        sigma_initial,
        sigma_initial_min_eigenvalue: min_eigenvalue(&hermitian_part(&sigma_initial)),
        noise_current,
        passed,
    })
}

/// Time span of the `Q` cosine transform, in units of the inverse frequency scale.
const Q_SPAN: f64 = 400.0;

/// `Σ_ν ω² c_ν c_ν†` of the noise current `J_N = ∂P_N/∂t` against
/// `(ħ/π) ω ∫₀^∞ Q(t) cos ωt dt`, the cosine transform of the conductor kernel.
pub fn noise_current_from_q(model: &dyn Coupling, k: &Vec3, omegas: &[f64]) -> Result<CommutatorReport> {
    if omegas.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::ZeroFrequency);
    }
    let consts = model.constants();
    let scale = model.frequency_scale();
    let opts = NoiseOptions::with_time_grid(Q_SPAN / scale, 1.0 / scale, 16)?;
    let grid = &opts.time_grid;
    let weights = grid.weights.as_ref().ok_or_else(|| Error::GridTooCoarse("noise grid needs weights".into()))?;
    let (q, _) = q_kernel(model, k, grid, &opts.quadrature)?;
    let coeffs = noise_coefficients(model, k, omegas)?;
    let lhs = omegas
        .iter()
        .enumerate()
        .map(|(i, w)| {
            coeffs.coefficients[i]
                .iter()
                .fold(zero3(), |acc, v| acc + v * v.adjoint() * c(w * w, 0.0))
        })
        .collect();
    let rhs = omegas
        .iter()
        .map(|w| {
            let ft = grid.t.iter().zip(weights).zip(&q).fold(zero3(), |acc, ((t, wt), qv)| acc + qv * c(wt * (w * t).cos(), 0.0));
            ft * c(consts.hbar * w / std::f64::consts::PI, 0.0)
        })
        .collect();
    Ok(CommutatorReport::new(CommutatorKind::NoiseJ, k, omegas.to_vec(), lhs, rhs))
}
