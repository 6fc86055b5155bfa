//! Commutator coefficients of the noise polarizations and noise current, and
//! the continuity of `∂P/∂t` at the initial time.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::coupling::{Coupling, Which};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, QuadratureSpec};
use crate::response::{chi_kernel, chi_spectrum, SpectrumOptions, TimeGrid};
use crate::tensor::{c, complexify, norm, triad, zero3, PolarizationTriad, Tensor3C, Vec3, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommutatorKind {
    NoiseP,
    NoiseM,
    NoiseJ,
    FieldEqualTime,
}

/// Computed (`lhs`) versus expected (`rhs`) commutator coefficients on a grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub kind: CommutatorKind,
    pub k: [f64; 3],
    pub grid: Vec<f64>,
    pub lhs: Vec<Tensor3C>,
    pub rhs: Vec<Tensor3C>,
    /// `max ‖lhs − rhs‖ / ‖rhs‖` over grid points with nonzero `rhs`.
    pub max_rel_err: f64,
}

impl CommutatorReport {
    pub fn new(kind: CommutatorKind, k: &Vec3, grid: Vec<f64>, lhs: Vec<Tensor3C>, rhs: Vec<Tensor3C>) -> Self {
        let max_rel_err = lhs
            .iter()
            .zip(&rhs)
            .map(|(l, r)| {
                let d = norm(&(l - r));
                let s = norm(r);
                if s > 0.0 {
                    d / s
                } else if d == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max);
        Self { kind, k: [k.x, k.y, k.z], grid, lhs, rhs, max_rel_err }
    }
}

/// Per-frequency coefficient vectors `c_ν(ω) = √(4π/c³) ω f̲(ω,k) v_ν`
/// attaching the reservoir operators to the noise amplitude.
#[derive(Debug, Clone)]
pub struct NoiseCoefficients {
    pub k: Vec3,
    pub omegas: Vec<f64>,
    pub coefficients: Vec<[Vector3<C64>; 3]>,
}

impl NoiseCoefficients {
    /// `Σ_ν c_ν c_ν†` at grid point `i`.
    pub fn commutator(&self, i: usize) -> Tensor3C {
        self.coefficients[i].iter().fold(zero3(), |acc, v| acc + v * v.adjoint())
    }
}

fn reservoir_triad(k: &Vec3) -> Result<PolarizationTriad> {
    if k.norm() > 0.0 {
        triad(k)
    } else {
        triad(&Vec3::z())
    }
}

/// Coefficients built from the coupling and the electric (`v_ν`) or magnetic
/// (`s_ν`) triad vectors.
pub fn noise_coefficients(model: &dyn Coupling, k: &Vec3, omegas: &[f64]) -> Result<NoiseCoefficients> {
    let tr = reservoir_triad(k)?;
    let vecs = match model.which() {
        Which::Electric => tr.v(),
        Which::Magnetic => tr.s(),
    };
    let cc = model.constants().c;
    let scale = (4.0 * std::f64::consts::PI / cc.powi(3)).sqrt();
    let coefficients = omegas
        .iter()
        .map(|&w| {
            let f = model.eval(w, k)? * c(scale * w, 0.0);
            Ok(std::array::from_fn(|nu| f * complexify(&vecs[nu])))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NoiseCoefficients { k: *k, omegas: omegas.to_vec(), coefficients })
}

/// Kernel and spectrum settings used to form the right-hand sides.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseOptions {
    pub quadrature: QuadratureSpec,
    pub time_grid: TimeGrid,
    pub spectrum: SpectrumOptions,
}

impl NoiseOptions {
    /// A Gauss-panel time grid out to `t_max`, panels of width
    /// `panel_width`, with tight kernel quadrature.
    pub fn with_time_grid(t_max: f64, panel_width: f64, per_panel: usize) -> Result<Self> {
        Ok(Self {
            quadrature: QuadratureSpec { rtol: 1e-10, max_order: 1 << 15, ..QuadratureSpec::default() },
            time_grid: TimeGrid::gauss_panels(t_max, panel_width, per_panel)?,
            spectrum: SpectrumOptions::default(),
        })
    }

    /// Defaults scaled to the model's frequency scale. Rational models run
    /// long enough for the slowest pole to decay by `e^{-30}`.
    pub fn for_model(model: &dyn Coupling) -> Result<Self> {
        let s = model.frequency_scale();
        Self::with_time_grid(decay_span(model), 0.25 / s, 24)
    }

    /// As [`for_model`](Self::for_model), with panels just fine enough for
    /// spectra up to `omega_max`.
    pub fn for_band(model: &dyn Coupling, omega_max: f64) -> Result<Self> {
        let s = model.frequency_scale();
        let width = (1.0 / s).min(12.0 / omega_max.max(f64::MIN_POSITIVE));
        Self::with_time_grid(decay_span(model), width, 24)
    }
}

/// Time for the slowest pole of a rational model to decay by `e^{-30}`,
/// and at least `120/scale`.
fn decay_span(model: &dyn Coupling) -> f64 {
    let mut t_max = 120.0 / model.frequency_scale();
    for t in model.rational_terms(&Vec3::zeros()).unwrap_or_default() {
        let disc = 0.25 * t.damping * t.damping - t.resonance * t.resonance;
        let rate = if t.resonance == 0.0 {
            t.damping
        } else if disc > 0.0 {
            0.5 * t.damping - disc.sqrt()
        } else {
            0.5 * t.damping
        };
        if rate > 0.0 {
            t_max = t_max.max(30.0 / rate);
        }
    }
    t_max
}

/// `Im χ̂(ω)` of the model computed through its time-domain kernel.
fn dissipative_spectrum(model: &dyn Coupling, k: &Vec3, omegas: &[f64], opts: &NoiseOptions) -> Result<Vec<Tensor3C>> {
    let kern = chi_kernel(model, k, &opts.time_grid, &opts.quadrature)?;
    let spec = chi_spectrum(&kern, omegas, &opts.spectrum)?;
    Ok((0..omegas.len()).map(|i| spec.im(i)).collect())
}

/// Noise polarization (`Which::Electric`) or magnetization
/// (`Which::Magnetic`) commutator: reservoir assembly against
/// `(ħε₀/π) Im χ̂ᵉ` or `(ħ/μ₀π) Im χ̂ᵐ`.
pub fn noise_commutator(model: &dyn Coupling, k: &Vec3, omegas: &[f64], opts: &NoiseOptions) -> Result<CommutatorReport> {
    if omegas.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::ZeroFrequency);
    }
    let consts = model.constants();
    let coeffs = noise_coefficients(model, k, omegas)?;
    let lhs = (0..omegas.len()).map(|i| coeffs.commutator(i)).collect();
    let (kind, factor) = match model.which() {
        Which::Electric => (CommutatorKind::NoiseP, consts.hbar * consts.eps0 / std::f64::consts::PI),
        Which::Magnetic => (CommutatorKind::NoiseM, consts.hbar / (consts.mu0 * std::f64::consts::PI)),
    };
    let rhs = dissipative_spectrum(model, k, omegas, opts)?.into_iter().map(|m| m * c(factor, 0.0)).collect();
    Ok(CommutatorReport::new(kind, k, omegas.to_vec(), lhs, rhs))
}

/// Noise current `J_N = ∂P_N/∂t`: each reservoir frequency picks up a factor
/// `ω²` in the commutator. The target `(ħε₀/π) ω² Im χ̂ᵉ` is the cosine
/// transform of the conductor kernel `Q`.
pub fn noise_current_coefficient(
    model: &dyn Coupling,
    k: &Vec3,
    omegas: &[f64],
    opts: &NoiseOptions,
) -> Result<CommutatorReport> {
    if model.which() != Which::Electric {
        return Err(Error::InvalidInput("noise current needs an electric coupling".into()));
    }
    if omegas.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::ZeroFrequency);
    }
    let consts = model.constants();
    let coeffs = noise_coefficients(model, k, omegas)?;
    let lhs = omegas
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let jc: [Vector3<C64>; 3] = std::array::from_fn(|nu| coeffs.coefficients[i][nu] * c(*w, 0.0));
            jc.iter().fold(zero3(), |acc, v| acc + v * v.adjoint())
        })
        .collect();
    let factor = consts.hbar * consts.eps0 / std::f64::consts::PI;
    let rhs = dissipative_spectrum(model, k, omegas, opts)?
        .into_iter()
        .zip(omegas)
        .map(|(m, w)| m * c(factor * w * w, 0.0))
        .collect();
    Ok(CommutatorReport::new(CommutatorKind::NoiseJ, k, omegas.to_vec(), lhs, rhs))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub dt: f64,
    /// `|∂P/∂t(0⁺) − ∂P/∂t(0⁻)|` from one-sided second-order differences.
    pub jump: f64,
    /// Largest `|∂P/∂t|` over the probe pulse.
    pub peak: f64,
    pub relative_jump: f64,
}

/// Probe pulse `exp(−(t/τ)²)` along x.
fn probe(t: f64, tau: f64) -> Vector3<C64> {
    Vector3::new(c((-(t / tau).powi(2)).exp(), 0.0), C64::default(), C64::default())
}

/// Polarization response to the probe at signed time `s` using the
/// `|t|`-symmetric constitutive form: the memory integral runs over
/// `[0, |s|]` with the field sampled at `sign(s)·t′`.
fn polarization(model: &dyn Coupling, k: &Vec3, times: &[f64], tau: f64, spec: &QuadratureSpec) -> Result<Vec<Vector3<C64>>> {
    const NODES: usize = 48;
    let (x, w) = gauss_legendre(NODES);
    let mut eval_t = Vec::with_capacity(times.len() * NODES);
    for s in times {
        let a = s.abs();
        for xi in &x {
            // Memory argument |s| − t′ at node t′.
            let tp = 0.5 * a * (xi + 1.0);
            eval_t.push(a - tp);
        }
    }
    let mut sorted = eval_t.clone();
    sorted.push(0.0);
    sorted.sort_by(|a, b| a.total_cmp(b));
    sorted.dedup();
    let grid = TimeGrid::from_points(sorted.clone())?;
    let kern = chi_kernel(model, k, &grid, spec)?;
    let lookup = |t: f64| kern.values[sorted.binary_search_by(|v| v.total_cmp(&t)).unwrap()];
    let eps0 = model.constants().eps0;
    Ok(times
        .iter()
        .map(|s| {
            let a = s.abs();
            let sign = s.signum();
            let mut acc = Vector3::<C64>::zeros();
            for (xi, wi) in x.iter().zip(&w) {
                let tp = 0.5 * a * (xi + 1.0);
                acc += lookup(a - tp) * probe(sign * tp, tau) * c(0.5 * a * wi * eps0, 0.0);
            }
            acc
        })
        .collect())
}

/// Jump in `∂P/∂t` across `t = 0` for a Gaussian probe of width `5/ω_s`,
/// `ω_s` being the model frequency scale.
pub fn pdot_continuity(model: &dyn Coupling, k: &Vec3, dt: f64) -> Result<ContinuityReport> {
    if !(dt > 0.0) {
        return Err(Error::InvalidInput("dt must be positive".into()));
    }
    if model.is_zero() {
        return Ok(ContinuityReport { dt, jump: 0.0, peak: 0.0, relative_jump: 0.0 });
    }
    let tau = 5.0 / model.frequency_scale();
    let spec = QuadratureSpec { rtol: 1e-11, max_order: 1 << 15, ..QuadratureSpec::default() };
    let near = [-2.0 * dt, -dt, 0.0, dt, 2.0 * dt];
    let p = polarization(model, k, &near, tau, &spec)?;
    let right = (p[3] * c(4.0, 0.0) - p[2] * c(3.0, 0.0) - p[4]) / c(2.0 * dt, 0.0);
    let left = (p[2] * c(3.0, 0.0) - p[1] * c(4.0, 0.0) + p[0]) / c(2.0 * dt, 0.0);
    let jump = (right - left).norm();
    let h = tau / 40.0;
    let span: Vec<f64> = (-160..=160).map(|i| i as f64 * h).collect();
    let pw = polarization(model, k, &span, tau, &spec)?;
    let peak = (1..span.len() - 1)
        .map(|i| ((pw[i + 1] - pw[i - 1]) / c(2.0 * h, 0.0)).norm())
        .fold(0.0, f64::max);
    let relative_jump = if peak > 0.0 { jump / peak } else { jump };
    Ok(ContinuityReport { dt, jump, peak, relative_jump })
}
