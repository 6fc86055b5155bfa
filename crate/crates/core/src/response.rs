//! Susceptibility kernels in the time domain, their spectra, Kramers–Kronig
//! checks, Laplace-domain permittivity/permeability and the conductor kernel.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::{kernel_prefactor, Coupling, RationalTerm, Which};
use crate::error::{Error, Result};
use crate::quadrature::{cos_tail_square, gauss_legendre, sin_tail_cubic, QuadratureSpec, Rule, RuleKind};
use crate::tensor::{
    antihermitian_part, c, hermitian_part, identity3, min_eigenvalue, norm, zero3, PhysicalConstants, Tensor3C,
    Vec3, C64, I,
};

/// Sample times starting at 0. `weights`, when present, is a quadrature rule
/// for `∫₀^end`; otherwise the grid must be uniform and ends at its last point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t: Vec<f64>,
    pub weights: Option<Vec<f64>>,
    pub end: f64,
}

impl TimeGrid {
    /// `n` equally spaced points on `[0, t_max]`.
    pub fn uniform(t_max: f64, n: usize) -> Result<Self> {
        if n < 2 || !(t_max > 0.0) {
            return Err(Error::GridTooCoarse(format!("uniform grid needs n >= 2 and t_max > 0 (n={n})")));
        }
        let dt = t_max / (n - 1) as f64;
        Ok(Self { t: (0..n).map(|i| i as f64 * dt).collect(), weights: None, end: t_max })
    }

    /// Gauss–Legendre panels on `[0, t_max]`, with `t = 0` prepended at zero
    /// weight so the grid still starts at the origin.
    pub fn gauss_panels(t_max: f64, panel_width: f64, per_panel: usize) -> Result<Self> {
        if !(t_max > 0.0) || !(panel_width > 0.0) || per_panel == 0 {
            return Err(Error::GridTooCoarse("Gauss time grid needs positive extent and panels".into()));
        }
        let panels = (t_max / panel_width).ceil().max(1.0) as usize;
        let h = t_max / panels as f64;
        let (x, w) = gauss_legendre(per_panel);
        let mut t = vec![0.0];
        let mut weights = vec![0.0];
        for p in 0..panels {
            for (xi, wi) in x.iter().zip(&w) {
                t.push(h * (p as f64 + 0.5 * (xi + 1.0)));
                weights.push(0.5 * h * wi);
            }
        }
        Ok(Self { t, weights: Some(weights), end: t_max })
    }

    /// Arbitrary increasing points; must start at 0.
    pub fn from_points(t: Vec<f64>) -> Result<Self> {
        if t.first() != Some(&0.0) || t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::GridTooCoarse("time grid must start at 0 and increase".into()));
        }
        let end = *t.last().unwrap();
        Ok(Self { t, weights: None, end })
    }

    pub fn t_max(&self) -> f64 {
        *self.t.last().unwrap_or(&0.0)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Spacing, if the grid is uniform.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.t.len() < 2 {
            return None;
        }
        let dt = self.t[1] - self.t[0];
        let ok = self.t.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt);
        ok.then_some(dt)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelMeta {
    /// Number of frequency nodes in the final rule.
    pub order: usize,
    pub cutoff: f64,
    /// Relative change at the last order doubling.
    pub estimated_error: f64,
    /// Whether the algebraic tail beyond the cutoff was added analytically.
    pub tail_corrected: bool,
    pub rule: RuleKind,
}

/// `χ(k, t)` on a time grid; zero for `t ≤ 0` by construction.
#[derive(Debug, Clone)]
pub struct SusceptibilityKernel {
    pub which: Which,
    pub k: Vec3,
    pub grid: TimeGrid,
    pub values: Vec<Tensor3C>,
    pub meta: KernelMeta,
}

impl SusceptibilityKernel {
    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(norm).fold(0.0, f64::max)
    }

    pub fn max_imaginary(&self) -> f64 {
        self.values.iter().flat_map(|v| v.iter().map(|z| z.im.abs())).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy)]
enum Trig {
    /// `∫ ω² sin(ωt) S dω`
    Sin,
    /// `∫ ω³ cos(ωt) S dω`
    Cos,
}

fn frequency_upper(model: &dyn Coupling, spec: &QuadratureSpec) -> f64 {
    spec.cutoff
        .or_else(|| model.support())
        .unwrap_or(spec.cutoff_factor * model.frequency_scale())
}

/// `prefactor · ∫₀^∞ ω^p trig(ωt) S(ω, k) dω` on every grid time, with order
/// doubling until the result settles.
fn trig_kernel(
    model: &dyn Coupling,
    k: &Vec3,
    times: &[f64],
    spec: &QuadratureSpec,
    trig: Trig,
    prefactor: f64,
) -> Result<(Vec<Tensor3C>, KernelMeta)> {
    let upper = frequency_upper(model, spec);
    if !(upper > 0.0) || !upper.is_finite() {
        return Err(Error::InvalidInput(format!("invalid quadrature cutoff {upper}")));
    }
    let tail = model.support().is_none();
    let breaks = model.breakpoints();
    let power = match trig {
        Trig::Sin => 2,
        Trig::Cos => 3,
    };
    if model.is_zero() {
        let rule = Rule::graded(&breaks, upper, spec.start_order);
        let meta = KernelMeta { order: rule.order(), cutoff: upper, estimated_error: 0.0, tail_corrected: tail, rule: rule.kind };
        return Ok((vec![zero3(); times.len()], meta));
    }
    // Asymptote coefficient: the integrand behaves as a/ω³ (sin) or a/ω² (cos).
    let tail_coeff = if tail {
        let s = model.density(upper, k)?;
        s * c(prefactor * upper.powi(5), 0.0)
    } else {
        zero3()
    };
    let mut order = spec.start_order.max(32);
    let mut previous: Option<Vec<Tensor3C>> = None;
    loop {
        let rule = Rule::graded(&breaks, upper, order);
        let weighted: Vec<(f64, Tensor3C)> = rule
            .nodes
            .par_iter()
            .zip(&rule.weights)
            .map(|(&w, &wt)| Ok((w, model.density(w, k)? * c(prefactor * wt * w.powi(power), 0.0))))
            .collect::<Result<_>>()?;
        let values: Vec<Tensor3C> = times
            .par_iter()
            .map(|&t| {
                let mut acc = zero3();
                for (w, d) in &weighted {
                    let f = match trig {
                        Trig::Sin => (w * t).sin(),
                        Trig::Cos => (w * t).cos(),
                    };
                    acc += d * c(f, 0.0);
                }
                if tail {
                    let f = match trig {
                        Trig::Sin => sin_tail_cubic(upper, t),
                        Trig::Cos => cos_tail_square(upper, t),
                    };
                    acc += tail_coeff * c(f, 0.0);
                }
                acc
            })
            .collect();
        if let Some(prev) = &previous {
            let scale = values.iter().map(norm).fold(0.0, f64::max);
            let diff = values.iter().zip(prev).map(|(a, b)| norm(&(a - b))).fold(0.0, f64::max);
            let change = if scale > 0.0 { diff / scale } else { diff };
            if change < spec.rtol {
                let meta = KernelMeta { order: rule.order(), cutoff: upper, estimated_error: change, tail_corrected: tail, rule: rule.kind };
                return Ok((values, meta));
            }
            if order * 2 > spec.max_order {
                return Err(Error::QuadratureNotConverged { change, order: rule.order() });
            }
        }
        previous = Some(values);
        order *= 2;
    }
}

/// `χ(k, t) = C ∫₀^∞ ω² sin(ωt) f̲f̲† dω` with the electric or magnetic
/// prefactor `C`.
pub fn chi_kernel(
    model: &dyn Coupling,
    k: &Vec3,
    grid: &TimeGrid,
    spec: &QuadratureSpec,
) -> Result<SusceptibilityKernel> {
    if grid.t.first().is_some_and(|t| *t < 0.0) {
        return Err(Error::GridTooCoarse("kernel grid must lie in t >= 0".into()));
    }
    let pref = kernel_prefactor(model.which(), &model.constants());
    let (values, meta) = trig_kernel(model, k, &grid.t, spec, Trig::Sin, pref)?;
    Ok(SusceptibilityKernel { which: model.which(), k: *k, grid: grid.clone(), values, meta })
}

/// `Q(k, t) = (8π/ħc³) ∫₀^∞ ω³ cos(ωt) f̲f̲† dω`.
pub fn q_kernel(model: &dyn Coupling, k: &Vec3, grid: &TimeGrid, spec: &QuadratureSpec) -> Result<(Vec<Tensor3C>, KernelMeta)> {
    let consts = model.constants();
    let pref = kernel_prefactor(Which::Electric, &consts) * consts.eps0;
    trig_kernel(model, k, &grid.t, spec, Trig::Cos, pref)
}

/// Fourth-order finite-difference derivative on a uniform grid.
pub fn derivative(values: &[Tensor3C], dt: f64) -> Result<Vec<Tensor3C>> {
    let n = values.len();
    if n < 5 {
        return Err(Error::GridTooCoarse("derivative needs at least 5 samples".into()));
    }
    let f = |i: usize| values[i];
    let s = 1.0 / (12.0 * dt);
    let lin = |terms: &[(f64, usize)]| {
        let mut acc = zero3();
        for (w, i) in terms {
            acc += f(*i) * c(w * s, 0.0);
        }
        acc
    };
    let mut out = Vec::with_capacity(n);
    out.push(lin(&[(-25.0, 0), (48.0, 1), (-36.0, 2), (16.0, 3), (-3.0, 4)]));
    out.push(lin(&[(-3.0, 0), (-10.0, 1), (18.0, 2), (-6.0, 3), (1.0, 4)]));
    for i in 2..n - 2 {
        out.push(lin(&[(1.0, i - 2), (-8.0, i - 1), (8.0, i + 1), (-1.0, i + 2)]));
    }
    let m = n - 1;
    out.push(lin(&[(3.0, m), (10.0, m - 1), (-18.0, m - 2), (6.0, m - 3), (-1.0, m - 4)]));
    out.push(lin(&[(25.0, m), (-48.0, m - 1), (36.0, m - 2), (-16.0, m - 3), (3.0, m - 4)]));
    Ok(out)
}

/// The conductor kernel `Q` and the conductivity it implies once the bound
/// polarization current `ε₀∂χ_b/∂t` is removed.
#[derive(Debug, Clone)]
pub struct ConductorKernel {
    pub k: Vec3,
    pub grid: TimeGrid,
    pub q: Vec<Tensor3C>,
    /// `σ(t) = Q − ε₀ ∂χ_b/∂t`, the derivative taken by finite differences.
    pub sigma: Vec<Tensor3C>,
    /// `max‖σ − ε₀∂χ_f/∂t‖ / max‖Q‖`, where `ε₀∂χ_f/∂t` is evaluated by
    /// quadrature from the free-carrier couplings alone.
    pub decomposition_residual: f64,
    pub meta: KernelMeta,
}

/// Builds `Q` for a medium split into bound (`bound`) and free-carrier
/// (`free`) couplings on a uniform grid.
pub fn conductor_q(
    bound: &dyn Coupling,
    free: Option<&dyn Coupling>,
    k: &Vec3,
    grid: &TimeGrid,
    spec: &QuadratureSpec,
) -> Result<ConductorKernel> {
    let dt = grid
        .uniform_step()
        .ok_or_else(|| Error::GridTooCoarse("conductor kernel needs a uniform time grid".into()))?;
    let eps0 = bound.constants().eps0;
    let (q_bound, meta) = q_kernel(bound, k, grid, spec)?;
    let chi_b = chi_kernel(bound, k, grid, spec)?;
    let dchi = derivative(&chi_b.values, dt)?;
    let q_free = match free {
        Some(f) => Some(q_kernel(f, k, grid, spec)?.0),
        None => None,
    };
    let q: Vec<Tensor3C> = match &q_free {
        Some(qf) => q_bound.iter().zip(qf).map(|(a, b)| a + b).collect(),
        None => q_bound,
    };
    let sigma: Vec<Tensor3C> = q.iter().zip(&dchi).map(|(qv, d)| qv - d * c(eps0, 0.0)).collect();
    let scale = q.iter().map(norm).fold(0.0, f64::max);
    let diff = sigma
        .iter()
        .enumerate()
        .map(|(i, s)| norm(&(s - q_free.as_ref().map_or(zero3(), |qf| qf[i]))))
        .fold(0.0, f64::max);
    let decomposition_residual = if scale > 0.0 { diff / scale } else { diff };
    Ok(ConductorKernel { k: *k, grid: grid.clone(), q, sigma, decomposition_residual, meta })
}

/// `χ̂(k, ω)` on a frequency grid.
#[derive(Debug, Clone)]
pub struct ResponseSpectrum {
    pub which: Which,
    pub k: Vec3,
    pub omegas: Vec<f64>,
    pub values: Vec<Tensor3C>,
}

impl ResponseSpectrum {
    /// Dissipative part `(χ̂ − χ̂†)/2i`.
    pub fn im(&self, i: usize) -> Tensor3C {
        antihermitian_part(&self.values[i])
    }

    /// Reactive part `(χ̂ + χ̂†)/2`.
    pub fn re(&self, i: usize) -> Tensor3C {
        hermitian_part(&self.values[i])
    }

    /// Smallest eigenvalue of the dissipative part over `ω > 0`.
    pub fn min_im_eigenvalue(&self) -> f64 {
        (0..self.omegas.len())
            .filter(|&i| self.omegas[i] > 0.0)
            .map(|i| min_eigenvalue(&self.im(i)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Spectrum of the time-reversed kernel `χ(−t)`: the reactive part flips
    /// sign while the dissipative part is kept. Violates causality whenever
    /// the original response is nonzero.
    pub fn time_reversed(&self) -> Self {
        let values = (0..self.values.len()).map(|i| -self.re(i) + self.im(i) * I).collect();
        Self { values, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumOptions {
    /// Largest acceptable `‖χ(T)‖/max‖χ‖` for a kernel treated as decayed.
    pub tail_rtol: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { tail_rtol: 1e-6 }
    }
}

/// Filon–Simpson weights `(α, β, γ)` for `θ = ωh`.
fn filon_coefficients(theta: f64) -> (f64, f64, f64) {
    if theta.abs() < 1.0 / 6.0 {
        let t2 = theta * theta;
        let t3 = t2 * theta;
        let alpha = t3 * (2.0 / 45.0 - t2 * (2.0 / 315.0 - t2 * 2.0 / 4725.0));
        let beta = 2.0 / 3.0 + t2 * (2.0 / 15.0 - t2 * (4.0 / 105.0 - t2 * 2.0 / 567.0));
        let gamma = 4.0 / 3.0 - t2 * (2.0 / 15.0 - t2 * (1.0 / 210.0 - t2 / 11340.0));
        return (alpha, beta, gamma);
    }
    let (s, co) = theta.sin_cos();
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let alpha = 1.0 / theta + (2.0 * theta).sin() / (2.0 * t2) - 2.0 * s * s / t3;
    let beta = 2.0 * ((1.0 + co * co) / t2 - (2.0 * theta).sin() / t3);
    let gamma = 4.0 * (s / t3 - co / t2);
    (alpha, beta, gamma)
}

/// `∫₀^T f(t) e^{iωt} dt` for samples on a uniform grid with an odd count.
fn filon(values: &[Tensor3C], t: &[f64], dt: f64, omega: f64) -> Tensor3C {
    let n = values.len() - 1;
    let (alpha, beta, gamma) = filon_coefficients(omega * dt);
    let mut ce = zero3();
    let mut se = zero3();
    let mut co = zero3();
    let mut so = zero3();
    for (j, (v, tj)) in values.iter().zip(t).enumerate() {
        let (s, cs) = (omega * tj).sin_cos();
        let half = if j == 0 || j == n { 0.5 } else { 1.0 };
        if j % 2 == 0 {
            ce += v * c(half * cs, 0.0);
            se += v * c(half * s, 0.0);
        } else {
            co += v * c(cs, 0.0);
            so += v * c(s, 0.0);
        }
    }
    let (s0, c0) = (omega * t[0]).sin_cos();
    let (sn, cn) = (omega * t[n]).sin_cos();
    let f0 = values[0];
    let fnn = values[n];
    let cos_part = (fnn * c(sn, 0.0) - f0 * c(s0, 0.0)) * c(alpha, 0.0) + ce * c(beta, 0.0) + co * c(gamma, 0.0);
    let sin_part = (f0 * c(c0, 0.0) - fnn * c(cn, 0.0)) * c(alpha, 0.0) + se * c(beta, 0.0) + so * c(gamma, 0.0);
    (cos_part + sin_part * I) * c(dt, 0.0)
}

/// Half-line transform `χ̂(ω) = ∫₀^∞ χ(t) e^{iωt} dt`.
///
/// Gauss-weighted grids use their weights; uniform grids use Filon–Simpson
/// and need an odd number of samples. A kernel that has settled to a nonzero
/// constant (free carriers) has its tail added analytically.
pub fn chi_spectrum(
    kernel: &SusceptibilityKernel,
    omegas: &[f64],
    opts: &SpectrumOptions,
) -> Result<ResponseSpectrum> {
    let grid = &kernel.grid;
    let n = grid.len();
    if n < 3 {
        return Err(Error::GridTooCoarse("kernel has fewer than 3 samples".into()));
    }
    if omegas.iter().any(|w| *w < 0.0 || !w.is_finite()) {
        return Err(Error::InvalidInput("spectrum frequencies must be finite and >= 0".into()));
    }
    let peak = kernel.max_norm();
    let last = kernel.values[n - 1];
    let mut settled: Option<Tensor3C> = None;
    if peak > 0.0 {
        let ratio = norm(&last) / peak;
        if ratio > opts.tail_rtol {
            let t_max = grid.t_max();
            let j = grid.t.partition_point(|t| *t < 0.9 * t_max).min(n - 1);
            let drift = norm(&(last - kernel.values[j])) / norm(&last);
            if drift > opts.tail_rtol {
                return Err(Error::TailNotDecayed { ratio });
            }
            settled = Some(last);
        }
    }
    if settled.is_some() && omegas.contains(&0.0) {
        return Err(Error::ZeroFrequency);
    }
    let uniform = match &grid.weights {
        Some(_) => None,
        None => {
            let dt = grid
                .uniform_step()
                .ok_or_else(|| Error::GridTooCoarse("unweighted kernel grid must be uniform".into()))?;
            if n % 2 == 0 {
                return Err(Error::GridTooCoarse("Filon integration needs an odd number of samples".into()));
            }
            Some(dt)
        }
    };
    let t_end = grid.end;
    let values = omegas
        .par_iter()
        .map(|&w| {
            let mut acc = match (uniform, &grid.weights) {
                (Some(dt), _) => filon(&kernel.values, &grid.t, dt, w),
                (None, Some(weights)) => {
                    let mut acc = zero3();
                    for ((v, t), wt) in kernel.values.iter().zip(&grid.t).zip(weights) {
                        acc += v * C64::from_polar(*wt, w * t);
                    }
                    acc
                }
                (None, None) => unreachable!(),
            };
            if let Some(inf) = settled {
                acc += inf * (I * C64::from_polar(1.0 / w, w * t_end));
            }
            acc
        })
        .collect();
    Ok(ResponseSpectrum { which: kernel.which, k: kernel.k, omegas: omegas.to_vec(), values })
}

/// Midpoint-offset frequency grid `ω_j = (j + ½)·ω_max/n` for [`kk_check`].
pub fn kk_grid(omega_max: f64, n: usize) -> Vec<f64> {
    let h = omega_max / n as f64;
    (0..n).map(|j| (j as f64 + 0.5) * h).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KkReport {
    pub max_residual: f64,
    pub n: usize,
    pub omega_max: f64,
}

/// Rebuilds the reactive part from the dissipative part by a principal-value
/// Hilbert transform and compares with the direct reactive part.
///
/// The grid must be the midpoint-offset grid of [`kk_grid`]. The dissipative
/// part is continued to negative frequency by `A(−ω) = −conj A(ω)`, and the
/// principal value is taken with Maclaurin's odd-offset rule, which straddles
/// the singular point.
pub fn kk_check(spectrum: &ResponseSpectrum) -> Result<KkReport> {
    let w = &spectrum.omegas;
    let n = w.len();
    if n < 16 {
        return Err(Error::GridTooCoarse(format!("Kramers-Kronig check needs at least 16 points, got {n}")));
    }
    let h = w[1] - w[0];
    let on_grid = w.iter().enumerate().all(|(j, x)| (x - (j as f64 + 0.5) * h).abs() <= 1e-9 * h * (j + 1) as f64);
    if !(h > 0.0) || !on_grid {
        return Err(Error::GridTooCoarse("Kramers-Kronig check needs the grid omega_j = (j + 1/2) h".into()));
    }
    let im: Vec<Tensor3C> = (0..n).map(|i| spectrum.im(i)).collect();
    let re: Vec<Tensor3C> = (0..n).map(|i| spectrum.re(i)).collect();
    let rebuilt: Vec<Tensor3C> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = zero3();
            // Full line index m in [-n, n); ω_m = (m + ½)h.
            for m in -(n as isize)..(n as isize) {
                if (m - i as isize).rem_euclid(2) == 0 {
                    continue;
                }
                let a = if m >= 0 { im[m as usize] } else { -im[(-m - 1) as usize].map(|z| z.conj()) };
                let dw = (m - i as isize) as f64 * h;
                acc += a * c(1.0 / dw, 0.0);
            }
            acc * c(2.0 * h / std::f64::consts::PI, 0.0)
        })
        .collect();
    let scale = re.iter().map(norm).fold(0.0, f64::max);
    let diff = rebuilt.iter().zip(&re).map(|(a, b)| norm(&(a - b))).fold(0.0, f64::max);
    let max_residual = if scale > 0.0 { diff / scale } else { diff };
    Ok(KkReport { max_residual, n, omega_max: n as f64 * h })
}

/// Laplace-domain susceptibility at fixed `k`.
#[derive(Debug, Clone)]
pub enum SpectralImage {
    Zero,
    /// Sum of `A/(ρ² + γρ + ω₀²)` terms; analytic continuation is available.
    Rational(Vec<RationalTerm>),
    /// `Σ_j a_j/(ω_j² + ρ²)` with `a_j = C w_j ω_j³ S(ω_j)` from a frequency rule.
    Sampled { nodes: Vec<f64>, amplitudes: Vec<Tensor3C> },
}

impl SpectralImage {
    pub fn build(model: &dyn Coupling, k: &Vec3, order: usize) -> Result<Self> {
        if model.is_zero() {
            return Ok(SpectralImage::Zero);
        }
        if let Some(terms) = model.rational_terms(k) {
            return Ok(SpectralImage::Rational(terms));
        }
        let breaks = model.breakpoints();
        let rule = match model.support() {
            Some(upper) => Rule::graded(&breaks, upper, order),
            None => {
                let top = breaks.iter().copied().fold(model.frequency_scale(), f64::max);
                Rule::graded_with_tail(&breaks, 4.0 * top, order)
            }
        };
        let pref = kernel_prefactor(model.which(), &model.constants());
        let amplitudes = rule
            .nodes
            .par_iter()
            .zip(&rule.weights)
            .map(|(&w, &wt)| Ok(model.density(w, k)? * c(pref * wt * w.powi(3), 0.0)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectralImage::Sampled { nodes: rule.nodes, amplitudes })
    }

    /// Value at any `ρ` (the sampled form is only meaningful for `Re ρ > 0`).
    pub fn eval(&self, rho: C64) -> Tensor3C {
        match self {
            SpectralImage::Zero => zero3(),
            SpectralImage::Rational(terms) => terms.iter().fold(zero3(), |acc, t| acc + t.eval(rho)),
            SpectralImage::Sampled { nodes, amplitudes } => {
                let r2 = rho * rho;
                nodes.iter().zip(amplitudes).fold(zero3(), |acc, (w, a)| acc + a / (r2 + w * w))
            }
        }
    }

    pub fn is_continuable(&self) -> bool {
        !matches!(self, SpectralImage::Sampled { .. })
    }

    /// `(γ, ω₀)` of every rational denominator.
    pub fn denominators(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            SpectralImage::Zero => Some(Vec::new()),
            SpectralImage::Rational(terms) => Some(terms.iter().map(|t| (t.damping, t.resonance)).collect()),
            SpectralImage::Sampled { .. } => None,
        }
    }
}

/// Laplace-domain constitutive data for a medium: bound electric and magnetic
/// couplings and optional free carriers whose current enters as a
/// conductivity `σ̂ = ρε₀χ̂_f`.
#[derive(Debug, Clone)]
pub struct LaplaceResponse {
    pub electric: Arc<dyn Coupling>,
    pub magnetic: Arc<dyn Coupling>,
    pub free: Option<Arc<dyn Coupling>>,
    pub constants: PhysicalConstants,
    /// Frequency nodes for non-rational media.
    pub numeric_order: usize,
}

impl LaplaceResponse {
    pub fn new(electric: Arc<dyn Coupling>, magnetic: Arc<dyn Coupling>, constants: PhysicalConstants) -> Self {
        Self { electric, magnetic, free: None, constants, numeric_order: 4096 }
    }

    pub fn with_conductor(mut self, free: Arc<dyn Coupling>) -> Self {
        self.free = Some(free);
        self
    }

    pub fn with_numeric_order(mut self, order: usize) -> Self {
        self.numeric_order = order;
        self
    }

    pub fn vacuum(constants: PhysicalConstants) -> Self {
        use crate::coupling::CouplingSet;
        Self::new(
            Arc::new(CouplingSet::empty(Which::Electric, constants)),
            Arc::new(CouplingSet::empty(Which::Magnetic, constants)),
            constants,
        )
    }

    /// Precomputes the images at one wave vector.
    pub fn at(&self, k: &Vec3) -> Result<LocalResponse> {
        let free = match &self.free {
            Some(f) => Some(SpectralImage::build(f.as_ref(), k, self.numeric_order)?),
            None => None,
        };
        Ok(LocalResponse {
            k: *k,
            constants: self.constants,
            chi_e: SpectralImage::build(self.electric.as_ref(), k, self.numeric_order)?,
            chi_m: SpectralImage::build(self.magnetic.as_ref(), k, self.numeric_order)?,
            free,
        })
    }

    pub fn epsilon(&self, k: &Vec3, rho: C64) -> Result<Tensor3C> {
        self.at(k)?.epsilon(rho)
    }

    pub fn mu(&self, k: &Vec3, rho: C64) -> Result<Tensor3C> {
        self.at(k)?.mu(rho)
    }
}

/// [`LaplaceResponse`] evaluated at one `k`.
#[derive(Debug, Clone)]
pub struct LocalResponse {
    pub k: Vec3,
    pub constants: PhysicalConstants,
    pub chi_e: SpectralImage,
    pub chi_m: SpectralImage,
    pub free: Option<SpectralImage>,
}

fn check_rho(rho: C64) -> Result<()> {
    if rho.re > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::LeftHalfPlane(rho))
    }
}

impl LocalResponse {
    pub fn epsilon(&self, rho: C64) -> Result<Tensor3C> {
        check_rho(rho)?;
        Ok((identity3() + self.chi_e.eval(rho)) * c(self.constants.eps0, 0.0))
    }

    pub fn mu(&self, rho: C64) -> Result<Tensor3C> {
        check_rho(rho)?;
        Ok((identity3() + self.chi_m.eval(rho)) * c(self.constants.mu0, 0.0))
    }

    /// `σ̂(ρ)`; `None` when the medium has no free carriers.
    pub fn sigma(&self, rho: C64) -> Result<Option<Tensor3C>> {
        check_rho(rho)?;
        Ok(self.free.as_ref().map(|f| f.eval(rho) * (rho * self.constants.eps0)))
    }

    /// `ρε̂ + σ̂`, the electric entry of Λ.
    pub fn rho_epsilon(&self, rho: C64) -> Result<Tensor3C> {
        check_rho(rho)?;
        Ok(self.rho_epsilon_unchecked(rho))
    }

    /// `ρμ̂`, the magnetic entry of Λ.
    pub fn rho_mu(&self, rho: C64) -> Result<Tensor3C> {
        check_rho(rho)?;
        Ok(self.rho_mu_unchecked(rho))
    }

    /// `ρε̂ + σ̂` without the half-plane check; exact continuation for
    /// rational media.
    pub fn rho_epsilon_unchecked(&self, rho: C64) -> Tensor3C {
        let mut chi = self.chi_e.eval(rho);
        if let Some(f) = &self.free {
            chi += f.eval(rho);
        }
        (identity3() + chi) * (rho * self.constants.eps0)
    }

    pub fn rho_mu_unchecked(&self, rho: C64) -> Tensor3C {
        (identity3() + self.chi_m.eval(rho)) * (rho * self.constants.mu0)
    }

    pub fn is_continuable(&self) -> bool {
        self.chi_e.is_continuable()
            && self.chi_m.is_continuable()
            && self.free.as_ref().is_none_or(|f| f.is_continuable())
    }

    /// Denominators of the electric (bound and free) and magnetic images.
    pub fn denominators(&self) -> Option<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
        let mut e = self.chi_e.denominators()?;
        if let Some(f) = &self.free {
            e.extend(f.denominators()?);
        }
        Some((e, self.chi_m.denominators()?))
    }
}
