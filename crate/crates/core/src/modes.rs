//! Mode coefficients of the field operators: the 6x6 Laplace-domain system
//! `Λ(k,ρ)`, its inversion and the inverse transforms of its blocks.

use std::sync::Arc;

use nalgebra::{DMatrix, Schur};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::{Coupling, CouplingSet, RationalTerm, Which};
use crate::error::{Error, Result};
use crate::laplace::{
    dehoog_eval, dehoog_nodes, talbot_contour, Contour, InverseLaplaceSpec,
    InverseMethod, PoleSet,
};
use crate::quadrature::Rule;
use crate::response::{LaplaceResponse, LocalResponse, SpectralImage};
use crate::tensor::{
    block, blocks6, c, curl_symbol, inverse_with_rcond, norm, norm6, Matrix6C, Tensor3C, Vec3, C64,
};

/// Smallest reciprocal condition number accepted by [`invert_lambda`].
pub const RCOND_MIN: f64 = 1e-12;

/// `Λ(k,ρ) = [[O(k), −ρμ̂], [ρε̂ + σ̂, O(k)]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMatrix {
    pub k: Vec3,
    pub rho: C64,
    pub value: Matrix6C,
}

/// Λ at any `ρ`, using the analytic continuation of rational images.
pub fn lambda_value(local: &LocalResponse, rho: C64) -> Matrix6C {
    let o = curl_symbol(&local.k);
    let e = local.rho_epsilon_unchecked(rho);
    let m = local.rho_mu_unchecked(rho);
    blocks6(&o, &(-m), &e, &o)
}

/// Λ on the closed right half-plane; the imaginary axis is the boundary
/// value of the causal response.
pub fn assemble_lambda(local: &LocalResponse, rho: C64) -> Result<LambdaMatrix> {
    if !(rho.re >= 0.0) || !rho.is_finite() {
        return Err(Error::LeftHalfPlane(rho));
    }
    Ok(LambdaMatrix { k: local.k, rho, value: lambda_value(local, rho) })
}

pub fn invert_lambda(lambda: &LambdaMatrix) -> Result<Matrix6C> {
    let singular = |rcond| Error::SingularLambda { k: lambda.k, rho: lambda.rho, rcond };
    match inverse_with_rcond(&lambda.value) {
        Some((inv, rcond)) if rcond >= RCOND_MIN => Ok(inv),
        Some((_, rcond)) => Err(singular(rcond)),
        None => Err(singular(0.0)),
    }
}

/// Deviation of `Λ(−k,ρ)` from `conj Λ(k,ρ̄)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealityReport {
    pub samples: usize,
    /// Largest deviation relative to `‖Λ(k,ρ)‖`.
    pub max_deviation: f64,
    pub worst_k: [f64; 3],
    pub worst_rho: C64,
    /// Set when the deviation exceeds `1e-10`.
    pub flagged: bool,
}

/// Scans every `(k, ρ)` pair of the two sample sets.
pub fn lambda_reality_scan(response: &LaplaceResponse, ks: &[Vec3], rhos: &[C64]) -> Result<RealityReport> {
    let mut report = RealityReport {
        samples: 0,
        max_deviation: 0.0,
        worst_k: [0.0; 3],
        worst_rho: C64::default(),
        flagged: false,
    };
    for k in ks {
        let plus = response.at(k)?;
        let minus = response.at(&(-k))?;
        for rho in rhos {
            let a = assemble_lambda(&minus, *rho)?.value;
            let b = assemble_lambda(&plus, rho.conj())?.value.map(|z| z.conj());
            let scale = norm6(&b);
            let d = norm6(&(a - b)) / if scale > 0.0 { scale } else { 1.0 };
            report.samples += 1;
            if d > report.max_deviation {
                report.max_deviation = d;
                report.worst_k = [k.x, k.y, k.z];
                report.worst_rho = *rho;
            }
        }
    }
    report.flagged = report.max_deviation > 1e-10;
    Ok(report)
}

fn distinct(dens: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for d in dens {
        if !out.contains(&d) {
            out.push(d);
        }
    }
    out
}

fn quadratic_roots(damping: f64, resonance: f64) -> [C64; 2] {
    let disc = c(damping * damping - 4.0 * resonance * resonance, 0.0).sqrt();
    [(-damping + disc) * 0.5, (-damping - disc) * 0.5]
}

fn rational_terms(image: &SpectralImage) -> Option<&[RationalTerm]> {
    match image {
        SpectralImage::Zero => Some(&[]),
        SpectralImage::Rational(terms) => Some(terms),
        SpectralImage::Sampled { .. } => None,
    }
}

/// Generator of the time evolution of a rational medium in the variables
/// `(D/ε₀, Z₀B/μ₀, p_j, ṗ_j, …)`, where each rational term contributes an
/// oscillator `p̈ + γṗ + ω₀²p = A·E` (or `A·Z₀H` for magnetic terms). Its
/// eigenvalues contain every singularity of `Λ⁻¹`.
pub fn evolution_matrix(local: &LocalResponse) -> Option<DMatrix<C64>> {
    let mut electric: Vec<&RationalTerm> = rational_terms(&local.chi_e)?.iter().collect();
    if let Some(f) = &local.free {
        electric.extend(rational_terms(f)?);
    }
    let magnetic: Vec<&RationalTerm> = rational_terms(&local.chi_m)?.iter().collect();
    let n = 6 + 6 * (electric.len() + magnetic.len());
    let mut a = DMatrix::<C64>::zeros(n, n);
    let co = curl_symbol(&local.k) * c(local.constants.c, 0.0);
    let put = |a: &mut DMatrix<C64>, r: usize, col: usize, m: &Tensor3C| {
        let mut v = a.view_mut((r, col), (3, 3));
        v += m;
    };
    let one = crate::tensor::identity3();
    // Field rows: d(D/ε₀)/dt = −cO·h, d(Z₀B/μ₀)/dt = cO·e.
    put(&mut a, 0, 3, &(-co));
    put(&mut a, 3, 0, &co);
    let mut off = 6;
    for (terms, field, other) in [(&electric, 0usize, 3usize), (&magnetic, 3, 0)] {
        for t in terms.iter() {
            let (p, v) = (off, off + 3);
            // The field seen by the oscillators is the total minus polarizations.
            put(&mut a, p, v, &one);
            put(&mut a, v, p, &(one * c(-t.resonance * t.resonance, 0.0)));
            put(&mut a, v, v, &(one * c(-t.damping, 0.0)));
            put(&mut a, v, field, &t.amplitude);
            let sign = if field == 0 { -1.0 } else { 1.0 };
            put(&mut a, other, p, &(co * c(sign, 0.0)));
            off += 6;
        }
    }
    // Oscillators of one kind also see the other oscillators of that kind.
    let blocks: Vec<(usize, bool)> = (0..electric.len() + magnetic.len())
        .map(|j| (6 + 6 * j, j < electric.len()))
        .collect();
    for &(vi, ei) in &blocks {
        let amp = if ei { &electric[(vi - 6) / 6].amplitude } else { &magnetic[(vi - 6) / 6 - electric.len()].amplitude };
        for &(pj, ej) in &blocks {
            if ei == ej {
                put(&mut a, vi + 3, pj, &(-amp));
            }
        }
    }
    Some(a)
}

/// Radius enclosing the dispersion roots.
fn root_scale(roots: &[C64], local: &LocalResponse) -> f64 {
    roots.iter().map(|r| r.norm()).fold(local.constants.omega_k(&local.k), f64::max).max(1e-12)
}

/// Singularities of `Λ⁻¹` and of the constitutive images for a rational
/// medium: eigenvalues of [`evolution_matrix`] together with the roots of
/// the denominators of `χ̂ᵉ`, `χ̂ᶠ`, `χ̂ᵐ`.
pub fn locate_poles(local: &LocalResponse, t_max: f64) -> Result<PoleSet> {
    let (de, dm) = local
        .denominators()
        .ok_or_else(|| Error::PoleFindingFailed("medium has no rational form".into()))?;
    let a = evolution_matrix(local).ok_or_else(|| Error::PoleFindingFailed("medium has no rational form".into()))?;
    let schur = Schur::try_new(a, f64::EPSILON, 0)
        .ok_or_else(|| Error::PoleFindingFailed("evolution eigenvalues did not converge".into()))?;
    let mut candidates: Vec<C64> = schur
        .eigenvalues()
        .ok_or_else(|| Error::PoleFindingFailed("Schur form not triangular".into()))?
        .iter()
        .copied()
        .collect();
    candidates.extend(distinct(de).into_iter().chain(distinct(dm)).flat_map(|(g, w)| quadratic_roots(g, w)));
    let radius = root_scale(&candidates, local);
    PoleSet::with_merge(&candidates, radius, t_max, 1e-4)
}

fn invert_on_contour(local: &LocalResponse, nodes: &[C64]) -> Result<Vec<Matrix6C>> {
    nodes
        .par_iter()
        .map(|z| {
            lambda_value(local, *z)
                .lu()
                .try_inverse()
                .ok_or_else(|| Error::PoleFindingFailed(format!("Λ singular at contour node {z}")))
        })
        .collect()
}

fn flat6(m: &Matrix6C) -> Vec<C64> {
    m.iter().copied().collect()
}

enum Plan {
    Residues { poles: PoleSet, points: usize, small: Contour, small_inv: Vec<Matrix6C>, big: Contour, big_inv: Vec<Matrix6C> },
    Talbot { contours: Vec<(Contour, Vec<Matrix6C>)> },
    DeHoog { nodes: Vec<C64>, a: f64, period: f64, inv: Vec<Matrix6C> },
}

/// Inverse Laplace transforms of images built from `Λ⁻¹(ρ)` at one `k` on a
/// fixed time grid.
pub struct Inverter<'a> {
    pub local: &'a LocalResponse,
    pub times: Vec<f64>,
    pub method: InverseMethod,
    plan: Plan,
}

impl<'a> Inverter<'a> {
    pub fn new(local: &'a LocalResponse, times: &[f64], spec: &InverseLaplaceSpec) -> Result<Self> {
        if times.is_empty() || times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(Error::InvalidInput("times must be finite and non-negative".into()));
        }
        let method = match spec.method {
            InverseMethod::Auto if local.is_continuable() => InverseMethod::RationalExact,
            InverseMethod::Auto => InverseMethod::DeHoog,
            m => m,
        };
        if matches!(method, InverseMethod::RationalExact | InverseMethod::Talbot) && !local.is_continuable() {
            return Err(Error::InvalidInput("contour methods need a rational medium".into()));
        }
        if method != InverseMethod::RationalExact && times.iter().any(|t| *t == 0.0) {
            return Err(Error::InvalidInput("t = 0 needs the rational_exact method".into()));
        }
        let t_max = times.iter().copied().fold(0.0, f64::max);
        let plan = match method {
            InverseMethod::RationalExact => {
                let poles = locate_poles(local, t_max)?;
                let points = spec.contour_points;
                let small = Contour::around(&poles, points, 1.0);
                let big = Contour::around(&poles, points, 3.0);
                let small_inv = invert_on_contour(local, &small.nodes)?;
                let big_inv = invert_on_contour(local, &big.nodes)?;
                cauchy_check(local, &poles, &small, &small_inv, spec.cauchy_tol)?;
                Plan::Residues { poles, points, small, small_inv, big, big_inv }
            }
            InverseMethod::Talbot => {
                let contours = times
                    .iter()
                    .map(|&t| {
                        let ct = talbot_contour(t, spec.talbot_points, spec.talbot_shift);
                        let inv = invert_on_contour(local, &ct.nodes)?;
                        Ok((ct, inv))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Plan::Talbot { contours }
            }
            InverseMethod::DeHoog => {
                let (nodes, a, period) = dehoog_nodes(t_max, spec.dehoog_terms, spec.dehoog_tol, 0.0);
                let inv = nodes
                    .par_iter()
                    .map(|z| invert_lambda(&assemble_lambda(local, *z)?))
                    .collect::<Result<Vec<_>>>()?;
                Plan::DeHoog { nodes, a, period, inv }
            }
            InverseMethod::Auto => unreachable!(),
        };
        Ok(Self { local, times: times.to_vec(), method, plan })
    }

    pub fn poles(&self) -> Option<&PoleSet> {
        match &self.plan {
            Plan::Residues { poles, .. } => Some(poles),
            _ => None,
        }
    }

    /// Original of `h(ρ, Λ⁻¹(ρ))`, divided by `ρ + iω_q` when `reservoir` is
    /// `Some(ω_q)`, at every grid time. `h` must vanish at infinity.
    pub fn invert<H>(&self, h: H, reservoir: Option<f64>) -> Result<Vec<Vec<C64>>>
    where
        H: Fn(C64, &Matrix6C) -> Vec<C64>,
    {
        let pole = reservoir.map(|w| c(0.0, -w));
        let mut out: Vec<Vec<C64>> = vec![Vec::new(); self.times.len()];
        let mut add = |ti: usize, f: C64, v: &[C64]| {
            let acc = &mut out[ti];
            if acc.is_empty() {
                acc.resize(v.len(), C64::default());
            }
            for (a, x) in acc.iter_mut().zip(v) {
                *a += f * x;
            }
        };
        let explicit = |p: C64| -> Result<Vec<C64>> {
            let inv = lambda_value(self.local, p)
                .lu()
                .try_inverse()
                .ok_or_else(|| Error::PoleFindingFailed(format!("reservoir pole {p} hits a mode pole")))?;
            Ok(h(p, &inv))
        };
        match &self.plan {
            Plan::Residues { poles, points, small, small_inv, big, big_inv } => {
                let mut absorbed = false;
                for (ci, cl) in poles.clusters.iter().enumerate() {
                    let d = pole.map_or(f64::INFINITY, |p| (p - cl.center).norm());
                    let use_big = d < 2.0 * cl.radius && d >= 0.5 * cl.radius;
                    absorbed |= d < 2.0 * cl.radius;
                    let (ct, inv) = if use_big { (big, big_inv) } else { (small, small_inv) };
                    for j in ci * points..(ci + 1) * points {
                        let z = ct.nodes[j];
                        let mut v = h(z, &inv[j]);
                        if let Some(p) = pole {
                            let s = 1.0 / (z - p);
                            v.iter_mut().for_each(|x| *x *= s);
                        }
                        for (ti, t) in self.times.iter().enumerate() {
                            add(ti, ct.weights[j] * (z * t).exp(), &v);
                        }
                    }
                }
                if let (Some(p), false) = (pole, absorbed) {
                    let v = explicit(p)?;
                    for (ti, t) in self.times.iter().enumerate() {
                        add(ti, (p * t).exp(), &v);
                    }
                }
            }
            Plan::Talbot { contours } => {
                let at_pole = match pole {
                    Some(p) => Some(explicit(p)?),
                    None => None,
                };
                for (ti, (ct, inv)) in contours.iter().enumerate() {
                    let t = self.times[ti];
                    for ((z, w), m) in ct.nodes.iter().zip(&ct.weights).zip(inv) {
                        let mut v = h(*z, m);
                        if let (Some(p), Some(hp)) = (pole, &at_pole) {
                            let s = 1.0 / (z - p);
                            v.iter_mut().zip(hp).for_each(|(x, y)| *x = (*x - y) * s);
                        }
                        add(ti, w * (z * t).exp(), &v);
                    }
                    if let (Some(p), Some(hp)) = (pole, &at_pole) {
                        add(ti, (p * t).exp(), hp);
                    }
                }
            }
            Plan::DeHoog { nodes, a, period, inv } => {
                let samples: Vec<Vec<C64>> = nodes
                    .iter()
                    .zip(inv)
                    .map(|(z, m)| {
                        let mut v = h(*z, m);
                        if let Some(p) = pole {
                            let s = 1.0 / (z - p);
                            v.iter_mut().for_each(|x| *x *= s);
                        }
                        v
                    })
                    .collect();
                for (ti, t) in self.times.iter().enumerate() {
                    add(ti, c(1.0, 0.0), &dehoog_eval(&samples, *a, *period, *t));
                }
            }
        }
        Ok(out)
    }

    /// `L⁻¹[Λ⁻¹](t)` at every grid time.
    pub fn lambda_inverse(&self) -> Result<Vec<Matrix6C>> {
        Ok(self.invert(|_, m| flat6(m), None)?.iter().map(|v| Matrix6C::from_column_slice(v)).collect())
    }
}

/// Rebuilds `Λ⁻¹` on the Bromwich line from the residue circles; a mismatch
/// means a singularity was missed.
fn cauchy_check(local: &LocalResponse, poles: &PoleSet, ct: &Contour, inv: &[Matrix6C], tol: f64) -> Result<()> {
    let values: Vec<Vec<C64>> = inv.iter().map(flat6).collect();
    let r = poles.root_scale;
    let x = poles.max_real_part().max(0.0) + 0.5 * r;
    for y in [0.0, 0.3, -0.7] {
        let rho0 = c(x, y * r);
        let direct = lambda_value(local, rho0)
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::PoleFindingFailed(format!("Λ singular at check point {rho0}")))?;
        let rebuilt = Matrix6C::from_column_slice(&ct.reconstruct(&values, rho0));
        let err = norm6(&(rebuilt - direct)) / norm6(&direct);
        if !(err <= tol) {
            return Err(Error::PoleFindingFailed(format!("Cauchy check at {rho0}: relative error {err:.3e}")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModeSpec {
    pub inverse: InverseLaplaceSpec,
    /// Lower bound on the number of reservoir frequencies.
    pub reservoir_order: usize,
    /// Poles with `Re ρ > −marginal_tol·R` are reported as marginal.
    pub marginal_tol: f64,
}

impl Default for ModeSpec {
    fn default() -> Self {
        Self { inverse: InverseLaplaceSpec::default(), reservoir_order: 2048, marginal_tol: 1e-12 }
    }
}

/// Electric reservoir coupling: bound and free carriers together.
pub fn electric_coupling(response: &LaplaceResponse) -> Result<Arc<dyn Coupling>> {
    match &response.free {
        None => Ok(response.electric.clone()),
        Some(f) => Ok(Arc::new(CouplingSet::new(
            Which::Electric,
            response.constants,
            vec![response.electric.clone(), f.clone()],
        )?)),
    }
}

/// Frequency rule for the reservoir integrals, graded at coupling
/// breakpoints, at `ω_k` and at the oscillation frequencies of the poles.
pub fn reservoir_rule(response: &LaplaceResponse, k: &Vec3, poles: Option<&PoleSet>, order: usize) -> Rule {
    let mut couplings = vec![&response.electric, &response.magnetic];
    if let Some(f) = &response.free {
        couplings.push(f);
    }
    let active: Vec<_> = couplings.into_iter().filter(|m| !m.is_zero()).collect();
    let mut breaks: Vec<f64> = active.iter().flat_map(|m| m.breakpoints()).collect();
    breaks.push(response.constants.omega_k(k));
    if let Some(set) = poles {
        for p in set.poles().filter(|p| p.im.abs() > 1e-6 * set.root_scale) {
            let (w, g) = (p.im.abs(), p.re.abs());
            breaks.push(w);
            for s in [0.5, 2.0, 8.0] {
                breaks.push(w - s * g);
                breaks.push(w + s * g);
            }
        }
    }
    breaks.retain(|b| *b > 0.0 && b.is_finite());
    let supports: Option<Vec<f64>> = active.iter().map(|m| m.support()).collect();
    match supports {
        Some(s) if !s.is_empty() => Rule::graded(&breaks, s.into_iter().fold(0.0, f64::max), order),
        _ => {
            let top = active
                .iter()
                .map(|m| m.frequency_scale())
                .chain(breaks.iter().copied())
                .fold(f64::MIN_POSITIVE, f64::max);
            Rule::graded_with_tail(&breaks, 4.0 * top, order)
        }
    }
}

/// Time-domain coefficients of `E` and `H` with respect to the initial
/// fields (`γ`, `ξ` and tildes) and the reservoir operators (`ζ`, `η` and
/// tildes, indexed `[t][q]`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub k: [f64; 3],
    pub times: Vec<f64>,
    pub omega_q: Vec<f64>,
    pub omega_q_weights: Vec<f64>,
    pub gamma: Vec<Tensor3C>,
    pub xi: Vec<Tensor3C>,
    pub gamma_tilde: Vec<Tensor3C>,
    pub xi_tilde: Vec<Tensor3C>,
    pub zeta: Vec<Vec<Tensor3C>>,
    pub eta: Vec<Vec<Tensor3C>>,
    pub zeta_tilde: Vec<Vec<Tensor3C>>,
    pub eta_tilde: Vec<Vec<Tensor3C>>,
    pub method: InverseMethod,
    pub poles: Option<PoleSet>,
    pub marginal_poles: Vec<C64>,
}

fn flat3(out: &mut Vec<C64>, m: &Tensor3C) {
    out.extend(m.iter().copied());
}

fn unflat3(v: &[C64], slot: usize) -> Tensor3C {
    Tensor3C::from_column_slice(&v[9 * slot..9 * slot + 9])
}

pub fn mode_coefficients(response: &LaplaceResponse, k: &Vec3, times: &[f64], spec: &ModeSpec) -> Result<ModeCoefficients> {
    if !(k.norm() > 0.0) {
        return Err(Error::ZeroWaveVector);
    }
    let local = response.at(k)?;
    let inverter = Inverter::new(&local, times, &spec.inverse)?;
    let g = inverter.lambda_inverse()?;
    let poles = match inverter.poles() {
        Some(p) => Some(p.clone()),
        None if local.is_continuable() => Some(locate_poles(&local, inverter.times.iter().copied().fold(0.0, f64::max))?),
        None => None,
    };
    let rule = reservoir_rule(response, k, poles.as_ref(), spec.reservoir_order);
    let f = electric_coupling(response)?;
    let gm = response.magnetic.clone();
    let mu0 = response.constants.mu0;
    let per_q = rule
        .nodes
        .par_iter()
        .map(|&w| {
            let fq = f.eval(w, k)?;
            let gq = gm.eval(w, k)?;
            if norm(&fq) == 0.0 && norm(&gq) == 0.0 {
                return Ok(vec![vec![C64::default(); 36]; times.len()]);
            }
            inverter.invert(
                |rho, m| {
                    let mut v = Vec::with_capacity(36);
                    flat3(&mut v, &(block(m, 0, 0) * gq * (rho * mu0)));
                    flat3(&mut v, &(block(m, 0, 1) * fq * (-rho)));
                    flat3(&mut v, &(block(m, 1, 0) * gq * (rho * mu0)));
                    flat3(&mut v, &(block(m, 1, 1) * fq * (-rho)));
                    v
                },
                Some(w),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let take = |slot: usize| -> Vec<Vec<Tensor3C>> {
        (0..times.len()).map(|ti| per_q.iter().map(|q| unflat3(&q[ti], slot)).collect()).collect()
    };
    let marginal_poles = poles.as_ref().map_or_else(Vec::new, |p| p.marginal(spec.marginal_tol));
    Ok(ModeCoefficients {
        k: [k.x, k.y, k.z],
        times: times.to_vec(),
        gamma: g.iter().map(|m| block(m, 0, 1)).collect(),
        xi: g.iter().map(|m| -block(m, 0, 0)).collect(),
        gamma_tilde: g.iter().map(|m| block(m, 1, 1)).collect(),
        xi_tilde: g.iter().map(|m| -block(m, 1, 0)).collect(),
        zeta: take(0),
        eta: take(1),
        zeta_tilde: take(2),
        eta_tilde: take(3),
        omega_q: rule.nodes,
        omega_q_weights: rule.weights,
        method: inverter.method,
        poles,
        marginal_poles,
    })
}

/// Closed-form vacuum coefficients at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct VacuumModes {
    pub gamma: Tensor3C,
    pub xi: Tensor3C,
    pub gamma_tilde: Tensor3C,
    pub xi_tilde: Tensor3C,
}

pub fn vacuum_modes(k: &Vec3, t: f64, consts: &crate::tensor::PhysicalConstants) -> Result<VacuumModes> {
    let pt = crate::tensor::transverse_projector(k)?;
    let pl = crate::tensor::longitudinal_projector(k)?;
    let w = consts.omega_k(k);
    let o = curl_symbol(k);
    let (cs, sn) = ((w * t).cos(), (w * t).sin() / w);
    let c2 = consts.c * consts.c;
    Ok(VacuumModes {
        gamma: (pt * c(cs, 0.0) + pl) / c(consts.eps0, 0.0),
        xi: o * c(-c2 * sn, 0.0),
        gamma_tilde: o * c(c2 * sn, 0.0),
        xi_tilde: (pt * c(cs, 0.0) + pl) / c(consts.mu0, 0.0),
    })
}
