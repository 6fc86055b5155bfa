//! Inverse Laplace transforms: residues on small circles around located
//! poles (exact for rational images up to contour quadrature), fixed Talbot
//! contours, and de Hoog's accelerated Fourier series on a Bromwich line.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Schur};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{c, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseMethod {
    /// Rational media: residues; anything else: de Hoog.
    Auto,
    RationalExact,
    Talbot,
    DeHoog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InverseLaplaceSpec {
    pub method: InverseMethod,
    /// Points on each residue circle.
    pub contour_points: usize,
    /// Nodes on the full Talbot contour.
    pub talbot_points: usize,
    /// Contour shift to the right, added to the largest pole real part.
    pub talbot_shift: f64,
    /// de Hoog uses `2·dehoog_terms + 1` samples on the Bromwich line.
    pub dehoog_terms: usize,
    pub dehoog_tol: f64,
    /// Relative tolerance of the Cauchy completeness check on located poles.
    pub cauchy_tol: f64,
    /// Pole hints for [`inverse_laplace`] with `RationalExact`.
    #[serde(skip)]
    pub poles: Vec<C64>,
}

impl Default for InverseLaplaceSpec {
    fn default() -> Self {
        Self {
            method: InverseMethod::Auto,
            contour_points: 64,
            talbot_points: 64,
            talbot_shift: 0.0,
            dehoog_terms: 60,
            dehoog_tol: 1e-10,
            cauchy_tol: 1e-8,
            poles: Vec::new(),
        }
    }
}

/// Coefficients (lowest degree first) of a polynomial of degree at most
/// `degree`, sampled on the circle `|z| = radius`. Leading coefficients
/// below `1e-12` of the largest (in the scaled variable `z/radius`) are
/// dropped.
pub fn polynomial_coefficients<F: Fn(C64) -> C64>(f: F, degree: usize, radius: f64) -> Vec<C64> {
    let n = (degree + 1).next_power_of_two().max(8) * 2;
    let samples: Vec<C64> = (0..n).map(|j| f(C64::from_polar(radius, 2.0 * PI * j as f64 / n as f64))).collect();
    let mut scaled: Vec<C64> = (0..=degree)
        .map(|m| {
            let mut acc = C64::default();
            for (j, s) in samples.iter().enumerate() {
                acc += s * C64::from_polar(1.0, -2.0 * PI * (m * j) as f64 / n as f64);
            }
            acc / n as f64
        })
        .collect();
    let top = scaled.iter().map(|z| z.norm()).fold(0.0, f64::max);
    while scaled.len() > 1 && scaled.last().unwrap().norm() <= 1e-12 * top {
        scaled.pop();
    }
    scaled.iter().enumerate().map(|(m, z)| z / radius.powi(m as i32)).collect()
}

/// Roots of `Σ c_m z^m` from the eigenvalues of the companion matrix.
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.len() > 1 && coeffs.last().unwrap().norm() == 0.0 {
        coeffs.pop();
    }
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = c(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -coeffs[i] / lead;
    }
    let schur = Schur::try_new(m, f64::EPSILON, 0)
        .ok_or_else(|| Error::PoleFindingFailed("companion eigenvalues did not converge".into()))?;
    let eig = schur
        .eigenvalues()
        .ok_or_else(|| Error::PoleFindingFailed("companion Schur form not triangular".into()))?;
    Ok(eig.iter().copied().collect())
}

/// Nearby poles grouped under one circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleCluster {
    pub center: C64,
    pub poles: Vec<C64>,
    /// Largest distance from the centre to a member.
    pub spread: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleSet {
    pub clusters: Vec<PoleCluster>,
    pub root_scale: f64,
}

impl PoleSet {
    /// Groups candidate poles and assigns circle radii that stay well clear
    /// of other clusters and keep `radius·t_max` moderate.
    pub fn new(candidates: &[C64], root_scale: f64, t_max: f64) -> Result<Self> {
        Self::with_merge(candidates, root_scale, t_max, 1e-6)
    }

    /// As [`PoleSet::new`] with candidates closer than `merge·root_scale`
    /// always grouped; multiple roots come out of a companion matrix split
    /// by about `ε^{1/m}`.
    pub fn with_merge(candidates: &[C64], root_scale: f64, t_max: f64, merge: f64) -> Result<Self> {
        let merge = merge * root_scale;
        let mut clusters: Vec<Vec<C64>> = Vec::new();
        for p in candidates {
            if !p.is_finite() {
                return Err(Error::PoleFindingFailed(format!("non-finite pole candidate {p}")));
            }
            clusters.push(vec![*p]);
        }
        let center = |v: &Vec<C64>| v.iter().sum::<C64>() / v.len() as f64;
        let spread = |v: &Vec<C64>| {
            let cc = center(v);
            v.iter().map(|p| (p - cc).norm()).fold(0.0, f64::max)
        };
        // Merge until every pair of clusters is separated by more than
        // `merge` plus a multiple of their spreads.
        loop {
            let mut joined = false;
            'outer: for a in 0..clusters.len() {
                for b in a + 1..clusters.len() {
                    let d = (center(&clusters[a]) - center(&clusters[b])).norm();
                    if d <= merge + 8.0 * (spread(&clusters[a]) + spread(&clusters[b])) {
                        let other = clusters.remove(b);
                        clusters[a].extend(other);
                        joined = true;
                        break 'outer;
                    }
                }
            }
            if !joined {
                break;
            }
        }
        let centers: Vec<C64> = clusters.iter().map(center).collect();
        let spreads: Vec<f64> = clusters.iter().map(spread).collect();
        let cap_t = if t_max > 0.0 { 2.0 / t_max } else { f64::INFINITY };
        let mut out = Vec::with_capacity(clusters.len());
        for (i, poles) in clusters.into_iter().enumerate() {
            let gap = (0..centers.len())
                .filter(|j| *j != i)
                .map(|j| (centers[i] - centers[j]).norm() - spreads[j])
                .fold(f64::INFINITY, f64::min);
            let floor = 2.0 * spreads[i] + 1e-9 * root_scale;
            let radius = (0.15 * gap).min(0.1 * root_scale).min(cap_t).max(floor);
            out.push(PoleCluster { center: centers[i], poles, spread: spreads[i], radius });
        }
        Ok(Self { clusters: out, root_scale })
    }

    pub fn poles(&self) -> impl Iterator<Item = C64> + '_ {
        self.clusters.iter().flat_map(|c| c.poles.iter().copied())
    }

    /// Poles with `Re ρ > −tol·root_scale`.
    pub fn marginal(&self, tol: f64) -> Vec<C64> {
        self.poles().filter(|p| p.re > -tol * self.root_scale).collect()
    }

    pub fn max_real_part(&self) -> f64 {
        self.poles().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Quadrature for `(1/2πi)∮ g(z) dz` on a union of circles.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
}

impl Contour {
    pub fn circle(center: C64, radius: f64, points: usize) -> Self {
        let mut nodes = Vec::with_capacity(points);
        let mut weights = Vec::with_capacity(points);
        for j in 0..points {
            let e = C64::from_polar(1.0, 2.0 * PI * j as f64 / points as f64);
            nodes.push(center + e * radius);
            weights.push(e * (radius / points as f64));
        }
        Self { nodes, weights }
    }

    pub fn around(poles: &PoleSet, points: usize, scale: f64) -> Self {
        let mut out = Self { nodes: Vec::new(), weights: Vec::new() };
        for cl in &poles.clusters {
            out.extend(Self::circle(cl.center, scale * cl.radius, points));
        }
        out
    }

    pub fn extend(&mut self, other: Contour) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_j e^{z_j t} v_j` for vector samples `values[j]`.
    pub fn inverse(&self, values: &[Vec<C64>], t: f64) -> Vec<C64> {
        let dim = values.first().map_or(0, |v| v.len());
        let mut acc = vec![C64::default(); dim];
        for ((z, w), v) in self.nodes.iter().zip(&self.weights).zip(values) {
            let f = w * (z * t).exp();
            for (a, x) in acc.iter_mut().zip(v) {
                *a += f * x;
            }
        }
        acc
    }

    /// `Σ w_j v_j/(ρ₀ − z_j)`, which equals the image at `ρ₀` when every
    /// singularity is enclosed and the image vanishes at infinity.
    pub fn reconstruct(&self, values: &[Vec<C64>], rho0: C64) -> Vec<C64> {
        let dim = values.first().map_or(0, |v| v.len());
        let mut acc = vec![C64::default(); dim];
        for ((z, w), v) in self.nodes.iter().zip(&self.weights).zip(values) {
            let f = w / (rho0 - z);
            for (a, x) in acc.iter_mut().zip(v) {
                *a += f * x;
            }
        }
        acc
    }
}

/// Nodes and weights of the fixed Talbot contour
/// `z(θ) = σ + rθ(cot θ + i)`, `r = 2M/(5t)` with `M = points/2`, for
/// `f(t) ≈ Σ w_k e^{z_k t} F(z_k)`.
pub fn talbot_contour(t: f64, points: usize, shift: f64) -> Contour {
    let m = (points / 2).max(1) as f64;
    let r = 2.0 * m / (5.0 * t);
    let n = points as f64;
    let mut nodes = Vec::with_capacity(points);
    let mut weights = Vec::with_capacity(points);
    for k in 0..points {
        let theta = -PI + (k as f64 + 0.5) * 2.0 * PI / n;
        let cot = theta.cos() / theta.sin();
        let z = c(shift + r * theta * cot, r * theta);
        let dz = c(r * (cot - theta / theta.sin().powi(2)), r);
        nodes.push(z);
        weights.push(dz / (I * n));
    }
    Contour { nodes, weights }
}

/// Nodes `a + iπk/T` for `k = −2M..=2M` used by de Hoog's method.
pub fn dehoog_nodes(t_max: f64, terms: usize, tol: f64, abscissa: f64) -> (Vec<C64>, f64, f64) {
    let period = 2.0 * t_max;
    let a = abscissa.max(0.0) - tol.ln() / (2.0 * period);
    let n = 2 * terms;
    let nodes = (0..=2 * n)
        .map(|j| {
            let k = j as i64 - n as i64;
            c(a, PI * k as f64 / period)
        })
        .collect();
    (nodes, a, period)
}

/// Continued-fraction evaluation of `c₀/2 + Σ_{k≥1} c_k z^k` (the series is
/// passed with `c₀` already halved) by the quotient–difference algorithm.
fn qd_series(coeffs: &[C64], z: C64) -> C64 {
    let n = coeffs.len() - 1; // = 2M
    let m = n / 2;
    if coeffs.iter().all(|x| x.norm() == 0.0) {
        return C64::default();
    }
    let tiny = 1e-300;
    let safe = |x: C64| if x.norm() == 0.0 { c(tiny, 0.0) } else { x };
    let mut d = vec![C64::default(); n + 1];
    d[0] = coeffs[0];
    let mut e_prev = vec![C64::default(); n + 1];
    let mut q: Vec<C64> = (0..n).map(|i| coeffs[i + 1] / safe(coeffs[i])).collect();
    d[1] = -q[0];
    for r in 1..=m {
        let len = n - 2 * r + 1;
        let e: Vec<C64> = (0..len).map(|i| q[i + 1] - q[i] + e_prev[i + 1]).collect();
        d[2 * r] = -e[0];
        if r < m {
            let qn: Vec<C64> = (0..len - 1).map(|i| q[i + 1] * e[i + 1] / safe(e[i])).collect();
            d[2 * r + 1] = -qn[0];
            q = qn;
        }
        e_prev = e;
    }
    let mut a_prev = C64::default();
    let mut a_cur = d[0];
    let mut b_prev = c(1.0, 0.0);
    let mut b_cur = c(1.0, 0.0);
    for k in 1..n {
        let a_next = a_cur + d[k] * z * a_prev;
        let b_next = b_cur + d[k] * z * b_prev;
        a_prev = a_cur;
        a_cur = a_next;
        b_prev = b_cur;
        b_cur = b_next;
    }
    let h = 0.5 * (1.0 + z * (d[n - 1] - d[n]));
    let h = safe(h);
    let rem = -h * (1.0 - (1.0 + z * d[n] / (h * h)).sqrt());
    let a_n = a_cur + rem * a_prev;
    let b_n = b_cur + rem * b_prev;
    a_n / safe(b_n)
}

/// de Hoog inversion at `t` from samples at the nodes of [`dehoog_nodes`].
pub fn dehoog_eval(samples: &[Vec<C64>], a: f64, period: f64, t: f64) -> Vec<C64> {
    let total = samples.len();
    let n = (total - 1) / 2;
    let dim = samples[0].len();
    let z = C64::from_polar(1.0, PI * t / period);
    let zi = z.conj();
    let scale = (a * t).exp() / (2.0 * period);
    (0..dim)
        .map(|e| {
            let mut plus: Vec<C64> = (0..=n).map(|k| samples[n + k][e]).collect();
            let mut minus: Vec<C64> = (0..=n).map(|k| samples[n - k][e]).collect();
            plus[0] *= 0.5;
            minus[0] *= 0.5;
            (qd_series(&plus, z) + qd_series(&minus, zi)) * scale
        })
        .collect()
}

/// Scalar inverse Laplace transform on a time grid (`t > 0`).
///
/// `RationalExact` needs `spec.poles`; `Auto` uses them when present and
/// falls back to de Hoog otherwise.
pub fn inverse_laplace<F>(f: F, times: &[f64], spec: &InverseLaplaceSpec) -> Result<Vec<C64>>
where
    F: Fn(C64) -> C64,
{
    if times.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidInput("inverse Laplace times must be positive".into()));
    }
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let method = match spec.method {
        InverseMethod::Auto if !spec.poles.is_empty() => InverseMethod::RationalExact,
        InverseMethod::Auto => InverseMethod::DeHoog,
        m => m,
    };
    match method {
        InverseMethod::RationalExact => {
            if spec.poles.is_empty() {
                return Err(Error::PoleFindingFailed("no pole hints supplied".into()));
            }
            let scale = spec.poles.iter().map(|p| p.norm()).fold(1e-3, f64::max);
            let set = PoleSet::new(&spec.poles, scale, t_max)?;
            let contour = Contour::around(&set, spec.contour_points, 1.0);
            let values: Vec<Vec<C64>> = contour.nodes.iter().map(|z| vec![f(*z)]).collect();
            let re_max = set.max_real_part().max(0.0);
            for y in [0.0, 0.5, -1.0] {
                let rho0 = c(re_max + scale, y * scale);
                let direct = f(rho0);
                let rebuilt = contour.reconstruct(&values, rho0)[0];
                if (direct - rebuilt).norm() > spec.cauchy_tol * direct.norm().max(1e-300) {
                    return Err(Error::PoleFindingFailed(format!(
                        "Cauchy check failed at {rho0}: {rebuilt} vs {direct}"
                    )));
                }
            }
            Ok(times.iter().map(|t| contour.inverse(&values, *t)[0]).collect())
        }
        InverseMethod::Talbot => {
            let shift = spec.talbot_shift + spec.poles.iter().map(|p| p.re).fold(0.0, f64::max);
            Ok(times
                .iter()
                .map(|&t| {
                    let ct = talbot_contour(t, spec.talbot_points, shift);
                    let values: Vec<Vec<C64>> = ct.nodes.iter().map(|z| vec![f(*z)]).collect();
                    ct.inverse(&values, t)[0]
                })
                .collect())
        }
        InverseMethod::DeHoog => {
            let abscissa = spec.poles.iter().map(|p| p.re).fold(0.0, f64::max);
            let (nodes, a, period) = dehoog_nodes(t_max, spec.dehoog_terms, spec.dehoog_tol, abscissa);
            let values: Vec<Vec<C64>> = nodes.iter().map(|z| vec![f(*z)]).collect();
            Ok(times.iter().map(|&t| dehoog_eval(&values, a, period, t)[0]).collect())
        }
        InverseMethod::Auto => unreachable!(),
    }
}
