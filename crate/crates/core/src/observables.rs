//! Physical checks assembled from mode coefficients: equal-time field
//! commutators, Maxwell residuals per channel, the constitutive round trip
//! and vacuum fluctuation spectra.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::Coupling;
use crate::error::{Error, Result};
use crate::modes::{electric_coupling, mode_coefficients, Inverter, ModeCoefficients, ModeSpec};
use crate::noise::{noise_coefficients, CommutatorKind, CommutatorReport};
use crate::quadrature::{gauss_legendre, QuadratureSpec};
use crate::response::{chi_kernel, LaplaceResponse, TimeGrid};
use crate::tensor::{c, complexify, curl_symbol, norm, triad, zero3, PhysicalConstants, Tensor3C, Vec3, C64, I};

pub type Vec3C = Vector3<C64>;

/// Coefficients of `E(k,t)` and `H(k,t)` multiplying the annihilation
/// operators of every channel: photons `a_λ(k)` (initial data
/// `D = i√(ħω_kε₀/2(2π)³) e_λ`, `B = −i√(ħω_kμ₀/2(2π)³) s_λ`, which makes
/// `a_λ` positive frequency), electric reservoir
/// `d_ν(k,ω_q)` and magnetic reservoir `b_ν(k,ω_q)`. Reservoir entries carry
/// the square root of their quadrature weight.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldOperatorRepresentation {
    pub k: [f64; 3],
    pub times: Vec<f64>,
    pub omega_q: Vec<f64>,
    /// `[t][field][λ]`, field 0 = E, 1 = H.
    pub photon: Vec<[[Vec3C; 2]; 2]>,
    /// `[t][q][field][channel]`, channels `d₁ d₂ d₃ b₁ b₂ b₃`.
    pub reservoir: Vec<Vec<[[Vec3C; 6]; 2]>>,
    pub constants: PhysicalConstants,
}

fn cv(v: &Vec3) -> Vec3C {
    complexify(v)
}

/// `√(ħω_k ε₀/2(2π)³)` and `√(ħω_k μ₀/2(2π)³)`.
fn photon_weights(k: &Vec3, consts: &PhysicalConstants) -> (f64, f64) {
    let base = consts.hbar * consts.omega_k(k) / (2.0 * (2.0 * PI).powi(3));
    ((base * consts.eps0).sqrt(), (base * consts.mu0).sqrt())
}

/// `(2π)^{-3/2} √(4π/c³) ω`.
fn reservoir_weight(omega: f64, consts: &PhysicalConstants) -> f64 {
    (2.0 * PI).powf(-1.5) * (4.0 * PI / consts.c.powi(3)).sqrt() * omega
}

impl FieldOperatorRepresentation {
    pub fn from_modes(m: &ModeCoefficients, consts: &PhysicalConstants) -> Result<Self> {
        let k = Vec3::new(m.k[0], m.k[1], m.k[2]);
        let tr = triad(&k)?;
        let (a, b) = photon_weights(&k, consts);
        let (e, s) = (tr.v().map(|v| cv(&v)), tr.s().map(|v| cv(&v)));
        let photon = (0..m.times.len())
            .map(|ti| {
                let field = |g: &Tensor3C, x: &Tensor3C| -> [Vec3C; 2] {
                    std::array::from_fn(|l| (g * e[l] * c(a, 0.0) - x * s[l] * c(b, 0.0)) * I)
                };
                [field(&m.gamma[ti], &m.xi[ti]), field(&m.gamma_tilde[ti], &m.xi_tilde[ti])]
            })
            .collect();
        let kappa: Vec<f64> = m
            .omega_q
            .iter()
            .zip(&m.omega_q_weights)
            .map(|(w, wt)| reservoir_weight(*w, consts) * wt.sqrt())
            .collect();
        let reservoir = (0..m.times.len())
            .map(|ti| {
                (0..m.omega_q.len())
                    .map(|q| {
                        let kq = c(kappa[q], 0.0);
                        let field = |eta: &Tensor3C, zeta: &Tensor3C| -> [Vec3C; 6] {
                            std::array::from_fn(|ch| {
                                if ch < 3 {
                                    eta * e[ch] * kq
                                } else {
                                    zeta * s[ch - 3] * (kq * I)
                                }
                            })
                        };
                        [field(&m.eta[ti][q], &m.zeta[ti][q]), field(&m.eta_tilde[ti][q], &m.zeta_tilde[ti][q])]
                    })
                    .collect()
            })
            .collect();
        Ok(Self { k: m.k, times: m.times.clone(), omega_q: m.omega_q.clone(), photon, reservoir, constants: *consts })
    }

    /// Representations at `k` and `−k`, both needed for commutators.
    pub fn assemble(response: &LaplaceResponse, k: &Vec3, times: &[f64], spec: &ModeSpec) -> Result<(Self, Self)> {
        let plus = mode_coefficients(response, k, times, spec)?;
        let minus = mode_coefficients(response, &(-k), times, spec)?;
        Ok((Self::from_modes(&plus, &response.constants)?, Self::from_modes(&minus, &response.constants)?))
    }

    pub fn k_vec(&self) -> Vec3 {
        Vec3::new(self.k[0], self.k[1], self.k[2])
    }

    /// `M_FG = Σ c_F c_G†` over every channel at time index `ti`, as
    /// `[[EE, EH], [HE, HH]]`.
    pub fn correlation(&self, ti: usize) -> [[Tensor3C; 2]; 2] {
        let mut m = [[zero3(); 2]; 2];
        for f in 0..2 {
            for g in 0..2 {
                let mut acc = zero3();
                for l in 0..2 {
                    acc += self.photon[ti][f][l] * self.photon[ti][g][l].adjoint();
                }
                for q in &self.reservoir[ti] {
                    for ch in 0..6 {
                        acc += q[f][ch] * q[g][ch].adjoint();
                    }
                }
                m[f][g] = acc;
            }
        }
        m
    }
}

/// Equal-time commutator coefficients of `(E, E)`, `(E, H)` and `(H, H)`
/// against their free-space values `0`, `(ħc²/(2π)³)[k]×`, `0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EqualTimeReport {
    pub ee: CommutatorReport,
    pub eh: CommutatorReport,
    pub hh: CommutatorReport,
    /// Largest `‖C − C_vac‖ / ‖C_vac^{EH}‖` over pairs and times.
    pub max_deviation: f64,
}

/// Free-space `[E(k), H†(k)]` coefficient `(ħc²/(2π)³)[k]×`.
pub fn vacuum_eh_commutator(k: &Vec3, consts: &PhysicalConstants) -> Tensor3C {
    // [k]× = −i O(k).
    curl_symbol(k) * (-I * (consts.hbar * consts.c * consts.c / (2.0 * PI).powi(3)))
}

pub fn equal_time_commutators(
    plus: &FieldOperatorRepresentation,
    minus: &FieldOperatorRepresentation,
) -> Result<EqualTimeReport> {
    let k = plus.k_vec();
    if (minus.k_vec() + k).norm() > 1e-14 * k.norm() || plus.times != minus.times {
        return Err(Error::InvalidInput("representations must be at k and −k on one time grid".into()));
    }
    let target = vacuum_eh_commutator(&k, &plus.constants);
    let scale = norm(&target);
    let n = plus.times.len();
    let mut out: [Vec<Tensor3C>; 3] = Default::default();
    for ti in 0..n {
        let mp = plus.correlation(ti);
        let mm = minus.correlation(ti);
        for (slot, (f, g)) in [(0, 0), (0, 1), (1, 1)].into_iter().enumerate() {
            out[slot].push(mp[f][g] - mm[f][g].map(|z| z.conj()));
        }
    }
    let mut max_deviation: f64 = 0.0;
    let mut reports = Vec::new();
    for (slot, lhs) in out.into_iter().enumerate() {
        let rhs = vec![if slot == 1 { target } else { zero3() }; n];
        let dev = lhs.iter().zip(&rhs).map(|(l, r)| norm(&(l - r)) / scale).fold(0.0, f64::max);
        max_deviation = max_deviation.max(dev);
        let mut rep = CommutatorReport::new(CommutatorKind::FieldEqualTime, &k, plus.times.clone(), lhs, rhs);
        rep.max_rel_err = dev;
        reports.push(rep);
    }
    let hh = reports.pop().unwrap();
    let eh = reports.pop().unwrap();
    let ee = reports.pop().unwrap();
    Ok(EqualTimeReport { ee, eh, hh, max_deviation })
}

/// Symmetrized equal-time `⟨E_i E_j⟩` density at separation `r_offset`
/// in the joint ground state of photons and reservoirs,
/// `½[M(k)e^{ik·r} + conj M(−k) e^{−ik·r}]`. Hermitian PSD at `r = 0`.
pub fn vacuum_spectrum(
    plus: &FieldOperatorRepresentation,
    minus: &FieldOperatorRepresentation,
    r_offset: &Vec3,
    ti: usize,
) -> Result<Tensor3C> {
    if ti >= plus.times.len() || ti >= minus.times.len() {
        return Err(Error::InvalidInput("time index out of range".into()));
    }
    let phase = C64::from_polar(1.0, plus.k_vec().dot(r_offset));
    let mp = plus.correlation(ti)[0][0];
    let mm = minus.correlation(ti)[0][0].map(|z| z.conj());
    Ok((mp * phase + mm * phase.conj()) * c(0.5, 0.0))
}

/// Largest relative residual of `∂D/∂t + O·H = 0` (Ampère) and
/// `∂B/∂t − O·E = 0` (Faraday) for one channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelResidual {
    pub channel: String,
    pub omega_q: Option<f64>,
    pub ampere: f64,
    pub faraday: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaxwellReport {
    pub k: [f64; 3],
    pub dt: f64,
    pub channels: Vec<ChannelResidual>,
    pub max_residual: f64,
}

fn split4(v: &[C64]) -> [Vec3C; 4] {
    std::array::from_fn(|i| Vec3C::new(v[3 * i], v[3 * i + 1], v[3 * i + 2]))
}

fn stack(a: &Vec3C, b: &Vec3C) -> nalgebra::Vector6<C64> {
    nalgebra::Vector6::new(a[0], a[1], a[2], b[0], b[1], b[2])
}

/// Fields `E, H, D, B` of every initial-operator channel (two photon
/// polarizations, and `d_ν`, `b_ν` at each of `omegas`) on a uniform time
/// grid, checked against the Maxwell system by central differences. `D` and
/// `B` are built from the constitutive images `ε̂Ê + P̂_N`, `μ̂Ĥ + μ₀M̂_N`.
pub fn maxwell_residual(
    response: &LaplaceResponse,
    k: &Vec3,
    times: &[f64],
    omegas: &[f64],
    spec: &ModeSpec,
) -> Result<MaxwellReport> {
    if times.len() < 3 {
        return Err(Error::GridTooCoarse("Maxwell residual needs at least three times".into()));
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) || times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(w[1].abs())) {
        return Err(Error::GridTooCoarse("Maxwell residual needs a uniform time grid".into()));
    }
    let consts = response.constants;
    let local = response.at(k)?;
    let inverter = Inverter::new(&local, times, &spec.inverse)?;
    let tr = triad(k)?;
    let (e, s) = (tr.v().map(|v| cv(&v)), tr.s().map(|v| cv(&v)));
    let (a, b) = photon_weights(k, &consts);
    let f = electric_coupling(response)?;
    let o = curl_symbol(k);
    let eps = |rho: C64| local.rho_epsilon_unchecked(rho) / rho;
    let mu = |rho: C64| local.rho_mu_unchecked(rho) / rho;
    // Image of (E, H, D, B) from the right-hand side and the noise sources.
    let fields = |rho: C64, m: &crate::tensor::Matrix6C, rhs: nalgebra::Vector6<C64>, pn: Vec3C, mn: Vec3C| {
        let x = m * rhs;
        let ee = Vec3C::new(x[0], x[1], x[2]);
        let hh = Vec3C::new(x[3], x[4], x[5]);
        let d = eps(rho) * ee + pn;
        let bb = mu(rho) * hh + mn * c(consts.mu0, 0.0);
        let mut v = Vec::with_capacity(12);
        for w in [ee, hh, d, bb] {
            v.extend(w.iter().copied());
        }
        v
    };
    let zero = Vec3C::zeros();
    let mut jobs: Vec<(String, Option<f64>, usize)> = Vec::new();
    for l in 0..2 {
        jobs.push((format!("photon_{}", l + 1), None, l));
    }
    for w in omegas {
        for nu in 0..3 {
            jobs.push((format!("d_{}", nu + 1), Some(*w), nu));
            jobs.push((format!("b_{}", nu + 1), Some(*w), 3 + nu));
        }
    }
    let channels = jobs
        .par_iter()
        .map(|(name, w, idx)| {
            let series = match w {
                None => {
                    let d0 = e[*idx] * (I * a);
                    let b0 = s[*idx] * (-I * b);
                    inverter.invert(|rho, m| fields(rho, m, stack(&(-b0), &d0), zero, zero), None)?
                }
                Some(wq) if *idx < 3 => {
                    let pn = f.eval(*wq, k)? * e[*idx];
                    inverter.invert(|rho, m| fields(rho, m, stack(&zero, &(-pn * rho)), pn, zero), Some(*wq))?
                }
                Some(wq) => {
                    let mn = response.magnetic.eval(*wq, k)? * s[*idx - 3] * I;
                    let src = mn * c(consts.mu0, 0.0);
                    inverter.invert(|rho, m| fields(rho, m, stack(&(src * rho), &zero), zero, mn), Some(*wq))?
                }
            };
            let v: Vec<[Vec3C; 4]> = series.iter().map(|x| split4(x)).collect();
            let wref = w.unwrap_or(0.0).max(consts.omega_k(k));
            let (mut amp, mut far, mut sa, mut sf) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for i in 1..v.len() - 1 {
                let dd = (v[i + 1][2] - v[i - 1][2]) / c(2.0 * dt, 0.0);
                let db = (v[i + 1][3] - v[i - 1][3]) / c(2.0 * dt, 0.0);
                let oh = o * v[i][1];
                let oe = o * v[i][0];
                amp = amp.max((dd + oh).norm());
                far = far.max((db - oe).norm());
                let (en, hn) = (v[i][0].norm(), v[i][1].norm());
                sa = sa.max(dd.norm()).max(oh.norm()).max(wref * consts.eps0 * en).max(wref * hn / consts.c).max(wref * v[i][2].norm());
                sf = sf.max(db.norm()).max(oe.norm()).max(wref * consts.mu0 * hn).max(wref * en / consts.c).max(wref * v[i][3].norm());
            }
            let ratio = |r: f64, s: f64| if s > 0.0 { r / s } else { 0.0 };
            let (ampere, faraday) = (ratio(amp, sa), ratio(far, sf));
            Ok(ChannelResidual { channel: name.clone(), omega_q: *w, ampere, faraday })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_residual = channels.iter().map(|r| r.ampere.max(r.faraday)).fold(0.0, f64::max);
    Ok(MaxwellReport { k: [k.x, k.y, k.z], dt, channels, max_residual })
}

/// Gaussian probe field `amplitude · exp(−((t − center)/width)²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub amplitude: [f64; 3],
    pub center: f64,
    pub width: f64,
}

impl Probe {
    pub fn at(&self, t: f64) -> Vec3C {
        let g = (-((t - self.center) / self.width).powi(2)).exp();
        Vec3C::new(c(self.amplitude[0] * g, 0.0), c(self.amplitude[1] * g, 0.0), c(self.amplitude[2] * g, 0.0))
    }
}

/// Polarization induced by a c-number probe, once through the kernel
/// convolution `ε₀∫χ(t−t′)E(t′)dt′` and once through the driven reservoir
/// oscillators `P = (i/ħ)∫dω Σ_ν c_ν ∫e^{−iω(t−t′)} c_ν†E(t′)dt′ + h.c.`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstitutiveCheck {
    pub probe: Probe,
    pub times: Vec<f64>,
    pub p_convolution: Vec<Vec3C>,
    pub p_ladder: Vec<Vec3C>,
    /// `max ‖P_conv − P_ladder‖ / max ‖P_conv‖`.
    pub residual: f64,
}

const MEMORY_NODES: usize = 128;

pub fn constitutive_roundtrip(
    model: &dyn Coupling,
    k: &Vec3,
    probe: &Probe,
    times: &[f64],
    order: usize,
) -> Result<ConstitutiveCheck> {
    if model.which() != crate::coupling::Which::Electric {
        return Err(Error::InvalidInput("constitutive round trip needs an electric coupling".into()));
    }
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::InvalidInput("round-trip times must be non-negative".into()));
    }
    let consts = model.constants();
    let (x, w) = gauss_legendre(MEMORY_NODES);
    let memory = |t: f64| -> Vec<(f64, f64)> {
        x.iter().zip(&w).map(|(xi, wi)| (0.5 * t * (xi + 1.0), 0.5 * t * wi)).collect()
    };
    // Kernel route.
    let mut lags: Vec<f64> = times.iter().flat_map(|t| memory(*t).into_iter().map(move |(tp, _)| t - tp)).collect();
    lags.push(0.0);
    lags.sort_by(|a, b| a.total_cmp(b));
    lags.dedup();
    let spec = QuadratureSpec { rtol: 1e-11, max_order: 1 << 15, ..QuadratureSpec::default() };
    let kern = chi_kernel(model, k, &TimeGrid::from_points(lags.clone())?, &spec)?;
    let lookup = |t: f64| kern.values[lags.binary_search_by(|v| v.total_cmp(&t)).unwrap()];
    let p_convolution: Vec<Vec3C> = times
        .iter()
        .map(|t| {
            memory(*t).iter().fold(Vec3C::zeros(), |acc, (tp, wt)| {
                acc + lookup(t - tp) * probe.at(*tp) * c(consts.eps0 * wt, 0.0)
            })
        })
        .collect();
    // Reservoir route.
    let breaks = model.breakpoints();
    let rule = match model.support() {
        Some(upper) => crate::quadrature::Rule::graded(&breaks, upper, order),
        None => {
            let top = breaks.iter().copied().fold(model.frequency_scale(), f64::max);
            crate::quadrature::Rule::graded_with_tail(&breaks, 4.0 * top, order)
        }
    };
    let coeffs = noise_coefficients(model, k, &rule.nodes)?;
    let p_ladder: Vec<Vec3C> = times
        .par_iter()
        .map(|t| {
            let mem = memory(*t);
            let mut acc = Vec3C::zeros();
            for (q, (wq, wt)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                let drive = mem.iter().fold(Vec3C::zeros(), |a, (tp, wm)| {
                    a + probe.at(*tp) * (C64::from_polar(*wm, -wq * (t - tp)))
                });
                for cn in &coeffs.coefficients[q] {
                    let amp = cn.adjoint() * drive;
                    acc += cn * (amp[0] * (I / consts.hbar) * *wt);
                }
            }
            acc + acc.map(|z| z.conj())
        })
        .collect();
    let scale = p_convolution.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let diff = p_convolution.iter().zip(&p_ladder).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let residual = if scale > 0.0 { diff / scale } else { diff };
    Ok(ConstitutiveCheck { probe: *probe, times: times.to_vec(), p_convolution, p_ladder, residual })
}
