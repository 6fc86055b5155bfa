//! Coupling tensors f̲(ω, k) and g̲(ω, k) that define the medium.
//!
//! Every analytic family is parameterised by the susceptibility it produces
//! (plasma frequency, resonance, damping) rather than by a raw coupling
//! amplitude; the coupling is then the square root of the matching spectral
//! density, so that `Im χ̂(ω) = (4π²/ħc³ε₀) ω² f̲ f̲†` reproduces the named
//! Lorentzian exactly.

use std::fmt::Debug;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{
    c, hermitian_sqrt, norm, real_diag, rotation, zero3, PhysicalConstants, Tensor3C, Vec3,
    C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Electric,
    Magnetic,
}

/// Prefactor `C` in `χ(t) = C ∫ dω ω² sin(ωt) f̲ f̲†`.
pub fn kernel_prefactor(which: Which, k: &PhysicalConstants) -> f64 {
    let base = 8.0 * std::f64::consts::PI / (k.hbar * k.c.powi(3));
    match which {
        Which::Electric => base / k.eps0,
        Which::Magnetic => base * k.mu0,
    }
}

/// `α` in `f̲ f̲† = α · Im χ̂ / ω²`, the inverse of `(π/2)·C`.
pub fn density_prefactor(which: Which, k: &PhysicalConstants) -> f64 {
    2.0 / (std::f64::consts::PI * kernel_prefactor(which, k))
}

/// One rational contribution `A / (ρ² + γρ + ω₀²)` to the Laplace-domain
/// susceptibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalTerm {
    pub amplitude: Tensor3C,
    pub damping: f64,
    pub resonance: f64,
}

impl RationalTerm {
    pub fn eval(&self, rho: C64) -> Tensor3C {
        self.amplitude / self.denominator(rho)
    }

    pub fn denominator(&self, rho: C64) -> C64 {
        rho * rho + rho * self.damping + self.resonance * self.resonance
    }
}

/// Anything that can be evaluated as a coupling tensor over (ω, k).
pub trait Coupling: Send + Sync + Debug {
    fn which(&self) -> Which;

    fn constants(&self) -> PhysicalConstants;

    fn eval(&self, omega: f64, k: &Vec3) -> Result<Tensor3C>;

    /// Spectral density `f̲ f̲†`.
    fn density(&self, omega: f64, k: &Vec3) -> Result<Tensor3C> {
        let f = self.eval(omega, k)?;
        Ok(f * f.adjoint())
    }

    /// Closed-form Laplace susceptibility, when the family is rational.
    fn rational_terms(&self, k: &Vec3) -> Option<Vec<RationalTerm>>;

    /// Typical frequency of the spectral features (resonance/damping/plasma).
    fn frequency_scale(&self) -> f64;

    /// Upper frequency past which the density is negligible (envelope) or
    /// undefined (table). `None` means an algebraic tail to infinity.
    fn support(&self) -> Option<f64>;

    fn is_zero(&self) -> bool;

    /// Frequencies near which the density varies quickly; quadrature places
    /// panel edges there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

fn oscillator_breakpoints(resonance: f64, damping: f64, out: &mut Vec<f64>) {
    for m in [0.5, 2.0, 8.0] {
        out.push(m * damping);
        if resonance > 0.0 {
            out.push(resonance - m * damping);
            out.push(resonance + m * damping);
        }
    }
    if resonance > 0.0 {
        out.push(resonance);
    }
}

/// Bilinear table over (ω, |k|).
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTable {
    pub omegas: Vec<f64>,
    pub k_norms: Vec<f64>,
    /// Row-major: index `iω * k_norms.len() + ik`.
    pub values: Vec<Tensor3C>,
}

impl CouplingTable {
    pub fn new(omegas: Vec<f64>, k_norms: Vec<f64>, values: Vec<Tensor3C>) -> Result<Self> {
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
        if omegas.is_empty() || k_norms.is_empty() {
            return Err(Error::InvalidInput("empty coupling table".into()));
        }
        if !increasing(&omegas) || !increasing(&k_norms) {
            return Err(Error::InvalidInput("table axes must be strictly increasing".into()));
        }
        if values.len() != omegas.len() * k_norms.len() {
            return Err(Error::InvalidInput(format!(
                "table has {} tensors, expected {}",
                values.len(),
                omegas.len() * k_norms.len()
            )));
        }
        Ok(Self { omegas, k_norms, values })
    }

    /// Reads `ω, |k|, Re/Im of the 9 entries in row-major order`; a header row
    /// is required. Rows may come in any order but must fill the full grid.
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Self::from_csv_str(&text)
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header_len = reader.headers().map_err(|e| Error::Csv(e.to_string()))?.len();
        if header_len != 20 {
            return Err(Error::Csv(format!("expected 20 columns, header has {header_len}")));
        }
        let mut rows: Vec<(f64, f64, Tensor3C)> = Vec::new();
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
            let nums: Vec<f64> = rec
                .iter()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Csv(format!("row {}: {e}", line + 2)))?;
            if nums.len() != 20 {
                return Err(Error::Csv(format!("row {}: expected 20 columns", line + 2)));
            }
            let t = Tensor3C::from_fn(|i, j| c(nums[2 + 2 * (3 * i + j)], nums[3 + 2 * (3 * i + j)]));
            rows.push((nums[0], nums[1], t));
        }
        let mut omegas: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut k_norms: Vec<f64> = rows.iter().map(|r| r.1).collect();
        for axis in [&mut omegas, &mut k_norms] {
            axis.sort_by(|a, b| a.total_cmp(b));
            axis.dedup();
        }
        let nk = k_norms.len();
        let mut values = vec![None; omegas.len() * nk];
        for (w, k, t) in rows {
            let iw = omegas.binary_search_by(|x| x.total_cmp(&w)).unwrap();
            let ik = k_norms.binary_search_by(|x| x.total_cmp(&k)).unwrap();
            values[iw * nk + ik] = Some(t);
        }
        let values = values
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Csv("table does not cover the full (omega, |k|) grid".into()))?;
        Self::new(omegas, k_norms, values)
    }

    fn bracket(axis: &[f64], x: f64) -> Option<(usize, f64)> {
        if axis.len() == 1 {
            return Some((0, 0.0));
        }
        let (lo, hi) = (axis[0], axis[axis.len() - 1]);
        if x < lo || x > hi {
            return None;
        }
        let i = axis.partition_point(|v| *v <= x).saturating_sub(1).min(axis.len() - 2);
        Some((i, (x - axis[i]) / (axis[i + 1] - axis[i])))
    }

    pub fn interpolate(&self, omega: f64, k_norm: f64) -> Result<Tensor3C> {
        let out = || Error::OutOfTableRange { omega, k_norm };
        let (iw, tw) = Self::bracket(&self.omegas, omega).ok_or_else(out)?;
        let (ik, tk) = Self::bracket(&self.k_norms, k_norm).ok_or_else(out)?;
        let nk = self.k_norms.len();
        let at = |a: usize, b: usize| {
            let a = a.min(self.omegas.len() - 1);
            let b = b.min(nk - 1);
            self.values[a * nk + b]
        };
        let lerp = |a: Tensor3C, b: Tensor3C, t: f64| a * c(1.0 - t, 0.0) + b * c(t, 0.0);
        let low = lerp(at(iw, ik), at(iw, ik + 1), tk);
        let high = lerp(at(iw + 1, ik), at(iw + 1, ik + 1), tk);
        Ok(lerp(low, high, tw))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    LorentzIsotropic { plasma: f64, resonance: f64, damping: f64 },
    Drude { plasma: f64, damping: f64 },
    GaussianAnisotropic { plasma: [f64; 3], resonance: [f64; 3], damping: [f64; 3] },
    Tabulated(Arc<CouplingTable>),
}

/// A parametric coupling family. `correlation_length` sets a Gaussian spatial
/// profile (zero means local); `cutoff`, when present, multiplies the coupling
/// by `exp(−ω²/cutoff²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingModel {
    pub kind: ModelKind,
    pub which: Which,
    pub correlation_length: f64,
    pub cutoff: Option<f64>,
    pub constants: PhysicalConstants,
}

/// `Im χ̂` of the damped oscillator `ω_p²/(ω₀² − ω² − iγω)`.
pub fn lorentz_im_chi(omega: f64, plasma: f64, resonance: f64, damping: f64) -> f64 {
    let d = resonance * resonance - omega * omega;
    plasma * plasma * damping * omega / (d * d + damping * damping * omega * omega)
}

impl CouplingModel {
    pub fn new(kind: ModelKind, which: Which) -> Self {
        Self {
            kind,
            which,
            correlation_length: 0.0,
            cutoff: None,
            constants: PhysicalConstants::natural(),
        }
    }

    pub fn lorentz(which: Which, plasma: f64, resonance: f64, damping: f64) -> Self {
        Self::new(ModelKind::LorentzIsotropic { plasma, resonance, damping }, which)
    }

    pub fn drude(which: Which, plasma: f64, damping: f64) -> Self {
        Self::new(ModelKind::Drude { plasma, damping }, which)
    }

    pub fn anisotropic(which: Which, plasma: [f64; 3], resonance: [f64; 3], damping: [f64; 3]) -> Self {
        Self::new(ModelKind::GaussianAnisotropic { plasma, resonance, damping }, which)
    }

    pub fn tabulated(which: Which, table: CouplingTable) -> Self {
        Self::new(ModelKind::Tabulated(Arc::new(table)), which)
    }

    pub fn with_correlation_length(mut self, ell: f64) -> Self {
        self.correlation_length = ell;
        self
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn with_constants(mut self, constants: PhysicalConstants) -> Self {
        self.constants = constants;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64, allow_zero: bool| {
            if !v.is_finite() || v < 0.0 || (!allow_zero && v == 0.0) {
                Err(Error::InvalidInput(format!("{name} must be {}", if allow_zero { "non-negative" } else { "positive" })))
            } else {
                Ok(())
            }
        };
        positive("correlation_length", self.correlation_length, true)?;
        if let Some(w) = self.cutoff {
            positive("cutoff", w, false)?;
        }
        match &self.kind {
            ModelKind::LorentzIsotropic { plasma, resonance, damping } => {
                positive("plasma", *plasma, true)?;
                positive("resonance", *resonance, true)?;
                positive("damping", *damping, false)
            }
            ModelKind::Drude { plasma, damping } => {
                positive("plasma", *plasma, true)?;
                positive("damping", *damping, false)
            }
            ModelKind::GaussianAnisotropic { plasma, resonance, damping } => {
                for a in 0..3 {
                    positive("plasma", plasma[a], true)?;
                    positive("resonance", resonance[a], true)?;
                    positive("damping", damping[a], false)?;
                }
                Ok(())
            }
            ModelKind::Tabulated(_) => Ok(()),
        }
    }

    fn envelope(&self, omega: f64) -> f64 {
        self.cutoff.map_or(1.0, |w| (-(omega / w).powi(2)).exp())
    }

    fn spatial(&self, k: &Vec3) -> f64 {
        let l = self.correlation_length;
        (-0.5 * k.norm_squared() * l * l).exp()
    }

    /// Scalar coupling amplitude for one oscillator branch.
    fn amplitude(&self, omega: f64, plasma: f64, resonance: f64, damping: f64) -> f64 {
        if omega <= 0.0 || plasma == 0.0 {
            return 0.0;
        }
        let alpha = density_prefactor(self.which, &self.constants);
        let im = lorentz_im_chi(omega, plasma, resonance, damping);
        (alpha * im).sqrt() / omega * self.envelope(omega)
    }

    /// Position-space profile of the isotropic families at separation `r`,
    /// whose Fourier transform is `eval`.
    pub fn real_space(&self, omega: f64, r: &Vec3) -> Result<Tensor3C> {
        let amp = match self.kind {
            ModelKind::LorentzIsotropic { plasma, resonance, damping } => {
                self.amplitude(omega, plasma, resonance, damping)
            }
            ModelKind::Drude { plasma, damping } => self.amplitude(omega, plasma, 0.0, damping),
            _ => return Err(Error::InvalidInput("real-space profile only for isotropic families".into())),
        };
        let l = self.correlation_length;
        if l == 0.0 {
            return Err(Error::InvalidInput("local model has a delta-function profile".into()));
        }
        let g = (2.0 * std::f64::consts::PI * l * l).powf(-1.5) * (-r.norm_squared() / (2.0 * l * l)).exp();
        Ok(real_diag([amp * g; 3]))
    }
}

impl Coupling for CouplingModel {
    fn which(&self) -> Which {
        self.which
    }

    fn constants(&self) -> PhysicalConstants {
        self.constants
    }

    fn eval(&self, omega: f64, k: &Vec3) -> Result<Tensor3C> {
        if omega < 0.0 || !omega.is_finite() {
            return Err(Error::InvalidInput(format!("coupling frequency must be >= 0, got {omega}")));
        }
        let s = self.spatial(k);
        Ok(match &self.kind {
            ModelKind::LorentzIsotropic { plasma, resonance, damping } => {
                real_diag([self.amplitude(omega, *plasma, *resonance, *damping) * s; 3])
            }
            ModelKind::Drude { plasma, damping } => {
                real_diag([self.amplitude(omega, *plasma, 0.0, *damping) * s; 3])
            }
            ModelKind::GaussianAnisotropic { plasma, resonance, damping } => real_diag(
                std::array::from_fn(|a| self.amplitude(omega, plasma[a], resonance[a], damping[a]) * s),
            ),
            ModelKind::Tabulated(table) => {
                table.interpolate(omega, k.norm())? * c(self.envelope(omega) * s, 0.0)
            }
        })
    }

    fn rational_terms(&self, k: &Vec3) -> Option<Vec<RationalTerm>> {
        if self.cutoff.is_some() {
            return None;
        }
        let s2 = self.spatial(k).powi(2);
        let iso = |plasma: f64, resonance: f64, damping: f64| RationalTerm {
            amplitude: real_diag([plasma * plasma * s2; 3]),
            damping,
            resonance,
        };
        match &self.kind {
            ModelKind::LorentzIsotropic { plasma, resonance, damping } => {
                Some(vec![iso(*plasma, *resonance, *damping)])
            }
            ModelKind::Drude { plasma, damping } => Some(vec![iso(*plasma, 0.0, *damping)]),
            ModelKind::GaussianAnisotropic { plasma, resonance, damping } => Some(
                (0..3)
                    .filter(|a| plasma[*a] != 0.0)
                    .map(|a| {
                        let mut d = [0.0; 3];
                        d[a] = plasma[a] * plasma[a] * s2;
                        RationalTerm { amplitude: real_diag(d), damping: damping[a], resonance: resonance[a] }
                    })
                    .collect(),
            ),
            ModelKind::Tabulated(_) => None,
        }
    }

    fn frequency_scale(&self) -> f64 {
        let m = match &self.kind {
            ModelKind::LorentzIsotropic { plasma, resonance, damping } => plasma.max(*resonance).max(*damping),
            ModelKind::Drude { plasma, damping } => plasma.max(*damping),
            ModelKind::GaussianAnisotropic { plasma, resonance, damping } => plasma
                .iter()
                .chain(resonance)
                .chain(damping)
                .fold(0.0f64, |a, b| a.max(*b)),
            ModelKind::Tabulated(t) => t.omegas[t.omegas.len() - 1] / 10.0,
        };
        if m > 0.0 { m } else { 1.0 }
    }

    fn support(&self) -> Option<f64> {
        let table_max = match &self.kind {
            ModelKind::Tabulated(t) => Some(t.omegas[t.omegas.len() - 1]),
            _ => None,
        };
        let envelope_max = self.cutoff.map(|w| 4.5 * w);
        match (table_max, envelope_max) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    fn is_zero(&self) -> bool {
        match &self.kind {
            ModelKind::LorentzIsotropic { plasma, .. } | ModelKind::Drude { plasma, .. } => *plasma == 0.0,
            ModelKind::GaussianAnisotropic { plasma, .. } => plasma.iter().all(|p| *p == 0.0),
            ModelKind::Tabulated(t) => t.values.iter().all(|v| norm(v) == 0.0),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        match &self.kind {
            ModelKind::LorentzIsotropic { resonance, damping, .. } => {
                oscillator_breakpoints(*resonance, *damping, &mut out)
            }
            ModelKind::Drude { damping, .. } => oscillator_breakpoints(0.0, *damping, &mut out),
            ModelKind::GaussianAnisotropic { resonance, damping, .. } => {
                for a in 0..3 {
                    oscillator_breakpoints(resonance[a], damping[a], &mut out);
                }
            }
            ModelKind::Tabulated(t) => {
                let stride = t.omegas.len().div_ceil(2048);
                out.extend(t.omegas.iter().step_by(stride));
            }
        }
        out.retain(|w| *w > 0.0);
        out
    }
}

/// Sum of independent coupling channels. The combined coupling is the PSD
/// square root of the summed densities, which is one member of the gauge
/// family reproducing the same susceptibility.
#[derive(Debug, Clone)]
pub struct CouplingSet {
    which: Which,
    constants: PhysicalConstants,
    pub terms: Vec<Arc<dyn Coupling>>,
}

impl CouplingSet {
    pub fn new(which: Which, constants: PhysicalConstants, terms: Vec<Arc<dyn Coupling>>) -> Result<Self> {
        for t in &terms {
            if t.which() != which {
                return Err(Error::InvalidInput("mixed electric/magnetic terms in a coupling set".into()));
            }
        }
        Ok(Self { which, constants, terms })
    }

    pub fn empty(which: Which, constants: PhysicalConstants) -> Self {
        Self { which, constants, terms: Vec::new() }
    }

    pub fn from_models(which: Which, constants: PhysicalConstants, models: Vec<CouplingModel>) -> Result<Self> {
        Self::new(
            which,
            constants,
            models
                .into_iter()
                .map(|m| Arc::new(m.with_constants(constants)) as Arc<dyn Coupling>)
                .collect(),
        )
    }
}

impl Coupling for CouplingSet {
    fn which(&self) -> Which {
        self.which
    }

    fn constants(&self) -> PhysicalConstants {
        self.constants
    }

    fn eval(&self, omega: f64, k: &Vec3) -> Result<Tensor3C> {
        match self.terms.as_slice() {
            [] => Ok(zero3()),
            [only] => only.eval(omega, k),
            _ => {
                let d = self.density(omega, k)?;
                hermitian_sqrt(&d, 1e-10)
            }
        }
    }

    fn density(&self, omega: f64, k: &Vec3) -> Result<Tensor3C> {
        let mut acc = zero3();
        for t in &self.terms {
            acc += t.density(omega, k)?;
        }
        Ok(acc)
    }

    fn rational_terms(&self, k: &Vec3) -> Option<Vec<RationalTerm>> {
        let mut all = Vec::new();
        for t in &self.terms {
            all.extend(t.rational_terms(k)?);
        }
        Some(all)
    }

    fn frequency_scale(&self) -> f64 {
        self.terms.iter().map(|t| t.frequency_scale()).fold(0.0, f64::max).max(f64::MIN_POSITIVE)
            .max(if self.terms.is_empty() { 1.0 } else { 0.0 })
    }

    fn support(&self) -> Option<f64> {
        let mut out: Option<f64> = Some(0.0);
        for t in &self.terms {
            out = match (out, t.support()) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
        }
        if self.terms.is_empty() { None } else { out }
    }

    fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.is_zero())
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.terms.iter().flat_map(|t| t.breakpoints()).collect()
    }
}

/// Frequency-dependent real orthogonal tensor `A(ω)`.
#[derive(Debug, Clone, PartialEq)]
pub enum GaugeTransform {
    Fixed(Tensor3C),
    /// Rotation about `axis` by `angle + angle_rate·ω`.
    Rotation { axis: Vec3, angle: f64, angle_rate: f64 },
}

impl GaugeTransform {
    pub fn identity() -> Self {
        GaugeTransform::Fixed(Tensor3C::identity())
    }

    pub fn at(&self, omega: f64) -> Result<Tensor3C> {
        let a = match self {
            GaugeTransform::Fixed(a) => *a,
            GaugeTransform::Rotation { axis, angle, angle_rate } => rotation(axis, angle + angle_rate * omega),
        };
        let deviation = norm(&(a * a.transpose() - Tensor3C::identity()));
        let real = a.iter().all(|z| z.im == 0.0);
        if deviation > 1e-12 || !real {
            return Err(Error::NotOrthogonal { deviation });
        }
        Ok(a)
    }
}

/// Coupling right-multiplied by `Aᵀ(ω)`.
#[derive(Debug, Clone)]
pub struct Gauged {
    pub inner: Arc<dyn Coupling>,
    pub transform: GaugeTransform,
}

impl Coupling for Gauged {
    fn which(&self) -> Which {
        self.inner.which()
    }

    fn constants(&self) -> PhysicalConstants {
        self.inner.constants()
    }

    fn eval(&self, omega: f64, k: &Vec3) -> Result<Tensor3C> {
        Ok(self.inner.eval(omega, k)? * self.transform.at(omega)?.transpose())
    }

    fn rational_terms(&self, k: &Vec3) -> Option<Vec<RationalTerm>> {
        self.inner.rational_terms(k)
    }

    fn frequency_scale(&self) -> f64 {
        self.inner.frequency_scale()
    }

    fn support(&self) -> Option<f64> {
        self.inner.support()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
}

/// Evaluate a coupling; the named entry point for `f̲(ω, k)` / `g̲(ω, k)`.
pub fn eval_coupling(model: &dyn Coupling, omega: f64, k: &Vec3) -> Result<Tensor3C> {
    model.eval(omega, k)
}

/// Wrap `coupling` so that it evaluates to `f̲(ω, k)·Aᵀ(ω)`. Fails if `A` is
/// not orthogonal at a probe frequency.
pub fn apply_gauge(coupling: Arc<dyn Coupling>, transform: GaugeTransform) -> Result<Gauged> {
    transform.at(0.0)?;
    transform.at(coupling.frequency_scale())?;
    Ok(Gauged { inner: coupling, transform })
}

/// Coupling tensor reproducing a target `Im χ̂` at one frequency:
/// `f̲ = sqrt(α Im χ̂ / ω²)` with the electric or magnetic `α`.
pub fn coupling_from_target(
    im_chi: &Tensor3C,
    omega: f64,
    _k: &Vec3,
    which: Which,
    constants: &PhysicalConstants,
) -> Result<Tensor3C> {
    if !(omega > 0.0) {
        return Err(Error::ZeroFrequency);
    }
    let alpha = density_prefactor(which, constants) / (omega * omega);
    hermitian_sqrt(&(im_chi * c(alpha, 0.0)), 1e-10)
}

/// Tabulated coupling built from a tabulated target `Im χ̂(ω, |k|)`.
pub fn table_from_target(target: &CouplingTable, which: Which, constants: &PhysicalConstants) -> Result<CouplingTable> {
    let nk = target.k_norms.len();
    let mut values = Vec::with_capacity(target.values.len());
    for (idx, im_chi) in target.values.iter().enumerate() {
        let omega = target.omegas[idx / nk];
        let kv = Vec3::new(0.0, 0.0, target.k_norms[idx % nk]);
        if omega == 0.0 {
            crate::tensor::hermitian_sqrt(im_chi, 1e-10)?;
            values.push(zero3());
        } else {
            values.push(coupling_from_target(im_chi, omega, &kv, which, constants)?);
        }
    }
    CouplingTable::new(target.omegas.clone(), target.k_norms.clone(), values)
}

/// Real-space reality check value `‖f̲(ω,−k) − conj f̲(ω,k)‖`.
pub fn reality_defect(model: &dyn Coupling, omega: f64, k: &Vec3) -> Result<f64> {
    let plus = model.eval(omega, k)?;
    let minus = model.eval(omega, &-k)?;
    Ok(norm(&(minus - plus.map(|z| z.conj()))))
}
