//! Scenario configuration: `[medium] [grids] [numerics] [output]` TOML.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::conductor::ConductorScenario;
use crate::coupling::{Coupling, CouplingModel, CouplingSet, CouplingTable, Which};
use crate::laplace::{InverseLaplaceSpec, InverseMethod};
use crate::modes::ModeSpec;
use crate::quadrature::QuadratureSpec;
use crate::response::LaplaceResponse;
use crate::tensor::{PhysicalConstants, Vec3};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKindConfig {
    Lorentz,
    Drude,
    Anisotropic,
    Tabulated,
}

/// A scalar or a per-axis triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Scalar(f64),
    Axes([f64; 3]),
}

impl Param {
    fn axes(self) -> [f64; 3] {
        match self {
            Param::Scalar(v) => [v; 3],
            Param::Axes(a) => a,
        }
    }

    fn scalar(self, key: &str) -> Result<f64> {
        match self {
            Param::Scalar(v) => Ok(v),
            Param::Axes(_) => Err(validation(key, "expects a scalar")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKindConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plasma: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonance: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<Param>,
    #[serde(default)]
    pub correlation_length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    /// CSV table of `Im χ̂` (kind = "tabulated"), relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MediumConfig {
    pub electric: Vec<ModelConfig>,
    pub magnetic: Vec<ModelConfig>,
    /// Treat Drude terms as free carriers entering through `σ̂`.
    pub conductor: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridsConfig {
    pub omega_max: f64,
    pub n_omega: usize,
    pub t_max: f64,
    pub n_t: usize,
    pub k: Vec<[f64; 3]>,
    pub omega_q_order: usize,
    /// Points of the Kramers–Kronig grid.
    pub kk_points: usize,
}

impl Default for GridsConfig {
    fn default() -> Self {
        Self {
            omega_max: 5.0,
            n_omega: 50,
            t_max: 20.0,
            n_t: 21,
            k: vec![[0.0, 0.0, 0.8]],
            omega_q_order: 2048,
            kk_points: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub laplace: InverseMethod,
    /// Relative tolerance of the frequency quadratures.
    pub rtol: f64,
    /// Tolerance of the fluctuation–dissipation and commutator checks.
    pub check_rtol: f64,
    /// Kramers–Kronig residual bound.
    pub kk_rtol: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self { laplace: InverseMethod::Auto, rtol: 1e-10, check_rtol: 1e-4, kk_rtol: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: PathBuf::from("out"), formats: vec![Format::Csv, Format::Json] }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub medium: MediumConfig,
    pub grids: GridsConfig,
    pub numerics: NumericsConfig,
    pub output: OutputConfig,
    /// Directory that relative table paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn validation(key: &str, message: &str) -> Error {
    Error::Validation { key: key.into(), message: message.into() }
}

/// 1-based line of the first `leaf = ...` assignment, if any.
fn line_of(text: &str, key: &str) -> Option<usize> {
    let leaf = key.rsplit('.').next()?.split('[').next()?;
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(leaf).is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

/// Parses and validates a scenario. Errors carry the offending line.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        let msg = e.message().trim().to_string();
        match line {
            Some(l) => Error::Parse(format!("line {l}: {msg}")),
            None => Error::Parse(msg),
        }
    })?;
    cfg.validate().map_err(|e| match e {
        Error::Validation { key, message } => {
            let message = match line_of(text, &key) {
                Some(l) => format!("{message} (line {l})"),
                None => message,
            };
            Error::Validation { key, message }
        }
        other => other,
    })?;
    Ok(cfg)
}

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    let mut cfg = parse_scenario(&text)?;
    cfg.base_dir = path.parent().map(Path::to_path_buf);
    Ok(cfg)
}

impl ScenarioConfig {
    /// Canonical TOML with every default written out.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grids;
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(validation(key, "must be positive and finite"))
            }
        };
        positive("grids.omega_max", g.omega_max)?;
        positive("grids.t_max", g.t_max)?;
        if g.n_omega < 2 {
            return Err(validation("grids.n_omega", "needs at least 2 points"));
        }
        if g.n_t < 2 {
            return Err(validation("grids.n_t", "needs at least 2 points"));
        }
        if g.omega_q_order < 8 {
            return Err(validation("grids.omega_q_order", "needs at least 8 nodes"));
        }
        if g.kk_points < 16 {
            return Err(validation("grids.kk_points", "needs at least 16 points"));
        }
        if g.k.is_empty() {
            return Err(validation("grids.k", "needs at least one wave vector"));
        }
        for (i, k) in g.k.iter().enumerate() {
            if k.iter().any(|v| !v.is_finite()) {
                return Err(validation(&format!("grids.k[{i}]"), "must be finite"));
            }
            if k.iter().all(|v| *v == 0.0) {
                return Err(validation(&format!("grids.k[{i}]"), "must be nonzero"));
            }
        }
        let n = &self.numerics;
        positive("numerics.rtol", n.rtol)?;
        positive("numerics.check_rtol", n.check_rtol)?;
        positive("numerics.kk_rtol", n.kk_rtol)?;
        if self.output.formats.is_empty() {
            return Err(validation("output.formats", "needs at least one format"));
        }
        for (field, list) in [("electric", &self.medium.electric), ("magnetic", &self.medium.magnetic)] {
            for (i, m) in list.iter().enumerate() {
                self.check_model(&format!("medium.{field}[{i}]"), m)?;
            }
        }
        if self.medium.magnetic.iter().any(|m| m.kind == ModelKindConfig::Drude) {
            return Err(validation("medium.magnetic", "Drude terms are electric only"));
        }
        Ok(())
    }

    fn check_model(&self, key: &str, m: &ModelConfig) -> Result<()> {
        let need = |name: &str, p: Option<Param>| p.ok_or_else(|| validation(&format!("{key}.{name}"), "is required for this kind"));
        match m.kind {
            ModelKindConfig::Lorentz => {
                need("plasma", m.plasma)?.scalar(&format!("{key}.plasma"))?;
                need("resonance", m.resonance)?.scalar(&format!("{key}.resonance"))?;
                need("damping", m.damping)?.scalar(&format!("{key}.damping"))?;
            }
            ModelKindConfig::Drude => {
                need("plasma", m.plasma)?.scalar(&format!("{key}.plasma"))?;
                need("damping", m.damping)?.scalar(&format!("{key}.damping"))?;
                if m.resonance.is_some() {
                    return Err(validation(&format!("{key}.resonance"), "is not used by a Drude term"));
                }
            }
            ModelKindConfig::Anisotropic => {
                need("plasma", m.plasma)?;
                need("resonance", m.resonance)?;
                need("damping", m.damping)?;
            }
            ModelKindConfig::Tabulated => {
                if m.table.is_none() {
                    return Err(validation(&format!("{key}.table"), "is required for a tabulated term"));
                }
            }
        }
        if m.kind != ModelKindConfig::Tabulated {
            if let Some(model) = self.model_without_table(m, Which::Electric) {
                model.validate().map_err(|e| validation(key, &e.to_string()))?;
            }
        }
        Ok(())
    }

    fn model_without_table(&self, m: &ModelConfig, which: Which) -> Option<CouplingModel> {
        let s = |p: Option<Param>| p.map(|v| v.axes()[0]);
        let mut model = match m.kind {
            ModelKindConfig::Lorentz => CouplingModel::lorentz(which, s(m.plasma)?, s(m.resonance)?, s(m.damping)?),
            ModelKindConfig::Drude => CouplingModel::drude(which, s(m.plasma)?, s(m.damping)?),
            ModelKindConfig::Anisotropic => {
                CouplingModel::anisotropic(which, m.plasma?.axes(), m.resonance?.axes(), m.damping?.axes())
            }
            ModelKindConfig::Tabulated => return None,
        };
        model = model.with_correlation_length(m.correlation_length);
        if let Some(w) = m.cutoff {
            model = model.with_cutoff(w);
        }
        Some(model)
    }

    fn model(&self, m: &ModelConfig, which: Which, constants: PhysicalConstants) -> Result<CouplingModel> {
        let model = match m.kind {
            ModelKindConfig::Tabulated => {
                let rel = m.table.as_ref().ok_or_else(|| validation("table", "missing"))?;
                let path = match &self.base_dir {
                    Some(d) if rel.is_relative() => d.join(rel),
                    _ => rel.clone(),
                };
                let target = CouplingTable::from_csv_path(&path)?;
                let table = crate::coupling::table_from_target(&target, which, &constants)?;
                let mut model = CouplingModel::tabulated(which, table).with_correlation_length(m.correlation_length);
                if let Some(w) = m.cutoff {
                    model = model.with_cutoff(w);
                }
                model
            }
            _ => self.model_without_table(m, which).ok_or_else(|| validation("medium", "incomplete model"))?,
        };
        let model = model.with_constants(constants);
        model.validate()?;
        Ok(model)
    }

    pub fn electric_models(&self, constants: PhysicalConstants) -> Result<Vec<CouplingModel>> {
        self.medium.electric.iter().map(|m| self.model(m, Which::Electric, constants)).collect()
    }

    pub fn magnetic_models(&self, constants: PhysicalConstants) -> Result<Vec<CouplingModel>> {
        self.medium.magnetic.iter().map(|m| self.model(m, Which::Magnetic, constants)).collect()
    }

    /// Summed electric coupling (bound and free together).
    pub fn electric(&self, constants: PhysicalConstants) -> Result<Arc<dyn Coupling>> {
        Ok(Arc::new(CouplingSet::from_models(Which::Electric, constants, self.electric_models(constants)?)?))
    }

    pub fn magnetic(&self, constants: PhysicalConstants) -> Result<Arc<dyn Coupling>> {
        Ok(Arc::new(CouplingSet::from_models(Which::Magnetic, constants, self.magnetic_models(constants)?)?))
    }

    /// Conductor split of the medium (Drude terms as free carriers).
    pub fn conductor(&self, constants: PhysicalConstants) -> Result<ConductorScenario> {
        ConductorScenario::from_models(self.electric_models(constants)?, self.magnetic_models(constants)?, constants)
    }

    /// Laplace data: with `conductor = true` Drude terms enter through `σ̂`.
    pub fn response(&self, constants: PhysicalConstants) -> Result<LaplaceResponse> {
        if self.medium.conductor {
            Ok(self.conductor(constants)?.response())
        } else {
            Ok(LaplaceResponse::new(self.electric(constants)?, self.magnetic(constants)?, constants))
        }
    }

    pub fn wave_vectors(&self) -> Vec<Vec3> {
        self.grids.k.iter().map(|k| Vec3::new(k[0], k[1], k[2])).collect()
    }

    pub fn omegas(&self) -> Vec<f64> {
        let g = &self.grids;
        (1..=g.n_omega).map(|i| g.omega_max * i as f64 / g.n_omega as f64).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        let g = &self.grids;
        (0..g.n_t).map(|i| g.t_max * i as f64 / (g.n_t - 1) as f64).collect()
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec { rtol: self.numerics.rtol, max_order: 1 << 15, ..QuadratureSpec::default() }
    }

    pub fn mode_spec(&self) -> ModeSpec {
        ModeSpec {
            inverse: InverseLaplaceSpec { method: self.numerics.laplace, ..InverseLaplaceSpec::default() },
            reservoir_order: self.grids.omega_q_order,
            ..ModeSpec::default()
        }
    }
}
