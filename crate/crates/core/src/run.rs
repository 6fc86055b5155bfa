//! Scenario execution: runs the requested pipeline stages for every wave
//! vector, writes artifacts and a manifest summarizing every check.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::conductor::{conductor_modes, q_kernel_consistency};
use crate::config::{Format, ScenarioConfig};
use crate::coupling::{coupling_from_target, Coupling, Which};
use crate::export::{tensor_cells, tensor_columns, ArtifactWriter, Cell, Table};
use crate::modes::{mode_coefficients, ModeCoefficients};
use crate::noise::{noise_commutator, NoiseOptions};
use crate::observables::{equal_time_commutators, maxwell_residual, vacuum_spectrum, FieldOperatorRepresentation};
use crate::response::{chi_kernel, chi_spectrum, kk_check, kk_grid, ResponseSpectrum, SpectrumOptions, TimeGrid};
use crate::tensor::{min_eigenvalue, norm, PhysicalConstants, Vec3};
use crate::{Error, Result};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Chi,
    InvertChi,
    Modes,
    Commutators,
    Conductor,
    Verify,
}

impl Command {
    fn stages(self, conductor: bool) -> Vec<Command> {
        match self {
            Command::Verify => {
                let mut s = vec![Command::Chi, Command::InvertChi, Command::Modes, Command::Commutators];
                if conductor {
                    s.push(Command::Conductor);
                }
                s
            }
            other => vec![other],
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub command: Command,
    pub si: bool,
    /// Overrides `output.directory`.
    pub out: Option<PathBuf>,
    /// Overrides `output.formats`.
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub k: Option<[f64; 3]>,
    pub passed: bool,
    pub max_error: Option<f64>,
    pub tolerance: Option<f64>,
    pub seconds: f64,
    /// Module and operation that raised the error.
    pub provenance: String,
    pub error_kind: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureInfo {
    pub rtol: f64,
    pub omega_q_order: usize,
    pub kk_points: usize,
    pub laplace: crate::laplace::InverseMethod,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema: u32,
    pub version: String,
    pub command: Command,
    pub units: String,
    pub conductor: bool,
    pub config: ScenarioConfig,
    pub quadrature: QuadratureInfo,
    pub checks: Vec<CheckEntry>,
    pub artifacts: Vec<String>,
    pub seconds: f64,
}

impl RunManifest {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// 0 when every check passed, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            2
        }
    }
}

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    consts: PhysicalConstants,
    writer: ArtifactWriter,
    checks: Vec<CheckEntry>,
}

/// Outcome of one measured check: `(max_error, tolerance)`.
type Measured = (f64, f64);

impl Ctx<'_> {
    /// Runs `f`, records its outcome; only I/O errors abort the run.
    fn check<F>(&mut self, name: &str, k: Option<&Vec3>, provenance: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut Self) -> Result<Option<Measured>>,
    {
        let start = Instant::now();
        let out = f(self);
        let seconds = start.elapsed().as_secs_f64();
        let k = k.map(|v| [v.x, v.y, v.z]);
        let entry = match out {
            Ok(m) => CheckEntry {
                name: name.into(),
                k,
                passed: m.is_none_or(|(e, tol)| e < tol),
                max_error: m.map(|x| x.0),
                tolerance: m.map(|x| x.1),
                seconds,
                provenance: provenance.into(),
                error_kind: None,
                error: None,
            },
            Err(e @ Error::Io { .. }) => return Err(e),
            Err(e) => CheckEntry {
                name: name.into(),
                k,
                passed: false,
                max_error: None,
                tolerance: None,
                seconds,
                provenance: provenance.into(),
                error_kind: Some(e.kind().into()),
                error: Some(e.to_string()),
            },
        };
        self.checks.push(entry);
        Ok(())
    }

    fn fields(&self) -> Result<Vec<(&'static str, Arc<dyn Coupling>)>> {
        Ok(vec![("e", self.cfg.electric(self.consts)?), ("m", self.cfg.magnetic(self.consts)?)])
    }
}

fn field_name(which: Which) -> &'static str {
    match which {
        Which::Electric => "electric",
        Which::Magnetic => "magnetic",
    }
}

/// `χ̂` on the requested grid through the Gauss-panel kernel of the model.
fn spectrum(model: &dyn Coupling, k: &Vec3, omegas: &[f64], cfg: &ScenarioConfig) -> Result<ResponseSpectrum> {
    if model.is_zero() {
        let values = vec![crate::tensor::zero3(); omegas.len()];
        return Ok(ResponseSpectrum { which: model.which(), k: *k, omegas: omegas.to_vec(), values });
    }
    let top = omegas.iter().copied().fold(0.0, f64::max);
    let opts = NoiseOptions::for_band(model, top)?;
    let quad = cfg.quadrature();
    let kern = chi_kernel(model, k, &opts.time_grid, &quad)?;
    chi_spectrum(&kern, omegas, &SpectrumOptions::default())
}

fn stage_chi(ctx: &mut Ctx, ki: usize, k: &Vec3) -> Result<()> {
    let times = ctx.cfg.times();
    let omegas = ctx.cfg.omegas();
    for (tag, model) in ctx.fields()? {
        let which = field_name(model.which());
        let m = model.clone();
        ctx.check(&format!("chi_kernel_{which}"), Some(k), "response::chi_kernel", |ctx| {
            let kern = chi_kernel(m.as_ref(), k, &TimeGrid::from_points(times.clone())?, &ctx.cfg.quadrature())?;
            let mut t = Table::new([vec!["t".to_string()], tensor_columns("chi_")].concat());
            for (ti, v) in kern.grid.t.iter().zip(&kern.values) {
                t.push([vec![Cell::Num(*ti)], tensor_cells(v)].concat());
            }
            ctx.writer.table(&format!("chi_kernel_{tag}_k{ki}"), &t)?;
            let spec = spectrum(m.as_ref(), k, &omegas, ctx.cfg)?;
            let mut t = Table::new([vec!["omega".to_string()], tensor_columns("chi_hat_")].concat());
            for (w, v) in spec.omegas.iter().zip(&spec.values) {
                t.push([vec![Cell::Num(*w)], tensor_cells(v)].concat());
            }
            ctx.writer.table(&format!("chi_spectrum_{tag}_k{ki}"), &t)?;
            Ok(None)
        })?;
        let m = model.clone();
        ctx.check(&format!("kk_{which}"), Some(k), "response::kk_check", |ctx| {
            let grid = kk_grid(50.0 * m.frequency_scale(), ctx.cfg.grids.kk_points);
            let spec = spectrum(m.as_ref(), k, &grid, ctx.cfg)?;
            Ok(Some((kk_check(&spec)?.max_residual, ctx.cfg.numerics.kk_rtol)))
        })?;
        let m = model.clone();
        ctx.check(&format!("fdt_{which}"), Some(k), "noise::noise_commutator", |ctx| {
            let top = omegas.iter().copied().fold(0.0, f64::max);
            let r = noise_commutator(m.as_ref(), k, &omegas, &NoiseOptions::for_band(m.as_ref(), top)?)?;
            Ok(Some((r.max_rel_err, ctx.cfg.numerics.check_rtol)))
        })?;
    }
    Ok(())
}

fn stage_invert(ctx: &mut Ctx, ki: usize, k: &Vec3) -> Result<()> {
    let omegas = ctx.cfg.omegas();
    for (tag, model) in ctx.fields()? {
        let which = field_name(model.which());
        ctx.check(&format!("coupling_round_trip_{which}"), Some(k), "coupling::coupling_from_target", |ctx| {
            let spec = spectrum(model.as_ref(), k, &omegas, ctx.cfg)?;
            let mut t = Table::new([vec!["omega".to_string()], tensor_columns("f_"), vec!["density_rel_err".into()]].concat());
            let mut worst: f64 = 0.0;
            for (i, w) in omegas.iter().enumerate() {
                let f = coupling_from_target(&spec.im(i), *w, k, model.which(), &ctx.consts)?;
                let want = model.density(*w, k)?;
                let got = f * f.adjoint();
                let scale = norm(&want);
                let err = if scale > 0.0 { norm(&(got - want)) / scale } else { norm(&got) };
                worst = worst.max(err);
                t.push([vec![Cell::Num(*w)], tensor_cells(&f), vec![Cell::Num(err)]].concat());
            }
            ctx.writer.table(&format!("coupling_{tag}_k{ki}"), &t)?;
            Ok(Some((worst, ctx.cfg.numerics.check_rtol)))
        })?;
    }
    Ok(())
}

fn modes_table(m: &ModeCoefficients) -> Table {
    let mut cols = vec!["t".to_string()];
    for p in ["gamma_", "xi_", "gamma_tilde_", "xi_tilde_"] {
        cols.extend(tensor_columns(p));
    }
    let mut t = Table::new(cols);
    for (i, ti) in m.times.iter().enumerate() {
        let mut row = vec![Cell::Num(*ti)];
        for x in [&m.gamma, &m.xi, &m.gamma_tilde, &m.xi_tilde] {
            row.extend(tensor_cells(&x[i]));
        }
        t.push(row);
    }
    t
}

fn stage_modes(ctx: &mut Ctx, ki: usize, k: &Vec3) -> Result<()> {
    ctx.check("modes", Some(k), "modes::mode_coefficients", |ctx| {
        let m = mode_coefficients(&ctx.cfg.response(ctx.consts)?, k, &ctx.cfg.times(), &ctx.cfg.mode_spec())?;
        ctx.writer.table(&format!("modes_k{ki}"), &modes_table(&m))?;
        Ok(None)
    })
}

fn stage_commutators(ctx: &mut Ctx, ki: usize, k: &Vec3) -> Result<()> {
    ctx.check("equal_time_commutators", Some(k), "observables::equal_time_commutators", |ctx| {
        let response = ctx.cfg.response(ctx.consts)?;
        let times = ctx.cfg.times();
        let (p, m) = FieldOperatorRepresentation::assemble(&response, k, &times, &ctx.cfg.mode_spec())?;
        let rep = equal_time_commutators(&p, &m)?;
        let mut cols = vec!["t".to_string(), "max_deviation".into(), "spectrum_min_eigenvalue".into()];
        cols.extend(tensor_columns("eh_"));
        let mut t = Table::new(cols);
        let mut negative: f64 = 0.0;
        for (i, ti) in times.iter().enumerate() {
            let s = vacuum_spectrum(&p, &m, &Vec3::zeros(), i)?;
            let lo = min_eigenvalue(&s);
            negative = negative.max(-lo / norm(&s).max(f64::MIN_POSITIVE));
            let scale = norm(&rep.eh.rhs[i]).max(f64::MIN_POSITIVE);
            let dev = [&rep.ee, &rep.eh, &rep.hh].iter().map(|r| norm(&(r.lhs[i] - r.rhs[i])) / scale).fold(0.0, f64::max);
            let mut row = vec![Cell::Num(*ti), Cell::Num(dev), Cell::Num(lo)];
            row.extend(tensor_cells(&rep.eh.lhs[i]));
            t.push(row);
        }
        ctx.writer.table(&format!("commutators_k{ki}"), &t)?;
        if negative > 1e-12 {
            return Err(Error::NotPsd { min_eigenvalue: -negative });
        }
        Ok(Some((rep.max_deviation, ctx.cfg.numerics.check_rtol)))
    })?;
    ctx.check("maxwell_residual", Some(k), "observables::maxwell_residual", |ctx| {
        let response = ctx.cfg.response(ctx.consts)?;
        let w = ctx.consts.omega_k(k);
        let dt = 1e-3 / w;
        let t0 = 0.5 * ctx.cfg.grids.t_max;
        let times: Vec<f64> = (0..=20).map(|i| t0 + dt * i as f64).collect();
        let om = ctx.cfg.omegas();
        let picks = [om[0], om[om.len() / 2], om[om.len() - 1]];
        let rep = maxwell_residual(&response, k, &times, &picks, &ctx.cfg.mode_spec())?;
        let mut t = Table::new(vec!["channel".into(), "omega_q".into(), "ampere".into(), "faraday".into()]);
        for c in &rep.channels {
            t.push(vec![Cell::Text(c.channel.clone()), Cell::Num(c.omega_q.unwrap_or(0.0)), Cell::Num(c.ampere), Cell::Num(c.faraday)]);
        }
        ctx.writer.table(&format!("maxwell_k{ki}"), &t)?;
        Ok(Some((rep.max_residual, 1e-5)))
    })
}

fn stage_conductor(ctx: &mut Ctx, ki: usize, k: &Vec3) -> Result<()> {
    let scenario = ctx.cfg.conductor(ctx.consts)?;
    let s = scenario.clone();
    ctx.check("conductor_modes", Some(k), "conductor::conductor_modes", |ctx| {
        let m = conductor_modes(&s, k, &ctx.cfg.times(), &ctx.cfg.mode_spec())?;
        ctx.writer.table(&format!("conductor_modes_k{ki}"), &modes_table(&m))?;
        if s.is_dielectric() {
            let d = mode_coefficients(&s.dielectric(), k, &ctx.cfg.times(), &ctx.cfg.mode_spec())?;
            let mut worst: f64 = 0.0;
            for (x, y) in [(&m.gamma, &d.gamma), (&m.xi, &d.xi), (&m.gamma_tilde, &d.gamma_tilde), (&m.xi_tilde, &d.xi_tilde)] {
                for (a, b) in x.iter().zip(y) {
                    worst = worst.max(norm(&(a - b)) / norm(b).max(f64::MIN_POSITIVE));
                }
            }
            return Ok(Some((worst, 1e-12)));
        }
        Ok(None)
    })?;
    ctx.check("q_kernel_consistency", Some(k), "conductor::q_kernel_consistency", |ctx| {
        let grid = TimeGrid::uniform(ctx.cfg.grids.t_max, 2001)?;
        let rep = q_kernel_consistency(&scenario, k, &grid, &ctx.cfg.omegas(), &ctx.cfg.quadrature())?;
        let noise = rep.noise_current.as_ref().map_or(0.0, |r| r.max_rel_err);
        let err = (rep.decomposition_residual / scenario.tolerances.decomposition)
            .max(noise / scenario.tolerances.noise_current);
        Ok(Some((err, 1.0)))
    })
}

/// Runs `opts.command` on `cfg`; writes artifacts and `manifest.json`.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunManifest> {
    let start = Instant::now();
    let consts = if opts.si { PhysicalConstants::si() } else { PhysicalConstants::natural() };
    let directory = opts.out.clone().unwrap_or_else(|| cfg.output.directory.clone());
    let formats = opts.format.map_or_else(|| cfg.output.formats.clone(), |f| vec![f]);
    let writer = ArtifactWriter::new(&directory, &formats)?;
    let mut ctx = Ctx { cfg, consts, writer, checks: Vec::new() };
    let mut stages = opts.command.stages(cfg.medium.conductor);
    ctx.check("medium", None, "config::ScenarioConfig::response", |ctx| {
        ctx.cfg.response(ctx.consts)?;
        ctx.cfg.conductor(ctx.consts)?;
        Ok(None)
    })?;
    if !ctx.checks[0].passed {
        stages.clear();
    }
    for (ki, k) in cfg.wave_vectors().iter().enumerate() {
        for stage in &stages {
            match stage {
                Command::Chi => stage_chi(&mut ctx, ki, k)?,
                Command::InvertChi => stage_invert(&mut ctx, ki, k)?,
                Command::Modes => stage_modes(&mut ctx, ki, k)?,
                Command::Commutators => stage_commutators(&mut ctx, ki, k)?,
                Command::Conductor => stage_conductor(&mut ctx, ki, k)?,
                Command::Verify => unreachable!(),
            }
        }
    }
    let mut manifest = RunManifest {
        schema: SCHEMA,
        version: env!("CARGO_PKG_VERSION").into(),
        command: opts.command,
        units: if opts.si { "si" } else { "natural" }.into(),
        conductor: cfg.medium.conductor || opts.command == Command::Conductor,
        config: cfg.clone(),
        quadrature: QuadratureInfo {
            rtol: cfg.numerics.rtol,
            omega_q_order: cfg.grids.omega_q_order,
            kk_points: cfg.grids.kk_points,
            laplace: cfg.numerics.laplace,
        },
        checks: ctx.checks,
        artifacts: ctx.writer.written.iter().map(|p| p.display().to_string()).collect(),
        seconds: 0.0,
    };
    manifest.seconds = start.elapsed().as_secs_f64();
    crate::export::write_json(&directory.join("manifest.json"), &manifest)?;
    Ok(manifest)
}
