//! Runs a configured experiment, writes its CSV tables and a JSON manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{Command, ExperimentConfig, FillKind, InitialState, PotentialKind, ShiftProfile};
use super::table::{emit_results, CotangentRow, EtaOptimumRow, EvolutionRow, ExactRow, MeasuresRow, SpectrumRow, StateRow, TableRow};
use crate::dynamics::{Potential, Propagator};
use crate::error::{Error, Result};
use crate::exact::{build_exact_state, cotangent_params, exact_energy, exact_energy_bounds, linear_residual_cotangent, nonlinear_residual, ExactSolutionSpec, PeriodicProfile};
use crate::grid::{Boundary, Density, Grid, NonlinearParams, PhysConstants, ShiftFill, Wavefunction};
use crate::measures::{fisher_information, kl_divergence_shifted, shannon_entropy};
use crate::spectra::{count_nodes, first_order_shift_numeric, minimize_over_eta, node_shift_eta_profile, sho_ground_shift_closed, solve_linear_spectrum, ShiftResult};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of the canonical rendering of the config.
    pub input_hash: String,
    pub config: ExperimentConfig,
    pub wall_time_seconds: f64,
    /// Files written by this run, relative to the output directory.
    pub outputs: Vec<String>,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Deterministic content hash of a config.
pub fn input_hash(config: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(config.render().as_bytes()))
}

struct Outputs<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Outputs<'_> {
    fn write<R: TableRow>(&mut self, name: &str, rows: &[R]) -> Result<()> {
        emit_results(rows, &self.dir.join(name))?;
        self.files.push(name.to_string());
        Ok(())
    }
}

/// Runs `config`, writing tables into `out_dir` and the manifest last. On failure the
/// manifest still lists whatever was written before the error.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<RunManifest> {
    std::fs::create_dir_all(out_dir)?;
    let start = Instant::now();
    let mut outputs = Outputs { dir: out_dir, files: Vec::new() };
    let result = dispatch(config, &mut outputs);
    let manifest = RunManifest {
        artifact: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: config.command.as_str().into(),
        input_hash: input_hash(config),
        config: config.clone(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        outputs: outputs.files,
        status: if result.is_ok() { "ok".into() } else { "failed".into() },
        error: result.as_ref().err().map(|e| e.to_string()),
    };
    std::fs::write(out_dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;
    result.map(|_| manifest)
}

/// Alias of [`run_experiment`] for sweep-style commands.
pub fn run_sweep(config: &ExperimentConfig, out_dir: &Path) -> Result<RunManifest> {
    run_experiment(config, out_dir)
}

/// The output directory a config asks for, or `results` next to nothing in particular.
pub fn configured_out_dir(config: &ExperimentConfig) -> PathBuf {
    PathBuf::from(config.run.out.clone().unwrap_or_else(|| "results".into()))
}

fn dispatch(c: &ExperimentConfig, out: &mut Outputs<'_>) -> Result<()> {
    match c.command {
        Command::Evolve => evolve(c, out),
        Command::Spectrum => spectrum(c, out),
        Command::ShiftSweep => shift_sweep(c, out),
        Command::EtaOpt => eta_opt(c, out),
        Command::ExactVerify => exact_verify(c, out),
        Command::Cotangent => cotangent(c, out),
        Command::Measures => measures(c, out),
    }
}

fn potential(c: &ExperimentConfig, grid: Grid, consts: &PhysConstants) -> Result<Potential> {
    let Some(p) = c.potential else { return Ok(Potential::zero(grid)) };
    match p.kind {
        PotentialKind::Free => Ok(Potential::zero(grid)),
        PotentialKind::Harmonic => Potential::harmonic(grid, p.omega.unwrap_or(1.0), consts),
        PotentialKind::Quartic => Potential::quartic(grid, p.coefficient.unwrap_or(1.0)),
    }
}

fn fill(c: &ExperimentConfig, grid: &Grid) -> ShiftFill {
    match c.nonlinearity.as_ref().and_then(|n| n.fill) {
        Some(FillKind::Periodic) => ShiftFill::Periodic,
        Some(FillKind::Floor) => ShiftFill::Floor,
        None if grid.boundary() == Boundary::Periodic => ShiftFill::Periodic,
        None => ShiftFill::Floor,
    }
}

/// `(eta, L)` pairs in config order, eta outermost.
fn parameter_pairs(c: &ExperimentConfig) -> Vec<(f64, f64)> {
    let Some(nl) = &c.nonlinearity else { return Vec::new() };
    nl.eta.iter().flat_map(|&e| nl.length.iter().map(move |&l| (e, l))).collect()
}

fn evolve(c: &ExperimentConfig, out: &mut Outputs<'_>) -> Result<()> {
    let consts = c.consts()?;
    let grid = c.grid()?;
    let v = potential(c, grid, &consts)?;
    let params = match parameter_pairs(c).first() {
        Some(&(eta, l)) => NonlinearParams::new(l, eta, &consts)?,
        None => NonlinearParams::linear(),
    };
    let r = &c.run;
    let k = r.wavenumber.unwrap_or(0.0);
    let psi0 = match r.initial.unwrap_or(InitialState::Gaussian) {
        InitialState::PlaneWave => Wavefunction::from_fn(grid, |x| Complex64::from_polar(1.0, k * x))?,
        InitialState::Gaussian => {
            let (x0, w) = (r.center.unwrap_or(0.0), r.width.unwrap_or(1.0));
            Wavefunction::from_fn(grid, |x| Complex64::from_polar((-(x - x0).powi(2) / (4.0 * w * w)).exp(), k * x))?
        }
    }
    .normalized()?;
    let prop = Propagator::new(&v, params, consts, fill(c, &grid))?;
    let report = prop.evolve_sampled(&psi0, r.dt.unwrap_or(0.0), r.n_steps.unwrap_or(0), r.record_every.unwrap_or(1))?;
    let rows: Vec<EvolutionRow> = (0..report.times.len())
        .map(|i| EvolutionRow { time: report.times[i], norm_drift: report.norm_drift[i], energy: report.energy_trace[i] })
        .collect();
    out.write("evolution.csv", &rows)?;
    let state: Vec<StateRow> = grid
        .xs()
        .into_iter()
        .zip(report.final_state.values())
        .map(|(x, z)| StateRow { x, re: z.re, im: z.im })
        .collect();
    out.write("final_state.csv", &state)
}

fn spectrum(c: &ExperimentConfig, out: &mut Outputs<'_>) -> Result<()> {
    let consts = c.consts()?;
    let grid = c.grid()?;
    let sol = solve_linear_spectrum(&potential(c, grid, &consts)?, &consts, c.run.n_states.unwrap_or(1))?;
    let corrected = sol.corrected_energies();
    let rows: Vec<SpectrumRow> = (0..sol.energies.len())
        .map(|i| SpectrumRow { state_index: i, energy: sol.energies[i], corrected_energy: corrected[i], nodes: count_nodes(&sol.states[i]) })
        .collect();
    out.write("spectrum.csv", &rows)
}

fn shift_sweep(c: &ExperimentConfig, out: &mut Outputs<'_>) -> Result<()> {
    let consts = c.consts()?;
    let grid = c.grid()?;
    let states = c.run.states.clone().unwrap_or_default();
    let n_states = states.iter().copied().max().unwrap_or(0) + 1;
    let sol = solve_linear_spectrum(&potential(c, grid, &consts)?, &consts, n_states)?;
    let fill = fill(c, &grid);
    let triples: Vec<(f64, f64, usize)> =
        parameter_pairs(c).into_iter().flat_map(|(e, l)| states.iter().map(move |&s| (e, l, s))).collect();
    let rows = triples
        .par_iter()
        .map(|&(eta, l, s)| {
            let params = NonlinearParams::new(l, eta, &consts)?;
            first_order_shift_numeric(&sol.states[s], s, &params, &consts, &fill)
        })
        .collect::<Result<Vec<ShiftResult>>>()?;
    out.write("shifts.csv", &rows)
}

fn eta_opt(c: &ExperimentConfig, out: &mut Outputs<'_>) -> Result<()> {
    let (name, m) = match c.run.profile.unwrap_or(ShiftProfile::Node) {
        ShiftProfile::Node => ("node", minimize_over_eta(node_shift_eta_profile)?),
        ShiftProfile::Gaussian => {
            let l = c.run.l_over_a.unwrap_or(1.0);
            ("gaussian", minimize_over_eta(|e| sho_ground_shift_closed(e, l))?)
        }
    };
    out.write("eta_opt.csv", &[EtaOptimumRow { profile: name.into(), eta_star: m.eta, value: m.value }])
}

fn exact_inputs(c: &ExperimentConfig) -> Result<(PhysConstants, Grid, f64, PeriodicProfile, f64)> {
    let consts = c.consts()?;
    let grid = c.grid()?;
    let kappa = c.run.kappa.unwrap_or(1.0);
    let alpha = match &c.run.alpha {
        Some(pairs) => PeriodicProfile::from_pairs(pairs)?,
        None => PeriodicProfile::sine(),
    };
    let radius = c.run.exclusion_radius.unwrap_or(3.0 * grid.dx());
    Ok((consts, grid, kappa, alpha, radius))
}

fn exact_verify(c: &ExperimentConfig, out: &mut Outputs<'_>) -> Result<()> {
    let (consts, grid, kappa, alpha, radius) = exact_inputs(c)?;
    let rows = parameter_pairs(c)
        .par_iter()
        .map(|&(eta, l)| {
            let params = NonlinearParams::new(l, eta, &consts)?;
            let psi = build_exact_state(&ExactSolutionSpec::new(kappa, alpha.clone(), params)?, &grid)?;
            let energy = exact_energy(kappa, &params)?;
            let res = nonlinear_residual(&psi, energy, &params, &consts, radius)?;
            Ok(ExactRow {
                kappa,
                eta,
                length: l,
                energy,
                lower_bound: exact_energy_bounds(&params)?.0,
                max_residual: res.max_residual,
                excluded_fraction: res.excluded_fraction,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.write("exact.csv", &rows)
}

fn cotangent(c: &ExperimentConfig, out: &mut Outputs<'_>) -> Result<()> {
    let (consts, grid, kappa, _, radius) = exact_inputs(c)?;
    let rows = parameter_pairs(c)
        .par_iter()
        .map(|&(eta, l)| {
            let params = NonlinearParams::new(l, eta, &consts)?;
            let psi = build_exact_state(&ExactSolutionSpec::new(kappa, PeriodicProfile::sine(), params)?, &grid)?;
            let energy = exact_energy(kappa, &params)?;
            let cot = cotangent_params(kappa, &params, &consts)?;
            let max_residual = linear_residual_cotangent(&psi, energy, &cot, &consts, radius)?;
            Ok(CotangentRow { kappa, eta, length: l, a: cot.a, b: cot.b, beta: cot.beta, max_residual })
        })
        .collect::<Result<Vec<_>>>()?;
    out.write("cotangent.csv", &rows)
}

fn measures(c: &ExperimentConfig, out: &mut Outputs<'_>) -> Result<()> {
    let grid = c.grid()?;
    let (x0, w) = (c.run.center.unwrap_or(0.0), c.run.width.unwrap_or(1.0));
    let p = Density::from_fn(grid, |x| (-(x - x0).powi(2) / (2.0 * w * w)).exp())?.normalized()?;
    let fill = fill(c, &grid);
    let fisher = fisher_information(&p).value;
    let shannon = shannon_entropy(&p).value;
    let lengths = c.nonlinearity.as_ref().map(|n| n.length.clone()).unwrap_or_default();
    let rows = lengths
        .iter()
        .map(|&l| Ok(MeasuresRow { length: l, kl: kl_divergence_shifted(&p, l, &fill)?.value, fisher, shannon }))
        .collect::<Result<Vec<_>>>()?;
    out.write("measures.csv", &rows)
}

impl From<&Error> for i32 {
    /// Process exit code for an error: 2 for configuration problems, 3 for numerics.
    fn from(e: &Error) -> i32 {
        if e.is_config_error() || matches!(e, Error::Io(_)) {
            2
        } else {
            3
        }
    }
}
