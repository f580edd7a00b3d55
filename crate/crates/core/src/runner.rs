//! Running scenarios: in-memory simulation, CSV/manifest output and k-sweeps.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::barrier_transmission;
use crate::config::{ModeKind, PotentialKind, Scenario};
use crate::observables::{extract_rt, steady_current, CurrentSeries, ScatteringRecord, SteadyCurrent};
use crate::solver::{Propagator, SimulationState};
use crate::{Currents, Error, Grid, Result, State, Stepper};

/// Window (in steps) for steady-state detection.
pub const STEADY_WINDOW: usize = 200;
/// Relative change between consecutive window means below which a probe is steady.
pub const STEADY_TOL: f64 = 1e-3;

/// Extra time, beyond three source-to-probe transit times, given to each sweep run.
pub const SWEEP_SETTLE_TIME: f64 = 10.0;

/// 17 significant digits (round-trip exact for `f64`), used by every output column.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Probe-current file name for coordinate `x`.
pub fn probe_file_name(x: f64) -> String {
    format!("current_x{x}.csv")
}

pub fn snapshot_file_name(step: usize) -> String {
    format!("snap_{step}.csv")
}

/// A scenario's numerical objects, advanced step by step with probe currents
/// recorded after every step.
pub struct Simulation {
    pub grid: Grid,
    pub stepper: Stepper,
    pub state: State,
    /// `(coordinate, series)` per configured probe.
    pub probes: Vec<(f64, Currents)>,
    recorded: bool,
}

impl Simulation {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let grid = scenario.spatial_grid()?;
        let mode = scenario.run_mode(&grid)?;
        let potential = scenario.potential_spec(&grid)?;
        let field = scenario.initial_field(&grid, &mode)?;
        let probes = scenario
            .output
            .probes
            .iter()
            .zip(scenario.probe_indices(&grid)?)
            .map(|(&x, j)| (x, CurrentSeries::new(j)))
            .collect();
        let stepper = Propagator::new(grid, scenario.time.dt, potential, mode)?;
        Ok(Self {
            grid,
            stepper,
            state: SimulationState::initial(field),
            probes,
            recorded: false,
        })
    }

    fn record(&mut self) -> Result<()> {
        for (_, series) in &mut self.probes {
            series.record(self.state.time, &self.state.field)?;
        }
        Ok(())
    }

    /// Advances `n_steps`, calling `observe` on the current state first (once per
    /// simulation) and after every step.
    pub fn advance<F>(&mut self, n_steps: usize, mut observe: F) -> Result<()>
    where
        F: FnMut(&Stepper, &State) -> Result<()>,
    {
        if !self.recorded {
            self.record()?;
            observe(&self.stepper, &self.state)?;
            self.recorded = true;
        }
        for _ in 0..n_steps {
            self.stepper.step(&mut self.state)?;
            self.record()?;
            observe(&self.stepper, &self.state)?;
        }
        Ok(())
    }

    pub fn probe(&self, x: f64) -> Option<&Currents> {
        self.probes.iter().find(|(px, _)| *px == x).map(|(_, s)| s)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `t,x,re,im,density,v_re,v_im` for every lattice point.
pub fn write_snapshot(path: &Path, stepper: &Stepper, state: &State) -> Result<()> {
    let v = stepper.potential_at(state.time)?;
    let mut w = csv::Writer::from_writer(create(path)?);
    let err = csv_error(path);
    w.write_record(["t", "x", "re", "im", "density", "v_re", "v_im"]).map_err(&err)?;
    let t = fmt_num(state.time);
    for (j, (psi, vj)) in state.field.values().iter().zip(&v).enumerate() {
        w.write_record([
            t.as_str(),
            &fmt_num(stepper.grid().position(j)),
            &fmt_num(psi.re),
            &fmt_num(psi.im),
            &fmt_num(psi.re * psi.re + psi.im * psi.im),
            &fmt_num(vj.re),
            &fmt_num(vj.im),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `t,j_probe` rows.
pub fn write_probe(path: &Path, series: &Currents) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let err = csv_error(path);
    w.write_record(["t", "j_probe"]).map_err(&err)?;
    for &(t, j) in series.samples() {
        w.write_record([fmt_num(t), fmt_num(j)]).map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeSummary {
    pub x: f64,
    pub index: usize,
    pub file: String,
    pub steady_mean: Option<f64>,
    pub steady_time: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub status: &'static str,
    pub failed_step: Option<usize>,
    pub error: Option<String>,
    pub steps_completed: usize,
    pub final_time: f64,
    pub snapshots: Vec<String>,
    pub probes: Vec<ProbeSummary>,
    pub scenario: Scenario,
    pub version: &'static str,
}

pub const MANIFEST_FILE: &str = "manifest.json";

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::io(path, e.into()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn steady_of(series: &Currents) -> Option<SteadyCurrent<f64>> {
    steady_current(series, STEADY_WINDOW, STEADY_TOL)
}

/// Runs a scenario, writing snapshots every `snapshot_stride` steps (and at the final
/// step), one CSV per probe and `manifest.json` into `out_dir`.
///
/// On a numeric failure the files gathered so far and a manifest naming the failing
/// step are still written before the error is returned.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<Manifest> {
    let mut sim = Simulation::new(scenario)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let stride = scenario.output.snapshot_stride.max(1);
    let last = scenario.time.steps;
    let mut snapshots = Vec::new();
    let outcome = sim.advance(last, |stepper, state| {
        let k = state.step_index;
        if k % stride == 0 || k == last {
            let name = snapshot_file_name(k);
            write_snapshot(&out_dir.join(&name), stepper, state)?;
            snapshots.push(name);
        }
        Ok(())
    });
    if let Err(e) = &outcome {
        if !e.is_numeric() {
            return Err(outcome.unwrap_err());
        }
    }

    let mut probes = Vec::new();
    for (x, series) in &sim.probes {
        let file = probe_file_name(*x);
        write_probe(&out_dir.join(&file), series)?;
        let steady = steady_of(series);
        probes.push(ProbeSummary {
            x: *x,
            index: series.probe_index,
            file,
            steady_mean: steady.map(|s| s.mean),
            steady_time: steady.and_then(|s| s.steady_time),
        });
    }
    let manifest = Manifest {
        status: if outcome.is_ok() { "ok" } else { "numeric_failure" },
        failed_step: outcome.as_ref().err().and_then(Error::failed_step),
        error: outcome.as_ref().err().map(ToString::to_string),
        steps_completed: sim.state.step_index,
        final_time: sim.state.time,
        snapshots,
        probes,
        scenario: scenario.clone(),
        version: env!("CARGO_PKG_VERSION"),
    };
    write_json(&out_dir.join(MANIFEST_FILE), &manifest)?;
    outcome.map(|_| manifest)
}

/// One sweep point: the analytic coefficients are always available, the numerical
/// ones only if the sub-run succeeded.
#[derive(Debug)]
pub struct SweepEntry {
    pub k: f64,
    pub t_ana: f64,
    pub r_ana: f64,
    pub outcome: Result<ScatteringRecord<f64>>,
}

/// Probe coordinates used by a sweep: the first one left of the source (reflected
/// current) and the last one right of the scattering region (transmitted current).
pub fn sweep_probes(scenario: &Scenario) -> Result<(f64, f64)> {
    let probes = &scenario.output.probes;
    let reflected = probes
        .iter()
        .copied()
        .find(|&x| x < scenario.mode.x_source)
        .ok_or_else(|| Error::config("output.probes", "sweep needs a probe left of the source"))?;
    let right_edge = match scenario.potential.kind {
        PotentialKind::Zero => scenario.mode.x_source,
        _ => scenario.potential.b,
    };
    let transmitted = probes
        .iter()
        .copied()
        .rev()
        .find(|&x| x > right_edge)
        .ok_or_else(|| Error::config("output.probes", "sweep needs a probe right of the barrier"))?;
    Ok((reflected, transmitted))
}

/// Number of steps a sweep run at wavevector `k` is given: the configured count, or
/// enough for three group-velocity transits of the longest probe path plus
/// [`SWEEP_SETTLE_TIME`], whichever is larger.
pub fn sweep_steps(scenario: &Scenario, k: f64) -> Result<usize> {
    let (x_r, x_t) = sweep_probes(scenario)?;
    let x_s = scenario.mode.x_source;
    let turn = match scenario.potential.kind {
        PotentialKind::Zero => x_s,
        _ => scenario.potential.a,
    };
    let path = (x_t - x_s).max((turn - x_s) + (turn - x_r));
    let horizon = 3.0 * path / (2.0 * k) + SWEEP_SETTLE_TIME;
    Ok(scenario.time.steps.max((horizon / scenario.time.dt).ceil() as usize))
}

fn analytic_coefficients(scenario: &Scenario, k: f64) -> Result<(f64, f64)> {
    let p = &scenario.potential;
    match p.kind {
        PotentialKind::Zero => Ok((1.0, 0.0)),
        PotentialKind::SquareBarrier => {
            let c = barrier_transmission(k, p.v0, p.b - p.a)?;
            Ok((c.transmission, c.reflection))
        }
        _ => Err(Error::config("potential.type", "a sweep needs a static square barrier or no potential")),
    }
}

/// Runs one sweep point in memory.
pub fn scattering_run(scenario: &Scenario, k: f64) -> Result<ScatteringRecord<f64>> {
    let (t_ana, r_ana) = analytic_coefficients(scenario, k)?;
    let (x_r, x_t) = sweep_probes(scenario)?;
    let run = scenario.with_wavevector(k);
    let mut sim = Simulation::new(&run)?;
    sim.advance(sweep_steps(scenario, k)?, |_, _| Ok(()))?;
    let steady = |x: f64| -> Result<SteadyCurrent<f64>> {
        sim.probe(x)
            .and_then(steady_of)
            .ok_or_else(|| Error::Contract(format!("probe at {x} recorded too few samples")))
    };
    let (j_r, j_t) = (steady(x_r)?, steady(x_t)?);
    let (t_num, r_num) = extract_rt(j_t.mean, j_r.mean, k, run.amplitude())?;
    let steady_time = match (j_r.steady_time, j_t.steady_time) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };
    Ok(ScatteringRecord {
        k,
        t_num,
        r_num,
        t_ana,
        r_ana,
        steady_time,
    })
}

/// Checks that `scenario` can be swept.
pub fn check_sweep(scenario: &Scenario) -> Result<()> {
    if scenario.mode.kind != ModeKind::TransparentSource {
        return Err(Error::config("mode.type", "a sweep needs transparent_source mode"));
    }
    analytic_coefficients(scenario, 1.0)?;
    sweep_probes(scenario)?;
    Ok(())
}

/// Runs every `k` (concurrently) and returns the entries sorted by `k`. A failing
/// sub-run is reported in its entry without stopping the others.
pub fn run_sweep(scenario: &Scenario, k_values: &[f64]) -> Result<Vec<SweepEntry>> {
    check_sweep(scenario)?;
    for &k in k_values {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::config("sweep.k", format!("wavevectors must be positive, got {k}")));
        }
        scenario.with_wavevector(k).check()?;
    }
    let mut entries: Vec<SweepEntry> = k_values
        .par_iter()
        .map(|&k| {
            let (t_ana, r_ana) = analytic_coefficients(scenario, k).unwrap_or((f64::NAN, f64::NAN));
            SweepEntry {
                k,
                t_ana,
                r_ana,
                outcome: scattering_run(scenario, k),
            }
        })
        .collect();
    entries.sort_by(|a, b| a.k.total_cmp(&b.k));
    Ok(entries)
}

pub const SWEEP_FILE: &str = "sweep.csv";

/// Writes `k,T_num,R_num,T_ana,R_ana,steady_time`; failed runs leave `nan` in the
/// numerical columns and an unsettled run leaves `steady_time` empty.
pub fn write_sweep(path: &Path, entries: &[SweepEntry]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let err = csv_error(path);
    w.write_record(["k", "T_num", "R_num", "T_ana", "R_ana", "steady_time"]).map_err(&err)?;
    for e in entries {
        let (t, r, st) = match &e.outcome {
            Ok(rec) => (fmt_num(rec.t_num), fmt_num(rec.r_num), rec.steady_time.map(fmt_num).unwrap_or_default()),
            Err(_) => ("nan".into(), "nan".into(), String::new()),
        };
        w.write_record([fmt_num(e.k), t, r, fmt_num(e.t_ana), fmt_num(e.r_ana), st]).map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepManifest {
    pub status: &'static str,
    pub k_values: Vec<f64>,
    pub failed: Vec<SweepFailure>,
    pub file: String,
    pub scenario: Scenario,
    pub version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepFailure {
    pub k: f64,
    pub failed_step: Option<usize>,
    pub error: String,
}

/// Runs a sweep and writes `sweep.csv` plus `manifest.json` into `out_dir`.
pub fn run_sweep_to(scenario: &Scenario, k_values: &[f64], out_dir: &Path) -> Result<(Vec<SweepEntry>, SweepManifest)> {
    let entries = run_sweep(scenario, k_values)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write_sweep(&out_dir.join(SWEEP_FILE), &entries)?;
    let failed: Vec<SweepFailure> = entries
        .iter()
        .filter_map(|e| {
            e.outcome.as_ref().err().map(|err| SweepFailure {
                k: e.k,
                failed_step: err.failed_step(),
                error: err.to_string(),
            })
        })
        .collect();
    let manifest = SweepManifest {
        status: if failed.is_empty() { "ok" } else { "partial_failure" },
        k_values: entries.iter().map(|e| e.k).collect(),
        failed,
        file: SWEEP_FILE.into(),
        scenario: scenario.clone(),
        version: env!("CARGO_PKG_VERSION"),
    };
    write_json(&out_dir.join(MANIFEST_FILE), &manifest)?;
    Ok((entries, manifest))
}

/// `from, from+step, …` up to `to` inclusive (with a small tolerance for rounding);
/// values are computed by multiplication so long grids do not drift.
pub fn k_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !from.is_finite() || !to.is_finite() {
        return Err(Error::config("sweep.k_step", "needs a positive step and finite bounds"));
    }
    if to < from {
        return Ok(Vec::new());
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| from + i as f64 * step).collect())
}

/// Output directory of a scenario, resolved against its config file location.
pub fn output_dir(scenario: &Scenario) -> PathBuf {
    match &scenario.base_dir {
        Some(base) if scenario.output.dir.is_relative() => base.join(&scenario.output.dir),
        _ => scenario.output.dir.clone(),
    }
}
