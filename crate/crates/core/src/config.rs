//! Scenario configuration: INI parsing, defaults and construction of the numerical objects.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ini::{Ini, ParseOption};
use serde::Serialize;

use crate::grid::{gaussian_packet, initial_injected_state, Front, IncidentWave, SourceSpec};
use crate::potential::{PotentialSpec, Side, TabulatedPotential};
use crate::solver::RunMode;
use crate::{Error, Field, Grid, Mode, Potential, Result, Times, C64};

pub const DEFAULT_X_MIN: f64 = -30.0;
pub const DEFAULT_X_MAX: f64 = 30.0;
pub const DEFAULT_DX: f64 = 0.05;
pub const DEFAULT_DT: f64 = 0.01;
/// Long enough to reach the relaxed "t = ∞" picture at t = 20.
pub const DEFAULT_STEPS: usize = 2000;
/// Snapshots every 2.5 time units at the default step.
pub const DEFAULT_SNAPSHOT_STRIDE: usize = 250;
pub const DEFAULT_PROBES: [f64; 2] = [-20.0, 10.0];
pub const DEFAULT_X_SOURCE: f64 = -15.0;
pub const DEFAULT_X_G: f64 = -10.0;
pub const DEFAULT_L_G: f64 = 3.0;
pub const DEFAULT_ABSORBER_C: f64 = 0.1;
pub const DEFAULT_ABSORBER_ONSET: f64 = 20.0;
/// The default left absorber starts this far inside the left edge, mirroring the
/// 10-unit tail of the default right absorber on [−30, 30]. It never starts right of
/// the source.
pub const LEFT_ABSORBER_DEPTH: f64 = 10.0;

const SECTIONS: &[(&str, &[&str])] = &[
    ("grid", &["x_min", "x_max", "dx"]),
    ("time", &["dt", "steps"]),
    (
        "mode",
        &[
            "type",
            "amplitude_re",
            "amplitude_im",
            "k",
            "x_source",
            "front",
            "x_g",
            "l_g",
            "dispersion",
            "packet_center",
            "packet_sigma",
        ],
    ),
    ("potential", &["type", "v0", "a", "b", "alpha", "nu", "file"]),
    ("absorber_right", &["c", "x_i"]),
    ("absorber_left", &["c", "x_i"]),
    ("output", &["dir", "snapshot_stride", "probes"]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Closed,
    HardSource,
    TransparentSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontKind {
    Uniform,
    Gaussian,
    Empty,
}

/// Frequency attached to the injected wave: `k²` (continuum) or the frequency the
/// discretized equation actually propagates at wavevector `k` (lattice).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dispersion {
    Continuum,
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Zero,
    SquareBarrier,
    OscillatingBarrier,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridParams {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeParams {
    pub dt: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeParams {
    pub kind: ModeKind,
    pub amplitude_re: f64,
    pub amplitude_im: f64,
    /// Incident wavevector, or the packet's mean wavevector in closed mode.
    pub k: f64,
    pub x_source: f64,
    pub front: FrontKind,
    pub x_g: f64,
    pub l_g: f64,
    pub dispersion: Dispersion,
    /// Closed mode starts from a normalized Gaussian packet.
    pub packet_center: f64,
    pub packet_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialParams {
    pub kind: PotentialKind,
    pub v0: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    /// Oscillation frequency in cycles per unit time; `ω = 2πν`.
    pub nu: f64,
    /// CSV with header `x,v_re,v_im`, one row per lattice point.
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbsorberParams {
    pub c: f64,
    pub x_i: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputParams {
    pub dir: PathBuf,
    pub snapshot_stride: usize,
    pub probes: Vec<f64>,
}

/// Everything needed to run one simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub grid: GridParams,
    pub time: TimeParams,
    pub mode: ModeParams,
    pub potential: PotentialParams,
    pub absorber_right: Option<AbsorberParams>,
    pub absorber_left: Option<AbsorberParams>,
    pub output: OutputParams,
    /// Directory that relative paths inside the document resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// Parse and check a configuration document.
pub fn parse_config(text: &str) -> Result<Scenario> {
    let doc = Document::parse(text)?;
    let scenario = doc.scenario()?;
    scenario.check()?;
    Ok(scenario)
}

/// Read a configuration file; relative paths in it resolve against its directory.
pub fn load_config(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut scenario = parse_config(&text)?;
    scenario.base_dir = path.parent().map(Path::to_path_buf);
    Ok(scenario)
}

struct Document {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let opt = ParseOption {
            enabled_quote: false,
            enabled_escape: false,
            ..ParseOption::default()
        };
        let ini = Ini::load_from_str_opt(text, opt).map_err(|e| Error::config("document", e.to_string()))?;
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        for (name, props) in ini.iter() {
            let Some(name) = name else {
                if let Some((key, _)) = props.iter().next() {
                    return Err(Error::config(key, "key appears before any [section] header"));
                }
                continue;
            };
            let Some((_, allowed)) = SECTIONS.iter().find(|(s, _)| *s == name) else {
                return Err(Error::config(name, "unknown section"));
            };
            if sections.contains_key(name) {
                return Err(Error::config(name, "section appears twice"));
            }
            let mut table = BTreeMap::new();
            for (key, value) in props.iter() {
                let full = format!("{name}.{key}");
                if !allowed.contains(&key) {
                    return Err(Error::config(full, "unknown key"));
                }
                if table.insert(key.to_string(), value.trim().to_string()).is_some() {
                    return Err(Error::config(full, "key appears twice"));
                }
            }
            sections.insert(name.to_string(), table);
        }
        Ok(Self { sections })
    }

    fn require_section(&self, section: &str, first_key: &str) -> Result<()> {
        if self.sections.contains_key(section) {
            Ok(())
        } else {
            Err(Error::config(format!("{section}.{first_key}"), format!("missing [{section}] section")))
        }
    }

    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    fn number(&self, section: &str, key: &str) -> Result<Option<f64>> {
        let Some(raw) = self.raw(section, key) else {
            return Ok(None);
        };
        parse_number(raw).map(Some).map_err(|m| Error::config(format!("{section}.{key}"), m))
    }

    fn number_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        Ok(self.number(section, key)?.unwrap_or(default))
    }

    fn required(&self, section: &str, key: &str) -> Result<f64> {
        self.number(section, key)?
            .ok_or_else(|| Error::config(format!("{section}.{key}"), "required key is missing"))
    }

    fn count_or(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        match self.raw(section, key) {
            None => Ok(default),
            Some(raw) => raw
                .parse::<usize>()
                .map_err(|_| Error::config(format!("{section}.{key}"), format!("expected a non-negative integer, got {raw:?}"))),
        }
    }

    fn choice<E: Copy>(&self, section: &str, key: &str, options: &[(&str, E)], default: Option<E>) -> Result<E> {
        let full = format!("{section}.{key}");
        match self.raw(section, key) {
            None => default.ok_or_else(|| Error::config(full, "required key is missing")),
            Some(raw) => options
                .iter()
                .find(|(name, _)| *name == raw)
                .map(|(_, v)| *v)
                .ok_or_else(|| {
                    let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                    Error::config(full, format!("{raw:?} is not one of {}", names.join(", ")))
                }),
        }
    }

    fn absorber(&self, section: &str, default: Option<AbsorberParams>) -> Result<Option<AbsorberParams>> {
        if !self.sections.contains_key(section) {
            return Ok(default);
        }
        let fallback = default.unwrap_or(AbsorberParams {
            c: DEFAULT_ABSORBER_C,
            x_i: f64::NAN,
        });
        let c = self.number_or(section, "c", fallback.c)?;
        let x_i = match self.number(section, "x_i")? {
            Some(x) => x,
            None if fallback.x_i.is_finite() => fallback.x_i,
            None => return Err(Error::config(format!("{section}.x_i"), "required key is missing")),
        };
        Ok(Some(AbsorberParams { c, x_i }))
    }

    fn scenario(&self) -> Result<Scenario> {
        self.require_section("grid", "dx")?;
        self.require_section("time", "dt")?;
        self.require_section("mode", "type")?;

        let grid = GridParams {
            x_min: self.number_or("grid", "x_min", DEFAULT_X_MIN)?,
            x_max: self.number_or("grid", "x_max", DEFAULT_X_MAX)?,
            dx: self.number_or("grid", "dx", DEFAULT_DX)?,
        };
        let time = TimeParams {
            dt: self.number_or("time", "dt", DEFAULT_DT)?,
            steps: self.count_or("time", "steps", DEFAULT_STEPS)?,
        };

        let kind = self.choice(
            "mode",
            "type",
            &[
                ("closed", ModeKind::Closed),
                ("hard_source", ModeKind::HardSource),
                ("transparent_source", ModeKind::TransparentSource),
            ],
            None,
        )?;
        let injects = kind != ModeKind::Closed;
        let k = if injects {
            self.required("mode", "k")?
        } else {
            self.number_or("mode", "k", 0.0)?
        };
        let mode = ModeParams {
            kind,
            amplitude_re: self.number_or("mode", "amplitude_re", 1.0)?,
            amplitude_im: self.number_or("mode", "amplitude_im", 0.0)?,
            k,
            x_source: self.number_or("mode", "x_source", DEFAULT_X_SOURCE)?,
            front: self.choice(
                "mode",
                "front",
                &[
                    ("uniform", FrontKind::Uniform),
                    ("gaussian", FrontKind::Gaussian),
                    ("empty", FrontKind::Empty),
                ],
                Some(FrontKind::Gaussian),
            )?,
            x_g: self.number_or("mode", "x_g", DEFAULT_X_G)?,
            l_g: self.number_or("mode", "l_g", DEFAULT_L_G)?,
            dispersion: self.choice(
                "mode",
                "dispersion",
                &[("continuum", Dispersion::Continuum), ("lattice", Dispersion::Lattice)],
                Some(Dispersion::Continuum),
            )?,
            packet_center: self.number_or("mode", "packet_center", 0.0)?,
            packet_sigma: self.number_or("mode", "packet_sigma", 1.0)?,
        };

        let pkind = self.choice(
            "potential",
            "type",
            &[
                ("zero", PotentialKind::Zero),
                ("square_barrier", PotentialKind::SquareBarrier),
                ("oscillating_barrier", PotentialKind::OscillatingBarrier),
                ("tabulated", PotentialKind::Tabulated),
            ],
            Some(PotentialKind::Zero),
        )?;
        let barrier = matches!(pkind, PotentialKind::SquareBarrier | PotentialKind::OscillatingBarrier);
        let oscillating = pkind == PotentialKind::OscillatingBarrier;
        let pick = |key: &str, needed: bool| -> Result<f64> {
            if needed {
                self.required("potential", key)
            } else {
                self.number_or("potential", key, 0.0)
            }
        };
        let potential = PotentialParams {
            kind: pkind,
            v0: pick("v0", barrier)?,
            a: pick("a", barrier)?,
            b: pick("b", barrier)?,
            alpha: pick("alpha", oscillating)?,
            nu: pick("nu", oscillating)?,
            file: match (pkind, self.raw("potential", "file")) {
                (PotentialKind::Tabulated, None) => {
                    return Err(Error::config("potential.file", "required key is missing"))
                }
                (_, f) => f.map(PathBuf::from),
            },
        };

        let right_default = injects.then_some(AbsorberParams {
            c: DEFAULT_ABSORBER_C,
            x_i: DEFAULT_ABSORBER_ONSET,
        });
        let left_default = injects.then_some(AbsorberParams {
            c: DEFAULT_ABSORBER_C,
            x_i: (grid.x_min + LEFT_ABSORBER_DEPTH).min(mode.x_source),
        });
        let absorber_right = self.absorber("absorber_right", right_default)?;
        let absorber_left = self.absorber("absorber_left", left_default)?;

        let probes = match self.raw("output", "probes") {
            Some(raw) => parse_list(raw).map_err(|m| Error::config("output.probes", m))?,
            None if injects => DEFAULT_PROBES.to_vec(),
            None => Vec::new(),
        };
        let output = OutputParams {
            dir: PathBuf::from(self.raw("output", "dir").unwrap_or("out")),
            snapshot_stride: self.count_or("output", "snapshot_stride", DEFAULT_SNAPSHOT_STRIDE)?,
            probes,
        };

        Ok(Scenario {
            grid,
            time,
            mode,
            potential,
            absorber_right,
            absorber_left,
            output,
            base_dir: None,
        })
    }
}

fn parse_number(raw: &str) -> std::result::Result<f64, String> {
    let v: f64 = raw.parse().map_err(|_| format!("expected a number, got {raw:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be finite, got {raw:?}"))
    }
}

fn parse_list(raw: &str) -> std::result::Result<Vec<f64>, String> {
    if raw.trim().is_empty() {
        return Ok(Vec::new());
    }
    raw.split(',').map(|s| parse_number(s.trim())).collect()
}

impl Scenario {
    /// Complex incident amplitude `A`.
    pub fn amplitude(&self) -> C64 {
        C64::new(self.mode.amplitude_re, self.mode.amplitude_im)
    }

    pub fn spatial_grid(&self) -> Result<Grid> {
        let g = &self.grid;
        if !(g.dx > 0.0) {
            return Err(Error::config("grid.dx", format!("must be positive, got {}", g.dx)));
        }
        if !(g.x_max > g.x_min) {
            return Err(Error::config("grid.x_max", "must exceed grid.x_min"));
        }
        Grid::build(g.x_min, g.x_max, g.dx)
    }

    pub fn time_grid(&self) -> Result<Times> {
        Times::new(self.time.dt, self.time.steps)
    }

    fn front(&self) -> Front<f64> {
        match self.mode.front {
            FrontKind::Uniform => Front::Uniform,
            FrontKind::Empty => Front::Empty,
            FrontKind::Gaussian => Front::GaussianFront {
                x_g: self.mode.x_g,
                l_g: self.mode.l_g,
            },
        }
    }

    pub fn incident_wave(&self) -> IncidentWave<f64> {
        match self.mode.dispersion {
            Dispersion::Continuum => IncidentWave::continuum(self.amplitude(), self.mode.k),
            Dispersion::Lattice => {
                IncidentWave::lattice_matched(self.amplitude(), self.mode.k, self.grid.dx, self.time.dt)
            }
        }
    }

    pub fn run_mode(&self, grid: &Grid) -> Result<Mode> {
        let source = || -> Result<SourceSpec<f64>> {
            if !(self.mode.k > 0.0) {
                return Err(Error::config("mode.k", format!("must be positive, got {}", self.mode.k)));
            }
            let s = grid
                .nearest_index(self.mode.x_source)
                .ok_or_else(|| Error::config("mode.x_source", "outside the grid"))?;
            let spec = SourceSpec::new(self.incident_wave(), s, self.front());
            spec.validate(grid)?;
            Ok(spec)
        };
        Ok(match self.mode.kind {
            ModeKind::Closed => RunMode::Closed,
            ModeKind::HardSource => RunMode::HardSource(source()?),
            ModeKind::TransparentSource => RunMode::TransparentSource(source()?),
        })
    }

    fn tabulated(&self, grid: &Grid) -> Result<Potential> {
        let file = self
            .potential
            .file
            .as_ref()
            .ok_or_else(|| Error::config("potential.file", "required key is missing"))?;
        let path = match &self.base_dir {
            Some(dir) if file.is_relative() => dir.join(file),
            _ => file.clone(),
        };
        let csv_err = |e: csv::Error| Error::Csv {
            path: path.display().to_string(),
            source: e,
        };
        let mut reader = csv::Reader::from_path(&path).map_err(csv_err)?;
        let mut values = Vec::with_capacity(grid.n_points());
        for (row, record) in reader.deserialize::<(f64, f64, f64)>().enumerate() {
            let (x, re, im) = record.map_err(csv_err)?;
            if row >= grid.n_points() || (grid.position(row) - x).abs() > 1e-6 * grid.dx() {
                return Err(Error::config(
                    "potential.file",
                    format!("row {} (x = {x}) does not match the lattice", row + 1),
                ));
            }
            values.push(C64::new(re, im));
        }
        if values.len() != grid.n_points() {
            return Err(Error::config(
                "potential.file",
                format!("{} rows for {} lattice points", values.len(), grid.n_points()),
            ));
        }
        Ok(PotentialSpec::Tabulated(TabulatedPotential::new(*grid, values)?))
    }

    /// Scattering potential plus configured absorbers.
    pub fn potential_spec(&self, grid: &Grid) -> Result<Potential> {
        let p = &self.potential;
        let key_range = |e: Error| match e {
            Error::Config { message, .. } => Error::config("potential.b", message),
            other => other,
        };
        let main = match p.kind {
            PotentialKind::Zero => PotentialSpec::Zero,
            PotentialKind::SquareBarrier => PotentialSpec::square_barrier(p.v0, p.a, p.b).map_err(key_range)?,
            PotentialKind::OscillatingBarrier => {
                if !(p.nu >= 0.0) {
                    return Err(Error::config("potential.nu", "must be non-negative"));
                }
                PotentialSpec::oscillating_barrier(p.v0, p.alpha, 2.0 * std::f64::consts::PI * p.nu, p.a, p.b)
                    .map_err(key_range)?
            }
            PotentialKind::Tabulated => self.tabulated(grid)?,
        };
        let mut parts = vec![main];
        for (section, side, params) in [
            ("absorber_right", Side::Right, self.absorber_right),
            ("absorber_left", Side::Left, self.absorber_left),
        ] {
            if let Some(AbsorberParams { c, x_i }) = params {
                if !(c >= 0.0) {
                    return Err(Error::config(format!("{section}.c"), format!("must be non-negative, got {c}")));
                }
                if !(x_i > grid.x0() && x_i < grid.x_max()) {
                    return Err(Error::config(format!("{section}.x_i"), "onset must lie inside the grid"));
                }
                parts.push(PotentialSpec::absorber(c, x_i, side)?);
            }
        }
        PotentialSpec::sum(parts)
    }

    pub fn initial_field(&self, grid: &Grid, mode: &Mode) -> Result<Field> {
        match mode.source() {
            Some(source) => initial_injected_state(grid, source),
            None => gaussian_packet(grid, self.mode.packet_center, self.mode.packet_sigma, self.mode.k).map_err(
                |e| match e {
                    Error::Config { message, .. } => Error::config("mode.packet_center", message),
                    other => other,
                },
            ),
        }
    }

    /// Lattice indices of the probes; each must leave room for the central difference.
    pub fn probe_indices(&self, grid: &Grid) -> Result<Vec<usize>> {
        self.output
            .probes
            .iter()
            .map(|&x| match grid.nearest_index(x) {
                Some(j) if j >= 1 && j < grid.last_index() => Ok(j),
                _ => Err(Error::config("output.probes", format!("probe at {x} is not an interior lattice point"))),
            })
            .collect()
    }

    /// Same scenario with another incident wavevector.
    pub fn with_wavevector(&self, k: f64) -> Scenario {
        let mut s = self.clone();
        s.mode.k = k;
        s
    }

    /// Structural checks that need no file access.
    pub(crate) fn check(&self) -> Result<()> {
        let grid = self.spatial_grid()?;
        self.time_grid()?;
        if self.output.snapshot_stride < 1 {
            return Err(Error::config("output.snapshot_stride", "must be at least 1"));
        }
        if self.mode.kind == ModeKind::Closed && !(self.mode.packet_sigma > 0.0) {
            return Err(Error::config("mode.packet_sigma", "must be positive"));
        }
        let mode = self.run_mode(&grid)?;
        self.probe_indices(&grid)?;
        // an absorber reaching across the source would damp the injected wave itself
        if self.mode.kind != ModeKind::Closed {
            let x_s = self.mode.x_source;
            if self.absorber_left.is_some_and(|a| a.x_i > x_s) {
                return Err(Error::config("absorber_left.x_i", format!("onset must not lie right of the source at {x_s}")));
            }
            if self.absorber_right.is_some_and(|a| a.x_i < x_s) {
                return Err(Error::config("absorber_right.x_i", format!("onset must not lie left of the source at {x_s}")));
            }
        }
        if self.potential.kind != PotentialKind::Tabulated {
            let potential = self.potential_spec(&grid)?;
            mode.validate(&grid, &potential)?;
        }
        Ok(())
    }

    /// Full validation, including tabulated potential files and the initial state.
    pub fn validate(&self) -> Result<()> {
        self.check()?;
        let grid = self.spatial_grid()?;
        let mode = self.run_mode(&grid)?;
        let potential = self.potential_spec(&grid)?;
        mode.validate(&grid, &potential)?;
        self.initial_field(&grid, &mode)?;
        Ok(())
    }
}
