//! Scenario configuration in TOML.
//!
//! ```toml
//! [grid]
//! cells = 16
//! spacing = 0.25
//!
//! # optional; defaults to eps0 = mu0 = 1
//! [vacuum]
//! eps0 = 1.0
//! mu0 = 1.0
//!
//! # regions must tile [0, cells); omit entirely for vacuum everywhere
//! [[medium]]
//! cells = [0, 16]
//! electric = [{ coupling = 1.0, resonance = 2.0, damping = 0.1 }]
//! magnetic = []
//!
//! [initial.e]
//! gaussian = { center = 8.0, width = 2.0, amplitude = 1.0 }
//! [initial.h]
//! values = [0.0, 0.0]   # or omit for zero
//!
//! [plan]
//! dt = 0.01            # or "auto"
//! steps = 100
//! method = "kraus"     # kraus | lcu | exact | lossless-exact
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::circuit::MeasureMode;
use crate::error::{Error, Result};
use crate::evolution::{
    optimal_dt, EvolutionPlan, Method, System, DEFAULT_DT_FRACTION, DEFAULT_ORACLE_LIMIT,
};
use crate::medium::{LorentzPole, MediumSpec};
use crate::operators::{GridSpec, StateVector};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    grid: RawGrid,
    vacuum: Option<RawVacuum>,
    #[serde(default)]
    medium: Vec<RawRegion>,
    #[serde(default)]
    initial: RawInitial,
    plan: RawPlan,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    resources: RawResources,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    cells: usize,
    spacing: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVacuum {
    eps0: f64,
    mu0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegion {
    cells: [usize; 2],
    #[serde(default)]
    electric: Vec<RawPole>,
    #[serde(default)]
    magnetic: Vec<RawPole>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPole {
    coupling: f64,
    resonance: f64,
    damping: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    e: Option<RawProfile>,
    h: Option<RawProfile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    values: Option<Vec<f64>>,
    gaussian: Option<Gaussian>,
}

/// `amplitude·exp(−((q − center)/width)²)` over cell index `q`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gaussian {
    pub center: f64,
    pub width: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawDt {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlan {
    dt: RawDt,
    steps: usize,
    method: Method,
    #[serde(default)]
    gate_level: bool,
    dt_fraction: Option<f64>,
    seed: Option<u64>,
    oracle_limit: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    report: Option<PathBuf>,
    circuit: Option<PathBuf>,
    formats: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    threads: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawResources {
    rate_jitter: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    /// Half-open cell range.
    pub start: usize,
    pub end: usize,
    pub medium: MediumSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtChoice {
    Fixed(f64),
    /// `optimal_dt` with this fraction for homogeneous rates.
    Auto(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanConfig {
    pub dt: DtChoice,
    pub steps: usize,
    pub method: Method,
    pub gate_level: bool,
    /// Sampling seed; `None` post-selects deterministically.
    pub seed: Option<u64>,
    pub oracle_limit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    /// Base path; `.csv` and `.json` are appended.
    pub report: Option<PathBuf>,
    pub circuit: Option<PathBuf>,
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub regions: Vec<Region>,
    pub e_field: Vec<f64>,
    pub h_field: Vec<f64>,
    pub plan: PlanConfig,
    pub output: OutputConfig,
    /// Concurrent runs in a sweep.
    pub sweep_threads: usize,
    /// Relative per-cell damping perturbation in resource reports.
    pub rate_jitter: f64,
    pub resource_seed: u64,
}

struct Issues(Vec<(String, String)>);

impl Issues {
    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push((field.into(), message.into()));
    }

    fn finish(self) -> Result<()> {
        let mut it = self.0.into_iter();
        let Some((field, mut message)) = it.next() else {
            return Ok(());
        };
        let rest: Vec<String> = it.map(|(f, m)| format!("`{f}`: {m}")).collect();
        if !rest.is_empty() {
            message = format!("{message}; also {}", rest.join("; "));
        }
        Err(Error::Validation { field, message })
    }
}

/// Reads and validates a configuration file; relative output paths resolve against its directory.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut config = parse_config(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    for p in [&mut config.output.report, &mut config.output.circuit]
        .into_iter()
        .flatten()
    {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    Ok(config)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = toml::Deserializer::parse(text).map_err(|e| Error::Parse(e.to_string()))?;
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        field: e.path().to_string(),
        message: e
            .inner()
            .to_string()
            .lines()
            .last()
            .unwrap_or_default()
            .trim()
            .to_string(),
    })?;
    validate(raw)
}

fn pole(raw: &RawPole) -> LorentzPole {
    LorentzPole::new(raw.coupling, raw.resonance, raw.damping)
}

fn profile(raw: &Option<RawProfile>, cells: usize, field: &str, issues: &mut Issues) -> Vec<f64> {
    match raw {
        None => vec![0.0; cells],
        Some(RawProfile {
            values: Some(v),
            gaussian: None,
        }) => {
            if v.len() != cells {
                issues.push(
                    format!("{field}.values"),
                    format!("has {} entries for {cells} cells", v.len()),
                );
            }
            if v.iter().any(|x| !x.is_finite()) {
                issues.push(format!("{field}.values"), "entries must be finite");
            }
            v.clone()
        }
        Some(RawProfile {
            values: None,
            gaussian: Some(g),
        }) => {
            if !(g.width > 0.0) {
                issues.push(format!("{field}.gaussian.width"), "must be positive");
            }
            (0..cells)
                .map(|q| g.amplitude * (-((q as f64 - g.center) / g.width).powi(2)).exp())
                .collect()
        }
        Some(_) => {
            issues.push(field, "give exactly one of `values` or `gaussian`");
            vec![0.0; cells]
        }
    }
}

fn validate(raw: RawConfig) -> Result<RunConfig> {
    let mut issues = Issues(Vec::new());
    let cells = raw.grid.cells;
    if cells == 0 {
        issues.push("grid.cells", "must be at least 1");
    }
    if !(raw.grid.spacing > 0.0 && raw.grid.spacing.is_finite()) {
        issues.push("grid.spacing", "must be positive");
    }
    let (eps0, mu0) = raw.vacuum.as_ref().map_or((1.0, 1.0), |v| (v.eps0, v.mu0));
    if !(eps0 > 0.0 && mu0 > 0.0) {
        issues.push("vacuum", "eps0 and mu0 must be positive");
    }

    let mut regions = Vec::new();
    for (i, r) in raw.medium.iter().enumerate() {
        let [start, end] = r.cells;
        if start >= end || end > cells {
            issues.push(
                format!("medium[{i}].cells"),
                format!("[{start}, {end}) is not a non-empty range inside [0, {cells})"),
            );
        }
        let medium = MediumSpec {
            electric_poles: r.electric.iter().map(pole).collect(),
            magnetic_poles: r.magnetic.iter().map(pole).collect(),
            eps0,
            mu0,
        };
        if let Err(e) = medium.validate() {
            issues.push(format!("medium[{i}]"), e.to_string());
        }
        regions.push(Region { start, end, medium });
    }
    let mut sorted: Vec<(usize, &Region)> = regions.iter().enumerate().collect();
    sorted.sort_by_key(|(_, r)| r.start);
    for w in sorted.windows(2) {
        let ((i, a), (j, b)) = (w[0], w[1]);
        if b.start < a.end {
            issues.push(
                format!("medium[{j}].cells"),
                format!(
                    "overlaps medium[{i}] on cells [{}, {})",
                    b.start,
                    a.end.min(b.end)
                ),
            );
        } else if b.start > a.end {
            issues.push(
                "medium",
                format!("cells [{}, {}) are not covered", a.end, b.start),
            );
        }
    }
    if let (Some((_, first)), Some((_, last))) = (sorted.first(), sorted.last()) {
        if first.start > 0 {
            issues.push(
                "medium",
                format!("cells [0, {}) are not covered", first.start),
            );
        }
        if last.end < cells {
            issues.push(
                "medium",
                format!("cells [{}, {cells}) are not covered", last.end),
            );
        }
    }

    let e_field = profile(&raw.initial.e, cells, "initial.e", &mut issues);
    let h_field = profile(&raw.initial.h, cells, "initial.h", &mut issues);
    if e_field.iter().chain(&h_field).all(|v| *v == 0.0) {
        issues.push("initial", "initial fields are identically zero");
    }

    let fraction = raw.plan.dt_fraction.unwrap_or(DEFAULT_DT_FRACTION);
    if !(fraction > 0.0 && fraction < 1.0) {
        issues.push("plan.dt_fraction", "must lie in (0, 1)");
    }
    let dt = match &raw.plan.dt {
        RawDt::Value(v) => {
            if !(*v > 0.0 && v.is_finite()) {
                issues.push("plan.dt", "must be positive");
            }
            DtChoice::Fixed(*v)
        }
        RawDt::Keyword(k) if k == "auto" => DtChoice::Auto(fraction),
        RawDt::Keyword(k) => {
            issues.push(
                "plan.dt",
                format!("expected a number or \"auto\", found \"{k}\""),
            );
            DtChoice::Auto(fraction)
        }
    };
    if raw.plan.steps == 0 {
        issues.push("plan.steps", "must be at least 1");
    }
    if raw.plan.gate_level && !raw.plan.method.is_stepped() {
        issues.push(
            "plan.gate_level",
            "only the kraus and lcu methods run on gates",
        );
    }

    let formats = match &raw.output.formats {
        None => vec![Format::Csv, Format::Json],
        Some(list) => list
            .iter()
            .enumerate()
            .filter_map(|(i, f)| match f.as_str() {
                "csv" => Some(Format::Csv),
                "json" => Some(Format::Json),
                other => {
                    issues.push(
                        format!("output.formats[{i}]"),
                        format!("unknown format \"{other}\" (csv, json)"),
                    );
                    None
                }
            })
            .collect(),
    };
    let threads = raw.sweep.threads.unwrap_or(1);
    if threads == 0 {
        issues.push("sweep.threads", "must be at least 1");
    }
    let rate_jitter = raw.resources.rate_jitter.unwrap_or(0.0);
    if !(0.0..1.0).contains(&rate_jitter) {
        issues.push("resources.rate_jitter", "must lie in [0, 1)");
    }
    issues.finish()?;

    let config = RunConfig {
        grid: GridSpec {
            cells,
            spacing: raw.grid.spacing,
        },
        regions,
        e_field,
        h_field,
        plan: PlanConfig {
            dt,
            steps: raw.plan.steps,
            method: raw.plan.method,
            gate_level: raw.plan.gate_level,
            seed: raw.plan.seed,
            oracle_limit: raw.plan.oracle_limit.unwrap_or(DEFAULT_ORACLE_LIMIT),
        },
        output: OutputConfig {
            report: raw.output.report,
            circuit: raw.output.circuit,
            formats,
        },
        sweep_threads: threads,
        rate_jitter,
        resource_seed: raw.resources.seed.unwrap_or(0),
    };
    // layout consistency across regions and the auto step need the assembled system
    let system = config.system().map_err(|e| Error::Validation {
        field: "medium".into(),
        message: e.to_string(),
    })?;
    config.resolve_dt(&system)?;
    Ok(config)
}

impl RunConfig {
    pub fn vacuum(&self) -> MediumSpec {
        let (eps0, mu0) = self
            .regions
            .first()
            .map_or((1.0, 1.0), |r| (r.medium.eps0, r.medium.mu0));
        MediumSpec {
            electric_poles: vec![],
            magnetic_poles: vec![],
            eps0,
            mu0,
        }
    }

    /// Medium of every cell.
    pub fn media(&self) -> Vec<MediumSpec> {
        let mut media = vec![self.vacuum(); self.grid.cells];
        for r in &self.regions {
            for m in &mut media[r.start..r.end] {
                *m = r.medium.clone();
            }
        }
        media
    }

    pub fn system(&self) -> Result<System> {
        System::new(self.grid, self.media())
    }

    pub fn initial_state(&self, system: &System) -> Result<StateVector> {
        system.encode(&self.e_field, &self.h_field)
    }

    /// The configured step, or the optimal one for the system's rates.
    pub fn resolve_dt(&self, system: &System) -> Result<f64> {
        match self.plan.dt {
            DtChoice::Fixed(dt) => Ok(dt),
            DtChoice::Auto(c) => {
                let (lo, hi) = system.rate_extrema().ok_or_else(|| Error::Validation {
                    field: "plan.dt".into(),
                    message: "\"auto\" needs a lossy medium".into(),
                })?;
                optimal_dt(lo, hi, c)
            }
        }
    }

    pub fn evolution_plan(&self, system: &System) -> Result<EvolutionPlan> {
        let mut plan =
            EvolutionPlan::new(self.resolve_dt(system)?, self.plan.steps, self.plan.method)?;
        plan.gate_level = self.plan.gate_level;
        if let Some(seed) = self.plan.seed {
            plan.measure = MeasureMode::Sample(seed);
        }
        Ok(plan)
    }
}
