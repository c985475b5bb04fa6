//! Trotterized evolution through the dilations, with exact references.
//!
//! One step applies the damping dilation, then `e^{−iδtD₀}` controlled on the
//! ancilla being 0, then post-selects the ancilla. The post-selected map is
//! `e^{−iδtD₀}K₀`; the exact reference is `e^{−it(D₀ − iD_diss)}`.
//!
//! The rates `g` used for probability bounds and the optimal step are the
//! entries of `D_diss`, i.e. twice the pole damping, so that `K₀² = e^{−2gδt}`.

use log::{debug, info};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    apply_program, controlled_lossless_step, init_from_amplitudes, measure_ancilla, LosslessStep,
    MeasureMode, Outcome, Program,
};
use crate::dilation_kraus::{
    build_udiss_kraus, decompose_two_level, synthesize_gates, TwoLevelRotation,
};
use crate::dilation_lcu::{build_lcu_dilation, LcuCircuit};
use crate::error::{Error, Result};
use crate::gates::{DilationCircuit, GateCounts};
use crate::kraus::{build_kraus_pair, KrausPair};
use crate::linalg::{expm, hermitian_exp, max_abs_vec, operator_norm, CMatrix, CVector};
use crate::medium::MediumSpec;
use crate::operators::{
    build_generators, build_layout, encode_initial_state, observables, GeneratorPair, GridSpec,
    Observables, StateLayout, StateVector,
};

/// Fraction `c` in `δt = c/(2g)` for homogeneous rates.
pub const DEFAULT_DT_FRACTION: f64 = 0.1;
/// Largest dimension compared against the exact propagator during a run.
pub const DEFAULT_ORACLE_LIMIT: usize = 256;
/// Slack on probability-bound containment.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Kraus,
    Lcu,
    Exact,
    LosslessExact,
}

impl Method {
    pub fn is_stepped(self) -> bool {
        matches!(self, Method::Kraus | Method::Lcu)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Kraus => "kraus",
            Method::Lcu => "lcu",
            Method::Exact => "exact",
            Method::LosslessExact => "lossless-exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionPlan {
    pub dt: f64,
    pub steps: usize,
    pub method: Method,
    /// Apply synthesized gates instead of structured blocks.
    pub gate_level: bool,
    pub measure: MeasureMode,
}

impl EvolutionPlan {
    pub fn new(dt: f64, steps: usize, method: Method) -> Result<Self> {
        let plan = Self {
            dt,
            steps,
            method,
            gate_level: false,
            measure: MeasureMode::PostSelectZero,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidPlan("at least one step is required".into()));
        }
        if !self.dt.is_finite() || self.dt < 0.0 || (self.dt == 0.0 && self.method.is_stepped()) {
            return Err(Error::InvalidPlan(format!(
                "time step {} must be positive",
                self.dt
            )));
        }
        Ok(())
    }

    pub fn t_total(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

/// Grid, media, layout and generators of one scenario.
#[derive(Debug, Clone)]
pub struct System {
    pub grid: GridSpec,
    pub layout: StateLayout,
    pub media: Vec<MediumSpec>,
    pub generators: GeneratorPair,
}

impl System {
    /// `media[q]` is the medium of cell `q`.
    pub fn new(grid: GridSpec, media: Vec<MediumSpec>) -> Result<Self> {
        if media.len() != grid.cells {
            return Err(Error::DimensionMismatch {
                expected: grid.cells,
                got: media.len(),
            });
        }
        for m in &media {
            m.validate()?;
        }
        let layout = build_layout(&grid, &media[0])?;
        let generators = build_generators(&layout, &grid, &media)?;
        Ok(Self {
            grid,
            layout,
            media,
            generators,
        })
    }

    pub fn uniform(grid: GridSpec, medium: MediumSpec) -> Result<Self> {
        let media = vec![medium; grid.cells];
        Self::new(grid, media)
    }

    pub fn dim(&self) -> usize {
        self.layout.dim
    }

    pub fn encode(&self, e_field: &[f64], h_field: &[f64]) -> Result<StateVector> {
        encode_initial_state(e_field, h_field, &self.layout, &self.grid, &self.media[0])
    }

    pub fn observe(&self, psi: &StateVector) -> Observables {
        observables(psi, &self.layout, &self.grid, &self.media)
    }

    /// Smallest and largest positive rate on the dissipative block.
    pub fn rate_extrema(&self) -> Option<(f64, f64)> {
        rate_extrema(&self.generators)
    }

    pub fn is_lossless(&self) -> bool {
        self.generators.ddiss.iter().all(|g| *g == 0.0)
    }
}

/// Extremes of the nonzero rates of `D_diss`.
pub fn rate_extrema(gen: &GeneratorPair) -> Option<(f64, f64)> {
    gen.dissipative
        .clone()
        .map(|q| gen.ddiss[q])
        .filter(|g| *g > 0.0)
        .fold(None, |acc, g| match acc {
            None => Some((g, g)),
            Some((lo, hi)) => Some((lo.min(g), hi.max(g))),
        })
}

/// `e^{−it(D₀ − iD_diss)}` by scaling and squaring.
pub fn exact_propagator(gen: &GeneratorPair, t: f64) -> Result<CMatrix> {
    let generator = gen.full_generator();
    expm(&(generator * Complex64::new(0.0, -t)))
}

/// `e^{−iδtD₀}` by Hermitian eigendecomposition.
pub fn lossless_propagator(gen: &GeneratorPair, dt: f64) -> Result<CMatrix> {
    hermitian_exp(&gen.d0.to_dense(), dt)
}

/// `(e^{−iδtD₀}K₀)^{steps}` as a dense matrix.
pub fn trotter_product(gen: &GeneratorPair, dt: f64, steps: usize) -> Result<CMatrix> {
    let u0 = lossless_propagator(gen, dt)?;
    let pair = build_kraus_pair(gen, dt)?;
    let step = u0 * pair.k0_dense();
    let mut out = CMatrix::identity(step.nrows(), step.ncols());
    for _ in 0..steps {
        out = &step * out;
    }
    Ok(out)
}

/// Operator 2-norm of `U(steps·dt) − (e^{−iδtD₀}K₀)^{steps}`.
pub fn measured_epsilon(gen: &GeneratorPair, dt: f64, steps: usize) -> Result<f64> {
    let exact = exact_propagator(gen, dt * steps as f64)?;
    let trotter = trotter_product(gen, dt, steps)?;
    Ok(operator_norm(&(exact - trotter)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityBounds {
    pub p0_min: f64,
    pub p0_max: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub dissipative_weight: f64,
}

/// Share of `|ψ|²` on the dissipative block.
pub fn dissipative_weight(psi: &CVector, gen: &GeneratorPair) -> f64 {
    let total = psi.norm_squared();
    if total == 0.0 {
        return 0.0;
    }
    gen.dissipative
        .clone()
        .map(|q| psi[q].norm_sqr())
        .sum::<f64>()
        / total
}

/// `p0 ∈ [1 + (e^{−2g_max δt} − 1)w, 1 + (e^{−2g_min δt} − 1)w]`.
///
/// Rates are taken over the whole dissipative block, zero rates included.
pub fn probability_bounds(psi: &CVector, gen: &GeneratorPair, dt: f64) -> ProbabilityBounds {
    let w = dissipative_weight(psi, gen);
    let rates = gen.dissipative.clone().map(|q| gen.ddiss[q]);
    let (gamma_min, gamma_max) = rates.fold((f64::INFINITY, 0.0f64), |(lo, hi), g| {
        (lo.min(g), hi.max(g))
    });
    let gamma_min = if gamma_min.is_finite() {
        gamma_min
    } else {
        0.0
    };
    ProbabilityBounds {
        p0_min: 1.0 + (-2.0 * gamma_max * dt).exp_m1() * w,
        p0_max: 1.0 + (-2.0 * gamma_min * dt).exp_m1() * w,
        gamma_min,
        gamma_max,
        dissipative_weight: w,
    }
}

/// Step that maximizes the spread of the probability bounds, or `c/(2g)` when the rates agree.
pub fn optimal_dt(gamma_min: f64, gamma_max: f64, c: f64) -> Result<f64> {
    if !(gamma_min > 0.0) || !(gamma_max >= gamma_min) || !gamma_max.is_finite() {
        return Err(Error::NonPositiveRate {
            min: gamma_min,
            max: gamma_max,
        });
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidPlan(format!(
            "fraction {c} must lie in (0, 1)"
        )));
    }
    if gamma_min == gamma_max {
        return Ok(c / (2.0 * gamma_min));
    }
    Ok((gamma_min / gamma_max).ln() / (2.0 * (gamma_min - gamma_max)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    /// `t_total·ln(g_min/g_max)/(2(g_min − g_max))`, or `t_total/(2g)` when homogeneous.
    pub analytic: f64,
    pub homogeneous: bool,
    /// Operator 2-norm against the exact propagator, when computed.
    pub measured: Option<f64>,
}

pub fn error_estimate(
    plan: &EvolutionPlan,
    gamma_min: f64,
    gamma_max: f64,
) -> Result<ErrorEstimate> {
    let t = plan.t_total();
    if !(gamma_min > 0.0) || !(gamma_max >= gamma_min) {
        return Err(Error::NonPositiveRate {
            min: gamma_min,
            max: gamma_max,
        });
    }
    let homogeneous = gamma_min == gamma_max;
    let analytic = if homogeneous {
        t / (2.0 * gamma_min)
    } else {
        t * (gamma_min / gamma_max).ln() / (2.0 * (gamma_min - gamma_max))
    };
    Ok(ErrorEstimate {
        analytic,
        homogeneous,
        measured: None,
    })
}

/// Observables and probabilities after one step; energies refer to the unnormalized trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub total_energy: f64,
    pub field_energy: f64,
    /// Sum over cells.
    pub polarization: f64,
    /// Sum over cells.
    pub magnetization: f64,
    pub p0: f64,
    pub cumulative_p0: f64,
    pub p0_min: f64,
    pub p0_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    /// `|⟨ψ_exact|ψ⟩|²` for normalized states.
    pub fidelity: f64,
    /// `‖ψ − ψ_exact‖₂` for normalized states.
    pub state_error: f64,
    /// `‖(e^{−iδtD₀}K₀)^{N}ψ₀‖²`.
    pub expected_cumulative_p0: f64,
    /// `‖U(t)ψ₀‖²`.
    pub exact_norm_squared: f64,
    /// Measured operator-norm error, when the dense comparison ran.
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub method: Method,
    pub dt: f64,
    pub steps: usize,
    pub gate_level: bool,
    pub initial: StepRecord,
    pub records: Vec<StepRecord>,
    /// Normalized final state.
    pub final_state: CVector,
    pub oracle: Option<OracleComparison>,
    pub gate_counts: Option<GateCounts>,
    pub error_estimate: Option<ErrorEstimate>,
    pub checks: Vec<Check>,
    /// Step at which a sampled measurement returned 1 and the trajectory stopped.
    pub stopped_at: Option<usize>,
}

impl SimulationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Compare against the exact propagator when `d` is at most this.
    pub oracle_limit: usize,
    /// Also compute the dense operator-norm error.
    pub operator_epsilon: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            oracle_limit: DEFAULT_ORACLE_LIMIT,
            operator_epsilon: true,
        }
    }
}

/// Damping stage of one step, prepared once per run.
enum Stage {
    Rotations(Vec<TwoLevelRotation>),
    KrausGates(DilationCircuit),
    Lcu(LcuCircuit),
    LcuGates(LcuCircuit, DilationCircuit),
}

impl Stage {
    fn prepare(
        method: Method,
        gate_level: bool,
        pair: &KrausPair,
        qubits: usize,
    ) -> Result<(Self, Option<GateCounts>)> {
        Ok(match (method, gate_level) {
            (Method::Kraus, false) => {
                let rots = decompose_two_level(&build_udiss_kraus(pair))?;
                (Stage::Rotations(rots), None)
            }
            (Method::Kraus, true) => {
                let rots = decompose_two_level(&build_udiss_kraus(pair))?;
                let circuit = synthesize_gates(&rots, qubits);
                let counts = circuit.counts;
                (Stage::KrausGates(circuit), Some(counts))
            }
            (Method::Lcu, false) => (Stage::Lcu(build_lcu_dilation(pair)), None),
            (Method::Lcu, true) => {
                let lcu = build_lcu_dilation(pair);
                let circuit = lcu.full_circuit();
                let counts = circuit.counts;
                (Stage::LcuGates(lcu, circuit), Some(counts))
            }
            _ => unreachable!("exact methods have no damping stage"),
        })
    }

    fn apply(&self, state: &mut crate::circuit::DilatedState) -> Result<()> {
        match self {
            Stage::Rotations(rots) => apply_program(state, Program::Rotations(rots)),
            Stage::KrausGates(c) => apply_program(state, Program::Circuit(c)),
            Stage::Lcu(lcu) => lcu.apply_structured(state),
            Stage::LcuGates(lcu, c) => {
                apply_program(state, Program::Circuit(c))?;
                state.amplitudes *= Complex64::from_polar(1.0, lcu.global_phase);
                Ok(())
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn record(
    system: &System,
    psi: &CVector,
    norm_scale: f64,
    step: usize,
    t: f64,
    p0: f64,
    cumulative: f64,
    bounds: (f64, f64),
) -> StepRecord {
    let scaled = StateVector {
        amplitudes: psi * Complex64::new(cumulative.sqrt(), 0.0),
        norm_scale,
    };
    let obs = system.observe(&scaled);
    StepRecord {
        step,
        t,
        total_energy: obs.total_energy,
        field_energy: obs.field_energy,
        polarization: obs.polarization.iter().sum(),
        magnetization: obs.magnetization.iter().sum(),
        p0,
        cumulative_p0: cumulative,
        p0_min: bounds.0,
        p0_max: bounds.1,
    }
}

/// Runs `plan` from `psi0` and assembles the report with its self-checks.
pub fn trotter_run(
    system: &System,
    psi0: &StateVector,
    plan: &EvolutionPlan,
    options: RunOptions,
) -> Result<SimulationReport> {
    plan.validate()?;
    let gen = &system.generators;
    let d = system.dim();
    if psi0.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: psi0.dim(),
        });
    }
    let norm = psi0.norm();
    let mut psi = &psi0.amplitudes / Complex64::new(norm, 0.0);
    let norm_scale = psi0.norm_scale * norm * norm;
    info!(
        "{} run: d = {d}, dt = {:e}, steps = {}, gate level = {}",
        plan.method.name(),
        plan.dt,
        plan.steps,
        plan.gate_level
    );

    let pair = build_kraus_pair(gen, plan.dt)?;
    let (stage, gate_counts, u0, step_matrix) = match plan.method {
        Method::Kraus | Method::Lcu => {
            let (stage, counts) = Stage::prepare(
                plan.method,
                plan.gate_level,
                &pair,
                system.layout.qubits + 1,
            )?;
            let u0 = LosslessStep::new(lossless_propagator(gen, plan.dt)?)?;
            (Some(stage), counts, Some(u0), None)
        }
        Method::Exact => (None, None, None, Some(exact_propagator(gen, plan.dt)?)),
        Method::LosslessExact => (None, None, None, Some(lossless_propagator(gen, plan.dt)?)),
    };

    let b0 = probability_bounds(&psi, gen, plan.dt);
    let initial = record(
        system,
        &psi,
        norm_scale,
        0,
        0.0,
        1.0,
        1.0,
        (b0.p0_min, b0.p0_max),
    );
    let mut records = Vec::with_capacity(plan.steps);
    let mut cumulative = 1.0;
    let mut stopped_at = None;
    let mut bounds_ok = true;
    let mut worst_bound = 0.0f64;

    for step in 1..=plan.steps {
        let bounds = probability_bounds(&psi, gen, plan.dt);
        let p0 = if let (Some(stage), Some(u0)) = (&stage, &u0) {
            let mut state = init_from_amplitudes(&psi);
            stage.apply(&mut state)?;
            controlled_lossless_step(&mut state, u0)?;
            let mode = match plan.measure {
                MeasureMode::Sample(seed) => MeasureMode::Sample(seed.wrapping_add(step as u64)),
                m => m,
            };
            let m = measure_ancilla(&state, mode)?;
            psi = m.post_state;
            if m.outcome == Outcome::One {
                stopped_at = Some(step);
            }
            let excess = (bounds.p0_min - m.p0).max(m.p0 - bounds.p0_max);
            worst_bound = worst_bound.max(excess);
            if excess > BOUND_SLACK {
                bounds_ok = false;
            }
            m.p0
        } else {
            let next = step_matrix.as_ref().expect("exact step") * &psi;
            let p0 = next.norm_squared();
            if p0 < crate::circuit::MIN_BRANCH_PROBABILITY {
                return Err(Error::ZeroProbabilityBranch(p0));
            }
            psi = next / Complex64::new(p0.sqrt(), 0.0);
            p0
        };
        cumulative *= p0;
        let t = plan.dt * step as f64;
        records.push(record(
            system,
            &psi,
            norm_scale,
            step,
            t,
            p0,
            cumulative,
            (bounds.p0_min, bounds.p0_max),
        ));
        if stopped_at.is_some() {
            info!("sampled ancilla returned 1 at step {step}; trajectory stopped");
            break;
        }
    }

    let mut checks = Vec::new();
    if plan.method.is_stepped() {
        checks.push(Check::new(
            "probability-bounds",
            bounds_ok,
            format!("largest excursion outside [p0min, p0max] = {worst_bound:.3e}"),
        ));
    }
    let monotone = std::iter::once(&initial)
        .chain(&records)
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| w[1].cumulative_p0 <= w[0].cumulative_p0 * (1.0 + 1e-15));
    let last_p0 = records
        .last()
        .map_or(initial.cumulative_p0, |r| r.cumulative_p0);
    checks.push(Check::new(
        "cumulative-p0-non-increasing",
        monotone,
        format!(
            "{} -> {last_p0:.6e} over {} steps",
            initial.cumulative_p0,
            records.len()
        ),
    ));
    let e0 = initial.total_energy;
    let max_field = records.iter().map(|r| r.field_energy).fold(0.0, f64::max);
    checks.push(Check::new(
        "field-energy-bounded",
        max_field <= e0 * (1.0 + 1e-9),
        format!("max E_el = {max_field:e}, E_total(0) = {e0:e}"),
    ));
    if system.is_lossless() || plan.method == Method::LosslessExact {
        let drift = records
            .iter()
            .map(|r| ((r.total_energy - e0) / e0).abs())
            .fold(0.0, f64::max);
        checks.push(Check::new(
            "energy-conservation",
            drift < 1e-9,
            format!("relative drift {drift:.3e}"),
        ));
    }

    let mut oracle = None;
    let mut estimate = system
        .rate_extrema()
        .map(|(lo, hi)| error_estimate(plan, lo, hi))
        .transpose()?;
    if d <= options.oracle_limit && stopped_at.is_none() {
        debug!("comparing against the exact propagator");
        let psi_start = &psi0.amplitudes / Complex64::new(norm, 0.0);
        let t_total = plan.t_total();
        let exact = match plan.method {
            Method::LosslessExact => lossless_propagator(gen, t_total)?,
            _ => exact_propagator(gen, t_total)?,
        } * &psi_start;
        let exact_norm_squared = exact.norm_squared();
        let exact_unit = &exact / Complex64::new(exact_norm_squared.sqrt(), 0.0);
        let fidelity = exact_unit.dotc(&psi).norm_sqr();
        let state_error = (&psi - &exact_unit).norm();

        let expected_cumulative_p0 = if plan.method.is_stepped() {
            let u0 = u0.as_ref().expect("stepped");
            let mut v = psi_start.clone();
            for _ in 0..plan.steps {
                v = u0.matrix() * pair.apply_k0(&v);
            }
            let expected = v.norm_squared();
            let rel = (expected - cumulative).abs() / expected.max(f64::MIN_POSITIVE);
            checks.push(Check::new(
                "cumulative-p0-matches-product",
                rel < 1e-9,
                format!("relative difference {rel:.3e}"),
            ));
            let v_unit = &v / Complex64::new(expected.sqrt(), 0.0);
            let diff = max_abs_vec(&(&v_unit - &psi));
            checks.push(Check::new(
                "state-matches-product",
                diff < 1e-9,
                format!("max entry difference {diff:.3e}"),
            ));
            expected
        } else {
            exact_norm_squared
        };
        let epsilon = if options.operator_epsilon && plan.method.is_stepped() {
            Some(measured_epsilon(gen, plan.dt, plan.steps)?)
        } else {
            None
        };
        if let Some(est) = estimate.as_mut() {
            est.measured = epsilon;
        }
        oracle = Some(OracleComparison {
            fidelity,
            state_error,
            expected_cumulative_p0,
            exact_norm_squared,
            epsilon,
        });
    }

    Ok(SimulationReport {
        method: plan.method,
        dt: plan.dt,
        steps: plan.steps,
        gate_level: plan.gate_level,
        initial,
        records,
        final_state: psi,
        oracle,
        gate_counts,
        error_estimate: estimate,
        checks,
        stopped_at,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() < 2 || x.len() != y.len() || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::UndefinedSlope);
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::UndefinedSlope);
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}
