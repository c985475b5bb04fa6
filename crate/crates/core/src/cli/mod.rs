//! Scenario execution behind the command-line tool: runs, invariant checks,
//! convergence sweeps and resource tables.

pub mod config;
pub mod report;

use std::ops::RangeInclusive;
use std::path::PathBuf;

use log::{info, warn};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    apply_program, circuit_unitary, controlled_lossless_step, distance_up_to_phase,
    init_from_amplitudes, measure_ancilla, random_state, LosslessStep, MeasureMode, Program,
};
use crate::dilation_kraus::{
    build_udiss_kraus, decompose_two_level, rotations_dense, synthesize_gates, verify_circuit,
};
use crate::dilation_lcu::build_lcu_dilation;
use crate::error::{Error, Result};
use crate::evolution::{
    error_estimate, log_log_slope, lossless_propagator, measured_epsilon, probability_bounds,
    trotter_run, Check, EvolutionPlan, Method, RunOptions, SimulationReport, System,
};
use crate::gates::GateCounts;
use crate::kraus::build_kraus_pair;
use crate::linalg::{max_abs, max_abs_vec, unitarity_residual, CMatrix};
use crate::medium::MediumSpec;
use crate::operators::{qubits_for, GridSpec};

pub use config::{load_config, parse_config, RunConfig};
use report::{steps_to_csv, to_json, with_extension, write_atomic, RunSummary};

/// Largest register whose synthesized circuit is checked densely by `verify`.
pub const VERIFY_DENSE_QUBITS: usize = 8;
/// Largest register whose synthesized circuit is checked at all by `verify`.
pub const VERIFY_PROBE_QUBITS: usize = 12;
/// Largest doubled dimension for dense dilation checks.
pub const VERIFY_DENSE_DIM: usize = 512;

#[derive(Debug)]
pub struct RunOutcome {
    pub report: SimulationReport,
    pub summary: RunSummary,
    pub written: Vec<PathBuf>,
}

/// Runs the configured plan and writes the requested report files.
pub fn run_scenario(config: &RunConfig) -> Result<RunOutcome> {
    let system = config.system()?;
    let psi0 = config.initial_state(&system)?;
    let plan = config.evolution_plan(&system)?;
    let options = RunOptions {
        oracle_limit: config.plan.oracle_limit,
        ..RunOptions::default()
    };
    let report = trotter_run(&system, &psi0, &plan, options)?;
    let summary = RunSummary::from_report(&report, system.dim(), system.layout.qubits);
    for c in report.failed_checks() {
        warn!("check {} failed: {}", c.name, c.detail);
    }

    let mut written = Vec::new();
    if let Some(base) = &config.output.report {
        if config.output.formats.contains(&config::Format::Csv) {
            let mut rows = vec![report.initial.clone()];
            rows.extend(report.records.iter().cloned());
            let path = with_extension(base, "csv");
            write_atomic(&path, steps_to_csv(&rows)?.as_bytes())?;
            written.push(path);
        }
        if config.output.formats.contains(&config::Format::Json) {
            let path = with_extension(base, "json");
            write_atomic(&path, to_json(&summary)?.as_bytes())?;
            written.push(path);
        }
    }
    if let Some(path) = &config.output.circuit {
        if plan.method.is_stepped() {
            let pair = build_kraus_pair(&system.generators, plan.dt)?;
            let circuit = match plan.method {
                Method::Kraus => synthesize_gates(
                    &decompose_two_level(&build_udiss_kraus(&pair))?,
                    system.layout.qubits + 1,
                ),
                _ => build_lcu_dilation(&pair).full_circuit(),
            };
            write_atomic(path, circuit.to_text().as_bytes())?;
            written.push(path.clone());
        } else {
            warn!("no circuit to export for the {} method", plan.method.name());
        }
    }
    for p in &written {
        info!("wrote {}", p.display());
    }
    Ok(RunOutcome {
        report,
        summary,
        written,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub dimension: usize,
    pub qubits: usize,
    pub dt: f64,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, value: f64, tolerance: f64) -> Check {
    Check {
        name: name.to_string(),
        passed: value <= tolerance,
        detail: format!("{value:.3e} (tolerance {tolerance:.0e})"),
    }
}

fn skipped(name: &str, why: &str) -> Check {
    Check {
        name: name.to_string(),
        passed: true,
        detail: format!("skipped: {why}"),
    }
}

/// Invariant suite for the configured system at the configured step.
pub fn verify_scenario(config: &RunConfig) -> Result<VerificationReport> {
    let system = config.system()?;
    let psi0 = config.initial_state(&system)?;
    let dt = config.resolve_dt(&system)?;
    let gen = &system.generators;
    let d = system.dim();
    let qubits = system.layout.qubits + 1;
    let mut checks = Vec::new();

    let scale = gen.d0.max_abs().max(1.0);
    checks.push(check(
        "generator-hermitian",
        gen.d0.hermiticity_residual() / scale,
        1e-14,
    ));
    let negative = gen
        .ddiss
        .iter()
        .fold(0.0f64, |m, &g| if g < 0.0 { m.max(-g) } else { m });
    checks.push(check("dissipator-nonnegative", negative, 0.0));
    let padding = system.layout.padding_range();
    let leak = padding
        .clone()
        .flat_map(|q| gen.d0.row(q).iter().map(|(_, v)| v.norm()))
        .chain((0..d).flat_map(|r| {
            gen.d0
                .row(r)
                .iter()
                .filter(|(c, _)| padding.contains(c))
                .map(|(_, v)| v.norm())
        }))
        .chain(padding.clone().map(|q| gen.ddiss[q].abs()))
        .fold(0.0, f64::max);
    checks.push(check("padding-inert", leak, 0.0));

    let pair = build_kraus_pair(gen, dt)?;
    let completeness = if d <= 1024 {
        pair.completeness_residual()
    } else {
        pair.gamma_diag
            .iter()
            .zip(pair.jump_amplitudes())
            .map(|(g, s)| (g * g + s * s - 1.0).abs())
            .fold(0.0, f64::max)
    };
    checks.push(check("kraus-completeness", completeness, 1e-12));

    let udiss = build_udiss_kraus(&pair);
    let rotations = decompose_two_level(&udiss)?;
    let lcu = build_lcu_dilation(&pair);
    if 2 * d <= VERIFY_DENSE_DIM {
        let dense = udiss.dense();
        checks.push(check("dilation-unitary", unitarity_residual(&dense), 1e-12));
        let block = dense.view((0, 0), (d, d)).into_owned();
        checks.push(check(
            "dilation-k0-block",
            max_abs(&(block - pair.k0_dense())),
            1e-13,
        ));
        checks.push(check(
            "rotation-product",
            max_abs(&(rotations_dense(&rotations, 2 * d) - &dense)),
            1e-13,
        ));
        let lcu_dense = lcu.dense();
        let top = lcu_dense.view((0, 0), (d, d)).into_owned();
        checks.push(check(
            "lcu-k0-block",
            max_abs(&(top - pair.k0_dense())),
            1e-13,
        ));
    } else {
        for name in [
            "dilation-unitary",
            "dilation-k0-block",
            "rotation-product",
            "lcu-k0-block",
        ] {
            checks.push(skipped(name, "dimension above the dense check limit"));
        }
    }

    if qubits <= VERIFY_PROBE_QUBITS {
        let circuit = synthesize_gates(&rotations, qubits);
        let err = verify_circuit(&circuit, &rotations, config.resource_seed)?;
        checks.push(check(
            "kraus-synthesis",
            err,
            if qubits <= VERIFY_DENSE_QUBITS {
                1e-10
            } else {
                1e-9
            },
        ));
    } else {
        checks.push(skipped(
            "kraus-synthesis",
            "register above the synthesis check limit",
        ));
    }
    if qubits <= VERIFY_DENSE_QUBITS + 1 {
        let got = circuit_unitary(&lcu.full_circuit())?;
        checks.push(check(
            "lcu-synthesis",
            distance_up_to_phase(&got, &lcu.dense()),
            1e-10,
        ));
    } else {
        checks.push(skipped(
            "lcu-synthesis",
            "register above the dense check limit",
        ));
    }

    // one step from the configured state and from random states, both dilations
    let u0 = LosslessStep::new(lossless_propagator(gen, dt)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.resource_seed);
    let mut probes = vec![psi0.amplitudes.clone()];
    probes.extend((0..3).map(|_| random_state(d, &mut rng)));
    let (mut oracle_err, mut agree_err, mut bound_err) = (0.0f64, 0.0f64, 0.0f64);
    for psi in &probes {
        let mut via_kraus = init_from_amplitudes(psi);
        apply_program(&mut via_kraus, Program::Rotations(&rotations))?;
        controlled_lossless_step(&mut via_kraus, &u0)?;
        let k = measure_ancilla(&via_kraus, MeasureMode::PostSelectZero)?;
        let mut via_lcu = init_from_amplitudes(psi);
        lcu.apply_structured(&mut via_lcu)?;
        controlled_lossless_step(&mut via_lcu, &u0)?;
        let l = measure_ancilla(&via_lcu, MeasureMode::PostSelectZero)?;
        let expected = u0.matrix() * pair.apply_k0(psi);
        let expected = &expected / Complex64::new(expected.norm(), 0.0);
        oracle_err = oracle_err.max(max_abs_vec(&(&k.post_state - &expected)));
        agree_err = agree_err
            .max(max_abs_vec(&(&k.post_state - &l.post_state)))
            .max((k.p0 - l.p0).abs());
        let b = probability_bounds(psi, gen, dt);
        bound_err = bound_err.max(b.p0_min - k.p0).max(k.p0 - b.p0_max);
    }
    checks.push(check("step-matches-oracle", oracle_err, 1e-10));
    checks.push(check("methods-agree", agree_err, 1e-12));
    checks.push(check("probability-bounds", bound_err.max(0.0), 1e-12));

    Ok(VerificationReport {
        dimension: d,
        qubits,
        dt,
        checks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub dt: f64,
    pub steps: usize,
    pub epsilon: f64,
    pub analytic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub t_total: f64,
    pub rows: Vec<SweepRow>,
    /// Log-log slope of `epsilon` against `dt`; absent when some error vanishes.
    pub slope: Option<f64>,
    /// Errors shrink as the step shrinks.
    pub monotone: bool,
}

/// Measured Trotter error over a ladder of steps at the configured total time.
pub fn sweep_convergence(config: &RunConfig, ladder: &[f64]) -> Result<SweepTable> {
    if ladder.len() < 2 {
        return Err(Error::UndefinedSlope);
    }
    let system = config.system()?;
    let t_total = config.resolve_dt(&system)? * config.plan.steps as f64;
    let mut plans = Vec::new();
    for &dt in ladder {
        if !(dt > 0.0) {
            return Err(Error::InvalidPlan(format!(
                "ladder step {dt} must be positive"
            )));
        }
        let steps = (t_total / dt).round() as usize;
        if steps == 0 || ((steps as f64 * dt - t_total) / t_total).abs() > 1e-9 {
            return Err(Error::InvalidPlan(format!(
                "step {dt} does not divide the total time {t_total}"
            )));
        }
        plans.push((dt, steps));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.sweep_threads)
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let rates = system.rate_extrema();
    let gen = &system.generators;
    let results: Vec<Result<SweepRow>> = pool.install(|| {
        use rayon::prelude::*;
        plans
            .par_iter()
            .map(|&(dt, steps)| {
                info!("sweep: dt = {dt:e}, {steps} steps");
                let epsilon = measured_epsilon(gen, dt, steps)?;
                let analytic = match rates {
                    Some((lo, hi)) => {
                        let plan = EvolutionPlan::new(dt, steps, Method::Kraus)?;
                        Some(error_estimate(&plan, lo, hi)?.analytic)
                    }
                    None => None,
                };
                Ok(SweepRow {
                    dt,
                    steps,
                    epsilon,
                    analytic,
                })
            })
            .collect()
    });
    let mut rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.dt.total_cmp(&a.dt));
    let monotone = rows.windows(2).all(|w| w[1].epsilon <= w[0].epsilon);
    let dts: Vec<f64> = rows.iter().map(|r| r.dt).collect();
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let slope = if eps.iter().all(|e| *e > 1e-12) {
        Some(log_log_slope(&dts, &eps)?)
    } else {
        None
    };
    Ok(SweepTable {
        t_total,
        rows,
        slope,
        monotone,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceRow {
    pub n: usize,
    pub cells: usize,
    pub rotations: usize,
    pub method: String,
    pub cnot_count: usize,
    pub rotation_count: usize,
    /// For lcu rows with n ≥ 5: whether the count is below the kraus count.
    pub below_kraus: Option<bool>,
}

impl ResourceRow {
    pub fn total(&self) -> usize {
        self.cnot_count + self.rotation_count
    }
}

/// `count ≈ c·shape(n)` fitted in log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeFit {
    pub shape: String,
    pub c: f64,
    /// R² of the one-parameter fit (slope fixed to 1 against `ln shape`).
    pub r_squared: f64,
    /// Free least-squares slope of `ln count` against `ln shape`.
    pub free_slope: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

pub fn fit_shape(
    ns: &[usize],
    counts: &[usize],
    shape: fn(usize) -> f64,
    name: &str,
) -> Result<ShapeFit> {
    if ns.len() < 2 || ns.len() != counts.len() || counts.contains(&0) {
        return Err(Error::UndefinedSlope);
    }
    let y: Vec<f64> = counts.iter().map(|c| (*c as f64).ln()).collect();
    let f: Vec<f64> = ns.iter().map(|n| shape(*n).ln()).collect();
    let k = y.len() as f64;
    let ln_c = y.iter().zip(&f).map(|(a, b)| a - b).sum::<f64>() / k;
    let mean = y.iter().sum::<f64>() / k;
    let ss_res: f64 = y.iter().zip(&f).map(|(a, b)| (a - b - ln_c).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|a| (a - mean).powi(2)).sum();
    let ratios: Vec<f64> = y.iter().zip(&f).map(|(a, b)| (a - b).exp()).collect();
    let exp_f: Vec<f64> = f.iter().map(|v| v.exp()).collect();
    let exp_y: Vec<f64> = y.iter().map(|v| v.exp()).collect();
    Ok(ShapeFit {
        shape: name.to_string(),
        c: ln_c.exp(),
        r_squared: 1.0 - ss_res / ss_tot,
        free_slope: log_log_slope(&exp_f, &exp_y)?,
        min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
    })
}

pub fn kraus_shape(n: usize) -> f64 {
    2f64.powi(n as i32 - 1) * (n * n) as f64
}

pub fn lcu_shape(n: usize) -> f64 {
    2f64.powi(n as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceTable {
    pub rows: Vec<ResourceRow>,
    pub kraus_fit: Option<ShapeFit>,
    pub lcu_fit: Option<ShapeFit>,
    /// Every lcu row with n ≥ 5 is below its kraus row.
    pub ordering_holds: bool,
    pub expansion_rule: String,
}

/// Largest register for resource counting.
pub const RESOURCE_MAX_QUBITS: usize = 12;

/// The configured media stretched over as many cells as fit in `2^n` coordinates.
pub fn scaled_system(config: &RunConfig, n: usize) -> Result<Option<System>> {
    let template = config.media();
    let probe = System::new(
        GridSpec {
            cells: 2,
            spacing: config.grid.spacing,
        },
        vec![template[0].clone(), template[0].clone()],
    )?;
    let per_cell = probe.layout.d_physical / 2;
    let cells = (1usize << n) / per_cell;
    if cells < 2 {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.resource_seed);
    let media: Vec<MediumSpec> = (0..cells)
        .map(|q| {
            let mut m = template[q * template.len() / cells].clone();
            if config.rate_jitter > 0.0 {
                for p in m
                    .electric_poles
                    .iter_mut()
                    .chain(m.magnetic_poles.iter_mut())
                {
                    p.damping *= 1.0 + config.rate_jitter * (2.0 * rng.random::<f64>() - 1.0);
                }
            }
            m
        })
        .collect();
    let system = System::new(
        GridSpec {
            cells,
            spacing: config.grid.spacing,
        },
        media,
    )?;
    debug_assert_eq!(qubits_for(system.layout.d_physical), n);
    Ok(Some(system))
}

/// Gate counts of both dilations for each system size in `n_range`.
pub fn resource_report(
    config: &RunConfig,
    n_range: RangeInclusive<usize>,
) -> Result<ResourceTable> {
    if *n_range.end() + 1 > RESOURCE_MAX_QUBITS {
        return Err(Error::DimensionTooLarge {
            dim: 1 << (*n_range.end() + 1),
            limit: 1 << RESOURCE_MAX_QUBITS,
        });
    }
    let mut rows = Vec::new();
    let mut fit_points: Vec<(usize, usize, usize)> = Vec::new();
    for n in n_range {
        let Some(system) = scaled_system(config, n)? else {
            warn!("n = {n}: not even one cell fits");
            continue;
        };
        let dt = config.resolve_dt(&system)?;
        let pair = build_kraus_pair(&system.generators, dt)?;
        let rotations = decompose_two_level(&build_udiss_kraus(&pair))?;
        let kraus: GateCounts = synthesize_gates(&rotations, n + 1).counts;
        let lcu: GateCounts = build_lcu_dilation(&pair).counts();
        info!(
            "n = {n}: {} rotations, kraus {}, lcu {}",
            rotations.len(),
            kraus.elementary(),
            lcu.elementary()
        );
        let below = (n >= 5).then(|| lcu.elementary() < kraus.elementary());
        for (method, counts, flag) in [("kraus", kraus, None), ("lcu", lcu, below)] {
            rows.push(ResourceRow {
                n,
                cells: system.grid.cells,
                rotations: rotations.len(),
                method: method.to_string(),
                cnot_count: counts.cnot_count,
                rotation_count: counts.rotation_count,
                below_kraus: flag,
            });
        }
        fit_points.push((n, kraus.elementary(), lcu.elementary()));
    }
    let ns: Vec<usize> = fit_points.iter().map(|p| p.0).collect();
    let kc: Vec<usize> = fit_points.iter().map(|p| p.1).collect();
    let lc: Vec<usize> = fit_points.iter().map(|p| p.2).collect();
    let kraus_fit = fit_shape(&ns, &kc, kraus_shape, "2^(n-1)*n^2").ok();
    let lcu_fit = fit_shape(&ns, &lc, lcu_shape, "2^n").ok();
    let ordering_holds = rows.iter().all(|r| r.below_kraus != Some(false));
    Ok(ResourceTable {
        rows,
        kraus_fit,
        lcu_fit,
        ordering_holds,
        expansion_rule: crate::dilation_kraus::EXPANSION_RULE.to_string(),
    })
}

pub fn sweep_to_csv(table: &SweepTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let e = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["dt", "steps", "epsilon", "analytic"])
        .map_err(e)?;
    for r in &table.rows {
        w.write_record([
            report::fmt_f64(r.dt),
            r.steps.to_string(),
            report::fmt_f64(r.epsilon),
            r.analytic.map(report::fmt_f64).unwrap_or_default(),
        ])
        .map_err(e)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?)
        .map_err(|e| Error::Io(e.to_string()))
}

pub fn resources_to_csv(table: &ResourceTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let e = |e: csv::Error| Error::Io(e.to_string());
    w.write_record([
        "n",
        "cells",
        "rotations",
        "method",
        "cnot_count",
        "rotation_count",
        "total",
        "below_kraus",
    ])
    .map_err(e)?;
    for r in &table.rows {
        w.write_record([
            r.n.to_string(),
            r.cells.to_string(),
            r.rotations.to_string(),
            r.method.clone(),
            r.cnot_count.to_string(),
            r.rotation_count.to_string(),
            r.total().to_string(),
            r.below_kraus.map(|b| b.to_string()).unwrap_or_default(),
        ])
        .map_err(e)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?)
        .map_err(|e| Error::Io(e.to_string()))
}

/// Dense `(H⊗I)·select·(H⊗I)` check used by tests and examples.
pub fn lcu_top_left_error(pair: &crate::kraus::KrausPair) -> f64 {
    let lcu = build_lcu_dilation(pair);
    let d = pair.dim();
    let top: CMatrix = lcu.dense().view((0, 0), (d, d)).into_owned();
    max_abs(&(top - pair.k0_dense()))
}
