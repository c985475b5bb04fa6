//! Runs the commented scenario in `examples/configs/lossy_slab.toml` in memory
//! and prints the energy history.

use dissipative_maxwell::cli::load_config;
use dissipative_maxwell::evolution::{trotter_run, RunOptions};

fn main() -> dissipative_maxwell::Result<()> {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/configs/lossy_slab.toml"
    );
    let config = load_config(std::path::Path::new(path))?;
    let system = config.system()?;
    let psi0 = config.initial_state(&system)?;
    let plan = config.evolution_plan(&system)?;
    let report = trotter_run(&system, &psi0, &plan, RunOptions::default())?;

    println!(
        "{:>5} {:>8} {:>12} {:>12} {:>10}",
        "step", "t", "E_total", "E_el", "prod p0"
    );
    for r in std::iter::once(&report.initial).chain(report.records.iter().skip(9).step_by(10)) {
        println!(
            "{:>5} {:>8.3} {:>12.6} {:>12.6} {:>10.6}",
            r.step, r.t, r.total_energy, r.field_energy, r.cumulative_p0
        );
    }
    if let Some(oracle) = &report.oracle {
        println!("fidelity with the exact propagator: {:.8}", oracle.fidelity);
    }
    for c in &report.checks {
        println!("{} {}", if c.passed { "ok  " } else { "FAIL" }, c.name);
    }
    Ok(())
}
