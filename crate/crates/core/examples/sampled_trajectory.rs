//! Sampling the ancilla instead of post-selecting: a seeded trajectory that
//! stops at the first `|1>` outcome, replayed exactly.

use dissipative_maxwell::circuit::MeasureMode;
use dissipative_maxwell::evolution::{trotter_run, EvolutionPlan, Method, RunOptions, System};
use dissipative_maxwell::medium::{LorentzPole, MediumSpec};
use dissipative_maxwell::operators::GridSpec;

fn main() -> dissipative_maxwell::Result<()> {
    let medium = MediumSpec::normalized(vec![LorentzPole::new(1.5, 1.0, 0.8)], vec![]);
    let system = System::uniform(GridSpec::new(4, 0.25)?, medium)?;
    let psi0 = system.encode(&[0.2, 1.0, 0.2, 0.0], &[0.0; 4])?;
    for seed in 0..5 {
        let mut plan = EvolutionPlan::new(0.2, 40, Method::Lcu)?;
        plan.measure = MeasureMode::Sample(seed);
        let a = trotter_run(&system, &psi0, &plan, RunOptions::default())?;
        let b = trotter_run(&system, &psi0, &plan, RunOptions::default())?;
        assert_eq!(a.records, b.records);
        match a.stopped_at {
            Some(step) => println!("seed {seed}: ancilla read 1 at step {step}"),
            None => println!("seed {seed}: all {} steps succeeded", a.records.len()),
        }
    }
    Ok(())
}
