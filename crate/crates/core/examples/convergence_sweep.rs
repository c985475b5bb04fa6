//! First-order splitting error: halving the step halves the error.

use dissipative_maxwell::evolution::{log_log_slope, measured_epsilon, System};
use dissipative_maxwell::medium::{LorentzPole, MediumSpec};
use dissipative_maxwell::operators::GridSpec;

fn main() -> dissipative_maxwell::Result<()> {
    let media = (0..16)
        .map(|q| {
            MediumSpec::normalized(
                vec![LorentzPole::new(1.0, 2.0, [0.3, 0.45, 0.2, 0.6][q % 4])],
                vec![],
            )
        })
        .collect();
    let system = System::new(GridSpec::new(16, 0.25)?, media)?;
    let ladder: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];
    let mut eps = Vec::new();
    for dt in ladder {
        let steps = (1.0 / dt).round() as usize;
        let e = measured_epsilon(&system.generators, dt, steps)?;
        println!("dt {dt:<5} steps {steps:>4}  eps {e:.4e}");
        eps.push(e);
    }
    println!("log-log slope {:.3}", log_log_slope(&ladder, &eps)?);
    Ok(())
}
