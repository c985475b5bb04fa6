//! Success-probability bounds and the step that separates them most.

use dissipative_maxwell::evolution::{optimal_dt, probability_bounds, System};
use dissipative_maxwell::medium::{LorentzPole, MediumSpec};
use dissipative_maxwell::operators::GridSpec;

fn main() -> dissipative_maxwell::Result<()> {
    let media = (0..4)
        .map(|q| {
            MediumSpec::normalized(
                vec![LorentzPole::new(1.0, 2.0, 0.1 + 0.2 * q as f64)],
                vec![],
            )
        })
        .collect();
    let system = System::new(GridSpec::new(4, 0.25)?, media)?;
    let (lo, hi) = system.rate_extrema().expect("lossy medium");
    let dt = optimal_dt(lo, hi, 0.1)?;
    println!("rates in [{lo}, {hi}], optimal dt {dt:.6}");

    // a state with weight on the polarization-rate coordinates
    let mut psi = system.encode(&[1.0, 0.5, 0.0, 0.0], &[0.0; 4])?.amplitudes;
    for q in system.generators.dissipative.clone() {
        psi[q] = num_complex::Complex64::new(0.3, 0.0);
    }
    let psi = &psi / num_complex::Complex64::new(psi.norm(), 0.0);
    for scale in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let b = probability_bounds(&psi, &system.generators, scale * dt);
        println!(
            "dt {:.5}: p0 in [{:.6}, {:.6}], spread {:.6}",
            scale * dt,
            b.p0_min,
            b.p0_max,
            b.p0_max - b.p0_min
        );
    }
    Ok(())
}
