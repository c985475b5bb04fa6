//! Permittivity of a two-pole Lorentz medium across frequency.
//!
//! Loss shows up as a positive imaginary part; removing the damping makes the
//! response real away from the resonances.

use dissipative_maxwell::medium::{response_at, validate_medium, Branch, LorentzPole, MediumSpec};

fn main() -> dissipative_maxwell::Result<()> {
    let lossy = MediumSpec::normalized(
        vec![
            LorentzPole::new(1.0, 1.0, 0.1),
            LorentzPole::new(0.5, 3.0, 0.3),
        ],
        vec![],
    );
    let lossless = MediumSpec::normalized(
        lossy
            .electric_poles
            .iter()
            .map(|p| LorentzPole::new(p.big_omega, p.resonance, 0.0))
            .collect(),
        vec![],
    );
    println!(
        "classes: {:?} / {:?}",
        validate_medium(&lossy)?,
        validate_medium(&lossless)?
    );
    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "omega", "Re eps", "Im eps", "lossless"
    );
    for k in 0..=16 {
        let omega = 0.25 * k as f64 + 0.1;
        let eps = response_at(&lossy, omega, Branch::Electric)?;
        let ideal = response_at(&lossless, omega, Branch::Electric)?;
        println!(
            "{omega:>6.2} {:>12.5} {:>12.5} {:>12.5}",
            eps.re, eps.im, ideal.re
        );
    }
    Ok(())
}
