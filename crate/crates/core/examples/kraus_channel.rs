//! The damping step as a two-operator channel.
//!
//! Builds `K0`, `K1` for a small lossy grid, checks completeness, and applies the
//! channel to a mixed state.

use dissipative_maxwell::evolution::System;
use dissipative_maxwell::kraus::{apply_channel_density, build_kraus_pair};
use dissipative_maxwell::linalg::CMatrix;
use dissipative_maxwell::medium::{LorentzPole, MediumSpec};
use dissipative_maxwell::operators::GridSpec;
use num_complex::Complex64;

fn main() -> dissipative_maxwell::Result<()> {
    let medium = MediumSpec::normalized(vec![LorentzPole::new(1.0, 2.0, 0.4)], vec![]);
    let system = System::uniform(GridSpec::new(2, 0.5)?, medium)?;
    let dt = 0.5;
    let pair = build_kraus_pair(&system.generators, dt)?;
    println!(
        "d = {}, dissipative block {:?}",
        system.dim(),
        pair.dissipative
    );
    println!("Gamma = {:?}", pair.gamma_diag);
    println!("theta = {:?}", pair.thetas);
    println!("completeness residual {:.2e}", pair.completeness_residual());

    // maximally mixed over the physical coordinates
    let d = system.dim();
    let physical = system.layout.d_physical;
    let rho = CMatrix::from_fn(d, d, |i, j| {
        if i == j && i < physical {
            Complex64::new(1.0 / physical as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let out = apply_channel_density(&rho, &pair)?;
    println!("trace after channel {:.15}", out.trace().re);
    let e = system.encode(&[1.0, 0.5], &[0.0, 0.0])?;
    println!(
        "success probability on a field-only state: {}",
        pair.success_probability(&e.amplitudes)
    );
    Ok(())
}
