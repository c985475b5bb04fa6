//! Gate counts of both dilations as the register grows.

use dissipative_maxwell::cli::{parse_config, resource_report};

const CONFIG: &str = r#"
[grid]
cells = 2
spacing = 0.25

[[medium]]
cells = [0, 2]
electric = [{ coupling = 1.0, resonance = 2.0, damping = 0.2 }]
magnetic = [{ coupling = 0.7, resonance = 1.5, damping = 0.3 }]

[initial.e]
values = [1.0, 0.0]

[plan]
dt = 0.05
steps = 1
method = "kraus"

[resources]
rate_jitter = 0.3
seed = 11
"#;

fn main() -> dissipative_maxwell::Result<()> {
    let table = resource_report(&parse_config(CONFIG)?, 4..=8)?;
    println!(
        "{:>2} {:>5} {:>10} {:>6} {:>10}",
        "n", "cells", "kraus", "lcu", "kraus/lcu"
    );
    for pair in table.rows.chunks(2) {
        let (k, l) = (&pair[0], &pair[1]);
        println!(
            "{:>2} {:>5} {:>10} {:>6} {:>10.1}",
            k.n,
            k.cells,
            k.total(),
            l.total(),
            k.total() as f64 / l.total() as f64
        );
    }
    for fit in [&table.kraus_fit, &table.lcu_fit].into_iter().flatten() {
        println!(
            "{:<14} c = {:>8.3}  R^2 = {:.4}  free exponent {:.2}",
            fit.shape, fit.c, fit.r_squared, fit.free_slope
        );
    }
    Ok(())
}
