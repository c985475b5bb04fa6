//! Kraus dilation: two-level rotations, their gate synthesis, and the text export.

use dissipative_maxwell::dilation_kraus::{
    build_udiss_kraus, decompose_two_level, synthesize_gates, verify_circuit,
};
use dissipative_maxwell::evolution::System;
use dissipative_maxwell::kraus::build_kraus_pair;
use dissipative_maxwell::linalg::unitarity_residual;
use dissipative_maxwell::medium::{LorentzPole, MediumSpec};
use dissipative_maxwell::operators::GridSpec;

fn main() -> dissipative_maxwell::Result<()> {
    let medium = MediumSpec::normalized(
        vec![LorentzPole::new(1.0, 2.0, 0.3)],
        vec![LorentzPole::new(0.6, 1.2, 0.2)],
    );
    let system = System::uniform(GridSpec::new(4, 0.25)?, medium)?;
    let pair = build_kraus_pair(&system.generators, 0.1)?;
    let udiss = build_udiss_kraus(&pair);
    println!(
        "dilated dimension {}, unitarity residual {:.2e}",
        udiss.dilated_dim(),
        unitarity_residual(&udiss.dense())
    );

    let rotations = decompose_two_level(&udiss)?;
    for r in rotations.iter().take(4) {
        println!("rotation on ({:>2}, {:>2}) by {:.6}", r.a, r.b, r.angle);
    }
    let qubits = system.layout.qubits + 1;
    let circuit = synthesize_gates(&rotations, qubits);
    println!(
        "{} rotations -> {} CNOTs + {} single-qubit rotations on {qubits} qubits",
        rotations.len(),
        circuit.counts.cnot_count,
        circuit.counts.rotation_count
    );
    println!(
        "max deviation from the rotations (up to phase): {:.2e}",
        verify_circuit(&circuit, &rotations, 1)?
    );
    for line in circuit.to_text().lines().take(6) {
        println!("  {line}");
    }
    Ok(())
}
