//! LCU dilation: `K0` as the average of two diagonal unitaries, and its cost
//! next to the Kraus dilation of the same step.

use dissipative_maxwell::circuit::{
    apply_program, circuit_unitary, distance_up_to_phase, init_from_amplitudes, measure_ancilla,
    MeasureMode, Program,
};
use dissipative_maxwell::dilation_kraus::{
    build_udiss_kraus, decompose_two_level, synthesize_gates,
};
use dissipative_maxwell::dilation_lcu::build_lcu_dilation;
use dissipative_maxwell::evolution::System;
use dissipative_maxwell::kraus::build_kraus_pair;
use dissipative_maxwell::linalg::max_abs;
use dissipative_maxwell::medium::{LorentzPole, MediumSpec};
use dissipative_maxwell::operators::GridSpec;

fn main() -> dissipative_maxwell::Result<()> {
    let media = (0..8)
        .map(|q| {
            MediumSpec::normalized(
                vec![LorentzPole::new(1.0, 2.0, 0.1 + 0.05 * q as f64)],
                vec![],
            )
        })
        .collect();
    let system = System::new(GridSpec::new(8, 0.25)?, media)?;
    let pair = build_kraus_pair(&system.generators, 0.2)?;
    let lcu = build_lcu_dilation(&pair);
    let d = system.dim();
    let top = lcu.dense().view((0, 0), (d, d)).into_owned();
    println!(
        "top-left block vs K0: {:.2e}",
        max_abs(&(top - pair.k0_dense()))
    );
    let gates = circuit_unitary(&lcu.full_circuit())?;
    println!(
        "synthesized select vs dense (up to phase): {:.2e}",
        distance_up_to_phase(&gates, &lcu.dense())
    );

    let psi = system.encode(&[0.0, 0.3, 1.0, 0.3, 0.0, 0.0, 0.0, 0.0], &[0.0; 8])?;
    let mut a = init_from_amplitudes(&psi.amplitudes);
    lcu.apply_structured(&mut a)?;
    let rotations = decompose_two_level(&build_udiss_kraus(&pair))?;
    let mut b = init_from_amplitudes(&psi.amplitudes);
    apply_program(&mut b, Program::Rotations(&rotations))?;
    let (pa, pb) = (
        measure_ancilla(&a, MeasureMode::PostSelectZero)?.p0,
        measure_ancilla(&b, MeasureMode::PostSelectZero)?.p0,
    );
    println!("p0: lcu {pa:.15}, kraus {pb:.15}");

    let kraus = synthesize_gates(&rotations, system.layout.qubits + 1);
    println!(
        "gate count: lcu {}, kraus {}",
        lcu.counts().elementary(),
        kraus.counts.elementary()
    );
    Ok(())
}
