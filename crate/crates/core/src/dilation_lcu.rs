//! `K₀` as the average of two diagonal unitaries, `K₀ = ½(K_z + K_z†)`.
//!
//! `K_z` carries `e^{−iθ_j/2}` on dissipative coordinates and 1 elsewhere. The
//! circuit is `H` on the ancilla, `diag(K_z, K_z†)` selected by the ancilla,
//! then `H` again; the ancilla-0 block is `K₀` and the `|1⟩⟨0|` block is
//! `½(K_z − K_z†)`.

use num_complex::Complex64;

use crate::circuit::{apply_gate, apply_program, DilatedState, Program};
use crate::error::Result;
use crate::gates::{DilationCircuit, Gate, GateCounts, SingleQubitOp};
use crate::kraus::KrausPair;
use crate::linalg::CMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct LcuCircuit {
    /// `[K_z ; conj(K_z)]`, length `2d`.
    pub select_diag: Vec<Complex64>,
    /// Gates for the select diagonal alone, up to global phase.
    pub synthesized: DilationCircuit,
    /// Phase dropped by the synthesis: `diag(select) = e^{i·global_phase}·synthesized`.
    pub global_phase: f64,
}

impl LcuCircuit {
    pub fn qubits(&self) -> usize {
        self.synthesized.qubits
    }

    /// `K_z` diagonal (ancilla-0 half of the select).
    pub fn k0z(&self) -> &[Complex64] {
        &self.select_diag[..self.select_diag.len() / 2]
    }

    /// Prepare, select and unprepare as one gate program.
    ///
    /// The Hadamards are omitted when the select needs no gates, since they then cancel.
    pub fn full_circuit(&self) -> DilationCircuit {
        if self.synthesized.gates.is_empty() {
            return DilationCircuit::empty(self.qubits());
        }
        let mut gates = Vec::with_capacity(self.synthesized.gates.len() + 2);
        gates.push(Gate::single(0, SingleQubitOp::H));
        gates.extend(self.synthesized.gates.iter().cloned());
        gates.push(Gate::single(0, SingleQubitOp::H));
        DilationCircuit::new(self.qubits(), gates)
    }

    pub fn counts(&self) -> GateCounts {
        self.full_circuit().counts
    }

    /// `(H ⊗ I)·diag(select)·(H ⊗ I)` as a dense matrix.
    pub fn dense(&self) -> CMatrix {
        let n = self.select_diag.len();
        let d = n / 2;
        let half = Complex64::new(0.5, 0.0);
        CMatrix::from_fn(n, n, |row, col| {
            if row % d != col % d {
                return Complex64::default();
            }
            let (kz, kz_dag) = (self.select_diag[row % d], self.select_diag[d + row % d]);
            if (row < d) == (col < d) {
                half * (kz + kz_dag)
            } else {
                half * (kz - kz_dag)
            }
        })
    }

    /// Applies the dilation exactly, without going through the synthesized gates.
    pub fn apply_structured(&self, state: &mut DilatedState) -> Result<()> {
        let h = Gate::single(0, SingleQubitOp::H);
        apply_gate(state, &h)?;
        apply_program(state, Program::Diagonal(&self.select_diag))?;
        apply_gate(state, &h)
    }
}

pub fn build_lcu_dilation(pair: &KrausPair) -> LcuCircuit {
    let d = pair.dim();
    let mut k0z = vec![Complex64::new(1.0, 0.0); d];
    for (j, theta) in pair.thetas.iter().enumerate() {
        k0z[pair.dissipative.start + j] = Complex64::from_polar(1.0, -theta / 2.0);
    }
    let mut select_diag = k0z.clone();
    select_diag.extend(k0z.iter().map(|z| z.conj()));
    let phases: Vec<f64> = select_diag.iter().map(|z| z.arg()).collect();
    let qubits = select_diag.len().trailing_zeros() as usize;
    let (synthesized, global_phase) = crate::synthesis::synthesize_diagonal_phases(&phases, qubits);
    LcuCircuit {
        select_diag,
        synthesized,
        global_phase,
    }
}

/// Parity-ladder synthesis of a unit-modulus diagonal; identity-angle gates are elided.
pub fn synthesize_diagonal(select_diag: &[Complex64]) -> DilationCircuit {
    crate::synthesis::synthesize_diagonal(select_diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{circuit_unitary, distance_up_to_phase, init_from_amplitudes};
    use crate::kraus::build_kraus_pair;
    use crate::linalg::{max_abs, CVector};
    use crate::operators::{GeneratorPair, SparseMatrix};
    use nalgebra::DVector;

    fn pair(ddiss: &[f64], range: std::ops::Range<usize>, dt: f64) -> KrausPair {
        let gen = GeneratorPair {
            d0: SparseMatrix::zeros(ddiss.len()),
            ddiss: DVector::from_row_slice(ddiss),
            dissipative: range,
        };
        build_kraus_pair(&gen, dt).unwrap()
    }

    #[test]
    fn zero_step_is_identity() {
        let lcu = build_lcu_dilation(&pair(&[0.0, 0.0, 0.5, 0.8], 2..4, 0.0));
        assert!(lcu
            .select_diag
            .iter()
            .all(|z| *z == Complex64::new(1.0, 0.0)));
        assert_eq!(lcu.dense(), CMatrix::identity(8, 8));
        assert_eq!(lcu.counts().elementary(), 0);
    }

    #[test]
    fn single_mode_branch_amplitudes() {
        let p = pair(&[0.0, 0.7], 1..2, 0.9);
        let theta = p.thetas[0];
        let lcu = build_lcu_dilation(&p);
        let mut psi = CVector::zeros(2);
        psi[1] = Complex64::new(1.0, 0.0);
        let mut state = init_from_amplitudes(&psi);
        lcu.apply_structured(&mut state).unwrap();
        let c = (theta / 2.0).cos();
        let s = (theta / 2.0).sin();
        assert!((state.amplitudes[1] - Complex64::new(c, 0.0)).norm() < 1e-15);
        assert!((state.amplitudes[3] - Complex64::new(0.0, -s)).norm() < 1e-15);
        assert!((c - p.gamma_diag[0]).abs() < 1e-15);
    }

    #[test]
    fn blocks_match_kraus_operators() {
        let p = pair(&[0.0, 0.0, 0.0, 0.0, 0.3, 0.9, 2.0, 0.0], 4..7, 0.7);
        let lcu = build_lcu_dilation(&p);
        let m = lcu.dense();
        let top = m.view((0, 0), (8, 8)).into_owned();
        assert!(max_abs(&(top - p.k0_dense())) < 1e-13);
        let lower = m.view((8, 0), (8, 8)).into_owned();
        for j in 0..8 {
            let kz = lcu.select_diag[j];
            assert!((lower[(j, j)] - (kz - kz.conj()) * 0.5).norm() < 1e-15);
        }
        assert!(crate::linalg::unitarity_residual(&m) < 1e-13);
    }

    #[test]
    fn gate_program_matches_dense() {
        let p = pair(&[0.0, 0.0, 0.0, 0.0, 0.3, 0.9, 2.0, 0.0], 4..7, 0.7);
        let lcu = build_lcu_dilation(&p);
        let got = circuit_unitary(&lcu.full_circuit()).unwrap();
        assert!(distance_up_to_phase(&got, &lcu.dense()) < 1e-10);
        let restored = got * Complex64::from_polar(1.0, lcu.global_phase);
        assert!(max_abs(&(restored - lcu.dense())) < 1e-10);
    }
}
