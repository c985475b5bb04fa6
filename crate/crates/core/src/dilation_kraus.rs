//! One-ancilla unitary dilation of `K₀` built from two-level `R_y` rotations.
//!
//! On the doubled space (ancilla is the most significant qubit) the dilation is
//! the identity except on the pairs `(start + j, d + j)`, where it acts as
//! `R_y(θ_j)` with `cos(θ_j/2) = Γ_jj`. Its ancilla-0 block is `K₀` and the
//! ancilla-1 column block is `K₁`.

use std::ops::Range;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use crate::circuit::TwoLevelRotation;
use crate::circuit::{
    apply_program, circuit_unitary, distance_up_to_phase, random_state,
    vector_distance_up_to_phase, DilatedState, Program,
};
use crate::error::{Error, Result};
use crate::gates::DilationCircuit;
use crate::kraus::KrausPair;
use crate::linalg::CMatrix;

/// Largest register verified by dense reconstruction.
pub const DENSE_VERIFY_QUBITS: usize = 9;
/// Random probes used above [`DENSE_VERIFY_QUBITS`].
pub const VERIFY_PROBES: usize = 20;

/// How multi-controlled gates are lowered; recorded alongside gate counts.
pub const EXPANSION_RULE: &str = "two-level R_y(a,b): CNOT fan from the most significant differing bit, \
one fully controlled R_y on that bit (zero-valued controls X-conjugated); C^m R_y = R_y(t/2) C^mX R_y(-t/2) C^mX, peeling one control first when no qubit is idle; \
C^mX: Toffoli (6 CNOT) for m=2, V-chain with m-2 idle qubits, two-half split with one idle qubit, \
sqrt-U recursion otherwise; C^1 U via ZYZ with 2 CNOTs; adjacent self-inverse pairs cancelled";

/// `Û_diss` in structured form.
#[derive(Debug, Clone, PartialEq)]
pub struct UdissKraus {
    /// System dimension `d`; the dilation acts on `2d`.
    pub dim: usize,
    pub dissipative: Range<usize>,
    /// `Γ_jj` per dissipative coordinate.
    pub gamma: Vec<f64>,
}

impl UdissKraus {
    pub fn dilated_dim(&self) -> usize {
        2 * self.dim
    }

    /// `(a, b)` coupled by the rotation for dissipative index `j`.
    pub fn pair(&self, j: usize) -> (usize, usize) {
        (self.dissipative.start + j, self.dim + j)
    }

    pub fn dense(&self) -> CMatrix {
        let n = self.dilated_dim();
        let mut u = CMatrix::identity(n, n);
        for (j, g) in self.gamma.iter().enumerate() {
            let (a, b) = self.pair(j);
            let s = (1.0 - g * g).max(0.0).sqrt();
            u[(a, a)] = Complex64::new(*g, 0.0);
            u[(b, b)] = Complex64::new(*g, 0.0);
            u[(a, b)] = Complex64::new(-s, 0.0);
            u[(b, a)] = Complex64::new(s, 0.0);
        }
        u
    }

    /// Recovers the structured form, rejecting anything that deviates from it by more than `tol`.
    pub fn from_dense(u: &CMatrix, dissipative: Range<usize>, tol: f64) -> Result<Self> {
        let n = u.nrows();
        if u.ncols() != n || !n.is_multiple_of(2) {
            return Err(Error::StructureViolation(format!(
                "{}x{} is not a doubled square matrix",
                n,
                u.ncols()
            )));
        }
        let dim = n / 2;
        if dissipative.end > dim {
            return Err(Error::StructureViolation(format!(
                "dissipative range {dissipative:?} does not fit dimension {dim}"
            )));
        }
        let gamma: Vec<f64> = dissipative.clone().map(|a| u[(a, a)].re).collect();
        let candidate = Self {
            dim,
            dissipative,
            gamma,
        };
        if candidate
            .gamma
            .iter()
            .any(|g| !(-tol..=1.0 + tol).contains(g))
        {
            return Err(Error::StructureViolation(
                "diagonal entry outside [0, 1]".into(),
            ));
        }
        let expected = candidate.dense();
        for row in 0..n {
            for col in 0..n {
                if (u[(row, col)] - expected[(row, col)]).norm() > tol {
                    return Err(Error::StructureViolation(format!(
                        "entry ({row}, {col}) breaks the two-level rotation pattern"
                    )));
                }
            }
        }
        Ok(candidate)
    }

    /// Rotations whose product is this dilation.
    pub fn rotations(&self) -> Vec<TwoLevelRotation> {
        self.gamma
            .iter()
            .enumerate()
            .map(|(j, g)| {
                let (a, b) = self.pair(j);
                TwoLevelRotation::new(a, b, 2.0 * g.clamp(-1.0, 1.0).acos())
            })
            .collect()
    }
}

pub fn build_udiss_kraus(pair: &KrausPair) -> UdissKraus {
    UdissKraus {
        dim: pair.dim(),
        dissipative: pair.dissipative.clone(),
        gamma: pair.gamma_diag.clone(),
    }
}

/// One rotation per dissipative coordinate, on disjoint coordinate pairs.
pub fn decompose_two_level(u: &UdissKraus) -> Result<Vec<TwoLevelRotation>> {
    if u.dissipative.end > u.dim {
        return Err(Error::StructureViolation(format!(
            "dissipative range {:?} cannot pair with the ancilla-1 block of dimension {}",
            u.dissipative, u.dim
        )));
    }
    if u.gamma.len() != u.dissipative.len() {
        return Err(Error::StructureViolation(format!(
            "{} rates for a dissipative block of {}",
            u.gamma.len(),
            u.dissipative.len()
        )));
    }
    if let Some(g) = u.gamma.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(Error::StructureViolation(format!(
            "Γ = {g} is not a cosine of a half angle in [0, π/2]"
        )));
    }
    Ok(u.rotations())
}

/// Elementary gate program for the rotations on a `qubits`-qubit register.
pub fn synthesize_gates(rotations: &[TwoLevelRotation], qubits: usize) -> DilationCircuit {
    crate::synthesis::synthesize_rotations(rotations, qubits)
}

/// Dense product of rotations in the given order.
pub fn rotations_dense(rotations: &[TwoLevelRotation], dim: usize) -> CMatrix {
    let mut u = CMatrix::identity(dim, dim);
    for r in rotations {
        let (s, c) = (r.angle / 2.0).sin_cos();
        for col in 0..dim {
            let (x, y) = (u[(r.a, col)], u[(r.b, col)]);
            u[(r.a, col)] = x * c - y * s;
            u[(r.b, col)] = x * s + y * c;
        }
    }
    u
}

/// Phase-insensitive distance between a circuit and the rotations it implements.
///
/// Dense up to [`DENSE_VERIFY_QUBITS`] qubits, seeded random probes above.
pub fn verify_circuit(
    circuit: &DilationCircuit,
    rotations: &[TwoLevelRotation],
    seed: u64,
) -> Result<f64> {
    if circuit.qubits <= DENSE_VERIFY_QUBITS {
        let got = circuit_unitary(circuit)?;
        let want = rotations_dense(rotations, circuit.dim());
        return Ok(distance_up_to_phase(&got, &want));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..VERIFY_PROBES {
        let probe = random_state(circuit.dim(), &mut rng);
        let mut via_gates = DilatedState {
            amplitudes: probe,
            qubits: circuit.qubits,
        };
        let mut via_blocks = via_gates.clone();
        apply_program(&mut via_gates, Program::Circuit(circuit))?;
        apply_program(&mut via_blocks, Program::Rotations(rotations))?;
        worst = worst.max(vector_distance_up_to_phase(
            &via_gates.amplitudes,
            &via_blocks.amplitudes,
        ));
    }
    Ok(worst)
}
