//! Statevector engine on `n + 1` qubits with a single ancilla.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gates::{DilationCircuit, Gate, Mat2};
use crate::linalg::{unitarity_residual, CMatrix, CVector};
use crate::operators::StateVector;

/// Smallest ancilla-0 probability accepted by post-selection.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-14;

/// `|0⟩ ⊗ ψ` and its evolution; the ancilla is the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct DilatedState {
    pub amplitudes: CVector,
    pub qubits: usize,
}

impl DilatedState {
    /// Half dimension `d`.
    pub fn system_dim(&self) -> usize {
        self.amplitudes.len() / 2
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn top(&self) -> CVector {
        self.amplitudes.rows(0, self.system_dim()).into_owned()
    }

    pub fn bottom(&self) -> CVector {
        let d = self.system_dim();
        self.amplitudes.rows(d, d).into_owned()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.qubits - 1 - qubit)
    }
}

pub fn init_dilated(psi: &StateVector) -> DilatedState {
    init_from_amplitudes(&psi.amplitudes)
}

pub fn init_from_amplitudes(psi: &CVector) -> DilatedState {
    let d = psi.len();
    assert!(
        d.is_power_of_two(),
        "system dimension must be a power of two"
    );
    let mut amplitudes = CVector::zeros(2 * d);
    amplitudes.rows_mut(0, d).copy_from(psi);
    DilatedState {
        amplitudes,
        qubits: d.trailing_zeros() as usize + 1,
    }
}

/// A rotation acting on the span of two basis coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelRotation {
    pub a: usize,
    pub b: usize,
    /// `[[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]` on `(a, b)`.
    pub angle: f64,
}

impl TwoLevelRotation {
    pub fn new(a: usize, b: usize, angle: f64) -> Self {
        debug_assert!(a < b);
        Self { a, b, angle }
    }
}

/// Anything the engine can apply.
#[derive(Debug, Clone, Copy)]
pub enum Program<'a> {
    Circuit(&'a DilationCircuit),
    Rotations(&'a [TwoLevelRotation]),
    Diagonal(&'a [Complex64]),
}

fn apply_pair(amps: &mut CVector, i: usize, j: usize, m: &Mat2) {
    let (x, y) = (amps[i], amps[j]);
    amps[i] = m[0][0] * x + m[0][1] * y;
    amps[j] = m[1][0] * x + m[1][1] * y;
}

pub fn apply_gate(state: &mut DilatedState, gate: &Gate) -> Result<()> {
    let dim = state.amplitudes.len();
    for q in gate.qubits() {
        if q >= state.qubits {
            return Err(Error::DimensionMismatch {
                expected: state.qubits,
                got: q + 1,
            });
        }
    }
    match gate {
        Gate::Single { target, op } => {
            let t = state.mask(*target);
            let m = op.matrix();
            for i in (0..dim).filter(|i| i & t == 0) {
                apply_pair(&mut state.amplitudes, i, i | t, &m);
            }
        }
        Gate::Cnot { control, target } => {
            let (cm, t) = (state.mask(*control), state.mask(*target));
            for i in (0..dim).filter(|i| i & cm != 0 && i & t == 0) {
                state.amplitudes.swap_rows(i, i | t);
            }
        }
        Gate::MultiControlled {
            controls,
            target,
            op,
        } => {
            let t = state.mask(*target);
            let (mut care, mut want) = (0, 0);
            for (q, v) in controls {
                let m = state.mask(*q);
                care |= m;
                if *v {
                    want |= m;
                }
            }
            let m = op.matrix();
            for i in (0..dim).filter(|i| i & t == 0 && i & care == want) {
                apply_pair(&mut state.amplitudes, i, i | t, &m);
            }
        }
        Gate::Dense { qubits, matrix } => {
            let k = qubits.len();
            if matrix.nrows() != 1 << k || matrix.ncols() != 1 << k {
                return Err(Error::DimensionMismatch {
                    expected: 1 << k,
                    got: matrix.nrows(),
                });
            }
            let masks: Vec<usize> = qubits.iter().map(|q| state.mask(*q)).collect();
            let all: usize = masks.iter().sum();
            let offset = |local: usize| -> usize {
                masks
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| local >> (k - 1 - b) & 1 == 1)
                    .map(|(_, m)| m)
                    .sum()
            };
            let offsets: Vec<usize> = (0..1 << k).map(offset).collect();
            let mut local = CVector::zeros(1 << k);
            for base in (0..dim).filter(|i| i & all == 0) {
                for (l, off) in offsets.iter().enumerate() {
                    local[l] = state.amplitudes[base + off];
                }
                let out = matrix * &local;
                for (l, off) in offsets.iter().enumerate() {
                    state.amplitudes[base + off] = out[l];
                }
            }
        }
    }
    Ok(())
}

/// Applies a gate program or a structured block.
pub fn apply_program(state: &mut DilatedState, program: Program<'_>) -> Result<()> {
    let dim = state.amplitudes.len();
    match program {
        Program::Circuit(circuit) => {
            if circuit.qubits != state.qubits {
                return Err(Error::DimensionMismatch {
                    expected: state.qubits,
                    got: circuit.qubits,
                });
            }
            for g in &circuit.gates {
                apply_gate(state, g)?;
            }
        }
        Program::Rotations(rotations) => {
            for r in rotations {
                if r.b >= dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: r.b + 1,
                    });
                }
                let m = crate::gates::SingleQubitOp::Ry(r.angle).matrix();
                apply_pair(&mut state.amplitudes, r.a, r.b, &m);
            }
        }
        Program::Diagonal(diag) => {
            if diag.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: diag.len(),
                });
            }
            for (a, p) in state.amplitudes.iter_mut().zip(diag) {
                *a *= p;
            }
        }
    }
    Ok(())
}

/// `e^{−iδtD₀}` checked for unitarity once.
#[derive(Debug, Clone, PartialEq)]
pub struct LosslessStep {
    matrix: CMatrix,
}

impl LosslessStep {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let residual = unitarity_residual(&matrix);
        if residual > 1e-12 {
            return Err(Error::NonUnitaryBlock(residual));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Applies `u0` to the ancilla-0 half only (open control).
pub fn controlled_lossless_step(state: &mut DilatedState, u0: &LosslessStep) -> Result<()> {
    let d = state.system_dim();
    if u0.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: u0.dim(),
        });
    }
    let top = u0.matrix() * state.top();
    state.amplitudes.rows_mut(0, d).copy_from(&top);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureMode {
    PostSelectZero,
    Sample(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Zero,
    One,
    PostSelectedZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub p0: f64,
    pub outcome: Outcome,
    /// Renormalized system state of the observed branch.
    pub post_state: CVector,
}

/// Measures the ancilla; post-selection keeps the `|0⟩` branch.
pub fn measure_ancilla(state: &DilatedState, mode: MeasureMode) -> Result<MeasurementRecord> {
    let top = state.top();
    let total = state.amplitudes.norm_squared();
    let p0 = (top.norm_squared() / total).clamp(0.0, 1.0);
    let outcome = match mode {
        MeasureMode::PostSelectZero => {
            if p0 < MIN_BRANCH_PROBABILITY {
                return Err(Error::ZeroProbabilityBranch(p0));
            }
            Outcome::PostSelectedZero
        }
        MeasureMode::Sample(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if rng.random::<f64>() < p0 {
                Outcome::Zero
            } else {
                Outcome::One
            }
        }
    };
    let branch = match outcome {
        Outcome::One => state.bottom(),
        _ => top,
    };
    let norm = branch.norm();
    let post_state = if norm > 0.0 {
        branch / Complex64::new(norm, 0.0)
    } else {
        branch
    };
    Ok(MeasurementRecord {
        p0,
        outcome,
        post_state,
    })
}

/// Dense matrix of a gate program, by applying it to every basis vector.
pub fn circuit_unitary(circuit: &DilationCircuit) -> Result<CMatrix> {
    use rayon::prelude::*;
    let dim = circuit.dim();
    let columns: Vec<CVector> = (0..dim)
        .into_par_iter()
        .map(|col| {
            let mut state = DilatedState {
                amplitudes: CVector::zeros(dim),
                qubits: circuit.qubits,
            };
            state.amplitudes[col] = Complex64::new(1.0, 0.0);
            apply_program(&mut state, Program::Circuit(circuit)).map(|()| state.amplitudes)
        })
        .collect::<Result<_>>()?;
    Ok(CMatrix::from_columns(&columns))
}

/// `min_φ max |a − e^{iφ}b|` with `φ` from the overlap of the two matrices.
pub fn distance_up_to_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

/// Same as [`distance_up_to_phase`] for vectors.
pub fn vector_distance_up_to_phase(a: &CVector, b: &CVector) -> f64 {
    let overlap = b.dotc(a);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

/// Random unit vector for probing large programs.
pub fn random_state(dim: usize, rng: &mut impl Rng) -> CVector {
    let v = CVector::from_fn(dim, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}
