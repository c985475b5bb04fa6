//! Exact synthesis into CNOTs and single-qubit gates.
//!
//! Expansion rules for a gate with `m` controls on a register of `q` qubits:
//!
//! * controls that fire on `|0⟩` are conjugated by `X`;
//! * `C^m R_y(θ)` / `C^m R_z(θ)` = `R(θ/2) · C^m X · R(−θ/2) · C^m X` on the target;
//!   with no idle qubit, the last control is peeled off first so that every
//!   `C^k X` left has one idle qubit, which keeps the rotation linear in `m`;
//! * `C¹ U` uses the ZYZ form `U = e^{iα} R_z(β) R_y(γ) R_z(δ)`: two CNOTs, a
//!   phase on the control and the three target factors;
//! * `C² X` is the exact six-CNOT Toffoli;
//! * `C^m X` with at least `m − 2` idle qubits: Toffoli V-chain, `4(m − 2)` Toffolis;
//! * `C^m X` with one idle qubit: split the controls in two halves, four smaller gates;
//! * `C^m U` otherwise: `V = √U`,
//!   `C^m U = C^{m−1}V · C^{m−1}X · C¹V† · C^{m−1}X · C¹V`, which is `O(m²)` overall.
//!
//! Angles with magnitude below [`ANGLE_EPS`] are dropped.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::circuit::TwoLevelRotation;
use crate::gates::{mat2_adjoint, DilationCircuit, Gate, Mat2, SingleQubitOp};

/// Rotations and phases smaller than this are elided.
pub const ANGLE_EPS: f64 = 1e-15;

/// Reduces an angle to `(−period/2, period/2]`.
fn wrap(angle: f64, period: f64) -> f64 {
    let r = angle.rem_euclid(period);
    if r > period / 2.0 {
        r - period
    } else {
        r
    }
}

fn push_single(out: &mut Vec<Gate>, target: usize, op: SingleQubitOp) {
    let negligible = match op {
        // Ry and Rz have period 4π; ±2π is −I, a global phase for an unconditional gate
        SingleQubitOp::Ry(a) | SingleQubitOp::Rz(a) => wrap(a, 2.0 * PI).abs() < ANGLE_EPS,
        SingleQubitOp::Phase(a) => wrap(a, 2.0 * PI).abs() < ANGLE_EPS,
        _ => false,
    };
    if !negligible {
        out.push(Gate::single(target, op));
    }
}

/// `U = e^{iα} R_z(β) R_y(γ) R_z(δ)`.
pub fn zyz_decompose(u: &Mat2) -> (f64, f64, f64, f64) {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let alpha = det.arg() / 2.0;
    let unphase = Complex64::from_polar(1.0, -alpha);
    let a = u[0][0] * unphase;
    let b = u[1][0] * unphase;
    let gamma = 2.0 * b.norm().atan2(a.norm());
    let sum = if a.norm() > 1e-300 {
        -2.0 * a.arg()
    } else {
        0.0
    };
    let diff = if b.norm() > 1e-300 {
        2.0 * b.arg()
    } else {
        0.0
    };
    let beta = (sum + diff) / 2.0;
    let delta = (sum - diff) / 2.0;
    (alpha, beta, gamma, delta)
}

/// Principal square root of a 2×2 unitary.
pub fn sqrt_unitary(u: &Mat2) -> Mat2 {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let tr = u[0][0] + u[1][1];
    let s0 = det.sqrt();
    let s = if (tr + s0 * 2.0).norm() >= (tr - s0 * 2.0).norm() {
        s0
    } else {
        -s0
    };
    let t = (tr + s * 2.0).sqrt();
    [
        [(u[0][0] + s) / t, u[0][1] / t],
        [u[1][0] / t, (u[1][1] + s) / t],
    ]
}

/// Emits a singly controlled `U`.
pub fn controlled_u(control: usize, target: usize, u: &Mat2, out: &mut Vec<Gate>) {
    let (alpha, beta, gamma, delta) = zyz_decompose(u);
    // C
    push_single(out, target, SingleQubitOp::Rz((delta - beta) / 2.0));
    out.push(Gate::cnot(control, target));
    // B = Ry(−γ/2) Rz(−(δ+β)/2)
    push_single(out, target, SingleQubitOp::Rz(-(delta + beta) / 2.0));
    push_single(out, target, SingleQubitOp::Ry(-gamma / 2.0));
    out.push(Gate::cnot(control, target));
    // A = Rz(β) Ry(γ/2)
    push_single(out, target, SingleQubitOp::Ry(gamma / 2.0));
    push_single(out, target, SingleQubitOp::Rz(beta));
    push_single(out, control, SingleQubitOp::Phase(alpha));
}

/// Exact Toffoli from six CNOTs, `H`, `T` and `T†`.
pub fn toffoli(c1: usize, c2: usize, target: usize, out: &mut Vec<Gate>) {
    use SingleQubitOp::{Tdg, H, T};
    out.push(Gate::single(target, H));
    out.push(Gate::cnot(c2, target));
    out.push(Gate::single(target, Tdg));
    out.push(Gate::cnot(c1, target));
    out.push(Gate::single(target, T));
    out.push(Gate::cnot(c2, target));
    out.push(Gate::single(target, Tdg));
    out.push(Gate::cnot(c1, target));
    out.push(Gate::single(c2, T));
    out.push(Gate::single(target, T));
    out.push(Gate::single(target, H));
    out.push(Gate::cnot(c1, c2));
    out.push(Gate::single(c1, T));
    out.push(Gate::single(c2, Tdg));
    out.push(Gate::cnot(c1, c2));
}

/// `C^m X` on `controls → target`; `idle` qubits may hold arbitrary data and are restored.
pub fn multi_controlled_x(controls: &[usize], target: usize, idle: &[usize], out: &mut Vec<Gate>) {
    let m = controls.len();
    match m {
        0 => out.push(Gate::single(target, SingleQubitOp::X)),
        1 => out.push(Gate::cnot(controls[0], target)),
        2 => toffoli(controls[0], controls[1], target, out),
        _ if idle.len() >= m - 2 => v_chain(controls, target, &idle[..m - 2], out),
        _ if !idle.is_empty() => {
            let ancilla = idle[0];
            let rest_idle = &idle[1..];
            let split = m.div_ceil(2);
            let (g1, g2) = controls.split_at(split);
            let mut g2a: Vec<usize> = g2.to_vec();
            g2a.push(ancilla);
            let idle1: Vec<usize> = g2
                .iter()
                .copied()
                .chain(std::iter::once(target))
                .chain(rest_idle.iter().copied())
                .collect();
            let idle2: Vec<usize> = g1
                .iter()
                .copied()
                .chain(rest_idle.iter().copied())
                .collect();
            for _ in 0..2 {
                multi_controlled_x(g1, ancilla, &idle1, out);
                multi_controlled_x(&g2a, target, &idle2, out);
            }
        }
        _ => {
            let x = SingleQubitOp::X.matrix();
            multi_controlled_u(controls, target, &x, idle, out);
        }
    }
}

fn v_chain(controls: &[usize], target: usize, ancillas: &[usize], out: &mut Vec<Gate>) {
    let m = controls.len();
    let step_target = |i: usize| if i == m - 1 { target } else { ancillas[i - 1] };
    let step =
        |i: usize, out: &mut Vec<Gate>| toffoli(controls[i], ancillas[i - 2], step_target(i), out);
    let base = |out: &mut Vec<Gate>| toffoli(controls[0], controls[1], ancillas[0], out);

    for i in (2..m).rev() {
        step(i, out);
    }
    base(out);
    for i in 2..m {
        step(i, out);
    }
    for i in (2..m - 1).rev() {
        step(i, out);
    }
    base(out);
    for i in 2..m - 1 {
        step(i, out);
    }
}

/// `C^m U` for an arbitrary 2×2 unitary.
pub fn multi_controlled_u(
    controls: &[usize],
    target: usize,
    u: &Mat2,
    idle: &[usize],
    out: &mut Vec<Gate>,
) {
    match controls.len() {
        0 => push_single(out, target, SingleQubitOp::Unitary(*u)),
        1 => controlled_u(controls[0], target, u, out),
        m => {
            let v = sqrt_unitary(u);
            let vdg = mat2_adjoint(&v);
            let last = controls[m - 1];
            let rest = &controls[..m - 1];
            let mut x_idle = vec![target];
            x_idle.extend_from_slice(idle);
            controlled_u(last, target, &v, out);
            multi_controlled_x(rest, last, &x_idle, out);
            controlled_u(last, target, &vdg, out);
            multi_controlled_x(rest, last, &x_idle, out);
            let mut v_idle = vec![last];
            v_idle.extend_from_slice(idle);
            multi_controlled_u(rest, target, &v, &v_idle, out);
        }
    }
}

/// `C^m R(θ)` for `R` in `{R_y, R_z}`.
fn multi_controlled_rotation(
    controls: &[usize],
    target: usize,
    op: SingleQubitOp,
    idle: &[usize],
    out: &mut Vec<Gate>,
) {
    let (half, neg_half) = match op {
        SingleQubitOp::Ry(a) => (SingleQubitOp::Ry(a / 2.0), SingleQubitOp::Ry(-a / 2.0)),
        SingleQubitOp::Rz(a) => (SingleQubitOp::Rz(a / 2.0), SingleQubitOp::Rz(-a / 2.0)),
        _ => unreachable!("only axis rotations take this path"),
    };
    if controls.is_empty() {
        push_single(out, target, op);
        return;
    }
    if idle.is_empty() && controls.len() > 1 {
        // R(θ/2) when all but the last fire, R(∓θ/2) on last ⊕ AND(rest), R(θ/2) on last;
        // every sub-gate now has one idle qubit
        let (last, rest) = controls.split_last().expect("non-empty");
        multi_controlled_rotation(rest, target, half, &[*last], out);
        multi_controlled_x(rest, *last, &[target], out);
        multi_controlled_rotation(&[*last], target, neg_half, &[], out);
        multi_controlled_x(rest, *last, &[target], out);
        multi_controlled_rotation(&[*last], target, half, &[], out);
        return;
    }
    // time order: X-ladder, R(−θ/2), X-ladder, R(θ/2)
    multi_controlled_x(controls, target, idle, out);
    push_single(out, target, neg_half);
    multi_controlled_x(controls, target, idle, out);
    push_single(out, target, half);
}

/// Lowers one gate to CNOTs and single-qubit gates on a `qubits`-qubit register.
pub fn expand_gate(gate: &Gate, qubits: usize, out: &mut Vec<Gate>) {
    match gate {
        Gate::MultiControlled {
            controls,
            target,
            op,
        } => {
            let negligible = match op {
                SingleQubitOp::Ry(a) | SingleQubitOp::Rz(a) => wrap(*a, 4.0 * PI).abs() < ANGLE_EPS,
                SingleQubitOp::Phase(a) => wrap(*a, 2.0 * PI).abs() < ANGLE_EPS,
                _ => false,
            };
            if negligible {
                return;
            }
            let flips: Vec<usize> = controls
                .iter()
                .filter(|(_, v)| !v)
                .map(|(q, _)| *q)
                .collect();
            let ctrl: Vec<usize> = controls.iter().map(|(q, _)| *q).collect();
            let idle: Vec<usize> = (0..qubits)
                .filter(|q| *q != *target && !ctrl.contains(q))
                .collect();
            for q in &flips {
                out.push(Gate::single(*q, SingleQubitOp::X));
            }
            match op {
                SingleQubitOp::Ry(_) | SingleQubitOp::Rz(_) => {
                    multi_controlled_rotation(&ctrl, *target, *op, &idle, out)
                }
                SingleQubitOp::X => multi_controlled_x(&ctrl, *target, &idle, out),
                other => multi_controlled_u(&ctrl, *target, &other.matrix(), &idle, out),
            }
            for q in &flips {
                out.push(Gate::single(*q, SingleQubitOp::X));
            }
        }
        other => out.push(other.clone()),
    }
}

/// Removes adjacent self-inverse pairs (`X X`, `H H`, `CX CX`) on the same wires.
pub fn cancel_adjacent_pairs(gates: Vec<Gate>) -> Vec<Gate> {
    let self_inverse = |g: &Gate| match g {
        Gate::Single { op, .. } => matches!(op, SingleQubitOp::X | SingleQubitOp::H),
        Gate::Cnot { .. } => true,
        _ => false,
    };
    let mut out: Vec<Gate> = Vec::with_capacity(gates.len());
    for g in gates {
        if self_inverse(&g) {
            let wires = g.qubits();
            // last gate touching any of these wires
            let blocker = out
                .iter()
                .rposition(|h| h.qubits().iter().any(|q| wires.contains(q)));
            if let Some(pos) = blocker {
                if out[pos] == g {
                    out.remove(pos);
                    continue;
                }
            }
        }
        out.push(g);
    }
    out
}

/// Two-level rotation as CNOT conjugations around one fully controlled `R_y`.
pub fn two_level_gates(rotation: &TwoLevelRotation, qubits: usize) -> Vec<Gate> {
    let TwoLevelRotation { a, b, angle } = *rotation;
    let diff = a ^ b;
    let qubit_of = |bit: u32| qubits - 1 - bit as usize;
    // a < b, so the most significant differing bit is 0 in a and 1 in b
    let pivot_bit = usize::BITS - 1 - diff.leading_zeros();
    let pivot = qubit_of(pivot_bit);
    let others: Vec<usize> = (0..usize::BITS)
        .filter(|bit| *bit != pivot_bit && diff >> bit & 1 == 1)
        .map(qubit_of)
        .collect();

    let mut gates = Vec::new();
    for q in &others {
        gates.push(Gate::cnot(pivot, *q));
    }
    // after the CNOTs, b has become a with the pivot bit set
    let controls: Vec<(usize, bool)> = (0..qubits)
        .filter(|q| *q != pivot)
        .map(|q| (q, a >> (qubits - 1 - q) & 1 == 1))
        .collect();
    gates.push(Gate::MultiControlled {
        controls,
        target: pivot,
        op: SingleQubitOp::Ry(angle),
    });
    for q in others.iter().rev() {
        gates.push(Gate::cnot(pivot, *q));
    }
    gates
}

/// Fully expanded circuit for a product of two-level rotations.
pub fn synthesize_rotations(rotations: &[TwoLevelRotation], qubits: usize) -> DilationCircuit {
    let mut logical = Vec::new();
    for r in rotations {
        if wrap(r.angle, 4.0 * PI).abs() < ANGLE_EPS {
            continue;
        }
        logical.extend(two_level_gates(r, qubits));
    }
    expand(&logical, qubits)
}

/// Lowers every gate and cancels adjacent inverse pairs.
pub fn expand(logical: &[Gate], qubits: usize) -> DilationCircuit {
    let mut gates = Vec::new();
    for g in logical {
        expand_gate(g, qubits, &mut gates);
    }
    DilationCircuit::new(qubits, cancel_adjacent_pairs(gates))
}

/// In-place fast Walsh–Hadamard transform (unnormalized).
fn walsh_hadamard(values: &mut [f64]) {
    let n = values.len();
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let (x, y) = (values[i], values[i + h]);
                values[i] = x + y;
                values[i + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// A diagonal unitary as parity ladders of CNOTs around `R_z` rotations.
///
/// Returns the circuit and the dropped global phase.
pub fn synthesize_diagonal_phases(phases: &[f64], qubits: usize) -> (DilationCircuit, f64) {
    let dim = phases.len();
    assert_eq!(dim, 1 << qubits, "diagonal length must be 2^qubits");
    // φ(x) = Σ_S c_S (−1)^{S·x}
    let mut coeffs = phases.to_vec();
    walsh_hadamard(&mut coeffs);
    for c in coeffs.iter_mut() {
        *c /= dim as f64;
    }
    let global_phase = coeffs[0];
    let qubit_of = |bit: usize| qubits - 1 - bit;

    let mut gates = Vec::new();
    for top in 0..qubits {
        let high = 1usize << top;
        let target = qubit_of(top);
        let mut parity = 0usize;
        for k in 0..high {
            let lower = k ^ (k >> 1);
            let coeff = coeffs[high | lower];
            if coeff.abs() < ANGLE_EPS {
                continue;
            }
            let change = parity ^ lower;
            for bit in (0..top).filter(|b| change >> b & 1 == 1) {
                gates.push(Gate::cnot(qubit_of(bit), target));
            }
            parity = lower;
            // Rz(θ) contributes e^{−iθ/2·(−1)^p}; we need e^{i c (−1)^p}
            gates.push(Gate::single(target, SingleQubitOp::Rz(-2.0 * coeff)));
        }
        for bit in (0..top).filter(|b| parity >> b & 1 == 1) {
            gates.push(Gate::cnot(qubit_of(bit), target));
        }
    }
    (DilationCircuit::new(qubits, gates), global_phase)
}

/// Synthesizes `diag(entries)` for unit-modulus entries, up to global phase.
pub fn synthesize_diagonal(entries: &[Complex64]) -> DilationCircuit {
    let qubits = entries.len().trailing_zeros() as usize;
    let phases: Vec<f64> = entries.iter().map(|z| z.arg()).collect();
    synthesize_diagonal_phases(&phases, qubits).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{circuit_unitary, distance_up_to_phase};
    use crate::gates::mat2_mul;
    use crate::linalg::CMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_unitary(rng: &mut impl Rng) -> Mat2 {
        let (a, b, g, d) = (
            rng.random::<f64>() * 6.0,
            rng.random::<f64>() * 6.0,
            rng.random::<f64>() * 3.0,
            rng.random::<f64>() * 6.0,
        );
        let m = mat2_mul(
            &mat2_mul(
                &SingleQubitOp::Rz(b).matrix(),
                &SingleQubitOp::Ry(g).matrix(),
            ),
            &SingleQubitOp::Rz(d).matrix(),
        );
        let p = Complex64::from_polar(1.0, a);
        [[m[0][0] * p, m[0][1] * p], [m[1][0] * p, m[1][1] * p]]
    }

    /// Reference matrix of a controlled single-qubit operation, built entry by entry.
    fn reference(qubits: usize, controls: &[(usize, bool)], target: usize, u: &Mat2) -> CMatrix {
        let dim = 1 << qubits;
        let bit = |x: usize, q: usize| x >> (qubits - 1 - q) & 1 == 1;
        CMatrix::from_fn(dim, dim, |row, col| {
            let fires = controls.iter().all(|(q, v)| bit(col, *q) == *v);
            let rest_equal = (0..qubits)
                .filter(|q| *q != target)
                .all(|q| bit(row, q) == bit(col, q));
            if !rest_equal {
                return c(0.0, 0.0);
            }
            if fires {
                u[bit(row, target) as usize][bit(col, target) as usize]
            } else if row == col {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    #[test]
    fn zyz_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let u = random_unitary(&mut rng);
            let (a, b, g, d) = zyz_decompose(&u);
            let m = mat2_mul(
                &mat2_mul(
                    &SingleQubitOp::Rz(b).matrix(),
                    &SingleQubitOp::Ry(g).matrix(),
                ),
                &SingleQubitOp::Rz(d).matrix(),
            );
            let p = Complex64::from_polar(1.0, a);
            for i in 0..2 {
                for j in 0..2 {
                    assert!((m[i][j] * p - u[i][j]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut cases = vec![
            SingleQubitOp::X.matrix(),
            [[c(-1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        ];
        cases.extend((0..30).map(|_| random_unitary(&mut rng)));
        for u in cases {
            let v = sqrt_unitary(&u);
            let vv = mat2_mul(&v, &v);
            for i in 0..2 {
                for j in 0..2 {
                    assert!((vv[i][j] - u[i][j]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn multi_controlled_gates_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for qubits in 2..=6 {
            for m in 1..qubits {
                let target = rng.random_range(0..qubits);
                let mut pool: Vec<usize> = (0..qubits).filter(|q| *q != target).collect();
                // shuffle deterministically
                for i in (1..pool.len()).rev() {
                    pool.swap(i, rng.random_range(0..=i));
                }
                let controls: Vec<(usize, bool)> = pool[..m]
                    .iter()
                    .map(|q| (*q, rng.random::<bool>()))
                    .collect();
                for op in [
                    SingleQubitOp::X,
                    SingleQubitOp::Ry(rng.random::<f64>() * 6.0),
                    SingleQubitOp::Rz(rng.random::<f64>() * 6.0),
                    SingleQubitOp::Unitary(random_unitary(&mut rng)),
                ] {
                    let gate = Gate::MultiControlled {
                        controls: controls.clone(),
                        target,
                        op,
                    };
                    let circuit = expand(&[gate], qubits);
                    assert!(circuit.gates.iter().all(Gate::is_elementary));
                    let got = circuit_unitary(&circuit).unwrap();
                    let want = reference(qubits, &controls, target, &op.matrix());
                    let err = crate::linalg::max_abs(&(got - want));
                    assert!(err < 1e-10, "q={qubits} m={m} op={op:?} err={err}");
                }
            }
        }
    }

    #[test]
    fn v_chain_and_split_restore_dirty_qubits() {
        // exact equality (not up to phase) proves idle qubits are restored for every input
        for (qubits, m) in [(7, 4), (6, 4), (5, 3), (8, 6)] {
            let controls: Vec<usize> = (0..m).collect();
            let target = m;
            let idle: Vec<usize> = (m + 1..qubits).collect();
            let mut gates = Vec::new();
            multi_controlled_x(&controls, target, &idle, &mut gates);
            let got = circuit_unitary(&DilationCircuit::new(qubits, gates)).unwrap();
            let cs: Vec<(usize, bool)> = controls.iter().map(|q| (*q, true)).collect();
            let want = reference(qubits, &cs, target, &SingleQubitOp::X.matrix());
            assert!(crate::linalg::max_abs(&(got - want)) < 1e-12);
        }
    }

    #[test]
    fn two_level_rotation_one_bit_apart_has_no_relay() {
        let r = TwoLevelRotation::new(0b0101, 0b1101, 0.9);
        let gates = two_level_gates(&r, 4);
        assert_eq!(gates.len(), 1);
        assert!(matches!(gates[0], Gate::MultiControlled { target: 0, .. }));
    }

    fn two_level_reference(r: &TwoLevelRotation, dim: usize) -> CMatrix {
        let mut m = CMatrix::identity(dim, dim);
        let (s, co) = (r.angle / 2.0).sin_cos();
        m[(r.a, r.a)] = c(co, 0.0);
        m[(r.b, r.b)] = c(co, 0.0);
        m[(r.a, r.b)] = c(-s, 0.0);
        m[(r.b, r.a)] = c(s, 0.0);
        m
    }

    #[test]
    fn two_level_rotation_three_bits_apart() {
        let r = TwoLevelRotation::new(0b00110, 0b10011, 1.3);
        let logical = two_level_gates(&r, 5);
        assert_eq!(
            logical
                .iter()
                .filter(|g| matches!(g, Gate::Cnot { .. }))
                .count(),
            4
        );
        let circuit = synthesize_rotations(&[r], 5);
        let got = circuit_unitary(&circuit).unwrap();
        assert!(distance_up_to_phase(&got, &two_level_reference(&r, 32)) < 1e-10);
    }

    #[test]
    fn zero_angle_rotations_are_elided() {
        let r = TwoLevelRotation::new(1, 6, 0.0);
        assert_eq!(synthesize_rotations(&[r], 3).counts.elementary(), 0);
    }

    #[test]
    fn diagonal_constant_phase_needs_no_gates() {
        let entries = vec![Complex64::from_polar(1.0, 0.37); 16];
        assert_eq!(synthesize_diagonal(&entries).gates.len(), 0);
    }

    #[test]
    fn diagonal_single_qubit_marginal_is_one_rz() {
        // phase depends only on qubit 2 of 4
        let entries: Vec<Complex64> = (0..16)
            .map(|x| Complex64::from_polar(1.0, if x >> 1 & 1 == 1 { 0.8 } else { -0.3 }))
            .collect();
        let circuit = synthesize_diagonal(&entries);
        assert_eq!(circuit.counts.cnot_count, 0);
        assert_eq!(circuit.counts.rotation_count, 1);
        assert!(matches!(
            circuit.gates[0],
            Gate::Single {
                target: 2,
                op: SingleQubitOp::Rz(_)
            }
        ));
    }

    #[test]
    fn random_diagonal_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for qubits in 1..=6 {
            let entries: Vec<Complex64> = (0..1 << qubits)
                .map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * 6.0 - 3.0))
                .collect();
            let circuit = synthesize_diagonal(&entries);
            let got = circuit_unitary(&circuit).unwrap();
            let want = CMatrix::from_diagonal(&crate::linalg::CVector::from_row_slice(&entries));
            assert!(distance_up_to_phase(&got, &want) < 1e-10);
            assert!(circuit.counts.elementary() <= 1 << (qubits + 1));
        }
    }

    #[test]
    fn adjacent_pairs_cancel_only_when_nothing_intervenes() {
        let gates = vec![
            Gate::single(0, SingleQubitOp::X),
            Gate::single(1, SingleQubitOp::H),
            Gate::single(0, SingleQubitOp::X),
            Gate::cnot(1, 2),
            Gate::single(2, SingleQubitOp::Rz(0.3)),
            Gate::cnot(1, 2),
        ];
        let out = cancel_adjacent_pairs(gates);
        assert_eq!(out.len(), 4);
        assert_eq!(out[0], Gate::single(1, SingleQubitOp::H));
    }
}
