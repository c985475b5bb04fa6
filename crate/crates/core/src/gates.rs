//! Gate programs on `n + 1` qubits.
//!
//! Qubit 0 is the ancilla and maps to the most significant bit of a
//! coordinate index; qubit `k` maps to bit `qubits − 1 − k`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-qubit operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingleQubitOp {
    X,
    H,
    T,
    Tdg,
    /// `[[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]`
    Ry(f64),
    /// `diag(e^{−iθ/2}, e^{iθ/2})`
    Rz(f64),
    /// `diag(1, e^{iφ})`
    Phase(f64),
    Unitary(Mat2),
}

impl SingleQubitOp {
    pub fn matrix(&self) -> Mat2 {
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        match *self {
            SingleQubitOp::X => [[zero, one], [one, zero]],
            SingleQubitOp::H => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            SingleQubitOp::T => [[one, zero], [zero, Complex64::from_polar(1.0, FRAC_PI_4)]],
            SingleQubitOp::Tdg => [[one, zero], [zero, Complex64::from_polar(1.0, -FRAC_PI_4)]],
            SingleQubitOp::Ry(theta) => {
                let (s, co) = (theta / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            SingleQubitOp::Rz(theta) => [
                [Complex64::from_polar(1.0, -theta / 2.0), zero],
                [zero, Complex64::from_polar(1.0, theta / 2.0)],
            ],
            SingleQubitOp::Phase(phi) => [[one, zero], [zero, Complex64::from_polar(1.0, phi)]],
            SingleQubitOp::Unitary(m) => m,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            SingleQubitOp::X => "x",
            SingleQubitOp::H => "h",
            SingleQubitOp::T => "t",
            SingleQubitOp::Tdg => "tdg",
            SingleQubitOp::Ry(_) => "ry",
            SingleQubitOp::Rz(_) => "rz",
            SingleQubitOp::Phase(_) => "p",
            SingleQubitOp::Unitary(_) => "u",
        }
    }

    fn params(&self) -> Vec<f64> {
        match self {
            SingleQubitOp::Ry(a) | SingleQubitOp::Rz(a) | SingleQubitOp::Phase(a) => vec![*a],
            SingleQubitOp::Unitary(m) => m.iter().flatten().flat_map(|z| [z.re, z.im]).collect(),
            _ => Vec::new(),
        }
    }

    fn from_parts(name: &str, params: &[f64]) -> Option<Self> {
        let one = |p: &[f64]| (p.len() == 1).then(|| p[0]);
        Some(match name {
            "x" if params.is_empty() => SingleQubitOp::X,
            "h" if params.is_empty() => SingleQubitOp::H,
            "t" if params.is_empty() => SingleQubitOp::T,
            "tdg" if params.is_empty() => SingleQubitOp::Tdg,
            "ry" => SingleQubitOp::Ry(one(params)?),
            "rz" => SingleQubitOp::Rz(one(params)?),
            "p" => SingleQubitOp::Phase(one(params)?),
            "u" if params.len() == 8 => SingleQubitOp::Unitary([
                [c(params[0], params[1]), c(params[2], params[3])],
                [c(params[4], params[5]), c(params[6], params[7])],
            ]),
            _ => return None,
        })
    }
}

/// One instruction of a gate program.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Single {
        target: usize,
        op: SingleQubitOp,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    /// Pre-expansion multi-controlled gate; each control fires on the given value.
    MultiControlled {
        controls: Vec<(usize, bool)>,
        target: usize,
        op: SingleQubitOp,
    },
    /// Dense block on the listed qubits (first listed = most significant).
    Dense {
        qubits: Vec<usize>,
        matrix: CMatrix,
    },
}

impl Gate {
    pub fn single(target: usize, op: SingleQubitOp) -> Self {
        Gate::Single { target, op }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Single { target, .. } => vec![*target],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::MultiControlled {
                controls, target, ..
            } => controls
                .iter()
                .map(|(q, _)| *q)
                .chain(std::iter::once(*target))
                .collect(),
            Gate::Dense { qubits, .. } => qubits.clone(),
        }
    }

    pub fn is_elementary(&self) -> bool {
        matches!(self, Gate::Single { .. } | Gate::Cnot { .. })
    }
}

/// Elementary gate tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub cnot_count: usize,
    /// Single-qubit gates of any kind.
    pub rotation_count: usize,
    /// Unexpanded multi-controlled gates.
    pub multi_controlled: usize,
    pub dense_blocks: usize,
}

impl GateCounts {
    pub fn of(gates: &[Gate]) -> Self {
        let mut counts = GateCounts::default();
        for g in gates {
            match g {
                Gate::Single { .. } => counts.rotation_count += 1,
                Gate::Cnot { .. } => counts.cnot_count += 1,
                Gate::MultiControlled { .. } => counts.multi_controlled += 1,
                Gate::Dense { .. } => counts.dense_blocks += 1,
            }
        }
        counts
    }

    /// CNOTs plus single-qubit gates.
    pub fn elementary(&self) -> usize {
        self.cnot_count + self.rotation_count
    }
}

/// Ordered gate program realizing a dilation on `qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationCircuit {
    pub qubits: usize,
    pub gates: Vec<Gate>,
    pub counts: GateCounts,
}

impl DilationCircuit {
    pub fn new(qubits: usize, gates: Vec<Gate>) -> Self {
        let counts = GateCounts::of(&gates);
        Self {
            qubits,
            gates,
            counts,
        }
    }

    pub fn empty(qubits: usize) -> Self {
        Self::new(qubits, Vec::new())
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    /// Line-oriented listing: `<name> <qubits...> [<params...>]`, floats with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.qubits);
        for g in &self.gates {
            match g {
                Gate::Single { target, op } => {
                    let _ = write!(out, "{} {}", op.name(), target);
                    for p in op.params() {
                        let _ = write!(out, " {p:.16e}");
                    }
                }
                Gate::Cnot { control, target } => {
                    let _ = write!(out, "cx {control} {target}");
                }
                Gate::MultiControlled {
                    controls,
                    target,
                    op,
                } => {
                    let ctrl: Vec<String> = controls
                        .iter()
                        .map(|(q, v)| if *v { q.to_string() } else { format!("~{q}") })
                        .collect();
                    let _ = write!(out, "mc{} {} {}", op.name(), ctrl.join(","), target);
                    for p in op.params() {
                        let _ = write!(out, " {p:.16e}");
                    }
                }
                Gate::Dense { qubits, matrix } => {
                    let qs: Vec<String> = qubits.iter().map(|q| q.to_string()).collect();
                    let _ = write!(out, "dense {}", qs.join(","));
                    for z in matrix.transpose().iter() {
                        let _ = write!(out, " {:.16e} {:.16e}", z.re, z.im);
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses the listing written by [`DilationCircuit::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Parse(format!("line {}: {msg}", line + 1));
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| bad(0, "missing header"))?;
        let qubits: usize = header
            .strip_prefix("qubits ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad(0, "expected `qubits <n>`"))?;
        let mut gates = Vec::new();
        for (ln, line) in lines {
            let mut tok = line.split_whitespace();
            let name = tok.next().unwrap_or_default();
            let rest: Vec<&str> = tok.collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(ln, "bad number"));
            let idx = |s: &str| s.parse::<usize>().map_err(|_| bad(ln, "bad qubit index"));
            let gate = match name {
                "cx" => {
                    if rest.len() != 2 {
                        return Err(bad(ln, "cx takes two qubits"));
                    }
                    Gate::cnot(idx(rest[0])?, idx(rest[1])?)
                }
                "dense" => {
                    let qs = rest
                        .first()
                        .ok_or_else(|| bad(ln, "dense needs qubits"))?
                        .split(',')
                        .map(idx)
                        .collect::<Result<Vec<_>>>()?;
                    let vals = rest[1..]
                        .iter()
                        .map(|s| num(s))
                        .collect::<Result<Vec<_>>>()?;
                    let size = 1 << qs.len();
                    if vals.len() != 2 * size * size {
                        return Err(bad(ln, "dense block has wrong entry count"));
                    }
                    let matrix = CMatrix::from_row_iterator(
                        size,
                        size,
                        vals.chunks(2).map(|p| c(p[0], p[1])),
                    );
                    Gate::Dense { qubits: qs, matrix }
                }
                n if n.starts_with("mc") => {
                    if rest.len() < 2 {
                        return Err(bad(ln, "multi-controlled gate needs controls and target"));
                    }
                    let controls = rest[0]
                        .split(',')
                        .map(|s| match s.strip_prefix('~') {
                            Some(q) => idx(q).map(|q| (q, false)),
                            None => idx(s).map(|q| (q, true)),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let params = rest[2..]
                        .iter()
                        .map(|s| num(s))
                        .collect::<Result<Vec<_>>>()?;
                    let op = SingleQubitOp::from_parts(&n[2..], &params)
                        .ok_or_else(|| bad(ln, "unknown operation"))?;
                    Gate::MultiControlled {
                        controls,
                        target: idx(rest[1])?,
                        op,
                    }
                }
                n => {
                    let target = idx(rest.first().ok_or_else(|| bad(ln, "missing target"))?)?;
                    let params = rest[1..]
                        .iter()
                        .map(|s| num(s))
                        .collect::<Result<Vec<_>>>()?;
                    let op = SingleQubitOp::from_parts(n, &params)
                        .ok_or_else(|| bad(ln, "unknown gate"))?;
                    Gate::single(target, op)
                }
            };
            if gate.qubits().iter().any(|q| *q >= qubits) {
                return Err(bad(ln, "qubit index out of range"));
            }
            gates.push(gate);
        }
        Ok(Self::new(qubits, gates))
    }
}

/// Product of two 2×2 matrices.
pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}
