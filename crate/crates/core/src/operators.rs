//! One-dimensional transverse Maxwell system with auxiliary pole fields.
//!
//! Each cell carries `E_y`, `H_z` and, per pole, a polarization coordinate
//! (omitted for Drude poles) and its rate. After the Dyson weighting the
//! lossless generator is Hermitian and the losses sit on a diagonal acting
//! only on the rate coordinates, which form the trailing physical block:
//!
//! ```text
//! [ E_0..E_{N-1} | H_0..H_{N-1} | P blocks | P_t blocks | padding ]
//! ```

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::medium::{validate_medium, Branch, MediumSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Uniform 1D grid with zero tangential fields beyond both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub cells: usize,
    pub spacing: f64,
}

impl GridSpec {
    pub fn new(cells: usize, spacing: f64) -> Result<Self> {
        let grid = Self { cells, spacing };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 cells, got {}",
                self.cells
            )));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "spacing must be positive, got {}",
                self.spacing
            )));
        }
        Ok(())
    }
}

/// One pole position shared by every cell of the layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoleSlot {
    pub branch: Branch,
    pub pole: usize,
    pub drude: bool,
}

/// What a coordinate of the padded state stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    Electric { cell: usize },
    Magnetic { cell: usize },
    Polarization { slot: usize, cell: usize },
    PolarizationRate { slot: usize, cell: usize },
    Padding,
}

/// Index map from physical blocks to the padded `2^n` coordinate space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateLayout {
    pub cells: usize,
    /// Components per cell before padding.
    pub field_dim: usize,
    pub d_physical: usize,
    /// Padded dimension `2^n`.
    pub dim: usize,
    pub qubits: usize,
    /// Number of dissipative (rate) coordinates.
    pub dissipative: usize,
    pub slots: Vec<PoleSlot>,
    polarization_offset: Vec<Option<usize>>,
    rate_offset: Vec<usize>,
}

impl StateLayout {
    pub fn e_index(&self, cell: usize) -> usize {
        cell
    }

    pub fn h_index(&self, cell: usize) -> usize {
        self.cells + cell
    }

    pub fn field_index(&self, branch: Branch, cell: usize) -> usize {
        match branch {
            Branch::Electric => self.e_index(cell),
            Branch::Magnetic => self.h_index(cell),
        }
    }

    /// Polarization coordinate of `slot` at `cell`; `None` for Drude poles.
    pub fn polarization_index(&self, slot: usize, cell: usize) -> Option<usize> {
        self.polarization_offset[slot].map(|off| off + cell)
    }

    pub fn rate_index(&self, slot: usize, cell: usize) -> usize {
        self.rate_offset[slot] + cell
    }

    /// The `u = (E, H)` block.
    pub fn field_range(&self) -> Range<usize> {
        0..2 * self.cells
    }

    /// The trailing physical block on which the dissipator may act.
    pub fn dissipative_range(&self) -> Range<usize> {
        self.d_physical - self.dissipative..self.d_physical
    }

    pub fn padding_range(&self) -> Range<usize> {
        self.d_physical..self.dim
    }

    pub fn coordinate(&self, index: usize) -> Coordinate {
        if index >= self.d_physical {
            return Coordinate::Padding;
        }
        if index < self.cells {
            return Coordinate::Electric { cell: index };
        }
        if index < 2 * self.cells {
            return Coordinate::Magnetic {
                cell: index - self.cells,
            };
        }
        for (slot, off) in self.rate_offset.iter().enumerate() {
            if (*off..off + self.cells).contains(&index) {
                return Coordinate::PolarizationRate {
                    slot,
                    cell: index - off,
                };
            }
        }
        for (slot, off) in self.polarization_offset.iter().enumerate() {
            if let Some(off) = off {
                if (*off..off + self.cells).contains(&index) {
                    return Coordinate::Polarization {
                        slot,
                        cell: index - off,
                    };
                }
            }
        }
        unreachable!("index {index} inside the physical range but unassigned")
    }
}

/// Smallest `n` with `2^n >= value` (at least 1).
pub fn qubits_for(value: usize) -> usize {
    let mut n = 1;
    while (1usize << n) < value {
        n += 1;
    }
    n
}

/// Builds the padded layout for a grid filled with media shaped like `medium`.
pub fn build_layout(grid: &GridSpec, medium: &MediumSpec) -> Result<StateLayout> {
    grid.validate()?;
    validate_medium(medium)?;
    let cells = grid.cells;

    let slots: Vec<PoleSlot> = [Branch::Electric, Branch::Magnetic]
        .into_iter()
        .flat_map(|branch| {
            medium
                .poles(branch)
                .iter()
                .enumerate()
                .map(move |(pole, p)| PoleSlot {
                    branch,
                    pole,
                    drude: p.is_drude(),
                })
        })
        .collect();

    let mut next = 2 * cells;
    let mut polarization_offset = Vec::with_capacity(slots.len());
    for slot in &slots {
        if slot.drude {
            polarization_offset.push(None);
        } else {
            polarization_offset.push(Some(next));
            next += cells;
        }
    }
    let mut rate_offset = Vec::with_capacity(slots.len());
    for _ in &slots {
        rate_offset.push(next);
        next += cells;
    }

    let d_physical = next;
    let qubits = qubits_for(d_physical);
    let dissipative = slots.len() * cells;
    Ok(StateLayout {
        cells,
        field_dim: d_physical / cells,
        d_physical,
        dim: 1 << qubits,
        qubits,
        dissipative,
        slots,
        polarization_offset,
        rate_offset,
    })
}

/// Row-compressed sparse complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds `value` to entry `(row, col)`.
    pub fn add(&mut self, row: usize, col: usize, value: Complex64) {
        if let Some(entry) = self.rows[row].iter_mut().find(|(c, _)| *c == col) {
            entry.1 += value;
        } else {
            self.rows[row].push((col, value));
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.rows[row]
            .iter()
            .find(|(c, _)| *c == col)
            .map(|(_, v)| *v)
            .unwrap_or_default()
    }

    pub fn row(&self, row: usize) -> &[(usize, Complex64)] {
        &self.rows[row]
    }

    pub fn mul_vec(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_iterator(
            self.dim,
            self.rows
                .iter()
                .map(|row| row.iter().map(|(c, v)| v * x[*c]).sum::<Complex64>()),
        )
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                m[(r, *c)] += *v;
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// `max |A - A†|` over stored entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                worst = worst.max((v - self.get(*c, r).conj()).norm());
            }
        }
        worst
    }
}

/// Lossless Hermitian generator and diagonal dissipator.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorPair {
    pub d0: SparseMatrix,
    /// Diagonal of the dissipator: the doubled damping `2γ` on rate coordinates.
    pub ddiss: DVector<f64>,
    /// Coordinates the dissipator may act on (the rate block).
    pub dissipative: Range<usize>,
}

impl GeneratorPair {
    pub fn dim(&self) -> usize {
        self.ddiss.len()
    }

    /// `D₀ − iD_diss` as a dense matrix.
    pub fn full_generator(&self) -> DMatrix<Complex64> {
        let mut m = self.d0.to_dense();
        for (q, g) in self.ddiss.iter().enumerate() {
            m[(q, q)] -= I * *g;
        }
        m
    }
}

/// Centered-difference derivative with zero ghost values; exactly antisymmetric.
pub fn difference_matrix(cells: usize, spacing: f64) -> DMatrix<f64> {
    let h = 1.0 / (2.0 * spacing);
    DMatrix::from_fn(cells, cells, |r, c| {
        if c == r + 1 {
            h
        } else if r == c + 1 {
            -h
        } else {
            0.0
        }
    })
}

/// Checks that every cell shares the layout's pole structure and vacuum constants.
pub fn check_uniform(layout: &StateLayout, media: &[MediumSpec]) -> Result<()> {
    if media.len() != layout.cells {
        return Err(Error::LayoutMismatch(format!(
            "{} media for {} cells",
            media.len(),
            layout.cells
        )));
    }
    let first = &media[0];
    for (cell, m) in media.iter().enumerate() {
        validate_medium(m)?;
        if m.eps0 != first.eps0 || m.mu0 != first.mu0 {
            return Err(Error::LayoutMismatch(format!(
                "cell {cell} has different vacuum constants"
            )));
        }
        for (s, slot) in layout.slots.iter().enumerate() {
            match m.poles(slot.branch).get(slot.pole) {
                Some(p) if p.is_drude() == slot.drude => {}
                Some(_) => {
                    return Err(Error::LayoutMismatch(format!(
                        "cell {cell} slot {s}: Drude/Lorentz character differs"
                    )))
                }
                None => {
                    return Err(Error::LayoutMismatch(format!(
                        "cell {cell} lacks {} pole {}",
                        slot.branch.name(),
                        slot.pole
                    )))
                }
            }
        }
        if m.n_electric() + m.n_magnetic() != layout.slots.len() {
            return Err(Error::LayoutMismatch(format!(
                "cell {cell} has {} poles, layout has {}",
                m.n_electric() + m.n_magnetic(),
                layout.slots.len()
            )));
        }
    }
    Ok(())
}

fn vacuum_weight(medium: &MediumSpec, branch: Branch) -> f64 {
    match branch {
        Branch::Electric => medium.eps0,
        Branch::Magnetic => medium.mu0,
    }
}

/// Assembles `D₀` and `D_diss` for per-cell media.
pub fn build_generators(
    layout: &StateLayout,
    grid: &GridSpec,
    media: &[MediumSpec],
) -> Result<GeneratorPair> {
    check_uniform(layout, media)?;
    let dim = layout.dim;
    let mut d0 = SparseMatrix::zeros(dim);
    let mut ddiss = DVector::zeros(dim);

    let eps0 = media[0].eps0;
    let mu0 = media[0].mu0;
    let speed = 1.0 / (eps0 * mu0).sqrt();
    let diff = difference_matrix(layout.cells, grid.spacing);
    for r in 0..layout.cells {
        for c in 0..layout.cells {
            let s = diff[(r, c)];
            if s != 0.0 {
                let v = -I * speed * s;
                d0.add(layout.e_index(r), layout.h_index(c), v);
                d0.add(layout.h_index(r), layout.e_index(c), v);
            }
        }
    }

    for (s, slot) in layout.slots.iter().enumerate() {
        for (cell, medium) in media.iter().enumerate() {
            let pole = medium.poles(slot.branch)[slot.pole];
            let field = layout.field_index(slot.branch, cell);
            let rate = layout.rate_index(s, cell);
            d0.add(field, rate, -I * pole.big_omega);
            d0.add(rate, field, I * pole.big_omega);
            if let Some(pol) = layout.polarization_index(s, cell) {
                d0.add(pol, rate, I * pole.resonance);
                d0.add(rate, pol, -I * pole.resonance);
            }
            ddiss[rate] = 2.0 * pole.damping;
        }
    }

    Ok(GeneratorPair {
        d0,
        ddiss,
        dissipative: layout.dissipative_range(),
    })
}

/// Normalized state in the padded coordinate space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: DVector<Complex64>,
    /// Energy `E₀` of the encoded fields (J, or normalized units).
    pub norm_scale: f64,
}

impl StateVector {
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// Dyson-weights `(E, H)`, zeroes every auxiliary coordinate and normalizes.
pub fn encode_initial_state(
    e_field: &[f64],
    h_field: &[f64],
    layout: &StateLayout,
    grid: &GridSpec,
    medium: &MediumSpec,
) -> Result<StateVector> {
    for len in [e_field.len(), h_field.len()] {
        if len != layout.cells {
            return Err(Error::DimensionMismatch {
                expected: layout.cells,
                got: len,
            });
        }
    }
    let mut amplitudes = DVector::zeros(layout.dim);
    let (se, sm) = (medium.eps0.sqrt(), medium.mu0.sqrt());
    for cell in 0..layout.cells {
        amplitudes[layout.e_index(cell)] = Complex64::new(se * e_field[cell], 0.0);
        amplitudes[layout.h_index(cell)] = Complex64::new(sm * h_field[cell], 0.0);
    }
    let sum_sq = amplitudes.norm_squared();
    if sum_sq == 0.0 {
        return Err(Error::ZeroField);
    }
    amplitudes.unscale_mut(sum_sq.sqrt());
    Ok(StateVector {
        amplitudes,
        norm_scale: sum_sq * grid.spacing,
    })
}

/// Energies and recovered polarization/magnetization of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct Observables {
    pub total_energy: f64,
    pub field_energy: f64,
    /// Polarization per cell from the non-Drude electric poles.
    pub polarization: Vec<f64>,
    /// Magnetization per cell from the non-Drude magnetic poles.
    pub magnetization: Vec<f64>,
}

/// Energies of `psi` (which need not be unit norm) and the fields `P`, `M`.
pub fn observables(
    psi: &StateVector,
    layout: &StateLayout,
    grid: &GridSpec,
    media: &[MediumSpec],
) -> Observables {
    let amps = &psi.amplitudes;
    let total_energy = 0.5 * amps.norm_squared() * psi.norm_scale;
    let field_energy = 0.5
        * layout
            .field_range()
            .map(|q| amps[q].norm_sqr())
            .sum::<f64>()
        * psi.norm_scale;

    // physical amplitude = stored amplitude * sqrt(E0 / dx)
    let unit = (psi.norm_scale / grid.spacing).sqrt();
    let mut polarization = vec![0.0; layout.cells];
    let mut magnetization = vec![0.0; layout.cells];
    for (s, slot) in layout.slots.iter().enumerate() {
        for (cell, medium) in media.iter().enumerate().take(layout.cells) {
            let Some(idx) = layout.polarization_index(s, cell) else {
                continue;
            };
            let pole = medium.poles(slot.branch)[slot.pole];
            let w = vacuum_weight(medium, slot.branch);
            let aux = amps[idx].re * unit / (w.sqrt() * pole.big_omega * pole.resonance);
            let contribution = w * pole.big_omega * pole.big_omega * aux;
            match slot.branch {
                Branch::Electric => polarization[cell] += contribution,
                Branch::Magnetic => magnetization[cell] += contribution,
            }
        }
    }
    Observables {
        total_energy,
        field_energy,
        polarization,
        magnetization,
    }
}
