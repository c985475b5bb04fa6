//! The non-unitary Trotter factor `K₀ = exp(−δt·D_diss)` and its completion `K₁`.
//!
//! `K₀` is diagonal: `Γ_ll = e^{−δt·g_l}` on the dissipative block and 1
//! elsewhere. `K₁` sends dissipative coordinate `start + j` to coordinate `j`
//! with weight `√(1 − Γ_jj²)`, so that `K₀†K₀ + K₁†K₁ = I`. It is kept in
//! this implicit form and only materialized for verification.

use std::ops::Range;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::operators::GeneratorPair;

/// Largest dimension for density-matrix verification.
pub const DENSITY_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct KrausPair {
    /// Diagonal of `K₀` over the full padded space.
    pub k0_diag: DVector<f64>,
    /// `Γ_jj` for each dissipative coordinate, in block order.
    pub gamma_diag: Vec<f64>,
    /// `θ_j = 2·arccos(Γ_jj)`, in `[0, π]`.
    pub thetas: Vec<f64>,
    /// Location of the dissipative block.
    pub dissipative: Range<usize>,
}

impl KrausPair {
    pub fn dim(&self) -> usize {
        self.k0_diag.len()
    }

    pub fn dissipative_count(&self) -> usize {
        self.gamma_diag.len()
    }

    /// `√(1 − Γ_jj²)` for each dissipative coordinate.
    pub fn jump_amplitudes(&self) -> impl Iterator<Item = f64> + '_ {
        self.gamma_diag
            .iter()
            .map(|g| (1.0 - g * g).max(0.0).sqrt())
    }

    pub fn apply_k0(&self, psi: &CVector) -> CVector {
        psi.component_mul(&self.k0_diag.map(|g| Complex64::new(g, 0.0)))
    }

    pub fn apply_k1(&self, psi: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim());
        for (j, s) in self.jump_amplitudes().enumerate() {
            out[j] += psi[self.dissipative.start + j] * s;
        }
        out
    }

    pub fn k0_dense(&self) -> CMatrix {
        CMatrix::from_diagonal(&self.k0_diag.map(|g| Complex64::new(g, 0.0)))
    }

    pub fn k1_dense(&self) -> CMatrix {
        let mut k1 = CMatrix::zeros(self.dim(), self.dim());
        for (j, s) in self.jump_amplitudes().enumerate() {
            k1[(j, self.dissipative.start + j)] = Complex64::new(s, 0.0);
        }
        k1
    }

    /// `max |K₀†K₀ + K₁†K₁ − I|` computed densely.
    pub fn completeness_residual(&self) -> f64 {
        let k0 = self.k0_dense();
        let k1 = self.k1_dense();
        let sum = k0.adjoint() * &k0 + k1.adjoint() * &k1;
        crate::linalg::max_abs(&(sum - CMatrix::identity(self.dim(), self.dim())))
    }

    /// Success probability `⟨ψ|K₀²|ψ⟩` for a unit vector.
    pub fn success_probability(&self, psi: &CVector) -> f64 {
        psi.iter()
            .zip(self.k0_diag.iter())
            .map(|(a, g)| a.norm_sqr() * g * g)
            .sum()
    }
}

/// Builds `K₀`, `Γ`, and the rotation angles for one time step.
pub fn build_kraus_pair(gen: &GeneratorPair, dt: f64) -> Result<KrausPair> {
    if !(dt >= 0.0) {
        return Err(Error::NegativeTimeStep(dt));
    }
    let k0_diag = gen.ddiss.map(|g| (-dt * g).exp());
    let gamma_diag: Vec<f64> = gen.dissipative.clone().map(|q| k0_diag[q]).collect();
    let thetas = gamma_diag
        .iter()
        .map(|g| 2.0 * g.clamp(-1.0, 1.0).acos())
        .collect();
    Ok(KrausPair {
        k0_diag,
        gamma_diag,
        thetas,
        dissipative: gen.dissipative.clone(),
    })
}

/// `K₀ρK₀† + K₁ρK₁†` at verification scale.
pub fn apply_channel_density(rho: &CMatrix, pair: &KrausPair) -> Result<CMatrix> {
    let d = pair.dim();
    if d > DENSITY_LIMIT {
        return Err(Error::DimensionTooLarge {
            dim: d,
            limit: DENSITY_LIMIT,
        });
    }
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: rho.nrows(),
        });
    }
    let k0 = pair.k0_dense();
    let k1 = pair.k1_dense();
    Ok(&k0 * rho * k0.adjoint() + &k1 * rho * k1.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm, max_abs};
    use crate::operators::SparseMatrix;

    fn generator(ddiss: &[f64], dissipative: Range<usize>) -> GeneratorPair {
        GeneratorPair {
            d0: SparseMatrix::zeros(ddiss.len()),
            ddiss: DVector::from_row_slice(ddiss),
            dissipative,
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let gen = generator(&[0.0, 0.0, 0.3, 0.7], 2..4);
        let pair = build_kraus_pair(&gen, 0.0).unwrap();
        assert!(pair.k0_diag.iter().all(|g| *g == 1.0));
        assert!(pair.jump_amplitudes().all(|s| s == 0.0));
        assert!(pair.thetas.iter().all(|t| *t == 0.0));
    }

    #[test]
    fn homogeneous_damping_gives_uniform_angles() {
        let gen = generator(&[0.0, 0.0, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0], 2..5);
        let pair = build_kraus_pair(&gen, 0.3).unwrap();
        for g in &pair.gamma_diag {
            assert_eq!(*g, (-0.15f64).exp());
        }
        assert!(pair.thetas.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn two_rates_against_dense_exponential() {
        let gen = generator(&[0.0, 0.0, 0.1, 0.4], 2..4);
        let pair = build_kraus_pair(&gen, 1.0).unwrap();
        let minus_diss = CMatrix::from_diagonal(&gen.ddiss.map(|g| Complex64::new(-g, 0.0)));
        let oracle = expm(&minus_diss).unwrap();
        assert!(max_abs(&(oracle - pair.k0_dense())) < 1e-15);
        assert_eq!(pair.gamma_diag, vec![(-0.1f64).exp(), (-0.4f64).exp()]);
        assert_eq!(
            pair.thetas,
            vec![2.0 * (-0.1f64).exp().acos(), 2.0 * (-0.4f64).exp().acos()]
        );
        assert!(pair.completeness_residual() < 1e-15);
    }

    #[test]
    fn negative_step_rejected() {
        let gen = generator(&[0.0, 1.0], 1..2);
        assert_eq!(
            build_kraus_pair(&gen, -0.1),
            Err(Error::NegativeTimeStep(-0.1))
        );
    }

    fn pure(psi: &CVector) -> CMatrix {
        psi * psi.adjoint()
    }

    #[test]
    fn channel_ignores_states_without_dissipative_support() {
        let gen = generator(&[0.0, 0.0, 0.9, 0.9], 2..4);
        let pair = build_kraus_pair(&gen, 0.5).unwrap();
        let psi = CVector::from_row_slice(&[
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
            Complex64::default(),
            Complex64::default(),
        ]);
        let rho = pure(&psi);
        let out = apply_channel_density(&rho, &pair).unwrap();
        assert!(max_abs(&(out - rho)) < 1e-16);
    }

    #[test]
    fn channel_damps_one_dissipative_mode() {
        let gen = generator(&[0.0, 0.0, 0.9, 0.4], 2..4);
        let pair = build_kraus_pair(&gen, 0.5).unwrap();
        let mut psi = CVector::zeros(4);
        psi[3] = Complex64::new(1.0, 0.0);
        let out = apply_channel_density(&pure(&psi), &pair).unwrap();
        let g = (-0.2f64).exp();
        // population g² stays, 1 − g² jumps to coordinate 1 (partner of block index 1)
        assert!((out[(3, 3)].re - g * g).abs() < 1e-15);
        assert!((out[(1, 1)].re - (1.0 - g * g)).abs() < 1e-15);
        assert!((out.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn channel_at_zero_step_is_identity() {
        let gen = generator(&[0.0, 0.0, 0.9, 0.4], 2..4);
        let pair = build_kraus_pair(&gen, 0.0).unwrap();
        let rho = CMatrix::from_fn(4, 4, |i, j| {
            Complex64::new(if i == j { 0.25 } else { 0.05 }, 0.0)
        });
        assert_eq!(apply_channel_density(&rho, &pair).unwrap(), rho);
    }

    #[test]
    fn density_limit_enforced() {
        let gen = generator(&vec![0.0; 128], 0..0);
        let pair = build_kraus_pair(&gen, 0.1).unwrap();
        let rho = CMatrix::zeros(128, 128);
        assert!(matches!(
            apply_channel_density(&rho, &pair),
            Err(Error::DimensionTooLarge { .. })
        ));
    }
}
