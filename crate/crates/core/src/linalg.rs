//! Dense complex linear algebra used by the oracle paths.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest dimension accepted by the dense oracles.
pub const DENSE_LIMIT: usize = 4096;

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
// 1-norm thresholds for degrees 3, 5, 7, 9, 13 in double precision.
const THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

pub fn one_norm(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Max entrywise modulus.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max entrywise modulus of a vector.
pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |U†U − I|`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

/// Operator 2-norm (largest singular value).
pub fn operator_norm(a: &CMatrix) -> f64 {
    a.clone().singular_values().max()
}

/// Power-of-two diagonal scaling `B = D⁻¹AD` that evens out row and column norms.
fn balance(a: &CMatrix) -> (CMatrix, Vec<f64>) {
    let n = a.nrows();
    let mut b = a.clone();
    let mut scale = vec![1.0; n];
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += b[(j, i)].norm();
                    r += b[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut c2, mut r2) = (c, r);
            while c2 < r2 / 2.0 {
                c2 *= 2.0;
                r2 /= 2.0;
                f *= 2.0;
            }
            while c2 >= r2 * 2.0 {
                c2 /= 2.0;
                r2 *= 2.0;
                f /= 2.0;
            }
            if (c2 + r2) < 0.95 * s {
                converged = false;
                scale[i] *= f;
                for j in 0..n {
                    b[(i, j)] /= f;
                    b[(j, i)] *= f;
                }
            }
        }
    }
    (b, scale)
}

fn pade_terms(a: &CMatrix, degree: usize) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let id = CMatrix::identity(n, n);
    let a2 = a * a;
    let c = |x: f64| Complex64::new(x, 0.0);
    if degree == 13 {
        let b = PADE13;
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let inner_u = &a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]);
        let u = a * (&a6 * inner_u + &a6 * c(b[7]) + &a4 * c(b[5]) + &a2 * c(b[3]) + &id * c(b[1]));
        let inner_v = &a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]);
        let v = &a6 * inner_v + &a6 * c(b[6]) + &a4 * c(b[4]) + &a2 * c(b[2]) + &id * c(b[0]);
        return (u, v);
    }
    let coeffs: &[f64] = match degree {
        3 => &PADE3,
        5 => &PADE5,
        7 => &PADE7,
        _ => &PADE9,
    };
    let mut u_sum = CMatrix::zeros(n, n);
    let mut v_sum = CMatrix::zeros(n, n);
    let mut power = id;
    for k in 0..=degree / 2 {
        v_sum += &power * c(coeffs[2 * k]);
        u_sum += &power * c(coeffs[2 * k + 1]);
        power = &power * &a2;
    }
    (a * u_sum, v_sum)
}

/// Matrix exponential by balancing, scaling and squaring with a diagonal Padé approximant.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    if n > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge {
            dim: n,
            limit: DENSE_LIMIT,
        });
    }
    if n == 0 {
        return Ok(a.clone());
    }
    let (balanced, scale) = balance(a);
    let (work, scale) = if one_norm(&balanced) < one_norm(a) {
        (balanced, Some(scale))
    } else {
        (a.clone(), None)
    };

    let norm = one_norm(&work);
    let (degree, squarings) = match THETA.iter().find(|(_, t)| norm <= *t) {
        Some(&(m, _)) => (m, 0),
        None => {
            let s = (norm / THETA[4].1).log2().ceil().max(0.0) as i32;
            (13, s)
        }
    };
    let scaled = &work * Complex64::new(2f64.powi(-squarings), 0.0);
    let (u, v) = pade_terms(&scaled, degree);
    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut r = lhs
        .lu()
        .solve(&rhs)
        .expect("Padé denominator is nonsingular for scaled arguments");
    for _ in 0..squarings {
        r = &r * &r;
    }
    if let Some(scale) = scale {
        for i in 0..n {
            for j in 0..n {
                r[(i, j)] *= scale[i] / scale[j];
            }
        }
    }
    Ok(r)
}

/// `exp(−i·t·H)` for Hermitian `H` through its eigendecomposition.
pub fn hermitian_exp(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let n = h.nrows();
    if n > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge {
            dim: n,
            limit: DENSE_LIMIT,
        });
    }
    let eig = SymmetricEigen::new(h.clone());
    let phases = CVector::from_iterator(
        n,
        eig.eigenvalues
            .iter()
            .map(|l| Complex64::from_polar(1.0, -l * t)),
    );
    let v = eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    Ok(scaled * v.adjoint())
}
