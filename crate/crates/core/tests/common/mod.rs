//! Independent oracles shared by the integration tests. Nothing here calls the
//! library's numerics; it only reads the generators and circuits it produces.
#![allow(dead_code)]

use dissipative_maxwell::evolution::System;
use dissipative_maxwell::medium::{LorentzPole, MediumSpec};
use dissipative_maxwell::operators::{GeneratorPair, GridSpec};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub type M = DMatrix<Complex64>;
pub type V = DVector<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn max_abs(m: &M) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_v(v: &V) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn random_pole(rng: &mut impl Rng, drude: bool) -> LorentzPole {
    let damping = if rng.random_bool(0.15) {
        0.0
    } else {
        rng.random_range(0.01..1.5)
    };
    let resonance = if drude {
        0.0
    } else {
        rng.random_range(0.3..3.0)
    };
    LorentzPole::new(rng.random_range(0.2..2.0), resonance, damping)
}

/// Random per-cell media sharing pole counts and Drude slots, with `d` at most `max_dim`.
pub fn random_system(
    rng: &mut impl Rng,
    max_cells: usize,
    max_poles: usize,
    max_dim: usize,
) -> System {
    loop {
        let cells = rng.random_range(2..=max_cells);
        let ne = rng.random_range(0..=max_poles);
        let nm = rng.random_range(0..=max_poles);
        let e_drude: Vec<bool> = (0..ne).map(|_| rng.random_bool(0.2)).collect();
        let m_drude: Vec<bool> = (0..nm).map(|_| rng.random_bool(0.2)).collect();
        let media: Vec<MediumSpec> = (0..cells)
            .map(|_| {
                MediumSpec::normalized(
                    e_drude.iter().map(|d| random_pole(rng, *d)).collect(),
                    m_drude.iter().map(|d| random_pole(rng, *d)).collect(),
                )
            })
            .collect();
        let grid = GridSpec::new(cells, rng.random_range(0.1..1.0)).unwrap();
        let system = System::new(grid, media).unwrap();
        if system.dim() <= max_dim {
            return system;
        }
    }
}

pub fn random_vector(rng: &mut impl Rng, d: usize) -> V {
    let v = V::from_fn(d, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let n = v.norm();
    v / c(n)
}

/// Random state supported on the physical coordinates only.
pub fn random_physical(rng: &mut impl Rng, system: &System) -> V {
    let mut v = random_vector(rng, system.dim());
    for q in system.layout.padding_range() {
        v[q] = c(0.0);
    }
    let n = v.norm();
    v / c(n)
}

/// `diag(e^{−δt·g})`.
pub fn k0(gen: &GeneratorPair, dt: f64) -> M {
    M::from_diagonal(&gen.ddiss.map(|g| c((-dt * g).exp())))
}

/// Moves dissipative coordinate `start + j` to coordinate `j` with weight `√(1 − Γ²)`.
pub fn k1(gen: &GeneratorPair, dt: f64) -> M {
    let d = gen.ddiss.len();
    let mut m = M::zeros(d, d);
    for (j, q) in gen.dissipative.clone().enumerate() {
        let gamma = (-dt * gen.ddiss[q]).exp();
        m[(j, q)] = c((1.0 - gamma * gamma).max(0.0).sqrt());
    }
    m
}

/// `[[K₀, −K₁†], [K₁, K₀′]]` with `K₀′` carrying `Γ` on the first `r` coordinates.
pub fn dilation(gen: &GeneratorPair, dt: f64) -> M {
    let d = gen.ddiss.len();
    let (a, b) = (k0(gen, dt), k1(gen, dt));
    let mut lower = M::identity(d, d);
    for (j, q) in gen.dissipative.clone().enumerate() {
        lower[(j, j)] = c((-dt * gen.ddiss[q]).exp());
    }
    let mut u = M::zeros(2 * d, 2 * d);
    u.view_mut((0, 0), (d, d)).copy_from(&a);
    u.view_mut((0, d), (d, d)).copy_from(&(-b.adjoint()));
    u.view_mut((d, 0), (d, d)).copy_from(&b);
    u.view_mut((d, d), (d, d)).copy_from(&lower);
    u
}

/// Matrix exponential by Taylor series with scaling and squaring.
pub fn expm(a: &M) -> M {
    let norm: f64 = (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / c(2f64.powi(s));
    let n = a.nrows();
    let mut term = M::identity(n, n);
    let mut sum = M::identity(n, n);
    for k in 1..=24 {
        term = &term * &scaled / c(k as f64);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

pub fn lossless_step(gen: &GeneratorPair, dt: f64) -> M {
    expm(&(gen.d0.to_dense() * Complex64::new(0.0, -dt)))
}

pub fn exact(gen: &GeneratorPair, t: f64) -> M {
    let h = gen.d0.to_dense() - M::from_diagonal(&gen.ddiss.map(|g| Complex64::new(0.0, g)));
    expm(&(h * Complex64::new(0.0, -t)))
}

pub fn spectral_norm(m: &M) -> f64 {
    m.singular_values().max()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// R² of `ln y = ln c + ln f` with the slope pinned to 1.
pub fn fixed_shape_r2(f: &[f64], y: &[f64]) -> (f64, f64) {
    let r: Vec<f64> = y.iter().zip(f).map(|(a, b)| a.ln() - b.ln()).collect();
    let k = r.len() as f64;
    let ln_c = r.iter().sum::<f64>() / k;
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let my = ly.iter().sum::<f64>() / k;
    let ss_res: f64 = r.iter().map(|v| (v - ln_c).powi(2)).sum();
    let ss_tot: f64 = ly.iter().map(|v| (v - my).powi(2)).sum();
    (ln_c.exp(), 1.0 - ss_res / ss_tot)
}

fn single(name: &str, p: &[f64]) -> [[Complex64; 2]; 2] {
    let z = c(0.0);
    let o = c(1.0);
    match name {
        "x" => [[z, o], [o, z]],
        "h" => {
            let h = c(std::f64::consts::FRAC_1_SQRT_2);
            [[h, h], [h, -h]]
        }
        "t" => [
            [o, z],
            [z, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
        ],
        "tdg" => [
            [o, z],
            [z, Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)],
        ],
        "ry" => {
            let (s, co) = (p[0] / 2.0).sin_cos();
            [[c(co), c(-s)], [c(s), c(co)]]
        }
        "rz" => [
            [Complex64::from_polar(1.0, -p[0] / 2.0), z],
            [z, Complex64::from_polar(1.0, p[0] / 2.0)],
        ],
        "p" => [[o, z], [z, Complex64::from_polar(1.0, p[0])]],
        "u" => [
            [Complex64::new(p[0], p[1]), Complex64::new(p[2], p[3])],
            [Complex64::new(p[4], p[5]), Complex64::new(p[6], p[7])],
        ],
        other => panic!("unexpected gate {other}"),
    }
}

/// Unitary of an exported elementary circuit listing; qubit 0 is the most significant bit.
pub fn text_circuit_unitary(text: &str) -> M {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().unwrap();
    let q: usize = header
        .strip_prefix("qubits ")
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    let dim = 1usize << q;
    let bit = |k: usize| 1usize << (q - 1 - k);
    let mut u = M::identity(dim, dim);
    for line in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts[0] == "cx" {
            let (ctl, tgt): (usize, usize) = (parts[1].parse().unwrap(), parts[2].parse().unwrap());
            for i in 0..dim {
                if i & bit(ctl) != 0 && i & bit(tgt) == 0 {
                    u.swap_rows(i, i | bit(tgt));
                }
            }
            continue;
        }
        let target: usize = parts[1].parse().unwrap();
        let params: Vec<f64> = parts[2..].iter().map(|s| s.parse().unwrap()).collect();
        let m = single(parts[0], &params);
        for i in 0..dim {
            if i & bit(target) != 0 {
                continue;
            }
            let j = i | bit(target);
            for col in 0..dim {
                let (x, y) = (u[(i, col)], u[(j, col)]);
                u[(i, col)] = m[0][0] * x + m[0][1] * y;
                u[(j, col)] = m[1][0] * x + m[1][1] * y;
            }
        }
    }
    u
}

/// `min_φ max |a − e^{iφ}b|`, with the phase fixed by the largest entry of `b`.
pub fn distance_up_to_phase(a: &M, b: &M) -> f64 {
    let (k, _) = b.iter().enumerate().fold((0, 0.0), |(bk, bv), (k, z)| {
        if z.norm() > bv {
            (k, z.norm())
        } else {
            (bk, bv)
        }
    });
    let phase = a.as_slice()[k] / b.as_slice()[k];
    let phase = phase / c(phase.norm());
    max_abs(&(a - b * phase))
}

/// Dense Kraus dilation built from the library's rotation list, one row update per rotation.
pub fn apply_rotations(pairs: &[(usize, usize, f64)], dim: usize) -> M {
    let mut u = M::identity(dim, dim);
    for &(a, b, angle) in pairs {
        let (s, co) = (angle / 2.0).sin_cos();
        for col in 0..dim {
            let (x, y) = (u[(a, col)], u[(b, col)]);
            u[(a, col)] = x * co - y * s;
            u[(b, col)] = x * s + y * co;
        }
    }
    u
}
