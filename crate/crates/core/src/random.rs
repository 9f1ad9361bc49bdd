//! Random instances: points of `P(t)`, unitaries, states and channels.

use alloc::vec::Vec;

use rand::Rng;

use crate::linalg::{c64, Complex64, Matrix, ZERO};
use crate::math::{cos, ln, sin, sqrt};

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    sqrt(-2.0 * ln(u1)) * cos(core::f64::consts::TAU * u2)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    let r = sqrt(-ln(u1));
    let a = core::f64::consts::TAU * u2;
    c64(r * cos(a), r * sin(a))
}

/// Flat Dirichlet sample on the `n`-simplex.
pub fn dirichlet_flat<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| -ln(1.0 - rng.random::<f64>())).collect();
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    } else {
        v.iter_mut().for_each(|x| *x = 1.0 / n as f64);
    }
    v
}

/// A random point of `P(t)`.
///
/// Half of the draws are restricted to a random support so that low-rank
/// faces get sampled; draws that exceed the purity budget are shrunk toward
/// the uniform vector until they sit on the sphere.
pub fn feasible_point<R: Rng + ?Sized>(rng: &mut R, n: usize, t: f64) -> Vec<f64> {
    let mut p = dirichlet_flat(rng, n);
    if n > 1 && rng.random::<bool>() {
        let keep = rng.random_range(1..=n);
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..n - keep {
            let j = rng.random_range(i..n);
            idx.swap(i, j);
        }
        for &i in &idx[..n - keep] {
            p[i] = 0.0;
        }
        let s: f64 = p.iter().sum();
        if s > 0.0 {
            p.iter_mut().for_each(|x| *x /= s);
        }
    }
    let u = 1.0 / n as f64;
    let purity: f64 = p.iter().map(|x| x * x).sum();
    if purity > t && purity > u {
        let lambda = sqrt((t - u).max(0.0) / (purity - u));
        p.iter_mut().for_each(|x| *x = u + lambda * (*x - u));
    }
    p
}

/// Haar-distributed unitary via Gram-Schmidt on a complex Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Matrix {
    let g = Matrix::from_fn(d, d, |_, _| complex_normal(rng));
    orthonormal_columns(&g)
}

/// `rows x cols` isometry (`rows >= cols`), `V† V = I`.
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    let g = Matrix::from_fn(rows, cols, |_, _| complex_normal(rng));
    orthonormal_columns(&g)
}

fn orthonormal_columns(g: &Matrix) -> Matrix {
    let (rows, cols) = (g.rows(), g.cols());
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = g.column(j);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for u in &q {
                let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(u).for_each(|(x, a)| *x -= proj * a);
            }
        }
        let norm = sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        v.iter_mut().for_each(|x| *x /= norm);
        q.push(v);
    }
    Matrix::from_fn(rows, cols, |i, j| q[j][i])
}

/// Hermitian matrix with Gaussian entries.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Matrix {
    let g = Matrix::from_fn(d, d, |_, _| complex_normal(rng));
    g.hermitian_part()
}

/// Density matrix with eigenvalues drawn flat from the simplex.
pub fn density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Matrix {
    let p = dirichlet_flat(rng, d);
    let u = unitary(rng, d);
    let mut rho = Matrix::zeros(d, d);
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                rho[(i, j)] += u[(i, k)] * u[(j, k)].conj() * p[k];
            }
        }
    }
    rho.hermitian_part()
}

/// Random pure state vector.
pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..d).map(|_| complex_normal(rng)).collect();
    let norm = sqrt(v.iter().map(|z| z.norm_sqr()).sum());
    if norm == 0.0 {
        v.iter_mut().for_each(|x| *x = ZERO);
        v[0] = c64(1.0, 0.0);
    } else {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

/// Kraus operators of a random channel `d_in -> d_out` with `r` operators,
/// cut from a Haar isometry `d_in -> r * d_out`.
pub fn channel_kraus<R: Rng + ?Sized>(rng: &mut R, d_in: usize, d_out: usize, r: usize) -> Vec<Matrix> {
    let v = isometry(rng, r * d_out, d_in);
    (0..r)
        .map(|k| Matrix::from_fn(d_out, d_in, |i, j| v[(k * d_out + i, j)]))
        .collect()
}
