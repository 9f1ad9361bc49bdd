//! Dense complex matrices and a Jacobi eigensolver for Hermitian matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

pub use num_complex::Complex64;

use crate::math::{hypot, sqrt};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cabs(z: Complex64) -> f64 {
    hypot(z.re, z.im)
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// `None` if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Option<Self> {
        (data.len() == rows * cols).then_some(Self { rows, cols, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = c64(x, 0.0);
        }
        m
    }

    /// `|v><v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c64(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `<A, B> = Tr(A† B)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|&z| cabs(z)).fold(0.0, f64::max)
    }

    /// `max |A - A†|` entrywise.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max(cabs(self[(i, j)] - self[(j, i)].conj()));
            }
        }
        dev
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()).scale(0.5))
    }

    /// Kronecker product `A ⊗ B`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| self[(i / r2, j / c2)] * other[(i % r2, j % c2)])
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Diagonal of a square matrix, real parts.
    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, i)].re).collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector for `values[j]`.
    pub vectors: Matrix,
}

impl Eigen {
    /// `U diag(w) U†`.
    pub fn reconstruct(&self, weights: &[f64]) -> Matrix {
        let d = self.vectors.rows;
        let u = &self.vectors;
        Matrix::from_fn(d, d, |i, j| {
            (0..weights.len())
                .map(|k| u[(i, k)] * u[(j, k)].conj() * weights[k])
                .sum()
        })
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi diagonalization of the Hermitian part of `a`.
///
/// Each rotation first removes the phase of the pivot `a_pq` and then applies
/// a real Jacobi rotation, so the iteration stays unitary.
pub fn eigh(a: &Matrix) -> Eigen {
    assert!(a.is_square(), "eigh needs a square matrix");
    let d = a.rows;
    let mut m = a.hermitian_part();
    for i in 0..d {
        m[(i, i)].im = 0.0;
    }
    let mut v = Matrix::identity(d);
    let scale = m.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..d {
            for q in p + 1..d {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off == 0.0 || sqrt(off) <= 1e-17 * scale {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let diag = m.real_diagonal();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = Matrix::from_fn(d, d, |i, j| v[(i, order[j])]);
    Eigen { values, vectors }
}

fn rotate(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let gamma = m[(p, q)];
    let r = cabs(gamma);
    if r == 0.0 {
        return;
    }
    let d = m.rows;
    let alpha = m[(p, p)].re;
    let beta = m[(q, q)].re;
    let tau = (beta - alpha) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + sqrt(1.0 + tau * tau))
    } else {
        -1.0 / (-tau + sqrt(1.0 + tau * tau))
    };
    let c = 1.0 / sqrt(1.0 + t * t);
    let s = t * c;
    // e^{-iθ} with γ = r e^{iθ}
    let ph = gamma.conj() / r;

    // M <- M G, V <- V G
    for k in 0..d {
        let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = mkp * c - ph * mkq * s;
        m[(k, q)] = mkp * s + ph * mkq * c;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * c - ph * vkq * s;
        v[(k, q)] = vkp * s + ph * vkq * c;
    }
    // M <- G† M
    let phc = ph.conj();
    for k in 0..d {
        let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = mpk * c - phc * mqk * s;
        m[(q, k)] = mpk * s + phc * mqk * c;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &Matrix, e: &Eigen) -> f64 {
        (&e.reconstruct(&e.values) - a).max_abs()
    }

    fn unitarity(u: &Matrix) -> f64 {
        (&(&u.adjoint() * u) - &Matrix::identity(u.rows())).max_abs()
    }

    #[test]
    fn identity_matrix() {
        let e = eigh(&Matrix::identity(3));
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        assert!(unitarity(&e.vectors) < 1e-15);
    }

    #[test]
    fn diagonal_sorted() {
        let e = eigh(&Matrix::from_real_diagonal(&[-1.0, 2.0]));
        assert_eq!(e.values, vec![2.0, -1.0]);
        assert!(residual(&Matrix::from_real_diagonal(&[-1.0, 2.0]), &e) < 1e-15);
    }

    #[test]
    fn pauli_x() {
        let x = Matrix::from_fn(2, 2, |i, j| if i != j { ONE } else { ZERO });
        let e = eigh(&x);
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] + 1.0).abs() < 1e-15);
        assert!(residual(&x, &e) < 1e-15);
    }

    #[test]
    fn pauli_y_complex_phase() {
        let y = Matrix::from_vec(2, 2, vec![ZERO, c64(0.0, -1.0), c64(0.0, 1.0), ZERO]).unwrap();
        let e = eigh(&y);
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!(residual(&y, &e) < 1e-14);
        assert!(unitarity(&e.vectors) < 1e-14);
    }

    #[test]
    fn dense_complex_hermitian() {
        let a = Matrix::from_fn(5, 5, |i, j| {
            let (x, y) = (i as f64, j as f64);
            if i == j {
                c64(x * 0.7 - 1.0, 0.0)
            } else if i < j {
                c64((x + 2.0 * y).sin(), (x * y + 1.0).cos())
            } else {
                c64((y + 2.0 * x).sin(), -(x * y + 1.0).cos())
            }
        });
        assert!(a.hermitian_deviation() < 1e-15);
        let e = eigh(&a);
        assert!(residual(&a, &e) < 1e-12);
        assert!(unitarity(&e.vectors) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let tr: f64 = e.values.iter().sum();
        assert!((tr - a.trace().re).abs() < 1e-12);
    }

    #[test]
    fn kron_and_trace() {
        let a = Matrix::from_real_diagonal(&[1.0, 2.0]);
        let b = Matrix::from_real_diagonal(&[3.0, 5.0]);
        let k = a.kron(&b);
        assert_eq!(k.real_diagonal(), vec![3.0, 5.0, 6.0, 10.0]);
        assert_eq!(k.trace(), c64(24.0, 0.0));
    }
}
