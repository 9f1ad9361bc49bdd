//! Bounded-purity optimization over density operators.
//!
//! `max Tr(ρH)` over states with `Tr(ρ²) <= t` depends on `H` only through
//! its spectrum: pinching `ρ` in the eigenbasis of `H` keeps the objective and
//! does not raise the purity. The matrix problem therefore reduces to the
//! vector problem on the eigenvalues, and the optimizer is `U diag(p*) U†`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{eigh, Eigen, Matrix};
use crate::simplex::{ObjectiveVector, EPS_FEAS};
use crate::Solver;

/// Tolerance for Hermiticity and eigen-residual checks at dimension `d`.
pub fn eps_herm(d: usize) -> f64 {
    1e-8 * d as f64
}

/// A Hermitian matrix, symmetrized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: Matrix,
}

impl HermitianOperator {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        if matrix.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("matrix entries must be finite"));
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > eps_herm(matrix.rows()) {
            return Err(Error::NonHermitian { deviation });
        }
        Ok(Self { matrix: matrix.hermitian_part() })
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        Self { matrix: Matrix::from_real_diagonal(entries) }
    }

    pub(crate) fn from_matrix_unchecked(matrix: Matrix) -> Self {
        Self { matrix: matrix.hermitian_part() }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    /// `Tr(self · other)`, real for Hermitian arguments.
    pub fn expectation(&self, other: &Matrix) -> f64 {
        let d = self.dim();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += (self.matrix[(i, j)] * other[(j, i)]).re;
            }
        }
        s
    }

    pub fn neg(&self) -> Self {
        Self { matrix: self.matrix.scale_real(-1.0) }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigh(&self.matrix).values
    }
}

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: Matrix,
}

impl DensityOperator {
    pub fn new(matrix: Matrix) -> Result<Self> {
        let h = HermitianOperator::new(matrix)?;
        let d = h.dim();
        let values = h.eigenvalues();
        let purity: f64 = values.iter().map(|x| x * x).sum();
        let trace: f64 = values.iter().sum();
        let min = values.last().copied().unwrap_or(0.0);
        if min < -EPS_FEAS
            || (trace - 1.0).abs() > EPS_FEAS
            || purity < 1.0 / d as f64 - EPS_FEAS
            || purity > 1.0 + EPS_FEAS
        {
            return Err(Error::NotDensityOperator);
        }
        Ok(Self { matrix: h.matrix })
    }

    /// `|ψ><ψ|` for a unit vector `ψ`.
    pub fn pure(psi: &[crate::linalg::Complex64]) -> Result<Self> {
        Self::new(Matrix::outer(psi))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { matrix: Matrix::identity(d).scale_real(1.0 / d as f64) }
    }

    pub(crate) fn from_matrix_unchecked(matrix: Matrix) -> Self {
        Self { matrix: matrix.hermitian_part() }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn as_hermitian(&self) -> HermitianOperator {
        HermitianOperator { matrix: self.matrix.clone() }
    }
}

/// `H = U diag(λ) U†` with `λ` descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub u: Matrix,
    pub eigenvalues: Vec<f64>,
}

impl EigenSystem {
    /// `U diag(w) U†`.
    pub fn reconstruct(&self, weights: &[f64]) -> Matrix {
        Eigen { values: self.eigenvalues.clone(), vectors: self.u.clone() }.reconstruct(weights)
    }
}

pub fn eigendecompose(h: &HermitianOperator) -> EigenSystem {
    let e = eigh(&h.matrix);
    EigenSystem { u: e.vectors, eigenvalues: e.values }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub value: f64,
    pub rho_star: DensityOperator,
    /// Eigenvalues of `rho_star` in the eigenbasis of `H`.
    pub weights: Vec<f64>,
}

/// `max Tr(ρH)` over density operators with `Tr(ρ²) <= t`.
pub fn max_expectation(h: &HermitianOperator, t: f64, solver: Solver, exact_purity: bool) -> Result<Expectation> {
    let sys = eigendecompose(h);
    let q = ObjectiveVector::from_slice(&sys.eigenvalues)?;
    let r = solver.solve(&q, t, exact_purity)?;
    let weights = r.optimizer.into_vec();
    let rho = sys.reconstruct(&weights);
    Ok(Expectation { value: r.optimum, rho_star: DensityOperator::from_matrix_unchecked(rho), weights })
}

/// `min Tr(ρH)` over density operators with `Tr(ρ²) <= t`.
pub fn min_energy(h: &HermitianOperator, t: f64, solver: Solver) -> Result<Expectation> {
    let mut e = max_expectation(&h.neg(), t, solver, false)?;
    e.value = -e.value;
    Ok(e)
}

/// Largest eigenvalue after the largest one, used to test for pure states.
pub(crate) fn second_eigenvalue(values: &[f64]) -> f64 {
    values.get(1).copied().unwrap_or(0.0)
}

/// `max F(ρ, ψ)` over states with `Tr(ρ²) <= t`, for a pure target `ψ`.
pub fn max_fidelity_pure(psi: &DensityOperator, t: f64, solver: Solver) -> Result<f64> {
    let h = psi.as_hermitian();
    let values = h.eigenvalues();
    let second = second_eigenvalue(&values);
    if second > EPS_FEAS {
        return Err(Error::NotPureTarget { second_eigenvalue: second });
    }
    Ok(max_expectation(&h, t, solver, false)?.value)
}

/// `(1 + sqrt((d t - 1)(d - 1))) / d`, the optimum for a rank-one target.
pub fn pure_target_closed_form(d: usize, t: f64) -> f64 {
    let d = d as f64;
    let t = t.min(1.0);
    (1.0 + crate::math::sqrt(((d * t - 1.0) * (d - 1.0)).max(0.0))) / d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, ONE, ZERO};

    #[test]
    fn eigendecompose_examples() {
        let e = eigendecompose(&HermitianOperator::new(Matrix::identity(3)).unwrap());
        assert_eq!(e.eigenvalues, alloc::vec![1.0, 1.0, 1.0]);

        let e = eigendecompose(&HermitianOperator::diagonal(&[2.0, -1.0]));
        assert_eq!(e.eigenvalues, alloc::vec![2.0, -1.0]);

        let x = Matrix::from_fn(2, 2, |i, j| if i == j { ZERO } else { ONE });
        let e = eigendecompose(&HermitianOperator::new(x).unwrap());
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Matrix::from_vec(2, 2, alloc::vec![ONE, ONE, ZERO, ONE]).unwrap();
        assert!(matches!(HermitianOperator::new(m), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn symmetrizes_small_deviation() {
        let m = Matrix::from_vec(2, 2, alloc::vec![ONE, c64(0.5, 1e-12), c64(0.5, 0.0), ONE]).unwrap();
        let h = HermitianOperator::new(m).unwrap();
        assert_eq!(h.matrix().hermitian_deviation(), 0.0);
    }

    #[test]
    fn pure_projector_expectation() {
        let psi = DensityOperator::pure(&[ONE, ZERO]).unwrap();
        let e = max_expectation(&psi.as_hermitian(), 0.75, Solver::Dual, false).unwrap();
        assert!((e.value - (1.0 + 0.5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((e.value - 0.853553).abs() < 1e-6);
        assert!(e.rho_star.purity() <= 0.75 + 1e-9);
    }

    #[test]
    fn identity_expectation_is_one() {
        let h = HermitianOperator::new(Matrix::identity(3)).unwrap();
        for t in [1.0 / 3.0, 0.5, 1.0] {
            assert!((max_expectation(&h, t, Solver::Dual, false).unwrap().value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn min_energy_examples() {
        let h = HermitianOperator::diagonal(&[1.0, -1.0]);
        let e = min_energy(&h, 1.0, Solver::Dual).unwrap();
        assert_eq!(e.value, -1.0);
        assert!((e.rho_star.matrix()[(1, 1)].re - 1.0).abs() < 1e-15);

        let e = min_energy(&h, 0.5, Solver::Recursive).unwrap();
        assert!(e.value.abs() < 1e-15);
        assert!((e.rho_star.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fidelity_closed_form() {
        let psi2 = DensityOperator::pure(&[ONE, ZERO]).unwrap();
        assert!((max_fidelity_pure(&psi2, 1.0, Solver::Dual).unwrap() - 1.0).abs() < 1e-15);
        assert!((max_fidelity_pure(&psi2, 0.5, Solver::Dual).unwrap() - 0.5).abs() < 1e-15);
        let psi4 = DensityOperator::pure(&[ZERO, ONE, ZERO, ZERO]).unwrap();
        let f = max_fidelity_pure(&psi4, 0.5, Solver::Dual).unwrap();
        assert!((f - (1.0 + 3f64.sqrt()) / 4.0).abs() < 1e-12);
        assert!((f - pure_target_closed_form(4, 0.5)).abs() < 1e-12);

        let mixed = DensityOperator::maximally_mixed(2);
        assert!(matches!(max_fidelity_pure(&mixed, 0.7, Solver::Dual), Err(Error::NotPureTarget { .. })));
    }

    #[test]
    fn infeasible_budget() {
        let h = HermitianOperator::diagonal(&[1.0, 0.0, 0.0]);
        assert!(matches!(max_expectation(&h, 0.2, Solver::Dual, false), Err(Error::Infeasible { .. })));
    }
}
