//! Linear-inversion and purity-constrained least-squares state estimation.

use alloc::vec;
use alloc::vec::Vec;

use crate::dual::solve_dual;
use crate::error::{Error, Result};
use crate::golden::GoldenSection;
use crate::linalg::{c64, eigh, Matrix, ONE, ZERO};
use crate::math::sqrt;
use crate::operator::{eigendecompose, DensityOperator, HermitianOperator};
use crate::simplex::{clamp_purity, ObjectiveVector, EPS_NUM};

/// Gram matrices with a larger condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;
/// Relative tolerance of the search over the purity level.
pub const EPS_K: f64 = 1e-10;
/// Grid points used to bracket the purity level before refining.
pub const GRID_POINTS: usize = 64;

/// Operator basis together with its biorthogonal dual.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    elements: Vec<HermitianOperator>,
    duals: Vec<HermitianOperator>,
    condition: f64,
}

impl MeasurementBasis {
    /// `d²` linearly independent Hermitian operators on `C^d`.
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let d = elements.first().map(|e| e.dim()).ok_or(Error::Validation("basis is empty"))?;
        if elements.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, found: elements.len() });
        }
        let (duals, condition) = dual_basis(&elements)?;
        Ok(Self { elements, duals, condition })
    }

    /// Normalized Pauli products `P_1 ⊗ ... ⊗ P_m / sqrt(2^m)`.
    pub fn pauli(qubits: usize) -> Self {
        let elements = pauli_products(qubits);
        Self { duals: elements.clone(), elements, condition: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn duals(&self) -> &[HermitianOperator] {
        &self.duals
    }

    /// Condition number of the Gram matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `Tr(ρ Λ_i)` for every element, i.e. noiseless frequencies.
    pub fn frequencies(&self, rho: &Matrix) -> Vec<f64> {
        self.elements.iter().map(|e| e.expectation(rho)).collect()
    }
}

fn pauli_products(qubits: usize) -> Vec<HermitianOperator> {
    let i = Matrix::identity(2);
    let x = Matrix::from_vec(2, 2, vec![ZERO, ONE, ONE, ZERO]).expect("2x2");
    let y = Matrix::from_vec(2, 2, vec![ZERO, c64(0.0, -1.0), c64(0.0, 1.0), ZERO]).expect("2x2");
    let z = Matrix::from_real_diagonal(&[1.0, -1.0]);
    let singles = [i, x, y, z];
    let mut out = vec![Matrix::identity(1)];
    for _ in 0..qubits {
        out = out.iter().flat_map(|a| singles.iter().map(move |p| a.kron(p))).collect();
    }
    let scale = 1.0 / sqrt((1usize << qubits) as f64);
    out.into_iter()
        .map(|m| HermitianOperator::from_matrix_unchecked(m.scale_real(scale)))
        .collect()
}

/// Dual basis `Λ^D_i = Σ_j (G⁻¹)_ji Λ_j` with `G_ij = <Λ_i, Λ_j>`, so that
/// `<Λ^D_i, Λ_j> = δ_ij`. Also returns the condition number of `G`.
pub fn dual_basis(elements: &[HermitianOperator]) -> Result<(Vec<HermitianOperator>, f64)> {
    let m = elements.len();
    if m == 0 {
        return Err(Error::Validation("basis is empty"));
    }
    let d = elements[0].dim();
    for e in elements {
        if e.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: e.dim() });
        }
    }
    let gram = Matrix::from_fn(m, m, |i, j| c64(elements[i].matrix().inner(elements[j].matrix()).re, 0.0));
    let e = eigh(&gram);
    let (hi, lo) = (e.values[0], e.values[m - 1]);
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::SingularBasis { condition });
    }
    let inv: Vec<f64> = e.values.iter().map(|x| 1.0 / x).collect();
    let g_inv = e.reconstruct(&inv);
    let duals = (0..m)
        .map(|i| {
            let mut acc = Matrix::zeros(d, d);
            for (j, el) in elements.iter().enumerate() {
                acc = &acc + &el.matrix().scale_real(g_inv[(j, i)].re);
            }
            HermitianOperator::from_matrix_unchecked(acc)
        })
        .collect();
    Ok((duals, condition))
}

/// `H = Σ p̂_i Λ^D_i`. May have negative eigenvalues and any trace.
pub fn linear_inversion(frequencies: &[f64], basis: &MeasurementBasis) -> Result<HermitianOperator> {
    if frequencies.len() != basis.duals.len() {
        return Err(Error::DimensionMismatch { expected: basis.duals.len(), found: frequencies.len() });
    }
    let d = basis.dim();
    let mut acc = Matrix::zeros(d, d);
    for (p, dual) in frequencies.iter().zip(&basis.duals) {
        acc = &acc + &dual.matrix().scale_real(*p);
    }
    Ok(HermitianOperator::from_matrix_unchecked(acc))
}

/// Nearest state found by a least-squares estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub rho: DensityOperator,
    /// `||ρ - H||_2`.
    pub distance: f64,
    /// `Tr(ρ²)`.
    pub purity: f64,
}

fn sq_dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Maximizer of `p.q` on the sphere `p.p = k` of the simplex.
fn sphere_point(q: &ObjectiveVector, k: f64) -> Result<Vec<f64>> {
    Ok(solve_dual(q, k, true)?.optimizer.into_vec())
}

fn estimate(sys_u: &crate::operator::EigenSystem, p: &[f64], q: &[f64]) -> Estimate {
    let rho = sys_u.reconstruct(p);
    Estimate {
        rho: DensityOperator::from_matrix_unchecked(rho),
        distance: sqrt(sq_dist(p, q)),
        purity: p.iter().map(|x| x * x).sum(),
    }
}

/// `min ||ρ - H||_2` over states with `Tr(ρ²) <= t`.
///
/// In the eigenbasis of `H` this is `min ||p - q||²` over `P(t)`. On the
/// sphere `p.p = k` the distance is `k + q.q - 2 p.q`, so the problem is a
/// one-dimensional search over `k` in `[1/d, min(t, 1)]` whose inner step
/// is the exact-purity linear maximization. The search scans a grid and
/// then refines around the best grid point by golden section.
pub fn mle_purity_leq(h: &HermitianOperator, t: f64) -> Result<Estimate> {
    let d = h.dim();
    let lo = 1.0 / d as f64;
    let t = clamp_purity(d, t);
    if t < lo {
        return Err(Error::Infeasible { t, min_purity: lo });
    }
    let hi = t.min(1.0);
    let sys = eigendecompose(h);
    let q = ObjectiveVector::from_slice(&sys.eigenvalues)?;

    let f = |k: f64| -> f64 {
        match sphere_point(&q, k) {
            Ok(p) => sq_dist(&p, &q),
            Err(_) => f64::INFINITY,
        }
    };

    let best_k = if hi - lo <= EPS_NUM {
        lo
    } else {
        let step = (hi - lo) / (GRID_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..GRID_POINTS)
            .map(|i| if i + 1 == GRID_POINTS { hi } else { lo + step * i as f64 })
            .collect();
        let values: Vec<f64> = grid.iter().map(|&k| f(k)).collect();
        let mut j = 0;
        for (i, v) in values.iter().enumerate() {
            if *v < values[j] {
                j = i;
            }
        }
        let a = grid[j.saturating_sub(1)];
        let b = grid[(j + 1).min(GRID_POINTS - 1)];
        let m = GoldenSection::new(EPS_K, 200).minimize(f, a, b);
        if m.fx < values[j] {
            m.x
        } else {
            grid[j]
        }
    };

    let p = sphere_point(&q, best_k)?;
    Ok(estimate(&sys, &p, &q))
}

/// `min ||ρ - H||_2` over states with `Tr(ρ²) = t`.
///
/// On the constraint surface the distance is `t + Tr(H²) - 2 Tr(ρH)`, so the
/// minimizer is the exact-purity maximizer of `Tr(ρH)`.
pub fn mle_purity_eq(h: &HermitianOperator, t: f64) -> Result<Estimate> {
    let d = h.dim();
    let lo = 1.0 / d as f64;
    let t = clamp_purity(d, t);
    if !(lo..=1.0).contains(&t) {
        return Err(Error::Infeasible { t, min_purity: lo });
    }
    let sys = eigendecompose(h);
    let q = ObjectiveVector::from_slice(&sys.eigenvalues)?;
    let p = sphere_point(&q, t)?;
    Ok(estimate(&sys, &p, &q))
}

/// Nearest density operator with no purity constraint.
pub fn mle_plain(h: &HermitianOperator) -> Result<Estimate> {
    mle_purity_leq(h, 1.0)
}
