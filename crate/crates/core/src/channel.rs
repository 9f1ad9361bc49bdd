//! Quantum channels, dual maps and purity-limited entanglement passing.
//!
//! Conventions:
//!
//! - The Choi matrix of `N: L(C^{d_in}) -> L(C^{d_out})` is normalized,
//!   `J = (1/d_in) Σ_ij |i><j| ⊗ N(|i><j|)`, reference factor first.
//!   Its rows are indexed by `i * d_out + k`.
//! - The dual map satisfies `Tr(N†(B) A) = Tr(B N(A))`.
//! - For two channels the joint Choi is ordered `(r1 r2, a1 a2)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{c64, eigh, Matrix, ONE, ZERO};
use crate::math::sqrt;
use crate::operator::{
    eps_herm, max_expectation, second_eigenvalue, DensityOperator, HermitianOperator,
};
use crate::simplex::{EPS_FEAS, EPS_NUM};
use crate::Solver;

/// A channel given by Kraus operators, a Choi matrix, or both.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRep {
    d_in: usize,
    d_out: usize,
    kraus: Option<Vec<Matrix>>,
    choi: Option<Matrix>,
}

impl ChannelRep {
    /// Checks shapes and `Σ K†K = I`.
    pub fn from_kraus(d_in: usize, d_out: usize, kraus: Vec<Matrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::Validation("at least one Kraus operator is required"));
        }
        for k in &kraus {
            if k.rows() != d_out {
                return Err(Error::DimensionMismatch { expected: d_out, found: k.rows() });
            }
            if k.cols() != d_in {
                return Err(Error::DimensionMismatch { expected: d_in, found: k.cols() });
            }
        }
        let mut sum = Matrix::zeros(d_in, d_in);
        for k in &kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        let deviation = (&sum - &Matrix::identity(d_in)).max_abs();
        if deviation > eps_herm(d_in) {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Self { d_in, d_out, kraus: Some(kraus), choi: None })
    }

    /// Checks Hermiticity, positivity and `Tr_out J = I / d_in`.
    pub fn from_choi(d_in: usize, d_out: usize, choi: Matrix) -> Result<Self> {
        let n = d_in * d_out;
        if choi.rows() != n || choi.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: choi.rows() });
        }
        let j = HermitianOperator::new(choi)?.into_matrix();
        let mut deviation: f64 = 0.0;
        for i in 0..d_in {
            for l in 0..d_in {
                let mut s = ZERO;
                for k in 0..d_out {
                    s += j[(i * d_out + k, l * d_out + k)];
                }
                let target = if i == l { c64(1.0 / d_in as f64, 0.0) } else { ZERO };
                deviation = deviation.max(crate::linalg::cabs(s - target));
            }
        }
        if deviation > eps_herm(d_in) {
            return Err(Error::NotTracePreserving { deviation });
        }
        let min = eigh(&j).values.last().copied().unwrap_or(0.0);
        if min < -EPS_FEAS {
            return Err(Error::Validation("Choi matrix is not positive semidefinite"));
        }
        Ok(Self { d_in, d_out, kraus: None, choi: Some(j) })
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus(&self) -> Option<&[Matrix]> {
        self.kraus.as_deref()
    }

    /// The Choi matrix, built from the Kraus operators if needed.
    pub fn choi(&self) -> Matrix {
        match (&self.choi, &self.kraus) {
            (Some(j), _) => j.clone(),
            (None, Some(k)) => choi_matrix(self.d_in, self.d_out, k),
            (None, None) => unreachable!("a channel always carries a representation"),
        }
    }

    /// Same channel with only its Choi matrix kept.
    pub fn to_choi_rep(&self) -> Self {
        Self { d_in: self.d_in, d_out: self.d_out, kraus: None, choi: Some(self.choi()) }
    }

    /// `N(A)`.
    pub fn apply(&self, a: &Matrix) -> Result<Matrix> {
        check_dim(a, self.d_in)?;
        if let Some(ks) = &self.kraus {
            let mut out = Matrix::zeros(self.d_out, self.d_out);
            for k in ks {
                out = &out + &(&(k * a) * &k.adjoint());
            }
            return Ok(out);
        }
        let j = self.choi.as_ref().expect("choi present");
        let (di, dout) = (self.d_in, self.d_out);
        let scale = di as f64;
        Ok(Matrix::from_fn(dout, dout, |k, l| {
            let mut s = ZERO;
            for i in 0..di {
                for jj in 0..di {
                    s += a[(i, jj)] * j[(i * dout + k, jj * dout + l)];
                }
            }
            s * scale
        }))
    }

    /// `N†(B) = Σ K† B K`, or from the Choi matrix
    /// `N†(B)_ji = d_in Σ_kl B_lk J[(i,k),(j,l)]`.
    pub fn apply_dual(&self, b: &Matrix) -> Result<Matrix> {
        check_dim(b, self.d_out)?;
        if let Some(ks) = &self.kraus {
            let mut out = Matrix::zeros(self.d_in, self.d_in);
            for k in ks {
                out = &out + &(&(&k.adjoint() * b) * k);
            }
            return Ok(out);
        }
        let j = self.choi.as_ref().expect("choi present");
        let (di, dout) = (self.d_in, self.d_out);
        let scale = di as f64;
        Ok(Matrix::from_fn(di, di, |jj, i| {
            let mut s = ZERO;
            for k in 0..dout {
                for l in 0..dout {
                    s += b[(l, k)] * j[(i * dout + k, jj * dout + l)];
                }
            }
            s * scale
        }))
    }

    /// Normalized Choi matrix of the dual map, `(1/d_out) Σ_kl |k><l| ⊗ N†(|k><l|)`.
    pub fn dual_choi(&self) -> Matrix {
        let (di, dout) = (self.d_in, self.d_out);
        let n = di * dout;
        let mut out = Matrix::zeros(n, n);
        let scale = 1.0 / dout as f64;
        for k in 0..dout {
            for l in 0..dout {
                let mut unit = Matrix::zeros(dout, dout);
                unit[(k, l)] = ONE;
                let block = self.apply_dual(&unit).expect("shape checked");
                for i in 0..di {
                    for j in 0..di {
                        out[(k * di + i, l * di + j)] = block[(i, j)] * scale;
                    }
                }
            }
        }
        out
    }
}

fn check_dim(m: &Matrix, d: usize) -> Result<()> {
    if m.rows() != d || m.cols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: m.rows() });
    }
    Ok(())
}

fn choi_matrix(d_in: usize, d_out: usize, kraus: &[Matrix]) -> Matrix {
    let n = d_in * d_out;
    let scale = 1.0 / d_in as f64;
    let mut j = Matrix::zeros(n, n);
    for k in kraus {
        for i in 0..d_in {
            for a in 0..d_out {
                let left = k[(a, i)];
                if left == ZERO {
                    continue;
                }
                for jj in 0..d_in {
                    for b in 0..d_out {
                        j[(i * d_out + a, jj * d_out + b)] += left * k[(b, jj)].conj() * scale;
                    }
                }
            }
        }
    }
    j
}

/// Normalized Choi matrix from a Kraus representation.
pub fn choi_from_kraus(channel: &ChannelRep) -> Result<HermitianOperator> {
    match channel.kraus() {
        Some(k) => Ok(HermitianOperator::from_matrix_unchecked(choi_matrix(channel.d_in, channel.d_out, k))),
        None => Err(Error::Validation("channel has no Kraus representation")),
    }
}

pub fn apply_dual_map(channel: &ChannelRep, b: &HermitianOperator) -> Result<HermitianOperator> {
    Ok(HermitianOperator::from_matrix_unchecked(channel.apply_dual(b.matrix())?))
}

/// Rewrites `J1 ⊗ J2`, ordered `(r1 a1 r2 a2)`, into `(r1 r2 a1 a2)`.
///
/// `dims = (r1, a1, r2, a2)`.
pub fn compose_joint_choi(j1: &Matrix, j2: &Matrix, dims: (usize, usize, usize, usize)) -> Matrix {
    let (r1, a1, r2, a2) = dims;
    let raw = j1.kron(j2);
    let n = r1 * a1 * r2 * a2;
    // new index (x1, x2, y1, y2) -> old index (x1, y1, x2, y2)
    let perm: Vec<usize> = (0..n)
        .map(|idx| {
            let y2 = idx % a2;
            let y1 = (idx / a2) % a1;
            let x2 = (idx / (a2 * a1)) % r2;
            let x1 = idx / (a2 * a1 * r2);
            ((x1 * a1 + y1) * r2 + x2) * a2 + y2
        })
        .collect();
    Matrix::from_fn(n, n, |i, j| raw[(perm[i], perm[j])])
}

/// `N1 ⊗ N2`. Kraus operators are tensored when both channels have them,
/// otherwise the Choi matrices are composed.
pub fn tensor_channel(c1: &ChannelRep, c2: &ChannelRep) -> ChannelRep {
    let d_in = c1.d_in * c2.d_in;
    let d_out = c1.d_out * c2.d_out;
    if let (Some(k1), Some(k2)) = (c1.kraus(), c2.kraus()) {
        let kraus = k1.iter().flat_map(|a| k2.iter().map(move |b| a.kron(b))).collect();
        return ChannelRep { d_in, d_out, kraus: Some(kraus), choi: None };
    }
    let choi = compose_joint_choi(&c1.choi(), &c2.choi(), (c1.d_in, c1.d_out, c2.d_in, c2.d_out));
    ChannelRep { d_in, d_out, kraus: None, choi: Some(choi) }
}

/// `max F(N(ρ), ψ) = λ_max(N†(ψ))` for a pure target on the output space.
pub fn noisy_prep_fidelity(channel: &ChannelRep, psi: &DensityOperator) -> Result<f64> {
    let values = psi.as_hermitian().eigenvalues();
    let second = second_eigenvalue(&values);
    if second > EPS_FEAS {
        return Err(Error::NotPureTarget { second_eigenvalue: second });
    }
    let dual = channel.apply_dual(psi.matrix())?;
    Ok(eigh(&dual).values[0])
}

/// `λ_min(N†(H))`, the least energy reachable through the channel.
///
/// A unital dual map cannot lower the ground energy; a result below
/// `λ_min(H)` is reported as an error.
pub fn noisy_ground_energy(channel: &ChannelRep, h: &HermitianOperator) -> Result<f64> {
    let dual = channel.apply_dual(h.matrix())?;
    let noisy = *eigh(&dual).values.last().expect("non-empty");
    let values = h.eigenvalues();
    let ideal = *values.last().expect("non-empty");
    let scale = 1.0 + values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if noisy < ideal - EPS_NUM * scale {
        return Err(Error::Validation("dual map lowered the ground energy"));
    }
    Ok(noisy)
}

/// `O_t(N) = max Tr(ρ J^{N†})` over `ρ` on the reference-input space with
/// `Tr(ρ²) <= t`.
pub fn entanglement_fidelity_bounded_purity(channel: &ChannelRep, t: f64, solver: Solver) -> Result<f64> {
    if channel.d_in != channel.d_out {
        return Err(Error::DimensionMismatch { expected: channel.d_in, found: channel.d_out });
    }
    let j = HermitianOperator::from_matrix_unchecked(channel.dual_choi());
    Ok(max_expectation(&j, t, solver, false)?.value)
}

/// Channels with known `O_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExampleChannelKind {
    Identity(usize),
    /// `ρ -> Tr(ρ) |0><0|`.
    Trace(usize),
    IdentityTensorTrace(usize),
}

impl ExampleChannelKind {
    pub fn d(self) -> usize {
        match self {
            Self::Identity(d) | Self::Trace(d) | Self::IdentityTensorTrace(d) => d,
        }
    }

    /// Input (= output) dimension of the channel.
    pub fn dim(self) -> usize {
        match self {
            Self::Identity(d) | Self::Trace(d) => d,
            Self::IdentityTensorTrace(d) => d * d,
        }
    }

    /// `[lo, 1]`, the range of `t` covered by the closed form.
    pub fn window(self) -> (f64, f64) {
        let n = self.dim() as f64;
        (1.0 / (n * n), 1.0)
    }

    pub fn channel(self) -> ChannelRep {
        match self {
            Self::Identity(d) => identity_channel(d),
            Self::Trace(d) => trace_channel(d),
            Self::IdentityTensorTrace(d) => tensor_channel(&identity_channel(d), &trace_channel(d)),
        }
    }
}

pub fn identity_channel(d: usize) -> ChannelRep {
    ChannelRep { d_in: d, d_out: d, kraus: Some(vec![Matrix::identity(d)]), choi: None }
}

/// Kraus operators `|0><i|`.
pub fn trace_channel(d: usize) -> ChannelRep {
    let kraus = (0..d)
        .map(|i| {
            let mut k = Matrix::zeros(d, d);
            k[(0, i)] = ONE;
            k
        })
        .collect();
    ChannelRep { d_in: d, d_out: d, kraus: Some(kraus), choi: None }
}

/// Closed-form `O_t` of the example channels.
///
/// - identity: `(1 + sqrt((t d² - 1)(d² - 1))) / d²`
/// - trace: `1/d` for `t >= 1/d`, else `(1 + sqrt((t d² - 1)(d - 1))) / d²`
/// - identity ⊗ trace: `1/d` for `t >= 1/d`, else
///   `(1 + sqrt((t d⁴ - 1)(d³ - 1))) / d⁴`
pub fn closed_form_o_t(kind: ExampleChannelKind, t: f64) -> Result<f64> {
    let (lo, hi) = kind.window();
    if !(t >= lo - EPS_FEAS && t <= hi + EPS_FEAS) {
        return Err(Error::OutOfWindow { t, lo, hi });
    }
    let t = t.clamp(lo, hi);
    let d = kind.d() as f64;
    let root = |x: f64| sqrt(x.max(0.0));
    Ok(match kind {
        ExampleChannelKind::Identity(_) => {
            let d2 = d * d;
            (1.0 + root((t * d2 - 1.0) * (d2 - 1.0))) / d2
        }
        ExampleChannelKind::Trace(_) => {
            if t >= 1.0 / d {
                1.0 / d
            } else {
                let d2 = d * d;
                (1.0 + root((t * d2 - 1.0) * (d - 1.0))) / d2
            }
        }
        ExampleChannelKind::IdentityTensorTrace(_) => {
            if t >= 1.0 / d {
                1.0 / d
            } else {
                let d4 = d * d * d * d;
                (1.0 + root((t * d4 - 1.0) * (d * d * d - 1.0))) / d4
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapMode {
    /// Compare with `O_t(N1) O_t(N2)`.
    SameT,
    /// Compare with `O_{√t}(N1) O_{√t}(N2)`.
    SqrtT,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub joint: f64,
    pub product: f64,
    pub gap: f64,
}

/// `O_t(N1 ⊗ N2) - O_s(N1) O_s(N2)` with `s = t` or `s = √t`.
///
/// The joint value is computed numerically on the tensor-product channel,
/// the single-channel values from the closed forms.
pub fn multiplicativity_gap(
    kind1: ExampleChannelKind,
    kind2: ExampleChannelKind,
    t: f64,
    mode: GapMode,
    solver: Solver,
) -> Result<Gap> {
    let s = match mode {
        GapMode::SameT => t,
        GapMode::SqrtT => sqrt(t),
    };
    let joint_channel = tensor_channel(&kind1.channel(), &kind2.channel());
    let n = joint_channel.d_in as f64;
    let lo = 1.0 / (n * n);
    if !(t >= lo - EPS_FEAS && t <= 1.0 + EPS_FEAS) {
        return Err(Error::OutOfWindow { t, lo, hi: 1.0 });
    }
    let product = closed_form_o_t(kind1, s)? * closed_form_o_t(kind2, s)?;
    let joint = entanglement_fidelity_bounded_purity(&joint_channel, t.clamp(lo, 1.0), solver)?;
    Ok(Gap { joint, product, gap: joint - product })
}
