use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// `t < 1/n`: the feasible set is empty.
    Infeasible { t: f64, min_purity: f64 },
    /// Objective vector has no entries or a non-finite entry.
    InvalidObjective,
    /// Closed-form step needs a non-uniform objective.
    UniformObjective,
    DimensionTooLarge { n: usize, cap: usize },
    DimensionMismatch { expected: usize, found: usize },
    /// Dual search interval requires `1/n < t < 1`.
    OutsideDualWindow { t: f64 },
    /// Reconstructed primal point violates feasibility.
    InternalKktViolation { violation: f64 },
    /// A random feasible sample beat the oracle's reported optimum.
    OracleViolation { sample: f64, optimum: f64 },
    NonHermitian { deviation: f64 },
    NotPureTarget { second_eigenvalue: f64 },
    NotTracePreserving { deviation: f64 },
    NotDensityOperator,
    SingularBasis { condition: f64 },
    /// Parameter outside the range where a closed form holds.
    OutOfWindow { t: f64, lo: f64, hi: f64 },
    Validation(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Infeasible { t, min_purity } => {
                write!(f, "purity bound {t} is below the minimum purity {min_purity}")
            }
            Error::InvalidObjective => f.write_str("objective must be non-empty and finite"),
            Error::UniformObjective => f.write_str("objective is uniform"),
            Error::DimensionTooLarge { n, cap } => {
                write!(f, "dimension {n} exceeds the cap of {cap}")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::OutsideDualWindow { t } => {
                write!(f, "dual bracketing needs 1/n < t < 1, got t = {t}")
            }
            Error::InternalKktViolation { violation } => {
                write!(f, "reconstructed optimizer infeasible by {violation:e}")
            }
            Error::OracleViolation { sample, optimum } => {
                write!(f, "random feasible sample {sample} beats optimum {optimum}")
            }
            Error::NonHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (deviation {deviation:e})")
            }
            Error::NotPureTarget { second_eigenvalue } => {
                write!(f, "target is not a pure state (second eigenvalue {second_eigenvalue:e})")
            }
            Error::NotTracePreserving { deviation } => {
                write!(f, "channel is not trace preserving (deviation {deviation:e})")
            }
            Error::NotDensityOperator => f.write_str("matrix is not a density operator"),
            Error::SingularBasis { condition } => {
                write!(f, "measurement basis is singular (Gram condition {condition:e})")
            }
            Error::OutOfWindow { t, lo, hi } => {
                write!(f, "t = {t} outside the valid window [{lo}, {hi}]")
            }
            Error::Validation(msg) => f.write_str(msg),
        }
    }
}

impl core::error::Error for Error {}
