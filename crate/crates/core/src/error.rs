use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("effective size L = delta/K is undefined for K = 0")]
    UndefinedSize,

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("QL iteration did not converge for eigenvalue {index} after {sweeps} sweeps")]
    NoConvergence { index: usize, sweeps: usize },

    #[error("eigendecomposition failed accuracy check: residual {residual:e}, orthogonality defect {orthogonality:e}")]
    Inaccurate { residual: f64, orthogonality: f64 },

    #[error("parameter {0} outside the analytic domain")]
    OutOfDomain(String),

    #[error("Fock expansion does not fit in the cutoff: tail weight {tail:e} at n_cut = {n_cut}")]
    RangeError { tail: f64, n_cut: usize },

    #[error("finite-difference step too small: 1 - |overlap| = {infidelity:e}; use a larger step")]
    PrecisionLoss { infidelity: f64 },

    #[error("finite-difference step too large: |overlap| = {overlap:e} on a plaquette edge")]
    StepTooLarge { overlap: f64 },

    #[error("no interior maximum in bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("fit is unidentifiable: {0}")]
    Unidentifiable(String),

    #[error("power-law fit needs strictly positive data: {0}")]
    NonPositive(String),

    #[error("collapse window is empty: {0}")]
    Window(String),

    #[error("invalid curve family: {0}")]
    InvalidFamily(String),
}
