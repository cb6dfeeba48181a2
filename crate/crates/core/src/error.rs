use alloc::string::String;

/// Failures raised while building or verifying objects.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate q: |q - 1/q| = {0:e}")]
    DegenerateQ(f64),
    #[error("q is numerically a root of unity: |q^{order} - 1| = {distance:e}")]
    RootOfUnity { order: usize, distance: f64 },
    #[error("|q| = {0} is not inside the unit disk")]
    QOutsideDisk(f64),
    #[error("divergent base: |p| = {0} >= 1")]
    DivergentBase(f64),
    #[error("series argument |z| = {0} >= 1")]
    Divergence(f64),
    #[error("pole in {0}")]
    Pole(&'static str),
    #[error("truncation tail {tail:e} exceeds {tol:e}; raise trunc_terms")]
    TruncationInsufficient { tail: f64, tol: f64 },
    #[error("degenerate point: nullspace gap {gap:e}, inverse condition {inv_cond:e}")]
    DegeneratePoint { gap: f64, inv_cond: f64 },
    #[error("highest-weight component vanishes (relative size {0:e})")]
    HwComponentZero(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("operator is singular")]
    Singular,
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = core::result::Result<T, Error>;
