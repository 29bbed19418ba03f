use thiserror::Error;

/// Failure modes shared by every construction in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("root finder did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("point outside the declared domain: {0}")]
    DomainViolation(String),
    #[error("logarithm branch undefined: argument {re:+e}{im:+e}i has nonnegative real part")]
    BranchViolation { re: f64, im: f64 },
    #[error("fractional map pole: |n + lambda*z1| = {modulus:e}")]
    PoleHit { modulus: f64 },
    #[error("no parameter reached the boundary band (best {best})")]
    SearchFailure { best: f64 },
    #[error("point is not extreme in the closed logarithmic image")]
    NotExtreme,
    #[error("scaling budget exhausted at M = {m}")]
    RecursionBudgetExceeded { m: f64 },
    #[error("point is not in the closure (violation {violation:e})")]
    NotInClosure { violation: f64 },
    #[error("point is not in the set (violation {violation:e})")]
    NotInSet { violation: f64 },
    #[error("operation out of scope: {0}")]
    ScopeViolation(String),
    #[error("coordinate {index} vanishes")]
    AxisPoint { index: usize },
    #[error("g(b) is not on the boundary of the symmetrized polydisc (max root modulus {max_root_modulus})")]
    FiberBoundaryMismatch { max_root_modulus: f64 },
    #[error("fiber points {0} and {1} coincide")]
    IndistinctPoints(usize, usize),
    #[error("Bishop exponent search exceeded {cap}")]
    ExponentSearchFailure { cap: u64 },
    #[error("point is not on the boundary (max slack violation {violation:e})")]
    NotOnBoundary { violation: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
