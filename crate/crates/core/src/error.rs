use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("theta = {0} is outside [0, π/2]")]
    ThetaOutOfRange(f64),

    #[error("p = {0} is outside [0, 1/2]")]
    PriorOutOfRange(f64),

    #[error("state ({0}, {1}) is not normalised")]
    NotNormalized(f64, f64),

    #[error("negative projector weight {0}")]
    NegativeWeight(f64),

    #[error("expected {expected} POM elements, got {got}")]
    ElementCount { expected: usize, got: usize },

    #[error("POM elements do not sum to the identity (defect {0:e})")]
    Incomplete(f64),

    #[error(
        "POM element {index} is not positive semidefinite (min eigenvalue {min_eigenvalue:e})"
    )]
    NotPositive { index: usize, min_eigenvalue: f64 },

    #[error("ansatz parameter is 0/0 at the degenerate corner theta = 0, p = 1/3")]
    DegenerateCorner,

    #[error("ansatz parameter requested in the two-element regime (p = {p}, boundary {boundary})")]
    OutOfRegime { p: f64, boundary: f64 },

    #[error("ansatz parameter a = {0} is outside [0, 1]")]
    AnsatzOutOfRange(f64),

    #[error("search resolution {0} is outside (0, 0.1]")]
    Resolution(f64),

    #[error("no feasible dual point found on the coarse grid")]
    InfeasibleStart,

    #[error("shot count must be at least 1")]
    NoShots,
}
