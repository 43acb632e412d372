//! Minimum-error discrimination between three mirror-symmetric qubit states.
//!
//! The family is `|ψ₁,₂⟩ = cosθ|+⟩ ± sinθ|−⟩`, `|ψ₃⟩ = |+⟩` with priors
//! `(p, p, 1−2p)`. The crate provides:
//!
//! * [`ensemble`]: construction and validation of the state family;
//! * [`operators`]: real symmetric 2×2 algebra, POM validity, outcome
//!   probabilities and the Helstrom optimality certificate;
//! * [`strategy`]: the closed-form optimum (two- and three-element regimes)
//!   and the square-root measurement for comparison;
//! * [`naimark`]: the 3×3 orthogonal extension realised by the optical
//!   network and a seeded shot simulator;
//! * [`oracle`]: an independent primal/dual brute-force sandwich;
//! * [`cli`]: the command-line front end.
//!
//! All amplitudes are real; there is no complex arithmetic anywhere.

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod naimark;
pub mod operators;
pub mod oracle;
pub mod rng;
pub mod strategy;

pub use ensemble::{make_ensemble, mirror_reflect, MirrorEnsemble, QubitStateVector};
pub use error::{Error, Result};
pub use naimark::{
    born_probabilities, extend_unitary, simulate_network, NaimarkUnitary, ShotReport,
};
pub use operators::{
    check_helstrom, min_eigenvalue, outcome_prob, projector, success_probability,
    CertificateReport, Operator2, Povm,
};
pub use oracle::{dual_certificate_search, primal_grid_search, sandwich, SandwichResult};
pub use strategy::{
    ansatz_parameter, classify_regime, optimal_povm, optimal_success, srm_povm, srm_success,
    Regime, RegimeTag, StrategyResult,
};
