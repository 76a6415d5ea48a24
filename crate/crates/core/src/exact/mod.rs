//! Exact certification over ℚ(i): angle conditions, weights, the bundle
//! `O(1) ⊕ O(n−1)` with its flag, parabolic degrees and stability.

pub mod bundle;
pub mod config;
pub mod gauss;
pub mod intersection;
pub mod linalg;
pub mod poly;
pub mod stability;

pub use bundle::{
    canonical_flag, classify_line_subbundle, normalize_flag, Automorphism, BundleModel, FiberVector, FlagLine,
    LineSubbundle, SubbundleClass,
};
pub use config::{
    angle_stability_violation, check_angle_stability, check_gauss_bonnet, parabolic_degree_total,
    residue_degree_sum, weights_from_angles, ConeConfiguration, ParabolicWeights, WeightPair,
};
pub use gauss::{rat, rat_to_f64, GaussRat, Rational};
pub use intersection::{splitting_type_from_invariants, tangency_count};
pub use poly::Poly;
pub use stability::{
    is_parabolically_stable, line_parabolic_degree, max_destabilizing_degree, DestabilizingReport,
    DestabilizingWitness, WitnessKind,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("need at least 3 marked points, got {0}")]
    TooFewPoints(usize),
    #[error("{points} points but {angles} angles")]
    LengthMismatch { points: usize, angles: usize },
    #[error("marked points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("angle {angle} at point {index} is outside (0, 1)")]
    AngleOutOfRange { index: usize, angle: String },
    #[error("weights ({a1}, {a2}) at point {index} violate a1 + a2 = 1, 0 < a1 < a2 < 1")]
    InvalidWeights { index: usize, a1: String, a2: String },
    #[error("flag line {0} is the zero vector")]
    ZeroFlagVector(usize),
    #[error("flag has {got} lines, expected {expected}")]
    FlagLength { expected: usize, got: usize },
    #[error("flag line at position {0} is attached to a different point")]
    FlagOrder(usize),
    #[error("flag line {0} lies in the O(n-1) summand")]
    FlagDegenerate(usize),
    #[error("a degree-1 subbundle contains every flag line")]
    FlagContainedInLine,
    #[error("automorphism needs nonzero diagonal entries")]
    SingularAutomorphism,
    #[error("automorphism polynomial has degree {degree} > n - 2 for n = {n}")]
    AutomorphismDegree { degree: usize, n: usize },
    #[error("subbundle components share a root on the projective line")]
    InvalidSubbundle,
    #[error("subbundle components do not fit degree tag {0}")]
    InconsistentDegree(i64),
    #[error("degree {degree} and section square {square} have different parity")]
    ParityMismatch { degree: i64, square: i64 },
}
