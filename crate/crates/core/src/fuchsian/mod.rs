//! Schwarzian equation with prescribed cone angles, path transport and
//! monodromy.

use num_complex::Complex64;
use thiserror::Error;

pub mod monodromy;
pub mod path;
pub mod schwarzian;
pub mod transport;

pub use monodromy::{monodromy_generators, solution_action, LoopSystem, MonodromyCheck, MonodromyRep, EPS_MON};
pub use path::{circle_from, detour_segment, DetourSide, Piece, TransportPath};
pub use schwarzian::{solve_accessory_constraints, LocalModel, SchwarzianData};
pub use transport::{transport, transport_from, TransportOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuchsianError {
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("accessory constraints violated, residuals {0:?}")]
    ConstraintViolation([f64; 3]),
    #[error("accessory constraint system is singular")]
    SingularConstraintSystem,
    #[error("Q evaluated at pole {0}")]
    EvaluationAtPole(Complex64),
    #[error("path clearance {clearance:e} below threshold {threshold:e}")]
    PathTooClose { clearance: f64, threshold: f64 },
    #[error("integration failed near {at}: {reason}")]
    ToleranceNotMet { at: Complex64, reason: String },
}
