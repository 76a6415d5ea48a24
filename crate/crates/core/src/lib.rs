//! Spherical cone metrics on the Riemann sphere via parabolic bundles.
//!
//! [`exact`] certifies the angle conditions, flag normalization and parabolic
//! stability over ℚ(i). [`fuchsian`] realizes the projectivized connection as a
//! Schwarzian equation and computes its monodromy, [`unitarize`] finds the
//! accessory parameters that make it unitary, and [`metric`] pulls back the
//! round metric along the developing map and checks its geometry.

pub mod exact;
pub mod fuchsian;
pub mod mat2;
pub mod metric;
pub mod unitarize;

pub use mat2::Mat2;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use exact::{ConeConfiguration, ExactError, GaussRat, Rational};
pub use fuchsian::{FuchsianError, MonodromyRep, SchwarzianData, TransportOptions};
pub use metric::{DevelopingMap, MetricError, VerificationReport};
pub use unitarize::{HermitianForm, SolverConfig, UnitarityCertificate, UnitarizeError};
