//! Loop systems based at a point outside the poles and the resulting
//! monodromy generators.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::path::{argument_from, circle_from, detour_segment, DetourSide, TransportPath};
use super::schwarzian::SchwarzianData;
use super::transport::{transport, TransportOptions};
use super::FuchsianError;
use crate::mat2::{product, Mat2};

type C = Complex64;

/// Default monodromy tolerance.
pub const EPS_MON: f64 = 1e-9;

/// Angles closer than this are treated as ties in the loop ordering.
const ANGLE_TIE: f64 = 1e-12;

/// Basepoint, per-pole loop radii and loop order for a pole set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopSystem {
    pub basepoint: C,
    /// Radius of the loop circle and of detours around each pole.
    pub radii: Vec<f64>,
    /// Pole indices by increasing argument of `x_i − z₀`; collinear poles
    /// farther from the basepoint come first, since stems pass them on the
    /// right.
    pub ordering: Vec<usize>,
    /// `min pairwise pole distance / 20`.
    pub r_min: f64,
}

impl LoopSystem {
    /// Default basepoint `max|x_i| + 1` on the positive real axis, pushed
    /// further out if that leaves less than `r_min` to a pole.
    pub fn default_basepoint(poles: &[C]) -> C {
        let r_min = super::schwarzian::min_separation(poles) / 20.0;
        let reach = poles.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let mut z0 = C::new(reach + 1.0, 0.0);
        if poles.iter().any(|p| (z0 - p).norm() < r_min) {
            z0 = C::new(reach + 2.0 * r_min, 0.0);
        }
        z0
    }

    pub fn new(poles: &[C], basepoint: Option<C>) -> Result<Self, FuchsianError> {
        let r_min = super::schwarzian::min_separation(poles) / 20.0;
        let basepoint = basepoint.unwrap_or_else(|| Self::default_basepoint(poles));
        let clearance = poles.iter().map(|p| (basepoint - p).norm()).fold(f64::INFINITY, f64::min);
        if clearance < r_min {
            return Err(FuchsianError::PathTooClose { clearance, threshold: r_min });
        }
        let radii = poles
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let nearest = poles
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, q)| (p - q).norm())
                    .fold(f64::INFINITY, f64::min);
                (nearest / 3.0).min((basepoint - p).norm() / 2.0)
            })
            .collect();
        let mut ordering: Vec<usize> = (0..poles.len()).collect();
        let key = |i: usize| (argument_from(basepoint, poles[i]), (poles[i] - basepoint).norm());
        ordering.sort_by(|&i, &j| {
            let (ai, di) = key(i);
            let (aj, dj) = key(j);
            if (ai - aj).abs() <= ANGLE_TIE {
                dj.total_cmp(&di)
            } else {
                ai.total_cmp(&aj)
            }
        });
        Ok(Self { basepoint, radii, ordering, r_min })
    }

    /// Path from `from` to `to` along the straight segment with detours.
    pub fn path_between(&self, poles: &[C], from: C, to: C, side: DetourSide) -> TransportPath {
        TransportPath::from_pieces(from, detour_segment(from, to, poles, &self.radii, side))
    }

    /// Stem to the loop circle of pole `i`, the counterclockwise circle, and
    /// the stem back.
    pub fn loop_path(&self, poles: &[C], i: usize) -> TransportPath {
        let x = poles[i];
        let u = (x - self.basepoint) / (x - self.basepoint).norm();
        let foot = x - u * self.radii[i];
        let stem = self.path_between(poles, self.basepoint, foot, DetourSide::Right);
        let mut circle = TransportPath::constant(foot);
        circle.push(circle_from(x, foot));
        stem.clone().then(&circle).then(&stem.reversed())
    }
}

/// Monodromy of the solution vector `(y1, y2)` with `y1(z₀) = 0`,
/// `y1′(z₀) = 1`, `y2(z₀) = 1`, `y2′(z₀) = 0`: continuation along the loop
/// around pole `i` sends it to `matrices[i] · (y1, y2)`. With this convention
/// the map from loops to matrices is a homomorphism, and
/// `M_{o(1)} ⋯ M_{o(n)} = I` for the recorded ordering `o`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyRep {
    pub basepoint: C,
    pub ordering: Vec<usize>,
    pub matrices: Vec<Mat2>,
}

/// Residuals of the invariants of a [`MonodromyRep`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyCheck {
    pub det_residuals: Vec<f64>,
    /// `|tr M_i + 2 cos(π α_i)|`.
    pub trace_residuals: Vec<f64>,
    /// `‖Π M − I‖_F` in the recorded ordering.
    pub product_residual: f64,
}

impl MonodromyCheck {
    pub fn max_det(&self) -> f64 {
        self.det_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_trace(&self) -> f64 {
        self.trace_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn holds(&self, eps: f64) -> bool {
        self.max_det() < eps && self.max_trace() < eps && self.product_residual < eps
    }
}

impl MonodromyRep {
    /// A representation given directly by its generators, in index order.
    pub fn from_matrices(matrices: Vec<Mat2>) -> Self {
        let ordering = (0..matrices.len()).collect();
        Self { basepoint: C::new(0.0, 0.0), ordering, matrices }
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn ordered_product(&self) -> Mat2 {
        product(self.ordering.iter().map(|&i| &self.matrices[i]))
    }

    pub fn check(&self, angles: &[f64]) -> MonodromyCheck {
        let det_residuals = self.matrices.iter().map(|m| (m.det() - 1.0).norm()).collect();
        let trace_residuals = self
            .matrices
            .iter()
            .zip(angles)
            .map(|(m, a)| (m.trace() + 2.0 * (std::f64::consts::PI * a).cos()).norm())
            .collect();
        let product_residual = self.ordered_product().distance(&Mat2::identity());
        MonodromyCheck { det_residuals, trace_residuals, product_residual }
    }

    /// Simultaneous conjugation `M ↦ G M G⁻¹`.
    pub fn conjugated(&self, g: &Mat2) -> Self {
        let g_inv = g.inverse().expect("invertible conjugator");
        Self {
            basepoint: self.basepoint,
            ordering: self.ordering.clone(),
            matrices: self.matrices.iter().map(|m| *g * *m * g_inv).collect(),
        }
    }

    /// Largest commutator norm `‖M_i M_j − M_j M_i‖_F`; near zero for
    /// reducible-looking (abelian) representations.
    pub fn max_commutator(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.matrices.len() {
            for j in i + 1..self.matrices.len() {
                let (a, b) = (self.matrices[i], self.matrices[j]);
                best = best.max((a * b - b * a).frobenius());
            }
        }
        best
    }
}

/// Converts a transport matrix of the `(y, y′)` system along a closed loop
/// into the action on the solution vector `(y1, y2)`.
pub fn solution_action(t: &Mat2) -> Mat2 {
    Mat2::new(t.d, t.b, t.c, t.a)
}

/// Monodromy generators along the default loop system.
pub fn monodromy_generators(
    data: &SchwarzianData,
    basepoint: Option<C>,
    opts: &TransportOptions,
) -> Result<(MonodromyRep, LoopSystem), FuchsianError> {
    let loops = LoopSystem::new(data.poles(), basepoint)?;
    let opts = TransportOptions { min_clearance: opts.min_clearance.max(loops.r_min), ..*opts };
    let matrices = (0..data.n())
        .into_par_iter()
        .map(|i| transport(data, &loops.loop_path(data.poles(), i), &opts).map(|t| solution_action(&t)))
        .collect::<Result<Vec<_>, _>>()?;
    let rep = MonodromyRep { basepoint: loops.basepoint, ordering: loops.ordering.clone(), matrices };
    Ok((rep, loops))
}
