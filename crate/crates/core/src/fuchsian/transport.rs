//! Parallel transport of `y″ + (Q/2) y = 0` along paths.
//!
//! The first-order companion system `Φ′ = A Φ` with `A = [[0, 1], [−Q/2, 0]]`
//! is trace free, so the transport matrix has determinant 1. Each piece is
//! integrated in its unit parameter with an embedded Dormand–Prince 5(4) pair.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::path::{Piece, TransportPath};
use super::schwarzian::SchwarzianData;
use super::FuchsianError;
use crate::mat2::Mat2;

type C = Complex64;

/// Integration controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportOptions {
    /// Local error allowed per unit of scaled arclength (arclength divided by
    /// `min(1, distance to the nearest pole)`).
    pub tol: f64,
    /// Paths closer than this to a pole are refused.
    pub min_clearance: f64,
    /// A step shorter than this fraction of the local pole distance aborts.
    pub step_floor: f64,
    pub max_steps: usize,
}

impl Default for TransportOptions {
    fn default() -> Self {
        Self { tol: 1e-10, min_clearance: 0.0, step_floor: 1e-9, max_steps: 2_000_000 }
    }
}

impl TransportOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn with_clearance(mut self, min_clearance: f64) -> Self {
        self.min_clearance = min_clearance;
        self
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const PRECISION_FLOOR: f64 = 64.0 * f64::EPSILON;

/// `Φ′(s)` for the piece parameter `s`.
fn rhs(data: &SchwarzianData, piece: &Piece, s: f64, phi: &Mat2) -> Mat2 {
    let z = piece.point(s);
    let v = piece.velocity(s);
    let q_half = data.q_unchecked(z) * 0.5;
    // A Φ with A = [[0, 1], [−Q/2, 0]], times dz/ds.
    Mat2::new(phi.c * v, phi.d * v, -q_half * phi.a * v, -q_half * phi.b * v)
}

fn lin(phi: &Mat2, terms: &[(f64, &Mat2)], h: f64) -> Mat2 {
    let mut out = *phi;
    for (w, k) in terms {
        if *w != 0.0 {
            out = out + k.scale_re(w * h);
        }
    }
    out
}

fn scaled_error(err: &Mat2, old: &Mat2, new: &Mat2) -> f64 {
    let pairs = [(err.a, old.a, new.a), (err.b, old.b, new.b), (err.c, old.c, new.c), (err.d, old.d, new.d)];
    pairs
        .iter()
        .map(|(e, o, n)| e.norm() / (1.0 + o.norm().max(n.norm())))
        .fold(0.0, f64::max)
}

/// Integrates one piece starting from `phi`.
fn integrate_piece(
    data: &SchwarzianData,
    piece: &Piece,
    mut phi: Mat2,
    opts: &TransportOptions,
    steps: &mut usize,
) -> Result<Mat2, FuchsianError> {
    let total_len = piece.length();
    if total_len == 0.0 {
        return Ok(phi);
    }
    let scale_at = |s: f64| data.distance_to_poles(piece.point(s)).min(1.0);
    let mut s = 0.0;
    let mut h = (0.05 * scale_at(0.0) / total_len).min(1.0);
    let mut k1 = rhs(data, piece, s, &phi);
    while s < 1.0 {
        if *steps >= opts.max_steps {
            return Err(FuchsianError::ToleranceNotMet { at: piece.point(s), reason: "step budget exhausted".into() });
        }
        let last = s + h >= 1.0;
        if last {
            h = 1.0 - s;
        }
        let k2 = rhs(data, piece, s + C2 * h, &lin(&phi, &[(A21, &k1)], h));
        let k3 = rhs(data, piece, s + C3 * h, &lin(&phi, &[(A31, &k1), (A32, &k2)], h));
        let k4 = rhs(data, piece, s + C4 * h, &lin(&phi, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = rhs(data, piece, s + C5 * h, &lin(&phi, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
        let k6 = rhs(
            data,
            piece,
            s + h,
            &lin(&phi, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
        );
        let next = lin(&phi, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = rhs(data, piece, s + h, &next);
        let err_m = lin(
            &Mat2::scalar(C::new(0.0, 0.0)),
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
            h,
        );
        *steps += 1;

        let ell = scale_at(s).min(scale_at((s + h).min(1.0)));
        let step_len = h * total_len;
        // Q is only known to the relative precision of z − x_i
        let z = piece.point(s);
        let noise = PRECISION_FLOOR * z.norm().max(1.0) / data.distance_to_poles(z);
        let allowed = opts.tol.max(noise) * (step_len / ell).min(1.0);
        let err = scaled_error(&err_m, &phi, &next);
        if !err.is_finite() || !next.is_finite() {
            h *= 0.2;
        } else if err <= allowed {
            s = if last { 1.0 } else { s + h };
            phi = next;
            k1 = k7;
            let factor = if err == 0.0 { 5.0 } else { (0.9 * (allowed / err).powf(0.2)).clamp(0.2, 5.0) };
            h *= factor;
            continue;
        } else {
            h *= (0.9 * (allowed / err).powf(0.2)).clamp(0.1, 0.9);
        }
        if h * total_len < opts.step_floor * ell {
            return Err(FuchsianError::ToleranceNotMet { at: piece.point(s), reason: "step size underflow".into() });
        }
    }
    Ok(phi)
}

/// Transports the fundamental matrix `init` (columns are `(y, y′)` of two
/// solutions) along `path`, returning its value at the endpoint.
pub fn transport_from(
    data: &SchwarzianData,
    path: &TransportPath,
    opts: &TransportOptions,
    init: Mat2,
) -> Result<Mat2, FuchsianError> {
    let clearance = path.clearance(data.poles());
    if !(clearance > opts.min_clearance) || clearance == 0.0 {
        return Err(FuchsianError::PathTooClose { clearance, threshold: opts.min_clearance });
    }
    let mut steps = 0;
    let mut phi = init;
    for piece in path.pieces() {
        phi = match *piece {
            Piece::Line { from, to } => integrate_line(data, from, to, phi, opts, &mut steps)?,
            Piece::Arc { .. } => integrate_piece(data, piece, phi, opts, &mut steps)?,
        };
    }
    Ok(phi)
}

/// Splits a segment at the feet of the poles and integrates every part from
/// its ends towards its midpoint, so that points near a pole are always close
/// to the start of the parameter interval.
fn integrate_line(
    data: &SchwarzianData,
    from: C,
    to: C,
    mut phi: Mat2,
    opts: &TransportOptions,
    steps: &mut usize,
) -> Result<Mat2, FuchsianError> {
    let d = to - from;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return Ok(phi);
    }
    let mut cuts: Vec<f64> = data
        .poles()
        .iter()
        .map(|p| ((p - from) * d.conj()).re / len2)
        .filter(|t| *t > 0.0 && *t < 1.0)
        .collect();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    let at = |t: f64| if t == 0.0 { from } else if t == 1.0 { to } else { from + d * t };
    for w in cuts.windows(2) {
        let (a, b) = (at(w[0]), at(w[1]));
        let mid = a + (b - a) * 0.5;
        phi = integrate_piece(data, &Piece::Line { from: a, to: mid }, phi, opts, steps)?;
        let back = integrate_piece(data, &Piece::Line { from: b, to: mid }, Mat2::identity(), opts, steps)?;
        let back_inv = back.inverse().ok_or_else(|| FuchsianError::ToleranceNotMet {
            at: b,
            reason: "singular transport matrix".into(),
        })?;
        phi = back_inv * phi;
    }
    Ok(phi)
}

/// Transport matrix `T` with `(y, y′)(end) = T · (y, y′)(start)`.
pub fn transport(data: &SchwarzianData, path: &TransportPath, opts: &TransportOptions) -> Result<Mat2, FuchsianError> {
    transport_from(data, path, opts, Mat2::identity())
}
