//! Piecewise line/arc paths in the punctured plane and the deterministic
//! detour rule used to build them.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

/// Offsets below this fraction of the segment length count as collinear.
const COLLINEAR_EPS: f64 = 1e-12;

/// A straight segment or a circular arc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Piece {
    Line { from: C, to: C },
    /// Arc of `radius` about `center`, starting at angle `start` and sweeping
    /// `sweep` radians (positive = counterclockwise).
    Arc { center: C, radius: f64, start: f64, sweep: f64 },
}

impl Piece {
    pub fn point(&self, s: f64) -> C {
        match *self {
            Piece::Line { from, to } => from + (to - from) * s,
            Piece::Arc { center, radius, start, sweep } => center + C::from_polar(radius, start + sweep * s),
        }
    }

    /// `dz/ds` for the unit parameter interval.
    pub fn velocity(&self, s: f64) -> C {
        match *self {
            Piece::Line { from, to } => to - from,
            Piece::Arc { radius, start, sweep, .. } => C::new(0.0, sweep) * C::from_polar(radius, start + sweep * s),
        }
    }

    pub fn start(&self) -> C {
        self.point(0.0)
    }

    pub fn end(&self) -> C {
        self.point(1.0)
    }

    pub fn length(&self) -> f64 {
        match *self {
            Piece::Line { from, to } => (to - from).norm(),
            Piece::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn reversed(&self) -> Piece {
        match *self {
            Piece::Line { from, to } => Piece::Line { from: to, to: from },
            Piece::Arc { center, radius, start, sweep } => Piece::Arc { center, radius, start: start + sweep, sweep: -sweep },
        }
    }

    /// Minimum distance from `p` to the piece.
    pub fn distance_to(&self, p: C) -> f64 {
        match *self {
            Piece::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                if len2 == 0.0 {
                    return (p - from).norm();
                }
                let t = ((p - from) * d.conj()).re / len2;
                (p - self.point(t.clamp(0.0, 1.0))).norm()
            }
            Piece::Arc { center, radius, start, sweep } => {
                let rel = p - center;
                let r = rel.norm();
                let endpoint_dist = (p - self.start()).norm().min((p - self.end()).norm());
                if r == 0.0 {
                    return radius;
                }
                // Is the direction of p inside the swept angular range?
                let (lo, span) = if sweep >= 0.0 { (start, sweep) } else { (start + sweep, -sweep) };
                let offset = (rel.arg() - lo).rem_euclid(TAU);
                if span >= TAU || offset <= span {
                    (r - radius).abs()
                } else {
                    endpoint_dist
                }
            }
        }
    }
}

/// A continuous path made of pieces, starting at a basepoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportPath {
    start: C,
    pieces: Vec<Piece>,
}

impl TransportPath {
    /// The constant path at `z`.
    pub fn constant(z: C) -> Self {
        Self { start: z, pieces: Vec::new() }
    }

    pub fn from_pieces(start: C, pieces: Vec<Piece>) -> Self {
        Self { start, pieces }
    }

    pub fn start(&self) -> C {
        self.start
    }

    pub fn end(&self) -> C {
        self.pieces.last().map_or(self.start, Piece::end)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn length(&self) -> f64 {
        self.pieces.iter().map(Piece::length).sum()
    }

    pub fn push(&mut self, piece: Piece) {
        self.pieces.push(piece);
    }

    /// `self` followed by `other`.
    pub fn then(mut self, other: &TransportPath) -> Self {
        self.pieces.extend_from_slice(&other.pieces);
        self
    }

    pub fn reversed(&self) -> Self {
        Self { start: self.end(), pieces: self.pieces.iter().rev().map(Piece::reversed).collect() }
    }

    /// Distance from the path to the nearest of `poles`.
    pub fn clearance(&self, poles: &[C]) -> f64 {
        let pieces_min = self
            .pieces
            .iter()
            .flat_map(|piece| poles.iter().map(move |p| piece.distance_to(*p)))
            .fold(f64::INFINITY, f64::min);
        let start_min = poles.iter().map(|p| (self.start - p).norm()).fold(f64::INFINITY, f64::min);
        pieces_min.min(start_min)
    }
}

/// Side on which a detour passes a pole that lies exactly on the segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum DetourSide {
    /// Keep collinear poles on the left (pass on the right of travel).
    #[default]
    Right,
    Left,
}

/// Straight segment from `a` to `b` that bypasses every pole within its
/// detour radius on an arc.
///
/// A pole off the line is passed on its far side, keeping the geometric side
/// it already lies on; a pole on the line is passed according to `side`. The
/// radius used for pole `p` is `min(radii[p], |a−p|/2, |b−p|/2)`.
pub fn detour_segment(a: C, b: C, poles: &[C], radii: &[f64], side: DetourSide) -> Vec<Piece> {
    let d = b - a;
    let len = d.norm();
    if len == 0.0 {
        return Vec::new();
    }
    let u = d / len;
    // (position along the segment, pole, radius, counterclockwise?)
    let mut detours: Vec<(f64, C, f64, bool)> = Vec::new();
    for (p, &rho) in poles.iter().zip(radii) {
        let rel = (p - a) * u.conj();
        let (along, offset) = (rel.re, rel.im);
        if along <= 0.0 || along >= len {
            continue;
        }
        let r = rho.min(0.5 * (p - a).norm()).min(0.5 * (p - b).norm());
        if offset.abs() >= r {
            continue;
        }
        // Pole on the left (offset > 0) → go around counterclockwise.
        let ccw = if offset.abs() <= COLLINEAR_EPS * len {
            side == DetourSide::Right
        } else {
            offset > 0.0
        };
        detours.push((along, *p, r, ccw));
    }
    detours.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut pieces = Vec::with_capacity(2 * detours.len() + 1);
    let mut cursor = a;
    for (along, p, r, ccw) in detours {
        let offset = ((p - a) * u.conj()).im;
        let half = (r * r - offset * offset).sqrt();
        let entry = a + u * (along - half);
        let exit = a + u * (along + half);
        if (entry - cursor).norm() > 0.0 {
            pieces.push(Piece::Line { from: cursor, to: entry });
        }
        let t0 = (entry - p).arg();
        let t1 = (exit - p).arg();
        let sweep = if ccw { (t1 - t0).rem_euclid(TAU) } else { -(t0 - t1).rem_euclid(TAU) };
        pieces.push(Piece::Arc { center: p, radius: r, start: t0, sweep });
        cursor = exit;
    }
    if (b - cursor).norm() > 0.0 {
        pieces.push(Piece::Line { from: cursor, to: b });
    }
    pieces
}

/// Counterclockwise full circle about `center` starting at `at`.
pub fn circle_from(center: C, at: C) -> Piece {
    let rel = at - center;
    Piece::Arc { center, radius: rel.norm(), start: rel.arg(), sweep: TAU }
}

/// Angle of `z − base` in `[0, 2π)`.
pub fn argument_from(base: C, z: C) -> f64 {
    let a = (z - base).arg().rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn continuous(pieces: &[Piece]) -> bool {
        pieces.windows(2).all(|w| (w[0].end() - w[1].start()).norm() < 1e-12)
    }

    #[test]
    fn collinear_detour_passes_right() {
        let poles = [c(0.0, 0.0)];
        let pieces = detour_segment(c(2.0, 0.0), c(-2.0, 0.0), &poles, &[0.25], DetourSide::Right);
        assert_eq!(pieces.len(), 3);
        assert!(continuous(&pieces));
        // travelling left, the right-hand side is Im > 0
        let mid = pieces[1].point(0.5);
        assert!(mid.im > 0.2, "{mid}");
        let path = TransportPath::from_pieces(c(2.0, 0.0), pieces);
        assert!((path.clearance(&poles) - 0.25).abs() < 1e-12);
        assert!((path.end() - c(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn off_line_pole_keeps_its_side() {
        let poles = [c(0.0, 0.1)];
        let pieces = detour_segment(c(2.0, 0.0), c(-2.0, 0.0), &poles, &[0.25], DetourSide::Right);
        let mid = pieces[1].point(0.5);
        assert!(mid.im < 0.0, "{mid}");
        let left = detour_segment(c(2.0, 0.0), c(-2.0, 0.0), &[c(0.0, 0.0)], &[0.25], DetourSide::Left);
        assert!(left[1].point(0.5).im < 0.0);
    }

    #[test]
    fn no_detour_when_clear() {
        let pieces = detour_segment(c(0.0, 0.0), c(1.0, 0.0), &[c(0.5, 1.0)], &[0.3], DetourSide::Right);
        assert_eq!(pieces.len(), 1);
    }

    #[test]
    fn reversal_and_arc_distance() {
        let arc = Piece::Arc { center: c(0.0, 0.0), radius: 1.0, start: 0.0, sweep: PI / 2.0 };
        assert!((arc.distance_to(c(0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((arc.distance_to(c(2.0, 2.0)) - (8f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((arc.distance_to(c(0.0, -2.0)) - 5f64.sqrt()).abs() < 1e-12);
        let r = arc.reversed();
        assert!((r.start() - arc.end()).norm() < 1e-15 && (r.end() - arc.start()).norm() < 1e-15);
    }
}
