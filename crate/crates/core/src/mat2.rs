//! 2×2 complex matrices.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: C,
    pub b: C,
    pub c: C,
    pub d: C,
}

impl Mat2 {
    pub const fn new(a: C, b: C, c: C, d: C) -> Self {
        Self { a, b, c, d }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(C::new(a, 0.0), C::new(b, 0.0), C::new(c, 0.0), C::new(d, 0.0))
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn diag(x: C, y: C) -> Self {
        Self::new(x, ZERO, ZERO, y)
    }

    pub fn scalar(s: C) -> Self {
        Self::diag(s, s)
    }

    pub fn det(&self) -> C {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C {
        self.a + self.d
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    /// Conjugation by the swap `[[0,1],[1,0]]`.
    pub fn swap_conjugate(&self) -> Self {
        Self::new(self.d, self.c, self.b, self.a)
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == 0.0 {
            return None;
        }
        let s = det.inv();
        Some(Self::new(self.d * s, -self.b * s, -self.c * s, self.a * s))
    }

    pub fn scale(&self, s: C) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C::new(s, 0.0))
    }

    /// Divides by a square root of the determinant.
    pub fn det_normalized(&self) -> Self {
        let det = self.det();
        self.scale(det.sqrt().inv())
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()
    }

    pub fn frobenius(&self) -> f64 {
        self.frobenius_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm()).max(self.d.norm())
    }

    pub fn apply(&self, v: [C; 2]) -> [C; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `‖M − N‖_F`.
    pub fn distance(&self, other: &Mat2) -> f64 {
        (*self - *other).frobenius()
    }

    /// `‖M†M − I‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        (self.adjoint() * *self - Self::identity()).frobenius()
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

/// Product `ms[0] · ms[1] · … · ms[k-1]`.
pub fn product<'a>(ms: impl IntoIterator<Item = &'a Mat2>) -> Mat2 {
    ms.into_iter().fold(Mat2::identity(), |acc, m| acc * *m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let m = Mat2::new(C::new(1.0, 2.0), C::new(0.5, 0.0), C::new(-1.0, 1.0), C::new(3.0, -1.0));
        let p = m * m.inverse().unwrap();
        assert!(p.distance(&Mat2::identity()) < 1e-14);
        assert!((m.det_normalized().det() - ONE).norm() < 1e-14);
        assert!(Mat2::real(1.0, 2.0, 2.0, 4.0).inverse().is_none());
    }

    #[test]
    fn swap_conjugation_matches_permutation() {
        let p = Mat2::real(0.0, 1.0, 1.0, 0.0);
        let m = Mat2::new(C::new(1.0, 2.0), C::new(0.5, 0.0), C::new(-1.0, 1.0), C::new(3.0, -1.0));
        assert_eq!(m.swap_conjugate(), p * m * p);
    }
}
