#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use spherecone::exact::{rat, ConeConfiguration, FlagLine, GaussRat, Rational};
use spherecone::{Mat2, MonodromyRep};

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn random_angle<R: Rng>(rng: &mut R) -> Rational {
    let q = rng.gen_range(2..=24);
    rat(rng.gen_range(1..q), q)
}

pub fn random_gauss<R: Rng>(rng: &mut R, bound: i64) -> GaussRat {
    let den = rng.gen_range(1..=6);
    GaussRat::from_ratios(rng.gen_range(-bound..=bound), den, rng.gen_range(-bound..=bound), rng.gen_range(1..=6))
}

/// `n` distinct random points of ℚ(i).
pub fn random_points<R: Rng>(rng: &mut R, n: usize) -> Vec<GaussRat> {
    let mut pts: Vec<GaussRat> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = random_gauss(rng, 5);
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts
}

pub fn random_config<R: Rng>(rng: &mut R, n: usize) -> ConeConfiguration {
    let angles = (0..n).map(|_| random_angle(rng)).collect();
    ConeConfiguration::new(random_points(rng, n), angles).unwrap()
}

/// Flag lines `(1, s_i)` with random slopes.
pub fn random_flag<R: Rng>(rng: &mut R, n: usize) -> Vec<FlagLine> {
    (0..n).map(|i| FlagLine::new(i, GaussRat::one(), random_gauss(rng, 4)).unwrap()).collect()
}

pub fn random_su2<R: Rng>(rng: &mut R) -> Mat2 {
    let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a = c(v[0] / n, v[1] / n);
    let b = c(v[2] / n, v[3] / n);
    Mat2::new(a, -b.conj(), b, a.conj())
}

pub fn random_gl2<R: Rng>(rng: &mut R) -> Mat2 {
    loop {
        let m = Mat2::new(
            c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
        );
        if m.det().norm() > 0.3 {
            return m.det_normalized();
        }
    }
}

/// SU(2) generators conjugated by `g`, with the product relation kept.
pub fn conjugated_su2_rep<R: Rng>(rng: &mut R, n: usize, g: &Mat2) -> MonodromyRep {
    let mut ms: Vec<Mat2> = (0..n - 1).map(|_| random_su2(rng)).collect();
    let prod = spherecone::mat2::product(ms.iter());
    ms.push(prod.inverse().unwrap());
    MonodromyRep::from_matrices(ms).conjugated(g)
}

/// Irreducible SL(2,ℝ) representation with hyperbolic generators; it fixes
/// no point of hyperbolic 3-space.
pub fn hyperbolic_rep() -> MonodromyRep {
    let a = Mat2::real(2.0, 0.0, 0.0, 0.5);
    let b = Mat2::real(5.0 / 4.0, 3.0 / 4.0, 3.0 / 4.0, 5.0 / 4.0);
    let ab_inv = (a * b).inverse().unwrap();
    MonodromyRep::from_matrices(vec![a, b, ab_inv])
}

pub fn symmetric_quad() -> [C; 4] {
    [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]
}

pub fn standard_triple() -> [C; 3] {
    [c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]
}
