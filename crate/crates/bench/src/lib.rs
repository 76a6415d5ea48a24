//! Fixtures shared by the benchmarks.

use num_complex::Complex64;
use spherecone::exact::{rat, ConeConfiguration};
use spherecone::fuchsian::solve_accessory_constraints;
use spherecone::{Rational, SchwarzianData};

pub fn triple() -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]
}

pub fn square() -> Vec<Complex64> {
    vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)]
}

pub fn square_angles() -> Vec<Rational> {
    vec![rat(3, 4); 4]
}

pub fn n3_data() -> SchwarzianData {
    solve_accessory_constraints(&triple(), &[0.5; 3], &[]).expect("n = 3 data")
}

/// Seven points on the integers with mixed angles.
pub fn exact_config() -> ConeConfiguration {
    let angles = [(1, 2), (2, 3), (3, 5), (5, 7), (4, 9), (7, 11), (1, 3)];
    ConeConfiguration::with_integer_points(angles.iter().map(|&(p, q)| rat(p, q)).collect()).expect("valid")
}
