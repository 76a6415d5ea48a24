//! Intersection arithmetic on the Hirzebruch surface `ℙ(E)`.

use super::ExactError;

/// Tangencies between a curve `C` and the Riccati foliation:
/// `Tan = C² + (n−2)(C·𝔣)`, using `T_F ≅ −(n−2)𝔣`.
pub fn tangency_count(self_intersection: i64, fiber_intersections: i64, n: i64) -> i64 {
    self_intersection + (n - 2) * fiber_intersections
}

/// Splitting type `(a, b)`, `a ≤ b`, of a rank-2 bundle `O(a) ⊕ O(b)` with
/// `a + b = degree` whose projectivization has minimal section square
/// `−(b − a)`.
pub fn splitting_type_from_invariants(degree: i64, min_section_square: i64) -> Result<(i64, i64), ExactError> {
    let gap = min_section_square.abs();
    if (degree - gap).rem_euclid(2) != 0 {
        return Err(ExactError::ParityMismatch { degree, square: min_section_square });
    }
    let a = (degree - gap) / 2;
    Ok((a, a + gap))
}
