use num_traits::{One, Signed, Zero};

use super::gauss::{rat, rat_to_f64, GaussRat, Rational};
use super::ExactError;

/// Marked points `x_i` on the affine chart with cone angles `2π α_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeConfiguration {
    points: Vec<GaussRat>,
    angles: Vec<Rational>,
}

impl ConeConfiguration {
    /// Validates `n ≥ 3`, pairwise distinct points, and `0 < α_i < 1`.
    pub fn new(points: Vec<GaussRat>, angles: Vec<Rational>) -> Result<Self, ExactError> {
        if points.len() != angles.len() {
            return Err(ExactError::LengthMismatch { points: points.len(), angles: angles.len() });
        }
        if points.len() < 3 {
            return Err(ExactError::TooFewPoints(points.len()));
        }
        for (i, a) in angles.iter().enumerate() {
            if !a.is_positive() || *a >= Rational::one() {
                return Err(ExactError::AngleOutOfRange { index: i, angle: a.to_string() });
            }
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(ExactError::DuplicatePoints(i, j));
                }
            }
        }
        Ok(Self { points, angles })
    }

    /// Points `0, 1, …, n-1` on the real axis; handy when only angles matter.
    pub fn with_integer_points(angles: Vec<Rational>) -> Result<Self, ExactError> {
        let points = (0..angles.len() as i64).map(GaussRat::from_int).collect();
        Self::new(points, angles)
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[GaussRat] {
        &self.points
    }

    pub fn angles(&self) -> &[Rational] {
        &self.angles
    }

    pub fn points_f64(&self) -> Vec<num_complex::Complex64> {
        self.points.iter().map(GaussRat::to_complex).collect()
    }

    pub fn angles_f64(&self) -> Vec<f64> {
        self.angles.iter().map(rat_to_f64).collect()
    }

    fn defects(&self) -> impl Iterator<Item = Rational> + '_ {
        self.angles.iter().map(|a| Rational::one() - a)
    }
}

/// `Σ (1 − α_i) < 2`, exact.
pub fn check_gauss_bonnet(config: &ConeConfiguration) -> bool {
    let total: Rational = config.defects().sum();
    total < rat(2, 1)
}

/// First index `j` with `1 − α_j ≥ Σ_{i≠j} (1 − α_i)`, if any.
pub fn angle_stability_violation(config: &ConeConfiguration) -> Option<usize> {
    let defects: Vec<Rational> = config.defects().collect();
    let total: Rational = defects.iter().cloned().sum();
    defects.iter().position(|d| d.clone() >= &total - d)
}

/// `1 − α_j < Σ_{i≠j} (1 − α_i)` for every `j`, exact.
pub fn check_angle_stability(config: &ConeConfiguration) -> bool {
    angle_stability_violation(config).is_none()
}

/// Weights `(a_1, a_2)` at one marked point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightPair {
    pub a1: Rational,
    pub a2: Rational,
}

/// Per-point parabolic weights with `a1 + a2 = 1` and `0 < a1 < a2 < 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParabolicWeights {
    pairs: Vec<WeightPair>,
}

impl ParabolicWeights {
    /// Validating constructor; rejects pairs violating the invariants.
    pub fn new(pairs: Vec<WeightPair>) -> Result<Self, ExactError> {
        for (i, p) in pairs.iter().enumerate() {
            let sum_ok = &p.a1 + &p.a2 == Rational::one();
            let order_ok = p.a1.is_positive() && p.a1 < p.a2 && p.a2 < Rational::one();
            if !sum_ok || !order_ok {
                return Err(ExactError::InvalidWeights {
                    index: i,
                    a1: p.a1.to_string(),
                    a2: p.a2.to_string(),
                });
            }
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[WeightPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `α_i = a_{i2} − a_{i1}`.
    pub fn angle(&self, i: usize) -> Rational {
        &self.pairs[i].a2 - &self.pairs[i].a1
    }
}

/// `a_{i1} = (1 − α_i)/2`, `a_{i2} = (1 + α_i)/2`.
pub fn weights_from_angles(angles: &[Rational]) -> Result<ParabolicWeights, ExactError> {
    let half = rat(1, 2);
    let mut pairs = Vec::with_capacity(angles.len());
    for (i, a) in angles.iter().enumerate() {
        if !a.is_positive() || *a >= Rational::one() {
            return Err(ExactError::AngleOutOfRange { index: i, angle: a.to_string() });
        }
        pairs.push(WeightPair {
            a1: (Rational::one() - a) * &half,
            a2: (Rational::one() + a) * &half,
        });
    }
    ParabolicWeights::new(pairs)
}

/// `deg E − Σ (a_{i1} + a_{i2})` for `E = O(1) ⊕ O(n−1)`, so `deg E = n`.
pub fn parabolic_degree_total(n: usize, weights: &ParabolicWeights) -> Rational {
    let deg_e = Rational::from_integer((n as i64).into());
    let sum: Rational = weights.pairs.iter().map(|p| &p.a1 + &p.a2).sum();
    deg_e - sum
}

/// `Σ (a_{i1} + a_{i2})`; the residue theorem forces this to equal `deg E' = n`.
pub fn residue_degree_sum(weights: &ParabolicWeights) -> Rational {
    weights.pairs.iter().map(|p| &p.a1 + &p.a2).fold(Rational::zero(), |acc, s| acc + s)
}
