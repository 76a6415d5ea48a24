//! Parabolic degrees of line subbundles and the stability test.

use num_traits::{Signed, Zero};

use super::bundle::{BundleModel, FlagLine, LineSubbundle};
use super::config::{ConeConfiguration, ParabolicWeights};
use super::gauss::{GaussRat, Rational};
use super::poly::Poly;
use super::ExactError;

/// `deg L − Σ_{F_i ⊂ L} a_{i1} − Σ_{F_i ⊄ L} a_{i2}`.
pub fn line_parabolic_degree(
    l: &LineSubbundle,
    flag: &[FlagLine],
    weights: &ParabolicWeights,
    config: &ConeConfiguration,
) -> Result<Rational, ExactError> {
    let model = BundleModel::new(config.n())?;
    l.validate(&model)?;
    let mut acc = Rational::from_integer(l.degree().into());
    for line in flag {
        let w = &weights.pairs()[line.index()];
        if l.contains(line, &config.points()[line.index()]) {
            acc -= &w.a1;
        } else {
            acc -= &w.a2;
        }
    }
    Ok(acc)
}

/// Which family of subbundles a candidate came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// `L = O(n−1)`.
    SecondSummand,
    /// Degree-1 subbundle interpolating every flag line except `omitted`.
    DegreeOneOmitting { omitted: usize },
    /// Degree-1 subbundle through all `n` flag lines (only for flags failing
    /// property (ii)).
    DegreeOneThroughAll,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DestabilizingWitness {
    pub kind: WitnessKind,
    pub subbundle: LineSubbundle,
    pub parabolic_degree: Rational,
}

/// Result of [`max_destabilizing_degree`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DestabilizingReport {
    /// Supremum of the parabolic degree over positive-degree subbundles.
    pub max: Rational,
    pub witness: DestabilizingWitness,
    /// Every candidate that was evaluated, in scan order.
    pub candidates: Vec<DestabilizingWitness>,
    /// Upper bound `−Σ a_{i1}` for subbundles of degree ≤ 0; always negative.
    pub nonpositive_degree_bound: Rational,
}

/// Maximizes the parabolic degree over all line subbundles.
///
/// Only `O(n−1)` and degree-1 subbundles can have nonnegative parabolic
/// degree. Degree-1 subbundles are `(1, P)` with `deg P ≤ n−2`, so it suffices
/// to interpolate through every set of `n−1` flag lines and to test whether
/// the full set is realizable.
pub fn max_destabilizing_degree(
    flag: &[FlagLine],
    weights: &ParabolicWeights,
    config: &ConeConfiguration,
) -> Result<DestabilizingReport, ExactError> {
    let n = config.n();
    let model = BundleModel::new(n)?;
    if flag.len() != n || weights.len() != n {
        return Err(ExactError::FlagLength { expected: n, got: flag.len() });
    }
    for (i, line) in flag.iter().enumerate() {
        if line.index() != i {
            return Err(ExactError::FlagOrder(i));
        }
        if !line.is_transverse_to_second_summand() {
            return Err(ExactError::FlagDegenerate(i));
        }
    }

    let mut candidates = Vec::with_capacity(n + 2);
    let second = LineSubbundle::second_summand(&model);
    candidates.push(DestabilizingWitness {
        kind: WitnessKind::SecondSummand,
        parabolic_degree: line_parabolic_degree(&second, flag, weights, config)?,
        subbundle: second,
    });

    // Slope of F_i in the chart: F_i = span(1, s_i).
    let slopes: Vec<GaussRat> = flag.iter().map(|l| l.direction().1).collect();
    let points = config.points();
    for omitted in 0..n {
        let (nodes, values): (Vec<_>, Vec<_>) = (0..n)
            .filter(|&i| i != omitted)
            .map(|i| (points[i].clone(), slopes[i].clone()))
            .unzip();
        let p = Poly::lagrange(&nodes, &values).expect("distinct points");
        let through_all = p.eval(&points[omitted]) == slopes[omitted];
        let l = LineSubbundle::new(1, Poly::constant(GaussRat::one()), p);
        let kind = if through_all {
            WitnessKind::DegreeOneThroughAll
        } else {
            WitnessKind::DegreeOneOmitting { omitted }
        };
        candidates.push(DestabilizingWitness {
            kind,
            parabolic_degree: line_parabolic_degree(&l, flag, weights, config)?,
            subbundle: l,
        });
    }

    let witness = candidates
        .iter()
        .fold(None::<&DestabilizingWitness>, |best, c| match best {
            Some(b) if b.parabolic_degree >= c.parabolic_degree => Some(b),
            _ => Some(c),
        })
        .expect("nonempty")
        .clone();
    let bound = -weights.pairs().iter().map(|p| p.a1.clone()).fold(Rational::zero(), |a, b| a + b);
    Ok(DestabilizingReport { max: witness.parabolic_degree.clone(), witness, candidates, nonpositive_degree_bound: bound })
}

/// Stable iff every line subbundle has negative parabolic degree.
pub fn is_parabolically_stable(
    flag: &[FlagLine],
    weights: &ParabolicWeights,
    config: &ConeConfiguration,
) -> Result<bool, ExactError> {
    let report = max_destabilizing_degree(flag, weights, config)?;
    debug_assert!(report.nonpositive_degree_bound.is_negative());
    Ok(report.max.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::bundle::canonical_flag;
    use crate::exact::config::weights_from_angles;
    use crate::exact::gauss::rat;

    fn setup(angles: &[(i64, i64)]) -> (ConeConfiguration, ParabolicWeights, Vec<FlagLine>) {
        let g = GaussRat::from_int;
        let pts = [g(0), g(1), g(-1), g(2), g(-2), g(3), g(-3)];
        let a: Vec<_> = angles.iter().map(|&(p, q)| rat(p, q)).collect();
        let c = ConeConfiguration::new(pts[..a.len()].to_vec(), a.clone()).unwrap();
        let w = weights_from_angles(&a).unwrap();
        let f = canonical_flag(&c);
        (c, w, f)
    }

    #[test]
    fn second_summand_degree() {
        let (c, w, f) = setup(&[(1, 2), (1, 2), (1, 2)]);
        let m = BundleModel::new(3).unwrap();
        let d = line_parabolic_degree(&LineSubbundle::second_summand(&m), &f, &w, &c).unwrap();
        assert_eq!(d, rat(-1, 4));
    }

    #[test]
    fn first_summand_degree() {
        let (c, w, f) = setup(&[(1, 2), (1, 2), (1, 2)]);
        let d = line_parabolic_degree(&LineSubbundle::first_summand(), &f, &w, &c).unwrap();
        // contains F_1, F_2 only: 1 - 1/4 - 1/4 - 3/4
        assert_eq!(d, rat(-1, 4));
    }

    #[test]
    fn degree_zero_through_nothing() {
        let (c, w, f) = setup(&[(1, 2), (2, 3), (1, 3)]);
        // (t - 5, 1): degree 0, fiber at x is (x - 5, 1), never in span(1,0) or span(1,1) at x=-1 ((-6,1)).
        let l = LineSubbundle::new(0, Poly::from_ints(&[-5, 1]), Poly::from_ints(&[1]));
        let d = line_parabolic_degree(&l, &f, &w, &c).unwrap();
        let expected = -w.pairs().iter().map(|p| p.a2.clone()).sum::<Rational>();
        assert_eq!(d, expected);
        assert!(d.is_negative());
    }

    #[test]
    fn max_degree_examples() {
        let (c, w, f) = setup(&[(1, 2), (1, 2), (1, 2)]);
        let r = max_destabilizing_degree(&f, &w, &c).unwrap();
        assert_eq!(r.max, rat(-1, 4));
        assert!(r.candidates.iter().all(|x| x.kind != WitnessKind::DegreeOneThroughAll));
        assert!(is_parabolically_stable(&f, &w, &c).unwrap());

        let (c, w, f) = setup(&[(1, 10), (9, 10), (9, 10)]);
        let r = max_destabilizing_degree(&f, &w, &c).unwrap();
        assert!(!r.max.is_negative());
        assert_eq!(r.witness.kind, WitnessKind::DegreeOneOmitting { omitted: 0 });
        assert!(!is_parabolically_stable(&f, &w, &c).unwrap());

        let (c, w, f) = setup(&[(1, 4), (1, 4), (1, 4)]);
        let r = max_destabilizing_degree(&f, &w, &c).unwrap();
        assert_eq!(r.witness.kind, WitnessKind::SecondSummand);
        assert!(!is_parabolically_stable(&f, &w, &c).unwrap());
    }

    #[test]
    fn adding_a_flag_line_raises_degree_by_alpha() {
        let (c, w, f) = setup(&[(1, 3), (2, 5), (3, 7), (1, 2)]);
        let base = LineSubbundle::new(1, Poly::from_ints(&[1]), Poly::from_ints(&[1]));
        let more = LineSubbundle::new(1, Poly::from_ints(&[1]), Poly::from_ints(&[-1, 1]));
        // (1, 1) contains only F_4; (1, t - 1) contains F_2 and F_4.
        let d0 = line_parabolic_degree(&base, &f, &w, &c).unwrap();
        let d1 = line_parabolic_degree(&more, &f, &w, &c).unwrap();
        assert_eq!(&d1 - &d0, w.angle(1));
    }
}
