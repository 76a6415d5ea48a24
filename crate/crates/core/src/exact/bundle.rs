//! The bundle `E = O(1) ⊕ O(n−1)` in the affine chart: automorphisms, flag
//! lines, and line subbundles.
//!
//! Sections are polynomial pairs `(f, g)` with `deg f ≤ 1`, `deg g ≤ n−1`; the
//! fiber at a finite point is ℂ² by evaluation, `span(1,0)` being the fiber of
//! `O(1)` and `span(0,1)` that of `O(n−1)`.

use super::config::ConeConfiguration;
use super::gauss::GaussRat;
use super::poly::Poly;
use super::ExactError;

/// `E = O(1) ⊕ O(n−1)` over ℙ¹.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BundleModel {
    n: usize,
}

impl BundleModel {
    pub fn new(n: usize) -> Result<Self, ExactError> {
        if n < 3 {
            return Err(ExactError::TooFewPoints(n));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> i64 {
        self.n as i64
    }
}

/// A fiber vector `(v1, v2)` at a point.
pub type FiberVector = (GaussRat, GaussRat);

/// A line in the fiber over marked point `index`, stored with its first
/// nonzero coordinate equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlagLine {
    index: usize,
    v1: GaussRat,
    v2: GaussRat,
}

impl FlagLine {
    pub fn new(index: usize, v1: GaussRat, v2: GaussRat) -> Result<Self, ExactError> {
        if v1.is_zero() && v2.is_zero() {
            return Err(ExactError::ZeroFlagVector(index));
        }
        let (v1, v2) = if !v1.is_zero() {
            let s = v1.inv().expect("nonzero");
            (GaussRat::one(), &v2 * &s)
        } else {
            (GaussRat::zero(), GaussRat::one())
        };
        Ok(Self { index, v1, v2 })
    }

    pub fn from_ints(index: usize, v1: i64, v2: i64) -> Result<Self, ExactError> {
        Self::new(index, GaussRat::from_int(v1), GaussRat::from_int(v2))
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn direction(&self) -> FiberVector {
        (self.v1.clone(), self.v2.clone())
    }

    /// Property (i): the line meets the `O(n−1)` summand only in zero.
    pub fn is_transverse_to_second_summand(&self) -> bool {
        !self.v1.is_zero()
    }

    /// Whether the line is spanned by `w` (`w ≠ 0`).
    pub fn is_spanned_by(&self, w: &FiberVector) -> bool {
        let cross = &(&self.v1 * &w.1) - &(&self.v2 * &w.0);
        cross.is_zero() && !(w.0.is_zero() && w.1.is_zero())
    }
}

/// Flag with `F_i = span(1,0)` for `i < n` and `F_n = span(1,1)`.
pub fn canonical_flag(config: &ConeConfiguration) -> Vec<FlagLine> {
    let n = config.n();
    (0..n)
        .map(|i| {
            let v2 = if i + 1 == n { 1 } else { 0 };
            FlagLine::from_ints(i, 1, v2).expect("nonzero")
        })
        .collect()
}

/// Automorphism `Φ = [[λ1, 0], [P, λ2]]` of `E`, acting on a fiber vector
/// `(f, g)` at `x` as `(λ1 f, P(x) f + λ2 g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    lambda1: GaussRat,
    lambda2: GaussRat,
    p: Poly,
}

impl Automorphism {
    pub fn new(lambda1: GaussRat, lambda2: GaussRat, p: Poly, model: &BundleModel) -> Result<Self, ExactError> {
        if lambda1.is_zero() || lambda2.is_zero() {
            return Err(ExactError::SingularAutomorphism);
        }
        if p.degree().is_some_and(|d| d + 2 > model.n()) {
            return Err(ExactError::AutomorphismDegree { degree: p.degree().unwrap_or(0), n: model.n() });
        }
        Ok(Self { lambda1, lambda2, p })
    }

    pub fn identity() -> Self {
        Self { lambda1: GaussRat::one(), lambda2: GaussRat::one(), p: Poly::zero() }
    }

    pub fn lambda1(&self) -> &GaussRat {
        &self.lambda1
    }

    pub fn lambda2(&self) -> &GaussRat {
        &self.lambda2
    }

    pub fn p(&self) -> &Poly {
        &self.p
    }

    pub fn apply(&self, x: &GaussRat, v: &FiberVector) -> FiberVector {
        let f = &self.lambda1 * &v.0;
        let g = &(&self.p.eval(x) * &v.0) + &(&self.lambda2 * &v.1);
        (f, g)
    }

    pub fn apply_to_line(&self, x: &GaussRat, line: &FlagLine) -> FlagLine {
        let (a, b) = self.apply(x, &line.direction());
        FlagLine::new(line.index(), a, b).expect("automorphism is invertible on fibers")
    }

    pub fn apply_to_flag(&self, flag: &[FlagLine], config: &ConeConfiguration) -> Vec<FlagLine> {
        flag.iter().map(|l| self.apply_to_line(&config.points()[l.index()], l)).collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        let p = self.p.scale(&other.lambda1).add(&other.p.scale(&self.lambda2));
        Automorphism {
            lambda1: &self.lambda1 * &other.lambda1,
            lambda2: &self.lambda2 * &other.lambda2,
            p,
        }
    }

    pub fn inverse(&self) -> Automorphism {
        let l1 = self.lambda1.inv().expect("λ1 ≠ 0");
        let l2 = self.lambda2.inv().expect("λ2 ≠ 0");
        let p = self.p.scale(&-(&l1 * &l2));
        Automorphism { lambda1: l1, lambda2: l2, p }
    }

    /// Whether this is `c·Id` for some `c ∈ ℂ*`.
    pub fn is_scalar(&self) -> bool {
        self.p.is_zero() && self.lambda1 == self.lambda2
    }

    /// The image of `O(1)`, i.e. the subbundle `(λ1, P)` of degree 1.
    pub fn image_of_first_summand(&self) -> LineSubbundle {
        LineSubbundle::new(1, Poly::constant(self.lambda1.clone()), self.p.clone())
    }
}

/// Finds `Φ ∈ Aut(E)` with `Φ(F_i) = F′_i` for the canonical flag `F′`, normalized
/// by `λ2 = 1`. Any other solution is a scalar multiple of this one.
pub fn normalize_flag(flag: &[FlagLine], config: &ConeConfiguration) -> Result<Automorphism, ExactError> {
    let n = config.n();
    if flag.len() != n {
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
    let (nodes, values): (Vec<GaussRat>, Vec<GaussRat>) = flag[..n - 1]
        .iter()
        .map(|l| {
            let (v1, v2) = l.direction();
            (config.points()[l.index()].clone(), -(&v2 / &v1))
        })
        .unzip();
    let p = Poly::lagrange(&nodes, &values).expect("distinct points");

    let (vn1, vn2) = flag[n - 1].direction();
    let w = &(&p.eval(&config.points()[n - 1]) * &vn1) + &vn2;
    if w.is_zero() {
        return Err(ExactError::FlagContainedInLine);
    }
    let model = BundleModel::new(n)?;
    Automorphism::new(&w / &vn1, GaussRat::one(), p, &model)
}

/// Inclusion `L → O(1) ⊕ O(n−1)` of a line bundle of degree `d`, given by the
/// pair `(p, q)` of formal degrees `(1−d, n−1−d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineSubbundle {
    degree: i64,
    p: Poly,
    q: Poly,
}

/// Outcome of [`classify_line_subbundle`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubbundleClass {
    /// `L = O(n−1)`.
    IsSecondSummand,
    /// `L = Φ·O(1)`.
    ImageOfO1(Automorphism),
    /// `deg L ≤ 0`.
    LowDegree,
}

impl LineSubbundle {
    pub fn new(degree: i64, p: Poly, q: Poly) -> Self {
        Self { degree, p, q }
    }

    /// `O(n−1)` itself.
    pub fn second_summand(model: &BundleModel) -> Self {
        Self::new(model.degree() - 1, Poly::zero(), Poly::constant(GaussRat::one()))
    }

    /// `O(1)` itself.
    pub fn first_summand() -> Self {
        Self::new(1, Poly::constant(GaussRat::one()), Poly::zero())
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn p(&self) -> &Poly {
        &self.p
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    fn formal_degrees(&self, model: &BundleModel) -> (i64, i64) {
        (1 - self.degree, model.degree() - 1 - self.degree)
    }

    /// Checks degree tags and that `p`, `q` share no root on ℙ¹.
    pub fn validate(&self, model: &BundleModel) -> Result<(), ExactError> {
        let (dp, dq) = self.formal_degrees(model);
        let too_big = |poly: &Poly, formal: i64| poly.degree().is_some_and(|d| d as i64 > formal);
        if too_big(&self.p, dp) || too_big(&self.q, dq) {
            return Err(ExactError::InconsistentDegree(self.degree));
        }
        let shared_root = match (self.p.is_zero(), self.q.is_zero()) {
            (true, true) => true,
            (true, false) => dq > 0,
            (false, true) => dp > 0,
            (false, false) => self.p.homogeneous_resultant(dp as usize, &self.q, dq as usize).is_zero(),
        };
        if shared_root {
            return Err(ExactError::InvalidSubbundle);
        }
        Ok(())
    }

    /// The fiber `L_x ⊂ ℂ²` at a finite point, spanned by `(p(x), q(x))`.
    pub fn fiber(&self, x: &GaussRat) -> FiberVector {
        (self.p.eval(x), self.q.eval(x))
    }

    /// Whether `F ⊂ L` at the point `x`.
    pub fn contains(&self, line: &FlagLine, x: &GaussRat) -> bool {
        line.is_spanned_by(&self.fiber(x))
    }

    /// Same subsheaf up to a nonzero scalar on `(p, q)`.
    pub fn same_subsheaf(&self, other: &LineSubbundle) -> bool {
        if self.degree != other.degree {
            return false;
        }
        let lead = |s: &LineSubbundle| -> Option<GaussRat> {
            s.p.coeffs().iter().chain(s.q.coeffs()).find(|c| !c.is_zero()).cloned()
        };
        match (lead(self), lead(other)) {
            (Some(a), Some(b)) => {
                let s = &b / &a;
                self.p.scale(&s) == other.p && self.q.scale(&s) == other.q
            }
            _ => false,
        }
    }
}

/// Identifies a positive-degree subbundle as `O(n−1)` or an automorphic image
/// of `O(1)`.
pub fn classify_line_subbundle(l: &LineSubbundle, model: &BundleModel) -> Result<SubbundleClass, ExactError> {
    if l.degree > 1 && !l.p.is_zero() {
        return Err(ExactError::InconsistentDegree(l.degree));
    }
    l.validate(model)?;
    match l.degree {
        d if d > 1 => {
            // validate() leaves only the constant q when p = 0.
            if d != model.degree() - 1 {
                return Err(ExactError::InconsistentDegree(d));
            }
            Ok(SubbundleClass::IsSecondSummand)
        }
        1 => {
            let c = l.p.coeff(0);
            let c_inv = c.inv().ok_or(ExactError::InvalidSubbundle)?;
            let phi = Automorphism::new(GaussRat::one(), GaussRat::one(), l.q.scale(&c_inv), model)?;
            Ok(SubbundleClass::ImageOfO1(phi))
        }
        _ => Ok(SubbundleClass::LowDegree),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::gauss::rat;

    fn config3() -> ConeConfiguration {
        let g = GaussRat::from_int;
        ConeConfiguration::new(vec![g(0), g(1), g(-1)], vec![rat(1, 2); 3]).unwrap()
    }

    #[test]
    fn canonical_flag_shapes() {
        let c = config3();
        let f = canonical_flag(&c);
        let dirs: Vec<_> = f.iter().map(FlagLine::direction).collect();
        let g = GaussRat::from_int;
        assert_eq!(dirs, vec![(g(1), g(0)), (g(1), g(0)), (g(1), g(1))]);
        assert!(f.iter().all(FlagLine::is_transverse_to_second_summand));
        let c4 = ConeConfiguration::with_integer_points(vec![rat(3, 4); 4]).unwrap();
        assert_eq!(canonical_flag(&c4).iter().filter(|l| l.direction().1.is_zero()).count(), 3);
    }

    #[test]
    fn normalize_canonical_is_identity() {
        let c = config3();
        assert_eq!(normalize_flag(&canonical_flag(&c), &c).unwrap(), Automorphism::identity());
    }

    #[test]
    fn normalize_worked_example() {
        let c = config3();
        let flag = vec![
            FlagLine::from_ints(0, 1, 1).unwrap(),
            FlagLine::from_ints(1, 1, 2).unwrap(),
            FlagLine::from_ints(2, 1, 1).unwrap(),
        ];
        let phi = normalize_flag(&flag, &c).unwrap();
        assert_eq!(phi.p(), &Poly::from_ints(&[-1, -1]));
        assert_eq!(phi.apply_to_flag(&flag, &c), canonical_flag(&c));
    }

    #[test]
    fn normalize_rejects_degenerate() {
        let c = config3();
        let mut flag = canonical_flag(&c);
        flag[0] = FlagLine::from_ints(0, 0, 1).unwrap();
        assert_eq!(normalize_flag(&flag, &c), Err(ExactError::FlagDegenerate(0)));
        // All lines in O(1): a degree-1 subbundle (O(1) itself) contains them.
        let flat: Vec<_> = (0..3).map(|i| FlagLine::from_ints(i, 1, 0).unwrap()).collect();
        assert_eq!(normalize_flag(&flat, &c), Err(ExactError::FlagContainedInLine));
    }

    #[test]
    fn classify_examples() {
        let m = BundleModel::new(3).unwrap();
        assert_eq!(
            classify_line_subbundle(&LineSubbundle::second_summand(&m), &m).unwrap(),
            SubbundleClass::IsSecondSummand
        );
        let p = Poly::from_ints(&[2, -3]);
        let l = LineSubbundle::new(1, Poly::from_ints(&[1]), p.clone());
        match classify_line_subbundle(&l, &m).unwrap() {
            SubbundleClass::ImageOfO1(phi) => assert_eq!(phi.p(), &p),
            other => panic!("unexpected {other:?}"),
        }
        let bad = LineSubbundle::new(0, Poly::t(), Poly::t());
        assert_eq!(classify_line_subbundle(&bad, &m), Err(ExactError::InvalidSubbundle));
        let inconsistent = LineSubbundle::new(2, Poly::from_ints(&[1]), Poly::from_ints(&[1]));
        assert_eq!(classify_line_subbundle(&inconsistent, &m), Err(ExactError::InconsistentDegree(2)));
        let low = LineSubbundle::new(0, Poly::from_ints(&[0, 1]), Poly::from_ints(&[1, 0, 1]));
        assert_eq!(classify_line_subbundle(&low, &m).unwrap(), SubbundleClass::LowDegree);
    }

    #[test]
    fn compose_and_inverse() {
        let m = BundleModel::new(4).unwrap();
        let a = Automorphism::new(GaussRat::from_int(2), GaussRat::i(), Poly::from_ints(&[1, 0, 3]), &m).unwrap();
        assert_eq!(a.compose(&a.inverse()), Automorphism::identity());
        assert!(Automorphism::new(GaussRat::one(), GaussRat::one(), Poly::from_ints(&[0, 0, 0, 1]), &m).is_err());
    }
}
