use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FuchsianError;

type C = Complex64;

/// Tolerance on the normalized regularity-at-infinity residuals.
pub const EPS_LIN: f64 = 1e-12;

/// Rational quadratic differential
/// `Q(z) = Σ [(1−α_i²)/(2(z−x_i)²) + β_i/(z−x_i)]`
/// with accessory parameters `β_i` chosen so that `Q = O(z⁻⁴)` at infinity.
///
/// Two independent solutions of `y″ + (Q/2) y = 0` have ratio with Schwarzian
/// derivative `Q`; this is the projective form of the logarithmic connection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchwarzianData {
    poles: Vec<C>,
    angles: Vec<f64>,
    accessory: Vec<C>,
}

impl SchwarzianData {
    /// Validates pole separation, angle range and the three moment
    /// constraints.
    pub fn new(poles: Vec<C>, angles: Vec<f64>, accessory: Vec<C>) -> Result<Self, FuchsianError> {
        validate_poles(&poles, &angles)?;
        if accessory.len() != poles.len() {
            return Err(FuchsianError::InvalidData(format!(
                "{} accessory parameters for {} poles",
                accessory.len(),
                poles.len()
            )));
        }
        let data = Self { poles, angles, accessory };
        let res = data.constraint_residuals();
        if res.iter().any(|r| !(*r < EPS_LIN)) {
            return Err(FuchsianError::ConstraintViolation(res));
        }
        Ok(data)
    }

    /// Skips the moment-constraint check; used for negative controls that
    /// deliberately break regularity at infinity.
    pub fn new_unchecked(poles: Vec<C>, angles: Vec<f64>, accessory: Vec<C>) -> Self {
        Self { poles, angles, accessory }
    }

    pub fn n(&self) -> usize {
        self.poles.len()
    }

    pub fn poles(&self) -> &[C] {
        &self.poles
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn accessory(&self) -> &[C] {
        &self.accessory
    }

    /// The `n − 3` free coordinates (`β_4, …, β_n`).
    pub fn free_parameters(&self) -> &[C] {
        &self.accessory[3..]
    }

    /// Residuals of `Σβ_i`, `Σ(β_i x_i + (1−α_i²)/2)`, `Σ(β_i x_i² + (1−α_i²)x_i)`,
    /// each divided by `1 + Σ|terms|`.
    pub fn constraint_residuals(&self) -> [f64; 3] {
        let mut sums = [C::new(0.0, 0.0); 3];
        let mut scales = [1.0; 3];
        for ((x, a), b) in self.poles.iter().zip(&self.angles).zip(&self.accessory) {
            let c = 1.0 - a * a;
            let terms = [*b, b * x + c / 2.0, b * x * x + x * c];
            for k in 0..3 {
                sums[k] += terms[k];
                scales[k] += terms[k].norm();
            }
        }
        [sums[0].norm() / scales[0], sums[1].norm() / scales[1], sums[2].norm() / scales[2]]
    }

    /// `Q(z)`. Fails at a pole.
    pub fn q(&self, z: C) -> Result<C, FuchsianError> {
        let mut acc = C::new(0.0, 0.0);
        for ((x, a), b) in self.poles.iter().zip(&self.angles).zip(&self.accessory) {
            let dz = z - x;
            if dz.norm() == 0.0 {
                return Err(FuchsianError::EvaluationAtPole(z));
            }
            let inv = dz.inv();
            acc += (1.0 - a * a) * 0.5 * inv * inv + b * inv;
        }
        Ok(acc)
    }

    /// `Q(z)` without the pole check, for the integrator's inner loop.
    pub(crate) fn q_unchecked(&self, z: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for ((x, a), b) in self.poles.iter().zip(&self.angles).zip(&self.accessory) {
            let inv = (z - x).inv();
            acc += (1.0 - a * a) * 0.5 * inv * inv + b * inv;
        }
        acc
    }

    /// Smallest distance between two poles.
    pub fn min_pole_separation(&self) -> f64 {
        min_separation(&self.poles)
    }

    /// Distance from `z` to the nearest pole.
    pub fn distance_to_poles(&self, z: C) -> f64 {
        self.poles.iter().map(|x| (z - x).norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn local_models(&self) -> Vec<LocalModel> {
        self.angles.iter().enumerate().map(|(i, &a)| LocalModel::new(i, a)).collect()
    }

    /// Copy with new accessory parameters (unchecked).
    pub fn with_accessory(&self, accessory: Vec<C>) -> Self {
        Self { poles: self.poles.clone(), angles: self.angles.clone(), accessory }
    }
}

pub(crate) fn min_separation(poles: &[C]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..poles.len() {
        for j in i + 1..poles.len() {
            best = best.min((poles[i] - poles[j]).norm());
        }
    }
    best
}

fn validate_poles(poles: &[C], angles: &[f64]) -> Result<(), FuchsianError> {
    if poles.len() < 3 {
        return Err(FuchsianError::InvalidData(format!("need at least 3 poles, got {}", poles.len())));
    }
    if poles.len() != angles.len() {
        return Err(FuchsianError::InvalidData(format!("{} poles but {} angles", poles.len(), angles.len())));
    }
    if let Some((i, a)) = angles.iter().enumerate().find(|(_, a)| !(**a > 0.0 && **a < 1.0)) {
        return Err(FuchsianError::InvalidData(format!("angle {a} at pole {i} outside (0, 1)")));
    }
    if poles.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
        return Err(FuchsianError::InvalidData("non-finite pole".into()));
    }
    if !(min_separation(poles) > 0.0) {
        return Err(FuchsianError::InvalidData("poles are not distinct".into()));
    }
    Ok(())
}

/// Solves the moment constraints for `β_1, β_2, β_3` given the free values
/// `β_4, …, β_n`. The 3×3 system is the Vandermonde matrix of the first three
/// poles, hence invertible.
pub fn solve_accessory_constraints(poles: &[C], angles: &[f64], free: &[C]) -> Result<SchwarzianData, FuchsianError> {
    validate_poles(poles, angles)?;
    let n = poles.len();
    if free.len() != n - 3 {
        return Err(FuchsianError::InvalidData(format!("expected {} free parameters, got {}", n - 3, free.len())));
    }
    let mut rhs = Vector3::<C>::zeros();
    for (x, a) in poles.iter().zip(angles) {
        let c = 1.0 - a * a;
        rhs[1] -= C::new(c / 2.0, 0.0);
        rhs[2] -= x * c;
    }
    for (x, b) in poles[3..].iter().zip(free) {
        rhs[0] -= b;
        rhs[1] -= b * x;
        rhs[2] -= b * x * x;
    }
    let one = C::new(1.0, 0.0);
    let [x1, x2, x3] = [poles[0], poles[1], poles[2]];
    let m = Matrix3::new(one, one, one, x1, x2, x3, x1 * x1, x2 * x2, x3 * x3);
    let sol = m.lu().solve(&rhs).ok_or(FuchsianError::SingularConstraintSystem)?;
    if sol.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(FuchsianError::SingularConstraintSystem);
    }
    let mut beta = vec![sol[0], sol[1], sol[2]];
    beta.extend_from_slice(free);
    SchwarzianData::new(poles.to_vec(), angles.to_vec(), beta)
}

/// Local model at a pole: exponents `ρ∓ = (1 ∓ α)/2`, whose difference `α` is
/// never an integer. The `ρ−` eigenline is the flag line and solutions
/// behave like `t^{ρ±}`, so the developing map is locally `t^α` up to a
/// Möbius map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalModel {
    pub index: usize,
    pub rho_minus: f64,
    pub rho_plus: f64,
}

impl LocalModel {
    pub fn new(index: usize, alpha: f64) -> Self {
        Self { index, rho_minus: (1.0 - alpha) / 2.0, rho_plus: (1.0 + alpha) / 2.0 }
    }

    /// Leaf exponent `α = ρ+ − ρ−`.
    pub fn alpha(&self) -> f64 {
        self.rho_plus - self.rho_minus
    }

    pub fn is_non_resonant(&self) -> bool {
        let d = self.alpha();
        (d - d.round()).abs() > 1e-12
    }

    /// Local monodromy eigenvalues `e^{2πiρ∓} = e^{iπ(1∓α)}`.
    pub fn monodromy_eigenvalues(&self) -> [C; 2] {
        let tau = std::f64::consts::TAU;
        [C::from_polar(1.0, tau * self.rho_minus), C::from_polar(1.0, tau * self.rho_plus)]
    }

    /// `−2 cos(πα)`.
    pub fn expected_trace(&self) -> f64 {
        -2.0 * (std::f64::consts::PI * self.alpha()).cos()
    }
}
