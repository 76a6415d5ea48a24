//! Hermitian forms preserved by a monodromy representation.
//!
//! A representation is unitarizable when every generator preserves a common
//! positive-definite Hermitian form `H`. The defect
//! `δ(H) = Σ ‖M_i† H M_i − H‖²_F` over det-normalized generators vanishes
//! exactly there. `H` ranges over det-1 forms written `H = S e^Y S` around
//! the current iterate `S²`, with `Y` trace-free Hermitian.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuchsian::{monodromy_generators, FuchsianError, MonodromyRep, SchwarzianData, TransportOptions};
use crate::mat2::Mat2;

pub mod search;

pub use search::{solve_unitarizing_parameters, NelderMeadOptions, SeedOutcome, SeedSpec, UnitarizedSolution};

type C = Complex64;

/// Default acceptance threshold for the defect.
pub const DELTA_ACCEPT: f64 = 1e-8;

/// Forms with entries beyond this are treated as running off to infinity.
const DIVERGENCE_BOUND: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitarizeError {
    #[error("matrix is not a positive-definite Hermitian form")]
    NotPositiveHermitian,
    #[error("singular generator {0}")]
    SingularGenerator(usize),
    #[error("no convergence after {iterations} iterations (defect {defect:e}, gradient {gradient:e})")]
    NoConvergence { iterations: usize, defect: f64, gradient: f64, h: HermitianForm },
    #[error("angles fail the admissibility gate: {0}")]
    Inadmissible(String),
    #[error("defect {best:e} above {accept:e} after all seeds")]
    NotUnitarizable { best: f64, accept: f64, seeds: Vec<SeedOutcome> },
    #[error(transparent)]
    Fuchsian(#[from] FuchsianError),
}

/// A det-1 positive-definite Hermitian 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitianForm {
    h: Mat2,
}

impl HermitianForm {
    pub fn identity() -> Self {
        Self { h: Mat2::identity() }
    }

    /// Hermitizes `m`, checks positivity and rescales to determinant 1.
    pub fn new(m: Mat2) -> Result<Self, UnitarizeError> {
        let scale = 1.0 + m.max_abs();
        if (m - m.adjoint()).max_abs() > 1e-10 * scale || !m.is_finite() {
            return Err(UnitarizeError::NotPositiveHermitian);
        }
        let h11 = m.a.re;
        let h22 = m.d.re;
        let h12 = 0.5 * (m.b + m.c.conj());
        let det = h11 * h22 - h12.norm_sqr();
        if !(h11 > 0.0 && det > 0.0) {
            return Err(UnitarizeError::NotPositiveHermitian);
        }
        let s = det.sqrt().recip();
        Ok(Self { h: Mat2::new(C::new(h11 * s, 0.0), h12 * s, h12.conj() * s, C::new(h22 * s, 0.0)) })
    }

    /// `e^Y` for `Y = y₁σ₁ + y₂σ₂ + y₃σ₃`.
    pub fn exp(y: [f64; 3]) -> Self {
        Self { h: exp_traceless(y) }
    }

    pub fn matrix(&self) -> Mat2 {
        self.h
    }

    /// Positive square root; also det 1.
    pub fn sqrt(&self) -> Mat2 {
        let t = (self.h.trace().re + 2.0).sqrt();
        (self.h + Mat2::identity()).scale_re(t.recip())
    }

    pub fn inverse(&self) -> Self {
        let h = self.h;
        Self { h: Mat2::new(h.d, -h.b, -h.c, h.a) }
    }

    /// The form preserved by `G M G⁻¹` when `M` preserves `self`:
    /// `G^{-†} H G^{-1}`, det-normalized.
    pub fn transformed_by(&self, g: &Mat2) -> Result<Self, UnitarizeError> {
        let gi = g.inverse().ok_or(UnitarizeError::NotPositiveHermitian)?;
        Self::new(gi.adjoint() * self.h * gi)
    }

    /// Hyperbolic distance proxy `‖H − K‖_F`.
    pub fn distance(&self, other: &HermitianForm) -> f64 {
        self.h.distance(&other.h)
    }
}

fn pauli() -> [Mat2; 3] {
    let z = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);
    [Mat2::new(z, one, one, z), Mat2::new(z, -i, i, z), Mat2::new(one, z, z, -one)]
}

fn exp_traceless(y: [f64; 3]) -> Mat2 {
    let theta = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
    let p = pauli();
    let yy = p[0].scale_re(y[0]) + p[1].scale_re(y[1]) + p[2].scale_re(y[2]);
    let sinhc = if theta < 1e-8 { 1.0 + theta * theta / 6.0 } else { theta.sinh() / theta };
    Mat2::identity().scale_re(theta.cosh()) + yy.scale_re(sinhc)
}

fn normalized_generators(rep: &MonodromyRep) -> Result<Vec<Mat2>, UnitarizeError> {
    rep.matrices
        .iter()
        .enumerate()
        .map(|(i, m)| {
            if m.det().norm() == 0.0 {
                Err(UnitarizeError::SingularGenerator(i))
            } else {
                Ok(m.det_normalized())
            }
        })
        .collect()
}

fn hermitian_residual(m: &Mat2, h: &Mat2) -> Mat2 {
    m.adjoint() * *h * *m - *h
}

/// `[r₁₁, r₂₂, √2 Re r₁₂, √2 Im r₁₂]`, whose squared norm is `‖R‖²_F`.
fn residual_entries(r: &Mat2) -> [f64; 4] {
    let s = std::f64::consts::SQRT_2;
    [r.a.re, r.d.re, s * r.b.re, s * r.b.im]
}

fn defect_normalized(ms: &[Mat2], h: &Mat2) -> f64 {
    ms.iter().map(|m| hermitian_residual(m, h).frobenius_sqr()).sum()
}

/// `δ(H)`; singular generators make it infinite.
pub fn defect_at(rep: &MonodromyRep, h: &HermitianForm) -> f64 {
    match normalized_generators(rep) {
        Ok(ms) => defect_normalized(&ms, &h.h),
        Err(_) => f64::INFINITY,
    }
}

/// `‖M_i† H M_i − H‖_F` per generator.
pub fn generator_residuals(rep: &MonodromyRep, h: &HermitianForm) -> Vec<f64> {
    match normalized_generators(rep) {
        Ok(ms) => ms.iter().map(|m| hermitian_residual(m, &h.h).frobenius()).collect(),
        Err(_) => vec![f64::INFINITY; rep.len()],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { grad_tol: 1e-12, max_iter: 10_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HMinimum {
    pub h: HermitianForm,
    pub defect: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
}

/// Local minimizer of `δ` from `H = I`.
pub fn minimize_over_h(rep: &MonodromyRep) -> Result<HMinimum, UnitarizeError> {
    minimize_over_h_from(rep, HermitianForm::identity(), &MinimizeOptions::default())
}

/// Levenberg–Marquardt on `δ` starting from `start`.
pub fn minimize_over_h_from(
    rep: &MonodromyRep,
    start: HermitianForm,
    opts: &MinimizeOptions,
) -> Result<HMinimum, UnitarizeError> {
    let ms = normalized_generators(rep)?;
    let basis = pauli();
    let mut h = start;
    let mut delta = defect_normalized(&ms, &h.h);
    let mut mu = 1e-3;
    let mut grad_norm = f64::INFINITY;
    for iter in 0..opts.max_iter {
        if delta == 0.0 {
            return Ok(HMinimum { h, defect: 0.0, gradient_norm: 0.0, iterations: iter });
        }
        let s = h.sqrt();
        let dirs: Vec<Mat2> = basis.iter().map(|p| s * *p * s).collect();
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for m in &ms {
            let r = residual_entries(&hermitian_residual(m, &h.h));
            let cols: Vec<[f64; 4]> = dirs.iter().map(|d| residual_entries(&hermitian_residual(m, d))).collect();
            for a in 0..3 {
                for k in 0..4 {
                    jtr[a] += cols[a][k] * r[k];
                }
                for b in 0..3 {
                    for k in 0..4 {
                        jtj[(a, b)] += cols[a][k] * cols[b][k];
                    }
                }
            }
        }
        grad_norm = 2.0 * jtr.norm();
        if grad_norm < opts.grad_tol {
            return Ok(HMinimum { h, defect: delta, gradient_norm: grad_norm, iterations: iter });
        }
        let mut improved = false;
        while mu < 1e16 {
            let mut lhs = jtj;
            for a in 0..3 {
                // Y² = |y|² I, so the second-order term of δ is δ·|y|²
                lhs[(a, a)] += delta + mu * (1.0 + jtj[(a, a)]);
            }
            let Some(step) = lhs.lu().solve(&(-jtr)) else {
                mu *= 10.0;
                continue;
            };
            let len = step.norm();
            let step = if len > 1.0 { step / len } else { step };
            let trial = HermitianForm::new(s * exp_traceless([step[0], step[1], step[2]]) * s);
            if let Ok(trial) = trial {
                let d = defect_normalized(&ms, &trial.h);
                if d < delta {
                    h = trial;
                    delta = d;
                    mu = (mu / 3.0).max(1e-12);
                    improved = true;
                    break;
                }
            }
            mu *= 10.0;
        }
        if !improved {
            // stationary to working precision
            return Ok(HMinimum { h, defect: delta, gradient_norm: grad_norm, iterations: iter });
        }
        if h.h.max_abs() > DIVERGENCE_BOUND {
            return Err(UnitarizeError::NoConvergence { iterations: iter + 1, defect: delta, gradient: grad_norm, h });
        }
    }
    Err(UnitarizeError::NoConvergence { iterations: opts.max_iter, defect: delta, gradient: grad_norm, h })
}

/// Conjugates every generator by `H^{1/2}`; the results are unitary when
/// `H` is preserved.
pub fn gauge_to_unitary(rep: &MonodromyRep, h: &HermitianForm) -> MonodromyRep {
    rep.conjugated(&h.sqrt())
}

/// Evidence that a representation preserves a Hermitian form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitarityCertificate {
    pub defect: f64,
    pub h: HermitianForm,
    pub residuals: Vec<f64>,
    /// `H^{1/2}`.
    pub gauge: Mat2,
    pub gauged: Vec<Mat2>,
    /// `max ‖M†M − I‖_F` of the det-normalized gauged generators.
    pub gauged_unitarity: f64,
    /// `‖H^{-1/2}‖²`, bounding `‖M†M − I‖ ≤ c·√δ`.
    pub gauge_constant: f64,
    pub max_commutator: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub delta_accept: f64,
}

impl UnitarityCertificate {
    pub fn accepted(&self) -> bool {
        self.defect.is_finite() && self.defect < self.delta_accept
    }

    /// Re-evaluates the certificate with a different form.
    pub fn with_form(rep: &MonodromyRep, h: HermitianForm, delta_accept: f64) -> Self {
        let m = HMinimum { h, defect: defect_at(rep, &h), gradient_norm: f64::NAN, iterations: 0 };
        Self::assemble(rep, m, true, delta_accept)
    }

    fn assemble(rep: &MonodromyRep, m: HMinimum, converged: bool, delta_accept: f64) -> Self {
        let gauged = gauge_to_unitary(rep, &m.h);
        let gauged_unitarity =
            gauged.matrices.iter().map(|g| g.det_normalized().unitarity_residual()).fold(0.0, f64::max);
        let gauge_constant = m.h.inverse().sqrt().frobenius_sqr();
        Self {
            defect: m.defect,
            h: m.h,
            residuals: generator_residuals(rep, &m.h),
            gauge: m.h.sqrt(),
            gauged: gauged.matrices,
            gauged_unitarity,
            gauge_constant,
            max_commutator: rep.max_commutator(),
            gradient_norm: m.gradient_norm,
            iterations: m.iterations,
            converged,
            delta_accept,
        }
    }
}

/// Minimizes `δ` over `H` for a given representation and packages the result.
/// Non-convergence still yields a certificate, marked unconverged.
pub fn certify(rep: &MonodromyRep, opts: &MinimizeOptions, delta_accept: f64) -> Result<UnitarityCertificate, UnitarizeError> {
    certify_from(rep, HermitianForm::identity(), opts, delta_accept)
}

pub fn certify_from(
    rep: &MonodromyRep,
    start: HermitianForm,
    opts: &MinimizeOptions,
    delta_accept: f64,
) -> Result<UnitarityCertificate, UnitarizeError> {
    match minimize_over_h_from(rep, start, opts) {
        Ok(m) => Ok(UnitarityCertificate::assemble(rep, m, true, delta_accept)),
        Err(UnitarizeError::NoConvergence { iterations, defect, gradient, h }) => {
            let m = HMinimum { h, defect, gradient_norm: gradient, iterations };
            Ok(UnitarityCertificate::assemble(rep, m, false, delta_accept))
        }
        Err(e) => Err(e),
    }
}

/// Solver settings shared by the defect evaluation and the parameter search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub transport: TransportOptions,
    pub minimize: MinimizeOptions,
    pub delta_accept: f64,
    pub basepoint: Option<C>,
    pub nelder_mead: NelderMeadOptions,
    pub seeds: SeedSpec,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            transport: TransportOptions::default(),
            minimize: MinimizeOptions::default(),
            delta_accept: DELTA_ACCEPT,
            basepoint: None,
            nelder_mead: NelderMeadOptions::default(),
            seeds: SeedSpec::default(),
        }
    }
}

/// Monodromy of `data` and its unitarity certificate.
pub fn unitarity_defect(
    data: &SchwarzianData,
    cfg: &SolverConfig,
) -> Result<(UnitarityCertificate, MonodromyRep), UnitarizeError> {
    let (rep, _) = monodromy_generators(data, cfg.basepoint, &cfg.transport)?;
    let cert = certify(&rep, &cfg.minimize, cfg.delta_accept)?;
    Ok((cert, rep))
}
