//! Curvature, cone angle, area, transversality and path-independence checks.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::{bump, extrapolate, gauss_legendre};
use super::{DevelopingMap, MetricError, MetricField, PathChoice};

type C = Complex64;

/// Uniform grid on a square, minus points too close to cone points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: C,
    pub half_width: f64,
    pub nx: usize,
    pub ny: usize,
    pub clearance: f64,
}

impl GridSpec {
    /// Square centred at 0 reaching `0.5` beyond the farthest pole.
    pub fn around(poles: &[C], nx: usize, ny: usize, clearance: f64) -> Self {
        let reach = poles.iter().map(|p| p.norm()).fold(0.0, f64::max);
        Self { center: C::new(0.0, 0.0), half_width: reach + 0.5, nx, ny, clearance }
    }

    /// All nodes, row by row from the bottom.
    pub fn nodes(&self) -> Vec<C> {
        let coord = |k: usize, n: usize| {
            if n <= 1 {
                0.0
            } else {
                -self.half_width + 2.0 * self.half_width * k as f64 / (n - 1) as f64
            }
        };
        (0..self.ny)
            .flat_map(|j| (0..self.nx).map(move |i| (i, j)))
            .map(|(i, j)| self.center + C::new(coord(i, self.nx), coord(j, self.ny)))
            .collect()
    }

    /// Nodes split into kept and skipped by the clearance rule.
    pub fn split(&self, cones: &[C]) -> (Vec<C>, Vec<C>) {
        self.nodes().into_iter().partition(|z| clearance(*z, cones) >= self.clearance)
    }
}

fn clearance(z: C, cones: &[C]) -> f64 {
    cones.iter().map(|x| (z - x).norm()).fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureResult {
    pub max_deviation: f64,
    pub worst_point: C,
    pub points: usize,
    pub h: f64,
}

/// `max |K − 1|` with `K = −Δ log λ / λ²` from the five-point stencil of
/// spacing `h`. The harmonic part `Σ (α_i − 1) log|z − x_i|` is removed
/// before differencing.
pub fn curvature_check<M: MetricField>(field: &M, points: &[C], h: f64) -> Result<CurvatureResult, MetricError> {
    let cones = field.cone_points();
    let xs: Vec<C> = cones.iter().map(|c| c.0).collect();
    let required = 10.0 * h;
    for z in points {
        let cl = clearance(*z, &xs);
        if cl < required {
            return Err(MetricError::StencilTooCloseToPole { z: *z, clearance: cl, required });
        }
    }
    let harmonic = |w: C| cones.iter().map(|(x, a)| (a - 1.0) * (w - x).norm().ln()).sum::<f64>();
    let devs = points
        .par_iter()
        .map(|z| {
            let lam = field.stencil(*z, h)?;
            let pts = super::stencil_points(*z, h);
            let v: Vec<f64> = lam.iter().zip(&pts).map(|(l, w)| l.ln() - harmonic(*w)).collect();
            let lap = (v[1] + v[2] + v[3] + v[4] - 4.0 * v[0]) / (h * h);
            let k = -lap / (lam[0] * lam[0]);
            Ok(((k - 1.0).abs(), *z))
        })
        .collect::<Result<Vec<_>, MetricError>>()?;
    let (max_deviation, worst_point) =
        devs.into_iter().fold((0.0, C::new(f64::NAN, f64::NAN)), |acc, d| if d.0 > acc.0 { d } else { acc });
    Ok(CurvatureResult { max_deviation, worst_point, points: points.len(), h })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeAngleEstimate {
    pub index: usize,
    pub alpha: f64,
    pub estimate: f64,
    pub relative_error: f64,
    pub radii: Vec<f64>,
    /// `L(r) / (2π s(r))` per radius.
    pub ratios: Vec<f64>,
}

/// Exponents of the expected error terms of `L/(2π s)`.
fn ratio_exponents(alpha: f64, count: usize) -> Vec<f64> {
    let mut e = vec![2.0 * alpha, 1.0, 2.0, 4.0 * alpha, 1.0 + 2.0 * alpha, 3.0];
    e.sort_by(|a, b| a.total_cmp(b));
    e.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    e.truncate(count);
    e
}

/// Ray direction at cone point `i`: away from its nearest neighbour.
fn ray_direction(cones: &[(C, f64)], i: usize) -> C {
    let x = cones[i].0;
    cones
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .min_by(|a, b| (a.1 .0 - x).norm().total_cmp(&(b.1 .0 - x).norm()))
        .map_or(C::new(1.0, 0.0), |(_, (y, _))| (x - y) / (x - y).norm())
}

/// Estimates `α_i` from `L(r) / s(r) / 2π` extrapolated to `r → 0`.
///
/// `L(r)` is the trapezoid rule on the circle with `n_theta` nodes; `s(r)` is
/// the metric length of the ray segment of length `r`, by Gauss–Legendre in
/// `u = t^α` with `n_ray` nodes.
pub fn cone_angle_estimate<M: MetricField>(
    field: &M,
    index: usize,
    radii: &[f64],
    n_theta: usize,
    n_ray: usize,
) -> Result<ConeAngleEstimate, MetricError> {
    let cones = field.cone_points();
    let (x, alpha) = *cones.get(index).ok_or(MetricError::NoSuchPole(index))?;
    let nearest = cones
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != index)
        .map(|(_, (y, _))| (x - y).norm())
        .fold(f64::INFINITY, f64::min);
    let limit = 0.5 * nearest;
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r < limit)) {
        return Err(MetricError::RadiusTooLarge { index, radius: *r, limit });
    }
    if radii.len() < 2 {
        return Err(MetricError::TooFewRadii { needed: 2, got: radii.len() });
    }
    let u = ray_direction(&cones, index);
    let ratios = radii
        .par_iter()
        .map(|&r| {
            let circle: Vec<C> = (0..n_theta).map(|k| x + C::from_polar(r, TAU * k as f64 / n_theta as f64)).collect();
            let circumference = circle
                .par_iter()
                .map(|z| field.lambda_at(*z))
                .collect::<Result<Vec<_>, _>>()?
                .iter()
                .sum::<f64>()
                * TAU
                * r
                / n_theta as f64;
            let rule = gauss_legendre(n_ray, 0.0, r.powf(alpha));
            let radial = rule
                .par_iter()
                .map(|(v, w)| {
                    let t = v.powf(1.0 / alpha);
                    let dt = t / (alpha * v);
                    Ok(w * field.lambda_at(x + u * t)? * dt)
                })
                .collect::<Result<Vec<_>, MetricError>>()?
                .iter()
                .sum::<f64>();
            Ok(circumference / (TAU * radial))
        })
        .collect::<Result<Vec<f64>, MetricError>>()?;
    let estimate = extrapolate(radii, &ratios, &ratio_exponents(alpha, radii.len() - 1));
    Ok(ConeAngleEstimate {
        index,
        alpha,
        estimate,
        relative_error: (estimate - alpha).abs() / alpha,
        radii: radii.to_vec(),
        ratios,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaSpec {
    /// Radial nodes per region at the coarse level.
    pub n_radial: usize,
    /// Angular nodes per region at the coarse level.
    pub n_angular: usize,
    /// Allowed difference between the coarse and the doubled resolution.
    pub tol: f64,
}

impl Default for AreaSpec {
    fn default() -> Self {
        Self { n_radial: 48, n_angular: 96, tol: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaEstimate {
    pub area: f64,
    pub coarse: f64,
    /// `2π (2 − Σ (1 − α_i))`.
    pub gauss_bonnet: f64,
    pub relative_error: f64,
}

struct AreaLayout {
    cones: Vec<(C, f64, f64)>,
    inner: f64,
    outer: f64,
}

impl AreaLayout {
    fn new(cones: &[(C, f64)]) -> Self {
        let with_radius: Vec<(C, f64, f64)> = cones
            .iter()
            .enumerate()
            .map(|(i, (x, a))| {
                let d = cones
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, (y, _))| (x - y).norm())
                    .fold(f64::INFINITY, f64::min);
                (*x, *a, (d / 3.0).min(1.0))
            })
            .collect();
        let reach = with_radius.iter().map(|(x, _, r)| x.norm() + r).fold(1.0, f64::max);
        Self { cones: with_radius, inner: reach, outer: 2.0 * reach }
    }

    /// `1 − Σ χ_i` where `χ_i` cuts off the cone disks.
    fn regular_weight(&self, z: C) -> f64 {
        1.0 - self.cones.iter().map(|(x, _, r)| bump((z - x).norm(), 0.5 * r, *r)).sum::<f64>()
    }

    fn z_weight(&self, z: C) -> f64 {
        bump(z.norm(), self.inner, self.outer)
    }
}

fn area_once<M: MetricField>(field: &M, layout: &AreaLayout, nr: usize, nt: usize) -> Result<f64, MetricError> {
    let thetas: Vec<f64> = (0..nt).map(|k| TAU * k as f64 / nt as f64).collect();
    let dt = TAU / nt as f64;
    let mut total = 0.0;
    // cone disks in u = r^{2α}
    for (x, a, rho) in &layout.cones {
        let rule = gauss_legendre(nr, 0.0, rho.powf(2.0 * a));
        let part: f64 = rule
            .par_iter()
            .map(|(u, w)| {
                let r = u.powf(0.5 / a);
                let chi = bump(r, 0.5 * rho, *rho);
                if chi == 0.0 {
                    return Ok(0.0);
                }
                let jac = r * r / (2.0 * a * u);
                let s: f64 = field.ring(*x, r, nt)?.iter().map(|l| l * l).sum();
                Ok(w * chi * jac * s * dt)
            })
            .collect::<Result<Vec<f64>, MetricError>>()?
            .iter()
            .sum();
        total += part;
    }
    // |z| < outer, away from the cone disks
    let rule = gauss_legendre(nr, 0.0, layout.outer);
    let middle: f64 = rule
        .par_iter()
        .map(|(r, w)| {
            let weights: Vec<f64> =
                thetas.iter().map(|t| C::from_polar(*r, *t)).map(|z| layout.z_weight(z) * layout.regular_weight(z)).collect();
            if weights.iter().all(|v| *v == 0.0) {
                return Ok(0.0);
            }
            let s: f64 = field.ring(C::new(0.0, 0.0), *r, nt)?.iter().zip(&weights).map(|(l, v)| v * l * l).sum();
            Ok(w * r * s * dt)
        })
        .collect::<Result<Vec<f64>, MetricError>>()?
        .iter()
        .sum();
    total += middle;
    // w = 1/z chart, |w| < 1/inner, with λ_w = λ(1/w)/|w|²
    let rule = gauss_legendre(nr, 0.0, 1.0 / layout.inner);
    let far: f64 = rule
        .par_iter()
        .map(|(r, w)| {
            // the weight is radial, and the ring |z| = 1/r covers the same nodes
            let weight = 1.0 - layout.z_weight(C::new(1.0 / r, 0.0));
            if weight == 0.0 {
                return Ok(0.0);
            }
            let s: f64 = field.ring(C::new(0.0, 0.0), 1.0 / r, nt)?.iter().map(|l| l * l).sum();
            Ok(w * r * weight * s / (r * r * r * r) * dt)
        })
        .collect::<Result<Vec<f64>, MetricError>>()?
        .iter()
        .sum();
    Ok(total + far)
}

/// `∫ λ² dA` over the sphere, at the given and at doubled resolution.
pub fn area_estimate<M: MetricField>(field: &M, spec: &AreaSpec) -> Result<AreaEstimate, MetricError> {
    let cones = field.cone_points();
    let layout = AreaLayout::new(&cones);
    let coarse = area_once(field, &layout, spec.n_radial, spec.n_angular)?;
    let area = area_once(field, &layout, 2 * spec.n_radial, 2 * spec.n_angular)?;
    if !((area - coarse).abs() <= spec.tol * area.abs().max(1.0)) {
        return Err(MetricError::QuadratureNotConverged { coarse, fine: area });
    }
    let gauss_bonnet = TAU * (2.0 - cones.iter().map(|(_, a)| 1.0 - a).sum::<f64>());
    Ok(AreaEstimate { area, coarse, gauss_bonnet, relative_error: (area - gauss_bonnet).abs() / gauss_bonnet })
}

/// `(min λ, where)` over the probe grid.
pub fn transversality_check<M: MetricField>(field: &M, probes: &GridSpec) -> Result<(f64, C), MetricError> {
    let xs: Vec<C> = field.cone_points().iter().map(|c| c.0).collect();
    let (kept, _) = probes.split(&xs);
    let vals = kept.par_iter().map(|z| Ok((field.lambda_at(*z)?, *z))).collect::<Result<Vec<_>, MetricError>>()?;
    Ok(vals.into_iter().fold((f64::INFINITY, C::new(f64::NAN, f64::NAN)), |a, b| if b.0 < a.0 { b } else { a }))
}

/// Largest relative change of `λ` between the default path and the flipped
/// and loop-prefixed paths.
pub fn path_independence(map: &DevelopingMap, probes: &[C]) -> Result<f64, MetricError> {
    let n = map.data().n();
    let mut choices = vec![PathChoice::Flipped];
    choices.extend((0..n).map(PathChoice::AroundPole));
    let worst = probes
        .par_iter()
        .map(|z| {
            let base = map.develop(*z, PathChoice::Default)?.conformal_factor();
            let mut worst = 0.0f64;
            for c in &choices {
                let l = map.develop(*z, *c)?.conformal_factor();
                worst = worst.max((l - base).abs() / base);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>, MetricError>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub curvature: f64,
    pub cone_angle: f64,
    pub area: f64,
    pub path_independence: f64,
    pub lambda_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { curvature: 1e-4, cone_angle: 1e-3, area: 1e-2, path_independence: 1e-8, lambda_floor: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySpec {
    pub curvature_grid: GridSpec,
    pub h: f64,
    /// Radii as fractions of each cone point's loop radius.
    pub cone_radius_fractions: Vec<f64>,
    pub n_theta: usize,
    pub n_ray: usize,
    pub area: AreaSpec,
    pub probes: GridSpec,
    pub tolerances: Tolerances,
}

impl VerifySpec {
    pub fn for_poles(poles: &[C]) -> Self {
        Self {
            curvature_grid: GridSpec::around(poles, 21, 21, 0.1),
            h: 1e-3,
            cone_radius_fractions: vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0],
            n_theta: 64,
            n_ray: 24,
            area: AreaSpec::default(),
            probes: GridSpec::around(poles, 11, 11, 0.1),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub curvature: CurvatureResult,
    pub curvature_skipped: Vec<C>,
    pub cone_angles: Vec<ConeAngleEstimate>,
    pub area: AreaEstimate,
    pub path_independence: f64,
    pub transversality_min: f64,
    pub transversality_at: C,
    pub certificate_trusted: bool,
    pub tolerances: Tolerances,
}

impl VerificationReport {
    pub fn curvature_ok(&self) -> bool {
        self.curvature.max_deviation < self.tolerances.curvature
    }

    pub fn cone_angles_ok(&self) -> bool {
        self.cone_angles.iter().all(|c| c.relative_error < self.tolerances.cone_angle)
    }

    pub fn area_ok(&self) -> bool {
        (self.area.area - self.area.gauss_bonnet).abs() < self.tolerances.area
    }

    pub fn path_independence_ok(&self) -> bool {
        self.path_independence < self.tolerances.path_independence
    }

    pub fn transversality_ok(&self) -> bool {
        self.transversality_min > self.tolerances.lambda_floor
    }

    pub fn passed(&self) -> bool {
        self.certificate_trusted
            && self.curvature_ok()
            && self.cone_angles_ok()
            && self.area_ok()
            && self.path_independence_ok()
            && self.transversality_ok()
    }
}

/// Runs every check on a developing map.
pub fn verify(map: &DevelopingMap, spec: &VerifySpec) -> Result<VerificationReport, MetricError> {
    let poles = map.data().poles().to_vec();
    let (grid, curvature_skipped) = spec.curvature_grid.split(&poles);
    let curvature = curvature_check(map, &grid, spec.h)?;
    let cone_angles = (0..poles.len())
        .map(|i| {
            let rho = map.loops().radii[i];
            let radii: Vec<f64> = spec.cone_radius_fractions.iter().map(|f| f * rho).collect();
            cone_angle_estimate(map, i, &radii, spec.n_theta, spec.n_ray)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let area = area_estimate(map, &spec.area)?;
    let (probe_pts, _) = spec.probes.split(&poles);
    let path_pts: Vec<C> = probe_pts.iter().step_by(7).copied().collect();
    let path_independence = path_independence(map, &path_pts)?;
    let (transversality_min, transversality_at) = transversality_check(map, &spec.probes)?;
    Ok(VerificationReport {
        curvature,
        curvature_skipped,
        cone_angles,
        area,
        path_independence,
        transversality_min,
        transversality_at,
        certificate_trusted: map.trusted(),
        tolerances: spec.tolerances,
    })
}

/// `2π α` from the argument of a monodromy eigenvalue `−e^{±iπα}`.
pub fn angle_from_trace(trace: C) -> f64 {
    (-(trace.re / 2.0)).clamp(-1.0, 1.0).acos() / PI
}
