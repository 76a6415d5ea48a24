//! The spherical cone metric as the pullback of the round metric along the
//! developing map, and checks of its geometry.
//!
//! Solutions are continued from the basepoint `z₀` with `y1(z₀) = 0`,
//! `y1′(z₀) = 1`, `y2(z₀) = 1`, `y2′(z₀) = 0`, then moved into the unitary
//! frame `ỹ = H^{1/2} y`. The developing map is `f = ỹ1/ỹ2` and
//! `λ = 2|f′| / (1 + |f|²) = 2|W| / (|ỹ1|² + |ỹ2|²)` with `W` the Wronskian.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuchsian::{
    transport_from, DetourSide, FuchsianError, LoopSystem, MonodromyRep, SchwarzianData, TransportOptions,
    TransportPath,
};
use crate::mat2::Mat2;
use crate::unitarize::{HermitianForm, UnitarityCertificate};

pub mod checks;
pub mod quadrature;

pub use checks::{
    area_estimate, cone_angle_estimate, curvature_check, path_independence, transversality_check, verify,
    AreaEstimate, AreaSpec, ConeAngleEstimate, CurvatureResult, GridSpec, VerificationReport, VerifySpec,
};

type C = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("point {z} is {clearance:e} from a pole, below {required:e}")]
    TooCloseToPole { z: C, clearance: f64, required: f64 },
    #[error("stencil at {z} is {clearance:e} from a pole, below {required:e}")]
    StencilTooCloseToPole { z: C, clearance: f64, required: f64 },
    #[error("radius {radius:e} at cone point {index} exceeds {limit:e}")]
    RadiusTooLarge { index: usize, radius: f64, limit: f64 },
    #[error("need at least {needed} radii, got {got}")]
    TooFewRadii { needed: usize, got: usize },
    #[error("quadrature not converged: successive estimates {coarse} and {fine}")]
    QuadratureNotConverged { coarse: f64, fine: f64 },
    #[error("no pole with index {0}")]
    NoSuchPole(usize),
    #[error(transparent)]
    Fuchsian(#[from] FuchsianError),
}

/// Chart on the target sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    F,
    InvF,
}

impl Chart {
    pub fn tag(&self) -> &'static str {
        match self {
            Chart::F => "f",
            Chart::InvF => "1/f",
        }
    }
}

/// How to reach a target point from the basepoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum PathChoice {
    /// Straight segment, collinear poles passed on the right.
    #[default]
    Default,
    /// Straight segment, collinear poles passed on the left.
    Flipped,
    /// The loop around pole `k`, then the default path.
    AroundPole(usize),
}

impl PathChoice {
    pub fn id(&self) -> String {
        match self {
            PathChoice::Default => "default".into(),
            PathChoice::Flipped => "flipped".into(),
            PathChoice::AroundPole(k) => format!("loop{k}"),
        }
    }
}

/// Transported solutions at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DevelopedFrame {
    pub z: C,
    /// `(y1, y2)` before the unitary gauge.
    pub y: [C; 2],
    pub dy: [C; 2],
    /// `H^{1/2} (y1, y2)`.
    pub gauged: [C; 2],
    pub gauged_dy: [C; 2],
    /// `y1 y2′ − y1′ y2`; equals −1 at the basepoint.
    pub wronskian: C,
    pub chart: Chart,
    /// `ỹ1/ỹ2` in the `f` chart, `ỹ2/ỹ1` in the `1/f` chart.
    pub value: C,
    /// Derivative of `value`.
    pub derivative: C,
}

impl DevelopedFrame {
    /// Builds a frame from the fundamental matrix at `z` (columns are the
    /// solutions with data `e1`, `e2` at the basepoint).
    pub fn from_fundamental(z: C, phi: &Mat2, gauge: &Mat2) -> Self {
        let y = [phi.b, phi.a];
        let dy = [phi.d, phi.c];
        let g = gauge.apply(y);
        let gd = gauge.apply(dy);
        let wronskian = y[0] * dy[1] - dy[0] * y[1];
        let wg = g[0] * gd[1] - gd[0] * g[1];
        let (chart, value, derivative) = if g[0].norm() <= g[1].norm() {
            (Chart::F, g[0] / g[1], -wg / (g[1] * g[1]))
        } else {
            (Chart::InvF, g[1] / g[0], wg / (g[0] * g[0]))
        };
        Self { z, y, dy, gauged: g, gauged_dy: gd, wronskian, chart, value, derivative }
    }

    /// Developing value before the gauge, `y1/y2`; zero at the basepoint.
    pub fn raw_value(&self) -> C {
        self.y[0] / self.y[1]
    }

    /// Developing value in the unitary frame, possibly infinite.
    pub fn f(&self) -> C {
        match self.chart {
            Chart::F => self.value,
            Chart::InvF => self.value.inv(),
        }
    }

    pub fn conformal_factor(&self) -> f64 {
        conformal_factor(self.value, self.derivative)
    }

    /// The chart-free form `2|W| / |ỹ|²`.
    pub fn conformal_factor_symmetric(&self) -> f64 {
        let w = self.gauged[0] * self.gauged_dy[1] - self.gauged_dy[0] * self.gauged[1];
        2.0 * w.norm() / (self.gauged[0].norm_sqr() + self.gauged[1].norm_sqr())
    }

    /// The conformal factor evaluated in the other chart.
    pub fn conformal_factor_other_chart(&self) -> f64 {
        let g = self.gauged;
        let wg = g[0] * self.gauged_dy[1] - self.gauged_dy[0] * g[1];
        match self.chart {
            Chart::F => conformal_factor(g[1] / g[0], wg / (g[0] * g[0])),
            Chart::InvF => conformal_factor(g[0] / g[1], -wg / (g[1] * g[1])),
        }
    }
}

/// `2|f′| / (1 + |f|²)`; the same expression serves both charts.
pub fn conformal_factor(f: C, df: C) -> f64 {
    2.0 * df.norm() / (1.0 + f.norm_sqr())
}

/// One sampled point of the metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub z: C,
    pub lambda: f64,
    pub path: String,
    pub chart: Chart,
}

/// A conformal factor that can be sampled.
pub trait MetricField: Sync {
    fn lambda_at(&self, z: C) -> Result<f64, MetricError>;

    /// `λ` at `z, z+h, z−h, z+ih, z−ih`.
    fn stencil(&self, z: C, h: f64) -> Result<[f64; 5], MetricError> {
        let mut out = [0.0; 5];
        for (k, w) in stencil_points(z, h).iter().enumerate() {
            out[k] = self.lambda_at(*w)?;
        }
        Ok(out)
    }

    /// `λ` at `center + r e^{2πik/n}`, `k = 0..n`.
    fn ring(&self, center: C, r: f64, n: usize) -> Result<Vec<f64>, MetricError> {
        ring_points(center, r, n).into_iter().map(|z| self.lambda_at(z)).collect()
    }

    /// Cone points `(x, α)`.
    fn cone_points(&self) -> Vec<(C, f64)> {
        Vec::new()
    }
}

pub(crate) fn ring_points(center: C, r: f64, n: usize) -> Vec<C> {
    (0..n).map(|k| center + C::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64)).collect()
}

pub(crate) fn stencil_points(z: C, h: f64) -> [C; 5] {
    [z, z + h, z - h, z + C::new(0.0, h), z - C::new(0.0, h)]
}

/// A metric given by a closure, for oracles.
pub struct ExplicitMetric<F> {
    pub lambda: F,
    pub cones: Vec<(C, f64)>,
}

impl<F: Fn(C) -> f64 + Sync> MetricField for ExplicitMetric<F> {
    fn lambda_at(&self, z: C) -> Result<f64, MetricError> {
        Ok((self.lambda)(z))
    }

    fn cone_points(&self) -> Vec<(C, f64)> {
        self.cones.clone()
    }
}

/// The round metric `2/(1+|z|²)`.
pub fn round_metric() -> ExplicitMetric<fn(C) -> f64> {
    ExplicitMetric { lambda: |z: C| 2.0 / (1.0 + z.norm_sqr()), cones: Vec::new() }
}

/// Pullback of the round metric by `z ↦ (z − x)^α`.
pub fn model_cone(x: C, alpha: f64) -> ExplicitMetric<impl Fn(C) -> f64 + Sync> {
    ExplicitMetric {
        lambda: move |z: C| {
            let r = (z - x).norm();
            2.0 * alpha * r.powf(alpha - 1.0) / (1.0 + r.powf(2.0 * alpha))
        },
        cones: vec![(x, alpha)],
    }
}

/// Solved Schwarzian data together with the form that unitarizes it.
#[derive(Clone, Debug)]
pub struct DevelopingMap {
    data: SchwarzianData,
    h: HermitianForm,
    gauge: Mat2,
    loops: LoopSystem,
    opts: TransportOptions,
    trusted: bool,
}

impl DevelopingMap {
    /// `rep` fixes the basepoint the certificate refers to.
    pub fn new(
        data: SchwarzianData,
        certificate: &UnitarityCertificate,
        rep: &MonodromyRep,
        opts: TransportOptions,
    ) -> Result<Self, MetricError> {
        let loops = LoopSystem::new(data.poles(), Some(rep.basepoint))?;
        let opts = TransportOptions { min_clearance: 0.0, ..opts };
        Ok(Self {
            gauge: certificate.h.sqrt(),
            h: certificate.h,
            data,
            loops,
            opts,
            trusted: certificate.accepted(),
        })
    }

    /// Same map with a different Hermitian form.
    pub fn with_form(&self, h: HermitianForm) -> Self {
        Self { h, gauge: h.sqrt(), ..self.clone() }
    }

    pub fn data(&self) -> &SchwarzianData {
        &self.data
    }

    pub fn form(&self) -> &HermitianForm {
        &self.h
    }

    pub fn loops(&self) -> &LoopSystem {
        &self.loops
    }

    pub fn basepoint(&self) -> C {
        self.loops.basepoint
    }

    pub fn r_min(&self) -> f64 {
        self.loops.r_min
    }

    /// Whether the certificate behind the form was accepted.
    pub fn trusted(&self) -> bool {
        self.trusted
    }

    pub fn path_to(&self, z: C, choice: PathChoice) -> Result<TransportPath, MetricError> {
        let poles = self.data.poles();
        let z0 = self.loops.basepoint;
        Ok(match choice {
            PathChoice::Default => self.loops.path_between(poles, z0, z, DetourSide::Right),
            PathChoice::Flipped => self.loops.path_between(poles, z0, z, DetourSide::Left),
            PathChoice::AroundPole(k) => {
                if k >= poles.len() {
                    return Err(MetricError::NoSuchPole(k));
                }
                self.loops.loop_path(poles, k).then(&self.loops.path_between(poles, z0, z, DetourSide::Right))
            }
        })
    }

    /// Frame at `z`, which must keep `r_min` from the poles.
    pub fn develop(&self, z: C, choice: PathChoice) -> Result<DevelopedFrame, MetricError> {
        self.develop_with_clearance(z, choice, self.loops.r_min)
    }

    /// Frame at `z` with a caller-chosen clearance requirement.
    pub fn develop_with_clearance(&self, z: C, choice: PathChoice, required: f64) -> Result<DevelopedFrame, MetricError> {
        let clearance = self.data.distance_to_poles(z);
        if !(clearance >= required) || clearance == 0.0 {
            return Err(MetricError::TooCloseToPole { z, clearance, required });
        }
        let phi = self.fundamental_at(z, choice)?;
        Ok(DevelopedFrame::from_fundamental(z, &phi, &self.gauge))
    }

    fn fundamental_at(&self, z: C, choice: PathChoice) -> Result<Mat2, MetricError> {
        let path = self.path_to(z, choice)?;
        Ok(transport_from(&self.data, &path, &self.opts, Mat2::identity())?)
    }

    /// Frames at `z` and at the ends of the straight segments `z → w`.
    pub fn develop_around(&self, z: C, targets: &[C]) -> Result<(DevelopedFrame, Vec<DevelopedFrame>), MetricError> {
        let phi = self.fundamental_at(z, PathChoice::Default)?;
        let center = DevelopedFrame::from_fundamental(z, &phi, &self.gauge);
        let others = targets
            .iter()
            .map(|w| {
                let path = TransportPath::from_pieces(z, vec![crate::fuchsian::Piece::Line { from: z, to: *w }]);
                let p = transport_from(&self.data, &path, &self.opts, phi)?;
                Ok(DevelopedFrame::from_fundamental(*w, &p, &self.gauge))
            })
            .collect::<Result<Vec<_>, MetricError>>()?;
        Ok((center, others))
    }

    pub fn sample(&self, z: C, choice: PathChoice) -> Result<MetricSample, MetricError> {
        let frame = self.develop(z, choice)?;
        Ok(MetricSample { z, lambda: frame.conformal_factor(), path: choice.id(), chart: frame.chart })
    }
}

impl MetricField for DevelopingMap {
    fn lambda_at(&self, z: C) -> Result<f64, MetricError> {
        Ok(self.develop_with_clearance(z, PathChoice::Default, 0.0)?.conformal_factor())
    }

    /// Neighbours are transported from the centre frame, so that transport
    /// error is common to all five values.
    fn stencil(&self, z: C, h: f64) -> Result<[f64; 5], MetricError> {
        let pts = stencil_points(z, h);
        let (c, others) = self.develop_around(z, &pts[1..])?;
        Ok([
            c.conformal_factor(),
            others[0].conformal_factor(),
            others[1].conformal_factor(),
            others[2].conformal_factor(),
            others[3].conformal_factor(),
        ])
    }

    /// Consecutive ring points are joined by arcs.
    fn ring(&self, center: C, r: f64, n: usize) -> Result<Vec<f64>, MetricError> {
        let pts = ring_points(center, r, n);
        let mut phi = self.fundamental_at(pts[0], PathChoice::Default)?;
        let mut out = Vec::with_capacity(n);
        out.push(DevelopedFrame::from_fundamental(pts[0], &phi, &self.gauge).conformal_factor());
        let step = std::f64::consts::TAU / n as f64;
        for (k, z) in pts.iter().enumerate().skip(1) {
            let arc = crate::fuchsian::Piece::Arc { center, radius: r, start: step * (k - 1) as f64, sweep: step };
            phi = transport_from(&self.data, &TransportPath::from_pieces(pts[k - 1], vec![arc]), &self.opts, phi)?;
            out.push(DevelopedFrame::from_fundamental(*z, &phi, &self.gauge).conformal_factor());
        }
        Ok(out)
    }

    fn cone_points(&self) -> Vec<(C, f64)> {
        self.data.poles().iter().copied().zip(self.data.angles().iter().copied()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conformal_factor_values() {
        assert_eq!(conformal_factor(C::new(0.0, 0.0), C::new(1.0, 0.0)), 2.0);
        assert_eq!(conformal_factor(C::new(1.0, 0.0), C::new(1.0, 0.0)), 1.0);
    }

    #[test]
    fn basepoint_frame_normalization() {
        let f = DevelopedFrame::from_fundamental(C::new(2.0, 0.0), &Mat2::identity(), &Mat2::identity());
        assert_eq!(f.raw_value(), C::new(0.0, 0.0));
        assert_eq!(f.chart, Chart::F);
        assert_eq!(f.derivative, C::new(1.0, 0.0));
        assert_eq!(f.wronskian, C::new(-1.0, 0.0));
        assert_eq!(f.conformal_factor(), 2.0);
    }

    #[test]
    fn chart_consistency_near_unit_circle() {
        let phi = Mat2::new(C::new(1.0, 0.2), C::new(0.9, -0.3), C::new(0.3, 0.1), C::new(0.5, 0.5));
        let phi = phi.det_normalized();
        let g = HermitianForm::exp([0.1, 0.2, -0.1]).sqrt();
        let f = DevelopedFrame::from_fundamental(C::new(0.0, 0.0), &phi, &g);
        let (a, b, s) = (f.conformal_factor(), f.conformal_factor_other_chart(), f.conformal_factor_symmetric());
        assert!((a - b).abs() < 1e-10 * a && (a - s).abs() < 1e-12 * a, "{a} {b} {s}");
    }
}
