//! Job configuration (TOML).

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use spherecone::exact::ConeConfiguration;
use spherecone::{GaussRat, Rational};

use crate::CliError;

/// A point as written in the file: a real number, `"inf"`, or `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Real(String),
    Complex([String; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    /// Local error tolerance of the transport integrator.
    pub tol: f64,
    pub delta_accept: f64,
    pub seed: u64,
    pub grid_seeds: usize,
    pub random_seeds: usize,
    pub max_evals: usize,
    pub restarts: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let cfg = spherecone::SolverConfig::default();
        Self {
            tol: cfg.transport.tol,
            delta_accept: cfg.delta_accept,
            seed: cfg.seeds.rng_seed,
            grid_seeds: cfg.seeds.grid,
            random_seeds: cfg.seeds.random,
            max_evals: cfg.nelder_mead.max_evals,
            restarts: cfg.nelder_mead.restarts,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub width: usize,
    pub height: usize,
    /// Defaults to a square around all marked points.
    pub center: Option<[f64; 2]>,
    pub half_width: Option<f64>,
    /// Nodes closer than this to a marked point are dropped.
    pub skip_radius: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { width: 41, height: 41, center: None, half_width: None, skip_radius: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub curvature_grid: [usize; 2],
    pub clearance: f64,
    pub h: f64,
    pub probes: [usize; 2],
    pub curvature_tol: f64,
    pub cone_angle_tol: f64,
    pub area_tol: f64,
    pub path_tol: f64,
    pub lambda_floor: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        let t = spherecone::metric::checks::Tolerances::default();
        Self {
            curvature_grid: [21, 21],
            clearance: 0.1,
            h: 1e-3,
            probes: [11, 11],
            curvature_tol: t.curvature,
            cone_angle_tol: t.cone_angle,
            area_tol: t.area,
            path_tol: t.path_independence,
            lambda_floor: t.lambda_floor,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub report: String,
    pub grid: String,
    pub solved: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), report: "report.json".into(), grid: "grid.csv".into(), solved: "solved.json".into() }
    }
}

/// Contents of a job file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub points: Vec<PointSpec>,
    /// Cone angles as fractions of `2π`, written `"p/q"`.
    pub angles: Vec<String>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Möbius change of coordinates applied when a point is at infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusNote {
    /// `z ↦ 1/(z − c)`.
    pub map: String,
    pub c: [String; 2],
    pub infinite_index: usize,
}

/// A validated job: exact configuration plus options.
#[derive(Clone, Debug)]
pub struct Job {
    pub config: JobConfig,
    pub cone: ConeConfiguration,
    pub mobius: Option<MobiusNote>,
    pub hash: String,
}

impl JobConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(self) -> Result<Job, CliError> {
        let s = &self.solver;
        let positive = [s.tol, s.delta_accept, self.verify.h, self.verify.clearance, self.grid.skip_radius];
        if positive.iter().any(|t| !(*t > 0.0)) {
            return Err(CliError::InvalidConfiguration("tolerances must be positive".into()));
        }
        if self.grid.width == 0 || self.grid.height == 0 {
            return Err(CliError::InvalidConfiguration("grid must have at least one node per side".into()));
        }
        let angles = self.angles.iter().map(|a| parse_fraction(a)).collect::<Result<Vec<_>, _>>()?;
        let raw = self.points.iter().map(parse_point).collect::<Result<Vec<_>, _>>()?;
        let (points, mobius) = normalize_infinity(raw)?;
        let cone = ConeConfiguration::new(points, angles).map_err(|e| CliError::InvalidConfiguration(e.to_string()))?;
        let hash = config_hash(&self);
        Ok(Job { config: self, cone, mobius, hash })
    }
}

/// SHA-256 of the canonical JSON form of the points, angles and solver
/// settings; grid, verification and output settings do not affect a solve.
pub fn config_hash(config: &JobConfig) -> String {
    let key = (&config.points, &config.angles, &config.solver);
    let canonical = serde_json::to_vec(&key).expect("config serializes");
    let digest = Sha256::digest(&canonical);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// `"p/q"` only.
pub fn parse_fraction(s: &str) -> Result<Rational, CliError> {
    let t = s.trim();
    if !t.contains('/') && t.parse::<BigInt>().is_err() {
        return Err(CliError::Parse(format!("angle {s:?} must be an exact fraction p/q")));
    }
    Rational::from_str(t).map_err(|_| CliError::Parse(format!("bad fraction {s:?}")))
}

/// A fraction `p/q` or a decimal such as `-0.125` or `2.5e-3`, read exactly.
pub fn parse_real(s: &str) -> Result<Rational, CliError> {
    let t = s.trim();
    let bad = || CliError::Parse(format!("bad number {s:?}"));
    if t.contains('/') {
        return Rational::from_str(t).map_err(|_| bad());
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(k) => (&t[..k], t[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let all: String = format!("{int_part}{frac_part}");
    if all.is_empty() || !all.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let num = BigInt::from_str(&all).map_err(|_| bad())?;
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if shift >= 0 {
        Rational::from_integer(num * ten.pow(shift as u32))
    } else {
        Rational::new(num, ten.pow((-shift) as u32))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

fn parse_point(p: &PointSpec) -> Result<Option<GaussRat>, CliError> {
    match p {
        PointSpec::Real(s) if matches!(s.trim().to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") => Ok(None),
        PointSpec::Real(s) => Ok(Some(GaussRat::new(parse_real(s)?, Rational::zero()))),
        PointSpec::Complex([re, im]) => Ok(Some(GaussRat::new(parse_real(re)?, parse_real(im)?))),
    }
}

/// Gaussian integers by increasing norm, then argument: 0, 1, i, −1, −i, 1+i, …
fn gaussian_candidates() -> impl Iterator<Item = GaussRat> {
    (0i64..).flat_map(|r| {
        let mut ring: Vec<(i64, i64)> = (-r..=r)
            .flat_map(|a| (-r..=r).map(move |b| (a, b)))
            .filter(|&(a, b)| a.abs().max(b.abs()) == r)
            .collect();
        ring.sort_by(|x, y| {
            let key = |p: &(i64, i64)| (p.0 * p.0 + p.1 * p.1, (p.1 as f64).atan2(p.0 as f64).rem_euclid(std::f64::consts::TAU).to_bits());
            key(x).cmp(&key(y))
        });
        ring.into_iter().map(|(a, b)| GaussRat::new(Rational::from_integer(a.into()), Rational::from_integer(b.into())))
    })
}

/// Sends a point at infinity to 0 with `z ↦ 1/(z − c)`.
fn normalize_infinity(raw: Vec<Option<GaussRat>>) -> Result<(Vec<GaussRat>, Option<MobiusNote>), CliError> {
    let infinite: Vec<usize> = raw.iter().enumerate().filter(|(_, p)| p.is_none()).map(|(i, _)| i).collect();
    match infinite.as_slice() {
        [] => Ok((raw.into_iter().map(|p| p.expect("finite")).collect(), None)),
        [k] => {
            let finite: Vec<&GaussRat> = raw.iter().flatten().collect();
            let c = gaussian_candidates().find(|c| !finite.contains(&c)).expect("infinitely many candidates");
            let points = raw
                .iter()
                .map(|p| match p {
                    None => GaussRat::zero(),
                    Some(z) => (z - &c).inv().expect("c avoids the points"),
                })
                .collect();
            let note = MobiusNote {
                map: "z -> 1/(z - c)".into(),
                c: [c.re.to_string(), c.im.to_string()],
                infinite_index: *k,
            };
            Ok((points, Some(note)))
        }
        _ => Err(CliError::InvalidConfiguration("at most one point may be at infinity".into())),
    }
}

impl Job {
    pub fn poles(&self) -> Vec<num_complex::Complex64> {
        self.cone.points_f64()
    }

    pub fn solver_config(&self) -> spherecone::SolverConfig {
        let s = &self.config.solver;
        let mut cfg = spherecone::SolverConfig::default();
        cfg.transport.tol = s.tol;
        cfg.delta_accept = s.delta_accept;
        cfg.seeds.rng_seed = s.seed;
        cfg.seeds.grid = s.grid_seeds;
        cfg.seeds.random = s.random_seeds;
        cfg.nelder_mead.max_evals = s.max_evals;
        cfg.nelder_mead.restarts = s.restarts;
        cfg
    }

    pub fn output_path(&self, name: &str) -> PathBuf {
        self.config.output.dir.join(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use spherecone::exact::rat;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_real("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_real("-2.5e-1").unwrap(), rat(-1, 4));
        assert_eq!(parse_real("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_real("12").unwrap(), rat(12, 1));
        assert!(parse_real("1.2.3").is_err());
        assert!(parse_fraction("0.5").is_err());
    }

    #[test]
    fn infinity_is_moved() {
        let cfg = JobConfig::from_toml("points = [\"0\", \"1\", \"inf\"]\nangles = [\"1/2\", \"1/2\", \"1/2\"]").unwrap();
        let job = cfg.validate().unwrap();
        let note = job.mobius.unwrap();
        assert_eq!(note.infinite_index, 2);
        assert_eq!(note.c, ["0".to_string(), "1".to_string()]);
        assert!(job.cone.points()[2].is_zero());
    }

    #[test]
    fn duplicates_rejected() {
        let cfg = JobConfig::from_toml("points = [\"0\", \"0.0\", \"1\"]\nangles = [\"1/2\", \"1/2\", \"1/2\"]").unwrap();
        assert!(matches!(cfg.validate(), Err(CliError::InvalidConfiguration(_))));
    }
}
