//! Pipeline stages and the report they fill in.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spherecone::exact::{
    canonical_flag, check_angle_stability, check_gauss_bonnet, max_destabilizing_degree, normalize_flag,
    parabolic_degree_total, residue_degree_sum, splitting_type_from_invariants, tangency_count,
    weights_from_angles, angle_stability_violation, Poly, WitnessKind,
};
use spherecone::fuchsian::{monodromy_generators, LocalModel};
use spherecone::metric::checks::Tolerances;
use spherecone::metric::{verify, AreaSpec, GridSpec, PathChoice, VerifySpec};
use spherecone::unitarize::{solve_unitarizing_parameters, SeedOutcome};
use spherecone::{
    DevelopingMap, MonodromyRep, Rational, SchwarzianData, TransportOptions, UnitarityCertificate,
    UnitarizeError, VerificationReport,
};

use crate::config::{Job, MobiusNote};
use crate::CliError;

type C = Complex64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub cli_version: String,
    pub core_version: String,
    pub seed: u64,
    pub mobius: Option<MobiusNote>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: String,
    pub degree: i64,
    pub parabolic_degree: String,
    pub p: Vec<String>,
    pub q: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagCertificate {
    /// `Φ = [[λ1, 0], [P, 1]]` sending the flag to the canonical one.
    pub lambda1: String,
    pub p: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactSection {
    pub n: usize,
    pub points: Vec<String>,
    pub angles: Vec<String>,
    pub defect_sum: String,
    pub gauss_bonnet: bool,
    pub angle_stability: bool,
    pub angle_violation: Option<usize>,
    pub weights: Vec<[String; 2]>,
    pub parabolic_degree_total: String,
    pub residue_degree_sum: String,
    pub stable: bool,
    pub max_parabolic_degree: String,
    pub witness: Witness,
    pub flag_certificate: Option<FlagCertificate>,
    pub splitting_type: [i64; 2],
    pub tangency_count: i64,
    pub admissible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSection {
    pub accessory: Vec<C>,
    pub free: Vec<C>,
    pub constraint_residuals: [f64; 3],
    pub defect: f64,
    pub delta_accept: f64,
    pub accepted: bool,
    pub converged: bool,
    pub basepoint: C,
    pub ordering: Vec<usize>,
    pub traces: Vec<C>,
    pub expected_traces: Vec<f64>,
    pub max_det_residual: f64,
    pub product_residual: f64,
    pub gauged_unitarity: f64,
    pub max_commutator: f64,
    pub seeds: Vec<SeedOutcome>,
    pub symmetry: Option<String>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationSection {
    /// Defect of the stored form against the recomputed monodromy.
    pub recomputed_defect: f64,
    pub certificate_accepted: bool,
    pub constraint_residuals: [f64; 3],
    pub report: Option<VerificationReport>,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkipNote {
    pub z: C,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingSection {
    pub file: String,
    pub grid: GridSpec,
    pub rows: usize,
    pub skipped: Vec<SkipNote>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub provenance: Provenance,
    pub exact: ExactSection,
    pub solver: Option<SolverSection>,
    pub verification: Option<VerificationSection>,
    pub sampling: Option<SamplingSection>,
}

/// Everything needed to rebuild the metric without solving again.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolvedArtifact {
    pub config_hash: String,
    pub data: SchwarzianData,
    pub certificate: UnitarityCertificate,
    pub basepoint: C,
    pub transport: TransportOptions,
}

impl SolvedArtifact {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("solved artifact {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }
}

fn poly_strings(p: &Poly) -> Vec<String> {
    p.coeffs().iter().map(|c| c.to_string()).collect()
}

fn exact_section(job: &Job) -> Result<ExactSection, CliError> {
    let cone = &job.cone;
    let n = cone.n();
    let invalid = |e: spherecone::ExactError| CliError::InvalidConfiguration(e.to_string());
    let weights = weights_from_angles(cone.angles()).map_err(invalid)?;
    let flag = canonical_flag(cone);
    let report = max_destabilizing_degree(&flag, &weights, cone).map_err(invalid)?;
    let w = &report.witness;
    let kind = match &w.kind {
        WitnessKind::SecondSummand => "O(n-1)".to_string(),
        WitnessKind::DegreeOneOmitting { omitted } => format!("degree 1 through all flag lines except {omitted}"),
        WitnessKind::DegreeOneThroughAll => "degree 1 through all flag lines".to_string(),
    };
    let flag_certificate = normalize_flag(&flag, cone)
        .ok()
        .map(|phi| FlagCertificate { lambda1: phi.lambda1().to_string(), p: poly_strings(phi.p()) });
    let defects: Rational = cone.angles().iter().map(|a| Rational::from_integer(1.into()) - a).sum();
    let gb = check_gauss_bonnet(cone);
    let st = check_angle_stability(cone);
    let ni = n as i64;
    let (a, b) = splitting_type_from_invariants(ni, -(ni - 2)).map_err(invalid)?;
    Ok(ExactSection {
        n,
        points: cone.points().iter().map(|p| p.to_string()).collect(),
        angles: cone.angles().iter().map(|a| a.to_string()).collect(),
        defect_sum: defects.to_string(),
        gauss_bonnet: gb,
        angle_stability: st,
        angle_violation: angle_stability_violation(cone),
        weights: weights.pairs().iter().map(|p| [p.a1.to_string(), p.a2.to_string()]).collect(),
        parabolic_degree_total: parabolic_degree_total(n, &weights).to_string(),
        residue_degree_sum: residue_degree_sum(&weights).to_string(),
        stable: report.max < Rational::from_integer(0.into()),
        max_parabolic_degree: report.max.to_string(),
        witness: Witness {
            kind,
            degree: w.subbundle.degree(),
            parabolic_degree: w.parabolic_degree.to_string(),
            p: poly_strings(w.subbundle.p()),
            q: poly_strings(w.subbundle.q()),
        },
        flag_certificate,
        splitting_type: [a, b],
        tangency_count: tangency_count(-(ni - 2), 1, ni),
        admissible: gb && st,
    })
}

fn provenance(job: &Job) -> Provenance {
    Provenance {
        config_hash: job.hash.clone(),
        cli_version: env!("CARGO_PKG_VERSION").to_string(),
        core_version: spherecone::VERSION.to_string(),
        seed: job.config.solver.seed,
        mobius: job.mobius.clone(),
    }
}

/// Exact checks only.
pub fn run_check(job: &Job) -> Result<PipelineReport, CliError> {
    Ok(PipelineReport {
        provenance: provenance(job),
        exact: exact_section(job)?,
        solver: None,
        verification: None,
        sampling: None,
    })
}

/// Largest `k` such that rotation by `2π/k` about the centroid permutes the
/// points and preserves the angles.
fn rotational_symmetry(poles: &[C], angles: &[Rational]) -> Option<(usize, C)> {
    let n = poles.len();
    let centroid = poles.iter().sum::<C>() / n as f64;
    let scale = poles.iter().map(|p| (p - centroid).norm()).fold(0.0, f64::max).max(1.0);
    (2..=n).rev().find_map(|k| {
        let rot = C::from_polar(1.0, std::f64::consts::TAU / k as f64);
        let ok = poles.iter().zip(angles).all(|(p, a)| {
            let q = centroid + (p - centroid) * rot;
            poles.iter().zip(angles).any(|(r, b)| (q - r).norm() < 1e-12 * scale && a == b)
        });
        ok.then_some((k, centroid))
    })
}

fn solver_section(
    data: &SchwarzianData,
    rep: &MonodromyRep,
    cert: &UnitarityCertificate,
    seeds: Vec<SeedOutcome>,
    symmetry: Option<String>,
    failure: Option<String>,
) -> SolverSection {
    let chk = rep.check(data.angles());
    SolverSection {
        accessory: data.accessory().to_vec(),
        free: data.free_parameters().to_vec(),
        constraint_residuals: data.constraint_residuals(),
        defect: cert.defect,
        delta_accept: cert.delta_accept,
        accepted: cert.accepted(),
        converged: cert.converged,
        basepoint: rep.basepoint,
        ordering: rep.ordering.clone(),
        traces: rep.matrices.iter().map(|m| m.trace()).collect(),
        expected_traces: data.local_models().iter().map(LocalModel::expected_trace).collect(),
        max_det_residual: chk.max_det(),
        product_residual: chk.product_residual,
        gauged_unitarity: cert.gauged_unitarity,
        max_commutator: cert.max_commutator,
        seeds,
        symmetry,
        failure,
    }
}

/// Outcome of a stage that may stop the pipeline with a nonzero exit code.
pub struct Stage<T> {
    pub report: PipelineReport,
    pub value: Option<T>,
    pub code: u8,
}

/// Exact checks, then the accessory-parameter search.
pub fn run_solve(job: &Job) -> Result<Stage<SolvedArtifact>, CliError> {
    let mut report = run_check(job)?;
    if !report.exact.admissible {
        return Ok(Stage { report, value: None, code: crate::EXIT_INADMISSIBLE });
    }
    let poles = job.poles();
    let cfg = job.solver_config();
    let symmetry = rotational_symmetry(&poles, job.cone.angles()).map(|(k, c)| {
        format!("configuration invariant under rotation by 2pi/{k} about {c}; the solution is unique, so it inherits this symmetry")
    });
    match solve_unitarizing_parameters(&poles, job.cone.angles(), &cfg) {
        Ok(sol) => {
            report.solver = Some(solver_section(&sol.data, &sol.rep, &sol.certificate, sol.seeds, symmetry, None));
            let artifact = SolvedArtifact {
                config_hash: job.hash.clone(),
                data: sol.data,
                certificate: sol.certificate,
                basepoint: sol.rep.basepoint,
                transport: cfg.transport,
            };
            Ok(Stage { report, value: Some(artifact), code: 0 })
        }
        Err(UnitarizeError::NotUnitarizable { best, accept, seeds }) => {
            let failure = format!("best defect {best:e} did not reach {accept:e}");
            let best_seed = &seeds[0];
            let data = spherecone::fuchsian::solve_accessory_constraints(&poles, &job.cone.angles_f64(), &best_seed.free)?;
            let (rep, _) = monodromy_generators(&data, cfg.basepoint, &cfg.transport)?;
            let cert = UnitarityCertificate::with_form(
                &rep,
                spherecone::unitarize::minimize_over_h(&rep).map(|m| m.h).unwrap_or_else(|_| spherecone::HermitianForm::identity()),
                accept,
            );
            report.solver = Some(solver_section(&data, &rep, &cert, seeds, symmetry, Some(failure)));
            Ok(Stage { report, value: None, code: crate::EXIT_SOLVER })
        }
        Err(e) => Err(e.into()),
    }
}

fn verify_spec(job: &Job, poles: &[C]) -> VerifySpec {
    let v = &job.config.verify;
    VerifySpec {
        curvature_grid: GridSpec::around(poles, v.curvature_grid[0], v.curvature_grid[1], v.clearance),
        h: v.h,
        probes: GridSpec::around(poles, v.probes[0], v.probes[1], v.clearance),
        tolerances: Tolerances {
            curvature: v.curvature_tol,
            cone_angle: v.cone_angle_tol,
            area: v.area_tol,
            path_independence: v.path_tol,
            lambda_floor: v.lambda_floor,
        },
        area: AreaSpec::default(),
        ..VerifySpec::for_poles(poles)
    }
}

fn developing_map(solved: &SolvedArtifact) -> Result<(DevelopingMap, UnitarityCertificate), CliError> {
    let (rep, _) = monodromy_generators(&solved.data, Some(solved.basepoint), &solved.transport)?;
    let cert = UnitarityCertificate::with_form(&rep, solved.certificate.h, solved.certificate.delta_accept);
    let map = DevelopingMap::new(solved.data.clone(), &cert, &rep, solved.transport)?;
    Ok((map, cert))
}

fn check_hash(job: &Job, solved: &SolvedArtifact) -> Result<(), CliError> {
    if solved.config_hash != job.hash {
        return Err(CliError::Usage(format!(
            "solved artifact belongs to config {} but this config hashes to {}",
            solved.config_hash, job.hash
        )));
    }
    Ok(())
}

/// Full geometric verification of a solved artifact.
pub fn run_verify(job: &Job, solved: &SolvedArtifact) -> Result<Stage<()>, CliError> {
    check_hash(job, solved)?;
    let mut report = run_check(job)?;
    let (map, cert) = developing_map(solved)?;
    let poles = job.poles();
    let outcome = verify(&map, &verify_spec(job, &poles));
    let (vr, error) = match outcome {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let passed = cert.accepted() && vr.as_ref().is_some_and(VerificationReport::passed);
    report.verification = Some(VerificationSection {
        recomputed_defect: cert.defect,
        certificate_accepted: cert.accepted(),
        constraint_residuals: solved.data.constraint_residuals(),
        report: vr,
        passed,
        error,
    });
    let code = if passed { 0 } else { crate::EXIT_VERIFY };
    Ok(Stage { report, value: Some(()), code })
}

/// Grid of `λ` values written as CSV.
pub fn export_grid(job: &Job, solved: &SolvedArtifact, path: &Path) -> Result<SamplingSection, CliError> {
    check_hash(job, solved)?;
    let (map, _) = developing_map(solved)?;
    let poles = job.poles();
    let g = &job.config.grid;
    let mut grid = GridSpec::around(&poles, g.width, g.height, g.skip_radius);
    if let Some([x, y]) = g.center {
        grid.center = C::new(x, y);
    }
    if let Some(hw) = g.half_width {
        grid.half_width = hw;
    }
    let nodes = grid.nodes();
    let rows: Vec<Result<(C, f64, &'static str), SkipNote>> = nodes
        .par_iter()
        .map(|&z| {
            map.develop_with_clearance(z, PathChoice::Default, g.skip_radius)
                .map(|fr| (z, fr.conformal_factor(), fr.chart.tag()))
                .map_err(|e| SkipNote { z, reason: e.to_string() })
        })
        .collect();

    let mut csv = String::from("re z,im z,lambda,chart\n");
    let mut skipped = Vec::new();
    let mut written = 0;
    for row in rows {
        match row {
            Ok((z, lambda, chart)) => {
                writeln!(csv, "{:.16e},{:.16e},{:.16e},{chart}", z.re, z.im, lambda).expect("string write");
                written += 1;
            }
            Err(note) => skipped.push(note),
        }
    }
    std::fs::write(path, csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(SamplingSection { file: path.display().to_string(), grid, rows: written, skipped })
}
