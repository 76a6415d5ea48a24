//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spherecone::exact::{
    canonical_flag, check_angle_stability, check_gauss_bonnet, is_parabolically_stable, normalize_flag,
    parabolic_degree_total, rat, residue_degree_sum, splitting_type_from_invariants, tangency_count,
    weights_from_angles, Automorphism, BundleModel,
};
use spherecone::fuchsian::{monodromy_generators, solve_accessory_constraints};
use spherecone::metric::{verify, DevelopingMap, VerifySpec};
use spherecone::unitarize::{
    defect_at, minimize_over_h, minimize_over_h_from, solve_unitarizing_parameters, unitarity_defect,
    HermitianForm, MinimizeOptions, UnitarizeError,
};
use spherecone::{SolverConfig, TransportOptions};

use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = budget.is_none_or(|b| elapsed <= b);
    let pass = out.pass && in_time;
    let budget_note = budget.map_or(String::new(), |b| format!(" (budget {:.0}s)", b.as_secs_f64()));
    println!(
        "{} {name}: {} [{:.2}s{budget_note}]",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64()
    );
    pass
}

fn exact_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut total, mut disagreements, mut stable) = (0, 0, 0);
    for _ in 0..1000 {
        let n = rng.gen_range(3..=7);
        let config = random_config(&mut rng, n);
        let w = weights_from_angles(config.angles()).unwrap();
        let s = is_parabolically_stable(&canonical_flag(&config), &w, &config).unwrap();
        let expected = check_gauss_bonnet(&config) && check_angle_stability(&config);
        total += 1;
        stable += s as usize;
        disagreements += (s != expected) as usize;
    }
    Outcome {
        pass: disagreements == 0 && total >= 1000,
        detail: format!("{total} tuples, {stable} stable, {disagreements} disagreements"),
    }
}

fn degree_sums() -> (usize, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut total, mut nonzero, mut residue_bad) = (0, 0, 0);
    for n in 3..=12 {
        for _ in 0..100 {
            let angles: Vec<_> = (0..n).map(|_| random_angle(&mut rng)).collect();
            let w = weights_from_angles(&angles).unwrap();
            total += 1;
            nonzero += !parabolic_degree_total(n, &w).is_zero() as usize;
            residue_bad += (residue_degree_sum(&w) != rat(n as i64, 1)) as usize;
        }
    }
    (total, nonzero, residue_bad)
}

fn flag_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut tested, mut failures, mut attempts) = (0, 0, 0);
    while tested < 200 && attempts < 10_000 {
        attempts += 1;
        let n = rng.gen_range(3..=7);
        let config = random_config(&mut rng, n);
        let flag = random_flag(&mut rng, n);
        let Ok(phi) = normalize_flag(&flag, &config) else {
            continue;
        };
        tested += 1;
        let image = phi.apply_to_flag(&flag, &config);
        let exact = image.iter().zip(&canonical_flag(&config)).all(|(a, b)| a.is_spanned_by(&b.direction()));
        let mut s = random_gauss(&mut rng, 3);
        if s.is_zero() {
            s = spherecone::GaussRat::one();
        }
        let model = BundleModel::new(n).unwrap();
        let other = Automorphism::new(phi.lambda1() * &s, s.clone(), phi.p().scale(&s), &model).unwrap();
        let other_maps = other.apply_to_flag(&flag, &config).iter().zip(&image).all(|(a, b)| a.is_spanned_by(&b.direction()));
        let scalar = other.compose(&phi.inverse()).is_scalar();
        failures += (!(exact && other_maps && scalar)) as usize;
    }
    Outcome {
        pass: tested >= 200 && failures == 0,
        detail: format!("{tested} flags normalized exactly, {failures} failures, scalar ambiguity checked"),
    }
}

fn n3_monodromy() -> Outcome {
    let data = solve_accessory_constraints(&standard_triple(), &[0.5; 3], &[]).unwrap();
    match monodromy_generators(&data, None, &TransportOptions::default()) {
        Ok((rep, _)) => {
            let chk = rep.check(data.angles());
            Outcome {
                pass: chk.max_det() < 1e-9 && chk.max_trace() < 1e-6 && chk.product_residual < 1e-8,
                detail: format!(
                    "max|det-1| {:.2e}, max|tr| {:.2e}, product {:.2e}",
                    chk.max_det(),
                    chk.max_trace(),
                    chk.product_residual
                ),
            }
        }
        Err(e) => Outcome { pass: false, detail: e.to_string() },
    }
}

fn n3_unitarization() -> Outcome {
    let data = solve_accessory_constraints(&standard_triple(), &[0.5; 3], &[]).unwrap();
    let beta = data.accessory().to_vec();
    match unitarity_defect(&data, &SolverConfig::default()) {
        Ok((cert, _)) => Outcome {
            pass: cert.defect < 1e-8,
            detail: format!(
                "delta {:.2e}, beta ({:.4}, {:.4}, {:.4})",
                cert.defect, beta[0].re, beta[1].re, beta[2].re
            ),
        },
        Err(e) => Outcome { pass: false, detail: e.to_string() },
    }
}

fn n4_unitarization() -> Outcome {
    let angles = vec![rat(3, 4); 4];
    match solve_unitarizing_parameters(&symmetric_quad(), &angles, &SolverConfig::default()) {
        Ok(sol) => {
            let best = sol.seeds[0].free[0];
            let agreeing = sol
                .seeds
                .iter()
                .filter(|s| s.defect < 1e-6 && (s.free[0] - best).norm() < 1e-5)
                .count();
            let oracle = c(0.0, -7.0 / 32.0);
            Outcome {
                pass: sol.certificate.defect < 1e-6 && agreeing >= 3,
                detail: format!(
                    "delta {:.2e}, beta4 {:.8}{:+.8}i (|beta4 + 7i/32| = {:.1e}), {agreeing}/{} seeds agree",
                    sol.certificate.defect,
                    best.re,
                    best.im,
                    (best - oracle).norm(),
                    sol.seeds.len()
                ),
            }
        }
        Err(e) => Outcome { pass: false, detail: e.to_string() },
    }
}

fn n3_metric() -> Outcome {
    let poles = standard_triple();
    let data = solve_accessory_constraints(&poles, &[0.5; 3], &[]).unwrap();
    let cfg = SolverConfig::default();
    let (cert, rep) = match unitarity_defect(&data, &cfg) {
        Ok(x) => x,
        Err(e) => return Outcome { pass: false, detail: e.to_string() },
    };
    let map = match DevelopingMap::new(data, &cert, &rep, cfg.transport) {
        Ok(m) => m,
        Err(e) => return Outcome { pass: false, detail: e.to_string() },
    };
    let spec = VerifySpec::for_poles(&poles);
    match verify(&map, &spec) {
        Ok(r) => {
            let worst_angle = r.cone_angles.iter().map(|a| a.relative_error).fold(0.0, f64::max);
            Outcome {
                pass: r.curvature_ok() && r.cone_angles_ok() && r.area_ok() && r.path_independence_ok(),
                detail: format!(
                    "max|K-1| {:.2e} (h {:.0e}, {} points), cone angle rel err {:.2e}, area {:.6} vs {:.6}, path {:.2e}, min lambda {:.3}",
                    r.curvature.max_deviation,
                    r.curvature.h,
                    r.curvature.points,
                    worst_angle,
                    r.area.area,
                    r.area.gauss_bonnet,
                    r.path_independence,
                    r.transversality_min
                ),
            }
        }
        Err(e) => Outcome { pass: false, detail: e.to_string() },
    }
}

fn tangency() -> Outcome {
    let bad = (3..=50)
        .filter(|&n| tangency_count(-(n - 2), 1, n) != 0 || splitting_type_from_invariants(n, -(n - 2)).ok() != Some((1, n - 1)))
        .count();
    Outcome { pass: bad == 0, detail: format!("n = 3..50, {bad} failures") }
}

fn negative_controls() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_oracle = 0.0f64;
    let mut worst_form = 0.0f64;
    for n in 3..=6 {
        let g = random_gl2(&mut rng);
        let rep = conjugated_su2_rep(&mut rng, n, &g);
        let known = HermitianForm::identity().transformed_by(&g).unwrap();
        match minimize_over_h(&rep) {
            Ok(m) => {
                worst_oracle = worst_oracle.max(m.defect);
                worst_form = worst_form.max(m.h.distance(&known));
            }
            Err(_) => worst_oracle = f64::INFINITY,
        }
        worst_oracle = worst_oracle.max(defect_at(&rep, &known));
    }

    let rep = hyperbolic_rep();
    let mut best_bad = f64::INFINITY;
    for _ in 0..10 {
        let y: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.5..1.5));
        let d = match minimize_over_h_from(&rep, HermitianForm::exp(y), &MinimizeOptions::default()) {
            Ok(m) => m.defect,
            Err(UnitarizeError::NoConvergence { defect, .. }) => defect,
            Err(_) => f64::NAN,
        };
        best_bad = best_bad.min(d);
    }
    Outcome {
        pass: worst_oracle < 1e-16 && worst_form < 1e-6 && best_bad >= 1e-3,
        detail: format!(
            "oracle max delta {worst_oracle:.2e}, form error {worst_form:.2e}; non-unitarizable min delta {best_bad:.3e} over 10 restarts"
        ),
    }
}

fn main() -> ExitCode {
    let (total, nonzero, residue_bad) = degree_sums();
    let results = [
        run("exact equivalence", Some(Duration::from_secs(10)), exact_equivalence),
        run("parabolic degree", None, || Outcome {
            pass: nonzero == 0,
            detail: format!("{total} configurations (n = 3..12), {nonzero} nonzero"),
        }),
        run("flag normalization round trip", None, flag_round_trip),
        run("monodromy certificates n=3", Some(Duration::from_secs(30)), n3_monodromy),
        run("unitarization n=3", None, n3_unitarization),
        run("unitarization n=4", Some(Duration::from_secs(600)), n4_unitarization),
        run("metric verification n=3", None, n3_metric),
        run("residue degree", None, || Outcome {
            pass: residue_bad == 0,
            detail: format!("{total} configurations (n = 3..12), {residue_bad} with sum != n"),
        }),
        run("tangency arithmetic", None, tangency),
        run("negative controls", None, negative_controls),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
