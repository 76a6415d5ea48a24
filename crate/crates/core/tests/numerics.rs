mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spherecone::exact::rat;
use spherecone::fuchsian::{monodromy_generators, solve_accessory_constraints, transport, Piece, TransportPath};
use spherecone::metric::{path_independence, DevelopingMap, PathChoice};
use spherecone::unitarize::{
    certify, defect_at, minimize_over_h, solve_unitarizing_parameters, unitarity_defect, HermitianForm,
    MinimizeOptions,
};
use spherecone::{Mat2, SolverConfig, TransportOptions};

use common::*;

#[test]
fn transports_have_unit_determinant() {
    let poles = [c(0.3, -0.2), c(-1.1, 0.9), c(0.4, 1.3), c(-0.7, -1.0)];
    let data = solve_accessory_constraints(&poles, &[0.6, 0.7, 0.55, 0.8], &[c(0.1, -0.3)]).unwrap();
    let opts = TransportOptions::default();
    for (a, b) in [(c(2.0, 0.0), c(-2.0, 0.5)), (c(0.0, 0.0), c(1.5, -1.5)), (c(-0.2, 0.4), c(0.9, 0.9))] {
        let path = TransportPath::from_pieces(a, vec![Piece::Line { from: a, to: b }]);
        let t = transport(&data, &path, &opts).unwrap();
        assert!((t.det() - 1.0).norm() < 1e-9, "{a} -> {b}: det {}", t.det());
    }
}

#[test]
fn n3_monodromy_relations() {
    let data = solve_accessory_constraints(&standard_triple(), &[0.5; 3], &[]).unwrap();
    let (rep, _) = monodromy_generators(&data, None, &TransportOptions::default()).unwrap();
    let chk = rep.check(data.angles());
    assert!(chk.max_det() < 1e-9);
    assert!(chk.max_trace() < 1e-6);
    assert!(chk.product_residual < 1e-8);
}

#[test]
fn defect_is_invariant_under_unitary_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = random_gl2(&mut rng);
    let rep = conjugated_su2_rep(&mut rng, 4, &g);
    let h = HermitianForm::exp([0.3, -0.1, 0.2]);
    for _ in 0..10 {
        let u = random_su2(&mut rng);
        let moved = defect_at(&rep.conjugated(&u), &h.transformed_by(&u).unwrap());
        let base = defect_at(&rep, &h);
        assert!((moved - base).abs() <= 1e-10 * base.max(1.0), "{moved} vs {base}");
    }
}

#[test]
fn oracle_recovers_known_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let g = random_gl2(&mut rng);
        let rep = conjugated_su2_rep(&mut rng, 5, &g);
        let known = HermitianForm::identity().transformed_by(&g).unwrap();
        let found = minimize_over_h(&rep).unwrap();
        assert!(found.defect < 1e-16, "defect {}", found.defect);
        assert!(found.h.distance(&known) < 1e-6);
    }
}

#[test]
fn hyperbolic_representation_is_rejected() {
    let rep = hyperbolic_rep();
    let cert = certify(&rep, &MinimizeOptions::default(), 1e-8).unwrap();
    assert!(!cert.accepted());
    assert!(cert.defect >= 1e-3);
}

#[test]
fn gauged_generators_are_unitary() {
    let data = solve_accessory_constraints(&standard_triple(), &[0.5; 3], &[]).unwrap();
    let (cert, _) = unitarity_defect(&data, &SolverConfig::default()).unwrap();
    assert!(cert.accepted());
    assert!(cert.gauged_unitarity < 1e-6);
    for m in &cert.gauged {
        assert!((m.adjoint() * *m).distance(&Mat2::identity()) < 1e-6);
    }
}

fn n3_map() -> DevelopingMap {
    let data = solve_accessory_constraints(&standard_triple(), &[0.5; 3], &[]).unwrap();
    let cfg = SolverConfig::default();
    let (cert, rep) = unitarity_defect(&data, &cfg).unwrap();
    DevelopingMap::new(data, &cert, &rep, cfg.transport).unwrap()
}

#[test]
fn metric_is_path_independent() {
    let map = n3_map();
    let probes = [c(0.5, 0.5), c(-0.4, -0.6), c(1.5, 0.2), c(-1.6, 1.1), c(0.1, -0.3)];
    let diff = path_independence(&map, &probes).unwrap();
    assert!(diff < 1e-8, "{diff}");
}

#[test]
fn developing_map_changes_by_monodromy_only() {
    let map = n3_map();
    let z = c(0.5, 0.5);
    let a = map.develop(z, PathChoice::Default).unwrap();
    let b = map.develop(z, PathChoice::AroundPole(1)).unwrap();
    assert!((a.f() - b.f()).norm() > 1e-3, "non-homotopic paths should move f");
    assert!((a.conformal_factor() - b.conformal_factor()).abs() < 1e-8 * a.conformal_factor());
}

#[test]
fn charts_agree() {
    let map = n3_map();
    for z in [c(0.5, 0.5), c(-0.7, 0.3), c(2.5, -1.0)] {
        let fr = map.develop(z, PathChoice::Default).unwrap();
        let (l1, l2) = (fr.conformal_factor(), fr.conformal_factor_other_chart());
        assert!((l1 - l2).abs() < 1e-10 * l1, "{l1} vs {l2}");
    }
}

#[test]
fn lambda_is_gauge_invariant_across_seeds() {
    let poles = symmetric_quad();
    let angles = vec![rat(3, 4); 4];
    let mut cfg = SolverConfig::default();
    let sol = solve_unitarizing_parameters(&poles, &angles, &cfg).unwrap();
    let map = DevelopingMap::new(sol.data.clone(), &sol.certificate, &sol.rep, cfg.transport).unwrap();

    cfg.seeds.rng_seed = 99;
    cfg.seeds.grid = 1;
    let other = solve_unitarizing_parameters(&poles, &angles, &cfg).unwrap();
    let map2 = DevelopingMap::new(sol.data, &other.certificate, &sol.rep, cfg.transport).unwrap();
    for z in [c(0.3, 0.2), c(-0.5, 0.6), c(1.7, 1.1)] {
        let l1 = map.develop(z, PathChoice::Default).unwrap().conformal_factor();
        let l2 = map2.develop(z, PathChoice::Default).unwrap().conformal_factor();
        assert!((l1 - l2).abs() < 1e-7, "{l1} vs {l2}");
    }
}
