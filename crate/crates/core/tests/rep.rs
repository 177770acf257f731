use std::f64::consts::PI;

use nalgebra::DMatrix;
use ncglue::models;
use ncglue::parse::parse_element;
use ncglue::rep::{
    build_representation, classical_circle_check, evaluate_element_matrix, faithfulness_probe, random_sphere_element,
    relation_residuals, spectral_report, RepError, RepKind,
};
use ncglue::Element;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;

fn close(a: Complex64, b: f64) -> bool {
    (a - Complex64::new(b, 0.0)).norm() < TOL
}

#[test]
fn matrix_examples() {
    let d = build_representation(RepKind::Disc, 0.5, 0.5, 0.0, 8).unwrap();
    assert!(close(d.letter("x")[(1, 0)], 0.5f64.sqrt()));
    assert!(close(d.letter("x")[(0, 0)], 0.0));
    let s1 = build_representation(RepKind::Sphere1, 0.5, 0.3, 0.0, 8).unwrap();
    assert!(close(s1.letter("f0")[(0, 0)], 0.0));
    assert!(close(s1.letter("f0")[(1, 1)], 0.5));
    let c = build_representation(RepKind::CirclePoint, 0.5, 0.5, 0.0, 1).unwrap();
    assert!(close(c.letter("f1")[(0, 0)], 1.0));
}

#[test]
fn invalid_parameters() {
    assert!(matches!(build_representation(RepKind::Disc, 0.5, 0.5, 0.0, 3), Err(RepError::InvalidParams(_))));
    assert!(build_representation(RepKind::Sphere1, 1.5, 0.5, 0.0, 8).is_err());
    assert!(build_representation(RepKind::Sphere2, 0.5, 0.0, 0.0, 8).is_err());
}

#[test]
fn element_evaluation() {
    let s = models::sphere_pq();
    let el = |x: &str| parse_element(&s.alphabet, x).unwrap();
    let s1 = build_representation(RepKind::Sphere1, 0.4, 0.6, 0.0, 16).unwrap();
    let s2 = build_representation(RepKind::Sphere2, 0.4, 0.6, 0.0, 16).unwrap();
    let one = evaluate_element_matrix(&Element::one(&s.alphabet), &s1).unwrap();
    assert_eq!(one, DMatrix::identity(16, 16));
    let k = evaluate_element_matrix(&el("f1 fm1 - f0"), &s1).unwrap();
    assert!(k.view((0, 0), (15, 15)).iter().all(|z| z.norm() < TOL));
    assert_eq!(evaluate_element_matrix(&el("f0"), &s2).unwrap(), DMatrix::identity(16, 16));
    // 1 - ρ1(f0) is invertible on the interior, 1 - ρ2(f0) vanishes
    let c1 = evaluate_element_matrix(&el("1 - f0"), &s1).unwrap();
    assert!((0..15).all(|i| c1[(i, i)].norm() > 1e-6));
    assert!(evaluate_element_matrix(&el("1 - f0"), &s2).unwrap().iter().all(|z| z.norm() == 0.0));
}

#[test]
fn residuals_on_the_grid() {
    let sphere = models::sphere_pq();
    let disc = models::disc_q();
    let grid = [0.3, 0.5, 0.7];
    for &p in &grid {
        for &q in &grid {
            for kind in [RepKind::Sphere1, RepKind::Sphere2] {
                let r = build_representation(kind, p, q, 0.0, 64).unwrap();
                assert!(r.star_compatible());
                assert!(relation_residuals(&sphere, &r).unwrap().max <= TOL, "{:?} {} {}", kind, p, q);
            }
        }
        let r = build_representation(RepKind::Disc, p, p, 0.0, 64).unwrap();
        assert!(r.star_compatible());
        assert!(relation_residuals(&disc, &r).unwrap().max <= TOL);
    }
    for theta in [0.0, PI / 3.0, PI] {
        let r = build_representation(RepKind::CirclePoint, 0.5, 0.5, theta, 1).unwrap();
        assert!(relation_residuals(&sphere, &r).unwrap().max <= TOL);
    }
    let r = build_representation(RepKind::CirclePoint, 0.5, 0.5, 0.0, 1).unwrap();
    assert_eq!(relation_residuals(&sphere, &r).unwrap().max, 0.0);
}

#[test]
fn spectra() {
    let r = build_representation(RepKind::Sphere1, 0.5, 0.5, 0.0, 32).unwrap();
    let s = spectral_report(&r);
    assert!((s.rows[1].radius_expected - 0.625).abs() < TOL);
    assert!((s.rows[1].radius_computed - 0.625).abs() < TOL);
    assert!(s.off_diagonal <= 1e-14 && s.max_error <= TOL);
    let r = build_representation(RepKind::Sphere2, 0.3, 0.5, 0.0, 32).unwrap();
    let s = spectral_report(&r);
    assert!((s.rows[0].radius_computed - 0.25).abs() < TOL);
    assert!(s.off_diagonal <= 1e-14 && s.max_error <= TOL);
    for theta in [0.0, 1.0, PI] {
        let r = build_representation(RepKind::CirclePoint, 0.5, 0.5, theta, 1).unwrap();
        assert!((spectral_report(&r).rows[0].radius_computed - 1.0).abs() < TOL);
    }
}

/// `(f1 fm1 + fm1 f1) / 2` on `e_i`, from the weights directly.
#[test]
fn radius_matches_the_shift_weights() {
    let p: f64 = 0.7;
    let r = build_representation(RepKind::Sphere1, p, 0.4, 0.0, 24).unwrap();
    let s = spectral_report(&r);
    for row in &s.rows {
        let lam = |i: usize| 1.0 - p.powi(i as i32);
        let expected = 0.5 * (lam(row.i) + lam(row.i + 1));
        assert!((row.radius_computed - expected).abs() < TOL);
    }
}

#[test]
fn faithfulness_examples() {
    let s = models::sphere_pq();
    let rs = models::system(&s);
    let f = faithfulness_probe(&rs, &parse_element(&s.alphabet, "f1 fm1").unwrap(), 0.5, 0.3, 24, 1e-9).unwrap();
    assert!(f.success);
    assert_eq!(f.recovered.len(), 1);
    assert_eq!(f.recovered[0].0, "f1 fm1");
    assert!((f.recovered[0].1 - 1.0).abs() < 1e-9);
    let z = faithfulness_probe(&rs, &Element::zero(&s.alphabet), 0.5, 0.3, 24, 1e-9).unwrap();
    assert!(z.success && z.recovered.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let e = random_sphere_element(&rs, 3, 6, &mut rng);
        let f = faithfulness_probe(&rs, &e, 0.6, 0.35, 48, 1e-9).unwrap();
        assert!(f.success, "{:?}", f);
    }
}

#[test]
fn classical_circle() {
    let r = classical_circle_check(0.5, 64, &[0.0, 1.0, PI]).unwrap();
    assert!(r.telescope_gap < 1e-9);
    assert!((r.norm_x - r.expected_norm).abs() < 1e-12 && r.norm_x <= 1.0);
    assert!(r.max_point_error < TOL && r.max_relation_error < TOL);
    let (_, x, xs) = r.points[2];
    assert!((x + 1.0).norm() < TOL && (xs + 1.0).norm() < TOL);
}
