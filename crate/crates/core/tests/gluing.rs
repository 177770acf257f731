use std::collections::BTreeMap;

use ncglue::gluing::{
    build_sphere_gluing, canonical_covering_of_gluing, glued_morphism_check, GluingDatum, GluingError,
};
use ncglue::models;
use ncglue::parse::parse_element;
use ncglue::quotient::{coordinates, FiniteDimAlgebra, LinearMap, Vector};
use ncglue::Scalar;

fn e(i: usize) -> Vector {
    vec![(i, Scalar::one())]
}

fn point() -> FiniteDimAlgebra {
    FiniteDimAlgebra::from_table("C", vec!["1".into()], vec![vec![e(0)]], e(0))
}

fn two_point() -> FiniteDimAlgebra {
    FiniteDimAlgebra::from_table(
        "C+C",
        vec!["e1".into(), "e2".into()],
        vec![vec![e(0), vec![]], vec![vec![], e(1)]],
        vec![(0, Scalar::one()), (1, Scalar::one())],
    )
}

/// Evaluation of `C + C` at its first or second point.
fn eval_at(k: usize) -> LinearMap {
    LinearMap {
        images: (0..2).map(|i| if i == k { e(0) } else { Vec::new() }).collect(),
    }
}

type Example = (FiniteDimAlgebra, Vec<ncglue::linalg::Span<usize, Scalar>>, Box<dyn Fn(&str) -> Vector>);

fn second_example() -> Example {
    let p = models::counterexample2();
    let (a, rs, words) = FiniteDimAlgebra::from_presentation(&p).unwrap();
    let ideals = models::counterexample2_ideals(&p)
        .iter()
        .map(|gs| a.ideal(&gs.iter().map(|g| coordinates(&rs, &words, g).unwrap()).collect::<Vec<_>>()))
        .collect();
    let alpha = p.alphabet.clone();
    (a, ideals, Box::new(move |s| coordinates(&rs, &words, &parse_element(&alpha, s).unwrap()).unwrap()))
}

#[test]
fn two_point_spaces_glue_to_a_complete_covering() {
    // two copies of C + C glued along one point
    let mut interfaces = BTreeMap::new();
    interfaces.insert((0, 1), point());
    let mut maps = BTreeMap::new();
    maps.insert((0, 1), eval_at(1));
    maps.insert((1, 0), eval_at(0));
    let d = GluingDatum {
        algebras: vec![two_point(), two_point()],
        interfaces,
        maps,
    };
    d.validate().unwrap();
    let r = canonical_covering_of_gluing(&d).unwrap();
    assert_eq!(r.dim_gluing, 3);
    assert!(r.intersection_zero && r.projection_remark);
    assert!(r.completion.unwrap().complete);
    assert_eq!(r.surjective_projections, [true, true]);
    // every local section extends
    for i in 0..2 {
        for b in 0..2 {
            let t = d.lift_local_section(i, &e(b)).unwrap();
            assert!(d.membership(&t).is_ok());
            assert_eq!(t[i], e(b));
        }
        assert!(d.lift_local_section(i, &[]).unwrap().iter().all(|c| c.is_empty()));
    }
}

#[test]
fn reassembled_second_example_is_complete_on_the_gluing() {
    let (a, ideals, _) = second_example();
    let d = GluingDatum::from_covering(&a, &ideals);
    d.validate().unwrap();
    let r = canonical_covering_of_gluing(&d).unwrap();
    assert_eq!(r.dim_gluing, 7);
    assert!(r.intersection_zero && r.projection_remark);
    let c = r.completion.unwrap();
    assert!(c.complete);
    assert_eq!(c.dim_completion, 7);
}

#[test]
fn lifting_on_quotients_of_the_second_example() {
    let (a, ideals, el) = second_example();
    let d = GluingDatum::from_covering(&a, &ideals);
    let cond = d.lift_conditions();
    assert!(cond.images_agree && cond.cocycle, "{:?}", cond.failures);
    let (_, proj) = a.quotient(&ideals[0]);
    for s in ["1", "y", "y y", "1 + 3 y - y y"] {
        let f = proj.apply(&el(s));
        let t = d.lift_local_section(0, &f).unwrap();
        assert!(d.membership(&t).is_ok(), "{}", s);
        assert_eq!(t[0], f);
    }
}

#[test]
fn violated_lift_conditions_are_reported() {
    // three copies of C + C; pairs (1,2) and (1,3) both glue along the first point of
    // the first copy, while the second copy meets the others at different points
    let mut interfaces = BTreeMap::new();
    for k in [(0, 1), (0, 2), (1, 2)] {
        interfaces.insert(k, point());
    }
    let mut maps = BTreeMap::new();
    maps.insert((0, 1), eval_at(0));
    maps.insert((0, 2), eval_at(0));
    maps.insert((1, 0), eval_at(0));
    maps.insert((1, 2), eval_at(1));
    maps.insert((2, 0), eval_at(0));
    maps.insert((2, 1), eval_at(1));
    let d = GluingDatum {
        algebras: vec![two_point(), two_point(), two_point()],
        interfaces,
        maps,
    };
    d.validate().unwrap();
    // π^1_2(ker π^1_3) = 0 but π^2_1(ker π^2_3) = C
    let cond = d.lift_conditions();
    assert!(!cond.images_agree);
    assert!(cond.failures.iter().any(|f| f.contains("π^1_2(ker π^1_3)")));
    let err = d.lift_local_section(0, &e(0)).unwrap_err();
    assert!(matches!(err, GluingError::ConditionsViolated(_)));
}

#[test]
fn morphism_checks() {
    let (a, ideals, _) = second_example();
    let d = GluingDatum::from_covering(&a, &ideals);
    let ids: Vec<LinearMap> = d.algebras.iter().map(|b| LinearMap::identity(b.dim())).collect();
    let id_ij: BTreeMap<_, _> = d.interfaces.iter().map(|(k, b)| (*k, LinearMap::identity(b.dim()))).collect();
    glued_morphism_check(&d, &d, &ids, &id_ij).unwrap();
    // scaling one interface map breaks the intertwining
    let mut broken = id_ij.clone();
    let m = broken.get_mut(&(0, 1)).unwrap();
    m.images[0] = vec![(0, Scalar::from_int(2))];
    let err = glued_morphism_check(&d, &d, &ids, &broken).unwrap_err();
    assert!(matches!(err, GluingError::NotIntertwining { .. }));
}

#[test]
fn sphere_gluing_maps() {
    let g = build_sphere_gluing(&Scalar::p(), &Scalar::q()).unwrap();
    let s = |x: &str| parse_element(&g.sphere.alphabet, x).unwrap();
    let dp = |x: &str| parse_element(g.disc_p.alphabet(), x).unwrap();
    let dq = |x: &str| parse_element(g.disc_q.alphabet(), x).unwrap();
    assert_eq!(g.pi1.apply(&s("f0")).unwrap(), dp("x x*"));
    assert_eq!(g.pi1.apply(&s("f1")).unwrap(), dp("x"));
    assert_eq!(g.pi2.apply(&s("f0")).unwrap(), dq("1"));
    assert_eq!(g.pi2.apply(&s("f1")).unwrap(), dq("y"));
    assert_eq!(g.pi2.apply(&s("f0 f0")).unwrap(), dq("1"));
    for r in &g.sphere.relations {
        assert!(g.pi1.apply(r).unwrap().is_zero());
        assert!(g.pi2.apply(r).unwrap().is_zero());
    }
    assert!(g.tuples_satisfy_relations().unwrap());
}

#[test]
fn sphere_gluing_membership() {
    let g = build_sphere_gluing(&Scalar::p(), &Scalar::q()).unwrap();
    let dp = |x: &str| parse_element(g.disc_p.alphabet(), x).unwrap();
    let dq = |x: &str| parse_element(g.disc_q.alphabet(), x).unwrap();
    assert_eq!(g.membership(&dp("x"), &dq("y")).unwrap(), Ok(()));
    assert_eq!(g.membership(&dp("x x*"), &dq("1")).unwrap(), Ok(()));
    assert_eq!(g.membership(&dp("x"), &dq("0")).unwrap(), Err((1, 2)));
    for (_, [a, b]) in &g.generators {
        assert_eq!(g.membership(a, b).unwrap(), Ok(()));
    }
}

#[test]
fn generator_tuples_reach_all_glued_tuples() {
    let g = build_sphere_gluing(&Scalar::p(), &Scalar::q()).unwrap();
    for d in 1..=3 {
        let (glued, covered) = g.surjectivity_at(d, 2 * d + 1).unwrap();
        assert_eq!(glued, covered, "degree {}", d);
    }
}
