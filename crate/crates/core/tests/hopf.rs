use std::sync::Arc;

use ncglue::dga::{self, Calculus, UniversalForms};
use ncglue::gluing::build_sphere_gluing;
use ncglue::hopf::{self, parse_hopf_word, HopfGen, ModuleAction, Verdict};
use ncglue::models;
use ncglue::parse::parse_element;
use ncglue::rewrite::RewriteSystem;
use ncglue::{Element, Scalar};

fn disc() -> (RewriteSystem, ModuleAction) {
    let p = models::disc_q();
    let act = ModuleAction::disc(&p.alphabet, "x").unwrap();
    (models::system(&p), act)
}

fn el(rs: &RewriteSystem, s: &str) -> Element {
    parse_element(rs.alphabet(), s).unwrap()
}

#[test]
fn action_examples() {
    let (rs, act) = disc();
    let x = el(&rs, "x");
    assert_eq!(act.act_gen(&rs, HopfGen::F, &x).unwrap(), el(&rs, "q^(1/4)"));
    let ef = act.act(&rs, &parse_hopf_word("E F").unwrap(), &x).unwrap();
    let fe = act.act(&rs, &parse_hopf_word("F E").unwrap(), &x).unwrap();
    assert_eq!(&ef - &fe, el(&rs, "(q^(1/2) + q^(-1/2)) x"));
    // the same commutator through K
    let k = act.act_gen(&rs, HopfGen::K, &x).unwrap();
    let kinv = act.act_gen(&rs, HopfGen::Kinv, &x).unwrap();
    let c = (Scalar::q_pow(2) - Scalar::q_pow(-2)).inv();
    assert_eq!(&ef - &fe, (&k - &kinv).scale(&c));
    let one = Element::one(rs.alphabet());
    assert!(act.act_gen(&rs, HopfGen::E, &one).unwrap().is_zero());
    assert_eq!(act.act_gen(&rs, HopfGen::K, &one).unwrap(), one);
}

#[test]
fn action_commutes_with_d() {
    let q = Scalar::q();
    let cal = Calculus::disc("x", &q).unwrap();
    let act = ModuleAction::disc(&models::disc_q().alphabet, "x").unwrap();
    let dx = parse_element(cal.alphabet(), "d(x)").unwrap();
    let got = act.act_gen(&cal.system, HopfGen::E, &dx).unwrap();
    let want = cal.normal_form(&parse_element(cal.alphabet(), "-q^(1/4) d(x x)").unwrap()).unwrap();
    assert_eq!(got, want);
    assert!(hopf::d_equivariance(&act, &cal.system, 3).unwrap());
}

#[test]
fn module_axioms() {
    let (rs, act) = disc();
    let r = hopf::module_axiom_check(&act, &rs, 4).unwrap();
    assert!(r.passed(), "{:?}", r);
    assert!(r.counit_ok && r.composition_ok);
    assert!(r.relations.iter().all(|s| s.words_checked > 0));
    let q = Scalar::q();
    let g = build_sphere_gluing(&q, &q).unwrap();
    let sphere = ModuleAction::sphere(&g.sphere.alphabet, &q, &q).unwrap();
    assert!(hopf::module_axiom_check(&sphere, &g.sphere_rs, 3).unwrap().passed());
    assert!(ModuleAction::sphere(&g.sphere.alphabet, &Scalar::p(), &q).is_err());
}

#[test]
fn covariance_examples() {
    let q = Scalar::q();
    let g = build_sphere_gluing(&q, &q).unwrap();
    let act = ModuleAction::sphere(&g.sphere.alphabet, &q, &q).unwrap();
    let s = |x: &str| parse_element(&g.sphere.alphabet, x).unwrap();
    let e = act.act_gen(&g.sphere_rs, HopfGen::E, &s("f1 fm1 - f0")).unwrap();
    assert_eq!(e, g.sphere_rs.normal_form(&s("-q^(1/4) f1 (f1 fm1 - f0)")).unwrap());
    let r = hopf::covariance_check_algebra(&act, &g.sphere_rs, &[s("f1 fm1 - f0")], 3).unwrap();
    assert!(r.passed());
    assert!(r.entries.iter().all(|e| e.verdict == Verdict::Member));

    let disc_rs = Arc::new(models::system(&models::disc_q()));
    let forms = UniversalForms::new(disc_rs.clone());
    let dact = ModuleAction::disc(disc_rs.alphabet(), "x").unwrap();
    let gen = parse_element(&forms.ext, "x d(x) - q^-1 d(x) x").unwrap();
    let v = forms.from_element(&gen).unwrap();
    let k = dact.act_form(&forms, HopfGen::K, &v).unwrap();
    assert_eq!(k, ncglue::linalg::scale_vec(&v, &q.pow(2)));
    let gens = models::disc_calculus_generators(&forms.ext, "x", &q);
    assert!(hopf::covariance_check_forms(&dact, &forms, &gens, 3, 0).unwrap().passed());
}

#[test]
fn projections_intertwine() {
    let q = Scalar::q();
    let g = build_sphere_gluing(&q, &q).unwrap();
    let act = ModuleAction::sphere(&g.sphere.alphabet, &q, &q).unwrap();
    let ay = ModuleAction::disc(g.disc_q.alphabet(), "y").unwrap();
    let f0 = parse_element(&g.sphere.alphabet, "f0").unwrap();
    let lhs = g.pi2.apply(&act.act_gen(&g.sphere_rs, HopfGen::E, &f0).unwrap()).unwrap();
    let rhs = ay.act_gen(&g.disc_q, HopfGen::E, &g.pi2.apply(&f0).unwrap()).unwrap();
    assert!(lhs.is_zero() && rhs.is_zero());
    let ax = ModuleAction::disc(g.disc_p.alphabet(), "x").unwrap();
    let (_, maps) = dga::sphere_calculus_maps(&q).unwrap();
    assert!(hopf::intertwining(&act, &ax, &g.pi1, Some(&maps[0])).unwrap().failures.is_empty());
    assert!(hopf::intertwining(&act, &ay, &g.pi2, Some(&maps[1])).unwrap().failures.is_empty());
}
