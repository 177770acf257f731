//! The concrete algebras: quantum discs, the circle, the glued sphere, the two
//! noncomplete-covering examples, and the first-order calculus on the disc.

use std::sync::Arc;

use crate::freealg::{Alphabet, Element};
use crate::parse::parse_element;
use crate::rewrite::{orient_presentation, Presentation, RewriteSystem};
use crate::scalar::Scalar;

fn rel(a: &Arc<Alphabet>, src: &str) -> Element {
    parse_element(a, src).unwrap_or_else(|e| panic!("built-in relation `{}`: {}", src, e))
}

/// Binds `q` in a relation template to the given scalar.
fn rel_with(a: &Arc<Alphabet>, src: &str, param: &Scalar) -> Element {
    let e = rel(a, src);
    Element::from_terms(
        a,
        e.terms().iter().map(|(w, c)| (w.clone(), subst_q(c, param))),
    )
}

fn subst_q(c: &Scalar, param: &Scalar) -> Scalar {
    // templates are polynomial in q with integer coefficients
    let mut acc = Scalar::zero();
    for (e, k) in c.numerator().terms() {
        let mono = &Scalar::from_rational(k.clone()) * &param.pow((e[0] / 4) as i32);
        acc = &acc + &mono;
    }
    &acc / &subst_den(c, param)
}

fn subst_den(c: &Scalar, param: &Scalar) -> Scalar {
    let mut acc = Scalar::zero();
    for (e, k) in c.denominator().terms() {
        acc = &acc + &(&Scalar::from_rational(k.clone()) * &param.pow((e[0] / 4) as i32));
    }
    acc
}

/// P(D) with generator `name`, relation `name* name - t name name* = (1 - t)`.
pub fn disc(name: &str, param: &Scalar) -> Presentation {
    let star = format!("{}*", name);
    let a = Arc::new(Alphabet::new(&[(name, &star)]).expect("alphabet"));
    let r = rel_with(&a, &format!("{s} {n} - q {n} {s} - (1 - q)", s = star, n = name), param);
    Presentation::new(&format!("disc_{}", name), a, vec![r]).star_closed()
}

/// The disc with parameter `q` on generator `x`.
pub fn disc_q() -> Presentation {
    let mut p = disc("x", &Scalar::q());
    p.name = "disc_q".into();
    p
}

/// The disc with parameter `p` on generator `x`.
pub fn disc_p() -> Presentation {
    let mut p = disc("x", &Scalar::p());
    p.name = "disc_p".into();
    p
}

/// P(S^1): `a a* = a* a = 1`.
pub fn circle() -> Presentation {
    let a = Arc::new(Alphabet::new(&[("a", "a*")]).expect("alphabet"));
    let rels = vec![rel(&a, "a a* - 1"), rel(&a, "a* a - 1")];
    Presentation::new("circle", a, rels).star_closed()
}

/// The glued sphere, letters ordered `f1 < f0 < fm1`.
pub fn sphere(p: &Scalar, q: &Scalar) -> Presentation {
    let a = Arc::new(
        Alphabet::ordered(&["f1", "f0", "fm1"], &[("f1", "fm1"), ("f0", "f0")]).expect("alphabet"),
    );
    let f = |s: &str| Element::generator(&a, s).unwrap();
    let (f1, f0, fm1) = (f("f1"), f("f0"), f("fm1"));
    let one = Element::one(&a);
    let sc = |c: &Scalar, e: &Element| e.scale(c);
    let one_s = Scalar::one();
    let re1 = &(&(&fm1 * &f1) - &sc(q, &(&f1 * &fm1))) - &(&sc(&(p - q), &f0) + &sc(&(&one_s - p), &one));
    let re2 = &(&(&f0 * &f1) - &sc(p, &(&f1 * &f0))) - &sc(&(&one_s - p), &f1);
    let re3 = &(&(&fm1 * &f0) - &sc(p, &(&f0 * &fm1))) - &sc(&(&one_s - p), &fm1);
    let re4 = &(&one - &f0) * &(&(&f1 * &fm1) - &f0);
    Presentation::new("sphere", a, vec![re1, re2, re3, re4]).star_closed()
}

/// The sphere with independent parameters `p` and `q`.
pub fn sphere_pq() -> Presentation {
    sphere(&Scalar::p(), &Scalar::q())
}

/// The sphere with `p = q`.
pub fn sphere_qq() -> Presentation {
    sphere(&Scalar::q(), &Scalar::q())
}

/// `C<x,y,z>` modulo all mixed products and all squares.
pub fn counterexample1() -> Presentation {
    let a = Arc::new(Alphabet::new(&[("x", "x"), ("y", "y"), ("z", "z")]).expect("alphabet"));
    let rels = ["x y", "y x", "x z", "z x", "y z", "z y", "x x", "y y", "z z"]
        .iter()
        .map(|s| rel(&a, s))
        .collect();
    Presentation::new("counterexample1", a, rels)
}

/// Ideal generators of the first example: `x - y`, `x - z`, `y - z`.
pub fn counterexample1_ideals(p: &Presentation) -> Vec<Vec<Element>> {
    ["x - y", "x - z", "y - z"]
        .iter()
        .map(|s| vec![rel(&p.alphabet, s)])
        .collect()
}

/// `C[x,y]` modulo monomials of degree three.
pub fn counterexample2() -> Presentation {
    let a = Arc::new(Alphabet::new(&[("x", "x"), ("y", "y")]).expect("alphabet"));
    Presentation::new("counterexample2", a.clone(), vec![rel(&a, "y x - x y")]).with_nilpotent(3)
}

/// Ideal generators of the second example: `(x)`, `(y)`, `(x - y)`.
pub fn counterexample2_ideals(p: &Presentation) -> Vec<Vec<Element>> {
    ["x", "y", "x - y"]
        .iter()
        .map(|s| vec![rel(&p.alphabet, s)])
        .collect()
}

/// The four first-order relations of the disc calculus with parameter `param` on generator `name`.
pub fn disc_calculus_generators(alphabet: &Arc<Alphabet>, name: &str, param: &Scalar) -> Vec<Element> {
    let n = name;
    let s = format!("{}*", name);
    [
        format!("{n} d({n}) - q^-1 d({n}) {n}"),
        format!("{s} d({s}) - q d({s}) {s}"),
        format!("{n} d({s}) - q^-1 d({s}) {n}"),
        format!("{s} d({n}) - q d({n}) {s}"),
    ]
    .iter()
    .map(|src| rel_with(alphabet, src, param))
    .collect()
}

/// The rewriting system of the disc calculus on `{x, x*, d(x), d(x*)}`: the algebra
/// relation, the four first-order generators and their differentials.
pub fn disc_calculus(base: &Presentation, param: &Scalar) -> Presentation {
    let a = Arc::new(base.alphabet.with_differentials());
    let name = base.alphabet.name(0).to_string();
    let mut rels: Vec<Element> = base
        .relations
        .iter()
        .map(|r| r.embed(&a).expect("same generators"))
        .collect();
    let gens = disc_calculus_generators(&a, &name, param);
    rels.extend(gens.iter().map(|g| g.d().expect("differentials")));
    rels.extend(gens);
    Presentation::new(&format!("{}_calculus", base.name), a, rels)
}

/// The first-order sphere relations for `p = q` (two per line of the list).
pub fn sphere_calculus_generators_deg1(a: &Arc<Alphabet>) -> Vec<Element> {
    [
        "f1 d(f1) - q^-1 d(f1) f1",
        "fm1 d(fm1) - q d(fm1) fm1",
        "f1 d(fm1) - q^-1 d(fm1) f1",
        "fm1 d(f1) - q d(f1) fm1",
        "f0 d(f1) - d(f1) f0",
        "f0 d(fm1) - d(fm1) f0",
        "d(f0) (f1 fm1 - f0)",
        "(f1 fm1 - f0) d(f0)",
    ]
    .iter()
    .map(|s| rel(a, s))
    .collect()
}

/// The second-order sphere relations for `p = q`.
pub fn sphere_calculus_generators_deg2(a: &Arc<Alphabet>) -> Vec<Element> {
    [
        "(1 - q) d(f0) d(fm1) - q fm1 d(f0) d(f0)",
        "(1 - q) d(f1) d(f0) - q f1 d(f0) d(f0)",
        "(1 - f0) ((1 - q) d(f1) d(fm1) - d(f0) d(f0))",
        "(f1 fm1 - f0) d(f0) d(f0)",
    ]
    .iter()
    .map(|s| rel(a, s))
    .collect()
}

/// Orients a presentation whose orientation is known to succeed.
pub fn system(p: &Presentation) -> RewriteSystem {
    orient_presentation(p).unwrap_or_else(|e| panic!("{}: {}", p.name, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_p_uses_p() {
        let d = disc_p();
        let rs = system(&d);
        assert_eq!(rs.describe_rules(), vec!["x* x -> p x x* + (1 - p)"]);
    }
}
