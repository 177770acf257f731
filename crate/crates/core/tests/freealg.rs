use std::sync::Arc;

use ncglue::freealg::AlgebraError;
use ncglue::models;
use ncglue::parse::parse_element;
use ncglue::{Alphabet, Element};
use proptest::prelude::*;

fn sphere() -> Arc<Alphabet> {
    models::sphere_pq().alphabet
}

fn el(a: &Arc<Alphabet>, s: &str) -> Element {
    parse_element(a, s).unwrap()
}

#[test]
fn products() {
    let d = models::disc_q().alphabet;
    assert_eq!(&el(&d, "x") * &el(&d, "x*"), el(&d, "x x*"));
    assert_eq!(&el(&d, "x + x*") * &el(&d, "x"), el(&d, "x x + x* x"));
    let s = sphere();
    assert_eq!(&Element::one(&s) * &el(&s, "f0"), el(&s, "f0"));
}

#[test]
fn mismatched_alphabets_are_rejected() {
    let d = models::disc_q().alphabet;
    let s = sphere();
    assert!(matches!(el(&d, "x").try_mul(&el(&s, "f0")), Err(AlgebraError::IncompatibleAlgebras)));
}

#[test]
fn star_examples() {
    let s = sphere();
    assert_eq!(el(&s, "f1").star(), el(&s, "fm1"));
    assert_eq!(el(&s, "f0").star(), el(&s, "f0"));
    let d = models::disc_q().alphabet;
    assert_eq!(el(&d, "x x*").star(), el(&d, "x x*"));
    assert_eq!(el(&d, "(1 - q) x").star(), el(&d, "(1 - q) x*"));
}

#[test]
fn differentials_obey_leibniz_on_words() {
    let d = Arc::new(models::disc_q().alphabet.with_differentials());
    assert_eq!(el(&d, "x x").d().unwrap(), el(&d, "x d(x) + d(x) x"));
    assert!(el(&d, "1").d().unwrap().is_zero());
}

fn element(a: Arc<Alphabet>) -> impl Strategy<Value = Element> {
    let n = a.len();
    prop::collection::vec((-3i64..=3, prop::collection::vec(0..n, 0..4)), 0..4).prop_map(move |ts| {
        Element::from_terms(
            &a,
            ts.into_iter()
                .map(|(c, w)| (ncglue::Word::from_letters(&w), ncglue::Scalar::from_int(c))),
        )
    })
}

proptest! {
    #[test]
    fn star_reverses_products(a in element(sphere()), b in element(sphere())) {
        prop_assert_eq!((&a * &b).star(), &b.star() * &a.star());
        prop_assert_eq!(a.star().star(), a);
    }

    #[test]
    fn word_lengths_add(a in element(sphere()), b in element(sphere())) {
        let p = &a * &b;
        if !p.is_zero() {
            prop_assert_eq!(p.max_len(), a.max_len() + b.max_len());
        }
    }
}
