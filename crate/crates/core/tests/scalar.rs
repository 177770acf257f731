use ncglue::parse::parse_scalar;
use ncglue::Scalar;
use proptest::prelude::*;

/// Terms `c q^a p^b s^e`, evaluated independently in floating point.
type Terms = Vec<(i64, i32, i32, i32)>;

fn build(terms: &Terms) -> Scalar {
    terms.iter().fold(Scalar::zero(), |acc, &(c, a, b, e)| {
        acc + Scalar::from_int(c) * Scalar::q().pow(a) * Scalar::p().pow(b) * Scalar::s().pow(e)
    })
}

fn float(terms: &Terms, q: f64, p: f64) -> f64 {
    terms
        .iter()
        .map(|&(c, a, b, e)| c as f64 * q.powi(a) * p.powi(b) * q.powf(0.25).powi(e))
        .sum()
}

fn terms() -> impl Strategy<Value = Terms> {
    prop::collection::vec((-3i64..=3, 0i32..3, 0i32..3, 0i32..4), 1..4)
}

fn nonzero_terms() -> impl Strategy<Value = Terms> {
    terms().prop_filter("nonzero", |t| !build(t).is_zero())
}

fn eval(x: &Scalar, q: f64, p: f64) -> f64 {
    let v = x.evaluate(q, p, 0.0).expect("denominator nonzero");
    assert!(v.im.abs() < 1e-12);
    v.re
}

#[test]
fn simplify_examples() {
    let q = Scalar::q();
    let one = Scalar::one();
    let lhs = (&one - &(&q * &q)) / (&one - &q);
    assert_eq!(lhs, &one + &q);
    let p = Scalar::p();
    assert_eq!((&p - &q) + (&one - &p), &one - &q);
    assert_eq!(Scalar::s().pow(4), q);
    assert_eq!(parse_scalar("(1 - q^2)/(1 - q)").unwrap(), parse_scalar("1 + q").unwrap());
}

#[test]
fn evaluate_examples() {
    let one = Scalar::one();
    assert!((eval(&(&one - &Scalar::q()), 0.5, 0.5) - 0.5).abs() < 1e-15);
    assert!((eval(&-Scalar::s(), 0.0625, 0.5) + 0.5).abs() < 1e-15);
    let x = Scalar::q_pow(2) + Scalar::q_pow(-2);
    assert!((eval(&x, 0.25, 0.5) - 2.5).abs() < 1e-14);
}

#[test]
fn zero_denominator_is_an_error() {
    assert!(parse_scalar("1/(q - q)").is_err());
    let x = Scalar::one() / (Scalar::one() - Scalar::q());
    assert!(x.evaluate(1.0, 0.5, 0.0).is_err());
}

#[test]
fn fractional_powers_are_exact() {
    let a = Scalar::q_pow(1);
    assert_eq!(a.pow(4), Scalar::q());
    assert_eq!(&Scalar::q_pow(5) * &Scalar::q_pow(-3), Scalar::q_pow(2));
    assert!((eval(&Scalar::q_pow(5), 0.3, 0.5) - 0.3f64.powf(1.25)).abs() < 1e-14);
}

proptest! {
    #[test]
    fn ring_axioms(a in terms(), b in terms(), c in terms()) {
        let (a, b, c) = (build(&a), build(&b), build(&c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn inverses(a in nonzero_terms(), b in terms()) {
        let (a, b) = (build(&a), build(&b));
        prop_assert!((&a * &a.inv()).is_one());
        prop_assert_eq!(&(&b / &a) * &a, b);
    }

    #[test]
    fn evaluation_matches_float_oracle(t in terms(), u in terms(), q in 0.1f64..0.9, p in 0.1f64..0.9) {
        let (a, b) = (build(&t), build(&u));
        let (fa, fb) = (float(&t, q, p), float(&u, q, p));
        let tol = |x: f64| 1e-12 * (1.0 + x.abs());
        prop_assert!((eval(&a, q, p) - fa).abs() <= tol(fa));
        prop_assert!((eval(&(&a * &b), q, p) - fa * fb).abs() <= tol(fa * fb));
        prop_assert!((eval(&(&a + &b), q, p) - (fa + fb)).abs() <= tol(fa + fb));
    }

    #[test]
    fn simplification_is_idempotent(t in terms(), u in nonzero_terms()) {
        let x = &build(&t) / &build(&u);
        let again = Scalar::simplify(x.numerator(), x.denominator()).unwrap();
        prop_assert_eq!(again, x);
    }
}
