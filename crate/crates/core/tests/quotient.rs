mod common;

use common::{rank, DenseAlgebra};
use nalgebra::DMatrix;
use ncglue::gluing::build_sphere_gluing;
use ncglue::linalg::Span;
use ncglue::models;
use ncglue::parse::parse_element;
use ncglue::quotient::{
    coordinates, covering_completion_check, ideal_truncation_span, intersect_all, kernel_on_words,
    lattice_condition_check, morphism_kernel_intersection, Completion, FiniteDimAlgebra, Vector,
};
use ncglue::rep::{build_representation, evaluate_element_matrix, RepKind};
use ncglue::rewrite::Presentation;
use ncglue::{Element, Scalar, Word};

struct Example {
    algebra: FiniteDimAlgebra,
    ideals: Vec<Span<usize, Scalar>>,
    coords: Box<dyn Fn(&str) -> Vector>,
}

fn example(p: Presentation, gens: Vec<Vec<Element>>) -> Example {
    let p = if p.nilpotent.is_some() { p } else { p.with_nilpotent(3) };
    let (algebra, rs, words) = FiniteDimAlgebra::from_presentation(&p).unwrap();
    let coords = {
        let (rs, words, alpha) = (rs.clone(), words.clone(), p.alphabet.clone());
        Box::new(move |s: &str| coordinates(&rs, &words, &parse_element(&alpha, s).unwrap()).unwrap())
    };
    let ideals = gens
        .iter()
        .map(|gs| algebra.ideal(&gs.iter().map(|g| coordinates(&rs, &words, g).unwrap()).collect::<Vec<_>>()))
        .collect();
    Example { algebra, ideals, coords }
}

fn second() -> Example {
    let p = models::counterexample2();
    let g = models::counterexample2_ideals(&p);
    example(p, g)
}

fn first() -> Example {
    let p = models::counterexample1();
    let g = models::counterexample1_ideals(&p);
    example(p, g)
}

/// The second example rebuilt densely on monomials `x^a y^b`, `a + b <= 2`.
fn second_dense() -> (usize, usize) {
    let (a, monos) = DenseAlgebra::truncated_polynomials(2, 3);
    let mono = |m: &[usize]| {
        let mut v = vec![0.0; a.dim];
        v[monos.iter().position(|x| x == m).unwrap()] = 1.0;
        v
    };
    let (x, y) = (mono(&[1, 0]), mono(&[0, 1]));
    let x_minus_y: Vec<f64> = x.iter().zip(&y).map(|(u, v)| u - v).collect();
    let ideals = [a.ideal(&[x]), a.ideal(&[y]), a.ideal(&[x_minus_y])];
    a.completion_dims(&ideals)
}

#[test]
fn second_example_is_an_incomplete_covering() {
    let ex = second();
    let refs: Vec<_> = ex.ideals.iter().collect();
    assert_eq!(intersect_all(&refs, ex.algebra.dim()).dim(), 0);
    let r = covering_completion_check(&ex.algebra, &ex.ideals).unwrap();
    assert!(!r.complete);
    assert!(r.witness.is_some());
    let (space, image) = second_dense();
    assert_eq!((r.dim_algebra, r.dim_completion, r.dim_image), (6, space, image));
    assert_eq!((space, image), (7, 6));
}

#[test]
fn second_example_witness_has_no_preimage() {
    let ex = second();
    let c = Completion::new(&ex.algebra, &ex.ideals);
    let t = c.tuple(&[(ex.coords)("x - y"), (ex.coords)("x - y"), (ex.coords)("x")]);
    assert!(c.is_compatible(&t));
    assert!(!c.has_preimage(&t));
    // a tuple coming from the algebra does have one
    let a = (ex.coords)("x + 2 x y");
    let t = c.tuple(&[a.clone(), a.clone(), a]);
    assert!(c.is_compatible(&t) && c.has_preimage(&t));
    // and an incompatible one is rejected
    let t = c.tuple(&[(ex.coords)("y"), (ex.coords)("x"), (ex.coords)("1")]);
    assert!(!c.is_compatible(&t));
}

#[test]
fn second_example_identities_fail() {
    let ex = second();
    let l = lattice_condition_check(&ex.algebra, &ex.ideals);
    assert!(l.sequential.iter().chain(&l.symmetric).all(|i| !i.holds));
    assert_eq!(l.complete, Some(false));
    assert_eq!(l.three_way_agreement, Some(true));
    // (J1 + J2) ∩ (J1 + J3) against J1 + J2 ∩ J3
    let j = &ex.ideals;
    let left = j[0].sum(&j[1]).intersect(&j[0].sum(&j[2]));
    let right = j[0].sum(&j[1].intersect(&j[2]));
    assert!(right.dim() < left.dim() && left.contains_span(&right));
}

#[test]
fn first_example_is_incomplete() {
    let ex = first();
    let r = covering_completion_check(&ex.algebra, &ex.ideals).unwrap();
    let (a, _) = DenseAlgebra::truncated_polynomials(3, 2);
    let e = |i: usize| {
        let mut v = vec![0.0; 4];
        v[i] = 1.0;
        v
    };
    let diff = |i: usize, j: usize| -> Vec<f64> { e(i).iter().zip(e(j)).map(|(u, v)| u - v).collect() };
    let (space, image) = a.completion_dims(&[a.ideal(&[diff(1, 2)]), a.ideal(&[diff(1, 3)]), a.ideal(&[diff(2, 3)])]);
    assert!(!r.complete);
    assert_eq!((r.dim_algebra, r.dim_completion, r.dim_image), (4, space, image));
    let l = lattice_condition_check(&ex.algebra, &ex.ideals);
    assert!(l.sequential.iter().chain(&l.symmetric).all(|i| !i.holds));
    // (J1 + J3) ∩ (J2 + J3) strictly contains (J1 ∩ J2) + J3
    let j = &ex.ideals;
    let left = j[0].sum(&j[2]).intersect(&j[1].sum(&j[2]));
    let right = j[0].intersect(&j[1]).sum(&j[2]);
    assert!(left.dim() > right.dim());
    // two of the three ideals already cover
    assert_eq!(j[0].intersect(&j[1]).dim(), 0);
    assert!(covering_completion_check(&ex.algebra, &j[..2]).unwrap().complete);
}

fn two_point() -> FiniteDimAlgebra {
    let e = |i: usize| vec![(i, Scalar::one())];
    FiniteDimAlgebra::from_table(
        "C+C",
        vec!["e1".into(), "e2".into()],
        vec![vec![e(0), vec![]], vec![vec![], e(1)]],
        vec![(0, Scalar::one()), (1, Scalar::one())],
    )
}

#[test]
fn two_ideal_coverings_are_complete() {
    let a = two_point();
    assert!(a.is_associative());
    let ideals = vec![a.ideal(&[vec![(0, Scalar::one())]]), a.ideal(&[vec![(1, Scalar::one())]])];
    let r = covering_completion_check(&a, &ideals).unwrap();
    assert!(r.complete);
    assert_eq!((r.dim_completion, r.dim_image), (2, 2));
    // the second example's pairs are complete too
    let ex = second();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let pair = vec![ex.ideals[i].clone(), ex.ideals[j].clone()];
        if intersect_all(&pair.iter().collect::<Vec<_>>(), 6).dim() == 0 {
            assert!(covering_completion_check(&ex.algebra, &pair).unwrap().complete);
        }
    }
}

#[test]
fn non_coverings_are_rejected() {
    let a = two_point();
    let ideals = vec![a.ideal(&[vec![(0, Scalar::one())]]), a.ideal(&[vec![(0, Scalar::one())]])];
    assert!(covering_completion_check(&a, &ideals).is_err());
}

#[test]
fn quotient_map_is_multiplicative() {
    let ex = second();
    for j in &ex.ideals {
        assert!(ex.algebra.is_ideal(j));
        let (q, m) = ex.algebra.quotient(j);
        assert_eq!(q.dim(), 3);
        assert!(m.is_multiplicative(&ex.algebra, &q));
        assert!(m.kernel().equals(j));
    }
}

/// Rank of the words under the given representations, flattened over the safe window.
fn numeric_rank(words: &[Word], alphabet: &std::sync::Arc<ncglue::Alphabet>, kinds: &[RepKind], d: usize) -> usize {
    let reps: Vec<_> = kinds.iter().map(|&k| build_representation(k, 0.45, 0.3, 0.0, 40).unwrap()).collect();
    let last = 40 - 1 - 2 * d;
    let cols: Vec<Vec<f64>> = words
        .iter()
        .map(|w| {
            let mut v = Vec::new();
            for r in &reps {
                let m = evaluate_element_matrix(&Element::word(alphabet, w.clone()), r).unwrap();
                for i in 0..=last {
                    for j in 0..=last {
                        v.push(m[(i, j)].re);
                        v.push(m[(i, j)].im);
                    }
                }
            }
            v
        })
        .collect();
    rank(&DMatrix::from_fn(cols[0].len(), cols.len(), |i, j| cols[j][i]))
}

#[test]
fn projection_kernels_match_representation_ranks() {
    let g = build_sphere_gluing(&Scalar::p(), &Scalar::q()).unwrap();
    let a = g.sphere_rs.alphabet().clone();
    for d in 1..=4 {
        let words = g.sphere_rs.algebra_basis(d);
        let k1 = kernel_on_words(std::slice::from_ref(&g.pi1), &words, d).unwrap();
        let k2 = kernel_on_words(std::slice::from_ref(&g.pi2), &words, d).unwrap();
        assert_eq!(k1.dim(), words.len() - numeric_rank(&words, &a, &[RepKind::Sphere1], d), "ker pi1 at {}", d);
        assert_eq!(k2.dim(), words.len() - numeric_rank(&words, &a, &[RepKind::Sphere2], d), "ker pi2 at {}", d);
    }
}

#[test]
fn projection_kernels_intersect_trivially() {
    let g = build_sphere_gluing(&Scalar::p(), &Scalar::q()).unwrap();
    let k = morphism_kernel_intersection(&[g.pi1.clone(), g.pi2.clone()], 5).unwrap();
    assert_eq!(k.dim(), 0);
    let words = g.sphere_rs.algebra_basis(5);
    assert_eq!(words.len(), 36);
    let a = g.sphere_rs.alphabet().clone();
    assert_eq!(numeric_rank(&words, &a, &[RepKind::Sphere1, RepKind::Sphere2], 5), 36);
}

#[test]
fn kernels_are_generated_by_the_expected_elements() {
    let g = build_sphere_gluing(&Scalar::p(), &Scalar::q()).unwrap();
    let d = 3;
    let words = g.sphere_rs.algebra_basis(d);
    for (m, gen) in [(&g.pi1, "f1 fm1 - f0"), (&g.pi2, "1 - f0")] {
        let k = kernel_on_words(std::slice::from_ref(m), &words, d).unwrap();
        let e = parse_element(&g.sphere.alphabet, gen).unwrap();
        let span = ideal_truncation_span(&g.sphere_rs, &[e], d + 2).unwrap().truncated(d);
        assert!(span.span.equals(&k.span), "{}", gen);
    }
}
