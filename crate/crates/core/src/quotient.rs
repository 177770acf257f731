//! Exact truncated linear algebra over presented algebras: ideal truncations, kernels of
//! morphisms, finite-dimensional algebras and the covering / completeness / lattice checks.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::freealg::{Alphabet, Element, Word};
use crate::linalg::{kernel, solve, SparseVec, Span};
use crate::rewrite::{orient_presentation, Presentation, RewriteError, RewriteSystem};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuotientError {
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("relation `{relation}` is not mapped to zero (image `{image}`)")]
    NotAMorphism { relation: String, image: String },
    #[error("generator images: expected {expected}, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("the ideals do not intersect in zero (intersection has dimension {0})")]
    NotACovering(usize),
    #[error("presentation `{0}` has no nilpotency bound, so it is not finite-dimensional")]
    NotFinite(String),
}

pub type WordVec = SparseVec<Word, Scalar>;

pub fn to_vec(e: &Element) -> WordVec {
    e.terms().iter().map(|(w, c)| (w.clone(), c.clone())).collect()
}

pub fn from_vec(a: &Arc<Alphabet>, v: &[(Word, Scalar)]) -> Element {
    Element::from_terms(a, v.iter().cloned())
}

/// A subspace of the algebra in normal-form coordinates, with the filtered degree it was
/// built for.
#[derive(Clone, Debug)]
pub struct FilteredSubspace {
    pub degree_bound: usize,
    pub span: Span<Word, Scalar>,
}

impl FilteredSubspace {
    pub fn zero(d: usize) -> Self {
        FilteredSubspace {
            degree_bound: d,
            span: Span::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    /// Exact membership of an element already in normal form.
    pub fn contains(&self, e: &Element) -> bool {
        self.span.contains(&to_vec(e))
    }

    /// The part supported on words of length at most `d`.
    pub fn truncated(&self, d: usize) -> FilteredSubspace {
        FilteredSubspace {
            degree_bound: d,
            span: self.span.restrict_downward(|w| w.len() <= d),
        }
    }

    pub fn basis(&self, a: &Arc<Alphabet>) -> Vec<Element> {
        self.span.rows().map(|r| from_vec(a, r)).collect()
    }
}

/// Span of the normal forms of `m g m'` over basis words `m, m'` with total length at most
/// `d`. An under-approximation of the ideal; anything it contains is certified.
pub fn ideal_truncation_span(
    rs: &RewriteSystem,
    gens: &[Element],
    d: usize,
) -> Result<FilteredSubspace, RewriteError> {
    let basis = rs.algebra_basis(d);
    let mut jobs = Vec::new();
    for g in gens {
        let gl = g.max_len();
        if gl > d {
            continue;
        }
        for m in basis.iter().filter(|m| m.len() + gl <= d) {
            for m2 in basis.iter().filter(|m2| m.len() + gl + m2.len() <= d) {
                jobs.push((g, m, m2));
            }
        }
    }
    let a = rs.alphabet();
    let vecs: Vec<WordVec> = jobs
        .par_iter()
        .map(|(g, m, m2)| {
            let e = &(&Element::word(a, (*m).clone()) * g) * &Element::word(a, (*m2).clone());
            rs.normal_form(&e).map(|e| to_vec(&e))
        })
        .collect::<Result<_, _>>()?;
    Ok(FilteredSubspace {
        degree_bound: d,
        span: Span::from_vectors(vecs),
    })
}

/// A homomorphism given on generators; letters of the source alphabet map to elements of
/// the target, reduced by the target system.
#[derive(Clone)]
pub struct AlgebraMorphism {
    pub name: String,
    pub source: Arc<RewriteSystem>,
    pub target: Arc<RewriteSystem>,
    pub images: Vec<Element>,
}

impl std::fmt::Debug for AlgebraMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AlgebraMorphism({})", self.name)
    }
}

impl AlgebraMorphism {
    /// Builds the morphism and checks that every source relation maps to zero.
    pub fn new(
        name: &str,
        source: Arc<RewriteSystem>,
        source_relations: &[Element],
        target: Arc<RewriteSystem>,
        images: Vec<Element>,
    ) -> Result<Self, QuotientError> {
        if images.len() != source.alphabet().len() {
            return Err(QuotientError::ImageCount {
                expected: source.alphabet().len(),
                got: images.len(),
            });
        }
        let m = AlgebraMorphism {
            name: name.to_string(),
            source,
            target,
            images,
        };
        for r in source_relations {
            let img = m.apply(r)?;
            if !img.is_zero() {
                return Err(QuotientError::NotAMorphism {
                    relation: r.to_string(),
                    image: img.to_string(),
                });
            }
        }
        Ok(m)
    }

    /// Image in target normal form.
    pub fn apply(&self, e: &Element) -> Result<Element, RewriteError> {
        let img = e.substitute(self.target.alphabet(), &self.images);
        self.target.normal_form(&img)
    }

    pub fn apply_word(&self, w: &Word) -> Result<Element, RewriteError> {
        self.apply(&Element::word(self.source.alphabet(), w.clone()))
    }
}

/// Exact kernel of `e -> (m(e))_m` on the span of the source basis words of length at most `d`.
pub fn morphism_kernel_intersection(
    maps: &[AlgebraMorphism],
    d: usize,
) -> Result<FilteredSubspace, RewriteError> {
    let Some(first) = maps.first() else {
        return Ok(FilteredSubspace::zero(d));
    };
    let basis = first.source.algebra_basis(d);
    kernel_on_words(maps, &basis, d)
}

/// Kernel of the combined map restricted to the span of `words`.
pub fn kernel_on_words(
    maps: &[AlgebraMorphism],
    words: &[Word],
    d: usize,
) -> Result<FilteredSubspace, RewriteError> {
    type Row = (WordVec, SparseVec<(usize, Word), Scalar>);
    let rows: Vec<Row> = words
        .par_iter()
        .map(|w| {
            let mut img = Vec::new();
            for (i, m) in maps.iter().enumerate() {
                for (tw, c) in m.apply_word(w)?.into_terms() {
                    img.push(((i, tw), c));
                }
            }
            Ok((vec![(w.clone(), Scalar::one())], img))
        })
        .collect::<Result<_, RewriteError>>()?;
    Ok(FilteredSubspace {
        degree_bound: d,
        span: kernel(rows),
    })
}

pub type Vector = SparseVec<usize, Scalar>;

/// A finite-dimensional algebra by structure constants on a numbered basis.
#[derive(Clone, Debug)]
pub struct FiniteDimAlgebra {
    pub name: String,
    pub basis_names: Vec<String>,
    /// `table[i][j]` is the product of basis elements `i` and `j`.
    table: Vec<Vec<Vector>>,
    unit: Vector,
}

impl FiniteDimAlgebra {
    pub fn from_table(name: &str, basis_names: Vec<String>, table: Vec<Vec<Vector>>, unit: Vector) -> Self {
        FiniteDimAlgebra {
            name: name.to_string(),
            basis_names,
            table,
            unit,
        }
    }

    /// The quotient of a presentation with a nilpotency bound, on its irreducible words.
    pub fn from_presentation(p: &Presentation) -> Result<(Self, Arc<RewriteSystem>, Vec<Word>), QuotientError> {
        let n = p.nilpotent.ok_or_else(|| QuotientError::NotFinite(p.name.clone()))?;
        let rs = Arc::new(orient_presentation(p)?);
        let words = rs.algebra_basis(n);
        let index: BTreeMap<Word, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let a = rs.alphabet().clone();
        let mut table = vec![vec![Vec::new(); words.len()]; words.len()];
        for (i, u) in words.iter().enumerate() {
            for (j, v) in words.iter().enumerate() {
                let prod = rs.normal_form_word(&u.concat(v))?;
                table[i][j] = prod
                    .terms()
                    .iter()
                    .map(|(w, c)| (index[w], c.clone()))
                    .collect();
            }
        }
        let names = words.iter().map(|w| w.display(&a).to_string()).collect();
        let unit = vec![(index[&Word::unit()], Scalar::one())];
        Ok((FiniteDimAlgebra::from_table(&p.name, names, table, unit), rs, words))
    }

    pub fn dim(&self) -> usize {
        self.basis_names.len()
    }

    pub fn unit(&self) -> Vector {
        self.unit.clone()
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        vec![(i, Scalar::one())]
    }

    pub fn mul(&self, u: &[(usize, Scalar)], v: &[(usize, Scalar)]) -> Vector {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (i, a) in u {
            for (j, b) in v {
                let ab = a * b;
                crate::linalg::axpy(&mut acc, &ab, &self.table[*i][*j]);
            }
        }
        crate::linalg::sparse_from_map(acc)
    }

    /// Two-sided ideal generated by `gens`.
    pub fn ideal(&self, gens: &[Vector]) -> Span<usize, Scalar> {
        let mut s: Span<usize, Scalar> = Span::new();
        let mut queue: Vec<Vector> = gens.to_vec();
        while let Some(v) = queue.pop() {
            if !s.insert(v.clone()) {
                continue;
            }
            for i in 0..self.dim() {
                let b = self.basis_vector(i);
                queue.push(self.mul(&b, &v));
                queue.push(self.mul(&v, &b));
            }
        }
        s.into_reduced()
    }

    pub fn is_ideal(&self, s: &Span<usize, Scalar>) -> bool {
        s.rows().all(|r| {
            (0..self.dim()).all(|i| {
                let b = self.basis_vector(i);
                s.contains(&self.mul(&b, r)) && s.contains(&self.mul(r, &b))
            })
        })
    }

    pub fn is_associative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    let (a, b, c) = (self.basis_vector(i), self.basis_vector(j), self.basis_vector(k));
                    self.mul(&self.mul(&a, &b), &c) == self.mul(&a, &self.mul(&b, &c))
                })
            })
        })
    }

    /// The quotient by an ideal on the non-pivot basis elements, with the projection.
    pub fn quotient(&self, ideal: &Span<usize, Scalar>) -> (FiniteDimAlgebra, LinearMap) {
        let pivots: std::collections::BTreeSet<usize> = ideal.pivots().copied().collect();
        let keep: Vec<usize> = (0..self.dim()).filter(|i| !pivots.contains(i)).collect();
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(n, &i)| (i, n)).collect();
        let proj = |v: &[(usize, Scalar)]| -> Vector {
            ideal.reduce(v).into_iter().map(|(k, c)| (pos[&k], c)).collect()
        };
        let table = keep
            .iter()
            .map(|&i| {
                keep.iter()
                    .map(|&j| proj(&self.mul(&self.basis_vector(i), &self.basis_vector(j))))
                    .collect()
            })
            .collect();
        let names = keep.iter().map(|&i| self.basis_names[i].clone()).collect();
        let q = FiniteDimAlgebra::from_table(&format!("{}/J", self.name), names, table, proj(&self.unit));
        let map = LinearMap {
            images: (0..self.dim()).map(|i| proj(&self.basis_vector(i))).collect(),
        };
        (q, map)
    }

    pub fn format_vector(&self, v: &[(usize, Scalar)]) -> String {
        if v.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (n, (i, c)) in v.iter().rev().enumerate() {
            let name = if self.basis_names[*i] == "1" { "" } else { &self.basis_names[*i] };
            out.push_str(&crate::freealg::fmt_coeff_term(c, name, n == 0));
        }
        out
    }
}

/// A linear map given by the images of the basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    pub images: Vec<Vector>,
}

impl LinearMap {
    pub fn identity(n: usize) -> Self {
        LinearMap {
            images: (0..n).map(|i| vec![(i, Scalar::one())]).collect(),
        }
    }

    pub fn apply(&self, v: &[(usize, Scalar)]) -> Vector {
        let mut acc = BTreeMap::new();
        for (i, c) in v {
            crate::linalg::axpy(&mut acc, c, &self.images[*i]);
        }
        crate::linalg::sparse_from_map(acc)
    }

    pub fn compose(&self, inner: &LinearMap) -> LinearMap {
        LinearMap {
            images: inner.images.iter().map(|v| self.apply(v)).collect(),
        }
    }

    pub fn kernel(&self) -> Span<usize, Scalar> {
        kernel(
            self.images
                .iter()
                .enumerate()
                .map(|(i, v)| (vec![(i, Scalar::one())], v.clone()))
                .collect(),
        )
    }

    pub fn image_of(&self, s: &Span<usize, Scalar>) -> Span<usize, Scalar> {
        Span::from_vectors(s.rows().map(|r| self.apply(r)))
    }

    /// Some preimage of `target`, if any.
    pub fn preimage(&self, target: &[(usize, Scalar)]) -> Option<Vector> {
        let x = solve(&self.images, target)?;
        Some(
            x.into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        )
    }

    /// Some preimage lying in the subspace `within`.
    pub fn preimage_within(&self, target: &[(usize, Scalar)], within: &Span<usize, Scalar>) -> Option<Vector> {
        let basis = within.basis();
        let cols: Vec<Vector> = basis.iter().map(|b| self.apply(b)).collect();
        let x = solve(&cols, target)?;
        let mut acc = BTreeMap::new();
        for (c, b) in x.iter().zip(basis.iter()) {
            crate::linalg::axpy(&mut acc, c, b);
        }
        Some(crate::linalg::sparse_from_map(acc))
    }

    pub fn is_multiplicative(&self, src: &FiniteDimAlgebra, tgt: &FiniteDimAlgebra) -> bool {
        (0..src.dim()).all(|i| {
            (0..src.dim()).all(|j| {
                let (a, b) = (src.basis_vector(i), src.basis_vector(j));
                self.apply(&src.mul(&a, &b)) == tgt.mul(&self.apply(&a), &self.apply(&b))
            })
        }) && self.apply(&src.unit()) == tgt.unit()
    }
}

pub fn intersect_all(spans: &[&Span<usize, Scalar>], dim: usize) -> Span<usize, Scalar> {
    let mut it = spans.iter();
    let Some(first) = it.next() else {
        return Span::from_vectors((0..dim).map(|i| vec![(i, Scalar::one())]));
    };
    let mut acc = (*first).clone();
    for s in it {
        acc = acc.intersect(s);
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletionReport {
    pub is_covering: bool,
    pub complete: bool,
    pub dim_algebra: usize,
    pub dim_intersection: usize,
    pub dim_completion: usize,
    pub dim_image: usize,
    /// A compatible tuple outside the image of the canonical map, one string per component.
    pub witness: Option<Vec<String>>,
}

/// Compatible-tuple space of the quotients `A/J_i`, with the image of `A` inside it.
pub struct Completion<'a> {
    pub algebra: &'a FiniteDimAlgebra,
    pub ideals: Vec<Span<usize, Scalar>>,
    pub pair_sums: BTreeMap<(usize, usize), Span<usize, Scalar>>,
    /// Compatible tuples, keyed `(component, basis index)`.
    pub space: Span<(usize, usize), Scalar>,
    pub image: Span<(usize, usize), Scalar>,
}

impl<'a> Completion<'a> {
    pub fn new(algebra: &'a FiniteDimAlgebra, ideals: &[Span<usize, Scalar>]) -> Self {
        let n = ideals.len();
        let mut pair_sums = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                pair_sums.insert((i, j), ideals[i].sum(&ideals[j]));
            }
        }
        let mut rows = Vec::new();
        for i in 0..n {
            let pivots: std::collections::BTreeSet<usize> = ideals[i].pivots().copied().collect();
            for k in (0..algebra.dim()).filter(|k| !pivots.contains(k)) {
                let e = vec![(k, Scalar::one())];
                let mut img: SparseVec<((usize, usize), usize), Scalar> = Vec::new();
                for j in (0..n).filter(|&j| j != i) {
                    let key = (i.min(j), i.max(j));
                    let sign = if i < j { Scalar::one() } else { -Scalar::one() };
                    for (kk, c) in pair_sums[&key].reduce(&e) {
                        img.push(((key, kk), &c * &sign));
                    }
                }
                img.sort_by_key(|a| a.0);
                rows.push((vec![((i, k), Scalar::one())], img));
            }
        }
        let space = kernel(rows);
        let image = Span::from_vectors((0..algebra.dim()).map(|b| {
            let e = vec![(b, Scalar::one())];
            let mut v: SparseVec<(usize, usize), Scalar> = Vec::new();
            for (i, id) in ideals.iter().enumerate() {
                v.extend(id.reduce(&e).into_iter().map(|(k, c)| ((i, k), c)));
            }
            v
        }));
        Completion {
            algebra,
            ideals: ideals.to_vec(),
            pair_sums,
            space,
            image,
        }
    }

    /// Coordinates of the tuple `(a_i + J_i)_i`.
    pub fn tuple(&self, components: &[Vector]) -> SparseVec<(usize, usize), Scalar> {
        let mut v = Vec::new();
        for (i, (id, a)) in self.ideals.iter().zip(components).enumerate() {
            v.extend(id.reduce(a).into_iter().map(|(k, c)| ((i, k), c)));
        }
        v
    }

    pub fn is_compatible(&self, t: &SparseVec<(usize, usize), Scalar>) -> bool {
        self.space.contains(t)
    }

    pub fn has_preimage(&self, t: &SparseVec<(usize, usize), Scalar>) -> bool {
        self.image.contains(t)
    }

    pub fn split(&self, t: &[((usize, usize), Scalar)]) -> Vec<Vector> {
        let mut out = vec![Vec::new(); self.ideals.len()];
        for ((i, k), c) in t {
            out[*i].push((*k, c.clone()));
        }
        out
    }
}

pub fn covering_completion_check(
    a: &FiniteDimAlgebra,
    ideals: &[Span<usize, Scalar>],
) -> Result<CompletionReport, QuotientError> {
    let refs: Vec<&Span<usize, Scalar>> = ideals.iter().collect();
    let inter = intersect_all(&refs, a.dim());
    if inter.dim() != 0 {
        return Err(QuotientError::NotACovering(inter.dim()));
    }
    let c = Completion::new(a, ideals);
    let witness = c
        .space
        .rows()
        .find(|r| !c.image.contains(r))
        .map(|r| c.split(r).iter().map(|v| a.format_vector(v)).collect());
    Ok(CompletionReport {
        is_covering: true,
        complete: c.space.dim() == c.image.dim(),
        dim_algebra: a.dim(),
        dim_intersection: 0,
        dim_completion: c.space.dim(),
        dim_image: c.image.dim(),
        witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub family: String,
    pub k: usize,
    pub holds: bool,
    pub dim_left: usize,
    pub dim_right: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeReport {
    /// `⋂_{i<k}(J_i+J_k) = (⋂_{i<k}J_i)+J_k` for `k >= 3` (1-based; smaller `k` are trivial).
    pub sequential: Vec<IdentityCheck>,
    /// `⋂_{i≠k}(J_i+J_k) = (⋂_{i≠k}J_i)+J_k` for every `k`.
    pub symmetric: Vec<IdentityCheck>,
    pub complete: Option<bool>,
    /// For three ideals: completeness, one identity, all identities agree.
    pub three_way_agreement: Option<bool>,
}

fn identity(a: &FiniteDimAlgebra, ideals: &[Span<usize, Scalar>], others: &[usize], k: usize, family: &str) -> IdentityCheck {
    let sums: Vec<Span<usize, Scalar>> = others.iter().map(|&i| ideals[i].sum(&ideals[k])).collect();
    let left = intersect_all(&sums.iter().collect::<Vec<_>>(), a.dim());
    let inter = intersect_all(&others.iter().map(|&i| &ideals[i]).collect::<Vec<_>>(), a.dim());
    let right = inter.sum(&ideals[k]);
    IdentityCheck {
        family: family.into(),
        k: k + 1,
        holds: left.equals(&right),
        dim_left: left.dim(),
        dim_right: right.dim(),
    }
}

pub fn lattice_condition_check(a: &FiniteDimAlgebra, ideals: &[Span<usize, Scalar>]) -> LatticeReport {
    let n = ideals.len();
    let sequential = (2..n)
        .map(|k| identity(a, ideals, &(0..k).collect::<Vec<_>>(), k, "sequential"))
        .collect();
    let symmetric: Vec<IdentityCheck> = (0..n)
        .map(|k| identity(a, ideals, &(0..n).filter(|&i| i != k).collect::<Vec<_>>(), k, "symmetric"))
        .collect();
    let complete = covering_completion_check(a, ideals).ok().map(|r| r.complete);
    let three_way_agreement = match (n, complete) {
        (3, Some(c)) => {
            let one = symmetric.iter().any(|x| x.holds);
            let all = symmetric.iter().all(|x| x.holds);
            Some(c == one && one == all)
        }
        _ => None,
    };
    LatticeReport {
        sequential,
        symmetric,
        complete,
        three_way_agreement,
    }
}

/// Coordinates of an element of a presentation in its finite-dimensional model.
pub fn coordinates(rs: &RewriteSystem, words: &[Word], e: &Element) -> Result<Vector, RewriteError> {
    let nf = rs.normal_form(e)?;
    let index: BTreeMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    Ok(nf.terms().iter().map(|(w, c)| (index[w], c.clone())).collect())
}
