//! Fibered products along surjections: finite-dimensional gluings with their canonical
//! coverings and the local-section lifting, and the presented gluing of two discs.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::freealg::Element;
use crate::linalg::{kernel, solve, SparseVec, Span};
use crate::models;
use crate::quotient::{
    covering_completion_check, intersect_all, AlgebraMorphism, CompletionReport, FiniteDimAlgebra, LinearMap,
    QuotientError, Vector,
};
use crate::rewrite::{orient_presentation, Presentation, RewriteError, RewriteSystem};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GluingError {
    #[error("gluing condition violated: {0}")]
    ConditionsViolated(String),
    #[error("no correction term at stage {stage} (component {component}, step {step})")]
    NoSolution { stage: usize, component: usize, step: usize },
    #[error("intertwining fails for map ({i},{j}) on basis element {basis}")]
    NotIntertwining { i: usize, j: usize, basis: usize },
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

type TupleKey = (usize, usize);

/// Algebras `B_i`, interfaces `B_ij` (stored for `i < j`) and surjections `π^i_j: B_i -> B_ij`.
#[derive(Clone, Debug)]
pub struct GluingDatum {
    pub algebras: Vec<FiniteDimAlgebra>,
    pub interfaces: BTreeMap<(usize, usize), FiniteDimAlgebra>,
    pub maps: BTreeMap<(usize, usize), LinearMap>,
}

fn key(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

impl GluingDatum {
    /// `B_i = A/J_i`, `B_ij = A/(J_i + J_j)` with the canonical maps.
    pub fn from_covering(a: &FiniteDimAlgebra, ideals: &[Span<usize, Scalar>]) -> Self {
        let n = ideals.len();
        let mut algebras = Vec::new();
        let mut projections = Vec::new();
        for id in ideals {
            let (q, m) = a.quotient(id);
            algebras.push(q);
            projections.push(m);
        }
        let mut interfaces = BTreeMap::new();
        let mut maps = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let (qij, pij) = a.quotient(&ideals[i].sum(&ideals[j]));
                for (s, t) in [(i, j), (j, i)] {
                    // B_s -> B_ij through any lift to A
                    let lift = |v: &Vector| projections[s].preimage(v).expect("projection is onto");
                    let images = (0..algebras[s].dim())
                        .map(|b| pij.apply(&lift(&algebras[s].basis_vector(b))))
                        .collect();
                    maps.insert((s, t), LinearMap { images });
                }
                interfaces.insert((i, j), qij);
            }
        }
        GluingDatum {
            algebras,
            interfaces,
            maps,
        }
    }

    pub fn len(&self) -> usize {
        self.algebras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.algebras.is_empty()
    }

    pub fn map(&self, i: usize, j: usize) -> &LinearMap {
        &self.maps[&(i, j)]
    }

    /// Checks that every `π^i_j` is a surjective algebra map.
    pub fn validate(&self) -> Result<(), GluingError> {
        for (&(i, j), m) in &self.maps {
            let tgt = &self.interfaces[&key(i, j)];
            if !m.is_multiplicative(&self.algebras[i], tgt) {
                return Err(GluingError::ConditionsViolated(format!("π^{}_{} is not multiplicative", i + 1, j + 1)));
            }
            if m.image_of(&full(self.algebras[i].dim())).dim() != tgt.dim() {
                return Err(GluingError::ConditionsViolated(format!("π^{}_{} is not onto", i + 1, j + 1)));
            }
        }
        Ok(())
    }

    /// `Ok` if all interface conditions hold, else the first failing pair (1-based).
    pub fn membership(&self, t: &[Vector]) -> Result<(), (usize, usize)> {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.map(i, j).apply(&t[i]) != self.map(j, i).apply(&t[j]) {
                    return Err((i + 1, j + 1));
                }
            }
        }
        Ok(())
    }

    /// The compatible tuples, keyed `(component, basis index)`.
    pub fn glued_space(&self) -> Span<TupleKey, Scalar> {
        let mut rows = Vec::new();
        for i in 0..self.len() {
            for b in 0..self.algebras[i].dim() {
                let mut img: SparseVec<((usize, usize), usize), Scalar> = Vec::new();
                for j in (0..self.len()).filter(|&j| j != i) {
                    let sign = if i < j { Scalar::one() } else { -Scalar::one() };
                    for (k, c) in self.map(i, j).apply(&self.algebras[i].basis_vector(b)) {
                        img.push(((key(i, j), k), &c * &sign));
                    }
                }
                img.sort_by_key(|x| x.0);
                rows.push((vec![((i, b), Scalar::one())], img));
            }
        }
        kernel(rows).into_reduced()
    }

    /// The gluing as a finite-dimensional algebra on a basis of compatible tuples.
    pub fn glued_algebra(&self) -> GluedAlgebra {
        let space = self.glued_space();
        let basis: Vec<SparseVec<TupleKey, Scalar>> = space.basis();
        let mul_tuples = |u: &SparseVec<TupleKey, Scalar>, v: &SparseVec<TupleKey, Scalar>| {
            let (us, vs) = (split(u, self.len()), split(v, self.len()));
            let mut out = Vec::new();
            for i in 0..self.len() {
                out.extend(self.algebras[i].mul(&us[i], &vs[i]).into_iter().map(|(k, c)| ((i, k), c)));
            }
            out
        };
        let coords = |t: &SparseVec<TupleKey, Scalar>| -> Vector {
            solve(&basis, t)
                .expect("gluing is closed under products")
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .collect()
        };
        let table = basis
            .iter()
            .map(|u| basis.iter().map(|v| coords(&mul_tuples(u, v))).collect())
            .collect();
        let mut unit_t = Vec::new();
        for i in 0..self.len() {
            unit_t.extend(self.algebras[i].unit().into_iter().map(|(k, c)| ((i, k), c)));
        }
        let names = (0..basis.len()).map(|i| format!("t{}", i)).collect();
        let algebra = FiniteDimAlgebra::from_table("gluing", names, table, coords(&unit_t));
        let projections = (0..self.len())
            .map(|i| LinearMap {
                images: basis.iter().map(|t| split(t, self.len())[i].clone()).collect(),
            })
            .collect();
        GluedAlgebra {
            algebra,
            tuples: basis,
            projections,
        }
    }
}

fn full(n: usize) -> Span<usize, Scalar> {
    Span::from_vectors((0..n).map(|i| vec![(i, Scalar::one())]))
}

pub fn split(t: &[(TupleKey, Scalar)], n: usize) -> Vec<Vector> {
    let mut out = vec![Vec::new(); n];
    for ((i, k), c) in t {
        out[*i].push((*k, c.clone()));
    }
    out
}

pub struct GluedAlgebra {
    pub algebra: FiniteDimAlgebra,
    pub tuples: Vec<SparseVec<TupleKey, Scalar>>,
    /// `p_i` in glued-basis coordinates.
    pub projections: Vec<LinearMap>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CanonicalCoveringReport {
    pub dim_gluing: usize,
    pub dims_ker_p: Vec<usize>,
    pub intersection_zero: bool,
    pub completion: Option<CompletionReport>,
    /// `p_j(ker p_i) ⊂ ker π^j_i` for all `i ≠ j`.
    pub projection_remark: bool,
    pub surjective_projections: Vec<bool>,
}

pub fn canonical_covering_of_gluing(d: &GluingDatum) -> Result<CanonicalCoveringReport, GluingError> {
    let g = d.glued_algebra();
    let kers: Vec<Span<usize, Scalar>> = g.projections.iter().map(|p| p.kernel()).collect();
    let inter = intersect_all(&kers.iter().collect::<Vec<_>>(), g.algebra.dim());
    let completion = if inter.dim() == 0 {
        Some(covering_completion_check(&g.algebra, &kers)?)
    } else {
        None
    };
    let mut remark = true;
    for i in 0..d.len() {
        for j in (0..d.len()).filter(|&j| j != i) {
            let img = g.projections[j].image_of(&kers[i]);
            let kji = d.map(j, i).kernel();
            remark &= kji.contains_span(&img);
        }
    }
    let surjective_projections = (0..d.len())
        .map(|i| g.projections[i].image_of(&full(g.algebra.dim())).dim() == d.algebras[i].dim())
        .collect();
    Ok(CanonicalCoveringReport {
        dim_gluing: g.algebra.dim(),
        dims_ker_p: kers.iter().map(|k| k.dim()).collect(),
        intersection_zero: inter.dim() == 0,
        completion,
        projection_remark: remark,
        surjective_projections,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftConditions {
    /// `π^i_j(ker π^i_k) = π^j_i(ker π^j_k)` for all distinct triples.
    pub images_agree: bool,
    /// The cocycle identity between the induced isomorphisms.
    pub cocycle: bool,
    pub failures: Vec<String>,
}

impl GluingDatum {
    fn kernel_of(&self, i: usize, j: usize) -> Span<usize, Scalar> {
        self.map(i, j).kernel()
    }

    /// `φ^k_{ij}` applied to a representative in `B_j`; the result is a canonical
    /// representative in `B_i / (ker π^i_j + ker π^i_k)`.
    fn phi(&self, k: usize, i: usize, j: usize, v: &[(usize, Scalar)]) -> Option<Vector> {
        let w = self.map(j, i).apply(v);
        let target_mod = self.map(i, j).image_of(&self.kernel_of(i, k));
        // u with π^i_j(u) ≡ w modulo π^i_j(ker π^i_k)
        let m = self.map(i, j);
        let mut cols = m.images.clone();
        cols.extend(target_mod.basis());
        let x = solve(&cols, &w)?;
        let mut u = BTreeMap::new();
        for (b, c) in x.iter().take(m.images.len()).enumerate() {
            if !c.is_zero() {
                u.insert(b, c.clone());
            }
        }
        let u: Vector = u.into_iter().collect();
        let modulus = self.kernel_of(i, j).sum(&self.kernel_of(i, k));
        Some(modulus.reduce(&u))
    }

    pub fn lift_conditions(&self) -> LiftConditions {
        let n = self.len();
        let mut failures = Vec::new();
        let mut images_agree = true;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let a = self.map(i, j).image_of(&self.kernel_of(i, k));
                    let b = self.map(j, i).image_of(&self.kernel_of(j, k));
                    if !a.equals(&b) {
                        images_agree = false;
                        failures.push(format!("π^{i}_{j}(ker π^{i}_{k}) ≠ π^{j}_{i}(ker π^{j}_{k})", i = i + 1, j = j + 1, k = k + 1));
                    }
                }
            }
        }
        let mut cocycle = images_agree;
        if images_agree {
            'outer: for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if i == j || j == k || i == k {
                            continue;
                        }
                        let modulus = self.kernel_of(i, k).sum(&self.kernel_of(i, j));
                        for b in 0..self.algebras[k].dim() {
                            let e = self.algebras[k].basis_vector(b);
                            let direct = self.phi(j, i, k, &e);
                            let via = self.phi(i, j, k, &e).and_then(|m| self.phi(k, i, j, &m));
                            let ok = match (direct, via) {
                                (Some(x), Some(y)) => modulus.reduce(&x) == modulus.reduce(&y),
                                _ => false,
                            };
                            if !ok {
                                cocycle = false;
                                failures.push(format!(
                                    "φ^{j}_{i}{k} ≠ φ^{k}_{i}{j} ∘ φ^{i}_{j}{k} on basis element {b}",
                                    i = i + 1,
                                    j = j + 1,
                                    k = k + 1
                                ));
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        LiftConditions {
            images_agree,
            cocycle,
            failures,
        }
    }

    /// Extends `f ∈ B_i` to a compatible tuple by the inductive correction procedure.
    pub fn lift_local_section(&self, i: usize, f: &[(usize, Scalar)]) -> Result<Vec<Vector>, GluingError> {
        let cond = self.lift_conditions();
        if !(cond.images_agree && cond.cocycle) {
            return Err(GluingError::ConditionsViolated(cond.failures.join("; ")));
        }
        let n = self.len();
        // process indices with i first
        let order: Vec<usize> = std::iter::once(i).chain((0..n).filter(|&k| k != i)).collect();
        let mut found: Vec<Vector> = vec![f.to_vec()];
        for stage in 1..n {
            let target = order[stage];
            // f^1: agree with the first component
            let w = self.map(order[0], target).apply(&found[0]);
            let mut g = self
                .map(target, order[0])
                .preimage(&w)
                .ok_or(GluingError::NoSolution { stage, component: target, step: 0 })?;
            for step in 1..stage {
                let other = order[step];
                let r = sub(&self.map(target, other).apply(&g), &self.map(other, target).apply(&found[step]));
                if r.is_empty() {
                    continue;
                }
                let within = intersect_all(
                    &(0..step).map(|s| self.kernel_of(target, order[s])).collect::<Vec<_>>().iter().collect::<Vec<_>>(),
                    self.algebras[target].dim(),
                );
                let rt = self
                    .map(target, other)
                    .preimage_within(&r, &within)
                    .ok_or(GluingError::NoSolution { stage, component: target, step })?;
                g = sub(&g, &rt);
            }
            found.push(g);
        }
        let mut out = vec![Vec::new(); n];
        for (pos, &k) in order.iter().enumerate() {
            out[k] = found[pos].clone();
        }
        debug_assert!(self.membership(&out).is_ok());
        Ok(out)
    }
}

fn sub(a: &[(usize, Scalar)], b: &[(usize, Scalar)]) -> Vector {
    crate::linalg::add_scaled(a, &-Scalar::one(), b)
}

/// Checks `φ_ij ∘ η^i_j = π^i_j ∘ φ_i` and that images of compatible tuples are compatible.
pub fn glued_morphism_check(
    source: &GluingDatum,
    target: &GluingDatum,
    phi: &[LinearMap],
    phi_ij: &BTreeMap<(usize, usize), LinearMap>,
) -> Result<(), GluingError> {
    for (&(i, j), eta) in &source.maps {
        let lhs = phi_ij[&key(i, j)].compose(eta);
        let rhs = target.map(i, j).compose(&phi[i]);
        for b in 0..source.algebras[i].dim() {
            if lhs.images[b] != rhs.images[b] {
                return Err(GluingError::NotIntertwining { i: i + 1, j: j + 1, basis: b });
            }
        }
    }
    let space = source.glued_space();
    for t in space.rows() {
        let comps = split(t, source.len());
        let img: Vec<Vector> = comps.iter().enumerate().map(|(i, c)| phi[i].apply(c)).collect();
        if let Err((i, j)) = target.membership(&img) {
            return Err(GluingError::ConditionsViolated(format!("image tuple fails at ({}, {})", i, j)));
        }
    }
    Ok(())
}

/// The disc gluing and the sphere presentation that realizes it.
pub struct SphereGluing {
    pub sphere: Presentation,
    pub sphere_rs: Arc<RewriteSystem>,
    pub disc_p: Arc<RewriteSystem>,
    pub disc_q: Arc<RewriteSystem>,
    pub circle: Arc<RewriteSystem>,
    pub pi1: AlgebraMorphism,
    pub pi2: AlgebraMorphism,
    pub phi_p: AlgebraMorphism,
    pub phi_q: AlgebraMorphism,
    /// Tuples for `f0`, `f1`, `fm1`.
    pub generators: Vec<(String, [Element; 2])>,
}

/// The sphere with parameters `p`, `q` as the gluing of `P(D_p)` (generator `x`) and
/// `P(D_q)` (generator `y`) over the circle.
pub fn build_sphere_gluing(p: &Scalar, q: &Scalar) -> Result<SphereGluing, GluingError> {
    let sphere = models::sphere(p, q);
    let sphere_rs = Arc::new(orient_presentation(&sphere)?);
    let dp = models::disc("x", p);
    let dq = models::disc("y", q);
    let ci = models::circle();
    let disc_p = Arc::new(orient_presentation(&dp)?);
    let disc_q = Arc::new(orient_presentation(&dq)?);
    let circle = Arc::new(orient_presentation(&ci)?);
    let el = |pr: &Presentation, s: &str| crate::parse::parse_element(&pr.alphabet, s).expect("element");
    // sphere letters: f1, f0, fm1
    let pi1 = AlgebraMorphism::new(
        "pi1",
        sphere_rs.clone(),
        &sphere.relations,
        disc_p.clone(),
        vec![el(&dp, "x"), el(&dp, "x x*"), el(&dp, "x*")],
    )?;
    let pi2 = AlgebraMorphism::new(
        "pi2",
        sphere_rs.clone(),
        &sphere.relations,
        disc_q.clone(),
        vec![el(&dq, "y"), el(&dq, "1"), el(&dq, "y*")],
    )?;
    let phi_p = AlgebraMorphism::new("phi_p", disc_p.clone(), &dp.relations, circle.clone(), vec![el(&ci, "a"), el(&ci, "a*")])?;
    let phi_q = AlgebraMorphism::new("phi_q", disc_q.clone(), &dq.relations, circle.clone(), vec![el(&ci, "a"), el(&ci, "a*")])?;
    let generators = vec![
        ("f0".to_string(), [el(&dp, "x x*"), el(&dq, "1")]),
        ("f1".to_string(), [el(&dp, "x"), el(&dq, "y")]),
        ("fm1".to_string(), [el(&dp, "x*"), el(&dq, "y*")]),
    ];
    Ok(SphereGluing {
        sphere,
        sphere_rs,
        disc_p,
        disc_q,
        circle,
        pi1,
        pi2,
        phi_p,
        phi_q,
        generators,
    })
}

impl SphereGluing {
    /// `Ok` iff `φ_p(a) = φ_q(b)`; otherwise the failing pair `(1, 2)`.
    pub fn membership(&self, a: &Element, b: &Element) -> Result<Result<(), (usize, usize)>, RewriteError> {
        Ok(if self.phi_p.apply(a)? == self.phi_q.apply(b)? {
            Ok(())
        } else {
            Err((1, 2))
        })
    }

    /// Componentwise images of a sphere element.
    pub fn tuple(&self, e: &Element) -> Result<[Element; 2], RewriteError> {
        Ok([self.pi1.apply(e)?, self.pi2.apply(e)?])
    }

    /// Every sphere relation holds for the generator tuples, component by component.
    pub fn tuples_satisfy_relations(&self) -> Result<bool, RewriteError> {
        let imgs_p: Vec<Element> = ["f1", "f0", "fm1"].iter().map(|n| self.gen(n)[0].clone()).collect();
        let imgs_q: Vec<Element> = ["f1", "f0", "fm1"].iter().map(|n| self.gen(n)[1].clone()).collect();
        for r in &self.sphere.relations {
            let a = self.disc_p.normal_form(&r.substitute(self.disc_p.alphabet(), &imgs_p))?;
            let b = self.disc_q.normal_form(&r.substitute(self.disc_q.alphabet(), &imgs_q))?;
            if !a.is_zero() || !b.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn gen(&self, name: &str) -> &[Element; 2] {
        &self.generators.iter().find(|(n, _)| n == name).expect("generator").1
    }

    /// Dimension of the compatible tuples with components of degree at most `d`, and of
    /// their intersection with the images of sphere words of length at most `d_src`.
    pub fn surjectivity_at(&self, d: usize, d_src: usize) -> Result<(usize, usize), RewriteError> {
        let wp = self.disc_p.algebra_basis(d);
        let wq = self.disc_q.algebra_basis(d);
        let mut rows = Vec::new();
        for (side, words, m, sign) in [(0u8, &wp, &self.phi_p, Scalar::one()), (1u8, &wq, &self.phi_q, -Scalar::one())] {
            for w in words.iter() {
                let img: SparseVec<_, Scalar> = m
                    .apply_word(w)?
                    .into_terms()
                    .into_iter()
                    .map(|(k, c)| (k, &c * &sign))
                    .collect();
                rows.push((vec![((side, w.clone()), Scalar::one())], img));
            }
        }
        let glued = kernel(rows);
        let mut image = Span::new();
        for w in self.sphere_rs.algebra_basis(d_src) {
            let [a, b] = self.tuple(&Element::word(self.sphere_rs.alphabet(), w))?;
            let mut v: SparseVec<(u8, crate::freealg::Word), Scalar> = Vec::new();
            v.extend(a.into_terms().into_iter().map(|(k, c)| ((0u8, k), c)));
            v.extend(b.into_terms().into_iter().map(|(k, c)| ((1u8, k), c)));
            v.sort_by(|x, y| x.0.cmp(&y.0));
            image.insert(v);
        }
        let covered = glued.intersect(&image);
        Ok((glued.dim(), covered.dim()))
    }
}
