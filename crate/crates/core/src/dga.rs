//! Differential forms over presented algebras: truncations of the universal calculus,
//! calculi given by rewriting systems on `{g, d(g)}`, morphisms between them, adapted
//! kernels, interface ideals and the disc's module-basis projections.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use smallvec::SmallVec;
use thiserror::Error;

use crate::freealg::{AlgebraError, Alphabet, Element, Word};
use crate::linalg::{axpy, kernel, sparse_from_map, Fp, SparseVec, Span};
use crate::quotient::AlgebraMorphism;
use crate::rewrite::{orient_presentation, Presentation, RewriteError, RewriteSystem};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DgaError {
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("morphism is not differentiable: {relation} maps to {image}")]
    NotDifferentiable { relation: String, image: String },
    #[error("expected a form of degree {expected}, got {got}")]
    WrongDegree { expected: u32, got: u32 },
    #[error("{0} does not have the shape x^k x*^l")]
    NotACanonicalWord(String),
    #[error("calculus invariant violated: {0}")]
    Invariant(String),
}

/// `a0 d(a1) ... d(an)` with basis words `a_i`, `a_i != 1` for `i >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormKey(pub SmallVec<[Word; 4]>);

impl FormKey {
    pub fn scalar_part(w: Word) -> Self {
        let mut v = SmallVec::new();
        v.push(w);
        FormKey(v)
    }

    pub fn degree(&self) -> u32 {
        self.0.len() as u32 - 1
    }

    /// Filtered degree: total word length.
    pub fn weight(&self) -> usize {
        self.0.iter().map(|w| w.len()).sum()
    }

    fn with_d(&self, w: &Word) -> FormKey {
        let mut v = self.0.clone();
        v.push(w.clone());
        FormKey(v)
    }

    pub fn display(&self, a: &Alphabet) -> String {
        let mut s = String::new();
        for (i, w) in self.0.iter().enumerate() {
            if i == 0 {
                if !w.is_unit() || self.0.len() == 1 {
                    s.push_str(&w.display(a).to_string());
                }
            } else {
                if !s.is_empty() {
                    s.push(' ');
                }
                s.push_str(&format!("d({})", w.display(a)));
            }
        }
        s
    }
}

impl Ord for FormKey {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.weight()
            .cmp(&o.weight())
            .then_with(|| self.0.len().cmp(&o.0.len()))
            .then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for FormKey {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

pub type FormVec = SparseVec<FormKey, Scalar>;

type Cache = RwLock<HashMap<(FormKey, Word), Arc<FormVec>>>;

/// The universal calculus `Ω(B)` of an algebra with a confluent rewriting system.
pub struct UniversalForms {
    pub rs: Arc<RewriteSystem>,
    pub ext: Arc<Alphabet>,
    cache: Cache,
}

impl UniversalForms {
    pub fn new(rs: Arc<RewriteSystem>) -> Self {
        let ext = Arc::new(rs.alphabet().with_differentials());
        UniversalForms {
            rs,
            ext,
            cache: RwLock::new(HashMap::new()),
        }
    }

    /// Basis of `Ω^n` with filtered degree at most `d`.
    pub fn basis(&self, n: u32, d: usize) -> Vec<FormKey> {
        let words = self.rs.algebra_basis(d);
        let mut keys = vec![FormKey(SmallVec::new())];
        for i in 0..=n {
            let mut next = Vec::new();
            for k in &keys {
                let used = k.weight();
                for w in &words {
                    if (i > 0 && w.is_unit()) || used + w.len() > d {
                        continue;
                    }
                    next.push(k.with_d(w));
                }
            }
            keys = next;
        }
        keys.sort();
        keys
    }

    fn nf(&self, w: &Word) -> Result<Vec<(Word, Scalar)>, RewriteError> {
        Ok(self.rs.normal_form_word(w)?.into_terms().into_iter().collect())
    }

    /// `key · b` for a word `b`.
    pub fn right_mul_word(&self, key: &FormKey, b: &Word) -> Result<Arc<FormVec>, RewriteError> {
        if b.is_unit() {
            return Ok(Arc::new(vec![(key.clone(), Scalar::one())]));
        }
        let ck = (key.clone(), b.clone());
        if let Some(v) = self.cache.read().unwrap().get(&ck) {
            return Ok(v.clone());
        }
        let mut acc = BTreeMap::new();
        let n = key.0.len();
        if n == 1 {
            for (w, c) in self.nf(&key.0[0].concat(b))? {
                acc.insert(FormKey::scalar_part(w), c);
            }
        } else {
            // ... d(an) b = ... d(an b) - (... an) d(b)
            let prefix = FormKey(key.0[..n - 1].iter().cloned().collect());
            let an = &key.0[n - 1];
            for (w, c) in self.nf(&an.concat(b))? {
                if !w.is_unit() {
                    axpy(&mut acc, &c, &[(prefix.with_d(&w), Scalar::one())]);
                }
            }
            let left = self.right_mul_word(&prefix, an)?;
            for (k, c) in left.iter() {
                axpy(&mut acc, &-c, &[(k.with_d(b), Scalar::one())]);
            }
        }
        let v = Arc::new(sparse_from_map(acc));
        self.cache.write().unwrap().insert(ck, v.clone());
        Ok(v)
    }

    fn append_d(&self, v: &[(FormKey, Scalar)], b: &[(Word, Scalar)]) -> FormVec {
        let mut acc = BTreeMap::new();
        for (k, c) in v {
            for (w, cb) in b {
                if !w.is_unit() {
                    axpy(&mut acc, &(c * cb), &[(k.with_d(w), Scalar::one())]);
                }
            }
        }
        sparse_from_map(acc)
    }

    pub fn mul(&self, u: &[(FormKey, Scalar)], v: &[(FormKey, Scalar)]) -> Result<FormVec, RewriteError> {
        let mut acc = BTreeMap::new();
        for (kv, cv) in v {
            for (ku, cu) in u {
                let left = self.right_mul_word(ku, &kv.0[0])?;
                for (k, c) in left.iter() {
                    let mut words = k.0.clone();
                    words.extend(kv.0[1..].iter().cloned());
                    axpy(&mut acc, &(&(cu * cv) * c), &[(FormKey(words), Scalar::one())]);
                }
            }
        }
        Ok(sparse_from_map(acc))
    }

    pub fn d(&self, v: &[(FormKey, Scalar)]) -> FormVec {
        let mut acc = BTreeMap::new();
        for (k, c) in v {
            if k.0[0].is_unit() {
                continue;
            }
            let mut words: SmallVec<[Word; 4]> = SmallVec::new();
            words.push(Word::unit());
            words.extend(k.0.iter().cloned());
            axpy(&mut acc, c, &[(FormKey(words), Scalar::one())]);
        }
        sparse_from_map(acc)
    }

    pub fn from_algebra(&self, e: &Element) -> Result<FormVec, RewriteError> {
        let nf = self.rs.normal_form(e)?;
        Ok(nf.into_terms().into_iter().map(|(w, c)| (FormKey::scalar_part(w), c)).collect())
    }

    /// Coordinates of an element written over `{g, d(g)}`.
    pub fn from_element(&self, e: &Element) -> Result<FormVec, DgaError> {
        let base = self.rs.alphabet();
        let mut acc = BTreeMap::new();
        for (w, c) in e.terms() {
            let mut cur: FormVec = vec![(FormKey::scalar_part(Word::unit()), c.clone())];
            for l in w.letters() {
                let g = self.ext.generator(l);
                match g.base {
                    None => {
                        let i = base.index(&g.name)?;
                        cur = self.mul(&cur, &[(FormKey::scalar_part(Word::letter(i)), Scalar::one())])?;
                    }
                    Some(b) => {
                        let i = base.index(&self.ext.generator(b).name)?;
                        cur = self.append_d(&cur, &self.nf(&Word::letter(i))?);
                    }
                }
            }
            for (k, c) in cur {
                axpy(&mut acc, &c, &[(k, Scalar::one())]);
            }
        }
        Ok(sparse_from_map(acc))
    }

    /// `a0 d(a1) ... d(an)` expanded over `{g, d(g)}` by the Leibniz rule.
    pub fn to_element(&self, key: &FormKey) -> Element {
        let word = |w: &Word| Element::word(self.rs.alphabet(), w.clone()).embed(&self.ext).expect("sub-alphabet");
        let mut acc = word(&key.0[0]);
        for w in &key.0[1..] {
            acc = &acc * &word(w).d().expect("differentials");
        }
        acc
    }

    pub fn vec_to_element(&self, v: &[(FormKey, Scalar)]) -> Element {
        let mut acc = Element::zero(&self.ext);
        for (k, c) in v {
            acc.add_scaled(c, &self.to_element(k));
        }
        acc
    }

    /// `m(a0) d(m(a1)) ... d(m(an))` in the universal forms of the target.
    pub fn pushforward(&self, m: &AlgebraMorphism, target: &UniversalForms, v: &[(FormKey, Scalar)]) -> Result<FormVec, RewriteError> {
        let mut acc = BTreeMap::new();
        for (k, c) in v {
            let mut cur = target.from_algebra(&m.apply_word(&k.0[0])?)?;
            for w in &k.0[1..] {
                let img: Vec<(Word, Scalar)> = m.apply_word(w)?.into_terms().into_iter().collect();
                cur = target.append_d(&cur, &img);
            }
            for (k2, c2) in cur {
                axpy(&mut acc, &(c * &c2), &[(k2, Scalar::one())]);
            }
        }
        Ok(sparse_from_map(acc))
    }
}

/// A calculus `Γ(B)` given by a rewriting system on the generators and their differentials.
pub struct Calculus {
    pub name: String,
    pub base: Arc<RewriteSystem>,
    pub system: Arc<RewriteSystem>,
    /// Relations in mixed form degrees, each read as `= 0`.
    pub relations: Vec<Element>,
    pub max_degree: u32,
}

impl std::fmt::Debug for Calculus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Calculus({})", self.name)
    }
}

impl Calculus {
    pub fn new(base: &Presentation, calculus: &Presentation, max_degree: u32) -> Result<Self, DgaError> {
        let c = Calculus {
            name: calculus.name.clone(),
            base: Arc::new(orient_presentation(base)?),
            system: Arc::new(orient_presentation(calculus)?),
            relations: calculus.relations.clone(),
            max_degree,
        };
        c.check_invariants()?;
        Ok(c)
    }

    /// `Γ(P(D))` with the disc parameter `param`.
    pub fn disc(name: &str, param: &Scalar) -> Result<Self, DgaError> {
        let base = crate::models::disc(name, param);
        Self::new(&base, &crate::models::disc_calculus(&base, param), 2)
    }

    /// The calculus with `d = 0` on every generator.
    pub fn trivial(base: &Presentation) -> Result<Self, DgaError> {
        let a = Arc::new(base.alphabet.with_differentials());
        let mut rels: Vec<Element> = base.relations.iter().map(|r| r.embed(&a)).collect::<Result<_, _>>()?;
        for g in base.alphabet.algebra_generators() {
            rels.push(Element::letter(&a, base.alphabet.len() + g));
        }
        let p = Presentation::new(&format!("{}_trivial", base.name), a, rels);
        Self::new(base, &p, 0)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.system.alphabet()
    }

    pub fn normal_form(&self, e: &Element) -> Result<Element, RewriteError> {
        self.system.normal_form(e)
    }

    /// `d` followed by normal form.
    pub fn d(&self, e: &Element) -> Result<Element, DgaError> {
        Ok(self.normal_form(&e.d()?)?)
    }

    /// Differential-ideal property of the relations and `d∘d = 0` on generators.
    pub fn check_invariants(&self) -> Result<(), DgaError> {
        for r in &self.relations {
            let dr = self.d(r)?;
            if !dr.is_zero() {
                return Err(DgaError::Invariant(format!("d({}) reduces to {}", r, dr)));
            }
        }
        for g in self.alphabet().algebra_generators() {
            let e = Element::letter(self.alphabet(), g);
            if !self.d(&e.d()?)?.is_zero() {
                return Err(DgaError::Invariant(format!("d(d({})) ≠ 0", self.alphabet().name(g))));
            }
        }
        Ok(())
    }
}

/// An algebra morphism extended to forms by `dg ↦ d(image of g)`.
#[derive(Clone)]
pub struct CalculusMorphism {
    pub morphism: AlgebraMorphism,
    pub target: Arc<Calculus>,
    /// Images of the source letters and their differentials over the target alphabet.
    pub images: Vec<Element>,
}

impl std::fmt::Debug for CalculusMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CalculusMorphism({} -> {})", self.morphism.name, self.target.name)
    }
}

/// Extends `m` to forms; every element of `source_relations` (over the source generators and
/// their differentials) must map to zero.
pub fn extend_morphism_to_forms(
    m: &AlgebraMorphism,
    target: Arc<Calculus>,
    source_relations: &[Element],
) -> Result<CalculusMorphism, DgaError> {
    let ta = target.alphabet().clone();
    let src = m.source.alphabet();
    let mut images = vec![Element::zero(&ta); 2 * src.len()];
    for g in src.algebra_generators() {
        let img = m.images[g].embed(&ta)?;
        images[src.len() + g] = img.d()?;
        images[g] = img;
    }
    let cm = CalculusMorphism {
        morphism: m.clone(),
        target,
        images,
    };
    for r in source_relations {
        let img = cm.apply(r)?;
        if !img.is_zero() {
            return Err(DgaError::NotDifferentiable {
                relation: r.to_string(),
                image: img.to_string(),
            });
        }
    }
    Ok(cm)
}

impl CalculusMorphism {
    /// Image of an element over the source generators and differentials.
    pub fn apply(&self, e: &Element) -> Result<Element, RewriteError> {
        self.target.normal_form(&e.substitute(self.target.alphabet(), &self.images))
    }

    pub fn apply_key(&self, forms: &UniversalForms, k: &FormKey) -> Result<Element, RewriteError> {
        self.apply(&forms.to_element(k))
    }

    pub fn apply_vec(&self, forms: &UniversalForms, v: &[(FormKey, Scalar)]) -> Result<Element, RewriteError> {
        self.apply(&forms.vec_to_element(v))
    }
}

/// A subspace of `Ω^n` truncated at filtered degree `bound`.
#[derive(Clone, Debug)]
pub struct FormSubspace {
    pub form_degree: u32,
    pub bound: usize,
    pub span: Span<FormKey, Scalar>,
}

impl FormSubspace {
    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    pub fn contains(&self, v: &[(FormKey, Scalar)]) -> bool {
        self.span.contains(v)
    }
}

type ImageKey = (usize, Word);

fn images_of(forms: &UniversalForms, maps: &[CalculusMorphism], keys: &[FormKey]) -> Result<Vec<SparseVec<ImageKey, Scalar>>, RewriteError> {
    keys.par_iter()
        .map(|k| {
            let e = forms.to_element(k);
            let mut img = Vec::new();
            for (i, m) in maps.iter().enumerate() {
                img.extend(m.apply(&e)?.into_terms().into_iter().map(|(w, c)| ((i, w), c)));
            }
            Ok(img)
        })
        .collect()
}

/// `⋂ ker` of the maps on `Ω^n` at filtered degree `<= d`, exactly.
pub fn adapted_calculus_kernel(
    forms: &UniversalForms,
    maps: &[CalculusMorphism],
    n: u32,
    d: usize,
) -> Result<FormSubspace, DgaError> {
    let keys = forms.basis(n, d);
    let imgs = images_of(forms, maps, &keys)?;
    let rows = keys
        .into_iter()
        .zip(imgs)
        .map(|(k, img)| (vec![(k, Scalar::one())], img))
        .collect();
    Ok(FormSubspace {
        form_degree: n,
        bound: d,
        span: kernel(rows),
    })
}

/// A random evaluation point for `(s, r, t)` modulo the field prime.
pub fn random_point(seed: u64) -> [u64; 3] {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    [(); 3].map(|_| rng.gen_range(2..Fp::MODULUS - 1))
}

fn to_fp<K: Clone>(v: &[(K, Scalar)], point: &[u64; 3]) -> Option<SparseVec<K, Fp>> {
    let mut out = Vec::with_capacity(v.len());
    for (k, c) in v {
        let x = c.eval_mod(point, Fp::MODULUS).ok()?;
        if x != 0 {
            out.push((k.clone(), Fp(x)));
        }
    }
    Some(out)
}

/// Rank of the combined map on `Ω^n_{<=d}` at a point: `dim Ω^n_{<=d} - rank` bounds the
/// kernel dimension from above.
pub fn kernel_dim_upper_bound(
    forms: &UniversalForms,
    maps: &[CalculusMorphism],
    n: u32,
    d: usize,
    point: &[u64; 3],
) -> Result<(usize, usize), DgaError> {
    let keys = forms.basis(n, d);
    let imgs = images_of(forms, maps, &keys)?;
    let mut span: Span<ImageKey, Fp> = Span::new();
    for img in &imgs {
        let v = to_fp(img, point).ok_or_else(|| DgaError::Invariant("singular evaluation point".into()))?;
        span.insert(v);
    }
    Ok((keys.len(), keys.len() - span.dim()))
}

/// Products `ω g ω'` with `g` in `gens ∪ d(gens)` landing in `Ω^n`, with the weights of the
/// factors summing to at most `d + slack`.
pub fn ideal_products(
    forms: &UniversalForms,
    gens: &[FormVec],
    n: u32,
    d: usize,
    slack: usize,
) -> Result<Vec<FormVec>, DgaError> {
    let mut all: Vec<FormVec> = Vec::new();
    for g in gens {
        all.push(g.clone());
        let dg = forms.d(g);
        if !dg.is_empty() {
            all.push(dg);
        }
    }
    let cap = d + slack;
    let mut jobs = Vec::new();
    for g in &all {
        let Some(k) = g.first().map(|(k, _)| k.degree()) else { continue };
        if k > n {
            continue;
        }
        let wg = g.iter().map(|(k, _)| k.weight()).max().unwrap_or(0);
        if wg > cap {
            continue;
        }
        for i in 0..=(n - k) {
            let left = forms.basis(i, cap - wg);
            for l in &left {
                let right = forms.basis(n - k - i, cap - wg - l.weight());
                for r in right {
                    jobs.push((g, l.clone(), r));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|(g, l, r)| {
            let lg = forms.mul(&[(l.clone(), Scalar::one())], g)?;
            Ok(forms.mul(&lg, &[(r.clone(), Scalar::one())])?)
        })
        .filter(|v: &Result<FormVec, DgaError>| v.as_ref().map_or(true, |v| !v.is_empty()))
        .collect()
}

/// The ideal span, truncated at `d`; a subset independent at `point` is echelonized exactly.
pub fn differential_ideal_span(
    forms: &UniversalForms,
    gens: &[FormVec],
    n: u32,
    d: usize,
    slack: usize,
    point: Option<&[u64; 3]>,
) -> Result<FormSubspace, DgaError> {
    let mut prods = ideal_products(forms, gens, n, d, slack)?;
    prods.sort_by(|a, b| a.last().map(|x| &x.0).cmp(&b.last().map(|x| &x.0)));
    let chosen: Vec<FormVec> = match point {
        None => prods,
        Some(pt) => {
            let mut fp: Span<FormKey, Fp> = Span::new();
            let mut keep = Vec::new();
            for v in prods {
                match to_fp(&v, pt) {
                    Some(x) => {
                        if fp.insert(x) {
                            keep.push(v);
                        }
                    }
                    None => keep.push(v),
                }
            }
            keep
        }
    };
    let span = Span::from_vectors(chosen);
    Ok(FormSubspace {
        form_degree: n,
        bound: d,
        span: span.restrict_downward(|k: &FormKey| k.weight() <= d),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealEqualityReport {
    pub form_degree: u32,
    pub bound: usize,
    pub dim_forms: usize,
    pub dim_claimed: usize,
    /// Exact when computed symbolically; otherwise the upper bound from a random point.
    pub dim_kernel: usize,
    /// Generators `g` (or `d(g)`) with a nonzero image, with that image.
    pub outside_kernel: Vec<(String, String)>,
    pub equal: bool,
}

/// Compares the claimed ideal with an exactly computed kernel.
pub fn verify_relation_ideal_equality(
    forms: &UniversalForms,
    claimed: &FormSubspace,
    kernel: &FormSubspace,
) -> IdealEqualityReport {
    let outside: Vec<(String, String)> = claimed
        .span
        .rows()
        .filter(|r| !kernel.span.contains(r))
        .map(|r| (forms.vec_to_element(r).to_string(), String::new()))
        .collect();
    IdealEqualityReport {
        form_degree: kernel.form_degree,
        bound: kernel.bound,
        dim_forms: forms.basis(kernel.form_degree, kernel.bound).len(),
        dim_claimed: claimed.dim(),
        dim_kernel: kernel.dim(),
        equal: outside.is_empty() && claimed.dim() == kernel.dim(),
        outside_kernel: outside,
    }
}

/// Generators `g` and `d(g)` not annihilated by every map, with the first nonzero image.
pub fn generators_outside_kernel(
    forms: &UniversalForms,
    gens: &[Element],
    maps: &[CalculusMorphism],
) -> Result<Vec<(String, String)>, DgaError> {
    let mut out = Vec::new();
    for g in gens {
        let v = forms.from_element(g)?;
        for (label, w) in [(g.to_string(), v.clone()), (format!("d({})", g), forms.d(&v))] {
            for m in maps {
                let img = m.apply_vec(forms, &w)?;
                if !img.is_zero() {
                    out.push((label.clone(), format!("{}: {}", m.morphism.name, img)));
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// Certifies the claimed ideal equals the kernel without an exact kernel: the claimed span
/// lies in the kernel (generators map to zero), and its dimension reaches the upper bound
/// from the rank at a random point.
pub fn certify_relation_ideal(
    forms: &UniversalForms,
    gens: &[Element],
    maps: &[CalculusMorphism],
    n: u32,
    d: usize,
    slack: usize,
    seed: u64,
) -> Result<IdealEqualityReport, DgaError> {
    let gvecs: Vec<FormVec> = gens.iter().map(|g| forms.from_element(g)).collect::<Result<_, _>>()?;
    let outside = generators_outside_kernel(forms, gens, maps)?;
    let point = random_point(seed);
    let (dim_forms, upper) = kernel_dim_upper_bound(forms, maps, n, d, &point)?;
    let claimed = differential_ideal_span(forms, &gvecs, n, d, slack, Some(&point))?;
    Ok(IdealEqualityReport {
        form_degree: n,
        bound: d,
        dim_forms,
        dim_claimed: claimed.dim(),
        dim_kernel: upper,
        equal: outside.is_empty() && claimed.dim() == upper,
        outside_kernel: outside,
    })
}

/// `Ω(P(S^2))` for `p = q` with `π_1`, `π_2` extended to the disc calculi on `x` and `y`.
pub fn sphere_calculus_maps(q: &Scalar) -> Result<(UniversalForms, Vec<CalculusMorphism>), DgaError> {
    let g = crate::gluing::build_sphere_gluing(q, q).map_err(|e| DgaError::Invariant(e.to_string()))?;
    let forms = UniversalForms::new(g.sphere_rs.clone());
    let cx = Arc::new(Calculus::disc("x", q)?);
    let cy = Arc::new(Calculus::disc("y", q)?);
    let m1 = extend_morphism_to_forms(&g.pi1, cx, &[])?;
    let m2 = extend_morphism_to_forms(&g.pi2, cy, &[])?;
    Ok((forms, vec![m1, m2]))
}

/// Exact comparison of the differential ideal generated by `gens` with `⋂ ker` in `Ω^n_{<=d}`;
/// `outside_kernel` lists the generators (or their differentials) that some map does not kill.
pub fn adapted_ideal_report(
    forms: &UniversalForms,
    gens: &[Element],
    maps: &[CalculusMorphism],
    n: u32,
    d: usize,
    slack: usize,
    seed: u64,
) -> Result<IdealEqualityReport, DgaError> {
    let gvecs: Vec<FormVec> = gens.iter().map(|g| forms.from_element(g)).collect::<Result<_, _>>()?;
    let kernel = adapted_calculus_kernel(forms, maps, n, d)?;
    let claimed = differential_ideal_span(forms, &gvecs, n, d, slack, Some(&random_point(seed)))?;
    let mut r = verify_relation_ideal_equality(forms, &claimed, &kernel);
    r.outside_kernel = generators_outside_kernel(forms, gens, maps)?;
    r.equal = r.equal && r.outside_kernel.is_empty();
    Ok(r)
}

/// Every kernel vector of form degree `n` is sent by `d` into the kernel.
pub fn is_d_stable(forms: &UniversalForms, maps: &[CalculusMorphism], k: &FormSubspace) -> Result<bool, DgaError> {
    for row in k.span.rows() {
        let dv = forms.d(row);
        for m in maps {
            if !m.apply_vec(forms, &dv)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Decomposes a disc word as `x^k x*^l` (letters 0 and 1 of the base alphabet).
fn disc_exponents(w: &Word, a: &Alphabet) -> Result<(usize, usize), DgaError> {
    let ls: Vec<usize> = w.letters().collect();
    let k = ls.iter().take_while(|&&l| l == 0).count();
    if ls[k..].iter().any(|&l| l != 1) {
        return Err(DgaError::NotACanonicalWord(w.display(a).to_string()));
    }
    Ok((k, ls.len() - k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    P1,
    P2,
}

fn xpow(k: usize, l: usize) -> Word {
    let mut v = vec![0usize; k];
    v.extend(std::iter::repeat_n(1, l));
    Word::from_letters(&v)
}

/// The left-module projections of the universal disc calculus onto `Γ(P(D_q))`, with
/// values written as normal-form words followed by `d(x)`, `d(x*)` or `d(x) d(x*)`.
pub struct DiscProjections<'a> {
    pub forms: &'a UniversalForms,
    pub q: Scalar,
}

impl<'a> DiscProjections<'a> {
    fn term(&self, a0: &Word, c: &Scalar, k: usize, l: usize, tail: &[usize]) -> Result<Element, DgaError> {
        let rs = &self.forms.rs;
        let coeff = rs.normal_form_word(&a0.concat(&xpow(k, l)))?;
        let n = rs.alphabet().len();
        let tail = Word::from_letters(&tail.iter().map(|&t| n + t).collect::<Vec<_>>());
        Ok(Element::from_terms(
            &self.forms.ext,
            coeff.into_terms().into_iter().map(|(w, c2)| (w.concat(&tail), c * &c2)),
        ))
    }

    pub fn apply(&self, which: Projection, v: &[(FormKey, Scalar)]) -> Result<Element, DgaError> {
        let q = &self.q;
        let expected = match which {
            Projection::P1 => 1,
            Projection::P2 => 2,
        };
        let a = self.forms.rs.alphabet();
        let mut acc = Element::zero(&self.forms.ext);
        for (key, c) in v {
            if key.degree() != expected {
                return Err(DgaError::WrongDegree { expected, got: key.degree() });
            }
            let a0 = &key.0[0];
            match which {
                Projection::P1 => {
                    let (k, l) = disc_exponents(&key.0[1], a)?;
                    for i in 0..k {
                        let s = c * &q.pow(i as i32 - l as i32);
                        acc = &acc + &self.term(a0, &s, k - 1, l, &[0])?;
                    }
                    for i in 0..l {
                        let s = c * &q.pow(-(i as i32));
                        acc = &acc + &self.term(a0, &s, k, l - 1, &[1])?;
                    }
                }
                Projection::P2 => {
                    let (m, n) = disc_exponents(&key.0[1], a)?;
                    let (k, l) = disc_exponents(&key.0[2], a)?;
                    let pre = q.pow(k as i32 - l as i32);
                    let mut first = Scalar::zero();
                    for i in 0..m {
                        for s in 0..l {
                            first = &first + &q.pow(i as i32 - n as i32 + 1 - s as i32);
                        }
                    }
                    let mut second = Scalar::zero();
                    for i in 0..n {
                        for s in 0..k {
                            second = &second + &q.pow(s as i32 - i as i32 - l as i32);
                        }
                    }
                    if !first.is_zero() {
                        let w = xpow(m - 1, n).concat(&xpow(k, l - 1));
                        acc = &acc + &self.word_term(a0, &w, &(&(c * &pre) * &first))?;
                    }
                    if !second.is_zero() {
                        let w = xpow(m, n - 1).concat(&xpow(k - 1, l));
                        acc = &acc - &self.word_term(a0, &w, &(&(c * &pre) * &second))?;
                    }
                }
            }
        }
        Ok(acc)
    }

    fn word_term(&self, a0: &Word, w: &Word, c: &Scalar) -> Result<Element, DgaError> {
        let rs = &self.forms.rs;
        let n = rs.alphabet().len();
        let coeff = rs.normal_form_word(&a0.concat(w))?;
        let tail = Word::from_letters(&[n, n + 1]);
        Ok(Element::from_terms(
            &self.forms.ext,
            coeff.into_terms().into_iter().map(|(w2, c2)| (w2.concat(&tail), c * &c2)),
        ))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModuleBasisReport {
    pub bound: usize,
    pub p1_checked: usize,
    pub p1_failures: usize,
    pub p2_checked: usize,
    pub p2_failures: usize,
    /// `dx dx`, `dx* dx*`, `dx* dx + q dx dx*` reduce to zero.
    pub degree_two_relations: bool,
    pub degree_three_monomials: usize,
    pub degree_three_vanish: bool,
}

impl ModuleBasisReport {
    pub fn passed(&self) -> bool {
        self.p1_failures == 0 && self.p2_failures == 0 && self.degree_two_relations && self.degree_three_vanish
    }
}

/// Checks the module-basis claims for `Γ(P(D_q))` against the projections at degree `<= d`.
pub fn module_basis_check(forms: &UniversalForms, calculus: &Calculus, q: &Scalar, d: usize) -> Result<ModuleBasisReport, DgaError> {
    let proj = DiscProjections { forms, q: q.clone() };
    let name = calculus.base.alphabet().name(0).to_string();
    let gens = crate::models::disc_calculus_generators(&forms.ext, &name, q);
    let gvecs: Vec<FormVec> = gens.iter().map(|g| forms.from_element(g)).collect::<Result<_, _>>()?;
    let words = forms.rs.algebra_basis(d);
    let (mut p1c, mut p1f, mut p2c, mut p2f) = (0, 0, 0, 0);
    for g in &gvecs {
        for b in &words {
            let v = forms.mul(g, &[(FormKey::scalar_part(b.clone()), Scalar::one())])?;
            p1c += 1;
            if !proj.apply(Projection::P1, &v)?.is_zero() {
                p1f += 1;
            }
        }
        // degree-2 closure: d(g) b, g b d(c), d(c) g b
        let dg = forms.d(g);
        for b in &words {
            let bk = [(FormKey::scalar_part(b.clone()), Scalar::one())];
            let mut cands = vec![forms.mul(&dg, &bk)?];
            for c in words.iter().filter(|c| !c.is_unit() && b.len() + c.len() <= d) {
                let dc = [(FormKey(SmallVec::from_vec(vec![Word::unit(), c.clone()])), Scalar::one())];
                cands.push(forms.mul(&forms.mul(g, &bk)?, &dc)?);
                cands.push(forms.mul(&forms.mul(&dc, g)?, &bk)?);
            }
            for v in cands {
                p2c += 1;
                if !proj.apply(Projection::P2, &v)?.is_zero() {
                    p2f += 1;
                }
            }
        }
    }
    let ca = calculus.alphabet();
    let el = |s: &str| crate::parse::parse_element(ca, s).expect("built-in element");
    let rels = [
        format!("d({n}) d({n})", n = name),
        format!("d({n}*) d({n}*)", n = name),
        format!("d({n}*) d({n}) + q d({n}) d({n}*)", n = name),
    ];
    let mut deg2 = true;
    for r in &rels {
        let e = el(r);
        let e = if q == &Scalar::q() { e } else { substitute_q(&e, q) };
        deg2 &= calculus.normal_form(&e)?.is_zero();
    }
    let ext_keys = forms.basis(3, d);
    let mut d3 = true;
    for k in &ext_keys {
        d3 &= calculus.normal_form(&forms.to_element(k).embed(ca)?)?.is_zero();
    }
    Ok(ModuleBasisReport {
        bound: d,
        p1_checked: p1c,
        p1_failures: p1f,
        p2_checked: p2c,
        p2_failures: p2f,
        degree_two_relations: deg2,
        degree_three_monomials: ext_keys.len(),
        degree_three_vanish: d3,
    })
}

fn substitute_q(e: &Element, q: &Scalar) -> Element {
    // only the linear coefficient `q` occurs in the built-in relations
    Element::from_terms(
        e.alphabet(),
        e.terms().iter().map(|(w, c)| (w.clone(), if c == &Scalar::q() { q.clone() } else { c.clone() })),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct InterfaceReport {
    /// `(q^-1 - p^-1) d(a) = (φ_p(g_p) - φ_q(g_q)) a*` holds in `Ω(P(S^1))`.
    pub certificate_holds: bool,
    pub certificate: String,
    pub direct_sum: Vec<DirectSumCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectSumCheck {
    pub form_degree: u32,
    pub bound: usize,
    pub dim_first: usize,
    pub dim_second: usize,
    pub dim_glued: usize,
    pub holds: bool,
}

/// Images of `Ω^n_{<=d}` under each map separately and jointly; the glued image contains
/// both factors (taken at `d`) when the pair image at `d + slack` contains `(v, 0)` and `(0, w)`.
pub fn direct_sum_check(
    forms: &UniversalForms,
    maps: [&CalculusMorphism; 2],
    n: u32,
    d: usize,
    slack: usize,
) -> Result<DirectSumCheck, DgaError> {
    let keys = forms.basis(n, d + slack);
    let imgs = images_of(forms, &[maps[0].clone(), maps[1].clone()], &keys)?;
    let pair: Span<ImageKey, Scalar> = Span::from_vectors(imgs.iter().cloned());
    let mut parts = [Span::new(), Span::new()];
    for (k, img) in keys.iter().zip(&imgs) {
        if k.weight() <= d {
            for (i, part) in parts.iter_mut().enumerate() {
                part.insert(img.iter().filter(|((j, _), _)| *j == i).cloned().collect());
            }
        }
    }
    let holds = pair.contains_span(&parts[0]) && pair.contains_span(&parts[1]);
    let glued_d: Span<ImageKey, Scalar> =
        Span::from_vectors(keys.iter().zip(&imgs).filter(|(k, _)| k.weight() <= d).map(|(_, v)| v.clone()));
    Ok(DirectSumCheck {
        form_degree: n,
        bound: d,
        dim_first: parts[0].dim(),
        dim_second: parts[1].dim(),
        dim_glued: glued_d.dim(),
        holds,
    })
}

/// The circle's differential ideal from the two disc calculi, for formal `p != q`.
pub fn interface_calculus(direct_sum_bound: usize, slack: usize) -> Result<InterfaceReport, DgaError> {
    let (p, q) = (Scalar::p(), Scalar::q());
    let g = crate::gluing::build_sphere_gluing(&p, &q).map_err(|e| DgaError::Invariant(e.to_string()))?;
    let circle = UniversalForms::new(g.circle.clone());
    let fp = UniversalForms::new(g.disc_p.clone());
    let fq = UniversalForms::new(g.disc_q.clone());
    let gp = crate::models::disc_calculus_generators(&fp.ext, "x", &p);
    let gq = crate::models::disc_calculus_generators(&fq.ext, "y", &q);
    let ip = circle_push(&fp, &g.phi_p, &circle, &gp[0])?;
    let iq = circle_push(&fq, &g.phi_q, &circle, &gq[0])?;
    let diff = crate::linalg::add_scaled(&ip, &-Scalar::one(), &iq);
    let a_star = circle.from_algebra(&crate::parse::parse_element(g.circle.alphabet(), "a*").expect("a*"))?;
    let rhs = circle.mul(&diff, &a_star)?;
    let da = circle.from_element(&crate::parse::parse_element(&circle.ext, "d(a)").expect("d(a)"))?;
    let lhs = crate::linalg::scale_vec(&da, &(&q.inv() - &p.inv()));
    let holds = lhs == rhs;
    let cp = Arc::new(Calculus::disc("x", &p)?);
    let cq = Arc::new(Calculus::disc("y", &q)?);
    let sphere = UniversalForms::new(g.sphere_rs.clone());
    let m1 = extend_morphism_to_forms(&g.pi1, cp, &[])?;
    let m2 = extend_morphism_to_forms(&g.pi2, cq, &[])?;
    let mut checks = Vec::new();
    for n in 1..=2 {
        checks.push(direct_sum_check(&sphere, [&m1, &m2], n, direct_sum_bound, slack)?);
    }
    Ok(InterfaceReport {
        certificate_holds: holds,
        certificate: format!(
            "({}) d(a) = (phi_p(x d(x) - p^-1 d(x) x) - phi_q(y d(y) - q^-1 d(y) y)) a*",
            &q.inv() - &p.inv()
        ),
        direct_sum: checks,
    })
}

fn circle_push(src: &UniversalForms, m: &AlgebraMorphism, circle: &UniversalForms, e: &Element) -> Result<FormVec, DgaError> {
    let v = src.from_element(e)?;
    Ok(src.pushforward(m, circle, &v)?)
}

/// Whether `d(a)` lies in the span of `φ_p(J(P(D_p))^1_{<=d}) + φ_q(J(P(D_q))^1_{<=d})`.
pub fn interface_contains_da(p: &Scalar, q: &Scalar, d: usize) -> Result<bool, DgaError> {
    let g = crate::gluing::build_sphere_gluing(p, q).map_err(|e| DgaError::Invariant(e.to_string()))?;
    let circle = UniversalForms::new(g.circle.clone());
    let mut span = Span::new();
    for (rs, phi, name, param) in [(&g.disc_p, &g.phi_p, "x", p), (&g.disc_q, &g.phi_q, "y", q)] {
        let forms = UniversalForms::new(rs.clone());
        let cal = Arc::new(Calculus::disc(name, param)?);
        let id = AlgebraMorphism {
            name: "id".into(),
            source: rs.clone(),
            target: cal.base.clone(),
            images: (0..2).map(|i| Element::letter(rs.alphabet(), i)).collect(),
        };
        let proj = extend_morphism_to_forms(&id, cal, &[])?;
        let k = adapted_calculus_kernel(&forms, std::slice::from_ref(&proj), 1, d)?;
        for row in k.span.rows() {
            span.insert(forms.pushforward(phi, &circle, row)?);
        }
    }
    let da = circle.from_element(&crate::parse::parse_element(&circle.ext, "d(a)").expect("d(a)"))?;
    Ok(span.contains(&da))
}

/// A random element of `Ω^n_{<=d}` with small integer coefficients.
pub fn random_form<R: Rng>(forms: &UniversalForms, n: u32, d: usize, terms: usize, rng: &mut R) -> FormVec {
    let keys = forms.basis(n, d);
    let mut acc = BTreeMap::new();
    for _ in 0..terms {
        let k = keys[rng.gen_range(0..keys.len())].clone();
        let c = Scalar::from_int(rng.gen_range(-3..=3));
        axpy(&mut acc, &c, &[(k, Scalar::one())]);
    }
    sparse_from_map(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct DgaSanityReport {
    pub samples: usize,
    pub d_squared_failures: usize,
    pub leibniz_failures: usize,
}

/// `d∘d = 0` and `d(ρη) = dρ η + (-1)^n ρ dη` in the universal forms.
pub fn universal_sanity<R: Rng>(forms: &UniversalForms, d: usize, samples: usize, rng: &mut R) -> Result<DgaSanityReport, DgaError> {
    let (mut dd, mut lb) = (0, 0);
    for i in 0..samples {
        let n = (i % 3) as u32;
        let rho = random_form(forms, n, d, 3, rng);
        let eta = random_form(forms, (i % 2) as u32, d, 3, rng);
        if !forms.d(&forms.d(&rho)).is_empty() {
            dd += 1;
        }
        let lhs = forms.d(&forms.mul(&rho, &eta)?);
        let sign = if n.is_multiple_of(2) { Scalar::one() } else { -Scalar::one() };
        let r1 = forms.mul(&forms.d(&rho), &eta)?;
        let r2 = forms.mul(&rho, &forms.d(&eta))?;
        if lhs != crate::linalg::add_scaled(&r1, &sign, &r2) {
            lb += 1;
        }
    }
    Ok(DgaSanityReport {
        samples,
        d_squared_failures: dd,
        leibniz_failures: lb,
    })
}

/// The same identities in a calculus, on random elements over `{g, d(g)}`, after normal form;
/// `d` must also be compatible with reduction.
pub fn calculus_sanity<R: Rng>(c: &Calculus, max_len: usize, samples: usize, rng: &mut R) -> Result<DgaSanityReport, DgaError> {
    let a = c.alphabet().clone();
    let random = |rng: &mut R, n: u32| {
        let algebra: Vec<usize> = a.algebra_generators().collect();
        let diffs: Vec<usize> = (0..a.len()).filter(|&l| a.letter_degree(l) == 1).collect();
        let mut e = Element::zero(&a);
        for _ in 0..3 {
            let len = rng.gen_range(n as usize..=max_len.max(n as usize));
            let mut slots: Vec<usize> = (0..len).map(|_| algebra[rng.gen_range(0..algebra.len())]).collect();
            for _ in 0..n {
                let pos = rng.gen_range(0..len);
                slots[pos] = diffs[rng.gen_range(0..diffs.len())];
            }
            let w = Word::from_letters(&slots);
            if w.form_degree(&a) == n {
                e.add_term(w, &Scalar::from_int(rng.gen_range(-3..=3)));
            }
        }
        e
    };
    let (mut dd, mut lb) = (0, 0);
    for i in 0..samples {
        let n = (i % 2) as u32;
        let rho = random(rng, n);
        let eta = random(rng, ((i / 2) % 2) as u32);
        if !c.d(&c.d(&rho)?)?.is_zero() || c.d(&c.normal_form(&rho)?)? != c.d(&rho)? {
            dd += 1;
        }
        let lhs = c.d(&(&rho * &eta))?;
        let sign = if n.is_multiple_of(2) { Scalar::one() } else { -Scalar::one() };
        let rhs = c.normal_form(&(&(&rho.d()? * &eta) + &(&rho * &eta.d()?).scale(&sign)))?;
        if lhs != rhs {
            lb += 1;
        }
    }
    Ok(DgaSanityReport {
        samples,
        d_squared_failures: dd,
        leibniz_failures: lb,
    })
}
