//! Sparse exact linear algebra: spans in echelon form, kernels, intersections
//! and linear solves over an abstract field.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::{mulmod, powmod, Scalar};

pub trait Field: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; panics on zero.
    fn inv(&self) -> Self;
    fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        Scalar::inv(self)
    }
    fn is_one(&self) -> bool {
        Scalar::is_one(self)
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip()
    }
}

/// The prime field of order `2^61 - 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Fp(pub u64);

impl Fp {
    pub const MODULUS: u64 = (1u64 << 61) - 1;

    pub fn new(x: i64) -> Fp {
        let m = Self::MODULUS as i128;
        Fp((((x as i128) % m + m) % m) as u64)
    }
}

impl Field for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, o: &Self) -> Self {
        Fp((self.0 + o.0) % Self::MODULUS)
    }
    fn sub(&self, o: &Self) -> Self {
        Fp((self.0 + Self::MODULUS - o.0) % Self::MODULUS)
    }
    fn mul(&self, o: &Self) -> Self {
        Fp(mulmod(self.0, o.0, Self::MODULUS))
    }
    fn neg(&self) -> Self {
        Fp((Self::MODULUS - self.0) % Self::MODULUS)
    }
    fn inv(&self) -> Self {
        assert!(self.0 != 0, "inverse of zero");
        Fp(powmod(self.0, Self::MODULUS - 2, Self::MODULUS))
    }
}

/// Sparse vector: strictly increasing keys, no zero entries.
pub type SparseVec<K, F> = Vec<(K, F)>;

pub fn sparse_from_map<K: Ord + Clone, F: Field>(m: BTreeMap<K, F>) -> SparseVec<K, F> {
    m.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Maps coefficients of a sparse vector into another field (entries that vanish are dropped).
pub fn map_coeffs<K: Clone, F, G: Field>(
    v: &[(K, F)],
    mut f: impl FnMut(&F) -> Option<G>,
) -> Option<SparseVec<K, G>> {
    let mut out = Vec::with_capacity(v.len());
    for (k, c) in v {
        let g = f(c)?;
        if !g.is_zero() {
            out.push((k.clone(), g));
        }
    }
    Some(out)
}

/// A subspace kept as rows with distinct pivots, the pivot of a row being its largest key
/// and normalized to one.
#[derive(Clone, Debug)]
pub struct Span<K: Ord + Clone, F: Field> {
    rows: BTreeMap<K, SparseVec<K, F>>,
}

impl<K: Ord + Clone + Debug, F: Field> Default for Span<K, F> {
    fn default() -> Self {
        Span {
            rows: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone + Debug, F: Field> Span<K, F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vectors<I: IntoIterator<Item = SparseVec<K, F>>>(vs: I) -> Self {
        let mut s = Self::new();
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec<K, F>> {
        self.rows.values()
    }

    /// Reduces `v` against the rows; the result is zero iff `v` lies in the span.
    pub fn reduce(&self, v: &[(K, F)]) -> SparseVec<K, F> {
        let mut work: BTreeMap<K, F> = v.iter().cloned().collect();
        self.reduce_map(&mut work);
        sparse_from_map(work)
    }

    fn reduce_map(&self, work: &mut BTreeMap<K, F>) {
        let mut bound: Option<K> = None;
        loop {
            let next = match &bound {
                None => work.iter().next_back(),
                Some(b) => work.range(..b.clone()).next_back(),
            };
            let (k, c) = match next {
                Some((k, c)) => (k.clone(), c.clone()),
                None => break,
            };
            if let Some(row) = self.rows.get(&k) {
                axpy(work, &c.neg(), row);
            }
            bound = Some(k);
        }
    }

    pub fn contains(&self, v: &[(K, F)]) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: SparseVec<K, F>) -> bool {
        let r = self.reduce(&v);
        self.insert_reduced(r)
    }

    fn insert_reduced(&mut self, r: SparseVec<K, F>) -> bool {
        match r.last() {
            None => false,
            Some((k, c)) => {
                let k = k.clone();
                let inv = c.inv();
                let row: SparseVec<K, F> = if inv.is_one() {
                    r
                } else {
                    r.into_iter().map(|(k, c)| (k, c.mul(&inv))).collect()
                };
                self.rows.insert(k, row);
                true
            }
        }
    }

    /// Back-substitutes so every pivot column is zero outside its own row (unique form).
    pub fn into_reduced(self) -> Self {
        let mut out: BTreeMap<K, SparseVec<K, F>> = BTreeMap::new();
        for (k, row) in self.rows.into_iter() {
            let mut work: BTreeMap<K, F> = row.into_iter().collect();
            // earlier (smaller) pivots are already final
            let lower: Vec<K> = work
                .range(..k.clone())
                .filter(|(kk, _)| out.contains_key(*kk))
                .map(|(kk, _)| kk.clone())
                .collect();
            for kk in lower.into_iter().rev() {
                if let Some(c) = work.get(&kk).cloned() {
                    axpy(&mut work, &c.neg(), &out[&kk]);
                }
            }
            // rows with smaller pivots never reach this pivot column
            out.insert(k, sparse_from_map(work));
        }
        Span { rows: out }
    }

    pub fn add_span(&mut self, other: &Span<K, F>) {
        for r in other.rows() {
            self.insert(r.clone());
        }
    }

    pub fn sum(&self, other: &Span<K, F>) -> Span<K, F> {
        let mut s = self.clone();
        s.add_span(other);
        s
    }

    pub fn contains_span(&self, other: &Span<K, F>) -> bool {
        other.rows().all(|r| self.contains(r))
    }

    pub fn equals(&self, other: &Span<K, F>) -> bool {
        self.dim() == other.dim() && self.contains_span(other)
    }

    /// Intersection by the Zassenhaus construction.
    pub fn intersect(&self, other: &Span<K, F>) -> Span<K, F> {
        let mut z: Span<(u8, K), F> = Span::new();
        for r in self.rows() {
            let mut v: SparseVec<(u8, K), F> = r.iter().map(|(k, c)| ((0, k.clone()), c.clone())).collect();
            v.extend(r.iter().map(|(k, c)| ((1, k.clone()), c.clone())));
            z.insert(v);
        }
        for r in other.rows() {
            z.insert(r.iter().map(|(k, c)| ((1, k.clone()), c.clone())).collect());
        }
        let mut out = Span::new();
        for (piv, row) in z.rows.iter() {
            if piv.0 == 0 {
                out.insert(row.iter().map(|((_, k), c)| (k.clone(), c.clone())).collect());
            }
        }
        out
    }

    /// Rows whose pivot satisfies `keep`; spans the intersection with the coordinate
    /// subspace `{keep}` whenever `keep` is downward closed in the key order.
    pub fn restrict_downward(&self, keep: impl Fn(&K) -> bool) -> Span<K, F> {
        let mut out = Span::new();
        for (k, r) in self.rows.iter() {
            if keep(k) {
                out.rows.insert(k.clone(), r.clone());
            }
        }
        out
    }

    pub fn basis(&self) -> Vec<SparseVec<K, F>> {
        self.rows.values().cloned().collect()
    }
}

/// `work += a * row`.
pub fn axpy<K: Ord + Clone, F: Field>(work: &mut BTreeMap<K, F>, a: &F, row: &[(K, F)]) {
    if a.is_zero() {
        return;
    }
    for (k, c) in row {
        let t = a.mul(c);
        match work.get_mut(k) {
            Some(e) => {
                let s = e.add(&t);
                if s.is_zero() {
                    work.remove(k);
                } else {
                    *e = s;
                }
            }
            None => {
                work.insert(k.clone(), t);
            }
        }
    }
}

pub fn add_scaled<K: Ord + Clone, F: Field>(a: &[(K, F)], s: &F, b: &[(K, F)]) -> SparseVec<K, F> {
    let mut w: BTreeMap<K, F> = a.iter().cloned().collect();
    axpy(&mut w, s, b);
    sparse_from_map(w)
}

pub fn scale_vec<K: Clone, F: Field>(v: &[(K, F)], s: &F) -> SparseVec<K, F> {
    if s.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(k, c)| (k.clone(), c.mul(s))).collect()
}

/// Key of the combined space used for kernels and solves: image coordinates sort above
/// source coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tagged<I, S> {
    Source(S),
    Image(I),
}

/// Kernel of the linear map sending source vector `s_j` to image `images[j]`, as combinations
/// of the given sources.
pub fn kernel<I, S, F>(images: Vec<(SparseVec<S, F>, SparseVec<I, F>)>) -> Span<S, F>
where
    I: Ord + Clone + Debug,
    S: Ord + Clone + Debug,
    F: Field,
{
    let mut z: Span<Tagged<I, S>, F> = Span::new();
    for (src, img) in images {
        let mut v: SparseVec<Tagged<I, S>, F> =
            src.into_iter().map(|(k, c)| (Tagged::Source(k), c)).collect();
        v.extend(img.into_iter().map(|(k, c)| (Tagged::Image(k), c)));
        z.insert(v);
    }
    let mut out = Span::new();
    for (piv, row) in z.rows.iter() {
        if let Tagged::Source(_) = piv {
            out.insert(
                row.iter()
                    .filter_map(|(k, c)| match k {
                        Tagged::Source(s) => Some((s.clone(), c.clone())),
                        Tagged::Image(_) => None,
                    })
                    .collect(),
            );
        }
    }
    out
}

/// Solves `sum_j x_j * columns[j] = target`; returns the coefficients `x` if solvable.
pub fn solve<K, F>(columns: &[SparseVec<K, F>], target: &[(K, F)]) -> Option<Vec<F>>
where
    K: Ord + Clone + Debug,
    F: Field,
{
    let mut z: Span<Tagged<K, usize>, F> = Span::new();
    for (j, col) in columns.iter().enumerate() {
        let mut v: SparseVec<Tagged<K, usize>, F> = vec![(Tagged::Source(j), F::one())];
        v.extend(col.iter().map(|(k, c)| (Tagged::Image(k.clone()), c.clone())));
        z.insert(v);
    }
    let t: SparseVec<Tagged<K, usize>, F> = target
        .iter()
        .map(|(k, c)| (Tagged::Image(k.clone()), c.clone()))
        .collect();
    let r = z.reduce(&t);
    if r.iter().any(|(k, _)| matches!(k, Tagged::Image(_))) {
        return None;
    }
    // t - sum(x_j e_j) has zero image part; the source part records -x
    let mut x = vec![F::zero(); columns.len()];
    for (k, c) in r {
        if let Tagged::Source(j) = k {
            x[j] = c.neg();
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn v(entries: &[(u32, i64)]) -> SparseVec<u32, BigRational> {
        entries.iter().map(|(k, c)| (*k, q(*c))).collect()
    }

    #[test]
    fn span_membership() {
        let s = Span::from_vectors(vec![v(&[(0, 1), (1, 1)]), v(&[(1, 1), (2, 1)])]);
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&v(&[(0, 1), (2, -1)])));
        assert!(!s.contains(&v(&[(0, 1)])));
    }

    #[test]
    fn intersection_of_planes() {
        let a = Span::from_vectors(vec![v(&[(0, 1)]), v(&[(1, 1)])]);
        let b = Span::from_vectors(vec![v(&[(1, 1)]), v(&[(2, 1)])]);
        let i = a.intersect(&b);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&v(&[(1, 3)])));
    }

    #[test]
    fn kernel_of_projection() {
        // e0 -> f0, e1 -> f0, e2 -> 0
        let imgs = vec![
            (v(&[(0, 1)]), v(&[(0, 1)])),
            (v(&[(1, 1)]), v(&[(0, 1)])),
            (v(&[(2, 1)]), v(&[])),
        ];
        let k = kernel(imgs);
        assert_eq!(k.dim(), 2);
        assert!(k.contains(&v(&[(0, 1), (1, -1)])));
        assert!(k.contains(&v(&[(2, 1)])));
    }

    #[test]
    fn solving() {
        let cols = vec![v(&[(0, 1), (1, 1)]), v(&[(1, 1)])];
        let x = solve(&cols, &v(&[(0, 2), (1, 5)])).unwrap();
        assert_eq!(x, vec![q(2), q(3)]);
        assert!(solve(&cols, &v(&[(2, 1)])).is_none());
    }

    #[test]
    fn reduced_form_is_unique() {
        let a = Span::from_vectors(vec![v(&[(0, 1), (1, 2)]), v(&[(0, 3), (1, 1), (2, 1)])]).into_reduced();
        let b = Span::from_vectors(vec![v(&[(0, 4), (1, 3), (2, 1)]), v(&[(0, 1), (1, 2)])]).into_reduced();
        assert_eq!(a.basis(), b.basis());
    }

    #[test]
    fn prime_field_inverse() {
        let a = Fp::new(-12345);
        assert_eq!(a.mul(&a.inv()), Fp::one());
    }
}
