//! Truncated Fock-space representations of the disc and sphere, relation residuals,
//! spectra and the faithfulness round trip.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::freealg::{Alphabet, Element, Word};
use crate::rewrite::{Presentation, RewriteError, RewriteSystem};
use crate::scalar::{Scalar, ScalarError};

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("element has form degree > 0")]
    NotAnAlgebraElement,
    #[error("truncation N = {n} too small for degree {degree}")]
    TooSmall { n: usize, degree: usize },
    #[error("{0} is not of the form f1^k f0 fm1^l or f1^k fm1^l")]
    NotBasisForm(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum RepKind {
    /// `π_q` on `P(D_q)`.
    Disc,
    /// `ρ_1` on the sphere: `f0 = f1 f-1`, weights `1 - p^i`.
    Sphere1,
    /// `ρ_2` on the sphere: `f0 = 1`, weights `1 - q^i`.
    Sphere2,
    /// `ρ_θ`, one-dimensional.
    CirclePoint,
}

#[derive(Clone, Debug)]
pub struct TruncatedRepresentation {
    pub kind: RepKind,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub theta: f64,
    pub alphabet: Arc<Alphabet>,
    /// One matrix per letter of `alphabet`.
    pub matrices: Vec<CMatrix>,
}

fn weights(n: usize, param: f64) -> Vec<f64> {
    (0..=n).map(|i| 1.0 - param.powi(i as i32)).collect()
}

/// Weighted shift `e_i -> sqrt(λ_{i+1}) e_{i+1}`, dropping `e_N`.
fn raising(n: usize, lambda: &[f64]) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        m[(i + 1, i)] = Complex64::new(lambda[i + 1].sqrt(), 0.0);
    }
    m
}

fn check_param(name: &str, v: f64) -> Result<(), RepError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(RepError::InvalidParams(format!("{} = {} not in (0, 1)", name, v)))
    }
}

/// Builds `π_q` (on `P(D_q)`, alphabet `x, x*`) or a sphere representation (alphabet
/// `f1, f0, fm1`).
pub fn build_representation(kind: RepKind, p: f64, q: f64, theta: f64, n: usize) -> Result<TruncatedRepresentation, RepError> {
    if n < 4 && kind != RepKind::CirclePoint {
        return Err(RepError::InvalidParams(format!("N = {} < 4", n)));
    }
    let sphere_alphabet = || crate::models::sphere_qq().alphabet;
    let (alphabet, matrices) = match kind {
        RepKind::Disc => {
            check_param("q", q)?;
            let a = crate::models::disc_q().alphabet;
            let up = raising(n, &weights(n, q));
            let down = up.adjoint();
            (a, vec![up, down])
        }
        RepKind::Sphere1 | RepKind::Sphere2 => {
            let (param, name) = if kind == RepKind::Sphere1 { (p, "p") } else { (q, "q") };
            check_param(name, param)?;
            let lambda = weights(n, param);
            let up = raising(n, &lambda);
            let down = up.adjoint();
            let f0 = if kind == RepKind::Sphere1 {
                let mut m = CMatrix::zeros(n, n);
                for i in 1..n {
                    m[(i, i)] = Complex64::new(lambda[i], 0.0);
                }
                m
            } else {
                CMatrix::identity(n, n)
            };
            (sphere_alphabet(), vec![up, f0, down])
        }
        RepKind::CirclePoint => {
            let z = Complex64::from_polar(1.0, theta);
            let one = |c: Complex64| CMatrix::from_element(1, 1, c);
            (sphere_alphabet(), vec![one(z), one(Complex64::new(1.0, 0.0)), one(z.conj())])
        }
    };
    let n = matrices[0].nrows();
    Ok(TruncatedRepresentation {
        kind,
        n,
        p,
        q,
        theta,
        alphabet,
        matrices,
    })
}

impl TruncatedRepresentation {
    pub fn letter(&self, name: &str) -> &CMatrix {
        &self.matrices[self.alphabet.index(name).expect("letter of the representation")]
    }

    fn word_matrix(&self, w: &Word) -> CMatrix {
        let mut m = CMatrix::identity(self.n, self.n);
        for l in w.letters() {
            m *= &self.matrices[l];
        }
        m
    }

    /// Matrices of `g*` are the adjoints of those of `g`.
    pub fn star_compatible(&self) -> bool {
        (0..self.alphabet.len()).all(|i| {
            let s = self.alphabet.generator(i).star;
            (&self.matrices[s] - self.matrices[i].adjoint()).camax() == 0.0
        })
    }

    /// Last index of the interior window for relations of word length at most `len`.
    pub fn interior(&self, len: usize) -> usize {
        if self.n == 1 {
            return 0;
        }
        self.n - len.max(1)
    }
}

/// `ρ(e)`, coefficients evaluated at the representation's parameters.
pub fn evaluate_element_matrix(e: &Element, r: &TruncatedRepresentation) -> Result<CMatrix, RepError> {
    if e.form_degree() > 0 {
        return Err(RepError::NotAnAlgebraElement);
    }
    let mut acc = CMatrix::zeros(r.n, r.n);
    for (w, c) in e.terms() {
        let cv = c.evaluate(r.q, r.p, 0.0)?;
        acc += r.word_matrix(w) * cv;
    }
    Ok(acc)
}

fn window_max(m: &CMatrix, last: usize) -> f64 {
    let mut best = 0.0f64;
    for i in 0..=last.min(m.nrows() - 1) {
        for j in 0..=last.min(m.ncols() - 1) {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub kind: RepKind,
    pub n: usize,
    /// `(relation, largest entry on the interior window)`.
    pub residuals: Vec<(String, f64)>,
    pub max: f64,
}

/// Largest entry of each relation's matrix on the interior rows and columns.
pub fn relation_residuals(pres: &Presentation, r: &TruncatedRepresentation) -> Result<ResidualReport, RepError> {
    let mut residuals = Vec::new();
    for rel in &pres.relations {
        let e = rel.embed(&r.alphabet).map_err(|_| RepError::InvalidParams("alphabet mismatch".into()))?;
        let m = evaluate_element_matrix(&e, r)?;
        residuals.push((format!("{}", rel), window_max(&m, r.interior(rel.max_len()))));
    }
    let max = residuals.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    Ok(ResidualReport {
        kind: r.kind,
        n: r.n,
        residuals,
        max,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralRow {
    pub i: usize,
    pub f0_expected: f64,
    pub f0_computed: f64,
    pub radius_expected: f64,
    pub radius_computed: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub kind: RepKind,
    pub rows: Vec<SpectralRow>,
    /// Largest off-diagonal entry of `ρ(f+^2 + f-^2)` on the interior.
    pub off_diagonal: f64,
    pub max_error: f64,
}

/// `ρ(f+^2 + f-^2)` with `f+ = (f1 + f-1)/2`, `f- = i(f1 - f-1)/2`.
pub fn radius_matrix(r: &TruncatedRepresentation) -> CMatrix {
    let (f1, fm1) = (r.letter("f1"), r.letter("fm1"));
    let half = Complex64::new(0.5, 0.0);
    let fp = (f1 + fm1) * half;
    let fm = (f1 - fm1) * Complex64::new(0.0, 0.5);
    &fp * &fp + &fm * &fm
}

/// Eigenvalues of `ρ(f0)` and `ρ(f+^2 + f-^2)` against `λ_i` and `1 - (t^i + t^{i+1})/2`.
pub fn spectral_report(r: &TruncatedRepresentation) -> SpectralReport {
    let rad = radius_matrix(r);
    let f0 = r.letter("f0");
    let last = r.interior(2);
    let mut off = 0.0f64;
    for i in 0..=last {
        for j in 0..=last {
            if i != j {
                off = off.max(rad[(i, j)].norm());
            }
        }
    }
    // both matrices are Hermitian; the interior block of the radius matrix is diagonal
    let herm_eigs = |m: &CMatrix| {
        let block = m.view((0, 0), (last + 1, last + 1)).into_owned();
        let mut ev: Vec<f64> = block.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    };
    let f0_eigs = herm_eigs(f0);
    let rad_eigs = herm_eigs(&rad);
    let mut rows = Vec::new();
    let mut max_error = 0.0f64;
    let param = match r.kind {
        RepKind::Sphere1 => r.p,
        _ => r.q,
    };
    let mut f0_expected: Vec<f64> = (0..=last)
        .map(|i| match r.kind {
            RepKind::Sphere1 => {
                if i == 0 {
                    0.0
                } else {
                    1.0 - param.powi(i as i32)
                }
            }
            _ => 1.0,
        })
        .collect();
    let mut rad_expected: Vec<f64> = (0..=last)
        .map(|i| match r.kind {
            RepKind::CirclePoint => 1.0,
            _ => 1.0 - 0.5 * (param.powi(i as i32) + param.powi(i as i32 + 1)),
        })
        .collect();
    // unsorted diagonal values per row, for the table
    let table: Vec<(f64, f64, f64, f64)> = (0..=last)
        .map(|i| (f0_expected[i], f0[(i, i)].re, rad_expected[i], rad[(i, i)].re))
        .collect();
    f0_expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rad_expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for k in 0..=last {
        max_error = max_error.max((f0_expected[k] - f0_eigs[k]).abs());
        max_error = max_error.max((rad_expected[k] - rad_eigs[k]).abs());
    }
    for (i, (fe, fc, re, rc)) in table.into_iter().enumerate() {
        rows.push(SpectralRow {
            i,
            f0_expected: fe,
            f0_computed: fc,
            radius_expected: re,
            radius_computed: rc,
        });
    }
    SpectralReport {
        kind: r.kind,
        rows,
        off_diagonal: off,
        max_error,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FaithfulnessReport {
    pub input: Vec<(String, f64)>,
    pub recovered: Vec<(String, f64)>,
    pub max_error: f64,
    pub success: bool,
}

/// Sphere basis coordinates: `(k, l, has_f0)` for `f1^k f0^{0|1} fm1^l`.
fn sphere_shape(w: &Word, a: &Alphabet) -> Result<(usize, usize, bool), RepError> {
    let (f1, f0, fm1) = (a.index("f1").unwrap(), a.index("f0").unwrap(), a.index("fm1").unwrap());
    let ls: Vec<usize> = w.letters().collect();
    let k = ls.iter().take_while(|&&l| l == f1).count();
    let mut rest = &ls[k..];
    let has0 = rest.first() == Some(&f0);
    if has0 {
        rest = &rest[1..];
    }
    if rest.iter().any(|&l| l != fm1) {
        return Err(RepError::NotBasisForm(w.display(a).to_string()));
    }
    Ok((k, rest.len(), has0))
}

/// Recovers the basis coefficients of a sphere element from `ρ_1 ⊕ ρ_2`, by the triangular
/// extraction over `e_0, e_1, ...`.
pub fn faithfulness_probe(rs: &RewriteSystem, e: &Element, p: f64, q: f64, n: usize, tol: f64) -> Result<FaithfulnessReport, RepError> {
    let a = rs.alphabet();
    let e = rs.normal_form(e)?;
    let mut input = std::collections::BTreeMap::new();
    let mut maxk = 0;
    let mut maxl = 0;
    for (w, c) in e.terms() {
        let (k, l, h) = sphere_shape(w, a)?;
        maxk = maxk.max(k);
        maxl = maxl.max(l);
        let v = c.evaluate(q, p, 0.0)?;
        input.insert((k, l, h), v.re);
    }
    if maxk + maxl + 2 > n {
        return Err(RepError::TooSmall { n, degree: maxk + maxl });
    }
    let r1 = build_representation(RepKind::Sphere1, p, q, 0.0, n)?;
    let r2 = build_representation(RepKind::Sphere2, p, q, 0.0, n)?;
    let m1 = evaluate_element_matrix(&e, &r1)?;
    let m2 = evaluate_element_matrix(&e, &r2)?;
    let lam1 = weights(n, p);
    let lam2 = weights(n, q);
    // ρ(f1^k f0^h fm1^l) e_i, as (coefficient, target index)
    let act = |lam: &[f64], sphere1: bool, k: usize, l: usize, h: bool, i: usize| -> Option<(f64, usize)> {
        if l > i {
            return None;
        }
        let mut c = 1.0;
        for j in (i - l + 1)..=i {
            c *= lam[j].sqrt();
        }
        let base = i - l;
        if h && sphere1 {
            c *= lam[base];
        }
        for j in (base + 1)..=(base + k) {
            c *= lam[j].sqrt();
        }
        Some((c, base + k))
    };
    let mut rec: std::collections::BTreeMap<(usize, usize, bool), f64> = Default::default();
    let kmax = n - 1 - maxl;
    for i in 0..=maxl {
        // ρ1(a) e_i minus the known l < i part; the l = i part only sees b_{k,i}
        let mut col1: Vec<f64> = (0..n).map(|r| m1[(r, i)].re).collect();
        let mut col2: Vec<f64> = (0..n).map(|r| m2[(r, i)].re).collect();
        for (&(k, l, h), &v) in &rec {
            if let Some((c, t)) = act(&lam1, true, k, l, h, i) {
                col1[t] -= v * c;
            }
            if let Some((c, t)) = act(&lam2, false, k, l, h, i) {
                col2[t] -= v * c;
            }
        }
        for k in 0..=kmax.min(n - 1) {
            let (c1, t) = act(&lam1, true, k, i, false, i).expect("l = i");
            let b = col1[t] / c1;
            let (c2, t2) = act(&lam2, false, k, i, false, i).expect("l = i");
            let a_coef = col2[t2] / c2 - b;
            if b.abs() > tol {
                rec.insert((k, i, false), b);
            }
            if a_coef.abs() > tol {
                rec.insert((k, i, true), a_coef);
            }
        }
    }
    let name = |(k, l, h): (usize, usize, bool)| {
        let mut s = vec!["f1"; k];
        if h {
            s.push("f0");
        }
        s.extend(std::iter::repeat_n("fm1", l));
        if s.is_empty() {
            "1".to_string()
        } else {
            s.join(" ")
        }
    };
    let mut max_error = 0.0f64;
    let keys: std::collections::BTreeSet<_> = input.keys().chain(rec.keys()).copied().collect();
    for key in keys {
        let x = input.get(&key).copied().unwrap_or(0.0);
        let y = rec.get(&key).copied().unwrap_or(0.0);
        max_error = max_error.max((x - y).abs());
    }
    Ok(FaithfulnessReport {
        input: input.iter().map(|(k, v)| (name(*k), *v)).collect(),
        recovered: rec.iter().map(|(k, v)| (name(*k), *v)).collect(),
        max_error,
        success: max_error <= tol,
    })
}

/// A random sphere element in basis form with small rational coefficients.
pub fn random_sphere_element<R: Rng>(rs: &RewriteSystem, d: usize, terms: usize, rng: &mut R) -> Element {
    let basis = rs.algebra_basis(d);
    let mut e = Element::zero(rs.alphabet());
    for _ in 0..terms {
        let w = basis[rng.gen_range(0..basis.len())].clone();
        let c = Scalar::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4));
        e.add_term(w, &c);
    }
    e
}

#[derive(Clone, Debug, Serialize)]
pub struct CircleReport {
    /// `(θ, ρ_θ(φ_q(x)), ρ_θ(φ_q(x*)))`.
    pub points: Vec<(f64, Complex64, Complex64)>,
    /// `ρ_θ ∘ φ_q` against the one-dimensional disc representation `x -> e^{iθ}`.
    pub max_point_error: f64,
    /// The disc relation at `x = e^{iθ}`.
    pub max_relation_error: f64,
    /// `Σ_{i<N} (sqrt(λ_{i+1}) - sqrt(λ_i)) = sqrt(λ_N)`.
    pub telescoped: f64,
    pub telescope_gap: f64,
    /// Largest singular value of the truncated `π_q(x)`, with `sqrt(λ_{N-1})`.
    pub norm_x: f64,
    pub expected_norm: f64,
}

/// `a -> e^{iθ}` on the circle alphabet.
fn circle_point(alphabet: &Arc<Alphabet>, q: f64, theta: f64) -> TruncatedRepresentation {
    let z = Complex64::from_polar(1.0, theta);
    let matrices = (0..alphabet.len())
        .map(|i| {
            let v = if alphabet.name(i).ends_with('*') { z.conj() } else { z };
            CMatrix::from_element(1, 1, v)
        })
        .collect();
    TruncatedRepresentation {
        kind: RepKind::CirclePoint,
        n: 1,
        p: q,
        q,
        theta,
        alphabet: alphabet.clone(),
        matrices,
    }
}

/// Composes the circle points with the symbol map `φ_q : P(D_q) -> P(S^1)`.
pub fn classical_circle_check(q: f64, n: usize, thetas: &[f64]) -> Result<CircleReport, RepError> {
    check_param("q", q)?;
    let qs = Scalar::q();
    let g = crate::gluing::build_sphere_gluing(&qs, &qs).map_err(|e| RepError::InvalidParams(e.to_string()))?;
    let disc = g.disc_q.alphabet().clone();
    let y = Element::letter(&disc, 0);
    let ystar = y.star();
    let (img, img_star) = (g.phi_q.apply(&y)?, g.phi_q.apply(&ystar)?);
    let mut points = Vec::new();
    let mut max_point = 0.0f64;
    let mut max_rel = 0.0f64;
    for &th in thetas {
        let r = circle_point(g.circle.alphabet(), q, th);
        let (u, v) = (evaluate_element_matrix(&img, &r)?[(0, 0)], evaluate_element_matrix(&img_star, &r)?[(0, 0)]);
        let z = Complex64::from_polar(1.0, th);
        max_point = max_point.max((u - z).norm()).max((v - z.conj()).norm());
        let rel = v * u - u * v * q - Complex64::new(1.0 - q, 0.0);
        max_rel = max_rel.max(rel.norm());
        points.push((th, u, v));
    }
    let lam = weights(n, q);
    let tele: f64 = (0..n).map(|i| lam[i + 1].sqrt() - lam[i].sqrt()).sum();
    let r = build_representation(RepKind::Disc, q, q, 0.0, n)?;
    let norm = r.letter("x").clone().singular_values().iter().copied().fold(0.0, f64::max);
    Ok(CircleReport {
        points,
        max_point_error: max_point,
        max_relation_error: max_rel,
        telescoped: tele,
        telescope_gap: (1.0 - tele).abs(),
        norm_x: norm,
        expected_norm: lam[n - 1].sqrt(),
    })
}
