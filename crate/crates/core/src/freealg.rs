//! Words and finite linear combinations in a free *-algebra on named generators.
//!
//! Generators of degree one are formal differentials `d(g)`; the Leibniz rule on
//! words is provided here, everything calculus-specific lives in [`crate::dga`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("elements belong to different generator alphabets")]
    IncompatibleAlgebras,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("star partner mismatch for `{0}`")]
    StarMismatch(String),
    #[error("alphabet has no differential letters")]
    NoDifferentials,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: u8,
    pub star: usize,
    /// Letter `d(g)` for a degree-0 generator, if differentials are present.
    pub differential: Option<usize>,
    /// For a differential letter, the generator it differentiates.
    pub base: Option<usize>,
}

/// Ordered generator set; the declaration order is the letter order used by word comparisons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    gens: Vec<Generator>,
    by_name: HashMap<String, usize>,
}

impl Alphabet {
    /// Degree-0 generators with their star partners given by name
    /// (a generator paired with itself is self-adjoint).
    pub fn new(pairs: &[(&str, &str)]) -> Result<Self, AlgebraError> {
        Self::ordered(&[], pairs)
    }

    /// Like [`Alphabet::new`], but letters listed in `order` come first, in that order.
    pub fn ordered(order: &[&str], pairs: &[(&str, &str)]) -> Result<Self, AlgebraError> {
        let mut names: Vec<String> = order.iter().map(|s| s.to_string()).collect();
        for (a, b) in pairs {
            for n in [a, b] {
                if !names.iter().any(|m| m == n) {
                    names.push(n.to_string());
                }
            }
        }
        let by_name: HashMap<String, usize> =
            names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut star: Vec<Option<usize>> = vec![None; names.len()];
        for (a, b) in pairs {
            let (ia, ib) = (by_name[*a], by_name[*b]);
            for (i, j) in [(ia, ib), (ib, ia)] {
                match star[i] {
                    Some(k) if k != j => return Err(AlgebraError::StarMismatch(names[i].clone())),
                    _ => star[i] = Some(j),
                }
            }
        }
        let gens = names
            .iter()
            .enumerate()
            .map(|(i, n)| Generator {
                name: n.clone(),
                degree: 0,
                star: star[i].unwrap_or(i),
                differential: None,
                base: None,
            })
            .collect();
        Ok(Alphabet { gens, by_name })
    }

    /// Appends a letter `d(g)` for every degree-0 generator; differentials sort after all
    /// algebra generators.
    pub fn with_differentials(&self) -> Alphabet {
        if self.has_differentials() {
            return self.clone();
        }
        let n = self.gens.len();
        let mut gens = self.gens.clone();
        for i in 0..n {
            gens[i].differential = Some(n + i);
            gens.push(Generator {
                name: format!("d({})", self.gens[i].name),
                degree: 1,
                star: n + self.gens[i].star,
                differential: None,
                base: Some(i),
            });
        }
        let by_name = gens.iter().enumerate().map(|(i, g)| (g.name.clone(), i)).collect();
        Alphabet { gens, by_name }
    }

    pub fn has_differentials(&self) -> bool {
        self.gens.iter().any(|g| g.degree > 0)
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    /// Indices of the degree-0 generators.
    pub fn algebra_generators(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.gens.len()).filter(|&i| self.gens[i].degree == 0)
    }

    pub fn index(&self, name: &str) -> Result<usize, AlgebraError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))
    }

    pub fn name(&self, i: usize) -> &str {
        &self.gens[i].name
    }

    pub fn letter_degree(&self, i: usize) -> u32 {
        self.gens[i].degree as u32
    }
}

/// A word in generator indices. Ordered by length, then lexicographically by letter order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub SmallVec<[u8; 12]>);

impl Word {
    pub fn unit() -> Self {
        Word(SmallVec::new())
    }

    pub fn letter(i: usize) -> Self {
        let mut v = SmallVec::new();
        v.push(i as u8);
        Word(v)
    }

    pub fn from_letters(ls: &[usize]) -> Self {
        Word(ls.iter().map(|&i| i as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&b| b as usize)
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word(v)
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(SmallVec::from_slice(&self.0[from..to]))
    }

    /// Sum of letter degrees.
    pub fn form_degree(&self, a: &Alphabet) -> u32 {
        self.letters().map(|l| a.letter_degree(l)).sum()
    }

    pub fn star(&self, a: &Alphabet) -> Word {
        Word(self.0.iter().rev().map(|&l| a.generator(l as usize).star as u8).collect())
    }

    /// Position of the first occurrence of `pat` at or after `from`.
    pub fn find(&self, pat: &Word, from: usize) -> Option<usize> {
        let (n, m) = (self.0.len(), pat.0.len());
        if m == 0 || m > n {
            return None;
        }
        (from..=n - m).find(|&i| self.0[i..i + m] == pat.0[..])
    }

    pub fn display<'a>(&'a self, a: &'a Alphabet) -> WordDisplay<'a> {
        WordDisplay { w: self, a }
    }
}

impl Ord for Word {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.len().cmp(&o.0.len()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

pub struct WordDisplay<'a> {
    w: &'a Word,
    a: &'a Alphabet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.w.is_unit() {
            return write!(f, "1");
        }
        let names: Vec<&str> = self.w.letters().map(|l| self.a.name(l)).collect();
        write!(f, "{}", names.join(" "))
    }
}

/// A finite linear combination of words with nonzero Scalar coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Element {
    alphabet: Arc<Alphabet>,
    terms: BTreeMap<Word, Scalar>,
}

impl Element {
    pub fn zero(a: &Arc<Alphabet>) -> Self {
        Element {
            alphabet: a.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(a: &Arc<Alphabet>) -> Self {
        Element::scalar(a, Scalar::one())
    }

    pub fn scalar(a: &Arc<Alphabet>, c: Scalar) -> Self {
        Element::term(a, Word::unit(), c)
    }

    pub fn word(a: &Arc<Alphabet>, w: Word) -> Self {
        Element::term(a, w, Scalar::one())
    }

    pub fn letter(a: &Arc<Alphabet>, i: usize) -> Self {
        Element::word(a, Word::letter(i))
    }

    pub fn generator(a: &Arc<Alphabet>, name: &str) -> Result<Self, AlgebraError> {
        Ok(Element::letter(a, a.index(name)?))
    }

    pub fn term(a: &Arc<Alphabet>, w: Word, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        Element {
            alphabet: a.clone(),
            terms,
        }
    }

    pub fn from_terms(a: &Arc<Alphabet>, it: impl IntoIterator<Item = (Word, Scalar)>) -> Self {
        let mut e = Element::zero(a);
        for (w, c) in it {
            e.add_term(w, &c);
        }
        e
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn terms(&self) -> &BTreeMap<Word, Scalar> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Word, Scalar> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, w: Word, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(e) => {
                let s = &*e + c;
                if s.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *e = s;
                }
            }
            None => {
                self.terms.insert(w, c.clone());
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: &Scalar, other: &Element) {
        for (w, d) in other.terms.iter() {
            self.add_term(w.clone(), &(c * d));
        }
    }

    pub fn same_alphabet(&self, o: &Element) -> bool {
        Arc::ptr_eq(&self.alphabet, &o.alphabet) || *self.alphabet == *o.alphabet
    }

    fn check(&self, o: &Element) -> Result<(), AlgebraError> {
        if self.same_alphabet(o) {
            Ok(())
        } else {
            Err(AlgebraError::IncompatibleAlgebras)
        }
    }

    pub fn try_add(&self, o: &Element) -> Result<Element, AlgebraError> {
        self.check(o)?;
        let mut r = self.clone();
        r.add_scaled(&Scalar::one(), o);
        Ok(r)
    }

    /// Bilinear concatenation product.
    pub fn try_mul(&self, o: &Element) -> Result<Element, AlgebraError> {
        self.check(o)?;
        let mut r = Element::zero(&self.alphabet);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                r.add_term(w1.concat(w2), &(c1 * c2));
            }
        }
        Ok(r)
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        if c.is_zero() {
            return Element::zero(&self.alphabet);
        }
        Element {
            alphabet: self.alphabet.clone(),
            terms: self.terms.iter().map(|(w, d)| (w.clone(), d * c)).collect(),
        }
    }

    pub fn neg(&self) -> Element {
        self.scale(&Scalar::from_int(-1))
    }

    /// Antilinear antihomomorphism; parameters are real so coefficients are fixed.
    pub fn star(&self) -> Element {
        let a = &self.alphabet;
        Element {
            alphabet: a.clone(),
            terms: self.terms.iter().map(|(w, c)| (w.star(a), c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Element {
        let mut acc = Element::one(&self.alphabet);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Homogeneous component of the given form degree.
    pub fn component(&self, form_degree: u32) -> Element {
        let a = &self.alphabet;
        Element {
            alphabet: a.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.form_degree(a) == form_degree)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Maximal form degree among the terms.
    pub fn form_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|w| w.form_degree(&self.alphabet))
            .max()
            .unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|w| w.form_degree(&self.alphabet));
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    /// Maximal word length.
    pub fn max_len(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    /// Graded Leibniz differential on the free differential algebra:
    /// `d(g) = d(g)` letter, `d(d(g)) = 0`.
    pub fn d(&self) -> Result<Element, AlgebraError> {
        let a = &self.alphabet;
        if !a.has_differentials() {
            return Err(AlgebraError::NoDifferentials);
        }
        let mut r = Element::zero(a);
        for (w, c) in &self.terms {
            let mut sign_deg = 0u32;
            for (i, l) in w.letters().enumerate() {
                if let Some(dl) = a.generator(l).differential {
                    let mut nw = w.0.clone();
                    nw[i] = dl as u8;
                    let coef = if sign_deg % 2 == 1 { -c } else { c.clone() };
                    r.add_term(Word(nw), &coef);
                }
                sign_deg += a.letter_degree(l);
            }
        }
        Ok(r)
    }

    /// Re-expresses the element over a larger alphabet containing the same generator names.
    pub fn embed(&self, target: &Arc<Alphabet>) -> Result<Element, AlgebraError> {
        let map: Vec<usize> = (0..self.alphabet.len())
            .map(|i| target.index(self.alphabet.name(i)))
            .collect::<Result<_, _>>()?;
        let mut r = Element::zero(target);
        for (w, c) in &self.terms {
            r.add_term(Word(w.0.iter().map(|&l| map[l as usize] as u8).collect()), c);
        }
        Ok(r)
    }

    /// Substitutes an element for every letter (a homomorphism from the free algebra).
    pub fn substitute(&self, target: &Arc<Alphabet>, images: &[Element]) -> Element {
        let mut r = Element::zero(target);
        for (w, c) in &self.terms {
            let mut acc = Element::scalar(target, c.clone());
            for l in w.letters() {
                acc = &acc * &images[l];
            }
            r.add_scaled(&Scalar::one(), &acc);
        }
        r
    }
}

impl std::ops::Add for &Element {
    type Output = Element;
    fn add(self, o: &Element) -> Element {
        self.try_add(o).expect("alphabet mismatch")
    }
}

impl std::ops::Sub for &Element {
    type Output = Element;
    fn sub(self, o: &Element) -> Element {
        self.try_add(&o.neg()).expect("alphabet mismatch")
    }
}

impl std::ops::Mul for &Element {
    type Output = Element;
    fn mul(self, o: &Element) -> Element {
        self.try_mul(o).expect("alphabet mismatch")
    }
}

impl std::ops::Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element::neg(self)
    }
}

/// Renders a coefficient in front of a word.
pub(crate) fn fmt_coeff_term(c: &Scalar, word: &str, first: bool) -> String {
    let s = c.to_string();
    let (neg, body) = if c.is_single_term() && s.starts_with('-') {
        (true, s[1..].to_string())
    } else {
        (false, s)
    };
    let mut out = String::new();
    if first {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    let needs_paren = !c.is_single_term();
    let coef = if needs_paren { format!("({})", body) } else { body };
    if word.is_empty() {
        out.push_str(&coef);
    } else if coef == "1" {
        out.push_str(word);
    } else {
        out.push_str(&coef);
        out.push(' ');
        out.push_str(word);
    }
    out
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().rev().enumerate() {
            let ws = if w.is_unit() {
                String::new()
            } else {
                w.display(&self.alphabet).to_string()
            };
            write!(f, "{}", fmt_coeff_term(c, &ws, i == 0))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({})", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(&[("x", "x*")]).unwrap())
    }

    #[test]
    fn products() {
        let a = disc();
        let x = Element::generator(&a, "x").unwrap();
        let xs = Element::generator(&a, "x*").unwrap();
        assert_eq!((&x * &xs).to_string(), "x x*");
        let one = Element::one(&a);
        assert_eq!(&one * &x, x);
        let s = &x + &xs;
        assert_eq!((&s * &x).to_string(), "x* x + x x");
    }

    #[test]
    fn star_examples() {
        let a = Arc::new(Alphabet::new(&[("f1", "fm1"), ("f0", "f0")]).unwrap());
        let f1 = Element::generator(&a, "f1").unwrap();
        assert_eq!(f1.star(), Element::generator(&a, "fm1").unwrap());
        let d = disc();
        let x = Element::generator(&d, "x").unwrap();
        let xs = Element::generator(&d, "x*").unwrap();
        let w = &x * &xs;
        assert_eq!(w.star(), w);
        let c = &Scalar::one() - &Scalar::q();
        assert_eq!(x.scale(&c).star(), xs.scale(&c));
    }

    #[test]
    fn mismatch_is_error() {
        let a = disc();
        let b = Arc::new(Alphabet::new(&[("y", "y*")]).unwrap());
        let x = Element::generator(&a, "x").unwrap();
        let y = Element::generator(&b, "y").unwrap();
        assert_eq!(x.try_mul(&y), Err(AlgebraError::IncompatibleAlgebras));
    }

    #[test]
    fn leibniz_on_words() {
        let a = Arc::new(disc().with_differentials());
        let x = Element::generator(&a, "x").unwrap();
        let x2 = &x * &x;
        assert_eq!(x2.d().unwrap().to_string(), "d(x) x + x d(x)");
        let dx = x.d().unwrap();
        assert!(dx.d().unwrap().is_zero());
        // d(dx x) = -dx dx
        let w = &dx * &x;
        let dx_dx = &dx * &dx;
        assert_eq!(w.d().unwrap(), dx_dx.neg());
        assert_eq!(dx.star().to_string(), "d(x*)");
    }
}
