//! Oriented rewriting systems for presented algebras: normal forms, critical-pair
//! confluence checks and enumeration of irreducible words.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

use serde::Serialize;
use thiserror::Error;

use crate::freealg::{Alphabet, Element, Word};
use crate::scalar::Scalar;

pub const DEFAULT_BUDGET: usize = 1_000_000;
const MAX_DEPTH: usize = 4_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RewriteError {
    #[error("reduction budget of {0} steps exceeded")]
    BudgetExceeded(usize),
    #[error("relation cannot be oriented: {0}")]
    Unorientable(String),
    #[error("element is over a different alphabet")]
    IncompatibleAlgebras,
}

/// Generators, star structure and defining relations (each read as `= 0`).
#[derive(Clone, Debug)]
pub struct Presentation {
    pub name: String,
    pub alphabet: Arc<Alphabet>,
    pub relations: Vec<Element>,
    /// All words of at least this length vanish.
    pub nilpotent: Option<usize>,
}

impl Presentation {
    pub fn new(name: &str, alphabet: Arc<Alphabet>, relations: Vec<Element>) -> Self {
        Presentation {
            name: name.to_string(),
            alphabet,
            relations,
            nilpotent: None,
        }
    }

    pub fn with_nilpotent(mut self, n: usize) -> Self {
        self.nilpotent = Some(n);
        self
    }

    /// Adds the star of every relation not already present up to a scalar factor.
    pub fn star_closed(mut self) -> Self {
        let mut extra = Vec::new();
        for r in &self.relations {
            let s = r.star();
            let known = self
                .relations
                .iter()
                .chain(extra.iter())
                .any(|o| proportional(o, &s));
            if !known {
                extra.push(s);
            }
        }
        self.relations.extend(extra);
        self
    }

    pub fn element(&self, name: &str) -> Element {
        Element::generator(&self.alphabet, name).expect("generator present")
    }
}

fn proportional(a: &Element, b: &Element) -> bool {
    if a.len() != b.len() || a.is_zero() {
        return a.is_zero() && b.is_zero();
    }
    let (w, c) = a.terms().iter().next().unwrap();
    let d = b.coeff(w);
    if d.is_zero() {
        return false;
    }
    a.scale(&(&d / c)) == *b
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Strategy {
    /// Every rule decreases the length-lexicographic word order.
    DegLex,
    /// Quadratic reordering rules first; higher rules (power eliminations) only on words
    /// irreducible for the first phase.
    TwoPhase,
}

#[derive(Clone, Debug)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: Vec<(Word, Scalar)>,
    pub phase: u8,
}

type Nf = Arc<Vec<(Word, Scalar)>>;

pub struct RewriteSystem {
    alphabet: Arc<Alphabet>,
    rules: Vec<Rule>,
    strategy: Strategy,
    nilpotent: Option<usize>,
    budget: usize,
    cache: RwLock<HashMap<Word, Nf>>,
}

impl std::fmt::Debug for RewriteSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RewriteSystem")
            .field("rules", &self.rules.len())
            .field("strategy", &self.strategy)
            .finish()
    }
}

/// Orients the relations of a presentation into rewriting rules.
///
/// Relations whose leading word (length-lexicographic, letters in declaration order) has
/// length at most two become first-phase rules. The remaining relations are reduced by
/// those rules and oriented at the word with the largest repeated-letter count, ties broken
/// by the word order; these rules fire only on words without first-phase redexes.
pub fn orient_presentation(p: &Presentation) -> Result<RewriteSystem, RewriteError> {
    let mut rs = RewriteSystem {
        alphabet: p.alphabet.clone(),
        rules: Vec::new(),
        strategy: Strategy::DegLex,
        nilpotent: p.nilpotent,
        budget: DEFAULT_BUDGET,
        cache: RwLock::new(HashMap::new()),
    };
    let mut later = Vec::new();
    for r in &p.relations {
        if !r.same_alphabet(&Element::zero(&p.alphabet)) {
            return Err(RewriteError::IncompatibleAlgebras);
        }
        let lead = r.terms().keys().next_back().cloned();
        match lead {
            None => continue,
            Some(w) if w.len() <= 2 => {}
            Some(_) => {
                later.push(r.clone());
                continue;
            }
        }
        let red = rs.normal_form(r)?;
        if red.is_zero() {
            continue;
        }
        let w = red.terms().keys().next_back().unwrap().clone();
        rs.push_rule(&red, w, 1)?;
    }
    for r in later {
        let red = rs.normal_form(&r)?;
        if red.is_zero() {
            continue;
        }
        let mult = |w: &Word| {
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for l in w.letters() {
                *counts.entry(l).or_default() += 1;
            }
            counts.values().copied().max().unwrap_or(0)
        };
        let w = red
            .terms()
            .keys()
            .max_by(|a, b| mult(a).cmp(&mult(b)).then_with(|| a.cmp(b)))
            .unwrap()
            .clone();
        rs.push_rule(&red, w, 2)?;
        rs.strategy = Strategy::TwoPhase;
    }
    Ok(rs)
}

impl RewriteSystem {
    /// A system from explicit rules.
    pub fn from_rules(
        alphabet: Arc<Alphabet>,
        rules: Vec<Rule>,
        nilpotent: Option<usize>,
    ) -> Result<Self, RewriteError> {
        for r in &rules {
            if r.rhs.iter().any(|(w, _)| w.find(&r.lhs, 0).is_some()) {
                return Err(RewriteError::Unorientable(format!(
                    "right side of {} contains its left side",
                    r.lhs.display(&alphabet)
                )));
            }
        }
        let strategy = if rules.iter().any(|r| r.phase > 1) {
            Strategy::TwoPhase
        } else {
            Strategy::DegLex
        };
        let mut rules = rules;
        rules.sort_by_key(|r| r.phase);
        Ok(RewriteSystem {
            alphabet,
            rules,
            strategy,
            nilpotent,
            budget: DEFAULT_BUDGET,
            cache: RwLock::new(HashMap::new()),
        })
    }

    fn push_rule(&mut self, rel: &Element, lead: Word, phase: u8) -> Result<(), RewriteError> {
        let a = self.alphabet.clone();
        if lead.is_unit() {
            return Err(RewriteError::Unorientable(format!(
                "{} has no nonconstant leading word",
                rel
            )));
        }
        let lc = rel.coeff(&lead);
        let rhs: Vec<(Word, Scalar)> = rel
            .terms()
            .iter()
            .filter(|(w, _)| **w != lead)
            .map(|(w, c)| (w.clone(), -(c / &lc)))
            .collect();
        if rhs.iter().any(|(w, _)| w.find(&lead, 0).is_some()) {
            return Err(RewriteError::Unorientable(format!(
                "{}: right side contains {}",
                rel,
                lead.display(&a)
            )));
        }
        self.rules.push(Rule { lhs: lead, rhs, phase });
        self.rules.sort_by_key(|r| r.phase);
        self.cache.write().unwrap().clear();
        Ok(())
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn nilpotent(&self) -> Option<usize> {
        self.nilpotent
    }

    /// The rule with the given left side, rendered as an element `rhs`.
    pub fn rule_rhs(&self, lhs: &Word) -> Option<Element> {
        self.rules
            .iter()
            .find(|r| r.lhs == *lhs)
            .map(|r| Element::from_terms(&self.alphabet, r.rhs.iter().cloned()))
    }

    fn vanishes(&self, w: &Word) -> bool {
        matches!(self.nilpotent, Some(n) if w.len() >= n)
    }

    /// Leftmost redex of the highest-priority phase: (position, rule index).
    fn redex(&self, w: &Word) -> Option<(usize, usize)> {
        let mut phase = None;
        let mut best: Option<(usize, usize)> = None;
        for (ri, r) in self.rules.iter().enumerate() {
            if let Some(ph) = phase {
                if r.phase != ph {
                    break;
                }
            }
            if let Some(pos) = w.find(&r.lhs, 0) {
                if best.is_none_or(|(bp, _)| pos < bp) {
                    best = Some((pos, ri));
                }
                phase = Some(r.phase);
            }
        }
        best
    }

    pub fn is_irreducible(&self, w: &Word) -> bool {
        !self.vanishes(w) && self.rules.iter().all(|r| w.find(&r.lhs, 0).is_none())
    }

    fn apply(&self, w: &Word, pos: usize, ri: usize) -> Vec<(Word, Scalar)> {
        let r = &self.rules[ri];
        let pre = w.slice(0, pos);
        let post = w.slice(pos + r.lhs.len(), w.len());
        r.rhs
            .iter()
            .map(|(m, c)| (pre.concat(m).concat(&post), c.clone()))
            .collect()
    }

    fn nf_word(&self, w: &Word, steps: &Cell<usize>, depth: usize) -> Result<Nf, RewriteError> {
        if self.vanishes(w) {
            return Ok(Arc::new(Vec::new()));
        }
        if let Some(v) = self.cache.read().unwrap().get(w) {
            return Ok(v.clone());
        }
        let result = match self.redex(w) {
            None => Arc::new(vec![(w.clone(), Scalar::one())]),
            Some((pos, ri)) => {
                steps.set(steps.get() + 1);
                if steps.get() > self.budget || depth > MAX_DEPTH {
                    return Err(RewriteError::BudgetExceeded(self.budget));
                }
                let mut acc: BTreeMap<Word, Scalar> = BTreeMap::new();
                for (w2, c) in self.apply(w, pos, ri) {
                    let sub = self.nf_word(&w2, steps, depth + 1)?;
                    for (w3, c3) in sub.iter() {
                        let t = &c * c3;
                        let e = acc.entry(w3.clone()).or_insert_with(Scalar::zero);
                        *e = &*e + &t;
                    }
                }
                Arc::new(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect())
            }
        };
        self.cache.write().unwrap().insert(w.clone(), result.clone());
        Ok(result)
    }

    /// Normal form of a single word.
    pub fn normal_form_word(&self, w: &Word) -> Result<Element, RewriteError> {
        let steps = Cell::new(0);
        let v = self.nf_word(w, &steps, 0)?;
        Ok(Element::from_terms(&self.alphabet, v.iter().cloned()))
    }

    /// Fixed point of reduction; linear in the input.
    pub fn normal_form(&self, e: &Element) -> Result<Element, RewriteError> {
        if !e.same_alphabet(&Element::zero(&self.alphabet)) {
            return Err(RewriteError::IncompatibleAlgebras);
        }
        let steps = Cell::new(0);
        let mut acc: BTreeMap<Word, Scalar> = BTreeMap::new();
        for (w, c) in e.terms() {
            let v = self.nf_word(w, &steps, 0)?;
            for (w2, c2) in v.iter() {
                let t = c * c2;
                let en = acc.entry(w2.clone()).or_insert_with(Scalar::zero);
                *en = &*en + &t;
            }
        }
        Ok(Element::from_terms(&self.alphabet, acc))
    }

    /// Product followed by normal form.
    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element, RewriteError> {
        let p = a.try_mul(b).map_err(|_| RewriteError::IncompatibleAlgebras)?;
        self.normal_form(&p)
    }

    /// All irreducible words of length at most `d`, in word order.
    pub fn enumerate_filtered_basis(&self, d: usize) -> Vec<Word> {
        self.enumerate_basis_with(d, |_| true)
    }

    /// Irreducible words of length at most `d` using only letters accepted by `letter_ok`.
    pub fn enumerate_basis_with(&self, d: usize, letter_ok: impl Fn(usize) -> bool) -> Vec<Word> {
        let mut out = Vec::new();
        let mut layer = vec![Word::unit()];
        if self.is_irreducible(&Word::unit()) {
            out.push(Word::unit());
        }
        for _ in 0..d {
            let mut next = Vec::new();
            for w in &layer {
                for l in 0..self.alphabet.len() {
                    if !letter_ok(l) {
                        continue;
                    }
                    let w2 = w.concat(&Word::letter(l));
                    if self.is_irreducible(&w2) {
                        next.push(w2);
                    }
                }
            }
            next.sort();
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    /// Irreducible words built from degree-0 letters only.
    pub fn algebra_basis(&self, d: usize) -> Vec<Word> {
        let a = self.alphabet.clone();
        self.enumerate_basis_with(d, move |l| a.letter_degree(l) == 0)
    }

    /// Critical pairs of total length at most `d`; every overlap word is reduced along both
    /// rules and the normal forms compared.
    pub fn confluence_check(&self, d: usize) -> Result<ConfluenceReport, RewriteError> {
        let mut checked = 0;
        let mut failures = Vec::new();
        let mut seen: BTreeSet<(Word, usize, usize, usize, usize)> = BTreeSet::new();
        for (i, r1) in self.rules.iter().enumerate() {
            for (j, r2) in self.rules.iter().enumerate() {
                let (u, v) = (&r1.lhs, &r2.lhs);
                let mut cands: Vec<(Word, usize, usize)> = Vec::new();
                // proper overlaps: suffix of u equals prefix of v
                for k in 1..u.len().min(v.len()) {
                    if u.0[u.len() - k..] == v.0[..k] {
                        let w = u.concat(&v.slice(k, v.len()));
                        cands.push((w, 0, u.len() - k));
                    }
                }
                // inclusions: v inside u
                if i != j {
                    let mut from = 0;
                    while let Some(pos) = u.find(v, from) {
                        cands.push((u.clone(), 0, pos));
                        from = pos + 1;
                    }
                }
                for (w, p1, p2) in cands {
                    if w.len() > d || !seen.insert((w.clone(), i, p1, j, p2)) {
                        continue;
                    }
                    checked += 1;
                    let a = Element::from_terms(&self.alphabet, self.apply(&w, p1, i));
                    let b = Element::from_terms(&self.alphabet, self.apply(&w, p2, j));
                    let na = self.normal_form(&a)?;
                    let nb = self.normal_form(&b)?;
                    if na != nb {
                        failures.push(CriticalPairFailure {
                            word: w.display(&self.alphabet).to_string(),
                            left: na.to_string(),
                            right: nb.to_string(),
                        });
                    }
                }
            }
        }
        Ok(ConfluenceReport {
            degree_bound: d,
            overlaps_checked: checked,
            failures,
        })
    }

    /// Human-readable rules, `lhs -> rhs`.
    pub fn describe_rules(&self) -> Vec<String> {
        self.rules
            .iter()
            .map(|r| {
                let rhs = Element::from_terms(&self.alphabet, r.rhs.iter().cloned());
                format!("{} -> {}", r.lhs.display(&self.alphabet), rhs)
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CriticalPairFailure {
    pub word: String,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfluenceReport {
    pub degree_bound: usize,
    pub overlaps_checked: usize,
    pub failures: Vec<CriticalPairFailure>,
}

impl ConfluenceReport {
    pub fn confluent(&self) -> bool {
        self.failures.is_empty()
    }
}
