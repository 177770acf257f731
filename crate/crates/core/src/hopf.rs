//! `U_{q^{1/2}}(sl_2)` acting on the disc and sphere algebras and on their forms.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dga::{differential_ideal_span, random_point, CalculusMorphism, FormVec, UniversalForms};
use crate::freealg::{AlgebraError, Alphabet, Element, Word};
use crate::quotient::{ideal_truncation_span, AlgebraMorphism};
use crate::rewrite::{RewriteError, RewriteSystem};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HopfError {
    #[error("no action given for {gen} on `{letter}`")]
    MissingAction { gen: HopfGen, letter: String },
    #[error("the sphere action needs p = q")]
    UnequalParameters,
    #[error("unknown Hopf generator `{0}`")]
    UnknownGenerator(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("{0}")]
    Dga(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum HopfGen {
    E,
    F,
    K,
    Kinv,
}

impl HopfGen {
    pub const ALL: [HopfGen; 4] = [HopfGen::E, HopfGen::F, HopfGen::K, HopfGen::Kinv];

    pub fn counit(self) -> Scalar {
        match self {
            HopfGen::E | HopfGen::F => Scalar::zero(),
            HopfGen::K | HopfGen::Kinv => Scalar::one(),
        }
    }
}

impl fmt::Display for HopfGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HopfGen::E => "E",
            HopfGen::F => "F",
            HopfGen::K => "K",
            HopfGen::Kinv => "K^-1",
        })
    }
}

/// Parses a space-separated word such as `E F K^-1`.
pub fn parse_hopf_word(s: &str) -> Result<Vec<HopfGen>, HopfError> {
    s.split_whitespace()
        .map(|t| match t {
            "E" => Ok(HopfGen::E),
            "F" => Ok(HopfGen::F),
            "K" => Ok(HopfGen::K),
            "K^-1" | "Ki" | "Kinv" => Ok(HopfGen::Kinv),
            _ => Err(HopfError::UnknownGenerator(t.to_string())),
        })
        .collect()
}

/// A linear combination of words in the Hopf generators; words act right to left.
pub type HopfElement = Vec<(Scalar, Vec<HopfGen>)>;

fn hw(c: Scalar, w: &[HopfGen]) -> (Scalar, Vec<HopfGen>) {
    (c, w.to_vec())
}

/// `Δ(g) = Σ c a ⊗ b` as `(c, a, b)` triples.
pub type Coproduct = Vec<(Scalar, Vec<HopfGen>, Vec<HopfGen>)>;

/// Relations, coproduct, counit and antipode of `U_{q^{1/2}}(sl_2)`.
#[derive(Clone, Debug, Serialize)]
pub struct HopfAlgebraSpec {
    /// `(name, lhs, rhs)`, each side a combination of generator words.
    pub relations: Vec<(String, HopfElement, HopfElement)>,
    /// `Δ(g) = Σ c a ⊗ b`.
    pub coproduct: Vec<(HopfGen, Coproduct)>,
    pub antipode: Vec<(HopfGen, HopfElement)>,
}

impl HopfAlgebraSpec {
    pub fn standard() -> Self {
        use HopfGen::*;
        let q = Scalar::q();
        let one = Scalar::one;
        let half = &Scalar::q_pow(2) - &Scalar::q_pow(-2);
        let relations = vec![
            ("K K^-1 = 1".to_string(), vec![hw(one(), &[K, Kinv])], vec![hw(one(), &[])]),
            ("K^-1 K = 1".to_string(), vec![hw(one(), &[Kinv, K])], vec![hw(one(), &[])]),
            ("K E = q E K".to_string(), vec![hw(one(), &[K, E])], vec![hw(q.clone(), &[E, K])]),
            ("K^-1 E = q^-1 E K^-1".to_string(), vec![hw(one(), &[Kinv, E])], vec![hw(q.inv(), &[E, Kinv])]),
            ("K F = q^-1 F K".to_string(), vec![hw(one(), &[K, F])], vec![hw(q.inv(), &[F, K])]),
            ("K^-1 F = q F K^-1".to_string(), vec![hw(one(), &[Kinv, F])], vec![hw(q.clone(), &[F, Kinv])]),
            (
                "E F - F E = (K - K^-1)/(q^(1/2) - q^(-1/2))".to_string(),
                vec![hw(one(), &[E, F]), hw(-one(), &[F, E])],
                vec![hw(half.inv(), &[K]), hw(-half.inv(), &[Kinv])],
            ),
        ];
        let coproduct = vec![
            (E, vec![(one(), vec![E], vec![]), (one(), vec![K], vec![E])]),
            (F, vec![(one(), vec![F], vec![Kinv]), (one(), vec![], vec![F])]),
            (K, vec![(one(), vec![K], vec![K])]),
            (Kinv, vec![(one(), vec![Kinv], vec![Kinv])]),
        ];
        let antipode = vec![
            (E, vec![hw(-one(), &[Kinv, E])]),
            (F, vec![hw(-one(), &[F, K])]),
            (K, vec![hw(one(), &[Kinv])]),
            (Kinv, vec![hw(one(), &[K])]),
        ];
        HopfAlgebraSpec {
            relations,
            coproduct,
            antipode,
        }
    }
}

/// Action on generators; extended to words by the coproduct and to differentials by
/// `h·d(a) = d(h·a)`.
#[derive(Clone, Debug)]
pub struct ModuleAction {
    pub name: String,
    pub base: Arc<Alphabet>,
    table: HashMap<(HopfGen, usize), Element>,
}

impl ModuleAction {
    pub fn from_table(name: &str, base: &Arc<Alphabet>, entries: &[(HopfGen, &str, Element)]) -> Result<Self, HopfError> {
        let mut table = HashMap::new();
        for (g, letter, img) in entries {
            table.insert((*g, base.index(letter)?), img.clone());
        }
        Ok(ModuleAction {
            name: name.to_string(),
            base: base.clone(),
            table,
        })
    }

    /// The action on `P(D_q)` with generator `name`.
    pub fn disc(base: &Arc<Alphabet>, name: &str) -> Result<Self, HopfError> {
        let el = |s: &str| crate::parse::parse_element(base, s).expect("built-in action");
        let st = format!("{}*", name);
        let n = name;
        use HopfGen::*;
        Self::from_table(
            &format!("disc_{}", name),
            base,
            &[
                (K, n, el(&format!("q {n}"))),
                (Kinv, n, el(&format!("q^-1 {n}"))),
                (F, n, el("q^(1/4)")),
                (E, n, el(&format!("-q^(1/4) {n} {n}"))),
                (K, &st, el(&format!("q^-1 {st}"))),
                (Kinv, &st, el(&format!("q {st}"))),
                (F, &st, el(&format!("-q^(5/4) {st} {st}"))),
                (E, &st, el("q^(-3/4)")),
            ],
        )
    }

    /// The action on the sphere for `p = q`.
    pub fn sphere(base: &Arc<Alphabet>, p: &Scalar, q: &Scalar) -> Result<Self, HopfError> {
        if p != q {
            return Err(HopfError::UnequalParameters);
        }
        let el = |s: &str| crate::parse::parse_element(base, s).expect("built-in action");
        use HopfGen::*;
        Self::from_table(
            "sphere",
            base,
            &[
                (K, "f1", el("q f1")),
                (Kinv, "f1", el("q^-1 f1")),
                (F, "f1", el("q^(1/4)")),
                (E, "f1", el("-q^(1/4) f1 f1")),
                (K, "fm1", el("q^-1 fm1")),
                (Kinv, "fm1", el("q fm1")),
                (F, "fm1", el("-q^(5/4) fm1 fm1")),
                (E, "fm1", el("q^(-3/4)")),
                (K, "f0", el("f0")),
                (Kinv, "f0", el("f0")),
                (F, "f0", el("q^(5/4) (fm1 - f0 fm1)")),
                (E, "f0", el("q^(1/4) (f1 - f1 f0)")),
            ],
        )
    }

    /// `g · letter` over `target`, which contains the base generators (and possibly their
    /// differentials).
    fn act_letter(&self, g: HopfGen, target: &Arc<Alphabet>, letter: usize) -> Result<Element, HopfError> {
        let gen = target.generator(letter);
        let (name, differential) = match gen.base {
            Some(b) => (target.name(b).to_string(), true),
            None => (gen.name.clone(), false),
        };
        let i = self.base.index(&name)?;
        let img = self.table.get(&(g, i)).ok_or_else(|| HopfError::MissingAction { gen: g, letter: name.clone() })?;
        let img = img.embed(target)?;
        Ok(if differential { img.d()? } else { img })
    }

    /// `g · w` in the free algebra on `target`, by the coproduct.
    fn act_word(&self, g: HopfGen, target: &Arc<Alphabet>, w: &Word) -> Result<Element, HopfError> {
        let ls: Vec<usize> = w.letters().collect();
        if ls.is_empty() {
            return Ok(Element::scalar(target, g.counit()));
        }
        let first = Element::letter(target, ls[0]);
        let rest_w = Word::from_letters(&ls[1..]);
        let rest = Element::word(target, rest_w.clone());
        let ga = self.act_letter(g, target, ls[0])?;
        Ok(match g {
            HopfGen::K | HopfGen::Kinv => &ga * &self.act_word(g, target, &rest_w)?,
            HopfGen::E => {
                let ka = self.act_letter(HopfGen::K, target, ls[0])?;
                &(&ga * &rest) + &(&ka * &self.act_word(HopfGen::E, target, &rest_w)?)
            }
            HopfGen::F => {
                let kr = self.act_word(HopfGen::Kinv, target, &rest_w)?;
                &(&ga * &kr) + &(&first * &self.act_word(HopfGen::F, target, &rest_w)?)
            }
        })
    }

    /// `g · e` reduced in `sys`.
    pub fn act_gen(&self, sys: &RewriteSystem, g: HopfGen, e: &Element) -> Result<Element, HopfError> {
        let target = sys.alphabet();
        let mut acc = Element::zero(target);
        for (w, c) in e.terms() {
            acc.add_scaled(c, &self.act_word(g, target, w)?);
        }
        Ok(sys.normal_form(&acc)?)
    }

    /// `h · e` for a word `h`, applied right to left with reduction in between.
    pub fn act(&self, sys: &RewriteSystem, h: &[HopfGen], e: &Element) -> Result<Element, HopfError> {
        let mut cur = sys.normal_form(e)?;
        for g in h.iter().rev() {
            cur = self.act_gen(sys, *g, &cur)?;
        }
        Ok(cur)
    }

    pub fn act_element(&self, sys: &RewriteSystem, h: &HopfElement, e: &Element) -> Result<Element, HopfError> {
        let mut acc = Element::zero(sys.alphabet());
        for (c, w) in h {
            acc.add_scaled(c, &self.act(sys, w, e)?);
        }
        Ok(acc)
    }

    /// The action on universal forms, through their Leibniz expansion.
    pub fn act_form(&self, forms: &UniversalForms, g: HopfGen, v: &[(crate::dga::FormKey, Scalar)]) -> Result<FormVec, HopfError> {
        let e = forms.vec_to_element(v);
        let mut acc = Element::zero(&forms.ext);
        for (w, c) in e.terms() {
            acc.add_scaled(c, &self.act_word(g, &forms.ext, w)?);
        }
        forms.from_element(&acc).map_err(|e| HopfError::Dga(e.to_string()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationSweep {
    pub relation: String,
    pub words_checked: usize,
    /// Words on which the two sides differ.
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModuleAxiomReport {
    pub action: String,
    pub bound: usize,
    pub relations: Vec<RelationSweep>,
    pub counit_ok: bool,
    /// `h·(g·w) = (hg)·w` for generator pairs.
    pub composition_ok: bool,
}

impl ModuleAxiomReport {
    pub fn passed(&self) -> bool {
        self.counit_ok && self.composition_ok && self.relations.iter().all(|r| r.failures.is_empty())
    }
}

/// Every Hopf relation, acting on every basis word of length `<= d` of `sys`.
pub fn module_axiom_check(action: &ModuleAction, sys: &RewriteSystem, d: usize) -> Result<ModuleAxiomReport, HopfError> {
    let spec = HopfAlgebraSpec::standard();
    let a = sys.alphabet();
    let words = sys.enumerate_filtered_basis(d);
    let mut relations = Vec::new();
    for (name, lhs, rhs) in &spec.relations {
        let fails: Vec<Option<String>> = words
            .par_iter()
            .map(|w| {
                let e = Element::word(a, w.clone());
                let l = action.act_element(sys, lhs, &e)?;
                let r = action.act_element(sys, rhs, &e)?;
                Ok((l != r).then(|| w.display(a).to_string()))
            })
            .collect::<Result<_, HopfError>>()?;
        relations.push(RelationSweep {
            relation: name.clone(),
            words_checked: words.len(),
            failures: fails.into_iter().flatten().collect(),
        });
    }
    let one = Element::one(a);
    let mut counit_ok = true;
    for g in HopfGen::ALL {
        counit_ok &= action.act_gen(sys, g, &one)? == one.scale(&g.counit());
    }
    let mut composition_ok = true;
    for w in words.iter().filter(|w| w.len() <= 2) {
        let e = Element::word(a, w.clone());
        for g in HopfGen::ALL {
            for h in HopfGen::ALL {
                let step = action.act_gen(sys, h, &action.act_gen(sys, g, &e)?)?;
                composition_ok &= step == action.act(sys, &[h, g], &e)?;
            }
        }
    }
    Ok(ModuleAxiomReport {
        action: action.name.clone(),
        bound: d,
        relations,
        counit_ok,
        composition_ok,
    })
}

/// `h·d(w) = d(h·w)` in a calculus system for algebra basis words of length `<= d`.
pub fn d_equivariance(action: &ModuleAction, calculus: &RewriteSystem, d: usize) -> Result<bool, HopfError> {
    let a = calculus.alphabet();
    for w in calculus.algebra_basis(d) {
        let e = Element::word(a, w);
        for g in HopfGen::ALL {
            let lhs = action.act_gen(calculus, g, &e.d()?)?;
            let rhs = calculus.normal_form(&action.act_gen(calculus, g, &e)?.d()?)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Member,
    /// No membership certificate within the probed degree.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct CovarianceEntry {
    pub h: HopfGen,
    pub generator: String,
    pub image: String,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct CovarianceReport {
    pub bound: usize,
    pub entries: Vec<CovarianceEntry>,
}

impl CovarianceReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.verdict == Verdict::Member)
    }
}

/// `h·g` lies in the ideal of `sys` generated by `gens`, probed at degree `d`.
pub fn covariance_check_algebra(action: &ModuleAction, sys: &RewriteSystem, gens: &[Element], d: usize) -> Result<CovarianceReport, HopfError> {
    let span = ideal_truncation_span(sys, gens, d)?;
    let mut entries = Vec::new();
    for g in gens {
        for h in HopfGen::ALL {
            let img = action.act_gen(sys, h, g)?;
            entries.push(CovarianceEntry {
                h,
                generator: g.to_string(),
                image: img.to_string(),
                verdict: if span.contains(&img) { Verdict::Member } else { Verdict::Inconclusive },
            });
        }
    }
    Ok(CovarianceReport { bound: d, entries })
}

/// `h·g` lies in the differential ideal of `Ω` generated by `gens`, probed with products of
/// weight `<= d + slack`.
pub fn covariance_check_forms(
    action: &ModuleAction,
    forms: &UniversalForms,
    gens: &[Element],
    d: usize,
    slack: usize,
) -> Result<CovarianceReport, HopfError> {
    let dga = |e: crate::dga::DgaError| HopfError::Dga(e.to_string());
    let gvecs: Vec<FormVec> = gens.iter().map(|g| forms.from_element(g)).collect::<Result<_, _>>().map_err(dga)?;
    let point = random_point(11);
    let mut spans = HashMap::new();
    let mut entries = Vec::new();
    for (g, gv) in gens.iter().zip(&gvecs) {
        let n = gv.first().map(|(k, _)| k.degree()).unwrap_or(0);
        if let std::collections::hash_map::Entry::Vacant(e) = spans.entry(n) {
            let s = differential_ideal_span(forms, &gvecs, n, d + slack, 0, Some(&point)).map_err(dga)?;
            e.insert(s);
        }
        for h in HopfGen::ALL {
            let img = action.act_form(forms, h, gv)?;
            let member = spans[&n].contains(&img);
            entries.push(CovarianceEntry {
                h,
                generator: g.to_string(),
                image: forms.vec_to_element(&img).to_string(),
                verdict: if member { Verdict::Member } else { Verdict::Inconclusive },
            });
        }
    }
    Ok(CovarianceReport { bound: d, entries })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntertwiningReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

/// `m(h·g) = h·m(g)` on the source generators, and on their differentials when the
/// calculus morphisms are supplied.
pub fn intertwining(
    source: &ModuleAction,
    target: &ModuleAction,
    m: &AlgebraMorphism,
    calculus: Option<&CalculusMorphism>,
) -> Result<IntertwiningReport, HopfError> {
    let src = m.source.alphabet();
    let mut checked = 0;
    let mut failures = Vec::new();
    for i in src.algebra_generators() {
        let g = Element::letter(src, i);
        for h in HopfGen::ALL {
            checked += 1;
            let lhs = m.apply(&source.act_gen(&m.source, h, &g)?)?;
            let rhs = target.act_gen(&m.target, h, &m.apply(&g)?)?;
            if lhs != rhs {
                failures.push(format!("{} on {}", h, src.name(i)));
            }
            if let Some(cm) = calculus {
                checked += 1;
                let ext = Arc::new(src.with_differentials());
                let dg = Element::letter(&ext, i).d()?;
                let acted = source.act_word(h, &ext, dg.terms().keys().next().expect("one term"))?;
                let lhs = cm.apply(&acted)?;
                let rhs = target.act_gen(&cm.target.system, h, &cm.apply(&dg)?)?;
                if lhs != rhs {
                    failures.push(format!("{} on d({})", h, src.name(i)));
                }
            }
        }
    }
    Ok(IntertwiningReport { checked, failures })
}
