//! `.alg` presentation files.
//!
//! ```text
//! # comment
//! [presentation]
//! name = sphere
//! order = f1 f0 fm1
//! nilpotent = 3
//!
//! [params]
//! q = (0, 1)
//!
//! [generators]
//! f1 0 fm1
//! f0 0 f0
//!
//! [relations]
//! fm1 f1 - q f1 fm1 - (1 - q)
//!
//! [ideals]
//! J1 = x; y
//!
//! [morphisms]
//! phi : circle = x -> a; x* -> a*
//!
//! [action]
//! E x = -s x x
//! ```
//!
//! A generator line is `name degree star`. Degree-1 lines `d(g) 1 d(h)` switch on
//! differentials; such files are calculi and are not star-closed on load.

use std::fmt::Write as _;
use std::sync::Arc;

use ncglue::freealg::{AlgebraError, Alphabet, Element};
use ncglue::hopf::{HopfGen, ModuleAction};
use ncglue::parse::{parse_element, ParseError};
use ncglue::rewrite::Presentation;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgFileError {
    #[error("line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("line {line}: unknown generator `{name}`")]
    UnknownGenerator { line: usize, name: String },
    #[error("line {line}: star mismatch for `{name}`")]
    StarMismatch { line: usize, name: String },
    #[error("line {line}: {source}")]
    Element { line: usize, source: ParseError },
    #[error("{0}")]
    Alphabet(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorDecl {
    pub name: String,
    pub degree: u8,
    pub star: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorphismDecl {
    pub name: String,
    pub target: String,
    /// `(generator, image expression over the target)`.
    pub images: Vec<(String, String)>,
}

#[derive(Clone, Debug)]
pub struct PresentationFile {
    pub name: String,
    pub order: Vec<String>,
    pub nilpotent: Option<usize>,
    pub params: Vec<(String, f64, f64)>,
    pub generators: Vec<GeneratorDecl>,
    pub alphabet: Arc<Alphabet>,
    pub relations: Vec<Element>,
    pub ideals: Vec<(String, Vec<Element>)>,
    pub morphisms: Vec<MorphismDecl>,
    pub action: Vec<(HopfGen, String, Element)>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Presentation,
    Params,
    Generators,
    Relations,
    Ideals,
    Morphisms,
    Action,
}

fn syntax(line: usize, column: usize, msg: impl Into<String>) -> AlgFileError {
    AlgFileError::Syntax {
        line,
        column,
        msg: msg.into(),
    }
}

fn column_of(raw: &str, part: &str) -> usize {
    raw.find(part).map(|i| raw[..i].chars().count() + 1).unwrap_or(1)
}

fn alph_err(e: AlgebraError) -> AlgFileError {
    AlgFileError::Alphabet(e.to_string())
}

fn hopf_gen(tok: &str) -> Option<HopfGen> {
    HopfGen::ALL.iter().copied().find(|g| g.to_string() == tok)
}

pub fn parse_presentation(text: &str) -> Result<PresentationFile, AlgFileError> {
    let mut section = None;
    let mut name = String::from("unnamed");
    let mut order = Vec::new();
    let mut nilpotent = None;
    let mut params = Vec::new();
    let mut gens: Vec<(usize, GeneratorDecl)> = Vec::new();
    // deferred until the alphabet exists
    let mut relations: Vec<(usize, String)> = Vec::new();
    let mut ideals: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut morphisms = Vec::new();
    let mut action: Vec<(usize, HopfGen, String, String)> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            let Some(h) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) else {
                return Err(syntax(ln, 1, "unterminated section header"));
            };
            section = Some(match h.trim() {
                "presentation" => Section::Presentation,
                "params" => Section::Params,
                "generators" => Section::Generators,
                "relations" => Section::Relations,
                "ideals" => Section::Ideals,
                "morphisms" => Section::Morphisms,
                "action" => Section::Action,
                other => return Err(syntax(ln, 2, format!("unknown section `{}`", other))),
            });
            continue;
        }
        let Some(sec) = section else {
            return Err(syntax(ln, 1, "content before the first section"));
        };
        let key_value = || -> Result<(&str, &str), AlgFileError> {
            let (k, v) = line.split_once('=').ok_or_else(|| syntax(ln, 1, "expected `key = value`"))?;
            Ok((k.trim(), v.trim()))
        };
        match sec {
            Section::Presentation => {
                let (k, v) = key_value()?;
                match k {
                    "name" => name = v.to_string(),
                    "order" => order = v.split_whitespace().map(String::from).collect(),
                    "nilpotent" => {
                        nilpotent = Some(v.parse().map_err(|_| syntax(ln, column_of(raw, v), "expected an integer"))?)
                    }
                    _ => return Err(syntax(ln, 1, format!("unknown key `{}`", k))),
                }
            }
            Section::Params => {
                let (k, v) = key_value()?;
                let inner = v
                    .strip_prefix('(')
                    .and_then(|x| x.strip_suffix(')'))
                    .ok_or_else(|| syntax(ln, column_of(raw, v), "expected `(lo, hi)`"))?;
                let (lo, hi) = inner
                    .split_once(',')
                    .ok_or_else(|| syntax(ln, column_of(raw, v), "expected `(lo, hi)`"))?;
                let num = |s: &str| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| syntax(ln, column_of(raw, s.trim()), "expected a number"))
                };
                params.push((k.to_string(), num(lo)?, num(hi)?));
            }
            Section::Generators => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(syntax(ln, 1, "expected `name degree star`"));
                }
                let degree: u8 = match parts[1] {
                    "0" => 0,
                    "1" => 1,
                    _ => return Err(syntax(ln, column_of(raw, parts[1]), "degree must be 0 or 1")),
                };
                gens.push((
                    ln,
                    GeneratorDecl {
                        name: parts[0].to_string(),
                        degree,
                        star: parts[2].to_string(),
                    },
                ));
            }
            Section::Relations => relations.push((ln, line.to_string())),
            Section::Ideals => {
                let (k, v) = key_value()?;
                ideals.push((ln, k.to_string(), v.split(';').map(|s| s.trim().to_string()).collect()));
            }
            Section::Morphisms => {
                let (head, body) = key_value()?;
                let (mname, target) = head
                    .split_once(':')
                    .ok_or_else(|| syntax(ln, 1, "expected `name : target = ...`"))?;
                let mut images = Vec::new();
                for part in body.split(';') {
                    let (g, img) = part
                        .split_once("->")
                        .ok_or_else(|| syntax(ln, column_of(raw, part.trim()), "expected `g -> image`"))?;
                    images.push((g.trim().to_string(), img.trim().to_string()));
                }
                morphisms.push(MorphismDecl {
                    name: mname.trim().to_string(),
                    target: target.trim().to_string(),
                    images,
                });
            }
            Section::Action => {
                let (lhs, rhs) = key_value()?;
                let parts: Vec<&str> = lhs.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(syntax(ln, 1, "expected `H g = image`"));
                }
                let h = hopf_gen(parts[0])
                    .ok_or_else(|| syntax(ln, column_of(raw, parts[0]), format!("unknown Hopf generator `{}`", parts[0])))?;
                action.push((ln, h, parts[1].to_string(), rhs.to_string()));
            }
        }
    }

    let alphabet = build_alphabet(&gens, &order)?;
    let known = |ln: usize, g: &str| -> Result<(), AlgFileError> {
        alphabet.index(g).map(|_| ()).map_err(|_| AlgFileError::UnknownGenerator {
            line: ln,
            name: g.to_string(),
        })
    };
    let el = |ln: usize, src: &str| parse_element(&alphabet, src).map_err(|source| AlgFileError::Element { line: ln, source });
    let relations = relations.iter().map(|(ln, s)| el(*ln, s)).collect::<Result<Vec<_>, _>>()?;
    let ideals = ideals
        .iter()
        .map(|(ln, n, gs)| Ok((n.clone(), gs.iter().map(|g| el(*ln, g)).collect::<Result<Vec<_>, _>>()?)))
        .collect::<Result<Vec<_>, AlgFileError>>()?;
    let action = action
        .iter()
        .map(|(ln, h, g, img)| {
            known(*ln, g)?;
            Ok((*h, g.clone(), el(*ln, img)?))
        })
        .collect::<Result<Vec<_>, AlgFileError>>()?;
    Ok(PresentationFile {
        name,
        order,
        nilpotent,
        params,
        generators: gens.into_iter().map(|(_, g)| g).collect(),
        alphabet,
        relations,
        ideals,
        morphisms,
        action,
    })
}

fn build_alphabet(gens: &[(usize, GeneratorDecl)], order: &[String]) -> Result<Arc<Alphabet>, AlgFileError> {
    let base: Vec<&(usize, GeneratorDecl)> = gens.iter().filter(|(_, g)| g.degree == 0).collect();
    let declared = |n: &str| base.iter().find(|(_, g)| g.name == n).map(|(_, g)| g);
    let mut pairs: Vec<(&str, &str)> = Vec::new();
    for (ln, g) in &base {
        if let Some(other) = declared(&g.star) {
            if other.star != g.name {
                return Err(AlgFileError::StarMismatch {
                    line: *ln,
                    name: g.name.clone(),
                });
            }
        }
        if !pairs.iter().any(|(a, b)| *a == g.name || *b == g.name) {
            pairs.push((&g.name, &g.star));
        }
    }
    let order: Vec<&str> = order.iter().map(String::as_str).collect();
    let alphabet = Alphabet::ordered(&order, &pairs).map_err(alph_err)?;
    let diffs: Vec<&(usize, GeneratorDecl)> = gens.iter().filter(|(_, g)| g.degree == 1).collect();
    if diffs.is_empty() {
        return Ok(Arc::new(alphabet));
    }
    let full = alphabet.with_differentials();
    for (ln, g) in diffs {
        let (Ok(i), Ok(j)) = (full.index(&g.name), full.index(&g.star)) else {
            return Err(AlgFileError::UnknownGenerator {
                line: *ln,
                name: g.name.clone(),
            });
        };
        if full.generator(i).star != j {
            return Err(AlgFileError::StarMismatch {
                line: *ln,
                name: g.name.clone(),
            });
        }
    }
    Ok(Arc::new(full))
}

impl PresentationFile {
    pub fn has_differentials(&self) -> bool {
        self.alphabet.has_differentials()
    }

    /// The presentation; algebra files are star-closed.
    pub fn presentation(&self) -> Presentation {
        let mut p = Presentation::new(&self.name, self.alphabet.clone(), self.relations.clone());
        if !self.has_differentials() {
            p = p.star_closed();
        }
        if let Some(n) = self.nilpotent {
            p = p.with_nilpotent(n);
        }
        p
    }

    /// The degree-0 generators and relations of a calculus file.
    pub fn base_presentation(&self) -> Result<Presentation, AlgFileError> {
        let gens: Vec<(usize, GeneratorDecl)> =
            self.generators.iter().filter(|g| g.degree == 0).map(|g| (0, g.clone())).collect();
        let a = build_alphabet(&gens, &self.order)?;
        let rels = self
            .relations
            .iter()
            .filter(|r| r.form_degree() == 0)
            .map(|r| restrict(r, &a))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Presentation::new(&format!("{}_base", self.name), a, rels).star_closed())
    }

    pub fn action(&self) -> Option<ModuleAction> {
        if self.action.is_empty() {
            return None;
        }
        let entries: Vec<(HopfGen, &str, Element)> =
            self.action.iter().map(|(h, g, e)| (*h, g.as_str(), e.clone())).collect();
        ModuleAction::from_table(&self.name, &self.alphabet, &entries).ok()
    }

    pub fn param(&self, name: &str) -> Option<(f64, f64)> {
        self.params.iter().find(|(n, _, _)| n == name).map(|(_, a, b)| (*a, *b))
    }

    /// Canonical text; `parse_presentation` of it gives back an equal file.
    pub fn print(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[presentation]\nname = {}", self.name);
        if !self.order.is_empty() {
            let _ = writeln!(s, "order = {}", self.order.join(" "));
        }
        if let Some(n) = self.nilpotent {
            let _ = writeln!(s, "nilpotent = {}", n);
        }
        if !self.params.is_empty() {
            s.push_str("\n[params]\n");
            for (n, lo, hi) in &self.params {
                let _ = writeln!(s, "{} = ({}, {})", n, lo, hi);
            }
        }
        s.push_str("\n[generators]\n");
        for g in &self.generators {
            let _ = writeln!(s, "{} {} {}", g.name, g.degree, g.star);
        }
        s.push_str("\n[relations]\n");
        for r in &self.relations {
            let _ = writeln!(s, "{}", r);
        }
        if !self.ideals.is_empty() {
            s.push_str("\n[ideals]\n");
            for (n, gs) in &self.ideals {
                let gs: Vec<String> = gs.iter().map(|g| g.to_string()).collect();
                let _ = writeln!(s, "{} = {}", n, gs.join("; "));
            }
        }
        if !self.morphisms.is_empty() {
            s.push_str("\n[morphisms]\n");
            for m in &self.morphisms {
                let imgs: Vec<String> = m.images.iter().map(|(g, i)| format!("{} -> {}", g, i)).collect();
                let _ = writeln!(s, "{} : {} = {}", m.name, m.target, imgs.join("; "));
            }
        }
        if !self.action.is_empty() {
            s.push_str("\n[action]\n");
            for (h, g, e) in &self.action {
                let _ = writeln!(s, "{} {} = {}", h, g, e);
            }
        }
        s
    }
}

/// Rewrites a degree-0 element over the sub-alphabet of its letters, by name.
fn restrict(e: &Element, target: &Arc<Alphabet>) -> Result<Element, AlgFileError> {
    let src = e.alphabet();
    let terms = e
        .terms()
        .iter()
        .map(|(w, c)| {
            let letters = w
                .letters()
                .map(|l| target.index(src.name(l)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(alph_err)?;
            Ok((ncglue::Word::from_letters(&letters), c.clone()))
        })
        .collect::<Result<Vec<_>, AlgFileError>>()?;
    Ok(Element::from_terms(target, terms))
}

impl PartialEq for PresentationFile {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name
            && self.order == o.order
            && self.nilpotent == o.nilpotent
            && self.params == o.params
            && self.generators == o.generators
            && self.alphabet == o.alphabet
            && self.relations == o.relations
            && self.ideals == o.ideals
            && self.morphisms == o.morphisms
            && self.action == o.action
    }
}

/// Bundled files, by file name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("disc_q.alg", include_str!("../presentations/disc_q.alg")),
    ("disc_p.alg", include_str!("../presentations/disc_p.alg")),
    ("circle.alg", include_str!("../presentations/circle.alg")),
    ("sphere.alg", include_str!("../presentations/sphere.alg")),
    ("sphere_qq.alg", include_str!("../presentations/sphere_qq.alg")),
    ("counterexample1.alg", include_str!("../presentations/counterexample1.alg")),
    ("counterexample2.alg", include_str!("../presentations/counterexample2.alg")),
    ("disc_calculus.alg", include_str!("../presentations/disc_calculus.alg")),
    ("sphere_calculus.alg", include_str!("../presentations/sphere_calculus.alg")),
];

/// Reads `path` from disk, falling back to the bundled file of that name.
pub fn load(path: &str) -> anyhow::Result<PresentationFile> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let base = std::path::Path::new(path)
                .file_name()
                .and_then(|f| f.to_str())
                .unwrap_or(path);
            let base = if base.ends_with(".alg") { base.to_string() } else { format!("{}.alg", base) };
            BUNDLED
                .iter()
                .find(|(n, _)| *n == base)
                .map(|(_, t)| t.to_string())
                .ok_or_else(|| anyhow::anyhow!("{}: {}", path, e))?
        }
    };
    parse_presentation(&text).map_err(|e| anyhow::anyhow!("{}: {}", path, e))
}
