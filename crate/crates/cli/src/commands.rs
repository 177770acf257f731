//! Subcommands. Each returns its reports plus optional human-readable text.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ncglue::dga::{self, Calculus, UniversalForms};
use ncglue::freealg::Word;
use ncglue::gluing::build_sphere_gluing;
use ncglue::linalg::Span;
use ncglue::models;
use ncglue::parse::parse_element;
use ncglue::quotient::{self, covering_completion_check, intersect_all, lattice_condition_check, FiniteDimAlgebra};
use ncglue::rep::{self, RepKind};
use ncglue::rewrite::{orient_presentation, Presentation};
use ncglue::Scalar;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::acceptance;
use crate::algfile::{self, PresentationFile};
use crate::report::{json as to_json, Report, Verdict};

#[derive(Parser, Debug)]
#[command(name = "ncglue", version, about = "Coverings, gluings and calculi of finitely presented *-algebras")]
pub struct Cli {
    /// Emit JSON reports on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Bound {
    /// Filtered degree bound.
    #[arg(long, short = 'D', env = "NCGLUE_DEGREE_BOUND", default_value_t = 4)]
    pub degree: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normal form of an expression.
    Nf {
        #[arg(long)]
        pres: String,
        #[arg(long)]
        expr: String,
    },
    /// Irreducible words up to the degree bound.
    Basis {
        #[arg(long)]
        pres: String,
        #[command(flatten)]
        bound: Bound,
    },
    /// Critical pairs up to the degree bound.
    Confluence {
        #[arg(long)]
        pres: String,
        #[command(flatten)]
        bound: Bound,
    },
    /// Whether the file's ideals intersect to zero.
    Covering {
        #[arg(long)]
        pres: String,
    },
    /// Covering completion and a witness when it is larger than the algebra.
    Complete {
        #[arg(long)]
        pres: String,
    },
    /// Lattice identities of the file's ideals.
    Lattice {
        #[arg(long)]
        pres: String,
    },
    /// The sphere as a gluing of two discs over the circle.
    GlueSphere {
        /// Use one parameter for both discs.
        #[arg(long)]
        equal_params: bool,
        #[command(flatten)]
        bound: Bound,
    },
    /// Compare the sphere calculus ideal with the kernel of the projections.
    CalculusAdapt {
        #[arg(long, value_enum, default_value_t = GeneratorSet::All)]
        generators: GeneratorSet,
        #[command(flatten)]
        bound: Bound,
    },
    /// Invariants, confluence and d^2 = 0 / Leibniz for a calculus file.
    CalculusVerify {
        #[arg(long, default_value = "disc_calculus.alg")]
        pres: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[command(flatten)]
        bound: Bound,
    },
    /// The circle interface for p != q and p = q.
    Interface {
        #[command(flatten)]
        bound: Bound,
    },
    /// Residuals, spectra, coefficient recovery and the circle check.
    RepVerify {
        #[arg(long = "N", default_value_t = 64)]
        n: usize,
    },
    /// Spectral table of one representation.
    Spectrum {
        #[arg(long, value_enum)]
        rep: RepArg,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long = "N", default_value_t = 64)]
        n: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Module-algebra axioms, covariance and intertwining.
    HopfVerify {
        #[command(flatten)]
        bound: Bound,
    },
    /// The full acceptance suite.
    AcceptAll {
        /// Comma-separated criterion numbers.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GeneratorSet {
    All,
    FirstOrder,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RepArg {
    Disc,
    Sphere1,
    Sphere2,
    Circle,
}

pub struct Outcome {
    pub reports: Vec<Report>,
    pub text: String,
}

impl Outcome {
    fn one(r: Report) -> Self {
        Outcome {
            reports: vec![r],
            text: String::new(),
        }
    }

    pub fn failed(&self) -> bool {
        self.reports.iter().any(|r| !r.passed())
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Nf { pres, expr } => nf(pres, expr),
        Command::Basis { pres, bound } => basis(pres, bound.degree),
        Command::Confluence { pres, bound } => confluence(pres, bound.degree),
        Command::Covering { pres } => covering(pres),
        Command::Complete { pres } => complete(pres),
        Command::Lattice { pres } => lattice(pres),
        Command::GlueSphere { equal_params, bound } => glue_sphere(*equal_params, bound.degree),
        Command::CalculusAdapt { generators, bound } => calculus_adapt(*generators, bound.degree),
        Command::CalculusVerify { pres, samples, bound } => calculus_verify(pres, *samples, bound.degree),
        Command::Interface { bound } => interface(bound.degree),
        Command::RepVerify { n } => rep_verify(*n),
        Command::Spectrum { rep, p, q, theta, n, csv } => spectrum(*rep, *p, *q, *theta, *n, *csv),
        Command::HopfVerify { bound } => hopf_verify(bound.degree),
        Command::AcceptAll { only } => accept_all(only),
    }
}

fn nf(pres: &str, expr: &str) -> Result<Outcome> {
    let start = Instant::now();
    let f = algfile::load(pres)?;
    let rs = orient_presentation(&f.presentation())?;
    let e = parse_element(&f.alphabet, expr)?;
    let n = rs.normal_form(&e)?;
    let r = Report::new("nf", Verdict::Pass, n.to_string(), json!({ "input": expr, "normal_form": n.to_string() }));
    Ok(Outcome {
        text: format!("{}\n", n),
        reports: vec![r.timed(start)],
    })
}

fn basis(pres: &str, d: usize) -> Result<Outcome> {
    let start = Instant::now();
    let f = algfile::load(pres)?;
    let rs = orient_presentation(&f.presentation())?;
    let words = rs.algebra_basis(d);
    let dims: Vec<usize> = (0..=d).map(|k| words.iter().filter(|w| w.len() <= k).count()).collect();
    let names: Vec<String> = words.iter().map(|w| show_word(w, &f)).collect();
    let r = Report::new(
        "basis",
        Verdict::Pass,
        format!("{} words of length <= {}, cumulative {:?}", words.len(), d, dims),
        json!({ "bound": d, "cumulative_dims": dims, "words": names }),
    );
    Ok(Outcome {
        text: names.join("\n") + "\n",
        reports: vec![r.timed(start)],
    })
}

fn show_word(w: &Word, f: &PresentationFile) -> String {
    if w.is_unit() {
        "1".into()
    } else {
        w.display(&f.alphabet).to_string()
    }
}

fn confluence(pres: &str, d: usize) -> Result<Outcome> {
    let start = Instant::now();
    let f = algfile::load(pres)?;
    let rs = orient_presentation(&f.presentation())?;
    let c = rs.confluence_check(d)?;
    let r = Report::new(
        "confluence",
        Verdict::from_bool(c.confluent()),
        format!("{} rules, {} unresolved critical pairs up to overlap length {}", rs.rules().len(), c.failures.len(), d),
        json!({ "rules": rs.describe_rules(), "report": to_json(&c) }),
    );
    Ok(Outcome::one(r.timed(start)))
}

/// The presentation with a nilpotency bound that is exact: the file's own bound, or the
/// first length at which every word already reduces to zero.
pub fn finite_model(f: &PresentationFile) -> Result<Presentation> {
    let p = f.presentation();
    if p.nilpotent.is_some() {
        return Ok(p);
    }
    let rs = orient_presentation(&p)?;
    let letters: Vec<usize> = f.alphabet.algebra_generators().collect();
    for n in 1..=6 {
        let mut words = vec![Word::unit()];
        for _ in 0..n {
            words = words
                .iter()
                .flat_map(|w| letters.iter().map(move |&l| w.concat(&Word::letter(l))))
                .collect();
        }
        let mut all_zero = true;
        for w in &words {
            if !rs.normal_form_word(w)?.is_zero() {
                all_zero = false;
                break;
            }
        }
        if all_zero {
            return Ok(p.with_nilpotent(n));
        }
    }
    bail!("{} is not recognisably finite-dimensional; add `nilpotent = n`", f.name)
}

fn fd_ideals(f: &PresentationFile) -> Result<(FiniteDimAlgebra, Vec<Span<usize, Scalar>>)> {
    if f.ideals.is_empty() {
        bail!("{} declares no ideals", f.name);
    }
    let p = finite_model(f)?;
    let gens: Vec<Vec<ncglue::Element>> = f.ideals.iter().map(|(_, g)| g.clone()).collect();
    let (a, _, _, ideals) = acceptance::example_covering(&p, &gens)?;
    Ok((a, ideals))
}

fn covering(pres: &str) -> Result<Outcome> {
    let start = Instant::now();
    let f = algfile::load(pres)?;
    let (a, ideals) = fd_ideals(&f)?;
    let refs: Vec<&Span<usize, Scalar>> = ideals.iter().collect();
    let inter = intersect_all(&refs, a.dim()).dim();
    let dims: Vec<usize> = ideals.iter().map(|j| j.dim()).collect();
    let r = Report::new(
        "covering",
        Verdict::from_bool(inter == 0),
        format!("dim A {}, ideal dims {:?}, dim of the intersection {}", a.dim(), dims, inter),
        json!({ "dim_algebra": a.dim(), "ideal_dims": dims, "dim_intersection": inter }),
    );
    Ok(Outcome::one(r.timed(start)))
}

fn complete(pres: &str) -> Result<Outcome> {
    let start = Instant::now();
    let f = algfile::load(pres)?;
    let (a, ideals) = fd_ideals(&f)?;
    let c = covering_completion_check(&a, &ideals)?;
    let summary = if c.complete {
        format!("complete, dim A = dim A_c = {}", c.dim_algebra)
    } else {
        format!(
            "incomplete, dim A {}, dim A_c {}, witness ({}) has no preimage",
            c.dim_algebra,
            c.dim_completion,
            c.witness.clone().unwrap_or_default().join(", ")
        )
    };
    Ok(Outcome::one(Report::new("complete", Verdict::from_bool(c.complete), summary, to_json(&c)).timed(start)))
}

fn lattice(pres: &str) -> Result<Outcome> {
    let start = Instant::now();
    let f = algfile::load(pres)?;
    let (a, ideals) = fd_ideals(&f)?;
    let l = lattice_condition_check(&a, &ideals);
    let all = l.sequential.iter().chain(&l.symmetric);
    let holds: Vec<String> = all.map(|i| format!("{} k={}: {}", i.family, i.k, i.holds)).collect();
    let ok = l.sequential.iter().chain(&l.symmetric).all(|i| i.holds);
    let r = Report::new("lattice", Verdict::from_bool(ok), holds.join(", "), to_json(&l));
    Ok(Outcome::one(r.timed(start)))
}

fn glue_sphere(equal: bool, d: usize) -> Result<Outcome> {
    let start = Instant::now();
    let q = Scalar::q();
    let p = if equal { q.clone() } else { Scalar::p() };
    let g = build_sphere_gluing(&p, &q)?;
    let relations = g.tuples_satisfy_relations()?;
    let surj: Vec<(usize, usize)> = (1..=d).map(|k| g.surjectivity_at(k, k)).collect::<Result<_, _>>()?;
    let kernel = quotient::morphism_kernel_intersection(&[g.pi1.clone(), g.pi2.clone()], d)?;
    let ok = relations && surj.iter().all(|(a, b)| a == b) && kernel.dim() == 0;
    let r = Report::new(
        "glue-sphere",
        Verdict::from_bool(ok),
        format!(
            "tuples satisfy the relations {}, glued/covered dims {:?}, dim ker pi1 ∩ ker pi2 {}",
            relations,
            surj,
            kernel.dim()
        ),
        json!({ "tuples_satisfy_relations": relations, "surjectivity": surj, "kernel_intersection_dim": kernel.dim(), "bound": d }),
    );
    Ok(Outcome::one(r.timed(start)))
}

fn calculus_adapt(set: GeneratorSet, d: usize) -> Result<Outcome> {
    let start = Instant::now();
    let (forms, maps) = dga::sphere_calculus_maps(&Scalar::q())?;
    let mut gens = models::sphere_calculus_generators_deg1(&forms.ext);
    if let GeneratorSet::All = set {
        gens.extend(models::sphere_calculus_generators_deg2(&forms.ext));
    }
    let mut reports = Vec::new();
    for n in 0..=3u32 {
        let slack = if n < 2 { 0 } else { n as usize - 1 };
        reports.push(dga::adapted_ideal_report(&forms, &gens, &maps, n, d, slack, 7)?);
    }
    let mut text = String::new();
    for r in &reports {
        let _ = writeln!(
            text,
            "form degree {}: forms {}, ideal {}, kernel {}, equal {}",
            r.form_degree, r.dim_forms, r.dim_claimed, r.dim_kernel, r.equal
        );
    }
    let outside: std::collections::BTreeSet<&(String, String)> = reports.iter().flat_map(|r| &r.outside_kernel).collect();
    for (g, img) in &outside {
        let _ = writeln!(text, "not killed: {} -> {}", g, img);
    }
    let ok = reports.iter().all(|r| r.equal);
    let r = Report::new(
        "calculus-adapt",
        Verdict::from_bool(ok),
        format!("ideal = kernel per form degree {:?}", reports.iter().map(|r| r.equal).collect::<Vec<_>>()),
        to_json(&reports),
    );
    Ok(Outcome {
        reports: vec![r.timed(start)],
        text,
    })
}

fn calculus_verify(pres: &str, samples: usize, d: usize) -> Result<Outcome> {
    let start = Instant::now();
    let f = algfile::load(pres)?;
    if !f.has_differentials() {
        bail!("{} has no differential generators", f.name);
    }
    let base = f.base_presentation()?;
    let cal = Calculus::new(&base, &f.presentation(), 2).context("calculus invariants")?;
    let conf = cal.system.confluence_check(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sanity = dga::calculus_sanity(&cal, 3, samples, &mut rng)?;
    let mut ok = conf.confluent() && sanity.d_squared_failures == 0 && sanity.leibniz_failures == 0;
    let mut details = json!({ "confluence": to_json(&conf), "sanity": to_json(&sanity) });
    let mut summary = format!(
        "confluent to {} {}, d^2/Leibniz failures {}/{} of {}",
        d,
        conf.confluent(),
        sanity.d_squared_failures,
        sanity.leibniz_failures,
        samples
    );
    // the module-basis check applies to the one-generator disc calculus
    if base.alphabet.len() == 2 {
        let forms = UniversalForms::new(cal.base.clone());
        let mb = dga::module_basis_check(&forms, &cal, &Scalar::q(), d.min(3))?;
        ok &= mb.passed();
        let _ = write!(summary, ", module basis {}", mb.passed());
        details["module_basis"] = to_json(&mb);
    }
    Ok(Outcome::one(Report::new("calculus-verify", Verdict::from_bool(ok), summary, details).timed(start)))
}

fn interface(d: usize) -> Result<Outcome> {
    let start = Instant::now();
    let r = dga::interface_calculus(d.min(3), 0)?;
    let equal = dga::interface_contains_da(&Scalar::q(), &Scalar::q(), d)?;
    let distinct = dga::interface_contains_da(&Scalar::p(), &Scalar::q(), d)?;
    let ok = r.certificate_holds && r.direct_sum.iter().all(|c| c.holds) && !equal && distinct;
    let text = format!("{}\n", r.certificate);
    let rep = Report::new(
        "interface",
        Verdict::from_bool(ok),
        format!(
            "certificate {}, direct sums {:?}, da in interface for p = q {}, for p != q {}",
            r.certificate_holds,
            r.direct_sum.iter().map(|c| (c.form_degree, c.holds)).collect::<Vec<_>>(),
            equal,
            distinct
        ),
        json!({ "interface": to_json(&r), "equal_params": equal, "distinct_params": distinct }),
    );
    Ok(Outcome {
        reports: vec![rep.timed(start)],
        text,
    })
}

fn rep_verify(n: usize) -> Result<Outcome> {
    let mut reports = vec![acceptance::criterion(10)?, acceptance::criterion(11)?];
    let start = Instant::now();
    let c = rep::classical_circle_check(0.5, n, &[0.0, std::f64::consts::PI / 3.0, std::f64::consts::PI])?;
    let ok = c.max_point_error <= 1e-12 && c.max_relation_error <= 1e-12 && c.telescope_gap <= 1e-9 && c.norm_x <= 1.0 + 1e-12;
    reports.push(
        Report::new(
            "classical circle",
            Verdict::from_bool(ok),
            format!("point error {:.1e}, telescoped {:.12}, |pi(x)| = {:.12}", c.max_point_error, c.telescoped, c.norm_x),
            to_json(&c),
        )
        .timed(start),
    );
    Ok(Outcome {
        reports,
        text: String::new(),
    })
}

fn spectrum(kind: RepArg, p: f64, q: f64, theta: f64, n: usize, csv: bool) -> Result<Outcome> {
    let start = Instant::now();
    let kind = match kind {
        RepArg::Disc => bail!("the spectral table is defined for the sphere representations"),
        RepArg::Sphere1 => RepKind::Sphere1,
        RepArg::Sphere2 => RepKind::Sphere2,
        RepArg::Circle => RepKind::CirclePoint,
    };
    let r = rep::build_representation(kind, p, q, theta, n)?;
    let s = rep::spectral_report(&r);
    let mut text = String::new();
    let sep = if csv { "," } else { "\t" };
    let _ = writeln!(text, "{}", ["i", "f0_expected", "f0_computed", "radius_expected", "radius_computed"].join(sep));
    for row in &s.rows {
        let _ = writeln!(
            text,
            "{}{sep}{:.15}{sep}{:.15}{sep}{:.15}{sep}{:.15}",
            row.i,
            row.f0_expected,
            row.f0_computed,
            row.radius_expected,
            row.radius_computed,
            sep = sep
        );
    }
    let ok = s.max_error <= acceptance::SPECTRUM_TOL && s.off_diagonal <= 1e-14;
    let rep = Report::new(
        "spectrum",
        Verdict::from_bool(ok),
        format!("{} interior rows, max error {:.2e}, off-diagonal {:.2e}", s.rows.len(), s.max_error, s.off_diagonal),
        to_json(&s),
    );
    Ok(Outcome {
        reports: vec![rep.timed(start)],
        text,
    })
}

fn hopf_verify(d: usize) -> Result<Outcome> {
    if d == 4 {
        return Ok(Outcome::one(acceptance::criterion(12)?));
    }
    let start = Instant::now();
    let q = Scalar::q();
    let disc = models::disc_q();
    let act = ncglue::hopf::ModuleAction::disc(&disc.alphabet, "x")?;
    let rs = models::system(&disc);
    let g = build_sphere_gluing(&q, &q)?;
    let sa = ncglue::hopf::ModuleAction::sphere(&g.sphere.alphabet, &q, &q)?;
    let a1 = ncglue::hopf::module_axiom_check(&act, &rs, d)?;
    let a2 = ncglue::hopf::module_axiom_check(&sa, &g.sphere_rs, d)?;
    let forms = UniversalForms::new(Arc::new(rs));
    let dg = models::disc_calculus_generators(&forms.ext, "x", &q);
    let cov = ncglue::hopf::covariance_check_forms(&act, &forms, &dg, d, 0)?;
    let ok = a1.passed() && a2.passed() && cov.passed();
    let r = Report::new(
        "hopf-verify",
        Verdict::from_bool(ok),
        format!("module axioms disc {} sphere {}, disc covariance {}", a1.passed(), a2.passed(), cov.passed()),
        json!({ "axioms": [to_json(&a1), to_json(&a2)], "covariance": to_json(&cov) }),
    );
    Ok(Outcome::one(r.timed(start)))
}

fn accept_all(only: &[usize]) -> Result<Outcome> {
    let reports = if only.is_empty() {
        acceptance::run_all()?
    } else {
        only.iter().map(|&n| acceptance::criterion(n)).collect::<Result<_>>()?
    };
    Ok(Outcome {
        reports,
        text: String::new(),
    })
}
