//! The acceptance suite: one report per numbered criterion.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use anyhow::Result;
use ncglue::dga::{self, Calculus, UniversalForms};
use ncglue::gluing::build_sphere_gluing;
use ncglue::hopf::{self, ModuleAction, Verdict as Membership};
use ncglue::linalg::Span;
use ncglue::models;
use ncglue::parse::parse_element;
use ncglue::quotient::{
    covering_completion_check, ideal_truncation_span, intersect_all, kernel_on_words, lattice_condition_check,
    morphism_kernel_intersection, Completion, FiniteDimAlgebra, Vector,
};
use ncglue::rep::{self, RepKind};
use ncglue::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::report::{json as to_json, Report, Verdict};

pub const RESIDUAL_TOL: f64 = 1e-12;
pub const SPECTRUM_TOL: f64 = 1e-12;
pub const FAITHFUL_TOL: f64 = 1e-9;
pub const PARAM_GRID: [f64; 3] = [0.3, 0.5, 0.7];
pub const RANDOM_FAMILIES: usize = 100;

pub fn criterion(n: usize) -> Result<Report> {
    let start = Instant::now();
    let r = match n {
        1 => c1_bases()?,
        2 => c2_kernel_intersection()?,
        3 => c3_kernel_generators()?,
        4 => c4_counterexample2()?,
        5 => c5_counterexample1()?,
        6 => c6_random_coverings(RANDOM_FAMILIES, 2024)?,
        7 => c7_adapted_calculus()?,
        8 => c8_interface()?,
        9 => c9_module_basis()?,
        10 => c10_representations()?,
        11 => c11_faithfulness()?,
        12 => c12_hopf()?,
        13 => c13_dga_sanity()?,
        _ => anyhow::bail!("no criterion {}", n),
    };
    Ok(r.timed(start))
}

/// All criteria in order, then the supplementary calculus check.
pub fn run_all() -> Result<Vec<Report>> {
    let mut out = Vec::new();
    for n in 1..=13 {
        out.push(criterion(n)?);
        if n == 7 {
            let start = Instant::now();
            out.push(first_order_calculus()?.timed(start));
        }
    }
    Ok(out)
}

fn c1_bases() -> Result<Report> {
    let disc = models::system(&models::disc_q());
    let sphere = models::system(&models::sphere_pq());
    let disc_dims: Vec<usize> = (1..=8).map(|d| disc.algebra_basis(d).len()).collect();
    let sphere_dims: Vec<usize> = (1..=6).map(|d| sphere.algebra_basis(d).len()).collect();
    let ok = disc_dims.iter().zip(1..).all(|(&n, d)| n == (d + 1) * (d + 2) / 2)
        && sphere_dims.iter().zip(1..).all(|(&n, d)| n == (d + 1) * (d + 1));
    Ok(Report::new(
        "1 filtered bases",
        Verdict::from_bool(ok),
        format!("disc {:?}, sphere {:?}", disc_dims, sphere_dims),
        json!({ "disc": disc_dims, "sphere": sphere_dims }),
    ))
}

fn c2_kernel_intersection() -> Result<Report> {
    let g = build_sphere_gluing(&Scalar::p(), &Scalar::q())?;
    let k = morphism_kernel_intersection(&[g.pi1.clone(), g.pi2.clone()], 5)?;
    Ok(Report::new(
        "2 ker pi1 ∩ ker pi2 at D = 5",
        Verdict::from_bool(k.dim() == 0),
        format!("dim {}", k.dim()),
        json!({ "bound": 5, "dim": k.dim() }),
    ))
}

/// Smallest slack at which the truncated ideal span reaches the kernel, up to `max_slack`.
fn kernel_vs_ideal(
    g: &ncglue::gluing::SphereGluing,
    which: usize,
    generator: &str,
    d: usize,
    max_slack: usize,
) -> Result<serde_json::Value> {
    let m = if which == 1 { &g.pi1 } else { &g.pi2 };
    let words = g.sphere_rs.algebra_basis(d);
    let kernel = kernel_on_words(std::slice::from_ref(m), &words, d)?;
    let gen = parse_element(&g.sphere.alphabet, generator)?;
    let mut result = json!({ "map": which, "generator": generator, "dim_kernel": kernel.dim(), "equal": false });
    for slack in 0..=max_slack {
        let span = ideal_truncation_span(&g.sphere_rs, std::slice::from_ref(&gen), d + slack)?.truncated(d);
        let equal = span.span.equals(&kernel.span);
        result["dim_ideal"] = json!(span.dim());
        result["slack"] = json!(slack);
        if equal {
            result["equal"] = json!(true);
            break;
        }
    }
    Ok(result)
}

fn c3_kernel_generators() -> Result<Report> {
    let g = build_sphere_gluing(&Scalar::p(), &Scalar::q())?;
    let k1 = kernel_vs_ideal(&g, 1, "f1 fm1 - f0", 4, 2)?;
    let k2 = kernel_vs_ideal(&g, 2, "1 - f0", 4, 2)?;
    let ok = k1["equal"] == json!(true) && k2["equal"] == json!(true);
    Ok(Report::new(
        "3 kernel generators at D = 4",
        Verdict::from_bool(ok),
        format!(
            "ker pi1 {} vs ideal {}, ker pi2 {} vs ideal {}",
            k1["dim_kernel"], k1["dim_ideal"], k2["dim_kernel"], k2["dim_ideal"]
        ),
        json!([k1, k2]),
    ))
}

/// An algebra with its rewriting system, basis words and ideals.
pub type ExampleCovering = (FiniteDimAlgebra, Arc<ncglue::rewrite::RewriteSystem>, Vec<ncglue::Word>, Vec<Span<usize, Scalar>>);

/// The finite-dimensional model of a bundled example and its ideals.
pub fn example_covering(
    p: &ncglue::rewrite::Presentation,
    gens: &[Vec<ncglue::Element>],
) -> Result<ExampleCovering> {
    let p = if p.nilpotent.is_some() { p.clone() } else { p.clone().with_nilpotent(3) };
    let (a, rs, words) = FiniteDimAlgebra::from_presentation(&p)?;
    let ideals = gens
        .iter()
        .map(|gs| {
            let vs: Vec<Vector> = gs
                .iter()
                .map(|g| ncglue::quotient::coordinates(&rs, &words, g))
                .collect::<Result<_, _>>()?;
            Ok(a.ideal(&vs))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((a, rs, words, ideals))
}

fn c4_counterexample2() -> Result<Report> {
    let p = models::counterexample2();
    let (a, rs, words, ideals) = example_covering(&p, &models::counterexample2_ideals(&p))?;
    let refs: Vec<&Span<usize, Scalar>> = ideals.iter().collect();
    let covering = intersect_all(&refs, a.dim()).dim() == 0;
    let report = covering_completion_check(&a, &ideals)?;
    let c = Completion::new(&a, &ideals);
    let el = |s: &str| -> Result<Vector> { Ok(ncglue::quotient::coordinates(&rs, &words, &parse_element(&p.alphabet, s)?)?) };
    let witness = c.tuple(&[el("x - y")?, el("x - y")?, el("x")?]);
    let compatible = c.is_compatible(&witness);
    let preimage = c.has_preimage(&witness);
    let lattice = lattice_condition_check(&a, &ideals);
    let all_fail = lattice.sequential.iter().chain(&lattice.symmetric).all(|i| !i.holds);
    let ok = covering
        && !report.complete
        && report.dim_algebra == 6
        && report.dim_completion == 7
        && compatible
        && !preimage
        && all_fail;
    Ok(Report::new(
        "4 second example",
        Verdict::from_bool(ok),
        format!(
            "covering {}, dim A {}, dim A_c {}, witness compatible {} with preimage {}, identities all fail {}",
            covering, report.dim_algebra, report.dim_completion, compatible, preimage, all_fail
        ),
        json!({ "completion": to_json(&report), "lattice": to_json(&lattice), "witness_compatible": compatible, "witness_has_preimage": preimage }),
    ))
}

fn c5_counterexample1() -> Result<Report> {
    let p = models::counterexample1();
    let (a, _, _, ideals) = example_covering(&p, &models::counterexample1_ideals(&p))?;
    let report = covering_completion_check(&a, &ideals)?;
    let lattice = lattice_condition_check(&a, &ideals);
    let all_fail = lattice.sequential.iter().chain(&lattice.symmetric).all(|i| !i.holds);
    let mut covering_pairs = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            if ideals[i].intersect(&ideals[j]).dim() == 0 {
                covering_pairs.push((i + 1, j + 1));
            }
        }
    }
    let ok = !report.complete && all_fail && !covering_pairs.is_empty();
    Ok(Report::new(
        "5 first example",
        Verdict::from_bool(ok),
        format!(
            "complete {}, dim A {}, dim A_c {}, identities all fail {}, two-ideal coverings {:?}",
            report.complete, report.dim_algebra, report.dim_completion, all_fail, covering_pairs
        ),
        json!({ "completion": to_json(&report), "lattice": to_json(&lattice), "covering_pairs": covering_pairs }),
    ))
}

// ---- random finite-dimensional algebras ----

fn unit_vec(i: usize) -> Vector {
    vec![(i, Scalar::one())]
}

/// `C[x_1..x_k]` modulo monomials of degree `n`.
fn truncated_polynomials(k: usize, n: usize) -> FiniteDimAlgebra {
    let mut monos: Vec<Vec<usize>> = vec![vec![0; k]];
    for deg in 1..n {
        let mut next = Vec::new();
        fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k - 1 {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
                return;
            }
            for e in (0..=left).rev() {
                cur.push(e);
                rec(k, left - e, cur, out);
                cur.pop();
            }
        }
        rec(k, deg, &mut Vec::new(), &mut next);
        monos.extend(next);
    }
    let index = |m: &[usize]| monos.iter().position(|x| x == m);
    let table = monos
        .iter()
        .map(|a| {
            monos
                .iter()
                .map(|b| {
                    let s: Vec<usize> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    index(&s).map(unit_vec).unwrap_or_default()
                })
                .collect()
        })
        .collect();
    let names = monos.iter().map(|m| format!("{:?}", m)).collect();
    FiniteDimAlgebra::from_table(&format!("C[x;{}]/m^{}", k, n), names, table, unit_vec(0))
}

/// Upper triangular `n x n` matrices on the units `E_ij`, `i <= j`.
fn upper_triangular(n: usize) -> FiniteDimAlgebra {
    let units: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let index = |u: (usize, usize)| units.iter().position(|&x| x == u).unwrap();
    let table = units
        .iter()
        .map(|&(i, j)| {
            units
                .iter()
                .map(|&(k, l)| if j == k { unit_vec(index((i, l))) } else { Vec::new() })
                .collect()
        })
        .collect();
    let unit = (0..n).map(|i| (index((i, i)), Scalar::one())).collect();
    let names = units.iter().map(|(i, j)| format!("E{}{}", i, j)).collect();
    FiniteDimAlgebra::from_table(&format!("T{}", n), names, table, unit)
}

fn direct_sum(a: &FiniteDimAlgebra, b: &FiniteDimAlgebra) -> FiniteDimAlgebra {
    let (m, n) = (a.dim(), b.dim());
    let mut table = vec![vec![Vec::new(); m + n]; m + n];
    for i in 0..m {
        for j in 0..m {
            table[i][j] = a.mul(&unit_vec(i), &unit_vec(j));
        }
    }
    for i in 0..n {
        for j in 0..n {
            table[m + i][m + j] = b.mul(&unit_vec(i), &unit_vec(j)).into_iter().map(|(k, c)| (m + k, c)).collect();
        }
    }
    let mut unit = a.unit();
    unit.extend(b.unit().into_iter().map(|(k, c)| (m + k, c)));
    let names = a.basis_names.iter().chain(&b.basis_names).cloned().collect();
    FiniteDimAlgebra::from_table(&format!("{}+{}", a.name, b.name), names, table, unit)
}

fn random_algebra<R: Rng>(rng: &mut R) -> FiniteDimAlgebra {
    let small = |rng: &mut R| match rng.gen_range(0..4) {
        0 => truncated_polynomials(1, 1),
        1 => truncated_polynomials(1, 2),
        2 => truncated_polynomials(1, 3),
        _ => upper_triangular(2),
    };
    match rng.gen_range(0..6) {
        0 => truncated_polynomials(2, 3),
        1 => truncated_polynomials(2, 2),
        2 => upper_triangular(3),
        3 => truncated_polynomials(1, rng.gen_range(2..=4)),
        4 => {
            let (a, b) = (small(rng), small(rng));
            direct_sum(&a, &b)
        }
        _ => {
            let (a, b, c) = (small(rng), small(rng), small(rng));
            direct_sum(&direct_sum(&a, &b), &c)
        }
    }
}

fn random_ideal<R: Rng>(a: &FiniteDimAlgebra, rng: &mut R) -> Span<usize, Scalar> {
    // half the time stay off the unit's support, where the interesting ideals live
    let unit: Vec<usize> = a.unit().iter().map(|(k, _)| *k).collect();
    let avoid_unit = rng.gen_bool(0.5);
    let gens: Vec<Vector> = (0..rng.gen_range(1..=2))
        .map(|_| {
            (0..a.dim())
                .filter(|k| !(avoid_unit && unit.contains(k)))
                .filter_map(|k| {
                    let c = if rng.gen_bool(0.4) { rng.gen_range(-2..=2) } else { 0 };
                    (c != 0).then(|| (k, Scalar::from_int(c)))
                })
                .collect()
        })
        .collect();
    a.ideal(&gens)
}

#[derive(Debug, Default, serde::Serialize)]
pub struct RandomCoveringStats {
    pub two_ideal_families: usize,
    pub two_ideal_incomplete: usize,
    pub three_ideal_families: usize,
    pub three_ideal_complete: usize,
    pub three_ideal_incomplete: usize,
    pub three_way_disagreements: usize,
    pub algebras: BTreeSet<String>,
    pub attempts: usize,
}

/// Samples random proper ideal families with zero intersection until `target` families of
/// each size are found.
pub fn random_covering_stats(target: usize, seed: u64) -> Result<RandomCoveringStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = RandomCoveringStats::default();
    while (st.two_ideal_families < target || st.three_ideal_families < target) && st.attempts < 200_000 {
        st.attempts += 1;
        let a = random_algebra(&mut rng);
        let m = if st.two_ideal_families < target && (st.three_ideal_families >= target || rng.gen_bool(0.5)) {
            2
        } else {
            3
        };
        let ideals: Vec<Span<usize, Scalar>> = (0..m).map(|_| random_ideal(&a, &mut rng)).collect();
        if ideals.iter().any(|j| j.dim() == 0 || j.dim() == a.dim()) {
            continue;
        }
        let refs: Vec<&Span<usize, Scalar>> = ideals.iter().collect();
        if intersect_all(&refs, a.dim()).dim() != 0 {
            continue;
        }
        st.algebras.insert(a.name.clone());
        if m == 2 {
            st.two_ideal_families += 1;
            if !covering_completion_check(&a, &ideals)?.complete {
                st.two_ideal_incomplete += 1;
            }
        } else {
            st.three_ideal_families += 1;
            let l = lattice_condition_check(&a, &ideals);
            match l.complete {
                Some(true) => st.three_ideal_complete += 1,
                _ => st.three_ideal_incomplete += 1,
            }
            if l.three_way_agreement != Some(true) {
                st.three_way_disagreements += 1;
            }
        }
    }
    Ok(st)
}

fn c6_random_coverings(target: usize, seed: u64) -> Result<Report> {
    let st = random_covering_stats(target, seed)?;
    let ok = st.two_ideal_families >= target
        && st.three_ideal_families >= target
        && st.two_ideal_incomplete == 0
        && st.three_way_disagreements == 0;
    Ok(Report::new(
        "6 random coverings",
        Verdict::from_bool(ok),
        format!(
            "{} two-ideal coverings ({} incomplete), {} three-ideal coverings ({} complete, {} incomplete, {} disagreements)",
            st.two_ideal_families,
            st.two_ideal_incomplete,
            st.three_ideal_families,
            st.three_ideal_complete,
            st.three_ideal_incomplete,
            st.three_way_disagreements
        ),
        to_json(&st),
    ))
}

/// Slack per form degree for the ideal span at `D = 4`.
const CALCULUS_SLACK: [usize; 4] = [0, 0, 1, 2];

fn calculus_reports(gens: &[ncglue::Element], forms: &UniversalForms, maps: &[dga::CalculusMorphism], d: usize) -> Result<Vec<dga::IdealEqualityReport>> {
    (0..=3u32)
        .map(|n| Ok(dga::adapted_ideal_report(forms, gens, maps, n, d, CALCULUS_SLACK[n as usize], 7)?))
        .collect()
}

fn summarize(reports: &[dga::IdealEqualityReport]) -> String {
    reports
        .iter()
        .map(|r| format!("n={}: {}/{}/{}", r.form_degree, r.dim_claimed, r.dim_kernel, r.dim_forms))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Degree 0 must be zero and degree 3 full; degrees 1, 2 must match the kernel.
fn calculus_verdict(reports: &[dga::IdealEqualityReport]) -> bool {
    reports.iter().all(|r| r.equal)
        && reports[0].dim_kernel == 0
        && reports[3].dim_kernel == reports[3].dim_forms
}

fn c7_adapted_calculus() -> Result<Report> {
    let (forms, maps) = dga::sphere_calculus_maps(&Scalar::q())?;
    let mut gens = models::sphere_calculus_generators_deg1(&forms.ext);
    gens.extend(models::sphere_calculus_generators_deg2(&forms.ext));
    let reports = calculus_reports(&gens, &forms, &maps, 4)?;
    let outside: BTreeSet<String> = reports.iter().flat_map(|r| r.outside_kernel.iter().map(|(g, _)| g.clone())).collect();
    let ok = calculus_verdict(&reports);
    Ok(Report::new(
        "7 adapted calculus ideal at D = 4",
        Verdict::from_bool(ok),
        format!("claimed/kernel/forms {}; generators not killed by the projections: {}", summarize(&reports), outside.len()),
        json!({ "reports": to_json(&reports), "outside_kernel": outside }),
    ))
}

/// The first-order generators alone, with their differential closure.
pub fn first_order_calculus() -> Result<Report> {
    let (forms, maps) = dga::sphere_calculus_maps(&Scalar::q())?;
    let gens = models::sphere_calculus_generators_deg1(&forms.ext);
    let reports = calculus_reports(&gens, &forms, &maps, 4)?;
    let second = models::sphere_calculus_generators_deg2(&forms.ext);
    let gvecs: Vec<_> = gens.iter().map(|g| forms.from_element(g)).collect::<Result<_, _>>()?;
    let span2 = dga::differential_ideal_span(&forms, &gvecs, 2, 4, CALCULUS_SLACK[2], Some(&dga::random_point(7)))?;
    let contained: Vec<bool> = second.iter().map(|g| Ok(span2.contains(&forms.from_element(g)?))).collect::<Result<_>>()?;
    let ok = calculus_verdict(&reports);
    Ok(Report::new(
        "7' first-order generators with differential closure",
        Verdict::from_bool(ok),
        format!("claimed/kernel/forms {}; second-order generators in the ideal {:?}", summarize(&reports), contained),
        json!({ "reports": to_json(&reports), "second_order_contained": contained }),
    ))
}

fn c8_interface() -> Result<Report> {
    let r = dga::interface_calculus(3, 0)?;
    let equal_params = dga::interface_contains_da(&Scalar::q(), &Scalar::q(), 4)?;
    let distinct_params = dga::interface_contains_da(&Scalar::p(), &Scalar::q(), 4)?;
    let ok = r.certificate_holds && r.direct_sum.iter().all(|c| c.holds) && !equal_params;
    Ok(Report::new(
        "8 interface degeneration",
        Verdict::from_bool(ok),
        format!(
            "certificate {}, direct sum {:?}, da in interface: p = q {}, p != q {}",
            r.certificate_holds,
            r.direct_sum.iter().map(|c| c.holds).collect::<Vec<_>>(),
            equal_params,
            distinct_params
        ),
        json!({ "interface": to_json(&r), "da_in_interface_equal_params": equal_params, "da_in_interface_distinct_params": distinct_params }),
    ))
}

fn c9_module_basis() -> Result<Report> {
    let q = Scalar::q();
    let cal = Calculus::disc("x", &q)?;
    let forms = UniversalForms::new(cal.base.clone());
    let r = dga::module_basis_check(&forms, &cal, &q, 3)?;
    Ok(Report::new(
        "9 module basis of the disc calculus",
        Verdict::from_bool(r.passed()),
        format!(
            "P1 {}/{} zero, P2 {}/{} zero, degree-two relations {}",
            r.p1_checked - r.p1_failures,
            r.p1_checked,
            r.p2_checked - r.p2_failures,
            r.p2_checked,
            r.degree_two_relations
        ),
        to_json(&r),
    ))
}

fn c10_representations() -> Result<Report> {
    let sphere = models::sphere_pq();
    let disc = models::disc_q();
    let mut rows = Vec::new();
    let (mut worst_res, mut worst_spec) = (0.0f64, 0.0f64);
    for &p in &PARAM_GRID {
        for &q in &PARAM_GRID {
            for kind in [RepKind::Sphere1, RepKind::Sphere2] {
                let r = rep::build_representation(kind, p, q, 0.0, 64)?;
                let res = rep::relation_residuals(&sphere, &r)?;
                let spec = rep::spectral_report(&r);
                worst_res = worst_res.max(res.max);
                worst_spec = worst_spec.max(spec.max_error);
                rows.push(json!({ "kind": kind, "p": p, "q": q, "residual": res.max, "spectrum": spec.max_error }));
            }
        }
        let r = rep::build_representation(RepKind::Disc, p, p, 0.0, 64)?;
        let res = rep::relation_residuals(&disc, &r)?;
        worst_res = worst_res.max(res.max);
        rows.push(json!({ "kind": RepKind::Disc, "q": p, "residual": res.max }));
    }
    for theta in [0.0, std::f64::consts::PI / 3.0, std::f64::consts::PI] {
        let r = rep::build_representation(RepKind::CirclePoint, 0.5, 0.5, theta, 1)?;
        let res = rep::relation_residuals(&sphere, &r)?;
        worst_res = worst_res.max(res.max);
        rows.push(json!({ "kind": RepKind::CirclePoint, "theta": theta, "residual": res.max }));
    }
    let ok = worst_res <= RESIDUAL_TOL && worst_spec <= SPECTRUM_TOL;
    Ok(Report::new(
        "10 truncated representations, N = 64",
        Verdict::from_bool(ok),
        format!("max residual {:.2e}, max spectral error {:.2e}", worst_res, worst_spec),
        json!({ "rows": rows, "residual_tol": RESIDUAL_TOL, "spectrum_tol": SPECTRUM_TOL }),
    ))
}

fn c11_faithfulness() -> Result<Report> {
    let rs = models::system(&models::sphere_pq());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut worst, mut failures) = (0.0f64, 0);
    for _ in 0..50 {
        let e = rep::random_sphere_element(&rs, 3, 6, &mut rng);
        let f = rep::faithfulness_probe(&rs, &e, 0.5, 0.3, 48, FAITHFUL_TOL)?;
        worst = worst.max(f.max_error);
        failures += usize::from(!f.success);
    }
    Ok(Report::new(
        "11 coefficient recovery through rho1 + rho2",
        Verdict::from_bool(failures == 0),
        format!("50 elements, {} failures, max error {:.2e}", failures, worst),
        json!({ "samples": 50, "failures": failures, "max_error": worst, "tol": FAITHFUL_TOL }),
    ))
}

fn c12_hopf() -> Result<Report> {
    let q = Scalar::q();
    let g = build_sphere_gluing(&q, &q)?;
    let disc = models::disc_q();
    let disc_rs = models::system(&disc);
    let act_disc = ModuleAction::disc(&disc.alphabet, "x")?;
    let act_sphere = ModuleAction::sphere(&g.sphere.alphabet, &q, &q)?;
    let cal = Calculus::disc("x", &q)?;
    let axioms = [
        hopf::module_axiom_check(&act_disc, &disc_rs, 4)?,
        hopf::module_axiom_check(&act_disc, &cal.system, 4)?,
        hopf::module_axiom_check(&act_sphere, &g.sphere_rs, 4)?,
    ];
    let d_equivariant = hopf::d_equivariance(&act_disc, &cal.system, 4)?;
    let disc_forms = UniversalForms::new(Arc::new(disc_rs));
    let dg = models::disc_calculus_generators(&disc_forms.ext, "x", &q);
    let cov_disc = hopf::covariance_check_forms(&act_disc, &disc_forms, &dg, 4, 0)?;
    let (sphere_forms, maps) = dga::sphere_calculus_maps(&q)?;
    let mut sg = models::sphere_calculus_generators_deg1(&sphere_forms.ext);
    sg.extend(models::sphere_calculus_generators_deg2(&sphere_forms.ext));
    let cov_sphere = hopf::covariance_check_forms(&act_sphere, &sphere_forms, &sg, 4, 1)?;
    let ax = ModuleAction::disc(g.disc_p.alphabet(), "x")?;
    let ay = ModuleAction::disc(g.disc_q.alphabet(), "y")?;
    let i1 = hopf::intertwining(&act_sphere, &ax, &g.pi1, Some(&maps[0]))?;
    let i2 = hopf::intertwining(&act_sphere, &ay, &g.pi2, Some(&maps[1]))?;
    let inconclusive = cov_disc
        .entries
        .iter()
        .chain(&cov_sphere.entries)
        .filter(|e| e.verdict != Membership::Member)
        .count();
    let ok = axioms.iter().all(|a| a.passed())
        && d_equivariant
        && cov_disc.passed()
        && cov_sphere.passed()
        && i1.failures.is_empty()
        && i2.failures.is_empty();
    Ok(Report::new(
        "12 Hopf covariance",
        Verdict::from_bool(ok),
        format!(
            "module axioms {:?}, d-equivariant {}, covariance disc {} sphere {} ({} entries, {} not certified), intertwining {} {}",
            axioms.iter().map(|a| a.passed()).collect::<Vec<_>>(),
            d_equivariant,
            cov_disc.passed(),
            cov_sphere.passed(),
            cov_disc.entries.len() + cov_sphere.entries.len(),
            inconclusive,
            i1.failures.is_empty(),
            i2.failures.is_empty()
        ),
        json!({ "axioms": to_json(&axioms), "covariance_disc": to_json(&cov_disc), "covariance_sphere": to_json(&cov_sphere), "intertwining": [to_json(&i1), to_json(&i2)] }),
    ))
}

fn c13_dga_sanity() -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let disc = UniversalForms::new(Arc::new(models::system(&models::disc_q())));
    let sphere = UniversalForms::new(Arc::new(models::system(&models::sphere_qq())));
    let cal = Calculus::disc("x", &Scalar::q())?;
    let reports = [
        ("universal forms, disc", dga::universal_sanity(&disc, 3, 100, &mut rng)?),
        ("universal forms, sphere", dga::universal_sanity(&sphere, 3, 100, &mut rng)?),
        ("disc calculus", dga::calculus_sanity(&cal, 3, 100, &mut rng)?),
    ];
    let ok = reports.iter().all(|(_, r)| r.d_squared_failures == 0 && r.leibniz_failures == 0);
    Ok(Report::new(
        "13 d^2 = 0 and graded Leibniz",
        Verdict::from_bool(ok),
        reports
            .iter()
            .map(|(n, r)| format!("{}: {} samples, {} + {} failures", n, r.samples, r.d_squared_failures, r.leibniz_failures))
            .collect::<Vec<_>>()
            .join("; "),
        json!(reports.iter().map(|(n, r)| json!({ "name": n, "report": to_json(r) })).collect::<Vec<_>>()),
    ))
}
