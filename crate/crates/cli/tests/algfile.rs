use ncglue::models;
use ncglue_cli::algfile::{load, parse_presentation, AlgFileError, BUNDLED};

#[test]
fn bundled_files_round_trip() {
    for (name, text) in BUNDLED {
        let f = parse_presentation(text).unwrap_or_else(|e| panic!("{}: {}", name, e));
        let again = parse_presentation(&f.print()).unwrap_or_else(|e| panic!("{} reprinted: {}", name, e));
        assert!(f == again, "{}", name);
        assert_eq!(f.print(), again.print());
    }
}

#[test]
fn bundled_algebras_match_the_built_in_models() {
    let cases = [
        ("disc_q.alg", models::disc_q(), 4),
        ("sphere.alg", models::sphere_pq(), 4),
        ("circle.alg", models::circle(), 4),
        ("counterexample2.alg", models::counterexample2(), 3),
    ];
    for (file, model, d) in cases {
        let f = load(file).unwrap();
        let from_file = models::system(&f.presentation());
        let built_in = models::system(&model);
        let show = |rs: &ncglue::rewrite::RewriteSystem| -> Vec<String> {
            rs.algebra_basis(d).iter().map(|w| w.display(rs.alphabet()).to_string()).collect()
        };
        assert_eq!(show(&from_file), show(&built_in), "{}", file);
        for r in &model.relations {
            let r = ncglue::parse::parse_element(&f.alphabet, &r.to_string()).unwrap();
            assert!(from_file.normal_form(&r).unwrap().is_zero(), "{}: {}", file, r);
        }
    }
}

#[test]
fn sections_are_read() {
    let f = load("sphere.alg").unwrap();
    assert_eq!(f.order, ["f1", "f0", "fm1"]);
    assert!(f.param("p").is_some() && f.param("q").is_some());
    assert_eq!(f.ideals.len(), 2);
    assert_eq!(f.morphisms.len(), 2);
    assert!(load("sphere_qq.alg").unwrap().action().is_some());
    assert_eq!(load("counterexample2.alg").unwrap().nilpotent, Some(3));
    let cal = load("disc_calculus.alg").unwrap();
    assert!(cal.has_differentials());
    assert!(!cal.base_presentation().unwrap().relations.is_empty());
}

#[test]
fn truncated_expression_is_an_error() {
    let text = "[generators]\nx 0 x*\nx* 0 x\n\n[relations]\nx -\n";
    match parse_presentation(text) {
        Err(AlgFileError::Element { line, .. }) | Err(AlgFileError::Syntax { line, .. }) => assert_eq!(line, 6),
        other => panic!("unexpected {:?}", other.map(|f| f.name)),
    }
}

#[test]
fn malformed_files() {
    let unknown = "[generators]\nx 0 x\n\n[relations]\nx y\n";
    assert!(matches!(parse_presentation(unknown), Err(AlgFileError::Element { line: 5, .. }) | Err(AlgFileError::UnknownGenerator { .. })));
    // a generator line declares its partner too, so `x 0 y` alone is fine
    assert!(parse_presentation("[generators]\nx 0 y\n").is_ok());
    let star = "[generators]\nx 0 y\ny 0 z\n";
    assert!(matches!(parse_presentation(star), Err(AlgFileError::StarMismatch { .. })));
    let no_section = "x 0 x\n";
    assert!(matches!(parse_presentation(no_section), Err(AlgFileError::Syntax { line: 1, .. })));
    let bad_section = "[nonsense]\n";
    assert!(matches!(parse_presentation(bad_section), Err(AlgFileError::Syntax { line: 1, .. })));
    let bad_degree = "[generators]\nx seven x\n";
    assert!(matches!(parse_presentation(bad_degree), Err(AlgFileError::Syntax { line: 2, .. })));
}

#[test]
fn missing_files_fall_back_only_to_bundled_names() {
    assert!(load("/nowhere/disc_q.alg").is_ok());
    assert!(load("/nowhere/other.alg").is_err());
}
