use gencrf::catalog::{s3_model, Ctx, HMode};
use gencrf::cli::{self, CliError, Object};
use std::path::PathBuf;
use std::process::Command;

fn doc_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("documents").join(name)
}

fn doc_text(name: &str) -> String {
    std::fs::read_to_string(doc_path(name)).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gencrf"))
}

#[test]
fn syntax_errors_carry_positions() {
    match cli::parse("{\n  \"rings\": [\n    {\"name\": \"R\",,}\n") {
        Err(CliError::Syntax { line, column, .. }) => {
            assert_eq!(line, 3);
            assert!(column > 0);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unknown_keys_are_rejected() {
    assert!(matches!(cli::parse("{\"rings\": [], \"bogus\": 1}"), Err(CliError::UnknownKey { line: 1, .. })));
    let text = doc_text("s3_family.json").replacen("\"order\": 3", "\"order\": 3, \"colour\": 1", 1);
    assert!(matches!(cli::parse(&text), Err(CliError::UnknownKey { .. })));
}

#[test]
fn redeclaration_is_an_unresolved_name() {
    let mut v: serde_json::Value = serde_json::from_str(&doc_text("s3_family.json")).unwrap();
    let first = v["sections"][0].clone();
    v["sections"].as_array_mut().unwrap().push(first);
    let doc = cli::parse(&v.to_string()).unwrap();
    match cli::resolve(&doc, None) {
        Err(CliError::UnresolvedName(m)) => assert!(m.contains("declared twice"), "{m}"),
        other => panic!("unexpected {:?}", other.map(|_| ())),
    }
}

#[test]
fn unresolved_targets_are_reported() {
    let doc = cli::parse("{\"checks\": [{\"command\": \"check-crf\", \"target\": \"nope\"}]}").unwrap();
    assert!(matches!(cli::run(&doc, "run", None, None), Err(CliError::UnresolvedName(_))));
}

#[test]
fn documents_round_trip_through_text() {
    for name in ["s3_family.json", "s3_zero.json", "abelian_minimal.json", "s3xs3_hermitian.json"] {
        let doc = cli::parse(&doc_text(name)).unwrap();
        let again = cli::parse(&cli::to_text(&doc)).unwrap();
        assert_eq!(doc, again, "{name}");
    }
}

#[test]
fn reports_are_deterministic() {
    let doc = cli::parse(&doc_text("s3_family.json")).unwrap();
    let a = cli::run(&doc, "run", None, None).unwrap();
    let b = cli::run(&doc, "run", None, None).unwrap();
    assert_eq!(a.json(), b.json());
    assert_eq!(a.human(), b.human());
}

#[test]
fn s3_document_matches_the_catalog_model() {
    let doc = cli::parse(&doc_text("s3_family.json")).unwrap();
    let env = cli::resolve(&doc, None).unwrap();
    let m = s3_model(&Ctx::default(), HMode::Symbolic).unwrap();
    assert_eq!(env.algebra("S3").unwrap().ring().constants(), m.algebra.ring().constants());
    for (k, name) in ["x1", "x2", "x3"].iter().enumerate() {
        assert_eq!(env.sections[*name].1, m.x[k], "{name}");
    }
    let Object::Sgf(j) = env.object("J").unwrap().1 else { panic!("J is not an sgf") };
    assert_eq!(j.e.gens(), m.e.gens());
    assert_eq!(j.matrix(), m.j.matrix());
}

#[test]
fn s3_document_verdicts() {
    let doc = cli::parse(&doc_text("s3_family.json")).unwrap();
    let rep = cli::run(&doc, "run", None, None).unwrap();
    assert!(!rep.has_errors());
    let by = |c: &str| rep.records.iter().find(|r| r.command == c).unwrap();
    assert_eq!(by("validate-algebra").verdict, Some(true));
    assert_eq!(by("check-sgf").verdict, Some(true));
    assert_eq!(by("check-crf").verdict, Some(false));
    assert_eq!(by("check-crf").obstructions, vec!["D3(f3) - D2(f2)", "D2(f3) + D3(f2)"]);
    assert_eq!(by("check-crf").max_jet_order, 1);
    assert_eq!(by("check-normal-pair").verdict, Some(false));
    assert_eq!(by("check-contact").verdict, Some(false));
    let zero = cli::run(&cli::parse(&doc_text("s3_zero.json")).unwrap(), "run", None, None).unwrap();
    assert!(!zero.has_errors());
    assert!(zero.records.iter().all(|r| r.verdict == Some(true)), "{}", zero.human());
}

#[test]
fn obstructions_command_labels_brackets() {
    let doc = cli::parse(&doc_text("s3_family.json")).unwrap();
    let rep = cli::run(&doc, "obstructions", Some("J"), None).unwrap();
    assert_eq!(rep.records.len(), 1);
    let r = &rep.records[0];
    assert_eq!(r.verdict, Some(false));
    assert!(r.obstructions.iter().any(|o| o.starts_with("[l1, l2] outside E")), "{:?}", r.obstructions);
}

#[test]
fn hermitian_document_concludes_bly() {
    let doc = cli::parse(&doc_text("s3xs3_hermitian.json")).unwrap();
    let rep = cli::run(&doc, "run", None, None).unwrap();
    assert!(!rep.has_errors(), "{}", rep.human());
    assert!(rep.records.iter().any(|r| r.command == "check-bly"));
    assert!(rep.records.iter().all(|r| r.verdict == Some(true)), "{}", rep.human());
}

#[test]
fn catalog_command_matches_the_corpus() {
    let rep = cli::run_catalog(Some("s3_family"), &["h=zero".into()], None).unwrap();
    assert_eq!(rep.records.len(), 1);
    assert_eq!(rep.records[0].verdict, Some(true));
    assert!(cli::run_catalog(Some("no_such_entry"), &[], None).is_err());
}

#[test]
fn binary_exit_codes() {
    let ok = bin().args(["run", doc_path("s3_family.json").to_str().unwrap(), "--format", "json"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 6);

    let bad = bin().args(["run", "/nonexistent/doc.json"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));

    let wrong = bin().args(["check-bly", doc_path("s3_family.json").to_str().unwrap(), "--target", "C"]).output().unwrap();
    assert_eq!(wrong.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&wrong.stdout).contains("expects a target of kind hermitian"));

    let cat = bin().args(["catalog", "--entry", "torus_gcs", "--format", "json"]).output().unwrap();
    assert_eq!(cat.status.code(), Some(0));
}

#[test]
fn jet_order_override() {
    let doc = cli::parse(&doc_text("s3_family.json")).unwrap();
    let rep = cli::run(&doc, "check-crf", Some("J"), Some(2)).unwrap();
    assert_eq!(rep.records[0].obstructions, vec!["D3(f3) - D2(f2)", "D2(f3) + D3(f2)"]);
}
