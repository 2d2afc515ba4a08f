//! Parse a document, run its declared checks and print the JSON report.
use gencrf::cli::{parse, run};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/documents/s3_family.json").to_string());
    let doc = parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rep = run(&doc, "run", None, None).unwrap();
    println!("{}", rep.json());
}
