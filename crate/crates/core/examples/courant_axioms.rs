//! Courant algebroid axioms on every catalog frame algebra, on frame
//! triples and on seeded random coefficient triples.
use gencrf::algebroid::validate;
use gencrf::catalog::{algebra, Ctx, ALGEBRAS};

fn main() {
    let ctx = Ctx::default();
    for name in ALGEBRAS {
        let a = algebra(name, &ctx).unwrap();
        let rep = validate(&a, 200, 7);
        println!("{name}: {} ({} frame instances, {} random triples)", if rep.passed() { "valid" } else { "INVALID" }, rep.frame_instances, rep.random_triples);
    }
}
