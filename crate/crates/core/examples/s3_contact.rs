//! The rank 1 contact datum (span(X2, X3), x1) on S^3: contact iff
//! Y1(h) = 0, normal contact iff dbar(h) = Y1(h) = 0.
use gencrf::catalog::{s3_model, Ctx, HMode};
use gencrf::contact::{contact_check, normal_contact_check};

fn main() {
    for h in [HMode::Symbolic, HMode::Y1, HMode::Integrable] {
        let m = s3_model(&Ctx::default(), h).unwrap();
        let a = &m.algebra;
        let d = m.contact().unwrap();
        let c = contact_check(a, &d).unwrap();
        let n = normal_contact_check(a, &m.j, &d).unwrap();
        println!("h {}: contact {}, normal contact {}", h.name(), c.valid(), n.normal());
        for g in n.obstructions() {
            println!("  obstruction {}", a.ring().format(&g));
        }
    }
}
