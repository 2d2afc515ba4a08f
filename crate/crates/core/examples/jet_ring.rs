//! Jets on a Lie group: derivations commute up to the structure constants,
//! and relations are imposed by substitution.
use gencrf::ring::{BracketConstants, JetRing};
use gencrf::scalar::Scalar;

fn main() {
    let r = JetRing::with_names(&["h"], &["D1", "D2", "D3"], BracketConstants::su2(2), 3).unwrap();
    let h = r.gen(0);
    let d12 = r.derive(&r.derive(&h, 1), 0);
    let d21 = r.derive(&r.derive(&h, 0), 1);
    println!("D1(D2(h)) = {}", r.format(&d12));
    println!("D2(D1(h)) = {}", r.format(&d21));
    println!("[D1, D2] h = {}", r.format(&(&d12 - &d21)));

    // Impose D1(h) = 2h and bring a second-order jet to normal form.
    let rel = &r.jet(0, &[0]) - &h.scale(&Scalar::from_int(2));
    let q = r.with_relations(&[rel]).unwrap();
    let x = q.derive(&q.derive(&q.gen(0), 1), 0);
    println!("with D1(h) = 2h: D1(D2(h)) = {}", q.format(&x));
}
