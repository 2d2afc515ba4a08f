//! Exact linear algebra over the coefficient ring: inertia of a split Gram
//! matrix, an exact kernel and a determinant with symbolic entries.
use gencrf::linalg::{kernel, signature, Mat};
use gencrf::ring::{BracketConstants, JetRing};

fn main() {
    let g = Mat::from_ints(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 2, 0], &[0, 0, 0, -2]]);
    println!("signature: {}", signature(&g).unwrap());

    let r = JetRing::with_names(&["f"], &["D1"], BracketConstants::zero(1), 2).unwrap();
    let f = r.gen(0);
    let one = gencrf::ring::RingElem::one();
    let a = Mat::from_rows(vec![vec![one.clone(), f.clone()], vec![f.clone(), &f * &f]]);
    println!("det = {}", r.format(&a.det()));
    for v in kernel(&a).unwrap() {
        let s: Vec<String> = v.iter().map(|x| r.format(x)).collect();
        println!("kernel vector: ({})", s.join(", "));
    }
}
