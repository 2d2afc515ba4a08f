#![allow(dead_code)]

use gencrf::algebroid::{standard_algebra, FramedAlgebra, Section};
use gencrf::linalg::Mat;
use gencrf::ring::{BracketConstants, JetRing, RingElem};
use gencrf::scalar::{rat, Scalar};
use gencrf::structures::{Framing, Sgf, Subbundle};
use rand::Rng;

pub fn lie(n: usize, kind: usize) -> BracketConstants {
    let one = rat(1, 1);
    match (n, kind % 3) {
        (3, 1) => BracketConstants::su2(2),
        (3, 2) => BracketConstants::from_upper(3, &[(0, 1, 2, one)]),
        (2, 1) | (2, 2) => BracketConstants::from_upper(2, &[(0, 1, 1, one)]),
        (4, 1) => BracketConstants::su2(2).direct_sum(&BracketConstants::zero(1)),
        (4, 2) => BracketConstants::from_upper(4, &[(0, 1, 2, one)]),
        _ => BracketConstants::zero(n),
    }
}

pub fn constant_algebra(c: &BracketConstants) -> FramedAlgebra {
    let ders: Vec<String> = (1..=c.dim()).map(|i| format!("D{i}")).collect();
    let d: Vec<&str> = ders.iter().map(|s| s.as_str()).collect();
    let ring = JetRing::with_names(&[], &d, c.clone(), 2).unwrap();
    standard_algebra(&ring, c).unwrap()
}

pub fn small(rng: &mut impl Rng) -> Scalar {
    Scalar::from_int(rng.gen_range(-2..=2))
}

/// Random real unimodular 2x2 matrix.
pub fn unimodular(rng: &mut impl Rng) -> Mat {
    let mut m = Mat::identity(2);
    for _ in 0..3 {
        let t = rng.gen_range(-2..=2);
        let e = if rng.gen_bool(0.5) { Mat::from_ints(&[&[1, t], &[0, 1]]) } else { Mat::from_ints(&[&[1, 0], &[t, 1]]) };
        m = m.mul(&e);
    }
    m
}

/// A random element of the orthogonal group of `span(X_p, X_q, a_p, a_q)`:
/// a GL lift followed by a B-field, given as images of the four frame
/// vectors.
pub fn random_orthogonal(a: &FramedAlgebra, p: usize, q: usize, rng: &mut impl Rng) -> Vec<Section> {
    let n = |s: String| a.named(&s).unwrap();
    let (xp, xq, ap, aq) = (n(format!("X{p}")), n(format!("X{q}")), n(format!("a{p}")), n(format!("a{q}")));
    let t = unimodular(rng);
    let tinv_t = t.inverse().unwrap().transpose();
    let b = RingElem::constant(small(rng));
    let comb = |m: &Mat, j: usize, u: &Section, v: &Section| u.mul(m.get(0, j)).add(&v.mul(m.get(1, j)));
    let x1 = comb(&t, 0, &xp, &xq);
    let x2 = comb(&t, 1, &xp, &xq);
    let y1 = comb(&tinv_t, 0, &ap, &aq);
    let y2 = comb(&tinv_t, 1, &ap, &aq);
    // X -> X + i_X B with B = b y1 ^ y2 in the new coframe.
    vec![x1.add(&y2.mul(&b)), x2.sub(&y1.mul(&b)), y1, y2]
}

/// Complex or symplectic type structure on `span(X_p, X_q, a_p, a_q)`
/// conjugated by a random orthogonal transformation.
pub fn random_sgf(a: &FramedAlgebra, p: usize, q: usize, rng: &mut impl Rng) -> Sgf {
    let f = random_orthogonal(a, p, q, rng);
    let images = if rng.gen_bool(0.5) {
        vec![f[1].clone(), f[0].neg(), f[3].clone(), f[2].neg()]
    } else {
        vec![f[3].clone(), f[2].neg(), f[1].clone(), f[0].neg()]
    };
    let e = Subbundle::new(a, f).unwrap();
    Sgf::from_images(a, e, &images).unwrap()
}

/// Frame vectors `X_i, a_i` for `i` in `idx`, with random boosts.
pub fn boosted_framing(a: &FramedAlgebra, idx: &[usize], rng: &mut impl Rng) -> Framing {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in idx {
        let t = Scalar::from_int(*[1, 2, -1, 3].get(rng.gen_range(0..4)).unwrap());
        xs.push(a.named(&format!("X{i}")).unwrap().scale(&t));
        ys.push(a.named(&format!("a{i}")).unwrap().scale(&t.inv().unwrap()));
    }
    xs.extend(ys);
    Framing::new(xs)
}

pub fn s(x: i64) -> Scalar {
    Scalar::from_int(x)
}
