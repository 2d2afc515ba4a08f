mod common;

use common::*;
use gencrf::algebroid::{random_coefficient, standard_algebra, FramedAlgebra, Section};
use gencrf::catalog::{s3_model, Ctx, HMode};
use gencrf::contact::contact_derived;
use gencrf::linalg::{gram_project, inertia, signature, Mat};
use gencrf::morimoto::{canonical_triple, gl_lift, is_orthogonal, sigma_action};
use gencrf::ring::{BracketConstants, JetRing, RingElem};
use gencrf::scalar::Scalar;
use gencrf::structures::{crf_obstructions, normal_pair_check, Framing};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn jet_ring(kind: usize) -> JetRing {
    let c = if kind % 2 == 1 { BracketConstants::su2(2) } else { BracketConstants::zero(3) };
    JetRing::with_names(&["f", "g"], &["D1", "D2", "D3"], c, 3).unwrap()
}

fn torus() -> FramedAlgebra {
    let r = JetRing::with_names(&["f", "g"], &["D1", "D2", "D3"], BracketConstants::zero(3), 4).unwrap();
    standard_algebra(&r, &BracketConstants::zero(3)).unwrap()
}

/// Cartan formula on the flat torus: `[X + xi, Y + eta] = [X, Y] + L_X eta - i_Y d xi`,
/// with sections in coordinates `(u_1..u_n, alpha_1..alpha_n)`.
fn cartan_dorfman(r: &JetRing, x: &Section, y: &Section, n: usize) -> Section {
    let d = |f: &RingElem, i: usize| r.derive(f, i);
    let (u, al) = (&x.0[..n], &x.0[n..]);
    let (v, be) = (&y.0[..n], &y.0[n..]);
    let mut out = vec![RingElem::zero(); 2 * n];
    for k in 0..n {
        for i in 0..n {
            out[k] = &out[k] + &(&(&u[i] * &d(&v[k], i)) - &(&v[i] * &d(&u[k], i)));
            let lie = &(&u[i] * &d(&be[k], i)) + &(&be[i] * &d(&u[i], k));
            let ctr = &v[i] * &(&d(&al[k], i) - &d(&al[i], k));
            out[n + k] = &out[n + k] + &(&lie - &ctr);
        }
    }
    Section(out.iter().map(|c| r.reduce(c)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn leibniz(seed in any::<u64>(), kind in 0usize..2, a in 0usize..3) {
        let r = jet_ring(kind);
        let mut g = rng(seed);
        let f = random_coefficient(&r, &mut g, 2);
        let h = random_coefficient(&r, &mut g, 2);
        let lhs = r.derive(&(&f * &h), a);
        let rhs = &(&r.derive(&f, a) * &h) + &(&f * &r.derive(&h, a));
        prop_assert_eq!(r.reduce(&lhs), r.reduce(&rhs));
    }

    #[test]
    fn derivations_commute_on_the_torus(seed in any::<u64>(), a in 0usize..3, b in 0usize..3) {
        let r = jet_ring(0);
        let f = random_coefficient(&r, &mut rng(seed), 2);
        prop_assert_eq!(r.derive(&r.derive(&f, a), b), r.derive(&r.derive(&f, b), a));
    }

    #[test]
    fn dorfman_matches_cartan_formula(seed in any::<u64>()) {
        let a = torus();
        let mut g = rng(seed);
        let x = a.random_section(&mut g, 1);
        let y = a.random_section(&mut g, 1);
        prop_assert_eq!(a.dorfman(&x, &y).unwrap(), cartan_dorfman(a.ring(), &x, &y, 3));
    }

    #[test]
    fn signature_is_a_congruence_invariant(seed in any::<u64>(), n in 2usize..5) {
        let mut g = rng(seed);
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = RingElem::int(g.gen_range(-3..=3));
                m.set(i, j, v.clone());
                m.set(j, i, v);
            }
        }
        let p = Mat::from_rows((0..n).map(|_| (0..n).map(|_| RingElem::int(g.gen_range(-2..=2))).collect()).collect());
        prop_assume!(!p.det().is_zero());
        let q = p.transpose().mul(&m).mul(&p);
        prop_assert_eq!(inertia(&m).unwrap(), inertia(&q).unwrap());
        prop_assert_eq!(signature(&m).unwrap(), signature(&q).unwrap());
    }

    #[test]
    fn gram_projection_is_idempotent(seed in any::<u64>()) {
        let a = constant_algebra(&BracketConstants::su2(2));
        let mut g = rng(seed);
        let j = random_sgf(&a, 2, 3, &mut g);
        let x = a.random_section(&mut g, 0);
        let e: Vec<Vec<RingElem>> = j.e.gens().iter().map(|s| s.0.clone()).collect();
        let (_, comp, residual) = gram_project(&e, a.gram(), &x.0).unwrap();
        let (_, comp2, residual2) = gram_project(&e, a.gram(), &comp).unwrap();
        for v in j.e.gens() {
            let r = Section(residual.clone());
            prop_assert!(a.inner(&r, v).unwrap().is_zero());
        }
        prop_assert_eq!(&comp2, &comp);
        prop_assert!(residual2.iter().all(|c| c.is_zero()));
        let sum: Vec<RingElem> = comp.iter().zip(&residual).map(|(p, q)| p + q).collect();
        prop_assert_eq!(sum, x.0);
    }

    #[test]
    fn sgf_squares_to_minus_one(seed in any::<u64>(), kind in 0usize..3) {
        let a = constant_algebra(&lie(3, kind));
        let mut g = rng(seed);
        let j = random_sgf(&a, 1, 2, &mut g);
        prop_assert!(j.check(&a).unwrap().passed());
        for x in j.e.gens() {
            let jj = j.apply(&a, &j.apply(&a, x).unwrap()).unwrap();
            prop_assert_eq!(jj, x.neg());
            prop_assert_eq!(a.inner(&j.apply(&a, x).unwrap(), x).unwrap(), RingElem::zero());
        }
        let phi = j.phi(&a).unwrap();
        let cube = phi.compose(&phi).compose(&phi);
        prop_assert!(cube.0.add(&phi.0).is_zero());
    }

    #[test]
    fn crf_equals_brute_force_closure(seed in any::<u64>(), n in 2usize..5, kind in 0usize..3) {
        let a = constant_algebra(&lie(n, kind));
        let mut g = rng(seed);
        let j = random_sgf(&a, 1, 2, &mut g);
        let l = j.eigenbundle(&a).unwrap();
        let mut closed = true;
        for x in l.gens() {
            for y in l.gens() {
                closed &= l.contains_by_solve(&a, &a.dorfman(x, y).unwrap()).unwrap();
            }
        }
        prop_assert_eq!(crf_obstructions(&a, &j).unwrap().crf(), closed);
    }

    #[test]
    fn normality_conditions_agree_for_crf(seed in any::<u64>(), kind in 0usize..3) {
        let a = constant_algebra(&lie(4, kind));
        let mut g = rng(seed);
        let j = random_sgf(&a, 1, 2, &mut g);
        let v = boosted_framing(&a, &[3, 4], &mut g);
        let ep = v.as_subbundle(&a).unwrap();
        let rep = normal_pair_check(&a, &j, &ep, &v).unwrap();
        prop_assert!(!rep.crf || rep.conditions_agree());
        prop_assert_eq!(rep.simplified.is_some(), true);
    }

    #[test]
    fn sigma_action_is_a_group_action(seed in any::<u64>()) {
        let a = constant_algebra(&BracketConstants::zero(4));
        let v1 = Framing::named(&a, &["X1", "X2", "a1", "a2"]).unwrap();
        let v2 = Framing::named(&a, &["X3", "X4", "a3", "a4"]).unwrap();
        let t = canonical_triple(&a, &v1, &v2).unwrap();
        let g = t.e1p.gram().clone();
        let mut r = rng(seed);
        let r1 = gl_lift(&unimodular(&mut r)).unwrap();
        let r2 = gl_lift(&unimodular(&mut r)).unwrap();
        prop_assert!(is_orthogonal(&g, &r1) && is_orthogonal(&g, &r2));
        let moved = sigma_action(&a, &t, &r1, &r2).unwrap();
        prop_assert!(moved.psi.check(&a).unwrap().passed());
        let back = sigma_action(&a, &moved, &r1.inverse().unwrap(), &r2.inverse().unwrap()).unwrap();
        prop_assert_eq!(back.psi.matrix(), t.psi.matrix());
        prop_assert_eq!(back.phi, t.phi);
    }
}

#[test]
fn boosted_framings_are_split() {
    let a = constant_algebra(&BracketConstants::zero(3));
    let v = boosted_framing(&a, &[1, 3], &mut rng(1));
    let s = v.as_subbundle(&a).unwrap();
    assert!(s.split_check().unwrap().split);
}

/// The contact lemma's isotropy of `L_V(L)` holds at `h = 0` only.
#[test]
fn lemma_isotropy_restricted_to_h_zero() {
    let ctx = Ctx::default();
    let z = s3_model(&ctx, HMode::Zero).unwrap();
    let dz = contact_derived(&z.algebra, &z.contact().unwrap()).unwrap();
    assert!(dz.isotropic && dz.in_e && dz.w_normalizes);
    let y = s3_model(&ctx, HMode::Y1).unwrap();
    let dy = contact_derived(&y.algebra, &y.contact().unwrap()).unwrap();
    assert!(dy.w_normalizes);
    assert!(!dy.isotropic);
    let w = s3_model(&ctx, HMode::Integrable).unwrap();
    let dw = contact_derived(&w.algebra, &w.contact().unwrap()).unwrap();
    assert!(!dw.isotropic);
    let r = w.algebra.ring();
    let p = &dw.pairings;
    assert!(p.get(0, 1).is_zero() && p.get(1, 0).is_zero() && p.get(0, 0) == p.get(1, 1));
    // -2 D2(f3), written in the reduced normal form
    assert_eq!(r.format(p.get(0, 0)), "2*D3(f2)");
}

#[test]
fn scalar_inverse() {
    let z = Scalar::complex(gencrf::scalar::rat(2, 1), gencrf::scalar::rat(-3, 1));
    assert_eq!(&z * &z.inv().unwrap(), Scalar::one());
    assert!(Scalar::zero().inv().is_none());
}

#[test]
fn s3_relation_systems_are_complete() {
    for h in [HMode::Holomorphic, HMode::Y1, HMode::Integrable] {
        let m = s3_model(&Ctx::default(), h).unwrap();
        assert!(m.algebra.ring().integrability_defects().is_empty(), "{}", h.name());
        assert!(!m.algebra.ring().gen(0).is_zero());
    }
}
