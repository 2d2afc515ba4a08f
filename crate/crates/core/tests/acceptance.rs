mod common;

use common::*;
use gencrf::algebroid::{validate, FramedAlgebra, Section};
use gencrf::catalog::{
    self, ce_blocks, ce_lambda, dbar_h, lambda_symbolic_check, polarization_preservation, s3_model, s3xs3_model, y1_h, Ctx, HMode, Objects,
    ALGEBRAS,
};
use gencrf::contact::{bly_check, contact_check};
use gencrf::linalg::Mat;
use gencrf::morimoto::{
    abstract_morimoto_check, canonical_triple, gl_lift, hyperbolic, is_orthogonal, sekiya_integrability, sekiya_to_structure, sigma_action,
    stabilizer_partner, stabilizes, structure_to_sekiya, AdmissibleTriple, SekiyaQuadruple,
};
use gencrf::ring::{BracketConstants, RingElem};
use gencrf::scalar::Scalar;
use gencrf::structures::{crf_obstructions, ideals_match, normal_pair_check, real_generators, same_linear_span, Framing, Subbundle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::ExitCode;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn within(t: Instant, limit: u64) -> Result<(), String> {
    let d = t.elapsed();
    if d > Duration::from_secs(limit) {
        return Err(format!("took {:.1}s, limit {limit}s", d.as_secs_f64()));
    }
    Ok(())
}

fn courant_axioms() -> Outcome {
    let t = Instant::now();
    let ctx = Ctx::default();
    let mut frame = 0;
    for name in ALGEBRAS {
        let a = catalog::algebra(name, &ctx).map_err(e)?;
        let rep = validate(&a, 200, 7);
        ensure!(rep.passed(), "{name}: {rep}");
        ensure!(rep.random_triples >= 200, "{name}: only {} random triples", rep.random_triples);
        frame += rep.frame_instances;
    }
    within(t, 10)?;
    Ok(format!("{} algebras, {frame} frame instances, 200 random triples each", ALGEBRAS.len()))
}

fn s3_crf() -> Outcome {
    let ctx = Ctx::default();
    let m = s3_model(&ctx, HMode::Symbolic).map_err(e)?;
    let r = m.algebra.ring();
    let rep = crf_obstructions(&m.algebra, &m.j).map_err(e)?;
    ensure!(!rep.truncated, "jet truncation reached");
    ensure!(same_linear_span(&rep.generators, &dbar_h(r)), "generators {:?}", rep.generators.iter().map(|g| r.format(g)).collect::<Vec<_>>());
    let z = s3_model(&ctx, HMode::Zero).map_err(e)?;
    let rz = crf_obstructions(&z.algebra, &z.j).map_err(e)?;
    ensure!(rz.generators.is_empty() && rz.pairings.is_empty() && rz.external.is_empty(), "h = 0 leaves obstructions");
    Ok(format!("{} generators, span of Re, Im dbar(h); h = 0 empty", rep.generators.len()))
}

/// One constant instance of dimension `n`: a random SGF on two frame pairs
/// and a boosted framing of some of the remaining pairs.
/// `None` when `J` is not CRF, outside the hypothesis of the lemma.
fn random_normal_pair(n: usize, rng: &mut ChaCha8Rng) -> Result<Option<bool>, String> {
    let a = constant_algebra(&lie(n, rng.gen_range(0..3)));
    let mut idx: Vec<usize> = (1..=n).collect();
    let p = idx.remove(rng.gen_range(0..idx.len()));
    let q = idx.remove(rng.gen_range(0..idx.len()));
    let j = random_sgf(&a, p, q, rng);
    let keep: Vec<usize> = idx.iter().copied().filter(|_| rng.gen_bool(0.7)).collect();
    let keep = if keep.is_empty() { idx } else { keep };
    let v = boosted_framing(&a, &keep, rng);
    let ep = if v.is_empty() { Subbundle::spanned_by(&a, &[]).map_err(e)? } else { v.as_subbundle(&a).map_err(e)? };
    let rep = normal_pair_check(&a, &j, &ep, &v).map_err(e)?;
    Ok(rep.crf.then(|| rep.conditions_agree()))
}

fn normal_pairs() -> Outcome {
    let ctx = Ctx::default();
    let mut n_cat = 0;
    for h in [HMode::Symbolic, HMode::Zero, HMode::Holomorphic, HMode::Y1, HMode::Integrable] {
        let m = s3_model(&ctx, h).map_err(e)?;
        let rep = normal_pair_check(&m.algebra, &m.j, &m.e_prime, &m.framing()).map_err(e)?;
        ensure!(!rep.crf || rep.conditions_agree(), "S3 h={}: conditions disagree", h.name());
        ensure!(rep.normal() == matches!(h, HMode::Zero | HMode::Integrable), "S3 h={}: normal = {}", h.name(), rep.normal());
        if h == HMode::Symbolic {
            let r = m.algebra.ring();
            let mut t = dbar_h(r);
            t.extend(y1_h(r));
            ensure!(ideals_match(r, &rep.generators, &t).map_err(e)?, "S3 obstructions differ from dbar(h), Y1(h)");
        }
        n_cat += 1;
    }
    for (a, b) in [(0, 1), (1, 1), (2, -3)] {
        let pm = s3xs3_model(&ctx, HMode::Symbolic, HMode::Zero, &ce_blocks(&s(a), &s(b)).map_err(e)?).map_err(e)?;
        let eq = abstract_morimoto_check(&pm.product.algebra, &pm.datum).map_err(e)?;
        ensure!(eq.normal1.conditions_agree() && eq.normal2.conditions_agree(), "product factors disagree at tau = {a} + {b}i");
        n_cat += 2;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut crf = 0;
    for n in 2..=4 {
        let mut k = 0;
        while k < 100 {
            match random_normal_pair(n, &mut rng)? {
                Some(agree) => {
                    ensure!(agree, "dimension {n}, instance {k}: conditions disagree");
                    k += 1;
                }
                None => continue,
            }
            crf += 1;
        }
    }
    Ok(format!("{n_cat} catalog instances, {crf} random CRF instances; S3 verdict is ker(dbar) and ker(Y1)"))
}

fn morimoto_theorem() -> Outcome {
    let t = Instant::now();
    let ctx = Ctx::default();
    let cases = [(HMode::Zero, HMode::Zero), (HMode::Symbolic, HMode::Zero), (HMode::Integrable, HMode::Integrable)];
    for (a, b) in [(0, 1), (1, 1), (2, -3)] {
        let blocks = ce_blocks(&s(a), &s(b)).map_err(e)?;
        for (h1, h2) in cases {
            let pm = s3xs3_model(&ctx, h1, h2, &blocks).map_err(e)?;
            let eq = abstract_morimoto_check(&pm.product.algebra, &pm.datum).map_err(e)?;
            let tag = format!("tau = {a} + {b}i, h = {}/{}", h1.name(), h2.name());
            ensure!(eq.datum.valid(), "{tag}: datum invalid");
            ensure!(eq.agree(), "{tag}: sides disagree ({:?} vs {})", eq.lhs(), eq.rhs());
            if h1 == HMode::Zero && h2 == HMode::Zero {
                ensure!(eq.product_crf.crf(), "{tag}: product is not CRF");
            }
            if h1 == HMode::Symbolic {
                ensure!(!eq.product_crf.crf(), "{tag}: symbolic product is CRF");
                let r = pm.product.algebra.ring();
                ensure!(ideals_match(r, &eq.lhs_generators(), &eq.rhs_generators()).map_err(e)?, "{tag}: obstruction ideals differ");
            }
        }
    }
    within(t, 60)?;
    Ok(format!("9 cases agree, h = 0 CRF, {:.1}s", t.elapsed().as_secs_f64()))
}

/// Random element of `O(l, l)` on a null basis `(X_1..X_l, x_1..x_l)`.
fn random_o_ll(l: usize, g: &Mat, rng: &mut ChaCha8Rng) -> Mat {
    loop {
        let mut r = Mat::identity(2 * l);
        for _ in 0..3 {
            let step = match rng.gen_range(0..4) {
                0 if l == 1 => hyperbolic(&s(*[2, -1, 3, -2].get(rng.gen_range(0..4)).unwrap())),
                0 | 1 if l == 2 => gl_lift(&unimodular(rng)).unwrap(),
                1 => hyperbolic(&Scalar::ratio(rng.gen_range(1..4), rng.gen_range(1..4))),
                2 => {
                    // B-field X_j -> X_j + sum_k b_kj x_k with b skew
                    let mut m = Mat::identity(2 * l);
                    if l == 2 {
                        let b = RingElem::constant(small(rng));
                        m.set(3, 0, b.clone());
                        m.set(2, 1, -&b);
                    }
                    m
                }
                _ => {
                    let mut m = Mat::identity(2 * l);
                    m.set(0, 0, RingElem::zero());
                    m.set(l, l, RingElem::zero());
                    m.set(l, 0, RingElem::one());
                    m.set(0, l, RingElem::one());
                    m
                }
            };
            r = r.mul(&step);
        }
        if is_orthogonal(g, &r) {
            return r;
        }
    }
}

fn flat_triple(l: usize) -> Result<(FramedAlgebra, AdmissibleTriple), String> {
    let a = constant_algebra(&BracketConstants::zero(2 * l));
    let names = |lo: usize| -> Vec<String> {
        let mut v: Vec<String> = (lo..lo + l).map(|i| format!("X{i}")).collect();
        v.extend((lo..lo + l).map(|i| format!("a{i}")));
        v
    };
    let f = |lo: usize| -> Result<Framing, String> {
        let n = names(lo);
        Framing::named(&a, &n.iter().map(|s| s.as_str()).collect::<Vec<_>>()).map_err(e)
    };
    let t = canonical_triple(&a, &f(1)?, &f(l + 1)?).map_err(e)?;
    Ok((a, t))
}

fn admissibility() -> Outcome {
    for (a, b) in [(0, 1), (1, 1), (2, -3)] {
        let pm = s3xs3_model(&Ctx::default(), HMode::Zero, HMode::Zero, &ce_blocks(&s(a), &s(b)).map_err(e)?).map_err(e)?;
        let phi = &pm.datum.triple.phi;
        let lambda = ce_lambda(&s(a), &s(b));
        ensure!(lambda == s(b) * (s(a) + Scalar::i()).inv().unwrap(), "lambda formula at tau = {a} + {b}i");
        ensure!(phi.get(0, 0).as_constant() == Some(lambda.clone()), "phi(X1) at tau = {a} + {b}i is {:?}", phi.get(0, 0).as_constant());
        ensure!(phi.get(0, 1).is_zero() && phi.get(1, 0).is_zero(), "phi is not diagonal at tau = {a} + {b}i");
    }
    ensure!(lambda_symbolic_check().map_err(e)?, "symbolic lambda = b/(a+i) fails");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for l in [1, 2] {
        let (alg, t0) = flat_triple(l)?;
        let g = t0.e1p.gram().clone();
        for k in 0..50 {
            let (p1, p2) = (random_o_ll(l, &g, &mut rng), random_o_ll(l, &g, &mut rng));
            let t = sigma_action(&alg, &t0, &p1, &p2).map_err(|x| format!("l={l} #{k}: {x}"))?;
            ensure!(t.psi.check(&alg).map_err(e)?.passed(), "l={l} #{k}: conjugate is not SGF");
            let r1 = random_o_ll(l, &g, &mut rng);
            let r2 = stabilizer_partner(&t, &r1).map_err(e)?;
            ensure!(is_orthogonal(&g, &r2), "l={l} #{k}: partner is not orthogonal");
            ensure!(stabilizes(&alg, &t, &r1, &r2).map_err(e)?, "l={l} #{k}: (R1, phi R1 phi^-1) does not stabilize");
            if r1 != Mat::identity(2 * l) {
                ensure!(!stabilizes(&alg, &t, &r1, &Mat::identity(2 * l)).map_err(e)? || r2 == Mat::identity(2 * l), "l={l} #{k}: (R1, Id) stabilizes");
            }
        }
    }
    Ok("lambda at 3 tau and symbolically; 50 random R1 at l = 1, 2".into())
}

struct SekiyaCase {
    m: FramedAlgebra,
    g: FramedAlgebra,
    q: SekiyaQuadruple,
}

/// Any `phi = diag(S, -S^t)` conjugated by a random orthogonal `O`, with a
/// frame `{v_i}` of `E^perp` whose Gram matrix is `G(phi^2 + Id)`.
fn random_sekiya(r: usize, g_kind: usize, rng: &mut ChaCha8Rng) -> SekiyaCase {
    let gc = if g_kind == 1 { BracketConstants::su2(2) } else { BracketConstants::zero(r) };
    let g = constant_algebra(&gc);
    let nm = 2 + r;
    let mc = match rng.gen_range(0..3) {
        0 => BracketConstants::zero(nm),
        1 => BracketConstants::su2(2).direct_sum(&BracketConstants::zero(nm - 3)),
        _ => BracketConstants::zero(nm - 3).direct_sum(&BracketConstants::su2(2)),
    };
    let m = constant_algebra(&mc);
    let j = random_sgf(&m, 1, 2, rng);
    let e = j.e.clone();
    let ep: Vec<Section> = (3..=nm).map(|i| m.named(&format!("X{i}")).unwrap()).chain((3..=nm).map(|i| m.named(&format!("a{i}")).unwrap())).collect();
    loop {
        let sm = Mat::from_rows((0..r).map(|_| (0..r).map(|_| RingElem::constant(small(rng))).collect()).collect());
        let sq1 = sm.transpose().mul(&sm.transpose()).add(&Mat::identity(r));
        if !sq1.det().is_unit() {
            continue;
        }
        let zero = Mat::zeros(r, r);
        let phi0 = Mat::from_blocks(&sm, &zero, &zero, &sm.transpose().neg());
        let t = if r == 1 { Mat::identity(1) } else { Mat::block_diag(&[&unimodular(rng), &Mat::identity(r - 2)]) };
        let u = t.inverse().unwrap().transpose().mul(&sq1);
        let coords0 = Mat::from_blocks(&t, &zero, &zero, &u);
        let o = if r == 1 { hyperbolic(&s(2)) } else { gl_lift(&Mat::block_diag(&[&unimodular(rng), &Mat::identity(r - 2)])).unwrap() };
        let oinv = o.inverse().unwrap();
        let phi = o.mul(&phi0).mul(&oinv);
        let coords = coords0.mul(&oinv);
        let v: Vec<Section> = (0..2 * r).map(|c| Section::combination(m.dim(), &coords.col(c), &ep)).collect();
        return SekiyaCase { m, g, q: SekiyaQuadruple { e, j, v, phi } };
    }
}

fn sekiya() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut integrable = [0usize; 2];
    for (label, r, kind) in [("R", 1, 0), ("R2", 2, 0), ("su(2)", 3, 1)] {
        for k in 0..50 {
            let c = random_sekiya(r, kind, &mut rng);
            let st = sekiya_to_structure(&c.m, &c.g, &c.q).map_err(|x| format!("{label} #{k}: {x}"))?;
            let alg = &st.product.algebra;
            ensure!(st.structure.check(alg).map_err(e)?.passed(), "{label} #{k}: structure is not SGF");
            let full = st.structure.phi(alg).map_err(e)?.0;
            let back = structure_to_sekiya(&c.m, &c.g, &full).map_err(|x| format!("{label} #{k}: {x}"))?;
            ensure!(back.v == c.q.v && back.phi == c.q.phi, "{label} #{k}: v or phi changed");
            ensure!(back.e.same_span(&c.m, &c.q.e).map_err(e)?, "{label} #{k}: E changed");
            let imgs: Vec<Section> = back.e.gens().iter().map(|x| c.q.j.apply(&c.m, x).unwrap()).collect();
            ensure!(imgs == back.j.images(&c.m), "{label} #{k}: J changed");
            if kind == 0 {
                let direct = crf_obstructions(alg, &st.structure).map_err(e)?.crf();
                let span = Subbundle::new(&c.m, c.q.v.clone()).map_err(e)?;
                let normal = normal_pair_check(&c.m, &c.q.j, &span, &Framing::new(c.q.v.clone())).map_err(e)?.normal();
                let mut commute = true;
                for x in &c.q.v {
                    for y in &c.q.v {
                        commute &= c.m.dorfman(x, y).map_err(e)?.is_zero();
                    }
                }
                ensure!(direct == (normal && commute), "{label} #{k}: direct {direct}, normal {normal}, commuting {commute}");
                let si = sekiya_integrability(&c.m, &c.q, &st).map_err(e)?;
                ensure!(si.agree(), "{label} #{k}: library criterion disagrees");
                integrable[direct as usize] += 1;
            }
        }
    }
    ensure!(integrable[0] > 0 && integrable[1] > 0, "random R^k cases are all of one kind: {integrable:?}");
    Ok(format!("150 round trips; R^k criterion on 100 ({} integrable)", integrable[1]))
}

fn bly() -> Outcome {
    let t = Instant::now();
    let ctx = Ctx::default();
    for h in ["zero", "integrable"] {
        let params = catalog::parse_params(&[format!("h={h}")]).map_err(e)?;
        let entry = catalog::build("s3xs3_hermitian", &params, &ctx).map_err(e)?;
        let Objects::Hermitian(pm, hd) = &entry.objects else { return Err("unexpected objects".into()) };
        let rep = bly_check(&pm.product.algebra, hd).map_err(|x| format!("h={h}: {x}"))?;
        ensure!(rep.hermitian.valid(), "h={h}: Hermitian datum invalid");
        ensure!(rep.morimoto.agree(), "h={h}: Morimoto step disagrees");
        ensure!(rep.conclusion(), "h={h}: factors are not normal contact data");
    }
    let m = s3_model(&ctx, HMode::Symbolic).map_err(e)?;
    let r = m.algebra.ring();
    let rep = contact_check(&m.algebra, &m.contact().map_err(e)?).map_err(e)?;
    ensure!(!rep.valid(), "symbolic h gives a contact datum");
    ensure!(ideals_match(r, &real_generators(&rep.obstructions()), &y1_h(r)).map_err(e)?, "contact obstructions differ from Y1(h)");
    let y = s3_model(&ctx, HMode::Y1).map_err(e)?;
    ensure!(contact_check(&y.algebra, &y.contact().map_err(e)?).map_err(e)?.valid(), "Y1(h) = 0 is not a contact datum");
    within(t, 60)?;
    Ok(format!("h = 0 and integrable h normal contact; Y1(h) = 0 criterion; {:.1}s", t.elapsed().as_secs_f64()))
}

fn holomorphic_poisson() -> Outcome {
    let ctx = Ctx::default();
    let blocks = ce_blocks(&s(0), &s(1)).map_err(e)?;
    let pm = s3xs3_model(&ctx, HMode::Integrable, HMode::Integrable, &blocks).map_err(e)?;
    let pa = &pm.product.algebra;
    ensure!(crf_obstructions(pa, &pm.j).map_err(e)?.crf(), "integrable h product is not CRF");
    let got = polarization_preservation(pa, &pm.j).map_err(e)?;
    ensure!(got == (true, false), "integrable h: {got:?}");
    let z = s3xs3_model(&ctx, HMode::Zero, HMode::Zero, &blocks).map_err(e)?;
    let gz = polarization_preservation(&z.product.algebra, &z.j).map_err(e)?;
    ensure!(gz == (true, true), "h = 0: {gz:?}");
    Ok("integrable h keeps TM, moves T*M; h = 0 keeps both".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("Courant axiom suite", courant_axioms),
        ("S3 CRF equivalence", s3_crf),
        ("normal-pair equivalences", normal_pairs),
        ("Morimoto product criterion", morimoto_theorem),
        ("admissibility algebra", admissibility),
        ("Sekiya/Nakagawa reductions", sekiya),
        ("BLY pipeline", bly),
        ("holomorphic Poisson structure", holomorphic_poisson),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(d) => println!("criterion {}: PASS  {name} ({d}) [{secs:.2}s]", k + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {d} [{secs:.2}s]", k + 1);
            }
        }
    }
    println!("{} of 8 criteria pass", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
