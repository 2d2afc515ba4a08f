//! Calabi-Eckmann structures on S^3 x S^3 as Morimoto products, with the
//! admissible isomorphism phi(X1^1) = lambda X1^2.
use gencrf::catalog::{ce_blocks, ce_lambda, polarization_preservation, s3xs3_model, Ctx, HMode};
use gencrf::morimoto::abstract_morimoto_check;
use gencrf::scalar::Scalar;

fn main() {
    let ctx = Ctx::default();
    for (a, b) in [(0, 1), (1, 1), (2, -3)] {
        let (a, b) = (Scalar::from_int(a), Scalar::from_int(b));
        let m = s3xs3_model(&ctx, HMode::Zero, HMode::Zero, &ce_blocks(&a, &b).unwrap()).unwrap();
        let eq = abstract_morimoto_check(&m.product.algebra, &m.datum).unwrap();
        println!(
            "tau = {}: lambda = {}, phi_11 = {}, CRF {}, sides agree {}",
            &a + &(&b * &Scalar::i()),
            ce_lambda(&a, &b),
            m.product.algebra.ring().format(m.datum.triple.phi.get(0, 0)),
            eq.product_crf.crf(),
            eq.agree()
        );
    }
    let (a, b) = (Scalar::zero(), Scalar::one());
    let m = s3xs3_model(&ctx, HMode::Integrable, HMode::Integrable, &ce_blocks(&a, &b).unwrap()).unwrap();
    let (t, c) = polarization_preservation(&m.product.algebra, &m.j).unwrap();
    println!("integrable h: preserves tangent span {t}, cotangent span {c}");
}
