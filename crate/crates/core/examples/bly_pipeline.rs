//! The Hermitian bicontact datum on S^3 x S^3 and the full chain from the
//! corresponding Morimoto datum to normal contact data on each factor.
use gencrf::catalog::{ce_blocks, s3xs3_bicontact_datum, s3xs3_model, Ctx, HMode};
use gencrf::contact::{bly_check, HermitianDatum};
use gencrf::scalar::Scalar;

fn main() {
    for h in [HMode::Zero, HMode::Integrable] {
        let pm = s3xs3_model(&Ctx::default(), h, h, &ce_blocks(&Scalar::zero(), &Scalar::one()).unwrap()).unwrap();
        let hd = HermitianDatum { bicontact: s3xs3_bicontact_datum(&pm).unwrap(), j: pm.j.clone() };
        let rep = bly_check(&pm.product.algebra, &hd).unwrap();
        println!("h {}:\n{rep}\n", h.name());
    }
}
