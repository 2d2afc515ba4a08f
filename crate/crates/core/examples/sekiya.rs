//! Invariant structures on M x R^k from quadruples (E, J, v, phi), their
//! round trip and the normal-pair integrability criterion.
use gencrf::catalog::{build, Ctx, Params};

fn main() {
    let ctx = Ctx::default();
    for items in [vec![], vec![("m", "s3"), ("s", "2")], vec![("k", "2")]] {
        let p: Params = items.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        print!("{}", build("sekiya_rk", &p, &ctx).unwrap());
    }
    print!("{}", build("nakagawa_canonical", &Params::new(), &ctx).unwrap());
}
