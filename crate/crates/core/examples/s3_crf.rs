//! The deformed almost contact frame on S^3: CRF obstructions are the real
//! and imaginary parts of dbar(h), and normality adds Y1(h).
use gencrf::catalog::{s3_model, Ctx, HMode};
use gencrf::structures::{crf_obstructions, normal_pair_check};

fn main() {
    for h in [HMode::Symbolic, HMode::Zero, HMode::Holomorphic] {
        let m = s3_model(&Ctx::default(), h).unwrap();
        let a = &m.algebra;
        let crf = crf_obstructions(a, &m.j).unwrap();
        let np = normal_pair_check(a, &m.j, &m.e_prime, &m.framing()).unwrap();
        println!("h {}: CRF {}, normal pair {}", h.name(), crf.crf(), np.normal());
        for g in &crf.generators {
            println!("  CRF obstruction {}", a.ring().format(g));
        }
    }
}
