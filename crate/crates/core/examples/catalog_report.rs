//! The regression corpus, and the same corpus with one su(2) structure
//! constant sign flipped.
use gencrf::catalog::{run_all, Ctx};

fn main() {
    println!("{}\n", run_all(&Ctx::default()));
    let rep = run_all(&Ctx { mutate_su2: true, ..Ctx::default() });
    println!("with a flipped su(2) sign: {} failing runs", rep.failures().len());
    for l in rep.failures() {
        println!("  {}", l.name);
    }
}
