//! The pointwise (vector-parallel) Hari-Zimmermann iteration against the
//! dense Cholesky-based reference.

use ghsvd::assembly::{form_hs, FactoredPencil};
use ghsvd::harness::{compare, generalized_eigen};
use ghsvd::hz::{hz, HzConfig, Variant};
use ghsvd::{ComplexMatrix, Signature};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

fn main() -> ghsvd::Result<()> {
    let n = 96;
    let mut rng = Xoshiro256StarStar::seed_from_u64(5);
    let p = FactoredPencil::new(
        ComplexMatrix::random(n, n, &mut rng),
        Signature::sorted(n - 30, 30),
        ComplexMatrix::random(n, n, &mut rng),
    )?;
    let cfg = HzConfig { variant: Variant::Vp, ..Default::default() };
    let out = hz(&p.f, &p.g, &p.j, &cfg)?;
    println!("converged: {} after {} sweeps", out.stats.converged, out.stats.sweeps);
    for (s, (big, all)) in out.stats.history.iter().enumerate() {
        println!("  sweep {:>2}: {big:>5} big of {all:>5}", s + 1);
    }
    let (h, s) = form_hs(&p);
    let reference = generalized_eigen(&h, &s)?;
    let c = compare(&out.lambda, &reference.lambda, 1e-9)?;
    println!("max relative difference to the dense solver: {:.2e}", c.max_rel_diff);
    Ok(())
}
