//! Two-level blocking: block-oriented (one inner sweep per block pair) and
//! full-block (inner sweeps to convergence) against the pointwise run.

use std::time::Instant;

use ghsvd::harness::compare;
use ghsvd::hz::{hz, HzConfig, Variant};
use ghsvd::{ComplexMatrix, Signature};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

fn main() -> ghsvd::Result<()> {
    let n = 192;
    let mut rng = Xoshiro256StarStar::seed_from_u64(9);
    let f = ComplexMatrix::random(n, n, &mut rng);
    let g = ComplexMatrix::random(n, n, &mut rng);
    let j = Signature::sorted(n / 2, n / 2);
    let mut reference: Option<Vec<f64>> = None;
    for variant in [Variant::Vp, Variant::Bo, Variant::Fb] {
        let cfg = HzConfig { variant, threads: 4, ..Default::default() };
        let t0 = Instant::now();
        let out = hz(&f, &g, &j, &cfg)?;
        let secs = t0.elapsed().as_secs_f64();
        let diff = match &reference {
            None => 0.0,
            Some(l) => compare(&out.lambda, l, 1e-9)?.max_rel_diff,
        };
        println!(
            "{variant:?}: {:>2} sweeps, {:>4} inner sweeps, {secs:.2} s, Λ difference to VP {diff:.1e}",
            out.stats.sweeps, out.inner_sweeps
        );
        reference.get_or_insert(out.lambda);
    }
    Ok(())
}
