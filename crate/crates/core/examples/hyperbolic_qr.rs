//! Phase 2: shortening a tall pencil by a hyperbolic QR of `F̃` and a QR of
//! the permuted `G̃`. Both Grammians survive up to the column permutation.

use ghsvd::assembly::{form_hs, FactoredPencil};
use ghsvd::shorten::shorten;
use ghsvd::{ComplexMatrix, Lanes, Signature};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

fn main() -> ghsvd::Result<()> {
    let (m, n) = (600, 60);
    let mut rng = Xoshiro256StarStar::seed_from_u64(3);
    let tall = FactoredPencil::new(
        ComplexMatrix::random(m, n, &mut rng),
        Signature::sorted(m - 150, 150),
        ComplexMatrix::random(m, n, &mut rng),
    )?;
    let short = shorten(&tall, Lanes::DEFAULT)?;
    let (h0, s0) = form_hs(&tall);
    let (h1, s1) = form_hs(&short.pencil);
    // undo the column permutation before comparing
    let inv = {
        let mut v = vec![0; n];
        for (c, &p) in short.perm.iter().enumerate() {
            v[p] = c;
        }
        v
    };
    let back = |x: &ComplexMatrix| ComplexMatrix::from_fn(n, n, |i, j| x[(inv[i], inv[j])]);
    println!("{m} x {n} -> {} x {n}, {} 2x2 pivots", short.pencil.rows(), short.two_by_two_count);
    println!("H Grammian relative error {:.2e}", back(&h1).rel_diff(&h0));
    println!("S Grammian relative error {:.2e}", back(&s1).rel_diff(&s0));
    Ok(())
}
