//! Hermitian indefinite factorization `T = M^* J M` with sorted `J`.

use ghsvd::assembly::hebpj;
use ghsvd::kernel::{matmul, scale_rows, Op};
use ghsvd::ComplexMatrix;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

fn main() {
    let mut rng = Xoshiro256StarStar::seed_from_u64(7);
    for n in [8, 98, 242] {
        let mut t = ComplexMatrix::random(n, n, &mut rng);
        t.symmetrize();
        let res = hebpj(&t);
        let back = matmul(&res.m, Op::C, &scale_rows(&res.m, &res.j), Op::N);
        println!(
            "order {n:>3}: rank {:>3}, {:>3} positive / {:>3} negative, {:>2} 2x2 pivots, ‖T − M*JM‖/‖T‖ = {:.2e}",
            res.rank,
            res.rank - res.j.count_negative(),
            res.j.count_negative(),
            res.two_by_two,
            t.sub(&back).frobenius_norm() / t.frobenius_norm()
        );
    }
}
