//! Right singular vectors `X = Z^{-1}` and residuals of the decomposition.

use rayon::prelude::*;

use crate::kernel::{matmul, ComplexMatrix, Op, C64};

/// `P Z Q = L U`, i.e. `Z = P^T L U Q^T`.
///
/// `p[i]` is the row of `Z` that ends up in row `i`, `q[j]` the column of
/// `Z` that ends up in column `j`.
#[derive(Clone, Debug)]
pub struct LuCp {
    pub l: ComplexMatrix,
    pub u: ComplexMatrix,
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    /// Pivots raised to the threshold `n ε max|Z|`.
    pub perturbed: usize,
}

impl LuCp {
    /// `max |u_ii| / min |u_ii|`, a cheap conditioning indicator.
    pub fn kappa_estimate(&self) -> f64 {
        let d: Vec<f64> = (0..self.u.rows()).map(|i| self.u[(i, i)].norm()).collect();
        let hi = d.iter().copied().fold(0.0, f64::max);
        let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
        hi / lo
    }

    /// `P^T L U Q^T`.
    pub fn reassemble(&self) -> ComplexMatrix {
        let lu = matmul(&self.l, Op::N, &self.u, Op::N);
        let n = lu.rows();
        let mut z = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                z[(self.p[i], self.q[j])] = lu[(i, j)];
            }
        }
        z
    }
}

/// LU factorization with complete pivoting. Ties in the pivot search go to
/// the smallest `(row, column)`.
pub fn lu_complete(z: &ComplexMatrix) -> LuCp {
    assert!(z.is_square(), "lu_complete: Z must be square");
    let n = z.rows();
    let mut a = z.clone();
    let mut p: Vec<usize> = (0..n).collect();
    let mut q: Vec<usize> = (0..n).collect();
    let thr = n as f64 * f64::EPSILON * z.max_abs();
    let mut perturbed = 0;
    for k in 0..n {
        let (mut bi, mut bj, mut best) = (k, k, -1.0);
        for j in k..n {
            for (i, v) in a.col(j).iter().enumerate().skip(k) {
                let v = v.norm_sqr();
                if v > best || (v == best && (i, j) < (bi, bj)) {
                    (bi, bj, best) = (i, j, v);
                }
            }
        }
        let best = best.sqrt();
        a.swap_rows(k, bi, 0);
        p.swap(k, bi);
        a.swap_cols(k, bj);
        q.swap(k, bj);
        if best <= thr {
            let piv = a[(k, k)];
            a[(k, k)] = if best > 0.0 { piv * (thr / best) } else { C64::new(thr, 0.0) };
            perturbed += 1;
            log::warn!("lu_complete: pivot {k} of magnitude {best:e} raised to {thr:e}");
        }
        let piv = a[(k, k)];
        for i in k + 1..n {
            a[(i, k)] /= piv;
        }
        for j in k + 1..n {
            let akj = a[(k, j)];
            if akj == C64::new(0.0, 0.0) {
                continue;
            }
            for i in k + 1..n {
                let lik = a[(i, k)];
                a[(i, j)] -= lik * akj;
            }
        }
    }
    let l = ComplexMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => a[(i, j)],
        std::cmp::Ordering::Equal => C64::new(1.0, 0.0),
        std::cmp::Ordering::Less => C64::new(0.0, 0.0),
    });
    let u = ComplexMatrix::from_fn(n, n, |i, j| if i <= j { a[(i, j)] } else { C64::new(0.0, 0.0) });
    LuCp { l, u, p, q, perturbed }
}

/// `X` with `Z X = I`, one independent triangular solve pair per column.
pub fn invert(lu: &LuCp) -> ComplexMatrix {
    let n = lu.l.rows();
    let mut pinv = vec![0; n];
    for (i, &r) in lu.p.iter().enumerate() {
        pinv[r] = i;
    }
    let mut x = ComplexMatrix::zeros(n, n);
    x.columns_mut().into_par_iter().enumerate().for_each(|(c, xc)| {
        // L y = P e_c
        let mut w = vec![C64::new(0.0, 0.0); n];
        w[pinv[c]] = C64::new(1.0, 0.0);
        for i in 0..n {
            let mut s = w[i];
            for k in 0..i {
                s -= lu.l[(i, k)] * w[k];
            }
            w[i] = s;
        }
        // U v = y
        for i in (0..n).rev() {
            let mut s = w[i];
            for k in i + 1..n {
                s -= lu.u[(i, k)] * w[k];
            }
            w[i] = s / lu.u[(i, i)];
        }
        for (i, &qi) in lu.q.iter().enumerate() {
            xc[qi] = w[i];
        }
    });
    x
}

fn scaled_cols(m: &ComplexMatrix, d: &[f64]) -> ComplexMatrix {
    let mut out = m.clone();
    for (j, &s) in d.iter().enumerate() {
        out.scale_col(j, s);
    }
    out
}

/// `(‖F − U Σ_F X‖_F / ‖F‖_F, ‖G − V Σ_G X‖_F / ‖G‖_F)`.
pub fn residuals(
    f: &ComplexMatrix,
    g: &ComplexMatrix,
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    sigma_f: &[f64],
    sigma_g: &[f64],
    x: &ComplexMatrix,
) -> (f64, f64) {
    let rf = matmul(&scaled_cols(u, sigma_f), Op::N, x, Op::N);
    let rg = matmul(&scaled_cols(v, sigma_g), Op::N, x, Op::N);
    (
        f.sub(&rf).frobenius_norm() / f.frobenius_norm(),
        g.sub(&rg).frobenius_norm() / g.frobenius_norm(),
    )
}

/// `‖H Z − S Z Λ‖_F / (‖H‖_F ‖Z‖_F)`.
pub fn eigen_residual(h: &ComplexMatrix, s: &ComplexMatrix, z: &ComplexMatrix, lambda: &[f64]) -> f64 {
    let hz = matmul(h, Op::N, z, Op::N);
    let szl = scaled_cols(&matmul(s, Op::N, z, Op::N), lambda);
    hz.sub(&szl).frobenius_norm() / (h.frobenius_norm() * z.frobenius_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256StarStar;

    fn random(n: usize, seed: u64) -> ComplexMatrix {
        ComplexMatrix::random(n, n, &mut Xoshiro256StarStar::seed_from_u64(seed))
    }

    #[test]
    fn identity_factors_trivially() {
        let lu = lu_complete(&ComplexMatrix::identity(4));
        assert_eq!(lu.l, ComplexMatrix::identity(4));
        assert_eq!(lu.u, ComplexMatrix::identity(4));
        assert_eq!(lu.p, vec![0, 1, 2, 3]);
        assert_eq!(lu.q, vec![0, 1, 2, 3]);
        assert_eq!(invert(&lu), ComplexMatrix::identity(4));
    }

    #[test]
    fn permutation_matrix_is_recovered() {
        let perm = [2, 0, 3, 1];
        let z = ComplexMatrix::from_fn(4, 4, |i, j| if perm[j] == i { C64::new(-1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let lu = lu_complete(&z);
        assert_eq!(lu.l, ComplexMatrix::identity(4));
        for i in 0..4 {
            assert_eq!(lu.u[(i, i)].norm(), 1.0);
        }
        assert_eq!(lu.reassemble(), z);
    }

    #[test]
    fn twice_identity_inverts_to_half() {
        let z = ComplexMatrix::from_diag(&[2.0; 3]);
        assert_eq!(invert(&lu_complete(&z)), ComplexMatrix::from_diag(&[0.5; 3]));
    }

    #[test]
    fn random_reassembly_and_inverse() {
        let z = random(50, 1);
        let lu = lu_complete(&z);
        assert_eq!(lu.perturbed, 0);
        assert!(lu.reassemble().rel_diff(&z) <= 1e-13);
        let z = random(64, 2);
        let x = invert(&lu_complete(&z));
        let r = matmul(&z, Op::N, &x, Op::N).sub(&ComplexMatrix::identity(64)).frobenius_norm();
        assert!(r <= 1e-11, "{r:e}");
    }

    #[test]
    fn inverse_within_conditioning_bound() {
        let z = random(120, 3);
        let lu = lu_complete(&z);
        let x = invert(&lu);
        let r = matmul(&z, Op::N, &x, Op::N).sub(&ComplexMatrix::identity(120)).frobenius_norm();
        assert!(r <= 100.0 * 120.0 * f64::EPSILON * lu.kappa_estimate());
    }

    #[test]
    fn singular_input_gets_perturbed_pivot() {
        let mut z = random(5, 4);
        for i in 0..5 {
            let v = z[(i, 0)];
            z[(i, 1)] = v;
        }
        let lu = lu_complete(&z);
        assert_eq!(lu.perturbed, 1);
        assert!(lu.u.columns().all(|c| c.iter().all(|v| v.re.is_finite())));
    }

    #[test]
    fn residual_of_exact_factors_is_zero() {
        let f = random(6, 5);
        let i = ComplexMatrix::identity(6);
        let ones = [1.0; 6];
        assert_eq!(residuals(&f, &f, &f, &f, &ones, &ones, &i), (0.0, 0.0));
        let h = ComplexMatrix::from_diag(&[1.0, 4.0]);
        let id = ComplexMatrix::identity(2);
        assert_eq!(eigen_residual(&id, &id, &id, &[1.0, 1.0]), 0.0);
        assert_eq!(eigen_residual(&h, &id, &id, &[1.0, 4.0]), 0.0);
    }

    #[test]
    fn residual_first_order_perturbation() {
        let f = random(6, 6);
        let x = random(6, 7);
        let sf: Vec<f64> = (1..=6).map(|k| f64::from(k) / 7.0).collect();
        let u = f.clone();
        let fe = matmul(&scaled_cols(&u, &sf), Op::N, &x, Op::N);
        let mut up = u.clone();
        let delta = 1e-7;
        up[(2, 3)] += C64::new(delta, 0.0);
        let (err, _) = residuals(&fe, &fe, &up, &u, &sf, &sf, &x);
        // the perturbation enters as delta * row 3 of Σ_F X
        let row: f64 = (0..6).map(|j| (x[(3, j)] * sf[3]).norm_sqr()).sum::<f64>().sqrt();
        let want = delta * row / fe.frobenius_norm();
        assert!((err - want).abs() <= 1e-6 * want, "{err:e} {want:e}");
    }

    proptest! {
        #[test]
        fn residual_invariant_under_joint_permutation(seed in 0u64..1000, shift in 1usize..5) {
            let n = 5;
            let f = random(n, seed);
            let g = random(n, seed + 1);
            let u = random(n, seed + 2);
            let v = random(n, seed + 3);
            let x = random(n, seed + 4);
            let sf: Vec<f64> = (0..n).map(|k| 0.1 + k as f64 / 7.0).collect();
            let sg: Vec<f64> = sf.iter().map(|s| (1.0 - s * s).sqrt()).collect();
            let perm: Vec<usize> = (0..n).map(|k| (k + shift) % n).collect();
            let xp = ComplexMatrix::from_fn(n, n, |i, j| x[(perm[i], j)]);
            let sfp: Vec<f64> = perm.iter().map(|&k| sf[k]).collect();
            let sgp: Vec<f64> = perm.iter().map(|&k| sg[k]).collect();
            let a = residuals(&f, &g, &u, &v, &sf, &sg, &x);
            let b = residuals(&f, &g, &u.select_cols(&perm), &v.select_cols(&perm), &sfp, &sgp, &xp);
            prop_assert!((a.0 - b.0).abs() <= 1e-14 * a.0 && (a.1 - b.1).abs() <= 1e-14 * a.1);
        }
    }
}
