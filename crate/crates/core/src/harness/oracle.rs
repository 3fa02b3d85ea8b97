//! Dense reference solver for `H z = λ S z` with `S` positive definite:
//! Cholesky `S = L L^*`, two-sided cyclic Jacobi on `L^{-1} H L^{-*}`,
//! back-substitution for the eigenvectors.

use crate::kernel::{ComplexMatrix, Rotation2, C64};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct OracleSolution {
    /// Ascending.
    pub lambda: Vec<f64>,
    /// Eigenvectors in the order of `lambda`, normalized to `z^* S z = 1`.
    pub z: ComplexMatrix,
    pub sweeps: usize,
}

/// Lower Cholesky factor; fails on a non-positive pivot.
pub fn cholesky_lower(s: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = s.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for jc in 0..n {
        let mut d = s[(jc, jc)].re;
        for k in 0..jc {
            d -= l[(jc, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::CholeskyBreakdown(jc));
        }
        let djj = d.sqrt();
        l[(jc, jc)] = C64::new(djj, 0.0);
        for i in jc + 1..n {
            let mut v = s[(i, jc)];
            for k in 0..jc {
                v -= l[(i, k)] * l[(jc, k)].conj();
            }
            l[(i, jc)] = v / djj;
        }
    }
    Ok(l)
}

/// `L^{-1} B` for lower triangular `L`.
fn solve_lower(l: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows();
    let mut x = b.clone();
    for c in 0..x.cols() {
        let col = x.col_mut(c);
        for i in 0..n {
            let mut v = col[i];
            for k in 0..i {
                v -= l[(i, k)] * col[k];
            }
            col[i] = v / l[(i, i)];
        }
    }
    x
}

/// `L^{-*} B`.
fn solve_lower_adjoint(l: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows();
    let mut x = b.clone();
    for c in 0..x.cols() {
        let col = x.col_mut(c);
        for i in (0..n).rev() {
            let mut v = col[i];
            for k in i + 1..n {
                v -= l[(k, i)].conj() * col[k];
            }
            col[i] = v / l[(i, i)].conj();
        }
    }
    x
}

/// Eigen-decomposition of a Hermitian matrix by cyclic two-sided Jacobi.
/// Returns unsorted eigenvalues, eigenvectors and the sweep count.
pub fn hermitian_eigen(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix, usize) {
    let n = a.rows();
    let mut c = a.clone();
    c.symmetrize();
    let mut v = ComplexMatrix::identity(n);
    let mut sweeps = 0;
    for _ in 0..60 {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let b = c[(p, q)];
                let (app, aqq) = (c[(p, p)].re, c[(q, q)].re);
                if b.norm() <= f64::EPSILON * (app.abs() * aqq.abs()).sqrt() || b.norm() < f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let (r, d1, d2) = Rotation2::hermitian_jacobi(app, b, aqq);
                // columns: C <- C R
                let (cp, cq) = c.col_pair_mut(p, q);
                crate::kernel::vrotm(cp, cq, &r);
                // rows: C <- R^* C
                for k in 0..n {
                    let (x, y) = (c[(p, k)], c[(q, k)]);
                    c[(p, k)] = r.z11.conj() * x + r.z21.conj() * y;
                    c[(q, k)] = r.z12.conj() * x + r.z22.conj() * y;
                }
                c[(p, p)] = C64::new(d1, 0.0);
                c[(q, q)] = C64::new(d2, 0.0);
                c[(p, q)] = C64::new(0.0, 0.0);
                c[(q, p)] = C64::new(0.0, 0.0);
                let (vp, vq) = v.col_pair_mut(p, q);
                crate::kernel::vrotm(vp, vq, &r);
            }
        }
        if !rotated {
            break;
        }
    }
    ((0..n).map(|i| c[(i, i)].re).collect(), v, sweeps)
}

/// Generalized eigenpairs of `(H, S)`, eigenvalues ascending.
pub fn generalized_eigen(h: &ComplexMatrix, s: &ComplexMatrix) -> Result<OracleSolution> {
    if !h.is_square() || !s.is_square() || h.rows() != s.rows() {
        return Err(Error::Dimension("oracle: H and S must be square and of equal order".into()));
    }
    let l = cholesky_lower(s)?;
    let y = solve_lower(&l, h);
    // C = L^{-1} H L^{-*} = (L^{-1} (L^{-1} H)^*)^*
    let c = solve_lower(&l, &y.conj_transpose()).conj_transpose();
    let (lambda, v, sweeps) = hermitian_eigen(&c);
    let z = solve_lower_adjoint(&l, &v);
    let mut idx: Vec<usize> = (0..lambda.len()).collect();
    idx.sort_by(|&a, &b| lambda[a].total_cmp(&lambda[b]));
    Ok(OracleSolution {
        lambda: idx.iter().map(|&i| lambda[i]).collect(),
        z: z.select_cols(&idx),
        sweeps,
    })
}
