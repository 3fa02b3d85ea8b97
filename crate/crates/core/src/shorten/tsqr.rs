use rayon::prelude::*;

use crate::kernel::{dot, normsq, ComplexMatrix, Lanes, C64};

/// Householder QR of `a` in place; returns the `min(m, n) x n` factor `R`.
fn householder_r(mut a: ComplexMatrix, lanes: Lanes) -> ComplexMatrix {
    let (m, n) = (a.rows(), a.cols());
    let steps = m.min(n);
    for k in 0..steps {
        let (head, tail) = a.as_mut_slice().split_at_mut((k + 1) * padded_stride(m));
        let stride = padded_stride(m);
        let x = &mut head[k * stride + k..k * stride + m];
        let norm = normsq(x, lanes).sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        // v = x - alpha e1, stored in place of x
        x[0] -= alpha;
        let vnorm2 = normsq(x, lanes);
        let v: &[C64] = x;
        tail.par_chunks_mut(stride).for_each(|col| {
            let c = &mut col[k..m];
            let w = dot(v, c, lanes) * (2.0 / vnorm2);
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci -= vi * w;
            }
        });
        head[k * stride + k] = alpha;
        for z in &mut head[k * stride + k + 1..k * stride + m] {
            *z = C64::new(0.0, 0.0);
        }
    }
    ComplexMatrix::from_fn(steps, n, |i, j| if i <= j { a[(i, j)] } else { C64::new(0.0, 0.0) })
}

fn padded_stride(rows: usize) -> usize {
    ComplexMatrix::zeros(rows, 0).stride()
}

/// Row-block size of the leaf factorizations; depends only on the shape.
fn leaf_rows(m: usize, n: usize) -> usize {
    (4 * n).max(256).min(m.max(1))
}

/// `R` factor of a tall matrix by a binary reduction tree of Householder QRs.
///
/// Leaves are row blocks of a shape-determined size and are reduced in a
/// fixed pairing order, so the result does not depend on the worker count.
/// The diagonal of `R` is made real and nonnegative.
pub fn tsqr(gp: &ComplexMatrix, lanes: Lanes) -> ComplexMatrix {
    let (m, n) = (gp.rows(), gp.cols());
    assert!(m >= n, "tsqr: needs m >= n");
    let leaf = leaf_rows(m, n);
    let mut starts: Vec<usize> = (0..m).step_by(leaf).collect();
    // fold a short trailing block into its predecessor
    if starts.len() > 1 && m - starts[starts.len() - 1] < n {
        starts.pop();
    }
    let bounds: Vec<(usize, usize)> = starts
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, starts.get(i + 1).copied().unwrap_or(m)))
        .collect();
    let mut level: Vec<ComplexMatrix> = bounds
        .par_iter()
        .map(|&(s, e)| householder_r(gp.submatrix(s, 0, e - s, n), lanes))
        .collect();
    while level.len() > 1 {
        level = level
            .par_chunks(2)
            .map(|pair| match pair {
                [a, b] => householder_r(ComplexMatrix::vstack(&[a, b]), lanes),
                [a] => a.clone(),
                _ => unreachable!(),
            })
            .collect();
    }
    let mut r = level.pop().expect("at least one block");
    // rows of a rank-deficient leaf may be fewer than n
    if r.rows() < n {
        let mut full = ComplexMatrix::zeros(n, n);
        full.set_submatrix(0, 0, &r);
        r = full;
    }
    for i in 0..n {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            let ph = d.conj() / d.norm();
            for j in i..n {
                r[(i, j)] *= ph;
            }
            r[(i, i)] = C64::new(r[(i, i)].re, 0.0);
        }
    }
    r
}
