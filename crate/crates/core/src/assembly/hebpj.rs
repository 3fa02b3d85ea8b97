use crate::kernel::{ComplexMatrix, Rotation2, Signature, C64};

/// Pivot-size threshold for Bunch-Parlett complete pivoting.
pub const BP_ALPHA: f64 = 0.640_388_203_202_208_4; // (1 + sqrt(17)) / 8

/// `T = M^* J M` with `J` sorted (+ before -).
///
/// `M` has `rank` rows and `order` columns; rows belonging to pivots below
/// the drop tolerance are removed.
#[derive(Clone, Debug)]
pub struct HebpjResult {
    pub m: ComplexMatrix,
    pub j: Signature,
    pub rank: usize,
    pub two_by_two: usize,
}

/// Running maxima of the trailing lower triangle: largest squared
/// off-diagonal magnitude at `(r, s)`, largest diagonal magnitude at `d`.
struct Search {
    mu0: f64,
    r: usize,
    s: usize,
    mu1: f64,
    d: usize,
}

impl Search {
    fn new(k: usize) -> Self {
        Search { mu0: 0.0, r: k, s: k, mu1: 0.0, d: k }
    }

    /// `col` is column `c` from the diagonal down.
    fn scan(&mut self, c: usize, col: &[C64]) {
        let v = col[0].re.abs();
        if v > self.mu1 {
            self.mu1 = v;
            self.d = c;
        }
        // squared magnitudes: no hypot in the O(n^3) search
        for (i, z) in col.iter().enumerate().skip(1) {
            let v = z.norm_sqr();
            if v > self.mu0 {
                self.mu0 = v;
                self.r = c + i;
                self.s = c;
            }
        }
    }
}

/// Hermitian indefinite factorization with Bunch-Parlett complete pivoting.
///
/// Computes `P T P^T = L D L^*`, diagonalizes the 2x2 blocks of `D` by a
/// Jacobi rotation, folds `|D|^{1/2}`, the rotations and `P` into `M` and
/// finally sorts the rows of `M` so that positive signs come first.
pub fn hebpj(t: &ComplexMatrix) -> HebpjResult {
    assert!(t.is_square(), "hebpj: T must be square");
    let n = t.rows();
    let mut a = t.clone();
    a.symmetrize();
    let drop_tol = n as f64 * f64::EPSILON * t.max_abs();

    let mut l = ComplexMatrix::identity(n);
    let mut piv: Vec<usize> = (0..n).collect();
    // pivot blocks: (start, Some(rotation, d1, d2)) for 2x2, (start, None) for 1x1
    let mut blocks: Vec<(usize, Option<(Rotation2, f64, f64)>)> = Vec::with_capacity(n);

    // symmetric interchange of indices i < j in the trailing block, touching
    // only the lower triangle
    let swap = |a: &mut ComplexMatrix, l: &mut ComplexMatrix, piv: &mut [usize], i: usize, j: usize, k: usize| {
        if i == j {
            return;
        }
        let (i, j) = (i.min(j), i.max(j));
        for c in k..i {
            a.col_mut(c).swap(i, j);
        }
        let (di, dj) = (a[(i, i)], a[(j, j)]);
        a[(i, i)] = dj;
        a[(j, j)] = di;
        for c in i + 1..j {
            let t = a[(c, i)];
            a[(c, i)] = a[(j, c)].conj();
            a[(j, c)] = t.conj();
        }
        a[(j, i)] = a[(j, i)].conj();
        for r in j + 1..n {
            let t = a[(r, i)];
            a[(r, i)] = a[(r, j)];
            a[(r, j)] = t;
        }
        for c in 0..k {
            l.col_mut(c).swap(i, j);
        }
        piv.swap(i, j);
    };

    // the search for step k + 1 runs inside the update of step k
    let mut next: Option<Search> = None;
    let mut k = 0;
    while k < n {
        let pv = next.take().unwrap_or_else(|| {
            let mut pv = Search::new(k);
            for c in k..n {
                pv.scan(c, &a.col(c)[c..n]);
            }
            pv
        });
        let Search { mu0, r, s, mu1, d } = pv;
        let mu0 = mu0.sqrt();
        if mu0.max(mu1) <= drop_tol {
            break;
        }
        if mu1 >= BP_ALPHA * mu0 {
            swap(&mut a, &mut l, &mut piv, k, d, k);
            let dk = a[(k, k)].re;
            for i in k + 1..n {
                l[(i, k)] = a[(i, k)] / dk;
            }
            let lk = l.col(k);
            let mut pv = Search::new(k + 1);
            for c in k + 1..n {
                let lc = lk[c].conj() * dk;
                let col = &mut a.col_mut(c)[c..n];
                for (x, &y) in col.iter_mut().zip(&lk[c..n]) {
                    *x -= y * lc;
                }
                pv.scan(c, col);
            }
            next = Some(pv);
            blocks.push((k, None));
            k += 1;
        } else {
            // s < r; bring s to k and r to k + 1
            swap(&mut a, &mut l, &mut piv, k, s, k);
            let r = if r == k { s } else { r };
            swap(&mut a, &mut l, &mut piv, k + 1, r, k);
            let (e11, e21, e22) = (a[(k, k)].re, a[(k + 1, k)], a[(k + 1, k + 1)].re);
            let det = e11 * e22 - e21.norm_sqr();
            // E^{-1} = [[e22, -e12], [-e21, e11]] / det with e12 = conj(e21)
            for i in k + 2..n {
                let (x, y) = (a[(i, k)], a[(i, k + 1)]);
                l[(i, k)] = (x * e22 - y * e21) / det;
                l[(i, k + 1)] = (y * e11 - x * e21.conj()) / det;
            }
            let (l0, l1) = (l.col(k), l.col(k + 1));
            let mut pv = Search::new(k + 2);
            for c in k + 2..n {
                // (L E)_{c,:}^* = conj of rows of A[:, k..k+2]
                let (ac0, ac1) = (a[(c, k)].conj(), a[(c, k + 1)].conj());
                let col = &mut a.col_mut(c)[c..n];
                for ((x, &y0), &y1) in col.iter_mut().zip(&l0[c..n]).zip(&l1[c..n]) {
                    *x -= y0 * ac0 + y1 * ac1;
                }
                pv.scan(c, col);
            }
            next = Some(pv);
            blocks.push((k, Some(Rotation2::hermitian_jacobi(e11, e21.conj(), e22))));
            k += 2;
        }
    }

    // rows of W L^*, W = |D|^{1/2} with 2x2 blocks diag(sqrt|d|) R^*
    let mut rows: Vec<(f64, usize)> = Vec::with_capacity(n);
    let mut w = ComplexMatrix::zeros(n, n);
    let mut two_by_two = 0;
    for &(k, blk) in &blocks {
        match blk {
            None => {
                let dk = a[(k, k)].re;
                let sc = dk.abs().sqrt();
                for c in k..n {
                    w[(k, c)] = l[(c, k)].conj() * sc;
                }
                rows.push((dk.signum(), k));
            }
            Some((rot, d1, d2)) => {
                let rs = rot.conj_transpose();
                let (s1, s2) = (d1.abs().sqrt(), d2.abs().sqrt());
                for c in k..n {
                    let (u0, u1) = (l[(c, k)].conj(), l[(c, k + 1)].conj());
                    w[(k, c)] = (rs.z11 * u0 + rs.z12 * u1) * s1;
                    w[(k + 1, c)] = (rs.z21 * u0 + rs.z22 * u1) * s2;
                }
                rows.push((d1.signum(), k));
                rows.push((d2.signum(), k + 1));
                two_by_two += 1;
            }
        }
    }

    let rank = rows.len();
    // stable sort: positive rows first
    let order: Vec<(f64, usize)> = rows
        .iter()
        .filter(|r| r.0 > 0.0)
        .chain(rows.iter().filter(|r| r.0 < 0.0))
        .copied()
        .collect();
    let n_plus = rows.iter().filter(|r| r.0 > 0.0).count();
    let mut m = ComplexMatrix::zeros(rank, n);
    for (out_row, &(_, src_row)) in order.iter().enumerate() {
        for (i, &p) in piv.iter().enumerate() {
            m[(out_row, p)] = w[(src_row, i)];
        }
    }
    HebpjResult {
        m,
        j: Signature::sorted(n_plus, rank - n_plus),
        rank,
        two_by_two,
    }
}
