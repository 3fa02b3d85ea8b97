use rayon::prelude::*;

use crate::assembly::BP_ALPHA;
use crate::kernel::{jdot, jnormsq, vrotm, ComplexMatrix, Lanes, Rotation2, Signature, C64};
use crate::{Error, Result};

/// Pivot chosen by [`pivot_select`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotKind {
    Single,
    Double,
}

/// Outcome of the pivot search: the kind and the column swaps (relative to
/// the trailing block) that bring the pivot column(s) to the front.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotSelection {
    pub kind: PivotKind,
    pub swaps: Vec<(usize, usize)>,
}

/// Diagonal pivoting supplemented with partial pivoting on the implicit
/// `J_k`-Grammian of the trailing columns.
///
/// Ties are broken by the smallest index. `cols` is updated in place by the
/// returned swaps.
pub fn pivot_select(cols: &mut [&[C64]], jk: &Signature, lanes: Lanes) -> PivotSelection {
    let n = cols.len();
    assert!(n > 0, "pivot_select: no columns");
    let mut swaps = Vec::new();
    let hdiag: Vec<f64> = cols.iter().map(|c| jnormsq(c, jk, lanes)).collect();
    let j = argmax(hdiag.iter().map(|h| h.abs()));
    if j > 0 {
        cols.swap(0, j);
        swaps.push((0, j));
    }
    if n == 1 {
        return PivotSelection { kind: PivotKind::Single, swaps };
    }
    let h11 = hdiag[j].abs();
    let row1: Vec<f64> = (1..n).map(|l| jdot(cols[0], cols[l], jk, lanes).norm()).collect();
    let i = 1 + argmax(row1.iter().copied());
    let h1i = row1[i - 1];
    if h11 >= BP_ALPHA * h1i {
        return PivotSelection { kind: PivotKind::Single, swaps };
    }
    let rowi: Vec<f64> = (0..n)
        .map(|l| if l == i { 0.0 } else { jdot(cols[i], cols[l], jk, lanes).norm() })
        .collect();
    let hij = rowi[argmax(rowi.iter().copied())];
    if h11 * hij >= BP_ALPHA * h1i * h1i {
        return PivotSelection { kind: PivotKind::Single, swaps };
    }
    let hii = jnormsq(cols[i], jk, lanes).abs();
    if hii >= BP_ALPHA * hij {
        cols.swap(0, i);
        swaps.push((0, i));
        return PivotSelection { kind: PivotKind::Single, swaps };
    }
    if i != 1 {
        cols.swap(1, i);
        swaps.push((1, i));
    }
    PivotSelection { kind: PivotKind::Double, swaps }
}

/// Index of the first maximum.
fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Hyperbolic Householder reflector `H(s) = I + τ s s^* J` mapping a column
/// (after the optional row swap `0 <-> row_swap`) to `-c1 e1`.
#[derive(Clone, Debug)]
pub struct Reflector {
    pub s: Vec<C64>,
    pub tau: f64,
    pub c1: C64,
    pub row_swap: Option<usize>,
}

/// Builds the reflector for `f` with respect to `jk`.
///
/// When the sign of `f^* J f` differs from `J_11`, the correctly signed row
/// with the largest `|f_l|` is chosen for a swap; the returned `s` refers to
/// the swapped ordering. `f^* J f = 0` is reported as a degenerate pivot at
/// step 0; callers translate the step.
pub fn reflector(f: &[C64], jk: &Signature, lanes: Lanes) -> Result<Reflector> {
    let h = jnormsq(f, jk, lanes);
    if h == 0.0 || !h.is_finite() {
        return Err(Error::DegeneratePivot { step: 0 });
    }
    let want = h.signum();
    let mut row_swap = None;
    if jk.sign(0) != want {
        let mut best: Option<(usize, f64)> = None;
        for (l, &sign) in jk.decode().iter().enumerate() {
            if f64::from(sign) == want {
                let v = f[l].norm();
                if best.is_none_or(|b| v > b.1) {
                    best = Some((l, v));
                }
            }
        }
        let (l, _) = best.ok_or(Error::DegeneratePivot { step: 0 })?;
        row_swap = Some(l);
    }
    let mut s = f.to_vec();
    if let Some(l) = row_swap {
        s.swap(0, l);
    }
    let f11 = s[0];
    let r1 = f11.norm();
    let phase = if r1 == 0.0 { C64::new(1.0, 0.0) } else { f11 / r1 };
    let root = h.abs().sqrt();
    let c1 = phase * root;
    s[0] += c1;
    let tau = -1.0 / (h + root * r1 * want);
    Ok(Reflector { s, tau, c1, row_swap })
}

/// `col ← col + τ s (s^* J col)`.
pub fn apply_reflector(s: &[C64], tau: f64, jk: &Signature, col: &mut [C64], lanes: Lanes) {
    let w = jdot(s, col, jk, lanes) * tau;
    if w == C64::new(0.0, 0.0) {
        return;
    }
    for (c, si) in col.iter_mut().zip(s) {
        *c += si * w;
    }
}

fn swap_signs(jd: &mut [i8], l: Option<usize>) {
    if let Some(l) = l {
        jd.swap(0, l);
    }
}

/// Row swap plus reflector applied to every column in `rest`.
fn apply_to_rest(rest: &mut [&mut [C64]], r: &Reflector, jk: &Signature, lanes: Lanes) {
    rest.par_iter_mut().for_each(|c| {
        if let Some(l) = r.row_swap {
            c.swap(0, l);
        }
        apply_reflector(&r.s, r.tau, jk, c, lanes);
    });
}

/// Reduces one pivot column to `-c1 e1`, transforming the remaining trailing
/// columns and the signs `jd` alongside.
pub fn reduce_single(
    f: &mut [C64],
    rest: &mut [&mut [C64]],
    jd: &mut [i8],
    lanes: Lanes,
) -> Result<Reflector> {
    let jk = Signature::encode(jd)?;
    let r = reflector(f, &jk, lanes)?;
    swap_signs(jd, r.row_swap);
    let jk = Signature::encode(jd)?;
    apply_to_rest(rest, &r, &jk, lanes);
    f.fill(C64::new(0.0, 0.0));
    f[0] = -r.c1;
    Ok(r)
}

/// A 2x2 pivot step: rotation, two reflectors and the top block left behind.
#[derive(Clone, Debug)]
pub struct UrvPivot {
    pub rotation: Rotation2,
    pub first: Reflector,
    pub second: Reflector,
    pub top: [[C64; 2]; 2],
}

/// Reduces the pivot pair `[p q]` to a full 2x2 top block with zeros below.
///
/// The pair is rotated to make it mutually `J`-orthogonal, reduced by two
/// successive reflectors and rotated back; `rest` receives the same row swaps
/// and reflectors.
pub fn urv_step(
    p: &mut [C64],
    q: &mut [C64],
    rest: &mut [&mut [C64]],
    jd: &mut [i8],
    lanes: Lanes,
) -> Result<UrvPivot> {
    let len = p.len();
    assert!(len >= 2 && q.len() == len && jd.len() == len, "urv_step: shape mismatch");
    let jk = Signature::encode(jd)?;
    let a = jnormsq(p, &jk, lanes);
    let c = jnormsq(q, &jk, lanes);
    let b = jdot(p, q, &jk, lanes);
    let (rotation, d1, d2) = Rotation2::hermitian_jacobi(a, b, c);
    if d1 == 0.0 || d2 == 0.0 {
        return Err(Error::DegeneratePivot { step: 0 });
    }
    vrotm(p, q, &rotation);

    let first = reflector(p, &jk, lanes)?;
    swap_signs(jd, first.row_swap);
    let jk = Signature::encode(jd)?;
    if let Some(l) = first.row_swap {
        q.swap(0, l);
    }
    apply_reflector(&first.s, first.tau, &jk, q, lanes);
    apply_to_rest(rest, &first, &jk, lanes);
    p.fill(C64::new(0.0, 0.0));
    p[0] = -first.c1;
    // J-orthogonality to the reduced first column forces this entry to zero
    q[0] = C64::new(0.0, 0.0);

    let jk2 = jk.tail(1);
    let second = reflector(&q[1..], &jk2, lanes).map_err(|_| Error::DegeneratePivot { step: 1 })?;
    swap_signs(&mut jd[1..], second.row_swap);
    let jk2 = Signature::encode(&jd[1..])?;
    let mut tails: Vec<&mut [C64]> = rest.iter_mut().map(|c| &mut c[1..]).collect();
    apply_to_rest(&mut tails, &second, &jk2, lanes);
    q[1..].fill(C64::new(0.0, 0.0));
    q[1] = -second.c1;

    let back = rotation.conj_transpose();
    let (top_p, top_q) = (&mut p[..2], &mut q[..2]);
    vrotm(top_p, top_q, &back);
    Ok(UrvPivot {
        rotation,
        top: [[p[0], q[0]], [p[1], q[1]]],
        first,
        second,
    })
}

/// Hyperbolic QR factorization `P1 F̃ P2 = Q_F F`.
#[derive(Clone, Debug)]
pub struct JqrResult {
    /// Square, block upper triangular with explicit zeros below the blocks.
    pub f: ComplexMatrix,
    pub j: Signature,
    /// Column gather: column `c` of `F̃ P2` is column `col_perm[c]` of `F̃`.
    pub col_perm: Vec<usize>,
    /// Row swaps `(a, b)` in the order they were applied.
    pub row_swaps: Vec<(usize, usize)>,
    /// Column `k` holds `s_k` with its leading `k` (or `k - 1`) rows zero.
    pub reflectors: ComplexMatrix,
    pub tau: Vec<f64>,
    pub two_by_two_count: usize,
}

/// JQR of the tall `F̃` with respect to `J̃`.
pub fn jqr(ft: &ComplexMatrix, jt: &Signature, lanes: Lanes) -> Result<JqrResult> {
    let (m, n) = (ft.rows(), ft.cols());
    if jt.order() != m {
        return Err(Error::Dimension(format!("J̃ of order {} for {m} rows", jt.order())));
    }
    if m < n {
        return Err(Error::Dimension(format!("JQR needs m >= n, got {m}x{n}")));
    }
    let mut w = ft.clone();
    let mut jd = jt.decode();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut row_swaps = Vec::new();
    let mut refl = ComplexMatrix::zeros(m, n);
    let mut tau = vec![0.0; n];
    let mut two_by_two_count = 0;
    let mut growth = 0.0f64;

    let mut k = 0;
    while k < n {
        let jk = Signature::encode(&jd[k..])?;
        let sel = {
            let mut cols: Vec<&[C64]> = (k..n).map(|c| &w.col(c)[k..]).collect();
            pivot_select(&mut cols, &jk, lanes)
        };
        for &(a, b) in &sel.swaps {
            w.swap_cols(k + a, k + b);
            col_perm.swap(k + a, k + b);
        }
        let mut columns = w.columns_mut();
        let (left, right) = columns.split_at_mut(k + 1);
        let pivot = &mut left[k][k..];
        match sel.kind {
            PivotKind::Single => {
                let mut rest: Vec<&mut [C64]> = right.iter_mut().map(|c| &mut c[k..]).collect();
                let r = reduce_single(pivot, &mut rest, &mut jd[k..], lanes)
                    .map_err(|e| step_error(e, k))?;
                if let Some(l) = r.row_swap {
                    row_swaps.push((k, k + l));
                }
                growth = growth.max(r.c1.norm());
                refl.col_mut(k)[k..].copy_from_slice(&r.s);
                tau[k] = r.tau;
                k += 1;
            }
            PivotKind::Double => {
                let (second, others) = right.split_at_mut(1);
                let q = &mut second[0][k..];
                let mut rest: Vec<&mut [C64]> = others.iter_mut().map(|c| &mut c[k..]).collect();
                let u = urv_step(pivot, q, &mut rest, &mut jd[k..], lanes).map_err(|e| step_error(e, k))?;
                if let Some(l) = u.first.row_swap {
                    row_swaps.push((k, k + l));
                }
                if let Some(l) = u.second.row_swap {
                    row_swaps.push((k + 1, k + 1 + l));
                }
                growth = growth.max(u.first.c1.norm()).max(u.second.c1.norm());
                refl.col_mut(k)[k..].copy_from_slice(&u.first.s);
                refl.col_mut(k + 1)[k + 1..].copy_from_slice(&u.second.s);
                tau[k] = u.first.tau;
                tau[k + 1] = u.second.tau;
                two_by_two_count += 1;
                k += 2;
            }
        }
    }
    log::debug!(
        "jqr {m}x{n}: {two_by_two_count} 2x2 pivots, max |c1| {growth:.3e}, max |F̃| {:.3e}",
        ft.max_abs()
    );
    Ok(JqrResult {
        f: w.submatrix(0, 0, n, n),
        j: Signature::encode(&jd[..n])?,
        col_perm,
        row_swaps,
        reflectors: refl,
        tau,
        two_by_two_count,
    })
}

fn step_error(e: Error, k: usize) -> Error {
    match e {
        Error::DegeneratePivot { step } => Error::DegeneratePivot { step: k + step },
        other => other,
    }
}
