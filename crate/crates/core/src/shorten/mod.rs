//! Phase 2: square factors from the tall pencil by a hyperbolic QR of `F̃`
//! and an ordinary QR of the column-prepermuted `G̃`.

mod jqr;
mod tsqr;

pub use jqr::{
    apply_reflector, jqr, pivot_select, reduce_single, reflector, urv_step, JqrResult, PivotKind,
    PivotSelection, Reflector, UrvPivot,
};
pub use tsqr::tsqr;

use rayon::prelude::*;

use crate::assembly::FactoredPencil;
use crate::kernel::{ComplexMatrix, Lanes};
use crate::{Error, Result};

/// Column gather: column `c` of the result is column `perm[c]` of `gt`.
pub fn prepermute(gt: &ComplexMatrix, perm: &[usize]) -> Result<ComplexMatrix> {
    let n = gt.cols();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::InvalidPermutation);
    }
    let mut out = ComplexMatrix::zeros(gt.rows(), n);
    out.columns_mut()
        .into_par_iter()
        .zip(perm.par_iter())
        .for_each(|(dst, &p)| dst.copy_from_slice(gt.col(p)));
    Ok(out)
}

/// Square pencil `(F, J, G)` plus the column permutation relating it to the
/// tall one: eigenvector rows of the tall problem are `z̃[perm[c]] = z[c]`.
#[derive(Clone, Debug)]
pub struct Shortened {
    pub pencil: FactoredPencil,
    pub perm: Vec<usize>,
    pub two_by_two_count: usize,
}

pub fn shorten(p: &FactoredPencil, lanes: Lanes) -> Result<Shortened> {
    let q = jqr(&p.f, &p.j, lanes)?;
    let g = tsqr(&prepermute(&p.g, &q.col_perm)?, lanes);
    Ok(Shortened {
        pencil: FactoredPencil::new(q.f, q.j, g)?,
        perm: q.col_perm,
        two_by_two_count: q.two_by_two_count,
    })
}
