//! Phase 1: the tall factored pencil `(F, J, G)` from per-atom blocks.

mod hebpj;

pub use hebpj::{hebpj, HebpjResult, BP_ALPHA};

use rayon::prelude::*;

use crate::kernel::{matmul, scale_rows, ComplexMatrix, Op, Signature, C64};
use crate::{Error, Result};

/// Per-atom input blocks.
#[derive(Clone, Debug)]
pub struct AtomBlock {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub u: Vec<f64>,
    pub taa: ComplexMatrix,
    pub tbb: ComplexMatrix,
    pub tab: ComplexMatrix,
}

impl AtomBlock {
    /// Checks shapes and that `taa`, `tbb` are Hermitian to `8ε` componentwise.
    pub fn new(
        a: ComplexMatrix,
        b: ComplexMatrix,
        u: Vec<f64>,
        taa: ComplexMatrix,
        tbb: ComplexMatrix,
        tab: ComplexMatrix,
    ) -> Result<Self> {
        let nl = a.rows();
        let ng = a.cols();
        let square = |m: &ComplexMatrix| m.rows() == nl && m.cols() == nl;
        if b.rows() != nl || b.cols() != ng || u.len() != nl || !square(&taa) || !square(&tbb) || !square(&tab) {
            return Err(Error::Dimension(format!(
                "atom blocks inconsistent with A of shape {nl}x{ng}"
            )));
        }
        for (name, t) in [("T_AA", &taa), ("T_BB", &tbb)] {
            for j in 0..nl {
                for i in 0..=j {
                    let (x, y) = (t[(i, j)], t[(j, i)].conj());
                    if (x - y).norm() > 8.0 * f64::EPSILON * x.norm().max(y.norm()) {
                        return Err(Error::Format(format!("{name} is not Hermitian at ({i}, {j})")));
                    }
                }
            }
        }
        Ok(Self { a, b, u, taa, tbb, tab })
    }

    pub fn nl(&self) -> usize {
        self.a.rows()
    }

    pub fn ng(&self) -> usize {
        self.a.cols()
    }
}

/// `(F, J, G)` representing `H = F^* J F` and `S = G^* G`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredPencil {
    pub f: ComplexMatrix,
    pub j: Signature,
    pub g: ComplexMatrix,
}

impl FactoredPencil {
    pub fn new(f: ComplexMatrix, j: Signature, g: ComplexMatrix) -> Result<Self> {
        if f.rows() != j.order() || g.rows() != j.order() || f.cols() != g.cols() {
            return Err(Error::Dimension(format!(
                "F {}x{}, G {}x{}, J of order {}",
                f.rows(),
                f.cols(),
                g.rows(),
                g.cols(),
                j.order()
            )));
        }
        Ok(Self { f, j, g })
    }

    pub fn rows(&self) -> usize {
        self.f.rows()
    }

    pub fn cols(&self) -> usize {
        self.f.cols()
    }
}

/// The Hermitian block matrix `[[T_AA, T_AB], [T_AB^*, T_BB]]`, built from its
/// upper triangle so that it is exactly Hermitian.
pub fn build_t(atom: &AtomBlock) -> ComplexMatrix {
    let nl = atom.nl();
    let mut t = ComplexMatrix::zeros(2 * nl, 2 * nl);
    t.set_submatrix(0, 0, &atom.taa);
    t.set_submatrix(0, nl, &atom.tab);
    t.set_submatrix(nl, nl, &atom.tbb);
    let n = 2 * nl;
    for j in 0..n {
        let d = t[(j, j)].re;
        t[(j, j)] = C64::new(d, 0.0);
        for i in j + 1..n {
            let v = t[(j, i)].conj();
            t[(i, j)] = v;
        }
    }
    t
}

/// Factors one atom: rows of `F` and `G` plus the row signs.
///
/// Rows dropped by a rank-deficient factorization are replaced by zero rows
/// placed between the positive and negative ones, keeping `J` sorted and the
/// row count of `F` equal to that of `G`.
fn assemble_atom(atom: &AtomBlock) -> (ComplexMatrix, Signature, ComplexMatrix) {
    let nl = atom.nl();
    let t = build_t(atom);
    let fac = hebpj(&t);
    let h = ComplexMatrix::vstack(&[&atom.a, &atom.b]);
    let mh = matmul(&fac.m, Op::N, &h, Op::N);
    let n_plus = fac.j.n_plus().unwrap_or(0);
    let missing = 2 * nl - fac.rank;
    let mut f = ComplexMatrix::zeros(2 * nl, atom.ng());
    f.set_submatrix(0, 0, &mh.submatrix(0, 0, n_plus, atom.ng()));
    f.set_submatrix(n_plus + missing, 0, &mh.submatrix(n_plus, 0, fac.rank - n_plus, atom.ng()));
    let j = Signature::sorted(n_plus + missing, fac.rank - n_plus);
    let mut ub = atom.b.clone();
    for c in 0..ub.cols() {
        for (z, &s) in ub.col_mut(c).iter_mut().zip(&atom.u) {
            *z *= s;
        }
    }
    let g = ComplexMatrix::vstack(&[&atom.a, &ub]);
    (f, j, g)
}

/// Stacks the per-atom factors into the tall pencil; atoms are processed in
/// parallel and the output does not depend on the worker count.
pub fn assemble(atoms: &[AtomBlock]) -> Result<FactoredPencil> {
    let first = atoms
        .first()
        .ok_or_else(|| Error::Dimension("no atoms".into()))?;
    let (nl, ng) = (first.nl(), first.ng());
    if let Some(k) = atoms.iter().position(|a| a.nl() != nl || a.ng() != ng) {
        return Err(Error::Dimension(format!(
            "atom {k} has shape {}x{}, expected {nl}x{ng}",
            atoms[k].nl(),
            atoms[k].ng()
        )));
    }
    let parts: Vec<_> = atoms.par_iter().map(assemble_atom).collect();
    let fs: Vec<&ComplexMatrix> = parts.iter().map(|p| &p.0).collect();
    let js: Vec<&Signature> = parts.iter().map(|p| &p.1).collect();
    let gs: Vec<&ComplexMatrix> = parts.iter().map(|p| &p.2).collect();
    FactoredPencil::new(
        ComplexMatrix::vstack(&fs),
        Signature::concat(&js),
        ComplexMatrix::vstack(&gs),
    )
}

/// Explicitly formed `H = F^* J F` and `S = G^* G`, symmetrized.
pub fn form_hs(p: &FactoredPencil) -> (ComplexMatrix, ComplexMatrix) {
    let mut h = matmul(&p.f, Op::C, &scale_rows(&p.f, &p.j), Op::N);
    h.symmetrize();
    let mut s = matmul(&p.g, Op::C, &p.g, Op::N);
    s.symmetrize();
    (h, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256StarStar;

    fn random_atom(nl: usize, ng: usize, rng: &mut impl Rng) -> AtomBlock {
        let mut taa = ComplexMatrix::random(nl, nl, rng);
        taa.symmetrize();
        let mut tbb = ComplexMatrix::random(nl, nl, rng);
        tbb.symmetrize();
        AtomBlock::new(
            ComplexMatrix::random(nl, ng, rng),
            ComplexMatrix::random(nl, ng, rng),
            (0..nl).map(|_| rng.gen::<f64>()).collect(),
            taa,
            tbb,
            ComplexMatrix::random(nl, nl, rng),
        )
        .unwrap()
    }

    fn direct_h(atoms: &[AtomBlock]) -> ComplexMatrix {
        let ng = atoms[0].ng();
        let mut h = ComplexMatrix::zeros(ng, ng);
        for a in atoms {
            let ha = ComplexMatrix::vstack(&[&a.a, &a.b]);
            let t = build_t(a);
            let n = t.rows();
            // naive triple loop
            for j in 0..ng {
                for i in 0..ng {
                    let mut s = C64::new(0.0, 0.0);
                    for k in 0..n {
                        for l in 0..n {
                            s += ha[(k, i)].conj() * t[(k, l)] * ha[(l, j)];
                        }
                    }
                    h[(i, j)] += s;
                }
            }
        }
        h
    }

    #[test]
    fn build_t_examples() {
        let z = ComplexMatrix::zeros(2, 2);
        let atom = AtomBlock::new(
            ComplexMatrix::zeros(2, 1),
            ComplexMatrix::zeros(2, 1),
            vec![1.0; 2],
            z.clone(),
            z.clone(),
            z.clone(),
        )
        .unwrap();
        assert_eq!(build_t(&atom), ComplexMatrix::zeros(4, 4));
        let atom = AtomBlock { taa: ComplexMatrix::identity(2), tbb: ComplexMatrix::identity(2), ..atom };
        assert_eq!(build_t(&atom), ComplexMatrix::identity(4));
        let mut rng = Xoshiro256StarStar::seed_from_u64(4);
        let t = build_t(&random_atom(3, 2, &mut rng));
        assert_eq!(t.sub(&t.conj_transpose()).frobenius_norm(), 0.0);
    }

    #[test]
    fn single_trivial_atom() {
        let n = 3;
        let atom = AtomBlock::new(
            ComplexMatrix::identity(n),
            ComplexMatrix::zeros(n, n),
            vec![1.0; n],
            ComplexMatrix::identity(n),
            ComplexMatrix::identity(n),
            ComplexMatrix::zeros(n, n),
        )
        .unwrap();
        let p = assemble(&[atom]).unwrap();
        assert!(p.j.is_identity());
        let stacked = ComplexMatrix::vstack(&[&ComplexMatrix::identity(n), &ComplexMatrix::zeros(n, n)]);
        assert_eq!(p.f, stacked);
        assert_eq!(p.g, stacked);
    }

    #[test]
    fn two_random_atoms_match_triple_product() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(21);
        let atoms = vec![random_atom(2, 3, &mut rng), random_atom(2, 3, &mut rng)];
        let p = assemble(&atoms).unwrap();
        assert_eq!(p.rows(), 8);
        let (h, s) = form_hs(&p);
        assert!(h.rel_diff(&direct_h(&atoms)) <= 1e-12);
        let mut s_ref = ComplexMatrix::zeros(3, 3);
        for a in &atoms {
            let ub = ComplexMatrix::from_fn(2, 3, |i, j| a.b[(i, j)] * a.u[i]);
            let g = ComplexMatrix::vstack(&[&a.a, &ub]);
            let gg = matmul(&g, Op::C, &g, Op::N);
            s_ref = ComplexMatrix::from_fn(3, 3, |i, j| s_ref[(i, j)] + gg[(i, j)]);
        }
        assert!(s.rel_diff(&s_ref) <= 1e-12);
    }

    #[test]
    fn zero_u_clears_lower_g_blocks() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(5);
        let mut atom = random_atom(3, 2, &mut rng);
        atom.u = vec![0.0; 3];
        let p = assemble(&[atom]).unwrap();
        assert_eq!(p.g.submatrix(3, 0, 3, 2).max_abs(), 0.0);
    }

    #[test]
    fn atom_order_does_not_change_grammians() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(8);
        let atoms: Vec<_> = (0..3).map(|_| random_atom(3, 4, &mut rng)).collect();
        let p = assemble(&atoms).unwrap();
        let rev: Vec<_> = atoms.iter().rev().cloned().collect();
        let q = assemble(&rev).unwrap();
        assert_eq!(p.f.submatrix(0, 0, 6, 4), q.f.submatrix(12, 0, 6, 4));
        assert_eq!(p.g.submatrix(6, 0, 6, 4), q.g.submatrix(6, 0, 6, 4));
        let (h1, s1) = form_hs(&p);
        let (h2, s2) = form_hs(&q);
        assert!(h1.rel_diff(&h2) < 1e-14 && s1.rel_diff(&s2) < 1e-14);
    }

    #[test]
    fn form_hs_examples() {
        let i = ComplexMatrix::identity(3);
        let p = FactoredPencil::new(i.clone(), Signature::identity(3), i.clone()).unwrap();
        let (h, s) = form_hs(&p);
        assert_eq!((h, s), (i.clone(), i.clone()));
        let p = FactoredPencil::new(i.clone(), Signature::sorted(0, 3), i.clone()).unwrap();
        let (h, _) = form_hs(&p);
        assert_eq!(h, ComplexMatrix::from_diag(&[-1.0; 3]));
    }

    #[test]
    fn form_hs_matches_naive_loop() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(40);
        let f = ComplexMatrix::random(40, 10, &mut rng);
        let g = ComplexMatrix::random(40, 10, &mut rng);
        let diag: Vec<i8> = (0..40).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        let j = Signature::encode(&diag).unwrap();
        let (h, _) = form_hs(&FactoredPencil::new(f.clone(), j, g).unwrap());
        let naive = ComplexMatrix::from_fn(10, 10, |a, b| {
            (0..40).map(|k| f[(k, a)].conj() * f[(k, b)] * f64::from(diag[k])).sum()
        });
        assert!(h.rel_diff(&naive) <= 1e-13);
    }
}
