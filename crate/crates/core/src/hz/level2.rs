use rayon::prelude::*;

use super::level1::{sweep_level1, StopRule, SweepStats};
use super::strategy::Strategy;
use super::transform::{needs_transform, PivotBlock2};
use super::{assemble_output, border, check_inputs, finalize_outputs, HzConfig, HzOutput};
use crate::assembly::hebpj;
use crate::kernel::{matmul, scale_rows, ComplexMatrix, Op, Signature, C64};
use crate::{Error, Result};

/// Widths of `blocks` block columns covering `n` columns: `⌈n/blocks⌉`
/// for the leading ones, one less for the rest.
pub fn block_widths(n: usize, blocks: usize) -> Vec<usize> {
    assert!(blocks > 0 && n >= blocks, "block_widths: need at least one column per block");
    let w = n.div_ceil(blocks);
    let wide = n - blocks * (w - 1);
    (0..blocks).map(|b| if b < wide { w } else { w - 1 }).collect()
}

/// `S = Ĝ^* Ĝ` for Hermitian positive definite `S`, by Cholesky with
/// diagonal pivoting: `P^T S P = R^* R` and `Ĝ = R P^T`.
pub fn cholesky_pivoted(s: &ComplexMatrix) -> Result<ComplexMatrix> {
    assert!(s.is_square());
    let k = s.rows();
    let mut a = s.clone();
    a.symmetrize();
    let mut piv: Vec<usize> = (0..k).collect();
    let mut r = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        let (best, dmax) = (i..k)
            .map(|c| (c, a[(c, c)].re))
            .fold((i, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        if !(dmax > 0.0 && dmax.is_finite()) {
            return Err(Error::IndefiniteS(format!("block pivot {i} of {k}: diagonal {dmax:e}")));
        }
        if best != i {
            // symmetric interchange on the upper triangle of the trailing block
            let j = best;
            let (di, dj) = (a[(i, i)], a[(j, j)]);
            a[(i, i)] = dj;
            a[(j, j)] = di;
            for c in j + 1..k {
                let t = a[(i, c)];
                a[(i, c)] = a[(j, c)];
                a[(j, c)] = t;
            }
            for m in i + 1..j {
                let t = a[(i, m)];
                a[(i, m)] = a[(m, j)].conj();
                a[(m, j)] = t.conj();
            }
            a[(i, j)] = a[(i, j)].conj();
            r.swap_cols(i, j);
            piv.swap(i, j);
        }
        let rii = dmax.sqrt();
        r[(i, i)] = rii.into();
        let ri: Vec<C64> = (i + 1..k).map(|c| a[(i, c)] / rii).collect();
        for (c, &v) in (i + 1..k).zip(&ri) {
            r[(i, c)] = v;
        }
        for c in i + 1..k {
            let ric = ri[c - i - 1];
            let col = &mut a.col_mut(c)[i + 1..=c];
            for (x, rr) in col.iter_mut().zip(&ri) {
                *x -= rr.conj() * ric;
            }
        }
    }
    let mut g = ComplexMatrix::zeros(k, k);
    for (c, &p) in piv.iter().enumerate() {
        g.col_mut(p).copy_from_slice(r.col(c));
    }
    Ok(g)
}

struct Block {
    f: ComplexMatrix,
    g: ComplexMatrix,
    z: ComplexMatrix,
}

fn hcat(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows(), a.cols() + b.cols());
    out.set_submatrix(0, 0, a);
    out.set_submatrix(0, a.cols(), b);
    out
}

/// `[P Q]^* W [P Q]` (`W = J` or `I`) from its three distinct blocks.
fn pair_gram(p: &ComplexMatrix, q: &ComplexMatrix, j: Option<&Signature>) -> ComplexMatrix {
    let (wp, wq) = match j {
        Some(j) => (scale_rows(p, j), scale_rows(q, j)),
        None => (p.clone(), q.clone()),
    };
    let (a, b) = (p.cols(), q.cols());
    let mut out = ComplexMatrix::zeros(a + b, a + b);
    out.set_submatrix(0, 0, &matmul(p, Op::C, &wp, Op::N));
    out.set_submatrix(a, a, &matmul(q, Op::C, &wq, Op::N));
    let pq = matmul(p, Op::C, &wq, Op::N);
    out.set_submatrix(0, a, &pq);
    out.set_submatrix(a, 0, &pq.conj_transpose());
    out.symmetrize();
    out
}

/// True when no column pair of the pencil `(h, s)` passes the
/// transformation criterion at order `n`, so an inner sweep would do nothing.
fn settled(h: &ComplexMatrix, s: &ComplexMatrix, n: usize) -> bool {
    let k = h.rows();
    if (0..k).any(|i| !(s[(i, i)].re > 0.0)) {
        return false;
    }
    (1..k).all(|q| {
        (0..q).all(|p| {
            let b = PivotBlock2 {
                hpp: h[(p, p)].re,
                hqq: h[(q, q)].re,
                hpq: h[(p, q)],
                spp: s[(p, p)].re,
                sqq: s[(q, q)].re,
                spq: s[(p, q)],
            };
            !needs_transform(&b.prescaled().0, n)
        })
    })
}

fn split(m: &ComplexMatrix, left: usize) -> (ComplexMatrix, ComplexMatrix) {
    (
        m.submatrix(0, 0, m.rows(), left),
        m.submatrix(0, left, m.rows(), m.cols() - left),
    )
}

#[derive(Clone, Copy, Default)]
struct PairCounts {
    big: u64,
    all: u64,
    inner_sweeps: u64,
}

/// Diagonalizes the pencil of one block-column pair and updates the pair.
fn process_pair(
    bp: &mut Block,
    bq: &mut Block,
    j: &Signature,
    strategies: &[Strategy],
    cfg: &HzConfig,
) -> Result<PairCounts> {
    let wp = bp.f.cols();
    let k = wp + bq.f.cols();
    let h = pair_gram(&bp.f, &bq.f, Some(j));
    let s = pair_gram(&bp.g, &bq.g, None);
    if settled(&h, &s, k.next_multiple_of(2)) {
        return Ok(PairCounts::default());
    }
    let fac = hebpj(&h);
    if fac.rank < k {
        return Err(Error::RankDeficientH);
    }
    let ghat = cholesky_pivoted(&s)?;
    let zhat = ComplexMatrix::identity(k);
    let (mut fw, mut gw, mut zw, jw) = if k % 2 == 1 {
        let (a, b, c, d, _) = border(&fac.m, &ghat, &zhat, &fac.j);
        (a, b, c, d)
    } else {
        (fac.m, ghat, zhat, fac.j)
    };
    let kk = fw.cols();
    let strategy = strategies
        .iter()
        .find(|s| s.n == kk)
        .expect("inner strategy prepared for every pair order");
    let stats = sweep_level1(
        &mut fw,
        &mut gw,
        &mut zw,
        &jw,
        strategy,
        cfg.lanes,
        cfg.inner_sweeps(),
        StopRule::NoTransforms,
    )?;
    let counts = PairCounts {
        big: stats.big,
        all: stats.all,
        inner_sweeps: stats.sweeps as u64,
    };
    if stats.all == 0 {
        return Ok(counts);
    }
    // normalized inner Z keeps the block columns at unit scale; a bordered
    // column only ever multiplies itself, so dropping it is exact
    let zn = finalize_outputs(&fw, &gw, &zw, &jw, cfg.lanes, false)?.z.submatrix(0, 0, k, k);
    let fpair = hcat(&bp.f, &bq.f);
    let gpair = hcat(&bp.g, &bq.g);
    let fnew = matmul(&fpair, Op::N, &zn, Op::N);
    let gnew = matmul(&gpair, Op::N, &zn, Op::N);
    let znew = matmul(&hcat(&bp.z, &bq.z), Op::N, &zn, Op::N);
    (bp.f, bq.f) = split(&fnew, wp);
    (bp.g, bq.g) = split(&gnew, wp);
    (bp.z, bq.z) = split(&znew, wp);
    Ok(counts)
}

/// Two-level blocked run: `2 * threads` block columns, exchanged between
/// workers by the outer strategy; each block pair is diagonalized by an
/// inner pointwise run on its square factors.
pub fn hz_level2(f: &ComplexMatrix, g: &ComplexMatrix, j: &Signature, cfg: &HzConfig) -> Result<HzOutput> {
    check_inputs(f, g, j)?;
    cfg.validate()?;
    let n = f.cols();
    let nb = 2 * cfg.threads;
    if n <= nb {
        return Err(Error::Dimension(format!(
            "{n} columns cannot fill {nb} block columns; use the pointwise variant"
        )));
    }
    let widths = block_widths(n, nb);
    let mut blocks: Vec<Option<Block>> = Vec::with_capacity(nb);
    let mut start = 0;
    for &w in &widths {
        let zb = ComplexMatrix::from_fn(n, w, |r, c| if r == start + c { 1.0.into() } else { 0.0.into() });
        blocks.push(Some(Block {
            f: f.submatrix(0, start, f.rows(), w),
            g: g.submatrix(0, start, g.rows(), w),
            z: zb,
        }));
        start += w;
    }
    let outer = Strategy::with_fallback(cfg.outer, nb)?;
    let mut orders: Vec<usize> = widths
        .iter()
        .flat_map(|&a| widths.iter().map(move |&b| (a + b).next_multiple_of(2)))
        .collect();
    orders.sort_unstable();
    orders.dedup();
    let strategies = orders
        .iter()
        .map(|&k| Strategy::with_fallback(cfg.inner, k))
        .collect::<Result<Vec<_>>>()?;

    let mut stats = SweepStats::default();
    let mut inner_sweeps = 0u64;
    while stats.sweeps < cfg.max_sweeps {
        let (mut big, mut all) = (0, 0);
        for step in &outer.steps {
            let work: Vec<(usize, usize, Block, Block)> = step
                .iter()
                .map(|&(p, q)| {
                    let bp = blocks[p].take().expect("block used twice in a step");
                    let bq = blocks[q].take().expect("block used twice in a step");
                    (p, q, bp, bq)
                })
                .collect();
            let done: Vec<_> = work
                .into_par_iter()
                .map(|(p, q, mut bp, mut bq)| {
                    let r = process_pair(&mut bp, &mut bq, j, &strategies, cfg);
                    (p, q, bp, bq, r)
                })
                .collect();
            let mut first_err = None;
            for (p, q, bp, bq, r) in done {
                blocks[p] = Some(bp);
                blocks[q] = Some(bq);
                match r {
                    Ok(c) => {
                        big += c.big;
                        all += c.all;
                        inner_sweeps += c.inner_sweeps;
                    }
                    Err(e) => {
                        first_err.get_or_insert(e);
                    }
                }
            }
            if let Some(e) = first_err {
                return Err(e);
            }
        }
        stats.sweeps += 1;
        stats.big += big;
        stats.all += all;
        stats.history.push((big, all));
        log::debug!("block sweep {}: {big} big, {all} total", stats.sweeps);
        if big == 0 {
            stats.converged = true;
            break;
        }
    }
    if !stats.converged {
        log::warn!("no convergence within {} block sweeps", cfg.max_sweeps);
    }
    let mut fo = ComplexMatrix::zeros(f.rows(), n);
    let mut go = ComplexMatrix::zeros(g.rows(), n);
    let mut zo = ComplexMatrix::zeros(n, n);
    let mut c0 = 0;
    for b in blocks.into_iter().map(|b| b.expect("all blocks returned")) {
        fo.set_submatrix(0, c0, &b.f);
        go.set_submatrix(0, c0, &b.g);
        zo.set_submatrix(0, c0, &b.z);
        c0 += b.f.cols();
    }
    assemble_output(fo, go, zo, j, cfg, stats, inner_sweeps, cfg.variant)
}
