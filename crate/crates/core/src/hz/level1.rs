use rayon::prelude::*;
use serde::Serialize;

use super::strategy::Strategy;
use super::transform::{compute_transforms, gram2, needs_transform, PivotBlock2, Transform2, TransformKind};
use crate::kernel::{vrotm, ComplexMatrix, Lanes, Signature, C64};
use crate::{Error, Result};

/// When a run of pointwise sweeps counts as converged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StopRule {
    /// A sweep applied no transformation at all (inner levels of blocking).
    NoTransforms,
    /// A sweep applied no big transformation (the outermost level).
    NoBig,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepStats {
    pub sweeps: usize,
    pub big: u64,
    pub all: u64,
    pub converged: bool,
    /// `(big, all)` for every sweep.
    pub history: Vec<(u64, u64)>,
}

struct PairCols<'a> {
    fp: &'a mut [C64],
    fq: &'a mut [C64],
    gp: &'a mut [C64],
    gq: &'a mut [C64],
    zp: &'a mut [C64],
    zq: &'a mut [C64],
}

fn lane_transforms(lanes: Lanes, blocks: &[PivotBlock2]) -> Vec<Result<Transform2>> {
    match lanes.get() {
        1 => compute_transforms::<1>(blocks),
        2 => compute_transforms::<2>(blocks),
        4 => compute_transforms::<4>(blocks),
        8 => compute_transforms::<8>(blocks),
        _ => compute_transforms::<16>(blocks),
    }
}

/// One subset of at most `V` pairs: grams, criterion, transforms, updates.
fn process_subset(
    subset: &mut [PairCols<'_>],
    j: &Signature,
    n: usize,
    lanes: Lanes,
) -> Result<(u64, u64)> {
    let mut blocks = Vec::with_capacity(subset.len());
    let mut active = Vec::with_capacity(subset.len());
    for pc in subset.iter() {
        let b = gram2(pc.fp, pc.fq, pc.gp, pc.gq, j, lanes)?;
        let (pre, _, _) = b.prescaled();
        active.push(needs_transform(&pre, n));
        blocks.push(b);
    }
    if !active.iter().any(|&a| a) {
        return Ok((0, 0));
    }
    let ts = lane_transforms(lanes, &blocks);
    let (mut big, mut all) = (0, 0);
    for ((pc, t), &on) in subset.iter_mut().zip(ts).zip(&active) {
        if !on {
            continue;
        }
        let t = t?;
        if t.kind == TransformKind::Identity || t.z.is_identity() {
            continue;
        }
        vrotm(pc.fp, pc.fq, &t.z);
        vrotm(pc.gp, pc.gq, &t.z);
        vrotm(pc.zp, pc.zq, &t.z);
        all += 1;
        big += u64::from(t.kind == TransformKind::Big);
    }
    Ok((big, all))
}

fn take_pair<'a>(cols: &mut [Option<&'a mut [C64]>], p: usize, q: usize) -> (&'a mut [C64], &'a mut [C64]) {
    let a = cols[p].take().expect("index used twice in a step");
    let b = cols[q].take().expect("index used twice in a step");
    (a, b)
}

/// One step of a strategy: all pairs in parallel, `lanes` pairs per task.
fn run_step(
    f: &mut ComplexMatrix,
    g: &mut ComplexMatrix,
    z: &mut ComplexMatrix,
    j: &Signature,
    step: &[(usize, usize)],
    n: usize,
    lanes: Lanes,
) -> Result<(u64, u64)> {
    let mut fc: Vec<Option<&mut [C64]>> = f.columns_mut().into_iter().map(Some).collect();
    let mut gc: Vec<Option<&mut [C64]>> = g.columns_mut().into_iter().map(Some).collect();
    let mut zc: Vec<Option<&mut [C64]>> = z.columns_mut().into_iter().map(Some).collect();
    let mut work: Vec<PairCols<'_>> = step
        .iter()
        .map(|&(p, q)| {
            let (fp, fq) = take_pair(&mut fc, p, q);
            let (gp, gq) = take_pair(&mut gc, p, q);
            let (zp, zq) = take_pair(&mut zc, p, q);
            PairCols { fp, fq, gp, gq, zp, zq }
        })
        .collect();
    let counts = work
        .par_chunks_mut(lanes.get())
        .map(|subset| process_subset(subset, j, n, lanes))
        .collect::<Result<Vec<_>>>()?;
    Ok(counts.into_iter().fold((0, 0), |(b, a), (bb, aa)| (b + bb, a + aa)))
}

/// Pointwise sweeps over `(F, G)` with `Z` accumulating the applied
/// transformations. `F` and `G` may differ in row count; all three must
/// have `strategy.n` columns.
pub fn sweep_level1(
    f: &mut ComplexMatrix,
    g: &mut ComplexMatrix,
    z: &mut ComplexMatrix,
    j: &Signature,
    strategy: &Strategy,
    lanes: Lanes,
    max_sweeps: usize,
    stop: StopRule,
) -> Result<SweepStats> {
    let n = strategy.n;
    if f.cols() != n || g.cols() != n || z.cols() != n {
        return Err(Error::Dimension(format!(
            "level 1: {} / {} / {} columns for a strategy of order {n}",
            f.cols(),
            g.cols(),
            z.cols()
        )));
    }
    if f.rows() != j.order() {
        return Err(Error::Dimension(format!("F has {} rows, J has order {}", f.rows(), j.order())));
    }
    let mut stats = SweepStats::default();
    while stats.sweeps < max_sweeps {
        let (mut big, mut all) = (0, 0);
        for step in &strategy.steps {
            let (b, a) = run_step(f, g, z, j, step, n, lanes)?;
            big += b;
            all += a;
        }
        stats.sweeps += 1;
        stats.big += big;
        stats.all += all;
        stats.history.push((big, all));
        log::debug!("level 1 sweep {}: {big} big, {all} total", stats.sweeps);
        let done = match stop {
            StopRule::NoTransforms => all == 0,
            StopRule::NoBig => big == 0,
        };
        if done {
            stats.converged = true;
            break;
        }
    }
    Ok(stats)
}
