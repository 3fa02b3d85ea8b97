//! Implicit Hari-Zimmermann one-sided Jacobi method.
//!
//! Columns of `F` and `G` are transformed in pairs until `F^* J F` and
//! `G^* G` are (numerically) diagonal, with the product of all transforms
//! accumulated in `Z`.

mod level1;
mod level2;
mod strategy;
mod transform;

use serde::{Deserialize, Serialize};

pub use level1::{sweep_level1, StopRule, SweepStats};
pub use level2::{block_widths, cholesky_pivoted, hz_level2};
pub use strategy::{strategy_me, strategy_mm, Strategy, StrategyKind};
pub use transform::{
    compute_transform, compute_transforms, gram2, nan_semantics_ok, needs_transform, PivotBlock2, Transform2,
    TransformKind,
};

use crate::kernel::{jnormsq, normsq, ComplexMatrix, Lanes, Signature, C64};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Pointwise, vector-parallel.
    Vp,
    /// Blocked, one inner sweep per block pair.
    Bo,
    /// Blocked, inner sweeps to convergence.
    Fb,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vp" => Ok(Self::Vp),
            "bo" => Ok(Self::Bo),
            "fb" => Ok(Self::Fb),
            _ => Err(Error::Config(format!("unknown variant {s:?}, expected vp, bo or fb"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HzConfig {
    pub variant: Variant,
    /// Strategy of the outermost level (pairs of columns for VP, pairs of
    /// block columns otherwise).
    pub outer: StrategyKind,
    pub inner: StrategyKind,
    pub max_sweeps: usize,
    pub threads: usize,
    pub lanes: Lanes,
    /// Also return `U = F' Σ'_F^{-1}` and `V = G' Σ'_G^{-1}`.
    pub want_uv: bool,
}

impl Default for HzConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Bo,
            outer: StrategyKind::Me,
            inner: StrategyKind::Mm,
            max_sweeps: 30,
            threads: 1,
            lanes: Lanes::DEFAULT,
            want_uv: false,
        }
    }
}

impl HzConfig {
    /// Sweep cap of the inner level for the blocked variants.
    pub fn inner_sweeps(&self) -> usize {
        match self.variant {
            Variant::Fb => self.max_sweeps,
            _ => 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_sweeps == 0 {
            return Err(Error::Config("the sweep cap must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::Config("at least one thread is required".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct HzOutput {
    /// `F' = F Z'`.
    pub f: ComplexMatrix,
    /// `G' = G Z'`.
    pub g: ComplexMatrix,
    /// `Z = Z' Σ^{-1}`.
    pub z: ComplexMatrix,
    pub sigma_f: Vec<f64>,
    pub sigma_g: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Signed generalized eigenvalues `f_i^* J f_i / g_i^* g_i`.
    pub lambda: Vec<f64>,
    pub u: Option<ComplexMatrix>,
    pub v: Option<ComplexMatrix>,
    pub stats: SweepStats,
    /// Total inner sweeps over all block pairs (blocked variants only).
    pub inner_sweeps: u64,
    pub variant: Variant,
}

/// Output quantities derived from converged `F'`, `G'`, `Z'`.
#[derive(Clone, Debug)]
pub struct Finalized {
    pub z: ComplexMatrix,
    pub sigma_f: Vec<f64>,
    pub sigma_g: Vec<f64>,
    pub sigma: Vec<f64>,
    pub lambda: Vec<f64>,
    pub u: Option<ComplexMatrix>,
    pub v: Option<ComplexMatrix>,
}

pub fn finalize_outputs(
    f: &ComplexMatrix,
    g: &ComplexMatrix,
    z: &ComplexMatrix,
    j: &Signature,
    lanes: Lanes,
    want_uv: bool,
) -> Result<Finalized> {
    let n = f.cols();
    let mut out = Finalized {
        z: z.clone(),
        sigma_f: Vec::with_capacity(n),
        sigma_g: Vec::with_capacity(n),
        sigma: Vec::with_capacity(n),
        lambda: Vec::with_capacity(n),
        u: want_uv.then(|| f.clone()),
        v: want_uv.then(|| g.clone()),
    };
    for i in 0..n {
        let hf = jnormsq(f.col(i), j, lanes);
        let sg = normsq(g.col(i), lanes);
        let (sfp, sgp) = (hf.abs().sqrt(), sg.sqrt());
        if !(sgp > 0.0) {
            return Err(Error::InfiniteEigenvalue(i));
        }
        let s = sfp.hypot(sgp);
        let sign = if hf < 0.0 { -1.0 } else { 1.0 };
        out.sigma_f.push(sfp / s);
        out.sigma_g.push(sgp / s);
        out.sigma.push(s);
        out.lambda.push(sign * (hf.abs() / sg));
        out.z.scale_col(i, 1.0 / s);
        if let Some(u) = out.u.as_mut() {
            if sfp > 0.0 {
                u.scale_col(i, 1.0 / sfp);
            }
        }
        if let Some(v) = out.v.as_mut() {
            v.scale_col(i, 1.0 / sgp);
        }
    }
    Ok(out)
}

/// Where [`border`] put the extra row of `F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bordered {
    pub f_row: usize,
}

/// Extends an odd-order problem by one column that is a unit vector in
/// both `F` and `G` (and in `Z`), so that it never couples with the others.
/// The new `J` entry is `+1`, placed to keep a sorted `J` sorted.
pub fn border(
    f: &ComplexMatrix,
    g: &ComplexMatrix,
    z: &ComplexMatrix,
    j: &Signature,
) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix, Signature, Bordered) {
    let n = f.cols();
    let (m, r) = (f.rows(), j.order());
    assert_eq!(m, r);
    let (row, jb) = match j.n_plus() {
        Some(p) => (p, Signature::sorted(p + 1, m - p)),
        None => (m, Signature::concat(&[j, &Signature::identity(1)])),
    };
    let mut fb = ComplexMatrix::zeros(m + 1, n + 1);
    for c in 0..n {
        let src = f.col(c);
        let dst = fb.col_mut(c);
        dst[..row].copy_from_slice(&src[..row]);
        dst[row + 1..].copy_from_slice(&src[row..]);
    }
    fb[(row, n)] = C64::new(1.0, 0.0);
    let corner = |a: &ComplexMatrix| {
        let mut b = ComplexMatrix::zeros(a.rows() + 1, a.cols() + 1);
        b.set_submatrix(0, 0, a);
        b[(a.rows(), a.cols())] = C64::new(1.0, 0.0);
        b
    };
    (fb, corner(g), corner(z), jb, Bordered { f_row: row })
}

/// Inverse of [`border`] on the transformed matrices.
pub fn strip_border(
    f: &ComplexMatrix,
    g: &ComplexMatrix,
    z: &ComplexMatrix,
    b: Bordered,
) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let n = f.cols() - 1;
    let m = f.rows() - 1;
    let mut fs = ComplexMatrix::zeros(m, n);
    for c in 0..n {
        let src = f.col(c);
        let dst = fs.col_mut(c);
        dst[..b.f_row].copy_from_slice(&src[..b.f_row]);
        dst[b.f_row..].copy_from_slice(&src[b.f_row + 1..]);
    }
    (
        fs,
        g.submatrix(0, 0, g.rows() - 1, n),
        z.submatrix(0, 0, z.rows() - 1, n),
    )
}

fn check_inputs(f: &ComplexMatrix, g: &ComplexMatrix, j: &Signature) -> Result<()> {
    if f.rows() != j.order() {
        return Err(Error::Dimension(format!("F has {} rows, J has order {}", f.rows(), j.order())));
    }
    if f.cols() != g.cols() || f.cols() == 0 {
        return Err(Error::Dimension(format!("F has {} columns, G has {}", f.cols(), g.cols())));
    }
    if !nan_semantics_ok() {
        return Err(Error::Config("f64::min/max do not ignore NaN operands on this target".into()));
    }
    Ok(())
}

/// Pointwise run: sweeps over single column pairs, stopping after a sweep
/// without big transformations.
pub fn hz_level1(f: &ComplexMatrix, g: &ComplexMatrix, j: &Signature, cfg: &HzConfig) -> Result<HzOutput> {
    check_inputs(f, g, j)?;
    cfg.validate()?;
    let n = f.cols();
    let z = ComplexMatrix::identity(n);
    let (mut fw, mut gw, mut zw, jw, bord) = if n % 2 == 1 {
        let (a, b, c, d, e) = border(f, g, &z, j);
        (a, b, c, d, Some(e))
    } else {
        (f.clone(), g.clone(), z, j.clone(), None)
    };
    let strategy = Strategy::with_fallback(cfg.outer, fw.cols())?;
    let stats = sweep_level1(&mut fw, &mut gw, &mut zw, &jw, &strategy, cfg.lanes, cfg.max_sweeps, StopRule::NoBig)?;
    if !stats.converged {
        log::warn!("no convergence within {} sweeps", cfg.max_sweeps);
    }
    let (fw, gw, zw) = match bord {
        Some(b) => strip_border(&fw, &gw, &zw, b),
        None => (fw, gw, zw),
    };
    assemble_output(fw, gw, zw, j, cfg, stats, 0, Variant::Vp)
}

#[allow(clippy::too_many_arguments)]
fn assemble_output(
    f: ComplexMatrix,
    g: ComplexMatrix,
    z: ComplexMatrix,
    j: &Signature,
    cfg: &HzConfig,
    stats: SweepStats,
    inner_sweeps: u64,
    variant: Variant,
) -> Result<HzOutput> {
    let fin = finalize_outputs(&f, &g, &z, j, cfg.lanes, cfg.want_uv)?;
    Ok(HzOutput {
        f,
        g,
        z: fin.z,
        sigma_f: fin.sigma_f,
        sigma_g: fin.sigma_g,
        sigma: fin.sigma,
        lambda: fin.lambda,
        u: fin.u,
        v: fin.v,
        stats,
        inner_sweeps,
        variant,
    })
}

/// Runs the configured variant on a pool of `cfg.threads` workers.
/// Blocked variants need more than `2 * threads` columns and fall back to
/// the pointwise run otherwise.
pub fn hz(f: &ComplexMatrix, g: &ComplexMatrix, j: &Signature, cfg: &HzConfig) -> Result<HzOutput> {
    check_inputs(f, g, j)?;
    cfg.validate()?;
    // `threads` fixes the blocking and hence the arithmetic; the pool itself
    // never oversubscribes the machine
    let cores = std::thread::available_parallelism().map_or(1, |c| c.get());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.min(cores))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| match cfg.variant {
        Variant::Vp => hz_level1(f, g, j, cfg),
        Variant::Bo | Variant::Fb if f.cols() > 2 * cfg.threads => hz_level2(f, g, j, cfg),
        _ => {
            log::warn!(
                "{} columns are too few for {} block columns; running pointwise",
                f.cols(),
                2 * cfg.threads
            );
            hz_level1(f, g, j, cfg)
        }
    })
}
