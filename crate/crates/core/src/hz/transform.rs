use crate::kernel::{gram3, Lanes, Rotation2, Signature, C64};
use crate::{Error, Result};

/// The 2x2 pivot submatrices of `H = F^* J F` and `S = G^* G`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PivotBlock2 {
    pub hpp: f64,
    pub hqq: f64,
    pub hpq: C64,
    pub spp: f64,
    pub sqq: f64,
    pub spq: C64,
}

impl PivotBlock2 {
    pub const IDENTITY: PivotBlock2 = PivotBlock2 {
        hpp: 1.0,
        hqq: 1.0,
        hpq: C64::new(0.0, 0.0),
        spp: 1.0,
        sqq: 1.0,
        spq: C64::new(0.0, 0.0),
    };

    /// `D0 B D0` with `D0 = diag(spp^{-1/2}, sqq^{-1/2})`, together with `D0`.
    #[inline(always)]
    pub fn prescaled(&self) -> (PivotBlock2, f64, f64) {
        let dp = 1.0 / self.spp.sqrt();
        let dq = 1.0 / self.sqq.sqrt();
        let dpq = dp * dq;
        (
            PivotBlock2 {
                hpp: self.hpp * dp * dp,
                hqq: self.hqq * dq * dq,
                hpq: self.hpq * dpq,
                spp: 1.0,
                sqq: 1.0,
                spq: self.spq * dpq,
            },
            dp,
            dq,
        )
    }
}

/// Pivot submatrices from two columns of `F` (with `J`) and two of `G`,
/// each pair read in a single pass.
pub fn gram2(
    fp: &[C64],
    fq: &[C64],
    gp: &[C64],
    gq: &[C64],
    j: &Signature,
    lanes: Lanes,
) -> Result<PivotBlock2> {
    let (hpp, hqq, hpq) = gram3(fp, fq, Some(j), lanes);
    let (spp, sqq, spq) = gram3(gp, gq, None, lanes);
    if !(spp > 0.0 && sqq > 0.0) {
        return Err(Error::IndefiniteS(format!(
            "column norms of G squared are {spp:e} and {sqq:e}"
        )));
    }
    Ok(PivotBlock2 { hpp, hqq, hpq, spp, sqq, spq })
}

/// Transformation criterion on a prescaled block.
#[inline(always)]
pub fn needs_transform(b: &PivotBlock2, n: usize) -> bool {
    let tol = f64::EPSILON * (n as f64).sqrt();
    let (x, y) = (b.hpp.abs(), b.hqq.abs());
    (b.hpq.norm() >= (x.max(y) * tol) * x.min(y)) | (b.spq.norm() >= tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum TransformKind {
    Identity,
    Small,
    Big,
}

/// `Ẑ' = D0 Ẑ`, to be applied from the right to `[f_p f_q]`, `[g_p g_q]`
/// and `[z_p z_q]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transform2 {
    pub z: Rotation2,
    pub kind: TransformKind,
}

impl Transform2 {
    pub const IDENTITY: Transform2 = Transform2 {
        z: Rotation2::IDENTITY,
        kind: TransformKind::Identity,
    };
}

/// Branch-free body of the transformation on prescaled data.
///
/// Returns `Ẑ` (before `D0`), `cos φ`, `cos ψ` and a flag that is 1 when
/// `h = v = 0`, in which case `Ẑ` is meaningless.
#[inline(always)]
fn core(a: f64, c: f64, b: C64, s: C64) -> ([C64; 4], f64, f64, f64) {
    let x = s.norm();
    let nz = f64::from(u8::from(x != 0.0));
    // polar form of s; 0/0 lanes fall back to e^{i0}
    let ca = (s.re / x).min(1.0);
    let sa = (s.im / x).min(1.0) * nz;
    let u = ca * b.re + sa * b.im;
    let v = ca * b.im - sa * b.re;
    let h = c - a;
    let sigma = if h < 0.0 { -1.0 } else { 1.0 };
    let t = ((1.0 - x) * (1.0 + x)).sqrt();
    let r = h.hypot(2.0 * v);
    let num = sigma * (2.0 * u - (a + c) * x);
    let den = t * r;
    let q = num.hypot(den);
    let cos2t = den / q;
    let sin2t = num / q;
    let cosg = h.abs() / r;
    let sing = 2.0 * v * sigma / r;
    // x / x is 1, or NaN (then 0) for x = 0: branch-free zero test
    #[allow(clippy::eq_op)]
    let flag = (1.0 - (v / v).max(0.0)) * (1.0 - (h / h).max(0.0));
    let tc = t * cosg * cos2t;
    let cphi = ((1.0 + x * sin2t + tc) * 0.5).sqrt();
    let cpsi = ((1.0 - x * sin2t + tc) * 0.5).sqrt();
    let p = t * sing * cos2t;
    let e = C64::new(ca, sa);
    let z12 = e * C64::new(sin2t - x, p) / (2.0 * cpsi);
    let z21 = e.conj() * C64::new(sin2t + x, -p) / (2.0 * cphi);
    let it = 1.0 / t;
    (
        [
            C64::new(cphi * it, 0.0),
            z12 * it,
            -z21 * it,
            C64::new(cpsi * it, 0.0),
        ],
        cphi,
        cpsi,
        flag,
    )
}

#[inline(always)]
fn finish(z: [C64; 4], dp: f64, dq: f64, cphi: f64, cpsi: f64) -> Transform2 {
    let kind = if cphi == 1.0 && cpsi == 1.0 {
        TransformKind::Small
    } else {
        TransformKind::Big
    };
    Transform2 {
        z: Rotation2::new(z[0] * dp, z[1] * dp, z[2] * dq, z[3] * dq),
        kind,
    }
}

/// Hari-Zimmermann transformation of one pivot pair: `Ẑ'^* Ŝ Ẑ' = I` and
/// `Ẑ'^* Ĥ Ẑ'` diagonal.
pub fn compute_transform(b: &PivotBlock2) -> Result<Transform2> {
    let zero = C64::new(0.0, 0.0);
    if b.hpq == zero && b.spq == zero {
        return Ok(Transform2::IDENTITY);
    }
    if !(b.spp > 0.0 && b.sqq > 0.0) {
        return Err(Error::IndefiniteS(format!(
            "pivot diagonal of S is ({:e}, {:e})",
            b.spp, b.sqq
        )));
    }
    let (p, dp, dq) = b.prescaled();
    let x = p.spq.norm();
    if !(x < 1.0) {
        return Err(Error::IndefiniteS(format!(
            "prescaled |s_pq| = {x:e} is not below 1"
        )));
    }
    let (z, cphi, cpsi, flag) = core(p.hpp, p.hqq, p.hpq, p.spq);
    if flag == 1.0 {
        return Ok(exceptional(&p, dp, dq));
    }
    let out = finish(z, dp, dq, cphi, cpsi);
    if !out.z.is_finite() {
        return Err(Error::IndefiniteS("non-finite transformation".into()));
    }
    Ok(out)
}

/// `h = v = 0`: the rotation diagonalizing `Ŝ0` alone, rescaled.
fn exceptional(p: &PivotBlock2, dp: f64, dq: f64) -> Transform2 {
    let x = p.spq.norm();
    let e = if x == 0.0 { C64::new(1.0, 0.0) } else { p.spq / x };
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let (ap, aq) = (c / (1.0 + x).sqrt(), c / (1.0 - x).sqrt());
    let z = [C64::new(ap, 0.0), -e * aq, e.conj() * ap, C64::new(aq, 0.0)];
    Transform2 {
        z: Rotation2::new(z[0] * dp, z[1] * dp, z[2] * dq, z[3] * dq),
        kind: TransformKind::Big,
    }
}

/// Transformations for up to `V` pivot pairs at once.
///
/// All lanes run the same straight-line arithmetic; lanes hitting an
/// exceptional case (identity, `h = v = 0`, invalid `S`) are recomputed
/// afterwards by [`compute_transform`].
pub fn compute_transforms<const V: usize>(blocks: &[PivotBlock2]) -> Vec<Result<Transform2>> {
    assert!(blocks.len() <= V, "compute_transforms: too many blocks");
    let mut pre = [PivotBlock2::IDENTITY; V];
    let mut d = [(1.0, 1.0); V];
    for (l, b) in blocks.iter().enumerate() {
        let (p, dp, dq) = b.prescaled();
        pre[l] = p;
        d[l] = (dp, dq);
    }
    let mut zs = [[C64::new(0.0, 0.0); 4]; V];
    let mut cs = [(0.0, 0.0); V];
    let mut flags = [0.0; V];
    for l in 0..V {
        let p = &pre[l];
        let (z, cphi, cpsi, flag) = core(p.hpp, p.hqq, p.hpq, p.spq);
        zs[l] = z;
        cs[l] = (cphi, cpsi);
        flags[l] = flag;
    }
    let zero = C64::new(0.0, 0.0);
    blocks
        .iter()
        .enumerate()
        .map(|(l, b)| {
            let regular = flags[l] == 0.0
                && !(b.hpq == zero && b.spq == zero)
                && b.spp > 0.0
                && b.sqq > 0.0
                && pre[l].spq.norm() < 1.0;
            let out = regular.then(|| finish(zs[l], d[l].0, d[l].1, cs[l].0, cs[l].1));
            match out {
                Some(t) if t.z.is_finite() => Ok(t),
                _ => compute_transform(b),
            }
        })
        .collect()
}

/// `f64::min`/`max` must return the other operand when one is NaN; the
/// vector kernel relies on it.
pub fn nan_semantics_ok() -> bool {
    let nan = f64::NAN;
    nan.min(1.0) == 1.0 && nan.max(0.0) == 0.0 && 1.0f64.min(nan) == 1.0
}
