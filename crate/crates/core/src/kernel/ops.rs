use super::{ComplexMatrix, Signature, C64};

/// Number of interleaved partial sums used by the dot-product kernels.
///
/// The summation order of every reduction is a function of this width only,
/// so results are reproducible run to run for a fixed width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Lanes(usize);

impl Lanes {
    pub const SUPPORTED: [usize; 5] = [1, 2, 4, 8, 16];
    pub const DEFAULT: Lanes = Lanes(8);

    pub fn new(width: usize) -> Option<Self> {
        Self::SUPPORTED.contains(&width).then_some(Self(width))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl Default for Lanes {
    fn default() -> Self {
        Self::DEFAULT
    }
}

macro_rules! with_lanes {
    ($lanes:expr, $f:ident, $($arg:expr),*) => {
        match $lanes.get() {
            1 => $f::<1>($($arg),*),
            2 => $f::<2>($($arg),*),
            4 => $f::<4>($($arg),*),
            8 => $f::<8>($($arg),*),
            _ => $f::<16>($($arg),*),
        }
    };
}

#[inline(always)]
fn reduce<const V: usize>(acc: &[f64; V]) -> f64 {
    let mut s = 0.0;
    for a in acc {
        s += *a;
    }
    s
}

#[inline(always)]
fn acc_dot<const V: usize>(f: &[C64], g: &[C64], re: &mut [f64; V], im: &mut [f64; V]) {
    let full = f.len() / V * V;
    for (fc, gc) in f[..full].chunks_exact(V).zip(g[..full].chunks_exact(V)) {
        for l in 0..V {
            re[l] += fc[l].re * gc[l].re + fc[l].im * gc[l].im;
            im[l] += fc[l].re * gc[l].im - fc[l].im * gc[l].re;
        }
    }
    for (l, (a, b)) in f[full..].iter().zip(&g[full..]).enumerate() {
        re[l] += a.re * b.re + a.im * b.im;
        im[l] += a.re * b.im - a.im * b.re;
    }
}

#[inline(always)]
fn acc_norm<const V: usize>(f: &[C64], acc: &mut [f64; V]) {
    let full = f.len() / V * V;
    for fc in f[..full].chunks_exact(V) {
        for l in 0..V {
            acc[l] += fc[l].re * fc[l].re + fc[l].im * fc[l].im;
        }
    }
    for (l, a) in f[full..].iter().enumerate() {
        acc[l] += a.re * a.re + a.im * a.im;
    }
}

#[derive(Clone, Copy)]
struct GramAcc<const V: usize> {
    pp: [f64; V],
    qq: [f64; V],
    re: [f64; V],
    im: [f64; V],
}

impl<const V: usize> GramAcc<V> {
    fn new() -> Self {
        Self {
            pp: [0.0; V],
            qq: [0.0; V],
            re: [0.0; V],
            im: [0.0; V],
        }
    }
}

#[inline(always)]
fn acc_gram<const V: usize>(p: &[C64], q: &[C64], a: &mut GramAcc<V>) {
    let full = p.len() / V * V;
    for (pc, qc) in p[..full].chunks_exact(V).zip(q[..full].chunks_exact(V)) {
        for l in 0..V {
            let (x, y) = (pc[l], qc[l]);
            a.pp[l] += x.re * x.re + x.im * x.im;
            a.qq[l] += y.re * y.re + y.im * y.im;
            a.re[l] += x.re * y.re + x.im * y.im;
            a.im[l] += x.re * y.im - x.im * y.re;
        }
    }
    for (l, (x, y)) in p[full..].iter().zip(&q[full..]).enumerate() {
        a.pp[l] += x.re * x.re + x.im * x.im;
        a.qq[l] += y.re * y.re + y.im * y.im;
        a.re[l] += x.re * y.re + x.im * y.im;
        a.im[l] += x.re * y.im - x.im * y.re;
    }
}

fn jdot_v<const V: usize>(f: &[C64], g: &[C64], j: &Signature) -> C64 {
    let (mut pr, mut pi) = ([0.0; V], [0.0; V]);
    let (mut nr, mut ni) = ([0.0; V], [0.0; V]);
    for (start, len, sign) in j.runs() {
        let (fs, gs) = (&f[start..start + len], &g[start..start + len]);
        if sign > 0.0 {
            acc_dot::<V>(fs, gs, &mut pr, &mut pi);
        } else {
            acc_dot::<V>(fs, gs, &mut nr, &mut ni);
        }
    }
    C64::new(
        reduce(&pr) - reduce(&nr),
        reduce(&pi) - reduce(&ni),
    )
}

fn jnormsq_v<const V: usize>(f: &[C64], j: &Signature) -> f64 {
    let (mut pos, mut neg) = ([0.0; V], [0.0; V]);
    for (start, len, sign) in j.runs() {
        let fs = &f[start..start + len];
        if sign > 0.0 {
            acc_norm::<V>(fs, &mut pos);
        } else {
            acc_norm::<V>(fs, &mut neg);
        }
    }
    reduce(&pos) - reduce(&neg)
}

fn gram_v<const V: usize>(p: &[C64], q: &[C64], j: Option<&Signature>) -> (f64, f64, C64) {
    let mut pos = GramAcc::<V>::new();
    let mut neg = GramAcc::<V>::new();
    match j {
        Some(j) if !j.is_identity() => {
            for (start, len, sign) in j.runs() {
                let acc = if sign > 0.0 { &mut pos } else { &mut neg };
                acc_gram::<V>(&p[start..start + len], &q[start..start + len], acc);
            }
        }
        _ => acc_gram::<V>(p, q, &mut pos),
    }
    (
        reduce(&pos.pp) - reduce(&neg.pp),
        reduce(&pos.qq) - reduce(&neg.qq),
        C64::new(
            reduce(&pos.re) - reduce(&neg.re),
            reduce(&pos.im) - reduce(&neg.im),
        ),
    )
}

/// Hyperbolic scalar product `f^* J g`.
///
/// Every run of equal signs in `J` is summed into `lanes` interleaved partial
/// sums (positive and negative runs into separate sets); the sets are reduced
/// in lane order and subtracted at the end.
pub fn jdot(f: &[C64], g: &[C64], j: &Signature, lanes: Lanes) -> C64 {
    assert_eq!(f.len(), g.len(), "jdot: length mismatch");
    assert_eq!(f.len(), j.order(), "jdot: signature order mismatch");
    with_lanes!(lanes, jdot_v, f, g, j)
}

/// Squared hyperbolic "norm" `f^* J f`; may be negative or zero.
pub fn jnormsq(f: &[C64], j: &Signature, lanes: Lanes) -> f64 {
    assert_eq!(f.len(), j.order(), "jnormsq: signature order mismatch");
    with_lanes!(lanes, jnormsq_v, f, j)
}

/// Euclidean `f^* g`.
pub fn dot(f: &[C64], g: &[C64], lanes: Lanes) -> C64 {
    assert_eq!(f.len(), g.len(), "dot: length mismatch");
    fn plain<const V: usize>(f: &[C64], g: &[C64]) -> C64 {
        let (mut re, mut im) = ([0.0; V], [0.0; V]);
        acc_dot::<V>(f, g, &mut re, &mut im);
        C64::new(reduce(&re), reduce(&im))
    }
    with_lanes!(lanes, plain, f, g)
}

pub fn normsq(f: &[C64], lanes: Lanes) -> f64 {
    fn plain<const V: usize>(f: &[C64]) -> f64 {
        let mut acc = [0.0; V];
        acc_norm::<V>(f, &mut acc);
        reduce(&acc)
    }
    with_lanes!(lanes, plain, f)
}

/// `(p^* J p, q^* J q, p^* J q)` in a single pass over both columns.
/// With `j = None` the Euclidean products are returned.
pub fn gram3(p: &[C64], q: &[C64], j: Option<&Signature>, lanes: Lanes) -> (f64, f64, C64) {
    assert_eq!(p.len(), q.len(), "gram3: length mismatch");
    if let Some(j) = j {
        assert_eq!(p.len(), j.order(), "gram3: signature order mismatch");
    }
    with_lanes!(lanes, gram_v, p, q, j)
}

/// A general 2x2 complex matrix applied from the right to a column pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation2 {
    pub z11: C64,
    pub z12: C64,
    pub z21: C64,
    pub z22: C64,
}

impl Rotation2 {
    pub const IDENTITY: Rotation2 = Rotation2 {
        z11: C64::new(1.0, 0.0),
        z12: C64::new(0.0, 0.0),
        z21: C64::new(0.0, 0.0),
        z22: C64::new(1.0, 0.0),
    };

    pub fn new(z11: C64, z12: C64, z21: C64, z22: C64) -> Self {
        Self { z11, z12, z21, z22 }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn is_finite(&self) -> bool {
        [self.z11, self.z12, self.z21, self.z22]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn conj_transpose(&self) -> Self {
        Self::new(self.z11.conj(), self.z21.conj(), self.z12.conj(), self.z22.conj())
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Rotation2) -> Self {
        Self::new(
            self.z11 * rhs.z11 + self.z12 * rhs.z21,
            self.z11 * rhs.z12 + self.z12 * rhs.z22,
            self.z21 * rhs.z11 + self.z22 * rhs.z21,
            self.z21 * rhs.z12 + self.z22 * rhs.z22,
        )
    }

    /// `R^* A R` for a Hermitian `A = [[a, b], [conj(b), c]]`, returned as
    /// `(a', b', c')`.
    pub fn congruence(&self, a: f64, b: C64, c: f64) -> (f64, C64, f64) {
        let ca = C64::new(a, 0.0);
        let cc = C64::new(c, 0.0);
        // A R, column by column
        let ar11 = ca * self.z11 + b * self.z21;
        let ar21 = b.conj() * self.z11 + cc * self.z21;
        let ar12 = ca * self.z12 + b * self.z22;
        let ar22 = b.conj() * self.z12 + cc * self.z22;
        let d1 = self.z11.conj() * ar11 + self.z21.conj() * ar21;
        let off = self.z11.conj() * ar12 + self.z21.conj() * ar22;
        let d2 = self.z12.conj() * ar12 + self.z22.conj() * ar22;
        (d1.re, off, d2.re)
    }

    /// Unitary rotation diagonalizing the Hermitian `[[a, b], [conj(b), c]]`:
    /// returns `R` with `R^* A R = diag(d1, d2)` together with `(d1, d2)`.
    ///
    /// `R = [[cs, sn e^{iθ}], [-sn e^{-iθ}, cs]]` with `θ = arg b` and the
    /// smaller of the two admissible angles.
    pub fn hermitian_jacobi(a: f64, b: C64, c: f64) -> (Self, f64, f64) {
        let bn = b.norm();
        if bn == 0.0 {
            return (Self::IDENTITY, a, c);
        }
        let phase = b / bn;
        let zeta = (c - a) / (2.0 * bn);
        let t = if zeta >= 0.0 {
            1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
        } else {
            -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
        };
        let cs = 1.0 / (1.0 + t * t).sqrt();
        let sn = t * cs;
        let r = Self::new(
            C64::new(cs, 0.0),
            phase * sn,
            -phase.conj() * sn,
            C64::new(cs, 0.0),
        );
        (r, a - t * bn, c + t * bn)
    }
}

/// Overwrites `[p q]` by `[p q] * z`.
pub fn vrotm(p: &mut [C64], q: &mut [C64], z: &Rotation2) {
    assert_eq!(p.len(), q.len(), "vrotm: length mismatch");
    if z.is_identity() {
        return;
    }
    let Rotation2 { z11, z12, z21, z22 } = *z;
    for (a, b) in p.iter_mut().zip(q.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = x * z11 + y * z21;
        *b = x * z12 + y * z22;
    }
}

/// Copy of `m` with every row `i` multiplied by `J_ii`.
pub fn scale_rows(m: &ComplexMatrix, j: &Signature) -> ComplexMatrix {
    assert_eq!(m.rows(), j.order(), "scale_rows: signature order mismatch");
    let mut out = m.clone();
    for col in out.columns_mut() {
        for &(start, len) in j.neg_blocks() {
            for z in &mut col[start..start + len] {
                *z = -*z;
            }
        }
    }
    out
}
