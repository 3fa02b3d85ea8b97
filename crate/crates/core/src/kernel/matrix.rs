use std::fmt;

use rand::Rng;

use super::C64;

/// Column starts are padded to a multiple of this many complex entries
/// (64 bytes, one cache line).
pub const COLUMN_PAD: usize = 4;

fn padded(rows: usize) -> usize {
    rows.max(1).div_ceil(COLUMN_PAD) * COLUMN_PAD
}

/// Column-major dense matrix of `Complex64` values.
///
/// The column stride is `rows` rounded up to [`COLUMN_PAD`]; padding entries
/// are always zero.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = padded(rows);
        Self {
            rows,
            cols,
            stride,
            data: vec![C64::new(0.0, 0.0); stride * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from a column-major slice without padding.
    pub fn from_col_major(rows: usize, cols: usize, values: &[C64]) -> Self {
        assert_eq!(values.len(), rows * cols, "from_col_major: wrong length");
        Self::from_fn(rows, cols, |i, j| values[i + j * rows])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Entries with real and imaginary parts uniform in `[-1, 1)`.
    pub fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        Self::from_fn(rows, cols, |_, _| {
            C64::new(2.0 * rng.gen::<f64>() - 1.0, 2.0 * rng.gen::<f64>() - 1.0)
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Raw storage including padding.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// Raw mutable storage including padding; callers must keep padding zero.
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[C64] {
        let start = j * self.stride;
        &self.data[start..start + self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [C64] {
        let start = j * self.stride;
        &mut self.data[start..start + self.rows]
    }

    /// Two distinct columns borrowed mutably at once.
    pub fn col_pair_mut(&mut self, p: usize, q: usize) -> (&mut [C64], &mut [C64]) {
        assert!(p != q && p < self.cols && q < self.cols);
        let (rows, stride) = (self.rows, self.stride);
        if p < q {
            let (lo, hi) = self.data.split_at_mut(q * stride);
            (&mut lo[p * stride..p * stride + rows], &mut hi[..rows])
        } else {
            let (lo, hi) = self.data.split_at_mut(p * stride);
            (&mut hi[..rows], &mut lo[q * stride..q * stride + rows])
        }
    }

    /// Every column as a separate mutable slice, for handing disjoint
    /// columns to different workers.
    pub fn columns_mut(&mut self) -> Vec<&mut [C64]> {
        let rows = self.rows;
        self.data
            .chunks_mut(self.stride)
            .map(|c| &mut c[..rows])
            .collect()
    }

    pub fn columns(&self) -> impl Iterator<Item = &[C64]> {
        let rows = self.rows;
        self.data.chunks(self.stride).map(move |c| &c[..rows])
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            let (x, y) = self.col_pair_mut(a, b);
            x.swap_with_slice(y);
        }
    }

    /// Swaps rows `a` and `b` in columns `from..cols`.
    pub fn swap_rows(&mut self, a: usize, b: usize, from: usize) {
        if a == b {
            return;
        }
        for j in from..self.cols {
            self.col_mut(j).swap(a, b);
        }
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Copy of the block `rows x cols` starting at `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Writes `block` into `self` at `(r0, c0)`.
    pub fn set_submatrix(&mut self, r0: usize, c0: usize, block: &ComplexMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for j in 0..block.cols {
            self.col_mut(c0 + j)[r0..r0 + block.rows].copy_from_slice(block.col(j));
        }
    }

    /// Gathers the listed columns in order.
    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, idx.len());
        for (k, &j) in idx.iter().enumerate() {
            out.col_mut(k).copy_from_slice(self.col(j));
        }
        out
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[&ComplexMatrix]) -> Self {
        let cols = blocks.first().map_or(0, |b| b.cols);
        assert!(blocks.iter().all(|b| b.cols == cols), "vstack: column mismatch");
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut out = Self::zeros(rows, cols);
        let mut r = 0;
        for b in blocks {
            out.set_submatrix(r, 0, b);
            r += b.rows;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.columns()
            .flat_map(|c| c.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.columns()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `self - other`, entrywise.
    pub fn sub(&self, other: &ComplexMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - other[(i, j)])
    }

    /// `||self - other||_F / ||other||_F` (absolute when `other` is zero).
    pub fn rel_diff(&self, other: &ComplexMatrix) -> f64 {
        let d = self.sub(other).frobenius_norm();
        let n = other.frobenius_norm();
        if n > 0.0 {
            d / n
        } else {
            d
        }
    }

    /// Scales column `j` by the real factor `s`.
    pub fn scale_col(&mut self, j: usize, s: f64) {
        for z in self.col_mut(j) {
            *z *= s;
        }
    }

    /// Replaces the matrix by `(self + self^*) / 2`.
    pub fn symmetrize(&mut self) {
        assert!(self.is_square());
        let n = self.rows;
        for j in 0..n {
            let d = self[(j, j)].re;
            self[(j, j)] = C64::new(d, 0.0);
            for i in j + 1..n {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                self[(i, j)] = avg;
                self[(j, i)] = avg.conj();
            }
        }
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i + j * self.stride]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i + j * self.stride]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(12) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, "{:>11.4e}{:+.4e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padding_stays_zero_and_aligned() {
        let m = ComplexMatrix::from_fn(5, 3, |i, j| C64::new((i + 10 * j) as f64, 1.0));
        assert_eq!(m.stride() % COLUMN_PAD, 0);
        assert!(m.stride() >= 5);
        for j in 0..3 {
            let pad = &m.as_slice()[j * m.stride() + 5..(j + 1) * m.stride()];
            assert!(pad.iter().all(|z| *z == C64::new(0.0, 0.0)));
        }
    }

    #[test]
    fn col_pair_mut_either_order() {
        let mut m = ComplexMatrix::from_fn(3, 4, |i, j| C64::new(i as f64, j as f64));
        let (a, b) = m.col_pair_mut(3, 1);
        assert_eq!(a[0].im, 3.0);
        assert_eq!(b[0].im, 1.0);
        m.swap_cols(0, 2);
        assert_eq!(m[(1, 0)], C64::new(1.0, 2.0));
    }

    #[test]
    fn symmetrize_produces_hermitian() {
        let mut rng = rand::thread_rng();
        let mut m = ComplexMatrix::random(6, 6, &mut rng);
        m.symmetrize();
        assert_eq!(m.hermitian_defect(), 0.0);
    }
}
