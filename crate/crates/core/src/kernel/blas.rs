use matrixmultiply::{zgemm, CGemmOption};

#[allow(non_camel_case_types)]
type c64 = [f64; 2];

use super::{ComplexMatrix, C64};

/// Operand form for [`gemm`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    /// The matrix as stored.
    N,
    /// Its conjugate transpose.
    C,
}

fn op_shape(m: &ComplexMatrix, op: Op) -> (usize, usize) {
    match op {
        Op::N => (m.rows(), m.cols()),
        Op::C => (m.cols(), m.rows()),
    }
}

fn conjugated(m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = m.clone();
    for col in out.columns_mut() {
        for z in col {
            *z = z.conj();
        }
    }
    out
}

/// `C ← alpha·op(A)·op(B) + beta·C`.
///
/// The backend only multiplies plain operands, so a conjugated copy is made
/// for every `Op::C` operand and the transpose is expressed through strides.
/// With `beta == 0` the previous contents of `C` are ignored.
pub fn gemm(
    alpha: C64,
    a: &ComplexMatrix,
    opa: Op,
    b: &ComplexMatrix,
    opb: Op,
    beta: C64,
    c: &mut ComplexMatrix,
) {
    let (m, k) = op_shape(a, opa);
    let (kb, n) = op_shape(b, opb);
    assert_eq!(k, kb, "gemm: inner dimension mismatch");
    assert_eq!((c.rows(), c.cols()), (m, n), "gemm: output shape mismatch");
    if m == 0 || n == 0 {
        return;
    }
    if k == 0 {
        for col in c.columns_mut() {
            for z in col {
                *z = if beta == C64::new(0.0, 0.0) { C64::new(0.0, 0.0) } else { *z * beta };
            }
        }
        return;
    }
    let ca;
    let (pa, rsa, csa) = match opa {
        Op::N => (a.as_slice().as_ptr(), 1, a.stride() as isize),
        Op::C => {
            ca = conjugated(a);
            (ca.as_slice().as_ptr(), ca.stride() as isize, 1)
        }
    };
    let cb;
    let (pb, rsb, csb) = match opb {
        Op::N => (b.as_slice().as_ptr(), 1, b.stride() as isize),
        Op::C => {
            cb = conjugated(b);
            (cb.as_slice().as_ptr(), cb.stride() as isize, 1)
        }
    };
    let csc = c.stride() as isize;
    let pc = c.as_mut_slice().as_mut_ptr();
    // SAFETY: Complex64 is repr(C) with two f64 fields, layout-identical to
    // [f64; 2]; all pointers and strides describe in-bounds, non-overlapping
    // storage of the stated shapes.
    unsafe {
        zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            [alpha.re, alpha.im],
            pa as *const c64,
            rsa,
            csa,
            pb as *const c64,
            rsb,
            csb,
            [beta.re, beta.im],
            pc as *mut c64,
            1,
            csc,
        );
    }
}

/// `op(A)·op(B)` as a new matrix.
pub fn matmul(a: &ComplexMatrix, opa: Op, b: &ComplexMatrix, opb: Op) -> ComplexMatrix {
    let (m, _) = op_shape(a, opa);
    let (_, n) = op_shape(b, opb);
    let mut c = ComplexMatrix::zeros(m, n);
    gemm(
        C64::new(1.0, 0.0),
        a,
        opa,
        b,
        opb,
        C64::new(0.0, 0.0),
        &mut c,
    );
    c
}
