//! Dense complex storage, signature matrices and the inner column kernels.

mod blas;
mod matrix;
mod ops;
mod signature;

pub use blas::{gemm, matmul, Op};
pub use matrix::{ComplexMatrix, COLUMN_PAD};
pub use ops::{dot, gram3, jdot, jnormsq, normsq, scale_rows, vrotm, Lanes, Rotation2};
pub use signature::Signature;

pub type C64 = num_complex::Complex64;
