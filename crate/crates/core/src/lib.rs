//! Generalized hyperbolic SVD of a factored Hermitian pencil `(F^*JF, G^*G)`
//! by the implicit Hari-Zimmermann one-sided Jacobi method.
//!
//! The computation is split into four phases, each in its own module:
//! [`assembly`] builds the tall factors from per-atom blocks, [`shorten`]
//! optionally compresses them to square ones, [`hz`] runs the Jacobi sweeps
//! and [`finalize`] recovers the right singular vectors and residuals.
//! [`harness`] ties the phases together with generators and a dense oracle.

mod error;

pub mod assembly;
pub mod finalize;
pub mod harness;
pub mod hz;
pub mod io;
pub mod kernel;
pub mod shorten;

pub use error::{Error, Result};
pub use kernel::{ComplexMatrix, Lanes, Signature, C64};
