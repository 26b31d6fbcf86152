//! Small dense/sparse linear algebra kernels used by the assembly and solver
//! layers: CSR matrices, an RCM-reordered banded Cholesky, and eigensolvers.

pub mod band;
pub mod csr;
pub mod eig;

pub use band::BandCholesky;
pub use csr::{axpy, dot, scale, Csr};
pub use eig::{smallest_eigenpairs, symmetric_eig_dense};
