//! The backflow flux kernel, its Nyström matrix and spectrum.

pub mod eigen;
pub mod kernel;
pub mod operator;
pub mod spectrum;

pub use eigen::{symmetric_eigenvalues, Tridiagonal};
pub use kernel::{kernel_value, FluxKernel};
pub use operator::{build_operator, DenseMatrix, DiscretizedOperator};
pub use spectrum::{
    eigen_decompose, lambda_sweep, lowest_eigenvalue, spectrum_bounds_check, BoundSide, BoundsReport,
    BoundsViolation, SpectralResult, C_BM, DEFAULT_BOUNDS_TOL,
};
