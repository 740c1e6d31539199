//! Numerical primitives shared by the physics modules.

mod eigen;
mod entropy;
mod logspace;
mod matrix;

pub use eigen::{symmetric_eigenvalues, Spectrum, DEFAULT_EIG_TOL, MAX_SWEEPS};
pub use entropy::{
    shannon_entropy_bits, von_neumann_entropy_bits, von_neumann_entropy_with_spectrum,
    EntropyOptions, Normalization, DEFAULT_PSD_TOL, NEGATIVE_CLAMP, NORMALIZATION_TOL,
};
pub(crate) use logspace::pow_ln;
pub use logspace::{log_factorial, log_sum_exp, LogWeight};
pub use matrix::SymmetricMatrix;
