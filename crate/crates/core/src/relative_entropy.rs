//! Relative entropy of entanglement for states Σ a_{n₁n₂} |φ_{n₁},ψ_{n₁}⟩⟨φ_{n₂},ψ_{n₂}|
//! with orthonormal local families: E_R = H(diag a) − S(a), and the closest
//! separable state is the diagonal of a.

use crate::error::Result;
use crate::numerics::{
    shannon_entropy_bits, von_neumann_entropy_with_spectrum, EntropyOptions, Normalization,
    Spectrum, SymmetricMatrix,
};

/// E_R of a coefficient matrix in its correlated orthonormal basis, with the spectrum used.
pub fn correlated_basis_er(m: &SymmetricMatrix) -> Result<(f64, Spectrum)> {
    let diagonal_entropy = shannon_entropy_bits(&m.diag(), Normalization::Skip)?;
    let (vn, spectrum) = von_neumann_entropy_with_spectrum(m, EntropyOptions::default())?;
    Ok((diagonal_entropy - vn, spectrum))
}
