//! Shannon and von Neumann entropies in bits. Both use 0·log 0 = 0.

use crate::error::{Error, Result};

use super::eigen::{symmetric_eigenvalues, Spectrum, DEFAULT_EIG_TOL};
use super::matrix::SymmetricMatrix;

/// Probabilities in [-NEGATIVE_CLAMP, 0) are treated as rounding noise.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

/// Allowed distance of Σp from 1 when normalization is checked.
pub const NORMALIZATION_TOL: f64 = 1e-8;

/// Default PSD clamp, relative to the trace.
pub const DEFAULT_PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Check,
    Skip,
}

#[inline]
fn neg_xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

pub fn shannon_entropy_bits(p: &[f64], normalization: Normalization) -> Result<f64> {
    let mut sum = 0.0;
    let mut h = 0.0;
    for (index, &value) in p.iter().enumerate() {
        if value < -NEGATIVE_CLAMP || value.is_nan() {
            return Err(Error::NegativeProbability { index, value });
        }
        sum += value.max(0.0);
        h += neg_xlog2x(value);
    }
    if normalization == Normalization::Check && (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized {
            sum,
            tolerance: NORMALIZATION_TOL,
        });
    }
    Ok(h)
}

/// Options for [`von_neumann_entropy_bits`].
#[derive(Debug, Clone, Copy)]
pub struct EntropyOptions {
    /// Eigenvalues down to `-psd_tol * trace` are clamped to zero; below that is an error.
    pub psd_tol: f64,
    /// Jacobi stopping tolerance.
    pub eig_tol: f64,
    /// Divide the spectrum by the trace before taking the entropy.
    pub normalize: bool,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            psd_tol: DEFAULT_PSD_TOL,
            eig_tol: DEFAULT_EIG_TOL,
            normalize: false,
        }
    }
}

/// Von Neumann entropy −Tr(ρ log₂ ρ) together with the spectrum it was computed from.
pub fn von_neumann_entropy_with_spectrum(
    m: &SymmetricMatrix,
    opts: EntropyOptions,
) -> Result<(f64, Spectrum)> {
    let trace = m.trace();
    if trace.is_nan() || trace <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "density matrix trace must be positive, got {trace}"
        )));
    }
    let spectrum = symmetric_eigenvalues(m, opts.eig_tol)?;
    let bound = -opts.psd_tol * trace;
    let min = spectrum.min();
    if min < bound {
        return Err(Error::PsdViolation { value: min, bound });
    }
    let scale = if opts.normalize { 1.0 / trace } else { 1.0 };
    let h = spectrum
        .eigenvalues
        .iter()
        .map(|&l| neg_xlog2x(l.max(0.0) * scale))
        .sum();
    Ok((h, spectrum))
}

pub fn von_neumann_entropy_bits(m: &SymmetricMatrix, opts: EntropyOptions) -> Result<f64> {
    von_neumann_entropy_with_spectrum(m, opts).map(|(h, _)| h)
}
