//! The two-mode squeezed vacuum (cosh r)⁻¹ Σ tanhⁿr |n,n⟩ and its pure-state entanglement.

use crate::error::{Error, Result};

/// Default ceiling on the probability mass discarded by truncating at N photons.
pub const DEFAULT_TAIL_CEILING: f64 = 1e-12;

/// Upper bound on r; past this tanh²r rounds to 1.
pub const MAX_SQUEEZING: f64 = 20.0;

/// Squeezing parameter r, validated to lie in [0, 20).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    r: f64,
}

impl SqueezeParams {
    pub fn new(r: f64) -> Result<Self> {
        if !(0.0..MAX_SQUEEZING).contains(&r) {
            return Err(Error::InvalidParameter(format!(
                "squeezing r must lie in [0, {MAX_SQUEEZING}), got {r}"
            )));
        }
        Ok(SqueezeParams { r })
    }

    pub fn r(self) -> f64 {
        self.r
    }

    /// ln tanh r (`-inf` at r = 0).
    pub fn ln_tanh(self) -> f64 {
        self.r.tanh().ln()
    }

    pub fn ln_cosh(self) -> f64 {
        self.r.cosh().ln()
    }

    /// tanh^{2(N+1)} r, the Fock-basis mass above n = N.
    pub fn tail_mass(self, truncation: usize) -> f64 {
        if self.r == 0.0 {
            return 0.0;
        }
        (2.0 * (truncation as f64 + 1.0) * self.ln_tanh()).exp()
    }

    /// Smallest N whose tail mass does not exceed `ceiling`.
    pub fn minimal_truncation(self, ceiling: f64) -> usize {
        if self.r == 0.0 || ceiling >= 1.0 {
            return 1;
        }
        let lt = self.ln_tanh();
        let guess = (ceiling.ln() / (2.0 * lt)).ceil() - 1.0;
        let mut n = if guess.is_finite() && guess > 1.0 {
            guess as usize
        } else {
            1
        };
        while self.tail_mass(n) > ceiling {
            n += 1;
        }
        while n > 1 && self.tail_mass(n - 1) <= ceiling {
            n -= 1;
        }
        n
    }

    pub(crate) fn check_truncation(self, truncation: usize, ceiling: f64) -> Result<f64> {
        if truncation < 1 {
            return Err(Error::InvalidParameter(
                "truncation N must be at least 1".into(),
            ));
        }
        let tail = self.tail_mass(truncation);
        if tail > ceiling {
            return Err(Error::TruncationInsufficient {
                tail,
                ceiling,
                suggested: self.minimal_truncation(ceiling),
            });
        }
        Ok(tail)
    }
}

/// Squared Schmidt coefficients p_n = tanh²ⁿr / cosh²r for n = 0..=N.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDistribution {
    pub probs: Vec<f64>,
    pub truncation: usize,
    pub tail_mass: f64,
}

pub fn schmidt_distribution(
    params: SqueezeParams,
    truncation: usize,
    tail_ceiling: f64,
) -> Result<SchmidtDistribution> {
    let tail_mass = params.check_truncation(truncation, tail_ceiling)?;
    let lt = params.ln_tanh();
    let lc = params.ln_cosh();
    let probs = (0..=truncation)
        .map(|n| {
            if n == 0 {
                (-2.0 * lc).exp()
            } else {
                (2.0 * n as f64 * lt - 2.0 * lc).exp()
            }
        })
        .collect();
    Ok(SchmidtDistribution {
        probs,
        truncation,
        tail_mass,
    })
}

/// Entanglement entropy of the pure squeezed state, in bits:
/// cosh²r log₂ cosh²r − sinh²r log₂ sinh²r.
pub fn pure_entanglement_bits(params: SqueezeParams) -> f64 {
    if params.r == 0.0 {
        return 0.0;
    }
    let s2 = params.r.sinh().powi(2);
    let c2 = s2 + 1.0;
    c2 * c2.log2() - s2 * s2.log2()
}
