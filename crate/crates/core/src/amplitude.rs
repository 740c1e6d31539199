//! Thermal amplitude damping of the TMSV.
//!
//! The evolved state splits into a k = 0 block spanned by |n,n⟩ and, for each
//! k ≥ 1, two blocks spanned by |n,n+k⟩ and |n+k,n⟩ that share the coefficient
//! matrix c^(k). Every block has the correlated-basis form, so each one's
//! relative entropy of entanglement is exact and their weighted sum is an upper
//! bound for the whole state by convexity.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{log_factorial, log_sum_exp, pow_ln, SymmetricMatrix};
use crate::relative_entropy::correlated_basis_er;
use crate::result::{Diagnostics, EntanglementResult, ResultKind};
use crate::tmsv::SqueezeParams;

/// Squeezing at or below this is treated as the vacuum.
pub const R_MIN: f64 = 1e-8;

/// Blocks whose raw weight falls below this end the k-expansion.
pub const DEFAULT_EPS_BLOCK: f64 = 1e-12;

/// Largest tolerated 1 − (p₀ + 2Σp_k).
pub const DEFAULT_DEFICIT_CEILING: f64 = 1e-8;

/// Rows of a block whose trailing diagonal mass is below this fraction of the
/// block weight are dropped before diagonalization.
const TRIM_RELATIVE: f64 = 1e-18;

/// Safety stop for the k-expansion; geometric decay in Q reaches eps_block long before.
const MAX_BLOCKS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePoint {
    pub r: f64,
    /// Degree of damping γt.
    pub d: f64,
    /// Mean thermal photon number of the bath.
    pub nbar: f64,
}

impl AmplitudePoint {
    pub fn new(r: f64, d: f64, nbar: f64) -> Result<Self> {
        SqueezeParams::new(r)?;
        for (name, v) in [("d", d), ("nbar", nbar)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(AmplitudePoint { r, d, nbar })
    }
}

/// n(t), P, Q, R and e^(−γt) for one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub n_t: f64,
    pub p: f64,
    pub q: f64,
    pub r_coef: f64,
    pub decay: f64,
}

pub fn channel_params(point: AmplitudePoint) -> Result<ChannelParams> {
    let point = AmplitudePoint::new(point.r, point.d, point.nbar)?;
    if point.r <= R_MIN {
        return Err(Error::DegenerateState { r: point.r });
    }
    let decay = (-point.d).exp();
    let n_t = point.nbar * -(-point.d).exp_m1();
    let coth = 1.0 / point.r.tanh();
    let a = coth * (n_t + 1.0);
    let b = n_t + 1.0 - decay;
    let r_coef = 1.0 / ((a - b) * (a + b));
    let p = r_coef * decay * coth;
    let q = (n_t + r_coef * decay * b) / (n_t + 1.0);
    if !(r_coef > 0.0 && (0.0..1.0).contains(&p) && (0.0..1.0).contains(&q)) {
        return Err(Error::InvalidParameter(format!(
            "channel parameters out of range at {point:?}: P={p}, Q={q}, R={r_coef}"
        )));
    }
    Ok(ChannelParams {
        n_t,
        p,
        q,
        r_coef,
        decay,
    })
}

/// Log-space evaluator for c^(k)_{n₁,n₂}.
#[derive(Debug, Clone)]
pub struct BlockCoefficients {
    ln_p: f64,
    ln_q: f64,
    ln_prefactor: f64,
}

impl BlockCoefficients {
    pub fn new(cp: &ChannelParams, r: f64) -> Self {
        BlockCoefficients {
            ln_p: cp.p.ln(),
            ln_q: cp.q.ln(),
            ln_prefactor: cp.r_coef.ln() - 2.0 * r.sinh().ln(),
        }
    }

    /// ln c^(k)_{n₁,n₂}; `-inf` for an exact zero.
    pub fn ln_coefficient(&self, k: usize, n1: usize, n2: usize) -> f64 {
        // Fixed argument order keeps c^(k) bitwise symmetric.
        let (n1, n2) = (n1.min(n2), n1.max(n2));
        let lmax = n1;
        let mut terms = Vec::with_capacity(lmax + 1);
        for l in 0..=lmax {
            // P^{n₁+n₂} Q^k (Q/P)^{2l} regrouped so that 0⁰ = 1 holds for P = 0 or Q = 0.
            terms.push(
                pow_ln(n1 + n2 - 2 * l, self.ln_p) + pow_ln(k + 2 * l, self.ln_q)
                    - log_factorial(l)
                    - log_factorial(l + k)
                    - log_factorial(n1 - l)
                    - log_factorial(n2 - l),
            );
        }
        let sum = log_sum_exp(&terms);
        if sum == f64::NEG_INFINITY {
            return sum;
        }
        0.5 * (log_factorial(n1)
            + log_factorial(n2)
            + log_factorial(n1 + k)
            + log_factorial(n2 + k))
            + self.ln_prefactor
            + sum
    }

    pub fn coefficient(&self, k: usize, n1: usize, n2: usize) -> f64 {
        self.ln_coefficient(k, n1, n2).exp()
    }

    /// ⟨n₁,n₂|ρ(t)|m₁,m₂⟩ of the reassembled state; zero unless n₂−n₁ = m₂−m₁.
    pub fn density_element(&self, n1: usize, n2: usize, m1: usize, m2: usize) -> f64 {
        let shift_row = n2 as i64 - n1 as i64;
        let shift_col = m2 as i64 - m1 as i64;
        if shift_row != shift_col {
            return 0.0;
        }
        if shift_row >= 0 {
            self.coefficient(shift_row as usize, n1, m1)
        } else {
            self.coefficient((-shift_row) as usize, n2, m2)
        }
    }
}

/// c^(k)_{n₁,n₂} for the given channel parameters and squeezing.
pub fn block_coefficient(k: usize, n1: usize, n2: usize, cp: &ChannelParams, r: f64) -> f64 {
    BlockCoefficients::new(cp, r).coefficient(k, n1, n2)
}

/// Which of the two k ≥ 1 block families: |n,n+k⟩ (`Plus`) or |n+k,n⟩ (`Minus`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Unnormalized block of one branch, read off the reassembled density matrix.
pub fn branch_matrix(
    coeffs: &BlockCoefficients,
    k: usize,
    branch: Branch,
    dim: usize,
) -> Result<SymmetricMatrix> {
    SymmetricMatrix::from_upper_fn(dim, |i, j| match branch {
        Branch::Plus => coeffs.density_element(i, i + k, j, j + k),
        Branch::Minus => coeffs.density_element(i + k, i, j + k, j),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    pub p0: f64,
    /// c^(0)/p₀.
    pub block0: SymmetricMatrix,
    /// p_k for k = 1..=k_cutoff; each branch carries this weight.
    pub weights: Vec<f64>,
    /// c^(k)/p_k for k = 1..=k_cutoff.
    pub blocks: Vec<SymmetricMatrix>,
    pub k_cutoff: usize,
    pub trace_deficit: f64,
}

impl BlockDecomposition {
    /// p₀ + 2Σp_k.
    pub fn total_weight(&self) -> f64 {
        self.p0 + 2.0 * self.weights.iter().sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeOptions {
    pub truncation: usize,
    pub eps_block: f64,
    pub deficit_ceiling: f64,
}

impl Default for AmplitudeOptions {
    fn default() -> Self {
        AmplitudeOptions {
            truncation: crate::phase::DEFAULT_TRUNCATION,
            eps_block: DEFAULT_EPS_BLOCK,
            deficit_ceiling: DEFAULT_DEFICIT_CEILING,
        }
    }
}

fn normalized_block(
    coeffs: &BlockCoefficients,
    k: usize,
    diag: &[f64],
    weight: f64,
) -> Result<SymmetricMatrix> {
    let mut dim = diag.len();
    let mut tail = 0.0;
    while dim > 1 && tail + diag[dim - 1] <= TRIM_RELATIVE * weight {
        tail += diag[dim - 1];
        dim -= 1;
    }
    SymmetricMatrix::from_upper_fn(dim, |i, j| {
        if i == j {
            diag[i] / weight
        } else {
            coeffs.coefficient(k, i, j) / weight
        }
    })
}

pub fn block_decomposition(
    point: AmplitudePoint,
    opts: AmplitudeOptions,
) -> Result<BlockDecomposition> {
    if opts.truncation < 1 {
        return Err(Error::InvalidParameter(
            "truncation N must be at least 1".into(),
        ));
    }
    if !(opts.eps_block > 0.0 && opts.deficit_ceiling > 0.0) {
        return Err(Error::InvalidParameter(
            "eps_block and deficit ceiling must be positive".into(),
        ));
    }
    let cp = channel_params(point)?;
    let coeffs = BlockCoefficients::new(&cp, point.r);
    let diagonal = |k: usize| -> Vec<f64> {
        (0..=opts.truncation)
            .map(|n| coeffs.coefficient(k, n, n))
            .collect()
    };

    let diag0 = diagonal(0);
    let p0: f64 = diag0.iter().sum();
    let block0 = normalized_block(&coeffs, 0, &diag0, p0)?;

    let mut weights = Vec::new();
    let mut blocks = Vec::new();
    let mut k = 1;
    loop {
        if k > MAX_BLOCKS {
            return Err(Error::InvalidParameter(format!(
                "block expansion did not terminate by k = {MAX_BLOCKS} at {point:?}"
            )));
        }
        let diag = diagonal(k);
        let weight: f64 = diag.iter().sum();
        if weight < opts.eps_block {
            break;
        }
        blocks.push(normalized_block(&coeffs, k, &diag, weight)?);
        weights.push(weight);
        k += 1;
    }

    let decomposition = BlockDecomposition {
        p0,
        block0,
        k_cutoff: weights.len(),
        trace_deficit: 0.0,
        weights,
        blocks,
    };
    let trace_deficit = 1.0 - decomposition.total_weight();
    if trace_deficit > opts.deficit_ceiling {
        let sq = SqueezeParams::new(point.r)?;
        return Err(Error::TruncationInsufficient {
            tail: trace_deficit,
            ceiling: opts.deficit_ceiling,
            suggested: (opts.truncation + opts.truncation / 2)
                .max(sq.minimal_truncation(opts.deficit_ceiling * 1e-2)),
        });
    }
    Ok(BlockDecomposition {
        trace_deficit,
        ..decomposition
    })
}

/// Convexity upper bound E_R* = p₀T(ρ₀) + 2Σ_k p_k T(ρ_k).
///
/// Each k ≥ 1 block is diagonalized once and its contribution doubled, since
/// both branch families carry the same coefficient matrix.
pub fn upper_bound_er(point: AmplitudePoint, opts: AmplitudeOptions) -> Result<EntanglementResult> {
    let point = AmplitudePoint::new(point.r, point.d, point.nbar)?;
    if point.r <= R_MIN {
        return Ok(EntanglementResult {
            value_bits: 0.0,
            kind: ResultKind::UpperBound,
            diagnostics: Diagnostics {
                trace_deficit: 0.0,
                min_eigenvalue: 0.0,
                eig_residual: 0.0,
                k_cutoff: Some(0),
            },
        });
    }
    let dec = block_decomposition(point, opts)?;
    let all_blocks: Vec<&SymmetricMatrix> = std::iter::once(&dec.block0)
        .chain(dec.blocks.iter())
        .collect();
    let evaluated: Vec<_> = all_blocks
        .par_iter()
        .map(|b| correlated_basis_er(b))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<_>>()?;

    let mut value = 0.0;
    let mut min_eigenvalue = f64::INFINITY;
    let mut eig_residual: f64 = 0.0;
    for (idx, (t, spectrum)) in evaluated.iter().enumerate() {
        let weight = if idx == 0 {
            dec.p0
        } else {
            2.0 * dec.weights[idx - 1]
        };
        value += weight * t;
        min_eigenvalue = min_eigenvalue.min(spectrum.min());
        eig_residual = eig_residual.max(spectrum.residual);
    }
    Ok(EntanglementResult {
        value_bits: if value < 0.0 && value > -1e-12 {
            0.0
        } else {
            value
        },
        kind: ResultKind::UpperBound,
        diagnostics: Diagnostics {
            trace_deficit: dec.trace_deficit,
            min_eigenvalue,
            eig_residual,
            k_cutoff: Some(dec.k_cutoff),
        },
    })
}

/// Border γt* = ln[1 + (1 − e^(−2r))/(2n̄)]; the state is separable iff γt ≥ γt*.
pub fn separability_border(r: f64, nbar: f64) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite()) || !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "border needs finite r >= 0 and nbar >= 0, got r={r}, nbar={nbar}"
        )));
    }
    if nbar == 0.0 {
        return Err(Error::NoFiniteBorder);
    }
    Ok((-(-2.0 * r).exp_m1() / (2.0 * nbar)).ln_1p())
}

pub fn is_separable(point: AmplitudePoint) -> Result<bool> {
    Ok(point.d >= separability_border(point.r, point.nbar)?)
}
