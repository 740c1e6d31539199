//! Reference solution of the master equation by fixed-step RK4 in a small
//! truncated two-mode Fock space. Independent of the closed-form solutions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::SymmetricMatrix;
use crate::tmsv::SqueezeParams;

/// Default per-mode truncation M (dimension (M+1)² = 169).
pub const DEFAULT_ORACLE_TRUNC: usize = 12;

/// Largest allowed γ·dt.
pub const MAX_STEP: f64 = 1e-3;

/// Largest allowed TMSV mass above level M in the initial state.
pub const ORACLE_TAIL_CEILING: f64 = 1e-8;

/// Trace drift beyond this fails the integration.
pub const MAX_TRACE_DRIFT: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum OracleModel {
    Phase,
    Amplitude { nbar: f64 },
}

/// Real density matrix on two modes, each truncated at M photons.
///
/// Element ⟨n₁,n₂|ρ|m₁,m₂⟩ lives at row n₁(M+1)+n₂, column m₁(M+1)+m₂.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeDensityMatrix {
    trunc: usize,
    data: Vec<f64>,
}

impl TwoModeDensityMatrix {
    pub fn zeros(trunc: usize) -> Self {
        let side = (trunc + 1) * (trunc + 1);
        TwoModeDensityMatrix {
            trunc,
            data: vec![0.0; side * side],
        }
    }

    /// |Ψ⟩⟨Ψ| for the TMSV restricted to n ≤ M (not renormalized).
    pub fn squeezed_vacuum(r: f64, trunc: usize) -> Result<Self> {
        SqueezeParams::new(r)?;
        let amp: Vec<f64> = (0..=trunc)
            .map(|n| {
                if n == 0 {
                    1.0 / r.cosh()
                } else {
                    r.tanh().powi(n as i32) / r.cosh()
                }
            })
            .collect();
        let mut rho = Self::zeros(trunc);
        for n in 0..=trunc {
            for m in 0..=trunc {
                rho.set(n, n, m, m, amp[n] * amp[m]);
            }
        }
        Ok(rho)
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    #[inline]
    fn index(&self, n1: usize, n2: usize, m1: usize, m2: usize) -> usize {
        let d = self.trunc + 1;
        ((n1 * d + n2) * d + m1) * d + m2
    }

    #[inline]
    pub fn get(&self, n1: usize, n2: usize, m1: usize, m2: usize) -> f64 {
        self.data[self.index(n1, n2, m1, m2)]
    }

    #[inline]
    pub fn set(&mut self, n1: usize, n2: usize, m1: usize, m2: usize, v: f64) {
        let i = self.index(n1, n2, m1, m2);
        self.data[i] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        let d = self.trunc + 1;
        let mut t = 0.0;
        for n1 in 0..d {
            for n2 in 0..d {
                t += self.get(n1, n2, n1, n2);
            }
        }
        t
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.trunc, other.trunc, "truncation mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest |ρ(n;m) − ρ(m;n)|.
    pub fn asymmetry(&self) -> f64 {
        let d = self.trunc + 1;
        let side = d * d;
        let mut worst: f64 = 0.0;
        for i in 0..side {
            for j in (i + 1)..side {
                worst = worst.max((self.data[i * side + j] - self.data[j * side + i]).abs());
            }
        }
        worst
    }

    /// Largest |ρ(n₁,n₂;m₁,m₂) − ρ(n₂,n₁;m₂,m₁)|.
    pub fn mode_exchange_asymmetry(&self) -> f64 {
        let d = self.trunc + 1;
        let mut worst: f64 = 0.0;
        for n1 in 0..d {
            for n2 in 0..d {
                for m1 in 0..d {
                    for m2 in 0..d {
                        worst =
                            worst.max((self.get(n1, n2, m1, m2) - self.get(n2, n1, m2, m1)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Flattened (M+1)² square matrix; fails unless exactly symmetric.
    pub fn to_matrix(&self) -> Result<SymmetricMatrix> {
        let side = (self.trunc + 1) * (self.trunc + 1);
        SymmetricMatrix::from_row_major(side, self.data.clone())
    }

    fn axpy(&self, h: f64, k: &Self) -> Self {
        TwoModeDensityMatrix {
            trunc: self.trunc,
            data: self
                .data
                .iter()
                .zip(&k.data)
                .map(|(a, b)| a + h * b)
                .collect(),
        }
    }
}

/// Dephasing generator: dρ(n;m)/dt = −(γ/2)[(n₁−m₁)² + (n₂−m₂)²] ρ(n;m).
pub fn apply_phase_generator(rho: &TwoModeDensityMatrix, gamma: f64) -> TwoModeDensityMatrix {
    let d = rho.trunc + 1;
    let mut out = TwoModeDensityMatrix::zeros(rho.trunc);
    for n1 in 0..d {
        for n2 in 0..d {
            for m1 in 0..d {
                for m2 in 0..d {
                    let g1 = n1 as f64 - m1 as f64;
                    let g2 = n2 as f64 - m2 as f64;
                    let rate = 0.5 * gamma * (g1 * g1 + g2 * g2);
                    out.set(n1, n2, m1, m2, -rate * rho.get(n1, n2, m1, m2));
                }
            }
        }
    }
    out
}

/// Thermal amplitude-damping generator summed over both modes.
///
/// Gain into level M+1 has nowhere to go and is dropped; the trace monitor in
/// [`integrate_rk4`] bounds the resulting loss.
pub fn apply_amplitude_generator(
    rho: &TwoModeDensityMatrix,
    gamma: f64,
    nbar: f64,
) -> TwoModeDensityMatrix {
    let m = rho.trunc;
    let d = m + 1;
    let sqrt_n: Vec<f64> = (0..=d).map(|n| (n as f64).sqrt()).collect();
    let loss = 0.5 * gamma * (1.0 + nbar);
    let gain = 0.5 * gamma * nbar;
    let mut out = TwoModeDensityMatrix::zeros(m);
    for n1 in 0..d {
        for n2 in 0..d {
            for m1 in 0..d {
                for m2 in 0..d {
                    let here = rho.get(n1, n2, m1, m2);
                    let mut acc = 0.0;
                    // mode 1: a ρ a† and a† ρ a
                    let mut jump_down = 0.0;
                    if n1 < m && m1 < m {
                        jump_down =
                            sqrt_n[n1 + 1] * sqrt_n[m1 + 1] * rho.get(n1 + 1, n2, m1 + 1, m2);
                    }
                    let mut jump_up = 0.0;
                    if n1 > 0 && m1 > 0 {
                        jump_up = sqrt_n[n1] * sqrt_n[m1] * rho.get(n1 - 1, n2, m1 - 1, m2);
                    }
                    acc += loss * (2.0 * jump_down - (n1 + m1) as f64 * here);
                    acc += gain * (2.0 * jump_up - (n1 + m1 + 2) as f64 * here);
                    // mode 2
                    let mut jump_down = 0.0;
                    if n2 < m && m2 < m {
                        jump_down =
                            sqrt_n[n2 + 1] * sqrt_n[m2 + 1] * rho.get(n1, n2 + 1, m1, m2 + 1);
                    }
                    let mut jump_up = 0.0;
                    if n2 > 0 && m2 > 0 {
                        jump_up = sqrt_n[n2] * sqrt_n[m2] * rho.get(n1, n2 - 1, m1, m2 - 1);
                    }
                    acc += loss * (2.0 * jump_down - (n2 + m2) as f64 * here);
                    acc += gain * (2.0 * jump_up - (n2 + m2 + 2) as f64 * here);
                    out.set(n1, n2, m1, m2, acc);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun {
    pub rho: TwoModeDensityMatrix,
    pub steps: usize,
    /// |Tr ρ(t) − Tr ρ(0)|.
    pub trace_drift: f64,
}

/// Number of steps used when the caller does not fix one: γ·dt ≤ [`MAX_STEP`].
pub fn default_steps(d_target: f64) -> usize {
    (d_target / MAX_STEP).ceil() as usize
}

/// Integrates ρ' = (L₁ + L₂)ρ from the truncated TMSV to γt = `d_target` with γ = 1.
pub fn integrate_rk4(
    model: OracleModel,
    r: f64,
    d_target: f64,
    trunc: usize,
    steps: Option<usize>,
) -> Result<OracleRun> {
    let sq = SqueezeParams::new(r)?;
    if !(d_target >= 0.0 && d_target.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "target damping must be finite and nonnegative, got {d_target}"
        )));
    }
    if trunc < 1 {
        return Err(Error::InvalidParameter(
            "oracle truncation must be at least 1".into(),
        ));
    }
    if let OracleModel::Amplitude { nbar } = model {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "nbar must be >= 0, got {nbar}"
            )));
        }
    }
    let tail = sq.tail_mass(trunc);
    if tail > ORACLE_TAIL_CEILING {
        return Err(Error::TruncationInsufficient {
            tail,
            ceiling: ORACLE_TAIL_CEILING,
            suggested: sq.minimal_truncation(ORACLE_TAIL_CEILING),
        });
    }

    let mut rho = TwoModeDensityMatrix::squeezed_vacuum(r, trunc)?;
    let initial_trace = rho.trace();
    if d_target == 0.0 {
        return Ok(OracleRun {
            rho,
            steps: 0,
            trace_drift: 0.0,
        });
    }
    let steps = steps.unwrap_or_else(|| default_steps(d_target)).max(1);
    let dt = d_target / steps as f64;
    if dt > MAX_STEP * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "{steps} steps give γ·dt = {dt:e}, above {MAX_STEP:e}"
        )));
    }

    let generator = |x: &TwoModeDensityMatrix| match model {
        OracleModel::Phase => apply_phase_generator(x, 1.0),
        OracleModel::Amplitude { nbar } => apply_amplitude_generator(x, 1.0, nbar),
    };
    for _ in 0..steps {
        let k1 = generator(&rho);
        let k2 = generator(&rho.axpy(0.5 * dt, &k1));
        let k3 = generator(&rho.axpy(0.5 * dt, &k2));
        let k4 = generator(&rho.axpy(dt, &k3));
        for i in 0..rho.data.len() {
            rho.data[i] +=
                dt / 6.0 * (k1.data[i] + 2.0 * k2.data[i] + 2.0 * k3.data[i] + k4.data[i]);
        }
    }
    let trace_drift = (rho.trace() - initial_trace).abs();
    if trace_drift > MAX_TRACE_DRIFT {
        return Err(Error::IntegrationFailure {
            drift: trace_drift,
            limit: MAX_TRACE_DRIFT,
        });
    }
    Ok(OracleRun {
        rho,
        steps,
        trace_drift,
    })
}
