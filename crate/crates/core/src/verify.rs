//! Elementwise comparison of the closed-form damped states with the RK4 oracle.

use serde::{Deserialize, Serialize};

use crate::amplitude::{channel_params, AmplitudePoint, BlockCoefficients};
use crate::error::Result;
use crate::numerics::{symmetric_eigenvalues, DEFAULT_EIG_TOL};
use crate::oracle::{integrate_rk4, OracleModel, TwoModeDensityMatrix};
use crate::phase::{phase_coefficient, PhasePoint};

pub const PHASE_TOLERANCE: f64 = 1e-8;
pub const AMPLITUDE_TOLERANCE: f64 = 1e-6;

/// The dephased state restricted to n ≤ M in both modes.
pub fn analytic_phase_state(point: PhasePoint, trunc: usize) -> Result<TwoModeDensityMatrix> {
    let point = PhasePoint::new(point.r, point.d)?;
    let mut rho = TwoModeDensityMatrix::zeros(trunc);
    for n in 0..=trunc {
        for m in 0..=trunc {
            rho.set(n, n, m, m, phase_coefficient(point, n, m));
        }
    }
    Ok(rho)
}

/// The amplitude-damped state reassembled from its k-blocks, restricted to n ≤ M.
pub fn analytic_amplitude_state(
    point: AmplitudePoint,
    trunc: usize,
) -> Result<TwoModeDensityMatrix> {
    let cp = channel_params(point)?;
    let coeffs = BlockCoefficients::new(&cp, point.r);
    let mut rho = TwoModeDensityMatrix::zeros(trunc);
    for n1 in 0..=trunc {
        for n2 in 0..=trunc {
            for m1 in 0..=trunc {
                for m2 in 0..=trunc {
                    rho.set(n1, n2, m1, m2, coeffs.density_element(n1, n2, m1, m2));
                }
            }
        }
    }
    Ok(rho)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRequest {
    #[serde(flatten)]
    pub model: OracleModel,
    pub r: f64,
    pub d: f64,
    pub oracle_trunc: usize,
    /// RK4 steps; `None` picks the smallest count with γ·dt ≤ 1e-3.
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub request: VerifyRequest,
    pub steps: usize,
    pub max_abs_deviation: f64,
    pub trace_drift: f64,
    pub symmetry_error: f64,
    pub mode_exchange_error: f64,
    pub oracle_min_eigenvalue: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl VerifyReport {
    pub fn to_text(&self) -> String {
        let model = match self.request.model {
            OracleModel::Phase => "phase".to_string(),
            OracleModel::Amplitude { nbar } => format!("amplitude (nbar={nbar})"),
        };
        format!(
            "model: {model}\nr: {}\nd: {}\noracle truncation: {}\nrk4 steps: {}\n\
             max |analytic - oracle|: {:.3e}\ntolerance: {:.1e}\ntrace drift: {:.3e}\n\
             symmetry error: {:.3e}\nmode-exchange error: {:.3e}\noracle min eigenvalue: {:.3e}\n\
             status: {}\n",
            self.request.r,
            self.request.d,
            self.request.oracle_trunc,
            self.steps,
            self.max_abs_deviation,
            self.tolerance,
            self.trace_drift,
            self.symmetry_error,
            self.mode_exchange_error,
            self.oracle_min_eigenvalue,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// Integrates the oracle, builds the matching closed-form state and compares them.
///
/// A deviation above tolerance is reported through `passed = false`, not as an error.
pub fn run_verify(request: &VerifyRequest) -> Result<VerifyReport> {
    let run = integrate_rk4(
        request.model,
        request.r,
        request.d,
        request.oracle_trunc,
        request.steps,
    )?;
    let (analytic, tolerance) = if request.d == 0.0 {
        // t = 0: the closed form is the shared initial condition.
        let tol = match request.model {
            OracleModel::Phase => PHASE_TOLERANCE,
            OracleModel::Amplitude { .. } => AMPLITUDE_TOLERANCE,
        };
        (
            TwoModeDensityMatrix::squeezed_vacuum(request.r, request.oracle_trunc)?,
            tol,
        )
    } else {
        match request.model {
            OracleModel::Phase => (
                analytic_phase_state(PhasePoint::new(request.r, request.d)?, request.oracle_trunc)?,
                PHASE_TOLERANCE,
            ),
            OracleModel::Amplitude { nbar } => (
                analytic_amplitude_state(
                    AmplitudePoint::new(request.r, request.d, nbar)?,
                    request.oracle_trunc,
                )?,
                AMPLITUDE_TOLERANCE,
            ),
        }
    };
    let max_abs_deviation = analytic.max_abs_diff(&run.rho);
    let spectrum = symmetric_eigenvalues(&run.rho.to_matrix()?, DEFAULT_EIG_TOL)?;
    Ok(VerifyReport {
        request: request.clone(),
        steps: run.steps,
        max_abs_deviation,
        trace_drift: run.trace_drift,
        symmetry_error: run.rho.asymmetry(),
        mode_exchange_error: run.rho.mode_exchange_asymmetry(),
        oracle_min_eigenvalue: spectrum.min(),
        tolerance,
        passed: max_abs_deviation < tolerance,
    })
}
