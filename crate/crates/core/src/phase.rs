//! Phase damping: the exact dephased TMSV density matrix
//!
//! ρ(t) = Σ tanh^{n₁+n₂}r · exp(−d(n₁−n₂)²) / cosh²r · |n₁,n₁⟩⟨n₂,n₂|,  d = γt,
//!
//! and its exact relative entropy of entanglement.

use crate::error::{Error, Result};
use crate::numerics::{pow_ln, SymmetricMatrix};
use crate::relative_entropy::correlated_basis_er;
use crate::result::{Diagnostics, EntanglementResult, ResultKind};
use crate::tmsv::SqueezeParams;

/// Default truncation (max photon number per mode).
pub const DEFAULT_TRUNCATION: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub r: f64,
    /// Degree of damping γt.
    pub d: f64,
}

impl PhasePoint {
    pub fn new(r: f64, d: f64) -> Result<Self> {
        SqueezeParams::new(r)?;
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "damping d must be finite and nonnegative, got {d}"
            )));
        }
        Ok(PhasePoint { r, d })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDampedMatrix {
    pub point: PhasePoint,
    pub matrix: SymmetricMatrix,
    pub truncation: usize,
    pub trace_deficit: f64,
}

/// Entry a_{n₁,n₂}, evaluated in log space.
pub fn phase_coefficient(point: PhasePoint, n1: usize, n2: usize) -> f64 {
    let sq = SqueezeParams::new(point.r).expect("validated point");
    let gap = n1 as f64 - n2 as f64;
    (pow_ln(n1 + n2, sq.ln_tanh()) - point.d * gap * gap - 2.0 * sq.ln_cosh()).exp()
}

pub fn build_phase_matrix(
    point: PhasePoint,
    truncation: usize,
    tail_ceiling: f64,
) -> Result<PhaseDampedMatrix> {
    let point = PhasePoint::new(point.r, point.d)?;
    let sq = SqueezeParams::new(point.r)?;
    let trace_deficit = sq.check_truncation(truncation, tail_ceiling)?;
    let ln_tanh = sq.ln_tanh();
    let ln_norm = -2.0 * sq.ln_cosh();
    let matrix = SymmetricMatrix::from_upper_fn(truncation + 1, |i, j| {
        let gap = (j - i) as f64;
        (pow_ln(i + j, ln_tanh) - point.d * gap * gap + ln_norm).exp()
    })?;
    Ok(PhaseDampedMatrix {
        point,
        matrix,
        truncation,
        trace_deficit,
    })
}

/// Exact E_R = H(diag) − S(ρ) of the dephased state.
pub fn relative_entropy_exact(m: &PhaseDampedMatrix) -> Result<EntanglementResult> {
    let (value, spectrum) = correlated_basis_er(&m.matrix)?;
    Ok(EntanglementResult {
        // Clamp only rounding-level negatives; anything larger is reported as computed.
        value_bits: if value < 0.0 && value > -1e-12 {
            0.0
        } else {
            value
        },
        kind: ResultKind::Exact,
        diagnostics: Diagnostics {
            trace_deficit: m.trace_deficit,
            min_eigenvalue: spectrum.min(),
            eig_residual: spectrum.residual,
            k_cutoff: None,
        },
    })
}

/// The separable state closest in relative entropy: diag(a_{0,0}, ..., a_{N,N}).
pub fn closest_disentangled_state(m: &PhaseDampedMatrix) -> SymmetricMatrix {
    SymmetricMatrix::diagonal(&m.matrix.diag())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tmsv::{
        pure_entanglement_bits, schmidt_distribution, SqueezeParams, DEFAULT_TAIL_CEILING,
    };

    fn build(r: f64, d: f64, n: usize) -> PhaseDampedMatrix {
        build_phase_matrix(PhasePoint::new(r, d).unwrap(), n, DEFAULT_TAIL_CEILING).unwrap()
    }

    #[test]
    fn undamped_matrix_is_rank_one() {
        let m = build(0.5, 0.0, 40);
        let p = m.matrix.diag();
        for i in 0..=40 {
            for j in 0..=40 {
                let expected = (p[i] * p[j]).sqrt();
                assert!((m.matrix.get(i, j) - expected).abs() <= 1e-13 * expected);
            }
        }
        let e = relative_entropy_exact(&m).unwrap();
        let h = crate::numerics::shannon_entropy_bits(&p, crate::numerics::Normalization::Check)
            .unwrap();
        assert!((e.value_bits - h).abs() < 1e-10);
    }

    #[test]
    fn diagonal_independent_of_damping() {
        let a = build(0.7, 0.0, 60);
        let b = build(0.7, 1.3, 60);
        assert_eq!(a.matrix.diag(), b.matrix.diag());
        let s = schmidt_distribution(SqueezeParams::new(0.7).unwrap(), 60, DEFAULT_TAIL_CEILING)
            .unwrap();
        for (x, y) in a.matrix.diag().iter().zip(&s.probs) {
            assert!((x - y).abs() <= 1e-15 * y);
        }
    }

    #[test]
    fn entries_match_direct_formula() {
        let (r, d) = (0.9, 0.35);
        let m = build(r, d, 80);
        let t = r.tanh();
        let c2 = r.cosh().powi(2);
        for (i, j) in [(0, 0), (1, 0), (3, 7), (20, 22), (50, 49)] {
            let gap = i as f64 - j as f64;
            let want = t.powi((i + j) as i32) * (-d * gap * gap).exp() / c2;
            let got = m.matrix.get(i, j);
            assert!((got - want).abs() <= 1e-13 * want, "({i},{j}) {got} {want}");
            assert_eq!(got, phase_coefficient(m.point, i, j));
        }
        assert!((m.trace_deficit - t.powi(162)).abs() < 1e-14);
    }

    #[test]
    fn pure_limit_matches_closed_form() {
        let e = relative_entropy_exact(&build(1.0, 0.0, 100)).unwrap();
        let exact = pure_entanglement_bits(SqueezeParams::new(1.0).unwrap());
        assert!((e.value_bits - exact).abs() < 1e-9);
        assert_eq!(e.kind, ResultKind::Exact);
        assert!(e.diagnostics.k_cutoff.is_none());
    }

    #[test]
    fn strong_damping_kills_entanglement() {
        let e = relative_entropy_exact(&build(1.0, 50.0, 100)).unwrap();
        assert!(
            e.value_bits >= 0.0 && e.value_bits < 1e-9,
            "{}",
            e.value_bits
        );
    }

    #[test]
    fn truncation_stable() {
        let a = relative_entropy_exact(&build(0.5, 0.1, 100))
            .unwrap()
            .value_bits;
        let b = relative_entropy_exact(&build(0.5, 0.1, 120))
            .unwrap()
            .value_bits;
        assert!(a > 0.0);
        assert!((a - b).abs() < 1e-10, "{a} {b}");
    }

    #[test]
    fn vacuum_closest_state() {
        let m = build(0.0, 0.4, 10);
        let sigma = closest_disentangled_state(&m);
        let mut want = vec![0.0; 11];
        want[0] = 1.0;
        assert_eq!(sigma, SymmetricMatrix::diagonal(&want));
        assert_eq!(relative_entropy_exact(&m).unwrap().value_bits, 0.0);
    }

    #[test]
    fn rejects_bad_points() {
        assert!(PhasePoint::new(0.5, -0.1).is_err());
        assert!(PhasePoint::new(-0.5, 0.1).is_err());
        assert!(PhasePoint::new(0.5, f64::INFINITY).is_err());
        assert!(matches!(
            build_phase_matrix(
                PhasePoint::new(1.5, 0.1).unwrap(),
                100,
                DEFAULT_TAIL_CEILING
            ),
            Err(Error::TruncationInsufficient { .. })
        ));
    }
}
