use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResultKind {
    Exact,
    UpperBound,
}

impl ResultKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ResultKind::Exact => "exact",
            ResultKind::UpperBound => "upper-bound",
        }
    }
}

impl std::str::FromStr for ResultKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(ResultKind::Exact),
            "upper-bound" => Ok(ResultKind::UpperBound),
            other => Err(format!("unknown result kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Probability mass not represented in the truncated matrices.
    pub trace_deficit: f64,
    /// Smallest eigenvalue seen across all diagonalized (normalized) matrices.
    pub min_eigenvalue: f64,
    /// Worst Jacobi off-diagonal residual.
    pub eig_residual: f64,
    /// Last block index included; `None` for the phase channel.
    pub k_cutoff: Option<usize>,
}

/// An entanglement value in bits plus how it should be read.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementResult {
    pub value_bits: f64,
    pub kind: ResultKind,
    pub diagnostics: Diagnostics,
}
