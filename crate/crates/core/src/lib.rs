//! Decoherence of two-mode squeezed vacuum states.
//!
//! Exact relative entropy of entanglement under phase damping, a convexity
//! upper bound under thermal amplitude damping, the thermal separability
//! border, and an RK4 master-equation oracle for checking the closed forms.

pub mod amplitude;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod phase;
pub mod relative_entropy;
pub mod result;
pub mod sweep;
pub mod tmsv;
pub mod verify;

pub use error::{Error, Result};
pub use result::{Diagnostics, EntanglementResult, ResultKind};
