//! Fast-forwarded simulation of dephasing Lindbladians `L_H[ρ] = HρH − ½{ρ,H²}`.
//!
//! The crate covers the closed-form evolution, the step-by-step dilated
//! baseline, the binomial-register fast-forwarding construction, three
//! routes of Lindbladian phase estimation, Gibbs-state preparation through
//! a single PSD jump, and commuting multi-jump evolution in the vectorized
//! (Choi) picture.
//!
//! Conventions used throughout:
//! - In `kron(A, B)` the first factor is the high-order index.
//! - Ancilla and register factors are always the high-order factor.
//! - `evolve(H, s, v)` means `e^{−iHs} v`.
//! - Vectorization is row-major, `|ρ⟩⟩ = Σ ρ_ij |i⟩|j⟩`.

pub mod choi;
pub mod concentration;
pub mod dilated_baseline;
mod error;
pub mod exact_oracle;
pub mod fastforward;
pub mod fit;
pub mod gibbs;
pub mod model;
pub mod numkernel;
pub mod qpe;
pub mod stateprep;

pub use error::{Error, Result};
pub use numkernel::{CMatrix, CVector, DensityMatrix, StateVector, Tolerances, C64};

use serde::{Deserialize, Serialize};

/// Resource accounting shared by all simulation routes.
///
/// `hamiltonian_time` is the total evolution time under the (dilated)
/// jump Hamiltonian. `step_count` is set only by step-based routes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub hamiltonian_time: f64,
    pub step_count: Option<u64>,
    pub ancilla_count: u64,
}

impl CostReport {
    pub fn zero() -> Self {
        CostReport { hamiltonian_time: 0.0, step_count: None, ancilla_count: 0 }
    }
}
