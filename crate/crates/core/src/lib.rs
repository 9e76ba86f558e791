//! Collisional quantum thermometry.
//!
//! A system qubit in contact with a thermal bath is probed by a stream of
//! ancilla qubits through resonant partial-SWAP collisions. This crate
//! builds the stroboscopic steady state, the correlated state of N
//! consecutive ancillas, and the quantum and classical Fisher information
//! of the bath temperature carried by that block.
//!
//! Conventions used throughout:
//! - ħ = k_B = 1, Ω = 1 unless set; temperature reads as k_B T / ħΩ.
//! - Basis index 0 is |g⟩, 1 is |e⟩.
//! - Qubit 0 is the leftmost Kronecker factor (most significant bit).

pub mod chain;
pub mod estimation;
pub mod linalg;
pub mod model;
pub mod steady;
pub mod validation;

use thiserror::Error;

pub use chain::{
    build_chain_state, build_joint_state, pair_coherence, single_ancilla_population, ChainConfig,
    ChainError, DEFAULT_MAX_ANCILLAS,
};
pub use estimation::{
    analytic_f1_ratio, analytic_pair_ratio_weak, classical_fisher_information, qfi, qfi_chain,
    qfi_chain_with, temperature_derivative, Derivative, EstimationError, Povm, QfiOptions,
    QfiResult,
};
pub use linalg::{
    hermitian_eig, kron, partial_trace, validate_state, ComplexMatrix, DensityMatrix, HermitianEig,
    LinalgError, C64,
};
pub use model::{
    apply_thermal_map, mean_occupation, partial_swap_unitary, thermal_fisher_information,
    thermal_qubit_state, AncillaPrep, ModelError, ModelParams,
};
pub use steady::{
    build_stroboscopic_channel, fixed_point, steady_state, FixedPoint, SteadyStateError,
    Superoperator,
};

/// Any failure surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    SteadyState(#[from] SteadyStateError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
}
