//! Joint state of N consecutive ancillas emitted at steady state.

use thiserror::Error;

use crate::linalg::{
    apply_two_qubit_unitary, insert_qubit, partial_trace_op, validate_state, DensityMatrix,
    LinalgError, C64,
};
use crate::model::{
    partial_swap_unitary, thermal_map_kernel, AncillaPrep, ModelParams, ThermalKernel,
};
use crate::steady::{build_stroboscopic_channel_with, fixed_point, SteadyStateError};

/// Largest block length built without an explicit override. The working
/// register at this size is 2^13-dimensional (about 1 GiB).
pub const DEFAULT_MAX_ANCILLAS: usize = 12;

/// Tolerance for the emitted ancilla state.
const CHAIN_STATE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("block of {requested} ancillas exceeds the cap of {cap}")]
    ExceedsAncillaCap { requested: usize, cap: usize },
    #[error("block length must be at least 1")]
    Empty,
    #[error("closed form only holds for ground-state ancillas, got `{0}`")]
    UnsupportedPrep(String),
    #[error(transparent)]
    SteadyState(#[from] SteadyStateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainConfig {
    pub params: ModelParams,
    pub n_ancillas: usize,
    pub max_ancillas: usize,
}

impl ChainConfig {
    pub fn new(params: ModelParams, n_ancillas: usize) -> Self {
        Self {
            params,
            n_ancillas,
            max_ancillas: DEFAULT_MAX_ANCILLAS,
        }
    }

    pub fn with_max_ancillas(mut self, cap: usize) -> Self {
        self.max_ancillas = cap;
        self
    }

    pub fn with_n_ancillas(&self, n: usize) -> Self {
        Self {
            n_ancillas: n,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        if self.n_ancillas == 0 {
            return Err(ChainError::Empty);
        }
        if self.n_ancillas > self.max_ancillas {
            return Err(ChainError::ExceedsAncillaCap {
                requested: self.n_ancillas,
                cap: self.max_ancillas,
            });
        }
        Ok(())
    }
}

/// State of ancillas A_1..A_N and the system, with the system in the last
/// slot, right after the N-th rethermalization step.
pub fn build_joint_state(config: &ChainConfig) -> Result<DensityMatrix, ChainError> {
    build_joint_state_with(config, thermal_map_kernel)
}

pub fn build_joint_state_with(
    config: &ChainConfig,
    kernel: ThermalKernel,
) -> Result<DensityMatrix, ChainError> {
    config.validate()?;
    let params = &config.params;
    let phi = build_stroboscopic_channel_with(params, kernel)?;
    let rho_star = fixed_point(&phi)?.rho_star;
    let ancilla = params.ancilla_prep.state();
    let swap = partial_swap_unitary(params.g_tau_sa);

    let mut register = rho_star.into_matrix();
    for k in 0..config.n_ancillas {
        // Register is A_1..A_k, S; the fresh ancilla goes in front of S.
        register = insert_qubit(&register, k, ancilla.matrix())?;
        let system = k + 1;
        apply_two_qubit_unitary(&mut register, &swap, system, k)?;
        kernel(&mut register, system, params)?;
    }
    Ok(DensityMatrix::from_trusted(register))
}

/// ρ_{A_1…A_N}: the steady-state joint state of N consecutive ancillas.
pub fn build_chain_state(config: &ChainConfig) -> Result<DensityMatrix, ChainError> {
    build_chain_state_with(config, thermal_map_kernel)
}

pub fn build_chain_state_with(
    config: &ChainConfig,
    kernel: ThermalKernel,
) -> Result<DensityMatrix, ChainError> {
    let reduced = reduced_chain_matrix(config, kernel)?;
    Ok(validate_state(&reduced, CHAIN_STATE_TOL)?)
}

/// Same state without the positivity check, for finite-difference
/// neighbours whose only use is a difference quotient.
pub(crate) fn build_chain_state_unchecked(
    config: &ChainConfig,
) -> Result<DensityMatrix, ChainError> {
    Ok(DensityMatrix::from_trusted(reduced_chain_matrix(
        config,
        thermal_map_kernel,
    )?))
}

/// Reduced ancilla block with no state validation.
pub(crate) fn reduced_chain_matrix(
    config: &ChainConfig,
    kernel: ThermalKernel,
) -> Result<crate::linalg::ComplexMatrix, ChainError> {
    let joint = build_joint_state_with(config, kernel)?;
    let keep: Vec<usize> = (0..config.n_ancillas).collect();
    Ok(partial_trace_op(joint.matrix(), &keep)?)
}

fn require_ground(params: &ModelParams) -> Result<(), ChainError> {
    match params.ancilla_prep {
        AncillaPrep::Ground => Ok(()),
        ref other => Err(ChainError::UnsupportedPrep(other.label().to_string())),
    }
}

/// Closed-form excited population of one emitted ancilla for |g⟩
/// preparations:
/// n̄ (1 - e^{-Γ}) sin²θ / ((2n̄ + 1)(1 - e^{-Γ} cos²θ)).
pub fn single_ancilla_population(params: &ModelParams) -> Result<f64, ChainError> {
    require_ground(params)?;
    let decay = (-params.big_gamma()).exp();
    let (s, c) = params.g_tau_sa.sin_cos();
    let denom = 1.0 - decay * c * c;
    if denom == 0.0 {
        // Γ = 0 and θ = 0: nothing is exchanged.
        return Ok(0.0);
    }
    Ok(params.thermal_excited_population() * (-params.big_gamma()).exp_m1().abs() * s * s / denom)
}

/// Closed-form ⟨ge|ρ_{A_1A_2}|eg⟩ = e^{-Γ/2} cos θ p_A' for |g⟩ preparations.
pub fn pair_coherence(params: &ModelParams) -> Result<C64, ChainError> {
    let pa = single_ancilla_population(params)?;
    let value = (-0.5 * params.big_gamma()).exp() * params.g_tau_sa.cos() * pa;
    Ok(C64::new(value, 0.0))
}
