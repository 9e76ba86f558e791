//! Qubit model: parameters, the exact thermalization channel and the
//! resonant partial-SWAP collision.
//!
//! Units: ħ = k_B = 1, so temperature and `omega` share energy units and
//! the default `omega = 1` makes temperature read as k_B T / ħΩ.
//! Basis index 0 is |g⟩, index 1 is |e⟩.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::linalg::{
    map_qubit_blocks, validate_state, ComplexMatrix, DensityMatrix, LinalgError, C64, STATE_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("temperature must be positive and finite, got {0}")]
    Temperature(f64),
    #[error("omega must be positive and finite, got {0}")]
    Omega(f64),
    #[error("gamma_tau_se must be non-negative and finite, got {0}")]
    GammaTauSe(f64),
    #[error("g_tau_sa must lie in [0, pi/2], got {0}")]
    GTauSa(f64),
    #[error("custom ancilla must be a single-qubit state, got {0} qubits")]
    CustomNotQubit(usize),
    #[error("unknown ancilla preparation `{0}` (expected g, e or plus)")]
    UnknownPrep(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Initial state of every ancilla.
#[derive(Clone, Debug, PartialEq)]
pub enum AncillaPrep {
    Ground,
    Excited,
    /// (|g⟩ + |e⟩)/√2
    Plus,
    Custom(DensityMatrix),
}

impl AncillaPrep {
    pub fn custom(rho: DensityMatrix) -> Result<Self, ModelError> {
        if rho.num_qubits() != 1 {
            return Err(ModelError::CustomNotQubit(rho.num_qubits()));
        }
        let rho = validate_state(rho.matrix(), STATE_TOL)?;
        Ok(Self::Custom(rho))
    }

    pub fn state(&self) -> DensityMatrix {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            Self::Ground => DensityMatrix::pure(&[one, zero]),
            Self::Excited => DensityMatrix::pure(&[zero, one]),
            Self::Plus => DensityMatrix::pure(&[h, h]),
            Self::Custom(rho) => Ok(rho.clone()),
        }
        .expect("built-in preparations are valid states")
    }

    /// Short label used in CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            Self::Ground => "g",
            Self::Excited => "e",
            Self::Plus => "plus",
            Self::Custom(_) => "custom",
        }
    }

    pub fn is_diagonal(&self) -> bool {
        let s = self.state();
        s.matrix()[(0, 1)].norm() == 0.0
    }
}

impl fmt::Display for AncillaPrep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AncillaPrep {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "g" | "ground" => Ok(Self::Ground),
            "e" | "excited" => Ok(Self::Excited),
            "plus" | "+" => Ok(Self::Plus),
            other => Err(ModelError::UnknownPrep(other.to_string())),
        }
    }
}

/// Physical parameters of the collisional model.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub omega: f64,
    pub temperature: f64,
    /// γ τ_SE
    pub gamma_tau_se: f64,
    /// g τ_SA, the partial-SWAP angle
    pub g_tau_sa: f64,
    pub ancilla_prep: AncillaPrep,
}

impl ModelParams {
    pub fn new(
        temperature: f64,
        gamma_tau_se: f64,
        g_tau_sa: f64,
        ancilla_prep: AncillaPrep,
    ) -> Result<Self, ModelError> {
        let p = Self {
            omega: 1.0,
            temperature,
            gamma_tau_se,
            g_tau_sa,
            ancilla_prep,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_omega(mut self, omega: f64) -> Result<Self, ModelError> {
        self.omega = omega;
        self.validate()?;
        Ok(self)
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self, ModelError> {
        let p = Self {
            temperature,
            ..self.clone()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(ModelError::Temperature(self.temperature));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(ModelError::Omega(self.omega));
        }
        if !(self.gamma_tau_se >= 0.0 && self.gamma_tau_se.is_finite()) {
            return Err(ModelError::GammaTauSe(self.gamma_tau_se));
        }
        if !(0.0..=FRAC_PI_2).contains(&self.g_tau_sa) {
            return Err(ModelError::GTauSa(self.g_tau_sa));
        }
        Ok(())
    }

    /// n̄
    pub fn n_bar(&self) -> f64 {
        mean_occupation(self)
    }

    /// Γ = γ τ_SE (2n̄ + 1)
    pub fn big_gamma(&self) -> f64 {
        self.gamma_tau_se * (2.0 * self.n_bar() + 1.0)
    }

    /// Thermal excited-state population n̄ / (2n̄ + 1).
    pub fn thermal_excited_population(&self) -> f64 {
        // Equivalent to 1 / (e^{Ω/T} + 1), which stays accurate when n̄ underflows.
        1.0 / ((self.omega / self.temperature).exp() + 1.0)
    }
}

/// Bose occupation 1 / (e^{Ω/T} - 1).
pub fn mean_occupation(params: &ModelParams) -> f64 {
    1.0 / (params.omega / params.temperature).exp_m1()
}

/// Gibbs state diag(p_g, p_e) of H = Ω σ_z / 2.
pub fn thermal_qubit_state(params: &ModelParams) -> DensityMatrix {
    let pe = params.thermal_excited_population();
    DensityMatrix::from_trusted(ComplexMatrix::from_real_diag(&[1.0 - pe, pe]))
}

/// In-place kernel for the thermal channel acting on one register qubit.
/// Swappable so validation can run a deliberately broken variant.
pub type ThermalKernel = fn(&mut ComplexMatrix, usize, &ModelParams) -> Result<(), LinalgError>;

/// Exact generalized amplitude damping e^{L τ_SE} on qubit `qubit`,
/// identity elsewhere.
pub fn thermal_map_kernel(
    mat: &mut ComplexMatrix,
    qubit: usize,
    params: &ModelParams,
) -> Result<(), LinalgError> {
    let decay = (-params.big_gamma()).exp();
    let coherence = (-0.5 * params.big_gamma()).exp();
    let pe = params.thermal_excited_population();
    let feed = 1.0 - decay;
    map_qubit_blocks(mat, qubit, |blk| {
        let total = blk[0] + blk[3];
        blk[0] = blk[0] * decay + total * ((1.0 - pe) * feed);
        blk[3] = blk[3] * decay + total * (pe * feed);
        blk[1] *= coherence;
        blk[2] *= coherence;
    })
}

/// Applies E_S = e^{L_S τ_SE} to `system_qubit` of `rho`.
pub fn apply_thermal_map(
    rho: &DensityMatrix,
    system_qubit: usize,
    params: &ModelParams,
) -> Result<DensityMatrix, LinalgError> {
    let mut mat = rho.matrix().clone();
    thermal_map_kernel(&mut mat, system_qubit, params)?;
    Ok(DensityMatrix::from_trusted(mat))
}

/// exp(-i θ (σ+σ- + σ-σ+)) on (system, ancilla), system the more
/// significant factor.
pub fn partial_swap_unitary(theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    let mut u = ComplexMatrix::identity(4);
    u[(1, 1)] = C64::new(c, 0.0);
    u[(2, 2)] = C64::new(c, 0.0);
    u[(1, 2)] = C64::new(0.0, -s);
    u[(2, 1)] = C64::new(0.0, -s);
    u
}

/// Thermal Fisher information of one qubit, Var(H)/T⁴ =
/// (Ω / 2T²)² sech²(Ω / 2T).
pub fn thermal_fisher_information(params: &ModelParams) -> f64 {
    let t = params.temperature;
    let x = params.omega / (2.0 * t);
    let sech = 1.0 / x.cosh();
    (params.omega / (2.0 * t * t)).powi(2) * sech * sech
}
