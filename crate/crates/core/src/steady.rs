//! The one-collision channel on the system qubit and its fixed point.
//!
//! Operators are column-vectorized: entry (i, j) of a 2x2 operator sits at
//! index `i + 2 j`.

use faer::linalg::solvers::Solve;
use faer::Mat;
use thiserror::Error;

use crate::linalg::{
    apply_two_qubit_unitary, kron, partial_trace_op, validate_state, ComplexMatrix, DensityMatrix,
    LinalgError, C64,
};
use crate::model::{partial_swap_unitary, thermal_map_kernel, ModelParams, ThermalKernel};

/// Eigenvalues within this distance of 1 count toward the fixed-point
/// multiplicity.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteadyStateError {
    #[error("fixed point is not unique: {multiplicity} eigenvalues within 1e-9 of 1")]
    DegenerateFixedPoint { multiplicity: usize },
    #[error("fixed-point residual {residual:e} exceeds tolerance")]
    Residual { residual: f64 },
    #[error("eigenvalue computation failed for the superoperator")]
    Spectrum,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    mat: ComplexMatrix,
}

impl Superoperator {
    pub fn from_matrix(mat: ComplexMatrix) -> Result<Self, LinalgError> {
        if mat.dim() != 4 {
            return Err(LinalgError::DimensionMismatch {
                expected: 4,
                found: mat.dim(),
            });
        }
        Ok(Self { mat })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn apply(&self, op: &ComplexMatrix) -> ComplexMatrix {
        unvec(&self.mat_vec(&vec(op)))
    }

    fn mat_vec(&self, v: &[C64; 4]) -> [C64; 4] {
        std::array::from_fn(|r| (0..4).map(|k| self.mat[(r, k)] * v[k]).sum())
    }

    /// max over columns of |tr Φ(E_ij) - δ_ij|
    pub fn trace_defect(&self) -> f64 {
        (0..4)
            .map(|k| {
                let expected = if k == 0 || k == 3 { 1.0 } else { 0.0 };
                (self.mat[(0, k)] + self.mat[(3, k)] - expected).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Eigenvalues sorted by decreasing modulus.
    pub fn spectrum(&self) -> Result<Vec<C64>, SteadyStateError> {
        let mut vals = self
            .mat
            .as_faer()
            .eigenvalues()
            .map_err(|_| SteadyStateError::Spectrum)?;
        vals.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        Ok(vals)
    }
}

pub(crate) fn vec(op: &ComplexMatrix) -> [C64; 4] {
    [op[(0, 0)], op[(1, 0)], op[(0, 1)], op[(1, 1)]]
}

pub(crate) fn unvec(v: &[C64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_rows([[v[0], v[2]], [v[1], v[3]]])
}

/// One collision followed by rethermalization, on a raw system operator:
/// tr_A[E_S(U (X ⊗ ρ_A) U†)].
pub(crate) fn collide_once(
    op: &ComplexMatrix,
    params: &ModelParams,
    kernel: ThermalKernel,
) -> Result<ComplexMatrix, LinalgError> {
    let ancilla = params.ancilla_prep.state();
    let mut joint = kron(op, ancilla.matrix());
    apply_two_qubit_unitary(&mut joint, &partial_swap_unitary(params.g_tau_sa), 0, 1)?;
    kernel(&mut joint, 0, params)?;
    partial_trace_op(&joint, &[0])
}

/// Φ as a 4x4 matrix on vectorized system operators.
pub fn build_stroboscopic_channel(params: &ModelParams) -> Superoperator {
    build_stroboscopic_channel_with(params, thermal_map_kernel)
        .expect("two-qubit register operations are in range")
}

pub fn build_stroboscopic_channel_with(
    params: &ModelParams,
    kernel: ThermalKernel,
) -> Result<Superoperator, LinalgError> {
    let mut mat = ComplexMatrix::zeros(4);
    for k in 0..4 {
        let mut basis = [C64::new(0.0, 0.0); 4];
        basis[k] = C64::new(1.0, 0.0);
        let image = vec(&collide_once(&unvec(&basis), params, kernel)?);
        for (r, v) in image.iter().enumerate() {
            mat[(r, k)] = *v;
        }
    }
    Ok(Superoperator { mat })
}

#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub rho_star: DensityMatrix,
    /// 1 - |λ₂|
    pub spectral_gap: f64,
}

/// Unique trace-one solution of Φ(ρ) = ρ.
pub fn fixed_point(phi: &Superoperator) -> Result<FixedPoint, SteadyStateError> {
    let spectrum = phi.spectrum()?;
    let multiplicity = spectrum
        .iter()
        .filter(|l| (*l - 1.0).norm() <= DEGENERACY_TOL)
        .count();
    if multiplicity > 1 {
        return Err(SteadyStateError::DegenerateFixedPoint { multiplicity });
    }
    let spectral_gap = 1.0 - spectrum.get(1).map_or(0.0, |l| l.norm());

    // (Φ - I) v = 0 with the ρ_00 row replaced by tr ρ = 1. Trace
    // preservation makes the dropped row a combination of the others.
    let a = Mat::<C64>::from_fn(4, 4, |r, k| {
        if r == 0 {
            if k == 0 || k == 3 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        } else {
            phi.mat[(r, k)]
                - if r == k {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
        }
    });
    let mut rhs = Mat::<C64>::zeros(4, 1);
    rhs[(0, 0)] = C64::new(1.0, 0.0);
    let sol = a.partial_piv_lu().solve(&rhs);
    let v: [C64; 4] = std::array::from_fn(|i| sol[(i, 0)]);
    let rho = unvec(&v);

    let residual = phi.apply(&rho).max_abs_diff(&rho);
    if residual > 1e-12 {
        return Err(SteadyStateError::Residual { residual });
    }
    let rho_star = validate_state(&rho, 1e-10)?;
    Ok(FixedPoint {
        rho_star,
        spectral_gap,
    })
}

/// Fixed point of the collision channel for `params`.
pub fn steady_state(params: &ModelParams) -> Result<FixedPoint, SteadyStateError> {
    fixed_point(&build_stroboscopic_channel(params))
}
