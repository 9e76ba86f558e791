//! Temperature estimation: derivative of the emitted state, quantum Fisher
//! information via the symmetric logarithmic derivative, classical Fisher
//! information of a POVM, and closed-form ratios for the qubit model.
//!
//! With ρ = Σ λ_i |i⟩⟨i| the SLD equation Λρ + ρΛ = 2∂ρ is solved in the
//! eigenbasis, giving
//!
//! ```text
//! F = tr(ρ Λ²) = Σ_{ij} 2 |⟨i|∂ρ|j⟩|² / (λ_i + λ_j)
//! ```
//!
//! summed over pairs inside the numerical support.

use thiserror::Error;

use crate::chain::{build_chain_state, build_chain_state_unchecked, ChainConfig, ChainError};
use crate::linalg::{hermitian_eig, ComplexMatrix, DensityMatrix, LinalgError, C64};
use crate::model::{thermal_fisher_information, ModelError};

pub const DEFAULT_REL_STEP: f64 = 1e-5;
pub const DEFAULT_SUPPORT_CUTOFF: f64 = 1e-12;

/// Largest absolute step δT accepted by [`temperature_derivative`].
pub const MAX_STEP: f64 = 0.1;
/// Relative Richardson disagreement above which the derivative is rejected.
pub const NON_SMOOTH_TOL: f64 = 1e-4;
/// Largest |⟨i|∂ρ|j⟩| allowed on a discarded eigenvalue pair.
pub const SUPPORT_LEAK_TOL: f64 = 1e-6;
/// Outcomes with smaller probability are skipped in the classical FI.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimationError {
    #[error("derivative step {step:e} is invalid (must be in (0, {MAX_STEP}) and below T = {temperature})")]
    StepTooLarge { step: f64, temperature: f64 },
    #[error("state is not smooth in T: Richardson disagreement {relative:e} (relative)")]
    NonSmooth { relative: f64 },
    #[error(
        "derivative leaks outside the support: |<i|drho|j>| = {magnitude:e} on a truncated pair"
    )]
    SupportLeak { magnitude: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(
        "POVM element {index} is not positive semidefinite (min eigenvalue {min_eigenvalue:e})"
    )]
    PovmNotPositive { index: usize, min_eigenvalue: f64 },
    #[error("POVM elements do not sum to the identity (max deviation {deviation:e})")]
    PovmIncomplete { deviation: f64 },
    #[error("POVM needs at least one element")]
    PovmEmpty,
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// ∂_T ρ with its finite-difference diagnostics.
#[derive(Clone, Debug)]
pub struct Derivative {
    pub drho: ComplexMatrix,
    /// δT of the coarse central difference.
    pub step: f64,
    /// max |D(δ/2) - D(δ)|, entrywise.
    pub richardson_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QfiResult {
    pub value: f64,
    pub n_truncated_pairs: usize,
    /// δT used to differentiate, when the derivative came from the pipeline.
    pub derivative_step: Option<f64>,
    pub richardson_error_estimate: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QfiOptions {
    pub rel_step: f64,
    pub support_cutoff: f64,
}

impl Default for QfiOptions {
    fn default() -> Self {
        Self {
            rel_step: DEFAULT_REL_STEP,
            support_cutoff: DEFAULT_SUPPORT_CUTOFF,
        }
    }
}

/// Central difference at δ and δ/2 combined by one Richardson step,
/// δ = `rel_step`·t.
pub fn temperature_derivative<E>(
    state_builder: impl Fn(f64) -> Result<DensityMatrix, E>,
    t: f64,
    rel_step: f64,
) -> Result<Derivative, EstimationError>
where
    E: Into<EstimationError>,
{
    let step = rel_step * t;
    if !(step > 0.0 && step < MAX_STEP && step < t) {
        return Err(EstimationError::StepTooLarge {
            step,
            temperature: t,
        });
    }
    let build = |temp: f64| state_builder(temp).map_err(Into::into);
    let central = |h: f64| -> Result<ComplexMatrix, EstimationError> {
        let plus = build(t + h)?;
        let minus = build(t - h)?;
        if plus.dim() != minus.dim() {
            return Err(EstimationError::DimensionMismatch {
                expected: plus.dim(),
                found: minus.dim(),
            });
        }
        Ok((plus.matrix() - minus.matrix()).scale(0.5 / h))
    };
    let coarse = central(step)?;
    let fine = central(0.5 * step)?;
    let extrapolated = (&fine.scale(4.0) - &coarse).scale(1.0 / 3.0);

    let richardson_error = fine.max_abs_diff(&coarse);
    let scale = extrapolated.max_abs();
    if richardson_error > 0.0 {
        let relative = if scale > 0.0 {
            richardson_error / scale
        } else {
            f64::INFINITY
        };
        if relative > NON_SMOOTH_TOL {
            return Err(EstimationError::NonSmooth { relative });
        }
    }

    // Symmetrize and remove the O(ε) trace left by rounding.
    let mut drho = extrapolated.hermitian_part();
    let shift = drho.trace().re / drho.dim() as f64;
    for i in 0..drho.dim() {
        drho[(i, i)] -= shift;
    }
    Ok(Derivative {
        drho,
        step,
        richardson_error,
    })
}

/// QFI of `rho` for the derivative `drho`.
pub fn qfi(
    rho: &DensityMatrix,
    drho: &ComplexMatrix,
    support_cutoff: f64,
) -> Result<QfiResult, EstimationError> {
    if drho.dim() != rho.dim() {
        return Err(EstimationError::DimensionMismatch {
            expected: rho.dim(),
            found: drho.dim(),
        });
    }
    let eig = hermitian_eig(rho.matrix())?;
    let n = eig.values.len();
    let lambda_max = eig.values[n - 1];
    let threshold = support_cutoff * lambda_max;

    // ∂ρ in the eigenbasis of ρ.
    let v = &eig.vectors;
    let m = v.adjoint().matmul(&drho.matmul(v));

    let mut value = 0.0;
    let mut n_truncated_pairs = 0;
    let mut worst_leak = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let denom = eig.values[i] + eig.values[j];
            let mag2 = m[(i, j)].norm_sqr();
            if denom > threshold {
                value += 2.0 * mag2 / denom;
            } else {
                n_truncated_pairs += 1;
                worst_leak = worst_leak.max(mag2.sqrt());
            }
        }
    }
    if worst_leak > SUPPORT_LEAK_TOL {
        return Err(EstimationError::SupportLeak {
            magnitude: worst_leak,
        });
    }
    Ok(QfiResult {
        value,
        n_truncated_pairs,
        derivative_step: None,
        richardson_error_estimate: None,
    })
}

/// QFI of the N-ancilla steady-state block with respect to temperature.
pub fn qfi_chain(config: &ChainConfig) -> Result<QfiResult, EstimationError> {
    qfi_chain_with(config, &QfiOptions::default())
}

pub fn qfi_chain_with(
    config: &ChainConfig,
    options: &QfiOptions,
) -> Result<QfiResult, EstimationError> {
    config.validate()?;
    let t = config.params.temperature;
    let builder = |temp: f64| -> Result<DensityMatrix, EstimationError> {
        let cfg = ChainConfig {
            params: config.params.with_temperature(temp)?,
            ..config.clone()
        };
        Ok(build_chain_state_unchecked(&cfg)?)
    };
    let derivative = temperature_derivative(builder, t, options.rel_step)?;
    let rho = build_chain_state(config)?;
    let mut result = qfi(&rho, &derivative.drho, options.support_cutoff)?;
    result.derivative_step = Some(derivative.step);
    result.richardson_error_estimate = Some(derivative.richardson_error);
    Ok(result)
}

/// F_N / F_th for a block.
pub fn qfi_chain_ratio(config: &ChainConfig) -> Result<f64, EstimationError> {
    Ok(qfi_chain(config)?.value / thermal_fisher_information(&config.params))
}

/// Positive operator-valued measure on a fixed dimension.
#[derive(Clone, Debug)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self, EstimationError> {
        let first = elements.first().ok_or(EstimationError::PovmEmpty)?;
        let dim = first.dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for (index, e) in elements.iter().enumerate() {
            if e.dim() != dim {
                return Err(EstimationError::DimensionMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
            let min_eigenvalue = hermitian_eig(e)?.values[0];
            if min_eigenvalue < -1e-10 || e.hermiticity_defect() > 1e-10 {
                return Err(EstimationError::PovmNotPositive {
                    index,
                    min_eigenvalue,
                });
            }
            sum = &sum + e;
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > 1e-10 {
            return Err(EstimationError::PovmIncomplete { deviation });
        }
        Ok(Self { elements })
    }

    /// Projectors onto the computational basis.
    pub fn computational_basis(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|k| {
                let mut p = ComplexMatrix::zeros(dim);
                p[(k, k)] = C64::new(1.0, 0.0);
                p
            })
            .collect();
        Self { elements }
    }

    /// Projectors onto the columns of a unitary.
    pub fn from_basis(unitary: &ComplexMatrix) -> Result<Self, EstimationError> {
        let n = unitary.dim();
        let elements = (0..n)
            .map(|k| {
                let col: Vec<C64> = (0..n).map(|i| unitary[(i, k)]).collect();
                ComplexMatrix::projector(&col)
            })
            .collect();
        Self::new(elements)
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }
}

fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let (sa, sb) = (a.as_slice(), b.as_slice());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += sa[i * n + k] * sb[k * n + i];
        }
    }
    acc.re
}

/// Σ_x (∂_T p(x))² / p(x) for p(x) = tr(Π_x ρ).
pub fn classical_fisher_information(
    povm: &Povm,
    rho: &DensityMatrix,
    drho: &ComplexMatrix,
) -> Result<f64, EstimationError> {
    for found in [rho.dim(), drho.dim()] {
        if found != povm.dim() {
            return Err(EstimationError::DimensionMismatch {
                expected: povm.dim(),
                found,
            });
        }
    }
    Ok(povm
        .elements
        .iter()
        .filter_map(|e| {
            let p = trace_product(e, rho.matrix());
            (p > MIN_OUTCOME_PROBABILITY).then(|| trace_product(e, drho).powi(2) / p)
        })
        .sum())
}

/// F_1/F_th for full swaps with ground-state ancillas:
/// (n̄+1)(e^Γ - 1 + 2n̄Γ)² / (e^{2Γ}(n̄+1) - n̄ - e^Γ).
/// Returns the Γ → 0 limit 0 for Γ ≤ 0.
pub fn analytic_f1_ratio(n_bar: f64, big_gamma: f64) -> f64 {
    if big_gamma <= 0.0 {
        return 0.0;
    }
    let g = big_gamma;
    if g < 1.0 {
        // expm1 keeps the small-Γ cancellations exact.
        let num = (n_bar + 1.0) * (g.exp_m1() + 2.0 * n_bar * g).powi(2);
        let den = (n_bar + 1.0) * (2.0 * g).exp_m1() - g.exp_m1();
        num / den
    } else {
        // Divided through by e^{2Γ}.
        let d = (-g).exp();
        let num = (n_bar + 1.0) * (1.0 - d + 2.0 * n_bar * g * d).powi(2);
        let den = (n_bar + 1.0) - n_bar * d * d - d;
        num / den
    }
}

/// Weak-coupling F_2/(2F_1) for ground-state ancillas:
/// 1 + (n̄Γ)² / (e^Γ - 1), with the Γ → 0 limit 1.
pub fn analytic_pair_ratio_weak(n_bar: f64, big_gamma: f64) -> f64 {
    if big_gamma <= 0.0 {
        return 1.0;
    }
    1.0 + (n_bar * big_gamma).powi(2) / big_gamma.exp_m1()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::linalg::validate_state;
    use crate::model::{thermal_qubit_state, AncillaPrep, ModelParams};

    fn gibbs_builder(t: f64) -> Result<DensityMatrix, EstimationError> {
        Ok(thermal_qubit_state(&ModelParams::new(
            t,
            0.0,
            0.0,
            AncillaPrep::Ground,
        )?))
    }

    /// d/dT of 1/(e^{1/T} + 1)
    fn analytic_dpe(t: f64) -> f64 {
        let x = 1.0 / t;
        x.exp() / (x.exp() + 1.0).powi(2) / (t * t)
    }

    #[test]
    fn constant_builder_has_zero_derivative() {
        let rho = AncillaPrep::Plus.state();
        let d =
            temperature_derivative(|_| Ok::<_, EstimationError>(rho.clone()), 2.0, 1e-5).unwrap();
        assert!(d.drho.max_abs() < 1e-10);
        assert_eq!(d.richardson_error, 0.0);
    }

    #[test]
    fn gibbs_derivative_matches_bose_derivative() {
        for t in [0.5, 2.0, 7.0] {
            let d = temperature_derivative(gibbs_builder, t, 1e-5).unwrap();
            let want = analytic_dpe(t);
            assert!((d.drho[(1, 1)].re - want).abs() < 1e-8 * want, "T={t}");
            assert!(d.drho.trace().norm() < 1e-12);
        }
    }

    #[test]
    fn step_guard() {
        assert!(matches!(
            temperature_derivative(gibbs_builder, 2.0, 0.1),
            Err(EstimationError::StepTooLarge { .. })
        ));
        assert!(matches!(
            temperature_derivative(gibbs_builder, 2.0, 0.0),
            Err(EstimationError::StepTooLarge { .. })
        ));
    }

    #[test]
    fn kinked_builder_is_non_smooth() {
        // |T - 2| has a kink exactly at the evaluation point.
        let builder = |t: f64| {
            let p = 0.3 + 0.1 * (t - 2.0).abs() * 1e3;
            validate_state(&ComplexMatrix::from_real_diag(&[1.0 - p, p]), 1e-10)
                .map_err(EstimationError::from)
        };
        let out = temperature_derivative(builder, 2.0 + 1.5e-5, 1e-5);
        assert!(
            matches!(out, Err(EstimationError::NonSmooth { .. })),
            "{out:?}"
        );
    }

    #[test]
    fn qfi_examples() {
        let rho =
            thermal_qubit_state(&ModelParams::new(2.0, 0.0, 0.0, AncillaPrep::Ground).unwrap());
        let zero = qfi(&rho, &ComplexMatrix::zeros(2), DEFAULT_SUPPORT_CUTOFF).unwrap();
        assert_eq!(zero.value, 0.0);

        let d = temperature_derivative(gibbs_builder, 2.0, 1e-5).unwrap();
        let f = qfi(&rho, &d.drho, DEFAULT_SUPPORT_CUTOFF).unwrap();
        assert!((f.value - 0.014687732012599656).abs() < 1e-9);

        // rank-1 |+><+| with drho = ε(|+><-| + |-><+|) → 4ε²
        let eps = 0.01;
        let plus = AncillaPrep::Plus.state();
        let drho = ComplexMatrix::from_real_diag(&[eps, -eps]);
        let f = qfi(&plus, &drho, DEFAULT_SUPPORT_CUTOFF).unwrap();
        assert!((f.value - 4.0 * eps * eps).abs() < 1e-15);
        assert_eq!(f.n_truncated_pairs, 1);
    }

    #[test]
    fn leak_outside_support_is_an_error() {
        let ground = AncillaPrep::Ground.state();
        let drho = ComplexMatrix::from_real_diag(&[-0.1, 0.1]);
        assert!(matches!(
            qfi(&ground, &drho, DEFAULT_SUPPORT_CUTOFF),
            Err(EstimationError::SupportLeak { .. })
        ));
    }

    #[test]
    fn energy_measurement_is_optimal_for_gibbs() {
        let rho =
            thermal_qubit_state(&ModelParams::new(2.0, 0.0, 0.0, AncillaPrep::Ground).unwrap());
        let d = temperature_derivative(gibbs_builder, 2.0, 1e-5).unwrap();
        let povm = Povm::computational_basis(2);
        let cfi = classical_fisher_information(&povm, &rho, &d.drho).unwrap();
        let q = qfi(&rho, &d.drho, DEFAULT_SUPPORT_CUTOFF).unwrap().value;
        assert!((cfi - q).abs() < 1e-12 * q.max(1.0));

        let trivial = Povm::new(vec![ComplexMatrix::identity(2)]).unwrap();
        assert!(
            classical_fisher_information(&trivial, &rho, &d.drho)
                .unwrap()
                .abs()
                < 1e-20
        );
    }

    #[test]
    fn povm_validation() {
        assert!(matches!(Povm::new(vec![]), Err(EstimationError::PovmEmpty)));
        assert!(matches!(
            Povm::new(vec![ComplexMatrix::from_real_diag(&[1.0, 0.0])]),
            Err(EstimationError::PovmIncomplete { .. })
        ));
        assert!(matches!(
            Povm::new(vec![
                ComplexMatrix::from_real_diag(&[1.5, 0.0]),
                ComplexMatrix::from_real_diag(&[-0.5, 1.0])
            ]),
            Err(EstimationError::PovmNotPositive { index: 1, .. })
        ));
        let povm = Povm::computational_basis(4);
        let rho = AncillaPrep::Plus.state();
        assert!(matches!(
            classical_fisher_information(&povm, &rho, rho.matrix()),
            Err(EstimationError::DimensionMismatch {
                expected: 4,
                found: 2
            })
        ));
    }

    #[test]
    fn f1_ratio_limits() {
        let n = 1.5414940825367982;
        assert!(analytic_f1_ratio(n, 1e-8) < 1e-6);
        assert_eq!(analytic_f1_ratio(n, 0.0), 0.0);
        // The excess over 1 approaches 4Γn̄e^{-Γ} with a relative
        // correction of about 0.26/Γ (checked in extended precision).
        for g in [10.0, 20.0, 30.0] {
            let r = analytic_f1_ratio(n, g);
            let leading = 4.0 * g * n * (-g).exp();
            assert!(r > 1.0);
            assert!(((r - 1.0) / leading - 1.0).abs() < 0.5 / g, "Γ={g}");
        }
        assert!((analytic_f1_ratio(n, 0.8) - 3.927129412757141).abs() < 1e-12);
        // both branches agree at the switch point
        let lo = analytic_f1_ratio(n, 1.0 - 1e-12);
        let hi = analytic_f1_ratio(n, 1.0);
        assert!((lo - hi).abs() < 1e-9);
    }

    #[test]
    fn pair_ratio_limits() {
        assert_eq!(analytic_pair_ratio_weak(2.0, 0.0), 1.0);
        assert!((analytic_pair_ratio_weak(2.0, 1e-9) - 1.0).abs() < 1e-8);
        assert!(
            (analytic_pair_ratio_weak(1.0, 1.5936250521624173) - 1.6476102378918199).abs() < 1e-12
        );
    }

    #[test]
    fn full_swap_thermalized_chain_is_at_tfi() {
        let p = ModelParams::new(2.0, 20.0, FRAC_PI_2, AncillaPrep::Ground).unwrap();
        let r = qfi_chain_ratio(&ChainConfig::new(p, 1)).unwrap();
        assert!((r - 1.0).abs() < 1e-3, "{r}");
    }
}
