//! Thermal map, partial swap and the stroboscopic channel against dense
//! oracles.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use colltherm::{
    apply_thermal_map, build_stroboscopic_channel, fixed_point, kron, partial_swap_unitary,
    steady_state, thermal_qubit_state, validate_state, AncillaPrep, ComplexMatrix, DensityMatrix,
    ModelParams,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn random_params(rng: &mut impl Rng) -> ModelParams {
    let prep = match rng.gen_range(0..4) {
        0 => AncillaPrep::Ground,
        1 => AncillaPrep::Excited,
        2 => AncillaPrep::Plus,
        _ => AncillaPrep::custom(random_state(rng, 1)).unwrap(),
    };
    ModelParams::new(
        rng.gen_range(0.2..6.0),
        rng.gen_range(0.0..2.5),
        rng.gen_range(0.0..FRAC_PI_2),
        prep,
    )
    .unwrap()
}

#[test]
fn thermal_map_matches_kraus_oracle_and_lindblad_integration() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let p = random_params(&mut rng);
        let rho = random_state(&mut rng, 1);
        let got = apply_thermal_map(&rho, 0, &p).unwrap();
        let kraus = dense_thermal(rho.matrix(), 0, &p);
        assert!(
            got.matrix().max_abs_diff(&kraus) < 1e-13,
            "{}",
            got.matrix().max_abs_diff(&kraus)
        );
        let rk4 = integrate_lindblad(rho.matrix(), &p, 4000);
        assert!(got.matrix().max_abs_diff(&rk4) < 1e-10, "{p:?}");
    }
}

#[test]
fn ground_relaxation_example_via_integration() {
    let n = ModelParams::new(2.0, 0.0, 0.0, AncillaPrep::Ground)
        .unwrap()
        .n_bar();
    let p = ModelParams::new(2.0, 1.0 / (2.0 * n + 1.0), 0.0, AncillaPrep::Ground).unwrap();
    let rk4 = integrate_lindblad(AncillaPrep::Ground.state().matrix(), &p, 4000);
    assert!((rk4[(1, 1)].re - 0.2386).abs() < 1e-4);
    let exact = apply_thermal_map(&AncillaPrep::Ground.state(), 0, &p).unwrap();
    assert!((exact.population(1) - rk4[(1, 1)].re).abs() < 1e-12);
}

#[test]
fn thermal_map_on_register_qubit_matches_dense_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for q in 0..3 {
        let p = random_params(&mut rng);
        let rho = random_state(&mut rng, 3);
        let got = apply_thermal_map(&rho, q, &p).unwrap();
        assert!(
            got.matrix()
                .max_abs_diff(&dense_thermal(rho.matrix(), q, &p))
                < 1e-13
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn thermal_map_is_cptp(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_params(&mut rng);
        let rho = random_state(&mut rng, 2);
        let q = rng.gen_range(0..2);
        let out = apply_thermal_map(&rho, q, &p).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(validate_state(out.matrix(), 1e-9).is_ok());
    }

    #[test]
    fn thermal_map_is_linear(seed in any::<u64>(), w in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_params(&mut rng);
        let a = random_state(&mut rng, 2);
        let b = random_state(&mut rng, 2);
        let mix = validate_state(&(&a.matrix().scale(w) + &b.matrix().scale(1.0 - w)), 1e-10).unwrap();
        let lhs = apply_thermal_map(&mix, 1, &p).unwrap();
        let rhs = &apply_thermal_map(&a, 1, &p).unwrap().matrix().scale(w)
            + &apply_thermal_map(&b, 1, &p).unwrap().matrix().scale(1.0 - w);
        prop_assert!(lhs.matrix().max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn thermal_map_leaves_other_factors_alone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_params(&mut rng);
        let r1 = random_state(&mut rng, 1);
        let r2 = random_state(&mut rng, 2);
        let mapped = apply_thermal_map(&r1.kron(&r2), 0, &p).unwrap();
        let expected = kron(apply_thermal_map(&r1, 0, &p).unwrap().matrix(), r2.matrix());
        prop_assert!(mapped.matrix().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn thermal_map_semigroup(seed in any::<u64>(), a in 0.0f64..2.0, b in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = rng.gen_range(0.2..6.0);
        let rho = random_state(&mut rng, 2);
        let with = |g: f64| ModelParams::new(t, g, 0.0, AncillaPrep::Ground).unwrap();
        let two = apply_thermal_map(&apply_thermal_map(&rho, 1, &with(a)).unwrap(), 1, &with(b)).unwrap();
        let one = apply_thermal_map(&rho, 1, &with(a + b)).unwrap();
        prop_assert!(two.matrix().max_abs_diff(one.matrix()) < 1e-12);
    }

    #[test]
    fn partial_swap_inverse_and_conservation(theta in -4.0f64..4.0) {
        let u = partial_swap_unitary(theta);
        let id4 = ComplexMatrix::identity(4);
        prop_assert!(u.matmul(&partial_swap_unitary(-theta)).max_abs_diff(&id4) < 1e-12);
        prop_assert!(u.matmul(&u.adjoint()).max_abs_diff(&id4) < 1e-12);
        let sz = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
        let id2 = ComplexMatrix::identity(2);
        let total = &kron(&sz, &id2) + &kron(&id2, &sz);
        prop_assert!(u.commutator(&total).max_abs() < 1e-12);
    }
}

#[test]
fn partial_swap_is_the_exponential_of_the_exchange_hamiltonian() {
    // exp(-iθV) by eigendecomposition of V = σ+σ- + σ-σ+.
    let mut v = ComplexMatrix::zeros(4);
    v[(1, 2)] = c(1.0, 0.0);
    v[(2, 1)] = c(1.0, 0.0);
    let eig = colltherm::hermitian_eig(&v).unwrap();
    for theta in [0.0, 0.2, PI / 4.0, FRAC_PI_2] {
        let w = &eig.vectors;
        let expo = ComplexMatrix::from_fn(4, |i, j| {
            w[(i, j)] * colltherm::C64::from_polar(1.0, -theta * eig.values[j])
        })
        .matmul(&w.adjoint());
        assert!(expo.max_abs_diff(&partial_swap_unitary(theta)) < 1e-14);
    }
}

/// One collision step of the joint state with dense matrices only.
fn direct_collision(rho: &DensityMatrix, p: &ModelParams) -> ComplexMatrix {
    let joint = kron(rho.matrix(), p.ancilla_prep.state().matrix());
    let after_u = joint.conjugate_by(&partial_swap_unitary(p.g_tau_sa));
    let after_e = dense_thermal(&after_u, 0, p);
    // trace out the ancilla (qubit 1, least significant)
    ComplexMatrix::from_fn(2, |i, j| {
        after_e[(2 * i, 2 * j)] + after_e[(2 * i + 1, 2 * j + 1)]
    })
}

#[test]
fn superoperator_matches_direct_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let p = random_params(&mut rng);
        let rho = random_state(&mut rng, 1);
        let phi = build_stroboscopic_channel(&p);
        let got = phi.apply(rho.matrix());
        assert!(got.max_abs_diff(&direct_collision(&rho, &p)) < 1e-12);
    }
}

#[test]
fn superoperator_maps_states_to_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let p = random_params(&mut rng);
        let phi = build_stroboscopic_channel(&p);
        assert!(phi.trace_defect() < 1e-10);
        let spectrum = phi.spectrum().unwrap();
        assert!(spectrum[0].norm() <= 1.0 + 1e-9);
        let rho = random_state(&mut rng, 1);
        assert!(validate_state(&phi.apply(rho.matrix()), 1e-9).is_ok());
    }
}

fn power_iterate(p: &ModelParams, seed: &DensityMatrix, steps: usize) -> ComplexMatrix {
    let mut x = seed.clone();
    for _ in 0..steps {
        x = validate_state(&direct_collision(&x, p), 1e-9).unwrap();
    }
    x.into_matrix()
}

#[test]
fn fixed_point_matches_power_iteration() {
    let p = ModelParams::new(2.0, 0.4, FRAC_PI_2, AncillaPrep::Ground).unwrap();
    let fp = steady_state(&p).unwrap();
    let iterated = power_iterate(&p, &thermal_qubit_state(&p), 500);
    assert!(fp.rho_star.matrix().max_abs_diff(&iterated) < 1e-10);
    let phi = build_stroboscopic_channel(&p);
    assert!(
        phi.apply(fp.rho_star.matrix())
            .max_abs_diff(fp.rho_star.matrix())
            < 1e-12
    );
    assert!(fp.spectral_gap > 0.0 && fp.spectral_gap <= 1.0);
}

#[test]
fn fixed_point_is_seed_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let p = random_params(&mut rng);
        let Ok(fp) = steady_state(&p) else { continue };
        if fp.spectral_gap <= 1e-6 {
            continue;
        }
        // enough steps to contract the gap well below 1e-9
        let steps = ((1e-12f64).ln() / (1.0 - fp.spectral_gap).ln())
            .ceil()
            .min(200_000.0) as usize;
        let seeds = [
            thermal_qubit_state(&p),
            DensityMatrix::maximally_mixed(1),
            random_pure_state(&mut rng, 1),
        ];
        for s in &seeds {
            let x = power_iterate(&p, s, steps);
            assert!(x.max_abs_diff(fp.rho_star.matrix()) < 1e-9, "{p:?}");
        }
    }
}

#[test]
fn fixed_point_is_diagonal_for_diagonal_preparations() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for prep in [AncillaPrep::Ground, AncillaPrep::Excited] {
        for _ in 0..10 {
            let p = ModelParams::new(
                rng.gen_range(0.2..6.0),
                rng.gen_range(0.01..2.0),
                rng.gen_range(0.01..FRAC_PI_2),
                prep.clone(),
            )
            .unwrap();
            let fp = steady_state(&p).unwrap();
            assert!(fp.rho_star.matrix()[(0, 1)].norm() <= 1e-12);
        }
    }
}

#[test]
fn fixed_point_rejects_non_superoperator_sizes() {
    assert!(colltherm::Superoperator::from_matrix(ComplexMatrix::identity(2)).is_err());
    let phi = colltherm::Superoperator::from_matrix(ComplexMatrix::identity(4)).unwrap();
    assert!(fixed_point(&phi).is_err());
}
