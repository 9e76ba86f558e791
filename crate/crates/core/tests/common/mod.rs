//! Test-only oracles and generators. Nothing here calls the register
//! kernels under test: channels are built from dense Kraus operators and
//! full-size Kronecker embeddings.

#![allow(dead_code)]

use colltherm::{kron, validate_state, ComplexMatrix, DensityMatrix, ModelParams, C64};
use rand::Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random_matrix(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    random_matrix(rng, dim).hermitian_part()
}

pub fn random_state(rng: &mut impl Rng, num_qubits: usize) -> DensityMatrix {
    let a = random_matrix(rng, 1 << num_qubits);
    let m = a.matmul(&a.adjoint());
    let tr = m.trace().re;
    validate_state(&m.scale(1.0 / tr), 1e-10).unwrap()
}

pub fn random_pure_state(rng: &mut impl Rng, num_qubits: usize) -> DensityMatrix {
    let amps: Vec<C64> = (0..1 << num_qubits)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    DensityMatrix::pure(&amps).unwrap()
}

/// exp(i H) for a random Hermitian H, via its spectral decomposition.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, dim).scale(3.0);
    let eig = colltherm::hermitian_eig(&h).unwrap();
    let v = &eig.vectors;
    let phased =
        ComplexMatrix::from_fn(dim, |i, j| v[(i, j)] * C64::from_polar(1.0, eig.values[j]));
    phased.matmul(&v.adjoint())
}

/// Random POVM with `k` elements: S^{-1/2} A_x S^{-1/2}, S = Σ A_x.
pub fn random_povm(rng: &mut impl Rng, dim: usize, k: usize) -> Vec<ComplexMatrix> {
    let parts: Vec<ComplexMatrix> = (0..k)
        .map(|_| {
            let b = random_matrix(rng, dim);
            b.matmul(&b.adjoint())
        })
        .collect();
    let mut sum = ComplexMatrix::zeros(dim);
    for p in &parts {
        sum = &sum + p;
    }
    let eig = colltherm::hermitian_eig(&sum).unwrap();
    let v = &eig.vectors;
    let inv_sqrt =
        ComplexMatrix::from_fn(dim, |i, j| v[(i, j)] / eig.values[j].sqrt()).matmul(&v.adjoint());
    parts
        .iter()
        .map(|p| p.conjugate_by(&inv_sqrt).hermitian_part())
        .collect()
}

/// Kraus operators of generalized amplitude damping with
/// λ = 1 - e^{-Γ} and ground-state weight p_g.
pub fn gad_kraus(params: &ModelParams) -> [ComplexMatrix; 4] {
    let big_gamma = params.big_gamma();
    let pe = params.n_bar() / (2.0 * params.n_bar() + 1.0);
    let pg = 1.0 - pe;
    let (a, b) = (pg.sqrt(), pe.sqrt());
    let s = (-0.5 * big_gamma).exp();
    let l = (-(-big_gamma).exp_m1()).sqrt();
    let m = |x00: f64, x01: f64, x10: f64, x11: f64| {
        ComplexMatrix::from_rows([[c(x00, 0.), c(x01, 0.)], [c(x10, 0.), c(x11, 0.)]])
    };
    [
        m(a, 0., 0., a * s),
        m(0., a * l, 0., 0.),
        m(b * s, 0., 0., b),
        m(0., 0., b * l, 0.),
    ]
}

/// Embeds a one-qubit operator on qubit `q` of an `n`-qubit register.
pub fn embed_one(op: &ComplexMatrix, q: usize, n: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1);
    for k in 0..n {
        let factor = if k == q {
            op.clone()
        } else {
            ComplexMatrix::identity(2)
        };
        out = kron(&out, &factor);
    }
    out
}

/// Dense thermal channel on qubit `q` from the Kraus set.
pub fn dense_thermal(rho: &ComplexMatrix, q: usize, params: &ModelParams) -> ComplexMatrix {
    let n = rho.num_qubits().unwrap();
    let mut out = ComplexMatrix::zeros(rho.dim());
    for k in gad_kraus(params) {
        out = &out + &rho.conjugate_by(&embed_one(&k, q, n));
    }
    out
}

/// Swap of adjacent qubits (q, q+1) as a dense permutation matrix.
pub fn adjacent_swap(q: usize, n: usize) -> ComplexMatrix {
    let dim = 1usize << n;
    let (b1, b2) = (1usize << (n - 1 - q), 1usize << (n - 2 - q));
    ComplexMatrix::from_fn(dim, |i, j| {
        let (x, y) = ((j & b1) != 0, (j & b2) != 0);
        let mut k = j & !(b1 | b2);
        if y {
            k |= b1;
        }
        if x {
            k |= b2;
        }
        if i == k {
            c(1., 0.)
        } else {
            c(0., 0.)
        }
    })
}

/// Dense two-qubit gate on (0, target) of an n-qubit register, built by
/// moving `target` next to qubit 0 with adjacent swaps.
pub fn embed_gate_on_first_and(u: &ComplexMatrix, target: usize, n: usize) -> ComplexMatrix {
    let mut gate = kron(u, &ComplexMatrix::identity(1 << (n - 2)));
    for k in 1..target {
        let s = adjacent_swap(k, n);
        gate = s.matmul(&gate).matmul(&s);
    }
    gate
}

/// RK4 integration of the thermal master equation on a single qubit, in
/// the interaction picture.
pub fn integrate_lindblad(
    rho: &ComplexMatrix,
    params: &ModelParams,
    steps: usize,
) -> ComplexMatrix {
    let n = params.n_bar();
    let sm = ComplexMatrix::from_rows([[c(0., 0.), c(1., 0.)], [c(0., 0.), c(0., 0.)]]);
    let sp = sm.adjoint();
    let dissipator = |l: &ComplexMatrix, x: &ComplexMatrix| {
        let ld = l.adjoint();
        let ldl = ld.matmul(l);
        let jump = l.matmul(x).matmul(&ld);
        let anti = &ldl.matmul(x) + &x.matmul(&ldl);
        &jump - &anti.scale(0.5)
    };
    // Time in units where γ = 1, so t_final = γ τ_SE.
    let rhs = |x: &ComplexMatrix| &dissipator(&sm, x).scale(n + 1.0) + &dissipator(&sp, x).scale(n);
    let h = params.gamma_tau_se / steps as f64;
    let mut x = rho.clone();
    for _ in 0..steps {
        let k1 = rhs(&x);
        let k2 = rhs(&(&x + &k1.scale(h / 2.0)));
        let k3 = rhs(&(&x + &k2.scale(h / 2.0)));
        let k4 = rhs(&(&x + &k3.scale(h)));
        let incr = &(&k1 + &k2.scale(2.0)) + &(&k3.scale(2.0) + &k4);
        x = &x + &incr.scale(h / 6.0);
    }
    x
}
