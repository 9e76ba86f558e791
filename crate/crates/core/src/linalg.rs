//! Dense complex linear algebra on qubit registers.
//!
//! Matrices are stored row-major. Register convention: qubit 0 is the
//! leftmost Kronecker factor and the most significant bit of a
//! computational-basis index, so for `n` qubits qubit `q` sits at bit
//! position `n - 1 - q`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use faer::{MatRef, Side};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Hermiticity, trace and positivity tolerance for [`DensityMatrix`].
pub const STATE_TOL: f64 = 1e-10;

/// Below this dimension products are done with plain loops.
const FAER_MATMUL_MIN_DIM: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("storage holds {found} entries, expected {expected}")]
    BadStorage { expected: usize, found: usize },
    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("qubit index {0} listed more than once")]
    DuplicateQubit(usize),
    #[error("partial trace needs at least one kept qubit")]
    EmptyKeep,
    #[error("hermiticity violated: max |A - A^dag| = {deviation:e}")]
    HermiticityViolation { deviation: f64 },
    #[error("trace violated: |tr A - 1| = {deviation:e}")]
    TraceViolation { deviation: f64 },
    #[error("positivity violated: minimum eigenvalue {min_eigenvalue:e}")]
    NegativityViolation { min_eigenvalue: f64 },
    #[error("hermitian eigensolver did not converge (dimension {dim})")]
    EigenNonConvergence { dim: usize },
}

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if dim == 0 || data.len() != dim * dim {
            return Err(LinalgError::BadStorage {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Convenience for small literal matrices.
    pub fn from_rows<const D: usize>(rows: [[C64; D]; D]) -> Self {
        Self::from_fn(D, |i, j| rows[i][j])
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Outer product |v><v|.
    pub fn projector(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    /// (A + A^dag) / 2
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |A - A^dag|
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        if n < FAER_MATMUL_MIN_DIM {
            let mut out = Self::zeros(n);
            for i in 0..n {
                for k in 0..n {
                    let a = self[(i, k)];
                    if a == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let row = &rhs.data[k * n..(k + 1) * n];
                    let dst = &mut out.data[i * n..(i + 1) * n];
                    for (d, b) in dst.iter_mut().zip(row) {
                        *d += a * b;
                    }
                }
            }
            return out;
        }
        let prod = self.as_faer() * rhs.as_faer();
        Self::from_fn(n, |i, j| prod[(i, j)])
    }

    /// A B A^dag
    pub fn conjugate_by(&self, a: &Self) -> Self {
        a.matmul(self).matmul(&a.adjoint())
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub(crate) fn as_faer(&self) -> MatRef<'_, C64> {
        MatRef::from_row_major_slice(&self.data, self.dim, self.dim)
    }

    /// Number of qubits if the dimension is a power of two.
    pub fn num_qubits(&self) -> Result<usize, LinalgError> {
        if self.dim.is_power_of_two() {
            Ok(self.dim.trailing_zeros() as usize)
        } else {
            Err(LinalgError::NotPowerOfTwo(self.dim))
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim.min(8) {
            write!(f, "  ")?;
            for j in 0..self.dim.min(8) {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product, left factor most significant.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    let mut out = ComplexMatrix::zeros(n);
    for ia in 0..da {
        for ja in 0..da {
            let x = a[(ia, ja)];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for ib in 0..db {
                let row = (ia * db + ib) * n + ja * db;
                let src = &b.data[ib * db..(ib + 1) * db];
                for (d, y) in out.data[row..row + db].iter_mut().zip(src) {
                    *d = x * y;
                }
            }
        }
    }
    out
}

/// Validated quantum state on a qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    num_qubits: usize,
}

impl DensityMatrix {
    /// Pure state from an amplitude vector, normalized.
    pub fn pure(amplitudes: &[C64]) -> Result<Self, LinalgError> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<C64> = amplitudes.iter().map(|a| a / norm).collect();
        validate_state(&ComplexMatrix::projector(&v), STATE_TOL)
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        Self {
            mat: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
            num_qubits,
        }
    }

    /// Wraps a matrix already known to be a state. Hermiticity and unit
    /// trace are enforced; positivity is the caller's responsibility.
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        let num_qubits = mat
            .num_qubits()
            .expect("register dimension must be a power of two");
        let mut mat = mat.hermitian_part();
        let tr = mat.trace().re;
        if tr != 1.0 {
            mat = mat.scale(1.0 / tr);
        }
        Self { mat, num_qubits }
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.dim
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            mat: kron(&self.mat, &other.mat),
            num_qubits: self.num_qubits + other.num_qubits,
        }
    }

    /// Population of a computational basis state.
    pub fn population(&self, index: usize) -> f64 {
        self.mat[(index, index)].re
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.mat
    }
}

fn check_keep(keep: &[usize], num_qubits: usize) -> Result<(), LinalgError> {
    if keep.is_empty() {
        return Err(LinalgError::EmptyKeep);
    }
    let mut seen = vec![false; num_qubits];
    for &q in keep {
        if q >= num_qubits {
            return Err(LinalgError::QubitOutOfRange {
                index: q,
                num_qubits,
            });
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(LinalgError::DuplicateQubit(q));
        }
    }
    Ok(())
}

/// Partial trace on a raw operator. The result's qubits follow the order
/// of `keep`.
pub fn partial_trace_op(mat: &ComplexMatrix, keep: &[usize]) -> Result<ComplexMatrix, LinalgError> {
    let n = mat.num_qubits()?;
    check_keep(keep, n)?;
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let bit = |q: usize| 1usize << (n - 1 - q);

    // Map a kept-register index (keep[0] most significant) to full-register bits.
    let k = keep.len();
    let kept_offsets: Vec<usize> = (0..1usize << k)
        .map(|idx| {
            keep.iter()
                .enumerate()
                .filter(|(pos, _)| idx & (1 << (k - 1 - pos)) != 0)
                .map(|(_, &q)| bit(q))
                .sum()
        })
        .collect();
    let t = traced.len();
    let traced_offsets: Vec<usize> = (0..1usize << t)
        .map(|idx| {
            traced
                .iter()
                .enumerate()
                .filter(|(pos, _)| idx & (1 << (t - 1 - pos)) != 0)
                .map(|(_, &q)| bit(q))
                .sum()
        })
        .collect();

    let out_dim = 1usize << k;
    let mut out = ComplexMatrix::zeros(out_dim);
    for (i, &ri) in kept_offsets.iter().enumerate() {
        for (j, &rj) in kept_offsets.iter().enumerate() {
            out[(i, j)] = traced_offsets.iter().map(|&e| mat[(ri | e, rj | e)]).sum();
        }
    }
    Ok(out)
}

/// Reduced state on the qubits in `keep`, in that order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix, LinalgError> {
    let mat = partial_trace_op(&rho.mat, keep)?;
    Ok(DensityMatrix {
        num_qubits: keep.len(),
        mat,
    })
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector for `values[i]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    /// V diag(values) V^dag
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let scaled = ComplexMatrix::from_fn(n, |i, j| self.vectors[(i, j)] * self.values[j]);
        scaled.matmul(&self.vectors.adjoint())
    }
}

/// Hermitian eigendecomposition. The input is symmetrized first.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEig, LinalgError> {
    let sym = h.hermitian_part();
    let n = sym.dim;
    let evd = sym
        .as_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| LinalgError::EigenNonConvergence { dim: n })?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
    let values = order.iter().map(|&k| s[k].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| u[(i, order[j])]);
    Ok(HermitianEig { values, vectors })
}

/// Checks the three state invariants at `tol` and returns the
/// symmetrized, trace-renormalized state.
pub fn validate_state(mat: &ComplexMatrix, tol: f64) -> Result<DensityMatrix, LinalgError> {
    let num_qubits = mat.num_qubits()?;
    let deviation = mat.hermiticity_defect();
    if deviation > tol {
        return Err(LinalgError::HermiticityViolation { deviation });
    }
    let herm = mat.hermitian_part();
    let tr = herm.trace().re;
    let deviation = (tr - 1.0).abs();
    if deviation > tol {
        return Err(LinalgError::TraceViolation { deviation });
    }
    let min_eigenvalue = min_eigenvalue(&herm)?;
    if min_eigenvalue < -tol {
        return Err(LinalgError::NegativityViolation { min_eigenvalue });
    }
    Ok(DensityMatrix {
        mat: herm.scale(1.0 / tr),
        num_qubits,
    })
}

fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64, LinalgError> {
    if h.dim == 1 {
        return Ok(h[(0, 0)].re);
    }
    if h.dim == 2 {
        let a = h[(0, 0)].re;
        let d = h[(1, 1)].re;
        let b = h[(0, 1)].norm();
        return Ok(0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b * b).sqrt());
    }
    let vals = h
        .as_faer()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| LinalgError::EigenNonConvergence { dim: h.dim })?;
    Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
}

/// Applies a single-qubit superoperator-style update in place: for each
/// 2x2 block of `mat` indexed by the bit of qubit `q` in row and column,
/// `f` receives `[gg, ge, eg, ee]` and overwrites it.
pub(crate) fn map_qubit_blocks(
    mat: &mut ComplexMatrix,
    q: usize,
    mut f: impl FnMut(&mut [C64; 4]),
) -> Result<(), LinalgError> {
    let n = mat.num_qubits()?;
    if q >= n {
        return Err(LinalgError::QubitOutOfRange {
            index: q,
            num_qubits: n,
        });
    }
    let dim = mat.dim;
    let b = 1usize << (n - 1 - q);
    let rows: Vec<usize> = (0..dim).filter(|r| r & b == 0).collect();
    for &r in &rows {
        for &c in &rows {
            let mut blk = [
                mat[(r, c)],
                mat[(r, c | b)],
                mat[(r | b, c)],
                mat[(r | b, c | b)],
            ];
            f(&mut blk);
            mat[(r, c)] = blk[0];
            mat[(r, c | b)] = blk[1];
            mat[(r | b, c)] = blk[2];
            mat[(r | b, c | b)] = blk[3];
        }
    }
    Ok(())
}

/// rho <- U rho U^dag for a 4x4 `u` acting on qubits `(q1, q2)`, with `q1`
/// the more significant factor of `u`.
pub fn apply_two_qubit_unitary(
    rho: &mut ComplexMatrix,
    u: &ComplexMatrix,
    q1: usize,
    q2: usize,
) -> Result<(), LinalgError> {
    let n = rho.num_qubits()?;
    if u.dim != 4 {
        return Err(LinalgError::DimensionMismatch {
            expected: 4,
            found: u.dim,
        });
    }
    for q in [q1, q2] {
        if q >= n {
            return Err(LinalgError::QubitOutOfRange {
                index: q,
                num_qubits: n,
            });
        }
    }
    if q1 == q2 {
        return Err(LinalgError::DuplicateQubit(q1));
    }
    let dim = rho.dim;
    let b1 = 1usize << (n - 1 - q1);
    let b2 = 1usize << (n - 1 - q2);
    let bases: Vec<usize> = (0..dim).filter(|r| r & (b1 | b2) == 0).collect();
    let offs = [0, b2, b1, b1 | b2];
    let ud = u.adjoint();

    // Left multiply: mix rows within each 4-group, column by column.
    for &base in &bases {
        let idx = offs.map(|o| base | o);
        for c in 0..dim {
            let v = idx.map(|r| rho[(r, c)]);
            for (a, &r) in idx.iter().enumerate() {
                rho[(r, c)] = (0..4).map(|k| u[(a, k)] * v[k]).sum();
            }
        }
    }
    // Right multiply by U^dag: mix columns within each 4-group, row by row.
    for r in 0..dim {
        let row = &mut rho.data[r * dim..(r + 1) * dim];
        for &base in &bases {
            let idx = offs.map(|o| base | o);
            let v = idx.map(|c| row[c]);
            for (a, &c) in idx.iter().enumerate() {
                row[c] = (0..4).map(|k| v[k] * ud[(k, a)]).sum();
            }
        }
    }
    Ok(())
}

/// Inserts a one-qubit operator `state` at register position `position`,
/// shifting later qubits right: the result is
/// `P (rho ⊗ state) P^T` with the new qubit moved to `position`.
pub fn insert_qubit(
    rho: &ComplexMatrix,
    position: usize,
    state: &ComplexMatrix,
) -> Result<ComplexMatrix, LinalgError> {
    let n = rho.num_qubits()?;
    if state.dim != 2 {
        return Err(LinalgError::DimensionMismatch {
            expected: 2,
            found: state.dim,
        });
    }
    if position > n {
        return Err(LinalgError::QubitOutOfRange {
            index: position,
            num_qubits: n + 1,
        });
    }
    // Bits below the insertion point stay, bits above shift up by one.
    let low = n - position;
    let low_mask = (1usize << low) - 1;
    let spread = |x: usize, bit: usize| ((x & !low_mask) << 1) | (bit << low) | (x & low_mask);
    let dim = rho.dim;
    let mut out = ComplexMatrix::zeros(2 * dim);
    for i in 0..dim {
        for j in 0..dim {
            let x = rho[(i, j)];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for a in 0..2 {
                for b in 0..2 {
                    out[(spread(i, a), spread(j, b))] = x * state[(a, b)];
                }
            }
        }
    }
    Ok(out)
}

/// Total excitation number of a basis index (number of set bits).
#[inline]
pub fn excitation_number(index: usize) -> u32 {
    index.count_ones()
}
