//! Dense complex matrix helpers shared by every module.
//!
//! Vectorization is column-stacking throughout the crate: `vec(X)[i + j*rows] = X[(i, j)]`,
//! which is the native storage order of [`nalgebra::DMatrix`]. With this convention
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
//!
//! Tensor products order factors left to right, so `kron(a, b)[(i*rb + k, j*cb + l)] = a[(i,j)] b[(k,l)]`.

use faer::Side;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Dense complex matrix; square unless stated otherwise.
pub type Matrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type Vector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(dim: usize) -> Matrix {
    Matrix::identity(dim, dim)
}

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    Matrix::zeros(rows, cols)
}

/// `|i⟩⟨j|` on a `dim`-dimensional space.
pub fn unit(dim: usize, i: usize, j: usize) -> Matrix {
    let mut m = zeros(dim, dim);
    m[(i, j)] = ONE;
    m
}

/// Standard basis ket `|i⟩` as a column matrix.
pub fn ket(dim: usize, i: usize) -> Matrix {
    let mut m = zeros(dim, 1);
    m[(i, 0)] = ONE;
    m
}

/// Rank-one projector onto a (not necessarily normalized) column vector.
pub fn outer(v: &Matrix) -> Matrix {
    v * v.adjoint()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[Matrix]) -> Matrix {
    factors
        .iter()
        .fold(Matrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    a * b - b * a
}

pub fn trace(m: &Matrix) -> Complex64 {
    m.trace()
}

/// Largest singular value.
pub fn op_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let fro = m.norm();
    if fro == 0.0 {
        return 0.0;
    }
    match to_faer(m).singular_values() {
        Ok(s) => s.iter().fold(0.0_f64, |a, &x| a.max(x)),
        Err(_) => f64::NAN,
    }
}

fn to_faer(m: &Matrix) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, Complex64>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn fro_norm(m: &Matrix) -> f64 {
    m.norm()
}

/// Column-stacked vectorization.
pub fn vectorize(m: &Matrix) -> Vector {
    Vector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &[Complex64], rows: usize, cols: usize) -> Matrix {
    Matrix::from_column_slice(rows, cols, v)
}

pub fn hermitian_part(m: &Matrix) -> Matrix {
    (m + m.adjoint()).scale(0.5)
}

/// Operator-norm distance from `m` being an orthogonal projector (`m² = m = m†`).
pub fn projector_defect(m: &Matrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    op_norm(&(m * m - m)).max(op_norm(&(m - m.adjoint())))
}

/// Operator-norm distance of `v†v` from the identity.
pub fn isometry_defect(v: &Matrix) -> f64 {
    op_norm(&(v.adjoint() * v - identity(v.ncols())))
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as columns.
pub fn eigh(m: &Matrix) -> (Vec<f64>, Matrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let eig = to_faer(&hermitian_part(m))
        .self_adjoint_eigen(Side::Lower)
        .expect("Hermitian eigendecomposition converges");
    let values = eig.S().column_vector().iter().map(|z| z.re).collect();
    (values, from_faer(eig.U()))
}

/// Groups sorted eigenvalues into clusters separated by gaps larger than `gap`.
/// Returns index ranges into the sorted list.
pub fn cluster_sorted(values: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > gap {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// Singular value decomposition with singular values sorted descending.
///
/// Returns `(u, s, v)` where `m = u diag(s) v†`; `u` is `rows × k`, `v` is `cols × k`,
/// `k = min(rows, cols)`.
pub fn svd(m: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return (zeros(m.nrows(), 0), Vec::new(), zeros(m.ncols(), 0));
    }
    let svd = to_faer(m)
        .thin_svd()
        .expect("singular value decomposition converges");
    let s = svd.S().column_vector().iter().map(|z| z.re).collect();
    (from_faer(svd.U()), s, from_faer(svd.V()))
}

/// Orthonormal basis (as columns) of the null space of `m`, deciding rank at relative
/// singular-value threshold `tol`.
///
/// Singular values below `max(tol * s_max, abs_floor)` count as zero.
pub fn null_space(m: &Matrix, tol: f64) -> Matrix {
    let cols = m.ncols();
    if cols == 0 {
        return zeros(0, 0);
    }
    // Pad to at least square so the full right singular basis is available.
    let padded;
    let work = if m.nrows() < cols {
        padded = {
            let mut p = zeros(cols, cols);
            p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
            p
        };
        &padded
    } else {
        m
    };
    let (_, s, v) = svd(work);
    let cutoff = threshold(&s, tol);
    let keep: Vec<usize> = (0..cols).filter(|&i| s[i] <= cutoff).collect();
    let mut out = zeros(cols, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        out.set_column(dst, &v.column(src));
    }
    out
}

/// Orthonormal basis (as columns) of the column space of `m` at relative threshold `tol`.
pub fn range_basis(m: &Matrix, tol: f64) -> Matrix {
    let (u, s, _) = svd(m);
    let cutoff = threshold(&s, tol);
    let keep: Vec<usize> = (0..s.len()).filter(|&i| s[i] > cutoff).collect();
    let mut out = zeros(m.nrows(), keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        out.set_column(dst, &u.column(src));
    }
    out
}

/// Absolute floor below which singular values are treated as zero regardless of scale.
pub const ABSOLUTE_ZERO: f64 = 1e-13;

fn threshold(sorted_desc: &[f64], tol: f64) -> f64 {
    let s_max = sorted_desc.first().copied().unwrap_or(0.0);
    (tol * s_max).max(ABSOLUTE_ZERO)
}

/// Unitary factor of the polar decomposition `m = u |m|`.
pub fn polar_unitary(m: &Matrix) -> Matrix {
    let (u, _, v) = svd(m);
    u * v.adjoint()
}

/// Orthonormal basis of the range of a projector, as columns.
pub fn projector_range(p: &Matrix) -> Matrix {
    let (values, vectors) = eigh(p);
    let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] > 0.5).collect();
    let mut out = zeros(p.nrows(), keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        out.set_column(dst, &vectors.column(src));
    }
    out
}

/// Rank of a projector (rounded trace).
pub fn projector_rank(p: &Matrix) -> usize {
    p.trace().re.round().max(0.0) as usize
}

/// Partial trace over the second factor of `C^{d1} ⊗ C^{d2}`.
pub fn partial_trace_second(m: &Matrix, d1: usize, d2: usize) -> Matrix {
    let mut out = zeros(d1, d1);
    for i in 0..d1 {
        for j in 0..d1 {
            let mut acc = ZERO;
            for k in 0..d2 {
                acc += m[(i * d2 + k, j * d2 + k)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Partial trace over the first factor of `C^{d1} ⊗ C^{d2}`.
pub fn partial_trace_first(m: &Matrix, d1: usize, d2: usize) -> Matrix {
    let mut out = zeros(d2, d2);
    for k in 0..d2 {
        for l in 0..d2 {
            let mut acc = ZERO;
            for i in 0..d1 {
                acc += m[(i * d2 + k, i * d2 + l)];
            }
            out[(k, l)] = acc;
        }
    }
    out
}

pub fn is_finite(m: &Matrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Pauli matrices.
pub mod pauli {
    use super::*;

    pub fn x() -> Matrix {
        Matrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> Matrix {
        Matrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
    }

    pub fn z() -> Matrix {
        Matrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    /// `op` acting on qubit `site` (0-based, leftmost factor first) of `n` qubits.
    pub fn on(op: &Matrix, site: usize, n: usize) -> Matrix {
        let factors: Vec<Matrix> = (0..n)
            .map(|q| if q == site { op.clone() } else { identity(2) })
            .collect();
        kron_all(&factors)
    }
}
