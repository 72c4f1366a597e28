//! Operator subspaces under the Hilbert–Schmidt inner product `⟨A, B⟩ = Tr(A†B)`.

use num_complex::Complex64;

use crate::error::{check_square, Error, Result};
use crate::linalg::{self, Matrix};
use crate::tol;

/// `Tr(A†B)`.
pub fn hs_inner(a: &Matrix, b: &Matrix) -> Result<Complex64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            context: "hs_inner",
            expected: format!("{}x{}", a.nrows(), a.ncols()),
            found: format!("{}x{}", b.nrows(), b.ncols()),
        });
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

fn hs(a: &Matrix, b: &Matrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Hilbert–Schmidt orthonormal basis of a linear subspace of `dim × dim` matrices.
#[derive(Clone, Debug)]
pub struct OperatorSpan {
    dim: usize,
    basis: Vec<Matrix>,
    adjoint_closed: bool,
}

impl OperatorSpan {
    /// The zero subspace.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            basis: Vec::new(),
            adjoint_closed: true,
        }
    }

    /// Scalars `C·1`.
    pub fn scalars(dim: usize) -> Self {
        let b = linalg::identity(dim).unscale((dim as f64).sqrt());
        Self {
            dim,
            basis: vec![b],
            adjoint_closed: true,
        }
    }

    /// All of `L(C^dim)`, spanned by matrix units.
    pub fn full(dim: usize) -> Self {
        let mut basis = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            for i in 0..dim {
                basis.push(linalg::unit(dim, i, j));
            }
        }
        Self {
            dim,
            basis,
            adjoint_closed: true,
        }
    }

    /// `L(PH)` for an orthogonal projector `P`.
    pub fn full_on(projector: &Matrix) -> Result<Self> {
        let w = checked_range(projector)?;
        let r = w.ncols();
        let mut basis = Vec::with_capacity(r * r);
        for j in 0..r {
            for i in 0..r {
                basis.push(w.column(i) * w.column(j).adjoint());
            }
        }
        Ok(Self {
            dim: projector.nrows(),
            basis,
            adjoint_closed: true,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn adjoint_closed(&self) -> bool {
        self.adjoint_closed
    }

    /// Orthogonal projection of `x` onto the span.
    pub fn project(&self, x: &Matrix) -> Matrix {
        let mut out = linalg::zeros(self.dim, self.dim);
        for b in &self.basis {
            out += b * hs(b, x);
        }
        out
    }

    /// Frobenius distance from `x` to the span.
    pub fn residual(&self, x: &Matrix) -> f64 {
        (x - self.project(x)).norm()
    }

    /// Largest distance from a basis element of `other` to this span.
    pub fn containment_residual(&self, other: &OperatorSpan) -> f64 {
        other
            .basis
            .iter()
            .map(|b| self.residual(b))
            .fold(0.0, f64::max)
    }

    /// Mutual containment residual; zero iff the spans coincide.
    pub fn span_distance(&self, other: &OperatorSpan) -> f64 {
        self.containment_residual(other)
            .max(other.containment_residual(self))
    }

    /// Largest residual of `B_i B_j` outside the span, over all basis pairs.
    pub fn closure_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(self.residual(&(a * b)));
            }
        }
        worst
    }

    pub fn is_multiplication_closed(&self) -> bool {
        self.closure_residual() <= tol::CLOSURE
    }

    /// Largest residual of `B_i†` outside the span.
    pub fn adjoint_residual(&self) -> f64 {
        self.basis
            .iter()
            .map(|b| self.residual(&b.adjoint()))
            .fold(0.0, f64::max)
    }

    /// Largest `‖[B_i, B_j]‖` in operator norm.
    pub fn commutativity_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i + 1..] {
                worst = worst.max(linalg::op_norm(&linalg::commutator(a, b)));
            }
        }
        worst
    }

    /// Maps every basis element through `f` and orthonormalizes the images.
    pub fn map(&self, f: impl Fn(&Matrix) -> Matrix, tol: f64) -> Result<OperatorSpan> {
        let images: Vec<Matrix> = self.basis.iter().map(f).collect();
        if images.is_empty() {
            return Ok(OperatorSpan::zero(self.dim));
        }
        orthonormalize_span(&images, tol)
    }

    /// Contains the `dim × dim` element `x` within `tolerance` (Frobenius).
    pub fn contains(&self, x: &Matrix, tolerance: f64) -> bool {
        self.residual(x) <= tolerance
    }

    /// Span of the union with additional matrices.
    pub fn extend(&self, extra: &[Matrix], tol: f64) -> Result<OperatorSpan> {
        let mut all = self.basis.clone();
        all.extend_from_slice(extra);
        if all.is_empty() {
            return Ok(OperatorSpan::zero(self.dim));
        }
        orthonormalize_span(&all, tol)
    }

    /// Largest deviation of the basis from Hilbert–Schmidt orthonormality.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((hs(a, b) - target).norm());
            }
        }
        worst
    }

    pub(crate) fn from_orthonormal(dim: usize, basis: Vec<Matrix>) -> Self {
        let mut span = Self {
            dim,
            basis,
            adjoint_closed: false,
        };
        span.adjoint_closed = span.adjoint_residual() <= 1e-8;
        span
    }
}

/// Orthonormalizes a list of equal-size square matrices via an SVD of their stacked
/// vectorizations. The returned dimension is the numerical rank at relative threshold `tol`.
pub fn orthonormalize_span(mats: &[Matrix], tol: f64) -> Result<OperatorSpan> {
    let first = mats.first().ok_or(Error::Empty("orthonormalize_span"))?;
    let dim = check_square(first, "orthonormalize_span")?;
    for m in mats {
        if m.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch {
                context: "orthonormalize_span",
                expected: format!("{dim}x{dim}"),
                found: format!("{}x{}", m.nrows(), m.ncols()),
            });
        }
    }
    let n = dim * dim;
    let mut stacked = linalg::zeros(n, mats.len());
    for (k, m) in mats.iter().enumerate() {
        stacked.column_mut(k).copy_from_slice(m.as_slice());
    }
    let cols = linalg::range_basis(&stacked, tol);
    let basis = (0..cols.ncols())
        .map(|k| linalg::unvectorize(cols.column(k).as_slice(), dim, dim))
        .collect();
    Ok(OperatorSpan::from_orthonormal(dim, basis))
}

/// A linear constraint `L X − X R = 0` on square matrices.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub left: Matrix,
    pub right: Matrix,
}

impl Constraint {
    pub fn new(left: Matrix, right: Matrix) -> Self {
        Self { left, right }
    }

    /// `[X, s] = 0`, written as `s X − X s = 0`.
    pub fn commutes_with(s: &Matrix) -> Self {
        Self::new(s.clone(), s.clone())
    }

    pub fn apply(&self, x: &Matrix) -> Matrix {
        &self.left * x - x * &self.right
    }
}

/// Orthonormal basis of `{X = PXP : L_i X − X R_i = 0 ∀ i}`.
///
/// `X` is parametrized as `W Y W†` with `W` an orthonormal basis of `Range(P)`, and the
/// null space of the stacked constraint operator on `vec(Y)` is computed at relative
/// singular-value threshold `tol`.
pub fn superop_kernel(
    constraints: &[Constraint],
    restriction: &Matrix,
    tol: f64,
) -> Result<OperatorSpan> {
    let dim = check_square(restriction, "superop_kernel restriction")?;
    let w = checked_range(restriction)?;
    let r = w.ncols();
    for c in constraints {
        for m in [&c.left, &c.right] {
            if m.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch {
                    context: "superop_kernel constraint",
                    expected: format!("{dim}x{dim}"),
                    found: format!("{}x{}", m.nrows(), m.ncols()),
                });
            }
        }
    }
    if r == 0 {
        return Ok(OperatorSpan::zero(dim));
    }
    let wd = w.adjoint();
    let block = dim * dim;
    let mut op = linalg::zeros(block * constraints.len().max(1), r * r);
    for (i, c) in constraints.iter().enumerate() {
        // L W Y W† − W Y W† R  ⇒  (W̄ ⊗ L W) − ((W† R)ᵀ ⊗ W)
        let lhs = linalg::kron(&wd.transpose(), &(&c.left * &w));
        let rhs = linalg::kron(&(&wd * &c.right).transpose(), &w);
        op.view_mut((i * block, 0), (block, r * r))
            .copy_from(&(lhs - rhs));
    }
    let kernel = linalg::null_space(&op, tol);
    let basis = (0..kernel.ncols())
        .map(|k| {
            let y = linalg::unvectorize(kernel.column(k).as_slice(), r, r);
            &w * y * &wd
        })
        .collect();
    Ok(OperatorSpan::from_orthonormal(dim, basis))
}

/// Orthonormal basis of the range of a validated projector.
pub(crate) fn checked_range(p: &Matrix) -> Result<Matrix> {
    check_square(p, "projector")?;
    let defect = linalg::projector_defect(p);
    if defect > tol::TP {
        return Err(Error::NotProjector { defect });
    }
    Ok(linalg::projector_range(p))
}
