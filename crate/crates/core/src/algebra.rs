//! Finite-dimensional †-closed operator algebras and their structure.
//!
//! A †-closed algebra `A ⊆ L(H)` decomposes as `⊕_k L(C^{n_k}) ⊗ 1_{m_k} ⊕ 0` with respect to
//! a suitable frame. [`wedderburn`] computes this decomposition numerically: central
//! projectors come from the spectrum of a random self-adjoint central element, matrix units
//! inside each sector from a random self-adjoint element and the polar parts of its
//! inter-eigenspace compressions. Every result is verified before it is returned, and
//! sampling is reseeded on failure.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::opspace::{orthonormalize_span, superop_kernel, Constraint, OperatorSpan};
use crate::random::Sampler;
use crate::tol;

/// Smallest †-closed, multiplication-closed span containing the generators.
pub fn generate_algebra(generators: &[Matrix], tol: f64) -> Result<OperatorSpan> {
    let mut seed: Vec<Matrix> = generators.to_vec();
    seed.extend(generators.iter().map(|g| g.adjoint()));
    let mut span = orthonormalize_span(&seed, tol)?;
    let cap = span.dim() * span.dim();
    loop {
        let mut fresh = Vec::new();
        for a in span.basis() {
            for b in span.basis() {
                let p = a * b;
                let scale = p.norm();
                if scale > tol::ZERO_KRAUS && span.residual(&p) > tol.max(1e-12) * scale.max(1.0) {
                    fresh.push(p);
                }
            }
        }
        if fresh.is_empty() {
            return Ok(span);
        }
        let next = span.extend(&fresh, tol)?;
        if next.len() == span.len() || span.len() >= cap {
            return Ok(next);
        }
        span = next;
    }
}

/// `{X = PXP : [X, s] = [X†, s] = 0 ∀ s ∈ S}`.
pub fn commutant(s: &OperatorSpan, projector: &Matrix) -> Result<OperatorSpan> {
    commutant_with_tol(s, projector, tol::RANK)
}

pub fn commutant_with_tol(s: &OperatorSpan, projector: &Matrix, tol: f64) -> Result<OperatorSpan> {
    if projector.nrows() != s.dim() {
        return Err(Error::DimensionMismatch {
            context: "commutant",
            expected: format!("{0}x{0}", s.dim()),
            found: format!("{}x{}", projector.nrows(), projector.ncols()),
        });
    }
    let mut constraints = Vec::with_capacity(2 * s.len());
    for b in s.basis() {
        constraints.push(Constraint::commutes_with(b));
        if !s.adjoint_closed() {
            constraints.push(Constraint::commutes_with(&b.adjoint()));
        }
    }
    superop_kernel(&constraints, projector, tol)
}

/// Commutant of a list of operators and their adjoints inside `L(PH)`.
pub fn commutant_of(ops: &[Matrix], projector: &Matrix) -> Result<OperatorSpan> {
    let kept: Vec<Matrix> = ops
        .iter()
        .filter(|m| m.norm() > tol::ZERO_KRAUS)
        .cloned()
        .collect();
    if kept.is_empty() {
        return OperatorSpan::full_on(projector);
    }
    let span = orthonormalize_span(&kept, tol::RANK)?;
    let mut constraints = Vec::with_capacity(2 * span.len());
    for b in span.basis() {
        constraints.push(Constraint::commutes_with(b));
        constraints.push(Constraint::commutes_with(&b.adjoint()));
    }
    superop_kernel(&constraints, projector, tol::RANK)
}

/// Unit element of a †-closed algebra: the projector onto the joint range of its elements,
/// checked to lie in the span and to act as the identity on it.
pub fn unit(a: &OperatorSpan) -> Result<Matrix> {
    let d = a.dim();
    if a.is_empty() {
        return Ok(linalg::zeros(d, d));
    }
    let mut s = linalg::zeros(d, d);
    for b in a.basis() {
        s += b * b.adjoint() + b.adjoint() * b;
    }
    let (values, vectors) = linalg::eigh(&linalg::hermitian_part(&s));
    let top = values.last().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..d).filter(|&i| values[i] > tol::RANK * top).collect();
    let mut w = linalg::zeros(d, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        w.set_column(dst, &vectors.column(src));
    }
    let e = &w * w.adjoint();
    let mut residual = a.residual(&e);
    for b in a.basis() {
        residual = residual
            .max(linalg::op_norm(&(&e * b - b)))
            .max(linalg::op_norm(&(b * &e - b)));
    }
    if residual > tol::RESIDUAL {
        return Err(Error::NotAlgebra { residual });
    }
    Ok(e)
}

/// Elements of `A` commuting with all of `A`.
pub fn center(a: &OperatorSpan) -> Result<OperatorSpan> {
    if a.is_empty() {
        return Ok(OperatorSpan::zero(a.dim()));
    }
    let e = unit(a)?;
    let comm = commutant(a, &e)?;
    intersect(a, &comm)
}

/// Subspace intersection, as the null space of the stacked complementary superprojectors.
pub fn intersect(a: &OperatorSpan, b: &OperatorSpan) -> Result<OperatorSpan> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            context: "intersect",
            expected: a.dim().to_string(),
            found: b.dim().to_string(),
        });
    }
    let d = a.dim();
    if a.is_empty() || b.is_empty() {
        return Ok(OperatorSpan::zero(d));
    }
    let n = d * d;
    let complement = |s: &OperatorSpan| {
        let mut q = linalg::identity(n);
        for m in s.basis() {
            let v = linalg::vectorize(m);
            q -= &v * v.adjoint();
        }
        q
    };
    let mut stacked = linalg::zeros(2 * n, n);
    stacked.view_mut((0, 0), (n, n)).copy_from(&complement(a));
    stacked.view_mut((n, 0), (n, n)).copy_from(&complement(b));
    let kernel = linalg::null_space(&stacked, tol::RANK);
    let basis: Vec<Matrix> = (0..kernel.ncols())
        .map(|k| linalg::unvectorize(kernel.column(k).as_slice(), d, d))
        .collect();
    if basis.is_empty() {
        return Ok(OperatorSpan::zero(d));
    }
    orthonormalize_span(&basis, tol::RANK)
}

/// Checks that a span is †-closed and multiplication-closed.
pub fn check_algebra(a: &OperatorSpan) -> Result<()> {
    let residual = a.adjoint_residual().max(a.closure_residual());
    if residual > tol::CLOSURE {
        return Err(Error::NotAlgebra { residual });
    }
    Ok(())
}

/// Minimal projectors of a commutative †-algebra, by eigen-clustering a random self-adjoint
/// element. Projectors are ordered by ascending eigenvalue of the sampled element and sum to
/// the unit of the algebra.
pub fn spectral_projectors(c: &OperatorSpan, seed: u64) -> Result<Vec<Matrix>> {
    let residual = c.commutativity_residual();
    if residual > tol::RESIDUAL {
        return Err(Error::NotCommutative { residual });
    }
    if c.is_empty() {
        return Ok(Vec::new());
    }
    let e = unit(c)?;
    let mut last = String::new();
    for attempt in 0..=tol::MAX_RETRIES {
        let mut sampler = Sampler::new(seed.wrapping_add(attempt as u64));
        match sample_spectral_projectors(c, &e, &mut sampler) {
            Ok((projectors, _)) => return Ok(projectors),
            Err(reason) => last = reason,
        }
    }
    Err(Error::DecompositionFailed {
        attempts: tol::MAX_RETRIES + 1,
        reason: last,
    })
}

/// Returns the projectors and the eigenvalue attached to each.
fn sample_spectral_projectors(
    c: &OperatorSpan,
    unit: &Matrix,
    sampler: &mut Sampler,
) -> std::result::Result<(Vec<Matrix>, Vec<f64>), String> {
    let w = linalg::projector_range(unit);
    let h = random_self_adjoint(c, sampler);
    let (values, vectors) = linalg::eigh(&(w.adjoint() * &h * &w));
    let clusters = linalg::cluster_sorted(&values, tol::SPECTRAL_GAP);
    if clusters.len() != c.len() {
        return Err(format!(
            "found {} spectral clusters, expected {}",
            clusters.len(),
            c.len()
        ));
    }
    let mut projectors = Vec::with_capacity(clusters.len());
    let mut eigenvalues = Vec::with_capacity(clusters.len());
    for range in clusters {
        let cols = vectors.columns(range.start, range.len());
        let full = &w * cols;
        let p = &full * full.adjoint();
        let residual = c.residual(&p);
        if residual > tol::RESIDUAL {
            return Err(format!(
                "spectral projector outside span (residual {residual:.3e})"
            ));
        }
        eigenvalues.push(values[range.start]);
        projectors.push(p);
    }
    Ok((projectors, eigenvalues))
}

fn random_self_adjoint(a: &OperatorSpan, sampler: &mut Sampler) -> Matrix {
    let mut h = linalg::zeros(a.dim(), a.dim());
    for b in a.basis() {
        h += b * linalg::r(sampler.normal());
    }
    linalg::hermitian_part(&h)
}

fn random_element(a: &OperatorSpan, sampler: &mut Sampler) -> Matrix {
    let mut h = linalg::zeros(a.dim(), a.dim());
    for b in a.basis() {
        h += b * linalg::c(sampler.normal(), sampler.normal());
    }
    h
}

/// One simple sector `L(C^n) ⊗ 1_m` of an algebra.
#[derive(Clone, Debug)]
pub struct Sector {
    /// Central projector onto the sector.
    pub projector: Matrix,
    /// Logical dimension.
    pub n: usize,
    /// Multiplicity.
    pub m: usize,
    /// Isometry `C^n ⊗ C^m → Range(P_k)`; column `i*m + l` is the image of `|i⟩ ⊗ |l⟩`.
    pub frame: Matrix,
}

impl Sector {
    /// `frame (a ⊗ 1_m) frame†`.
    pub fn embed(&self, a: &Matrix) -> Matrix {
        let lifted = linalg::kron(a, &linalg::identity(self.m));
        &self.frame * lifted * self.frame.adjoint()
    }

    /// `frame (ρ ⊗ τ) frame†`.
    pub fn embed_product(&self, rho: &Matrix, tau: &Matrix) -> Matrix {
        &self.frame * linalg::kron(rho, tau) * self.frame.adjoint()
    }

    /// Logical embedding `v ↦ frame(v ⊗ |l⟩)` as a `d × n` isometry.
    pub fn logical_isometry(&self, l: usize) -> Matrix {
        let d = self.frame.nrows();
        let mut out = linalg::zeros(d, self.n);
        for i in 0..self.n {
            out.set_column(i, &self.frame.column(i * self.m + l));
        }
        out
    }

    /// Logical block of `x` and the residual of `frame† x frame` from `a ⊗ 1_m`.
    pub fn block(&self, x: &Matrix) -> (Matrix, f64) {
        let y = self.frame.adjoint() * x * &self.frame;
        let mut a = linalg::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = linalg::ZERO;
                for l in 0..self.m {
                    acc += y[(i * self.m + l, j * self.m + l)];
                }
                a[(i, j)] = acc / self.m as f64;
            }
        }
        let residual = linalg::op_norm(&(y - linalg::kron(&a, &linalg::identity(self.m))));
        (a, residual)
    }
}

/// Wedderburn data of a †-closed algebra.
#[derive(Clone, Debug)]
pub struct AlgebraStructure {
    pub ambient_dim: usize,
    pub sectors: Vec<Sector>,
    pub unit: Matrix,
}

impl AlgebraStructure {
    /// `(n_k, m_k)` pairs in sector order.
    pub fn shape(&self) -> Vec<(usize, usize)> {
        self.sectors.iter().map(|s| (s.n, s.m)).collect()
    }

    /// `Σ_k n_k²`.
    pub fn algebra_dim(&self) -> usize {
        self.sectors.iter().map(|s| s.n * s.n).sum()
    }

    /// `Σ_k frame_k (a_k ⊗ 1) frame_k†`.
    pub fn assemble(&self, blocks: &[Matrix]) -> Matrix {
        let mut out = linalg::zeros(self.ambient_dim, self.ambient_dim);
        for (s, a) in self.sectors.iter().zip(blocks) {
            out += s.embed(a);
        }
        out
    }

    /// Largest block-form or round-trip residual over the basis of `a`.
    pub fn verify(&self, a: &OperatorSpan) -> f64 {
        let mut worst = 0.0_f64;
        for x in a.basis() {
            let mut blocks = Vec::with_capacity(self.sectors.len());
            for s in &self.sectors {
                let (blk, res) = s.block(x);
                worst = worst.max(res);
                blocks.push(blk);
            }
            worst = worst.max(linalg::op_norm(&(self.assemble(&blocks) - x)));
        }
        let mut sum = linalg::zeros(self.ambient_dim, self.ambient_dim);
        for (k, s) in self.sectors.iter().enumerate() {
            worst = worst.max(linalg::isometry_defect(&s.frame));
            for t in &self.sectors[k + 1..] {
                worst = worst.max(linalg::op_norm(&(&s.projector * &t.projector)));
            }
            sum += &s.projector;
        }
        worst.max(linalg::op_norm(&(sum - &self.unit)))
    }
}

/// Wedderburn decomposition with the default seed 0.
pub fn wedderburn(a: &OperatorSpan, tol: f64) -> Result<AlgebraStructure> {
    wedderburn_seeded(a, tol, 0)
}

/// Wedderburn decomposition. `tol` is the numerical-rank threshold for internal spans;
/// the result is accepted when its verification residual is at most `1e-8`.
pub fn wedderburn_seeded(a: &OperatorSpan, tol: f64, seed: u64) -> Result<AlgebraStructure> {
    check_algebra(a)?;
    let d = a.dim();
    if a.is_empty() {
        return Ok(AlgebraStructure {
            ambient_dim: d,
            sectors: Vec::new(),
            unit: linalg::zeros(d, d),
        });
    }
    let e = unit(a)?;
    let z = center(a)?;
    let mut last = String::new();
    for attempt in 0..=tol::MAX_RETRIES {
        let mut sampler = Sampler::new(seed.wrapping_add(attempt as u64));
        match decompose_once(a, &e, &z, tol, &mut sampler) {
            Ok(structure) => {
                let residual = structure.verify(a);
                if residual <= tol::RESIDUAL {
                    return Ok(structure);
                }
                last = format!("verification residual {residual:.3e}");
            }
            Err(reason) => last = reason,
        }
    }
    Err(Error::DecompositionFailed {
        attempts: tol::MAX_RETRIES + 1,
        reason: last,
    })
}

fn decompose_once(
    a: &OperatorSpan,
    unit: &Matrix,
    center: &OperatorSpan,
    tol: f64,
    sampler: &mut Sampler,
) -> std::result::Result<AlgebraStructure, String> {
    let (central, _) = sample_spectral_projectors(center, unit, sampler)?;
    let mut sectors = Vec::with_capacity(central.len());
    for p in central {
        sectors.push(decompose_sector(a, p, tol, sampler)?);
    }
    let total: usize = sectors.iter().map(|s| s.n * s.n).sum();
    if total != a.len() {
        return Err(format!(
            "sector dimensions sum to {total}, algebra has {}",
            a.len()
        ));
    }
    // Descending rank; the sort is stable so ties keep central-eigenvalue order.
    sectors.sort_by_key(|s| std::cmp::Reverse(s.n * s.m));
    Ok(AlgebraStructure {
        ambient_dim: a.dim(),
        sectors,
        unit: unit.clone(),
    })
}

fn decompose_sector(
    a: &OperatorSpan,
    projector: Matrix,
    tol: f64,
    sampler: &mut Sampler,
) -> std::result::Result<Sector, String> {
    let w = linalg::projector_range(&projector);
    let rank = w.ncols();
    let compressed: Vec<Matrix> = a.basis().iter().map(|b| &projector * b).collect();
    let local = orthonormalize_span(&compressed, tol).map_err(|e| e.to_string())?;
    let n = (local.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != local.len() || !rank.is_multiple_of(n) {
        return Err(format!(
            "sector algebra of dimension {} on rank {rank} is not a full matrix block",
            local.len()
        ));
    }
    let m = rank / n;
    if n == 1 {
        return Ok(Sector {
            projector,
            n,
            m,
            frame: w,
        });
    }

    let h = w.adjoint() * random_self_adjoint(&local, sampler) * &w;
    let (values, vectors) = linalg::eigh(&h);
    let clusters = linalg::cluster_sorted(&values, tol::SPECTRAL_GAP);
    if clusters.len() != n || clusters.iter().any(|c| c.len() != m) {
        return Err(format!(
            "sector eigenspaces {:?} do not split into {n} blocks of size {m}",
            clusters.iter().map(|c| c.len()).collect::<Vec<_>>()
        ));
    }
    let spaces: Vec<Matrix> = clusters
        .iter()
        .map(|c| vectors.columns(c.start, c.len()).into_owned())
        .collect();

    let b = w.adjoint() * random_element(&local, sampler) * &w;
    let mut frame_local = linalg::zeros(rank, n * m);
    for (i, v) in spaces.iter().enumerate() {
        let aligned = if i == 0 {
            v.clone()
        } else {
            let link = spaces[0].adjoint() * &b * v;
            if link.norm() < 1e-6 {
                return Err("degenerate link between eigenspaces".into());
            }
            v * linalg::polar_unitary(&link).adjoint()
        };
        frame_local
            .view_mut((0, i * m), (rank, m))
            .copy_from(&aligned);
    }
    Ok(Sector {
        projector,
        n,
        m,
        frame: w * frame_local,
    })
}
