//! Conservation and correctability of algebras on a code subspace.
//!
//! An algebra `A ⊆ L(PH)` is *conserved* by a channel `E` for states in `PH` when
//! `P E†(X) P = PXP` for all `X ∈ A`; this holds iff `[E_a P, X] = 0` for every Kraus element.
//! It is *correctable* when some channel `R` makes it conserved by `R ∘ E`; this holds iff
//! `[P E_a† E_b P, X] = 0` for every pair of Kraus elements. The largest conserved and
//! correctable algebras are the corresponding commutants inside `L(PH)`.

use serde::Serialize;

use crate::algebra::{self, AlgebraStructure};
use crate::channel::KrausChannel;
use crate::error::{check_shape, Error, Result};
use crate::linalg::{self, Matrix};
use crate::opspace::{orthonormalize_span, OperatorSpan};
use crate::tol;

/// A channel, a code projector and a candidate algebra.
#[derive(Clone, Debug)]
pub struct CodeContext {
    pub channel: KrausChannel,
    pub projector: Matrix,
    pub algebra: OperatorSpan,
    /// The algebra contains `P` and may act outside `PH`; commutator conditions are then
    /// taken over `PAP`.
    pub projector_in_algebra: bool,
    /// Verdict threshold in operator norm.
    pub tolerance: f64,
}

impl CodeContext {
    pub fn new(
        channel: KrausChannel,
        projector: Matrix,
        algebra: OperatorSpan,
        projector_in_algebra: bool,
    ) -> Result<Self> {
        let d = channel.dim_in();
        check_shape(&projector, d, d, "code projector")?;
        if algebra.dim() != d {
            return Err(Error::DimensionMismatch {
                context: "candidate algebra",
                expected: d.to_string(),
                found: algebra.dim().to_string(),
            });
        }
        let defect = linalg::projector_defect(&projector);
        if defect > tol::TP {
            return Err(Error::NotProjector { defect });
        }
        if projector_in_algebra {
            let residual = algebra.residual(&projector);
            if residual > tol::RESIDUAL {
                return Err(Error::InvalidContext(format!(
                    "projector is not in the algebra (residual {residual:.3e})"
                )));
            }
        } else {
            for x in algebra.basis() {
                let residual = linalg::op_norm(&(&projector * x * &projector - x));
                if residual > tol::RESIDUAL {
                    return Err(Error::InvalidContext(format!(
                        "algebra element not supported on the code (residual {residual:.3e})"
                    )));
                }
            }
        }
        Ok(Self {
            channel,
            projector,
            algebra,
            projector_in_algebra,
            tolerance: tol::RESIDUAL,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Basis the commutator conditions range over: `A`, or `PAP` in projector-in-algebra mode.
    fn commutator_basis(&self) -> Result<Vec<Matrix>> {
        if !self.projector_in_algebra {
            return Ok(self.algebra.basis().to_vec());
        }
        let p = &self.projector;
        let compressed: Vec<Matrix> = self.algebra.basis().iter().map(|x| p * x * p).collect();
        if compressed.is_empty() {
            return Ok(compressed);
        }
        Ok(orthonormalize_span(&compressed, tol::RANK)?
            .basis()
            .to_vec())
    }
}

/// A verdict with the residuals it was decided from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub verdict: bool,
    /// `max ‖P E†(X) P − PXP‖`; not evaluated for correctability.
    pub residual_definition: Option<f64>,
    pub residual_commutator: f64,
    pub algebra_dim: usize,
}

/// Evaluates both the defining condition and the commutator condition; the verdict is true
/// iff both are within tolerance.
pub fn is_conserved(ctx: &CodeContext) -> Result<Verdict> {
    let ch = &ctx.channel;
    if ch.dim_in() != ch.dim_out() {
        return Err(Error::InvalidContext(
            "conservation needs a channel from a space to itself".into(),
        ));
    }
    let p = &ctx.projector;
    let mut definition = 0.0_f64;
    for x in ctx.algebra.basis() {
        let lhs = p * ch.apply_dual(x)? * p;
        definition = definition.max(linalg::op_norm(&(lhs - p * x * p)));
    }
    let mut commutator = 0.0_f64;
    let basis = ctx.commutator_basis()?;
    for e in ch.kraus() {
        let ep = e * p;
        for x in &basis {
            commutator = commutator.max(linalg::op_norm(&linalg::commutator(&ep, x)));
        }
    }
    Ok(Verdict {
        verdict: definition <= ctx.tolerance && commutator <= ctx.tolerance,
        residual_definition: Some(definition),
        residual_commutator: commutator,
        algebra_dim: ctx.algebra.len(),
    })
}

/// Commutant of `{E_a P, P E_a†}` inside `L(PH)`.
pub fn largest_conserved(channel: &KrausChannel, projector: &Matrix) -> Result<OperatorSpan> {
    if channel.dim_in() != channel.dim_out() {
        return Err(Error::InvalidContext(
            "conservation needs a channel from a space to itself".into(),
        ));
    }
    check_shape(
        projector,
        channel.dim_in(),
        channel.dim_in(),
        "code projector",
    )?;
    let ops: Vec<Matrix> = channel.kraus().iter().map(|e| e * projector).collect();
    algebra::commutant_of(&ops, projector)
}

/// `P E_a† E_b P` for all ordered pairs, dropping numerically zero products.
pub fn code_overlaps(channel: &KrausChannel, projector: &Matrix) -> Vec<Matrix> {
    let mut out = Vec::with_capacity(channel.len() * channel.len());
    for a in channel.kraus() {
        for b in channel.kraus() {
            let m = projector * a.adjoint() * b * projector;
            if m.norm() > tol::ZERO_KRAUS {
                out.push(m);
            }
        }
    }
    out
}

/// Verdict from `max ‖[P E_a† E_b P, X]‖` over Kraus pairs and the algebra basis.
pub fn is_correctable(ctx: &CodeContext) -> Result<Verdict> {
    let overlaps = code_overlaps(&ctx.channel, &ctx.projector);
    let basis = ctx.commutator_basis()?;
    let mut commutator = 0.0_f64;
    for o in &overlaps {
        for x in &basis {
            commutator = commutator.max(linalg::op_norm(&linalg::commutator(o, x)));
        }
    }
    Ok(Verdict {
        verdict: commutator <= ctx.tolerance,
        residual_definition: None,
        residual_commutator: commutator,
        algebra_dim: ctx.algebra.len(),
    })
}

/// Commutant of `{P E_a† E_b P}` inside `L(PH)`.
pub fn largest_correctable(channel: &KrausChannel, projector: &Matrix) -> Result<OperatorSpan> {
    check_shape(
        projector,
        channel.dim_in(),
        channel.dim_in(),
        "code projector",
    )?;
    algebra::commutant_of(&code_overlaps(channel, projector), projector)
}

/// Distance of `P` from a span; zero when the algebra contains the code projector.
pub fn projector_residual(span: &OperatorSpan, projector: &Matrix) -> f64 {
    span.residual(projector)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SubsystemVerdict {
    pub verdict: bool,
    pub residual: f64,
}

/// Checks `P_k E†(X ⊗ 1) P_k = X ⊗ 1` for a matrix-unit basis of `L(A_k)`.
pub fn noiseless_subsystem_check(
    channel: &KrausChannel,
    structure: &AlgebraStructure,
    sector: usize,
) -> Result<SubsystemVerdict> {
    let s = structure.sectors.get(sector).ok_or(Error::InvalidSector {
        index: sector,
        count: structure.sectors.len(),
    })?;
    let p = &s.projector;
    let mut residual = 0.0_f64;
    for i in 0..s.n {
        for j in 0..s.n {
            let x = s.embed(&linalg::unit(s.n, i, j));
            let lhs = p * channel.apply_dual(&x)? * p;
            residual = residual.max(linalg::op_norm(&(lhs - x)));
        }
    }
    Ok(SubsystemVerdict {
        verdict: residual <= tol::RESIDUAL,
        residual,
    })
}

/// `Tr(E(ρ) P)` for a state supported in the code.
pub fn repeatability_probability(
    channel: &KrausChannel,
    projector: &Matrix,
    rho: &Matrix,
) -> Result<f64> {
    check_shape(
        projector,
        channel.dim_out(),
        channel.dim_out(),
        "code projector",
    )?;
    check_shape(rho, channel.dim_in(), channel.dim_in(), "state")?;
    let residual = (projector * rho * projector - rho).norm();
    if residual > tol::RESIDUAL {
        return Err(Error::StateOutsideCode { residual });
    }
    Ok((channel.apply_state(rho)? * projector).trace().re)
}
