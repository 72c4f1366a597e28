//! Recovery channels for correctable algebras.
//!
//! For each sector of the algebra (plus the part of the code outside its unit, treated as a
//! sector with one-dimensional logical space) the errors acting on a fixed multiplicity
//! vector have a scalar Gram matrix. Diagonalizing it yields canonical errors with mutually
//! orthogonal, isometric images; the recovery measures which image a state lies in and
//! rotates it back.

use serde::Serialize;

use crate::algebra::AlgebraStructure;
use crate::channel::KrausChannel;
use crate::error::{check_shape, Error, Result};
use crate::linalg::{self, Matrix};
use crate::opspace::OperatorSpan;
use crate::random::Sampler;
use crate::tol;

#[derive(Clone, Debug)]
pub struct RecoveryReport {
    pub recovery: KrausChannel,
    pub heisenberg_residual: f64,
    pub schrodinger_residual: f64,
    pub tp_defect: f64,
    /// `Q_k` for every populated sector, followed by `Q⊥` when it is nonzero.
    pub syndrome_projectors: Vec<Matrix>,
    /// Largest deviation of an error Gram block from a multiple of the identity.
    pub scalarity_residual: f64,
}

/// Default number of sampled mixtures in [`synthesize_recovery`].
pub const SCHRODINGER_SAMPLES: usize = 8;

struct CodeSector {
    n: usize,
    m: usize,
    frame: Matrix,
}

impl CodeSector {
    fn logical(&self, l: usize) -> Matrix {
        let mut out = linalg::zeros(self.frame.nrows(), self.n);
        for i in 0..self.n {
            out.set_column(i, &self.frame.column(i * self.m + l));
        }
        out
    }
}

/// Builds a trace-preserving recovery for an algebra correctable on `PH`.
pub fn synthesize_recovery(
    channel: &KrausChannel,
    projector: &Matrix,
    algebra: &OperatorSpan,
    structure: &AlgebraStructure,
) -> Result<RecoveryReport> {
    let d_in = channel.dim_in();
    let d_out = channel.dim_out();
    check_shape(projector, d_in, d_in, "code projector")?;
    let defect = linalg::projector_defect(projector);
    if defect > tol::TP {
        return Err(Error::NotProjector { defect });
    }
    if structure.ambient_dim != d_in {
        return Err(Error::DimensionMismatch {
            context: "algebra structure",
            expected: d_in.to_string(),
            found: structure.ambient_dim.to_string(),
        });
    }
    let code = linalg::projector_range(projector);
    if code.ncols() == 0 {
        return Err(Error::Empty("code subspace"));
    }

    let mut sectors: Vec<CodeSector> = structure
        .sectors
        .iter()
        .map(|s| CodeSector {
            n: s.n,
            m: s.m,
            frame: s.frame.clone(),
        })
        .collect();
    let rest = projector - &structure.unit;
    let outside = linalg::op_norm(&(&rest * &rest - &rest));
    if outside > tol::RESIDUAL {
        return Err(Error::InvalidContext(format!(
            "algebra unit is not below the code projector (residual {outside:.3e})"
        )));
    }
    let rest_frame = linalg::projector_range(&rest);
    if rest_frame.ncols() > 0 {
        sectors.push(CodeSector {
            n: 1,
            m: rest_frame.ncols(),
            frame: rest_frame,
        });
    }

    let mut scalarity = 0.0_f64;
    let mut errors_per_sector: Vec<Vec<Matrix>> = Vec::with_capacity(sectors.len());
    let mut kraus = Vec::new();
    let mut syndromes = Vec::new();
    for (k, s) in sectors.iter().enumerate() {
        let mut g = Vec::with_capacity(channel.len() * s.m);
        for e in channel.kraus() {
            for l in 0..s.m {
                g.push(e * s.logical(l));
            }
        }
        let count = g.len();
        let mut mu = linalg::zeros(count, count);
        for x in 0..count {
            for y in 0..count {
                let gram = g[x].adjoint() * &g[y];
                let value = gram.trace() / s.n as f64;
                scalarity = scalarity.max(linalg::op_norm(&(gram - linalg::identity(s.n) * value)));
                mu[(x, y)] = value;
            }
        }
        if scalarity > tol::RESIDUAL {
            return Err(Error::NotCorrectable {
                what: "error Gram scalarity",
                residual: scalarity,
            });
        }
        let (weights, u) = linalg::eigh(&linalg::hermitian_part(&mu));
        let reference = s.logical(0);
        let mut q = linalg::zeros(d_out, d_out);
        let mut populated = false;
        for (i, &w) in weights.iter().enumerate() {
            if w <= tol::CANONICAL_WEIGHT {
                continue;
            }
            populated = true;
            let mut f = linalg::zeros(d_out, s.n);
            for (x, gx) in g.iter().enumerate() {
                f += gx * u[(x, i)];
            }
            let f = f.unscale(w.sqrt());
            kraus.push(&reference * f.adjoint());
            q += &f * f.adjoint();
        }
        if !populated {
            return Err(Error::AnnihilatedSector { sector: k });
        }
        syndromes.push(q);
        errors_per_sector.push(g);
    }

    let mut cross = 0.0_f64;
    for k in 0..errors_per_sector.len() {
        for l in k + 1..errors_per_sector.len() {
            for a in &errors_per_sector[k] {
                for b in &errors_per_sector[l] {
                    cross = cross.max(linalg::op_norm(&(a.adjoint() * b)));
                }
            }
            cross = cross.max(linalg::op_norm(&(&syndromes[k] * &syndromes[l])));
        }
    }
    if cross > tol::RESIDUAL {
        return Err(Error::NotCorrectable {
            what: "cross-sector overlap",
            residual: cross,
        });
    }

    let mut complement = linalg::identity(d_out);
    for q in &syndromes {
        complement -= q;
    }
    let tail = linalg::projector_range(&linalg::hermitian_part(&complement));
    if tail.ncols() > 0 {
        let scale = (code.ncols() as f64).sqrt();
        for j in 0..code.ncols() {
            for l in 0..tail.ncols() {
                kraus.push((code.column(j) * tail.column(l).adjoint()).unscale(scale));
            }
        }
        syndromes.push(&tail * tail.adjoint());
    }

    let recovery = KrausChannel::new(kraus)?;
    let heisenberg_residual = verify_heisenberg(channel, &recovery, projector, algebra)?;
    let schrodinger_residual =
        verify_schrodinger(channel, &recovery, structure, SCHRODINGER_SAMPLES, 0)?;
    Ok(RecoveryReport {
        tp_defect: recovery.tp_defect(),
        recovery,
        heisenberg_residual,
        schrodinger_residual,
        syndrome_projectors: syndromes,
        scalarity_residual: scalarity,
    })
}

fn check_pair(channel: &KrausChannel, recovery: &KrausChannel) -> Result<()> {
    if recovery.dim_in() != channel.dim_out() || recovery.dim_out() != channel.dim_in() {
        return Err(Error::DimensionMismatch {
            context: "recovery",
            expected: format!("{} -> {}", channel.dim_out(), channel.dim_in()),
            found: format!("{} -> {}", recovery.dim_in(), recovery.dim_out()),
        });
    }
    Ok(())
}

/// `max ‖P E†(R†(X)) P − PXP‖` over the algebra basis.
pub fn verify_heisenberg(
    channel: &KrausChannel,
    recovery: &KrausChannel,
    projector: &Matrix,
    algebra: &OperatorSpan,
) -> Result<f64> {
    check_pair(channel, recovery)?;
    check_shape(
        projector,
        channel.dim_in(),
        channel.dim_in(),
        "code projector",
    )?;
    let p = projector;
    let mut worst = 0.0_f64;
    for x in algebra.basis() {
        let back = channel.apply_dual(&recovery.apply_dual(x)?)?;
        worst = worst.max(linalg::op_norm(&(p * back * p - p * x * p)));
    }
    Ok(worst)
}

/// Recovers seeded random mixtures `Σ_k α_k frame_k(ρ_k ⊗ τ_k)frame_k†` and reports the
/// largest deviation of a sector marginal from `α_k ρ_k`, of a sector block from product
/// form, or of weight leaking between or outside sectors.
pub fn verify_schrodinger(
    channel: &KrausChannel,
    recovery: &KrausChannel,
    structure: &AlgebraStructure,
    sample_count: usize,
    seed: u64,
) -> Result<f64> {
    check_pair(channel, recovery)?;
    let sectors = &structure.sectors;
    if sectors.is_empty() {
        return Ok(0.0);
    }
    let mut sampler = Sampler::new(seed);
    let mut worst = 0.0_f64;
    for sample in 0..sample_count {
        let alpha = sampler.probabilities(sectors.len());
        let mut rho = linalg::zeros(structure.ambient_dim, structure.ambient_dim);
        let mut logical = Vec::with_capacity(sectors.len());
        for (s, &a) in sectors.iter().zip(&alpha) {
            let rank = if sample % 2 == 0 { 1 } else { s.n };
            let rk = sampler.density(s.n, rank);
            let tk = sampler.density(s.m, s.m);
            rho += s.embed_product(&rk, &tk) * linalg::r(a);
            logical.push(rk);
        }
        let out = recovery.apply_state(&channel.apply_state(&rho)?)?;
        let unit = &structure.unit;
        worst = worst.max(linalg::op_norm(&(&out - unit * &out * unit)));
        for (k, s) in sectors.iter().enumerate() {
            let block = s.frame.adjoint() * &out * &s.frame;
            let marginal = linalg::partial_trace_second(&block, s.n, s.m);
            worst = worst.max(linalg::op_norm(
                &(&marginal - &logical[k] * linalg::r(alpha[k])),
            ));
            if alpha[k] > tol::ZERO_KRAUS {
                let multiplicity = linalg::partial_trace_first(&block, s.n, s.m);
                let product = linalg::kron(&marginal, &multiplicity).unscale(alpha[k]);
                worst = worst.max(linalg::op_norm(&(&block - product)));
            }
            for t in &sectors[k + 1..] {
                let leak = s.frame.adjoint() * &out * &t.frame;
                worst = worst.max(linalg::op_norm(&leak));
            }
        }
    }
    Ok(worst)
}

/// Operator span `E†(R†(A))` with its certificates.
#[derive(Clone, Debug)]
pub struct LiftedSpace {
    pub span: OperatorSpan,
    /// `max ‖E†(R†(v)) − v‖` over the lifted basis.
    pub exactness_residual: f64,
    /// Distance between `span{PvP}` and the algebra.
    pub compression_residual: f64,
    pub closure_residual: f64,
    pub multiplication_closed: bool,
}

/// Lifts a corrected algebra to `V = E†(R†(A))`, whose elements are corrected on every state.
/// Requires `R†(X) = R†(PXP)` on all of `L(H)`.
pub fn lift_operator_space(
    channel: &KrausChannel,
    recovery: &KrausChannel,
    algebra: &OperatorSpan,
    projector: &Matrix,
) -> Result<LiftedSpace> {
    check_pair(channel, recovery)?;
    let d = channel.dim_in();
    check_shape(projector, d, d, "code projector")?;
    let p = projector;
    let mut compressing = 0.0_f64;
    for i in 0..d {
        for j in 0..d {
            let x = linalg::unit(d, i, j);
            let diff = recovery.apply_dual(&x)? - recovery.apply_dual(&(p * &x * p))?;
            compressing = compressing.max(linalg::op_norm(&diff));
        }
    }
    if compressing > tol::RESIDUAL {
        return Err(Error::RecoveryNotCompressing {
            residual: compressing,
        });
    }
    let pullback = |x: &Matrix| channel.apply_dual_unchecked(&recovery.apply_dual_unchecked(x));
    let span = algebra.map(pullback, tol::RANK)?;
    let mut exactness = 0.0_f64;
    for v in span.basis() {
        exactness = exactness.max(linalg::op_norm(&(pullback(v) - v)));
    }
    let compressed = span.map(|v| p * v * p, tol::RANK)?;
    let closure_residual = span.closure_residual();
    Ok(LiftedSpace {
        compression_residual: compressed.span_distance(algebra),
        exactness_residual: exactness,
        multiplication_closed: closure_residual <= tol::CLOSURE,
        closure_residual,
        span,
    })
}

/// `max |Tr(σ E†(R†(X))) − Tr(σX)|` over the lifted basis, for the maximally mixed state and
/// `sample_count` seeded full-rank states on the whole input space.
pub fn verify_all_states(
    channel: &KrausChannel,
    recovery: &KrausChannel,
    lifted: &OperatorSpan,
    sample_count: usize,
    seed: u64,
) -> Result<f64> {
    check_pair(channel, recovery)?;
    let d = channel.dim_in();
    let mut states = vec![linalg::identity(d).unscale(d as f64)];
    let mut sampler = Sampler::new(seed);
    states.extend((0..sample_count).map(|_| sampler.density(d, d)));
    states_residual(channel, recovery, lifted, &states)
}

/// [`verify_all_states`] on caller-provided states.
pub fn states_residual(
    channel: &KrausChannel,
    recovery: &KrausChannel,
    lifted: &OperatorSpan,
    states: &[Matrix],
) -> Result<f64> {
    check_pair(channel, recovery)?;
    let mut worst = 0.0_f64;
    for x in lifted.basis() {
        let back = channel.apply_dual(&recovery.apply_dual(x)?)?;
        for sigma in states {
            check_shape(sigma, x.nrows(), x.ncols(), "state")?;
            let dev = (sigma * (&back - x)).trace().norm();
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}

/// JSON form of a [`RecoveryReport`].
#[derive(Clone, Debug, Serialize)]
pub struct RecoveryReportJson {
    pub kraus: Vec<crate::io::MatrixJson>,
    pub heisenberg_residual: f64,
    pub schrodinger_residual: f64,
    pub tp_defect: f64,
    pub syndromes: Vec<crate::io::MatrixJson>,
}

impl From<&RecoveryReport> for RecoveryReportJson {
    fn from(r: &RecoveryReport) -> Self {
        Self {
            kraus: r.recovery.kraus().iter().map(Into::into).collect(),
            heisenberg_residual: r.heisenberg_residual,
            schrodinger_residual: r.schrodinger_residual,
            tp_defect: r.tp_defect,
            syndromes: r.syndrome_projectors.iter().map(Into::into).collect(),
        }
    }
}
