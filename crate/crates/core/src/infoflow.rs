//! Information flow from a system into an apparatus through an interaction `U`.
//!
//! With the apparatus prepared in `ψ_A`, the dilation `V = U(· ⊗ ψ_A)` has two marginals:
//! `E_SS` (what stays in the system) and `E_SA` (what reaches the apparatus). Observables
//! recoverable from both sides form a commutative algebra `C`, generated by projectors
//! `P_i`. The POVMs `X_i = R_SS†(P_i)` and `Y_i = R_SA†(P_i)` always agree.

use serde::Serialize;

use crate::algebra::{self, wedderburn};
use crate::channel::{Isometry, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::opspace::OperatorSpan;
use crate::qec;
use crate::random::Sampler;
use crate::recovery::synthesize_recovery;
use crate::tol;

/// Number of seeded random system states in the correlation certificate.
pub const CORRELATION_SAMPLES: usize = 8;

#[derive(Clone, Debug)]
pub struct InfoFlowReport {
    pub isometry: Isometry,
    pub e_ss: KrausChannel,
    pub e_sa: KrausChannel,
    pub a_ss: OperatorSpan,
    pub a_sa: OperatorSpan,
    pub c: OperatorSpan,
    pub c_projectors: Vec<Matrix>,
    pub x_povm: Vec<Matrix>,
    pub y_povm: Vec<Matrix>,
    /// `M_ij` for the maximally mixed system state.
    pub correlation: Vec<Vec<f64>>,
    pub certificates: Certificates,
}

impl InfoFlowReport {
    /// True when `C` is more than the scalars.
    pub fn has_duplicated_observable(&self) -> bool {
        self.c.len() > 1
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Certificates {
    /// Distance between `A_SA` and the commutant of the algebra generated by `Range(E_SS†)`.
    pub a_sa_crosscheck: f64,
    /// Containment of `A_SA` in the commutant of `A_SS`.
    pub a_sa_in_a_ss_commutant: f64,
    pub c_in_a_ss: f64,
    pub c_in_a_sa: f64,
    pub c_commutativity: f64,
    /// `max ‖F_a†F_b − E_SS†(|a⟩⟨b|)‖` for the complementary channel of `E_SS`.
    pub complementary_overlap: f64,
    /// `max ‖E_SS†(X_i) − P_i‖, ‖E_SA†(Y_i) − P_i‖`.
    pub povm_pullback: f64,
    /// POVM positivity, boundedness and completeness.
    pub povm_validity: f64,
    /// Worst `|M_ij − δ_ij Tr(ρP_i)|` over the sampled states.
    pub correlation_deviation: f64,
}

impl Certificates {
    pub fn worst(&self) -> f64 {
        [
            self.a_sa_crosscheck,
            self.a_sa_in_a_ss_commutant,
            self.c_in_a_ss,
            self.c_in_a_sa,
            self.c_commutativity,
            self.complementary_overlap,
            self.povm_pullback,
            self.povm_validity,
            self.correlation_deviation,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Analysis with seed 0.
pub fn analyze_interaction(u: &Matrix, psi_a: &Matrix) -> Result<InfoFlowReport> {
    analyze_interaction_seeded(u, psi_a, 0)
}

pub fn analyze_interaction_seeded(u: &Matrix, psi_a: &Matrix, seed: u64) -> Result<InfoFlowReport> {
    let v = Isometry::from_unitary(u, psi_a)?;
    let d_s = v.d_s();
    let id_s = linalg::identity(d_s);
    let (e_ss, e_sa) = v.marginal_channels();

    let a_ss = qec::largest_correctable(&e_ss, &id_s)?;
    let a_sa = qec::largest_correctable(&e_sa, &id_s)?;

    let dual_range: Vec<Matrix> = (0..d_s)
        .flat_map(|i| (0..d_s).map(move |j| (i, j)))
        .map(|(i, j)| e_ss.apply_dual_unchecked(&linalg::unit(d_s, i, j)))
        .collect();
    let range_algebra = algebra::generate_algebra(&dual_range, tol::RANK)?;
    let a_sa_alt = algebra::commutant(&range_algebra, &id_s)?;
    let a_sa_crosscheck = a_sa.span_distance(&a_sa_alt);
    require("A_SA cross-check", a_sa_crosscheck)?;

    let a_ss_commutant = algebra::commutant(&a_ss, &id_s)?;
    let a_sa_in_a_ss_commutant = a_ss_commutant.containment_residual(&a_sa);
    require("A_SA inside the commutant of A_SS", a_sa_in_a_ss_commutant)?;

    let c = algebra::intersect(&a_ss, &a_sa)?;
    let c_commutativity = c.commutativity_residual();
    require("commutativity of the duplicated algebra", c_commutativity)?;
    let c_in_a_ss = a_ss.containment_residual(&c);
    let c_in_a_sa = a_sa.containment_residual(&c);

    let complementary = e_ss.complementary()?;
    let overlaps = complementary.overlaps();
    let mut complementary_overlap = 0.0_f64;
    for a in 0..d_s {
        for b in 0..d_s {
            let direct = e_ss.apply_dual_unchecked(&linalg::unit(d_s, a, b));
            complementary_overlap =
                complementary_overlap.max(linalg::op_norm(&(&overlaps[a * d_s + b] - direct)));
        }
    }

    let c_projectors = duplicated_projectors(&c, seed)?;

    let r_ss = synthesize_recovery(&e_ss, &id_s, &a_ss, &wedderburn(&a_ss, tol::RANK)?)?;
    let r_sa = synthesize_recovery(&e_sa, &id_s, &a_sa, &wedderburn(&a_sa, tol::RANK)?)?;
    let mut x_povm = Vec::with_capacity(c_projectors.len());
    let mut y_povm = Vec::with_capacity(c_projectors.len());
    let mut povm_pullback = 0.0_f64;
    for p in &c_projectors {
        let x = r_ss.recovery.apply_dual(p)?;
        let y = r_sa.recovery.apply_dual(p)?;
        povm_pullback = povm_pullback
            .max(linalg::op_norm(&(e_ss.apply_dual(&x)? - p)))
            .max(linalg::op_norm(&(e_sa.apply_dual(&y)? - p)));
        x_povm.push(x);
        y_povm.push(y);
    }
    let povm_validity = povm_defect(&x_povm).max(povm_defect(&y_povm));

    let mut states = vec![id_s.unscale(d_s as f64)];
    let mut sampler = Sampler::new(seed);
    states.extend((0..CORRELATION_SAMPLES).map(|_| sampler.density(d_s, d_s)));
    let report = correlation_matrix(&v, &c_projectors, &x_povm, &y_povm, &states)?;

    Ok(InfoFlowReport {
        isometry: v,
        e_ss,
        e_sa,
        a_ss,
        a_sa,
        c,
        c_projectors,
        x_povm,
        y_povm,
        correlation: report.matrices[0].clone(),
        certificates: Certificates {
            a_sa_crosscheck,
            a_sa_in_a_ss_commutant,
            c_in_a_ss,
            c_in_a_sa,
            c_commutativity,
            complementary_overlap,
            povm_pullback,
            povm_validity,
            correlation_deviation: report.max_deviation,
        },
    })
}

fn require(what: &'static str, residual: f64) -> Result<()> {
    if residual > tol::RESIDUAL {
        return Err(Error::CertificateFailed { what, residual });
    }
    Ok(())
}

/// Largest violation of `0 ≤ X_i ≤ 1` and `Σ X_i = 1`.
pub fn povm_defect(povm: &[Matrix]) -> f64 {
    let Some(first) = povm.first() else {
        return f64::INFINITY;
    };
    let mut sum = linalg::zeros(first.nrows(), first.ncols());
    let mut worst = 0.0_f64;
    for x in povm {
        worst = worst.max(linalg::op_norm(&(x - x.adjoint())));
        let (values, _) = linalg::eigh(&linalg::hermitian_part(x));
        for v in values {
            worst = worst.max(-v).max(v - 1.0);
        }
        sum += x;
    }
    worst.max(linalg::op_norm(&(sum - linalg::identity(first.nrows()))))
}

/// Minimal projectors of the duplicated algebra.
pub fn duplicated_projectors(c: &OperatorSpan, seed: u64) -> Result<Vec<Matrix>> {
    algebra::spectral_projectors(c, seed)
}

#[derive(Clone, Debug)]
pub struct CorrelationReport {
    /// `M_ij = Tr(VρV†(X_i ⊗ Y_j))`, one matrix per state.
    pub matrices: Vec<Vec<Vec<f64>>>,
    /// Worst `|M_ij − δ_ij Tr(ρP_i)|`.
    pub max_deviation: f64,
    /// Worst `|M_ij|` with `i ≠ j`.
    pub max_offdiag: f64,
}

pub fn correlation_matrix(
    v: &Isometry,
    projectors: &[Matrix],
    x_povm: &[Matrix],
    y_povm: &[Matrix],
    states: &[Matrix],
) -> Result<CorrelationReport> {
    let k = projectors.len();
    if x_povm.len() != k || y_povm.len() != k {
        return Err(Error::DimensionMismatch {
            context: "correlation POVMs",
            expected: k.to_string(),
            found: format!("{} and {}", x_povm.len(), y_povm.len()),
        });
    }
    let vm = v.matrix();
    let mut matrices = Vec::with_capacity(states.len());
    let mut max_deviation = 0.0_f64;
    let mut max_offdiag = 0.0_f64;
    for rho in states {
        crate::error::check_shape(rho, v.d_s(), v.d_s(), "system state")?;
        let joint = vm * rho * vm.adjoint();
        let mut m = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                let value = (&joint * linalg::kron(&x_povm[i], &y_povm[j])).trace().re;
                let expected = if i == j {
                    (rho * &projectors[i]).trace().re
                } else {
                    max_offdiag = max_offdiag.max(value.abs());
                    0.0
                };
                max_deviation = max_deviation.max((value - expected).abs());
                m[i][j] = value;
            }
        }
        matrices.push(m);
    }
    Ok(CorrelationReport {
        matrices,
        max_deviation,
        max_offdiag,
    })
}
