//! Built-in examples with embedded data.

use serde_json::json;

use oaqec::algebra::{self, wedderburn_seeded};
use oaqec::infoflow::analyze_interaction_seeded;
use oaqec::linalg::{self, unit, Matrix};
use oaqec::qec::{self, CodeContext};
use oaqec::random::Sampler;
use oaqec::recovery::{self, synthesize_recovery};
use oaqec::{models, tol, OperatorSpan};

use crate::{within, Analysis, CliError, Demo, Residuals};

/// Bit-flip probabilities for the identity and a flip on each of the three qubits.
pub const BITFLIP_PROBABILITIES: [f64; 4] = [0.55, 0.2, 0.15, 0.1];
pub const HYBRID_ADDRESSES: usize = 3;
const MIXTURE_SAMPLES: usize = 32;

pub fn run(demo: Demo, tol: f64, seed: u64) -> Result<Analysis, CliError> {
    let mut a = match demo {
        Demo::SpontaneousEmission => spontaneous_emission(tol)?,
        Demo::QutritSe => qutrit(tol, seed)?,
        Demo::StabilizerZ1z2 => stabilizer(tol, seed)?,
        Demo::PauliG => pauli_g(tol, seed)?,
        Demo::Bitflip3 => bitflip3(tol, seed)?,
        Demo::HybridAddress => hybrid(tol, seed)?,
        Demo::CnotInfoflow => cnot(tol, seed)?,
    };
    a.pass &= within(&a.residuals, tol);
    Ok(a)
}

fn verdict_residuals(v: &qec::Verdict) -> Residuals {
    Residuals::from([
        (
            "definition".to_owned(),
            v.residual_definition.unwrap_or(f64::INFINITY),
        ),
        ("commutator".to_owned(), v.residual_commutator),
    ])
}

fn spontaneous_emission(tol: f64) -> Result<Analysis, CliError> {
    let p = unit(2, 0, 0);
    let span = oaqec::opspace::orthonormalize_span(std::slice::from_ref(&p), tol::RANK)?;
    let ctx = CodeContext::new(models::spontaneous_emission(), p, span, false)?.with_tolerance(tol);
    let v = qec::is_conserved(&ctx)?;
    Ok(Analysis {
        pass: v.verdict,
        result: json!({ "conserved": v.verdict, "code": "|0><0|", "algebra_dim": v.algebra_dim }),
        residuals: verdict_residuals(&v),
        summary: format!("span{{|0><0|}} conserved under emission: {}", v.verdict),
    })
}

/// The qutrit code `span{|0⟩, |1⟩}` and the closed form `E†(X) = X + X₀₀|2⟩⟨2|` for `X` on the
/// code.
fn qutrit(tol: f64, seed: u64) -> Result<Analysis, CliError> {
    let ch = models::qutrit_spontaneous_emission();
    let p = unit(3, 0, 0) + unit(3, 1, 1);
    let ctx = CodeContext::new(ch.clone(), p.clone(), OperatorSpan::full_on(&p)?, false)?
        .with_tolerance(tol);
    let v = qec::is_conserved(&ctx)?;
    let mut rng = Sampler::new(seed);
    let mut samples: Vec<Matrix> = (0..4).map(|k| unit(3, k / 2, k % 2)).collect();
    for _ in 0..8 {
        let mut x = linalg::zeros(3, 3);
        x.view_mut((0, 0), (2, 2)).copy_from(&rng.ginibre(2, 2));
        samples.push(x);
    }
    let mut closed_form = 0.0_f64;
    for x in &samples {
        let mut expected = x.clone();
        expected[(2, 2)] += x[(0, 0)];
        let dual = ch.apply_dual(x)?;
        for (a, b) in dual.iter().zip(expected.iter()) {
            closed_form = closed_form.max((a - b).norm());
        }
    }
    let mut residuals = verdict_residuals(&v);
    residuals.insert("dual_closed_form".into(), closed_form);
    Ok(Analysis {
        pass: v.verdict,
        result: json!({ "conserved": v.verdict, "algebra_dim": v.algebra_dim }),
        residuals,
        summary: format!(
            "qutrit code conserved: {}, dual closed form deviation {closed_form:.3e}",
            v.verdict
        ),
    })
}

fn stabilizer(_tol: f64, seed: u64) -> Result<Analysis, CliError> {
    let a = qec::largest_conserved(&models::stabilizer_z1z2_channel(), &linalg::identity(8))?;
    let st = wedderburn_seeded(&a, tol::RANK, seed)?;
    let expected = a.len() == 16 && st.shape() == vec![(2, 1); 4];
    Ok(Analysis {
        pass: expected,
        result: json!({
            "algebra_dim": a.len(),
            "shape": st.shape(),
            "matches_expected": expected,
        }),
        residuals: Residuals::from([("structure".to_owned(), st.verify(&a))]),
        summary: format!(
            "largest conserved algebra dim {}, sectors {:?}",
            a.len(),
            st.shape()
        ),
    })
}

fn pauli_g(tol: f64, seed: u64) -> Result<Analysis, CliError> {
    let id = linalg::identity(8);
    let g = algebra::generate_algebra(&models::pauli_g(), tol::RANK)?;
    let comm = algebra::commutant(&g, &id)?;
    let st = wedderburn_seeded(&comm, tol::RANK, seed)?;

    let s_prime = qec::largest_conserved(&models::stabilizer_z1z2_channel(), &id)?;
    let ctx = CodeContext::new(models::pauli_g_channel(), id, s_prime, false)?.with_tolerance(tol);
    let s_conserved = qec::is_conserved(&ctx)?;

    let p = models::stabilizer_code();
    let ctx = CodeContext::new(
        models::pauli_g_channel(),
        p.clone(),
        OperatorSpan::full_on(&p)?,
        false,
    )?
    .with_tolerance(tol);
    let code = qec::is_correctable(&ctx)?;

    let expected =
        comm.len() == 8 && st.shape() == vec![(2, 2); 2] && !s_conserved.verdict && code.verdict;
    Ok(Analysis {
        pass: expected,
        result: json!({
            "commutant_dim": comm.len(),
            "shape": st.shape(),
            "stabilizer_commutant_conserved": s_conserved.verdict,
            "stabilizer_code_correctable": code.verdict,
            "stabilizer_commutant_residual": s_conserved.residual_commutator,
        }),
        residuals: Residuals::from([
            ("structure".to_owned(), st.verify(&comm)),
            ("code_commutator".to_owned(), code.residual_commutator),
        ]),
        summary: format!(
            "commutant dim {}, sectors {:?}; S' conserved: {}; code correctable: {}",
            comm.len(),
            st.shape(),
            s_conserved.verdict,
            code.verdict
        ),
    })
}

fn bitflip3(tol: f64, seed: u64) -> Result<Analysis, CliError> {
    let ch = models::bitflip3(&BITFLIP_PROBABILITIES);
    let p = models::bitflip3_code();
    let a = models::bitflip3_algebra();
    let st = wedderburn_seeded(&a, tol::RANK, seed)?;
    let rep = synthesize_recovery(&ch, &p, &a, &st)?;
    let closed = models::bitflip3_closed_form_recovery();
    let mut agreement = 0.0_f64;
    for x in a.basis() {
        let ours = rep.recovery.apply_dual(x)?;
        let theirs = closed.apply_dual(x)?;
        agreement = agreement.max(linalg::op_norm(&(ours - theirs)));
    }
    let lifted = recovery::lift_operator_space(&ch, &rep.recovery, &a, &p)?;
    let all_states = recovery::verify_all_states(&ch, &rep.recovery, &lifted.span, 16, seed)?;
    let pvp_equals_a = lifted.compression_residual <= tol;
    Ok(Analysis {
        pass: pvp_equals_a,
        result: json!({
            "probabilities": BITFLIP_PROBABILITIES,
            "recovery_kraus_count": rep.recovery.len(),
            "lifted_dim": lifted.span.len(),
            "pvp_equals_a": pvp_equals_a,
            "lifted_multiplication_closed": lifted.multiplication_closed,
        }),
        residuals: Residuals::from([
            ("heisenberg".to_owned(), rep.heisenberg_residual),
            ("closed_form".to_owned(), agreement),
            ("pvp_equals_a".to_owned(), lifted.compression_residual),
            ("all_states".to_owned(), all_states),
        ]),
        summary: format!(
            "heisenberg residual {:.3e}, closed form {agreement:.3e}, PVP = A: {pvp_equals_a}",
            rep.heisenberg_residual
        ),
    })
}

fn hybrid(_tol: f64, seed: u64) -> Result<Analysis, CliError> {
    let code = models::hybrid_address(HYBRID_ADDRESSES);
    let st = wedderburn_seeded(&code.algebra, tol::RANK, seed)?;
    let rep = synthesize_recovery(&code.channel, &code.projector, &code.algebra, &st)?;
    let schrodinger =
        recovery::verify_schrodinger(&code.channel, &rep.recovery, &st, MIXTURE_SAMPLES, seed)?;
    let mut rng = Sampler::new(seed);
    let mut exact = 0.0_f64;
    for _ in 0..MIXTURE_SAMPLES {
        let weights = rng.probabilities(code.address_count);
        let mut rho = linalg::zeros(code.projector.nrows(), code.projector.ncols());
        for (frame, w) in code.address_frames.iter().zip(&weights) {
            let psi = frame * rng.pure_state(2);
            rho += linalg::outer(&psi) * linalg::r(*w);
        }
        let out = rep.recovery.apply_state(&code.channel.apply_state(&rho)?)?;
        exact = exact.max(linalg::op_norm(&(out - &rho)));
    }
    Ok(Analysis {
        pass: true,
        result: json!({
            "addresses": code.address_count,
            "shape": st.shape(),
            "recovery_kraus_count": rep.recovery.len(),
        }),
        residuals: Residuals::from([
            ("heisenberg".to_owned(), rep.heisenberg_residual),
            ("schrodinger".to_owned(), schrodinger),
            ("recovered_mixtures".to_owned(), exact),
        ]),
        summary: format!(
            "{} addresses, schrodinger residual {schrodinger:.3e}",
            code.address_count
        ),
    })
}

fn cnot(_tol: f64, seed: u64) -> Result<Analysis, CliError> {
    let r = analyze_interaction_seeded(&models::cnot(), &linalg::ket(2, 0), seed)?;
    Ok(Analysis {
        pass: r.c.len() == 2,
        result: json!({
            "a_ss_dim": r.a_ss.len(),
            "a_sa_dim": r.a_sa.len(),
            "c_dim": r.c.len(),
            "correlation": r.correlation,
            "max_correlation_deviation": r.certificates.correlation_deviation,
        }),
        residuals: Residuals::from([
            ("c_commutativity".to_owned(), r.certificates.c_commutativity),
            ("a_sa_crosscheck".to_owned(), r.certificates.a_sa_crosscheck),
            (
                "correlation_deviation".to_owned(),
                r.certificates.correlation_deviation,
            ),
            ("worst_certificate".to_owned(), r.certificates.worst()),
        ]),
        summary: format!(
            "dim A_SS {}, A_SA {}, C {}",
            r.a_ss.len(),
            r.a_sa.len(),
            r.c.len()
        ),
    })
}
