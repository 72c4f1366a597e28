//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the libtest harness so
//! the lines are always printed; exits nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use oaqec::algebra::{self, wedderburn};
use oaqec::infoflow::{analyze_interaction, analyze_interaction_seeded};
use oaqec::linalg::{self, ket, unit, Matrix};
use oaqec::opspace::OperatorSpan;
use oaqec::qec::{self, CodeContext};
use oaqec::random::Sampler;
use oaqec::recovery::{self, synthesize_recovery};
use oaqec::{models, KrausChannel};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn stabilizer_commutant() -> Outcome {
    let start = Instant::now();
    let s = qec::largest_conserved(&models::stabilizer_z1z2_channel(), &linalg::identity(8))
        .map_err(err)?;
    let st = wedderburn(&s, 1e-9).map_err(err)?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(s.len() == 16, format!("dimension {} != 16", s.len()))?;
    ensure(
        st.shape() == vec![(2, 1); 4],
        format!("shape {:?}", st.shape()),
    )?;
    ensure(elapsed < 5.0, format!("runtime {elapsed:.2}s"))?;
    Ok(format!("dim 16, sectors {:?}, {elapsed:.3}s", st.shape()))
}

fn pauli_g_commutant() -> Outcome {
    let id = linalg::identity(8);
    let g = algebra::generate_algebra(&models::pauli_g(), 1e-9).map_err(err)?;
    let comm = algebra::commutant(&g, &id).map_err(err)?;
    let st = wedderburn(&comm, 1e-9).map_err(err)?;
    ensure(
        comm.len() == 8,
        format!("commutant dimension {}", comm.len()),
    )?;
    ensure(
        st.shape() == vec![(2, 2); 2],
        format!("shape {:?}", st.shape()),
    )?;

    let s_prime = qec::largest_conserved(&models::stabilizer_z1z2_channel(), &id).map_err(err)?;
    let ctx = CodeContext::new(models::pauli_g_channel(), id, s_prime, false).map_err(err)?;
    let v = qec::is_conserved(&ctx).map_err(err)?;
    ensure(!v.verdict, "S' unexpectedly conserved under G")?;

    let p = models::stabilizer_code();
    let a = OperatorSpan::full_on(&p).map_err(err)?;
    let ctx = CodeContext::new(models::pauli_g_channel(), p, a, false).map_err(err)?;
    let c = qec::is_correctable(&ctx).map_err(err)?;
    ensure(
        c.verdict,
        format!("code not correctable ({:.3e})", c.residual_commutator),
    )?;
    Ok(format!(
        "dim 8, sectors {:?}, S' residual {:.3e}, code residual {:.3e}",
        st.shape(),
        v.residual_commutator,
        c.residual_commutator
    ))
}

fn bitflip_code() -> Outcome {
    let start = Instant::now();
    let ch = models::bitflip3(&[0.55, 0.2, 0.15, 0.1]);
    let p = models::bitflip3_code();
    let a = models::bitflip3_algebra();
    let st = wedderburn(&a, 1e-9).map_err(err)?;
    let rep = synthesize_recovery(&ch, &p, &a, &st).map_err(err)?;
    let closed = models::bitflip3_closed_form_recovery();
    let mut agreement = 0.0_f64;
    for x in a.basis() {
        let ours = rep.recovery.apply_dual(x).map_err(err)?;
        let theirs = closed.apply_dual(x).map_err(err)?;
        agreement = agreement.max(linalg::op_norm(&(ours - theirs)));
    }
    let lifted = recovery::lift_operator_space(&ch, &rep.recovery, &a, &p).map_err(err)?;
    let all_states =
        recovery::verify_all_states(&ch, &rep.recovery, &lifted.span, 16, 0).map_err(err)?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(
        agreement <= 1e-9,
        format!("closed-form disagreement {agreement:.3e}"),
    )?;
    ensure(rep.heisenberg_residual <= 1e-9, "heisenberg residual")?;
    ensure(
        lifted.compression_residual <= 1e-8,
        format!("PVP != A ({:.3e})", lifted.compression_residual),
    )?;
    ensure(
        all_states <= 1e-8,
        format!("all-states residual {all_states:.3e}"),
    )?;
    ensure(elapsed < 5.0, format!("runtime {elapsed:.2}s"))?;
    Ok(format!(
        "closed form {agreement:.3e}, PVP=A {:.3e}, all states {all_states:.3e}, {elapsed:.3}s",
        lifted.compression_residual
    ))
}

fn spontaneous_emission() -> Outcome {
    let p = unit(2, 0, 0);
    let span_p =
        oaqec::opspace::orthonormalize_span(std::slice::from_ref(&p), 1e-9).map_err(err)?;
    let ctx = CodeContext::new(models::spontaneous_emission(), p, span_p, false).map_err(err)?;
    let v = qec::is_conserved(&ctx).map_err(err)?;
    let worst_qubit = v
        .residual_definition
        .unwrap_or(f64::INFINITY)
        .max(v.residual_commutator);
    ensure(
        v.verdict && worst_qubit <= 1e-12,
        format!("qubit residual {worst_qubit:.3e}"),
    )?;

    let q = models::qutrit_spontaneous_emission();
    let pq = unit(3, 0, 0) + unit(3, 1, 1);
    let ctx = CodeContext::new(
        q.clone(),
        pq.clone(),
        OperatorSpan::full_on(&pq).map_err(err)?,
        false,
    )
    .map_err(err)?;
    let v = qec::is_conserved(&ctx).map_err(err)?;
    let worst_qutrit = v
        .residual_definition
        .unwrap_or(f64::INFINITY)
        .max(v.residual_commutator);
    ensure(
        v.verdict && worst_qutrit <= 1e-12,
        format!("qutrit residual {worst_qutrit:.3e}"),
    )?;

    let mut rng = Sampler::new(4);
    let mut samples: Vec<Matrix> = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            samples.push(unit(3, i, j));
        }
    }
    for _ in 0..8 {
        let g = rng.ginibre(2, 2);
        let mut x = linalg::zeros(3, 3);
        x.view_mut((0, 0), (2, 2)).copy_from(&g);
        samples.push(x);
    }
    let mut entrywise = 0.0_f64;
    for x in &samples {
        let mut closed = x.clone();
        closed[(2, 2)] += x[(0, 0)];
        let dual = q.apply_dual(x).map_err(err)?;
        for (a, b) in dual.iter().zip(closed.iter()) {
            entrywise = entrywise.max((a - b).norm());
        }
    }
    ensure(
        entrywise <= 1e-12,
        format!("closed form entrywise {entrywise:.3e}"),
    )?;
    Ok(format!(
        "qubit {worst_qubit:.3e}, qutrit {worst_qutrit:.3e}, dual closed form {entrywise:.3e}"
    ))
}

fn hybrid_code() -> Outcome {
    let code = models::hybrid_address(3);
    let st = wedderburn(&code.algebra, 1e-9).map_err(err)?;
    let rep =
        synthesize_recovery(&code.channel, &code.projector, &code.algebra, &st).map_err(err)?;
    let schrodinger =
        recovery::verify_schrodinger(&code.channel, &rep.recovery, &st, 32, 0).map_err(err)?;
    let mut rng = Sampler::new(5);
    let mut exact = 0.0_f64;
    for _ in 0..32 {
        let weights = rng.probabilities(code.address_count);
        let mut rho = linalg::zeros(code.projector.nrows(), code.projector.ncols());
        for (frame, w) in code.address_frames.iter().zip(&weights) {
            let psi = frame * rng.pure_state(2);
            rho += linalg::outer(&psi) * linalg::r(*w);
        }
        let out = rep
            .recovery
            .apply_state(&code.channel.apply_state(&rho).map_err(err)?)
            .map_err(err)?;
        exact = exact.max(linalg::op_norm(&(out - &rho)));
    }
    ensure(
        schrodinger <= 1e-9,
        format!("schrodinger residual {schrodinger:.3e}"),
    )?;
    ensure(exact <= 1e-9, format!("recovery deviation {exact:.3e}"))?;
    Ok(format!(
        "schrodinger {schrodinger:.3e}, (R∘E)(ρ)=ρ deviation {exact:.3e}"
    ))
}

fn equivalence_suite() -> Outcome {
    let tol = 1e-8;
    let mut rng = Sampler::new(6);
    let mut conservation = 0;
    let mut conservation_bad = 0;
    let mut true_count = 0;
    for i in 0..200 {
        let inst = match i % 4 {
            0 | 1 => common::conserved(&mut rng),
            2 => {
                let base = common::conserved(&mut rng);
                common::perturb(base, 1e-2, &mut rng)
            }
            _ => common::generic(&mut rng, true),
        };
        let ctx =
            CodeContext::new(inst.channel, inst.projector, inst.algebra, false).map_err(err)?;
        let v = qec::is_conserved(&ctx).map_err(err)?;
        let def = v.residual_definition.unwrap_or(f64::INFINITY) <= tol;
        let com = v.residual_commutator <= tol;
        conservation += 1;
        if def != com || (inst.expected && !com) {
            conservation_bad += 1;
        }
        true_count += com as usize;
    }

    let mut correctability = 0;
    let mut correctability_bad = 0;
    let mut correctable_count = 0;
    for i in 0..200 {
        let inst = match i % 4 {
            0 | 1 => common::correctable(&mut rng),
            2 => {
                let base = common::correctable(&mut rng);
                common::perturb(base, 1e-2, &mut rng)
            }
            _ => common::generic(&mut rng, false),
        };
        let ctx = CodeContext::new(
            inst.channel.clone(),
            inst.projector.clone(),
            inst.algebra.clone(),
            false,
        )
        .map_err(err)?;
        let verdict = qec::is_correctable(&ctx).map_err(err)?.verdict;
        let synthesized = wedderburn(&inst.algebra, 1e-9)
            .and_then(|st| synthesize_recovery(&inst.channel, &inst.projector, &inst.algebra, &st))
            .map(|r| r.heisenberg_residual <= tol)
            .unwrap_or(false);
        correctability += 1;
        if verdict != synthesized || (inst.expected && !verdict) {
            correctability_bad += 1;
        }
        correctable_count += verdict as usize;
    }
    ensure(
        conservation_bad == 0 && correctability_bad == 0,
        format!(
            "disagreements: conservation {conservation_bad}/{conservation}, correctability {correctability_bad}/{correctability}"
        ),
    )?;
    Ok(format!(
        "{conservation} conservation instances ({true_count} conserved), {correctability} correctability instances ({correctable_count} correctable), 0 disagreements"
    ))
}

fn remix_suite() -> Outcome {
    let mut rng = Sampler::new(7);
    let mut worst = 0.0_f64;
    let count = 60;
    for _ in 0..count {
        let inst = common::correctable(&mut rng);
        let st = wedderburn(&inst.algebra, 1e-9).map_err(err)?;
        let rep =
            synthesize_recovery(&inst.channel, &inst.projector, &inst.algebra, &st).map_err(err)?;
        let mix = rng.unitary(inst.channel.len());
        let remixed = inst.channel.remix(&mix).map_err(err)?;
        let r =
            recovery::verify_heisenberg(&remixed, &rep.recovery, &inst.projector, &inst.algebra)
                .map_err(err)?;
        worst = worst.max(r);
    }
    ensure(worst <= 1e-8, format!("worst residual {worst:.3e}"))?;
    Ok(format!("{count} instances, worst residual {worst:.3e}"))
}

fn infoflow_suite() -> Outcome {
    let mut rng = Sampler::new(8);
    let mut cases: Vec<(String, Matrix)> = vec![
        ("cnot".into(), models::cnot()),
        ("swap".into(), models::swap()),
        ("identity".into(), linalg::identity(4)),
    ];
    for i in 0..20 {
        cases.push((format!("haar-{i}"), rng.unitary(4)));
    }
    for i in 0..10 {
        cases.push((
            format!("controlled-{i}"),
            common::controlled_unitary(&mut rng),
        ));
    }
    let mut commutativity = 0.0_f64;
    let mut crosscheck = 0.0_f64;
    let mut correlation = 0.0_f64;
    let mut nontrivial = 0;
    for (name, u) in &cases {
        let r = analyze_interaction(u, &ket(2, 0)).map_err(|e| format!("{name}: {e}"))?;
        commutativity = commutativity.max(r.certificates.c_commutativity);
        crosscheck = crosscheck.max(r.certificates.a_sa_crosscheck);
        correlation = correlation.max(r.certificates.correlation_deviation);
        nontrivial += r.has_duplicated_observable() as usize;
    }
    let seeded = analyze_interaction_seeded(&models::cnot(), &ket(2, 0), 99).map_err(err)?;
    correlation = correlation.max(seeded.certificates.correlation_deviation);
    ensure(
        commutativity <= 1e-8,
        format!("commutativity {commutativity:.3e}"),
    )?;
    ensure(
        crosscheck <= 1e-8,
        format!("A_SA cross-check {crosscheck:.3e}"),
    )?;
    ensure(
        correlation <= 1e-8,
        format!("correlation deviation {correlation:.3e}"),
    )?;
    Ok(format!(
        "{} interactions ({nontrivial} with duplicated observables), commutativity {commutativity:.3e}, A_SA {crosscheck:.3e}, correlation {correlation:.3e}",
        cases.len()
    ))
}

fn lemma_suite() -> Outcome {
    let mut rng = Sampler::new(9);
    let count = 120;
    let mut worst = 0.0_f64;
    for _ in 0..count {
        let d_in = 1 + rng.index(3);
        let d_out = common::MAX_DIM;
        let k = 1 + rng.index(common::MAX_KRAUS);
        // Rank-deficient elements leave a nontrivial common kernel for their adjoints.
        let rank = 1 + rng.index(d_in);
        let kraus: Vec<Matrix> = (0..k)
            .map(|_| rng.ginibre(d_out, rank) * rng.ginibre(rank, d_in))
            .collect();
        let map = KrausChannel::new(kraus.clone()).map_err(err)?;
        let mut s = linalg::zeros(d_out, d_out);
        for f in &kraus {
            s += f * f.adjoint();
        }
        let (values, vectors) = linalg::eigh(&s);
        let top = values.last().copied().unwrap_or(0.0);
        let kernel: Vec<usize> = (0..d_out).filter(|&i| values[i] <= 1e-10 * top).collect();
        if kernel.is_empty() {
            continue;
        }
        let mut w = linalg::zeros(d_out, kernel.len());
        for (dst, &src) in kernel.iter().enumerate() {
            w.set_column(dst, &vectors.column(src));
        }
        let a = &w * rng.positive(kernel.len()) * w.adjoint();
        let a = a.unscale(linalg::op_norm(&a));
        let image = map.apply_dual(&a).map_err(err)?;
        ensure(
            linalg::op_norm(&image) <= 1e-8,
            "constructed A not annihilated",
        )?;
        for f in &kraus {
            worst = worst.max(linalg::op_norm(&(&a * f)) / linalg::op_norm(f).max(1.0));
        }
    }
    ensure(worst <= 1e-8, format!("worst ‖A F_a‖ {worst:.3e}"))?;
    Ok(format!("{count} instances, worst ‖A F_a‖ {worst:.3e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("stabilizer commutant", stabilizer_commutant),
        ("pauli-G commutant", pauli_g_commutant),
        ("bit-flip code", bitflip_code),
        ("spontaneous emission", spontaneous_emission),
        ("hybrid address code", hybrid_code),
        ("verdict equivalence", equivalence_suite),
        ("kraus remix robustness", remix_suite),
        ("information flow", infoflow_suite),
        ("kernel lemma", lemma_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
