//! Standard channels, codes and interactions used by the demos and tests.
//!
//! Qubit `k` of an `n`-qubit register is the `k`-th tensor factor from the left.

use crate::channel::KrausChannel;
use crate::linalg::{self, pauli, r, Matrix, ONE};
use crate::opspace::{orthonormalize_span, OperatorSpan};
use crate::tol;

/// Qubit spontaneous emission: `E₀ = |0⟩⟨0|`, `E₁ = |0⟩⟨1|`.
pub fn spontaneous_emission() -> KrausChannel {
    KrausChannel::new(vec![linalg::unit(2, 0, 0), linalg::unit(2, 0, 1)]).expect("well formed")
}

/// Qutrit emission from `|2⟩` to `|0⟩`: elements `|0⟩⟨0| + |1⟩⟨1|` and `|0⟩⟨2|`.
pub fn qutrit_spontaneous_emission() -> KrausChannel {
    KrausChannel::new(vec![
        linalg::unit(3, 0, 0) + linalg::unit(3, 1, 1),
        linalg::unit(3, 0, 2),
    ])
    .expect("well formed")
}

/// Qutrit channel whose dual keeps the upper-left 2×2 block and writes the average of its
/// diagonal into the `|2⟩⟨2|` entry. The dual is idempotent.
pub fn qutrit_idempotent() -> KrausChannel {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    KrausChannel::new(vec![
        linalg::unit(3, 0, 0) + linalg::unit(3, 1, 1),
        linalg::unit(3, 0, 2).scale(h),
        linalg::unit(3, 1, 2).scale(h),
    ])
    .expect("well formed")
}

/// Closed form of [`qutrit_idempotent`]'s dual.
pub fn qutrit_idempotent_dual(x: &Matrix) -> Matrix {
    let mut out = linalg::zeros(3, 3);
    out.view_mut((0, 0), (2, 2))
        .copy_from(&x.view((0, 0), (2, 2)));
    out[(2, 2)] = (x[(0, 0)] + x[(1, 1)]) * 0.5;
    out
}

/// Qubit dephasing `{|0⟩⟨0|, |1⟩⟨1|}`.
pub fn dephasing() -> KrausChannel {
    KrausChannel::new(vec![linalg::unit(2, 0, 0), linalg::unit(2, 1, 1)]).expect("well formed")
}

/// Equal-weight mixture of unitary errors, Kraus elements `U_i / √k`.
pub fn uniform_unitary_mixture(ops: &[Matrix]) -> KrausChannel {
    let s = (ops.len() as f64).sqrt();
    KrausChannel::new(ops.iter().map(|u| u.unscale(s)).collect()).expect("nonempty")
}

/// `{1, Z₁, Z₂}` mixture on three qubits.
pub fn stabilizer_z1z2_channel() -> KrausChannel {
    uniform_unitary_mixture(&[linalg::identity(8), z(0), z(1)])
}

/// `{Z₁, Z₂, X₁X₂}` mixture on three qubits.
pub fn pauli_g_channel() -> KrausChannel {
    uniform_unitary_mixture(&pauli_g())
}

/// The error set `G = {Z₁, Z₂, X₁X₂}` on three qubits.
pub fn pauli_g() -> Vec<Matrix> {
    vec![z(0), z(1), x(0) * x(1)]
}

/// Joint eigenvalue-1 space of `Z₁, Z₂` on three qubits: `|00⟩⟨00| ⊗ 1`.
pub fn stabilizer_code() -> Matrix {
    (linalg::identity(8) + z(0)) * (linalg::identity(8) + z(1)) * r(0.25)
}

fn z(site: usize) -> Matrix {
    pauli::on(&pauli::z(), site, 3)
}

fn x(site: usize) -> Matrix {
    pauli::on(&pauli::x(), site, 3)
}

/// Single random bit flip on three qubits: Kraus `√p₀·1, √p₁X₁, √p₂X₂, √p₃X₃`.
pub fn bitflip3(p: &[f64; 4]) -> KrausChannel {
    let mut kraus = vec![linalg::identity(8).scale(p[0].sqrt())];
    for (i, &pi) in p[1..].iter().enumerate() {
        kraus.push(x(i).scale(pi.sqrt()));
    }
    KrausChannel::new(kraus).expect("well formed")
}

/// Repetition code projector `|000⟩⟨000| + |111⟩⟨111|`.
pub fn bitflip3_code() -> Matrix {
    linalg::unit(8, 0, 0) + linalg::unit(8, 7, 7)
}

/// Code algebra `span{|iii⟩⟨jjj|}`.
pub fn bitflip3_algebra() -> OperatorSpan {
    let units = [(0, 0), (0, 7), (7, 0), (7, 7)].map(|(i, j)| linalg::unit(8, i, j));
    orthonormalize_span(&units, tol::RANK).expect("nonempty")
}

/// Recovery with dual `R†(A) = PAP + Σᵢ XᵢPAPXᵢ`: Kraus `P, PX₁, PX₂, PX₃`.
pub fn bitflip3_closed_form_recovery() -> KrausChannel {
    let p = bitflip3_code();
    let mut kraus = vec![p.clone()];
    for i in 0..3 {
        kraus.push(&p * x(i));
    }
    KrausChannel::new(kraus).expect("well formed")
}

/// CNOT with the first (system) qubit as control.
pub fn cnot() -> Matrix {
    let mut m = linalg::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}

pub fn swap() -> Matrix {
    let mut m = linalg::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 3)] = ONE;
    m
}

pub fn hadamard() -> Matrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Matrix::from_row_slice(2, 2, &[r(h), r(h), r(h), r(-h)])
}

/// A hybrid quantum-classical code: `d` qubits labelled by a classical address.
#[derive(Clone, Debug)]
pub struct HybridCode {
    pub address_count: usize,
    pub channel: KrausChannel,
    /// `1₂ ⊗ 1_d ⊗ |0⟩⟨0|_flag`.
    pub projector: Matrix,
    /// `⊕ⱼ L(C²) ⊗ |j⟩⟨j|` on the code.
    pub algebra: OperatorSpan,
    /// `1₂ ⊗ |j⟩⟨j| ⊗ |0⟩⟨0|_flag`.
    pub address_projectors: Vec<Matrix>,
    /// Frame for address `j`: the isometry `C² → H`, `v ↦ v ⊗ |j⟩ ⊗ |0⟩`.
    pub address_frames: Vec<Matrix>,
}

/// Hybrid code on `qubit ⊗ address(d) ⊗ flag`. The noise either does nothing, applies an
/// address-dependent phase to the classical register, or applies an address-dependent
/// qubit unitary while flipping the flag qubit:
///
/// `E₀ = √0.5·1`, `E₁ = √0.3·(Σⱼ Uⱼ ⊗ |j⟩⟨j|) ⊗ X`, `E₂ = √0.2·(1 ⊗ D ⊗ 1)`
///
/// with `Uⱼ` cycling through `X, Y, Z, H` and `D = diag(e^{2πij/d})`.
pub fn hybrid_address(d: usize) -> HybridCode {
    assert!(d >= 1);
    let dim = 2 * d * 2;
    let qubit_ops = [pauli::x(), pauli::y(), pauli::z(), hadamard()];
    let flag0 = linalg::unit(2, 0, 0);

    let mut addressed = linalg::zeros(2 * d, 2 * d);
    for j in 0..d {
        addressed += linalg::kron(&qubit_ops[j % qubit_ops.len()], &linalg::unit(d, j, j));
    }
    let mut phase = linalg::zeros(d, d);
    for j in 0..d {
        let t = 2.0 * std::f64::consts::PI * j as f64 / d as f64;
        phase[(j, j)] = linalg::c(t.cos(), t.sin());
    }
    let channel = KrausChannel::new(vec![
        linalg::identity(dim).scale(0.5f64.sqrt()),
        linalg::kron(&addressed, &pauli::x()).scale(0.3f64.sqrt()),
        linalg::kron_all(&[linalg::identity(2), phase, linalg::identity(2)]).scale(0.2f64.sqrt()),
    ])
    .expect("well formed");

    let projector = linalg::kron_all(&[linalg::identity(2), linalg::identity(d), flag0.clone()]);
    let mut generators = Vec::new();
    let mut address_projectors = Vec::new();
    let mut address_frames = Vec::new();
    for j in 0..d {
        let addr = linalg::unit(d, j, j);
        for a in 0..2 {
            for b in 0..2 {
                generators.push(linalg::kron_all(&[
                    linalg::unit(2, a, b),
                    addr.clone(),
                    flag0.clone(),
                ]));
            }
        }
        address_projectors.push(linalg::kron_all(&[
            linalg::identity(2),
            addr,
            flag0.clone(),
        ]));
        address_frames.push(linalg::kron_all(&[
            linalg::identity(2),
            linalg::ket(d, j),
            linalg::ket(2, 0),
        ]));
    }
    let algebra = orthonormalize_span(&generators, tol::RANK).expect("nonempty");
    HybridCode {
        address_count: d,
        channel,
        projector,
        algebra,
        address_projectors,
        address_frames,
    }
}

/// `|+⟩⟨+|`.
pub fn plus_state() -> Matrix {
    Matrix::from_element(2, 2, r(0.5))
}
