//! Completely positive maps in Kraus form, their Heisenberg duals and dilations.

use crate::error::{check_shape, check_square, Error, Result};
use crate::linalg::{self, Matrix};
use crate::tol;

/// A completely positive map `ρ ↦ Σ_a E_a ρ E_a†` with `dim_out × dim_in` Kraus elements.
///
/// Trace preservation is recorded, not enforced: trace-decreasing maps are valid values.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<Matrix>,
    tp_defect: f64,
}

/// Outcome of [`KrausChannel::validate_tp`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TpReport {
    pub trace_preserving: bool,
    /// `‖Σ E_a†E_a − 1‖`, equivalently `‖E†(1) − 1‖`.
    pub tp_defect: f64,
    /// `‖Σ E_a E_a† − 1‖` for square channels: unitality of the Schrödinger map.
    pub unital_defect: Option<f64>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<Matrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::Empty("Kraus list"))?;
        let (dim_out, dim_in) = first.shape();
        for k in &kraus {
            check_shape(k, dim_out, dim_in, "Kraus element")?;
            if !linalg::is_finite(k) {
                return Err(Error::NonFinite("Kraus element"));
            }
        }
        let tp_defect = Self::defect(&kraus, dim_in);
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
            tp_defect,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(vec![linalg::identity(dim)]).expect("identity is well formed")
    }

    /// Single-element channel `ρ ↦ UρU†`.
    pub fn unitary(u: Matrix) -> Self {
        Self::new(vec![u]).expect("single element")
    }

    fn defect(kraus: &[Matrix], dim_in: usize) -> f64 {
        let mut sum = linalg::zeros(dim_in, dim_in);
        for k in kraus {
            sum += k.adjoint() * k;
        }
        linalg::op_norm(&(sum - linalg::identity(dim_in)))
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[Matrix] {
        &self.kraus
    }

    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    pub fn tp_defect(&self) -> f64 {
        self.tp_defect
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.tp_defect <= tol::TP
    }

    pub fn validate_tp(&self) -> TpReport {
        let unital_defect = (self.dim_in == self.dim_out).then(|| {
            let mut sum = linalg::zeros(self.dim_out, self.dim_out);
            for k in &self.kraus {
                sum += k * k.adjoint();
            }
            linalg::op_norm(&(sum - linalg::identity(self.dim_out)))
        });
        TpReport {
            trace_preserving: self.is_trace_preserving(),
            tp_defect: self.tp_defect,
            unital_defect,
        }
    }

    /// Schrödinger action `Σ E_a ρ E_a†`.
    pub fn apply_state(&self, rho: &Matrix) -> Result<Matrix> {
        check_shape(rho, self.dim_in, self.dim_in, "apply_state")?;
        Ok(self.apply_state_unchecked(rho))
    }

    pub(crate) fn apply_state_unchecked(&self, rho: &Matrix) -> Matrix {
        let mut out = linalg::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        out
    }

    /// Heisenberg action `Σ E_a† X E_a`.
    pub fn apply_dual(&self, x: &Matrix) -> Result<Matrix> {
        check_shape(x, self.dim_out, self.dim_out, "apply_dual")?;
        Ok(self.apply_dual_unchecked(x))
    }

    pub(crate) fn apply_dual_unchecked(&self, x: &Matrix) -> Matrix {
        let mut out = linalg::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out += k.adjoint() * x * k;
        }
        out
    }

    /// Kraus elements `{E_a†}` of the dual map.
    pub fn dual(&self) -> KrausChannel {
        KrausChannel::new(self.kraus.iter().map(|k| k.adjoint()).collect())
            .expect("adjoints share a shape")
    }

    /// `outer ∘ inner`, with Kraus elements `{R_a E_b}` ordered with `b` fastest.
    pub fn compose(outer: &KrausChannel, inner: &KrausChannel) -> Result<KrausChannel> {
        if inner.dim_out != outer.dim_in {
            return Err(Error::DimensionMismatch {
                context: "compose",
                expected: format!("outer input dimension {}", inner.dim_out),
                found: outer.dim_in.to_string(),
            });
        }
        let mut kraus = Vec::with_capacity(outer.len() * inner.len());
        for r in &outer.kraus {
            for e in &inner.kraus {
                kraus.push(r * e);
            }
        }
        KrausChannel::new(kraus)
    }

    /// Kraus elements `E'_a = Σ_b u_ab E_b`; the map is unchanged when `u` is unitary.
    pub fn remix(&self, u: &Matrix) -> Result<KrausChannel> {
        check_shape(u, self.len(), self.len(), "remix")?;
        let kraus = (0..self.len())
            .map(|a| {
                let mut e = linalg::zeros(self.dim_out, self.dim_in);
                for (b, k) in self.kraus.iter().enumerate() {
                    e += k * u[(a, b)];
                }
                e
            })
            .collect();
        KrausChannel::new(kraus)
    }

    /// Drops elements with norm at or below `1e-12` and orthogonalizes the rest so that
    /// `Tr(E_a†E_b) ∝ δ_ab`. The map is unchanged.
    pub fn normal_form(&self) -> KrausChannel {
        let kept: Vec<&Matrix> = self
            .kraus
            .iter()
            .filter(|k| k.norm() > tol::ZERO_KRAUS)
            .collect();
        if kept.is_empty() {
            return KrausChannel::new(vec![linalg::zeros(self.dim_out, self.dim_in)])
                .expect("single element");
        }
        let n = kept.len();
        let gram = Matrix::from_fn(n, n, |a, b| {
            kept[a]
                .iter()
                .zip(kept[b].iter())
                .map(|(x, y)| x.conj() * y)
                .sum()
        });
        let (values, vectors) = linalg::eigh(&gram);
        let vmax = values.iter().cloned().fold(0.0, f64::max);
        let mut kraus = Vec::new();
        for i in (0..n).rev() {
            if values[i] <= (tol::ZERO_KRAUS * tol::ZERO_KRAUS).max(1e-15 * vmax) {
                continue;
            }
            let mut e = linalg::zeros(self.dim_out, self.dim_in);
            for (a, k) in kept.iter().enumerate() {
                e += *k * vectors[(a, i)];
            }
            kraus.push(e);
        }
        KrausChannel::new(kraus).expect("nonempty after filtering")
    }

    /// Complementary channel `ρ ↦ Σ_{a} F_a ρ F_a†` into an environment indexed by Kraus
    /// order, with `F_a = Σ_b |b⟩⟨a| E_b` for `a` running over the output basis.
    pub fn complementary(&self) -> Result<KrausChannel> {
        if !self.is_trace_preserving() {
            return Err(Error::NotTracePreserving {
                defect: self.tp_defect,
            });
        }
        let env = self.len();
        let kraus = (0..self.dim_out)
            .map(|a| {
                let mut f = linalg::zeros(env, self.dim_in);
                for (b, e) in self.kraus.iter().enumerate() {
                    f.row_mut(b).copy_from(&e.row(a));
                }
                f
            })
            .collect();
        KrausChannel::new(kraus)
    }

    /// Overlap data `F_a†F_b` for all ordered pairs, flattened with `b` fastest.
    /// It determines the channel up to a unitary on the output space.
    pub fn overlaps(&self) -> Vec<Matrix> {
        let mut out = Vec::with_capacity(self.len() * self.len());
        for a in &self.kraus {
            for b in &self.kraus {
                out.push(a.adjoint() * b);
            }
        }
        out
    }

    /// Operator-norm distance between the actions of two channels on the matrix-unit basis.
    pub fn action_distance(&self, other: &KrausChannel) -> Result<f64> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(Error::DimensionMismatch {
                context: "action_distance",
                expected: format!("{}->{}", self.dim_in, self.dim_out),
                found: format!("{}->{}", other.dim_in, other.dim_out),
            });
        }
        let mut worst = 0.0_f64;
        for i in 0..self.dim_in {
            for j in 0..self.dim_in {
                let e = linalg::unit(self.dim_in, i, j);
                let d = self.apply_state_unchecked(&e) - other.apply_state_unchecked(&e);
                worst = worst.max(linalg::op_norm(&d));
            }
        }
        Ok(worst)
    }
}

/// Isometry `V: H_S → H_S ⊗ H_A`.
#[derive(Clone, Debug)]
pub struct Isometry {
    matrix: Matrix,
    d_s: usize,
    d_a: usize,
}

impl Isometry {
    pub fn new(matrix: Matrix, d_s: usize, d_a: usize) -> Result<Self> {
        check_shape(&matrix, d_s * d_a, d_s, "isometry")?;
        let defect = linalg::isometry_defect(&matrix);
        if defect > tol::TP {
            return Err(Error::NotIsometry { defect });
        }
        Ok(Self { matrix, d_s, d_a })
    }

    /// `V|ψ⟩ = U(|ψ⟩ ⊗ |ψ_A⟩)`.
    pub fn from_unitary(u: &Matrix, psi_a: &Matrix) -> Result<Self> {
        let d = check_square(u, "interaction unitary")?;
        if psi_a.ncols() != 1 || psi_a.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                context: "apparatus state",
                expected: "column vector".into(),
                found: format!("{}x{}", psi_a.nrows(), psi_a.ncols()),
            });
        }
        let d_a = psi_a.nrows();
        if d % d_a != 0 {
            return Err(Error::DimensionMismatch {
                context: "interaction unitary",
                expected: format!("multiple of apparatus dimension {d_a}"),
                found: d.to_string(),
            });
        }
        let defect = linalg::isometry_defect(u);
        if defect > tol::TP {
            return Err(Error::NotUnitary { defect });
        }
        let norm = psi_a.norm();
        if (norm - 1.0).abs() > tol::TP {
            return Err(Error::NotNormalized { norm });
        }
        let d_s = d / d_a;
        let embed = linalg::kron(&linalg::identity(d_s), psi_a);
        Self::new(u * embed, d_s, d_a)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    /// `(E_SS, E_SA)`: trace over the apparatus and over the system respectively.
    ///
    /// `E_SS` has Kraus elements `(1 ⊗ ⟨a|)V` and `E_SA` has `(⟨s| ⊗ 1)V`.
    pub fn marginal_channels(&self) -> (KrausChannel, KrausChannel) {
        let id_s = linalg::identity(self.d_s);
        let id_a = linalg::identity(self.d_a);
        let ss = (0..self.d_a)
            .map(|a| linalg::kron(&id_s, &linalg::ket(self.d_a, a).adjoint()) * &self.matrix)
            .collect();
        let sa = (0..self.d_s)
            .map(|s| linalg::kron(&linalg::ket(self.d_s, s).adjoint(), &id_a) * &self.matrix)
            .collect();
        (
            KrausChannel::new(ss).expect("equal shapes"),
            KrausChannel::new(sa).expect("equal shapes"),
        )
    }

    /// `V†(X ⊗ 1)V`.
    pub fn system_dual(&self, x: &Matrix) -> Matrix {
        let lifted = linalg::kron(x, &linalg::identity(self.d_a));
        self.matrix.adjoint() * lifted * &self.matrix
    }

    /// `V†(1 ⊗ Y)V`.
    pub fn apparatus_dual(&self, y: &Matrix) -> Matrix {
        let lifted = linalg::kron(&linalg::identity(self.d_s), y);
        self.matrix.adjoint() * lifted * &self.matrix
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{r, unit};
    use crate::models;
    use crate::random::Sampler;

    fn close(a: &Matrix, b: &Matrix, eps: f64) -> bool {
        (a - b).norm() <= eps
    }

    #[test]
    fn validate_tp_examples() {
        let se = models::spontaneous_emission();
        let rep = se.validate_tp();
        assert!(rep.trace_preserving);
        assert!(rep.tp_defect < 1e-15);
        // E(1) = 2|0><0| is not the identity.
        assert!((rep.unital_defect.unwrap() - 1.0).abs() < 1e-12);

        let half = KrausChannel::new(vec![linalg::identity(2).unscale(2f64.sqrt())]).unwrap();
        let rep = half.validate_tp();
        assert!(!rep.trace_preserving);
        assert!((rep.tp_defect - 0.5).abs() < 1e-12);

        let bf = models::bitflip3(&[0.7, 0.1, 0.1, 0.1]);
        assert!(bf.validate_tp().trace_preserving);
    }

    #[test]
    fn spontaneous_emission_resets() {
        let se = models::spontaneous_emission();
        let mut s = Sampler::new(4);
        let rho = s.density(2, 2);
        let out = se.apply_state(&rho).unwrap();
        assert!(close(&out, &unit(2, 0, 0), 1e-12));
    }

    #[test]
    fn identity_and_dimension_errors() {
        let id = KrausChannel::identity(3);
        let rho = Sampler::new(5).density(3, 2);
        assert!(close(&id.apply_state(&rho).unwrap(), &rho, 0.0));
        assert!(id.apply_state(&linalg::identity(2)).is_err());
        assert!(id.apply_dual(&linalg::identity(2)).is_err());
    }

    #[test]
    fn bitflip_on_basis_state() {
        let p = [0.4, 0.3, 0.2, 0.1];
        let bf = models::bitflip3(&p);
        let rho = unit(8, 0, 0);
        // Oracle: direct expansion, flip strings 100, 010, 001 (qubit 1 is the leftmost factor).
        let expected = unit(8, 0, 0) * r(p[0])
            + unit(8, 4, 4) * r(p[1])
            + unit(8, 2, 2) * r(p[2])
            + unit(8, 1, 1) * r(p[3]);
        assert!(close(&bf.apply_state(&rho).unwrap(), &expected, 1e-12));
    }

    #[test]
    fn dual_examples() {
        let q = models::qutrit_spontaneous_emission();
        let mut s = Sampler::new(6);
        let mut x = linalg::zeros(3, 3);
        x.view_mut((0, 0), (2, 2)).copy_from(&s.ginibre(2, 2));
        let mut expected = x.clone();
        expected[(2, 2)] = x[(0, 0)];
        assert!(close(&q.apply_dual(&x).unwrap(), &expected, 1e-12));

        let ch = s.channel(3, 3, 3);
        assert!(close(
            &ch.apply_dual(&linalg::identity(3)).unwrap(),
            &linalg::identity(3),
            1e-12
        ));

        let deph = models::dephasing();
        let y = s.ginibre(2, 2);
        let mut diag = linalg::zeros(2, 2);
        diag[(0, 0)] = y[(0, 0)];
        diag[(1, 1)] = y[(1, 1)];
        assert!(close(&deph.apply_dual(&y).unwrap(), &diag, 1e-14));
    }

    #[test]
    fn composition() {
        let mut s = Sampler::new(7);
        let e = s.channel(3, 3, 2);
        let id = KrausChannel::identity(3);
        assert!(
            KrausChannel::compose(&id, &e)
                .unwrap()
                .action_distance(&e)
                .unwrap()
                < 1e-12
        );

        let rch = s.channel(3, 2, 3);
        let both = KrausChannel::compose(&rch, &e).unwrap();
        let x = s.ginibre(2, 2);
        let lhs = both.apply_dual(&x).unwrap();
        let rhs = e.apply_dual(&rch.apply_dual(&x).unwrap()).unwrap();
        assert!(close(&lhs, &rhs, 1e-10));
        assert!(KrausChannel::compose(&e, &rch).is_err());
    }

    #[test]
    fn cnot_isometry() {
        let v = Isometry::from_unitary(&models::cnot(), &linalg::ket(2, 0)).unwrap();
        let mut s = Sampler::new(8);
        let psi = s.pure_state(2);
        let out = v.matrix() * &psi;
        let mut expected = linalg::zeros(4, 1);
        expected[(0, 0)] = psi[(0, 0)];
        expected[(3, 0)] = psi[(1, 0)];
        assert!(close(&out, &expected, 1e-14));

        let (ess, _) = v.marginal_channels();
        assert!(ess.action_distance(&models::dephasing()).unwrap() < 1e-14);
    }

    #[test]
    fn isometry_errors() {
        let bad = linalg::identity(4).scale(2.0);
        assert!(matches!(
            Isometry::from_unitary(&bad, &linalg::ket(2, 0)),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!(
            Isometry::from_unitary(&linalg::identity(4), &linalg::ket(2, 0).scale(2.0)),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn identity_and_swap_marginals() {
        let psi = Sampler::new(9).pure_state(2);
        let v = Isometry::from_unitary(&linalg::identity(4), &psi).unwrap();
        assert!(linalg::isometry_defect(v.matrix()) < 1e-12);
        let (ess, esa) = v.marginal_channels();
        assert!(ess.action_distance(&KrausChannel::identity(2)).unwrap() < 1e-12);
        let rho = Sampler::new(10).density(2, 2);
        assert!(close(
            &esa.apply_state(&rho).unwrap(),
            &linalg::outer(&psi),
            1e-12
        ));

        let v = Isometry::from_unitary(&models::swap(), &psi).unwrap();
        let (ess, esa) = v.marginal_channels();
        assert!(close(
            &ess.apply_state(&rho).unwrap(),
            &linalg::outer(&psi),
            1e-12
        ));
        assert!(close(&esa.apply_state(&rho).unwrap(), &rho, 1e-12));
    }

    #[test]
    fn marginal_duals_match_isometry_form() {
        let mut s = Sampler::new(12);
        let u = s.unitary(6);
        let psi = s.pure_state(3);
        let v = Isometry::from_unitary(&u, &psi).unwrap();
        let (ess, esa) = v.marginal_channels();
        assert!(ess.is_trace_preserving() && esa.is_trace_preserving());
        for i in 0..2 {
            for j in 0..2 {
                let e = unit(2, i, j);
                assert!(close(
                    &ess.apply_dual(&e).unwrap(),
                    &v.system_dual(&e),
                    1e-9
                ));
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let e = unit(3, i, j);
                assert!(close(
                    &esa.apply_dual(&e).unwrap(),
                    &v.apparatus_dual(&e),
                    1e-9
                ));
            }
        }
    }

    #[test]
    fn complementary_examples() {
        let comp = KrausChannel::identity(2).complementary().unwrap();
        assert_eq!(comp.dim_out(), 1);
        let rho = Sampler::new(13).density(2, 2);
        assert!((comp.apply_state(&rho).unwrap()[(0, 0)].re - 1.0).abs() < 1e-12);

        let deph = models::dephasing();
        let comp = deph.complementary().unwrap();
        let overlaps = comp.overlaps();
        for a in 0..2 {
            for b in 0..2 {
                let expected = if a == b {
                    unit(2, a, a)
                } else {
                    linalg::zeros(2, 2)
                };
                assert!(close(&overlaps[a * 2 + b], &expected, 1e-14));
            }
        }

        let half = KrausChannel::new(vec![linalg::identity(2).scale(0.5)]).unwrap();
        assert!(matches!(
            half.complementary(),
            Err(Error::NotTracePreserving { .. })
        ));
    }

    #[test]
    fn complementary_overlaps_are_dual_of_units() {
        let mut s = Sampler::new(14);
        let e = s.channel(3, 2, 4);
        let f = e.complementary().unwrap();
        let overlaps = f.overlaps();
        for a in 0..2 {
            for b in 0..2 {
                let dual = e.apply_dual(&unit(2, a, b)).unwrap();
                assert!(close(&overlaps[a * 2 + b], &dual, 1e-9));
            }
        }
    }

    #[test]
    fn complementary_of_marginal_matches_other_marginal() {
        let mut s = Sampler::new(15);
        let v = Isometry::from_unitary(&s.unitary(4), &s.pure_state(2)).unwrap();
        let (ess, esa) = v.marginal_channels();
        let comp = ess.complementary().unwrap();
        for (x, y) in comp.overlaps().iter().zip(esa.overlaps()) {
            assert!(close(x, &y, 1e-9));
        }
    }

    #[test]
    fn normal_form_preserves_action() {
        let mut s = Sampler::new(16);
        let e = s.channel(2, 2, 2);
        let mut kraus = e.kraus().to_vec();
        kraus.push(linalg::zeros(2, 2));
        kraus.push(e.kraus()[0].clone());
        let redundant = KrausChannel::new(kraus).unwrap();
        let nf = redundant.normal_form();
        assert!(nf.len() <= 4);
        assert!(nf.action_distance(&redundant).unwrap() < 1e-12);
        let g = nf.overlaps();
        for a in 0..nf.len() {
            for b in 0..nf.len() {
                if a != b {
                    assert!(g[a * nf.len() + b].trace().norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn kraus_shape_errors() {
        assert!(KrausChannel::new(vec![]).is_err());
        assert!(KrausChannel::new(vec![linalg::identity(2), linalg::identity(3)]).is_err());
    }
}
