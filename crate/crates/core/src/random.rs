//! Seeded generators for random matrices, states and channels.
//!
//! All sampling goes through [`Sampler`], a ChaCha stream keyed by an explicit seed, so every
//! randomized computation in the crate is reproducible.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::KrausChannel;
use crate::linalg::{self, c, Matrix};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn index(&mut self, upper: usize) -> usize {
        self.rng.random_range(0..upper)
    }

    /// Real Gaussian coefficients.
    pub fn coefficients(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    /// Complex Gaussian matrix with i.i.d. standard normal real and imaginary parts.
    pub fn ginibre(&mut self, rows: usize, cols: usize) -> Matrix {
        DMatrix::from_fn(rows, cols, |_, _| c(self.normal(), self.normal()))
    }

    pub fn hermitian(&mut self, dim: usize) -> Matrix {
        linalg::hermitian_part(&self.ginibre(dim, dim))
    }

    /// Haar-distributed unitary (QR of a Ginibre matrix with the phase of `R`'s diagonal fixed).
    pub fn unitary(&mut self, dim: usize) -> Matrix {
        let g = self.ginibre(dim, dim);
        let qr = g.qr();
        let mut q = qr.q();
        let rr = qr.r();
        for j in 0..dim {
            let d = rr[(j, j)];
            let phase = if d.norm() > 0.0 {
                d / d.norm()
            } else {
                linalg::ONE
            };
            let scaled = q.column(j) * phase;
            q.set_column(j, &scaled);
        }
        q
    }

    /// Haar-random unit vector as a column matrix.
    pub fn pure_state(&mut self, dim: usize) -> Matrix {
        let v = self.ginibre(dim, 1);
        let n = v.norm();
        v.unscale(n)
    }

    /// Random density matrix of the given rank (Ginibre ensemble).
    pub fn density(&mut self, dim: usize, rank: usize) -> Matrix {
        let g = self.ginibre(dim, rank.max(1));
        let rho = &g * g.adjoint();
        let t = rho.trace().re;
        rho.unscale(t)
    }

    /// Random density matrix supported on the range of an isometry `w` (`d × r`).
    pub fn density_on(&mut self, w: &Matrix) -> Matrix {
        let inner = self.density(w.ncols(), w.ncols());
        w * inner * w.adjoint()
    }

    /// Random positive semidefinite matrix.
    pub fn positive(&mut self, dim: usize) -> Matrix {
        let g = self.ginibre(dim, dim);
        &g * g.adjoint()
    }

    /// Random trace-preserving channel with `count` Kraus elements, cut from a Haar-like
    /// isometry `C^{d_in} → C^{count} ⊗ C^{d_out}`.
    pub fn channel(&mut self, d_in: usize, d_out: usize, count: usize) -> KrausChannel {
        let g = self.ginibre(count * d_out, d_in);
        let v = g.qr().q();
        let kraus = (0..count)
            .map(|a| v.rows(a * d_out, d_out).into_owned())
            .collect();
        KrausChannel::new(kraus).expect("nonempty equal-shape Kraus list")
    }

    /// Probability vector drawn uniformly from the simplex.
    pub fn probabilities(&mut self, n: usize) -> Vec<f64> {
        let e: Vec<f64> = (0..n).map(|_| -self.uniform().max(1e-300).ln()).collect();
        let s: f64 = e.iter().sum();
        e.into_iter().map(|x| x / s).collect()
    }
}
