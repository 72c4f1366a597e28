//! Instance generators shared by the integration tests.
//!
//! Every generator builds its instance from the block form it is supposed to have, so the
//! expected verdict is known independently of the code under test.

#![allow(dead_code)]

use oaqec::linalg::{self, Matrix};
use oaqec::opspace::{orthonormalize_span, OperatorSpan};
use oaqec::random::Sampler;
use oaqec::KrausChannel;

pub const MAX_DIM: usize = 8;
pub const MAX_KRAUS: usize = 4;

/// A channel, a code projector and an algebra on the code, with the expected verdict.
pub struct Instance {
    pub channel: KrausChannel,
    pub projector: Matrix,
    pub algebra: OperatorSpan,
    pub expected: bool,
    /// `(n_k, m_k)` of the algebra's sectors when known.
    pub shape: Vec<(usize, usize)>,
}

/// `N × extra` orthonormal columns orthogonal to the orthonormal columns of `image`.
pub fn completion(image: &Matrix, extra: usize, rng: &mut Sampler) -> Matrix {
    let n = image.nrows();
    let mut g = rng.ginibre(n, extra);
    if image.ncols() > 0 {
        g -= image * (image.adjoint() * &g);
    }
    let q = g.qr().q();
    q.columns(0, extra).into_owned()
}

/// Splits the stacked `K·d_out × d_in` isometry into Kraus elements.
fn unstack(v: &Matrix, count: usize, d_out: usize) -> KrausChannel {
    let kraus = (0..count)
        .map(|a| v.rows(a * d_out, d_out).into_owned())
        .collect();
    KrausChannel::new(kraus).expect("nonempty")
}

/// Stacked isometry of a channel.
fn stack(kraus: &[Matrix]) -> Matrix {
    let d_out = kraus[0].nrows();
    let mut v = linalg::zeros(kraus.len() * d_out, kraus[0].ncols());
    for (a, k) in kraus.iter().enumerate() {
        v.rows_mut(a * d_out, d_out).copy_from(k);
    }
    v
}

struct Layout {
    /// `(n, m, m_out)` per sector.
    sectors: Vec<(usize, usize, usize)>,
    /// Code dimensions outside the algebra's unit, and their output multiplicity.
    extra: (usize, usize),
    rest: usize,
    kraus: usize,
    d_out: usize,
}

impl Layout {
    fn code_dim(&self) -> usize {
        self.sectors.iter().map(|s| s.0 * s.1).sum::<usize>() + self.extra.0
    }

    fn d_in(&self) -> usize {
        self.code_dim() + self.rest
    }

    fn image_dim(&self) -> usize {
        self.sectors.iter().map(|s| s.0 * s.2).sum::<usize>() + self.extra.1
    }
}

fn pick(rng: &mut Sampler, lo: usize, hi: usize) -> usize {
    lo + rng.index(hi - lo + 1)
}

fn random_layout(rng: &mut Sampler, square: bool) -> Layout {
    loop {
        let count = pick(rng, 1, 2);
        let sectors: Vec<(usize, usize, usize)> = (0..count)
            .map(|_| {
                let m = pick(rng, 1, 2);
                let m_out = if square { m } else { pick(rng, 1, 2) };
                (pick(rng, 1, 2), m, m_out)
            })
            .collect();
        let extra_in = if rng.uniform() < 0.3 { 1 } else { 0 };
        let extra = (extra_in, extra_in);
        let kraus = pick(rng, 1, MAX_KRAUS);
        let mut layout = Layout {
            sectors,
            extra,
            rest: 0,
            kraus,
            d_out: 0,
        };
        let code = layout.code_dim();
        if code > MAX_DIM || layout.image_dim() > MAX_DIM {
            continue;
        }
        if layout.sectors.iter().any(|s| kraus * s.2 < s.1) {
            continue;
        }
        layout.rest = pick(rng, 0, MAX_DIM - code);
        layout.d_out = if square {
            layout.d_in()
        } else {
            pick(rng, layout.image_dim(), MAX_DIM)
        };
        if layout.d_out * kraus < layout.d_in() {
            continue;
        }
        return layout;
    }
}

fn sector_algebra(frames: &[(Matrix, usize, usize)], dim: usize) -> OperatorSpan {
    let mut gens = Vec::new();
    for (f, n, m) in frames {
        for i in 0..*n {
            for j in 0..*n {
                let x = linalg::kron(&linalg::unit(*n, i, j), &linalg::identity(*m));
                gens.push(f * x * f.adjoint());
            }
        }
    }
    if gens.is_empty() {
        return OperatorSpan::zero(dim);
    }
    orthonormalize_span(&gens, 1e-9).expect("nonempty")
}

/// Correctable by construction: on sector `k` every Kraus element acts as
/// `J_k (1_n ⊗ B^k_a) F_k†` with mutually orthogonal output isometries `J_k`.
pub fn correctable(rng: &mut Sampler) -> Instance {
    let layout = random_layout(rng, false);
    let d_in = layout.d_in();
    let d_out = layout.d_out;
    let k = layout.kraus;
    let u_in = rng.unitary(d_in);
    let u_out = rng.unitary(d_out);

    let mut kraus = vec![linalg::zeros(d_out, d_in); k];
    let mut col_in = 0;
    let mut col_out = 0;
    let mut frames = Vec::new();
    let mut blocks: Vec<(usize, usize, usize)> = layout.sectors.clone();
    if layout.extra.0 > 0 {
        blocks.push((1, layout.extra.0, layout.extra.1));
    }
    for (idx, &(n, m, m_out)) in blocks.iter().enumerate() {
        let f = u_in.columns(col_in, n * m).into_owned();
        let j = u_out.columns(col_out, n * m_out).into_owned();
        col_in += n * m;
        col_out += n * m_out;
        let b = rng.channel(m, m_out, k);
        for (e, ba) in kraus.iter_mut().zip(b.kraus()) {
            *e += &j * linalg::kron(&linalg::identity(n), ba) * f.adjoint();
        }
        if idx < layout.sectors.len() {
            frames.push((f, n, m));
        }
    }
    let code = u_in.columns(0, col_in).into_owned();
    let projector = &code * code.adjoint();
    let mut v = stack(&kraus);
    if layout.rest > 0 {
        let image = linalg::range_basis(&(&v * &code), 1e-12);
        let w = completion(&image, layout.rest, rng);
        let rest = u_in.columns(col_in, layout.rest).into_owned();
        v += w * rest.adjoint();
    }
    Instance {
        channel: unstack(&v, k, d_out),
        projector,
        algebra: sector_algebra(&frames, d_in),
        expected: true,
        shape: layout.sectors.iter().map(|s| (s.0, s.1)).collect(),
    }
}

/// Conserved by construction: each Kraus element maps sector `k` into itself as
/// `F_k (1_n ⊗ B^k_a) F_k†`; the code outside the unit and the complement of the code go
/// anywhere consistent with trace preservation.
pub fn conserved(rng: &mut Sampler) -> Instance {
    let layout = random_layout(rng, true);
    let d = layout.d_in();
    let k = layout.kraus;
    let u = rng.unitary(d);
    let mut kraus = vec![linalg::zeros(d, d); k];
    let mut col = 0;
    let mut frames = Vec::new();
    for &(n, m, _) in &layout.sectors {
        let f = u.columns(col, n * m).into_owned();
        col += n * m;
        let b = rng.channel(m, m, k);
        for (e, ba) in kraus.iter_mut().zip(b.kraus()) {
            *e += &f * linalg::kron(&linalg::identity(n), ba) * f.adjoint();
        }
        frames.push((f, n, m));
    }
    let unit_dim = col;
    let mut v = stack(&kraus);
    let sector_frame = u.columns(0, unit_dim).into_owned();
    let mut image = linalg::range_basis(&(&v * &sector_frame), 1e-12);

    if layout.extra.0 > 0 {
        // Anything outside the unit, stacked over the environment.
        let outside = u.columns(unit_dim, d - unit_dim).into_owned();
        let target = linalg::kron(&linalg::identity(k), &outside);
        let raw = rng.ginibre(target.ncols(), layout.extra.0);
        let q = raw.qr().q().columns(0, layout.extra.0).into_owned();
        let w = &target * q;
        let src = u.columns(unit_dim, layout.extra.0).into_owned();
        v += &w * src.adjoint();
        let mut joined = linalg::zeros(image.nrows(), image.ncols() + w.ncols());
        joined.columns_mut(0, image.ncols()).copy_from(&image);
        joined.columns_mut(image.ncols(), w.ncols()).copy_from(&w);
        image = joined;
    }
    let code_dim = unit_dim + layout.extra.0;
    if layout.rest > 0 {
        let w = completion(&image, layout.rest, rng);
        let rest = u.columns(code_dim, layout.rest).into_owned();
        v += w * rest.adjoint();
    }
    let code = u.columns(0, code_dim).into_owned();
    Instance {
        channel: unstack(&v, k, d),
        projector: &code * code.adjoint(),
        algebra: sector_algebra(&frames, d),
        expected: true,
        shape: layout.sectors.iter().map(|s| (s.0, s.1)).collect(),
    }
}

/// Mixes `eps`-size Gaussian noise into every Kraus element and restores trace preservation.
pub fn perturb(inst: Instance, eps: f64, rng: &mut Sampler) -> Instance {
    let ch = &inst.channel;
    let noisy: Vec<Matrix> = ch
        .kraus()
        .iter()
        .map(|e| e + rng.ginibre(e.nrows(), e.ncols()).scale(eps))
        .collect();
    let mut s = linalg::zeros(ch.dim_in(), ch.dim_in());
    for e in &noisy {
        s += e.adjoint() * e;
    }
    let (values, vectors) = linalg::eigh(&s);
    let mut inv_sqrt = linalg::zeros(values.len(), values.len());
    for (i, v) in values.iter().enumerate() {
        inv_sqrt[(i, i)] = linalg::r(1.0 / v.sqrt());
    }
    let fix = &vectors * inv_sqrt * vectors.adjoint();
    let channel = KrausChannel::new(noisy.iter().map(|e| e * &fix).collect()).expect("nonempty");
    Instance {
        channel,
        expected: false,
        ..inst
    }
}

/// Generic channel with the full algebra on a random code of rank at least two.
pub fn generic(rng: &mut Sampler, square: bool) -> Instance {
    let d_in = pick(rng, 2, MAX_DIM);
    let d_out = if square { d_in } else { pick(rng, 2, MAX_DIM) };
    let mut k = pick(rng, 2, MAX_KRAUS);
    while k * d_out < d_in {
        k += 1;
    }
    let k = k.min(MAX_KRAUS);
    let channel = rng.channel(d_in, d_out, k);
    let rank = pick(rng, 2, d_in);
    let u = rng.unitary(d_in);
    let code = u.columns(0, rank).into_owned();
    let projector = &code * code.adjoint();
    let algebra = OperatorSpan::full_on(&projector).expect("projector");
    Instance {
        channel,
        projector,
        algebra,
        expected: false,
        shape: vec![(rank, 1)],
    }
}

/// Two-qubit measurement-like interaction `Σ_i |e_i⟩⟨e_i| ⊗ W_i` on a random system basis,
/// with `W_1 = W_0 X` so the pointer states `W_i|0⟩` are orthogonal.
pub fn controlled_unitary(rng: &mut Sampler) -> Matrix {
    let basis = rng.unitary(2);
    let w0 = rng.unitary(2);
    let w1 = &w0 * linalg::pauli::x();
    let mut u = linalg::zeros(4, 4);
    for (i, w) in [w0, w1].iter().enumerate() {
        let e = basis.column(i).into_owned();
        u += linalg::kron(&(&e * e.adjoint()), w);
    }
    u
}
