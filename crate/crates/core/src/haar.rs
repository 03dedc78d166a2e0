//! Monte Carlo over Haar-random unitaries, independent of the combinatorial
//! engine.
//!
//! Sampling is split into fixed chunks of [`CHUNK_SIZE`] samples. Chunk `c`
//! draws from its own ChaCha stream `(seed, c)` and chunk partial sums are
//! combined in chunk order, so an estimate depends only on
//! `(spec, N, samples, seed)` and not on how many workers ran it.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::words::{MomentSpec, Word};

pub const CHUNK_SIZE: u64 = 1024;
pub const DEFAULT_SEED: u64 = 0x5eed_cafe_f00d_0001;

const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    m: DMatrix<Complex64>,
}

impl UnitaryMatrix {
    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn adjoint(&self) -> DMatrix<Complex64> {
        self.m.adjoint()
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    /// `max |(U U*)_{ij} - δ_{ij}|`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        let prod = &self.m * self.m.adjoint();
        let id = DMatrix::<Complex64>::identity(n, n);
        (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Wraps a matrix that is already unitary to within tolerance.
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Domain("unitary matrix must be square".into()));
        }
        let u = Self { m };
        if u.unitarity_residual() > UNITARITY_TOL {
            return Err(Error::Domain("matrix is not unitary".into()));
        }
        Ok(u)
    }
}

fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    })
}

/// QR of a complex Ginibre matrix with the phases of `R`'s diagonal moved
/// into `Q` (column `k` times `R_kk/|R_kk|`), which makes `Q` Haar.
pub fn haar_sample<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryMatrix {
    assert!(dim >= 1, "dimension must be positive");
    loop {
        let (mut q, r) = ginibre(dim, rng).qr().unpack();
        let mut degenerate = false;
        for k in 0..dim {
            let d = r[(k, k)];
            let norm = d.norm();
            if norm < 1e-300 {
                degenerate = true;
                break;
            }
            let phase = d / norm;
            q.column_mut(k).iter_mut().for_each(|z| *z *= phase);
        }
        if degenerate {
            continue;
        }
        let u = UnitaryMatrix { m: q };
        if u.unitarity_residual() <= UNITARITY_TOL {
            return u;
        }
    }
}

/// Trace of `w` evaluated at the given unitaries (generator `g` ↦ `us[g]`).
pub fn trace_word(us: &[UnitaryMatrix], adjoints: &[DMatrix<Complex64>], word: &Word) -> Complex64 {
    let n = us[0].dim();
    let mut acc = DMatrix::<Complex64>::identity(n, n);
    for l in word.letters() {
        let g = l.generator as usize;
        acc = if l.inverse {
            acc * &adjoints[g]
        } else {
            acc * us[g].matrix()
        };
    }
    acc.trace()
}

/// Value of `Π tr(w)^α conj(tr(w))^β` at one sample.
pub fn evaluate_spec(spec: &MomentSpec, us: &[UnitaryMatrix]) -> Complex64 {
    let adjoints: Vec<_> = us.iter().map(UnitaryMatrix::adjoint).collect();
    spec.terms().iter().fold(Complex64::new(1.0, 0.0), |acc, t| {
        let tr = trace_word(us, &adjoints, &t.word);
        acc * tr.powu(t.alpha) * tr.conj().powu(t.beta)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: Complex64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub dim: u64,
}

impl MCEstimate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "mean_re": self.mean.re,
            "mean_im": self.mean.im,
            "stderr": self.stderr,
            "samples": self.samples,
            "seed": self.seed,
        })
    }

    /// `|mean - target| <= k · stderr`.
    pub fn within(&self, target: Complex64, k: f64) -> bool {
        (self.mean - target).norm() <= k * self.stderr
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ChunkSums {
    re: CompensatedSum,
    im: CompensatedSum,
    abs2: CompensatedSum,
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn run_chunk<F>(generators: usize, dim: usize, seed: u64, chunk: u64, count: u64, f: &F) -> ChunkSums
where
    F: Fn(&[UnitaryMatrix]) -> Complex64,
{
    let mut rng = chunk_rng(seed, chunk);
    let mut sums = ChunkSums::default();
    let mut us = Vec::with_capacity(generators);
    for _ in 0..count {
        us.clear();
        us.extend((0..generators).map(|_| haar_sample(dim, &mut rng)));
        let x = f(&us);
        sums.re.add(x.re);
        sums.im.add(x.im);
        sums.abs2.add(x.norm_sqr());
    }
    sums
}

/// Mean and standard error of `f(U_1, .., U_M)` over independent Haar
/// samples, using the current rayon pool.
pub fn estimate_with<F>(
    generators: usize,
    dim: u64,
    samples: u64,
    seed: u64,
    f: F,
) -> Result<MCEstimate>
where
    F: Fn(&[UnitaryMatrix]) -> Complex64 + Sync,
{
    if dim == 0 {
        return Err(Error::Domain("matrix dimension N must be at least 1".into()));
    }
    if samples < 2 {
        return Err(Error::Domain("need at least 2 samples".into()));
    }
    let chunks = samples.div_ceil(CHUNK_SIZE);
    let partials: Vec<ChunkSums> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK_SIZE.min(samples - c * CHUNK_SIZE);
            run_chunk(generators.max(1), dim as usize, seed, c, count, &f)
        })
        .collect();

    let mut total = ChunkSums::default();
    for p in &partials {
        total.re.add(p.re.value());
        total.im.add(p.im.value());
        total.abs2.add(p.abs2.value());
    }
    let n = samples as f64;
    let mean = Complex64::new(total.re.value() / n, total.im.value() / n);
    let var = ((total.abs2.value() - n * mean.norm_sqr()) / (n - 1.0)).max(0.0);
    Ok(MCEstimate {
        mean,
        stderr: (var / n).sqrt(),
        samples,
        seed,
        dim,
    })
}

/// Monte Carlo estimate of a trace-word moment.
pub fn estimate_moment(spec: &MomentSpec, dim: u64, samples: u64, seed: u64) -> Result<MCEstimate> {
    if samples < 100 {
        return Err(Error::Domain("estimate_moment needs at least 100 samples".into()));
    }
    estimate_with(spec.generator_count(), dim, samples, seed, |us| {
        evaluate_spec(spec, us)
    })
}

/// [`estimate_moment`] on a dedicated pool of `workers` threads.
pub fn estimate_moment_with_workers(
    spec: &MomentSpec,
    dim: u64,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<MCEstimate> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("cannot build thread pool: {e}")))?;
    pool.install(|| estimate_moment(spec, dim, samples, seed))
}
