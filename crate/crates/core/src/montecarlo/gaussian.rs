//! Direct Monte-Carlo estimation of the Gaussian integrals behind the
//! correlation functions.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::correlators::CorrelationQuery;
use crate::correlators::berezin::falling_ratio;
use crate::error::{Error, Result};
use crate::kernel::build_covariance;
use crate::linalg::CMatrix;
use crate::scalar::Real;

/// Samples drawn from one random stream; chunk `c` of a run uses stream `c`
/// of the ChaCha generator seeded with the run seed.
pub const CHUNK: u64 = 8192;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MCConfig {
    pub samples: u64,
    pub seed: u64,
    /// Worker threads; `0` uses the ambient rayon pool.
    pub workers: usize,
}

impl MCConfig {
    pub fn new(samples: u64, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::domain("samples must be at least 1"));
        }
        Ok(Self {
            samples,
            seed,
            workers: 0,
        })
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn chunks(&self) -> u64 {
        self.samples.div_ceil(CHUNK)
    }

    fn chunk_len(&self, c: u64) -> u64 {
        CHUNK.min(self.samples - c * CHUNK)
    }
}

pub(crate) fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

pub(crate) fn run_in_pool<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::domain(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MCEstimate<T> {
    pub mean: T,
    pub stderr: T,
    pub samples: u64,
}

impl<T: Real> MCEstimate<T> {
    pub fn scaled(&self, c: T) -> Self {
        Self {
            mean: self.mean * c,
            stderr: self.stderr * c.abs(),
            samples: self.samples,
        }
    }

    /// `|mean − value| / stderr`.
    pub fn z_score(&self, value: T) -> T {
        (self.mean - value).abs() / self.stderr
    }
}

/// Running count, mean and sum of squared deviations.
#[derive(Clone, Copy, Debug)]
struct Moments<T> {
    n: u64,
    mean: T,
    m2: T,
}

impl<T: Real> Moments<T> {
    fn new() -> Self {
        Self {
            n: 0,
            mean: T::zero(),
            m2: T::zero(),
        }
    }

    fn push(&mut self, x: T) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean = self.mean + delta / T::lit(self.n as f64);
        self.m2 = self.m2 + delta * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let (na, nb, nt) = (T::lit(self.n as f64), T::lit(other.n as f64), T::lit(n as f64));
        let delta = other.mean - self.mean;
        Self {
            n,
            mean: self.mean + delta * nb / nt,
            m2: self.m2 + other.m2 + delta * delta * na * nb / nt,
        }
    }

    fn estimate(&self) -> MCEstimate<T> {
        let stderr = if self.n > 1 {
            let var = self.m2 / T::lit((self.n - 1) as f64);
            (var / T::lit(self.n as f64)).sqrt()
        } else {
            T::infinity()
        };
        MCEstimate {
            mean: self.mean,
            stderr,
            samples: self.n,
        }
    }
}

/// Draws `ξ = L w` with `L L* = Λ` and `w` standard complex Gaussian
/// (`E|w_a|² = 1`), so that `E[ξ ξ*] = Λ`.
#[derive(Clone, Debug)]
pub struct GaussianSampler<T> {
    factor: CMatrix<T>,
}

impl<T: Real> GaussianSampler<T> {
    pub fn new(lambda: &CMatrix<T>) -> Result<Self> {
        Ok(Self {
            factor: lambda.cholesky()?,
        })
    }

    pub fn dim(&self) -> usize {
        self.factor.rows()
    }

    pub fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<Complex<T>> {
        let d = self.dim();
        let half = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        let w: Vec<Complex<T>> = (0..d)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex::new(T::lit(re) * half, T::lit(im) * half)
            })
            .collect();
        (0..d)
            .map(|i| {
                let row = self.factor.row(i);
                (0..=i).fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + row[j] * w[j])
            })
            .collect()
    }
}

/// The deterministic sample stream of a run: chunks in order, each from its
/// own generator stream.
pub fn sample_gaussian<T: Real>(
    lambda: &CMatrix<T>,
    cfg: &MCConfig,
) -> Result<impl Iterator<Item = Vec<Complex<T>>>> {
    let sampler = GaussianSampler::new(lambda)?;
    let cfg = *cfg;
    Ok((0..cfg.chunks()).flat_map(move |c| {
        let mut rng = chunk_rng(cfg.seed, c);
        let sampler = sampler.clone();
        (0..cfg.chunk_len(c)).map(move |_| sampler.draw(&mut rng))
    }))
}

/// `∏_p det(ξ^p ξ^{p*})` where `ξ^p` is the `k × m` block of point `p`.
pub fn gram_product<T: Real>(xi: &[Complex<T>], n: usize, k: usize, m: usize) -> T {
    let mut prod = T::one();
    for p in 0..n {
        let base = p * k * m;
        let gram = CMatrix::from_fn(k, k, |j, jj| {
            (0..m).fold(Complex::new(T::zero(), T::zero()), |acc, q| {
                acc + xi[base + j * m + q] * xi[base + jj * m + q].conj()
            })
        });
        prod = prod * gram.det().re;
    }
    prod
}

/// Monte-Carlo mean of `∏_p det(ξ^p ξ^{p*})` under the Gaussian with
/// covariance `Λ` (dimension `n k m`).
pub fn estimate_g<T: Real>(
    lambda: &CMatrix<T>,
    n: usize,
    k: usize,
    m: usize,
    cfg: &MCConfig,
) -> Result<MCEstimate<T>> {
    if lambda.rows() != n * k * m || !lambda.is_square() {
        return Err(Error::domain(format!(
            "covariance is {}x{}, expected {d}x{d} for n={n}, k={k}, m={m}",
            lambda.rows(),
            lambda.cols(),
            d = n * k * m
        )));
    }
    let sampler = GaussianSampler::new(lambda)?;
    let cfg = *cfg;
    let chunks: Vec<Moments<T>> = run_in_pool(cfg.workers, || {
        (0..cfg.chunks())
            .into_par_iter()
            .map(|c| {
                let mut rng = chunk_rng(cfg.seed, c);
                let mut acc = Moments::new();
                for _ in 0..cfg.chunk_len(c) {
                    acc.push(gram_product(&sampler.draw(&mut rng), n, k, m));
                }
                acc
            })
            .collect()
    })?;
    let total = chunks.into_iter().fold(Moments::new(), Moments::merge);
    Ok(total.estimate())
}

/// Monte-Carlo estimate of `K̃_nkm` (`κ_km` for two points) with the
/// normalizing prefactor `[(m−k)!/m!]^n / det(A∞)^k`.
pub fn estimate_kappa_mc<T: Real>(query: &CorrelationQuery<T>, cfg: &MCConfig) -> Result<MCEstimate<T>> {
    let points = query.config()?;
    let (n, k, m) = (points.n(), query.k, points.m());
    let bundle = build_covariance(&points, k)?;
    let g = estimate_g(&bundle.lambda, n, k, m, cfg)?;
    let mut pref = T::one();
    for _ in 0..n {
        pref = pref * falling_ratio::<T>(k, m);
    }
    Ok(g.scaled(pref / bundle.det_a().powi(k as i32)))
}
