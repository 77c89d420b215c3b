//! End-to-end check against random SU(2) polynomials: sample, find roots,
//! histogram scaled pair distances around the sphere.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::gaussian::{chunk_rng, run_in_pool};
use crate::error::{Error, Result};

/// Backward-error threshold for accepting a computed root.
pub const ROOT_TOLERANCE: f64 = 1e-8;
/// Fraction of trials that may be discarded before a run fails.
pub const MAX_DISCARD_FRACTION: f64 = 0.01;

const ABERTH_MAX_SWEEPS: usize = 500;
const ABERTH_STEP_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleConfig {
    pub degree: usize,
    pub trials: usize,
    /// Strictly increasing bin edges in scaled distance.
    pub bin_edges: Vec<f64>,
    pub seed: u64,
    pub workers: usize,
    /// Count only pairs whose geodesic midpoint lies within this scaled
    /// radius of the origin; `None` counts every pair on the sphere.
    pub cap_radius: Option<f64>,
}

impl EnsembleConfig {
    pub fn new(degree: usize, trials: usize, bin_edges: Vec<f64>, seed: u64) -> Result<Self> {
        let cfg = Self {
            degree,
            trials,
            bin_edges,
            seed,
            workers: 0,
            cap_radius: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Edges `0.15, 0.25, …, 3.95`: width 0.1 with centers `0.2, …, 3.9`.
    pub fn default_edges() -> Vec<f64> {
        (0..=38).map(|i| (15 + 10 * i) as f64 / 100.0).collect()
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_cap_radius(mut self, rho: f64) -> Result<Self> {
        self.cap_radius = Some(rho);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 20 {
            return Err(Error::domain(format!("degree must be at least 20, got {}", self.degree)));
        }
        if self.trials == 0 {
            return Err(Error::domain("trials must be at least 1"));
        }
        let e = &self.bin_edges;
        if e.len() < 2 {
            return Err(Error::domain("need at least two bin edges"));
        }
        if e.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("bin edges must be strictly increasing"));
        }
        if e[0] < 0.1 || e[e.len() - 1] > 4.0 {
            return Err(Error::domain("bin edges must lie within [0.1, 4]"));
        }
        let half_circle = std::f64::consts::FRAC_PI_2 * (self.degree as f64).sqrt();
        if let Some(rho) = self.cap_radius {
            if !(rho > 0.0 && rho <= half_circle) {
                return Err(Error::domain(format!("cap radius must lie in (0, {half_circle:.3}]")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BinRecord {
    pub bin_center: f64,
    pub kappa_hat: f64,
    pub stderr: f64,
    pub pairs_counted: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleReport {
    pub degree: usize,
    pub trials_used: usize,
    pub discarded: usize,
    pub bins: Vec<BinRecord>,
}

/// `C_j √binom(N, j)` with `C_j` standard complex Gaussian, lowest degree first.
pub fn su2_coefficients<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Vec<Complex64> {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let mut log_binom = 0.0;
    (0..=degree)
        .map(|j| {
            if j > 0 {
                log_binom += ((degree - j + 1) as f64).ln() - (j as f64).ln();
            }
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im) * (half * (0.5 * log_binom).exp())
        })
        .collect()
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Newton correction `p(z)/p'(z)`, evaluated through the reversed
/// polynomial outside the unit disk.
fn newton_step(c: &[Complex64], z: Complex64) -> Complex64 {
    if z.norm_sqr() <= 1.0 {
        let (p, dp) = horner(c, z);
        return p / dp;
    }
    let n = (c.len() - 1) as f64;
    let w = z.inv();
    let mut q = Complex64::new(0.0, 0.0);
    let mut dq = Complex64::new(0.0, 0.0);
    for &a in c {
        dq = dq * w + q;
        q = q * w + a;
    }
    // p'/p = w (N − w q'/q) with w = 1/z.
    q / (w * (q * n - w * dq))
}

/// `|p(z)| / Σ |c_j| |z|^j`, scaled to avoid overflow.
pub fn backward_error(c: &[Complex64], z: Complex64) -> f64 {
    let (num, den) = if z.norm_sqr() <= 1.0 {
        let (p, _) = horner(c, z);
        let a = z.norm();
        (p.norm(), c.iter().rev().fold(0.0, |acc, x| acc * a + x.norm()))
    } else {
        let w = z.inv();
        let a = w.norm();
        let q = c.iter().fold(Complex64::new(0.0, 0.0), |acc, &x| acc * w + x);
        (q.norm(), c.iter().fold(0.0, |acc, x| acc * a + x.norm()))
    };
    if den == 0.0 { f64::INFINITY } else { num / den }
}

/// Starting points on circles whose radii come from the upper convex hull
/// of `(j, ln|c_j|)`.
fn newton_polygon_guesses(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let pts: Vec<(f64, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 0.0)
        .map(|(j, a)| (j as f64, a.norm().ln()))
        .collect();
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(n);
    let tau = std::f64::consts::TAU;
    for seg in hull.windows(2) {
        let count = (seg[1].0 - seg[0].0) as usize;
        let radius = ((seg[0].1 - seg[1].1) / (seg[1].0 - seg[0].0)).exp();
        for t in 0..count {
            let angle = tau * t as f64 / count as f64 + tau * out.len() as f64 / n as f64 + 0.4;
            out.push(Complex64::from_polar(radius, angle));
        }
    }
    out
}

/// Simultaneous Aberth–Ehrlich iteration; `None` if it does not settle.
pub fn aberth_roots(c: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = c.len().checked_sub(1)?;
    if n == 0 || c[n].norm() == 0.0 {
        return None;
    }
    let mut z = newton_polygon_guesses(c);
    if z.len() != n {
        return None;
    }
    for _ in 0..ABERTH_MAX_SWEEPS {
        let mut all = true;
        for i in 0..n {
            let ratio = newton_step(c, z[i]);
            if !ratio.is_finite() {
                return None;
            }
            let zi = z[i];
            let sum = z
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Complex64::new(0.0, 0.0), |acc, (_, &zj)| acc + (zi - zj).inv());
            let delta = ratio / (1.0 - ratio * sum);
            z[i] = zi - delta;
            all &= delta.norm() <= ABERTH_STEP_TOLERANCE * z[i].norm();
        }
        if all {
            return Some(z);
        }
    }
    None
}

/// Eigenvalues of the companion matrix of the monic polynomial.
pub fn companion_roots(c: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = c.len().checked_sub(1)?;
    let lead = c[n];
    if n == 0 || lead.norm() == 0.0 {
        return None;
    }
    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i] / lead;
    }
    let eig = comp.try_schur(1e-14, 10_000)?.eigenvalues()?;
    let mut roots: Vec<Complex64> = eig.iter().copied().collect();
    for z in &mut roots {
        for _ in 0..3 {
            let step = newton_step(c, *z);
            if step.is_finite() {
                *z -= step;
            }
        }
    }
    Some(roots)
}

/// All `N` roots, each accepted by its backward error; Aberth first, then
/// the companion matrix.
pub fn polynomial_roots(c: &[Complex64]) -> Option<Vec<Complex64>> {
    let accept = |roots: Vec<Complex64>| {
        roots
            .iter()
            .all(|&z| backward_error(c, z) <= ROOT_TOLERANCE)
            .then_some(roots)
    };
    aberth_roots(c).and_then(accept).or_else(|| companion_roots(c).and_then(accept))
}

/// Unit vector on `S²` under the inverse stereographic map.
fn sphere_point(z: Complex64) -> [f64; 3] {
    let s = 1.0 + z.norm_sqr();
    [2.0 * z.re / s, 2.0 * z.im / s, (1.0 - z.norm_sqr()) / s]
}

/// Pair counts per bin for one set of roots.
fn trial_counts(roots: &[Complex64], cfg: &EnsembleConfig) -> Vec<u64> {
    let sqrt_n = (cfg.degree as f64).sqrt();
    let edges = &cfg.bin_edges;
    let (lo, hi) = (edges[0], edges[edges.len() - 1]);
    let pts: Vec<[f64; 3]> = roots.iter().map(|&z| sphere_point(z)).collect();
    let mut counts = vec![0u64; edges.len() - 1];
    for a in 0..pts.len() {
        for b in (a + 1)..pts.len() {
            let (u, v) = (pts[a], pts[b]);
            let d2 = (u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2) + (u[2] - v[2]).powi(2);
            // Geodesic distance in the Fubini–Study metric is half the
            // central angle on the unit sphere.
            let r = sqrt_n * (0.5 * d2.sqrt()).min(1.0).asin();
            if r < lo || r >= hi {
                continue;
            }
            if let Some(rho) = cfg.cap_radius {
                let mid = [u[0] + v[0], u[1] + v[1], u[2] + v[2]];
                let len = (mid[0] * mid[0] + mid[1] * mid[1] + mid[2] * mid[2]).sqrt();
                let polar = 0.5 * (mid[2] / len).clamp(-1.0, 1.0).acos();
                if sqrt_n * polar > rho {
                    continue;
                }
            }
            let bin = edges.partition_point(|&e| e <= r) - 1;
            counts[bin] += 2;
        }
    }
    counts
}

/// Empirical `κ_11` per bin from random degree-`N` SU(2) polynomials.
///
/// Ordered pair counts are divided by the count expected for `N` independent
/// uniform points on the sphere, `N² (sin²(r₂/√N) − sin²(r₁/√N))`, times
/// `sin²(ρ/√N)` when only pairs centred in the cap of radius `ρ` are kept.
pub fn ensemble_su2(cfg: &EnsembleConfig) -> Result<EnsembleReport> {
    cfg.validate()?;
    let n = cfg.degree;
    let per_trial: Vec<Option<Vec<u64>>> = run_in_pool(cfg.workers, || {
        (0..cfg.trials as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = chunk_rng(cfg.seed, t);
                let c = su2_coefficients(n, &mut rng);
                polynomial_roots(&c)
                    .filter(|roots| roots.len() == n)
                    .map(|roots| trial_counts(&roots, cfg))
            })
            .collect()
    })?;
    let discarded = per_trial.iter().filter(|t| t.is_none()).count();
    if discarded as f64 > MAX_DISCARD_FRACTION * cfg.trials as f64 {
        return Err(Error::TooManyDiscards {
            discarded,
            trials: cfg.trials,
        });
    }
    let used: Vec<&Vec<u64>> = per_trial.iter().flatten().collect();
    let sqrt_n = (n as f64).sqrt();
    let cap = cfg.cap_radius.map_or(1.0, |rho| (rho / sqrt_n).sin().powi(2));
    let nn = (n * n) as f64;
    let trials = used.len() as f64;
    let bins = cfg
        .bin_edges
        .windows(2)
        .enumerate()
        .map(|(b, w)| {
            let expected = nn * cap * ((w[1] / sqrt_n).sin().powi(2) - (w[0] / sqrt_n).sin().powi(2));
            let xs: Vec<f64> = used.iter().map(|c| c[b] as f64 / expected).collect();
            let mean = xs.iter().sum::<f64>() / trials;
            let var = if xs.len() > 1 {
                xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1.0)
            } else {
                f64::INFINITY
            };
            BinRecord {
                bin_center: 0.5 * (w[0] + w[1]),
                kappa_hat: mean,
                stderr: (var / trials).sqrt(),
                pairs_counted: used.iter().map(|c| c[b]).sum(),
            }
        })
        .collect();
    Ok(EnsembleReport {
        degree: n,
        trials_used: used.len(),
        discarded,
        bins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (j, &a) in c.iter().enumerate() {
                next[j + 1] += a;
                next[j] -= a * r;
            }
            c = next;
        }
        c
    }

    #[test]
    fn recovers_known_roots() {
        let roots: Vec<Complex64> = (0..12)
            .map(|j| Complex64::from_polar(0.3 + 0.25 * j as f64, 1.7 * j as f64))
            .collect();
        let c = from_roots(&roots);
        for found in [aberth_roots(&c).unwrap(), companion_roots(&c).unwrap()] {
            for r in &roots {
                let best = found.iter().map(|z| (z - r).norm()).fold(f64::INFINITY, f64::min);
                assert!(best < 1e-8, "root {r} missed by {best}");
            }
        }
    }

    #[test]
    fn su2_polynomial_has_n_accepted_roots() {
        let mut rng = chunk_rng(5, 0);
        let c = su2_coefficients(200, &mut rng);
        let roots = polynomial_roots(&c).unwrap();
        assert_eq!(roots.len(), 200);
        assert!(roots.iter().all(|&z| backward_error(&c, z) <= ROOT_TOLERANCE));
    }

    #[test]
    fn config_validation() {
        let e = EnsembleConfig::default_edges();
        assert!(EnsembleConfig::new(10, 5, e.clone(), 0).is_err());
        assert!(EnsembleConfig::new(50, 0, e.clone(), 0).is_err());
        assert!(EnsembleConfig::new(50, 5, vec![0.5, 0.5, 1.0], 0).is_err());
        assert!(EnsembleConfig::new(50, 5, vec![0.05, 1.0], 0).is_err());
        assert!(EnsembleConfig::new(50, 5, vec![1.0, 4.5], 0).is_err());
        let cfg = EnsembleConfig::new(50, 5, e, 0).unwrap();
        assert!(cfg.clone().with_cap_radius(-1.0).is_err());
        assert!(cfg.with_cap_radius(5.0).is_ok());
    }

    #[test]
    fn default_edges_centers() {
        let e = EnsembleConfig::default_edges();
        assert_eq!(e.len(), 39);
        let centers: Vec<f64> = e.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        for want in [0.5, 1.0, 1.5, 2.0, 3.0] {
            assert!(centers.iter().any(|c| (c - want).abs() < 1e-12));
        }
    }

    #[test]
    fn small_run_is_worker_independent() {
        let base = EnsembleConfig::new(40, 12, EnsembleConfig::default_edges(), 9).unwrap();
        let a = ensemble_su2(&base.clone().with_workers(1)).unwrap();
        let b = ensemble_su2(&base.with_workers(2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials_used + a.discarded, 12);
    }
}
