//! Universal covariance data of the scaling-limit joint distribution.
//!
//! Points are given in scaled coordinates (already multiplied by `√N`). All
//! matrices are stored without the overall `m!/π^m` factor; the correlation
//! formulas are written in terms of the bare matrices.
//!
//! Index flattening: `(p, q) ↦ p·m + q` for `Λ∞` and
//! `(p, j, q) ↦ (p·k + j)·m + q` for the inflated `Λ` (all zero-based).

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Real;

/// Default bound on the 1-norm condition number of `A∞`.
pub const DEFAULT_CONDITION_LIMIT: f64 = 1e12;

/// `n` distinct points in `C^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointConfig<T> {
    m: usize,
    points: Vec<Vec<Complex<T>>>,
}

impl<T: Real> PointConfig<T> {
    pub fn new(points: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::domain("point configuration needs n >= 1 points"));
        };
        let m = first.len();
        if m == 0 {
            return Err(Error::domain("points must have dimension m >= 1"));
        }
        if let Some(bad) = points.iter().position(|z| z.len() != m) {
            return Err(Error::domain(format!(
                "point {bad} has {} coordinates, expected m = {m}",
                points[bad].len()
            )));
        }
        for a in 0..points.len() {
            for b in (a + 1)..points.len() {
                if points[a] == points[b] {
                    return Err(Error::domain(format!("points {a} and {b} coincide")));
                }
            }
        }
        Ok(Self { m, points })
    }

    /// The standard pair `z¹ = (r, 0, …, 0)`, `z² = 0`.
    pub fn standard_pair(r: T, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("m >= 1 required"));
        }
        let mut z1 = vec![Complex::zero(); m];
        z1[0] = Complex::new(r, T::zero());
        Self::new(vec![z1, vec![Complex::zero(); m]])
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn points(&self) -> &[Vec<Complex<T>>] {
        &self.points
    }

    pub fn translated(&self, shift: &[Complex<T>]) -> Result<Self> {
        assert_eq!(shift.len(), self.m);
        Self::new(
            self.points
                .iter()
                .map(|z| z.iter().zip(shift).map(|(a, b)| a + b).collect())
                .collect(),
        )
    }

    /// Applies `z ↦ U z` to every point; `u` is `m × m`.
    pub fn transformed(&self, u: &CMatrix<T>) -> Result<Self> {
        assert_eq!((u.rows(), u.cols()), (self.m, self.m));
        Self::new(
            self.points
                .iter()
                .map(|z| {
                    (0..self.m)
                        .map(|i| (0..self.m).map(|j| u[(i, j)] * z[j]).sum())
                        .collect()
                })
                .collect(),
        )
    }

    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        Self::new(order.iter().map(|&i| self.points[i].clone()).collect())
    }

    pub fn min_distance(&self) -> T {
        let mut best = T::infinity();
        for a in 0..self.n() {
            for b in (a + 1)..self.n() {
                let d = self.points[a]
                    .iter()
                    .zip(&self.points[b])
                    .map(|(x, y)| (x - y).norm_sqr())
                    .fold(T::zero(), |acc, v| acc + v)
                    .sqrt();
                best = best.min(d);
            }
        }
        best
    }
}

fn dot_conj<T: Real>(z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

fn norm_sqr<T: Real>(z: &[Complex<T>]) -> T {
    z.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
}

/// Szegő kernel of the Heisenberg group at zero angles,
/// `π^{−m} exp(z·w̄ − ½(|z|² + |w|²))`.
pub fn szego_heisenberg<T: Real>(z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
    assert_eq!(z.len(), w.len(), "szego_heisenberg: dimension mismatch");
    let m = z.len() as i32;
    (unnormalised_kernel(z, w)) * T::PI().powi(-m)
}

/// `π^m` times the Szegő kernel: the entries of `A∞`.
fn unnormalised_kernel<T: Real>(z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
    let half = T::lit(0.5);
    (dot_conj(z, w) - Complex::new(half * (norm_sqr(z) + norm_sqr(w)), T::zero())).exp()
}

/// `A∞`, `B∞`, `C∞`, `Λ∞` and the codimension-`k` inflation `Λ`.
#[derive(Clone, Debug)]
pub struct CovarianceBundle<T> {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub a: CMatrix<T>,
    pub b: CMatrix<T>,
    pub c: CMatrix<T>,
    pub lambda_inf: CMatrix<T>,
    pub lambda: CMatrix<T>,
    /// 1-norm condition number of `A∞`.
    pub condition: T,
}

impl<T: Real> CovarianceBundle<T> {
    /// `det A∞`, real and positive for distinct points.
    pub fn det_a(&self) -> T {
        self.a.det().re
    }

    pub fn lambda_inf_index(&self, p: usize, q: usize) -> usize {
        p * self.m + q
    }

    pub fn lambda_index(&self, p: usize, j: usize, q: usize) -> usize {
        (p * self.k + j) * self.m + q
    }
}

pub fn build_covariance<T: Real>(cfg: &PointConfig<T>, k: usize) -> Result<CovarianceBundle<T>> {
    build_covariance_with_limit(cfg, k, T::lit(DEFAULT_CONDITION_LIMIT))
}

pub fn build_covariance_with_limit<T: Real>(
    cfg: &PointConfig<T>,
    k: usize,
    condition_limit: T,
) -> Result<CovarianceBundle<T>> {
    let (n, m) = (cfg.n(), cfg.m());
    if k == 0 || k > m {
        return Err(Error::domain(format!("need 1 <= k <= m, got k = {k}, m = {m}")));
    }
    let z = cfg.points();
    let kern = |p: usize, pp: usize| unnormalised_kernel(&z[p], &z[pp]);

    let a = CMatrix::from_fn(n, n, kern);
    let b = CMatrix::from_fn(n, n * m, |p, col| {
        let (pp, qq) = (col / m, col % m);
        (z[p][qq] - z[pp][qq]) * kern(p, pp)
    });
    let c = CMatrix::from_fn(n * m, n * m, |row, col| {
        let (p, q) = (row / m, row % m);
        let (pp, qq) = (col / m, col % m);
        let delta = if q == qq { Complex::<T>::one() } else { Complex::<T>::zero() };
        (delta + (z[pp][q].conj() - z[p][q].conj()) * (z[p][qq] - z[pp][qq])) * kern(p, pp)
    });

    let bad = |condition: T| Error::IllConditioned {
        condition: condition.to_f64_lossy(),
        threshold: condition_limit.to_f64_lossy(),
    };
    let a_inv = a.inverse_hpd().map_err(|_| bad(T::infinity()))?;
    let condition = a.norm1() * a_inv.norm1();
    if !(condition <= condition_limit) {
        return Err(bad(condition));
    }

    let lambda_inf = c.sub(&b.adjoint().matmul(&a_inv).matmul(&b)).hermitian_part();
    let lambda = CMatrix::from_fn(n * k * m, n * k * m, |row, col| {
        let (pj, q) = (row / m, row % m);
        let (p, j) = (pj / k, pj % k);
        let (ppj, qq) = (col / m, col % m);
        let (pp, jj) = (ppj / k, ppj % k);
        if j == jj {
            lambda_inf[(p * m + q, pp * m + qq)]
        } else {
            Complex::zero()
        }
    });

    Ok(CovarianceBundle {
        n,
        k,
        m,
        a,
        b,
        c,
        lambda_inf,
        lambda,
        condition,
    })
}

/// Two-point scalars at scaled distance `r`.
///
/// `p`, `q`, `r`, `s` are the nonzero entries of `Λ∞` for the standard pair,
/// `t = p² − q²` and `det_a = 1 − e^{−r²}`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PairKernel<T> {
    pub distance: T,
    pub p: T,
    pub q: T,
    pub r: T,
    pub s: T,
    pub t: T,
    pub det_a: T,
}

impl<T: Real> PairKernel<T> {
    pub fn widen(&self) -> PairKernel<T::Wide> {
        PairKernel {
            distance: self.distance.widen(),
            p: self.p.widen(),
            q: self.q.widen(),
            r: self.r.widen(),
            s: self.s.widen(),
            t: self.t.widen(),
            det_a: self.det_a.widen(),
        }
    }
}

/// `e^x − 1 − x` without cancellation near zero.
fn exp_tail2<T: Real>(x: T) -> T {
    if x.abs() < T::lit(0.5) {
        let mut term = x * x / T::lit(2.0);
        let mut sum = term;
        let mut n = 2.0;
        while term.abs() > T::epsilon() * sum.abs() {
            n += 1.0;
            term = term * x / T::lit(n);
            sum = sum + term;
        }
        sum
    } else {
        x.exp_m1() - x
    }
}

/// `sinh(x) − x` without cancellation near zero.
fn sinh_tail<T: Real>(x: T) -> T {
    if x.abs() < T::lit(0.5) {
        let mut term = x * x * x / T::lit(6.0);
        let mut sum = term;
        let mut n = 3.0;
        while term.abs() > T::epsilon() * sum.abs() {
            term = term * x * x / T::lit((n + 1.0) * (n + 2.0));
            n += 2.0;
            sum = sum + term;
        }
        sum
    } else {
        x.sinh() - x
    }
}

/// Evaluates `P, Q, R, S, T, det A` at distance `r > 0`.
///
/// The closed forms are rearranged so that none of them cancels
/// catastrophically at small `r`:
/// `P = e^{−u}(e^u − 1 − u)/d`, `Q = −e^{−u/2}(e^{−u} − 1 + u)/d`,
/// `T = 2e^{−u/2}(sinh(u/2) − u/2)(d + u e^{−u/2})/d` with `u = r²`,
/// `d = 1 − e^{−u}`.
pub fn pair_kernel<T: Real>(r: T) -> Result<PairKernel<T>> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::domain(format!("pair distance requires r > 0, got r = {r}")));
    }
    let u = r * r;
    let half_u = u * T::lit(0.5);
    let d = -(-u).exp_m1();
    let s = (-half_u).exp();
    let p = (-u).exp() * exp_tail2(u) / d;
    let q = -s * exp_tail2(-u) / d;
    let t = T::lit(2.0) * s * sinh_tail(half_u) * (d + u * s) / d;
    Ok(PairKernel {
        distance: r,
        p,
        q,
        r: T::one(),
        s,
        t,
        det_a: d,
    })
}
