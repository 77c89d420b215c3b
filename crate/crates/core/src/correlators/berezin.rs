//! Correlation functions as Berezin integrals over fermion pairs.
//!
//! Inputs are evaluated in `T`; the Grassmann arithmetic runs in `T::Wide`.

use num_complex::Complex;
use num_traits::{Float, One, Zero};

use crate::error::{Error, Result};
use crate::grassmann::{check_capacity, GrassmannEven, GrassmannMatrix};
use crate::kernel::{build_covariance, pair_kernel, PairKernel, PointConfig};
use crate::scalar::{recip, Real};

/// Largest accepted `|Im| / max(1, |Re|)` of a Berezin result.
pub const IMAG_RESIDUE_LIMIT: f64 = 1e-10;

pub(crate) fn check_km(k: usize, m: usize) -> Result<()> {
    if k == 0 || k > m {
        return Err(Error::domain(format!("need 1 <= k <= m, got k = {k}, m = {m}")));
    }
    Ok(())
}

/// `(m − k)! / m!` as a float.
pub(crate) fn falling_ratio<T: Real>(k: usize, m: usize) -> T {
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * recip(&T::lit((m - i) as f64));
    }
    acc
}

/// `n`-point correlation of the simultaneous zeros of `k` sections at the
/// configuration `cfg`.
pub fn k_npoint_berezin<T: Real>(cfg: &PointConfig<T>, k: usize) -> Result<T> {
    let (n, m) = (cfg.n(), cfg.m());
    check_km(k, m)?;
    let pairs = n * k;
    check_capacity(pairs)?;
    let bundle = build_covariance(cfg, k)?;
    let widen = |z: Complex<T>| Complex::new(z.re.widen(), z.im.widen());
    let fermion = |p: usize, j: usize| p * k + j;

    // (ΛΩ)[(p,j,q),(p',j',q')] = Λ∞[(p,q),(p',q')] η^{p'}_{j'} η̄^{p'}_j
    let dim = n * k * m;
    let split = |idx: usize| (idx / (k * m), (idx / m) % k, idx % m);
    let mat = GrassmannMatrix::from_fn(dim, pairs, |row, col| {
        let (p, j, q) = split(row);
        let (pp, jj, qq) = split(col);
        let lam = widen(bundle.lambda_inf[(p * m + q, pp * m + qq)]);
        let mut e = GrassmannEven::eta_etabar(pairs, fermion(pp, jj), fermion(pp, j), lam);
        if row == col {
            e = &e + &GrassmannEven::one(pairs);
        }
        e
    })?;
    let integral = mat.det()?.inverse()?.berezin();

    let det_a = bundle.det_a().widen();
    let mut pref = T::Wide::one();
    for _ in 0..n {
        pref = pref * falling_ratio::<T::Wide>(k, m);
    }
    let value = Complex::new(pref * recip(&Float::powi(det_a, k as i32)), T::Wide::zero()) * integral;
    real_part::<T>(value)
}

fn real_part<T: Real>(z: Complex<T::Wide>) -> Result<T> {
    let (re, im) = (T::narrow(z.re), T::narrow(z.im));
    let bound = T::lit(IMAG_RESIDUE_LIMIT) * re.abs().max(T::one());
    if im.abs() > bound {
        return Err(Error::Consistency(format!(
            "Berezin integral has imaginary part {im} against real part {re}"
        )));
    }
    Ok(re)
}

/// `Ω_p` for point `p` of a pair: `(Ω_p)[j][j'] = η^p_{j'} η̄^p_j` on `2k`
/// fermion pairs.
fn omega<T: Real>(k: usize, p: usize) -> Result<GrassmannMatrix<T>> {
    let pairs = 2 * k;
    GrassmannMatrix::from_fn(k, pairs, |j, jj| {
        GrassmannEven::eta_etabar(pairs, p * k + jj, p * k + j, T::one())
    })
}

/// `Φ = det[I + P(Ω₁+Ω₂) + TΩ₁Ω₂]` and `Ψ = det[I + Ω₁ + Ω₂ + (1−e^{−r²})Ω₁Ω₂]`.
pub fn phi_psi<T: Real>(pk: &PairKernel<T>, k: usize) -> Result<(GrassmannEven<T>, GrassmannEven<T>)> {
    let pairs = 2 * k;
    check_capacity(pairs)?;
    let o1 = omega::<T>(k, 0)?;
    let o2 = omega::<T>(k, 1)?;
    let sum = o1.try_add(&o2)?;
    let prod = o1.try_mul(&o2)?;
    let id = GrassmannMatrix::identity(k, pairs)?;
    let phi = id
        .try_add(&sum.scale(&pk.p))?
        .try_add(&prod.scale(&pk.t))?
        .det()?;
    let psi = id
        .try_add(&sum)?
        .try_add(&prod.scale(&pk.det_a))?
        .det()?;
    Ok((phi, psi))
}

fn pair_prefactor<T: Real>(pk: &PairKernel<T>, k: usize, m: usize) -> T {
    let ratio = falling_ratio::<T>(k, m);
    ratio * ratio * recip(&pk.det_a.powi(k as i32))
}

/// Pair correlation `κ_km(r)` as `∫ 1/(Φ Ψ^{m−1})`.
pub fn kappa_pair_berezin<T: Real>(r: T, k: usize, m: usize) -> Result<T> {
    check_km(k, m)?;
    let pk = pair_kernel(r)?.widen();
    let (phi, psi) = phi_psi(&pk, k)?;
    let denom = phi.try_mul(&psi.pow(m - 1))?;
    Ok(T::narrow(pair_prefactor(&pk, k, m) * denom.inverse()?.berezin()))
}

/// `C(m + t − 2, t)` for `t ≥ 0`, `m ≥ 1`, with `C(t − 1, t) = [t = 0]`.
pub fn expansion_binomial<T: Real>(m: usize, t: usize) -> T {
    let top = m as i64 + t as i64 - 2;
    let mut acc = T::one();
    for i in 0..t as i64 {
        acc = acc * T::lit((top - i) as f64) * recip(&T::lit((i + 1) as f64));
    }
    acc
}

/// The `2k + 1` weighted integrals `C(m+t−2, t) ∫ Φ^{−1} (1 − Ψ)^t`,
/// `t = 0..2k`, before the pair prefactor.
pub fn expansion_terms<T: Real>(pk: &PairKernel<T>, k: usize, m: usize) -> Result<Vec<T>> {
    check_km(k, m)?;
    let (phi, psi) = phi_psi(pk, k)?;
    let phi_inv = phi.inverse()?;
    let one_minus_psi = GrassmannEven::one(2 * k).try_sub(&psi)?;
    let mut power = GrassmannEven::one(2 * k);
    let mut terms = Vec::with_capacity(2 * k + 1);
    for t in 0..=2 * k {
        if t > 0 {
            power = power.try_mul(&one_minus_psi)?;
        }
        let weight = expansion_binomial::<T>(m, t);
        let integral = if weight.is_zero() {
            T::zero()
        } else {
            phi_inv.berezin_of_product(&power)?
        };
        terms.push(weight * integral);
    }
    Ok(terms)
}

/// Pair correlation `κ_km(r)` through the binomial expansion of `Ψ^{1−m}`.
pub fn kappa_pair_expansion<T: Real>(r: T, k: usize, m: usize) -> Result<T> {
    check_km(k, m)?;
    let pk = pair_kernel(r)?.widen();
    let terms = expansion_terms(&pk, k, m)?;
    let sum = terms.into_iter().fold(T::Wide::zero(), |a, b| a + b);
    Ok(T::narrow(pair_prefactor(&pk, k, m) * sum))
}
