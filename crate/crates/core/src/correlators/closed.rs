//! Explicit formulas: codimensions 1–3 in terms of `P, Q, R, S`, and the
//! point case `k = m` in both its `v = e^{−r²}` form and its `f_m` form.
//!
//! The polynomial formulas are generic over [`Arith`], so the same code
//! yields floating-point values and exact Laurent expansions.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::kernel::pair_kernel;
use crate::scalar::{Arith, Real};
use crate::series::RationalLaurentSeries;

fn c<A: Arith>(n: i64) -> A {
    A::from_int(n)
}

/// `f_m(x, y) = Σ_{i=1..m} i·x^{i−1}·y^{m−i}`.
pub fn f_m_poly<A: Arith>(m: usize, x: &A, y: &A) -> A {
    let mut acc = c::<A>(0);
    for i in 1..=m {
        let term = x.powi(i as u32 - 1) * y.powi((m - i) as u32);
        acc = acc + c::<A>(i as i64) * term;
    }
    acc
}

/// `(m x^{m+1} + y^{m+1} − (m+1) x^m y) / (x − y)²`; undefined at `x = y`.
pub fn f_m_rational<T: Real>(m: usize, x: T, y: T) -> T {
    let mi = m as i32;
    let num = T::lit(m as f64) * x.powi(mi + 1) + y.powi(mi + 1)
        - T::lit((m + 1) as f64) * x.powi(mi) * y;
    num / (x - y).powi(2)
}

/// `f_m` by whichever form is accurate at `(x, y)`.
pub fn f_m_eval<T: Real>(m: usize, x: T, y: T) -> T {
    let scale = x.abs().max(y.abs());
    if (x - y).abs() > T::lit(0.5) * scale && m >= 1 {
        f_m_rational(m, x, y)
    } else {
        f_m_poly(m, &x, &y)
    }
}

/// `g_l(x, y) = x^l + x^{l−1} y + … + y^l`.
pub fn g_l_poly<A: Arith>(l: usize, x: &A, y: &A) -> A {
    let mut acc = c::<A>(0);
    for i in 0..=l {
        acc = acc + x.powi((l - i) as u32) * y.powi(i as u32);
    }
    acc
}

/// `(x^{l+1} − y^{l+1}) / (x − y)`; undefined at `x = y`.
pub fn g_l_rational<T: Real>(l: usize, x: T, y: T) -> T {
    let e = l as i32 + 1;
    (x.powi(e) - y.powi(e)) / (x - y)
}

pub fn g_l_eval<T: Real>(l: usize, x: T, y: T) -> T {
    let scale = x.abs().max(y.abs());
    if (x - y).abs() > T::lit(0.5) * scale {
        g_l_rational(l, x, y)
    } else {
        g_l_poly(l, &x, &y)
    }
}

/// Checks `1 ≤ k ≤ 3`, `k ≤ m` (which also keeps the `m − 1`, `m − 2`
/// denominators nonzero).
pub fn check_low_codim(k: usize, m: usize) -> Result<()> {
    if !(1..=3).contains(&k) {
        return Err(Error::domain(format!("closed codimension formulas cover k = 1, 2, 3; got k = {k}")));
    }
    if k > m {
        return Err(Error::domain(format!("need k <= m, got k = {k}, m = {m}")));
    }
    Ok(())
}

/// `κ_km` for `k ∈ {1, 2, 3}` as a rational function of `P, Q, R, S, det A`.
pub fn kappa_low_codim_formula<A: Arith>(
    k: usize,
    m: usize,
    p: &A,
    q: &A,
    r: &A,
    s: &A,
    det_a: &A,
) -> Result<A> {
    check_low_codim(k, m)?;
    let mi = m as i64;
    let (m1, m2, m3) = (mi - 1, mi - 2, mi - 3);
    let p2 = p.powi(2);
    let q2 = q.powi(2);
    let value = match k {
        1 => {
            let num = p2
                + c::<A>(2 * m1) * p.clone() * r.clone()
                + q2
                + c::<A>(m1 * m1) * r.powi(2)
                + c::<A>(m1) * s.powi(2);
            num / (c::<A>(mi * mi) * det_a.clone())
        }
        2 => {
            let num = c::<A>(4 * m1) * p2.clone() * r.powi(2)
                + c::<A>(2) * p2 * s.powi(2)
                + c::<A>(4 * m1 * m2) * p.clone() * r.powi(3)
                + c::<A>(4 * m2) * p.clone() * r.clone() * s.powi(2)
                + c::<A>(2 * m1) * q2.clone() * r.powi(2)
                + c::<A>(4) * q2 * s.powi(2)
                + c::<A>(m1 * m2 * m2) * r.powi(4)
                + c::<A>(2 * m2 * m2) * r.powi(2) * s.powi(2)
                + c::<A>(2 * m2) * s.powi(4);
            num / (c::<A>(mi * mi * m1) * det_a.powi(2))
        }
        _ => {
            let num = c::<A>(9 * m1 * m2) * p2.clone() * r.powi(4)
                + c::<A>(12 * m2) * p2.clone() * r.powi(2) * s.powi(2)
                + c::<A>(6) * p2 * s.powi(4)
                + c::<A>(6 * m3 * m1 * m2) * p.clone() * r.powi(5)
                + c::<A>(12 * m3 * m2) * p.clone() * r.powi(3) * s.powi(2)
                + c::<A>(12 * m3) * p.clone() * r.clone() * s.powi(4)
                + c::<A>(3 * m1 * m2) * q2.clone() * r.powi(4)
                + c::<A>(12 * m2) * q2.clone() * r.powi(2) * s.powi(2)
                + c::<A>(18) * q2 * s.powi(4)
                + c::<A>(m1 * m2 * m3 * m3) * r.powi(6)
                + c::<A>(3 * m2 * m3 * m3) * r.powi(4) * s.powi(2)
                + c::<A>(6 * m3 * m3) * r.powi(2) * s.powi(4)
                + c::<A>(6 * m3) * s.powi(6);
            num / (c::<A>(mi * mi * m1 * m2) * det_a.powi(3))
        }
    };
    Ok(value)
}

/// `κ_mm = (P² f_m(R², S²) + Q² f_m(S², R²)) / (m det A^m)`.
pub fn kappa_point_formula<A: Arith>(m: usize, p: &A, q: &A, r: &A, s: &A, det_a: &A) -> A {
    let (r2, s2) = (r.powi(2), s.powi(2));
    let num = p.powi(2) * f_m_poly(m, &r2, &s2) + q.powi(2) * f_m_poly(m, &s2, &r2);
    num / (c::<A>(m as i64) * det_a.powi(m as u32))
}

pub fn kappa_low_codim_closed<T: Real>(r: T, k: usize, m: usize) -> Result<T> {
    check_low_codim(k, m)?;
    let pk = pair_kernel(r)?;
    kappa_low_codim_formula(k, m, &pk.p, &pk.q, &pk.r, &pk.s, &pk.det_a)
}

/// The point pair correlation in closed form in `v = e^{−r²}`.
///
/// For small `u = r²` the numerator is summed from its exact Taylor
/// coefficients, since evaluating it term by term cancels to `O(u⁴)`.
pub fn kappa_point_closed<T: Real>(r: T, m: usize) -> Result<T> {
    if m == 0 {
        return Err(Error::domain("m must be at least 1"));
    }
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::domain(format!("need finite r > 0, got r = {r}")));
    }
    let u = r * r;
    let mf = T::lit(m as f64);
    let one_minus_v = -(-u).exp_m1();
    let small = u.to_f64_lossy() < (0.25f64).min(2.5 / (m as f64 + 2.0));
    let num = if small {
        point_numerator_taylor(u, m)
    } else {
        point_numerator_direct(u, m)
    };
    Ok(num / (mf * one_minus_v.powi(m as i32 + 2)))
}

fn point_numerator_direct<T: Real>(u: T, m: usize) -> T {
    let mf = T::lit(m as f64);
    let v = (-u).exp();
    let one_minus_v = -(-u).exp_m1();
    let one_minus_vm1 = -(-(mf + T::one()) * u).exp_m1();
    // v^{m+1} − v = v (v^m − 1)
    let vm1_minus_v = v * (-mf * u).exp_m1();
    // (v^m − v)/(v − 1) = v (1 + v + … + v^{m−2})
    let mut ratio = T::zero();
    let mut pw = v;
    for _ in 0..m.saturating_sub(1) {
        ratio = ratio + pw;
        pw = pw * v;
    }
    let vm = v.powi(m as i32);
    let bracket = vm * v + vm + (mf + T::one()) * v * ratio + ratio;
    mf * one_minus_vm1 * one_minus_v + u * T::lit(2.0 * m as f64 + 2.0) * vm1_minus_v + u * u * bracket
}

fn point_numerator_taylor<T: Real>(u: T, m: usize) -> T {
    numerator_taylor(m)
        .iter()
        .rev()
        .fold(T::zero(), |acc, &c| acc * u + T::lit(c))
}

const NUMERATOR_TERMS: i64 = 48;

/// Taylor coefficients of the closed-form numerator, from `u⁰` upwards.
fn numerator_taylor(m: usize) -> Vec<f64> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Vec<f64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().expect("cache lock").get(&m) {
        return c.clone();
    }
    type S = RationalLaurentSeries;
    let int = |n: i64| S::constant(BigRational::from_integer(n.into()));
    let n = NUMERATOR_TERMS;
    let u = S::var();
    let v = S::exp_neg(n);
    let one = int(1);
    let vm = v.pow(m as u32);
    let vm1 = vm.clone() * v.clone();
    let mut ratio = S::zero();
    let mut pw = v.clone();
    for _ in 0..m.saturating_sub(1) {
        ratio = ratio + pw.clone();
        pw = pw * v.clone();
    }
    let mi = m as i64;
    let bracket = vm1.clone() + vm + (int(mi + 1) * v.clone() + one.clone()) * ratio;
    let num = int(mi) * (one.clone() - vm1.clone()) * (one - v.clone())
        + u.clone() * int(2 * mi + 2) * (vm1 - v)
        + u.clone() * u * bracket;
    let coeffs: Vec<f64> = (0..n)
        .map(|e| num.coeff(e).map_or(0.0, |c| c.to_f64().unwrap_or(f64::NAN)))
        .collect();
    cache.lock().expect("cache lock").insert(m, coeffs.clone());
    coeffs
}

/// The point pair correlation through `f_m` and the pair scalars.
pub fn kappa_point_kmm<T: Real>(r: T, m: usize) -> Result<T> {
    if m == 0 {
        return Err(Error::domain("m must be at least 1"));
    }
    let pk = pair_kernel(r)?;
    let (r2, s2) = (pk.r * pk.r, pk.s * pk.s);
    let num = pk.p * pk.p * f_m_eval(m, r2, s2) + pk.q * pk.q * f_m_eval(m, s2, r2);
    Ok(num / (T::lit(m as f64) * pk.det_a.powi(m as i32)))
}
