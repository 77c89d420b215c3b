//! The point case by Wick's formula: `G_m` as a sum of moments, each a
//! product of `2×2` permanents for the standard pair.

use rayon::prelude::*;

use crate::correlators::closed::f_m_eval;
use crate::error::{Error, Result};
use crate::kernel::PairKernel;
use crate::scalar::Real;

/// Largest `m` the enumeration accepts; `(m!)³` triples are visited.
pub const MAX_WICK_M: usize = 5;

/// One moment `M_{αβμν}`; permutations are zero-based.
#[derive(Clone, Debug, PartialEq)]
pub struct WickTerm<T> {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    pub mu: Vec<usize>,
    pub nu: Vec<usize>,
    pub value: T,
}

impl<T: Real> WickTerm<T> {
    /// Evaluates the product of `2×2` permanents.
    pub fn new(pk: &PairKernel<T>, alpha: &[usize], beta: &[usize], mu: &[usize], nu: &[usize]) -> Self {
        let (p2, q2) = (pk.p * pk.p, pk.q * pk.q);
        let (r2, s2) = (pk.r * pk.r, pk.s * pk.s);
        let mut value = T::one();
        for q in 0..alpha.len() {
            let (direct, crossed) = if q == 0 { (p2, q2) } else { (r2, s2) };
            let mut f = T::zero();
            if alpha[q] == mu[q] && beta[q] == nu[q] {
                f = f + direct;
            }
            if alpha[q] == nu[q] && beta[q] == mu[q] {
                f = f + crossed;
            }
            value = value * f;
            if value.is_zero() {
                break;
            }
        }
        Self {
            alpha: alpha.to_vec(),
            beta: beta.to_vec(),
            mu: mu.to_vec(),
            nu: nu.to_vec(),
            value,
        }
    }

    /// `{μ_q, ν_q} = {α_q, β_q}` for every `q`.
    pub fn is_admissible(&self) -> bool {
        (0..self.alpha.len()).all(|q| {
            (self.mu[q] == self.alpha[q] && self.nu[q] == self.beta[q])
                || (self.mu[q] == self.beta[q] && self.nu[q] == self.alpha[q])
        })
    }

    /// `(−1)^{α+β+μ+ν}`.
    pub fn sign(&self) -> i32 {
        sign(&self.alpha) * sign(&self.beta) * sign(&self.mu) * sign(&self.nu)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WickSummary<T> {
    pub g: T,
    pub nonzero_terms: usize,
    pub visited_terms: usize,
}

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..m).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..m).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..m).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

pub fn sign(perm: &[usize]) -> i32 {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `G_m` by enumerating `(β, μ, ν)` with `α` the identity, scaled by `m!`.
///
/// Every moment with a nonzero value is checked to carry a positive sign;
/// a violation is reported as an internal-consistency error.
pub fn g_wick_summary<T: Real>(pk: &PairKernel<T>, m: usize) -> Result<WickSummary<T>> {
    if m == 0 {
        return Err(Error::domain("m must be at least 1"));
    }
    if m > MAX_WICK_M {
        return Err(Error::Capacity(format!(
            "Wick enumeration is limited to m <= {MAX_WICK_M} (got {m}); use the closed G_m formula instead"
        )));
    }
    let perms = permutations(m);
    let alpha: Vec<usize> = (0..m).collect();

    // One chunk per β, reduced in β order so the sum is bit-stable.
    let partials: Vec<Result<(T, usize)>> = perms
        .par_iter()
        .map(|beta| {
            let mut sum = T::zero();
            let mut nonzero = 0;
            for mu in &perms {
                for nu in &perms {
                    let term = WickTerm::new(pk, &alpha, beta, mu, nu);
                    if term.value.is_zero() {
                        continue;
                    }
                    if term.sign() != 1 {
                        return Err(Error::Consistency(format!(
                            "negative sign on nonzero moment β={beta:?} μ={mu:?} ν={nu:?}"
                        )));
                    }
                    nonzero += 1;
                    sum = sum + term.value;
                }
            }
            Ok((sum, nonzero))
        })
        .collect();

    let mut g = T::zero();
    let mut nonzero_terms = 0;
    for part in partials {
        let (s, n) = part?;
        g = g + s;
        nonzero_terms += n;
    }
    let m_fact = (1..=m).fold(T::one(), |acc, i| acc * T::lit(i as f64));
    Ok(WickSummary {
        g: g * m_fact,
        nonzero_terms,
        visited_terms: perms.len().pow(3),
    })
}

pub fn g_wick_enumerate<T: Real>(pk: &PairKernel<T>, m: usize) -> Result<T> {
    g_wick_summary(pk, m).map(|s| s.g)
}

/// `G_m = (m−1)! m! [P² f_m(R², S²) + Q² f_m(S², R²)]`.
pub fn g_lemma<T: Real>(pk: &PairKernel<T>, m: usize) -> T {
    let fact = |n: usize| (1..=n).fold(T::one(), |acc, i| acc * T::lit(i as f64));
    let (r2, s2) = (pk.r * pk.r, pk.s * pk.s);
    let bracket = pk.p * pk.p * f_m_eval(m, r2, s2) + pk.q * pk.q * f_m_eval(m, s2, r2);
    fact(m - 1) * fact(m) * bracket
}

/// `κ_mm = G_m / ((m!)² det A^m)` with `G_m` from the enumeration.
pub fn kappa_point_wick<T: Real>(pk: &PairKernel<T>, m: usize) -> Result<T> {
    let g = g_wick_enumerate(pk, m)?;
    let m_fact = (1..=m).fold(T::one(), |acc, i| acc * T::lit(i as f64));
    Ok(g / (m_fact * m_fact * pk.det_a.powi(m as i32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::pair_kernel;

    #[test]
    fn permutation_listing() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[5], vec![2, 1, 0]);
        assert_eq!(sign(&[1, 0, 2]), -1);
        assert_eq!(sign(&[1, 2, 0]), 1);
        assert_eq!(permutations(1), vec![vec![0]]);
    }

    #[test]
    fn g1_is_p2_plus_q2() {
        let pk = pair_kernel(0.8f64).unwrap();
        let g = g_wick_enumerate(&pk, 1).unwrap();
        assert!((g - (pk.p * pk.p + pk.q * pk.q)).abs() < 1e-15);
    }

    #[test]
    fn enumeration_matches_lemma() {
        for m in 1..=4 {
            for r in [0.5f64, 1.0, 2.0] {
                let pk = pair_kernel(r).unwrap();
                let a = g_wick_enumerate(&pk, m).unwrap();
                let b = g_lemma(&pk, m);
                assert!((a - b).abs() <= 1e-12 * b.abs(), "m={m} r={r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn nonzero_terms_are_admissible() {
        let pk = pair_kernel(1.3f64).unwrap();
        let perms = permutations(3);
        let alpha = vec![0, 1, 2];
        for beta in &perms {
            for mu in &perms {
                for nu in &perms {
                    let t = WickTerm::new(&pk, &alpha, beta, mu, nu);
                    assert!(t.value >= 0.0);
                    if t.value != 0.0 {
                        assert!(t.is_admissible());
                        assert_eq!(t.sign(), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn capacity_limit() {
        let pk = pair_kernel(1.0f64).unwrap();
        assert!(matches!(g_wick_enumerate(&pk, 6), Err(Error::Capacity(_))));
    }
}
