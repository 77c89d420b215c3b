//! Truncated Laurent series in `u = r²` with exact coefficients.
//!
//! A series carries an absolute truncation point: `Σ_{i ≥ v} c_i u^i + O(u^N)`.
//! Arithmetic propagates `N` the usual way, so precision is never invented:
//! `(a + O(u^Na))(b + O(u^Nb)) = ab + O(u^{min(Na + vb, Nb + va)})`.
//! A series without a truncation point is an exact Laurent polynomial.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::correlators::closed::{kappa_low_codim_formula, kappa_point_formula};
use crate::error::{Error, Result};
use crate::scalar::{Arith, Field};

/// Default number of known coefficients for expansions.
pub const DEFAULT_ORDER: usize = 16;

#[derive(Clone, PartialEq)]
pub struct LaurentSeries<C> {
    valuation: i64,
    coeffs: Vec<C>,
    cutoff: Option<i64>,
}

pub type RationalLaurentSeries = LaurentSeries<BigRational>;

impl<C: Field> LaurentSeries<C> {
    /// `Σ coeffs[i] u^{valuation + i}`, exactly.
    pub fn polynomial(valuation: i64, coeffs: Vec<C>) -> Self {
        Self::normalised(valuation, coeffs, None)
    }

    /// `Σ coeffs[i] u^{valuation + i} + O(u^cutoff)`.
    pub fn truncated(valuation: i64, coeffs: Vec<C>, cutoff: i64) -> Self {
        Self::normalised(valuation, coeffs, Some(cutoff))
    }

    pub fn constant(c: C) -> Self {
        Self::polynomial(0, vec![c])
    }

    /// The series variable `u` itself.
    pub fn var() -> Self {
        Self::polynomial(1, vec![C::one()])
    }

    pub fn zero() -> Self {
        Self::polynomial(0, Vec::new())
    }

    /// `exp(a·u) + O(u^cutoff)`.
    pub fn exp_scaled(a: C, cutoff: i64) -> Self {
        let mut coeffs = Vec::new();
        let mut term = C::one();
        for i in 0..cutoff.max(0) {
            if i > 0 {
                term = term * a.clone() / C::from_int(i);
            }
            coeffs.push(term.clone());
        }
        Self::truncated(0, coeffs, cutoff)
    }

    /// `exp(−u) + O(u^cutoff)`.
    pub fn exp_neg(cutoff: i64) -> Self {
        Self::exp_scaled(-C::one(), cutoff)
    }

    fn normalised(valuation: i64, mut coeffs: Vec<C>, cutoff: Option<i64>) -> Self {
        if let Some(n) = cutoff {
            let keep = (n - valuation).max(0) as usize;
            coeffs.truncate(keep);
        }
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(shift) => {
                coeffs.drain(..shift);
                while coeffs.last().is_some_and(|c| c.is_zero()) && cutoff.is_none() {
                    coeffs.pop();
                }
                Self {
                    valuation: valuation + shift as i64,
                    coeffs,
                    cutoff,
                }
            }
            None => Self {
                valuation: cutoff.unwrap_or(0),
                coeffs: Vec::new(),
                cutoff,
            },
        }
    }

    /// Lowest power with a (known) nonzero coefficient; for a zero series
    /// this is the truncation point.
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn cutoff(&self) -> Option<i64> {
        self.cutoff
    }

    /// Number of known coefficients from the valuation on; `None` if exact.
    pub fn order(&self) -> Option<usize> {
        self.cutoff.map(|n| (n - self.valuation).max(0) as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> Option<&C> {
        self.coeffs.first()
    }

    /// Coefficients from the valuation up to the last known power.
    pub fn coeffs(&self) -> Vec<C> {
        let len = match self.cutoff {
            Some(n) => (n - self.valuation).max(0) as usize,
            None => self.coeffs.len(),
        };
        (0..len)
            .map(|i| self.coeffs.get(i).cloned().unwrap_or_else(C::zero))
            .collect()
    }

    /// Coefficient of `u^power`; `None` if the power is at or beyond the
    /// truncation point.
    pub fn coeff(&self, power: i64) -> Option<C> {
        if self.cutoff.is_some_and(|n| power >= n) {
            return None;
        }
        if power < self.valuation {
            return Some(C::zero());
        }
        let idx = (power - self.valuation) as usize;
        Some(self.coeffs.get(idx).cloned().unwrap_or_else(C::zero))
    }

    /// Drops everything at or above `u^cutoff`.
    pub fn truncate(&self, cutoff: i64) -> Self {
        let n = self.cutoff.map_or(cutoff, |c| c.min(cutoff));
        Self::normalised(self.valuation, self.coeffs.clone(), Some(n))
    }

    /// Keeps `order` coefficients from the valuation on.
    pub fn truncate_order(&self, order: usize) -> Self {
        self.truncate(self.valuation + order as i64)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::normalised(
            self.valuation,
            self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
            self.cutoff,
        )
    }

    /// `f(a·u)` for the series `f(u)`.
    pub fn compose_scale(&self, a: &C) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            out.push(c.clone() * pow_int(a, self.valuation + i as i64));
        }
        Self::normalised(self.valuation, out, self.cutoff)
    }

    pub fn add_series(&self, other: &Self) -> Self {
        let cutoff = min_opt(self.cutoff, other.cutoff);
        let lo = self.valuation.min(other.valuation);
        let hi = [
            Some(self.valuation + self.coeffs.len() as i64),
            Some(other.valuation + other.coeffs.len() as i64),
        ]
        .into_iter()
        .flatten()
        .max()
        .unwrap_or(lo);
        let hi = cutoff.map_or(hi, |n| hi.min(n));
        let coeffs = (lo..hi.max(lo))
            .map(|e| self.raw(e) + other.raw(e))
            .collect();
        Self::normalised(lo, coeffs, cutoff)
    }

    fn raw(&self, power: i64) -> C {
        if power < self.valuation {
            return C::zero();
        }
        self.coeffs
            .get((power - self.valuation) as usize)
            .cloned()
            .unwrap_or_else(C::zero)
    }

    pub fn neg_series(&self) -> Self {
        Self {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            cutoff: self.cutoff,
        }
    }

    pub fn mul_series(&self, other: &Self) -> Self {
        let cutoff = min_opt(
            self.cutoff.map(|n| n + other.valuation),
            other.cutoff.map(|n| n + self.valuation),
        );
        let valuation = self.valuation + other.valuation;
        if self.is_zero() || other.is_zero() {
            return Self::normalised(valuation, Vec::new(), cutoff);
        }
        let full = self.coeffs.len() + other.coeffs.len() - 1;
        let len = cutoff.map_or(full, |n| full.min((n - valuation).max(0) as usize));
        let mut coeffs = vec![C::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::normalised(valuation, coeffs, cutoff)
    }

    /// Division; the divisor's `u^valuation` is factored out before its unit
    /// part is inverted. An exact non-monomial divisor of an exact dividend
    /// yields `DEFAULT_ORDER` known coefficients.
    pub fn try_div(&self, other: &Self) -> Result<Self> {
        let Some(b0) = other.coeffs.first() else {
            return Err(Error::ZeroDivisor);
        };
        let valuation = self.valuation - other.valuation;
        let rel_other = other.cutoff.map(|n| n - other.valuation);
        let mut cutoff = min_opt(
            self.cutoff.map(|n| n - other.valuation),
            rel_other.map(|rel| valuation + rel),
        );
        if cutoff.is_none() && other.coeffs.len() > 1 {
            cutoff = Some(valuation + DEFAULT_ORDER as i64);
        }
        if self.is_zero() {
            return Ok(Self::normalised(valuation, Vec::new(), cutoff));
        }
        let len = cutoff.map_or(self.coeffs.len(), |n| (n - valuation).max(0) as usize);

        // Unit-part inverse: c_0 = 1/b_0, c_n = −(1/b_0) Σ_{i=1..n} b_i c_{n−i}.
        let inv_b0 = C::one() / b0.clone();
        let mut inv = Vec::with_capacity(len);
        for n in 0..len {
            if n == 0 {
                inv.push(inv_b0.clone());
                continue;
            }
            let mut acc = C::zero();
            for i in 1..=n.min(other.coeffs.len() - 1) {
                acc = acc + other.coeffs[i].clone() * inv[n - i].clone();
            }
            inv.push(-(acc * inv_b0.clone()));
        }
        let mut coeffs = vec![C::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            for (j, b) in inv.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Ok(Self::normalised(valuation, coeffs, cutoff))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(C::one());
        for _ in 0..e {
            acc = acc.mul_series(self);
        }
        acc
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn pow_int<C: Field>(a: &C, e: i64) -> C {
    let mut acc = C::one();
    for _ in 0..e.unsigned_abs() {
        acc = acc * a.clone();
    }
    if e < 0 {
        C::one() / acc
    } else {
        acc
    }
}

impl<C: Field> Add for LaurentSeries<C> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        self.add_series(&rhs)
    }
}

impl<C: Field> Sub for LaurentSeries<C> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self.add_series(&rhs.neg_series())
    }
}

impl<C: Field> Neg for LaurentSeries<C> {
    type Output = Self;

    fn neg(self) -> Self {
        self.neg_series()
    }
}

impl<C: Field> Mul for LaurentSeries<C> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        self.mul_series(&rhs)
    }
}

/// # Panics
///
/// Panics on division by the zero series; use [`LaurentSeries::try_div`] to
/// handle that case.
impl<C: Field> Div for LaurentSeries<C> {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        self.try_div(&rhs).expect("series division")
    }
}

impl<C: Field> Arith for LaurentSeries<C> {
    fn from_int(n: i64) -> Self {
        Self::constant(<C as Field>::from_int(n))
    }

    fn powi(&self, e: u32) -> Self {
        self.pow(e)
    }
}

impl<C: Field + fmt::Display> fmt::Display for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*u^{}", self.valuation + i as i64)?;
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(n) = self.cutoff {
            write!(f, " + O(u^{n})")?;
        }
        Ok(())
    }
}

impl<C: Field> fmt::Debug for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LaurentSeries")
            .field("valuation", &self.valuation)
            .field("coeffs", &self.coeffs)
            .field("cutoff", &self.cutoff)
            .finish()
    }
}

/// Wire form: `{"var":"u","valuation":v,"coeffs":["1/2","-1/36",…]}`.
///
/// `coeffs` lists every known coefficient from the valuation up to the
/// truncation point, zeros included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesRecord {
    pub var: String,
    pub valuation: i64,
    pub coeffs: Vec<String>,
}

impl RationalLaurentSeries {
    pub fn to_record(&self) -> SeriesRecord {
        SeriesRecord {
            var: "u".to_string(),
            valuation: self.valuation,
            coeffs: self.coeffs().iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("series record serialises")
    }

    /// Reads a record back; the truncation point is taken to be just past
    /// the last listed coefficient.
    pub fn from_record(rec: &SeriesRecord) -> Result<Self> {
        if rec.var != "u" {
            return Err(Error::domain(format!("series variable must be \"u\", got {:?}", rec.var)));
        }
        let coeffs = rec
            .coeffs
            .iter()
            .map(|s| {
                s.parse::<BigRational>()
                    .map_err(|_| Error::domain(format!("bad rational coefficient {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let cutoff = rec.valuation + coeffs.len() as i64;
        Ok(Self::truncated(rec.valuation, coeffs, cutoff))
    }

    /// Evaluates the known part at `u` in floating point.
    pub fn eval_f64(&self, u: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_f64().unwrap_or(f64::NAN) * u.powi((self.valuation + i as i64) as i32))
            .sum()
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact expansions of the two-point scalars in `u = r²`.
#[derive(Clone, Debug)]
pub struct PqrsSeries {
    pub p: RationalLaurentSeries,
    pub q: RationalLaurentSeries,
    pub r: RationalLaurentSeries,
    pub s: RationalLaurentSeries,
    pub det_a: RationalLaurentSeries,
}

/// `P`, `Q`, `S` and `det A` with `order` known coefficients each (`R = 1`
/// is exact).
pub fn pqrs_series(order: usize) -> Result<PqrsSeries> {
    if order < 2 {
        return Err(Error::domain(format!("pqrs_series needs order >= 2, got {order}")));
    }
    let cutoff = order as i64 + 4;
    let one = RationalLaurentSeries::constant(rat(1, 1));
    let u = RationalLaurentSeries::var();
    let e = RationalLaurentSeries::exp_neg(cutoff);
    let half = RationalLaurentSeries::exp_scaled(rat(-1, 2), cutoff);
    let d = one.clone() - e.clone();
    let p = (d.clone() - u.clone() * e).try_div(&d)?;
    let q = half.clone() * (d.clone() - u).try_div(&d)?;
    Ok(PqrsSeries {
        p: p.truncate_order(order),
        q: q.truncate_order(order),
        r: one,
        s: half.truncate_order(order),
        det_a: d.truncate_order(order),
    })
}

/// Laurent expansion of `κ_km` in `u`, with `order` known coefficients.
///
/// Codimensions 1–3 use the explicit polynomial formulas; the point case
/// `k = m > 3` uses `(P² f_m(R², S²) + Q² f_m(S², R²)) / (m det A^m)`.
pub fn kappa_series(k: usize, m: usize, order: usize) -> Result<RationalLaurentSeries> {
    if order < 4 {
        return Err(Error::domain(format!("kappa_series needs order >= 4, got {order}")));
    }
    let supported = k >= 1 && k <= m && (k <= 3 || k == m);
    if !supported {
        return Err(Error::UnsupportedSeries { k, m });
    }
    // Each division by det A (valuation 1) and each cancellation in the
    // numerators costs relative precision; 2m + 8 covers every case here.
    let working = order + 2 * m + 8;
    let pq = pqrs_series(working)?;
    let series = if k <= 3 {
        kappa_low_codim_formula(k, m, &pq.p, &pq.q, &pq.r, &pq.s, &pq.det_a)?
    } else {
        kappa_point_formula(m, &pq.p, &pq.q, &pq.r, &pq.s, &pq.det_a)
    };
    match series.order() {
        Some(have) if have < order => Err(Error::Consistency(format!(
            "κ_{k}{m} series kept only {have} of {order} coefficients"
        ))),
        _ => Ok(series.truncate_order(order)),
    }
}

/// True iff every coefficient of `κ_mm` at a power of `u` whose parity
/// differs from that of `m` is exactly zero.
pub fn parity_check(m: usize, order: usize) -> Result<bool> {
    if m == 0 {
        return Err(Error::domain("parity_check needs m >= 1"));
    }
    let s = kappa_series(m, m, order)?;
    let v = s.valuation();
    Ok(s
        .coeffs()
        .iter()
        .enumerate()
        .all(|(i, c)| (v + i as i64 - m as i64).rem_euclid(2) == 0 || c.is_zero()))
}
