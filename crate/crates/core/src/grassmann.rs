//! Even elements of a finite Grassmann algebra and Berezin integration.
//!
//! The algebra on `l` fermion pairs has `2l` generators ordered
//! `η_0, η̄_0, η_1, η̄_1, …`; generator `η_i` is bit `2i` of a blade mask and
//! `η̄_i` is bit `2i + 1`. A blade is stored in that canonical order and every
//! product records the sign of the merge.
//!
//! Only even elements are represented. They commute with each other, so the
//! determinant of a matrix with even entries is well defined and can be
//! computed by elimination whenever the pivots have an invertible scalar part.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{recip, Field};

/// Largest supported number of fermion pairs (`2l ≤ 32` generators).
pub const MAX_PAIRS: usize = 16;

/// Above this many pair products the product accumulates into a dense buffer.
const DENSE_PRODUCT_THRESHOLD: usize = 1 << 14;
/// Dense accumulation is used only when the algebra has at most `2^20` blades.
const DENSE_MAX_GENERATORS: usize = 20;

pub fn check_capacity(num_pairs: usize) -> Result<()> {
    if num_pairs > MAX_PAIRS {
        return Err(Error::Capacity(format!(
            "{num_pairs} fermion pairs requested, at most {MAX_PAIRS} supported"
        )));
    }
    Ok(())
}

/// A basis monomial: a set of generators in canonical order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Blade(u32);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    pub fn from_mask(mask: u32) -> Self {
        Blade(mask)
    }

    pub fn eta(pair: usize) -> Self {
        Blade(1 << (2 * pair))
    }

    pub fn eta_bar(pair: usize) -> Self {
        Blade(1 << (2 * pair + 1))
    }

    /// The product of all `2l` generators, `η_0 η̄_0 η_1 η̄_1 ⋯`.
    pub fn top(num_pairs: usize) -> Self {
        Blade(((1u64 << (2 * num_pairs)) - 1) as u32)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn grade(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_even(self) -> bool {
        self.grade().is_multiple_of(2)
    }

    /// Product of two blades: `None` if a generator repeats, otherwise the
    /// merged blade and whether the merge is an odd permutation.
    pub fn product(self, other: Blade) -> Option<(Blade, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        Some((Blade(self.0 | other.0), merge_parity(self.0, other.0)))
    }
}

/// Parity of the number of transpositions needed to sort `a · b` into
/// canonical order: the count of pairs `x ∈ a`, `y ∈ b` with `x > y`.
#[inline]
fn merge_parity(a: u32, b: u32) -> bool {
    let a = a as u64;
    let mut rest = b;
    let mut parity = 0u32;
    while rest != 0 {
        let y = rest.trailing_zeros();
        parity ^= (a >> (y + 1)).count_ones();
        rest &= rest - 1;
    }
    parity & 1 == 1
}

/// Even element of the Grassmann algebra on `num_pairs` fermion pairs.
#[derive(Clone, PartialEq)]
pub struct GrassmannEven<C> {
    num_pairs: usize,
    terms: BTreeMap<u32, C>,
}

impl<C: Field> GrassmannEven<C> {
    /// # Panics
    ///
    /// Panics if `num_pairs > MAX_PAIRS`; use [`check_capacity`] first when
    /// the size comes from user input.
    pub fn zero(num_pairs: usize) -> Self {
        assert!(num_pairs <= MAX_PAIRS, "at most {MAX_PAIRS} fermion pairs");
        Self {
            num_pairs,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(num_pairs: usize) -> Self {
        Self::scalar(num_pairs, C::one())
    }

    pub fn scalar(num_pairs: usize, c: C) -> Self {
        Self::monomial(num_pairs, Blade::SCALAR, c)
    }

    /// `c · blade`.
    ///
    /// # Panics
    ///
    /// Panics if the blade is odd or uses generators beyond `2 * num_pairs`.
    pub fn monomial(num_pairs: usize, blade: Blade, c: C) -> Self {
        let mut out = Self::zero(num_pairs);
        assert!(blade.is_even(), "odd blade {blade:?} in even element");
        assert!(
            (blade.0 as u64) < (1u64 << (2 * num_pairs)),
            "blade {blade:?} outside algebra on {num_pairs} pairs"
        );
        if !c.is_zero() {
            out.terms.insert(blade.0, c);
        }
        out
    }

    /// `c · η_i η̄_j`, with the sign from bringing it into canonical order.
    pub fn eta_etabar(num_pairs: usize, i: usize, j: usize, c: C) -> Self {
        match Blade::eta(i).product(Blade::eta_bar(j)) {
            Some((blade, odd)) => Self::monomial(num_pairs, blade, if odd { -c } else { c }),
            None => unreachable!("η and η̄ never share a bit"),
        }
    }

    /// Builds an element from `(blade, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(num_pairs: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Blade, C)>,
    {
        let mut out = Self::zero(num_pairs);
        for (blade, c) in terms {
            out.add_term(blade, c);
        }
        out
    }

    fn add_term(&mut self, blade: Blade, c: C) {
        assert!(blade.is_even(), "odd blade {blade:?} in even element");
        let entry = self.terms.entry(blade.0).or_insert_with(C::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.terms.remove(&blade.0);
        }
    }

    pub fn num_pairs(&self) -> usize {
        self.num_pairs
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &C)> + '_ {
        self.terms.iter().map(|(&m, c)| (Blade(m), c))
    }

    pub fn coeff(&self, blade: Blade) -> C {
        self.terms.get(&blade.0).cloned().unwrap_or_else(C::zero)
    }

    pub fn scalar_part(&self) -> C {
        self.coeff(Blade::SCALAR)
    }

    /// The element with its scalar part removed.
    pub fn nilpotent_part(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&0);
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_pairs);
        }
        let terms = self
            .terms
            .iter()
            .map(|(&m, v)| (m, v.clone() * c.clone()))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Self {
            num_pairs: self.num_pairs,
            terms,
        }
    }

    pub fn map_coeffs<D: Field>(&self, f: impl Fn(&C) -> D) -> GrassmannEven<D> {
        let terms = self
            .terms
            .iter()
            .map(|(&m, v)| (m, f(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        GrassmannEven {
            num_pairs: self.num_pairs,
            terms,
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.num_pairs != other.num_pairs {
            return Err(Error::MismatchedGenerators {
                left: self.num_pairs,
                right: other.num_pairs,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(Blade(m), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(Blade(m), -c.clone());
        }
        Ok(out)
    }

    /// Grassmann product. Blade pairs sharing a generator vanish; the others
    /// pick up the parity of their merge.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let l = self.num_pairs;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(l));
        }
        let rhs: Vec<(u32, &C)> = other.terms.iter().map(|(&m, c)| (m, c)).collect();
        let work = self.terms.len() * rhs.len();

        let terms = if work >= DENSE_PRODUCT_THRESHOLD && 2 * l <= DENSE_MAX_GENERATORS {
            let size = 1usize << (2 * l);
            let mut acc: Vec<Option<C>> = vec![None; size];
            for (&ma, ca) in &self.terms {
                for &(mb, cb) in &rhs {
                    if ma & mb != 0 {
                        continue;
                    }
                    let v = ca.clone() * cb.clone();
                    let v = if merge_parity(ma, mb) { -v } else { v };
                    let slot = &mut acc[(ma | mb) as usize];
                    *slot = Some(match slot.take() {
                        Some(prev) => prev + v,
                        None => v,
                    });
                }
            }
            acc.into_iter()
                .enumerate()
                .filter_map(|(m, c)| c.filter(|c| !c.is_zero()).map(|c| (m as u32, c)))
                .collect()
        } else {
            let mut acc: HashMap<u32, C> = HashMap::new();
            for (&ma, ca) in &self.terms {
                for &(mb, cb) in &rhs {
                    if ma & mb != 0 {
                        continue;
                    }
                    let v = ca.clone() * cb.clone();
                    let v = if merge_parity(ma, mb) { -v } else { v };
                    acc.entry(ma | mb)
                        .and_modify(|prev| *prev = prev.clone() + v.clone())
                        .or_insert(v);
                }
            }
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
        };
        Ok(Self { num_pairs: l, terms })
    }

    /// Inverse of an element with nonzero scalar part `a₀`:
    /// `a₀⁻¹ Σ_t (−N/a₀)^t` with `N = a − a₀`. The sum stops once the power
    /// vanishes, at the latest after `l` terms.
    pub fn inverse(&self) -> Result<Self> {
        let a0 = self.scalar_part();
        if a0.is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv0 = recip(&a0);
        let step = self.nilpotent_part().scale(&(-inv0.clone()));
        let mut acc = Self::one(self.num_pairs);
        let mut power = Self::one(self.num_pairs);
        for _ in 0..self.num_pairs {
            power = power.try_mul(&step)?;
            if power.is_zero() {
                break;
            }
            acc = acc.try_add(&power)?;
        }
        Ok(acc.scale(&inv0))
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.num_pairs);
        for _ in 0..e {
            if acc.is_zero() {
                break;
            }
            acc = &acc * self;
        }
        acc
    }

    /// Berezin integral: the top-degree coefficient, oriented so that
    /// `∏_i η̄_i η_i` integrates to 1. In canonical order that monomial is
    /// `(−1)^l η_0 η̄_0 ⋯ η_{l−1} η̄_{l−1}`, which makes
    /// `∫ exp(−Σ η_i H_ij η̄_j) = det H` hold for every `l`.
    pub fn berezin(&self) -> C {
        let top = self.coeff(Blade::top(self.num_pairs));
        orient(top, self.num_pairs)
    }

    /// `berezin(self · other)` without forming the product.
    pub fn berezin_of_product(&self, other: &Self) -> Result<C> {
        self.check_same(other)?;
        let top = Blade::top(self.num_pairs).0;
        let mut acc = C::zero();
        for (&ma, ca) in &self.terms {
            if let Some(cb) = other.terms.get(&(top ^ ma)) {
                let v = ca.clone() * cb.clone();
                acc = if merge_parity(ma, top ^ ma) { acc - v } else { acc + v };
            }
        }
        Ok(orient(acc, self.num_pairs))
    }
}

fn orient<C: Field>(top: C, num_pairs: usize) -> C {
    if num_pairs % 2 == 1 {
        -top
    } else {
        top
    }
}

impl<C: fmt::Debug> fmt::Debug for GrassmannEven<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})")?;
            for bit in 0..32 {
                if m & (1 << bit) != 0 {
                    let bar = if bit % 2 == 1 { "̄" } else { "" };
                    write!(f, "·η{bar}{}", bit / 2)?;
                }
            }
        }
        Ok(())
    }
}

impl<C: Field> Add for &GrassmannEven<C> {
    type Output = GrassmannEven<C>;

    fn add(self, rhs: Self) -> GrassmannEven<C> {
        self.try_add(rhs).expect("Grassmann addition")
    }
}

impl<C: Field> Sub for &GrassmannEven<C> {
    type Output = GrassmannEven<C>;

    fn sub(self, rhs: Self) -> GrassmannEven<C> {
        self.try_sub(rhs).expect("Grassmann subtraction")
    }
}

impl<C: Field> Mul for &GrassmannEven<C> {
    type Output = GrassmannEven<C>;

    fn mul(self, rhs: Self) -> GrassmannEven<C> {
        self.try_mul(rhs).expect("Grassmann product")
    }
}

impl<C: Field> Neg for &GrassmannEven<C> {
    type Output = GrassmannEven<C>;

    fn neg(self) -> GrassmannEven<C> {
        self.scale(&-C::one())
    }
}

/// Square matrix with even Grassmann entries over a shared generator set.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannMatrix<C> {
    dim: usize,
    num_pairs: usize,
    entries: Vec<GrassmannEven<C>>,
}

impl<C: Field> GrassmannMatrix<C> {
    pub fn zeros(dim: usize, num_pairs: usize) -> Result<Self> {
        check_capacity(num_pairs)?;
        Ok(Self {
            dim,
            num_pairs,
            entries: vec![GrassmannEven::zero(num_pairs); dim * dim],
        })
    }

    pub fn identity(dim: usize, num_pairs: usize) -> Result<Self> {
        let mut out = Self::zeros(dim, num_pairs)?;
        for i in 0..dim {
            out.entries[i * dim + i] = GrassmannEven::one(num_pairs);
        }
        Ok(out)
    }

    pub fn from_fn(
        dim: usize,
        num_pairs: usize,
        mut f: impl FnMut(usize, usize) -> GrassmannEven<C>,
    ) -> Result<Self> {
        check_capacity(num_pairs)?;
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let e = f(i, j);
                if e.num_pairs() != num_pairs {
                    return Err(Error::MismatchedGenerators {
                        left: num_pairs,
                        right: e.num_pairs(),
                    });
                }
                entries.push(e);
            }
        }
        Ok(Self {
            dim,
            num_pairs,
            entries,
        })
    }

    /// A matrix of scalars embedded in the algebra on `num_pairs` pairs.
    pub fn from_scalars(num_pairs: usize, rows: &[Vec<C>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::domain("scalar matrix must be square"));
        }
        Self::from_fn(dim, num_pairs, |i, j| {
            GrassmannEven::scalar(num_pairs, rows[i][j].clone())
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_pairs(&self) -> usize {
        self.num_pairs
    }

    pub fn get(&self, i: usize, j: usize) -> &GrassmannEven<C> {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: GrassmannEven<C>) {
        assert_eq!(value.num_pairs(), self.num_pairs);
        self.entries[i * self.dim + j] = value;
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_>>()?;
        Ok(Self { entries, ..*self })
    }

    pub fn scale(&self, c: &C) -> Self {
        Self {
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
            ..*self
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n, self.num_pairs)?;
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.try_mul(b)?;
                    out.entries[i * n + j] = out.entries[i * n + j].try_add(&prod)?;
                }
            }
        }
        Ok(out)
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.num_pairs != other.num_pairs {
            return Err(Error::MismatchedGenerators {
                left: self.num_pairs,
                right: other.num_pairs,
            });
        }
        if self.dim != other.dim {
            return Err(Error::domain(format!(
                "matrix dimensions differ: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// Determinant over the commutative ring of even elements.
    ///
    /// Gaussian elimination; a pivot must have a nonzero scalar part, and a
    /// row swap is attempted before giving up. Zero entries are skipped, so
    /// block-diagonal structure is never filled in.
    pub fn det(&self) -> Result<GrassmannEven<C>> {
        let n = self.dim;
        let l = self.num_pairs;
        let mut rows: Vec<Vec<GrassmannEven<C>>> = (0..n)
            .map(|i| self.entries[i * n..(i + 1) * n].to_vec())
            .collect();
        let mut det = GrassmannEven::one(l);
        let mut negate = false;

        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| !rows[r][col].scalar_part().is_zero())
                .ok_or(Error::SingularPivot { column: col })?;
            if pivot_row != col {
                rows.swap(pivot_row, col);
                negate = !negate;
            }
            let pivot = rows[col][col].clone();
            let pivot_inv = pivot.inverse()?;
            det = det.try_mul(&pivot)?;

            let (upper, lower) = rows.split_at_mut(col + 1);
            let prow = &upper[col];
            for row in lower.iter_mut() {
                if row[col].is_zero() {
                    continue;
                }
                let factor = row[col].try_mul(&pivot_inv)?;
                for j in (col + 1)..n {
                    if prow[j].is_zero() {
                        continue;
                    }
                    row[j] = row[j].try_sub(&factor.try_mul(&prow[j])?)?;
                }
                row[col] = GrassmannEven::zero(l);
            }
        }
        Ok(if negate { -&det } else { det })
    }
}

/// `∫ exp(−⟨Hη, η̄⟩) dη` with `⟨Hη, η̄⟩ = Σ η_i H_ij η̄_j`, one fermion pair
/// per row of `H`. Equals `det H`.
pub fn susy_det<C: Field>(h: &[Vec<C>]) -> Result<C> {
    let l = h.len();
    check_capacity(l)?;
    if h.iter().any(|row| row.len() != l) {
        return Err(Error::domain("susy_det needs a square matrix"));
    }
    let mut quad = GrassmannEven::zero(l);
    for (i, row) in h.iter().enumerate() {
        for (j, hij) in row.iter().enumerate() {
            quad = &quad + &GrassmannEven::eta_etabar(l, i, j, hij.clone());
        }
    }
    // exp(−X) = Σ_{t ≤ l} (−X)^t / t!; only t = l reaches the top degree.
    let minus_quad = -&quad;
    let mut term = GrassmannEven::one(l);
    let mut total = GrassmannEven::one(l);
    for t in 1..=l {
        term = (&term * &minus_quad).scale(&recip(&C::from_int(t as i64)));
        total = &total + &term;
    }
    Ok(total.berezin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_complex::Complex64;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn ee(l: usize, i: usize, j: usize, c: Q) -> GrassmannEven<Q> {
        GrassmannEven::eta_etabar(l, i, j, c)
    }

    #[test]
    fn repeated_generator_vanishes() {
        let a = ee(2, 0, 0, q(1, 1));
        assert!((&a * &a).is_zero());
    }

    #[test]
    fn disjoint_pairs_commute() {
        let a = ee(2, 0, 0, q(1, 1));
        let b = ee(2, 1, 1, q(1, 1));
        let ab = &a * &b;
        assert_eq!(ab, &b * &a);
        assert_eq!(ab.coeff(Blade::top(2)), q(1, 1));
    }

    #[test]
    fn crossed_pairs_pick_up_a_sign() {
        // (η₁η̄₂)(η₂η̄₁) = −η₁η̄₁η₂η̄₂
        let a = ee(2, 0, 1, q(1, 1));
        let b = ee(2, 1, 0, q(1, 1));
        let ab = &a * &b;
        assert_eq!(ab.len(), 1);
        assert_eq!(ab.coeff(Blade::top(2)), q(-1, 1));
    }

    #[test]
    fn eta_etabar_ordering_sign() {
        // η_1 η̄_0 = −η̄_0 η_1 in canonical order (bits 1 < 2)
        let e = ee(2, 1, 0, q(1, 1));
        let (blade, c) = e.terms().next().unwrap();
        assert_eq!(blade.mask(), 0b0110);
        assert_eq!(*c, q(-1, 1));
    }

    #[test]
    fn inverse_of_unit_plus_nilpotent() {
        let a = &GrassmannEven::one(1) + &ee(1, 0, 0, q(1, 1));
        let inv = a.inverse().unwrap();
        assert_eq!(inv, &GrassmannEven::one(1) - &ee(1, 0, 0, q(1, 1)));
        assert_eq!(&a * &inv, GrassmannEven::one(1));
    }

    #[test]
    fn zero_scalar_part_is_not_invertible() {
        let a = ee(1, 0, 0, q(1, 1));
        assert!(matches!(a.inverse(), Err(Error::NotInvertible)));
    }

    #[test]
    fn mismatched_generators_rejected() {
        let a = GrassmannEven::<Q>::one(1);
        let b = GrassmannEven::<Q>::one(2);
        assert!(matches!(
            a.try_mul(&b),
            Err(Error::MismatchedGenerators { left: 1, right: 2 })
        ));
    }

    #[test]
    fn capacity_limit() {
        assert!(check_capacity(16).is_ok());
        assert!(matches!(check_capacity(17), Err(Error::Capacity(_))));
        assert!(GrassmannMatrix::<Q>::zeros(2, 17).is_err());
    }

    /// The k = m = 1 worked example with symbolic-looking rational Λ.
    #[test]
    fn one_dimensional_pair_example() {
        let (l11, l12, l21, l22) = (q(3, 2), q(1, 3), q(1, 3), q(5, 4));
        let omega = |p: usize| ee(2, p, p, q(1, 1));
        let m = GrassmannMatrix::from_fn(2, 2, |i, j| {
            let lam = [[&l11, &l12], [&l21, &l22]][i][j].clone();
            let base = omega(j).scale(&lam);
            if i == j {
                &GrassmannEven::one(2) + &base
            } else {
                base
            }
        })
        .unwrap();
        let det = m.det().unwrap();
        let det_lam = l11.clone() * l22.clone() - l12.clone() * l21.clone();
        let expected = GrassmannEven::from_terms(
            2,
            [
                (Blade::SCALAR, q(1, 1)),
                (Blade::from_mask(0b0011), l11.clone()),
                (Blade::from_mask(0b1100), l22.clone()),
                (Blade::top(2), det_lam.clone()),
            ],
        );
        assert_eq!(det, expected);

        let inv = det.inverse().unwrap();
        let two = q(2, 1);
        let expected_inv = GrassmannEven::from_terms(
            2,
            [
                (Blade::SCALAR, q(1, 1)),
                (Blade::from_mask(0b0011), -l11.clone()),
                (Blade::from_mask(0b1100), -l22.clone()),
                (Blade::top(2), two * l11.clone() * l22.clone() - det_lam),
            ],
        );
        assert_eq!(inv, expected_inv);
        assert_eq!(inv.berezin(), l11 * l22 + l12 * l21);
    }

    #[test]
    fn scalar_determinant() {
        let m = GrassmannMatrix::from_scalars(1, &[vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(2, 1)]])
            .unwrap();
        assert_eq!(m.det().unwrap(), GrassmannEven::scalar(1, q(3, 1)));
    }

    #[test]
    fn determinant_with_row_swap() {
        let m = GrassmannMatrix::from_scalars(1, &[vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]])
            .unwrap();
        assert_eq!(m.det().unwrap(), GrassmannEven::scalar(1, q(-1, 1)));
    }

    #[test]
    fn singular_pivot_reported() {
        let m = GrassmannMatrix::from_fn(2, 1, |i, j| {
            if i == 0 && j == 0 {
                GrassmannEven::one(1)
            } else {
                ee(1, 0, 0, q(1, 1))
            }
        })
        .unwrap();
        // Column 1 only has nilpotent entries after elimination.
        assert!(matches!(m.det(), Err(Error::SingularPivot { column: 1 })));
    }

    #[test]
    fn block_diagonal_determinant_factorises() {
        let l = 2;
        let block = |p: usize, s: Q| {
            [
                [
                    &GrassmannEven::one(l) + &ee(l, p, p, s.clone()),
                    GrassmannEven::scalar(l, s.clone()),
                ],
                [GrassmannEven::scalar(l, q(1, 3)), GrassmannEven::one(l)],
            ]
        };
        let b0 = block(0, q(2, 1));
        let b1 = block(1, q(-1, 2));
        let m = GrassmannMatrix::from_fn(4, l, |i, j| match (i / 2, j / 2) {
            (0, 0) => b0[i % 2][j % 2].clone(),
            (1, 1) => b1[i % 2][j % 2].clone(),
            _ => GrassmannEven::zero(l),
        })
        .unwrap();
        let d0 = GrassmannMatrix::from_fn(2, l, |i, j| b0[i][j].clone()).unwrap().det().unwrap();
        let d1 = GrassmannMatrix::from_fn(2, l, |i, j| b1[i][j].clone()).unwrap().det().unwrap();
        assert_eq!(m.det().unwrap(), &d0 * &d1);
    }

    #[test]
    fn berezin_orientation() {
        assert_eq!(GrassmannEven::<Q>::one(1).berezin(), q(0, 1));
        assert_eq!(GrassmannEven::<Q>::one(3).berezin(), q(0, 1));
        // ∏ η̄_i η_i integrates to 1 for every l; ∏ η_i η̄_i does for even l.
        for l in 1..=5 {
            let mut prod = GrassmannEven::one(l);
            for i in 0..l {
                prod = &prod * &ee(l, i, i, q(-1, 1));
            }
            assert_eq!(prod.berezin(), q(1, 1), "l = {l}");
        }
        let mut prod = GrassmannEven::one(4);
        for i in 0..4 {
            prod = &prod * &ee(4, i, i, q(1, 1));
        }
        assert_eq!(prod.berezin(), q(1, 1));
        let c = q(7, 3);
        let with_lower = &prod.scale(&c) + &ee(4, 0, 1, q(5, 1));
        assert_eq!(with_lower.berezin(), c);
    }

    #[test]
    fn berezin_of_product_matches_full_product() {
        let l = 3;
        let a = &(&GrassmannEven::one(l) + &ee(l, 0, 1, q(2, 1))) + &ee(l, 2, 2, q(-1, 3));
        let a = &a * &(&GrassmannEven::one(l) + &ee(l, 1, 0, q(3, 1)));
        let b = &(&GrassmannEven::one(l) + &ee(l, 1, 1, q(1, 2))) + &ee(l, 0, 0, q(4, 1));
        let b = &b * &(&GrassmannEven::one(l) + &ee(l, 2, 1, q(1, 1)));
        assert_eq!(a.berezin_of_product(&b).unwrap(), (&a * &b).berezin());
    }

    #[test]
    fn susy_det_small_cases() {
        assert_eq!(susy_det(&[vec![q(5, 1)]]).unwrap(), q(5, 1));
        assert_eq!(
            susy_det(&[vec![q(2, 1), q(0, 1)], vec![q(0, 1), q(7, 1)]]).unwrap(),
            q(14, 1)
        );
        let h = vec![
            vec![q(1, 1), q(2, 1), q(3, 1)],
            vec![q(0, 1), q(4, 1), q(5, 1)],
            vec![q(1, 1), q(0, 1), q(6, 1)],
        ];
        assert_eq!(susy_det(&h).unwrap(), q(22, 1));
    }

    #[test]
    fn susy_det_complex() {
        let h = vec![
            vec![Complex64::new(1.0, 2.0), Complex64::new(0.5, -1.0)],
            vec![Complex64::new(-2.0, 0.25), Complex64::new(3.0, 1.0)],
        ];
        let expected = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        assert!((susy_det(&h).unwrap() - expected).norm() < 1e-14);
    }
}
