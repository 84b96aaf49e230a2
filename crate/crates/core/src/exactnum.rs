//! Exact arithmetic kernel: integer square roots, floors of `(A + √D)/2`,
//! and certified sign decisions for sums of square roots with rational
//! coefficients.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Builds the rational `num/den`.
///
/// # Panics
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds the rational integer `n`.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Largest `k` with `k² ≤ n`.
///
/// # Panics
/// A negative argument is a contract violation and panics.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative integer");
    n.sqrt()
}

/// `⌊(a + √d)/2⌋` using integer arithmetic only.
///
/// Since `⌊√d⌋ ≤ √d < ⌊√d⌋ + 1`, the floor of the average only depends on
/// `⌊√d⌋`, whether or not `d` is a perfect square.
///
/// # Panics
/// Panics if `d < 0`.
pub fn floor_avg_sqrt(a: impl Into<BigInt>, d: impl Into<BigInt>) -> BigInt {
    let a = a.into();
    let root = isqrt(&d.into());
    (a + root).div_floor(&BigInt::from(2))
}

/// Integer version of [`floor_avg_sqrt`] for machine-sized inputs.
pub fn floor_avg_sqrt_i64(a: i64, d: u128) -> i64 {
    let root = d.sqrt() as i128;
    (a as i128 + root).div_euclid(2) as i64
}

/// Splits `n` into `(k, f)` with `n = k²·f` and `f` squarefree.
pub fn squarefree_split(n: u128) -> (u128, u128) {
    if n == 0 {
        return (0, 0);
    }
    let mut rest = n;
    let mut root = 1u128;
    let mut free = 1u128;
    let mut d = 2u128;
    while d * d * d <= rest {
        let dd = d * d;
        while rest.is_multiple_of(dd) {
            rest /= dd;
            root *= d;
        }
        if rest.is_multiple_of(d) {
            rest /= d;
            free *= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    // Every prime factor of `rest` now exceeds its cube root, so `rest` is
    // 1, a prime, a product of two distinct primes, or a prime square.
    let s = rest.sqrt();
    if s * s == rest {
        root *= s;
    } else {
        free *= rest;
    }
    (root, free)
}

/// An exact real number `Σ qᵢ √nᵢ` with rational `qᵢ` and squarefree
/// radicands `nᵢ`, kept sorted by radicand with no zero coefficients.
///
/// The rational part of the number is the term with radicand 1. Because
/// square roots of distinct squarefree integers are linearly independent
/// over ℚ, two sums are equal exactly when their term lists are equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RadicalSum {
    terms: Vec<(u128, Rational)>,
}

impl RadicalSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::term(q, 1)
    }

    /// The single term `q·√n`, normalized.
    pub fn term(q: Rational, n: u128) -> Self {
        let mut out = Self::zero();
        out.push(q, n);
        out
    }

    /// `√n` for a nonnegative integer `n`.
    pub fn sqrt(n: u128) -> Self {
        Self::term(Rational::one(), n)
    }

    /// `√q` for a nonnegative rational `q`, written as `√(num·den)/den`.
    ///
    /// # Panics
    /// Panics if `q` is negative or `num·den` does not fit in 128 bits.
    pub fn sqrt_rational(q: &Rational) -> Self {
        assert!(!q.is_negative(), "square root of a negative rational");
        let prod = (q.numer() * q.denom())
            .to_u128()
            .expect("radicand exceeds 128 bits");
        Self::term(Rational::new(BigInt::one(), q.denom().clone()), prod)
    }

    /// Builds a normalized sum from arbitrary `(coefficient, radicand)` pairs.
    pub fn from_terms<I: IntoIterator<Item = (Rational, u128)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (q, n) in terms {
            out.push(q, n);
        }
        out
    }

    fn push(&mut self, q: Rational, n: u128) {
        if q.is_zero() || n == 0 {
            return;
        }
        let (root, free) = squarefree_split(n);
        let q = q * Rational::from_integer(BigInt::from(root));
        match self.terms.binary_search_by(|(r, _)| r.cmp(&free)) {
            Ok(i) => {
                let sum = &self.terms[i].1 + &q;
                if sum.is_zero() {
                    self.terms.remove(i);
                } else {
                    self.terms[i].1 = sum;
                }
            }
            Err(i) => self.terms.insert(i, (free, q)),
        }
    }

    /// Normalized `(radicand, coefficient)` terms in increasing radicand order.
    pub fn terms(&self) -> &[(u128, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when it is rational, i.e. has no irrational term.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(1, q)] => Some(q.clone()),
            _ => None,
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(n, c)| (*n, c * q)).collect(),
        }
    }

    /// Approximate value for display and search heuristics; never used to
    /// decide a comparison.
    pub fn approx(&self) -> f64 {
        self.terms
            .iter()
            .map(|(n, q)| q.to_f64().unwrap_or(f64::NAN) * (*n as f64).sqrt())
            .sum()
    }

    /// Exact sign of the value.
    pub fn signum(&self) -> Ordering {
        if self.terms.is_empty() {
            return Ordering::Equal;
        }
        let scaled = self.integer_coefficients();
        if let Some(sign) = small_interval_sign(&scaled) {
            return sign;
        }
        let mut bits = 64u32;
        loop {
            let (lo, hi) = dyadic_bounds(&scaled, bits);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            if bits >= 512 && scaled.len() <= 2 {
                return algebraic_sign(&scaled);
            }
            bits *= 2;
        }
    }

    /// Common-denominator form `Σ Aᵢ √nᵢ` (positive scale factor dropped).
    fn integer_coefficients(&self) -> Vec<(u128, BigInt)> {
        let lcm = self
            .terms
            .iter()
            .fold(BigInt::one(), |acc, (_, q)| acc.lcm(q.denom()));
        self.terms
            .iter()
            .map(|(n, q)| (*n, q.numer() * (&lcm / q.denom())))
            .collect()
    }

    /// Rational enclosure `lo ≤ x ≤ hi` with about `bits` fractional bits.
    pub fn bounds(&self, bits: u32) -> (Rational, Rational) {
        let lcm = self
            .terms
            .iter()
            .fold(BigInt::one(), |acc, (_, q)| acc.lcm(q.denom()));
        let scaled = self.integer_coefficients();
        let (lo, hi) = dyadic_bounds(&scaled, bits);
        let den = lcm << bits as usize;
        (
            Rational::new(lo, den.clone()),
            Rational::new(hi, den),
        )
    }

    /// `⌊x⌋`, found by integer bisection driven by exact comparisons.
    pub fn floor(&self) -> BigInt {
        if let Some(q) = self.as_rational() {
            return q.floor().to_integer();
        }
        let (lo, hi) = self.bounds(64);
        let mut low = lo.floor().to_integer();
        let mut high = hi.floor().to_integer() + 1;
        // Invariant: low ≤ x < high.
        while &high - &low > BigInt::one() {
            let sum: BigInt = &low + &high;
            let mid = sum.div_floor(&BigInt::from(2));
            if radical_cmp(self, &Rational::from_integer(mid.clone())) == Ordering::Less {
                high = mid;
            } else {
                low = mid;
            }
        }
        low
    }

    /// `⌈x⌉`.
    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Exact comparison of two radical sums.
    pub fn cmp_sum(&self, other: &RadicalSum) -> Ordering {
        (self - other).signum()
    }
}

/// Sign decision with machine integers at 32 fractional bits; `None` when
/// the inputs are too large or the enclosure straddles zero.
fn small_interval_sign(terms: &[(u128, BigInt)]) -> Option<Ordering> {
    const BITS: u32 = 32;
    let mut lo: i128 = 0;
    let mut hi: i128 = 0;
    for (n, a) in terms {
        if *n >= 1 << 60 {
            return None;
        }
        let a = a.to_i64()? as i128;
        let shifted = n << (2 * BITS);
        let s = shifted.sqrt();
        let exact = s * s == shifted;
        let s = s as i128;
        let up = if exact { s } else { s + 1 };
        let (l, h) = if a >= 0 { (a * s, a * up) } else { (a * up, a * s) };
        lo = lo.checked_add(l)?;
        hi = hi.checked_add(h)?;
    }
    if lo > 0 {
        Some(Ordering::Greater)
    } else if hi < 0 {
        Some(Ordering::Less)
    } else if lo == 0 && hi == 0 {
        Some(Ordering::Equal)
    } else {
        None
    }
}

/// Integer bounds on `2^bits · Σ Aᵢ √nᵢ`.
fn dyadic_bounds(terms: &[(u128, BigInt)], bits: u32) -> (BigInt, BigInt) {
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for (n, a) in terms {
        let shifted = BigInt::from(*n) << (2 * bits as usize);
        let s = isqrt(&shifted);
        let up = if &s * &s == shifted { s.clone() } else { &s + 1 };
        if a.is_negative() {
            lo += a * &up;
            hi += a * &s;
        } else {
            lo += a * &s;
            hi += a * &up;
        }
    }
    (lo, hi)
}

/// Exact sign of `A√n` or `A√n + B√m` by isolating and squaring.
fn algebraic_sign(terms: &[(u128, BigInt)]) -> Ordering {
    let sign_of = |a: &BigInt| match a.sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    };
    match terms {
        [] => Ordering::Equal,
        [(_, a)] => sign_of(a),
        [(n, a), (m, b)] => {
            let (sa, sb) = (sign_of(a), sign_of(b));
            if sa == sb {
                return sa;
            }
            let lhs = a * a * BigInt::from(*n);
            let rhs = b * b * BigInt::from(*m);
            match lhs.cmp(&rhs) {
                Ordering::Greater => sa,
                Ordering::Less => sb,
                Ordering::Equal => Ordering::Equal,
            }
        }
        _ => unreachable!("algebraic fallback is limited to two terms"),
    }
}

/// Exact ordering of the real number `x` against the rational `t`.
pub fn radical_cmp(x: &RadicalSum, t: &Rational) -> Ordering {
    (x - &RadicalSum::from_rational(t.clone())).signum()
}

impl Add<&RadicalSum> for &RadicalSum {
    type Output = RadicalSum;
    fn add(self, rhs: &RadicalSum) -> RadicalSum {
        let mut out = self.clone();
        for (n, q) in &rhs.terms {
            out.push(q.clone(), *n);
        }
        out
    }
}

impl Add for RadicalSum {
    type Output = RadicalSum;
    fn add(self, rhs: RadicalSum) -> RadicalSum {
        &self + &rhs
    }
}

impl Sub<&RadicalSum> for &RadicalSum {
    type Output = RadicalSum;
    fn sub(self, rhs: &RadicalSum) -> RadicalSum {
        let mut out = self.clone();
        for (n, q) in &rhs.terms {
            out.push(-q.clone(), *n);
        }
        out
    }
}

impl Sub for RadicalSum {
    type Output = RadicalSum;
    fn sub(self, rhs: RadicalSum) -> RadicalSum {
        &self - &rhs
    }
}

impl Neg for &RadicalSum {
    type Output = RadicalSum;
    fn neg(self) -> RadicalSum {
        RadicalSum {
            terms: self.terms.iter().map(|(n, q)| (*n, -q.clone())).collect(),
        }
    }
}

impl Neg for RadicalSum {
    type Output = RadicalSum;
    fn neg(self) -> RadicalSum {
        -&self
    }
}

impl Mul<&Rational> for &RadicalSum {
    type Output = RadicalSum;
    fn mul(self, rhs: &Rational) -> RadicalSum {
        self.scale(rhs)
    }
}

impl fmt::Display for RadicalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (n, q)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match (*n, q.is_one()) {
                (1, _) => write!(f, "{q}")?,
                (_, true) => write!(f, "√{n}")?,
                _ => write!(f, "({q})√{n}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt(&BigInt::from(0)), BigInt::from(0));
        assert_eq!(isqrt(&BigInt::from(488)), BigInt::from(22));
        assert_eq!(isqrt(&BigInt::from(1485)), BigInt::from(38));
    }

    #[test]
    #[should_panic]
    fn isqrt_rejects_negative() {
        isqrt(&BigInt::from(-1));
    }

    #[test]
    fn floor_avg_sqrt_examples() {
        assert_eq!(floor_avg_sqrt(22, 488), BigInt::from(22));
        assert_eq!(floor_avg_sqrt(0, 4), BigInt::from(1));
        assert_eq!(floor_avg_sqrt(-39, 0), BigInt::from(-20));
        assert_eq!(floor_avg_sqrt_i64(-39, 0), -20);
        assert_eq!(floor_avg_sqrt_i64(22, 488), 22);
    }

    #[test]
    fn squarefree_split_examples() {
        assert_eq!(squarefree_split(520), (2, 130));
        assert_eq!(squarefree_split(72), (6, 2));
        assert_eq!(squarefree_split(1), (1, 1));
        assert_eq!(squarefree_split(49 * 101 * 101), (707, 1));
        assert_eq!(squarefree_split(1_000_003 * 1_000_003), (1_000_003, 1));
    }

    #[test]
    fn radical_cmp_examples() {
        let z1 = RadicalSum::sqrt(520);
        assert_eq!(z1.terms(), &[(130, int(2))]);
        assert_eq!(radical_cmp(&z1, &int(23)), Ordering::Less);

        let merged = RadicalSum::sqrt(2) + RadicalSum::sqrt(8);
        assert_eq!(merged, RadicalSum::term(int(3), 2));
        assert_eq!(merged.cmp_sum(&RadicalSum::term(int(3), 2)), Ordering::Equal);

        let f1 = RadicalSum::from_rational(rat(81, 80));
        assert_eq!(radical_cmp(&f1, &rat(81, 80)), Ordering::Equal);
    }

    #[test]
    fn cancelling_terms_vanish() {
        let x = RadicalSum::sqrt(8) - RadicalSum::term(int(2), 2);
        assert!(x.is_zero());
        assert_eq!(x.signum(), Ordering::Equal);
    }

    #[test]
    fn near_ties_resolve() {
        // √10001 + √9999 and 200 differ by about 1.25e-6.
        let x = RadicalSum::sqrt(10001) + RadicalSum::sqrt(9999);
        assert_eq!(radical_cmp(&x, &int(200)), Ordering::Less);
        // Huge coefficients skip the machine-integer stage.
        let big = RadicalSum::term(rat(1 << 62, 3) * int(1 << 40), 3);
        assert_eq!(big.signum(), Ordering::Greater);
    }

    #[test]
    fn floor_and_ceil() {
        let tri = RadicalSum::from_rational(rat(-39, 2))
            + RadicalSum::term(rat(1, 2), 520)
            + RadicalSum::term(rat(1, 2), 3865);
        assert_eq!(tri.floor(), BigInt::from(22));
        assert_eq!(tri.ceil(), BigInt::from(23));
        assert_eq!(RadicalSum::from_rational(rat(-7, 2)).floor(), BigInt::from(-4));
    }

    #[test]
    fn sqrt_rational_normalizes() {
        let x = RadicalSum::sqrt_rational(&rat(9, 4));
        assert_eq!(x.as_rational(), Some(rat(3, 2)));
        let y = RadicalSum::sqrt_rational(&rat(1, 2));
        assert_eq!(y.terms(), &[(2, rat(1, 2))]);
    }

    #[test]
    fn display_is_readable() {
        let x = RadicalSum::from_rational(rat(1, 2)) + RadicalSum::sqrt(2);
        assert_eq!(x.to_string(), "1/2 + √2");
    }
}
