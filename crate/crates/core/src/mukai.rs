//! The Mukai lattice `ℤ ⊕ ℤH ⊕ ℤ` of a K3 surface with `Pic = ℤH`,
//! `H² = 2p`, together with the classes attached to `m = m(p)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};

use crate::error::{Error, Result};
use crate::exactnum::Rational;

/// Deterministic trial-division primality test.
pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A K3 surface of Picard rank one with `H² = 2p` and genus `p + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Surface {
    p: i64,
    m: i64,
}

impl Surface {
    pub fn new(p: i64) -> Result<Self> {
        if p < 13 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Self {
            p,
            m: min_nondivisor(p),
        })
    }

    /// The surface whose hyperplane section has genus `g = p + 1`.
    pub fn from_genus(g: i64) -> Result<Self> {
        Self::new(g - 1)
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn h_sq(&self) -> i64 {
        2 * self.p
    }

    pub fn genus(&self) -> i64 {
        self.p + 1
    }

    /// `m(p)`, the least positive integer not dividing `p + 1`.
    pub fn m(&self) -> i64 {
        self.m
    }

    /// `p + m²`, the Brill-Noether count attained on the triangle.
    pub fn target(&self) -> i64 {
        self.p + self.m * self.m
    }
}

/// A Mukai vector `(r, cH, s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MukaiVector {
    pub r: i64,
    pub c: i64,
    pub s: i64,
}

/// Slope `c/r`, with rank-zero classes at `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Slope {
    Finite(Rational),
    Infinite,
}

impl MukaiVector {
    pub const fn new(r: i64, c: i64, s: i64) -> Self {
        Self { r, c, s }
    }

    /// `v(O_X) = (1, 0, 1)`.
    pub const fn structure_sheaf() -> Self {
        Self::new(1, 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.r == 0 && self.c == 0 && self.s == 0
    }

    /// `χ = r + s`.
    pub fn chi(&self) -> i64 {
        self.r + self.s
    }

    pub fn slope(&self) -> Slope {
        if self.r == 0 {
            Slope::Infinite
        } else {
            Slope::Finite(Rational::new(BigInt::from(self.c), BigInt::from(self.r)))
        }
    }

    pub fn is_primitive(&self) -> bool {
        self.r.gcd(&self.c).gcd(&self.s) == 1
    }

    /// The class divided by the gcd of its entries.
    pub fn primitive(&self) -> Self {
        let g = self.r.gcd(&self.c).gcd(&self.s);
        if g == 0 {
            *self
        } else {
            Self::new(self.r / g, self.c / g, self.s / g)
        }
    }
}

impl fmt::Display for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}H, {})", self.r, self.c, self.s)
    }
}

impl Add for MukaiVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.r + o.r, self.c + o.c, self.s + o.s)
    }
}

impl Sub for MukaiVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.r - o.r, self.c - o.c, self.s - o.s)
    }
}

impl Neg for MukaiVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.r, -self.c, -self.s)
    }
}

impl Mul<MukaiVector> for i64 {
    type Output = MukaiVector;
    fn mul(self, v: MukaiVector) -> MukaiVector {
        MukaiVector::new(self * v.r, self * v.c, self * v.s)
    }
}

/// Mukai pairing `⟨a, b⟩ = a.c·b.c·H² − a.r·b.s − b.r·a.s`.
pub fn pairing(a: &MukaiVector, b: &MukaiVector, x: &Surface) -> i128 {
    let (ar, ac, as_) = (a.r as i128, a.c as i128, a.s as i128);
    let (br, bc, bs) = (b.r as i128, b.c as i128, b.s as i128);
    ac * bc * x.h_sq() as i128 - ar * bs - br * as_
}

/// Euler form `χ(a, b) = −⟨a, b⟩`.
pub fn euler(a: &MukaiVector, b: &MukaiVector, x: &Surface) -> i128 {
    -pairing(a, b, x)
}

/// `⟨a, a⟩ = −2`, i.e. `p·c² − r·s = −1`.
pub fn is_root(a: &MukaiVector, x: &Surface) -> bool {
    let (r, c, s) = (a.r as i128, a.c as i128, a.s as i128);
    x.p() as i128 * c * c - r * s == -1
}

/// Least positive integer that does not divide `p + 1`.
pub fn min_nondivisor(p: i64) -> i64 {
    (1..).find(|k| (p + 1) % k != 0).expect("p + 1 has a non-divisor")
}

/// `m` and the classes `v`, `u`, `w = v(i_*F) = v + u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Distinguished {
    pub m: i64,
    pub v: MukaiVector,
    pub u: MukaiVector,
    pub w: MukaiVector,
}

pub fn distinguished_vectors(x: &Surface) -> Distinguished {
    let (p, m) = (x.p(), x.m());
    let v = MukaiVector::new(m * m, m, p);
    let u = MukaiVector::new(-m * m, m * m - m, -p * (m - 1) * (m - 1));
    let w = MukaiVector::new(0, m * m, 2 * p * m - m * m * p);
    debug_assert_eq!(v + u, w);
    Distinguished { m, v, u, w }
}

/// Outcome of the two numeric constraints on `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MBoundCheck {
    pub m: i64,
    /// `m < (p − 1)/2 − 1`.
    pub inequality_42: bool,
    /// `m ≤ ⌊√(2p/5)⌋`, i.e. `5m² ≤ 2p`.
    pub asymptotic: bool,
    /// `⌊√(2p/5)⌋`.
    pub asymptotic_bound: i64,
    /// The asymptotic inequality is only asserted for `p > 250`.
    pub asymptotic_claimed: bool,
}

pub fn m_bound_check(p: i64) -> MBoundCheck {
    let m = min_nondivisor(p);
    MBoundCheck {
        m,
        inequality_42: 2 * m < p - 3,
        asymptotic: 5 * m * m <= 2 * p,
        asymptotic_bound: (2 * p / 5).sqrt(),
        asymptotic_claimed: p > 250,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(p: i64) -> Surface {
        Surface::new(p).unwrap()
    }

    #[test]
    fn surface_validation() {
        assert!(Surface::new(12).is_err());
        assert!(Surface::new(11).is_err());
        assert_eq!(Surface::from_genus(14).unwrap().p(), 13);
        assert_eq!(x(13).h_sq(), 26);
        assert_eq!(x(13).genus(), 14);
    }

    #[test]
    fn pairing_examples() {
        let o = MukaiVector::structure_sheaf();
        for p in [13, 17, 59] {
            assert_eq!(pairing(&o, &o, &x(p)), -2);
            let d = distinguished_vectors(&x(p));
            assert_eq!(pairing(&d.v, &d.v, &x(p)), 0);
        }
        let h = MukaiVector::new(0, 1, 0);
        assert_eq!(pairing(&h, &h, &x(13)), 26);
        assert_eq!(euler(&o, &o, &x(13)), 2);
    }

    #[test]
    fn root_examples() {
        assert!(is_root(&MukaiVector::new(1, 0, 1), &x(13)));
        assert!(is_root(&MukaiVector::new(1, 1, 14), &x(13)));
        assert!(!is_root(&MukaiVector::new(0, 1, 0), &x(13)));
    }

    #[test]
    fn min_nondivisor_examples() {
        assert_eq!(min_nondivisor(13), 3);
        assert_eq!(min_nondivisor(17), 4);
        assert_eq!(min_nondivisor(59), 7);
    }

    #[test]
    fn distinguished_examples() {
        let d = distinguished_vectors(&x(13));
        assert_eq!((d.m, d.v, d.w), (3, MukaiVector::new(9, 3, 13), MukaiVector::new(0, 9, -39)));
        let d = distinguished_vectors(&x(23));
        assert_eq!((d.m, d.v, d.u), (5, MukaiVector::new(25, 5, 23), MukaiVector::new(-25, 20, -368)));
        assert_eq!(distinguished_vectors(&x(17)).w.chi(), -136);
    }

    #[test]
    fn m_bound_examples() {
        assert!(m_bound_check(13).inequality_42);
        let big = m_bound_check(251);
        assert_eq!(big.m, 5);
        assert!(big.asymptotic && big.asymptotic_claimed);
        let small = m_bound_check(17);
        assert_eq!(small.asymptotic_bound, 2);
        assert!(!small.asymptotic && !small.asymptotic_claimed);
    }

    #[test]
    fn slopes() {
        assert_eq!(MukaiVector::new(0, 1, 3).slope(), Slope::Infinite);
        assert!(MukaiVector::new(2, 1, 0).slope() < Slope::Infinite);
        assert_eq!(
            MukaiVector::new(4, 2, 0).slope(),
            Slope::Finite(Rational::new(1.into(), 2.into()))
        );
    }
}
