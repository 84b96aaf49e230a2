//! The projection plane: `pr(r, cH, s) = (c/s, r/s)`, central charges,
//! kernel points `k(b, w)`, the valid region `V(X)` with its hole slits,
//! and the grey root-free quadrilateral.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{int, Rational};
use crate::mukai::{is_root, MukaiVector, Surface};

/// A point with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatPoint {
    pub x: Rational,
    pub y: Rational,
}

impl RatPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        Self { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Self::new(int(x), int(y))
    }

    pub fn origin() -> Self {
        Self::from_ints(0, 0)
    }

    /// `o′ = pr(v(O_X)) = (0, 1)`.
    pub fn o_prime() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn sub(&self, o: &RatPoint) -> RatPoint {
        RatPoint::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn add(&self, o: &RatPoint) -> RatPoint {
        RatPoint::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn scale(&self, t: &Rational) -> RatPoint {
        RatPoint::new(&self.x * t, &self.y * t)
    }

    /// Point `self + t·(o − self)`.
    pub fn lerp(&self, o: &RatPoint, t: &Rational) -> RatPoint {
        self.add(&o.sub(self).scale(t))
    }

    pub fn midpoint(&self, o: &RatPoint) -> RatPoint {
        self.lerp(o, &Rational::new(1.into(), 2.into()))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (
            self.x.to_f64().unwrap_or(f64::NAN),
            self.y.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Display for RatPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// `(b − a) × (c − a)`; positive when `a, b, c` turn counterclockwise.
pub fn cross(a: &RatPoint, b: &RatPoint, c: &RatPoint) -> Rational {
    let u = b.sub(a);
    let v = c.sub(a);
    &u.x * &v.y - &u.y * &v.x
}

pub fn collinear(a: &RatPoint, b: &RatPoint, c: &RatPoint) -> bool {
    cross(a, b, c).is_zero()
}

/// Whether `pt` lies on the parabola `y = p·x²`.
pub fn on_parabola(pt: &RatPoint, x: &Surface) -> bool {
    pt.y == int(x.p()) * &pt.x * &pt.x
}

/// Whether `pt` lies strictly above the parabola `y = p·x²`.
pub fn above_parabola(pt: &RatPoint, x: &Surface) -> bool {
    pt.y > int(x.p()) * &pt.x * &pt.x
}

/// A value of the central charge `Z_(b,w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Charge {
    pub re: Rational,
    pub im: Rational,
}

/// A segment with per-endpoint openness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub a: RatPoint,
    pub b: RatPoint,
    pub open_a: bool,
    pub open_b: bool,
}

impl Segment {
    pub fn closed(a: RatPoint, b: RatPoint) -> Self {
        Self { a, b, open_a: false, open_b: false }
    }

    pub fn open(a: RatPoint, b: RatPoint) -> Self {
        Self { a, b, open_a: true, open_b: true }
    }

    /// Membership with the endpoint openness taken into account.
    pub fn contains(&self, pt: &RatPoint) -> bool {
        if !collinear(&self.a, &self.b, pt) {
            return false;
        }
        if *pt == self.a {
            return !self.open_a;
        }
        if *pt == self.b {
            return !self.open_b;
        }
        let d = self.b.sub(&self.a);
        let v = pt.sub(&self.a);
        let t = &v.x * &d.x + &v.y * &d.y;
        let len = &d.x * &d.x + &d.y * &d.y;
        t.is_positive() && t < len
    }
}

/// A hole slit `I_δ` of the valid region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slit {
    /// Closed segment from `p_δ` out to the parabola point `q_δ`.
    Segment(Segment),
    /// The vertical ray `{(0, y) : y ≥ start.y}`; the parabola meets the
    /// `y`-axis only at the origin, so the slit is unbounded.
    VerticalRay { start: RatPoint },
}

impl Slit {
    pub fn contains(&self, pt: &RatPoint) -> bool {
        match self {
            Slit::Segment(seg) => seg.contains(pt),
            Slit::VerticalRay { start } => pt.x.is_zero() && pt.y >= start.y,
        }
    }
}

/// `pr(a) = (c/s, r/s)`.
pub fn project(a: &MukaiVector) -> Result<RatPoint> {
    if a.is_zero() {
        return Err(Error::ZeroVector);
    }
    if a.s == 0 {
        return Err(Error::ProjectionUndefined);
    }
    let s = BigInt::from(a.s);
    Ok(RatPoint::new(
        Rational::new(BigInt::from(a.c), s.clone()),
        Rational::new(BigInt::from(a.r), s),
    ))
}

/// `Z_(b,w)(a)` with `Re = c·b·H² − (r·H²/2)(b² − w²) − s`, `Im = c − r·b`.
pub fn central_charge(a: &MukaiVector, b: &Rational, w_sq: &Rational, x: &Surface) -> Result<Charge> {
    if !w_sq.is_positive() {
        return Err(Error::NonPositiveWSquared);
    }
    let (r, c, s) = (int(a.r), int(a.c), int(a.s));
    let h_sq = int(x.h_sq());
    let re = &c * b * &h_sq - &r * &h_sq / int(2) * (b * b - w_sq) - s;
    let im = c - r * b;
    Ok(Charge { re, im })
}

/// Compares the phases in `(0, 1]` of two charges.
pub fn phase_compare(z1: &Charge, z2: &Charge) -> Result<Ordering> {
    for z in [z1, z2] {
        if z.re.is_zero() && z.im.is_zero() {
            return Err(Error::KernelVector);
        }
        if z.im.is_negative() || (z.im.is_zero() && z.re.is_positive()) {
            return Err(Error::NotHeartPhase);
        }
    }
    let cr = &z1.re * &z2.im - &z2.re * &z1.im;
    // A positive cross product means z₂ is further counterclockwise.
    Ok(Rational::zero().cmp(&cr))
}

/// `k(b, w) = (2b, 2) / (H²(b² + w²))`, the projection of the kernel of `Z`.
pub fn kernel_point(b: &Rational, w_sq: &Rational, x: &Surface) -> Result<RatPoint> {
    if !w_sq.is_positive() {
        return Err(Error::NonPositiveWSquared);
    }
    let den = int(x.h_sq()) * (b * b + w_sq);
    Ok(RatPoint::new(int(2) * b / &den, int(2) / den))
}

/// The slit `I_δ` from `p_δ = pr(δ)` out to the parabola along the ray from
/// the origin.
pub fn hole_segment(delta: &MukaiVector, x: &Surface) -> Result<Slit> {
    if !is_root(delta, x) {
        return Err(Error::NotRoot(delta.to_string()));
    }
    let p_delta = project(delta)?;
    if !above_parabola(&p_delta, x) {
        return Err(Error::RootOutsideCone);
    }
    if p_delta.x.is_zero() {
        return Ok(Slit::VerticalRay { start: p_delta });
    }
    let slope = &p_delta.y / &p_delta.x;
    let qx = &slope / int(x.p());
    let q_delta = RatPoint::new(qx.clone(), slope * qx);
    Ok(Slit::Segment(Segment::closed(p_delta, q_delta)))
}

/// Membership of a point in `V(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    OnHole(MukaiVector),
    OutsideCone,
}

/// Decides whether `pt ∈ V(X)`.
///
/// A root `δ` with `pr(δ)` on the ray through `pt` has `(c, r) = t·(u, v)`
/// for the primitive direction `(u, v)`, and `p t² u² − t v s = −1` forces
/// `t = ±1`. So each ray carries at most one slit, with `s = (p u² + 1)/v`,
/// and the test is exact without any search bound.
pub fn in_v(pt: &RatPoint, x: &Surface) -> Membership {
    if !above_parabola(pt, x) {
        return Membership::OutsideCone;
    }
    match ray_root(pt, x) {
        Some(delta) => {
            let start = Rational::new(BigInt::from(delta.r), BigInt::from(delta.s));
            if pt.y >= start {
                Membership::OnHole(delta)
            } else {
                Membership::Inside
            }
        }
        None => Membership::Inside,
    }
}

/// The unique root with positive rank projecting onto the ray from the
/// origin through `pt`, if any. `pt.y` must be positive.
pub fn ray_root(pt: &RatPoint, x: &Surface) -> Option<MukaiVector> {
    let ratio = &pt.x / &pt.y;
    let u = ratio.numer().clone();
    let v = ratio.denom().clone();
    let num: BigInt = BigInt::from(x.p()) * &u * &u + 1;
    if !num.is_multiple_of(&v) {
        return None;
    }
    let s = num / &v;
    Some(MukaiVector::new(v.to_i64()?, u.to_i64()?, s.to_i64()?))
}

/// A convex polygon (counterclockwise vertices) whose boundary belongs to
/// the region only along the listed open segments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub vertices: Vec<RatPoint>,
    pub included_open_segments: Vec<Segment>,
}

impl Region {
    pub fn contains(&self, pt: &RatPoint) -> bool {
        let n = self.vertices.len();
        let mut on_boundary = false;
        for i in 0..n {
            let c = cross(&self.vertices[i], &self.vertices[(i + 1) % n], pt);
            if c.is_negative() {
                return false;
            }
            if c.is_zero() {
                on_boundary = true;
            }
        }
        !on_boundary || self.included_open_segments.iter().any(|s| s.contains(pt))
    }

    pub fn x_range(&self) -> (Rational, Rational) {
        let xs = self.vertices.iter().map(|v| &v.x);
        let lo = xs.clone().min().expect("nonempty polygon").clone();
        let hi = xs.max().expect("nonempty polygon").clone();
        (lo, hi)
    }

    pub fn is_strictly_convex_ccw(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            cross(&self.vertices[i], &self.vertices[(i + 1) % n], &self.vertices[(i + 2) % n])
                .is_positive()
        })
    }
}

/// The points `p_v`, `p_u`, `q` of the grey quadrilateral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreyPoints {
    pub p_v: RatPoint,
    pub p_u: RatPoint,
    pub q: RatPoint,
}

pub fn grey_points(x: &Surface) -> GreyPoints {
    let (p, m) = (x.p(), x.m());
    let r = |a: i64, b: i64| Rational::new(BigInt::from(a), BigInt::from(b));
    GreyPoints {
        p_v: RatPoint::new(r(m, p), r(m * m, p)),
        p_u: RatPoint::new(r(-m, p * (m - 1)), r(m * m, p * (m - 1) * (m - 1))),
        q: RatPoint::new(r(-1, m), r(p, m * m)),
    }
}

/// The quadrilateral `o, p_v, q, p_u` with boundary pieces `(q p_u)`,
/// `(o p_u)`, `(o p_v)` and `(q o′)`.
pub fn grey_region(x: &Surface) -> Region {
    let g = grey_points(x);
    let o = RatPoint::origin();
    Region {
        vertices: vec![o.clone(), g.p_v.clone(), g.q.clone(), g.p_u.clone()],
        included_open_segments: vec![
            Segment::open(g.q.clone(), g.p_u.clone()),
            Segment::open(o.clone(), g.p_u),
            Segment::open(o, g.p_v),
            Segment::open(g.q, RatPoint::o_prime()),
        ],
    }
}

pub fn grey_contains(pt: &RatPoint, x: &Surface) -> bool {
    grey_region(x).contains(pt)
}

/// All roots `δ` with `1 ≤ |s| ≤ s_max` whose projection lies in `reg`.
///
/// The region's vertices must lie on the parabola `y = p·x²` (as the grey
/// region's do). A root projects to `(c/s, p(c/s)² + 1/s²)`, so above a
/// chord between parabola points at `α < β` it satisfies
/// `(c − αs)(βs − c) ≤ 1/p`. Writing both factors over their denominators
/// leaves finitely many candidates per `s`, all adjacent to `αs` or `βs`.
pub fn enumerate_roots_in_region(reg: &Region, x: &Surface, s_max: i64) -> Vec<MukaiVector> {
    use rayon::prelude::*;

    let mut xs: Vec<Rational> = reg.vertices.iter().map(|v| v.x.clone()).collect();
    xs.sort();
    xs.dedup();
    let chords: Vec<(Rational, Rational)> = xs.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    let p = x.p() as i128;
    let to_pair = |q: &Rational| (q.numer().to_i128().unwrap(), q.denom().to_i128().unwrap());
    let chord_data: Vec<_> = chords
        .iter()
        .map(|(a, b)| {
            let (na, da) = to_pair(a);
            let (nb, db) = to_pair(b);
            (na, da, nb, db, da * db / p)
        })
        .collect();

    let mut found: Vec<MukaiVector> = (1..=s_max as i128)
        .into_par_iter()
        .flat_map_iter(|s| {
            let mut out = Vec::new();
            for &(na, da, nb, db, k) in &chord_data {
                let mut candidates = Vec::new();
                for t in 0..=k {
                    let a_num = t + na * s;
                    if a_num % da == 0 {
                        candidates.push(a_num / da);
                    }
                    let b_num = nb * s - t;
                    if b_num % db == 0 {
                        candidates.push(b_num / db);
                    }
                }
                for c in candidates {
                    let num = p * c * c + 1;
                    if num % s != 0 {
                        continue;
                    }
                    let delta = MukaiVector::new((num / s) as i64, c as i64, s as i64);
                    let pt = project(&delta).expect("s is nonzero");
                    if reg.contains(&pt) {
                        out.push(delta);
                        out.push(-delta);
                    }
                }
            }
            out
        })
        .collect();
    found.sort();
    found.dedup();
    found
}

/// Brute-force enumeration of roots with `1 ≤ s ≤ s_max` whose projection
/// has `x` in `[x_lo, x_hi]`; positive-rank representatives only.
pub fn enumerate_roots_in_strip(x_lo: &Rational, x_hi: &Rational, x: &Surface, s_max: i64) -> Vec<MukaiVector> {
    let mut out = Vec::new();
    for s in 1..=s_max {
        let sq = int(s);
        let c_lo = (x_lo * &sq).ceil().to_integer().to_i64().unwrap();
        let c_hi = (x_hi * &sq).floor().to_integer().to_i64().unwrap();
        for c in c_lo..=c_hi {
            let num = x.p() as i128 * (c as i128) * (c as i128) + 1;
            if num % s as i128 == 0 {
                out.push(MukaiVector::new((num / s as i128) as i64, c, s));
            }
        }
    }
    out
}

/// Exact verdict on an open segment of the grey boundary through the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentCertificate {
    pub name: &'static str,
    /// Primitive direction `(u, v)` of the segment (`x : y`).
    pub direction: (i64, i64),
    /// The only root that can project onto the ray, when integral.
    pub ray_root: Option<MukaiVector>,
    pub proved: bool,
}

/// Certificates that the open segments `(o p_v)`, `(o q)` and `(o p_u)` carry
/// no root projection.
///
/// On the ray through a primitive direction `(u, v)` a root must be
/// `(v, u, (p u² + 1)/v)` up to sign, so the check is a single divisibility
/// test followed by a membership test of that one point.
pub fn segment_certificates(x: &Surface) -> Vec<SegmentCertificate> {
    let g = grey_points(x);
    let o = RatPoint::origin();
    [("(o p_v)", g.p_v), ("(o q)", g.q), ("(o p_u)", g.p_u)]
        .into_iter()
        .map(|(name, end)| {
            let root = ray_root(&end, x);
            let seg = Segment::open(o.clone(), end.clone());
            let hit = root
                .map(|d| seg.contains(&project(&d).expect("root has s != 0")))
                .unwrap_or(false);
            let ratio = &end.x / &end.y;
            SegmentCertificate {
                name,
                direction: (
                    ratio.numer().to_i64().unwrap(),
                    ratio.denom().to_i64().unwrap(),
                ),
                ray_root: root,
                proved: !hit,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn x(p: i64) -> Surface {
        Surface::new(p).unwrap()
    }

    fn pt(a: i64, b: i64, c: i64, d: i64) -> RatPoint {
        RatPoint::new(rat(a, b), rat(c, d))
    }

    #[test]
    fn project_examples() {
        assert_eq!(project(&MukaiVector::new(1, 0, 1)).unwrap(), RatPoint::o_prime());
        assert_eq!(project(&MukaiVector::new(9, 3, 13)).unwrap(), pt(3, 13, 9, 13));
        assert_eq!(project(&MukaiVector::new(13, -3, 9)).unwrap(), pt(-1, 3, 13, 9));
        assert_eq!(project(&MukaiVector::new(0, 1, 0)), Err(Error::ProjectionUndefined));
        assert_eq!(project(&MukaiVector::new(0, 0, 0)), Err(Error::ZeroVector));
    }

    #[test]
    fn central_charge_examples() {
        let p13 = x(13);
        let z = central_charge(&MukaiVector::new(1, 0, 1), &int(0), &rat(1, 13), &p13).unwrap();
        assert_eq!(z, Charge { re: int(0), im: int(0) });
        let z = central_charge(&MukaiVector::new(5, -2, 7), &int(0), &rat(1, 13), &p13).unwrap();
        assert_eq!(z, Charge { re: int(-2), im: int(-2) });
        let z = central_charge(&MukaiVector::new(0, 1, 0), &rat(1, 2), &int(1), &p13).unwrap();
        assert_eq!(z, Charge { re: int(13), im: int(1) });
        assert!(central_charge(&MukaiVector::new(0, 1, 0), &rat(1, 2), &int(0), &p13).is_err());
    }

    #[test]
    fn phase_examples() {
        let c = |a: i64, b: i64| Charge { re: int(a), im: int(b) };
        assert_eq!(phase_compare(&c(-1, 0), &c(0, 1)).unwrap(), Ordering::Greater);
        assert_eq!(phase_compare(&c(0, 1), &c(1, 1)).unwrap(), Ordering::Greater);
        assert_eq!(phase_compare(&c(2, 6), &c(1, 3)).unwrap(), Ordering::Equal);
        assert_eq!(phase_compare(&c(1, 1), &c(-1, 0)).unwrap(), Ordering::Less);
        assert_eq!(phase_compare(&c(0, 0), &c(1, 1)), Err(Error::KernelVector));
        assert_eq!(phase_compare(&c(1, 0), &c(1, 1)), Err(Error::NotHeartPhase));
    }

    #[test]
    fn kernel_point_examples() {
        let p13 = x(13);
        assert_eq!(kernel_point(&int(0), &rat(1, 13), &p13).unwrap(), RatPoint::o_prime());
        assert_eq!(kernel_point(&rat(1, 3), &rat(1, 9), &p13).unwrap(), pt(3, 26, 9, 26));
        let a = kernel_point(&rat(1, 3), &rat(1, 9), &p13).unwrap();
        let b = kernel_point(&rat(1, 3), &rat(2, 9), &p13).unwrap();
        assert!(b.x < a.x && b.y < a.y);
        assert_eq!(a.x, rat(1, 3) * &a.y);
    }

    #[test]
    fn hole_examples() {
        let p13 = x(13);
        assert_eq!(
            hole_segment(&MukaiVector::new(1, 0, 1), &p13).unwrap(),
            Slit::VerticalRay { start: RatPoint::o_prime() }
        );
        assert_eq!(
            hole_segment(&MukaiVector::new(1, 1, 14), &p13).unwrap(),
            Slit::Segment(Segment::closed(pt(1, 14, 1, 14), pt(1, 13, 1, 13)))
        );
        assert_eq!(
            hole_segment(&MukaiVector::new(2, 1, 7), &p13).unwrap(),
            Slit::Segment(Segment::closed(pt(1, 7, 2, 7), pt(2, 13, 4, 13)))
        );
        assert!(hole_segment(&MukaiVector::new(1, 1, 1), &p13).is_err());
    }

    #[test]
    fn membership_examples() {
        let p13 = x(13);
        assert_eq!(in_v(&pt(0, 1, 1, 2), &p13), Membership::Inside);
        assert_eq!(in_v(&pt(0, 1, 2, 1), &p13), Membership::OnHole(MukaiVector::new(1, 0, 1)));
        assert_eq!(in_v(&RatPoint::o_prime(), &p13), Membership::OnHole(MukaiVector::new(1, 0, 1)));
        assert_eq!(in_v(&pt(1, 1, 1, 1), &p13), Membership::OutsideCone);
        // On the ray y = x the slit starts at (1/14, 1/14).
        assert_eq!(in_v(&pt(3, 40, 3, 40), &p13), Membership::OnHole(MukaiVector::new(1, 1, 14)));
        assert_eq!(in_v(&pt(1, 20, 1, 20), &p13), Membership::Inside);
    }

    #[test]
    fn grey_examples() {
        let p13 = x(13);
        let g = grey_points(&p13);
        assert!(!grey_contains(&g.p_v, &p13));
        assert!(grey_contains(&pt(3, 26, 9, 26), &p13));
        assert!(!grey_contains(&pt(1, 14, 1, 14), &p13));
        assert!(!grey_contains(&RatPoint::o_prime(), &p13));
        // (q o′) is included, (o′ p_v) is not.
        assert!(grey_contains(&g.q.midpoint(&RatPoint::o_prime()), &p13));
        assert!(!grey_contains(&g.p_v.midpoint(&RatPoint::o_prime()), &p13));
        assert!(grey_region(&p13).is_strictly_convex_ccw());
    }

    #[test]
    fn no_roots_in_small_grey_search() {
        let p13 = x(13);
        assert!(enumerate_roots_in_region(&grey_region(&p13), &p13, 2000).is_empty());
        for cert in segment_certificates(&p13) {
            assert!(cert.proved, "{}", cert.name);
        }
    }

    #[test]
    fn strip_search_finds_known_root() {
        let p13 = x(13);
        let roots = enumerate_roots_in_strip(&int(0), &rat(1, 10), &p13, 20);
        assert!(roots.contains(&MukaiVector::new(1, 1, 14)));
        assert!(roots.contains(&MukaiVector::new(1, 0, 1)));
        assert!(roots.iter().all(|d| is_root(d, &p13)));
    }

    #[test]
    fn chord_enumeration_matches_brute_force() {
        // Every vertex of this quadrilateral lies on y = 13x².
        let p13 = x(13);
        let q = |a: i64, b: i64| RatPoint::new(rat(a, b), rat(13 * a * a, b * b));
        let reg = Region {
            vertices: vec![q(-1, 2), q(-1, 5), q(1, 3), q(1, 2)],
            included_open_segments: vec![],
        };
        assert!(reg.is_strictly_convex_ccw());
        let fast = enumerate_roots_in_region(&reg, &p13, 300);
        let mut slow: Vec<MukaiVector> = enumerate_roots_in_strip(&rat(-1, 2), &rat(1, 2), &p13, 300)
            .into_iter()
            .filter(|d| reg.contains(&project(d).unwrap()))
            .flat_map(|d| [d, -d])
            .collect();
        slow.sort();
        assert!(!slow.is_empty());
        assert_eq!(fast, slow);
    }
}
