//! Wall lines through projected classes, the segment `p_u p_v` bounding the
//! Gieseker chamber of `i_*F`, and classification of candidate walls.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{int, Rational};
use crate::mukai::{distinguished_vectors, is_root, MukaiVector, Surface};
use crate::plane::{collinear, grey_points, hole_segment, project, RatPoint, Segment};

/// An exact line `anchor + t·direction` with the direction normalized so its
/// first nonzero component is positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub anchor: RatPoint,
    pub direction: (Rational, Rational),
}

impl Line {
    pub fn new(anchor: RatPoint, dx: Rational, dy: Rational) -> Result<Self> {
        if dx.is_zero() && dy.is_zero() {
            return Err(Error::DegenerateLine("zero direction"));
        }
        let flip = dx.is_negative() || (dx.is_zero() && dy.is_negative());
        let (dx, dy) = if flip { (-dx, -dy) } else { (dx, dy) };
        // Scale so the first nonzero component is 1.
        let lead = if dx.is_zero() { dy.clone() } else { dx.clone() };
        Ok(Self {
            anchor,
            direction: (dx / &lead, dy / lead),
        })
    }

    pub fn through(a: &RatPoint, b: &RatPoint) -> Result<Self> {
        if a == b {
            return Err(Error::DegenerateLine("coincident points"));
        }
        let d = b.sub(a);
        Self::new(a.clone(), d.x, d.y)
    }

    /// `None` for vertical lines.
    pub fn slope(&self) -> Option<Rational> {
        let (dx, dy) = &self.direction;
        if dx.is_zero() {
            None
        } else {
            Some(dy / dx)
        }
    }

    pub fn is_vertical(&self) -> bool {
        self.direction.0.is_zero()
    }

    pub fn is_horizontal(&self) -> bool {
        self.direction.1.is_zero()
    }

    pub fn point_at(&self, t: &Rational) -> RatPoint {
        RatPoint::new(
            &self.anchor.x + &self.direction.0 * t,
            &self.anchor.y + &self.direction.1 * t,
        )
    }

    /// Parameter of a point known to lie on the line.
    pub fn parameter_of(&self, pt: &RatPoint) -> Rational {
        let (dx, dy) = &self.direction;
        if dx.is_zero() {
            (&pt.y - &self.anchor.y) / dy
        } else {
            (&pt.x - &self.anchor.x) / dx
        }
    }

    pub fn contains(&self, pt: &RatPoint) -> bool {
        let other = self.anchor.add(&RatPoint::new(self.direction.0.clone(), self.direction.1.clone()));
        collinear(&self.anchor, &other, pt)
    }

    /// The intersection point, or `None` for parallel lines.
    pub fn intersect(&self, other: &Line) -> Option<RatPoint> {
        let (a, b) = &self.direction;
        let (c, d) = &other.direction;
        let det = a * d - b * c;
        if det.is_zero() {
            return None;
        }
        let w = other.anchor.sub(&self.anchor);
        let t = (&w.x * d - &w.y * c) / det;
        Some(self.point_at(&t))
    }

    /// Intersections with the parabola `y = p·x²` as approximate parameters,
    /// for display only.
    pub fn parabola_parameters_approx(&self, x: &Surface) -> Option<(f64, f64)> {
        let f = |q: &Rational| q.to_f64().unwrap_or(f64::NAN);
        let (ax, ay) = (f(&self.anchor.x), f(&self.anchor.y));
        let (dx, dy) = (f(&self.direction.0), f(&self.direction.1));
        let p = x.p() as f64;
        let qa = p * dx * dx;
        let qb = 2.0 * p * ax * dx - dy;
        let qc = p * ax * ax - ay;
        if qa == 0.0 {
            return (qb != 0.0).then(|| (-qc / qb, f64::INFINITY));
        }
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return None;
        }
        let r = disc.sqrt();
        Some(((-qb - r) / (2.0 * qa), (-qb + r) / (2.0 * qa)))
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + t·({}, {})", self.anchor, self.direction.0, self.direction.1)
    }
}

/// The line containing walls for a class `e`: through `pr(e)` and `through`
/// when `s ≠ 0`, otherwise through `through` with slope `r/c`.
pub fn wall_line(e: &MukaiVector, through: &RatPoint) -> Result<Line> {
    if e.is_zero() {
        return Err(Error::ZeroVector);
    }
    if e.s != 0 {
        let pr = project(e)?;
        if pr == *through {
            return Err(Error::DegenerateLine("anchor equals pr(e)"));
        }
        return Line::through(&pr, through);
    }
    if e.c == 0 {
        return Err(Error::DegenerateLine("s = 0 and c = 0"));
    }
    Line::new(through.clone(), int(e.c), int(e.r))
}

/// `pr(v(i_*F)) = (m/(p(2 − m)), 0)`, the common point of all walls of `i_*F`.
pub fn pivot(x: &Surface) -> RatPoint {
    let w = distinguished_vectors(x).w;
    project(&w).expect("v(i_*F) has s != 0")
}

/// The closed segment `p_u p_v`.
pub fn first_wall_segment(x: &Surface) -> Segment {
    let g = grey_points(x);
    let seg = Segment::closed(g.p_u, g.p_v);
    debug_assert!(collinear(&seg.a, &seg.b, &pivot(x)));
    seg
}

/// Position of a candidate wall relative to the line `p_u p_v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WallVerdict {
    Below,
    On,
    Above,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallClassification {
    pub verdict: WallVerdict,
    pub pivot: RatPoint,
    /// Intersection with the line `o p_u`.
    pub q1: Option<RatPoint>,
    /// Intersection with the line `o p_v`.
    pub q2: Option<RatPoint>,
}

/// Classifies the line through the pivot and `destabilizer_pr` against the
/// line `p_u p_v` by comparing slopes at the pivot. The relevant region
/// lies to the right of the pivot, where a larger slope means above.
pub fn classify_candidate_wall(destabilizer_pr: &RatPoint, x: &Surface) -> Result<WallClassification> {
    let pv = pivot(x);
    if *destabilizer_pr == pv {
        return Err(Error::DegenerateLine("destabilizer projects to the pivot"));
    }
    let g = grey_points(x);
    let line = Line::through(&pv, destabilizer_pr)?;
    let reference = Line::through(&pv, &g.p_v)?.slope().expect("p_u p_v is not vertical");
    let verdict = match line.slope() {
        None => WallVerdict::Above,
        Some(s) => match s.cmp(&reference) {
            Ordering::Less => WallVerdict::Below,
            Ordering::Equal => WallVerdict::On,
            Ordering::Greater => WallVerdict::Above,
        },
    };
    let o = RatPoint::origin();
    let q1 = line.intersect(&Line::through(&o, &g.p_u)?);
    let q2 = line.intersect(&Line::through(&o, &g.p_v)?);
    Ok(WallClassification { verdict, pivot: pv, q1, q2 })
}

/// The Brill-Noether wall line through `o′ = (0, 1)` for the class `e`.
pub fn brill_noether_line(e: &MukaiVector) -> Result<Line> {
    if e.is_zero() {
        return Err(Error::ZeroVector);
    }
    if e.c == 0 && e.r == e.s {
        return Err(Error::CoincidesWithOPrime);
    }
    let o_prime = RatPoint::o_prime();
    if e.s != 0 {
        return Line::through(&o_prime, &project(e)?);
    }
    Line::new(o_prime, int(e.c), int(e.r))
}

/// One end of the component of `L ∩ V(X)` containing a given point.
#[derive(Clone, Debug, PartialEq)]
pub enum ComponentEnd {
    /// The line leaves `V(X)` through the slit of this root.
    Hole { point: RatPoint, root: MukaiVector },
    /// No slit within the searched bound; the end is on the parabola (or at
    /// infinity), given approximately as a line parameter.
    Parabola { parameter: f64 },
}

/// The connected piece of a wall line inside `V(X)` around a base point,
/// with slits searched for roots with `1 ≤ s ≤ s_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct WallComponent {
    pub line: Line,
    pub base: RatPoint,
    pub lower: ComponentEnd,
    pub upper: ComponentEnd,
    pub s_max: i64,
}

/// Clips `line` to the component of `L ∩ V(X)` containing `base`.
///
/// Slits with larger `s` could still cut closer to `base`; the result is a
/// searched-bound statement, as recorded in `s_max`.
pub fn clip_wall(line: &Line, base: &RatPoint, x: &Surface, s_max: i64) -> Result<WallComponent> {
    if !line.contains(base) {
        return Err(Error::DegenerateLine("base point not on line"));
    }
    let (t_lo, t_hi) = line
        .parabola_parameters_approx(x)
        .ok_or(Error::DegenerateLine("line misses the cone"))?;
    let t0 = line.parameter_of(base);
    let xs = [t_lo, t_hi].map(|t| {
        let t = if t.is_finite() { t } else { t0.to_f64().unwrap_or(0.0) };
        line.point_at(&Rational::from_float(t).unwrap_or_else(|| int(0))).x.to_f64().unwrap_or(0.0)
    });
    let (x_min, x_max) = (xs[0].min(xs[1]), xs[0].max(xs[1]));
    let p = x.p() as i128;

    let mut lower: Option<(Rational, RatPoint, MukaiVector)> = None;
    let mut upper: Option<(Rational, RatPoint, MukaiVector)> = None;
    for s in 1..=s_max {
        let c_lo = ((x_min * s as f64).floor() as i64) - 1;
        let c_hi = ((x_max * s as f64).ceil() as i64) + 1;
        for c in c_lo..=c_hi {
            let num = p * (c as i128) * (c as i128) + 1;
            if num % s as i128 != 0 {
                continue;
            }
            let delta = MukaiVector::new((num / s as i128) as i64, c, s);
            debug_assert!(is_root(&delta, x));
            let Ok(slit) = hole_segment(&delta, x) else { continue };
            let Ok(ray) = Line::new(RatPoint::origin(), int(c), int(delta.r)) else { continue };
            let Some(hit) = line.intersect(&ray) else { continue };
            if !slit.contains(&hit) {
                continue;
            }
            let t = line.parameter_of(&hit);
            match t.cmp(&t0) {
                Ordering::Less => {
                    if lower.as_ref().is_none_or(|(best, _, _)| t > *best) {
                        lower = Some((t, hit, delta));
                    }
                }
                Ordering::Greater => {
                    if upper.as_ref().is_none_or(|(best, _, _)| t < *best) {
                        upper = Some((t, hit, delta));
                    }
                }
                Ordering::Equal => return Err(Error::DegenerateLine("base point lies on a slit")),
            }
        }
    }
    let end = |found: Option<(Rational, RatPoint, MukaiVector)>, fallback: f64| match found {
        Some((_, point, root)) => ComponentEnd::Hole { point, root },
        None => ComponentEnd::Parabola { parameter: fallback },
    };
    Ok(WallComponent {
        line: line.clone(),
        base: base.clone(),
        lower: end(lower, t_lo),
        upper: end(upper, t_hi),
        s_max,
    })
}
