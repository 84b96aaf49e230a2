//! Upper bounds on `h⁰` from central charges: the norm
//! `‖x + iy‖ = √(x² + (4p+4)y²)`, the Brill-Noether bound for a single
//! class, the polygon bound along an HN chain and its parity refinement.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Sub};
use std::sync::Mutex;

use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exactnum::{floor_avg_sqrt_i64, int, rat, RadicalSum};
use crate::mukai::{MukaiVector, Surface};
use crate::plane::RatPoint;

/// A Gaussian integer `a + ib`, read as `Z̄ = (r − s) + i·c`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussPoint {
    pub a: i64,
    pub b: i64,
}

impl GaussPoint {
    pub const fn new(a: i64, b: i64) -> Self {
        Self { a, b }
    }

    pub const fn origin() -> Self {
        Self::new(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// `gcd(|a|, |b|)`, with `gcd(0, n) = |n|`.
    pub fn content(&self) -> i64 {
        self.a.gcd(&self.b)
    }

    /// `self × o`; positive when `o` is counterclockwise of `self`.
    pub fn cross(&self, o: &GaussPoint) -> i128 {
        self.a as i128 * o.b as i128 - self.b as i128 * o.a as i128
    }

    pub fn to_rat(&self) -> RatPoint {
        RatPoint::from_ints(self.a, self.b)
    }

    /// Direction in the half-open upper half-plane `0° < angle ≤ 180°`.
    pub fn is_upward(&self) -> bool {
        self.b > 0 || (self.b == 0 && self.a < 0)
    }
}

impl Add for GaussPoint {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for GaussPoint {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b)
    }
}

impl fmt::Display for GaussPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.b {
            b if b < 0 => write!(f, "{}-{}i", self.a, -b),
            b => write!(f, "{}+{}i", self.a, b),
        }
    }
}

/// Convex chain of Gaussian integers from the origin, the shape of an HN
/// polygon. Consecutive collinear edges are merged.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain {
    vertices: Vec<GaussPoint>,
}

impl Chain {
    pub fn new(vertices: Vec<GaussPoint>) -> Result<Self> {
        if vertices.first() != Some(&GaussPoint::origin()) {
            return Err(Error::InvalidChain("first vertex must be the origin"));
        }
        let mut merged: Vec<GaussPoint> = vec![GaussPoint::origin()];
        let mut last: Option<GaussPoint> = None;
        for w in vertices.windows(2) {
            let e = w[1] - w[0];
            if e.is_zero() {
                return Err(Error::InvalidChain("repeated vertex"));
            }
            if !e.is_upward() {
                return Err(Error::InvalidChain("edge leaves the upper half-plane"));
            }
            match last {
                Some(prev) if prev.cross(&e) > 0 => {
                    return Err(Error::InvalidChain("edge angles must decrease"));
                }
                Some(prev) if prev.cross(&e) == 0 => {
                    merged.pop();
                }
                _ => {}
            }
            merged.push(w[1]);
            last = Some(e);
        }
        Ok(Self { vertices: merged })
    }

    pub fn vertices(&self) -> &[GaussPoint] {
        &self.vertices
    }

    pub fn edges(&self) -> Vec<GaussPoint> {
        self.vertices.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn end(&self) -> GaussPoint {
        *self.vertices.last().expect("chain has a vertex")
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// `‖g‖² = a² + (4p + 4)b²`.
pub fn norm_sq(g: &GaussPoint, x: &Surface) -> u128 {
    let (a, b) = (g.a as i128, g.b as i128);
    (a * a + (4 * x.p() as i128 + 4) * b * b) as u128
}

pub fn norm(g: &GaussPoint, x: &Surface) -> RadicalSum {
    RadicalSum::sqrt(norm_sq(g, x))
}

/// Norm of a vector with rational coordinates.
pub fn rat_norm(v: &RatPoint, x: &Surface) -> RadicalSum {
    let q = &v.x * &v.x + int(4 * x.p() + 4) * &v.y * &v.y;
    RadicalSum::sqrt_rational(&q)
}

/// Sum of the norms of consecutive differences along a path.
pub fn path_length(path: &[RatPoint], x: &Surface) -> RadicalSum {
    path.windows(2)
        .fold(RadicalSum::zero(), |acc, w| acc + rat_norm(&w[1].sub(&w[0]), x))
}

/// Radicand `(r−s)² + 4p·c² + 4k²` of the Brill-Noether bound for a class
/// with `Z̄ = a + ic`, `k = gcd(a, c)`.
pub fn bn_radicand(e: &GaussPoint, x: &Surface) -> u128 {
    let (a, c, k) = (e.a as i128, e.b as i128, e.content() as i128);
    (a * a + 4 * x.p() as i128 * c * c + 4 * k * k) as u128
}

/// `⌊χ/2 + √((r−s)² + 4p·c² + 4k²)/2⌋`.
pub fn bn_bound_int(e: &MukaiVector, x: &Surface) -> Result<i64> {
    let g = GaussPoint::new(e.r - e.s, e.c);
    if g.is_zero() {
        return Err(Error::DegenerateBrillNoether);
    }
    Ok(floor_avg_sqrt_i64(e.chi(), bn_radicand(&g, x)))
}

/// Evaluates `⌊(p+m²)/2 + √(4pm² + (p−m²)² + 4)/2⌋` and checks that it is
/// `p + m²`.
pub fn brill_noether_count(x: &Surface) -> i64 {
    let (p, m) = (x.p() as i128, x.m() as i128);
    let n = p + m * m;
    let radicand = 4 * p * m * m + (p - m * m).pow(2) + 4;
    assert_eq!(radicand, n * n + 4, "4pm² + (p−m²)² = (p+m²)² failed");
    let value = floor_avg_sqrt_i64(n as i64, radicand as u128);
    assert_eq!(value as i128, n, "Brill-Noether count mismatch");
    value
}

/// `χ/2 + Σ‖pᵢpᵢ₊₁‖/2`.
pub fn polygon_bound(ch: &Chain, chi: i64, x: &Surface) -> RadicalSum {
    let length = ch
        .edges()
        .iter()
        .fold(RadicalSum::zero(), |acc, e| acc + norm(e, x));
    (length + RadicalSum::from_rational(int(chi))).scale(&rat(1, 2))
}

pub fn polygon_bound_floor(ch: &Chain, chi: i64, x: &Surface) -> i64 {
    polygon_bound(ch, chi, x)
        .floor()
        .to_i64()
        .expect("bound fits in i64")
}

/// `⌊Σ √nᵢ⌋`. Uses a double-precision sum when its rounding error provably
/// cannot move the floor, and exact arithmetic otherwise.
pub fn floor_sqrt_sum(radicands: &[u128]) -> i64 {
    const EXACT_LIMIT: u128 = 1 << 52;
    if radicands.iter().all(|&n| n < EXACT_LIMIT) {
        let s: f64 = radicands.iter().map(|&n| (n as f64).sqrt()).sum();
        // Each root is correctly rounded; each addition adds one rounding.
        let err = (radicands.len() as f64 + 1.0) * s.max(1.0) * f64::EPSILON + 1e-300;
        let (lo, hi) = ((s - err).floor(), (s + err).floor());
        if lo == hi {
            return lo as i64;
        }
    }
    radicands
        .iter()
        .fold(RadicalSum::zero(), |acc, &n| acc + RadicalSum::sqrt(n))
        .floor()
        .to_i64()
        .expect("floor fits in i64")
}

/// Twice the excess over `χ/2` granted to one group of a grouped polygon
/// bound: `−1 + 2⌊(1+L)/2⌋` for odd displacement, `2⌊L/2⌋` for even, given
/// `⌊L⌋`.
pub fn group_excess2(odd_displacement: bool, floor_length: i64) -> i64 {
    if odd_displacement {
        -1 + 2 * (1 + floor_length).div_euclid(2)
    } else {
        2 * floor_length.div_euclid(2)
    }
}

/// Parity-refined bound along a path split into groups at lattice vertices:
/// each group contributes `(χᵢ−1)/2 + ⌊(1+Lᵢ)/2⌋` when its displacement in
/// the real direction is odd and `χᵢ/2 + ⌊Lᵢ/2⌋` when it is even.
pub fn parity_refined_bound(
    path: &[RatPoint],
    boundaries: &[usize],
    chis: &[i64],
    x: &Surface,
) -> Result<i64> {
    if boundaries.len() < 2
        || boundaries[0] != 0
        || *boundaries.last().unwrap() + 1 != path.len()
        || boundaries.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidGrouping("boundaries must run from first to last vertex"));
    }
    if chis.len() + 1 != boundaries.len() {
        return Err(Error::InvalidGrouping("one χ per group is required"));
    }
    let mut twice = 0i64;
    for (group, (w, &chi)) in boundaries.windows(2).zip(chis).enumerate() {
        let (start, end) = (&path[w[0]], &path[w[1]]);
        if !start.x.is_integer() || !end.x.is_integer() {
            return Err(Error::InvalidGrouping("group boundary is not a lattice point"));
        }
        let displacement = &end.x - &start.x;
        let odd = displacement.to_integer().is_odd();
        if odd != chi.is_odd() {
            return Err(Error::ParityMismatch {
                group,
                chi,
                displacement: displacement.to_string(),
            });
        }
        let floor_length = path_length(&path[w[0]..=w[1]], x)
            .floor()
            .to_i64()
            .expect("length fits in i64");
        twice += chi + group_excess2(odd, floor_length);
    }
    Ok(twice / 2)
}

/// Per-group `χ` values with the parity of each displacement and total
/// `chi`; the grouped bound only depends on these parities and the total.
pub fn split_chi(path: &[RatPoint], boundaries: &[usize], chi: i64) -> Vec<i64> {
    let mut chis: Vec<i64> = boundaries
        .windows(2)
        .map(|w| {
            let d = (&path[w[1]].x - &path[w[0]].x).to_integer();
            i64::from(d.is_odd())
        })
        .collect();
    if let Some(last) = chis.len().checked_sub(1) {
        let others: i64 = chis[..last].iter().sum();
        chis[last] = chi - others;
    }
    chis
}

/// Minimal square `−2((n−1)² + 1)` of a sum of `n` root classes that are not
/// all equal.
pub fn min_square_decomposition(n_parts: i64) -> Result<i64> {
    if n_parts < 2 {
        return Err(Error::TooFewParts(n_parts));
    }
    Ok(-2 * ((n_parts - 1).pow(2) + 1))
}

/// Weight `w` of an edge so that `√w` bounds its contribution: the
/// Brill-Noether radicand when it beats the norm, the norm otherwise.
pub fn edge_weight(e: &GaussPoint, x: &Surface) -> u128 {
    if e.b == 0 {
        norm_sq(e, x)
    } else {
        bn_radicand(e, x)
    }
}

/// Twice the excess over `χ/2` for a single semistable factor with
/// `Z̄ = e`. With `square_refine`, a candidate value `h` is discarded when
/// the class `v(E) − h·v(O_X)` is primitive with square below
/// [`min_square_decomposition`] of `k = gcd(r−s, c)` parts.
pub fn factor_excess2(e: &GaussPoint, x: &Surface, square_refine: bool) -> i64 {
    let floor_length = floor_sqrt_sum(&[edge_weight(e, x)]);
    let mut tau = group_excess2(e.a.is_odd(), floor_length);
    let k = e.content();
    if !square_refine || e.b == 0 || k < 2 {
        return tau;
    }
    let floor_sq = min_square_decomposition(k).expect("k ≥ 2");
    let (a, c, p) = (e.a as i128, e.b as i128, x.p() as i128);
    loop {
        let t = tau as i128;
        let rest = MukaiVector::new(((a - t) / 2) as i64, c as i64, ((-a - t) / 2) as i64);
        let square = 2 * p * c * c - 2 * ((a - t) / 2) * ((-a - t) / 2);
        if rest.is_primitive() && square < floor_sq as i128 {
            tau -= 2;
        } else {
            return tau;
        }
    }
}

/// A grouping of consecutive edges and the resulting twice-excess.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grouping {
    pub excess2: i64,
    /// Vertex indices where groups start and end, including both ends.
    pub boundaries: Vec<usize>,
}

/// Minimum over all groupings of consecutive edges of the total twice-excess.
/// Groups of several edges use `⌊Σ√wᵢ⌋`; single edges use
/// [`factor_excess2`].
pub fn best_grouping(edges: &[GaussPoint], x: &Surface, square_refine: bool) -> Grouping {
    grouping_with(edges, x, |i| factor_excess2(&edges[i], x, square_refine))
}

/// [`best_grouping`] with the cost of a lone edge supplied by `lone`.
fn grouping_with(edges: &[GaussPoint], x: &Surface, lone: impl Fn(usize) -> i64) -> Grouping {
    let n = edges.len();
    let weights: Vec<u128> = edges.iter().map(|e| edge_weight(e, x)).collect();
    let mut best: Vec<(i64, usize)> = vec![(i64::MAX, 0); n + 1];
    best[0] = (0, 0);
    for j in 1..=n {
        for i in 0..j {
            let cost = if j == i + 1 {
                lone(i)
            } else {
                let disp: i64 = edges[i..j].iter().map(|e| e.a).sum();
                group_excess2(disp.is_odd(), floor_sqrt_sum(&weights[i..j]))
            };
            let total = best[i].0 + cost;
            if total < best[j].0 {
                best[j] = (total, i);
            }
        }
    }
    let mut boundaries = vec![n];
    let mut j = n;
    while j > 0 {
        j = best[j].1;
        boundaries.push(j);
    }
    boundaries.reverse();
    Grouping {
        excess2: best[n].0,
        boundaries,
    }
}

/// How the splittings of merged edges were handled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitMethod {
    /// Every combination of splittings was examined.
    Exhaustive { splits: u64 },
    /// Groupings at merged vertices only, each lone merged edge charged the
    /// worst case over its own splittings. `exact_edges` is false when some
    /// edge had too many splittings and was charged its coarse bound.
    PerEdge { exact_edges: bool },
}

/// Refined bound for a chain whose HN factors may split each merged edge
/// into collinear pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversarialBound {
    pub bound: i64,
    /// Edges the grouping refers to: the worst split when exhaustive, the
    /// merged edges otherwise.
    pub edges: Vec<GaussPoint>,
    pub grouping: Grouping,
    pub method: SplitMethod,
}

/// Maximum over splittings of merged edges into collinear pieces of the
/// minimum over groupings of `(χ + Σ excess)/2`, with a cache of per-edge
/// worst cases.
pub struct Adversary<'a> {
    x: &'a Surface,
    cap: u64,
    edges: Mutex<HashMap<GaussPoint, Option<i64>>>,
}

impl<'a> Adversary<'a> {
    /// `cap` bounds the number of splittings examined at once.
    pub fn new(x: &'a Surface, cap: u64) -> Self {
        Self {
            x,
            cap,
            edges: Mutex::new(HashMap::new()),
        }
    }

    pub fn bound(&self, ch: &Chain, chi: i64) -> AdversarialBound {
        let edges = ch.edges();
        let count = edges
            .iter()
            .filter(|e| e.b != 0)
            .try_fold(1u64, |acc, e| acc.checked_mul(1u64.checked_shl((e.content() - 1) as u32)?));
        let (grouping, edges, method) = match count {
            Some(total) if total <= self.cap => {
                let (g, split) = Splits::new(&edges)
                    .map(|split| (best_grouping(&split, self.x, true), split))
                    .reduce(|a, b| if b.0.excess2 > a.0.excess2 { b } else { a })
                    .expect("at least one split");
                (g, split, SplitMethod::Exhaustive { splits: total })
            }
            _ => {
                let lone: Vec<Option<i64>> = edges.iter().map(|e| self.edge_excess2(e)).collect();
                let exact_edges = lone.iter().all(Option::is_some);
                let lone: Vec<i64> = edges
                    .iter()
                    .zip(lone)
                    .map(|(e, v)| v.unwrap_or_else(|| factor_excess2(e, self.x, false)))
                    .collect();
                let g = grouping_with(&edges, self.x, |i| lone[i]);
                (g, edges, SplitMethod::PerEdge { exact_edges })
            }
        };
        AdversarialBound {
            bound: (chi + grouping.excess2).div_euclid(2),
            edges,
            grouping,
            method,
        }
    }

    /// Worst case over splittings of one edge of the best grouping of its
    /// pieces; `None` when the splittings exceed the cap.
    pub fn edge_excess2(&self, e: &GaussPoint) -> Option<i64> {
        if let Some(v) = self.edges.lock().expect("cache lock").get(e) {
            return *v;
        }
        let v = edge_split_excess2(e, self.x, self.cap);
        self.edges.lock().expect("cache lock").insert(*e, v);
        v
    }
}

/// Convenience wrapper around [`Adversary::bound`].
pub fn adversarial_bound(ch: &Chain, chi: i64, x: &Surface, cap: u64) -> AdversarialBound {
    Adversary::new(x, cap).bound(ch, chi)
}

fn edge_split_excess2(e: &GaussPoint, x: &Surface, cap: u64) -> Option<i64> {
    let k = e.content();
    if e.b == 0 || k < 2 {
        return Some(factor_excess2(e, x, true));
    }
    let count = 1u64.checked_shl((k - 1) as u32)?;
    if count > cap {
        return None;
    }
    let d = GaussPoint::new(e.a / k, e.b / k);
    let unit = bn_radicand(&d, x);
    let lone: Vec<i64> = (0..=k)
        .map(|s| if s == 0 { 0 } else { factor_excess2(&GaussPoint::new(s * d.a, s * d.b), x, true) })
        .collect();
    let joined: Vec<i64> = (0..=k)
        .map(|s| {
            let len = floor_sqrt_sum(&[(s * s) as u128 * unit]);
            group_excess2((s * d.a).is_odd(), len)
        })
        .collect();
    let mut worst = i64::MIN;
    let mut cuts = Vec::with_capacity(k as usize + 1);
    let mut best = Vec::with_capacity(k as usize + 1);
    for mask in 0..count {
        cuts.clear();
        cuts.push(0i64);
        cuts.extend((1..k).filter(|i| mask >> (i - 1) & 1 == 1));
        cuts.push(k);
        best.clear();
        best.push(0i64);
        for j in 1..cuts.len() {
            let value = (0..j)
                .map(|i| {
                    let s = (cuts[j] - cuts[i]) as usize;
                    best[i] + if j == i + 1 { lone[s] } else { joined[s] }
                })
                .min()
                .expect("nonempty");
            best.push(value);
        }
        worst = worst.max(*best.last().expect("nonempty"));
    }
    Some(worst)
}

/// All ways of cutting each edge into collinear lattice pieces, in a fixed
/// order.
struct Splits<'a> {
    edges: &'a [GaussPoint],
    /// Bitmask per edge of cut positions among its `k − 1` interior points.
    masks: Vec<u64>,
    done: bool,
}

impl<'a> Splits<'a> {
    fn new(edges: &'a [GaussPoint]) -> Self {
        Self {
            edges,
            masks: vec![0; edges.len()],
            done: false,
        }
    }
}

impl Iterator for Splits<'_> {
    type Item = Vec<GaussPoint>;

    fn next(&mut self) -> Option<Vec<GaussPoint>> {
        if self.done {
            return None;
        }
        let mut out = Vec::new();
        for (e, &mask) in self.edges.iter().zip(&self.masks) {
            let k = e.content();
            let step = GaussPoint::new(e.a / k, e.b / k);
            let mut run = 0;
            for i in 1..=k {
                run += 1;
                if i == k || mask >> (i - 1) & 1 == 1 {
                    out.push(GaussPoint::new(step.a * run, step.b * run));
                    run = 0;
                }
            }
        }
        self.done = true;
        for (e, mask) in self.edges.iter().zip(self.masks.iter_mut()) {
            let k = e.content();
            if e.b == 0 || k < 2 {
                continue;
            }
            *mask += 1;
            if *mask < 1 << (k - 1) {
                self.done = false;
                break;
            }
            *mask = 0;
        }
        Some(out)
    }
}
