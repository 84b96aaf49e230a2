//! Search over convex lattice chains inside the triangle `o z₁ z₂` for HN
//! polygons that could beat the Brill-Noether count, plus the closed-form
//! certificates that replace the search for large `p`.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::exactnum::{int, rat, Rational, RadicalSum};
use crate::hzero::{
    norm_sq, Adversary, SplitMethod, parity_refined_bound, path_length, polygon_bound,
    polygon_bound_floor, split_chi, Chain, GaussPoint,
};
use crate::mukai::{is_prime, m_bound_check, min_nondivisor, Surface};
use crate::plane::{cross, RatPoint};

/// The triangle `o z₁ z₂` with `z₁ = Z̄(v)`, `z₂ = Z̄(i_*F)`, and the
/// auxiliary points `z₁′`, `z₂′` one row inside its upper corners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub o: GaussPoint,
    pub z1: GaussPoint,
    pub z2: GaussPoint,
    pub z1p: RatPoint,
    pub z2p: RatPoint,
}

impl Triangle {
    /// Weak containment; the vertices `o, z₂, z₁` run counterclockwise.
    pub fn contains(&self, q: &GaussPoint) -> bool {
        let side = |a: GaussPoint, b: GaussPoint| (b - a).cross(&(*q - a)) >= 0;
        side(self.o, self.z2) && side(self.z2, self.z1) && side(self.z1, self.o)
    }

    /// `χ(i_*F) = −Re z₂`.
    pub fn chi(&self) -> i64 {
        -self.z2.a
    }

    /// The two-edge chain `o → z₁ → z₂`.
    pub fn chain(&self) -> Chain {
        Chain::new(vec![self.o, self.z1, self.z2]).expect("triangle chain is convex")
    }
}

pub fn triangle(x: &Surface) -> Triangle {
    let (p, m) = (x.p(), x.m());
    let z1 = GaussPoint::new(m * m - p, m);
    let z2 = GaussPoint::new(m * m * p - 2 * p * m, m * m);
    let z1p = RatPoint::new(rat((m - 1) * (m * m - p), m), int(m - 1));
    let z2p = RatPoint::new(rat(-p, m) + int(m * m) - rat(m, m - 1), int(m + 1));
    Triangle {
        o: GaussPoint::origin(),
        z1,
        z2,
        z1p,
        z2p,
    }
}

/// All lattice points weakly inside the triangle, by rows of increasing `b`.
pub fn lattice_points(t: &Triangle) -> Vec<GaussPoint> {
    let (lo, hi) = (t.z1.a.min(0), t.z2.a.max(0));
    (0..=t.z2.b)
        .flat_map(|b| (lo..=hi).map(move |a| GaussPoint::new(a, b)))
        .filter(|q| t.contains(q))
        .collect()
}

/// Whether a lattice point lies weakly inside a convex polygon given
/// counterclockwise.
fn in_convex(poly: &[RatPoint], q: &GaussPoint) -> bool {
    let q = q.to_rat();
    (0..poly.len()).all(|i| {
        let (a, b) = (&poly[i], &poly[(i + 1) % poly.len()]);
        cross(a, b, &q) >= Rational::from_integer(0.into())
    })
}

/// Limits for the chain search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Maximal number of point pairs (edges) the search may build.
    pub max_edges: u64,
    /// Maximal number of chains enumerated in one refinement pass.
    pub max_chains: usize,
    /// Cap on collinear splittings examined per chain.
    pub split_cap: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_edges: 50_000_000,
            max_chains: 2_000_000,
            split_cap: 1 << 12,
        }
    }
}

/// Slack on double-precision lengths; the accumulated rounding error on
/// the lengths involved is below `1e-9`.
const TOL: f64 = 1e-6;

/// Convex lattice chains from the origin to `end` through a point set.
pub struct ChainSearch {
    points: Vec<GaussPoint>,
    end: usize,
    /// Primitive edge directions in decreasing angle.
    directions: Vec<GaussPoint>,
    /// Length of each primitive direction.
    unit: Vec<f64>,
    /// Per point, edges `(direction, target, multiple)` sorted by direction,
    /// stored as offsets into one array.
    offsets: Vec<usize>,
    edges: Vec<[u32; 3]>,
    /// `bound[s][i]` bounds the longest chain from point `i` to the end
    /// using directions of index at least `s · block`.
    bound: Vec<Vec<f64>>,
    block: usize,
}

/// Why a search could not run to completion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Capped {
    Edges { needed: u64, cap: u64 },
    Chains { cap: usize },
}

/// Edge directions allowed between the steepest direction `first` and the
/// flattest direction `last`, both inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cone {
    pub first: GaussPoint,
    pub last: GaussPoint,
}

impl Cone {
    pub fn contains(&self, d: &GaussPoint) -> bool {
        d.is_upward() && self.first.cross(d) <= 0 && self.last.cross(d) >= 0
    }
}

impl ChainSearch {
    /// Builds the search over `points`, which must contain the origin and
    /// `end` and be the lattice points of a convex region. Edges are the
    /// upward differences of points, restricted to `cone` when given.
    pub fn new(
        points: Vec<GaussPoint>,
        end: GaussPoint,
        cone: Option<Cone>,
        x: &Surface,
        limits: &SearchLimits,
    ) -> Result<Self, Capped> {
        let n = points.len();
        let end_idx = points.iter().position(|q| *q == end).expect("end point present");
        let allowed = |e: &GaussPoint| e.is_upward() && cone.is_none_or(|c| c.contains(e));
        let mut found: HashSet<GaussPoint> = HashSet::new();
        let mut pairs = 0u64;
        for p in &points {
            for q in &points {
                let e = *q - *p;
                if allowed(&e) {
                    pairs += 1;
                    let k = e.content();
                    found.insert(GaussPoint::new(e.a / k, e.b / k));
                }
            }
            if pairs > limits.max_edges {
                return Err(Capped::Edges {
                    needed: pairs,
                    cap: limits.max_edges,
                });
            }
        }
        let mut directions: Vec<GaussPoint> = found.into_iter().collect();
        directions.sort_by(|u, v| u.cross(v).cmp(&0));
        let rank: HashMap<GaussPoint, u32> = directions
            .iter()
            .enumerate()
            .map(|(i, d)| (*d, i as u32))
            .collect();
        let unit: Vec<f64> = directions
            .iter()
            .map(|d| (norm_sq(d, x) as f64).sqrt())
            .collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut edges: Vec<[u32; 3]> = Vec::with_capacity(pairs as usize);
        for p in &points {
            offsets.push(edges.len());
            let start = edges.len();
            for (j, q) in points.iter().enumerate() {
                let e = *q - *p;
                if allowed(&e) {
                    let k = e.content();
                    let d = GaussPoint::new(e.a / k, e.b / k);
                    edges.push([rank[&d], j as u32, k as u32]);
                }
            }
            edges[start..].sort_unstable();
        }
        offsets.push(edges.len());
        let mut search = Self {
            points,
            end: end_idx,
            directions,
            unit,
            offsets,
            edges,
            bound: Vec::new(),
            block: 1,
        };
        search.fill_bounds();
        Ok(search)
    }

    /// Backward pass over directions in increasing angle, keeping a
    /// snapshot of the longest-chain table every `block` directions.
    fn fill_bounds(&mut self) {
        let n = self.points.len();
        let k_total = self.directions.len();
        let mut by_dir: Vec<(u32, u32, u32, u32)> = Vec::with_capacity(self.edges.len());
        for i in 0..n {
            for e in &self.edges[self.offsets[i]..self.offsets[i + 1]] {
                by_dir.push((e[0], i as u32, e[1], e[2]));
            }
        }
        by_dir.sort_unstable_by_key(|e| std::cmp::Reverse(e.0));
        let snapshots = (4_000_000 / n.max(1)).clamp(1, k_total.max(1));
        self.block = k_total.div_ceil(snapshots).max(1);
        let mut best = vec![f64::NEG_INFINITY; n];
        best[self.end] = 0.0;
        self.bound = vec![Vec::new(); k_total.div_ceil(self.block) + 1];
        *self.bound.last_mut().expect("nonempty") = best.clone();
        let mut at = 0;
        for k in (0..k_total).rev() {
            while at < by_dir.len() && by_dir[at].0 as usize == k {
                let (_, i, j, mult) = by_dir[at];
                let cand = best[j as usize] + self.unit[k] * mult as f64;
                if cand > best[i as usize] {
                    best[i as usize] = cand;
                }
                at += 1;
            }
            if k % self.block == 0 {
                self.bound[k / self.block] = best.clone();
            }
        }
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn direction_count(&self) -> usize {
        self.directions.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn origin(&self) -> usize {
        self.points
            .iter()
            .position(|q| *q == GaussPoint::origin())
            .expect("origin present")
    }

    /// Approximate length of the longest chain from the origin.
    pub fn max_length_approx(&self) -> f64 {
        self.bound[0][self.origin()]
    }

    fn upper(&self, point: usize, first_dir: usize) -> f64 {
        self.bound[first_dir / self.block][point]
    }

    /// Every chain from the origin to the end whose length is at least
    /// `need` up to the rounding slack, as merged vertex lists.
    pub fn chains_at_least(&self, need: f64, cap: usize) -> Result<Vec<Chain>, Capped> {
        let o = self.origin();
        let mut out = Vec::new();
        let mut stack = vec![o as u32];
        self.dfs(o, 0, 0.0, need - TOL, &mut stack, &mut out, cap)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        at: usize,
        first_dir: usize,
        len: f64,
        need: f64,
        stack: &mut Vec<u32>,
        out: &mut Vec<Chain>,
        cap: usize,
    ) -> Result<(), Capped> {
        if at == self.end {
            if len >= need {
                if out.len() >= cap {
                    return Err(Capped::Chains { cap });
                }
                let vertices = stack.iter().map(|&i| self.points[i as usize]).collect();
                out.push(Chain::new(vertices).expect("search yields convex chains"));
            }
            return Ok(());
        }
        if first_dir >= self.directions.len() || len + self.upper(at, first_dir) < need {
            return Ok(());
        }
        let list = &self.edges[self.offsets[at]..self.offsets[at + 1]];
        let start = list.partition_point(|e| (e[0] as usize) < first_dir);
        for &[dir, to, mult] in &list[start..] {
            let next_dir = dir as usize + 1;
            let to = to as usize;
            let step = self.unit[dir as usize] * mult as f64;
            let rest = if to == self.end {
                0.0
            } else if next_dir >= self.directions.len() {
                continue;
            } else {
                self.upper(to, next_dir)
            };
            if len + step + rest < need {
                continue;
            }
            stack.push(to as u32);
            self.dfs(to, next_dir, len + step, need, stack, out, cap)?;
            stack.pop();
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Plain,
    Refined,
}

/// A chain whose plain bound reaches the target, and its refined bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinedCase {
    pub chain: Chain,
    pub plain_floor: i64,
    pub rule: String,
    pub bound: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Verified,
    Failed(Chain),
    Capped(Capped),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub p: i64,
    pub m: i64,
    pub triangle_floor: i64,
    pub lattice_points: usize,
    pub directions: usize,
    /// Largest plain polygon bound over interior chains.
    pub plain_max_floor: i64,
    /// Upper bound on the best certified bound of every interior chain.
    pub max_interior_bound: i64,
    pub witness: Option<Chain>,
    pub refined_cases: Vec<RefinedCase>,
    pub status: Status,
}

/// Interior chains: convex lattice chains from `o` to `z₂` in the triangle
/// other than `o → z₁ → z₂`. The only chain through `z₁` is the triangle
/// itself, so the search runs on the lattice points minus `z₁`.
pub fn interior_search(x: &Surface, limits: &SearchLimits) -> Result<(Triangle, ChainSearch), Capped> {
    let t = triangle(x);
    let points: Vec<GaussPoint> = lattice_points(&t).into_iter().filter(|q| *q != t.z1).collect();
    let cone = Cone {
        first: t.z1,
        last: t.z2 - t.z1,
    };
    let search = ChainSearch::new(points, t.z2, Some(cone), x, limits)?;
    Ok((t, search))
}

/// Picks the chain with the largest exact plain bound, ties broken by the
/// lexicographically least vertex list.
fn best_chain(chains: &[Chain], chi: i64, x: &Surface) -> Option<(Chain, RadicalSum)> {
    chains
        .iter()
        .map(|c| (c.clone(), polygon_bound(c, chi, x)))
        .reduce(|a, b| match a.1.cmp_sum(&b.1) {
            Ordering::Less => b,
            Ordering::Greater => a,
            Ordering::Equal => {
                if b.0 < a.0 {
                    b
                } else {
                    a
                }
            }
        })
}

pub fn max_interior_bound(x: &Surface, mode: Mode) -> Verdict {
    max_interior_bound_with(x, mode, &SearchLimits::default())
}

pub fn max_interior_bound_with(x: &Surface, mode: Mode, limits: &SearchLimits) -> Verdict {
    let t = triangle(x);
    let target = x.target();
    let chi = t.chi();
    let triangle_floor = polygon_bound_floor(&t.chain(), chi, x);
    let mut verdict = Verdict {
        p: x.p(),
        m: x.m(),
        triangle_floor,
        lattice_points: lattice_points(&t).len(),
        directions: 0,
        plain_max_floor: 0,
        max_interior_bound: 0,
        witness: None,
        refined_cases: Vec::new(),
        status: Status::Verified,
    };
    let search = match interior_search(x, limits) {
        Ok((_, s)) => s,
        Err(cap) => {
            verdict.status = Status::Capped(cap);
            return verdict;
        }
    };
    verdict.directions = search.direction_count();
    let top = match search.chains_at_least(search.max_length_approx(), limits.max_chains) {
        Ok(c) => c,
        Err(cap) => {
            verdict.status = Status::Capped(cap);
            return verdict;
        }
    };
    let (witness, value) = best_chain(&top, chi, x).expect("some interior chain exists");
    verdict.plain_max_floor = value.floor().to_i64().expect("bound fits in i64");
    verdict.witness = Some(witness.clone());
    verdict.max_interior_bound = verdict.plain_max_floor;
    if mode == Mode::Plain || verdict.plain_max_floor < target {
        verdict.status = decide(&verdict, target, witness);
        return verdict;
    }
    let need = (2 * target - chi) as f64;
    let candidates = match search.chains_at_least(need, limits.max_chains) {
        Ok(c) => c,
        Err(cap) => {
            verdict.status = Status::Capped(cap);
            return verdict;
        }
    };
    let adversary = Adversary::new(x, limits.split_cap);
    let mut cases: Vec<RefinedCase> = candidates
        .par_iter()
        .filter_map(|c| {
            let plain = polygon_bound_floor(c, chi, x);
            if plain < target {
                return None;
            }
            let adv = adversary.bound(c, chi);
            let rule = match adv.method {
                SplitMethod::Exhaustive { splits } => format!(
                    "parity groups {:?} with square refinement, worst of {splits} splits",
                    adv.grouping.boundaries
                ),
                SplitMethod::PerEdge { exact_edges } => format!(
                    "parity groups {:?} at merged vertices, per-edge split worst case{}",
                    adv.grouping.boundaries,
                    if exact_edges { "" } else { " (some edges coarse)" }
                ),
            };
            Some(RefinedCase {
                chain: c.clone(),
                plain_floor: plain,
                rule,
                bound: adv.bound.min(plain),
            })
        })
        .collect();
    cases.sort_by(|a, b| b.bound.cmp(&a.bound).then(a.chain.cmp(&b.chain)));
    let refined_max = cases.first().map_or(i64::MIN, |c| c.bound);
    verdict.max_interior_bound = refined_max.max(target - 1);
    let worst = cases.first().map_or(witness, |c| c.chain.clone());
    verdict.refined_cases = cases;
    verdict.status = decide(&verdict, target, worst);
    verdict
}

fn decide(v: &Verdict, target: i64, worst: Chain) -> Status {
    if v.max_interior_bound < target && v.triangle_floor >= target {
        Status::Verified
    } else {
        Status::Failed(worst)
    }
}

/// The envelope argument for pairs where the interior bound is settled by
/// one pentagon and one split at `q₁ = m²−p+1 + im`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Envelope {
    pub q1: GaussPoint,
    pub q2: GaussPoint,
    /// `χ/2 + ½(‖oz₁′‖ + ‖z₁′q₂‖ + ‖q₂z₂′‖ + ‖z₂′z₂‖)`.
    pub h: RadicalSum,
    pub h_floor: i64,
    /// Parity-refined bound along `o z₁′ q₁ | q₁ z₂′ z₂`.
    pub h_prime: i64,
    pub odd_split: bool,
    /// Lattice points of the triangle other than `z₁, q₁` lie in the pentagon.
    pub pentagon_contains: bool,
    /// Points before `q₁` lie in `o z₁′ q₁`, points after it in `q₁ z₂′ z₂`.
    pub split_contains: bool,
    pub verified: bool,
}

pub fn envelope_bound(x: &Surface) -> Envelope {
    let t = triangle(x);
    let (p, m) = (x.p(), x.m());
    let q1 = GaussPoint::new(m * m - p + 1, m);
    let q2 = GaussPoint::new(m * m - p + 2, m);
    let (o, z2) = (RatPoint::origin(), t.z2.to_rat());
    let pentagon = vec![o.clone(), z2.clone(), t.z2p.clone(), q2.to_rat(), t.z1p.clone()];
    let points = lattice_points(&t);
    let pentagon_contains = points
        .iter()
        .filter(|q| **q != t.z1 && **q != q1)
        .all(|q| in_convex(&pentagon, q));
    let first = [o.clone(), q1.to_rat(), t.z1p.clone()];
    let second = [q1.to_rat(), z2.clone(), t.z2p.clone()];
    let split_contains = points.iter().filter(|q| **q != t.z1).all(|q| {
        let before = q1.cross(q) >= 0;
        let after = q1.cross(&(*q - q1)) <= 0 && (t.z2 - q1).cross(&(*q - q1)) >= 0;
        (!before || in_convex(&first, q)) && (!after || in_convex(&second, q))
    });
    let chi = t.chi();
    let envelope = [o.clone(), t.z1p.clone(), q2.to_rat(), t.z2p.clone(), z2.clone()];
    let h = (path_length(&envelope, x) + RadicalSum::from_rational(int(chi))).scale(&rat(1, 2));
    let h_floor = h.floor().to_i64().expect("bound fits in i64");
    let split = [o, t.z1p.clone(), q1.to_rat(), t.z2p.clone(), z2];
    let bounds = [0, 2, 4];
    let chis = split_chi(&split, &bounds, chi);
    let h_prime = parity_refined_bound(&split, &bounds, &chis, x).expect("lattice boundaries");
    let target = x.target();
    Envelope {
        q1,
        q2,
        verified: pentagon_contains && split_contains && h_floor < target && h_prime < target,
        h,
        h_floor,
        h_prime,
        odd_split: q1.a.is_odd(),
        pentagon_contains,
        split_contains,
    }
}

/// Which part of the closed-form argument covers a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Route {
    /// `31 ≤ p < 250`: `2ε ≤ f₁ ≤ lower < upper < f₂ + f₃` for the bucket
    /// of `m`.
    Bucket { m: i64, lower: Rational, upper: Rational },
    /// Settled by comparing `2ε` and `l − l_in` directly.
    Direct,
    /// `p > 250`: `m ≤ ⌊√(2p/5)⌋`, `2ε < 48/35`, `f₂ > 517/1250`,
    /// `f₃ > 975/1000`.
    Asymptotic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LargePCertificate {
    pub p: i64,
    pub m: i64,
    pub applicable: bool,
    /// `2ε = l + p(2m − m²) − 2(p + m²)` with `l = ‖oz₁‖ + ‖z₁z₂‖`.
    pub epsilon2: RadicalSum,
    /// `l − l_in = ‖z₁′z₁‖ − ‖z₁′q‖ + ‖z₁z₂′‖ − ‖qz₂′‖`.
    pub gap: RadicalSum,
    pub f1: Rational,
    pub f2: RadicalSum,
    pub f3: Rational,
    pub route: Route,
    /// The numeric thresholds of the route hold.
    pub route_holds: bool,
    /// `2ε < f₁ < f₂ + f₃ < l − l_in`, which settles the claim without the
    /// route's thresholds.
    pub bounds_hold: bool,
    /// `2ε < l − l_in`.
    pub verdict: bool,
}

fn bucket_bounds(m: i64) -> Option<(Rational, Rational)> {
    match m {
        3 => Some((rat(81, 80), rat(13, 10))),
        4 => Some((rat(11, 10), rat(14, 10))),
        5 => Some((rat(13, 10), rat(14, 10))),
        7 => Some((int(1), rat(15, 10))),
        _ => None,
    }
}

pub fn large_p_certificate(p: i64) -> LargePCertificate {
    let m = min_nondivisor(p);
    let applicable = p >= 31 && is_prime(p) && p != 47 && p != 59;
    let (epsilon2, gap, f1, f2, f3) = match Surface::new(p) {
        Ok(x) if applicable => certificate_values(&x),
        _ => (RadicalSum::zero(), RadicalSum::zero(), int(0), RadicalSum::zero(), int(0)),
    };
    let verdict = applicable && (&gap - &epsilon2).signum() == Ordering::Greater;
    let lt = |a: &RadicalSum, b: &Rational| a.cmp_sum(&RadicalSum::from_rational(b.clone())) == Ordering::Less;
    let gt = |a: &RadicalSum, b: &Rational| a.cmp_sum(&RadicalSum::from_rational(b.clone())) == Ordering::Greater;
    let f23 = &f2 + &RadicalSum::from_rational(f3.clone());
    let (route, route_holds) = if p > 250 {
        let holds = m_bound_check(p).asymptotic
            && lt(&epsilon2, &rat(48, 35))
            && gt(&f2, &rat(517, 1250))
            && f3 > rat(975, 1000);
        (Route::Asymptotic, holds)
    } else if p == 41 {
        (Route::Direct, verdict)
    } else if let Some((lower, upper)) = bucket_bounds(m) {
        let f1_ok = if m == 7 { f1 < lower } else { f1 <= lower };
        let holds = f1_ok && gt(&f23, &upper) && lower < upper && (p - m * m) > m;
        (Route::Bucket { m, lower, upper }, holds)
    } else {
        (Route::Direct, verdict)
    };
    let bounds_hold = applicable
        && (p - m * m) > m
        && lt(&epsilon2, &f1)
        && gt(&f23, &f1)
        && (&gap - &f23).signum() == Ordering::Greater;
    LargePCertificate {
        p,
        m,
        applicable,
        bounds_hold,
        epsilon2,
        gap,
        f1,
        f2,
        f3,
        route,
        route_holds: applicable && route_holds,
        verdict,
    }
}

fn certificate_values(x: &Surface) -> (RadicalSum, RadicalSum, Rational, RadicalSum, Rational) {
    let t = triangle(x);
    let (p, m) = (x.p(), x.m());
    let (o, z1, z2) = (RatPoint::origin(), t.z1.to_rat(), t.z2.to_rat());
    let q = GaussPoint::new(m * m - p + 1, m).to_rat();
    let l = path_length(&[o, z1.clone(), z2], x);
    let epsilon2 = l + RadicalSum::from_rational(int(p * (2 * m - m * m) - 2 * (p + m * m)));
    let gap = path_length(&[t.z1p.clone(), z1.clone()], x) - path_length(&[t.z1p.clone(), q.clone()], x)
        + path_length(&[z1, t.z2p.clone()], x)
        - path_length(&[q, t.z2p.clone()], x);
    let f1 = rat(2 * m * m, m * m + p) + rat(2 * m * m, p + 1);
    let numer = rat(-1, 2) + rat(p, m) - int(m);
    let inner = (rat(p, m) + int(m)) * (rat(p, m) + int(m)) + int(4);
    let f2 = RadicalSum::sqrt_rational(&inner).scale(&(numer / &inner));
    let a = rat(p * (m - 1), m);
    let b = rat(3 * m - 1, 2 * (m - 1));
    let f3 = (&a - &b) / (&a + &b);
    (epsilon2, gap, f1, f2, f3)
}

/// The prime buckets of the closed-form argument for `31 ≤ p < 250`,
/// derived from `m(p)`.
pub fn bucket_primes() -> Vec<(i64, Vec<i64>)> {
    let mut map: std::collections::BTreeMap<i64, Vec<i64>> = Default::default();
    for p in (31..250).filter(|&p| is_prime(p) && p != 47 && p != 59) {
        map.entry(min_nondivisor(p)).or_default().push(p);
    }
    map.into_iter().collect()
}

/// The bucket prime lists as printed, keyed by the `m` they are filed under.
pub const PRINTED_BUCKETS: [(i64, &[i64]); 4] = [
    (
        3,
        &[
            31, 37, 43, 61, 67, 73, 79, 97, 103, 109, 127, 139, 151, 157, 163, 181, 193, 199, 211,
            223, 233, 241,
        ],
    ),
    (4, &[41, 53, 89, 101, 113, 137, 149, 173, 229]),
    (5, &[71, 83, 107, 131, 167, 191, 197, 227]),
    (7, &[179, 239]),
];

/// A prime filed under the wrong `m`, or missing from the printed lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BucketMismatch {
    pub p: i64,
    pub computed_m: i64,
    pub listed_m: Option<i64>,
}

/// Diffs the derived buckets against the printed lists.
pub fn bucket_mismatches() -> Vec<BucketMismatch> {
    let listed = |p: i64| {
        PRINTED_BUCKETS
            .iter()
            .find(|(_, ps)| ps.contains(&p))
            .map(|(m, _)| *m)
    };
    let mut out: Vec<BucketMismatch> = bucket_primes()
        .into_iter()
        .flat_map(|(m, ps)| ps.into_iter().map(move |p| (m, p)))
        .filter(|&(m, p)| listed(p) != Some(m))
        .map(|(m, p)| BucketMismatch {
            p,
            computed_m: m,
            listed_m: listed(p),
        })
        .collect();
    out.sort_by_key(|b| b.p);
    out
}

/// Arithmetic facts used to pin down the first HN factor once the polygon
/// is the triangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndgameChecks {
    pub gcd_is_one: bool,
    pub segment_lattice_free: bool,
    /// Values of `k` in `−m²..=m²` with `(m²−k, m, p−k)² ≥ −2m²`.
    pub square_admissible: Vec<i64>,
    /// Values of `k` in `0..=m²` with `k < p` whose slope through `pr(w)`
    /// is at least that of `p_u p_v`.
    pub slope_admissible: Vec<i64>,
    pub passed: bool,
}

pub fn endgame_checks(x: &Surface) -> EndgameChecks {
    let (p, m) = (x.p(), x.m());
    let t = triangle(x);
    let gcd_is_one = m.gcd(&(p - m * m)) == 1;
    let segment_lattice_free = (1..m).all(|k| (t.z1.a * k) % m != 0 || (t.z1.b * k) % m != 0);
    let square_admissible: Vec<i64> = (-m * m..=m * m)
        .filter(|&k| {
            let (r, c, s) = ((m * m - k) as i128, m as i128, (p - k) as i128);
            2 * p as i128 * c * c - 2 * r * s >= -2 * (m * m) as i128
        })
        .collect();
    let slope = |k: i64| {
        let y = rat(m * m - k, p - k);
        let dx = rat(m, p - k) + rat(m, p * (m - 2));
        y / dx
    };
    let reference = slope(0);
    let slope_admissible: Vec<i64> = (0..=m * m).take_while(|&k| k < p).filter(|&k| slope(k) >= reference).collect();
    let passed = gcd_is_one
        && segment_lattice_free
        && square_admissible.first() == Some(&0)
        && slope_admissible == [0];
    EndgameChecks {
        gcd_is_one,
        segment_lattice_free,
        square_admissible,
        slope_admissible,
        passed,
    }
}
