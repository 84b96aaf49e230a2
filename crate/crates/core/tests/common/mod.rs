//! Independent oracles shared by the integration suites.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::str::FromStr;

use bigdecimal::BigDecimal;
use num_bigint::BigInt;
use rand::Rng;

use k3wall::exactnum::{RadicalSum, Rational};
use k3wall::hzero::{Chain, GaussPoint};
use k3wall::mukai::Surface;

/// Working precision of the decimal oracle: 90 digits, above 256 bits.
pub const DIGITS: u64 = 90;

pub const PAIRS: [(i64, i64); 7] = [(13, 3), (17, 4), (19, 3), (23, 5), (29, 4), (47, 5), (59, 7)];

fn ctx() -> bigdecimal::Context {
    bigdecimal::Context::default().with_prec(DIGITS).unwrap()
}

pub fn dec(n: &BigInt) -> BigDecimal {
    BigDecimal::from(n.clone())
}

pub fn dec_rat(q: &Rational) -> BigDecimal {
    (dec(q.numer()) / dec(q.denom())).with_prec(DIGITS)
}

pub fn sqrt_dec(n: &BigInt) -> BigDecimal {
    dec(n).sqrt_with_context(&ctx()).expect("non-negative")
}

/// Decimal value of `Σ qᵢ √nᵢ`.
pub fn radical_value(terms: &[(Rational, u128)]) -> BigDecimal {
    terms.iter().fold(BigDecimal::from(0), |acc, (q, n)| {
        acc + dec_rat(q) * sqrt_dec(&BigInt::from(*n))
    })
}

/// Sign of a decimal, treating anything below `10^-60` as zero.
pub fn sign_with_tolerance(d: &BigDecimal) -> Ordering {
    let eps = BigDecimal::from_str("1e-60").unwrap();
    if d.abs() < eps {
        Ordering::Equal
    } else if d.sign() == num_bigint::Sign::Plus {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Floor of a decimal known to be far from an integer or exactly integral.
pub fn floor_dec(d: &BigDecimal) -> BigInt {
    let r = d.with_scale_round(0, bigdecimal::RoundingMode::Floor);
    let (n, _) = r.as_bigint_and_exponent();
    n
}

/// Lattice points of a triangle with its vertices `z1`, `z2`.
pub type TrianglePoints = (Vec<(i64, i64)>, (i64, i64), (i64, i64));

/// Lattice points of the closed triangle `o, z1, z2` for `x`, recomputed
/// from the vertex formulas.
pub fn triangle_points(x: &Surface) -> TrianglePoints {
    let (p, m) = (x.p(), x.m());
    let z1 = (m * m - p, m);
    let z2 = (m * m * p - 2 * p * m, m * m);
    let cr = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| {
        (b.0 - a.0) as i128 * (c.1 - a.1) as i128 - (b.1 - a.1) as i128 * (c.0 - a.0) as i128
    };
    let mut pts = Vec::new();
    for b in 0..=z2.1 {
        for a in z1.0..=z2.0 {
            let q = (a, b);
            let s = [cr((0, 0), z2, q), cr(z2, z1, q), cr(z1, (0, 0), q)];
            if s.iter().all(|&v| v >= 0) {
                pts.push(q);
            }
        }
    }
    (pts, z1, z2)
}

/// Exhaustive enumeration of all strictly convex chains from `o` to `z2`
/// inside the triangle other than `o → z1 → z2`. Returns the exact maximum
/// of `Σ‖e‖` and the number of chains visited.
pub fn brute_force_max_length(x: &Surface) -> (RadicalSum, u64) {
    let (pts, z1, z2) = triangle_points(x);
    let k = 4 * x.p() + 4;
    let len = |d: (i64, i64)| ((d.0 * d.0 + k * d.1 * d.1) as f64).sqrt();
    struct State {
        best: f64,
        near: Vec<Vec<(i64, i64)>>,
        count: u64,
    }
    fn dfs(
        cur: (i64, i64),
        last: Option<(i64, i64)>,
        acc: f64,
        path: &mut Vec<(i64, i64)>,
        ctx: &TrianglePoints,
        len: &dyn Fn((i64, i64)) -> f64,
        st: &mut State,
    ) {
        let (pts, z1, z2) = ctx;
        if cur == *z2 {
            st.count += 1;
            if path.as_slice() == [(0, 0), *z1, *z2] {
                return;
            }
            if acc > st.best + 1e-7 {
                st.best = acc;
                st.near.retain(|_| false);
            }
            if acc >= st.best - 1e-7 {
                st.near.push(path.clone());
            }
            return;
        }
        for &q in pts {
            if q.1 <= cur.1 {
                continue;
            }
            let d = (q.0 - cur.0, q.1 - cur.1);
            if let Some(l) = last {
                if (l.0 as i128) * (d.1 as i128) - (l.1 as i128) * (d.0 as i128) >= 0 {
                    continue;
                }
            }
            path.push(q);
            dfs(q, Some(d), acc + len(d), path, ctx, len, st);
            path.pop();
        }
    }
    let mut st = State {
        best: f64::MIN,
        near: Vec::new(),
        count: 0,
    };
    let ctx = (pts, z1, z2);
    let mut path = vec![(0, 0)];
    dfs((0, 0), None, 0.0, &mut path, &ctx, &len, &mut st);
    let exact = |p: &Vec<(i64, i64)>| {
        p.windows(2).fold(RadicalSum::zero(), |acc, w| {
            let (a, b) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            &acc + &RadicalSum::sqrt((a * a + k * b * b) as u128)
        })
    };
    let best = st
        .near
        .iter()
        .map(exact)
        .reduce(|a, b| if a.cmp_sum(&b) == Ordering::Less { b } else { a })
        .expect("some interior chain");
    (best, st.count)
}

/// A random strictly convex upward chain from the origin with `n` edges.
pub fn random_convex_chain<R: Rng>(rng: &mut R, n: usize) -> Chain {
    let mut dirs: Vec<GaussPoint> = Vec::new();
    while dirs.len() < n {
        let d = GaussPoint::new(rng.gen_range(-40..=40), rng.gen_range(1..=12));
        if dirs.iter().all(|e| e.cross(&d) != 0) {
            dirs.push(d);
        }
    }
    // Clockwise turning means decreasing angle from the positive real axis.
    dirs.sort_by(|u, v| u.cross(v).cmp(&0));
    let mut cur = GaussPoint::origin();
    let mut vs = vec![cur];
    for d in dirs {
        cur = cur + d;
        vs.push(cur);
    }
    Chain::new(vs).expect("sorted distinct directions form a convex chain")
}
