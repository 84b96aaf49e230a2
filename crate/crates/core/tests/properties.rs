mod common;

use std::cmp::Ordering;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::*;
use k3wall::exactnum::{floor_avg_sqrt, int, isqrt, radical_cmp, rat, RadicalSum, Rational};
use k3wall::hzero::{
    norm, parity_refined_bound, path_length, polygon_bound_floor, split_chi, Chain, GaussPoint,
};
use k3wall::mukai::{euler, is_root, pairing, MukaiVector, Surface};
use k3wall::plane::{central_charge, collinear, kernel_point, phase_compare, project, Charge};
use k3wall::polysearch::{lattice_points, triangle, ChainSearch, SearchLimits};

fn surface_strategy() -> impl Strategy<Value = Surface> {
    prop::sample::select(PAIRS.to_vec()).prop_map(|(p, _)| Surface::new(p).unwrap())
}

fn point() -> impl Strategy<Value = GaussPoint> {
    (-500i64..=500, -60i64..=60).prop_map(|(a, b)| GaussPoint::new(a, b))
}

fn vector() -> impl Strategy<Value = MukaiVector> {
    (-40i64..=40, -40i64..=40, -40i64..=40).prop_map(|(r, c, s)| MukaiVector::new(r, c, s))
}

fn chain() -> impl Strategy<Value = Chain> {
    (any::<u64>(), 1usize..=8).prop_map(|(seed, n)| {
        random_convex_chain(&mut StdRng::seed_from_u64(seed), n)
    })
}

fn heart(z: Charge) -> Charge {
    use num_traits::{Signed, Zero};
    if z.im.is_negative() || (z.im.is_zero() && z.re.is_positive()) {
        Charge { re: -z.re, im: -z.im }
    } else {
        z
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn norm_triangle_inequality(x in surface_strategy(), u in point(), v in point()) {
        let lhs = norm(&(u + v), &x);
        let rhs = &norm(&u, &x) + &norm(&v, &x);
        prop_assert_ne!(lhs.cmp_sum(&rhs), Ordering::Greater);
    }

    #[test]
    fn isqrt_matches_oracle(bytes in prop::collection::vec(any::<u8>(), 1..32)) {
        let n = BigInt::from_bytes_be(num_bigint::Sign::Plus, &bytes);
        prop_assert_eq!(isqrt(&n), floor_dec(&sqrt_dec(&n)));
        let sq = &n * &n;
        prop_assert_eq!(isqrt(&sq), n);
    }

    #[test]
    fn floor_avg_sqrt_matches_oracle(a in -1_000_000_000i64..=1_000_000_000, d in any::<u64>()) {
        let want = floor_dec(
            &((dec(&BigInt::from(a)) + sqrt_dec(&BigInt::from(d))) / bigdecimal::BigDecimal::from(2)),
        );
        prop_assert_eq!(floor_avg_sqrt(a, d), want);
    }

    #[test]
    fn radical_cmp_matches_oracle(
        terms in prop::collection::vec(((-50i64..=50), (1i64..=30), (0u128..=10_000)), 1..=4),
        num in -5000i64..=5000,
        den in 1i64..=50,
    ) {
        let terms: Vec<(Rational, u128)> = terms.into_iter().map(|(a, b, n)| (rat(a, b), n)).collect();
        let t = rat(num, den);
        let want = sign_with_tolerance(&(radical_value(&terms) - dec_rat(&t)));
        let x = RadicalSum::from_terms(terms.iter().cloned());
        prop_assert_eq!(radical_cmp(&x, &t), want);
    }

    #[test]
    fn pairing_is_symmetric(x in surface_strategy(), a in vector(), b in vector()) {
        prop_assert_eq!(pairing(&a, &b, &x), pairing(&b, &a, &x));
        prop_assert_eq!(euler(&a, &b, &x), -pairing(&a, &b, &x));
        prop_assert_eq!(is_root(&a, &x), pairing(&a, &a, &x) == -2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn perimeter_monotone_on_nested_chains(x in surface_strategy(), outer in chain(), mask in any::<u64>()) {
        let vs = outer.vertices();
        let last = vs.len() - 1;
        let inner: Vec<_> = vs
            .iter()
            .enumerate()
            .filter(|(j, _)| *j == 0 || *j == last || mask >> j & 1 == 1)
            .map(|(_, v)| v.to_rat())
            .collect();
        let full: Vec<_> = vs.iter().map(|v| v.to_rat()).collect();
        prop_assert_ne!(path_length(&inner, &x).cmp_sum(&path_length(&full, &x)), Ordering::Greater);
    }

    #[test]
    fn refined_bound_never_exceeds_plain(x in surface_strategy(), ch in chain(), mask in any::<u64>(), chi in -500i64..=500) {
        let path: Vec<_> = ch.vertices().iter().map(|v| v.to_rat()).collect();
        let last = path.len() - 1;
        let bounds: Vec<usize> = (0..=last).filter(|&j| j == 0 || j == last || mask >> j & 1 == 1).collect();
        let end = ch.end();
        // χ must share the parity of the total displacement.
        let chi = chi * 2 + (end.a - chi * 2).rem_euclid(2);
        let chis = split_chi(&path, &bounds, chi);
        let refined = parity_refined_bound(&path, &bounds, &chis, &x).unwrap();
        prop_assert!(refined <= polygon_bound_floor(&ch, chi, &x));
    }

    #[test]
    fn collinear_iff_same_phase(
        x in surface_strategy(),
        b in (-40i64..=40, 1i64..=20),
        w in (1i64..=60, 1i64..=20),
        a1 in vector(),
        t in 1i64..=3,
        n in -3i64..=3,
        other in vector(),
        along in any::<bool>(),
    ) {
        let (b, w_sq) = (rat(b.0, b.1), rat(w.0, w.1));
        let k = kernel_point(&b, &w_sq, &x).unwrap();
        let a2 = if along {
            let den = int(x.h_sq()) * (&b * &b + &w_sq);
            let kr = [int(2), int(2) * &b, den];
            let l = kr.iter().fold(BigInt::from(1), |acc, q| num_integer::Integer::lcm(&acc, q.denom()));
            let ki: Vec<i64> = kr
                .iter()
                .map(|q| num_traits::ToPrimitive::to_i64(&(q * Rational::from_integer(l.clone())).to_integer()).unwrap())
                .collect();
            let l = num_traits::ToPrimitive::to_i64(&l).unwrap();
            MukaiVector::new(t * l * a1.r + n * ki[0], t * l * a1.c + n * ki[1], t * l * a1.s + n * ki[2])
        } else {
            other
        };
        prop_assume!(a1.s != 0 && a2.s != 0);
        let (p1, p2) = (project(&a1).unwrap(), project(&a2).unwrap());
        prop_assume!(p1 != p2 && p1 != k && p2 != k);
        let z1 = central_charge(&a1, &b, &w_sq, &x).unwrap();
        let z2 = central_charge(&a2, &b, &w_sq, &x).unwrap();
        let zero = |z: &Charge| z.re == int(0) && z.im == int(0);
        prop_assume!(!zero(&z1) && !zero(&z2));
        let same = phase_compare(&heart(z1), &heart(z2)).unwrap() == Ordering::Equal;
        prop_assert_eq!(same, collinear(&p1, &p2, &k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adding_a_point_never_lowers_the_maximum(mask in prop::collection::vec(any::<bool>(), 128), extra in any::<prop::sample::Index>()) {
        let x = Surface::new(13).unwrap();
        let t = triangle(&x);
        let all: Vec<GaussPoint> = lattice_points(&t).into_iter().filter(|q| *q != t.z1).collect();
        let keep = |i: usize, q: &GaussPoint| q.is_zero() || *q == t.z2 || mask[i % mask.len()];
        let sub: Vec<GaussPoint> = all.iter().enumerate().filter(|(i, q)| keep(*i, q)).map(|(_, q)| *q).collect();
        let missing: Vec<GaussPoint> = all.iter().filter(|q| !sub.contains(q)).copied().collect();
        prop_assume!(!missing.is_empty());
        let mut sup = sub.clone();
        sup.push(*extra.get(&missing));
        let limits = SearchLimits::default();
        let best = |pts: Vec<GaussPoint>| {
            ChainSearch::new(pts, t.z2, None, &x, &limits).unwrap().max_length_approx()
        };
        prop_assert!(best(sub) <= best(sup) + 1e-9);
    }
}
