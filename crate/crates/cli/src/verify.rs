//! The per-prime check suite.

use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use k3wall::exactnum::RadicalSum;
use k3wall::hzero::brill_noether_count;
use k3wall::mukai::{distinguished_vectors, m_bound_check, MukaiVector, Surface};
use k3wall::plane::{
    collinear, enumerate_roots_in_region, grey_points, grey_region, on_parabola, project,
    segment_certificates, RatPoint, Segment,
};
use k3wall::polysearch::{
    large_p_certificate, envelope_bound, max_interior_bound_with, bucket_mismatches,
    endgame_checks, Capped, Mode, Route, SearchLimits, Status,
};
use k3wall::tables::reproduce_tables;
use k3wall::walls::{classify_candidate_wall, pivot, WallVerdict};

use crate::report::{Check, CheckStatus, Report, SurfaceInfo, TableSummary};

/// Primes whose polygon case is settled by the exhaustive chain search.
pub const SEARCHED_PRIMES: [i64; 7] = [13, 17, 19, 23, 29, 47, 59];

/// Primes whose interior bound is also argued by a single envelope.
const ENVELOPE_PRIMES: [i64; 4] = [19, 29, 47, 59];

type Job = Box<dyn FnOnce() -> Check + Send>;

fn status(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Verified
    } else {
        CheckStatus::Failed
    }
}

fn approx(r: &RadicalSum) -> String {
    format!("{:.12}", r.approx())
}

fn m_bound(x: Surface) -> Check {
    let b = m_bound_check(x.p());
    let ok = b.inequality_42 && (!b.asymptotic_claimed || b.asymptotic);
    Check::new("m_bound", status(ok))
        .number("m", b.m)
        .number("m_lt_half_p_minus_3", b.inequality_42)
        .number("m_le_sqrt_2p_over_5", b.asymptotic)
        .number("sqrt_2p_over_5_floor", b.asymptotic_bound)
        .number("asymptotic_claimed", b.asymptotic_claimed)
}

fn brill_noether(x: Surface) -> Check {
    let value = brill_noether_count(&x);
    Check::new("brill_noether_identity", status(value == x.target()))
        .number("value", value)
        .number("p_plus_m_squared", x.target())
}

fn segments(x: Surface) -> Check {
    let certs = segment_certificates(&x);
    let ok = certs.iter().all(|c| c.proved);
    let mut check = Check::new(
        "segment_certificates",
        if ok { CheckStatus::Proved } else { CheckStatus::Failed },
    );
    for c in certs {
        let root = c.ray_root.map(|r| r.to_string()).unwrap_or_else(|| "none".into());
        check = check.number(&format!("{} ray root", c.name), root);
    }
    check
}

fn grey_roots(x: Surface, s_max: i64) -> Check {
    let roots = enumerate_roots_in_region(&grey_region(&x), &x, s_max);
    let st = if roots.is_empty() { CheckStatus::Bounded } else { CheckStatus::Failed };
    let listed: Vec<String> = roots.iter().map(MukaiVector::to_string).collect();
    let mut check = Check::new("grey_region_roots", st)
        .number("roots_found", listed)
        .bound("s_min", 1)
        .bound("s_max", s_max);
    check.disclaimer = Some(format!(
        "finite search over roots with 1 <= |s| <= {s_max}; larger s is not covered"
    ));
    check
}

fn first_wall(x: Surface) -> Check {
    let (p, m) = (x.p(), x.m());
    let g = grey_points(&x);
    let parabola = [&g.p_u, &g.q, &g.p_v].iter().all(|pt| on_parabola(pt, &x));
    let o_prime = Segment::closed(g.q.clone(), g.p_v.clone()).contains(&RatPoint::o_prime());
    let pv = pivot(&x);
    let w = project(&distinguished_vectors(&x).w).expect("v(i_*F) has s != 0");
    let line = w == pv && collinear(&pv, &g.p_u, &g.p_v);
    let on = classify_candidate_wall(&g.p_v, &x).map(|c| c.verdict) == Ok(WallVerdict::On);
    // k = p is skipped: that class has s = 0 and no projection.
    let below = (1..m * m).filter(|&k| k != p).all(|k| {
        let e = MukaiVector::new(m * m - k, m, p - k);
        project(&e)
            .ok()
            .and_then(|pr| classify_candidate_wall(&pr, &x).ok())
            .map(|c| c.verdict)
            == Some(WallVerdict::Below)
    });
    Check::new("first_wall", status(parabola && o_prime && line && on && below))
        .number("pivot", pv.to_string())
        .number("p_v", g.p_v.to_string())
        .number("p_u", g.p_u.to_string())
        .number("q", g.q.to_string())
        .number("on_parabola", parabola)
        .number("o_prime_on_q_p_v", o_prime)
        .number("pivot_collinear", line)
        .number("p_v_on_wall", on)
        .number("shifted_classes_below", below)
}

fn polygon(x: Surface, limits: SearchLimits) -> Check {
    if SEARCHED_PRIMES.contains(&x.p()) {
        searched_polygon(x, limits)
    } else {
        closed_form_polygon(x)
    }
}

fn searched_polygon(x: Surface, limits: SearchLimits) -> Check {
    let v = max_interior_bound_with(&x, Mode::Refined, &limits);
    let st = match &v.status {
        Status::Verified => CheckStatus::Verified,
        Status::Failed(_) => CheckStatus::Failed,
        Status::Capped(_) => CheckStatus::Capped,
    };
    let mut check = Check::new("polygon", st)
        .number("method", "chain search")
        .number("max_interior_bound", v.max_interior_bound)
        .number("target", x.target())
        .number("triangle_floor", v.triangle_floor)
        .number("plain_max_floor", v.plain_max_floor)
        .number("lattice_points", v.lattice_points as u64)
        .number("directions", v.directions as u64)
        .number("refined_cases", v.refined_cases.len() as u64)
        .number(
            "witness",
            v.witness.map(|c| c.to_string()).unwrap_or_else(|| "none".into()),
        )
        .bound("max_edges", limits.max_edges)
        .bound("max_chains", limits.max_chains as u64)
        .bound("split_cap", limits.split_cap);
    match v.status {
        Status::Failed(chain) => check = check.number("counterexample", chain.to_string()),
        Status::Capped(Capped::Edges { needed, cap }) => {
            check.disclaimer = Some(format!("edge cap {cap} reached ({needed} needed)"))
        }
        Status::Capped(Capped::Chains { cap }) => {
            check.disclaimer = Some(format!("chain cap {cap} reached"))
        }
        Status::Verified => {}
    }
    if ENVELOPE_PRIMES.contains(&x.p()) {
        let e = envelope_bound(&x);
        check = check
            .number("envelope_h_floor", e.h_floor)
            .number("envelope_h_prime", e.h_prime);
        if !e.verified {
            check = check.mismatch(format!(
                "envelope gives floor(h) = {}, h' = {} against p + m^2 = {}",
                e.h_floor,
                e.h_prime,
                x.target()
            ));
        }
    }
    check
}

fn closed_form_polygon(x: Surface) -> Check {
    let c = large_p_certificate(x.p());
    let route = match &c.route {
        Route::Bucket { m, lower, upper } => format!("bucket m = {m}, [{lower}, {upper}]"),
        Route::Direct => "direct".into(),
        Route::Asymptotic => "asymptotic".into(),
    };
    let mut check = Check::new("polygon", status(c.applicable && c.verdict))
        .number("method", "closed form")
        .number("route", route)
        .number("f1", c.f1.to_string())
        .number("f3", c.f3.to_string())
        .number("f2_approx", approx(&c.f2))
        .number("two_epsilon_approx", approx(&c.epsilon2))
        .number("gap_approx", approx(&c.gap))
        .number("route_holds", c.route_holds)
        .number("bounds_hold", c.bounds_hold);
    if !c.route_holds {
        check = check.mismatch(format!("the stated thresholds of the route fail at p = {}", x.p()));
    }
    for b in bucket_mismatches().into_iter().filter(|b| b.p == x.p()) {
        let listed = b.listed_m.map(|m| m.to_string()).unwrap_or_else(|| "no list".into());
        check = check.mismatch(format!("p = {} is listed under m = {listed}, but m(p) = {}", b.p, b.computed_m));
    }
    check
}

fn endgame(x: Surface) -> Check {
    let e = endgame_checks(&x);
    Check::new("endgame", status(e.passed))
        .number("gcd_is_one", e.gcd_is_one)
        .number("segment_lattice_free", e.segment_lattice_free)
        .number("square_admissible", e.square_admissible)
        .number("slope_admissible", e.slope_admissible)
}

fn jobs(x: Surface, s_max: i64, limits: SearchLimits) -> Vec<(&'static str, Job)> {
    vec![
        ("m_bound", Box::new(move || m_bound(x))),
        ("brill_noether_identity", Box::new(move || brill_noether(x))),
        ("segment_certificates", Box::new(move || segments(x))),
        ("grey_region_roots", Box::new(move || grey_roots(x, s_max))),
        ("first_wall", Box::new(move || first_wall(x))),
        ("polygon", Box::new(move || polygon(x, limits))),
        ("endgame", Box::new(move || endgame(x))),
    ]
}

fn tables(x: &Surface) -> Vec<TableSummary> {
    reproduce_tables(x)
        .map(|ts| {
            ts.into_iter()
                .map(|t| TableSummary {
                    number: t.number,
                    title: t.title.into(),
                    cells: t.cells.len(),
                    paper_mismatches: t
                        .discrepancies()
                        .map(|c| {
                            format!(
                                "{} {}: computed {}, printed {} ({:?})",
                                c.column,
                                c.row,
                                c.computed.as_deref().unwrap_or("none"),
                                c.printed.as_deref().unwrap_or("none"),
                                c.status
                            )
                        })
                        .collect(),
                })
                .collect()
        })
        .unwrap_or_default()
}

/// Runs the suite in order. With a budget, the checks run on a separate
/// thread and those still pending when it runs out are reported as capped.
/// Without one they run inline, so that callers on a rayon worker never
/// block waiting for the pool.
pub fn verify(x: Surface, s_max: i64, budget: Option<Duration>, timings: bool) -> Report {
    let limits = SearchLimits::default();
    let mut checks = Vec::new();
    let mut runtimes = std::collections::BTreeMap::new();
    let mut record = |check: Check, elapsed: Duration| {
        runtimes.insert(check.name.clone(), elapsed.as_millis() as u64);
        checks.push(check);
    };
    match budget {
        None => {
            for (_, job) in jobs(x, s_max, limits) {
                let start = Instant::now();
                let check = job();
                record(check, start.elapsed());
            }
        }
        Some(budget) => {
            let deadline = Instant::now() + budget;
            let names: Vec<&'static str> = jobs(x, s_max, limits).iter().map(|j| j.0).collect();
            let (tx, rx) = mpsc::channel();
            thread::spawn(move || {
                for (_, job) in jobs(x, s_max, limits) {
                    let start = Instant::now();
                    let check = job();
                    if tx.send((check, start.elapsed())).is_err() {
                        return;
                    }
                }
            });
            for name in names {
                match rx.recv_timeout(deadline.saturating_duration_since(Instant::now())) {
                    Ok((check, elapsed)) => record(check, elapsed),
                    Err(_) => {
                        let mut c = Check::new(name, CheckStatus::Capped);
                        c.disclaimer = Some("time budget exhausted before this check finished".into());
                        record(c, Duration::ZERO);
                    }
                }
            }
        }
    }
    Report {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        surface: SurfaceInfo {
            p: x.p(),
            m: x.m(),
            g: x.genus(),
        },
        checks,
        tables: tables(&x),
        figures: Vec::new(),
        runtime_ms: timings.then_some(runtimes),
    }
}
