//! Acceptance suite: nine criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p colossal --release --test acceptance -- --nocapture`
//! to see the report.

use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};

use colossal::factored::materialize;
use colossal::oracle::{
    brute_force_ca, check_ca_witness, maximality_check, mertens_residual, SigmaTable,
};
use colossal::oscillation::{
    delta_phi, in_margin, in_margin_tangent, osc_g, osc_gradient, polar_identity_check, PolarPoint,
};
use colossal::primes::DEFAULT_SIEVE_LIMIT;
use colossal::robin::{
    artanh_criterion, artanh_criterion_as_printed, find_ki, gl_window, unconditional_bound,
    x_value, E_GAMMA, MERTENS_B1,
};
use colossal::{CaSequence, KiSearch, OscParams, PrimeSieve};

/// A printed decimal and the size of one unit in its last place.
fn printed(s: &str) -> (f64, f64) {
    let (mant, exp) = match s.split_once('e') {
        Some((m, e)) => (m, e.parse::<i32>().unwrap()),
        None => (s, 0),
    };
    let decimals = mant.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
    (s.parse().unwrap(), 10f64.powi(exp - decimals))
}

/// `actual` agrees with the printed value to one unit in the last place.
fn matches_printed(actual: f64, s: &str) -> bool {
    let (v, ulp) = printed(s);
    (actual - v).abs() <= ulp * (1.0 + 1e-9)
}

struct Report {
    failures: Vec<usize>,
}

impl Report {
    fn record(&mut self, id: usize, name: &str, ok: bool, detail: String) {
        println!(
            "{} [{id}] {name}: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failures.push(id);
        }
    }
}

const LAST_INDEX: usize = 143_216;

// index, v2, ln, ln P1, ln ln, k_i (None = not within horizon), lg, lg lg, σ₋₁, X, B, form
type StatsGolden = (
    usize,
    u32,
    &'static str,
    &'static str,
    &'static str,
    Option<usize>,
    &'static str,
    &'static str,
    &'static str,
    &'static str,
    &'static str,
    &'static str,
);

#[rustfmt::skip]
const STATS: [StatsGolden; 7] = [
    (8, 4, "8.5251", "1.9459", "2.1430", None, "3.7024", "0.5684", "3.8380", "1.79097", "1.9222", "7,3,0,2"),
    (508, 14, "3274.0", "8.0885", "8.0937", Some(1), "1421.9", "3.1528", "14.3887", "1.7777", "1.79096", "3257,73,19,7,5,0,0,3,0,0,0,0,0,2"),
    (9, 4, "10.9230", "2.3978", "2.3908", Some(33), "4.7438", "0.6761", "4.1870", "1.7512", "1.8944", "11,3,0,2"),
    (13, 5, "16.889", "2.5649", "2.8266", Some(1), "7.335", "0.8654", "4.8559", "1.7179", "1.8621", "13,5,3,0,2"),
    (42, 8, "107.7176", "4.6151", "4.6795", Some(1), "46.7811", "1.6700", "8.1962", "1.7515", "1.8106", "101,13,5,0,3,0,0,2"),
    (2386, 17, "20432.2", "9.9212", "9.9249", Some(1), "8873.60", "3.9480", "17.6663", "1.7800001", "1.7877", "20359,193,37,13,7,0,5,0,0,3,0,0,0,0,0,0,2"),
    (143_215, 24, "1912150.6", "14.4633", "14.4637", Some(1), "830436.46", "5.9193", "25.7599", "1.7810000003", "1.7842", "1911373,1907,173,47,23,13,0,7,0,5,0,0,0,0,3,0,0,0,0,0,0,0,0,2"),
];

// index, v2, q, P1, ln, v, g, 𝒢₈, ε, ln ln, ℒ₈, −𝒟₉
type GlGolden = (
    usize,
    u32,
    u64,
    u64,
    &'static str,
    u32,
    (u128, u128),
    &'static str,
    &'static str,
    &'static str,
    &'static str,
    &'static str,
);

#[rustfmt::skip]
const GL_ROWS: [GlGolden; 37] = [
    (8, 4, 2, 7, "8.5", 4, (31, 30), "1", "4.73e-2", "2.143", "1", ""),
    (9, 4, 11, 11, "10.9", 1, (12, 11), "1.090", "3.62e-2", "2.390", "1.115", ""),
    (10, 4, 13, 13, "13.4", 1, (14, 13), "1.174", "2.88e-2", "2.601", "1.214", "1.13e-2"),
    (11, 5, 2, 13, "14.1", 5, (63, 62), "1.193", "2.31e-2", "2.651", "1.237", "1.48e-2"),
    (12, 5, 3, 13, "15.2", 3, (40, 39), "1.224", "2.30e-2", "2.726", "1.272", "1.80e-2"),
    (13, 5, 5, 13, "16.8", 2, (31, 30), "1.265", "2.03e-2", "2.826", "1.319", "2.25e-2"),
    (14, 5, 17, 17, "19.7", 1, (18, 17), "1.339", "2.01e-2", "2.981", "1.391", "1.91e-2"),
    (15, 5, 19, 19, "22.6", 1, (20, 19), "1.410", "1.74e-2", "3.120", "1.456", "1.27e-2"),
    (16, 5, 23, 23, "25.8", 1, (24, 23), "1.471", "1.35e-2", "3.250", "1.516", "1.07e-2"),
    (17, 6, 2, 23, "26.4", 6, (127, 126), "1.483", "1.14e-2", "3.276", "1.529", "1.11e-2"),
    (18, 6, 29, 29, "29.8", 1, (30, 29), "1.534", "1.00e-2", "3.396", "1.584", "1.42e-2"),
    (19, 6, 31, 31, "33.2", 1, (32, 31), "1.583", "9.24e-3", "3.505", "1.635", "1.44e-2"),
    (20, 6, 7, 31, "35.2", 2, (57, 56), "1.612", "9.09e-3", "3.562", "1.662", "1.22e-2"),
    (21, 6, 3, 31, "36.3", 4, (121, 120), "1.625", "7.55e-3", "3.592", "1.676", "1.27e-2"),
    (22, 6, 37, 37, "39.9", 1, (38, 37), "1.669", "7.38e-3", "3.687", "1.720", "1.21e-2"),
    (23, 6, 41, 41, "43.6", 1, (42, 41), "1.710", "6.48e-3", "3.776", "1.762", "1.19e-2"),
    (24, 6, 43, 43, "47.4", 1, (44, 43), "1.749", "6.11e-3", "3.859", "1.800", "1.00e-2"),
    (25, 7, 2, 43, "48.1", 7, (255, 254), "1.756", "5.66e-3", "3.873", "1.807", "9.82e-3"),
    (26, 7, 47, 47, "51.9", 1, (48, 47), "1.794", "5.46e-3", "3.950", "1.843", "7.75e-3"),
    (27, 7, 53, 53, "55.9", 1, (54, 53), "1.828", "4.70e-3", "4.024", "1.877", "7.51e-3"),
    (28, 7, 59, 59, "60.0", 1, (60, 59), "1.858", "4.12e-3", "4.094", "1.910", "8.54e-3"),
    (29, 7, 5, 59, "61.6", 3, (156, 155), "1.870", "3.99e-3", "4.121", "1.923", "8.61e-3"),
    (30, 7, 61, 61, "65.7", 1, (62, 61), "1.901", "3.95e-3", "4.185", "1.953", "7.51e-3"),
    (31, 7, 67, 67, "69.9", 1, (68, 67), "1.930", "3.52e-3", "4.247", "1.982", "7.42e-3"),
    (32, 7, 71, 71, "74.2", 1, (72, 71), "1.957", "3.28e-3", "4.306", "2.009", "7.25e-3"),
    (33, 7, 73, 73, "78.4", 1, (74, 73), "1.984", "3.17e-3", "4.363", "2.035", "6.18e-3"),
    (34, 7, 11, 73, "80.8", 2, (133, 132), "1.999", "3.14e-3", "4.393", "2.049", "4.99e-3"),
    (35, 7, 79, 79, "85.2", 1, (80, 79), "2.024", "2.87e-3", "4.445", "2.074", "3.79e-3"),
    (36, 8, 2, 79, "85.9", 8, (511, 510), "2.028", "2.82e-3", "4.453", "2.078", "3.54e-3"),
    (37, 8, 83, 83, "90.3", 1, (84, 83), "2.052", "2.71e-3", "4.503", "2.101", "2.11e-3"),
    (38, 8, 3, 83, "91.4", 5, (364, 363), "2.058", "2.50e-3", "4.516", "2.107", "1.98e-3"),
    (39, 8, 89, 89, "95.9", 1, (90, 89), "2.081", "2.48e-3", "4.563", "2.129", "8.18e-4"),
    (40, 8, 97, 97, "100", 1, (98, 97), "2.103", "2.24e-3", "4.610", "2.151", "6.26e-4"),
    (41, 8, 13, 97, "103", 2, (183, 182), "2.114", "2.13e-3", "4.635", "2.163", "5.70e-4"),
    (42, 8, 101, 101, "107", 1, (102, 101), "2.135", "2.13e-3", "4.679", "2.183", "-3.05e-4"),
    (507, 14, 3253, 3253, "3265", 1, (3254, 3253), "3.747", "3.80e-5", "8.091", "3.775", "-5.12e-2"),
    (508, 14, 3257, 3257, "3274", 1, (3258, 3257), "3.748", "3.79e-5", "8.093", "3.776", "-5.12e-2"),
];

fn sequence_identity(report: &mut Report, seq: &CaSequence) {
    let start = Instant::now();
    let table = SigmaTable::build(1_000_000).unwrap();
    let oracle = brute_force_ca(&table);
    let engine: Vec<u64> = seq
        .records()
        .iter()
        .map_while(|r| materialize(&r.form, 1_000_000).ok().map(|n| n as u64))
        .collect();
    let values: Vec<u64> = oracle.iter().map(|w| w.n).collect();
    let mut ok = engine == values;
    ok &= oracle.iter().all(|w| check_ca_witness(&table, w));
    // each witness sits between the engine's ε on either side of n_i
    for (k, w) in oracle.iter().enumerate().take(oracle.len() - 1) {
        let (hi, lo) = (
            seq.get(k + 1).unwrap().epsilon,
            seq.get(k + 2).unwrap().epsilon,
        );
        ok &= lo < w.epsilon && w.epsilon < hi;
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(30);
    report.record(
        1,
        "sequence identity on [1, 1e6]",
        ok,
        format!(
            "engine {engine:?}, oracle {} entries, {elapsed:.2?}",
            values.len()
        ),
    );
}

fn golden_statistics(report: &mut Report, seq: &CaSequence, gen_time: Duration) {
    let mut bad = Vec::new();
    let mut check = |what: String, ok: bool| {
        if !ok {
            bad.push(what);
        }
    };
    for &(i, v2, ln, lnp1, lnln, ki, lg, lglg, sigma, x, b, form) in &STATS {
        let r = seq.get(i).unwrap();
        let s = &r.stats;
        check(format!("form n_{i}"), r.form.to_string() == form);
        check(format!("v2 n_{i}"), s.v2 == v2);
        check(format!("ln n_{i}"), matches_printed(s.ln_n, ln));
        check(format!("ln P1 n_{i}"), matches_printed(s.ln_p1, lnp1));
        check(format!("ln ln n_{i}"), matches_printed(s.ln_ln_n, lnln));
        check(format!("lg n_{i}"), matches_printed(s.lg_n, lg));
        check(format!("lg lg n_{i}"), matches_printed(s.lg_lg_n, lglg));
        check(
            format!("σ₋₁ n_{i}"),
            matches_printed(s.sigma_minus1(), sigma),
        );
        let xv = x_value(s).unwrap();
        check(format!("X n_{i} = {xv:.12}"), matches_printed(xv, x));
        let bv = unconditional_bound(s).unwrap();
        check(format!("B n_{i} = {bv:.6}"), matches_printed(bv, b));
        let expect = match ki {
            Some(k) => KiSearch::Found(k),
            None => KiSearch::NotWithinHorizon(1000),
        };
        check(
            format!("k_i n_{i}"),
            find_ki(seq, i, 1000).unwrap() == expect,
        );
    }
    let ok = bad.is_empty() && gen_time < Duration::from_secs(300);
    report.record(
        2,
        "golden statistics",
        ok,
        format!(
            "7 columns, run to n_{LAST_INDEX} in {gen_time:.2?}; B(n_8) checked against the formula value 1.9222 (printed 1.9047), ln n_2386 against 20432.2 (printed 20432.8, inconsistent with its own lg 8873.60); mismatches {bad:?}"
        ),
    );
}

fn golden_gl_table(report: &mut Report, seq: &CaSequence) {
    let mut bad = Vec::new();
    for &(i, v2, q, p1, ln, v, (gn, gd), big_g, eps, ll, big_l, neg_d) in &GL_ROWS {
        let r = seq.get(i).unwrap();
        let w8 = gl_window(seq, 8, i - 8).unwrap();
        let mut fine = r.stats.v2 == v2
            && r.q == q
            && r.form.largest_prime() == p1
            && r.v == v
            && (r.g_num, r.g_den) == (gn, gd)
            && format!("{}:{}", r.g_num, r.g_den) == format!("{gn}:{gd}")
            && matches_printed(r.stats.ln_n, ln)
            && matches_printed(w8.g, big_g)
            && matches_printed(r.epsilon, eps)
            && matches_printed(r.stats.ln_ln_n, ll)
            && matches_printed(w8.l, big_l);
        if !neg_d.is_empty() {
            fine &= matches_printed(-gl_window(seq, 9, i - 9).unwrap().d, neg_d);
        }
        if !fine {
            bad.push(i);
        }
    }
    let signs_ok = (1..=32).all(|j| gl_window(seq, 9, j).unwrap().d < 0.0)
        && gl_window(seq, 9, 33).unwrap().d > 0.0;
    let d8 = gl_window(seq, 8, 500).unwrap().d;
    let ok = bad.is_empty() && signs_ok && d8 < 0.0;
    report.record(
        3,
        "golden G/L table",
        ok,
        format!(
            "rows 8..=42, 507, 508 with ε_17 = ln(127/126)/ln 2 = 1.14e-2 (printed 1.12e-2); D_9,j < 0 for j < 33 and > 0 at 33: {signs_ok}; D_8,500 = {d8:.5}; mismatched rows {bad:?}"
        ),
    );
}

fn split_identities(report: &mut Report, seq: &CaSequence) {
    let mut rng = rand::rngs::StdRng::seed_from_u64(20_240_101);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let i = rng.gen_range(2..10_000);
        let k = rng.gen_range(0..=10_000 - i);
        let w = gl_window(seq, i, k).unwrap();
        let xi = x_value(&seq.get(i).unwrap().stats).unwrap();
        let xk = x_value(&seq.get(i + k).unwrap().stats).unwrap();
        worst = worst
            .max((xi * w.r / xk - 1.0).abs())
            .max((w.r * w.l / w.g - 1.0).abs());
    }
    report.record(
        4,
        "split identities",
        worst < 1e-9,
        format!("10000 random windows, worst relative error {worst:.2e}"),
    );
}

fn maximality(report: &mut Report, seq: &CaSequence) {
    let table = SigmaTable::build(1_000_000).unwrap();
    let ca: Vec<(u64, f64)> = seq
        .records()
        .iter()
        .skip(1)
        .map_while(|r| {
            materialize(&r.form, 2_000_000)
                .ok()
                .map(|n| (n as u64, x_value(&r.stats).unwrap()))
        })
        .collect();
    let r = maximality_check(&table, &ca, 6, 1_000_000).unwrap();
    // below the first usable bracket [6, 12] X is either undefined or meaningless
    let small: Vec<String> = (3..6)
        .map(|n| format!("X({n})={:.3}", table.x_value(n)))
        .collect();
    report.record(
        5,
        "maximality of X on CA brackets",
        r.violations.is_empty(),
        format!(
            "checked n in [6, 1e6] ({} values), violations {}; bracket [2, 6] skipped: X(2) < 0, {}",
            r.checked,
            r.violations.len(),
            small.join(", ")
        ),
    );
}

fn artanh_equivalence(report: &mut Report, seq: &CaSequence) {
    let mut disagree = Vec::new();
    let mut equal = Vec::new();
    let mut printed_disagree = 0usize;
    for i in 9..10_000 {
        let next = seq.get(i + 1).unwrap();
        let s = &seq.get(i).unwrap().stats;
        let d = gl_window(seq, i, 1).unwrap().d;
        if d == 0.0 {
            equal.push(i);
            continue;
        }
        if artanh_criterion(s, next.g_num, next.g_den, next.q) != (d > 0.0) {
            disagree.push(i);
        }
        if artanh_criterion_as_printed(s, next.g_num, next.g_den, next.q) != (d > 0.0) {
            printed_disagree += 1;
        }
    }
    report.record(
        6,
        "artanh criterion vs sign of D_i,1",
        disagree.is_empty(),
        format!(
            "i in 9..10000: disagreements {disagree:?}, equality cases {equal:?}; without the 1/ln ln n_i factor the criterion disagrees {printed_disagree} times"
        ),
    );
}

fn oscillation_math(report: &mut Report) {
    let mut rng = rand::rngs::StdRng::seed_from_u64(4_315);
    let mut worst_diag: f64 = 0.0;
    let mut worst_polar: f64 = 0.0;
    let mut worst_dphi: f64 = 0.0;
    let mut worst_grad: f64 = 0.0;
    for _ in 0..100 {
        let p = OscParams::new(rng.gen_range(0.01..0.5), rng.gen_range(0.0..0.99)).unwrap();
        let mu = rng.gen_range(0.1..20.0);
        let e = (p.b() * mu).exp();
        let diag = (e + p.delta()) / (e - p.delta());
        worst_diag = worst_diag.max((osc_g(&p, mu, mu).unwrap() / diag - 1.0).abs());

        let pt = PolarPoint::new(
            rng.gen_range(0.1..30.0),
            rng.gen_range(0.01..FRAC_PI_2 - 0.01),
        )
        .unwrap();
        let (l, r) = polar_identity_check(&p, pt).unwrap();
        worst_polar = worst_polar.max((l / r - 1.0).abs());

        let (x, phi) = (
            rng.gen_range(0.05..20.0),
            rng.gen_range(0.01..FRAC_PI_2 - 0.01),
        );
        let target = x / phi.tan();
        let lhs = 1.0 / (phi + delta_phi(x, phi)).tan();
        worst_dphi = worst_dphi.max((lhs - target).abs() / target.abs().max(1.0));

        let (mu, nu) = (rng.gen_range(0.5..10.0), rng.gen_range(0.5..10.0));
        let (gx, gy) = osc_gradient(&p, mu, nu).unwrap();
        let h = 1e-6;
        let fx = (osc_g(&p, mu + h, nu).unwrap() - osc_g(&p, mu - h, nu).unwrap()) / (2.0 * h);
        let fy = (osc_g(&p, mu, nu + h).unwrap() - osc_g(&p, mu, nu - h).unwrap()) / (2.0 * h);
        worst_grad = worst_grad
            .max((gx - fx).abs() / gx.abs())
            .max((gy - fy).abs() / gy.abs());
    }
    let p = OscParams::new(0.5, 0.5).unwrap();
    let mut grid_disagree = 0;
    for a in 0..200 {
        for c in 0..200 {
            let mu = 0.05 + 10.0 * a as f64 / 199.0;
            let nu = 0.05 + 10.0 * c as f64 / 199.0;
            if in_margin(&p, mu, nu).unwrap() != in_margin_tangent(&p, mu, nu).unwrap() {
                grid_disagree += 1;
            }
        }
    }
    let ok = worst_diag < 1e-10
        && worst_polar < 1e-10
        && worst_dphi < 1e-10
        && worst_grad < 1e-6
        && grid_disagree == 0;
    report.record(
        7,
        "oscillation identities",
        ok,
        format!(
            "diagonal {worst_diag:.1e}, polar {worst_polar:.1e}, Δφ {worst_dphi:.1e}, gradient {worst_grad:.1e}, margin disagreements {grid_disagree}/40000"
        ),
    );
}

fn mertens(report: &mut Report, sieve: &PrimeSieve) {
    let r = mertens_residual(sieve, 1_000_000).unwrap();
    let gap = (r - MERTENS_B1).abs();
    report.record(
        8,
        "Mertens convergence at 1e6",
        gap < 0.01,
        format!("residual {r:.7}, |residual − B1| = {gap:.2e}"),
    );
}

fn rie_sweep(report: &mut Report, seq: &CaSequence) {
    let violations: Vec<usize> = (3..=143_215)
        .filter(|&i| x_value(&seq.get(i).unwrap().stats).unwrap() >= E_GAMMA)
        .collect();
    let after_8: Vec<usize> = violations.iter().copied().filter(|&i| i > 8).collect();
    report.record(
        9,
        "RIE sweep 8 < i ≤ 143215",
        after_8.is_empty(),
        format!(
            "violations above 8: {after_8:?}; known violations at or below 8 (expected): {:?}",
            violations.iter().filter(|&&i| i <= 8).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let sieve = PrimeSieve::new(DEFAULT_SIEVE_LIMIT).unwrap();
    let seq = CaSequence::generate(&sieve, LAST_INDEX).unwrap();
    let gen_time = start.elapsed();

    let mut report = Report {
        failures: Vec::new(),
    };
    println!();
    sequence_identity(&mut report, &seq);
    golden_statistics(&mut report, &seq, gen_time);
    golden_gl_table(&mut report, &seq);
    split_identities(&mut report, &seq);
    maximality(&mut report, &seq);
    artanh_equivalence(&mut report, &seq);
    oscillation_math(&mut report);
    mertens(&mut report, &sieve);
    rie_sweep(&mut report, &seq);
    println!("acceptance finished in {:.2?}", start.elapsed());
    assert!(
        report.failures.is_empty(),
        "failed criteria: {:?}",
        report.failures
    );
}
