//! Brute-force references on small integers.
//!
//! Everything here is computed straight from definitions with exact integer
//! arithmetic where possible, independently of the engine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::PrimeSieve;

/// Largest table the oracle will build.
pub const MAX_SIGMA_LIMIT: u64 = 10_000_000;

/// σ(n) for every `n ≤ limit`.
#[derive(Clone, Debug)]
pub struct SigmaTable {
    limit: u64,
    sigma: Vec<u64>,
}

impl SigmaTable {
    /// Divisor-accumulation sieve.
    pub fn build(limit: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::InvalidArgument("sigma table needs limit ≥ 1".into()));
        }
        if limit > MAX_SIGMA_LIMIT {
            return Err(Error::Resource(format!(
                "sigma table limit {limit} exceeds {MAX_SIGMA_LIMIT}"
            )));
        }
        let n = limit as usize;
        let mut sigma = vec![0u64; n + 1];
        for d in 1..=n {
            for m in (d..=n).step_by(d) {
                sigma[m] += d as u64;
            }
        }
        Ok(SigmaTable { limit, sigma })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn sigma(&self, n: u64) -> u64 {
        self.sigma[n as usize]
    }

    /// σ₋₁(n) = σ(n)/n.
    pub fn sigma_minus1(&self, n: u64) -> f64 {
        self.sigma(n) as f64 / n as f64
    }

    /// `σ₋₁(a) > σ₋₁(b)`, exactly.
    fn abundance_gt(&self, a: u64, b: u64) -> bool {
        self.sigma(a) as u128 * b as u128 > self.sigma(b) as u128 * a as u128
    }

    fn abundance_ge(&self, a: u64, b: u64) -> bool {
        self.sigma(a) as u128 * b as u128 >= self.sigma(b) as u128 * a as u128
    }

    /// `X(n) = σ₋₁(n) / ln ln n` for `n ≥ 3`.
    pub fn x_value(&self, n: u64) -> f64 {
        self.sigma_minus1(n) / (n as f64).ln().ln()
    }
}

/// `n` with `σ₋₁(n) ≥ σ₋₁(k)` for all `k < n`.
pub fn brute_force_sa(table: &SigmaTable) -> Vec<u64> {
    let mut best = 1u64;
    let mut out = vec![1];
    for n in 2..=table.limit() {
        if table.abundance_ge(n, best) {
            out.push(n);
            best = n;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaWitness {
    pub n: u64,
    /// An ε > 0 at which `n` maximizes `σ₋₁(k) k^{−ε}` over `k ≤ limit`.
    pub epsilon: f64,
}

/// CA numbers `n ≥ 2` up to the table limit, each with a witness ε.
///
/// `n` is CA within the table iff `(ln n, ln σ₋₁(n))` is a vertex of the upper
/// convex hull of all points `(ln k, ln σ₋₁(k))` that admits a supporting line
/// of positive slope. Only record-setting `k` can be such vertices, so the hull
/// is built over those. The witness is the midpoint of the slope interval.
pub fn brute_force_ca(table: &SigmaTable) -> Vec<CaWitness> {
    let mut records = vec![1u64];
    for n in 2..=table.limit() {
        if table.abundance_gt(n, *records.last().unwrap()) {
            records.push(n);
        }
    }
    let pt = |n: u64| ((n as f64).ln(), table.sigma_minus1(n).ln());
    let mut hull: Vec<u64> = Vec::new();
    for &n in &records {
        let c = pt(n);
        while hull.len() >= 2 {
            let a = pt(hull[hull.len() - 2]);
            let b = pt(hull[hull.len() - 1]);
            // drop b unless it lies strictly above segment a–c
            let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(n);
    }
    let slope = |a: u64, b: u64| {
        let (pa, pb) = (pt(a), pt(b));
        (pb.1 - pa.1) / (pb.0 - pa.0)
    };
    let mut out = Vec::new();
    for (h, &n) in hull.iter().enumerate() {
        if n == 1 {
            continue;
        }
        let upper = slope(hull[h - 1], n);
        let lower = if h + 1 < hull.len() {
            slope(n, hull[h + 1]).max(0.0)
        } else {
            0.0
        };
        if upper > lower {
            out.push(CaWitness {
                n,
                epsilon: 0.5 * (upper + lower),
            });
        }
    }
    out
}

/// Checks `σ₋₁(n) n^{−ε} ≥ σ₋₁(k) k^{−ε}` for every `k ≤ limit`.
pub fn check_ca_witness(table: &SigmaTable, w: &CaWitness) -> bool {
    let value = |k: u64| table.sigma_minus1(k).ln() - w.epsilon * (k as f64).ln();
    let top = value(w.n);
    (1..=table.limit()).all(|k| value(k) <= top + 1e-12)
}

/// `Σ_{p ≤ n} 1/p − ln ln n`.
pub fn mertens_residual(sieve: &PrimeSieve, n: u64) -> Result<f64> {
    if n > sieve.limit() {
        return Err(Error::SieveExhausted {
            after: n,
            limit: sieve.limit(),
        });
    }
    if n < 2 {
        return Err(Error::Domain("Mertens sum needs n ≥ 2".into()));
    }
    let sum: f64 = sieve.primes()[..sieve.count_up_to(n)]
        .iter()
        .rev()
        .map(|&p| 1.0 / p as f64)
        .sum();
    Ok(sum - (n as f64).ln().ln())
}

/// π(limit) by a segmented sieve with its own base primes.
pub fn segmented_prime_count(limit: u64) -> u64 {
    if limit < 2 {
        return 0;
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let mut small = vec![true; root as usize + 1];
    let mut base = Vec::new();
    for i in 2..=root as usize {
        if small[i] {
            base.push(i as u64);
            let mut j = i * i;
            while j <= root as usize {
                small[j] = false;
                j += i;
            }
        }
    }
    const SEGMENT: u64 = 1 << 18;
    let mut count = 0u64;
    let mut seg = vec![true; SEGMENT as usize];
    let mut lo = 2u64;
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        seg.iter_mut().for_each(|s| *s = true);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut m = (lo.div_ceil(p) * p).max(p * p);
            while m <= hi {
                seg[(m - lo) as usize] = false;
                m += p;
            }
        }
        count += seg[..(hi - lo + 1) as usize].iter().filter(|&&s| s).count() as u64;
        lo = hi + 1;
    }
    count
}

/// Outcome of the exhaustive maximality check on `[lo, hi]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MaximalityReport {
    pub checked: u64,
    /// `(n, X(n), bracket bound)` for each violation.
    pub violations: Vec<(u64, f64, f64)>,
}

/// For every `n` in `[lo, min(hi, table limit)]` lying between consecutive CA
/// points `n_i ≤ n ≤ n_{i+1}`, checks `X(n) ≤ max(X(n_i), X(n_{i+1})) + 1e-12`.
///
/// `ca` lists `(n_i, X(n_i))` in increasing order and must bracket the range;
/// its last entry may exceed the table.
pub fn maximality_check(
    table: &SigmaTable,
    ca: &[(u64, f64)],
    lo: u64,
    hi: u64,
) -> Result<MaximalityReport> {
    let hi = hi.min(table.limit());
    if lo < 3 {
        return Err(Error::Domain("X(n) needs n ≥ 3".into()));
    }
    let mut b = ca
        .iter()
        .rposition(|&(n, _)| n <= lo)
        .ok_or(Error::InsufficientData(lo as usize))?;
    let mut report = MaximalityReport::default();
    for n in lo..=hi {
        while b + 1 < ca.len() && ca[b + 1].0 <= n {
            b += 1;
        }
        if b + 1 >= ca.len() && ca[b].0 < n {
            return Err(Error::InsufficientData(n as usize));
        }
        let bound = if ca[b].0 == n {
            ca[b].1
        } else {
            ca[b].1.max(ca[b + 1].1)
        };
        let x = table.x_value(n);
        report.checked += 1;
        if x > bound + 1e-12 {
            report.violations.push((n, x, bound));
        }
    }
    Ok(report)
}
