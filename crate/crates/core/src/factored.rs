//! Factored representations of superabundant numbers.
//!
//! A top-down form `(α_1, …, α_m)` encodes `n` through `v_p(n) = max{v : p <= α_v}`:
//! every prime up to `α_v` carries at least exponent `v`. Zero entries mark
//! valuations that no prime attains. Statistics are computed purely in the
//! log domain; [`materialize`] exists only for small cross-checks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::PrimeSieve;

/// Default bound for [`materialize`].
pub const DEFAULT_MATERIALIZE_BOUND: u128 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct TopDownForm {
    alphas: Vec<u64>,
}

impl TopDownForm {
    pub fn new(alphas: Vec<u64>) -> Result<Self> {
        let (first, last) = match (alphas.first(), alphas.last()) {
            (Some(&f), Some(&l)) => (f, l),
            _ => return Err(Error::InvalidArgument("empty top-down form".into())),
        };
        if first == 0 || last == 0 {
            return Err(Error::InvalidArgument(
                "top-down form must start and end with a trigger".into(),
            ));
        }
        let mut prev = u64::MAX;
        for &a in alphas.iter().filter(|&&a| a != 0) {
            if a >= prev {
                return Err(Error::InvalidArgument(format!(
                    "triggers must be strictly decreasing: {a} after {prev}"
                )));
            }
            prev = a;
        }
        Ok(TopDownForm { alphas })
    }

    pub(crate) fn from_vec_unchecked(alphas: Vec<u64>) -> Self {
        debug_assert!(TopDownForm::new(alphas.clone()).is_ok());
        TopDownForm { alphas }
    }

    pub fn alphas(&self) -> &[u64] {
        &self.alphas
    }

    /// Highest valuation present; equals `v_2(n)`.
    pub fn max_valuation(&self) -> u32 {
        self.alphas.len() as u32
    }

    /// Largest prime factor `P_1(n) = α_1`.
    pub fn largest_prime(&self) -> u64 {
        self.alphas[0]
    }

    /// Maximal runs `(v, lo, hi)`: primes `p` with `lo < p <= hi` have `v_p(n) = v`.
    pub fn valuation_runs(&self) -> Vec<(u32, u64, u64)> {
        let mut runs = Vec::new();
        let mut floor = 0;
        for (i, &a) in self.alphas.iter().enumerate().rev() {
            if a != 0 {
                runs.push((i as u32 + 1, floor, a));
                floor = a;
            }
        }
        runs.reverse();
        runs
    }
}

impl TryFrom<Vec<u64>> for TopDownForm {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        TopDownForm::new(v)
    }
}

impl From<TopDownForm> for Vec<u64> {
    fn from(t: TopDownForm) -> Self {
        t.alphas
    }
}

impl fmt::Display for TopDownForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.alphas.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for TopDownForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let alphas = s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::InvalidArgument(format!("bad trigger {x:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        TopDownForm::new(alphas)
    }
}

/// Candidate list: entry `i` is the prime whose exponent may next be raised
/// to `i + 1`, or 0 when no prime currently has valuation `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BottomUpForm {
    pub entries: Vec<u64>,
}

/// Direct transliteration of the reference conversion: each trigger maps to
/// its successor prime, a run of zeros maps to the successor of the trigger
/// that closes it followed by as many zeros, and a final 2 is appended.
pub fn top_down_to_bottom_up(t: &TopDownForm, sieve: &PrimeSieve) -> Result<BottomUpForm> {
    let triggers = t.alphas();
    let l = triggers.len();
    let mut result = Vec::with_capacity(l + 1);
    let mut i = 0;
    while i < l {
        let mut j = 1;
        let p = triggers[i];
        if p != 0 {
            result.push(sieve.next_prime(p)?);
        } else {
            let mut p = triggers[i + j];
            while p == 0 {
                j += 1;
                p = triggers[i + j];
            }
            result.push(sieve.next_prime(p)?);
            result.extend(std::iter::repeat_n(0, j));
            j += 1;
        }
        i += j;
    }
    result.push(2);
    Ok(BottomUpForm { entries: result })
}

/// `v_p(n)` for the number encoded by `t`.
pub fn exponent_of(t: &TopDownForm, p: u64) -> u32 {
    t.alphas()
        .iter()
        .enumerate()
        .rev()
        .find(|&(_, &a)| a != 0 && p <= a)
        .map_or(0, |(i, _)| i as u32 + 1)
}

fn is_prime_small(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// Exact value of `t`, provided it does not exceed `bound`.
pub fn materialize(t: &TopDownForm, bound: u128) -> Result<u128> {
    let mut n: u128 = 1;
    for (v, lo, hi) in t.valuation_runs() {
        for p in (lo + 1..=hi).filter(|&p| is_prime_small(p)) {
            for _ in 0..v {
                n = n
                    .checked_mul(p as u128)
                    .filter(|&x| x <= bound)
                    .ok_or(Error::TooLarge { bound })?;
            }
        }
    }
    Ok(n)
}

/// Log-domain statistics of a factored number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogStats {
    pub ln_n: f64,
    pub ln_ln_n: f64,
    pub lg_n: f64,
    pub lg_lg_n: f64,
    pub ln_sigma_minus1: f64,
    pub ln_p1: f64,
    pub v2: u32,
}

impl LogStats {
    pub fn from_logs(ln_n: f64, ln_sigma_minus1: f64, ln_p1: f64, v2: u32) -> Self {
        let lg_n = ln_n / std::f64::consts::LN_10;
        LogStats {
            ln_n,
            ln_ln_n: ln_n.ln(),
            lg_n,
            lg_lg_n: lg_n.log10(),
            ln_sigma_minus1,
            ln_p1,
            v2,
        }
    }

    /// `σ₋₁(n) = σ(n)/n`.
    pub fn sigma_minus1(&self) -> f64 {
        self.ln_sigma_minus1.exp()
    }
}

/// `ln σ₋₁(p^v) = ln((1 - p^-(v+1)) / (1 - p^-1))`.
pub fn ln_sigma_minus1_prime_power(p: u64, v: u32) -> f64 {
    let pf = p as f64;
    (-pf.powi(-(v as i32 + 1))).ln_1p() - (-1.0 / pf).ln_1p()
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Full recomputation of the statistics of `t` from its factorization.
pub fn log_stats(t: &TopDownForm, sieve: &PrimeSieve) -> Result<LogStats> {
    let mut ln_n = Neumaier::default();
    let mut ln_sigma = Neumaier::default();
    for (v, lo, hi) in t.valuation_runs() {
        let start = sieve.count_up_to(lo);
        let end = sieve.count_up_to(hi);
        if hi > sieve.limit() {
            return Err(Error::SieveExhausted {
                after: hi,
                limit: sieve.limit(),
            });
        }
        for idx in start..end {
            ln_n.add(v as f64 * sieve.ln(idx));
            ln_sigma.add(ln_sigma_minus1_prime_power(sieve.prime(idx), v));
        }
    }
    Ok(LogStats::from_logs(
        ln_n.value(),
        ln_sigma.value(),
        (t.largest_prime() as f64).ln(),
        t.max_valuation(),
    ))
}
