//! Dense prime table with cached natural logarithms.
//!
//! Every engine step consumes `ln p` of the winning candidate, so the logs are
//! computed once at construction. The table is immutable afterwards and can
//! be shared freely between threads.

use crate::error::{Error, Result};

/// Default sieve bound, large enough for the 143 215-step reference run.
pub const DEFAULT_SIEVE_LIMIT: u64 = 50_000_000;

/// Largest accepted bound; the odd-only table costs about `limit / 2` bytes.
pub const MAX_SIEVE_LIMIT: u64 = 2_000_000_000;

#[derive(Debug, Clone)]
pub struct PrimeSieve {
    limit: u64,
    primes: Vec<u64>,
    ln: Vec<f64>,
}

impl PrimeSieve {
    /// Sieve of Eratosthenes over the odd numbers up to `limit` inclusive.
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::InvalidArgument(format!(
                "sieve limit must be at least 2, got {limit}"
            )));
        }
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::Resource(format!(
                "sieve limit {limit} exceeds the maximum {MAX_SIEVE_LIMIT}"
            )));
        }
        // slot i stands for 2i + 1
        let slots = (limit as usize).div_ceil(2);
        let mut composite = vec![false; slots];
        if slots > 0 {
            composite[0] = true; // 1
        }
        let mut i = 1;
        while (2 * i + 1) * (2 * i + 1) <= limit as usize {
            if !composite[i] {
                let p = 2 * i + 1;
                let mut j = (p * p) / 2;
                while j < slots {
                    composite[j] = true;
                    j += p;
                }
            }
            i += 1;
        }
        let mut primes = Vec::with_capacity(estimate_pi(limit));
        primes.push(2);
        primes.extend(
            composite
                .iter()
                .enumerate()
                .filter(|&(_, &c)| !c)
                .map(|(i, _)| 2 * i as u64 + 1),
        );
        let ln = primes.iter().map(|&p| (p as f64).ln()).collect();
        Ok(PrimeSieve { limit, primes, ln })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Prime at 0-based position `idx`.
    pub fn prime(&self, idx: usize) -> u64 {
        self.primes[idx]
    }

    /// `ln` of the prime at 0-based position `idx`.
    pub fn ln(&self, idx: usize) -> f64 {
        self.ln[idx]
    }

    /// 0-based position of the smallest prime strictly greater than `p`.
    pub fn next_index(&self, p: u64) -> Result<usize> {
        let idx = self.primes.partition_point(|&q| q <= p);
        if idx == self.primes.len() {
            Err(Error::SieveExhausted {
                after: p,
                limit: self.limit,
            })
        } else {
            Ok(idx)
        }
    }

    /// Smallest prime strictly greater than `p`.
    pub fn next_prime(&self, p: u64) -> Result<u64> {
        self.next_index(p).map(|i| self.primes[i])
    }

    /// 0-based position of the prime `p`.
    pub fn index_of(&self, p: u64) -> Result<usize> {
        self.primes
            .binary_search(&p)
            .map_err(|_| Error::NotFound(p))
    }

    /// π(p) for a prime `p` in the table (1-based).
    pub fn prime_index(&self, p: u64) -> Result<usize> {
        self.index_of(p).map(|i| i + 1)
    }

    /// Number of primes `<= x`, for `x` within the sieve.
    pub fn count_up_to(&self, x: u64) -> usize {
        self.primes.partition_point(|&q| q <= x)
    }
}

fn estimate_pi(x: u64) -> usize {
    if x < 17 {
        return 8;
    }
    let xf = x as f64;
    (1.26 * xf / xf.ln()) as usize
}
