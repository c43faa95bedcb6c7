//! Sequential generator of colossally abundant numbers.
//!
//! The state holds the top-down form of the current CA number `n_i`, the
//! bottom-up candidate list (as sieve indices) and the cached ε value of
//! every candidate. Each step promotes the candidate with the largest ε and
//! refreshes only the (at most three) slots that the promotion touches.
//!
//! ε values are evaluated and compared in double-double precision. Two
//! candidates within [`TIE_TOLERANCE`] of each other abort the run with
//! [`Error::FourExponentialsWitness`] instead of picking one.

use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::factored::{log_stats, top_down_to_bottom_up, LogStats, TopDownForm};
use crate::primes::PrimeSieve;

/// Relative tolerance below which two ε candidates count as tied.
pub const TIE_TOLERANCE: f64 = 1e-18;

/// Steps between full recomputations of the log-domain accumulators.
pub const DRIFT_CHECK_INTERVAL: usize = 4096;

/// Maximum relative disagreement tolerated by the drift check.
pub const DRIFT_TOLERANCE: f64 = 1e-12;

pub const CHECKPOINT_VERSION: u32 = 1;

/// `g(x, v) = σ(x^v) − 1 = x + x² + … + x^v`, `None` on overflow.
///
/// `v = 0` is treated like `v = 1`, as in the reference parameter function.
pub fn sigma_power_minus_one(x: u64, v: u32) -> Option<u128> {
    let x = x as u128;
    let mut term = 1u128;
    let mut sum = 0u128;
    for _ in 0..v.max(1) {
        term = term.checked_mul(x)?;
        sum = sum.checked_add(term)?;
    }
    Some(sum)
}

/// ε = F(x, v): the exponent at which raising `x` from `v − 1` to `v` breaks even.
///
/// Equals `ln((1 − x^{v+1}) / (x − x^{v+1})) / ln x`, evaluated as
/// `ln(1 + 1/g(x, v)) / ln x`. Returns 0 for `x == 0` (empty slot).
pub fn ca_parameter(x: u64, v: u32) -> f64 {
    ca_parameter_dd(x, v).to_f64()
}

/// [`ca_parameter`] in double-double precision.
pub fn ca_parameter_dd(x: u64, v: u32) -> DoubleDouble {
    if x == 0 {
        return DoubleDouble::ZERO;
    }
    let ln_x = DoubleDouble::ln_u64(x);
    match sigma_power_minus_one(x, v).filter(|&g| g < 1u128 << 104) {
        Some(g) => DoubleDouble::ln1p_recip(g) / ln_x,
        None => {
            // g beyond 2^104: 1/g is far below any competing ε.
            let xf = x as f64;
            let g = xf.powi(v as i32) * xf / (xf - 1.0);
            DoubleDouble::from_f64((1.0 / g).ln_1p() / ln_x.to_f64())
        }
    }
}

/// Why [`select_next_trigger`] could not pick a winner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    NoPositive,
    /// Slots whose ε agree within [`TIE_TOLERANCE`].
    Tie(usize, usize),
}

/// Index of the unique maximal ε.
pub fn select_next_trigger(epsilons: &[DoubleDouble]) -> std::result::Result<usize, Selection> {
    let mut best: Option<usize> = None;
    for (i, e) in epsilons.iter().enumerate() {
        if e.hi <= 0.0 {
            continue;
        }
        match best {
            Some(b) if epsilons[b] >= *e => {}
            _ => best = Some(i),
        }
    }
    let best = best.ok_or(Selection::NoPositive)?;
    let top = epsilons[best];
    let tol = top.to_f64() * TIE_TOLERANCE;
    for (i, e) in epsilons.iter().enumerate() {
        if i != best && e.hi > 0.0 && (top - *e).to_f64().abs() <= tol {
            return Err(Selection::Tie(best.min(i), best.max(i)));
        }
    }
    Ok(best)
}

/// One generated CA number `n_i = n_{i−1} · q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaRecord {
    pub index: usize,
    pub q: u64,
    /// `v_q(n_i)` after the step.
    pub v: u32,
    pub epsilon: f64,
    /// `g_i = g_num : g_den = σ(q^v) : σ(q^v) − 1`.
    pub g_num: u128,
    pub g_den: u128,
    /// `ln g_i`, from the exact ratio.
    pub ln_g: f64,
    pub ln_q: f64,
    pub stats: LogStats,
    pub form: TopDownForm,
}

impl CaRecord {
    pub fn g_ratio(&self) -> String {
        format!("{}:{}", self.g_num, self.g_den)
    }
}

/// Exact log totals `(ln n, ln σ₋₁(n))` of a form in double-double.
fn dd_log_totals(form: &TopDownForm, sieve: &PrimeSieve) -> Result<(DoubleDouble, DoubleDouble)> {
    let mut ln_n = DoubleDouble::ZERO;
    let mut ln_sigma = DoubleDouble::ZERO;
    for (v, lo, hi) in form.valuation_runs() {
        if hi > sieve.limit() {
            return Err(Error::SieveExhausted {
                after: hi,
                limit: sieve.limit(),
            });
        }
        for idx in sieve.count_up_to(lo)..sieve.count_up_to(hi) {
            let p = sieve.prime(idx);
            ln_n += DoubleDouble::ln_u64(p).mul_f64(v as f64);
            for w in 1..=v {
                let g = sigma_power_minus_one(p, w).expect("small prime power");
                ln_sigma += DoubleDouble::ln1p_recip(g);
            }
        }
    }
    Ok((ln_n, ln_sigma))
}

/// Mutable generator state at CA number `n_counter`.
#[derive(Clone, Debug, PartialEq)]
pub struct CaState {
    counter: usize,
    triggers: Vec<u64>,
    /// Sieve index of each bottom-up candidate; `None` for an empty slot.
    candidates: Vec<Option<u32>>,
    epsilons: Vec<DoubleDouble>,
    ln_n: DoubleDouble,
    ln_sigma: DoubleDouble,
    drift_check_interval: usize,
}

impl CaState {
    /// The reference seed `n_4 = 60 = (5, 2)`.
    pub fn seed(sieve: &PrimeSieve) -> Result<Self> {
        CaState::from_form(4, TopDownForm::new(vec![5, 2])?, sieve)
    }

    /// State for an arbitrary CA number given its index and top-down form.
    pub fn from_form(counter: usize, form: TopDownForm, sieve: &PrimeSieve) -> Result<Self> {
        let (ln_n, ln_sigma) = dd_log_totals(&form, sieve)?;
        Self::with_totals(counter, form, ln_n, ln_sigma, sieve)
    }

    fn with_totals(
        counter: usize,
        form: TopDownForm,
        ln_n: DoubleDouble,
        ln_sigma: DoubleDouble,
        sieve: &PrimeSieve,
    ) -> Result<Self> {
        let bottom_up = top_down_to_bottom_up(&form, sieve)?;
        let mut candidates = Vec::with_capacity(bottom_up.entries.len());
        let mut epsilons = Vec::with_capacity(bottom_up.entries.len());
        for (i, &p) in bottom_up.entries.iter().enumerate() {
            if p == 0 {
                candidates.push(None);
                epsilons.push(DoubleDouble::ZERO);
            } else {
                candidates.push(Some(sieve.index_of(p)? as u32));
                epsilons.push(ca_parameter_dd(p, i as u32 + 1));
            }
        }
        Ok(CaState {
            counter,
            triggers: form.into(),
            candidates,
            epsilons,
            ln_n,
            ln_sigma,
            drift_check_interval: DRIFT_CHECK_INTERVAL,
        })
    }

    /// Overrides the drift-check cadence; 0 disables it.
    pub fn with_drift_check_interval(mut self, interval: usize) -> Self {
        self.drift_check_interval = interval;
        self
    }

    pub fn counter(&self) -> usize {
        self.counter
    }

    pub fn triggers(&self) -> &[u64] {
        &self.triggers
    }

    pub fn form(&self) -> TopDownForm {
        TopDownForm::from_vec_unchecked(self.triggers.clone())
    }

    /// Candidate primes, 0 for empty slots.
    pub fn candidates(&self, sieve: &PrimeSieve) -> Vec<u64> {
        self.candidates
            .iter()
            .map(|c| c.map_or(0, |i| sieve.prime(i as usize)))
            .collect()
    }

    pub fn epsilons(&self) -> &[DoubleDouble] {
        &self.epsilons
    }

    pub fn stats(&self) -> LogStats {
        LogStats::from_logs(
            self.ln_n.to_f64(),
            self.ln_sigma.to_f64(),
            (self.triggers[0] as f64).ln(),
            self.triggers.len() as u32,
        )
    }

    fn set_slot(&mut self, slot: usize, idx: Option<u32>, sieve: &PrimeSieve) {
        self.candidates[slot] = idx;
        self.epsilons[slot] = match idx {
            Some(i) => ca_parameter_dd(sieve.prime(i as usize), slot as u32 + 1),
            None => DoubleDouble::ZERO,
        };
    }

    /// Advances to `n_{counter+1}` and returns its record.
    pub fn step(&mut self, sieve: &PrimeSieve) -> Result<CaRecord> {
        let slot = select_next_trigger(&self.epsilons).map_err(|e| match e {
            Selection::NoPositive => Error::InvalidArgument("no positive ε candidate".into()),
            Selection::Tie(a, b) => Error::FourExponentialsWitness {
                first: (self.candidate_prime(a, sieve), a as u32 + 1),
                second: (self.candidate_prime(b, sieve), b as u32 + 1),
                eps_first: self.epsilons[a].to_f64(),
                eps_second: self.epsilons[b].to_f64(),
            },
        })?;
        let epsilon = self.epsilons[slot];
        let new_idx = self.candidates[slot].expect("selected slot holds a candidate");
        let new_prime = sieve.prime(new_idx as usize);
        let valuation = slot as u32 + 1;
        let len = self.triggers.len();

        if slot < len {
            self.triggers[slot] = new_prime;
            if self.candidates[slot + 1].is_none() {
                self.set_slot(slot + 1, Some(new_idx), sieve);
            }
            if slot > 0 && self.triggers[slot - 1] == new_prime {
                self.triggers[slot - 1] = 0;
                self.set_slot(slot, None, sieve);
            } else {
                let next = new_idx as usize + 1;
                if next >= sieve.len() {
                    return Err(Error::SieveExhausted {
                        after: new_prime,
                        limit: sieve.limit(),
                    });
                }
                self.set_slot(slot, Some(next as u32), sieve);
            }
        } else {
            // the trailing 2 was raised past the current top valuation
            self.triggers.push(new_prime);
            self.candidates.push(None);
            self.epsilons.push(DoubleDouble::ZERO);
            self.set_slot(slot + 1, Some(new_idx), sieve);
            if self.triggers[slot - 1] == new_prime {
                self.triggers[slot - 1] = 0;
                self.set_slot(slot, None, sieve);
            } else {
                self.set_slot(slot, Some(new_idx + 1), sieve);
            }
        }

        self.counter += 1;
        let g_den = sigma_power_minus_one(new_prime, valuation)
            .ok_or_else(|| Error::Resource(format!("σ({new_prime}^{valuation}) overflows u128")))?;
        let ln_g = DoubleDouble::ln1p_recip(g_den);
        let ln_q = DoubleDouble::ln_u64(new_prime);
        self.ln_n += ln_q;
        self.ln_sigma += ln_g;

        if self.drift_check_interval > 0 && self.counter.is_multiple_of(self.drift_check_interval) {
            self.check_drift(sieve)?;
        }

        Ok(CaRecord {
            index: self.counter,
            q: new_prime,
            v: valuation,
            epsilon: epsilon.to_f64(),
            g_num: g_den + 1,
            g_den,
            ln_g: ln_g.to_f64(),
            ln_q: ln_q.to_f64(),
            stats: self.stats(),
            form: self.form(),
        })
    }

    fn candidate_prime(&self, slot: usize, sieve: &PrimeSieve) -> u64 {
        self.candidates[slot].map_or(0, |i| sieve.prime(i as usize))
    }

    /// Compares the accumulators with a fresh recomputation from the factorization.
    pub fn check_drift(&self, sieve: &PrimeSieve) -> Result<()> {
        let fresh = log_stats(&self.form(), sieve)?;
        let d_n = (fresh.ln_n - self.ln_n.to_f64()).abs() / fresh.ln_n;
        let d_s = (fresh.ln_sigma_minus1 - self.ln_sigma.to_f64()).abs() / fresh.ln_sigma_minus1;
        let drift = d_n.max(d_s);
        if drift > DRIFT_TOLERANCE {
            return Err(Error::Drift {
                index: self.counter,
                drift,
            });
        }
        Ok(())
    }

    pub fn checkpoint(&self, sieve: &PrimeSieve) -> Checkpoint {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            counter: self.counter,
            triggers: self.triggers.clone(),
            sieve_limit: sieve.limit(),
            ln_sigma_minus1: self.ln_sigma,
            ln_n: self.ln_n,
        }
    }
}

/// Runs `count` steps, handing each record to `sink` in index order.
pub fn generate<F>(state: &mut CaState, count: usize, sieve: &PrimeSieve, mut sink: F) -> Result<()>
where
    F: FnMut(&CaRecord) -> Result<()>,
{
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    for _ in 0..count {
        let rec = state.step(sieve)?;
        sink(&rec)?;
    }
    Ok(())
}

/// Records for `n_1 = 2, n_2 = 6, n_3 = 12, n_4 = 60`, which precede the seed.
pub fn prefix_records(sieve: &PrimeSieve) -> Result<Vec<CaRecord>> {
    let steps: [(&[u64], u64, u32); 4] =
        [(&[2], 2, 1), (&[3], 3, 1), (&[3, 2], 2, 2), (&[5, 2], 5, 1)];
    steps
        .iter()
        .enumerate()
        .map(|(i, &(alphas, q, v))| {
            let form = TopDownForm::new(alphas.to_vec())?;
            let (ln_n, ln_sigma) = dd_log_totals(&form, sieve)?;
            let g_den = sigma_power_minus_one(q, v).expect("small");
            Ok(CaRecord {
                index: i + 1,
                q,
                v,
                epsilon: ca_parameter(q, v),
                g_num: g_den + 1,
                g_den,
                ln_g: DoubleDouble::ln1p_recip(g_den).to_f64(),
                ln_q: (q as f64).ln(),
                stats: LogStats::from_logs(
                    ln_n.to_f64(),
                    ln_sigma.to_f64(),
                    (alphas[0] as f64).ln(),
                    alphas.len() as u32,
                ),
                form,
            })
        })
        .collect()
}

/// The CA sequence `n_1, n_2, …` held in memory, addressed by 1-based index.
#[derive(Clone, Debug, Default)]
pub struct CaSequence {
    records: Vec<CaRecord>,
}

impl CaSequence {
    /// Prefix plus engine output up to and including index `last`.
    pub fn generate(sieve: &PrimeSieve, last: usize) -> Result<Self> {
        let mut records = prefix_records(sieve)?;
        records.truncate(last);
        if last > 4 {
            records.reserve(last - 4);
            let mut state = CaState::seed(sieve)?;
            generate(&mut state, last - 4, sieve, |r| {
                records.push(r.clone());
                Ok(())
            })?;
        }
        Ok(CaSequence { records })
    }

    pub fn from_records(records: Vec<CaRecord>) -> Result<Self> {
        for (k, r) in records.iter().enumerate() {
            if r.index != k + 1 {
                return Err(Error::InvalidArgument(format!(
                    "record at position {k} has index {}",
                    r.index
                )));
            }
        }
        Ok(CaSequence { records })
    }

    /// Highest available index.
    pub fn last_index(&self) -> usize {
        self.records.len()
    }

    pub fn get(&self, index: usize) -> Result<&CaRecord> {
        index
            .checked_sub(1)
            .and_then(|k| self.records.get(k))
            .ok_or(Error::InsufficientData(index))
    }

    pub fn records(&self) -> &[CaRecord] {
        &self.records
    }
}

/// Serializable engine snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub counter: usize,
    pub triggers: Vec<u64>,
    pub sieve_limit: u64,
    pub ln_sigma_minus1: DoubleDouble,
    pub ln_n: DoubleDouble,
}

impl Checkpoint {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let version = value
            .get("version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::Parse("missing version".into()))?;
        if version != CHECKPOINT_VERSION as u64 {
            return Err(Error::UnsupportedVersion {
                found: version as u32,
                expected: CHECKPOINT_VERSION,
            });
        }
        serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn restore(&self, sieve: &PrimeSieve) -> Result<CaState> {
        if self.version != CHECKPOINT_VERSION {
            return Err(Error::UnsupportedVersion {
                found: self.version,
                expected: CHECKPOINT_VERSION,
            });
        }
        if self.sieve_limit != sieve.limit() {
            return Err(Error::SieveMismatch {
                found: self.sieve_limit,
                expected: sieve.limit(),
            });
        }
        let form = TopDownForm::new(self.triggers.clone())?;
        CaState::with_totals(self.counter, form, self.ln_n, self.ln_sigma_minus1, sieve)
    }
}
