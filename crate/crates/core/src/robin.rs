//! Robin's inequality along the CA sequence.
//!
//! `X(n) = σ₋₁(n) / ln ln n` is compared with `e^γ` and with the unconditional
//! bound `B(n) = e^γ + C / (ln ln n)²`. Windows `n_i → n_{i+k}` split the
//! multiplier `ℛ = X(n_{i+k}) / X(n_i)` into the abundance gain `𝒢` and the
//! log-log gain `ℒ`.

use serde::{Deserialize, Serialize};

use crate::engine::{CaRecord, CaSequence};
use crate::error::{Error, Result};
use crate::factored::LogStats;

/// e^γ.
pub const E_GAMMA: f64 = 1.781_072_417_990_198;

/// `(7/3 − e^γ · ln ln 12) · ln ln 12`, as printed.
pub const ROBIN_C: f64 = 0.648_213_65;

/// Meissel–Mertens constant.
pub const MERTENS_B1: f64 = 0.261_497_212_847_642_78;

/// Default window horizon for k_i scans.
pub const DEFAULT_K_MAX: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobinConstants {
    pub e_gamma: f64,
    pub c: f64,
    pub b1: f64,
}

impl RobinConstants {
    /// Constants with `C` recomputed from `e^γ`.
    pub fn new() -> Self {
        RobinConstants {
            e_gamma: E_GAMMA,
            c: robin_c_from(E_GAMMA),
            b1: MERTENS_B1,
        }
    }
}

impl Default for RobinConstants {
    fn default() -> Self {
        Self::new()
    }
}

pub fn robin_c_from(e_gamma: f64) -> f64 {
    let ll12 = 12f64.ln().ln();
    (7.0 / 3.0 - e_gamma * ll12) * ll12
}

/// `X(n) = σ₋₁(n) / ln ln n`; needs `n ≥ 3`.
pub fn x_value(stats: &LogStats) -> Result<f64> {
    if !(stats.ln_ln_n > 0.0) {
        return Err(Error::Domain(format!(
            "X(n) needs ln ln n > 0, got ln n = {}",
            stats.ln_n
        )));
    }
    Ok(stats.ln_sigma_minus1.exp() / stats.ln_ln_n)
}

fn is_excluded(ln_n: f64) -> bool {
    [1f64, 2.0, 12.0]
        .iter()
        .any(|&m| (ln_n - m.ln()).abs() <= 1e-12 * ln_n.max(1.0))
}

/// `B(n) = e^γ + C / (ln ln n)²`, defined for `n ∉ {1, 2, 12}`.
pub fn unconditional_bound(stats: &LogStats) -> Result<f64> {
    if is_excluded(stats.ln_n) {
        return Err(Error::ExcludedInput);
    }
    if !(stats.ln_n > 1.0) {
        return Err(Error::Domain("B(n) needs ln n > 1".into()));
    }
    Ok(E_GAMMA + robin_c_from(E_GAMMA) / (stats.ln_ln_n * stats.ln_ln_n))
}

/// `X(n) < e^γ`.
pub fn rie_holds(stats: &LogStats) -> Result<bool> {
    Ok(x_value(stats)? < E_GAMMA)
}

/// `ln ln B⁻¹(x)`: the log-log size at which the bound drops to `x`.
///
/// `None` when `x ≤ e^γ`, where the bound never reaches `x`.
pub fn inverse_bound_ln_ln(x: f64) -> Option<f64> {
    (x > E_GAMMA).then(|| (robin_c_from(E_GAMMA) / (x - E_GAMMA)).sqrt())
}

/// `ln(−1 / (ε ln ε))`, the prime-number-theorem estimate of `ln P₁`.
pub fn pnt_estimate(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!(
            "ε must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok((-1.0 / (epsilon * epsilon.ln())).ln())
}

/// Window products from `n_i` to `n_{i+k}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlWindow {
    pub i: usize,
    pub k: usize,
    /// 𝒢 = σ₋₁(n_{i+k}) / σ₋₁(n_i).
    pub g: f64,
    /// ℒ = ln ln n_{i+k} / ln ln n_i.
    pub l: f64,
    /// ℛ, the product of the per-step multipliers `q^ε · L⁻¹`.
    pub r: f64,
    /// 𝒟 = 𝒢 − ℒ.
    pub d: f64,
}

fn window_records(seq: &CaSequence, i: usize, k: usize) -> Result<&[CaRecord]> {
    if i == 0 {
        return Err(Error::InvalidArgument("indices start at 1".into()));
    }
    if i + k > seq.last_index() {
        return Err(Error::InsufficientData(i + k));
    }
    Ok(&seq.records()[i - 1..i + k])
}

/// 𝒢, ℒ, ℛ and 𝒟 for the window `i..=i+k`.
pub fn gl_window(seq: &CaSequence, i: usize, k: usize) -> Result<GlWindow> {
    let recs = window_records(seq, i, k)?;
    let base = &recs[0].stats;
    if !(base.ln_ln_n > 0.0) {
        return Err(Error::Domain(format!("ln ln n_{i} must be positive")));
    }
    let mut ln_g = 0.0;
    let mut ln_r = 0.0;
    for pair in recs.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        ln_g += next.ln_g;
        // R_{j}(n_{j+1}, ε_{j+1}) = q^ε · ln ln n_j / ln ln n_{j+1}
        ln_r += next.epsilon * next.ln_q - (next.stats.ln_ln_n.ln() - prev.stats.ln_ln_n.ln());
    }
    let l = recs[k].stats.ln_ln_n / base.ln_ln_n;
    let g = ln_g.exp();
    Ok(GlWindow {
        i,
        k,
        g,
        l,
        r: ln_r.exp(),
        d: g - l,
    })
}

/// Result of a bounded k_i search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KiSearch {
    Found(usize),
    /// ℛ_{i,k} < 1 for every `k ≤ horizon`; says nothing beyond it.
    NotWithinHorizon(usize),
}

impl std::fmt::Display for KiSearch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KiSearch::Found(k) => write!(f, "{k}"),
            KiSearch::NotWithinHorizon(h) => write!(f, "∞ within horizon {h}"),
        }
    }
}

/// Smallest `k ≤ k_max` with ℛ_{i,k} ≥ 1, compared as `ln 𝒢 ≥ ln ℒ`.
pub fn find_ki(seq: &CaSequence, i: usize, k_max: usize) -> Result<KiSearch> {
    let recs = window_records(seq, i, 0)?;
    let base = recs[0].stats.ln_ln_n;
    if !(base > 0.0) {
        return Err(Error::Domain(format!("ln ln n_{i} must be positive")));
    }
    let ln_base = base.ln();
    let mut ln_g = 0.0;
    for k in 1..=k_max {
        let next = seq.get(i + k)?;
        ln_g += next.ln_g;
        if ln_g >= next.stats.ln_ln_n.ln() - ln_base {
            return Ok(KiSearch::Found(k));
        }
    }
    Ok(KiSearch::NotWithinHorizon(k_max))
}

/// Sufficient condition for `k_i = 1`: `(q + q² + … + q^v) · ln q ≤ ln n_i · ln ln n_i`.
pub fn ki_one_sufficient(stats_i: &LogStats, q: u64, v: u32) -> bool {
    let qf = q as f64;
    let sum: f64 = (1..=v as i32).map(|l| qf.powi(l)).sum();
    sum * qf.ln() <= stats_i.ln_n * stats_i.ln_ln_n
}

/// `𝒟_{i,1} > 0` decided from `g_{i+1}`, `q_{i+1}` and `n_i` alone:
/// `g − 1 > 2 artanh(ln q / (2 ln n_i + ln q)) / ln ln n_i`.
pub fn artanh_criterion(stats_i: &LogStats, g_num: u128, g_den: u128, q: u64) -> bool {
    let lhs = 1.0 / g_den as f64;
    debug_assert_eq!(g_num, g_den + 1);
    lhs > two_artanh_term(stats_i, q) / stats_i.ln_ln_n
}

/// The same inequality without the `1 / ln ln n_i` factor.
pub fn artanh_criterion_as_printed(stats_i: &LogStats, g_num: u128, g_den: u128, q: u64) -> bool {
    let lhs = (g_num - g_den) as f64 / g_den as f64;
    lhs > two_artanh_term(stats_i, q)
}

fn two_artanh_term(stats_i: &LogStats, q: u64) -> f64 {
    let lq = (q as f64).ln();
    2.0 * (lq / (2.0 * stats_i.ln_n + lq)).atanh()
}

/// `P₁(n) > ln n`, the large-prime hypothesis under which RIE holds for t-free `n`.
pub fn choie_large_prime(stats: &LogStats) -> bool {
    stats.ln_p1 > stats.ln_n.ln()
}
