//! Statistics columns and 𝒢/ℒ rows in printable form.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::engine::CaSequence;
use crate::error::Result;
use crate::robin::{
    find_ki, gl_window, inverse_bound_ln_ln, pnt_estimate, unconditional_bound, x_value, KiSearch,
};

/// Per-number statistics for one CA index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsColumn {
    pub index: usize,
    pub form: String,
    pub v2: u32,
    pub ln_n: f64,
    pub ln_p1: f64,
    /// `ln(−1/(ε ln ε))` at `ε = ε_i`.
    pub pnt_estimate: f64,
    pub ln_ln_n: f64,
    pub ki: KiSearch,
    pub lg_n: f64,
    pub lg_lg_n: f64,
    pub sigma_minus1: f64,
    pub x: f64,
    /// `None` for `n ∈ {1, 2, 12}`.
    pub bound: Option<f64>,
    /// `ln ln B⁻¹(X)`, defined only while `X > e^γ`.
    pub inverse_bound: Option<f64>,
}

impl StatsColumn {
    pub fn compute(seq: &CaSequence, index: usize, k_max: usize) -> Result<Self> {
        let r = seq.get(index)?;
        let s = &r.stats;
        let x = x_value(s)?;
        Ok(StatsColumn {
            index,
            form: r.form.to_string(),
            v2: s.v2,
            ln_n: s.ln_n,
            ln_p1: s.ln_p1,
            pnt_estimate: pnt_estimate(r.epsilon)?,
            ln_ln_n: s.ln_ln_n,
            ki: find_ki(seq, index, k_max)?,
            lg_n: s.lg_n,
            lg_lg_n: s.lg_lg_n,
            sigma_minus1: s.sigma_minus1(),
            x,
            bound: unconditional_bound(s).ok(),
            inverse_bound: inverse_bound_ln_ln(x),
        })
    }
}

/// Renders columns side by side, one statistic per row.
pub fn render_stats(cols: &[StatsColumn]) -> String {
    let opt = |v: Option<f64>, prec: usize| v.map_or("-".to_string(), |v| format!("{v:.prec$}"));
    type Cell = Box<dyn Fn(&StatsColumn) -> String>;
    let rows: Vec<(&str, Cell)> = vec![
        ("v2", Box::new(|c| c.v2.to_string())),
        ("ln", Box::new(|c| format!("{:.4}", c.ln_n))),
        ("ln(P1)", Box::new(|c| format!("{:.4}", c.ln_p1))),
        (
            "ln(-1/(eps ln eps))",
            Box::new(|c| format!("{:.4}", c.pnt_estimate)),
        ),
        ("ln ln", Box::new(|c| format!("{:.4}", c.ln_ln_n))),
        ("k_i", Box::new(|c| c.ki.to_string())),
        ("lg", Box::new(|c| format!("{:.4}", c.lg_n))),
        ("lg lg", Box::new(|c| format!("{:.4}", c.lg_lg_n))),
        ("sigma_-1", Box::new(|c| format!("{:.4}", c.sigma_minus1))),
        ("X", Box::new(|c| format!("{:.10}", c.x))),
        ("B", Box::new(move |c| opt(c.bound, 5))),
        ("ln ln B^-1(X)", Box::new(move |c| opt(c.inverse_bound, 4))),
    ];
    let mut out = String::new();
    let _ = write!(out, "{:<22}", "");
    for c in cols {
        let _ = write!(out, "{:>18}", format!("n_{}", c.index));
    }
    out.push('\n');
    for (name, f) in &rows {
        let _ = write!(out, "{name:<22}");
        for c in cols {
            let _ = write!(out, "{:>18}", f(c));
        }
        out.push('\n');
    }
    out
}

/// One row of the 𝒢/ℒ sequence relative to base indices `i` and `i + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlRow {
    pub index: usize,
    pub v2: u32,
    pub q: u64,
    pub p1: u64,
    pub ln_n: f64,
    pub v: u32,
    pub g_num: u128,
    pub g_den: u128,
    /// 𝒢_{i, index−i}.
    pub g_window: f64,
    pub epsilon: f64,
    pub ln_ln_n: f64,
    /// ℒ_{i, index−i}.
    pub l_window: f64,
    /// −𝒟_{i+1, index−i−1}, present once the second window is nonempty.
    pub neg_d_next: Option<f64>,
}

/// Rows `first..=last` of the 𝒢/ℒ table for base index `base`.
pub fn gl_rows(seq: &CaSequence, base: usize, first: usize, last: usize) -> Result<Vec<GlRow>> {
    (first.max(base)..=last)
        .map(|index| {
            let r = seq.get(index)?;
            let w = gl_window(seq, base, index - base)?;
            let neg_d_next = if index > base + 1 {
                Some(-gl_window(seq, base + 1, index - base - 1)?.d)
            } else {
                None
            };
            Ok(GlRow {
                index,
                v2: r.stats.v2,
                q: r.q,
                p1: r.form.largest_prime(),
                ln_n: r.stats.ln_n,
                v: r.v,
                g_num: r.g_num,
                g_den: r.g_den,
                g_window: w.g,
                epsilon: r.epsilon,
                ln_ln_n: r.stats.ln_ln_n,
                l_window: w.l,
                neg_d_next,
            })
        })
        .collect()
}

/// Short scientific form with three significant digits, e.g. `4.73e-2`.
pub fn sci3(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let mut mant = x / 10f64.powi(exp);
    let mut exp = exp;
    if (mant.abs() * 100.0).round() >= 1000.0 {
        mant /= 10.0;
        exp += 1;
    }
    format!("{mant:.2}e{exp}")
}

pub fn render_gl_rows(rows: &[GlRow]) -> String {
    let mut out = String::from("i+j\tv2\tq\tp\tln\tv\tg\tG\teps\tll\tL\t-D\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.1}\t{}\t{}:{}\t{:.3}\t{}\t{:.3}\t{:.3}\t{}",
            r.index,
            r.v2,
            r.q,
            r.p1,
            r.ln_n,
            r.v,
            r.g_num,
            r.g_den,
            r.g_window,
            sci3(r.epsilon),
            r.ln_ln_n,
            r.l_window,
            r.neg_d_next.map_or(String::new(), sci3),
        );
    }
    out
}
