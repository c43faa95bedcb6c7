use std::io::Write;

use clap::{Args, Subcommand};
use serde::Serialize;

use colossal::factored::materialize;
use colossal::oracle::{brute_force_ca, brute_force_sa, mertens_residual, SigmaTable};
use colossal::report::{gl_rows, render_gl_rows, render_stats, StatsColumn};
use colossal::robin::{find_ki, gl_window, unconditional_bound, x_value, E_GAMMA, MERTENS_B1};
use colossal::{CaSequence, Error, KiSearch};

use crate::output::{open, parse_indices, IndexList, RowWriter};
use crate::{positive_usize, RunConfig, VerificationFailed};

/// Largest index whose RIE failure is expected; everything above must satisfy it.
const LAST_KNOWN_RIE_FAILURE: usize = 8;

fn sequence(config: &RunConfig, last: usize) -> anyhow::Result<CaSequence> {
    Ok(CaSequence::generate(&config.sieve()?, last)?)
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Indices as `8,9,13` or an inclusive range `8..42`.
    #[arg(long, value_parser = parse_indices)]
    pub indices: IndexList,
}

#[derive(Serialize)]
struct StatsRow {
    index: usize,
    form: String,
    v2: u32,
    ln_n: f64,
    ln_p1: f64,
    pnt_estimate: f64,
    ln_ln_n: f64,
    /// Empty when no k within the horizon works.
    ki: Option<usize>,
    lg_n: f64,
    lg_lg_n: f64,
    sigma_minus1: f64,
    #[serde(rename = "X")]
    x: f64,
    #[serde(rename = "B")]
    bound: Option<f64>,
    ln_ln_inverse_bound: Option<f64>,
}

fn columns(config: &RunConfig, indices: &[usize]) -> anyhow::Result<Vec<StatsColumn>> {
    let last = indices.iter().max().copied().unwrap_or(1) + config.k_max;
    let seq = sequence(config, last)?;
    Ok(indices
        .iter()
        .map(|&i| StatsColumn::compute(&seq, i, config.k_max))
        .collect::<Result<_, _>>()?)
}

pub fn stats(config: &RunConfig, args: &StatsArgs) -> anyhow::Result<()> {
    let indices: Vec<usize> = args.indices.0.clone();
    let mut out = RowWriter::new(config.format, open(config.output.as_deref())?);
    for c in columns(config, &indices)? {
        out.write(&StatsRow {
            index: c.index,
            form: c.form,
            v2: c.v2,
            ln_n: c.ln_n,
            ln_p1: c.ln_p1,
            pnt_estimate: c.pnt_estimate,
            ln_ln_n: c.ln_ln_n,
            ki: match c.ki {
                KiSearch::Found(k) => Some(k),
                KiSearch::NotWithinHorizon(_) => None,
            },
            lg_n: c.lg_n,
            lg_lg_n: c.lg_lg_n,
            sigma_minus1: c.sigma_minus1,
            x: c.x,
            bound: c.bound,
            ln_ln_inverse_bound: c.inverse_bound,
        })?;
    }
    out.finish()
}

#[derive(Subcommand, Debug)]
pub enum TableCmd {
    /// Statistics of chosen CA numbers, one column per index.
    Table1 {
        #[arg(long, value_parser = parse_indices, default_value = "8,508,9,13,42,2386,143215")]
        indices: IndexList,
    },
    /// 𝒢/ℒ quotients relative to a base index.
    Table3 {
        #[arg(long, default_value_t = 8, value_parser = positive_usize)]
        base: usize,
        /// Rows as an inclusive range such as `8..42`.
        #[arg(long, value_parser = parse_indices, default_value = "8..42")]
        rows: IndexList,
    },
}

pub fn table(config: &RunConfig, cmd: &TableCmd) -> anyhow::Result<()> {
    let text = match cmd {
        TableCmd::Table1 { indices } => render_stats(&columns(config, &indices.0)?),
        TableCmd::Table3 { base, rows } => {
            let rows = &rows.0;
            let (first, last) = (rows[0], *rows.last().unwrap());
            let seq = sequence(config, last)?;
            render_gl_rows(&gl_rows(&seq, *base, first, last)?)
        }
    };
    let mut out = open(config.output.as_deref())?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct KiArgs {
    #[arg(long, value_parser = parse_indices)]
    pub indices: IndexList,
}

#[derive(Serialize)]
struct KiRow {
    index: usize,
    ki: Option<usize>,
    horizon: usize,
}

pub fn ki(config: &RunConfig, args: &KiArgs) -> anyhow::Result<()> {
    let indices = args.indices.0.clone();
    let seq = sequence(config, indices.iter().max().unwrap() + config.k_max)?;
    let mut out = RowWriter::new(config.format, open(config.output.as_deref())?);
    for &i in &indices {
        let ki = match find_ki(&seq, i, config.k_max)? {
            KiSearch::Found(k) => Some(k),
            KiSearch::NotWithinHorizon(_) => None,
        };
        out.write(&KiRow {
            index: i,
            ki,
            horizon: config.k_max,
        })?;
    }
    out.finish()
}

#[derive(Args, Debug)]
pub struct GlArgs {
    #[arg(long, value_parser = positive_usize)]
    pub base: usize,
    /// Window lengths 0..=max_k are emitted.
    #[arg(long)]
    pub max_k: usize,
}

pub fn gl(config: &RunConfig, args: &GlArgs) -> anyhow::Result<()> {
    let seq = sequence(config, args.base + args.max_k)?;
    let mut out = RowWriter::new(config.format, open(config.output.as_deref())?);
    for k in 0..=args.max_k {
        out.write(&gl_window(&seq, args.base, k)?)?;
    }
    out.finish()
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Last CA index to check.
    #[arg(long, env = "COLOSSAL_VERIFY_HORIZON", value_parser = positive_usize)]
    pub horizon: usize,
}

fn violation(seq: &CaSequence, i: usize, what: String) -> anyhow::Error {
    let r = &seq.records()[i - 1];
    VerificationFailed(format!(
        "{what} at index {i}: q = {}, v = {}, ε = {:e}, g = {}:{}, ln n = {}, ln σ₋₁ = {}, form = ({})",
        r.q, r.v, r.epsilon, r.g_num, r.g_den, r.stats.ln_n, r.stats.ln_sigma_minus1, r.form
    ))
    .into()
}

/// Per-record checks: ε strictly decreasing, superparticular steps,
/// `X < B` outside the excluded inputs, the one-step split identity and
/// Robin's inequality above the known failures.
pub fn verify(config: &RunConfig, args: &VerifyArgs) -> anyhow::Result<()> {
    let seq = sequence(config, args.horizon)?;
    let mut known = Vec::new();
    for i in 2..=args.horizon {
        let (prev, cur) = (seq.get(i - 1)?, seq.get(i)?);
        if cur.epsilon >= prev.epsilon {
            return Err(violation(
                &seq,
                i,
                format!(
                    "ε not decreasing ({:e} after {:e})",
                    cur.epsilon, prev.epsilon
                ),
            ));
        }
        if cur.g_num != cur.g_den + 1 {
            return Err(violation(&seq, i, "step ratio not superparticular".into()));
        }
        let x = x_value(&cur.stats)?;
        match unconditional_bound(&cur.stats) {
            Ok(b) if x >= b => return Err(violation(&seq, i, format!("X = {x} ≥ B = {b}"))),
            Ok(_) | Err(Error::ExcludedInput) => {}
            Err(e) => return Err(e.into()),
        }
        if i >= 3 {
            let xp = x_value(&prev.stats)?;
            let r = gl_window(&seq, i - 1, 1)?.r;
            let rel = (xp * r / x - 1.0).abs();
            if rel > 1e-9 {
                return Err(violation(&seq, i, format!("split identity off by {rel:e}")));
            }
        }
        if x >= E_GAMMA {
            if i > LAST_KNOWN_RIE_FAILURE {
                return Err(violation(
                    &seq,
                    i,
                    format!("Robin's inequality fails: X = {x} ≥ e^γ"),
                ));
            }
            known.push(i);
        }
    }
    let mut out = open(config.output.as_deref())?;
    let last = seq.get(args.horizon)?;
    writeln!(
        out,
        "verified indices 2..={} : all checks pass",
        args.horizon
    )?;
    writeln!(
        out,
        "known Robin failures (expected, i ≤ {LAST_KNOWN_RIE_FAILURE}): {known:?}"
    )?;
    writeln!(out, "final X = {:.10}", x_value(&last.stats)?)?;
    for i in [8, 9] {
        if i < args.horizon {
            let k = find_ki(&seq, i, config.k_max.min(args.horizon - i))?;
            writeln!(out, "k_{i} = {k}")?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// σ table bound; at most 10⁷.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(2..))]
    pub limit: u64,
}

pub fn oracle(config: &RunConfig, args: &OracleArgs) -> anyhow::Result<()> {
    let table = SigmaTable::build(args.limit)?;
    let sieve = config.sieve()?;
    let oracle_ca: Vec<u64> = brute_force_ca(&table).iter().map(|w| w.n).collect();
    let sa = brute_force_sa(&table);
    // enough records to pass the limit: n_i ≥ 2^i
    let seq = CaSequence::generate(&sieve, 64)?;
    let engine_ca: Vec<u64> = seq
        .records()
        .iter()
        .map_while(|r| {
            materialize(&r.form, args.limit as u128)
                .ok()
                .map(|n| n as u64)
        })
        .collect();
    let mut out = open(config.output.as_deref())?;
    writeln!(
        out,
        "superabundant up to {}: {} numbers",
        args.limit,
        sa.len()
    )?;
    writeln!(out, "oracle CA: {oracle_ca:?}")?;
    writeln!(out, "engine CA: {engine_ca:?}")?;
    if args.limit <= sieve.limit() {
        let m = mertens_residual(&sieve, args.limit)?;
        writeln!(
            out,
            "Mertens residual at {}: {m:.7} (B1 = {MERTENS_B1})",
            args.limit
        )?;
    }
    out.flush()?;
    if oracle_ca != engine_ca {
        return Err(VerificationFailed("engine and oracle CA lists differ".into()).into());
    }
    Ok(())
}
