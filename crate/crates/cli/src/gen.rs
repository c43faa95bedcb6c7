use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use serde::Serialize;

use colossal::engine::prefix_records;
use colossal::factored::materialize;
use colossal::robin::x_value;
use colossal::{generate, CaRecord, CaState, Checkpoint, PrimeSieve};

use crate::output::{open, RowWriter};
use crate::{positive_usize, RunConfig};

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Number of engine steps to run.
    #[arg(long, env = "COLOSSAL_COUNT", value_parser = positive_usize)]
    pub count: usize,

    /// Checkpoint file, rewritten every `--checkpoint-every` steps and at the end.
    #[arg(long, env = "COLOSSAL_CHECKPOINT")]
    pub checkpoint: Option<PathBuf>,

    #[arg(long, env = "COLOSSAL_CHECKPOINT_EVERY", default_value_t = 10_000, value_parser = positive_usize)]
    pub checkpoint_every: usize,

    /// Continue from a checkpoint instead of the seed n_4 = 60.
    #[arg(long, env = "COLOSSAL_RESUME")]
    pub resume: Option<PathBuf>,

    /// Also emit n_1 = 2 through n_4 = 60 before the first step.
    #[arg(long, conflicts_with = "resume")]
    pub include_prefix: bool,
}

#[derive(Serialize)]
struct GenRow {
    index: usize,
    q: u64,
    v: u32,
    eps: f64,
    g_num: u128,
    g_den: u128,
    ln_n: f64,
    ln_ln_n: f64,
    ln_sigma: f64,
    #[serde(rename = "X")]
    x: Option<f64>,
    n: Option<u128>,
    form: String,
}

fn row(r: &CaRecord, bound: u128) -> GenRow {
    GenRow {
        index: r.index,
        q: r.q,
        v: r.v,
        eps: r.epsilon,
        g_num: r.g_num,
        g_den: r.g_den,
        ln_n: r.stats.ln_n,
        ln_ln_n: r.stats.ln_ln_n,
        ln_sigma: r.stats.ln_sigma_minus1,
        x: x_value(&r.stats).ok(),
        n: materialize(&r.form, bound).ok(),
        form: r.form.to_string(),
    }
}

/// Writes through a sibling temp file so a crash never leaves a torn checkpoint.
fn write_checkpoint(path: &Path, state: &CaState, sieve: &PrimeSieve) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, state.checkpoint(sieve).to_json())
        .with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

pub fn run(config: &RunConfig, args: &GenArgs) -> anyhow::Result<()> {
    let sieve = config.sieve()?;
    let mut state = match &args.resume {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Checkpoint::from_json(&text)?.restore(&sieve)?
        }
        None => CaState::seed(&sieve)?,
    };
    let mut out = RowWriter::new(config.format, open(config.output.as_deref())?);
    if args.include_prefix {
        for r in prefix_records(&sieve)? {
            out.write(&row(&r, config.materialize_bound))?;
        }
    }
    let mut remaining = args.count;
    while remaining > 0 {
        let batch = match &args.checkpoint {
            Some(_) => remaining.min(args.checkpoint_every),
            None => remaining,
        };
        let mut write_err = None;
        let stepped = generate(&mut state, batch, &sieve, |r| {
            out.write(&row(r, config.materialize_bound)).map_err(|e| {
                write_err = Some(e);
                colossal::Error::Resource("output stream failed".into())
            })
        });
        if let Some(e) = write_err {
            return Err(e);
        }
        stepped?;
        remaining -= batch;
        if let Some(path) = &args.checkpoint {
            write_checkpoint(path, &state, &sieve)?;
        }
    }
    out.finish()
}
