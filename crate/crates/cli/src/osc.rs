use clap::{Args, Subcommand};
use serde::Serialize;

use colossal::oscillation::{
    contour_data, delta_phi_family, eligible_point_scan, in_margin, osc_g, prime_pair_margin_scan,
    Grid,
};
use colossal::{CaSequence, OscParams};

use crate::output::{open, RowWriter};
use crate::{positive_usize, RunConfig};

#[derive(Args, Debug, Clone, Copy)]
pub struct ParamArgs {
    /// Decay rate b in (0, 1/2].
    #[arg(long, env = "COLOSSAL_OSC_B", default_value_t = 0.5)]
    pub b: f64,
    /// Oscillation amplitude δ in [0, 1].
    #[arg(long, env = "COLOSSAL_OSC_DELTA", default_value_t = 0.5)]
    pub delta: f64,
}

impl ParamArgs {
    fn params(&self) -> colossal::Result<OscParams> {
        OscParams::new(self.b, self.delta)
    }
}

#[derive(Subcommand, Debug)]
pub enum OscCmd {
    /// g(μ, ν) at one point.
    Eval {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        nu: f64,
    },
    /// Level sets of g as polylines.
    Contour {
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated contour levels.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        levels: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        lo: f64,
        #[arg(long, default_value_t = 10.0)]
        hi: f64,
        /// Grid cells per axis.
        #[arg(long, default_value_t = 200, value_parser = positive_usize)]
        cells: usize,
    },
    /// First eligible point (ln ln n_{i+k}, ln ln n_{i+k+1}) in the margin.
    MarginScan {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_parser = positive_usize)]
        index: usize,
    },
    /// Consecutive prime pairs (p_n, p_{n+1}) tested against the margin.
    PrimeScan {
        #[command(flatten)]
        params: ParamArgs,
        /// 0-based position of the first prime.
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[arg(long, default_value_t = 10_000, value_parser = positive_usize)]
        pairs: usize,
    },
    /// Δφ(x, φ) and ∂Δφ/∂φ for x = 4/8, …, 12/8.
    Deltaphi {
        #[arg(long, default_value_t = 200, value_parser = positive_usize)]
        samples: usize,
    },
}

#[derive(Serialize)]
struct EvalRow {
    mu: f64,
    nu: f64,
    g: f64,
    in_margin: bool,
}

#[derive(Serialize)]
struct ContourRow {
    level: f64,
    polyline: usize,
    vertex: usize,
    mu: f64,
    nu: f64,
}

#[derive(Serialize)]
struct PrimeRow {
    kind: &'static str,
    n: usize,
    p: u64,
    p_next: u64,
    angle_excess: f64,
}

#[derive(Serialize)]
struct CurveRow {
    x: f64,
    derivative: bool,
    phi: f64,
    value: f64,
}

pub fn run(config: &RunConfig, cmd: &OscCmd) -> anyhow::Result<()> {
    let mut out = RowWriter::new(config.format, open(config.output.as_deref())?);
    match cmd {
        OscCmd::Eval { params, mu, nu } => {
            let p = params.params()?;
            out.write(&EvalRow {
                mu: *mu,
                nu: *nu,
                g: osc_g(&p, *mu, *nu)?,
                in_margin: in_margin(&p, *mu, *nu)?,
            })?;
        }
        OscCmd::Contour {
            params,
            levels,
            lo,
            hi,
            cells,
        } => {
            let data = contour_data(&params.params()?, Grid::square(*lo, *hi, *cells), levels)?;
            for level in &data.levels {
                for (k, line) in level.polylines.iter().enumerate() {
                    for (v, &(mu, nu)) in line.iter().enumerate() {
                        out.write(&ContourRow {
                            level: level.level,
                            polyline: k,
                            vertex: v,
                            mu,
                            nu,
                        })?;
                    }
                }
            }
            if data.masked_cells > 0 {
                eprintln!("{} grid cells masked at singular points", data.masked_cells);
            }
        }
        OscCmd::MarginScan { params, index } => {
            let seq = CaSequence::generate(&config.sieve()?, index + config.k_max + 1)?;
            let scan = eligible_point_scan(&params.params()?, &seq, *index, config.k_max)?;
            for step in &scan.trace {
                out.write(step)?;
            }
            match scan.hit {
                Some(k) => eprintln!("first eligible point in the margin at k = {k}"),
                None => eprintln!(
                    "no eligible point in the margin within k ≤ {}",
                    config.k_max
                ),
            }
        }
        OscCmd::PrimeScan {
            params,
            start,
            pairs,
        } => {
            let sieve = config.sieve()?;
            let scan = prime_pair_margin_scan(&params.params()?, &sieve, *start, *pairs)?;
            let pair = |n: usize| (sieve.prime(n), sieve.prime(n + 1));
            for &n in &scan.hits {
                let (p, p_next) = pair(n);
                let angle_excess = (p_next as f64).atan2(p as f64) - std::f64::consts::FRAC_PI_4;
                out.write(&PrimeRow {
                    kind: "hit",
                    n,
                    p,
                    p_next,
                    angle_excess,
                })?;
            }
            for &(n, angle_excess) in &scan.angle_minima {
                let (p, p_next) = pair(n);
                out.write(&PrimeRow {
                    kind: "angle_min",
                    n,
                    p,
                    p_next,
                    angle_excess,
                })?;
            }
            eprintln!(
                "{} of {} pairs in the margin",
                scan.hits.len(),
                scan.pairs_scanned
            );
        }
        OscCmd::Deltaphi { samples } => {
            for curve in delta_phi_family(*samples) {
                for &(phi, value) in &curve.points {
                    out.write(&CurveRow {
                        x: curve.x,
                        derivative: curve.derivative,
                        phi,
                        value,
                    })?;
                }
            }
        }
    }
    out.finish()
}
