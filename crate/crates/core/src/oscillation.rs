//! Geometry of the oscillation quotient
//!
//! `g(μ, ν) = μ (e^{b(μ+ν)} + δ e^{bν}) / (ν (e^{b(μ+ν)} − δ e^{bμ}))`
//!
//! on the open quadrant `μ, ν > 0`, its ε-functions, the angle shift Δφ, the
//! margin `M = {ν > μ} ∩ {g > 1}` and scans of prime pairs and CA log-log
//! pairs against that margin.
//!
//! Polar coordinates use `μ = r cos φ`, `ν = r sin φ`, so `φ = atan2(ν, μ)`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::engine::CaSequence;
use crate::error::{Error, Result};
use crate::primes::PrimeSieve;

/// Oscillation exponent `b` and half-amplitude `δ`.
///
/// Accepts `b ∈ (0, 1/2]` and `δ ∈ [0, 1]` so the oscillation-free limit
/// `δ = 0` and the boundary case `(b, δ) = (1/2, 1)` can be evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscParams {
    b: f64,
    delta: f64,
}

impl OscParams {
    pub fn new(b: f64, delta: f64) -> Result<Self> {
        if !(b > 0.0 && b <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "b must lie in (0, 1/2], got {b}"
            )));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidArgument(format!(
                "δ must lie in [0, 1], got {delta}"
            )));
        }
        Ok(OscParams { b, delta })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    pub r: f64,
    pub phi: f64,
}

impl PolarPoint {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !(r > 0.0) || !(phi > 0.0 && phi < FRAC_PI_2) {
            return Err(Error::InvalidArgument(format!(
                "polar point needs r > 0 and φ in (0, π/2), got ({r}, {phi})"
            )));
        }
        Ok(PolarPoint { r, phi })
    }

    pub fn from_cartesian(mu: f64, nu: f64) -> Result<Self> {
        PolarPoint::new(mu.hypot(nu), nu.atan2(mu))
    }

    pub fn mu(&self) -> f64 {
        self.r * self.phi.cos()
    }

    pub fn nu(&self) -> f64 {
        self.r * self.phi.sin()
    }
}

fn check_point(p: &OscParams, mu: f64, nu: f64) -> Result<f64> {
    if !(mu > 0.0 && nu > 0.0) {
        return Err(Error::Domain(format!(
            "(μ, ν) = ({mu}, {nu}) is outside the open quadrant"
        )));
    }
    let denom = (p.b * nu).exp() - p.delta;
    if !(denom > 0.0) {
        return Err(Error::Singularity(format!(
            "e^(bν) − δ = {denom} at ν = {nu}"
        )));
    }
    Ok(denom)
}

/// `g(μ, ν)` in factored form `(μ/ν) (1 + δ e^{−bμ}) e^{bν} / (e^{bν} − δ)`.
pub fn osc_g(p: &OscParams, mu: f64, nu: f64) -> Result<f64> {
    let denom = check_point(p, mu, nu)?;
    Ok(mu / nu * (1.0 + p.delta * (-p.b * mu).exp()) * (p.b * nu).exp() / denom)
}

/// `g(μ, ν)` evaluated literally from the defining quotient.
pub fn osc_g_raw(p: &OscParams, mu: f64, nu: f64) -> Result<f64> {
    check_point(p, mu, nu)?;
    let both = (p.b * (mu + nu)).exp();
    let num = mu * (both + p.delta * (p.b * nu).exp());
    let den = nu * (both - p.delta * (p.b * mu).exp());
    if !(den > 0.0) {
        return Err(Error::Singularity(format!("raw denominator {den}")));
    }
    Ok(num / den)
}

/// `ε_{μ,ν} = ln((1 + δ e^{−bμ}) / (1 − δ e^{−bν}))`.
pub fn eps_mu_nu(p: &OscParams, mu: f64, nu: f64) -> Result<f64> {
    let lower = 1.0 - p.delta * (-p.b * nu).exp();
    if !(lower > 0.0) {
        return Err(Error::Singularity(format!(
            "1 − δ e^(−bν) = {lower} at ν = {nu}"
        )));
    }
    Ok((p.delta * (-p.b * mu).exp()).ln_1p() - (-p.delta * (-p.b * nu).exp()).ln_1p())
}

/// `ε_∞ = ln((1 + δ) / (1 − δ)) = 2 artanh δ`.
pub fn eps_infinity(p: &OscParams) -> Result<f64> {
    if p.delta >= 1.0 {
        return Err(Error::Singularity("ε_∞ diverges at δ = 1".into()));
    }
    Ok(2.0 * p.delta.atanh())
}

/// `ε_{r,φ}`, the ε-function in polar coordinates.
pub fn eps_polar(p: &OscParams, pt: PolarPoint) -> Result<f64> {
    eps_mu_nu(p, pt.mu(), pt.nu())
}

/// `(g(r cos φ, r sin φ), e^{ε_{r,φ}} · cot φ)`; the two agree.
pub fn polar_identity_check(p: &OscParams, pt: PolarPoint) -> Result<(f64, f64)> {
    let lhs = osc_g(p, pt.mu(), pt.nu())?;
    let rhs = eps_polar(p, pt)?.exp() / pt.phi.tan();
    Ok((lhs, rhs))
}

/// Analytic `(∂g/∂μ, ∂g/∂ν)`.
pub fn osc_gradient(p: &OscParams, mu: f64, nu: f64) -> Result<(f64, f64)> {
    let denom = check_point(p, mu, nu)?;
    let damp = p.delta * (-p.b * mu).exp();
    let scale = (p.b * nu).exp() / denom / nu;
    let d_mu = scale * (1.0 + (1.0 - mu * p.b) * damp);
    let d_nu = scale * (-mu * (1.0 / nu + p.b * p.delta / denom) * (1.0 + damp));
    Ok((d_mu, d_nu))
}

/// arccot with values in `(0, π)`.
fn arccot(y: f64) -> f64 {
    1f64.atan2(y)
}

/// `Δφ(x, φ) = arccot(x cot φ) − φ`, so that `cot(φ + Δφ) = x cot φ`.
pub fn delta_phi(x: f64, phi: f64) -> f64 {
    arccot(x / phi.tan()) - phi
}

/// `∂Δφ/∂φ = x csc²φ / (x² cot²φ + 1) − 1`.
pub fn delta_phi_dphi(x: f64, phi: f64) -> f64 {
    let cot = 1.0 / phi.tan();
    let csc = 1.0 / phi.sin();
    x * csc * csc / (x * x * cot * cot + 1.0) - 1.0
}

/// `ν > μ` and `g(μ, ν) > 1`.
pub fn in_margin(p: &OscParams, mu: f64, nu: f64) -> Result<bool> {
    let g = osc_g(p, mu, nu)?;
    Ok(nu > mu && g > 1.0)
}

/// Margin membership through the angle: `φ > π/4` and `tan φ < e^{ε_{r,φ}}`.
pub fn in_margin_tangent(p: &OscParams, mu: f64, nu: f64) -> Result<bool> {
    check_point(p, mu, nu)?;
    let eps = eps_mu_nu(p, mu, nu)?;
    Ok(nu > mu && nu / mu < eps.exp())
}

/// Direction of the level-1 asymptote, `π/4 + Δφ(e^{−ε_∞}, π/4) = atan(e^{ε_∞})`.
///
/// Measured from the μ axis.
pub fn asymptote_angle(p: &OscParams) -> Result<f64> {
    Ok(FRAC_PI_4 + delta_phi((-eps_infinity(p)?).exp(), FRAC_PI_4))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginScan {
    /// 0-based sieve positions `n` with `(p_n, p_{n+1}) ∈ M`.
    pub hits: Vec<usize>,
    /// `(n, atan(p_{n+1}/p_n) − π/4)` each time the running minimum drops.
    pub angle_minima: Vec<(usize, f64)>,
    pub pairs_scanned: usize,
}

/// Tests `max_pairs` consecutive prime pairs from `start_index` against the margin.
pub fn prime_pair_margin_scan(
    p: &OscParams,
    sieve: &PrimeSieve,
    start_index: usize,
    max_pairs: usize,
) -> Result<MarginScan> {
    let end = start_index + max_pairs;
    if end >= sieve.len() {
        return Err(Error::SieveExhausted {
            after: sieve.primes().last().copied().unwrap_or(0),
            limit: sieve.limit(),
        });
    }
    let mut hits = Vec::new();
    let mut angle_minima = Vec::new();
    let mut best = f64::INFINITY;
    for n in start_index..end {
        let (a, c) = (sieve.prime(n) as f64, sieve.prime(n + 1) as f64);
        if in_margin(p, a, c)? {
            hits.push(n);
        }
        let excess = c.atan2(a) - FRAC_PI_4;
        if excess < best {
            best = excess;
            angle_minima.push((n, excess));
        }
    }
    Ok(MarginScan {
        hits,
        angle_minima,
        pairs_scanned: max_pairs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EligibleStep {
    pub k: usize,
    /// `λ_i(k) = ln ln n_{i+k}`.
    pub lambda: f64,
    pub lambda_next: f64,
    pub g: f64,
    pub in_margin: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EligibleScan {
    pub hit: Option<usize>,
    pub trace: Vec<EligibleStep>,
}

/// First `k ≤ max_k` with `(λ_i(k), λ_i(k+1)) ∈ M`, with the full trace up to it.
pub fn eligible_point_scan(
    p: &OscParams,
    seq: &CaSequence,
    i: usize,
    max_k: usize,
) -> Result<EligibleScan> {
    if i == 0 {
        return Err(Error::InvalidArgument("indices start at 1".into()));
    }
    if i + max_k + 1 > seq.last_index() {
        return Err(Error::InsufficientData(i + max_k + 1));
    }
    let mut trace = Vec::new();
    for k in 0..=max_k {
        let lambda = seq.get(i + k)?.stats.ln_ln_n;
        let lambda_next = seq.get(i + k + 1)?.stats.ln_ln_n;
        let g = osc_g(p, lambda, lambda_next)?;
        let hit = lambda_next > lambda && g > 1.0;
        trace.push(EligibleStep {
            k,
            lambda,
            lambda_next,
            g,
            in_margin: hit,
        });
        if hit {
            return Ok(EligibleScan {
                hit: Some(k),
                trace,
            });
        }
    }
    Ok(EligibleScan { hit: None, trace })
}

/// A rectangular sampling grid over the (μ, ν) quadrant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub mu_min: f64,
    pub mu_max: f64,
    pub nu_min: f64,
    pub nu_max: f64,
    /// Number of cells along each axis.
    pub cells_mu: usize,
    pub cells_nu: usize,
}

impl Grid {
    pub fn square(lo: f64, hi: f64, cells: usize) -> Self {
        Grid {
            mu_min: lo,
            mu_max: hi,
            nu_min: lo,
            nu_max: hi,
            cells_mu: cells,
            cells_nu: cells,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.cells_mu == 0 || self.cells_nu == 0 {
            return Err(Error::InvalidArgument(
                "grid needs at least one cell per axis".into(),
            ));
        }
        if !(self.mu_min > 0.0 && self.nu_min > 0.0)
            || !(self.mu_max > self.mu_min && self.nu_max > self.nu_min)
        {
            return Err(Error::InvalidArgument(
                "grid must be a nonempty rectangle in μ, ν > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn mu_at(&self, i: usize) -> f64 {
        self.mu_min + (self.mu_max - self.mu_min) * i as f64 / self.cells_mu as f64
    }

    pub fn nu_at(&self, j: usize) -> f64 {
        self.nu_min + (self.nu_max - self.nu_min) * j as f64 / self.cells_nu as f64
    }

    /// Largest cell side.
    pub fn spacing(&self) -> f64 {
        ((self.mu_max - self.mu_min) / self.cells_mu as f64)
            .max((self.nu_max - self.nu_min) / self.cells_nu as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourLevel {
    pub level: f64,
    /// Each polyline is a list of `(μ, ν)` vertices.
    pub polylines: Vec<Vec<(f64, f64)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourData {
    pub grid: Grid,
    pub levels: Vec<ContourLevel>,
    /// Cells skipped because a corner is singular.
    pub masked_cells: usize,
    /// Direction of the level-1 asymptote, if ε_∞ is finite.
    pub asymptote_angle: Option<f64>,
}

/// Edge key: `(i, j, 0)` is the horizontal edge from node (i, j) to (i+1, j),
/// `(i, j, 1)` the vertical edge from (i, j) to (i, j+1).
type EdgeKey = (usize, usize, u8);

/// Marching-squares level sets of `g` on `grid`.
pub fn contour_data(p: &OscParams, grid: Grid, levels: &[f64]) -> Result<ContourData> {
    grid.validate()?;
    let (nx, ny) = (grid.cells_mu + 1, grid.cells_nu + 1);
    let mut values = vec![f64::NAN; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            if let Ok(g) = osc_g(p, grid.mu_at(i), grid.nu_at(j)) {
                values[j * nx + i] = g;
            }
        }
    }
    let at = |i: usize, j: usize| values[j * nx + i];
    let masked_cells = (0..grid.cells_nu)
        .flat_map(|j| (0..grid.cells_mu).map(move |i| (i, j)))
        .filter(|&(i, j)| {
            [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)]
                .iter()
                .any(|v| v.is_nan())
        })
        .count();

    let mut out = Vec::with_capacity(levels.len());
    for &level in levels {
        let point_on = |e: EdgeKey| -> (f64, f64) {
            let (i, j, dir) = e;
            let (a, b, (i2, j2)) = if dir == 0 {
                (at(i, j), at(i + 1, j), (i + 1, j))
            } else {
                (at(i, j), at(i, j + 1), (i, j + 1))
            };
            let t = (level - a) / (b - a);
            let (x0, y0) = (grid.mu_at(i), grid.nu_at(j));
            let (x1, y1) = (grid.mu_at(i2), grid.nu_at(j2));
            (x0 + t * (x1 - x0), y0 + t * (y1 - y0))
        };
        let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
        for j in 0..grid.cells_nu {
            for i in 0..grid.cells_mu {
                let c = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
                if c.iter().any(|v| v.is_nan()) {
                    continue;
                }
                // corners counter-clockwise from bottom-left; edges bottom, right, top, left
                let edges: [EdgeKey; 4] = [(i, j, 0), (i + 1, j, 1), (i, j + 1, 0), (i, j, 1)];
                let above: Vec<bool> = c.iter().map(|&v| v >= level).collect();
                let crossing: Vec<usize> =
                    (0..4).filter(|&e| above[e] != above[(e + 1) % 4]).collect();
                match crossing.len() {
                    2 => segments.push((edges[crossing[0]], edges[crossing[1]])),
                    4 => {
                        let centre = c.iter().sum::<f64>() / 4.0;
                        // pair each crossing with the neighbour that keeps the centre's side connected
                        if (centre >= level) == above[0] {
                            segments.push((edges[0], edges[1]));
                            segments.push((edges[2], edges[3]));
                        } else {
                            segments.push((edges[3], edges[0]));
                            segments.push((edges[1], edges[2]));
                        }
                    }
                    _ => {}
                }
            }
        }
        let polylines = stitch(&segments)
            .into_iter()
            .map(|chain| chain.into_iter().map(point_on).collect())
            .collect();
        out.push(ContourLevel { level, polylines });
    }
    Ok(ContourData {
        grid,
        levels: out,
        masked_cells,
        asymptote_angle: asymptote_angle(p).ok(),
    })
}

/// Joins segments sharing an edge into maximal chains.
fn stitch(segments: &[(EdgeKey, EdgeKey)]) -> Vec<Vec<EdgeKey>> {
    let mut by_edge: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        by_edge.entry(a).or_default().push(s);
        by_edge.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let next_from = |edge: EdgeKey, used: &[bool]| -> Option<usize> {
        by_edge[&edge].iter().copied().find(|&s| !used[s])
    };
    let mut chains = Vec::new();
    // open chains start at edges touched by a single segment
    let mut starts: Vec<usize> = (0..segments.len())
        .filter(|&s| {
            let (a, b) = segments[s];
            by_edge[&a].len() == 1 || by_edge[&b].len() == 1
        })
        .collect();
    starts.extend(0..segments.len());
    for s0 in starts {
        if used[s0] {
            continue;
        }
        used[s0] = true;
        let (a, b) = segments[s0];
        let (first, mut tail) = if by_edge[&a].len() == 1 {
            (a, b)
        } else {
            (b, a)
        };
        let mut chain = vec![first, tail];
        while let Some(s) = next_from(tail, &used) {
            used[s] = true;
            let (x, y) = segments[s];
            tail = if x == tail { y } else { x };
            chain.push(tail);
        }
        chains.push(chain);
    }
    chains
}

/// One Δφ curve (or its φ-derivative) sampled over `φ ∈ (0, π/2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaPhiCurve {
    pub x: f64,
    pub derivative: bool,
    pub points: Vec<(f64, f64)>,
}

/// The family `x = i/8`, `i = 4..=12`: nine Δφ curves followed by nine derivative curves.
pub fn delta_phi_family(samples: usize) -> Vec<DeltaPhiCurve> {
    let phis: Vec<f64> = (1..=samples)
        .map(|s| FRAC_PI_2 * s as f64 / (samples + 1) as f64)
        .collect();
    let xs: Vec<f64> = (4..=12).map(|i| i as f64 / 8.0).collect();
    let mut curves: Vec<DeltaPhiCurve> = xs
        .iter()
        .map(|&x| DeltaPhiCurve {
            x,
            derivative: false,
            points: phis.iter().map(|&f| (f, delta_phi(x, f))).collect(),
        })
        .collect();
    curves.extend(xs.iter().map(|&x| DeltaPhiCurve {
        x,
        derivative: true,
        points: phis.iter().map(|&f| (f, delta_phi_dphi(x, f))).collect(),
    }));
    curves
}
