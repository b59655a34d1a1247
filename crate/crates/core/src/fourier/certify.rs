//! Batteries that certify the two smoothing bounds row by row.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::density::{c1_bound_check, C1Density};
use super::quadrature::gl16;
use super::smoothing::{scaled_sq_integral, smoothing_rhs, SmoothingParams};
use super::transform::AdicTransform;
use crate::error::{Error, Result};
use crate::measure::{AdicMeasure, MeasureGen};
use crate::seed::{self, stream};

/// Slack allowed on every certified inequality.
pub const CERT_SLACK: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct C1Row {
    pub density_id: String,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub ok: bool,
}

/// The frequencies `±1, ±2, ±5, ±10, ±100`.
pub fn default_c1_frequencies() -> Vec<f64> {
    [1.0, 2.0, 5.0, 10.0, 100.0].iter().flat_map(|&t| [t, -t]).collect()
}

pub fn certify_c1(densities: &[C1Density], ts: &[f64]) -> Result<Vec<C1Row>> {
    let mut rows = Vec::with_capacity(densities.len() * ts.len());
    for f in densities {
        for &t in ts {
            let c = c1_bound_check(f, t)?;
            rows.push(C1Row {
                density_id: f.id(),
                t,
                lhs: c.lhs,
                rhs: c.rhs,
                margin: c.rhs - c.lhs,
                ok: c.lhs <= c.rhs + CERT_SLACK,
            });
        }
    }
    Ok(rows)
}

/// A measure of the smoothing battery.
#[derive(Clone, Debug)]
pub struct CertMeasure {
    pub id: String,
    pub transform: AdicTransform,
}

impl CertMeasure {
    pub fn from_generator(id: impl Into<String>, gen: &MeasureGen, level: usize) -> Result<Self> {
        Ok(CertMeasure { id: id.into(), transform: AdicTransform::from_generator(gen, None, level)? })
    }
}

/// Uniform, Cantor, the two-state Markov example and a random Bernoulli law
/// in base 3 (drawn from `seed`), each deep enough for `r = 3^{−6}`.
pub fn default_measures(seed: u64) -> Result<Vec<CertMeasure>> {
    let mut rng = seed::unit_rng(seed, stream::BATTERY, 0);
    let raw: Vec<f64> = (0..3).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|x| x / total).collect();
    p[2] = 1.0 - p[0] - p[1];
    Ok(vec![
        CertMeasure::from_generator("uniform2", &MeasureGen::uniform(2)?, 14)?,
        CertMeasure::from_generator("cantor3", &MeasureGen::cantor(), 9)?,
        CertMeasure::from_generator("markov2", &MeasureGen::markov(vec![vec![0.9, 0.1], vec![0.5, 0.5]])?, 14)?,
        CertMeasure::from_generator("bernoulli3", &MeasureGen::bernoulli(p)?, 9)?,
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothingGrid {
    pub ms: Vec<i64>,
    pub bs: Vec<f64>,
    pub rs: Vec<f64>,
}

impl Default for SmoothingGrid {
    /// `m ∈ {±1..±8}`, `b ∈ {2, 10, e}`, `r ∈ {3^{−j} : j = 1..6}`.
    fn default() -> Self {
        SmoothingGrid {
            ms: (1..=8).flat_map(|m| [m, -m]).collect(),
            bs: vec![2.0, 10.0, std::f64::consts::E],
            rs: (1..=6).map(|j| 3f64.powi(-j)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothingRow {
    pub measure_id: String,
    pub m: i64,
    pub b: f64,
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothingReport {
    pub rows: Vec<SmoothingRow>,
    /// `(measure, r)` pairs dropped by the resolution guard.
    pub skipped: usize,
}

impl SmoothingReport {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }
}

/// Every `(measure, m, b, r)` row: the square-integral against the bound.
/// The left side does not depend on `r` and is computed once per
/// `(measure, m, b)`.
pub fn certify_smoothing(measures: &[CertMeasure], grid: &SmoothingGrid) -> Result<SmoothingReport> {
    let jobs: Vec<(usize, i64, f64)> = measures
        .iter()
        .enumerate()
        .flat_map(|(i, _)| grid.ms.iter().flat_map(move |&m| grid.bs.iter().map(move |&b| (i, m, b))))
        .collect();
    let lhs: Vec<f64> = jobs
        .par_iter()
        .map(|&(i, m, b)| {
            let p = SmoothingParams::new(b, m, 1.0)?;
            Ok(scaled_sq_integral(&measures[i].transform, &p)?.value)
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut skipped = 0;
    for (&(i, m, b), &lhs) in jobs.iter().zip(&lhs) {
        for &r in &grid.rs {
            let p = SmoothingParams::new(b, m, r)?;
            let rhs = match smoothing_rhs(&measures[i].transform, &p) {
                Ok(v) => v,
                Err(Error::Resolution(_)) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            rows.push(SmoothingRow {
                measure_id: measures[i].id.clone(),
                m,
                b,
                r,
                lhs,
                rhs,
                margin: rhs - lhs,
                ok: lhs <= rhs + CERT_SLACK,
            });
        }
    }
    Ok(SmoothingReport { rows, skipped })
}

/// `∫₀¹ cos(2π c b^t) dt` to near machine precision.
fn scaled_cos_integral(c: f64, b: f64) -> f64 {
    let ln_b = b.ln();
    let f = |t: f64| (std::f64::consts::TAU * c * (t * ln_b).exp()).cos();
    let panels = (c.abs() * (b - 1.0)).ceil() as usize + 1;
    (0..panels).map(|i| gl16(&f, i as f64 / panels as f64, (i + 1) as f64 / panels as f64)).sum()
}

fn sample_point<R: Rng + ?Sized>(mu: &AdicMeasure, atoms: &WeightedIndex<f64>, rng: &mut R) -> f64 {
    let k = atoms.sample(rng);
    (k as f64 + rng.random::<f64>()) * mu.atom_width()
}

/// Monte Carlo estimate of `∫₀¹ |μ̂(m b^t)|² dt = E ∫₀¹ e(m b^t (Y − Y′)) dt`
/// over independent pairs `Y, Y′ ~ μ`: `(mean, standard error)`.
///
/// Pairs are drawn in fixed chunks with counter-derived seeds.
pub fn mc_scaled_sq(mu: &AdicMeasure, b: f64, m: i64, pairs: usize, master: u64, row: u64) -> Result<(f64, f64)> {
    const CHUNK: usize = 4096;
    if pairs < 2 {
        return Err(Error::input("need at least two Monte Carlo pairs"));
    }
    let atoms = WeightedIndex::new(mu.weights()).map_err(|e| Error::input(format!("measure weights: {e}")))?;
    let chunks = pairs.div_ceil(CHUNK);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seed::unit_rng(master, stream::ORACLE, (row << 32) | c as u64);
            let n = CHUNK.min(pairs - c * CHUNK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let y = sample_point(mu, &atoms, &mut rng);
                let y2 = sample_point(mu, &atoms, &mut rng);
                let g = scaled_cos_integral(m as f64 * (y - y2), b);
                s += g;
                s2 += g * g;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    let n = pairs as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McCheck {
    pub measure_id: String,
    pub m: i64,
    pub b: f64,
    pub lhs: f64,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub z: f64,
    pub ok: bool,
}

/// Cross-check `count` randomly chosen `(measure, m, b)` square-integrals
/// against the Monte Carlo oracle; a row passes within 3 standard errors.
pub fn mc_cross_check(measures: &[CertMeasure], grid: &SmoothingGrid, count: usize, pairs: usize, master: u64) -> Result<Vec<McCheck>> {
    let mut rng = seed::unit_rng(master, stream::ORACLE, u64::MAX);
    let mut out = Vec::with_capacity(count);
    for row in 0..count {
        let i = rng.random_range(0..measures.len());
        let m = grid.ms[rng.random_range(0..grid.ms.len())];
        let b = grid.bs[rng.random_range(0..grid.bs.len())];
        let lhs = scaled_sq_integral(&measures[i].transform, &SmoothingParams::new(b, m, 1.0)?)?.value;
        let (mc_mean, mc_se) = mc_scaled_sq(measures[i].transform.measure(), b, m, pairs, master, row as u64)?;
        let z = (lhs - mc_mean) / mc_se;
        out.push(McCheck { measure_id: measures[i].id.clone(), m, b, lhs, mc_mean, mc_se, z, ok: z.abs() <= 3.0 });
    }
    Ok(out)
}
