use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::proof_chain::refuse_zero_entropy;
use super::weyl::weyl_sum;
use crate::adic::{multiplicatively_dependent, PrecisionBudget, UnitPoint};
use crate::e;
use crate::error::{Error, Result};
use crate::fourier::ft_adic;
use crate::measure::MeasureGen;
use crate::seed::{self, stream};
use crate::stats;

/// Level of the transform oracle for dependent-pair controls.
pub const ORACLE_LEVEL: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HostExperimentConfig {
    pub gen: MeasureGen,
    pub b: u64,
    pub samples: usize,
    pub freqs: Vec<i64>,
    /// Sorted checkpoints; the last one is the orbit length.
    pub checkpoints: Vec<usize>,
    /// `T_a^k` burn-in applied to each sampled point.
    pub k: usize,
    pub seed: u64,
    /// Guard digits beyond the precision budget.
    pub guard: usize,
}

impl HostExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.b < 2 {
            return Err(Error::input(format!("b must be at least 2, got {}", self.b)));
        }
        if self.samples == 0 {
            return Err(Error::input("need at least one sample"));
        }
        if self.freqs.is_empty() || self.freqs.contains(&0) {
            return Err(Error::input("frequencies must be a nonempty set of nonzero integers"));
        }
        if self.checkpoints.is_empty() || self.checkpoints.contains(&0) {
            return Err(Error::input("checkpoints must be positive"));
        }
        refuse_zero_entropy(&self.gen)
    }

    pub fn n_max(&self) -> usize {
        self.checkpoints.iter().copied().max().unwrap_or(0)
    }

    pub fn budget(&self) -> Result<PrecisionBudget> {
        PrecisionBudget::new(self.gen.base(), self.b, self.n_max(), self.guard)
    }
}

/// One `W_N(m)` of one sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylRow {
    pub sample: usize,
    pub m: i64,
    pub n: usize,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

/// Percentiles of `|W_N(m)|` across samples, with the oracle deviation for
/// dependent pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylSummary {
    pub m: i64,
    pub n: usize,
    pub median: f64,
    pub p90: f64,
    /// `μ̂(m)` when `b` is a power of `a` (then `W_N(m) → μ̂(m)`).
    pub oracle: Option<Complex64>,
    /// Median of `|W_N(m) − μ̂(m)|`.
    pub oracle_median_dev: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HostReport {
    pub a: u32,
    pub b: u64,
    pub precision: usize,
    /// `"negative_control"` for multiplicatively dependent `a, b`.
    pub label: Option<String>,
    pub rows: Vec<WeylRow>,
    pub summary: Vec<WeylSummary>,
    pub seeds: Vec<u64>,
}

impl HostReport {
    pub fn summary_at(&self, m: i64, n: usize) -> Option<&WeylSummary> {
        self.summary.iter().find(|s| s.m == m && s.n == n)
    }

    /// Medians of `|W_N(m)|` strictly decrease along the checkpoints.
    pub fn medians_decrease(&self, m: i64) -> bool {
        let meds: Vec<f64> = self.summary.iter().filter(|s| s.m == m).map(|s| s.median).collect();
        meds.windows(2).all(|w| w[1] < w[0])
    }
}

/// `b = a^j` for some `j ≥ 1`.
fn power_of(a: u64, b: u64) -> bool {
    let mut p = a;
    while p < b {
        p = match p.checked_mul(a) {
            Some(q) => q,
            None => return false,
        };
    }
    p == b
}

/// Weyl sums along `×b` orbits of `T_a^k x` for `x ~ μ`, one point per
/// sample.
pub fn host_experiment(cfg: &HostExperimentConfig) -> Result<HostReport> {
    cfg.validate()?;
    let a = cfg.gen.base();
    let budget = cfg.budget()?;
    let dependent = multiplicatively_dependent(a as u64, cfg.b);
    let mut checkpoints = cfg.checkpoints.clone();
    checkpoints.sort_unstable();
    checkpoints.dedup();

    let seeds: Vec<u64> = (0..cfg.samples as u64).map(|s| seed::derive_seed(cfg.seed, stream::POINTS, s)).collect();
    let accs = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = seed::rng_from_seed(s);
            let digits = cfg.gen.sample_digits(&mut rng, budget.precision + cfg.k);
            let x = UnitPoint::from_digits(a, &digits)?.shift_digits(cfg.k);
            weyl_sum(&x, cfg.b, &cfg.freqs, &checkpoints, &budget)
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(cfg.samples * cfg.freqs.len() * checkpoints.len());
    for (sample, acc) in accs.iter().enumerate() {
        for rec in acc.records() {
            for (&m, w) in cfg.freqs.iter().zip(&rec.values) {
                rows.push(WeylRow { sample, m, n: rec.n, re: w.re, im: w.im, abs: w.norm() });
            }
        }
    }

    let oracle_measure = if dependent && power_of(a as u64, cfg.b) { Some(cfg.gen.realize(ORACLE_LEVEL)?) } else { None };
    let mut summary = Vec::new();
    for &m in &cfg.freqs {
        let oracle = oracle_measure.as_ref().map(|mu| ft_adic(mu, m as f64));
        for &n in &checkpoints {
            let sel: Vec<&WeylRow> = rows.iter().filter(|r| r.m == m && r.n == n).collect();
            let abs: Vec<f64> = sel.iter().map(|r| r.abs).collect();
            let oracle_median_dev =
                oracle.map(|o| stats::median(&sel.iter().map(|r| (Complex64::new(r.re, r.im) - o).norm()).collect::<Vec<_>>()));
            summary.push(WeylSummary {
                m,
                n,
                median: stats::median(&abs),
                p90: stats::percentile(&abs, 0.9),
                oracle,
                oracle_median_dev,
            });
        }
    }
    Ok(HostReport {
        a,
        b: cfg.b,
        precision: budget.precision,
        label: dependent.then(|| "negative_control".to_string()),
        rows,
        summary,
        seeds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalControl {
    pub p: u64,
    pub q: u64,
    pub b: u64,
    pub m: i64,
    pub n: usize,
    pub value: Complex64,
    /// Average of `e_m` over the periodic cycle of `p/q` under `×b`.
    pub cycle_average: Complex64,
    pub cycle: Vec<u64>,
    pub deviation: f64,
}

/// `W_N(m)` for the rational point `p/q`, stored exactly in base `q`, next
/// to the average of `e_m` over the cycle its orbit falls into.
pub fn rational_point_control(p: u64, q: u64, b: u64, m: i64, n: usize) -> Result<RationalControl> {
    if q < 2 || p >= q {
        return Err(Error::input(format!("{p}/{q} is not a point of [0,1) with denominator ≥ 2")));
    }
    if q > u32::MAX as u64 {
        return Err(Error::input("denominator too large"));
    }
    let x = UnitPoint::from_ratio(q as u32, 1, p, q)?;
    // p/q is exact at one base-q digit, so the orbit never runs out.
    let budget = PrecisionBudget { n_max: n, ..PrecisionBudget::new(q as u32, b, 0, 1)? };
    let w = weyl_sum(&x, b, &[m], &[n], &budget)?;
    let value = w.at(n, m).expect("checkpoint recorded");

    // The residues p b^j mod q are eventually periodic; the cycle starts at
    // the first repeated residue.
    let mut seen = std::collections::HashMap::new();
    let mut r = p % q;
    let mut orbit = Vec::new();
    while !seen.contains_key(&r) {
        seen.insert(r, orbit.len());
        orbit.push(r);
        r = ((r as u128 * b as u128) % q as u128) as u64;
    }
    let cycle = orbit[seen[&r]..].to_vec();
    let cycle_average = cycle.iter().map(|&c| e(m as f64 * c as f64 / q as f64)).sum::<Complex64>() / cycle.len() as f64;
    Ok(RationalControl { p, q, b, m, n, value, cycle_average, deviation: (value - cycle_average).norm(), cycle })
}
