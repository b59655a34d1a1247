use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::adic::dist_to_integer;
use crate::e;
use crate::error::{Error, Result};
use crate::measure::{atom_count, CylinderWord, MeasureGen};
use crate::seed::{self, stream};

/// Continued-fraction denominators up to this bound are checked.
pub const IRRATIONALITY_MAX_Q: u64 = 1_000_000;
/// A convergent closer than this counts as an exact match.
pub const IRRATIONALITY_TOL: f64 = 1e-14;

/// Reject `θ` when a continued-fraction convergent `p/q` with
/// `q ≤ 10^6` matches it to within `10^−14`.
pub fn check_irrational(theta: f64) -> Result<()> {
    if !theta.is_finite() {
        return Err(Error::input("θ must be finite"));
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut x = theta;
    for _ in 0..64 {
        let a = x.floor();
        (h0, h1) = (h1, a as i128 * h1 + h0);
        (k0, k1) = (k1, a as i128 * k1 + k0);
        if k1 as u64 > IRRATIONALITY_MAX_Q {
            return Ok(());
        }
        if (theta - h1 as f64 / k1 as f64).abs() < IRRATIONALITY_TOL {
            return Err(Error::input(format!("θ = {theta} matches {h1}/{k1} at working precision")));
        }
        let frac = x - a;
        if frac == 0.0 {
            return Err(Error::input(format!("θ = {theta} is rational ({h1}/{k1})")));
        }
        x = 1.0 / frac;
    }
    Ok(())
}

/// A test function on the digit shift that reads the first `r` digits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DigitTest {
    pub id: String,
    base: u32,
    r: usize,
    #[serde(skip)]
    values: Vec<Complex64>,
    sup: f64,
}

impl DigitTest {
    pub fn from_fn(id: impl Into<String>, base: u32, r: usize, f: impl Fn(&[u32]) -> Complex64) -> Result<Self> {
        let size = atom_count(base, r)?;
        let values: Vec<Complex64> = (0..size).map(|i| f(CylinderWord::from_index(base, r, i).digits())).collect();
        let sup = values.iter().fold(0.0, |m: f64, v| m.max(v.norm()));
        Ok(DigitTest { id: id.into(), base, r, values, sup })
    }

    /// `g ≡ 1`.
    pub fn one(base: u32) -> Result<Self> {
        Self::from_fn("one", base, 0, |_| Complex64::new(1.0, 0.0))
    }

    /// `e(m · x_1/a)`, a character of the first digit.
    pub fn first_digit_character(base: u32, m: i64) -> Result<Self> {
        Self::from_fn(format!("digit1_e{m}"), base, 1, |w| e(m as f64 * w[0] as f64 / base as f64))
    }

    /// `e(m · 0.x_1…x_r)`: `e_m` of the point truncated to `r` digits.
    pub fn truncated_character(base: u32, r: usize, m: i64) -> Result<Self> {
        Self::from_fn(format!("trunc{r}_e{m}"), base, r, |w| {
            e(m as f64 * w.iter().rev().fold(0.0, |s, &d| (s + d as f64) / base as f64))
        })
    }

    pub fn window(&self) -> usize {
        self.r
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup
    }

    /// `∫ g dμ` from the cylinder weights.
    pub fn integral(&self, gen: &MeasureGen) -> Result<Complex64> {
        if self.r == 0 {
            return Ok(self.values[0]);
        }
        let mu = gen.realize(self.r)?;
        Ok(mu.weights().iter().zip(&self.values).map(|(w, v)| v * w).sum())
    }

    fn eval_at(&self, digits: &[u32], start: usize) -> Complex64 {
        let a = self.base as usize;
        let idx = digits[start..start + self.r].iter().fold(0usize, |acc, &d| acc * a + d as usize);
        self.values[idx]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointEntry {
    pub j: i64,
    pub g_id: String,
    pub re: f64,
    pub im: f64,
    pub predicted_re: f64,
    pub predicted_im: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub z: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointEquidistResult {
    pub theta: f64,
    pub beta: f64,
    pub n: usize,
    pub samples: usize,
    pub entries: Vec<JointEntry>,
    pub seeds: Vec<u64>,
}

impl JointEquidistResult {
    pub fn all_ok(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }
}

/// Cesàro slack `ε_N`: the bias of the average at finite `N` when the
/// sample mean is replaced by its expectation. For `j ≠ 0` the expected
/// average is `∫g · (1/N) Σ e(jnθ)`, bounded by `‖g‖_∞ / (2N‖jθ‖)`; for
/// `j = 0` stationarity makes it exact, and `‖g‖_∞ / N` is kept as slack.
pub fn cesaro_slack(theta: f64, j: i64, n: usize, sup: f64) -> f64 {
    if j == 0 {
        return sup / n as f64;
    }
    let d = dist_to_integer(j as f64 * theta);
    sup * (1.0 / (2.0 * n as f64 * d)).min(1.0)
}

/// `A(j, g) = E_x (1/N) Σ_{n≤N} e(jnθ) g(T^{[βn]} x)` over `samples` points
/// `x ~ μ`, compared with `τ̂(j) ∫g dμ` (Lebesgue `τ`: 1 at `j = 0`, else 0).
pub fn time_change_joint_experiment(
    theta: f64,
    beta: f64,
    gen: &MeasureGen,
    freqs: &[i64],
    tests: &[DigitTest],
    n: usize,
    samples: usize,
    master_seed: u64,
) -> Result<JointEquidistResult> {
    check_irrational(theta)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::input(format!("β must be positive, got {beta}")));
    }
    if n == 0 || samples < 2 {
        return Err(Error::input("need N ≥ 1 and at least two samples"));
    }
    if let Some(g) = tests.iter().find(|g| g.base != gen.base()) {
        return Err(Error::input(format!("test function {} has base {}, system has {}", g.id, g.base, gen.base())));
    }
    let integrals: Vec<Complex64> = tests.iter().map(|g| g.integral(gen)).collect::<Result<_>>()?;
    let max_r = tests.iter().map(|g| g.r).max().unwrap_or(0);
    let shifts: Vec<usize> = (1..=n).map(|i| (beta * i as f64).floor() as usize).collect();
    let len = shifts.last().copied().unwrap_or(0) + max_r + 1;
    let phases: Vec<Vec<Complex64>> =
        freqs.iter().map(|&j| (1..=n).map(|i| e((j as f64 * theta * i as f64).fract())).collect()).collect();

    let seeds: Vec<u64> = (0..samples as u64).map(|s| seed::derive_seed(master_seed, stream::JOINT, s)).collect();
    // Per sample: one value per (j, g), row-major in j.
    let per_sample: Vec<Vec<Complex64>> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = seed::rng_from_seed(s);
            let digits = gen.sample_digits(&mut rng, len);
            let gvals: Vec<Vec<Complex64>> =
                tests.iter().map(|g| shifts.iter().map(|&m| g.eval_at(&digits, m)).collect()).collect();
            let mut out = Vec::with_capacity(freqs.len() * tests.len());
            for ph in &phases {
                for gv in &gvals {
                    let s: Complex64 = ph.iter().zip(gv).map(|(p, v)| p * v).sum();
                    out.push(s / n as f64);
                }
            }
            out
        })
        .collect();

    let m = samples as f64;
    let mut entries = Vec::with_capacity(freqs.len() * tests.len());
    for (ji, &j) in freqs.iter().enumerate() {
        for (gi, g) in tests.iter().enumerate() {
            let col: Vec<Complex64> = per_sample.iter().map(|row| row[ji * tests.len() + gi]).collect();
            let mean: Complex64 = col.iter().sum::<Complex64>() / m;
            let var = col.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (m - 1.0);
            let predicted = if j == 0 { integrals[gi] } else { Complex64::new(0.0, 0.0) };
            let deviation = (mean - predicted).norm();
            let tolerance = 5.0 / m.sqrt() + cesaro_slack(theta, j, n, g.sup_norm());
            let se = (var / m).sqrt();
            let z = if se > 0.0 { deviation / se } else if deviation == 0.0 { 0.0 } else { f64::INFINITY };
            entries.push(JointEntry {
                j,
                g_id: g.id.clone(),
                re: mean.re,
                im: mean.im,
                predicted_re: predicted.re,
                predicted_im: predicted.im,
                deviation,
                tolerance,
                z,
                ok: deviation <= tolerance,
            });
        }
    }
    Ok(JointEquidistResult { theta, beta, n, samples, entries, seeds })
}
