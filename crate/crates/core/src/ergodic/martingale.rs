use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{GenKind, MeasureGen};
use crate::seed::{self, stream};
use crate::stats;

/// A stationary digit process `X_1, X_2, …` driven by a Bernoulli or Markov
/// generator.
#[derive(Clone, Debug)]
pub struct SymbolicProcess {
    gen: MeasureGen,
    seed: u64,
}

impl SymbolicProcess {
    pub fn new(gen: MeasureGen, seed: u64) -> Result<Self> {
        match gen.kind() {
            GenKind::Bernoulli | GenKind::Markov => Ok(SymbolicProcess { gen, seed }),
            kind => Err(Error::input(format!("symbolic processes support Bernoulli and Markov generators, not {kind:?}"))),
        }
    }

    pub fn generator(&self) -> &MeasureGen {
        &self.gen
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// `f(X_{n+1}, …, X_{n+k})` given by a table over the `a^k` words
/// (big-endian word index).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowFunction {
    base: u32,
    k: usize,
    table: Vec<f64>,
    sup: f64,
}

impl WindowFunction {
    pub fn new(base: u32, k: usize, table: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::input("window length must be at least 1"));
        }
        let size = crate::measure::atom_count(base, k)?;
        if table.len() != size {
            return Err(Error::input(format!("window table needs {size} entries, got {}", table.len())));
        }
        if table.iter().any(|x| !x.is_finite()) {
            return Err(Error::input("window table must be finite"));
        }
        let sup = table.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        Ok(WindowFunction { base, k, table, sup })
    }

    pub fn from_fn(base: u32, k: usize, f: impl Fn(&[u32]) -> f64) -> Result<Self> {
        let size = crate::measure::atom_count(base, k)?;
        let table = (0..size).map(|i| f(crate::measure::CylinderWord::from_index(base, k, i).digits())).collect();
        Self::new(base, k, table)
    }

    pub fn constant(base: u32, k: usize, c: f64) -> Result<Self> {
        Self::from_fn(base, k, |_| c)
    }

    /// `+1` if the next digit is 0, `−1` otherwise.
    pub fn next_digit_sign(base: u32) -> Result<Self> {
        Self::from_fn(base, 1, |w| if w[0] == 0 { 1.0 } else { -1.0 })
    }

    /// `cos(2π · 0.w)` of the `k`-digit word `w`.
    pub fn cosine(base: u32, k: usize) -> Result<Self> {
        Self::from_fn(base, k, |w| {
            let x = w.iter().rev().fold(0.0, |s, &d| (s + d as f64) / base as f64);
            (std::f64::consts::TAU * x).cos()
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn window(&self) -> usize {
        self.k
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// `‖f‖_∞`.
    pub fn sup_norm(&self) -> f64 {
        self.sup
    }
}

/// `E(f_n | B_n)` as a function of the current state `X_n` (ignored for
/// Bernoulli processes): a weighted sum over the `a^k` continuations.
fn conditional_table(gen: &MeasureGen, f: &WindowFunction) -> Vec<f64> {
    let a = gen.base();
    let states: Vec<Option<u32>> = if gen.is_markov() { (0..a).map(Some).collect() } else { vec![None] };
    states
        .iter()
        .map(|&s| {
            let cont = gen.realize_from(s, f.window()).expect("window fits the atom budget");
            cont.weights().iter().zip(&f.table).map(|(p, v)| p * v).sum()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MartingaleResult {
    pub n: usize,
    pub window: usize,
    pub sup_norm: f64,
    /// `(1/N) Σ_{n=1}^N (f_n − E(f_n | B_n))`, one per trial.
    pub values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub rms: f64,
}

impl MartingaleResult {
    /// The soft bound `C ‖f‖_∞ / √N`.
    pub fn rms_bound(&self, c: f64) -> f64 {
        c * self.sup_norm / (self.n as f64).sqrt()
    }
}

/// Per-trial Cesàro averages of the martingale differences
/// `f_n − E(f_n | B_n)`, with closed-form conditional expectations.
pub fn martingale_avg_experiment(proc: &SymbolicProcess, f: &WindowFunction, n: usize, trials: usize) -> Result<MartingaleResult> {
    let gen = &proc.gen;
    if f.base() != gen.base() {
        return Err(Error::input(format!("window base {} does not match process base {}", f.base(), gen.base())));
    }
    if n == 0 || trials == 0 {
        return Err(Error::input("need N ≥ 1 and at least one trial"));
    }
    let cond = conditional_table(gen, f);
    let a = gen.base() as usize;
    let size = f.table.len();
    let k = f.window();
    let seeds: Vec<u64> = (0..trials as u64).map(|t| seed::derive_seed(proc.seed, stream::TRIALS, t)).collect();
    let values: Vec<f64> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = seed::rng_from_seed(s);
            let xs = gen.sample_digits(&mut rng, n + k);
            // Window index of X_{n+1..n+k}, rolled forward.
            let mut idx = xs[..k].iter().fold(0usize, |acc, &d| acc * a + d as usize);
            let mut total = 0.0;
            for i in 1..=n {
                // xs is 0-based: X_i = xs[i-1], the window starts at xs[i].
                idx = (idx * a + xs[i + k - 1] as usize) % size;
                let state = if gen.is_markov() { xs[i - 1] as usize } else { 0 };
                total += f.table[idx] - cond[state];
            }
            total / n as f64
        })
        .collect();
    Ok(MartingaleResult { n, window: k, sup_norm: f.sup_norm(), rms: stats::rms(&values), values, seeds })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitCheck {
    pub full: f64,
    /// Averages over `n ≡ p (mod k)`, `p = 0..k−1`, with `n` starting at 1.
    pub class_means: Vec<f64>,
    pub class_sizes: Vec<usize>,
    pub reassembled: f64,
}

impl SplitCheck {
    pub fn discrepancy(&self) -> f64 {
        (self.full - self.reassembled).abs()
    }
}

/// Split `(f_1, …, f_N)` into the `k` residue classes of the index and
/// reassemble the full average from the class averages.
pub fn split_index_average(values: &[f64], k: usize) -> Result<SplitCheck> {
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    if values.is_empty() {
        return Err(Error::input("need at least one value"));
    }
    let mut sums = vec![0.0; k];
    let mut sizes = vec![0usize; k];
    for (i, &v) in values.iter().enumerate() {
        let p = (i + 1) % k;
        sums[p] += v;
        sizes[p] += 1;
    }
    let class_means: Vec<f64> = sums.iter().zip(&sizes).map(|(s, &c)| if c == 0 { 0.0 } else { s / c as f64 }).collect();
    let n = values.len() as f64;
    let reassembled = class_means.iter().zip(&sizes).map(|(m, &c)| m * c as f64).sum::<f64>() / n;
    Ok(SplitCheck { full: stats::mean(values), class_means, class_sizes: sizes, reassembled })
}
