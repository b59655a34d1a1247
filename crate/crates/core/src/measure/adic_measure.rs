use std::io;

use serde::{Deserialize, Serialize};

use super::words::CylinderWord;
use crate::adic::check_base;
use crate::error::{Error, Result};

/// Weight vectors are capped at this many atoms (128 MiB of `f64`).
pub const MAX_ATOMS: usize = 1 << 24;

const MASS_TOL: f64 = 1e-12;

/// `a^level`, or a resource error past [`MAX_ATOMS`].
pub fn atom_count(base: u32, level: usize) -> Result<usize> {
    check_base(base)?;
    let mut n: usize = 1;
    for _ in 0..level {
        n = n
            .checked_mul(base as usize)
            .filter(|&n| n <= MAX_ATOMS)
            .ok_or_else(|| Error::Resource(format!("{base}^{level} atoms exceed the budget of {MAX_ATOMS}")))?;
    }
    Ok(n)
}

/// A level-`n` `a`-adic measure: weight `w_k` spread uniformly over
/// `[k/a^n, (k+1)/a^n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdicMeasure {
    base: u32,
    level: usize,
    weights: Vec<f64>,
}

impl AdicMeasure {
    /// Validating constructor: nonnegative weights of total mass 1.
    pub fn new(base: u32, level: usize, weights: Vec<f64>) -> Result<Self> {
        let n = atom_count(base, level)?;
        if weights.len() != n {
            return Err(Error::input(format!("level {level} in base {base} needs {n} weights, got {}", weights.len())));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::input(format!("invalid weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::input(format!("weights sum to {total}, not 1")));
        }
        Ok(AdicMeasure { base, level, weights })
    }

    pub(crate) fn from_weights_unchecked(base: u32, level: usize, weights: Vec<f64>) -> Result<Self> {
        debug_assert_eq!(weights.len(), atom_count(base, level)?);
        Ok(AdicMeasure { base, level, weights })
    }

    /// Lebesgue measure at the given level.
    pub fn uniform(base: u32, level: usize) -> Result<Self> {
        let n = atom_count(base, level)?;
        Ok(AdicMeasure { base, level, weights: vec![1.0 / n as f64; n] })
    }

    /// All mass on the atom named by `word` (uniform inside it).
    pub fn point_mass(word: &CylinderWord) -> Result<Self> {
        let n = atom_count(word.base(), word.len())?;
        let mut weights = vec![0.0; n];
        weights[word.index()] = 1.0;
        Ok(AdicMeasure { base: word.base(), level: word.len(), weights })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Atom width `a^−level`.
    pub fn atom_width(&self) -> f64 {
        (self.base as f64).powi(-(self.level as i32))
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Number of atoms with positive weight.
    pub fn support_size(&self) -> usize {
        self.weights.iter().filter(|&&w| w > 0.0).count()
    }

    /// The same measure one level down (sum of sibling weights).
    pub fn coarsen(&self) -> Result<Self> {
        if self.level == 0 {
            return Err(Error::input("cannot coarsen a level-0 measure"));
        }
        let a = self.base as usize;
        let weights = self.weights.chunks_exact(a).map(|c| c.iter().sum()).collect();
        Ok(AdicMeasure { base: self.base, level: self.level - 1, weights })
    }

    /// The same piecewise-uniform measure one level up.
    pub fn refine(&self) -> Result<Self> {
        let a = self.base as usize;
        atom_count(self.base, self.level + 1)?;
        let weights = self.weights.iter().flat_map(|&w| std::iter::repeat_n(w / a as f64, a)).collect();
        Ok(AdicMeasure { base: self.base, level: self.level + 1, weights })
    }

    fn check_word(&self, word: &CylinderWord) -> Result<()> {
        if word.base() != self.base {
            return Err(Error::input(format!("word base {} does not match measure base {}", word.base(), self.base)));
        }
        if word.len() > self.level {
            return Err(Error::input(format!("word of length {} is finer than level {}", word.len(), self.level)));
        }
        Ok(())
    }

    fn block(&self, word: &CylinderWord) -> &[f64] {
        let span = (self.base as usize).pow((self.level - word.len()) as u32);
        let start = word.index() * span;
        &self.weights[start..start + span]
    }

    /// `μ([w])`.
    pub fn mass_of(&self, word: &CylinderWord) -> Result<f64> {
        self.check_word(word)?;
        Ok(self.block(word).iter().sum())
    }

    /// `T_a^n` of the normalized restriction to `[w]`, a measure at level
    /// `level − n`.
    pub fn cylinder_condition(&self, word: &CylinderWord) -> Result<Self> {
        self.check_word(word)?;
        let block = self.block(word);
        let mass: f64 = block.iter().sum();
        if mass <= 0.0 {
            return Err(Error::NullAtom(format!("cylinder {:?} has zero mass", word.digits())));
        }
        let weights = block.iter().map(|w| w / mass).collect();
        Ok(AdicMeasure { base: self.base, level: self.level - word.len(), weights })
    }

    /// Pushforward under `T_a^j`: `w′_u = Σ_{|v|=j} w_{vu}`.
    pub fn shift_push(&self, j: usize) -> Result<Self> {
        if j > self.level {
            return Err(Error::input(format!("shift {j} exceeds level {}", self.level)));
        }
        let span = (self.base as usize).pow((self.level - j) as u32);
        let mut weights = vec![0.0; span];
        for chunk in self.weights.chunks_exact(span) {
            for (acc, w) in weights.iter_mut().zip(chunk) {
                *acc += w;
            }
        }
        Ok(AdicMeasure { base: self.base, level: self.level - j, weights })
    }

    /// `max_k |w_k − v_k|` between measures of the same shape.
    pub fn max_abs_diff(&self, other: &AdicMeasure) -> Result<f64> {
        if self.base != other.base || self.level != other.level {
            return Err(Error::input("measures differ in base or level"));
        }
        Ok(self.weights.iter().zip(&other.weights).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    }

    /// `∫ μ(B_r(y)) dμ(y)` on the line (no wraparound).
    ///
    /// Requires `a^−level ≤ r/16`; returns 1 for `r ≥ 1`.
    pub fn correlation_integral(&self, r: f64) -> Result<f64> {
        super::correlation::correlation_integral(self, r)
    }

    /// CSV with columns `k,weight`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io_err = |e: csv::Error| Error::Resource(format!("writing measure CSV: {e}"));
        w.write_record(["k", "weight"]).map_err(io_err)?;
        for (k, x) in self.weights.iter().enumerate() {
            w.serialize((k, x)).map_err(io_err)?;
        }
        w.flush().map_err(|e| Error::Resource(format!("writing measure CSV: {e}")))
    }

    /// Inverse of [`write_csv`](Self::write_csv); the level is inferred from
    /// the row count.
    pub fn read_csv<R: io::Read>(base: u32, input: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(input);
        let mut weights = Vec::new();
        for (row, rec) in rd.deserialize::<(usize, f64)>().enumerate() {
            let (k, w) = rec.map_err(|e| Error::input(format!("measure CSV: {e}")))?;
            if k != row {
                return Err(Error::input(format!("measure CSV row {row} has index {k}")));
            }
            weights.push(w);
        }
        let mut level = 0;
        let mut n = 1usize;
        while n < weights.len() {
            n *= base as usize;
            level += 1;
        }
        Self::new(base, level, weights)
    }
}
