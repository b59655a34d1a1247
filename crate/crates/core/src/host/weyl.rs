use num_complex::Complex64;
use serde::Serialize;

use crate::adic::{OrbitKernel, PrecisionBudget, UnitPoint};
use crate::e;
use crate::error::{Error, Result};

const TWO53: i128 = 1 << 53;

/// `e(m q / 2^53)` with the phase `m q mod 2^53` reduced exactly in integers
/// and centred in `[−2^52, 2^52)`, so that `m ↦ −m` conjugates exactly.
#[inline]
pub fn character_at(m: i64, q: u64) -> Complex64 {
    let mut r = (m as i128 * q as i128).rem_euclid(TWO53);
    if r >= TWO53 / 2 {
        r -= TWO53;
    }
    e(r as f64 / TWO53 as f64)
}

/// Averages `W_N(m)` at one checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylCheckpoint {
    pub n: usize,
    pub values: Vec<Complex64>,
}

/// Running sums `Σ_{n≤N} e(m x_n)` over a frequency set, with snapshots of
/// the averages at the checkpoints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylAccumulator {
    freqs: Vec<i64>,
    sums: Vec<Complex64>,
    count: usize,
    checkpoints: Vec<usize>,
    records: Vec<WeylCheckpoint>,
}

impl WeylAccumulator {
    pub fn new(freqs: &[i64], checkpoints: &[usize]) -> Result<Self> {
        if freqs.is_empty() || freqs.contains(&0) {
            return Err(Error::input("frequencies must be a nonempty set of nonzero integers"));
        }
        let mut cps = checkpoints.to_vec();
        cps.sort_unstable();
        cps.dedup();
        if cps.first() == Some(&0) || cps.is_empty() {
            return Err(Error::input("checkpoints must be positive"));
        }
        Ok(WeylAccumulator {
            freqs: freqs.to_vec(),
            sums: vec![Complex64::new(0.0, 0.0); freqs.len()],
            count: 0,
            checkpoints: cps,
            records: Vec::new(),
        })
    }

    /// Add the point `q / 2^53`.
    pub fn push(&mut self, q: u64) {
        for (s, &m) in self.sums.iter_mut().zip(&self.freqs) {
            *s += character_at(m, q);
        }
        self.count += 1;
        if self.checkpoints.get(self.records.len()) == Some(&self.count) {
            let n = self.count as f64;
            self.records.push(WeylCheckpoint { n: self.count, values: self.sums.iter().map(|s| s / n).collect() });
        }
    }

    pub fn freqs(&self) -> &[i64] {
        &self.freqs
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn max_checkpoint(&self) -> usize {
        *self.checkpoints.last().expect("nonempty")
    }

    /// Current averages `W_N(m)`.
    pub fn averages(&self) -> Vec<Complex64> {
        let n = self.count.max(1) as f64;
        self.sums.iter().map(|s| s / n).collect()
    }

    pub fn records(&self) -> &[WeylCheckpoint] {
        &self.records
    }

    /// `W_N(m)` at checkpoint `n`.
    pub fn at(&self, n: usize, m: i64) -> Option<Complex64> {
        let i = self.freqs.iter().position(|&f| f == m)?;
        self.records.iter().find(|r| r.n == n).map(|r| r.values[i])
    }
}

/// `W_N(m) = (1/N) Σ_{n=1}^N e(m T_b^n x)` along the exact orbit, recorded
/// at each checkpoint. The point must carry the digits the budget asks for.
pub fn weyl_sum(x: &UnitPoint, b: u64, freqs: &[i64], checkpoints: &[usize], budget: &PrecisionBudget) -> Result<WeylAccumulator> {
    let mut acc = WeylAccumulator::new(freqs, checkpoints)?;
    let n_max = acc.max_checkpoint();
    if budget.multiplier != b {
        return Err(Error::input(format!("budget is for ×{}, orbit uses ×{b}", budget.multiplier)));
    }
    if budget.n_max < n_max {
        return Err(Error::Precision(format!("budget covers {} steps, checkpoints need {n_max}", budget.n_max)));
    }
    budget.check(x, 0)?;
    let mut kernel = OrbitKernel::new(x, b)?;
    for _ in 0..n_max {
        kernel.step();
        acc.push(kernel.top_bits53());
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_point() {
        let budget = PrecisionBudget::with_default_guard(3, 2, 1000).unwrap();
        let x = UnitPoint::zero(3, budget.precision).unwrap();
        let w = weyl_sum(&x, 2, &[1, -2, 5], &[10, 1000], &budget).unwrap();
        for r in w.records() {
            assert!(r.values.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        }
    }

    #[test]
    fn one_third_period_two() {
        let budget = PrecisionBudget::with_default_guard(3, 2, 1000).unwrap();
        let x = UnitPoint::from_ratio(3, budget.precision, 1, 3).unwrap();
        let w = weyl_sum(&x, 2, &[1], &[2, 100, 1000], &budget).unwrap();
        let expect = (e(1.0 / 3.0) + e(2.0 / 3.0)) / 2.0;
        assert!((expect - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
        for n in [2, 100, 1000] {
            assert!((w.at(n, 1).unwrap() - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn insufficient_precision_is_an_error() {
        let budget = PrecisionBudget::with_default_guard(3, 2, 1000).unwrap();
        let x = UnitPoint::from_digits(3, &[1; 100]).unwrap();
        assert!(matches!(weyl_sum(&x, 2, &[1], &[1000], &budget), Err(Error::Precision(_))));
        let small = PrecisionBudget::with_default_guard(3, 2, 10).unwrap();
        let x = UnitPoint::zero(3, 2000).unwrap();
        assert!(matches!(weyl_sum(&x, 2, &[1], &[1000], &small), Err(Error::Precision(_))));
        assert!(weyl_sum(&x, 2, &[0], &[10], &small).is_err());
    }

    proptest! {
        #[test]
        fn bounded_and_conjugate(digits in proptest::collection::vec(0u32..3, 200..260), m in 1i64..50) {
            let x = UnitPoint::from_digits(3, &digits).unwrap();
            let budget = PrecisionBudget::new(3, 2, 100, 64).unwrap();
            let w = weyl_sum(&x, 2, &[m, -m], &[7, 50, 100], &budget).unwrap();
            for r in w.records() {
                prop_assert!(r.values[0].norm() <= 1.0 + 1e-12);
                prop_assert_eq!(r.values[1], r.values[0].conj());
            }
        }
    }
}
