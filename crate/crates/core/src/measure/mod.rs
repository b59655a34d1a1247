//! `a`-adic measures, their generators and conditional measures.
//!
//! A [`MeasureGen`] is a stationary digit process (i.i.d., Markov, or i.i.d.
//! on a digit subset); [`AdicMeasure`] is its piecewise-uniform
//! discretisation at a fixed level. The past of the natural extension is a
//! [`PastWord`]; for these generators the conditional measure `μ_ω` depends
//! on at most the most recent past symbol, so it is computed exactly.

mod adic_measure;
mod correlation;
mod generator;
mod words;

pub use adic_measure::{atom_count, AdicMeasure, MAX_ATOMS};
pub use correlation::{correlation_log_slope, RESOLUTION_FACTOR};
pub use generator::{GenKind, GenSpec, MeasureGen};
pub use words::{CylinderWord, PastWord};

use crate::error::{Error, Result};

/// Entrywise tolerance of the equivariance check.
pub const EQUIVARIANCE_TOL: f64 = 1e-12;

/// Outcome of one equivariance comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivarianceCheck {
    pub max_abs_diff: f64,
    pub holds: bool,
}

/// Compare `T_a^n((μ_ω)_{[w]})` with `μ_{ω·w}` at level `level − n`.
///
/// The left side conditions the level-`level` conditional measure on the
/// cylinder `w` and rescales; the right side conditions on the extended past.
pub fn verify_equivariance(gen: &MeasureGen, past: &PastWord, word: &CylinderWord, level: usize) -> Result<EquivarianceCheck> {
    if word.len() > level {
        return Err(Error::input(format!("cylinder of length {} exceeds level {level}", word.len())));
    }
    let lhs = gen.conditional_on_past(past, level)?.cylinder_condition(word)?;
    let rhs = gen.conditional_on_past(&past.extended(word)?, level - word.len())?;
    let max_abs_diff = lhs.max_abs_diff(&rhs)?;
    Ok(EquivarianceCheck { max_abs_diff, holds: max_abs_diff <= EQUIVARIANCE_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use rand::Rng;

    fn markov() -> MeasureGen {
        MeasureGen::markov(vec![vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap()
    }

    #[test]
    fn equivariance_examples() {
        let b = MeasureGen::bernoulli(vec![0.3, 0.7]).unwrap();
        let past = PastWord::new(2, vec![1, 1, 0]).unwrap();
        let w = CylinderWord::new(2, vec![0, 1, 1]).unwrap();
        assert!(verify_equivariance(&b, &past, &w, 8).unwrap().holds);

        let m = markov();
        let past = PastWord::new(2, vec![0]).unwrap();
        let w = CylinderWord::new(2, vec![1]).unwrap();
        let check = verify_equivariance(&m, &past, &w, 6).unwrap();
        assert!(check.holds, "{check:?}");
        // Both sides are the chain started from state 1.
        let started = m.realize_from(Some(1), 5).unwrap();
        let lhs = m.conditional_on_past(&past, 6).unwrap().cylinder_condition(&w).unwrap();
        assert!(lhs.max_abs_diff(&started).unwrap() < 1e-15);

        let c = MeasureGen::cantor();
        let w = CylinderWord::new(3, vec![1]).unwrap();
        assert!(matches!(verify_equivariance(&c, &PastWord::empty(3), &w, 5), Err(Error::NullAtom(_))));
    }

    #[test]
    fn random_equivariance_battery() {
        let mut rng = rng_from_seed(2024);
        let gens = [MeasureGen::bernoulli(vec![0.2, 0.5, 0.3]).unwrap(), markov(), MeasureGen::cantor()];
        for g in &gens {
            let mut done = 0;
            while done < 50 {
                let len = rng.random_range(1..6);
                let past = g.sample_past(&mut rng, len);
                let n = rng.random_range(1..5);
                let word = CylinderWord::new(g.base(), g.sample_digits(&mut rng, n)).unwrap();
                let check = verify_equivariance(g, &past, &word, 8).unwrap();
                assert!(check.holds, "{check:?}");
                done += 1;
            }
        }
    }

    #[test]
    fn disintegration_averages_to_mu() {
        // Averaging μ_ω over sampled pasts recovers μ; the total-variation
        // error must sit within a few standard deviations of the sampling noise.
        let g = markov();
        let level = 4;
        let m = 20_000;
        let mut rng = rng_from_seed(99);
        let mut avg = vec![0.0; 1 << level];
        for _ in 0..m {
            let past = g.sample_past(&mut rng, 3);
            let cond = g.conditional_on_past(&past, level).unwrap();
            for (a, w) in avg.iter_mut().zip(cond.weights()) {
                *a += w / m as f64;
            }
        }
        let mu = g.realize(level).unwrap();
        let tv: f64 = 0.5 * avg.iter().zip(mu.weights()).map(|(x, y)| (x - y).abs()).sum::<f64>();
        // The average is an empirical mixture of two conditionals with
        // p = 1/6; its TV error is |p̂ − p|·TV(μ_0, μ_1).
        let tv01 = {
            let c0 = g.realize_from(Some(0), level).unwrap();
            let c1 = g.realize_from(Some(1), level).unwrap();
            0.5 * c0.weights().iter().zip(c1.weights()).map(|(x, y)| (x - y).abs()).sum::<f64>()
        };
        let sigma = (1.0 / 6.0 * 5.0 / 6.0 / m as f64).sqrt() * tv01;
        assert!(tv < 3.0 * sigma, "tv {tv} vs 3σ {}", 3.0 * sigma);
    }
}
