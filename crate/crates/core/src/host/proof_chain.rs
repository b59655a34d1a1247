use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{fourier_term, scaled_sq_integral, AdicTransform, LineMeasure, Scaled, SmoothingParams};
use crate::measure::MeasureGen;
use crate::seed::{self, stream};
use crate::stats;

/// Entropies at or below this count as zero.
pub const ENTROPY_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProofChainEstimate {
    pub k: usize,
    pub m: i64,
    pub samples: usize,
    pub level: usize,
    /// Panels used by the largest quadrature.
    pub panels: usize,
    /// Mean over sampled pasts of `∫₀¹ |F_m(S_{a^z} S_{a^k} μ_ω)|² dz`.
    pub value: f64,
    pub std_error: f64,
    /// `1/(a^{k/2} |m| ln a)`.
    pub fourier_term: f64,
    /// Mean over pasts of `∫ μ_ω(B_{a^{−k/2}}(y)) dμ_ω(y)`.
    pub correlation_term: f64,
    pub rhs: f64,
    pub seeds: Vec<u64>,
}

impl ProofChainEstimate {
    pub fn within_rhs(&self) -> bool {
        self.value <= self.rhs + crate::fourier::CERT_SLACK
    }
}

pub(crate) fn refuse_zero_entropy(gen: &MeasureGen) -> Result<()> {
    if gen.entropy() <= ENTROPY_FLOOR {
        return Err(Error::Refused(format!(
            "{} has zero entropy; its conditional measures are atomic and nothing decays",
            gen.label()
        )));
    }
    Ok(())
}

/// Monte Carlo over pasts `ω` of the scaled square-integral of
/// `ν = S_{a^k} μ_ω` with scale base `a`, next to the smoothing bound at
/// `r = a^{k/2}`.
///
/// For the generators here `μ_ω` depends on `ω` only through the most recent
/// symbol (and not at all for memoryless ones), so the integral is computed
/// once per state and the sampled pasts pick states.
pub fn proof_chain_quantity(gen: &MeasureGen, k: usize, m: i64, samples: usize, level: usize, seed: u64) -> Result<ProofChainEstimate> {
    refuse_zero_entropy(gen)?;
    if samples == 0 {
        return Err(Error::input("need at least one sampled past"));
    }
    let a = gen.base() as f64;
    let r = a.powf(k as f64 / 2.0);
    let params = SmoothingParams::new(a, m, r)?;
    let scale = a.powi(k as i32);

    let states: Vec<Option<u32>> = if gen.is_markov() { (0..gen.base()).map(Some).collect() } else { vec![None] };
    let per_state: Vec<(f64, f64, usize)> = states
        .iter()
        .map(|&s| {
            let nu = Scaled::new(AdicTransform::from_generator(gen, s, level)?, scale)?;
            let q = scaled_sq_integral(&nu, &params)?;
            Ok((q.value, nu.correlation_integral(r)?, q.panels))
        })
        .collect::<Result<_>>()?;

    let seeds: Vec<u64> = (0..samples as u64).map(|i| seed::derive_seed(seed, stream::PASTS, i)).collect();
    let picks: Vec<usize> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = seed::rng_from_seed(s);
            let past = gen.sample_past(&mut rng, 1);
            if gen.is_markov() { past.symbols()[0] as usize } else { 0 }
        })
        .collect();
    let values: Vec<f64> = picks.iter().map(|&i| per_state[i].0).collect();
    let corr: Vec<f64> = picks.iter().map(|&i| per_state[i].1).collect();
    let correlation_term = stats::mean(&corr);
    let ft = fourier_term(&params);
    Ok(ProofChainEstimate {
        k,
        m,
        samples,
        level,
        panels: per_state.iter().map(|p| p.2).max().unwrap_or(0),
        value: stats::mean(&values),
        std_error: stats::std_error(&values),
        fourier_term: ft,
        correlation_term,
        rhs: ft + correlation_term,
        seeds,
    })
}

/// Largest violation of monotone decay along `ests` (sorted by `k`), in
/// units of the combined standard error; `≤ 2` passes.
pub fn decay_violation(ests: &[ProofChainEstimate]) -> f64 {
    ests.windows(2)
        .map(|w| {
            let rise = w[1].value - w[0].value;
            let se = (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
            if rise <= 0.0 {
                0.0
            } else if se > 0.0 {
                rise / se
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max)
}
