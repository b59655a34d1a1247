use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::adic_measure::{atom_count, AdicMeasure};
use super::words::{CylinderWord, PastWord};
use crate::adic::check_base;
use crate::error::{Error, Result};

const PROB_TOL: f64 = 1e-12;

/// Configuration form of a generator: `{"kind": ..., "a": ..., parameters}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GenSpec {
    /// i.i.d. digits with law `p`.
    Bernoulli { a: u32, p: Vec<f64> },
    /// Stationary Markov digits; `stationary` is solved for when absent.
    Markov {
        a: u32,
        transition: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stationary: Option<Vec<f64>>,
    },
    /// Equal-ratio self-similar measure: i.i.d. digits restricted to `digits`.
    IfsDigits { a: u32, digits: Vec<u32>, weights: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    Bernoulli,
    Markov,
    IfsDigits,
}

/// Symbolic generator of a `T_a`-invariant measure.
///
/// Internally every generator is a digit process: memoryless ones carry a
/// single digit law, Markov ones a stochastic matrix and its stationary
/// vector. Cylinder weights, samples, conditionals given the past and the
/// entropy all derive from that.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GenSpec", into = "GenSpec")]
pub struct MeasureGen {
    spec: GenSpec,
    base: u32,
    /// Law of the first digit (stationary law for Markov).
    initial: Vec<f64>,
    /// Transition rows; empty for memoryless generators.
    rows: Vec<Vec<f64>>,
}

fn check_prob_vector(what: &str, p: &[f64]) -> Result<()> {
    if let Some(x) = p.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::input(format!("{what} has invalid entry {x}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PROB_TOL {
        return Err(Error::input(format!("{what} sums to {s}, not 1")));
    }
    Ok(())
}

/// Solve `πP = π`, `Σπ = 1`.
fn stationary_of(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = rows.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // Row j of the system is column j of (P − I).
            m[(j, i)] = rows[i][j] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for i in 0..n {
        m[(n - 1, i)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(n);
    rhs[n - 1] = 1.0;
    let pi = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::input("transition matrix has no unique stationary vector"))?;
    Ok(pi.iter().map(|&x| if x.abs() < 1e-15 { 0.0 } else { x }).collect())
}

impl TryFrom<GenSpec> for MeasureGen {
    type Error = Error;

    fn try_from(spec: GenSpec) -> Result<Self> {
        match spec {
            GenSpec::Bernoulli { a, p } => {
                check_base(a)?;
                if p.len() != a as usize {
                    return Err(Error::input(format!("Bernoulli law has {} entries for base {a}", p.len())));
                }
                check_prob_vector("Bernoulli law", &p)?;
                Ok(MeasureGen { initial: p.clone(), rows: Vec::new(), base: a, spec: GenSpec::Bernoulli { a, p } })
            }
            GenSpec::IfsDigits { a, digits, weights } => {
                check_base(a)?;
                if digits.is_empty() || digits.len() != weights.len() {
                    return Err(Error::input("IFS digit set and weights must be nonempty and of equal length"));
                }
                let mut law = vec![0.0; a as usize];
                for (&d, &w) in digits.iter().zip(&weights) {
                    if d >= a {
                        return Err(Error::input(format!("IFS digit {d} outside [0, {a})")));
                    }
                    if law[d as usize] != 0.0 {
                        return Err(Error::input(format!("IFS digit {d} listed twice")));
                    }
                    law[d as usize] = w;
                }
                check_prob_vector("IFS weights", &weights)?;
                Ok(MeasureGen { initial: law, rows: Vec::new(), base: a, spec: GenSpec::IfsDigits { a, digits, weights } })
            }
            GenSpec::Markov { a, transition, stationary } => {
                check_base(a)?;
                if transition.len() != a as usize || transition.iter().any(|r| r.len() != a as usize) {
                    return Err(Error::input(format!("transition matrix must be {a}×{a}")));
                }
                for (i, row) in transition.iter().enumerate() {
                    check_prob_vector(&format!("transition row {i}"), row)?;
                }
                let pi = match stationary {
                    Some(pi) => pi,
                    None => stationary_of(&transition)?,
                };
                if pi.len() != a as usize {
                    return Err(Error::input("stationary vector has the wrong length"));
                }
                check_prob_vector("stationary vector", &pi)?;
                for j in 0..a as usize {
                    let pj: f64 = (0..a as usize).map(|i| pi[i] * transition[i][j]).sum();
                    if (pj - pi[j]).abs() > PROB_TOL {
                        return Err(Error::input(format!("stationary vector fails πP = π at {j} by {}", pj - pi[j])));
                    }
                }
                Ok(MeasureGen {
                    initial: pi.clone(),
                    rows: transition.clone(),
                    base: a,
                    spec: GenSpec::Markov { a, transition, stationary: Some(pi) },
                })
            }
        }
    }
}

impl From<MeasureGen> for GenSpec {
    fn from(g: MeasureGen) -> Self {
        g.spec
    }
}

impl MeasureGen {
    pub fn bernoulli(p: Vec<f64>) -> Result<Self> {
        Self::try_from(GenSpec::Bernoulli { a: p.len() as u32, p })
    }

    /// Lebesgue measure as the uniform Bernoulli generator in base `a`.
    pub fn uniform(a: u32) -> Result<Self> {
        check_base(a)?;
        Self::bernoulli(vec![1.0 / a as f64; a as usize])
    }

    pub fn markov(transition: Vec<Vec<f64>>) -> Result<Self> {
        Self::try_from(GenSpec::Markov { a: transition.len() as u32, transition, stationary: None })
    }

    pub fn ifs_digits(a: u32, digits: Vec<u32>, weights: Vec<f64>) -> Result<Self> {
        Self::try_from(GenSpec::IfsDigits { a, digits, weights })
    }

    /// The middle-thirds Cantor measure: base 3, digits {0, 2}, equal weights.
    pub fn cantor() -> Self {
        Self::ifs_digits(3, vec![0, 2], vec![0.5, 0.5]).expect("valid preset")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::input(format!("generator config: {e}")))
    }

    pub fn spec(&self) -> &GenSpec {
        &self.spec
    }

    pub fn kind(&self) -> GenKind {
        match self.spec {
            GenSpec::Bernoulli { .. } => GenKind::Bernoulli,
            GenSpec::Markov { .. } => GenKind::Markov,
            GenSpec::IfsDigits { .. } => GenKind::IfsDigits,
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn is_markov(&self) -> bool {
        !self.rows.is_empty()
    }

    /// Law of the first digit; the stationary law for Markov generators.
    pub fn initial_law(&self) -> &[f64] {
        &self.initial
    }

    /// Law of the next digit after `prev` (`None`: no history).
    pub fn next_law(&self, prev: Option<u32>) -> &[f64] {
        match prev {
            Some(s) if self.is_markov() => &self.rows[s as usize],
            _ => &self.initial,
        }
    }

    /// Transition matrix (Markov only).
    pub fn transition(&self) -> Option<&[Vec<f64>]> {
        self.is_markov().then_some(self.rows.as_slice())
    }

    /// The finite piece of the past the conditional measures depend on:
    /// the most recent symbol for Markov generators, nothing otherwise.
    pub fn past_state(&self, past: &PastWord) -> Result<Option<u32>> {
        if past.base() != self.base {
            return Err(Error::input(format!("past base {} does not match generator base {}", past.base(), self.base)));
        }
        if !self.is_markov() {
            return Ok(None);
        }
        past.most_recent()
            .map(Some)
            .ok_or_else(|| Error::input("Markov conditionals need a nonempty past"))
    }

    /// Probability of reading `word` next, given the state `start`.
    pub fn cylinder_prob_from(&self, start: Option<u32>, word: &[u32]) -> f64 {
        let mut prev = start;
        let mut p = 1.0;
        for &d in word {
            p *= self.next_law(prev)[d as usize];
            prev = Some(d);
        }
        p
    }

    /// `μ([w])`.
    pub fn cylinder_prob(&self, word: &CylinderWord) -> f64 {
        self.cylinder_prob_from(None, word.digits())
    }

    /// Level-`level` weights of the digit process started from `start`.
    pub fn realize_from(&self, start: Option<u32>, level: usize) -> Result<AdicMeasure> {
        let a = self.base as usize;
        let size = atom_count(self.base, level)?;
        let mut weights = Vec::with_capacity(size);
        weights.push(1.0);
        for step in 0..level {
            let mut next = Vec::with_capacity(weights.len() * a);
            for (k, &w) in weights.iter().enumerate() {
                let prev = if step == 0 { start } else { Some((k % a) as u32) };
                let law = self.next_law(prev);
                next.extend(law.iter().map(|&p| w * p));
            }
            weights = next;
        }
        AdicMeasure::from_weights_unchecked(self.base, level, weights)
    }

    /// The level-`n` discretisation of the invariant measure.
    pub fn realize(&self, level: usize) -> Result<AdicMeasure> {
        if level == 0 {
            return Err(Error::input("realization level must be at least 1"));
        }
        self.realize_from(None, level)
    }

    /// The conditional measure `μ_ω` at level `n`. Only the most recent past
    /// symbol matters for Markov generators; memoryless generators ignore
    /// the past.
    pub fn conditional_on_past(&self, past: &PastWord, level: usize) -> Result<AdicMeasure> {
        let state = self.past_state(past)?;
        self.realize_from(state, level)
    }

    /// Entropy of the digit process in nats (`0 ln 0 = 0`).
    pub fn entropy(&self) -> f64 {
        let h = |p: &[f64]| -> f64 { p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum() };
        if self.is_markov() {
            self.initial.iter().zip(&self.rows).map(|(pi, row)| pi * h(row)).sum()
        } else {
            h(&self.initial)
        }
    }

    /// Draw `len` digits of a `μ`-typical point.
    pub fn sample_digits<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> Vec<u32> {
        self.sample_digits_from(rng, None, len)
    }

    /// Draw `len` digits continuing from state `start`.
    pub fn sample_digits_from<R: Rng + ?Sized>(&self, rng: &mut R, start: Option<u32>, len: usize) -> Vec<u32> {
        let initial = WeightedIndex::new(&self.initial).expect("validated law");
        let rows: Vec<WeightedIndex<f64>> =
            self.rows.iter().map(|r| WeightedIndex::new(r).expect("validated row")).collect();
        let mut out = Vec::with_capacity(len);
        let mut prev = start;
        for _ in 0..len {
            let d = match prev {
                Some(s) if self.is_markov() => rows[s as usize].sample(rng),
                _ => initial.sample(rng),
            } as u32;
            out.push(d);
            prev = Some(d);
        }
        out
    }

    /// Draw a past `(ω_0, ω_{−1}, …)` of length `len` from the stationary
    /// process (time-reversed chain for Markov generators).
    pub fn sample_past<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> PastWord {
        let symbols = if self.is_markov() {
            let a = self.base as usize;
            let mut out = Vec::with_capacity(len);
            if len > 0 {
                let first = WeightedIndex::new(&self.initial).expect("validated law").sample(rng) as u32;
                out.push(first);
                while out.len() < len {
                    let next = *out.last().unwrap() as usize;
                    let back: Vec<f64> = (0..a).map(|i| self.initial[i] * self.rows[i][next]).collect();
                    out.push(WeightedIndex::new(&back).expect("reachable state").sample(rng) as u32);
                }
            }
            out
        } else {
            self.sample_digits(rng, len)
        };
        PastWord::new(self.base, symbols).expect("sampled symbols are in range")
    }

    /// Short label for reports.
    pub fn label(&self) -> String {
        match &self.spec {
            GenSpec::Bernoulli { a, p } => format!("bernoulli{a}({})", join(p)),
            GenSpec::Markov { a, transition, .. } => {
                format!("markov{a}({})", transition.iter().map(|r| join(r)).collect::<Vec<_>>().join(";"))
            }
            GenSpec::IfsDigits { a, digits, weights } => format!(
                "ifs{a}({}|{})",
                digits.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","),
                join(weights)
            ),
        }
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    fn markov_example() -> MeasureGen {
        MeasureGen::markov(vec![vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap()
    }

    #[test]
    fn stationary_vector_solved() {
        let g = markov_example();
        let pi = g.initial_law();
        assert!((pi[0] - 5.0 / 6.0).abs() < 1e-14);
        assert!((pi[1] - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn realize_examples() {
        let u = MeasureGen::uniform(2).unwrap().realize(3).unwrap();
        assert!(u.weights().iter().all(|&w| (w - 0.125).abs() < 1e-15));

        let c = MeasureGen::cantor().realize(2).unwrap();
        let expect = [0.25, 0.0, 0.25, 0.0, 0.0, 0.0, 0.25, 0.0, 0.25];
        assert_eq!(c.weights(), &expect);

        let m = markov_example().realize(2).unwrap();
        assert!((m.weights()[0] - 0.75).abs() < 1e-14);
    }

    #[test]
    fn conditional_examples() {
        let m = markov_example();
        let past = PastWord::new(2, vec![1, 0, 0]).unwrap();
        let c = m.conditional_on_past(&past, 1).unwrap();
        assert_eq!(c.weights(), &[0.5, 0.5]);
        assert!(matches!(m.conditional_on_past(&PastWord::empty(2), 3), Err(Error::Input(_))));

        let cantor = MeasureGen::cantor();
        let any = PastWord::new(3, vec![2, 0, 1]).unwrap();
        assert_eq!(cantor.conditional_on_past(&any, 4).unwrap(), cantor.realize(4).unwrap());
        let b = MeasureGen::bernoulli(vec![0.3, 0.7]).unwrap();
        assert_eq!(b.conditional_on_past(&PastWord::empty(2), 5).unwrap(), b.realize(5).unwrap());
    }

    #[test]
    fn entropy_examples() {
        assert!((MeasureGen::uniform(2).unwrap().entropy() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(MeasureGen::bernoulli(vec![1.0, 0.0]).unwrap().entropy(), 0.0);
        assert!((MeasureGen::cantor().entropy() - 2f64.ln()).abs() < 1e-15);
        let h = markov_example().entropy();
        let expect = -(5.0 / 6.0) * (0.9f64 * 0.9f64.ln() + 0.1 * 0.1f64.ln()) - (1.0 / 6.0) * 2.0 * 0.5 * 0.5f64.ln();
        assert!((h - expect).abs() < 1e-14);
    }

    #[test]
    fn validation() {
        assert!(MeasureGen::bernoulli(vec![0.5, 0.6]).is_err());
        assert!(MeasureGen::bernoulli(vec![-0.1, 1.1]).is_err());
        assert!(MeasureGen::markov(vec![vec![1.0, 0.0], vec![0.2]]).is_err());
        assert!(MeasureGen::ifs_digits(3, vec![0, 3], vec![0.5, 0.5]).is_err());
        let bad = r#"{"kind":"markov","a":2,"transition":[[0.9,0.1],[0.5,0.5]],"stationary":[0.5,0.5]}"#;
        assert!(MeasureGen::from_json(bad).is_err());
    }

    #[test]
    fn json_round_trip() {
        for g in [MeasureGen::cantor(), markov_example(), MeasureGen::bernoulli(vec![0.25, 0.75]).unwrap()] {
            let json = serde_json::to_string(&g).unwrap();
            assert_eq!(MeasureGen::from_json(&json).unwrap(), g);
        }
        let g = MeasureGen::from_json(r#"{"kind":"ifs_digits","a":3,"digits":[0,2],"weights":[0.5,0.5]}"#).unwrap();
        assert_eq!(g, MeasureGen::cantor());
    }

    #[test]
    fn sampled_frequencies() {
        let g = markov_example();
        let mut rng = rng_from_seed(11);
        let xs = g.sample_digits(&mut rng, 200_000);
        let ones = xs.iter().filter(|&&d| d == 1).count() as f64 / xs.len() as f64;
        assert!((ones - 1.0 / 6.0).abs() < 0.01);
        let cantor = MeasureGen::cantor().sample_digits(&mut rng, 1000);
        assert!(cantor.iter().all(|&d| d == 0 || d == 2));

        let past = g.sample_past(&mut rng, 50);
        assert_eq!(past.len(), 50);
    }
}
