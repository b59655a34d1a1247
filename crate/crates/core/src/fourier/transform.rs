use num_complex::Complex64;

use crate::e;
use crate::error::{Error, Result};
use crate::measure::{AdicMeasure, MeasureGen};

/// A finite measure on the line with a computable Fourier transform
/// `ν̂(ξ) = ∫ e(ξx) dν(x)`.
pub trait LineMeasure {
    fn fourier(&self, xi: f64) -> Complex64;

    /// Diameter of the support (or an upper bound).
    fn diameter(&self) -> f64;

    /// `∫ ν(B_r(y)) dν(y)`.
    fn correlation_integral(&self, r: f64) -> Result<f64>;
}

impl<T: LineMeasure + ?Sized> LineMeasure for &T {
    fn fourier(&self, xi: f64) -> Complex64 {
        (**self).fourier(xi)
    }

    fn diameter(&self) -> f64 {
        (**self).diameter()
    }

    fn correlation_integral(&self, r: f64) -> Result<f64> {
        (**self).correlation_integral(r)
    }
}

/// `sin(u)/u`.
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// One level of the pruned digit tree: every surviving node names its parent
/// (index into the level above) and the digit leading to it.
#[derive(Clone, Debug)]
struct TreeLevel {
    parent: Vec<u32>,
    digit: Vec<u32>,
}

#[derive(Clone, Debug)]
enum Evaluator {
    /// `Σ_k w_k z^k` evaluated up the digit tree of the nonzero atoms.
    Tree { leaves: Vec<f64>, levels: Vec<TreeLevel> },
    /// i.i.d. digits: `Π_j Σ_d p_d e(ξ d a^{−j})`.
    Product { law: Vec<f64> },
    /// Markov digits: a vector–matrix product over the levels.
    Transfer { initial: Vec<f64>, rows: Vec<Vec<f64>> },
}

/// Fourier transform of a piecewise-uniform [`AdicMeasure`], prepared for
/// repeated evaluation.
///
/// With `h = a^−n` and centres `c_k = (k+½)h`,
/// `μ̂(ξ) = sinc(πξh) Σ_k w_k e(ξ c_k)`. The sum is evaluated level by level
/// in the digits of `k`, either over the pruned tree of nonzero atoms or, for
/// measures realized from a generator, in product / transfer-matrix form.
#[derive(Clone, Debug)]
pub struct AdicTransform {
    measure: AdicMeasure,
    eval: Evaluator,
    diameter: f64,
}

impl AdicTransform {
    pub fn new(measure: &AdicMeasure) -> Self {
        let a = measure.base() as usize;
        let mut leaves = Vec::new();
        let mut index = Vec::new();
        for (k, &w) in measure.weights().iter().enumerate() {
            if w != 0.0 {
                leaves.push(w);
                index.push(k);
            }
        }
        let mut levels = Vec::with_capacity(measure.level());
        for _ in 0..measure.level() {
            let mut parent = Vec::with_capacity(index.len());
            let mut digit = Vec::with_capacity(index.len());
            let mut up: Vec<usize> = Vec::new();
            for &k in &index {
                let p = k / a;
                if up.last() != Some(&p) {
                    up.push(p);
                }
                parent.push((up.len() - 1) as u32);
                digit.push((k % a) as u32);
            }
            levels.push(TreeLevel { parent, digit });
            index = up;
        }
        let diameter = support_diameter(measure);
        AdicTransform { measure: measure.clone(), eval: Evaluator::Tree { leaves, levels }, diameter }
    }

    /// The level-`level` measure of `gen` started in `state` (see
    /// [`MeasureGen::realize_from`]), with the transform in closed product
    /// form.
    pub fn from_generator(gen: &MeasureGen, state: Option<u32>, level: usize) -> Result<Self> {
        let measure = gen.realize_from(state, level)?;
        let eval = match gen.transition() {
            Some(rows) => Evaluator::Transfer { initial: gen.next_law(state).to_vec(), rows: rows.to_vec() },
            None => Evaluator::Product { law: gen.initial_law().to_vec() },
        };
        let diameter = support_diameter(&measure);
        Ok(AdicTransform { measure, eval, diameter })
    }

    pub fn measure(&self) -> &AdicMeasure {
        &self.measure
    }

    /// `Σ_k w_k e(ξ k h)` without the atom factor.
    fn digit_sum(&self, xi: f64) -> Complex64 {
        let a = self.measure.base() as usize;
        let n = self.measure.level();
        let ainv = 1.0 / a as f64;
        match &self.eval {
            Evaluator::Tree { leaves, levels } => {
                let mut vals: Vec<Complex64> = leaves.iter().map(|&w| Complex64::new(w, 0.0)).collect();
                let mut twiddle = vec![Complex64::new(1.0, 0.0); a];
                // Level j from the bottom carries digit weight a^{j}·h.
                let mut step = xi * (a as f64).powi(-(n as i32));
                for lvl in levels {
                    for (d, tw) in twiddle.iter_mut().enumerate().skip(1) {
                        *tw = e(step * d as f64);
                    }
                    let len = lvl.parent.last().map_or(0, |&p| p as usize + 1);
                    let mut up = vec![Complex64::new(0.0, 0.0); len];
                    for ((v, &p), &d) in vals.iter().zip(&lvl.parent).zip(&lvl.digit) {
                        up[p as usize] += v * twiddle[d as usize];
                    }
                    vals = up;
                    step *= a as f64;
                }
                vals.first().copied().unwrap_or_default()
            }
            Evaluator::Product { law } => {
                let mut acc = Complex64::new(1.0, 0.0);
                let mut scale = xi;
                for _ in 0..n {
                    scale *= ainv;
                    let mut f = Complex64::new(law[0], 0.0);
                    for (d, &p) in law.iter().enumerate().skip(1) {
                        if p != 0.0 {
                            f += e(scale * d as f64) * p;
                        }
                    }
                    acc *= f;
                }
                acc
            }
            Evaluator::Transfer { initial, rows } => {
                let mut scale = xi * ainv;
                let phases: Vec<Complex64> = (0..a).map(|d| e(scale * d as f64)).collect();
                let mut v: Vec<Complex64> = initial.iter().zip(&phases).map(|(&p, z)| z * p).collect();
                for _ in 1..n {
                    scale *= ainv;
                    let phases: Vec<Complex64> = (0..a).map(|d| e(scale * d as f64)).collect();
                    let mut next = vec![Complex64::new(0.0, 0.0); a];
                    for (s, vs) in v.iter().enumerate() {
                        if *vs == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for (d, &p) in rows[s].iter().enumerate() {
                            next[d] += vs * p;
                        }
                    }
                    for (x, z) in next.iter_mut().zip(&phases) {
                        *x *= z;
                    }
                    v = next;
                }
                if n == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    v.iter().sum()
                }
            }
        }
    }
}

fn support_diameter(m: &AdicMeasure) -> f64 {
    let w = m.weights();
    match (w.iter().position(|&x| x > 0.0), w.iter().rposition(|&x| x > 0.0)) {
        (Some(lo), Some(hi)) => (hi - lo + 1) as f64 * m.atom_width(),
        _ => 0.0,
    }
}

impl LineMeasure for AdicTransform {
    fn fourier(&self, xi: f64) -> Complex64 {
        let h = self.measure.atom_width();
        self.digit_sum(xi) * e(0.5 * xi * h) * sinc(std::f64::consts::PI * xi * h)
    }

    fn diameter(&self) -> f64 {
        self.diameter
    }

    fn correlation_integral(&self, r: f64) -> Result<f64> {
        self.measure.correlation_integral(r)
    }
}

/// `F_ξ(μ)` for a piecewise-uniform measure: closed form, no sampling.
pub fn ft_adic(mu: &AdicMeasure, xi: f64) -> Complex64 {
    AdicTransform::new(mu).fourier(xi)
}

/// `F_m(S_t μ) = μ̂(m t)`.
pub fn ft_scaled(mu: &AdicMeasure, t: f64, m: i64) -> Result<Complex64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::input(format!("scale must be positive, got {t}")));
    }
    Ok(ft_adic(mu, m as f64 * t))
}

/// Finitely many point masses.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<(f64, f64)>,
}

impl AtomicMeasure {
    /// `(position, weight)` pairs with nonnegative weights summing to 1.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() || atoms.iter().any(|&(x, w)| !x.is_finite() || !(w >= 0.0)) {
            return Err(Error::input("atoms need finite positions and nonnegative weights"));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!("atom weights sum to {total}")));
        }
        Ok(AtomicMeasure { atoms })
    }

    pub fn dirac(x: f64) -> Self {
        AtomicMeasure { atoms: vec![(x, 1.0)] }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
}

impl LineMeasure for AtomicMeasure {
    fn fourier(&self, xi: f64) -> Complex64 {
        self.atoms.iter().map(|&(x, w)| e(xi * x) * w).sum()
    }

    fn diameter(&self) -> f64 {
        let lo = self.atoms.iter().map(|a| a.0).fold(f64::INFINITY, f64::min);
        let hi = self.atoms.iter().map(|a| a.0).fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }

    fn correlation_integral(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::input(format!("correlation radius must be positive, got {r}")));
        }
        let mut total = 0.0;
        for &(x, wx) in &self.atoms {
            for &(y, wy) in &self.atoms {
                if (x - y).abs() < r {
                    total += wx * wy;
                }
            }
        }
        Ok(total)
    }
}

/// The pushforward `S_t ν` of a measure under `x ↦ tx`, `t > 0`.
#[derive(Clone, Debug)]
pub struct Scaled<M> {
    inner: M,
    t: f64,
}

impl<M: LineMeasure> Scaled<M> {
    pub fn new(inner: M, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::input(format!("scale must be positive, got {t}")));
        }
        Ok(Scaled { inner, t })
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }

    pub fn scale(&self) -> f64 {
        self.t
    }
}

impl<M: LineMeasure> LineMeasure for Scaled<M> {
    fn fourier(&self, xi: f64) -> Complex64 {
        self.inner.fourier(self.t * xi)
    }

    fn diameter(&self) -> f64 {
        self.t * self.inner.diameter()
    }

    /// `S_t ν(B_r(ty)) = ν(B_{r/t}(y))`.
    fn correlation_integral(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::input(format!("correlation radius must be positive, got {r}")));
        }
        self.inner.correlation_integral(r / self.t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::CylinderWord;
    use crate::seed::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    /// Atom-by-atom closed form, independent of the digit evaluators.
    fn direct(mu: &AdicMeasure, xi: f64) -> Complex64 {
        let h = mu.atom_width();
        let s = sinc(std::f64::consts::PI * xi * h);
        mu.weights().iter().enumerate().map(|(k, &w)| e(xi * (k as f64 + 0.5) * h) * (w * s)).sum()
    }

    fn markov() -> MeasureGen {
        MeasureGen::markov(vec![vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap()
    }

    #[test]
    fn trivial_values() {
        let u = AdicMeasure::uniform(3, 5).unwrap();
        for m in [1.0, -2.0, 7.0] {
            assert!(ft_adic(&u, m).norm() < 1e-14);
        }
        for g in [MeasureGen::cantor(), markov()] {
            let mu = g.realize(6).unwrap();
            assert!((ft_adic(&mu, 0.0) - 1.0).norm() < 1e-15);
        }
        let delta = AtomicMeasure::dirac(0.0);
        for t in [0.3, 1.0, 17.0] {
            for m in [-3i64, 1, 5] {
                assert_eq!(Scaled::new(&delta, t).unwrap().fourier(m as f64), Complex64::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn evaluators_agree_with_direct_sum() {
        let gens = [MeasureGen::cantor(), markov(), MeasureGen::bernoulli(vec![0.1, 0.6, 0.3]).unwrap()];
        for g in &gens {
            let mu = g.realize(7).unwrap();
            let tree = AdicTransform::new(&mu);
            let prod = AdicTransform::from_generator(g, None, 7).unwrap();
            for xi in [1.0, -2.5, 13.0, 300.7, 4000.0] {
                let d = direct(&mu, xi);
                assert!((tree.fourier(xi) - d).norm() < 1e-12, "{xi}");
                assert!((prod.fourier(xi) - d).norm() < 1e-12, "{xi}");
            }
        }
        let m = markov();
        let c1 = m.realize_from(Some(1), 6).unwrap();
        let t1 = AdicTransform::from_generator(&m, Some(1), 6).unwrap();
        assert!((t1.fourier(3.3) - direct(&c1, 3.3)).norm() < 1e-12);
    }

    #[test]
    fn cantor_against_infinite_product() {
        // The Cantor measure has μ̂(ξ) = Π_j (1 + e(2ξ/3^j))/2; the level-12
        // discretisation differs from it by O((ξ 3^{−12})²).
        let mu = MeasureGen::cantor().realize(12).unwrap();
        let exact: Complex64 = (1..=60).map(|j| (e(2.0 * 3f64.powi(-j)) + 1.0) * 0.5).product();
        assert!((ft_adic(&mu, 1.0) - exact).norm() < 1e-6);

        let mut rng = rng_from_seed(5);
        let n = 200_000;
        let g = MeasureGen::cantor();
        let mut acc = Complex64::new(0.0, 0.0);
        for _ in 0..n {
            let digits = g.sample_digits(&mut rng, 40);
            let x = digits.iter().rev().fold(0.0, |s, &d| (s + d as f64) / 3.0);
            acc += e(x);
        }
        let mc = acc / n as f64;
        assert!((mc - exact).norm() < 4.0 * (1.0 / n as f64).sqrt());
    }

    #[test]
    fn scaling_and_rotation() {
        let mu = markov().realize(10).unwrap();
        let h = mu.atom_width();
        for t in [0.5, 1.0, 2.0, 9.75] {
            for m in [-3i64, 1, 4] {
                let v = ft_scaled(&mu, t, m).unwrap();
                // Direct transform of the rescaled atoms [t k h, t (k+1) h).
                let th = t * h;
                let xi = m as f64;
                let s = sinc(std::f64::consts::PI * xi * th);
                let w: Complex64 = mu.weights().iter().enumerate().map(|(k, &w)| e(xi * (k as f64 + 0.5) * th) * (w * s)).sum();
                assert!((v - w).norm() < 1e-12);
            }
        }
        assert_eq!(ft_scaled(&mu, 1.0, 3).unwrap(), ft_adic(&mu, 3.0));
        assert!(ft_scaled(&mu, 0.0, 1).is_err());

        // |F_m(R_θ ν)| = |F_m(ν)| with R_θ the rotation mod 1.
        for theta in [0.1, 1.0 / 3.0, 0.99] {
            for m in [1i64, 2, 5] {
                let xi = m as f64;
                let s = sinc(std::f64::consts::PI * xi * h);
                let rotated: Complex64 = mu
                    .weights()
                    .iter()
                    .enumerate()
                    .map(|(k, &w)| e(xi * ((k as f64 + 0.5) * h + theta).fract()) * (w * s))
                    .sum();
                assert!((rotated.norm() - ft_adic(&mu, xi).norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sparse_tree() {
        let w = CylinderWord::new(5, vec![4, 0, 3, 1]).unwrap();
        let p = AdicMeasure::point_mass(&w).unwrap();
        let t = AdicTransform::new(&p);
        assert!((t.diameter() - 5f64.powi(-4)).abs() < 1e-18);
        for xi in [1.0, 77.0] {
            assert!((t.fourier(xi) - direct(&p, xi)).norm() < 1e-12, "{xi}: {} vs {}", t.fourier(xi), direct(&p, xi));
        }
        let mut rng = rng_from_seed(8);
        let mut weights = vec![0.0; 3usize.pow(6)];
        for _ in 0..20 {
            let k = rng.random_range(0..weights.len());
            weights[k] += 0.05;
        }
        let mu = AdicMeasure::new(3, 6, weights).unwrap();
        let t = AdicTransform::new(&mu);
        for xi in [0.5, 10.0, 123.0] {
            assert!((t.fourier(xi) - direct(&mu, xi)).norm() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn conjugate_symmetry(xi in -500.0f64..500.0, p in 0.05f64..0.95) {
            let g = MeasureGen::bernoulli(vec![p, 1.0 - p]).unwrap();
            let t = AdicTransform::from_generator(&g, None, 9).unwrap();
            prop_assert!((t.fourier(-xi) - t.fourier(xi).conj()).norm() < 1e-13);
            prop_assert!(t.fourier(xi).norm() <= 1.0 + 1e-12);
        }
    }
}
