//! Correlation integrals `∫ μ(B_r(y)) dμ(y)` of piecewise-uniform measures.
//!
//! Working in atom units (`x = p·h`), the CDF `F` is piecewise linear and
//! `∫_{y∈atom i} F(y ± r) dy / h` is the average of `F` over a unit span
//! starting at `i ± s`, `s = r/h`. Such a span meets at most two atoms, so
//! every term is evaluated locally and nothing cancels at scale `1/h`.

use super::adic_measure::AdicMeasure;
use crate::error::{Error, Result};
use crate::stats;

/// Finest resolution accepted: atoms at most `r/16` wide.
pub const RESOLUTION_FACTOR: f64 = 16.0;

struct Cdf<'a> {
    weights: &'a [f64],
    /// `F` at the left end of every atom; `prefix[M] = 1`.
    prefix: Vec<f64>,
}

impl Cdf<'_> {
    /// `(F at the atom's left end, atom weight)`, extended by `(0, 0)` on the
    /// left and `(1, 0)` on the right.
    fn atom(&self, j: i64) -> (f64, f64) {
        let m = self.weights.len() as i64;
        if j < 0 {
            (0.0, 0.0)
        } else if j >= m {
            (1.0, 0.0)
        } else {
            (self.prefix[j as usize], self.weights[j as usize])
        }
    }

    /// `∫_p^{p+1} F(q) dq` in atom units.
    fn unit_average(&self, p: f64) -> f64 {
        let j = p.floor();
        let t = p - j;
        let (f0, w0) = self.atom(j as i64);
        let (f1, w1) = self.atom(j as i64 + 1);
        // Tail of atom j over [t, 1], head of atom j+1 over [0, t].
        f0 * (1.0 - t) + w0 * (1.0 - t * t) / 2.0 + f1 * t + w1 * t * t / 2.0
    }
}

pub(crate) fn correlation_integral(mu: &AdicMeasure, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::input(format!("correlation radius must be positive, got {r}")));
    }
    if r >= 1.0 {
        return Ok(1.0);
    }
    let h = mu.atom_width();
    if h > r / RESOLUTION_FACTOR {
        return Err(Error::Resolution(format!(
            "atoms of width {h:.3e} are too coarse for r = {r:.3e}; need level with a^-level <= r/{RESOLUTION_FACTOR}"
        )));
    }
    let weights = mu.weights();
    let mut prefix = Vec::with_capacity(weights.len() + 1);
    let mut acc = 0.0;
    prefix.push(0.0);
    for &w in weights {
        acc += w;
        prefix.push(acc);
    }
    let cdf = Cdf { weights, prefix };
    let s = r / h;
    let mut total = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let p = i as f64;
        total += w * (cdf.unit_average(p + s) - cdf.unit_average(p - s));
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Least-squares slope of `log C(r)` against `log r`.
pub fn correlation_log_slope(mu: &AdicMeasure, radii: &[f64]) -> Result<f64> {
    let mut xs = Vec::with_capacity(radii.len());
    let mut ys = Vec::with_capacity(radii.len());
    for &r in radii {
        let c = correlation_integral(mu, r)?;
        if c <= 0.0 {
            return Err(Error::Numerical(format!("correlation integral vanishes at r = {r}")));
        }
        xs.push(r.ln());
        ys.push(c.ln());
    }
    Ok(stats::slope(&xs, &ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{CylinderWord, MeasureGen};

    /// Brute-force midpoint double sum with `sub` points per atom.
    fn brute(mu: &AdicMeasure, r: f64, sub: usize) -> f64 {
        let h = mu.atom_width();
        let pts: Vec<(f64, f64)> = mu
            .weights()
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .flat_map(|(k, &w)| (0..sub).map(move |j| ((k as f64 + (j as f64 + 0.5) / sub as f64) * h, w / sub as f64)))
            .collect();
        let mut total = 0.0;
        for &(x, wx) in &pts {
            for &(y, wy) in &pts {
                if (x - y).abs() < r {
                    total += wx * wy;
                }
            }
        }
        total
    }

    #[test]
    fn uniform_closed_form() {
        let u = AdicMeasure::uniform(2, 10).unwrap();
        for r in [0.1, 0.05, 0.3, 0.77] {
            let c = u.correlation_integral(r).unwrap();
            assert!((c - (2.0 * r - r * r)).abs() < 1e-13, "r={r}: {c}");
        }
        let coarse = AdicMeasure::uniform(2, 8).unwrap();
        assert!((coarse.correlation_integral(0.1).unwrap() - 0.19).abs() < 1e-13);
        assert!((brute(&coarse, 0.1, 4) - 0.19).abs() < 5e-3);
    }

    #[test]
    fn saturation_and_guard() {
        let u = AdicMeasure::uniform(3, 2).unwrap();
        assert_eq!(u.correlation_integral(1.0).unwrap(), 1.0);
        assert_eq!(u.correlation_integral(5.0).unwrap(), 1.0);
        assert!(matches!(u.correlation_integral(0.1), Err(Error::Resolution(_))));
        assert!(u.correlation_integral(0.0).is_err());
    }

    #[test]
    fn point_mass_atom() {
        // A single atom of width h: any r ≥ h sees everything. The guard needs
        // r ≥ 16h, so the smallest admissible radius is 16h.
        let w = CylinderWord::new(2, vec![1, 0, 1, 1, 0, 1]).unwrap();
        let p = AdicMeasure::point_mass(&w).unwrap();
        let h = p.atom_width();
        assert_eq!(p.correlation_integral(16.0 * h).unwrap(), 1.0);
        let fine = (0..5).fold(p, |m, _| m.refine().unwrap());
        assert!((fine.correlation_integral(h).unwrap() - 1.0).abs() < 1e-14);
        // Below one atom: 2(r/h) − (r/h)² for the uniform bump.
        let c = fine.correlation_integral(h / 2.0).unwrap();
        assert!((c - 0.75).abs() < 1e-14);
    }

    #[test]
    fn matches_brute_force() {
        let gens = [MeasureGen::cantor(), MeasureGen::markov(vec![vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap()];
        for g in &gens {
            let mu = g.realize(6).unwrap();
            let h = mu.atom_width();
            for r in [16.0 * h, 23.5 * h, 0.45, 0.6] {
                let exact = mu.correlation_integral(r).unwrap();
                let approx = brute(&mu, r, 8);
                assert!((exact - approx).abs() < 0.02 * exact, "r={r}: {exact} vs {approx}");
            }
        }
    }

    #[test]
    fn monotone_in_r() {
        let mu = MeasureGen::bernoulli(vec![0.2, 0.5, 0.3]).unwrap().realize(8).unwrap();
        let h = mu.atom_width();
        let mut prev = 0.0;
        for i in 0..400 {
            let r = 16.0 * h * 1.02f64.powi(i);
            let c = mu.correlation_integral(r).unwrap();
            assert!(c >= prev - 1e-15);
            prev = c;
        }
        assert_eq!(prev, 1.0);
    }

    #[test]
    fn cantor_dimension() {
        let mu = MeasureGen::cantor().realize(12).unwrap();
        let radii: Vec<f64> = (2..=8).map(|j| 3f64.powi(-j)).collect();
        let slope = correlation_log_slope(&mu, &radii).unwrap();
        assert!((slope - 2f64.ln() / 3f64.ln()).abs() < 0.05, "slope {slope}");
    }
}
