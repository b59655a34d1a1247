//! Gauss–Legendre rules: fixed panels for smooth oscillatory integrands and a
//! bisecting variant with an absolute tolerance.

use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const GL_POINTS: usize = 16;

/// Nodes and weights of the 16-point rule on `[−1, 1]`.
pub fn gauss_legendre16() -> &'static ([f64; GL_POINTS], [f64; GL_POINTS]) {
    static RULE: OnceLock<([f64; GL_POINTS], [f64; GL_POINTS])> = OnceLock::new();
    RULE.get_or_init(legendre_rule::<GL_POINTS>)
}

/// Newton iteration on `P_n` from the Chebyshev-like initial guesses.
fn legendre_rule<const N: usize>() -> ([f64; N], [f64; N]) {
    let mut nodes = [0.0; N];
    let mut weights = [0.0; N];
    let n = N as f64;
    for i in 0..N {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=N {
                let k = k as f64;
                (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `∫_lo^hi f` with one 16-point panel.
pub fn gl16<T, F>(f: &F, lo: f64, hi: f64) -> T
where
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
    F: Fn(f64) -> T + ?Sized,
{
    let (nodes, weights) = gauss_legendre16();
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut acc = T::default();
    for (x, w) in nodes.iter().zip(weights) {
        acc = acc + f(mid + half * x) * (w * half);
    }
    acc
}

/// `∫_lo^hi f` over `panels` equal panels. Panels are evaluated in parallel
/// and summed in index order, so the result does not depend on scheduling.
pub fn gl16_panels<F>(f: &F, lo: f64, hi: f64, panels: usize) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    let width = (hi - lo) / panels as f64;
    let parts: Vec<f64> = (0..panels)
        .into_par_iter()
        .with_min_len(8)
        .map(|i| {
            let a = lo + i as f64 * width;
            let b = if i + 1 == panels { hi } else { a + width };
            gl16(f, a, b)
        })
        .collect();
    parts.iter().sum()
}

/// Adaptive bisection on 16-point panels to absolute tolerance `tol`.
///
/// The interval is first cut into `initial` panels (resolve known
/// oscillations up front, so the first comparison is not fooled by aliasing).
pub fn adaptive_gl16<F>(f: &F, lo: f64, hi: f64, initial: usize, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    const MAX_DEPTH: u32 = 40;

    fn recurse<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, whole: Complex64, tol: f64, depth: u32) -> Result<Complex64> {
        let m = 0.5 * (a + b);
        let left = gl16(f, a, m);
        let right = gl16(f, m, b);
        let both = left + right;
        if (both - whole).norm() <= tol {
            return Ok(both);
        }
        if depth == 0 {
            return Err(Error::Numerical(format!("adaptive quadrature did not converge on [{a}, {b}]")));
        }
        Ok(recurse(f, a, m, left, tol / 2.0, depth - 1)? + recurse(f, m, b, right, tol / 2.0, depth - 1)?)
    }

    let panels = initial.max(1);
    let width = (hi - lo) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..panels {
        let a = lo + i as f64 * width;
        let b = if i + 1 == panels { hi } else { a + width };
        total += recurse(f, a, b, gl16(f, a, b), tol / panels as f64, MAX_DEPTH)?;
    }
    Ok(total)
}
