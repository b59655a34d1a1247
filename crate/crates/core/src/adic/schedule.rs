use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::fixed::log_ratio_fixed;
use crate::error::{Error, Result};

/// Write `n = root^exp` with the smallest possible `root`.
pub fn primitive_root(n: u64) -> (u64, u32) {
    assert!(n >= 2);
    for exp in (2..=63u32).rev() {
        let guess = (n as f64).powf(1.0 / exp as f64).round() as u64;
        for r in guess.saturating_sub(1).max(2)..=guess + 1 {
            if r.checked_pow(exp) == Some(n) {
                return (r, exp);
            }
        }
    }
    (n, 1)
}

/// True iff `a^i = b^j` for some `i, j ≥ 1`, i.e. `log b / log a` is rational.
pub fn multiplicatively_dependent(a: u64, b: u64) -> bool {
    primitive_root(a).0 == primitive_root(b).0
}

#[derive(Clone, Debug)]
enum Alpha {
    /// `⌊α · 2^bits⌋` (to an ulp or two).
    Irrational(BigUint),
    /// `α = num/den` exactly.
    Rational { num: u64, den: u64 },
}

/// The time change matching `×b` against `×a`.
///
/// With `α = log b / log a`, `n′ = ⌊αn⌋` and `z_n = αn mod 1` we have
/// `b^n = a^{n′} · a^{z_n}`. The floors are computed from a fixed-point `α`
/// with `float_bits` fractional bits; a floor that falls closer than
/// `2^−100` (or than the accumulated rounding) to an integer aborts the
/// construction instead of guessing.
#[derive(Clone, Debug)]
pub struct KroneckerSchedule {
    a: u64,
    b: u64,
    float_bits: u32,
    alpha: Alpha,
    alpha_f64: f64,
    nprime: Vec<u64>,
    z: Vec<f64>,
}

/// Serializable echo of a schedule for reports.
#[derive(Debug, Clone, Serialize)]
pub struct ScheduleSummary {
    pub a: u64,
    pub b: u64,
    pub float_bits: u32,
    pub alpha: f64,
    pub len: usize,
    pub dependent: bool,
}

impl KroneckerSchedule {
    pub const DEFAULT_FLOAT_BITS: u32 = 128;
    /// Floors closer than `2^−100` to an integer are refused.
    pub const FLOOR_MARGIN_BITS: u32 = 100;

    pub fn new(a: u64, b: u64, len: usize, float_bits: u32) -> Result<Self> {
        if a < 2 || b < 2 {
            return Err(Error::input(format!("a and b must be at least 2, got a={a}, b={b}")));
        }
        if float_bits < Self::FLOOR_MARGIN_BITS + 8 {
            return Err(Error::input(format!(
                "float_bits must be at least {}, got {float_bits}",
                Self::FLOOR_MARGIN_BITS + 8
            )));
        }
        let (ra, ea) = primitive_root(a);
        let (rb, eb) = primitive_root(b);
        let mut nprime = Vec::with_capacity(len + 1);
        let mut z = Vec::with_capacity(len + 1);
        let alpha = if ra == rb {
            let g = gcd(ea as u64, eb as u64);
            let (num, den) = (eb as u64 / g, ea as u64 / g);
            for n in 0..=len as u64 {
                nprime.push(num * n / den);
                z.push(((num * n) % den) as f64 / den as f64);
            }
            Alpha::Rational { num, den }
        } else {
            let raw = log_ratio_fixed(b, a, float_bits);
            let bits = float_bits as usize;
            let one = BigUint::from(1u32) << bits;
            let mask = &one - 1u32;
            let margin_floor = BigUint::from(1u32) << (bits - Self::FLOOR_MARGIN_BITS as usize);
            let mut acc = BigUint::from(0u32);
            nprime.push(0);
            z.push(0.0);
            for n in 1..=len as u64 {
                acc += &raw;
                let frac = &acc & &mask;
                let rounding = BigUint::from(4 * n + 4);
                let margin = if margin_floor > rounding { &margin_floor } else { &rounding };
                if &frac < margin || &(&one - &frac) < margin {
                    return Err(Error::Precision(format!(
                        "⌊αn⌋ is ambiguous at n={n} with {float_bits} bits; raise float_bits"
                    )));
                }
                nprime.push((&acc >> bits).to_u64().expect("n' fits u64"));
                let top = (frac >> (bits - 53)).to_u64().expect("53-bit fraction");
                z.push(top as f64 * 2f64.powi(-53));
            }
            Alpha::Irrational(raw)
        };
        let alpha_f64 = match &alpha {
            Alpha::Rational { num, den } => *num as f64 / *den as f64,
            Alpha::Irrational(raw) => {
                let shift = raw.bits().saturating_sub(64);
                (raw >> shift as usize).to_u64().unwrap() as f64 * 2f64.powi(shift as i32 - float_bits as i32)
            }
        };
        Ok(KroneckerSchedule { a, b, float_bits, alpha, alpha_f64, nprime, z })
    }

    pub fn with_default_bits(a: u64, b: u64, len: usize) -> Result<Self> {
        Self::new(a, b, len, Self::DEFAULT_FLOAT_BITS)
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn float_bits(&self) -> u32 {
        self.float_bits
    }

    /// `α = log b / log a`, rounded to a double.
    pub fn alpha(&self) -> f64 {
        self.alpha_f64
    }

    /// Fixed-point `α` as `(raw, bits)` with `α ≈ raw / 2^bits`.
    pub fn alpha_fixed(&self) -> (BigUint, u32) {
        match &self.alpha {
            Alpha::Irrational(raw) => (raw.clone(), self.float_bits),
            Alpha::Rational { num, den } => ((BigUint::from(*num) << self.float_bits as usize) / den, self.float_bits),
        }
    }

    /// True when `a` and `b` are powers of a common integer: `α` is then
    /// rational and `z_n` periodic.
    pub fn is_dependent(&self) -> bool {
        matches!(self.alpha, Alpha::Rational { .. })
    }

    /// Largest `n` covered by the tables.
    pub fn len(&self) -> usize {
        self.nprime.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `n′ = ⌊αn⌋`.
    pub fn nprime(&self, n: usize) -> u64 {
        self.nprime[n]
    }

    /// `z_n = αn mod 1`, truncated to 53 bits.
    pub fn z(&self, n: usize) -> f64 {
        self.z[n]
    }

    /// `a^{z_n} = b^n / a^{n′}`.
    pub fn scale(&self, n: usize) -> f64 {
        (self.a as f64).powf(self.z[n])
    }

    /// Recompute the floors at twice the precision and compare.
    pub fn floor_stable(&self) -> Result<bool> {
        let fine = KroneckerSchedule::new(self.a, self.b, self.len(), 2 * self.float_bits)?;
        Ok(fine.nprime == self.nprime)
    }

    pub fn summary(&self) -> ScheduleSummary {
        ScheduleSummary {
            a: self.a,
            b: self.b,
            float_bits: self.float_bits,
            alpha: self.alpha(),
            len: self.len(),
            dependent: self.is_dependent(),
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    /// `exp(x)` for a fixed-point `x ≥ 0` scaled by `2^bits`: range
    /// reduction by halving, Taylor series, repeated squaring.
    fn exp_fixed(x: &BigUint, bits: u32) -> BigUint {
        let halvings = 24usize;
        let work = bits as usize + 64;
        let one = BigUint::from(1u32) << work;
        let r = (x << (work - bits as usize)) >> halvings;
        let mut term = one.clone();
        let mut sum = one.clone();
        let mut k = 1u32;
        while term.bits() > 0 {
            term = ((&term * &r) >> work) / k;
            sum += &term;
            k += 1;
        }
        for _ in 0..halvings {
            sum = (&sum * &sum) >> work;
        }
        sum >> (work - bits as usize)
    }

    #[test]
    fn alpha_log2_log3() {
        let s = KroneckerSchedule::with_default_bits(3, 2, 10).unwrap();
        assert!((s.alpha() - 0.630_929_753_6).abs() < 1e-10);
        assert!((s.alpha() - 2f64.ln() / 3f64.ln()).abs() < 1e-15);
        assert!(!s.is_dependent());
        assert_eq!(s.nprime(2), 1);
        assert!((s.z(2) - 0.261_859_5).abs() < 1e-7);
        assert!((s.z(2) - (2.0 * s.alpha() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn three_to_alpha_is_two() {
        // exp(α · ln 3) = 2 at 128 bits, with ln 3 and exp from independent code.
        let s = KroneckerSchedule::with_default_bits(3, 2, 1).unwrap();
        let (raw, bits) = s.alpha_fixed();
        let ln3 = super::super::fixed::ln_fixed(3, bits);
        let product = (raw * ln3) >> bits as usize;
        let two = exp_fixed(&product, bits);
        let target = BigUint::from(2u32) << bits as usize;
        let diff = if two > target { &two - &target } else { &target - &two };
        assert!(diff.bits() <= 10, "3^α − 2 off by {} ulps", diff);
    }

    #[test]
    fn dependent_pair() {
        let s = KroneckerSchedule::with_default_bits(2, 4, 50).unwrap();
        assert!(s.is_dependent());
        assert_eq!(s.alpha(), 2.0);
        assert!((1..=50).all(|n| s.z(n) == 0.0 && s.nprime(n) == 2 * n as u64));

        let s = KroneckerSchedule::with_default_bits(8, 4, 6).unwrap();
        assert!(s.is_dependent());
        assert_eq!(s.nprime(3), 2);
        assert!((s.z(1) - 2.0 / 3.0).abs() < 1e-15);
        assert!(multiplicatively_dependent(27, 9));
        assert!(!multiplicatively_dependent(6, 12));
    }

    #[test]
    fn schedule_invariants() {
        for (a, b) in [(3u64, 2u64), (2, 3), (10, 7), (5, 12)] {
            let s = KroneckerSchedule::with_default_bits(a, b, 20_000).unwrap();
            let fl = s.alpha().floor() as u64;
            for n in 1..=s.len() {
                let step = s.nprime(n) - s.nprime(n - 1);
                assert!(step == fl || step == fl + 1);
                assert!((0.0..1.0).contains(&s.z(n)));
            }
            // b^n = a^{n'} a^{z_n} for small n, checked in doubles.
            for n in 1..=20usize {
                let lhs = n as f64 * (b as f64).ln();
                let rhs = (s.nprime(n) as f64 + s.z(n)) * (a as f64).ln();
                assert!((lhs - rhs).abs() < 1e-12 * lhs, "a={a} b={b} n={n}");
            }
            assert!(s.floor_stable().unwrap());
        }
    }

    #[test]
    fn rejects_low_precision_and_bad_bases() {
        assert!(matches!(KroneckerSchedule::new(3, 2, 10, 64), Err(Error::Input(_))));
        assert!(KroneckerSchedule::new(1, 2, 10, 128).is_err());
    }

    #[test]
    fn roots() {
        assert_eq!(primitive_root(64), (2, 6));
        assert_eq!(primitive_root(12), (12, 1));
        assert_eq!(primitive_root(1 << 62), (2, 62));
        assert_eq!(primitive_root(3u64.pow(40)), (3, 40));
    }
}
