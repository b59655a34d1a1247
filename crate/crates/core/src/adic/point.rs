use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `x = numerator / base^precision` of `[0, 1)`.
///
/// The representation is exact: `×t mod 1` acts on the numerator modulo
/// `base^precision`, so orbits never drift. Digits are indexed from 1, most
/// significant first, and the interval of a digit word is half-open.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PointRecord", into = "PointRecord")]
pub struct UnitPoint {
    base: u32,
    precision: usize,
    numerator: BigUint,
}

/// Reproducibility-log form: `{base, L, numerator}` with a decimal numerator.
#[derive(Serialize, Deserialize)]
struct PointRecord {
    base: u32,
    #[serde(rename = "L")]
    precision: usize,
    numerator: String,
}

impl TryFrom<PointRecord> for UnitPoint {
    type Error = Error;

    fn try_from(rec: PointRecord) -> Result<Self> {
        let numerator = rec
            .numerator
            .parse::<BigUint>()
            .map_err(|e| Error::input(format!("numerator {:?}: {e}", rec.numerator)))?;
        UnitPoint::new(rec.base, rec.precision, numerator)
    }
}

impl From<UnitPoint> for PointRecord {
    fn from(p: UnitPoint) -> Self {
        PointRecord { base: p.base, precision: p.precision, numerator: p.numerator.to_str_radix(10) }
    }
}

pub(crate) fn check_base(base: u32) -> Result<()> {
    if base < 2 {
        return Err(Error::input(format!("base must be at least 2, got {base}")));
    }
    Ok(())
}

impl UnitPoint {
    pub fn new(base: u32, precision: usize, numerator: BigUint) -> Result<Self> {
        check_base(base)?;
        if precision == 0 {
            return Err(Error::input("precision must be at least one digit"));
        }
        let p = UnitPoint { base, precision, numerator };
        if p.numerator >= p.modulus() {
            return Err(Error::input(format!("numerator is not below {base}^{precision}")));
        }
        Ok(p)
    }

    pub fn zero(base: u32, precision: usize) -> Result<Self> {
        Self::new(base, precision, BigUint::zero())
    }

    /// The point whose base-`base` expansion is exactly `digits`.
    pub fn from_digits(base: u32, digits: &[u32]) -> Result<Self> {
        check_base(base)?;
        if digits.is_empty() {
            return Err(Error::input("empty digit word"));
        }
        if let Some((j, d)) = digits.iter().enumerate().find(|(_, &d)| d >= base) {
            return Err(Error::input(format!("digit {d} at position {} is outside [0, {base})", j + 1)));
        }
        let numerator = if base <= 256 {
            let bytes: Vec<u8> = digits.iter().map(|&d| d as u8).collect();
            BigUint::from_radix_be(&bytes, base).expect("digits validated")
        } else {
            horner(base, digits)
        };
        Ok(UnitPoint { base, precision: digits.len(), numerator })
    }

    /// `num/den` stored at `precision` digits; fails unless the value is an
    /// exact `base`-adic rational at that precision.
    pub fn from_ratio(base: u32, precision: usize, num: u64, den: u64) -> Result<Self> {
        check_base(base)?;
        if den == 0 || num >= den {
            return Err(Error::input(format!("{num}/{den} is not in [0, 1)")));
        }
        let scaled = BigUint::from(num) * BigUint::from(base).pow(precision as u32);
        let den = BigUint::from(den);
        if !(&scaled % &den).is_zero() {
            return Err(Error::input(format!("{num}/{den} is not representable over {base}^{precision}")));
        }
        Self::new(base, precision, scaled / den)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Number of retained base-`a` digits (`L`).
    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    /// `base^precision`.
    pub fn modulus(&self) -> BigUint {
        BigUint::from(self.base).pow(self.precision as u32)
    }

    /// Digit `j` (1-based): `⌊numerator / base^(L−j)⌋ mod base`.
    pub fn digit(&self, j: usize) -> u32 {
        assert!(j >= 1 && j <= self.precision, "digit index {j} outside 1..={}", self.precision);
        let shifted = &self.numerator / BigUint::from(self.base).pow((self.precision - j) as u32);
        (shifted % self.base).to_u32().expect("digit below base")
    }

    /// All `L` digits, most significant first.
    pub fn digits(&self) -> Vec<u32> {
        let raw: Vec<u32> = if self.base <= 256 {
            self.numerator.to_radix_be(self.base).into_iter().map(u32::from).collect()
        } else {
            let mut out = Vec::new();
            let mut n = self.numerator.clone();
            while !n.is_zero() {
                out.push((&n % self.base).to_u32().unwrap());
                n /= self.base;
            }
            out.reverse();
            out
        };
        let raw = if self.numerator.is_zero() { Vec::new() } else { raw };
        let mut digits = vec![0; self.precision - raw.len()];
        digits.extend(raw);
        digits
    }

    /// `T_t x = t·x mod 1` at the same denominator.
    pub fn mul_mod1(&self, t: u64) -> Result<Self> {
        if t == 0 {
            return Err(Error::input("multiplier must be positive"));
        }
        let numerator = (&self.numerator * BigUint::from(t)) % self.modulus();
        Ok(UnitPoint { numerator, ..self.clone() })
    }

    /// `T_a^k x`: drops the first `k` digits (exact).
    pub fn shift_digits(&self, k: usize) -> Self {
        let k = k.min(self.precision);
        let keep = BigUint::from(self.base).pow((self.precision - k) as u32);
        let numerator = (&self.numerator % &keep) * BigUint::from(self.base).pow(k as u32);
        UnitPoint { numerator, ..self.clone() }
    }

    /// `⌊x·2^bits⌋ / 2^bits`: the top `bits` binary digits of `x`.
    ///
    /// # Panics
    /// If `bits` is outside `1..=64`.
    pub fn to_real(&self, bits: u32) -> f64 {
        assert!((1..=64).contains(&bits), "to_real supports 1..=64 bits, got {bits}");
        let q = (&self.numerator << bits as usize) / self.modulus();
        q.to_u64().expect("quotient below 2^bits") as f64 / (bits as f64).exp2()
    }
}

impl fmt::Debug for UnitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.precision <= 40 {
            write!(f, "UnitPoint({}/{}^{})", self.numerator, self.base, self.precision)
        } else {
            write!(f, "UnitPoint(~{:.15}, base {}, L {})", self.to_real(53), self.base, self.precision)
        }
    }
}

fn horner(base: u32, digits: &[u32]) -> BigUint {
    // Chunk digits into u64 words to keep the big multiplications few.
    let per_chunk = (63.0 / (base as f64).log2()).floor().max(1.0) as usize;
    let mut acc = BigUint::zero();
    for chunk in digits.chunks(per_chunk) {
        let mut word: u64 = 0;
        let mut scale: u64 = 1;
        for &d in chunk {
            word = word * base as u64 + d as u64;
            scale *= base as u64;
        }
        acc = acc * BigUint::from(scale) + BigUint::from(word);
    }
    acc
}

/// Retained precision for an orbit of length `n_max` under `×multiplier` of a
/// point stored in `base`.
///
/// Each `×b` step consumes `log_a b` base-`a` digits of information, so
/// `L = ⌈n_max · log_a b⌉ + guard_digits` leaves `guard_digits` meaningful
/// digits at the last step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionBudget {
    pub base: u32,
    pub multiplier: u64,
    pub n_max: usize,
    pub guard_digits: usize,
    pub precision: usize,
}

impl PrecisionBudget {
    pub const DEFAULT_GUARD_DIGITS: usize = 64;

    pub fn new(base: u32, multiplier: u64, n_max: usize, guard_digits: usize) -> Result<Self> {
        check_base(base)?;
        if multiplier == 0 {
            return Err(Error::input("multiplier must be positive"));
        }
        let per_step = (multiplier as f64).ln() / (base as f64).ln();
        let consumed = (n_max as f64 * per_step).ceil() as usize;
        Ok(PrecisionBudget { base, multiplier, n_max, guard_digits, precision: consumed + guard_digits })
    }

    pub fn with_default_guard(base: u32, multiplier: u64, n_max: usize) -> Result<Self> {
        Self::new(base, multiplier, n_max, Self::DEFAULT_GUARD_DIGITS)
    }

    /// Fails with a precision error unless `x` carries at least
    /// `extra + precision` digits in this budget's base.
    pub fn check(&self, x: &UnitPoint, extra: usize) -> Result<()> {
        if x.base() != self.base {
            return Err(Error::input(format!("point base {} does not match budget base {}", x.base(), self.base)));
        }
        let need = self.precision + extra;
        if x.precision() < need {
            return Err(Error::Precision(format!(
                "point keeps {} base-{} digits but an orbit of length {} needs {need}",
                x.precision(),
                self.base,
                self.n_max
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn positional_evaluation() {
        let x = UnitPoint::from_digits(3, &[0, 2, 0]).unwrap();
        assert_eq!(x.numerator(), &BigUint::from(6u32));
        assert_eq!(x.modulus(), BigUint::from(27u32));

        let zero = UnitPoint::from_digits(2, &[0, 0, 0]).unwrap();
        assert!(zero.numerator().is_zero());
        assert_eq!(zero.to_real(53), 0.0);

        let pi = UnitPoint::from_digits(10, &[1, 4, 1, 5, 9]).unwrap();
        assert_eq!(pi.numerator(), &BigUint::from(14159u32));
        assert_eq!(pi.modulus(), BigUint::from(100_000u32));
    }

    #[test]
    fn rejects_bad_digits() {
        assert!(matches!(UnitPoint::from_digits(3, &[0, 3]), Err(Error::Input(_))));
        assert!(UnitPoint::from_digits(1, &[0]).is_err());
        assert!(UnitPoint::from_digits(2, &[]).is_err());
    }

    #[test]
    fn large_base_uses_horner() {
        let x = UnitPoint::from_digits(1000, &[1, 2, 3, 999]).unwrap();
        assert_eq!(x.numerator(), &BigUint::from(1_002_003_999u64));
        assert_eq!(x.digits(), vec![1, 2, 3, 999]);
    }

    #[test]
    fn mul_mod1_examples() {
        let third = UnitPoint::from_ratio(3, 4, 1, 3).unwrap();
        assert_eq!(third.numerator(), &BigUint::from(27u32));
        assert!(third.mul_mod1(3).unwrap().numerator().is_zero());
        assert_eq!(third.mul_mod1(2).unwrap(), UnitPoint::from_ratio(3, 4, 2, 3).unwrap());

        let x = UnitPoint::from_digits(3, &[0, 2, 0]).unwrap();
        assert_eq!(x.mul_mod1(2).unwrap().numerator(), &BigUint::from(12u32));
        assert!(matches!(x.mul_mod1(0), Err(Error::Input(_))));
    }

    #[test]
    fn to_real_examples() {
        let half = UnitPoint::from_digits(2, &[1]).unwrap();
        assert_eq!(half.to_real(53), 0.5);
        let x = UnitPoint::from_digits(3, &[0, 2, 0]).unwrap();
        assert!((x.to_real(53) - 6.0 / 27.0).abs() < 2f64.powi(-53));
        assert!(x.to_real(53) <= 6.0 / 27.0);
    }

    #[test]
    fn ratio_must_be_exact() {
        assert!(UnitPoint::from_ratio(2, 10, 1, 3).is_err());
        let x = UnitPoint::from_ratio(7, 3, 1, 7).unwrap();
        assert_eq!(x.digits(), vec![1, 0, 0]);
    }

    #[test]
    fn serialization_uses_decimal_numerator() {
        let x = UnitPoint::from_digits(3, &[2, 1, 2]).unwrap();
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"base":3,"L":3,"numerator":"23"}"#);
        let back: UnitPoint = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<UnitPoint>(r#"{"base":3,"L":2,"numerator":"9"}"#).is_err());
    }

    #[test]
    fn budget_formula() {
        let b = PrecisionBudget::with_default_guard(3, 2, 100_000).unwrap();
        // 100000 · log_3 2 = 63092.97...
        assert_eq!(b.precision, 63_093 + 64);
        let x = UnitPoint::zero(3, 100).unwrap();
        assert!(matches!(b.check(&x, 0), Err(Error::Precision(_))));
    }

    #[test]
    fn shift_digits_drops_leading() {
        let x = UnitPoint::from_digits(3, &[2, 1, 0, 2]).unwrap();
        assert_eq!(x.shift_digits(2).digits(), vec![0, 2, 0, 0]);
        assert_eq!(x.shift_digits(2), x.mul_mod1(9).unwrap());
    }

    proptest! {
        #[test]
        fn digits_round_trip(base in 2u32..12, raw in proptest::collection::vec(0u32..1000, 1..60)) {
            let digits: Vec<u32> = raw.iter().map(|d| d % base).collect();
            let x = UnitPoint::from_digits(base, &digits).unwrap();
            prop_assert_eq!(x.digits(), digits.clone());
            for (j, &d) in digits.iter().enumerate() {
                prop_assert_eq!(x.digit(j + 1), d);
            }
        }

        #[test]
        fn multiplication_composes(base in 2u32..8, b in 2u64..12, raw in proptest::collection::vec(0u32..100, 1..80)) {
            let digits: Vec<u32> = raw.iter().map(|d| d % base).collect();
            let x = UnitPoint::from_digits(base, &digits).unwrap();
            let a = base as u64;
            let lhs = x.mul_mod1(a * b).unwrap();
            let rhs = x.mul_mod1(a).unwrap().mul_mod1(b).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
