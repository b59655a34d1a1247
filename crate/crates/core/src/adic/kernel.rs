use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::point::UnitPoint;
use crate::error::{Error, Result};

/// In-place `x ↦ t·x mod 1` iteration on a [`UnitPoint`] numerator.
///
/// The numerator lives in a little-endian `u64` limb buffer next to the
/// modulus `base^L`. A step multiplies by the small multiplier, estimates the
/// quotient by `base^L` from the top 64 bits, subtracts, and corrects by at
/// most a couple of extra subtractions. No allocation happens per step.
pub struct OrbitKernel {
    base: u32,
    precision: usize,
    multiplier: u64,
    modulus: Vec<u64>,
    modulus_big: BigUint,
    /// Bit offset of the 64-bit window that holds the top of the modulus.
    shift: u64,
    modulus_top: u64,
    /// `modulus.len() + 1` limbs; the top limb is scratch for the product.
    num: Vec<u64>,
    steps: u64,
}

impl OrbitKernel {
    pub fn new(x: &UnitPoint, multiplier: u64) -> Result<Self> {
        if multiplier == 0 {
            return Err(Error::input("multiplier must be positive"));
        }
        let modulus_big = x.modulus();
        let modulus = modulus_big.to_u64_digits();
        let bits = modulus_big.bits();
        let shift = bits.saturating_sub(64);
        let modulus_top = bits_at(&modulus, shift);
        let mut num = x.numerator().to_u64_digits();
        num.resize(modulus.len() + 1, 0);
        Ok(OrbitKernel {
            base: x.base(),
            precision: x.precision(),
            multiplier,
            modulus,
            modulus_big,
            shift,
            modulus_top,
            num,
            steps: 0,
        })
    }

    /// Number of steps taken so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Advance one step: `x ← multiplier · x mod 1`.
    pub fn step(&mut self) {
        let n = self.modulus.len();
        let t = self.multiplier;
        let mut carry: u128 = 0;
        for limb in self.num[..n].iter_mut() {
            let p = *limb as u128 * t as u128 + carry;
            *limb = p as u64;
            carry = p >> 64;
        }
        self.num[n] = carry as u64;

        // q_est = ⌊top(p) / (top(M) + 1)⌋ never exceeds ⌊p / M⌋.
        let p_top = bits128_at(&self.num, self.shift);
        let q = (p_top / (self.modulus_top as u128 + 1)) as u64;
        if q > 0 {
            sub_mul(&mut self.num, &self.modulus, q);
        }
        while !less_than(&self.num, &self.modulus) {
            sub_in_place(&mut self.num, &self.modulus);
        }
        debug_assert_eq!(self.num[n], 0);
        self.steps += 1;
    }

    /// `⌊x · 2^53⌋`, exact. The common case is decided from the top 64 bits
    /// of numerator and modulus; ambiguous cases fall back to a division.
    pub fn top_bits53(&self) -> u64 {
        if self.shift == 0 {
            let m = self.modulus_top as u128;
            let x = self.num[0] as u128;
            return ((x << 53) / m) as u64;
        }
        let x_top = bits_at(&self.num, self.shift) as u128;
        let m_top = self.modulus_top as u128;
        let lo = (x_top << 53) / (m_top + 1);
        let hi = ((x_top + 1) << 53) / m_top;
        if lo == hi {
            return lo as u64;
        }
        let q = (self.numerator() << 53usize) / &self.modulus_big;
        q.to_u64().expect("quotient below 2^53")
    }

    /// Current value as a double: `top_bits53() / 2^53`.
    pub fn to_real(&self) -> f64 {
        self.top_bits53() as f64 * 2f64.powi(-53)
    }

    pub fn numerator(&self) -> BigUint {
        let n = self.modulus.len();
        let mut words = Vec::with_capacity(2 * n);
        for &limb in &self.num[..n] {
            words.push(limb as u32);
            words.push((limb >> 32) as u32);
        }
        BigUint::new(words)
    }

    pub fn point(&self) -> UnitPoint {
        UnitPoint::new(self.base, self.precision, self.numerator()).expect("kernel keeps numerator below modulus")
    }
}

/// 64 bits of `limbs` starting at bit `s` (zero beyond the end).
fn bits_at(limbs: &[u64], s: u64) -> u64 {
    let i = (s / 64) as usize;
    let off = s % 64;
    let lo = limbs.get(i).copied().unwrap_or(0);
    if off == 0 {
        return lo;
    }
    let hi = limbs.get(i + 1).copied().unwrap_or(0);
    (lo >> off) | (hi << (64 - off))
}

fn bits128_at(limbs: &[u64], s: u64) -> u128 {
    bits_at(limbs, s) as u128 | ((bits_at(limbs, s + 64) as u128) << 64)
}

/// `a ← a − q·m`, assuming the result is nonnegative.
fn sub_mul(a: &mut [u64], m: &[u64], q: u64) {
    let mut carry: u64 = 0;
    let mut borrow: u64 = 0;
    for i in 0..a.len() {
        let mi = m.get(i).copied().unwrap_or(0);
        let p = mi as u128 * q as u128 + carry as u128;
        carry = (p >> 64) as u64;
        let (d1, b1) = a[i].overflowing_sub(p as u64);
        let (d2, b2) = d1.overflowing_sub(borrow);
        a[i] = d2;
        borrow = (b1 as u64) + (b2 as u64);
    }
    debug_assert!(carry == 0 && borrow == 0, "sub_mul underflow");
}

fn sub_in_place(a: &mut [u64], m: &[u64]) {
    let mut borrow = false;
    for i in 0..a.len() {
        let mi = m.get(i).copied().unwrap_or(0);
        let (d1, b1) = a[i].overflowing_sub(mi);
        let (d2, b2) = d1.overflowing_sub(borrow as u64);
        a[i] = d2;
        borrow = b1 || b2;
    }
    debug_assert!(!borrow);
}

/// `a < m`, where `a` may carry one more limb than `m`.
fn less_than(a: &[u64], m: &[u64]) -> bool {
    if a[m.len()..].iter().any(|&w| w != 0) {
        return false;
    }
    for i in (0..m.len()).rev() {
        if a[i] != m[i] {
            return a[i] < m[i];
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adic::PrecisionBudget;
    use proptest::prelude::*;

    fn one_shot(x: &UnitPoint, b: u64, n: u32) -> UnitPoint {
        let num = (x.numerator() * BigUint::from(b).pow(n)) % x.modulus();
        UnitPoint::new(x.base(), x.precision(), num).unwrap()
    }

    #[test]
    fn small_modulus_path() {
        let x = UnitPoint::from_ratio(7, 2, 1, 7).unwrap();
        let mut k = OrbitKernel::new(&x, 2).unwrap();
        let expect = [2.0 / 7.0, 4.0 / 7.0, 1.0 / 7.0];
        for e in expect.iter().cycle().take(9) {
            k.step();
            assert!((k.to_real() - e).abs() < 1e-15);
        }
    }

    #[test]
    fn no_drift_over_budget() {
        let budget = PrecisionBudget::with_default_guard(3, 2, 2000).unwrap();
        let digits: Vec<u32> = (0..budget.precision).map(|i| if (i * 7 + i / 3) % 5 < 2 { 0 } else { 2 }).collect();
        let x = UnitPoint::from_digits(3, &digits).unwrap();
        let mut k = OrbitKernel::new(&x, 2).unwrap();
        for n in 1..=2000u32 {
            k.step();
            if n % 250 == 0 || n < 5 {
                let exact = one_shot(&x, 2, n);
                assert_eq!(k.point(), exact, "step {n}");
                assert_eq!(k.to_real(), exact.to_real(53), "step {n}");
            }
        }
    }

    proptest! {
        #[test]
        fn kernel_matches_bigint(base in 2u32..11, b in 2u64..40, len in 1usize..120, seed in any::<u64>(), steps in 1u32..60) {
            let mut s = seed;
            let digits: Vec<u32> = (0..len).map(|_| { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); ((s >> 33) % base as u64) as u32 }).collect();
            let x = UnitPoint::from_digits(base, &digits).unwrap();
            let mut k = OrbitKernel::new(&x, b).unwrap();
            let mut y = x.clone();
            for _ in 0..steps {
                k.step();
                y = y.mul_mod1(b).unwrap();
                prop_assert_eq!(k.top_bits53() as f64 * 2f64.powi(-53), y.to_real(53));
            }
            prop_assert_eq!(k.point(), y);
        }
    }
}
