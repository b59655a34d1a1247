//! Fixed-point natural logarithms of integers.
//!
//! Values are `BigUint` raws scaled by `2^bits`. The logarithm uses
//! `ln n = e·ln 2 + 2·atanh((n − 2^e)/(n + 2^e))` with `2^e ≤ n < 2^(e+1)`,
//! so every series argument is a rational of modulus at most 1/3.

use num_bigint::BigUint;
use num_traits::Zero;

const GUARD_BITS: u32 = 32;

/// `2·atanh(p/q)` scaled by `2^work`, for `0 ≤ p/q ≤ 1/3`.
fn two_atanh(p: u64, q: u64, work: u32) -> BigUint {
    if p == 0 {
        return BigUint::zero();
    }
    let one = BigUint::from(1u32) << work as usize;
    let x = (&one * p) / q;
    let x2 = (&one * (p as u128 * p as u128)) / (q as u128 * q as u128);
    let mut power = x;
    let mut sum = BigUint::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        sum += &power / (2 * k + 1);
        power = (&power * &x2) >> work as usize;
        k += 1;
    }
    sum << 1usize
}

/// `ln n · 2^bits`, accurate to a few units in the last place.
pub(crate) fn ln_fixed(n: u64, bits: u32) -> BigUint {
    assert!(n >= 1);
    let work = bits + GUARD_BITS;
    let e = 63 - n.leading_zeros();
    let low = 1u64 << e;
    let ln2 = two_atanh(1, 3, work);
    // (n − 2^e)/(n + 2^e) in u128 to avoid overflow near u64::MAX.
    let (p, q) = (n - low, n as u128 + low as u128);
    let frac = if q > u64::MAX as u128 {
        two_atanh(p / 2, (q / 2) as u64, work)
    } else {
        two_atanh(p, q as u64, work)
    };
    (ln2 * e + frac) >> GUARD_BITS as usize
}

/// `⌊2^bits · ln(num)/ln(den)⌋` up to rounding in the last place.
pub(crate) fn log_ratio_fixed(num: u64, den: u64, bits: u32) -> BigUint {
    let work = bits + GUARD_BITS;
    let ln_num = ln_fixed(num, work);
    let ln_den = ln_fixed(den, work);
    (ln_num << bits as usize) / ln_den
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn to_f64(raw: &BigUint, bits: u32) -> f64 {
        let top = raw >> (bits as usize - 52);
        top.to_f64().unwrap() * 2f64.powi(-52)
    }

    #[test]
    fn ln_matches_f64() {
        for n in [1u64, 2, 3, 5, 7, 10, 1000, 12345, u32::MAX as u64, u64::MAX] {
            let v = to_f64(&ln_fixed(n, 128), 128);
            assert!((v - (n as f64).ln()).abs() < 1e-15 * (n as f64).ln().max(1.0), "ln {n}");
        }
    }

    #[test]
    fn ln2_digits() {
        // ln 2 = 0.6931471805599453094172321214581765680755...
        let raw = ln_fixed(2, 128);
        let scaled = (raw * BigUint::from(10u64).pow(36)) >> 128usize;
        assert_eq!(scaled.to_string(), "693147180559945309417232121458176568");
    }

    #[test]
    fn ratio_stable_under_precision() {
        let a = log_ratio_fixed(2, 3, 128);
        let b = log_ratio_fixed(2, 3, 256) >> 128usize;
        let diff = if a > b { &a - &b } else { &b - &a };
        assert!(diff <= BigUint::from(2u32));
    }
}
