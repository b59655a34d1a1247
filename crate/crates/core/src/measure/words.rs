use serde::{Deserialize, Serialize};

use crate::adic::{check_base, UnitPoint};
use crate::error::{Error, Result};

fn check_digits(base: u32, digits: &[u32]) -> Result<()> {
    check_base(base)?;
    match digits.iter().find(|&&d| d >= base) {
        Some(d) => Err(Error::input(format!("symbol {d} outside [0, {base})"))),
        None => Ok(()),
    }
}

/// A finite word of `a`-adic digits naming the atom `A_n(x)` of the
/// generation-`n` partition, first digit first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CylinderWord {
    base: u32,
    digits: Vec<u32>,
}

impl CylinderWord {
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self> {
        check_digits(base, &digits)?;
        Ok(CylinderWord { base, digits })
    }

    /// The word of the first `n` digits of `x`.
    pub fn of_point(x: &UnitPoint, n: usize) -> Result<Self> {
        if n > x.precision() {
            return Err(Error::Precision(format!("point keeps {} digits, {n} requested", x.precision())));
        }
        let mut digits = x.digits();
        digits.truncate(n);
        Ok(CylinderWord { base: x.base(), digits })
    }

    /// Word of length `len` whose big-endian value is `index`.
    pub fn from_index(base: u32, len: usize, mut index: usize) -> Self {
        let mut digits = vec![0; len];
        for d in digits.iter_mut().rev() {
            *d = (index % base as usize) as u32;
            index /= base as usize;
        }
        CylinderWord { base, digits }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Position of the atom among the `a^n` atoms of its generation.
    pub fn index(&self) -> usize {
        self.digits.iter().fold(0usize, |acc, &d| acc * self.base as usize + d as usize)
    }

    /// Left endpoint `Σ d_j a^{−j}` as a double.
    pub fn left_endpoint(&self) -> f64 {
        self.digits.iter().rev().fold(0.0, |acc, &d| (acc + d as f64) / self.base as f64)
    }
}

/// A finite truncation `(ω_0, ω_{−1}, …)` of a past sequence, most recent
/// symbol first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PastWord {
    base: u32,
    symbols: Vec<u32>,
}

impl PastWord {
    pub fn new(base: u32, symbols: Vec<u32>) -> Result<Self> {
        check_digits(base, &symbols)?;
        Ok(PastWord { base, symbols })
    }

    pub fn empty(base: u32) -> Self {
        PastWord { base, symbols: Vec::new() }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Symbols, most recent first.
    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn most_recent(&self) -> Option<u32> {
        self.symbols.first().copied()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `ω * w`: the past after reading the digits of `w`, so the last digit
    /// of `w` becomes the most recent symbol.
    pub fn extended(&self, word: &CylinderWord) -> Result<Self> {
        if word.base() != self.base {
            return Err(Error::input(format!("word base {} does not match past base {}", word.base(), self.base)));
        }
        let mut symbols: Vec<u32> = word.digits().iter().rev().copied().collect();
        symbols.extend_from_slice(&self.symbols);
        Ok(PastWord { base: self.base, symbols })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let w = CylinderWord::new(3, vec![2, 0, 1]).unwrap();
        assert_eq!(w.index(), 19);
        assert_eq!(CylinderWord::from_index(3, 3, 19), w);
        assert!((w.left_endpoint() - 19.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn extension_order() {
        let past = PastWord::new(2, vec![1, 0]).unwrap();
        let w = CylinderWord::new(2, vec![0, 0, 1]).unwrap();
        let ext = past.extended(&w).unwrap();
        assert_eq!(ext.symbols(), &[1, 0, 0, 1, 0]);
        assert_eq!(ext.most_recent(), Some(1));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(CylinderWord::new(2, vec![2]).is_err());
        assert!(PastWord::new(3, vec![0, 5]).is_err());
    }
}
