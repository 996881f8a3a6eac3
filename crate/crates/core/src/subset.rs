//! Variable subsets as bitmasks over at most [`MAX_VARS`] input variables.
//!
//! Variable `j` corresponds to bit `j` of the mask, to position `j` (leftmost
//! first) of the bitstring encoding, and to index `j` of sample vectors. This
//! correspondence is shared by in-memory tables, table files, and the
//! subprocess protocol.

use crate::error::{Error, Result};
use std::fmt;

/// Hard cap on the number of variables; a full table is `2^20` doubles (8 MB).
pub const MAX_VARS: usize = 20;

/// A subset of the `n` input variables, encoded as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct VariableSet {
    mask: u32,
    n: usize,
}

impl VariableSet {
    pub fn new(mask: u32, n: usize) -> Result<Self> {
        check_var_count(n)?;
        if mask >= (1u32 << n) {
            return Err(Error::InvalidMask { mask, n });
        }
        Ok(Self { mask, n })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(0, n)
    }

    pub fn full(n: usize) -> Result<Self> {
        check_var_count(n)?;
        Ok(Self {
            mask: full_mask(n),
            n,
        })
    }

    /// Set containing exactly the given variable indices.
    pub fn from_vars(vars: &[usize], n: usize) -> Result<Self> {
        check_var_count(n)?;
        let mut mask = 0u32;
        for &v in vars {
            if v >= n {
                return Err(Error::InvalidMask {
                    mask: 1 << v.min(31),
                    n,
                });
            }
            mask |= 1 << v;
        }
        Ok(Self { mask, n })
    }

    #[inline]
    pub fn mask(self) -> u32 {
        self.mask
    }

    #[inline]
    pub fn n(self) -> usize {
        self.n
    }

    /// Number of variables in the set.
    #[inline]
    pub fn order(self) -> usize {
        self.mask.count_ones() as usize
    }

    #[inline]
    pub fn contains(self, var: usize) -> bool {
        var < self.n && (self.mask >> var) & 1 == 1
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    pub fn is_subset_of(self, other: VariableSet) -> bool {
        self.mask & !other.mask == 0
    }

    /// Indices of the variables in the set, ascending.
    pub fn vars(self) -> impl Iterator<Item = usize> {
        let mask = self.mask;
        (0..self.n).filter(move |&j| (mask >> j) & 1 == 1)
    }

    /// All submasks of this set, ascending by mask value (includes the empty
    /// set and the set itself).
    pub fn submasks(self) -> impl Iterator<Item = u32> {
        let s = self.mask;
        (0..=s).filter(move |m| m & !s == 0)
    }

    /// Bitstring encoding: character `j` (leftmost = variable 0) is `'1'` iff
    /// variable `j` is in the set.
    pub fn bitstring(self) -> String {
        (0..self.n)
            .map(|j| if (self.mask >> j) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn from_bitstring(s: &str) -> Result<Self> {
        let n = s.len();
        check_var_count(n)?;
        let mut mask = 0u32;
        for (j, c) in s.chars().enumerate() {
            match c {
                '1' => mask |= 1 << j,
                '0' => {}
                _ => {
                    return Err(Error::InvalidConfig(format!(
                        "bitstring {s:?} contains character {c:?}; only '0'/'1' allowed"
                    )))
                }
            }
        }
        Ok(Self { mask, n })
    }
}

impl fmt::Debug for VariableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VariableSet({})", self.bitstring())
    }
}

pub(crate) fn check_var_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_VARS {
        return Err(Error::VariableCount { n });
    }
    Ok(())
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// All masks over `n` variables with exactly `m` bits set, ascending by mask
/// value (Gosper's hack). This ordering is the shared subset-to-index
/// convention for per-order effect vectors.
pub fn subsets_of_order(n: usize, m: usize) -> impl Iterator<Item = u32> {
    assert!(n <= MAX_VARS && m <= n);
    let limit = 1u64 << n;
    let first: u64 = if m == 0 { 0 } else { (1u64 << m) - 1 };
    let mut cur = Some(first);
    std::iter::from_fn(move || {
        let c = cur?;
        if c >= limit {
            cur = None;
            return None;
        }
        cur = if c == 0 {
            None
        } else {
            // next mask with the same popcount
            let low = c & c.wrapping_neg();
            let ripple = c + low;
            let ones = ((c ^ ripple) >> 2) / low;
            Some(ripple | ones)
        };
        Some(c as u32)
    })
}

/// Binomial coefficient as f64; exact for the small arguments used here.
pub(crate) fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc.round()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_bit_correspondence() {
        let s = VariableSet::from_vars(&[0, 2], 4).unwrap();
        assert_eq!(s.mask(), 0b0101);
        assert_eq!(s.bitstring(), "1010");
        assert_eq!(VariableSet::from_bitstring("1010").unwrap(), s);
        assert_eq!(s.order(), 2);
        assert!(s.contains(0) && !s.contains(1) && s.contains(2));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(VariableSet::new(0, 0).is_err());
        assert!(VariableSet::new(0, 21).is_err());
        assert!(VariableSet::new(1 << 3, 3).is_err());
        assert!(VariableSet::new(0b111, 3).is_ok());
    }

    #[test]
    fn submask_enumeration() {
        let s = VariableSet::new(0b101, 3).unwrap();
        let subs: Vec<u32> = s.submasks().collect();
        assert_eq!(subs, vec![0b000, 0b001, 0b100, 0b101]);
    }

    #[test]
    fn order_enumeration_ascending_and_complete() {
        for n in 1..=6 {
            for m in 0..=n {
                let masks: Vec<u32> = subsets_of_order(n, m).collect();
                assert_eq!(masks.len() as f64, binomial(n as u64, m as u64));
                assert!(masks.windows(2).all(|w| w[0] < w[1]));
                assert!(masks
                    .iter()
                    .all(|&x| x.count_ones() as usize == m && x < (1 << n)));
            }
        }
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(10, 0), 1.0);
        assert_eq!(binomial(10, 10), 1.0);
        assert_eq!(binomial(2, 1), 2.0);
        assert_eq!(binomial(40, 20), 137846528820.0);
    }

    #[test]
    fn bitstring_rejects_junk() {
        assert!(VariableSet::from_bitstring("10x1").is_err());
        assert!(VariableSet::from_bitstring("").is_err());
    }
}
