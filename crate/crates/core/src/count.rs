//! Exact counting of bipartite partitions.
//!
//! `p_X(n1, n2)` is the number of multisets of parts from `X` summing to
//! `(n1, n2)`. Tables are filled by the unbounded-knapsack recurrence over
//! the parts, in arbitrary precision.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default limit on the number of table cells, `(n1 + 1) * (n2 + 1)`.
pub const DEFAULT_CELL_BUDGET: u64 = 1 << 26;

/// Largest coordinate accepted by [`count_naive`].
pub const ORACLE_LIMIT: usize = 8;

/// Which vectors may be used as parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartSet {
    /// `X = ℕ²`: both coordinates positive.
    #[serde(rename = "strict")]
    StrictPositive,
    /// `X = ℤ₊² \ {0}`: axis parts allowed, zero excluded.
    #[serde(rename = "nonzero")]
    NonzeroVectors,
}

impl PartSet {
    pub const ALL: [PartSet; 2] = [PartSet::StrictPositive, PartSet::NonzeroVectors];

    pub fn contains(self, x1: usize, x2: usize) -> bool {
        match self {
            PartSet::StrictPositive => x1 >= 1 && x2 >= 1,
            PartSet::NonzeroVectors => x1 + x2 >= 1,
        }
    }

    /// True for the part set whose formulas use the barred functions.
    pub fn is_barred(self) -> bool {
        self == PartSet::NonzeroVectors
    }

    pub fn name(self) -> &'static str {
        match self {
            PartSet::StrictPositive => "strict",
            PartSet::NonzeroVectors => "nonzero",
        }
    }

    /// Parts `x <= (max1, max2)` in the fixed order: x1 ascending, then x2 ascending.
    pub fn parts_within(self, max1: usize, max2: usize) -> impl Iterator<Item = (usize, usize)> {
        (0..=max1)
            .flat_map(move |x1| (0..=max2).map(move |x2| (x1, x2)))
            .filter(move |&(x1, x2)| self.contains(x1, x2))
    }
}

impl fmt::Display for PartSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PartSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(PartSet::StrictPositive),
            "nonzero" => Ok(PartSet::NonzeroVectors),
            other => Err(Error::Config(format!("unknown part set `{other}` (expected strict|nonzero)"))),
        }
    }
}

/// The vector being partitioned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Target {
    pub n1: usize,
    pub n2: usize,
}

impl Target {
    pub fn new(n1: usize, n2: usize) -> Self {
        Self { n1, n2 }
    }
}

/// Dense table of `p_X(a, b)` for `a <= max1`, `b <= max2`. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    part_set: PartSet,
    max1: usize,
    max2: usize,
    counts: Vec<BigUint>,
}

impl CountTable {
    pub fn build(part_set: PartSet, max1: usize, max2: usize) -> Result<Self> {
        Self::build_with_budget(part_set, max1, max2, DEFAULT_CELL_BUDGET)
    }

    pub fn build_with_budget(part_set: PartSet, max1: usize, max2: usize, budget: u64) -> Result<Self> {
        let cells = (max1 as u128 + 1) * (max2 as u128 + 1);
        if cells > u128::from(budget) {
            return Err(Error::Budget { cells, budget });
        }
        let stride = max2 + 1;
        let mut counts = vec![BigUint::zero(); cells as usize];
        counts[0] = BigUint::one();
        for (x1, x2) in part_set.parts_within(max1, max2) {
            let offset = x1 * stride + x2;
            for a in x1..=max1 {
                let row = a * stride;
                for b in x2..=max2 {
                    let dst = row + b;
                    let (head, tail) = counts.split_at_mut(dst);
                    let src = &head[dst - offset];
                    if !src.is_zero() {
                        tail[0] += src;
                    }
                }
            }
        }
        Ok(Self { part_set, max1, max2, counts })
    }

    pub fn part_set(&self) -> PartSet {
        self.part_set
    }

    pub fn bounds(&self) -> (usize, usize) {
        (self.max1, self.max2)
    }

    /// `p_X(a, b)`; `None` outside the table.
    pub fn get(&self, a: usize, b: usize) -> Option<&BigUint> {
        (a <= self.max1 && b <= self.max2).then(|| &self.counts[a * (self.max2 + 1) + b])
    }

    /// Writes `a,b,count` rows (with header), counts in decimal.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["a", "b", "count"])?;
        for a in 0..=self.max1 {
            for b in 0..=self.max2 {
                let count = self.get(a, b).expect("in range").to_str_radix(10);
                w.write_record([a.to_string(), b.to_string(), count])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Builds the table of `p_X(a, b)` for `a <= n1`, `b <= n2`.
pub fn count_table(part_set: PartSet, n1: usize, n2: usize) -> Result<CountTable> {
    CountTable::build(part_set, n1, n2)
}

/// Exhaustive enumeration of multisets of parts, parts taken in
/// non-increasing lexicographic order. Independent of the table recurrence.
pub fn count_naive(part_set: PartSet, target: Target) -> Result<BigUint> {
    if target.n1 > ORACLE_LIMIT || target.n2 > ORACLE_LIMIT {
        return Err(Error::OracleScale { n1: target.n1, n2: target.n2, limit: ORACLE_LIMIT });
    }
    let mut parts: Vec<(usize, usize)> = part_set.parts_within(target.n1, target.n2).collect();
    parts.sort_unstable();

    fn descend(parts: &[(usize, usize)], rest: (usize, usize), top: usize) -> BigUint {
        if rest == (0, 0) {
            return BigUint::one();
        }
        let mut total = BigUint::zero();
        for (i, &(x1, x2)) in parts[..top].iter().enumerate() {
            if x1 <= rest.0 && x2 <= rest.1 {
                total += descend(parts, (rest.0 - x1, rest.1 - x2), i + 1);
            }
        }
        total
    }

    Ok(descend(&parts, (target.n1, target.n2), parts.len()))
}

/// One-dimensional partition numbers `p(0..=n)`.
pub fn partition_numbers(n: usize) -> Vec<BigUint> {
    let mut dp = vec![BigUint::zero(); n + 1];
    dp[0] = BigUint::one();
    for part in 1..=n {
        for k in part..=n {
            let (head, tail) = dp.split_at_mut(k);
            tail[0] += &head[k - part];
        }
    }
    dp
}

/// The one-dimensional partition number `p(n)`.
pub fn count_1d(n: usize) -> BigUint {
    partition_numbers(n).pop().expect("non-empty")
}

/// Natural logarithm of a big integer, exact to double precision.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return num_traits::ToPrimitive::to_f64(x).expect("finite below 2^1000").ln();
    }
    let shift = bits - 64;
    let top = num_traits::ToPrimitive::to_f64(&(x >> shift)).expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn small_table_values() {
        let strict = count_table(PartSet::StrictPositive, 2, 2).unwrap();
        assert_eq!(strict.get(1, 1), Some(&big(1)));
        assert_eq!(strict.get(2, 2), Some(&big(2)));
        assert_eq!(strict.get(0, 0), Some(&big(1)));
        assert_eq!(strict.get(0, 2), Some(&big(0)));
        let nonzero = count_table(PartSet::NonzeroVectors, 2, 3).unwrap();
        assert_eq!(nonzero.get(1, 1), Some(&big(2)));
        assert_eq!(nonzero.get(2, 1), Some(&big(4)));
        assert_eq!(nonzero.get(0, 3), Some(&big(3)));
    }

    #[test]
    fn naive_edge_cases() {
        assert_eq!(count_naive(PartSet::NonzeroVectors, Target::new(0, 3)).unwrap(), big(3));
        for k in 0..=5 {
            let expected = if k == 0 { 1 } else { 0 };
            assert_eq!(count_naive(PartSet::StrictPositive, Target::new(0, k)).unwrap(), big(expected));
        }
        assert!(matches!(
            count_naive(PartSet::StrictPositive, Target::new(9, 1)),
            Err(Error::OracleScale { .. })
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let err = CountTable::build_with_budget(PartSet::StrictPositive, 10, 10, 100).unwrap_err();
        assert!(matches!(err, Error::Budget { cells: 121, budget: 100 }));
    }

    #[test]
    fn one_dimensional_counts() {
        assert_eq!(count_1d(0), big(1));
        assert_eq!(count_1d(5), big(7));
    }

    #[test]
    fn part_order_is_lexicographic() {
        let parts: Vec<_> = PartSet::NonzeroVectors.parts_within(1, 1).collect();
        assert_eq!(parts, vec![(0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn csv_export() {
        let table = count_table(PartSet::NonzeroVectors, 1, 1).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b,count\n0,0,1\n0,1,1\n1,0,1\n1,1,2\n");
    }

    #[test]
    fn ln_of_large_integers() {
        let x = BigUint::from(3u32).pow(2000);
        assert!((ln_biguint(&x) - 2000.0 * 3f64.ln()).abs() < 1e-9);
        assert!((ln_biguint(&big(1)) - 0.0).abs() < 1e-15);
    }
}
