//! Integer micro-USD currency type.
//!
//! All cost accounting in the engine is exact integer arithmetic on
//! micro-dollars (1 USD = 1_000_000 micro-USD). Conversion to decimal
//! dollars happens only at display time.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

/// An exact, non-negative amount of money in micro-USD.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct MicroUsd(pub u64);

impl MicroUsd {
    pub const ZERO: MicroUsd = MicroUsd(0);

    pub const fn new(micro: u64) -> Self {
        MicroUsd(micro)
    }

    pub const fn as_u64(self) -> u64 {
        self.0
    }

    /// Lossy conversion for reporting and objective arithmetic only.
    pub fn to_usd_f64(self) -> f64 {
        self.0 as f64 / 1_000_000.0
    }

    /// Render as a decimal dollar string with trailing zeros trimmed,
    /// e.g. `3500` -> "0.0035", `0` -> "0".
    pub fn to_usd_string(self) -> String {
        let whole = self.0 / 1_000_000;
        let frac = self.0 % 1_000_000;
        if frac == 0 {
            return whole.to_string();
        }
        let mut s = format!("{whole}.{frac:06}");
        while s.ends_with('0') {
            s.pop();
        }
        s
    }
}

impl Add for MicroUsd {
    type Output = MicroUsd;
    fn add(self, rhs: MicroUsd) -> MicroUsd {
        MicroUsd(self.0 + rhs.0)
    }
}

impl AddAssign for MicroUsd {
    fn add_assign(&mut self, rhs: MicroUsd) {
        self.0 += rhs.0;
    }
}

impl Sum for MicroUsd {
    fn sum<I: Iterator<Item = MicroUsd>>(iter: I) -> MicroUsd {
        iter.fold(MicroUsd::ZERO, Add::add)
    }
}

impl fmt::Display for MicroUsd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}", self.to_usd_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_exactly() {
        let total: MicroUsd = [100_000u64, 200_000, 300_000]
            .iter()
            .map(|&m| MicroUsd::new(m))
            .sum();
        assert_eq!(total, MicroUsd::new(600_000));
    }

    #[test]
    fn usd_string_trims_zeros() {
        assert_eq!(MicroUsd::new(3500).to_usd_string(), "0.0035");
        assert_eq!(MicroUsd::new(0).to_usd_string(), "0");
        assert_eq!(MicroUsd::new(1_000_000).to_usd_string(), "1");
        assert_eq!(MicroUsd::new(5_930_000).to_usd_string(), "5.93");
        assert_eq!(MicroUsd::new(1).to_usd_string(), "0.000001");
    }
}
