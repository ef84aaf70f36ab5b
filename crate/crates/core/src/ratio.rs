//! Exact non-negative fractions used for proportional fairness windows.
//!
//! Window checks of the form `alpha * size <= count` are evaluated by
//! cross-multiplication in 128-bit integers, so no comparison ever rounds.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: u64,
    den: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("fraction {num}/{den} has a zero denominator")]
pub struct ZeroDenominator {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub const ZERO: Ratio = Ratio { num: 0, den: 1 };
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self, ZeroDenominator> {
        if den == 0 {
            return Err(ZeroDenominator { num, den });
        }
        Ok(Ratio { num, den })
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    /// True when the value lies in `[0, 1]`.
    pub fn in_unit_interval(self) -> bool {
        self.num <= self.den
    }

    /// `ceil(self * s)`.
    pub fn ceil_mul(self, s: u64) -> u64 {
        let p = self.num as u128 * s as u128;
        p.div_ceil(self.den as u128) as u64
    }

    /// `floor(self * s)`.
    pub fn floor_mul(self, s: u64) -> u64 {
        (self.num as u128 * s as u128 / self.den as u128) as u64
    }

    /// `self * s <= c`.
    pub fn mul_le(self, s: u64, c: u64) -> bool {
        self.num as u128 * s as u128 <= c as u128 * self.den as u128
    }

    /// `self * s >= c`.
    pub fn mul_ge(self, s: u64, c: u64) -> bool {
        self.num as u128 * s as u128 >= c as u128 * self.den as u128
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.num, self.den].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [num, den] = <[u64; 2]>::deserialize(deserializer)?;
        Ratio::new(num, den).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rounding() {
        let r = Ratio::new(1, 40).unwrap();
        assert_eq!(r.ceil_mul(10), 1);
        assert_eq!(r.floor_mul(10), 0);
        let h = Ratio::new(1, 2).unwrap();
        assert_eq!(h.ceil_mul(3), 2);
        assert_eq!(h.floor_mul(3), 1);
        assert_eq!(Ratio::ONE.ceil_mul(7), 7);
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(Ratio::new(1, 0).is_err());
        assert!(serde_json::from_str::<Ratio>("[1, 0]").is_err());
        assert_eq!(serde_json::from_str::<Ratio>("[3, 7]").unwrap(), Ratio::new(3, 7).unwrap());
    }

    #[test]
    fn ordering_is_by_value() {
        assert_eq!(Ratio::new(1, 2).unwrap().cmp(&Ratio::new(2, 4).unwrap()), std::cmp::Ordering::Equal);
        assert!(Ratio::new(1, 3).unwrap() < Ratio::new(1, 2).unwrap());
    }

    proptest! {
        #[test]
        fn window_checks_are_exact(num in 0u64..1000, den in 1u64..1000, s in 0u64..=1_000_000, c in 0u64..=1_000_000) {
            let r = Ratio::new(num, den).unwrap();
            // num/den * s <= c  <=>  num*s <= c*den, computed without any division
            let lhs = num as u128 * s as u128;
            let rhs = c as u128 * den as u128;
            prop_assert_eq!(r.mul_le(s, c), lhs <= rhs);
            prop_assert_eq!(r.mul_ge(s, c), lhs >= rhs);
            let ce = r.ceil_mul(s) as u128;
            prop_assert!(ce * den as u128 >= lhs);
            prop_assert!(ce == 0 || (ce - 1) * (den as u128) < lhs);
            prop_assert!(r.floor_mul(s) as u128 * den as u128 <= lhs);
            prop_assert!((r.floor_mul(s) as u128 + 1) * den as u128 > lhs);
        }
    }
}
