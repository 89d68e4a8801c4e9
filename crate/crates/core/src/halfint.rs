use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A number in ½ℤ stored as twice its value.
///
/// Used for magnetizations `M` and total-spin labels `S`, both of which may be
/// half-integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInteger(pub i64);

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger(0);

    pub fn from_twice(twice: i64) -> Self {
        HalfInteger(twice)
    }

    pub fn from_integer(n: i64) -> Self {
        HalfInteger(2 * n)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn abs(self) -> Self {
        HalfInteger(self.0.abs())
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// `S(S+1)` for a total-spin label.
    pub fn casimir(self) -> f64 {
        let s = self.value();
        s * (s + 1.0)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Add for HalfInteger {
    type Output = HalfInteger;
    fn add(self, rhs: Self) -> Self {
        HalfInteger(self.0 + rhs.0)
    }
}

impl Sub for HalfInteger {
    type Output = HalfInteger;
    fn sub(self, rhs: Self) -> Self {
        HalfInteger(self.0 - rhs.0)
    }
}

impl Neg for HalfInteger {
    type Output = HalfInteger;
    fn neg(self) -> Self {
        HalfInteger(-self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_value() {
        assert_eq!(HalfInteger(3).to_string(), "3/2");
        assert_eq!(HalfInteger(-4).to_string(), "-2");
        assert_eq!(HalfInteger(-1).value(), -0.5);
        assert_eq!(HalfInteger(2).casimir(), 2.0);
    }
}
