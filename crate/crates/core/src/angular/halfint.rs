use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exact half-integer, stored as twice its value.
///
/// Quantum numbers `j`, `m`, `k`, `J`, `L`, `M` are all represented this way
/// so that no comparison or arithmetic on them ever rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice_value: i32) -> Self {
        HalfInt(twice_value)
    }

    pub const fn from_int(value: i32) -> Self {
        HalfInt(2 * value)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub const fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// `Some(n)` when the value is the integer `n`.
    pub const fn as_integer(self) -> Option<i32> {
        if self.0 % 2 == 0 {
            Some(self.0 / 2)
        } else {
            None
        }
    }

    /// Smallest integer not below this value.
    pub const fn ceil(self) -> i32 {
        if self.0 % 2 == 0 {
            self.0 / 2
        } else {
            (self.0 + 1).div_euclid(2)
        }
    }

    /// `(-1)^self`; only defined for integer values.
    pub fn parity_sign(self) -> Result<f64> {
        match self.as_integer() {
            Some(n) if n.rem_euclid(2) == 0 => Ok(1.0),
            Some(_) => Ok(-1.0),
            None => Err(Error::InvalidQuantumNumbers(format!(
                "(-1)^x requires integer x, got {self}"
            ))),
        }
    }

    /// `true` when `self - other` is an integer.
    pub const fn same_parity(self, other: HalfInt) -> bool {
        (self.0 - other.0) % 2 == 0
    }

    /// The projections `-self, -self + 1, ..., self`.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        let j2 = self.0;
        (0..(j2 + 1).max(0)).map(move |i| HalfInt(-j2 + 2 * i))
    }

    /// `self, self + 1, ..., upper` in unit steps (empty if `upper < self`).
    pub fn ladder_to(self, upper: HalfInt) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        let lo = self.0;
        let hi = upper.0;
        let steps = if hi >= lo { (hi - lo) / 2 + 1 } else { 0 };
        (0..steps).map(move |i| HalfInt(lo + 2 * i))
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Parses `"3"`, `"-1"`, `"3/2"`, `"1.5"` or `"-0.5"`. Anything that is not
/// an exact half-integer is rejected.
impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a half-integer: {s:?}"));
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| bad())?;
            return match den.trim() {
                "1" => Ok(HalfInt(2 * num)),
                "2" => Ok(HalfInt(num)),
                _ => Err(bad()),
            };
        }
        if let Some((int, frac)) = s.split_once('.') {
            let negative = int.trim_start().starts_with('-');
            let whole: i32 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse().map_err(|_| bad())?
            };
            let frac = frac.trim_end_matches('0');
            let half = match frac {
                "" => 0,
                "5" => 1,
                _ => return Err(bad()),
            };
            let twice = 2 * whole.abs() + half;
            return Ok(HalfInt(if negative { -twice } else { twice }));
        }
        let whole: i32 = s.parse().map_err(|_| bad())?;
        Ok(HalfInt(2 * whole))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_notations() {
        assert_eq!("3/2".parse::<HalfInt>().unwrap(), HalfInt::from_twice(3));
        assert_eq!("1.5".parse::<HalfInt>().unwrap(), HalfInt::from_twice(3));
        assert_eq!("-0.5".parse::<HalfInt>().unwrap(), HalfInt::from_twice(-1));
        assert_eq!("2".parse::<HalfInt>().unwrap(), HalfInt::from_int(2));
        assert_eq!("2.0".parse::<HalfInt>().unwrap(), HalfInt::from_int(2));
        assert!("1.25".parse::<HalfInt>().is_err());
        assert!("1/3".parse::<HalfInt>().is_err());
    }

    #[test]
    fn ladders_and_projections() {
        let j = HalfInt::from_twice(3);
        let ms: Vec<i32> = j.projections().map(HalfInt::twice).collect();
        assert_eq!(ms, vec![-3, -1, 1, 3]);
        let js: Vec<i32> = HalfInt::HALF.ladder_to(j).map(HalfInt::twice).collect();
        assert_eq!(js, vec![1, 3]);
        assert_eq!(HalfInt::ONE.ladder_to(HalfInt::ZERO).count(), 0);
        assert_eq!(HalfInt::ZERO.projections().count(), 1);
    }

    #[test]
    fn ceil_and_display() {
        assert_eq!(HalfInt::from_twice(3).ceil(), 2);
        assert_eq!(HalfInt::from_twice(4).ceil(), 2);
        assert_eq!(HalfInt::from_twice(-3).ceil(), -1);
        assert_eq!(HalfInt::from_twice(-3).to_string(), "-3/2");
        assert_eq!(HalfInt::from_int(4).to_string(), "4");
    }
}
