use std::fmt;

use crate::error::{Error, Result};

/// A half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Integer value, if this is an integer.
    pub fn to_int(self) -> Option<i32> {
        self.is_integer().then_some(self.0 / 2)
    }

    pub const fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// Values `-j, -j+1, ..., j`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> + Clone {
        let j2 = self.0;
        (-j2..=j2).step_by(2).map(HalfInt)
    }

    /// Checks `|m| <= j` and `j - m` integral.
    pub fn check_projection(self, m: HalfInt) -> Result<()> {
        if self.0 < 0 || m.0.abs() > self.0 || (self.0 - m.0) % 2 != 0 {
            return Err(Error::IndexOutOfRange(format!("m = {m} is not a projection of j = {self}")));
        }
        Ok(())
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_value() {
        assert_eq!(HalfInt::from_twice(3).to_string(), "3/2");
        assert_eq!(HalfInt::from_int(-2).to_string(), "-2");
        assert_eq!(HalfInt::HALF.value(), 0.5);
    }

    #[test]
    fn projections_cover_range() {
        let ms: Vec<i32> = HalfInt::from_twice(3).projections().map(HalfInt::twice).collect();
        assert_eq!(ms, vec![-3, -1, 1, 3]);
        assert!(HalfInt::from_int(1).check_projection(HalfInt::HALF).is_err());
    }
}
