//! Integer cents and exact decimal fractions.
//!
//! All payout arithmetic runs on `i128` intermediates and rounds once, at the
//! end, half away from zero to the nearest cent.

use core::fmt;
use core::iter::Sum;
use core::ops::{Add, Sub};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FractionError {
    #[error("fraction {0} outside [0, 1]")]
    OutOfRange(f64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cents(pub i64);

impl Cents {
    pub const ZERO: Self = Self(0);

    pub fn from_dollars(dollars: i64) -> Self {
        Self(dollars * 100)
    }

    pub fn as_i64(self) -> i64 {
        self.0
    }

    /// Nearest whole dollar, halves rounded away from zero.
    pub fn whole_dollars(self) -> i64 {
        div_round(i128::from(self.0), 100) as i64
    }

    pub fn as_dollars_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }

    pub(crate) fn from_i128(value: i128) -> Self {
        Self(value.clamp(i128::from(i64::MIN), i128::from(i64::MAX)) as i64)
    }
}

impl Add for Cents {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for Cents {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Sum for Cents {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl fmt::Display for Cents {
    /// `$1,045` style, whole dollars.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dollars = self.whole_dollars();
        if dollars < 0 {
            f.write_str("-")?;
        }
        f.write_str("$")?;
        write_grouped(f, dollars.unsigned_abs())
    }
}

fn write_grouped(f: &mut fmt::Formatter<'_>, n: u64) -> fmt::Result {
    if n < 1000 {
        return write!(f, "{n}");
    }
    write_grouped(f, n / 1000)?;
    write!(f, ",{:03}", n % 1000)
}

/// A fraction in `[0, 1]` held as an integer count of billionths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction(u64);

impl Fraction {
    pub const SCALE: u64 = 1_000_000_000;
    pub const ZERO: Self = Self(0);
    pub const ONE: Self = Self(Self::SCALE);

    /// Rounds a decimal such as `0.005` to the nearest billionth.
    pub fn from_f64(value: f64) -> Result<Self, FractionError> {
        if !(0.0..=1.0).contains(&value) {
            return Err(FractionError::OutOfRange(value));
        }
        Ok(Self(libm::round(value * Self::SCALE as f64) as u64))
    }

    pub fn from_billionths(n: u64) -> Result<Self, FractionError> {
        if n > Self::SCALE {
            return Err(FractionError::OutOfRange(n as f64 / Self::SCALE as f64));
        }
        Ok(Self(n))
    }

    pub fn billionths(self) -> u64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / Self::SCALE as f64
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// `1 - self`.
    pub fn complement(self) -> Self {
        Self(Self::SCALE - self.0)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_f64())
    }
}

/// `num / den` rounded to nearest, halves away from zero. `den` must be > 0.
pub(crate) fn div_round(num: i128, den: i128) -> i128 {
    debug_assert!(den > 0);
    let q = num / den;
    let r = num % den;
    if 2 * r.abs() >= den {
        q + num.signum()
    } else {
        q
    }
}
