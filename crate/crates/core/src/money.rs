//! Exact decimal-friendly money arithmetic.
//!
//! Amounts are stored as reduced `i128` rationals so that quotients such as
//! `30 / 4` or `7.5 / 2` are represented without rounding. Every operator is
//! overflow-checked and panics with a descriptive message rather than wrapping.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Fractional digits printed for amounts whose decimal expansion does not terminate.
pub const DISPLAY_DIGITS: u32 = 6;

/// An exact monetary amount (dollars).
///
/// Arithmetic is closed over signed values because utilities and deltas can be
/// negative; domain constructors such as budgets and costs are checked for
/// sign by [`crate::model::validate_market`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Money(Ratio<i128>);

impl Money {
    pub const ZERO: Money = Money(Ratio::new_raw(0, 1));
    pub const ONE: Money = Money(Ratio::new_raw(1, 1));

    pub fn from_int(value: i64) -> Self {
        Money(Ratio::from_integer(value as i128))
    }

    /// `numer / denom`, reduced. Panics if `denom == 0`.
    pub fn from_ratio(numer: i128, denom: i128) -> Self {
        assert!(denom != 0, "money denominator must be non-zero");
        Money(Ratio::new(numer, denom))
    }

    /// Rounds `value` to `digits` fractional decimal digits (half away from zero).
    pub fn from_f64_rounded(value: f64, digits: u32) -> Result<Self, Error> {
        if !value.is_finite() {
            return Err(Error::InvalidAmount(value.to_string()));
        }
        let scale = 10i128.pow(digits);
        let scaled = (value * scale as f64).round();
        if scaled.abs() >= i64::MAX as f64 {
            return Err(Error::InvalidAmount(value.to_string()));
        }
        Ok(Money::from_ratio(scaled as i128, scale))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Largest integer amount not greater than `self`.
    pub fn floor(&self) -> Money {
        Money(self.0.floor())
    }

    /// Smallest integer not less than `self`, as an integer.
    pub fn ceil_to_i128(&self) -> i128 {
        self.0.ceil().to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn div_int(self, divisor: u64) -> Money {
        assert!(divisor != 0, "division of money by zero");
        self / Money::from_ratio(divisor as i128, 1)
    }

    pub fn mul_int(self, factor: u64) -> Money {
        self * Money::from_ratio(factor as i128, 1)
    }

    pub fn min(self, other: Money) -> Money {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Money) -> Money {
        std::cmp::max(self, other)
    }

    fn terminates(&self) -> bool {
        let mut d = self.denom();
        while d % 2 == 0 {
            d /= 2;
        }
        while d % 5 == 0 {
            d /= 5;
        }
        d == 1
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0.checked_add(&rhs.0).expect("money overflow in addition"))
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0.checked_sub(&rhs.0).expect("money overflow in subtraction"))
    }
}

impl Mul for Money {
    type Output = Money;
    fn mul(self, rhs: Money) -> Money {
        Money(self.0.checked_mul(&rhs.0).expect("money overflow in multiplication"))
    }
}

impl Div for Money {
    type Output = Money;
    fn div(self, rhs: Money) -> Money {
        assert!(!rhs.is_zero(), "division of money by zero");
        Money(self.0.checked_div(&rhs.0).expect("money overflow in division"))
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        *self = *self + rhs;
    }
}

impl SubAssign for Money {
    fn sub_assign(&mut self, rhs: Money) {
        *self = *self - rhs;
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, |acc, m| acc + m)
    }
}

impl<'a> Sum<&'a Money> for Money {
    fn sum<I: Iterator<Item = &'a Money>>(iter: I) -> Money {
        iter.copied().sum()
    }
}

impl From<i64> for Money {
    fn from(value: i64) -> Self {
        Money::from_int(value)
    }
}

impl FromStr for Money {
    type Err = Error;

    /// Accepts `12`, `-3.75`, `0.000001` and `10/3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::InvalidAmount(s.to_string());
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            return Ok(Money::from_ratio(n, d));
        }
        let (negative, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(int_part) || !all_digits(frac_part) || frac_part.len() > 30 {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: i128 = if digits.is_empty() {
            0
        } else {
            digits.parse().map_err(|_| bad())?
        };
        let denom = 10i128.checked_pow(frac_part.len() as u32).ok_or_else(bad)?;
        let value = Money::from_ratio(numer, denom);
        Ok(if negative { -value } else { value })
    }
}

impl fmt::Display for Money {
    /// Terminating amounts print exactly with no trailing zeros; others are
    /// rounded half away from zero to [`DISPLAY_DIGITS`] places.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.is_negative() { "-" } else { "" };
        let abs = self.0.abs();
        let (numer, denom) = (*abs.numer(), *abs.denom());
        if denom == 1 {
            return write!(f, "{sign}{numer}");
        }
        let (mut int, mut frac, digits) = if self.terminates() {
            // smallest power of ten divisible by denom
            let mut digits = 0u32;
            let mut scale = 1i128;
            while scale % denom != 0 {
                scale *= 10;
                digits += 1;
            }
            let scaled = numer * (scale / denom);
            (scaled / scale, scaled % scale, digits)
        } else {
            let scale = 10i128.pow(DISPLAY_DIGITS);
            let (q, r) = (numer * scale).div_rem(&denom);
            let q = if 2 * r >= denom { q + 1 } else { q };
            (q / scale, q % scale, DISPLAY_DIGITS)
        };
        let mut digits = digits;
        while digits > 0 && frac % 10 == 0 {
            frac /= 10;
            digits -= 1;
        }
        if digits == 0 {
            int += frac;
            let sign = if int == 0 { "" } else { sign };
            return write!(f, "{sign}{int}");
        }
        write!(f, "{sign}{int}.{frac:0width$}", width = digits as usize)
    }
}

impl fmt::Debug for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terminates() {
            write!(f, "${self}")
        } else {
            write!(f, "${}/{}", self.numer(), self.denom())
        }
    }
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.terminates() {
            serializer.serialize_str(&self.to_string())
        } else {
            serializer.serialize_str(&format!("{}/{}", self.numer(), self.denom()))
        }
    }
}

impl<'de> Deserialize<'de> for Money {
    /// Accepts strings, integers and floats. Floats go through their shortest
    /// decimal representation, so `7.5` becomes exactly 15/2.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Str(String),
        }
        let text = match Raw::deserialize(deserializer)? {
            Raw::Int(v) => return Ok(Money::from_int(v)),
            Raw::Float(v) => format!("{v}"),
            Raw::Str(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}
