//! Sign and natural-log magnitude representation for bounds that overflow
//! binary64, such as `exp(8 pi g / l)` for moderate genus.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative = -1,
    Zero = 0,
    Positive = 1,
}

impl Sign {
    fn flip(self) -> Self {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    fn times(self, other: Sign) -> Sign {
        match (self as i8) * (other as i8) {
            1 => Sign::Positive,
            -1 => Sign::Negative,
            _ => Sign::Zero,
        }
    }
}

/// `sign * exp(ln_abs)`. `ln_abs` is ignored (kept at zero) when the sign is
/// zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScalar {
    sign: Sign,
    ln_abs: f64,
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar {
        sign: Sign::Zero,
        ln_abs: 0.0,
    };
    pub const ONE: LogScalar = LogScalar {
        sign: Sign::Positive,
        ln_abs: 0.0,
    };

    pub fn new(sign: Sign, ln_abs: f64) -> Self {
        if sign == Sign::Zero || ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { sign, ln_abs }
        }
    }

    /// `exp(x)` without evaluating it.
    pub fn exp(x: f64) -> Self {
        Self::new(Sign::Positive, x)
    }

    pub fn from_f64(x: f64) -> Self {
        if x > 0.0 {
            Self::new(Sign::Positive, x.ln())
        } else if x < 0.0 {
            Self::new(Sign::Negative, (-x).ln())
        } else {
            Self::ZERO
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn ln_abs(&self) -> f64 {
        self.ln_abs
    }

    pub fn log10_abs(&self) -> f64 {
        self.ln_abs / std::f64::consts::LN_10
    }

    pub fn is_positive(&self) -> bool {
        self.sign == Sign::Positive
    }

    /// Natural log of a positive value.
    pub fn ln(&self) -> Result<f64> {
        match self.sign {
            Sign::Positive => Ok(self.ln_abs),
            _ => Err(domain("logarithm of a nonpositive LogScalar")),
        }
    }

    /// Converts back to binary64; may be infinite or zero when out of range.
    pub fn to_f64(&self) -> f64 {
        (self.sign as i8) as f64 * self.ln_abs.exp()
    }

    pub fn abs(&self) -> Self {
        match self.sign {
            Sign::Zero => Self::ZERO,
            _ => Self::new(Sign::Positive, self.ln_abs),
        }
    }

    pub fn recip(&self) -> Self {
        assert!(self.sign != Sign::Zero, "reciprocal of zero");
        Self::new(self.sign, -self.ln_abs)
    }

    /// Real power of a positive value.
    pub fn powf(&self, p: f64) -> Self {
        match self.sign {
            Sign::Positive => Self::new(Sign::Positive, self.ln_abs * p),
            Sign::Zero if p > 0.0 => Self::ZERO,
            _ => panic!("powf of a nonpositive LogScalar"),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        *self * Self::from_f64(factor)
    }

    /// `self <= other * exp(slack)` for positive values; exact ordering
    /// otherwise.
    pub fn le_with_slack(&self, other: &Self, slack: f64) -> bool {
        match (self.sign, other.sign) {
            (Sign::Positive, Sign::Positive) => self.ln_abs <= other.ln_abs + slack,
            _ => self <= other,
        }
    }

    /// Scientific notation with `digits` significant digits, e.g.
    /// `1.23457e+25`.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.sign == Sign::Zero {
            return "0".to_string();
        }
        let log10 = self.log10_abs();
        let mut exponent = log10.floor();
        let mut mantissa = 10f64.powf(log10 - exponent);
        let scale = 10f64.powi(digits as i32 - 1);
        mantissa = (mantissa * scale).round() / scale;
        if mantissa >= 10.0 {
            mantissa /= 10.0;
            exponent += 1.0;
        }
        let sign = if self.sign == Sign::Negative { "-" } else { "" };
        let exp_sign = if exponent < 0.0 { '-' } else { '+' };
        format!(
            "{sign}{mantissa:.prec$}e{exp_sign}{:02}",
            exponent.abs() as i64,
            prec = digits - 1
        )
    }

    /// Parses strings produced by [`LogScalar::to_decimal_string`] (or any
    /// `[-]m[.fff]e[+-]n` literal) without overflowing.
    pub fn parse_decimal(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::ZERO);
        }
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (Sign::Negative, rest),
            None => (Sign::Positive, s),
        };
        let (mantissa, exponent) = match body.split_once(['e', 'E']) {
            Some((m, e)) => (m, e),
            None => (body, "0"),
        };
        let mantissa: f64 = mantissa
            .parse()
            .map_err(|_| domain(format!("invalid decimal mantissa in {s:?}")))?;
        let exponent: f64 = exponent
            .parse::<i64>()
            .map_err(|_| domain(format!("invalid decimal exponent in {s:?}")))? as f64;
        if mantissa == 0.0 {
            return Ok(Self::ZERO);
        }
        if !(mantissa > 0.0 && mantissa.is_finite()) {
            return Err(domain(format!("invalid decimal literal {s:?}")));
        }
        Ok(Self::new(sign, mantissa.ln() + exponent * std::f64::consts::LN_10))
    }
}

impl Default for LogScalar {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<f64> for LogScalar {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string(6))
    }
}

impl Neg for LogScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(self.sign.flip(), self.ln_abs)
    }
}

// products add logarithms
#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for LogScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.sign.times(rhs.sign), self.ln_abs + rhs.ln_abs)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for LogScalar {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl Add for LogScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.sign == Sign::Zero {
            return rhs;
        }
        if rhs.sign == Sign::Zero {
            return self;
        }
        let (big, small) = if self.ln_abs >= rhs.ln_abs {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let d = small.ln_abs - big.ln_abs;
        if big.sign == small.sign {
            Self::new(big.sign, big.ln_abs + d.exp().ln_1p())
        } else if d == 0.0 {
            Self::ZERO
        } else {
            Self::new(big.sign, big.ln_abs + (-d.exp_m1()).ln())
        }
    }
}

impl Sub for LogScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl std::iter::Sum for LogScalar {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl std::iter::Product for LogScalar {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ONE, |a, b| a * b)
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                Sign::Zero => Some(Ordering::Equal),
                Sign::Positive => self.ln_abs.partial_cmp(&other.ln_abs),
                Sign::Negative => other.ln_abs.partial_cmp(&self.ln_abs),
            },
            ord => Some(ord),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn huge_values_round_trip() {
        let x = LogScalar::exp(1000.0);
        assert!(x.to_f64().is_infinite());
        let s = x.to_decimal_string(6);
        assert_eq!(s, "1.97007e+434");
        let back = LogScalar::parse_decimal(&s).unwrap();
        assert!((back.ln_abs() - 1000.0).abs() < 1e-5);
    }

    #[test]
    fn addition_and_cancellation() {
        let a = LogScalar::from_f64(3.0);
        let b = LogScalar::from_f64(-3.0);
        assert_eq!(a + b, LogScalar::ZERO);
        let c = LogScalar::from_f64(5.0) - LogScalar::from_f64(2.0);
        assert!((c.to_f64() - 3.0).abs() < 1e-14);
        let d = LogScalar::from_f64(2.0) - LogScalar::from_f64(5.0);
        assert!((d.to_f64() + 3.0).abs() < 1e-14);
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(LogScalar::from_f64(1.0).to_decimal_string(6), "1.00000e+00");
        assert_eq!(LogScalar::from_f64(-0.00123).to_decimal_string(3), "-1.23e-03");
        assert_eq!(LogScalar::from_f64(9.999999).to_decimal_string(6), "1.00000e+01");
        assert_eq!(LogScalar::ZERO.to_decimal_string(6), "0");
    }

    #[test]
    fn ordering() {
        let xs = [
            -LogScalar::exp(3.0),
            -LogScalar::ONE,
            LogScalar::ZERO,
            LogScalar::ONE,
            LogScalar::exp(2.0),
        ];
        for w in xs.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    fn scalar() -> impl Strategy<Value = LogScalar> {
        (-2000.0..2000.0f64).prop_map(LogScalar::exp)
    }

    proptest! {
        #[test]
        fn multiplication_associates(a in scalar(), b in scalar(), c in scalar()) {
            let left = (a * b) * c;
            let right = a * (b * c);
            prop_assert!((left.ln_abs() - right.ln_abs()).abs() <= 1e-12 * left.ln_abs().abs().max(1.0));
        }

        #[test]
        fn same_sign_sum_dominates(a in scalar(), b in scalar()) {
            let s = a + b;
            prop_assert!(s.ln_abs() >= a.ln_abs().max(b.ln_abs()));
        }

        #[test]
        fn decimal_is_monotone(x in -700.0..700.0f64, dx in 1e-3..5.0f64) {
            let a = LogScalar::parse_decimal(&LogScalar::exp(x).to_decimal_string(6)).unwrap();
            let b = LogScalar::parse_decimal(&LogScalar::exp(x + dx).to_decimal_string(6)).unwrap();
            prop_assert!(a <= b);
        }

        #[test]
        fn decimal_round_trip(x in -3000.0..3000.0f64) {
            let v = LogScalar::exp(x);
            let back = LogScalar::parse_decimal(&v.to_decimal_string(6)).unwrap();
            prop_assert!((back.ln_abs() - x).abs() < 5.0e-6);
        }
    }
}
