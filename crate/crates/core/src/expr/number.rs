use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};
use std::fmt;

/// Numeric literal: exact rational while it fits in `i64`, otherwise a double.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Number {
    Rational(Rational64),
    Real(f64),
}

impl Number {
    pub fn int(n: i64) -> Self {
        Number::Rational(Rational64::from_integer(n))
    }

    /// `p/q`; panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Number::Rational(Rational64::new(p, q))
    }

    /// A double, demoted to an exact rational when it is integral and small.
    pub fn real(v: f64) -> Self {
        if v.fract() == 0.0 && v.abs() < 1e15 {
            Number::int(v as i64)
        } else {
            Number::Real(v)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Number::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            Number::Real(v) => v,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Number::Rational(r) => r.is_zero(),
            Number::Real(v) => v == 0.0,
        }
    }

    pub fn is_one(self) -> bool {
        match self {
            Number::Rational(r) => r.is_one(),
            Number::Real(v) => v == 1.0,
        }
    }

    pub fn is_negative(self) -> bool {
        match self {
            Number::Rational(r) => r.is_negative(),
            Number::Real(v) => v < 0.0,
        }
    }

    pub fn is_integer(self) -> bool {
        match self {
            Number::Rational(r) => r.is_integer(),
            Number::Real(v) => v.fract() == 0.0,
        }
    }

    pub fn as_integer(self) -> Option<i64> {
        match self {
            Number::Rational(r) if r.is_integer() => Some(*r.numer()),
            _ => None,
        }
    }

    pub fn neg(self) -> Self {
        match self {
            Number::Rational(r) => match r.numer().checked_neg() {
                Some(n) => Number::Rational(Rational64::new_raw(n, *r.denom())),
                None => Number::Real(-self.to_f64()),
            },
            Number::Real(v) => Number::Real(-v),
        }
    }

    pub fn add(self, other: Self) -> Self {
        self.combine(other, |a, b| a.checked_add(&b), |a, b| a + b)
    }

    pub fn sub(self, other: Self) -> Self {
        self.combine(other, |a, b| a.checked_sub(&b), |a, b| a - b)
    }

    pub fn mul(self, other: Self) -> Self {
        self.combine(other, |a, b| a.checked_mul(&b), |a, b| a * b)
    }

    /// `None` on division by an exact or floating zero.
    pub fn div(self, other: Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        Some(self.combine(other, |a, b| a.checked_div(&b), |a, b| a / b))
    }

    /// Exact when the base is rational and the exponent a modest integer.
    pub fn pow(self, exp: Self) -> Option<Self> {
        if let (Number::Rational(base), Some(e)) = (self, exp.as_integer()) {
            if e.unsigned_abs() <= 64 {
                if base.is_zero() && e < 0 {
                    return None;
                }
                let mut acc = Some(Rational64::one());
                for _ in 0..e.unsigned_abs() {
                    acc = acc.and_then(|a| a.checked_mul(&base));
                }
                if let Some(a) = acc {
                    let r = if e < 0 { a.recip() } else { a };
                    return Some(Number::Rational(r));
                }
            }
        }
        let v = self.to_f64().powf(exp.to_f64());
        v.is_finite().then_some(Number::Real(v))
    }

    fn combine(
        self,
        other: Self,
        exact: impl Fn(Rational64, Rational64) -> Option<Rational64>,
        float: impl Fn(f64, f64) -> f64,
    ) -> Self {
        if let (Number::Rational(a), Number::Rational(b)) = (self, other) {
            if let Some(r) = exact(a, b) {
                return Number::Rational(r);
            }
        }
        Number::Real(float(self.to_f64(), other.to_f64()))
    }

    /// Parses a decimal literal such as `12`, `0.25` or `1.5e-3` exactly when possible.
    pub fn parse_decimal(text: &str) -> Option<Self> {
        let (mantissa, exponent) = match text.find(['e', 'E']) {
            Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
            None => (text, 0),
        };
        let (int_part, frac_part) = match mantissa.find('.') {
            Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let scale = exponent - frac_part.len() as i32;
        let exact = digits.parse::<i64>().ok().and_then(|n| {
            let ten = 10i64.checked_pow(scale.unsigned_abs())?;
            if scale >= 0 {
                n.checked_mul(ten).map(Number::int)
            } else {
                Some(Number::Rational(Rational64::new(n, ten)))
            }
        });
        exact.or_else(|| text.parse::<f64>().ok().map(Number::Real))
    }
}

impl From<i64> for Number {
    fn from(n: i64) -> Self {
        Number::int(n)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Number::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Number::Real(v) => {
                // `{:?}` is the shortest representation that round-trips.
                let s = format!("{v:?}");
                if s.contains("inf") || s.contains("NaN") {
                    write!(f, "{s}")
                } else {
                    write!(f, "{}", s.trim_end_matches(".0"))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(Number::parse_decimal("0.25"), Some(Number::ratio(1, 4)));
        assert_eq!(Number::parse_decimal("12"), Some(Number::int(12)));
        assert_eq!(
            Number::parse_decimal("1.5e-3"),
            Some(Number::ratio(3, 2000))
        );
        assert_eq!(Number::parse_decimal("2e3"), Some(Number::int(2000)));
        assert!(matches!(
            Number::parse_decimal("1e40"),
            Some(Number::Real(_))
        ));
    }

    #[test]
    fn exact_arithmetic_cancels() {
        let third = Number::ratio(1, 3);
        let sum = third.add(third).add(third);
        assert!(sum.is_one());
        assert_eq!(
            Number::ratio(2, 3).pow(Number::int(-2)),
            Some(Number::ratio(9, 4))
        );
        assert_eq!(Number::int(0).pow(Number::int(-1)), None);
        assert_eq!(Number::int(1).div(Number::int(0)), None);
    }

    #[test]
    fn overflow_falls_back_to_real() {
        let big = Number::int(i64::MAX);
        assert!(matches!(big.mul(big), Number::Real(_)));
    }

    #[test]
    fn display_round_trips_floats() {
        let v = Number::Real(0.1 + 0.2);
        let printed = v.to_string();
        assert_eq!(printed.parse::<f64>().unwrap(), 0.1 + 0.2);
        assert_eq!(Number::ratio(-3, 4).to_string(), "-3/4");
    }
}
