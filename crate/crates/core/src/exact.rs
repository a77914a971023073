//! Exact scalars shared by every module: rationals and signs.
//!
//! Nothing in this crate uses floating point. Rationals are always reduced and
//! render as `p/q` (or `p` when the denominator is one).

use std::fmt;
use std::ops::{Mul, MulAssign, Neg};

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = Ratio<i128>;

pub fn rational(numer: i128, denom: i128) -> Rational {
    Ratio::new(numer, denom)
}

pub fn integer(value: i128) -> Rational {
    Ratio::from_integer(value)
}

/// Parse `p/q` or `p`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: i128 = p.trim().parse().ok()?;
            let q: i128 = q.trim().parse().ok()?;
            (q != 0).then(|| Ratio::new(p, q))
        }
        None => text.parse::<i128>().ok().map(Ratio::from_integer),
    }
}

/// True when the reduced denominator is a power of two.
pub fn is_dyadic(value: &Rational) -> bool {
    let d = *value.denom();
    d > 0 && d & (d - 1) == 0
}

/// serde adapter writing a rational as the string `p/q`.
pub mod as_str {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(value)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_rational(&text)
            .ok_or_else(|| serde::de::Error::custom(format!("not a rational: {text:?}")))
    }
}

/// serde adapter for `Vec<Rational>` as a list of `p/q` strings.
pub mod vec_as_str {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[Rational], serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(values.iter().map(|v| v.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(deserializer)?;
        texts
            .iter()
            .map(|t| {
                parse_rational(t)
                    .ok_or_else(|| serde::de::Error::custom(format!("not a rational: {t:?}")))
            })
            .collect()
    }
}

/// An element of {+1, -1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^exponent`.
    pub fn pow_neg_one(exponent: i64) -> Sign {
        if exponent.rem_euclid(2) == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }

    pub fn as_rational(self) -> Rational {
        integer(self.value() as i128)
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl MulAssign for Sign {
    fn mul_assign(&mut self, rhs: Sign) {
        *self = *self * rhs;
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i64(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Sign, D::Error> {
        match i64::deserialize(deserializer)? {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(serde::de::Error::custom(format!("sign must be +1 or -1, got {other}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        assert_eq!(parse_rational("3/6"), Some(rational(1, 2)));
        assert_eq!(parse_rational("-4"), Some(integer(-4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(rational(6, 4).to_string(), "3/2");
        assert_eq!(integer(8).to_string(), "8");
    }

    #[test]
    fn dyadic() {
        assert!(is_dyadic(&rational(3, 8)));
        assert!(is_dyadic(&integer(5)));
        assert!(!is_dyadic(&rational(1, 3)));
    }

    #[test]
    fn sign_algebra() {
        assert_eq!(Sign::Minus * Sign::Minus, Sign::Plus);
        assert_eq!(Sign::pow_neg_one(-3), Sign::Minus);
        assert_eq!(-Sign::Plus, Sign::Minus);
    }
}
