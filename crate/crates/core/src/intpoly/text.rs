//! Canonical text form `c_d*z^d + ... + c_0` and the JSON interchange form
//! (array of decimal strings, index `i` holding the coefficient of `z^i`).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::IntPolynomial;
use crate::Error;

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs().iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}*z")?,
                _ => write!(f, "{a}*z^{i}")?,
            }
        }
        Ok(())
    }
}

fn parse_term(term: &str, negative: bool) -> Result<(usize, BigInt), Error> {
    let bad = || Error::Parse(format!("malformed term '{term}'"));
    let term = term.trim();
    let (coeff, power) = match term.find('z') {
        None => (term, 0usize),
        Some(pos) => {
            let head = term[..pos].trim().trim_end_matches('*').trim();
            let tail = term[pos + 1..].trim();
            let power = if tail.is_empty() {
                1
            } else {
                tail.strip_prefix('^')
                    .ok_or_else(bad)?
                    .trim()
                    .parse()
                    .map_err(|_| bad())?
            };
            (head, power)
        }
    };
    let mut c = if coeff.is_empty() {
        BigInt::one()
    } else {
        coeff.parse::<BigInt>().map_err(|_| bad())?
    };
    if negative {
        c = -c;
    }
    Ok((power, c))
}

impl FromStr for IntPolynomial {
    type Err = Error;

    /// Accepts the canonical form and loose variants such as `z^2 + -1` or
    /// `-3*z^2+z-1`. Repeated powers are summed.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        let mut prev_significant: Option<char> = None;
        for ch in s.chars() {
            let is_sign = ch == '+' || ch == '-';
            let binary = is_sign && !matches!(prev_significant, None | Some('^' | '+' | '-' | '*'));
            if binary {
                terms.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else if is_sign && current.trim().is_empty() {
                if ch == '-' {
                    negative = !negative;
                }
            } else {
                current.push(ch);
            }
            if !ch.is_whitespace() {
                prev_significant = Some(ch);
            }
        }
        terms.push((negative, current));
        let mut coeffs: Vec<BigInt> = Vec::new();
        for (neg, t) in terms {
            let (power, c) = parse_term(&t, neg)?;
            if coeffs.len() <= power {
                coeffs.resize(power + 1, BigInt::zero());
            }
            coeffs[power] += c;
        }
        Ok(IntPolynomial::from_coeffs(coeffs))
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coeffs().iter().map(|c| c.to_string()))
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw: Vec<String> = Vec::deserialize(deserializer)?;
        let coeffs = raw
            .iter()
            .map(|s| s.trim().parse::<BigInt>().map_err(D::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntPolynomial::from_coeffs(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_text() {
        let f = IntPolynomial::from_i64(&[-1, 0, 1]);
        assert_eq!(f.to_string(), "1*z^2 - 1");
        let g = IntPolynomial::from_i64(&[3, -2, 0, -5]);
        assert_eq!(g.to_string(), "-5*z^3 - 2*z + 3");
        assert_eq!(IntPolynomial::zero().to_string(), "0");
        assert_eq!("1*z^2 + -1".parse::<IntPolynomial>().unwrap(), f);
        assert_eq!("z^2-1".parse::<IntPolynomial>().unwrap(), f);
        assert_eq!("-5z^3 -2*z+ 3".parse::<IntPolynomial>().unwrap(), g);
        assert!("z^^2".parse::<IntPolynomial>().is_err());
    }

    #[test]
    fn json_uses_decimal_strings() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let f = IntPolynomial::from_coeffs(vec![big, BigInt::from(-2), BigInt::one()]);
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"["123456789012345678901234567890","-2","1"]"#);
        let back: IntPolynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }

    proptest! {
        #[test]
        fn text_round_trip(v in prop::collection::vec(-1000i64..1000, 0..20)) {
            let f = IntPolynomial::from_i64(&v);
            prop_assert_eq!(f.to_string().parse::<IntPolynomial>().unwrap(), f);
        }
    }
}
