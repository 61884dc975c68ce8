//! Exact rationals and their `"p/q"` text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rat = BigRational;

pub fn from_i64(x: i64) -> Rat {
    Rat::from_integer(BigInt::from(x))
}

pub fn from_big(x: BigInt) -> Rat {
    Rat::from_integer(x)
}

pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"` or `"p"`; the result is reduced.
pub fn parse(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let bad = || format!("not a rational: {s:?}");
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rat::new(p, q))
}

/// Always `"p/q"` with `q >= 1`, so machine output has a single shape.
pub fn format(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `"p"` for integers, `"p/q"` otherwise.
pub fn format_short(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format(r)
    }
}

/// Serde adapter storing a rational as a `"p/q"` string.
pub mod serde_rat {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse("-7").unwrap(), from_i64(-7));
        assert_eq!(parse(" 1 / -2 ").unwrap(), ratio(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert_eq!(format(&from_i64(3)), "3/1");
        assert_eq!(format(&ratio(-2, 6)), "-1/3");
        assert_eq!(format_short(&from_i64(3)), "3");
    }
}
