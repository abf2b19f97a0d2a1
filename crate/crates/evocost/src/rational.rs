//! Exact rational parsing and rendering.
//!
//! Model arithmetic runs entirely on arbitrary-precision rationals; floats
//! only appear as a final rendering step. Literals are accepted as
//! integers (`32`), fractions (`25/400000000`), decimals (`0.25`) and
//! scientific notation (`0.6e-7`), and every form converts exactly with
//! no float round-trip.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parse a rational literal exactly. A `/` splits numerator and
/// denominator, each of which may itself be a decimal.
pub fn parse_rational(input: &str) -> Result<BigRational> {
    let s = input.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty numeric literal".into()));
    }
    match s.split_once('/') {
        Some((numer, denom)) => {
            let n = parse_decimal(numer)?;
            let d = parse_decimal(denom)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{input}`")));
            }
            Ok(n / d)
        }
        None => parse_decimal(s),
    }
}

/// Parse an exact non-negative integer; scientific notation such as `4e8`
/// is accepted as long as the value is a whole number that fits in 64 bits.
pub fn parse_count(input: &str) -> Result<u64> {
    let r = parse_rational(input)?;
    if !r.is_integer() || r.is_negative() {
        return Err(Error::Parse(format!(
            "`{input}` is not a non-negative integer"
        )));
    }
    r.to_integer()
        .to_u64()
        .ok_or_else(|| Error::Parse(format!("`{input}` exceeds the 64-bit range")))
}

fn parse_decimal(input: &str) -> Result<BigRational> {
    let s = input.trim();
    let bad = || Error::Parse(format!("invalid numeric literal `{input}`"));
    let (mantissa, exponent) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad())?),
        None => (s, 0i64),
    };
    let (negative, digits_part) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits_part.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits_part, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = [int_part, frac_part].concat();
    let unscaled: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i64;
    let magnitude: u32 = scale.unsigned_abs().try_into().map_err(|_| bad())?;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(unscaled * ten.pow(magnitude))
    } else {
        BigRational::new(unscaled, ten.pow(magnitude))
    };
    Ok(if negative { -value } else { value })
}

/// Nearest 64-bit float, for reporting only.
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Four-significant-digit scientific rendering used in text reports.
pub fn sci(r: &BigRational) -> String {
    format!("{:.4e}", to_f64(r))
}

/// Serialize a rational as its exact `p/q` (or integer) string.
pub mod serde_rational {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigRational, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(de)?;
        super::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// `Option<BigRational>` counterpart of [`serde_rational`].
pub mod serde_rational_opt {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        value: &Option<BigRational>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        match value {
            Some(r) => ser.serialize_some(&r.to_string()),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<BigRational>, D::Error> {
        let opt: Option<String> = Option::deserialize(de)?;
        opt.map(|s| super::parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}
