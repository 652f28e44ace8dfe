//! Arbitrary-precision number types shared by every arithmetic path, plus
//! serde adapters that keep big values as decimal strings in JSON.

use num::BigInt;
use num::BigRational;

pub type ExactInt = BigInt;
pub type ExactRat = BigRational;

/// Serialize an [`ExactInt`] as a decimal string so values survive JSON
/// consumers that parse numbers into 64-bit floats.
pub mod int_string {
    use super::ExactInt;
    use serde::{de, Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &ExactInt, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<ExactInt, D::Error> {
        let s = String::deserialize(de)?;
        ExactInt::from_str(&s).map_err(de::Error::custom)
    }
}

/// Serialize an [`ExactRat`] as `{"num": "...", "den": "..."}` with decimal
/// string fields; the value is kept in lowest terms by construction.
pub mod rat_object {
    use super::{ExactInt, ExactRat};
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
    use std::str::FromStr;

    #[derive(Serialize, Deserialize)]
    struct Repr {
        num: String,
        den: String,
    }

    pub fn serialize<S: Serializer>(v: &ExactRat, ser: S) -> Result<S::Ok, S::Error> {
        Repr {
            num: v.numer().to_string(),
            den: v.denom().to_string(),
        }
        .serialize(ser)
    }

    /// Borrowing adapter for rationals inside sequences.
    pub struct Wrapper<'a>(pub &'a ExactRat);

    impl Serialize for Wrapper<'_> {
        fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
            serialize(self.0, ser)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<ExactRat, D::Error> {
        let r = Repr::deserialize(de)?;
        let num = ExactInt::from_str(&r.num).map_err(de::Error::custom)?;
        let den = ExactInt::from_str(&r.den).map_err(de::Error::custom)?;
        if den == ExactInt::from(0) {
            return Err(de::Error::custom("zero denominator"));
        }
        Ok(ExactRat::new(num, den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Wrap {
        #[serde(with = "int_string")]
        i: ExactInt,
        #[serde(with = "rat_object")]
        r: ExactRat,
    }

    #[test]
    fn round_trips_preserve_value() {
        let w = Wrap {
            i: ExactInt::from(-12345678901234567890i128),
            r: ExactRat::new(ExactInt::from(-10), ExactInt::from(4)),
        };
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(
            s,
            r#"{"i":"-12345678901234567890","r":{"num":"-5","den":"2"}}"#
        );
        let back: Wrap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
    }
}
