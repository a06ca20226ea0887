//! Exact text encoding for binary64 reals.
//!
//! Every real in a document is written as a C99-style hex float followed by a
//! decimal mirror in parentheses, e.g. `"0x1.8p+1 (3)"`. Only the hex part is
//! read back, so encode/decode is bit-exact. Readers also accept bare JSON
//! numbers and decimal strings so that hand-written files stay convenient.

use serde::de::{self, Deserializer, Visitor};
use serde::Serializer;
use std::fmt;

/// Formats `x` as a hex float. Infinities are `inf` / `-inf`, NaN is `nan`.
pub fn format_hex(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 && frac == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_bits == 0 {
        (0, -1022)
    } else {
        (1, exp_bits - 1023)
    };
    let mut digits = format!("{frac:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let exp_sign = if exp < 0 { '-' } else { '+' };
    if digits.is_empty() {
        format!("{sign}0x{lead}p{exp_sign}{}", exp.abs())
    } else {
        format!("{sign}0x{lead}.{digits}p{exp_sign}{}", exp.abs())
    }
}

/// Hex float plus decimal mirror, the form written into documents.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{} ({})", format_hex(x), x)
    } else {
        format_hex(x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRealError(pub String);

impl fmt::Display for ParseRealError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid real literal `{}`", self.0)
    }
}

impl std::error::Error for ParseRealError {}

/// Parses the leading token of `s`: a hex float, a decimal, or `inf`/`-inf`.
/// Anything after the first whitespace (the decimal mirror) is ignored.
pub fn parse_real(s: &str) -> Result<f64, ParseRealError> {
    let token = s.split_whitespace().next().unwrap_or("");
    let err = || ParseRealError(s.to_string());
    match token {
        "inf" | "+inf" | "infinity" | "+infinity" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    let unsigned = token.trim_start_matches(['+', '-']);
    if unsigned.starts_with("0x") || unsigned.starts_with("0X") {
        // hexf-parse rejects a leading '+', and wants a binary exponent.
        let t = token.strip_prefix('+').unwrap_or(token);
        let owned;
        let t = if t.contains(['p', 'P']) {
            t
        } else {
            owned = format!("{t}p0");
            &owned
        };
        hexf_parse::parse_hexf64(t, false).map_err(|_| err())
    } else {
        token.parse::<f64>().map_err(|_| err())
    }
}

struct RealVisitor;

impl<'de> Visitor<'de> for RealVisitor {
    type Value = f64;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a real number or hex-float string")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
        Ok(v)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
        parse_real(v).map_err(E::custom)
    }
}

/// `#[serde(with = "hexfloat")]` for `f64` fields.
pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_real(*x))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    d.deserialize_any(RealVisitor)
}

/// `#[serde(with = "hexfloat::vec")]` for `Vec<f64>` fields.
pub mod vec {
    use super::*;
    use serde::de::SeqAccess;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format_real(*x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        struct SeqVisitor;
        impl<'de> Visitor<'de> for SeqVisitor {
            type Value = Vec<f64>;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a list of reals")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Vec<f64>, A::Error> {
                let mut out = Vec::with_capacity(seq.size_hint().unwrap_or(0));
                while let Some(Real(x)) = seq.next_element()? {
                    out.push(x);
                }
                Ok(out)
            }
        }
        d.deserialize_seq(SeqVisitor)
    }
}

/// `#[serde(with = "hexfloat::option")]` for `Option<f64>` fields.
pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&format_real(*v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        let r: Option<Real> = serde::Deserialize::deserialize(d)?;
        Ok(r.map(|r| r.0))
    }
}

/// `#[serde(with = "hexfloat::option_vec")]` for `Option<Vec<f64>>` fields.
pub mod option_vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
        match xs {
            Some(v) => s.serialize_some(&v.iter().map(|x| Real(*x)).collect::<Vec<_>>()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
        let r: Option<Vec<Real>> = serde::Deserialize::deserialize(d)?;
        Ok(r.map(|v| v.into_iter().map(|r| r.0).collect()))
    }
}

/// Newtype wrapper that (de)serializes through the hex-float encoding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl serde::Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize(&self.0, s)
    }
}

impl<'de> serde::Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        deserialize(d).map(Real)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_encodings() {
        assert_eq!(format_hex(1.0), "0x1p+0");
        assert_eq!(format_hex(3.0), "0x1.8p+1");
        assert_eq!(format_hex(-0.25), "-0x1p-2");
        assert_eq!(format_hex(0.0), "0x0p+0");
        assert_eq!(format_hex(-0.0), "-0x0p+0");
        assert_eq!(format_hex(f64::INFINITY), "inf");
        assert_eq!(format_real(1.5), "0x1.8p+0 (1.5)");
    }

    #[test]
    fn parses_mirrored_and_plain_forms() {
        assert_eq!(parse_real("0x1.8p+0 (1.5)").unwrap(), 1.5);
        assert_eq!(parse_real("2.25").unwrap(), 2.25);
        assert_eq!(parse_real("-inf").unwrap(), f64::NEG_INFINITY);
        assert_eq!(parse_real("+0x1p+1").unwrap(), 2.0);
        assert!(parse_real("banana").is_err());
    }

    #[test]
    fn subnormals_round_trip() {
        for bits in [1u64, 0x000f_ffff_ffff_ffff, 0x0008_0000_0000_0000] {
            let x = f64::from_bits(bits);
            assert_eq!(parse_real(&format_hex(x)).unwrap().to_bits(), bits);
        }
    }

    proptest! {
        #[test]
        fn finite_values_round_trip_bit_exactly(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(!x.is_nan());
            let back = parse_real(&format_real(x)).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
