//! Bit-exact text encoding of `f64` as C99-style hexadecimal floats.
//!
//! Only the canonical form written by [`format`] is accepted back:
//! `±0x1.<hex>p±e` for normal numbers, `±0x0.<hex>p-1022` for subnormals and
//! `±0x0p+0` for zero.

use crate::error::{Error, Result};

const MANTISSA_BITS: u32 = 52;
const MANTISSA_MASK: u64 = (1 << MANTISSA_BITS) - 1;

pub fn format(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let biased = ((bits >> MANTISSA_BITS) & 0x7ff) as i32;
    let mant = bits & MANTISSA_MASK;
    if biased == 0 && mant == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if biased == 0 {
        (0, -1022)
    } else {
        (1, biased - 1023)
    };
    let digits = format!("{mant:013x}");
    let digits = digits.trim_end_matches('0');
    if digits.is_empty() {
        format!("{sign}0x{lead}p{exp:+}")
    } else {
        format!("{sign}0x{lead}.{digits}p{exp:+}")
    }
}

pub fn parse(s: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("not a canonical hex float: {s:?}"));
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let body = body.strip_prefix("0x").ok_or_else(bad)?;
    let (mantissa, exp) = body.split_once('p').ok_or_else(bad)?;
    let exp: i32 = exp.parse().map_err(|_| bad())?;
    let (lead, frac) = match mantissa.split_once('.') {
        Some((l, f)) => (l, f),
        None => (mantissa, ""),
    };
    if frac.len() > 13 || !frac.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(bad());
    }
    let frac_bits = if frac.is_empty() {
        0
    } else {
        u64::from_str_radix(frac, 16).map_err(|_| bad())? << (4 * (13 - frac.len()))
    };
    let sign_bit = if negative { 1u64 << 63 } else { 0 };
    let bits = match lead {
        "1" if (-1022..=1023).contains(&exp) => {
            sign_bit | (((exp + 1023) as u64) << MANTISSA_BITS) | frac_bits
        }
        "0" if frac_bits == 0 && exp == 0 => sign_bit,
        "0" if exp == -1022 => sign_bit | frac_bits,
        _ => return Err(bad()),
    };
    Ok(f64::from_bits(bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_encodings() {
        assert_eq!(format(1.0), "0x1p+0");
        assert_eq!(format(-2.0), "-0x1p+1");
        assert_eq!(format(0.5), "0x1p-1");
        assert_eq!(format(3.0), "0x1.8p+1");
        assert_eq!(format(0.0), "0x0p+0");
        assert_eq!(format(-0.0), "-0x0p+0");
        assert_eq!(format(std::f64::consts::PI), "0x1.921fb54442d18p+1");
        assert_eq!(format(f64::from_bits(1)), "0x0.0000000000001p-1022");
        assert_eq!(parse("0x1.8p+1").unwrap(), 3.0);
        assert!(parse("-0x0p+0").unwrap().is_sign_negative());
    }

    #[test]
    fn rejects_garbage() {
        for s in [
            "1.0",
            "0x2p+0",
            "0x1.fffffffffffff0p+0",
            "0x1p+1024",
            "0x1.gp+0",
            "0x1",
        ] {
            assert!(parse(s).is_err(), "{s}");
        }
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let back = parse(&format(x)).unwrap();
            prop_assert_eq!(back.to_bits(), bits);
        }
    }
}
