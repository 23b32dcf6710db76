//! Text forms: exact hexadecimal floats and human-readable decimals.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ball::Ball;
use crate::bigfloat::BigFloat;
use crate::mag::Mag;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?}: {reason}")]
pub struct ParseError {
    pub input: String,
    pub reason: &'static str,
}

fn perr(input: &str, reason: &'static str) -> ParseError {
    ParseError {
        input: input.to_string(),
        reason,
    }
}

/// `[-]0x<HEX>p<exp>`, exact.
pub fn bigfloat_to_hex(x: &BigFloat) -> String {
    if x.is_zero() {
        return "0x0p0".into();
    }
    let sign = if x.is_negative() { "-" } else { "" };
    format!("{sign}0x{:X}p{}", x.mantissa(), x.exponent())
}

/// Hex form of a radius; `inf` when unbounded.
pub fn mag_to_hex(m: Mag) -> String {
    if m.is_inf() {
        return "inf".into();
    }
    if m.is_zero() {
        return "0x0p0".into();
    }
    let (man, exp) = m.parts();
    let tz = man.trailing_zeros();
    format!("0x{:X}p{}", man >> tz, exp + tz as i64)
}

/// Splits an optional leading sign.
fn split_sign(s: &str) -> (bool, &str) {
    match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    }
}

fn parse_exp(s: &str, input: &str) -> Result<i64, ParseError> {
    s.parse::<i64>()
        .map_err(|_| perr(input, "bad exponent"))
        .and_then(|e| {
            if e.unsigned_abs() > 1 << 40 {
                Err(perr(input, "exponent out of range"))
            } else {
                Ok(e)
            }
        })
}

/// Parses `[-]0x<HEX>[.<HEX>][p<exp>]` exactly.
pub fn parse_hex(input: &str) -> Result<BigFloat, ParseError> {
    let s = input.trim();
    let (neg, rest) = split_sign(s);
    let body = rest
        .strip_prefix("0x")
        .or_else(|| rest.strip_prefix("0X"))
        .ok_or_else(|| perr(input, "missing 0x prefix"))?;
    let (digits, exp) = match body.find(['p', 'P']) {
        Some(i) => (&body[..i], parse_exp(&body[i + 1..], input)?),
        None => (body, 0),
    };
    let (int, frac) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return Err(perr(input, "no digits"));
    }
    let all = format!("{int}{frac}");
    let mant = BigUint::parse_bytes(all.as_bytes(), 16).ok_or_else(|| perr(input, "bad hex digit"))?;
    let e = exp - 4 * frac.len() as i64;
    Ok(BigFloat::from_parts(neg, mant, e))
}

/// Parses a hex radius (or `inf`), exactly when it fits a radius mantissa.
pub fn parse_mag_hex(input: &str) -> Result<Mag, ParseError> {
    if input.trim() == "inf" {
        return Ok(Mag::inf());
    }
    let x = parse_hex(input)?;
    if x.is_negative() {
        return Err(perr(input, "negative radius"));
    }
    if x.is_zero() {
        return Ok(Mag::zero());
    }
    let m = x
        .mantissa()
        .to_u128()
        .ok_or_else(|| perr(input, "radius mantissa too long"))?;
    Ok(Mag::from_parts_up(m, x.exponent()))
}

/// Parses `[-]digits[.digits][e[-]exp]` exactly.
pub fn parse_decimal(input: &str) -> Result<BigRational, ParseError> {
    let s = input.trim();
    let (neg, rest) = split_sign(s);
    let (digits, exp) = match rest.find(['e', 'E']) {
        Some(i) => (&rest[..i], parse_exp(&rest[i + 1..], input)?),
        None => (rest, 0),
    };
    let (int, frac) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return Err(perr(input, "no digits"));
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(perr(input, "bad decimal digit"));
    }
    if exp.unsigned_abs() > 1_000_000 {
        return Err(perr(input, "exponent out of range"));
    }
    let mant: BigInt = format!("{int}{frac}").parse().map_err(|_| perr(input, "bad digits"))?;
    let e = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    let mut q = if e >= 0 {
        BigRational::from_integer(mant * num_traits::pow(ten, e as usize))
    } else {
        BigRational::new(mant, num_traits::pow(ten, (-e) as usize))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

/// Parses a hex float or a decimal as an exact rational.
pub fn parse_real(input: &str) -> Result<BigRational, ParseError> {
    let t = input.trim();
    let (_, rest) = split_sign(t);
    if rest.starts_with("0x") || rest.starts_with("0X") {
        Ok(parse_hex(t)?.to_rational())
    } else {
        parse_decimal(t)
    }
}

/// Exact dyadic value of `q`, if its denominator is a power of two.
pub fn rational_to_bigfloat(q: &BigRational) -> Option<BigFloat> {
    let d = q.denom();
    let tz = d.trailing_zeros().unwrap_or(0);
    if (d >> tz as usize) != BigInt::one() {
        return None;
    }
    Some(BigFloat::from_bigint_2exp(q.numer(), -(tz as i64)))
}

/// A ball for a numeric literal: exact when dyadic, else rounded at `prec` bits.
pub fn parse_ball(input: &str, prec: u64) -> Result<Ball, ParseError> {
    let q = parse_real(input)?;
    Ok(match rational_to_bigfloat(&q) {
        Some(x) => Ball::exact(x),
        None => Ball::from_rational(&q, prec),
    })
}

/// Parses a nonnegative integer flag given in decimal or hex.
pub fn parse_u64(input: &str) -> Result<u64, ParseError> {
    let q = parse_real(input)?;
    if !q.is_integer() || q.is_negative() {
        return Err(perr(input, "expected a nonnegative integer"));
    }
    q.to_integer().to_u64().ok_or_else(|| perr(input, "integer too large"))
}

/// Significant digits used for a `p`-bit midpoint.
pub fn decimal_digits(p: u64) -> usize {
    (p as f64 * 0.30103).ceil() as usize + 3
}

/// `⌊log10 |q|⌋` for `q ≠ 0`.
fn floor_log10(q: &BigRational) -> i64 {
    let a = q.abs();
    let ten = BigRational::from_integer(10.into());
    let bits = a.numer().bits() as i64 - a.denom().bits() as i64;
    let mut e = (bits as f64 * std::f64::consts::LOG10_2).floor() as i64;
    let p10 = |e: i64| -> BigRational {
        if e >= 0 {
            num_traits::pow(ten.clone(), e as usize)
        } else {
            num_traits::pow(ten.clone(), (-e) as usize).recip()
        }
    };
    while p10(e) > a {
        e -= 1;
    }
    while p10(e + 1) <= a {
        e += 1;
    }
    e
}

/// `|q|` to `digits` significant digits: digit string, decimal exponent and the exact value printed.
fn sig_digits(q: &BigRational, digits: usize, up: bool) -> (String, i64, BigRational) {
    let a = q.abs();
    let mut e = floor_log10(&a);
    let ten = BigInt::from(10);
    let shift = digits as i64 - 1 - e;
    let scaled = if shift >= 0 {
        &a * BigRational::from_integer(num_traits::pow(ten.clone(), shift as usize))
    } else {
        &a / BigRational::from_integer(num_traits::pow(ten.clone(), (-shift) as usize))
    };
    let mut s = if up {
        scaled.ceil().to_integer()
    } else {
        scaled.round().to_integer()
    };
    let mut shift = shift;
    if s == num_traits::pow(ten.clone(), digits) {
        s /= &ten;
        e += 1;
        shift -= 1;
    }
    let value = if shift >= 0 {
        BigRational::new(s.clone(), num_traits::pow(ten, shift as usize))
    } else {
        BigRational::from_integer(&s * num_traits::pow(ten, (-shift) as usize))
    };
    (s.to_string(), e, value)
}

fn layout(neg: bool, d: &str, e: i64) -> String {
    let sign = if neg { "-" } else { "" };
    let trimmed = d.trim_end_matches('0');
    let d = if trimmed.is_empty() { "0" } else { trimmed };
    if (-5..=20).contains(&e) {
        let s = if e >= 0 {
            let e = e as usize;
            if d.len() > e + 1 {
                format!("{}.{}", &d[..=e], &d[e + 1..])
            } else {
                format!("{d}{}", "0".repeat(e + 1 - d.len()))
            }
        } else {
            format!("0.{}{d}", "0".repeat((-e - 1) as usize))
        };
        format!("{sign}{s}")
    } else if d.len() > 1 {
        format!("{sign}{}.{}e{e}", &d[..1], &d[1..])
    } else {
        format!("{sign}{d}e{e}")
    }
}

/// Decimal rendering of `q` to `digits` significant digits, rounded to nearest.
pub fn rational_to_decimal(q: &BigRational, digits: usize) -> (String, BigRational) {
    if q.is_zero() {
        return ("0".into(), BigRational::zero());
    }
    let (d, e, v) = sig_digits(q, digits, false);
    let v = if q.is_negative() { -v } else { v };
    (layout(q.is_negative(), &d, e), v)
}

/// A nonnegative `q` rounded up to two significant digits.
pub fn radius_to_decimal(q: &BigRational) -> String {
    if q.is_zero() {
        return "0".into();
    }
    let (d, e, _) = sig_digits(q, 2, true);
    layout(false, &d, e)
}

pub fn mag_to_rational(m: Mag) -> Option<BigRational> {
    if m.is_inf() {
        return None;
    }
    Some(BigFloat::from_mag(m).to_rational())
}

/// `(mid, rad)` decimal strings for a `p`-bit ball; the radius also covers the
/// rounding of the printed midpoint.
pub fn ball_to_decimal(b: &Ball, p: u64) -> (String, String) {
    let exact = b.mid().to_rational();
    let (mid, printed) = rational_to_decimal(&exact, decimal_digits(p));
    let rad = match mag_to_rational(b.rad()) {
        None => "inf".to_string(),
        Some(r) => radius_to_decimal(&(r + (exact - printed).abs())),
    };
    (mid, rad)
}

/// `mid ± rad` in decimal.
pub fn ball_to_string(b: &Ball, p: u64) -> String {
    let (m, r) = ball_to_decimal(b, p);
    format!("{m} +/- {r}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip() {
        for v in [0.375, -1.0, 0.0, 1e-300, 123456.789] {
            let x = BigFloat::from_f64(v);
            let s = bigfloat_to_hex(&x);
            assert_eq!(parse_hex(&s).unwrap(), x, "{s}");
        }
        assert_eq!(bigfloat_to_hex(&BigFloat::from_f64(0.375)), "0x3p-3");
        assert_eq!(parse_hex("0x1.8p-1").unwrap(), BigFloat::from_f64(0.75));
        let m = Mag::from_f64(1e-20);
        assert_eq!(parse_mag_hex(&mag_to_hex(m)).unwrap(), m);
        assert!(parse_hex("0xZ").is_err());
    }

    #[test]
    fn decimals() {
        assert_eq!(parse_decimal("0.3").unwrap(), BigRational::new(3.into(), 10.into()));
        assert_eq!(parse_decimal("-2.5e-3").unwrap(), BigRational::new((-1).into(), 400.into()));
        assert_eq!(parse_u64("0x10").unwrap(), 16);
        assert!(parse_u64("1.5").is_err());
        let (s, _) = rational_to_decimal(&BigRational::new(3.into(), 8.into()), 22);
        assert_eq!(s, "0.375");
        let (s, _) = rational_to_decimal(&BigRational::new(1.into(), 3.into()), 5);
        assert_eq!(s, "0.33333");
        assert_eq!(radius_to_decimal(&BigRational::new(1.into(), 3000.into())), "0.00034");
        let (s, _) = rational_to_decimal(&BigRational::from_integer(5050.into()), 10);
        assert_eq!(s, "5050");
        let (s, _) = rational_to_decimal(&BigRational::new(1.into(), BigInt::from(10).pow(30u32)), 3);
        assert_eq!(s, "1e-30");
    }

    #[test]
    fn printed_ball_contains_value() {
        let b = Ball::from_ratio(1, 3, 64);
        let (m, r) = ball_to_decimal(&b, 64);
        let lo = parse_decimal(&m).unwrap() - parse_decimal(&r).unwrap();
        let hi = parse_decimal(&m).unwrap() + parse_decimal(&r).unwrap();
        let third = BigRational::new(1.into(), 3.into());
        assert!(lo <= third && third <= hi);
    }
}
