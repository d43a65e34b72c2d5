//! Exact rationals and their text forms.
//!
//! Rationals travel as `"p/q"` strings in every file format so that values
//! survive a round trip bit-exactly.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"`, `"p"` or a plain decimal like `"0.25"`.
pub fn parse(s: &str) -> std::result::Result<Rational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational".into());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let q: BigInt = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !whole_digits.chars().all(|c| c.is_ascii_digit())
        {
            return Err(format!("bad decimal {s:?}"));
        }
        let digits = format!("{whole_digits}{frac}");
        let n: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| format!("bad decimal {s:?}"))?
        };
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| format!("bad rational {s:?}"))?;
    Ok(Rational::from_integer(n))
}

pub fn parse_field(field: &str, s: &str) -> Result<Rational> {
    parse(s).map_err(|m| Error::config(field, m))
}

/// Canonical `"p/q"` form; integers keep the `/1` so readers never guess.
pub fn to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // fall back through logarithms for enormous numerators and denominators
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    if r.is_zero() {
        return 0.0;
    }
    sign * (log_abs(r)).exp()
}

/// Natural log of |r| without overflowing f64 on the way.
pub fn log_abs(r: &Rational) -> f64 {
    big_log(r.numer()) - big_log(r.denom())
}

fn big_log(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(0.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Fixed-point decimal rendering with `digits` digits after the point,
/// rounded half away from zero.
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = r * Rational::from_integer(scale);
    let negative = scaled.is_negative();
    let abs = scaled.abs();
    let (q, rem) = abs.numer().div_rem(abs.denom());
    let rounded = if rem.clone() * 2u32 >= *abs.denom() { q + 1u32 } else { q };
    let mut s = rounded.to_str_radix(10);
    if s.len() <= digits {
        s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
    }
    let (int_part, frac_part) = s.split_at(s.len() - digits);
    let sign = if negative && rounded_nonzero(&s) { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

fn rounded_nonzero(s: &str) -> bool {
    s.chars().any(|c| c != '0')
}

/// Rational approximation of sqrt(r) with absolute error below 10^-digits.
pub fn sqrt_approx(r: &Rational, digits: u32) -> Rational {
    assert!(!r.is_negative(), "square root of a negative rational");
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    let num = r.numer() * &scale * &scale;
    let root = (num / r.denom()).sqrt();
    Rational::new(root, scale)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scales `v` by `d` and returns the integer result; `d` must clear the denominator.
pub fn scale_to_integer(v: &Rational, d: &BigInt) -> BigInt {
    let (q, r) = (v.numer() * d).div_rem(v.denom());
    debug_assert!(r.is_zero());
    q
}

pub fn sign(r: &Rational) -> Sign {
    r.numer().sign()
}

/// An unreduced quotient `num/den` with `den > 0`.
///
/// Exact results whose numerator and denominator run to hundreds of
/// thousands of bits stay in this form; reducing them would cost a gcd that
/// dwarfs the computation that produced them.
#[derive(Clone, Debug)]
pub struct RawRatio {
    pub num: BigInt,
    pub den: BigInt,
}

impl RawRatio {
    pub fn new(num: BigInt, den: BigInt) -> RawRatio {
        assert!(!den.is_zero(), "zero denominator");
        if den.is_negative() {
            RawRatio { num: -num, den: -den }
        } else {
            RawRatio { num, den }
        }
    }

    pub fn reduce(&self) -> Rational {
        Rational::new(self.num.clone(), self.den.clone())
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    pub fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        // keep about 80 significant bits of the quotient, then rescale
        let s = 80 - (self.num.bits() as i64 - self.den.bits() as i64);
        let fixed = if s >= 0 {
            (&self.num << s as u64) / &self.den
        } else {
            &self.num / (&self.den << (-s) as u64)
        };
        let f = fixed.to_f64().unwrap_or(0.0);
        if s.abs() < 1000 {
            f * 2f64.powi(-s as i32)
        } else {
            f.signum() * (f.abs().log2() - s as f64).exp2()
        }
    }

    /// `⌊num·2^bits / den⌋` (truncated toward zero).
    pub fn fixed(&self, bits: u64) -> BigInt {
        fixed_point(&self.num, &self.den, bits)
    }
}

/// `num·2^bits / den` truncated toward zero.
pub fn fixed_point(num: &BigInt, den: &BigInt, bits: u64) -> BigInt {
    (num << bits) / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse("-3/6").unwrap(), ratio(-1, 2));
        assert_eq!(parse("7").unwrap(), int(7));
        assert_eq!(parse("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse("-0.5").unwrap(), ratio(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn string_round_trip() {
        let r = ratio(-22, 7);
        assert_eq!(to_string(&r), "-22/7");
        assert_eq!(parse(&to_string(&r)).unwrap(), r);
        assert_eq!(to_string(&int(3)), "3/1");
    }

    #[test]
    fn decimals() {
        assert_eq!(to_decimal(&ratio(1, 3), 5), "0.33333");
        assert_eq!(to_decimal(&ratio(2, 3), 3), "0.667");
        assert_eq!(to_decimal(&ratio(-1, 8), 2), "-0.13");
        assert_eq!(to_decimal(&int(12), 0), "12");
        assert_eq!(to_decimal(&ratio(-1, 1000), 2), "0.00");
    }

    #[test]
    fn huge_values_convert() {
        let big = Rational::new(num_traits::pow(BigInt::from(3), 2000), num_traits::pow(BigInt::from(3), 1999));
        assert!((to_f64(&big) - 3.0).abs() < 1e-12);
        let tiny = Rational::new(BigInt::one(), num_traits::pow(BigInt::from(2), 1100));
        assert!((log_abs(&tiny) + 1100.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn sqrt_is_close() {
        let s = sqrt_approx(&int(2), 40);
        let err = &s * &s - int(2);
        assert!(err.abs() < ratio(1, 1_000_000_000_000_000));
    }
}
