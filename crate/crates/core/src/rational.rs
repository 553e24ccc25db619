//! Exact rational helpers shared by every exact code path.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `num / den` as a big rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn to_f64_vec(v: &[Rational]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

/// Parses `"a/b"`, `"a"` or a plain decimal such as `"0.125"` or `"-1.5e-3"`,
/// exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::InvalidInput("empty rational literal".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim())
            .map_err(|_| Error::InvalidInput(format!("bad numerator in {s:?}")))?;
        let d = BigInt::from_str(d.trim())
            .map_err(|_| Error::InvalidInput(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidInput(format!("cannot parse {s:?} as a rational"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&digits).map_err(|_| bad())?);
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if neg { -value } else { value })
}

/// Canonical `"a/b"` rendering (`"a"` for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// The rational with denominator at most `max_den` nearest to `x`
/// (best approximation via continued fractions / Stern-Brocot bounds).
pub fn nearest_rational(x: f64, max_den: u64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite number {x}")));
    }
    let exact = Rational::from_float(x).expect("finite float");
    if exact.denom() <= &BigInt::from(max_den) {
        return Ok(exact);
    }
    let max_den = BigInt::from(max_den);
    // Convergents p/q of the exact binary value.
    let (mut p0, mut q0, mut p1, mut q1) = (
        BigInt::zero(),
        BigInt::one(),
        BigInt::one(),
        BigInt::zero(),
    );
    let mut rest = exact.clone();
    loop {
        let a = rest.floor().to_integer();
        let q2 = &a * &q1 + &q0;
        if q2 > max_den {
            // Best semiconvergent with admissible denominator.
            let k = (&max_den - &q0).div_floor(&q1);
            let cand_a = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
            let cand_b = Rational::new(p1.clone(), q1.clone());
            let da = (&cand_a - &exact).abs();
            let db = (&cand_b - &exact).abs();
            return Ok(if da < db { cand_a } else { cand_b });
        }
        let p2 = &a * &p1 + &p0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            return Ok(Rational::new(p1, q1));
        }
        rest = frac.recip();
    }
}

/// A rational that is guaranteed to be `>= x` and within a relative
/// `2^-40` of it, for finite non-negative `x`.
pub fn upper_bound_of(x: f64) -> Rational {
    debug_assert!(x.is_finite() && x >= 0.0);
    let bumped = x * (1.0 + f64::powi(2.0, -40)) + f64::MIN_POSITIVE;
    Rational::from_float(bumped).expect("finite float")
}

/// Integer `ceil(base^(exp/2))`, i.e. the smallest integer at least
/// `base^(base/2)` when called with `exp == base`.
pub fn ceil_half_power(base: u64, exp: u32) -> BigInt {
    let full = num_traits::pow(BigInt::from(base), exp as usize);
    if exp % 2 == 0 {
        return num_traits::pow(BigInt::from(base), (exp / 2) as usize);
    }
    // ceil(sqrt(full))
    let s = full.sqrt();
    if &s * &s == full {
        s
    } else {
        s + 1
    }
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}
