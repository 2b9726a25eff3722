//! Integer and rational helpers shared by every module: gcd-style number
//! theory, canonical `"p/q"` serialization, decimal rendering, and a small
//! exact linear solver.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Euler's totient by trial factorization.
pub fn totient(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

const TRIAL_LIMIT: u64 = 1_000_000;
const MAX_DIVISORS: usize = 20_000;

/// Positive divisors of `|n|`, ascending.
///
/// Factorization is by trial division up to 10^6; a leftover cofactor is
/// treated as prime, so for very large inputs the list may be incomplete.
/// Returns `None` for zero or for integers wider than 128 bits.
pub fn bounded_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    if n.is_zero() {
        return None;
    }
    let mut m = n.abs().to_u128()?;
    let mut factors: Vec<(u128, u32)> = Vec::new();
    let mut p: u128 = 2;
    while p * p <= m && p <= TRIAL_LIMIT as u128 {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    let mut divs: Vec<u128> = vec![1];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk: u128 = 1;
            for _ in 0..=e {
                next.push(d.checked_mul(pk)?);
                pk = pk.saturating_mul(p);
            }
        }
        divs = next;
        if divs.len() > MAX_DIVISORS {
            return None;
        }
    }
    divs.sort_unstable();
    Some(divs.into_iter().map(BigInt::from).collect())
}

/// Floor of a rational.
pub fn floor(x: &BigRational) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// Ceiling of a rational.
pub fn ceil(x: &BigRational) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// Nearest integer, ties away from zero.
pub fn round(x: &BigRational) -> BigInt {
    let half = rat(1, 2);
    if x.is_negative() {
        -floor(&(-x + half))
    } else {
        floor(&(x + half))
    }
}

/// Decimal expansion of `x` truncated toward zero after `digits` places.
pub fn to_decimal(x: &BigRational, digits: usize) -> String {
    let neg = x.is_negative();
    let a = x.abs();
    let ip = floor(&a);
    let mut frac = a - BigRational::from_integer(ip.clone());
    let mut out = String::new();
    if neg && !(ip.is_zero() && frac.is_zero()) {
        out.push('-');
    }
    out.push_str(&ip.to_string());
    if digits > 0 {
        out.push('.');
        let ten = BigInt::from(10);
        for _ in 0..digits {
            frac *= BigRational::from_integer(ten.clone());
            let d = floor(&frac);
            out.push_str(&d.to_string());
            frac -= BigRational::from_integer(d);
        }
    }
    out
}

/// Decimal places matching `bits` of binary precision.
pub fn digits_for_bits(bits: u32) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).floor() as usize
}

pub fn two_pow_neg(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits as usize)
}

pub fn sign(x: &BigRational) -> i8 {
    match x.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Parse `"p/q"` or `"p"` into a reduced rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// Canonical reduced form; integers render without a denominator.
pub fn format_rational(x: &BigRational) -> String {
    x.to_string()
}

/// Solve `m x = rhs` over Q by Gaussian elimination with pivot search.
/// Returns `None` when the matrix is singular.
pub fn solve_linear(mut m: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).find(|&row| !m[row][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = m[col][col].recip();
        for row in (col + 1)..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = &m[row][col] * &inv;
            for k in col..n {
                let delta = &factor * &m[col][k];
                m[row][k] -= delta;
            }
            let delta = &factor * &rhs[col];
            rhs[row] -= delta;
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for k in (row + 1)..n {
            acc -= &m[row][k] * &x[k];
        }
        x[row] = acc / &m[row][row];
    }
    Some(x)
}

/// Serde adapter writing rationals as reduced `"p/q"` strings.
pub mod serde_rational {
    use super::{format_rational, parse_rational};
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).ok_or_else(|| D::Error::custom(format!("bad rational {raw:?}")))
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&format_rational(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter()
                .map(|r| parse_rational(r).ok_or_else(|| D::Error::custom(format!("bad rational {r:?}"))))
                .collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(x) => s.serialize_some(&format_rational(x)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
            let raw = Option::<String>::deserialize(d)?;
            raw.map(|r| parse_rational(&r).ok_or_else(|| D::Error::custom(format!("bad rational {r:?}"))))
                .transpose()
        }
    }

    pub mod option_pair {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<(BigRational, BigRational)>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(p) => super::pair::serialize(p, s),
                None => s.serialize_none(),
            }
        }
    }

    pub mod pair {
        use super::*;
        use serde::Serialize;

        pub fn serialize<S: Serializer>(x: &(BigRational, BigRational), s: S) -> Result<S::Ok, S::Error> {
            [format_rational(&x.0), format_rational(&x.1)].serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(BigRational, BigRational), D::Error> {
            let [a, b] = <[String; 2]>::deserialize(d)?;
            let p = |r: &str| parse_rational(r).ok_or_else(|| D::Error::custom(format!("bad rational {r:?}")));
            Ok((p(&a)?, p(&b)?))
        }
    }
}
