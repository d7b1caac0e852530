//! Small helpers around `BigRational`: parsing, valuations, factoring of
//! desk-scale integers, square-root enclosures and float conversion.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses `"3/4"`, `"-2"` or a plain decimal such as `"0.3"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if let Some((int_part, frac_part)) = t.split_once('.') {
        if frac_part.is_empty() || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::BadParameter(format!("cannot parse rational {s:?}")));
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac_part);
        let numer: BigInt = digits
            .parse()
            .map_err(|_| Error::BadParameter(format!("cannot parse rational {s:?}")))?;
        let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
        let q = BigRational::new(numer, denom);
        return Ok(if negative { -q } else { q });
    }
    t.parse::<BigRational>()
        .map_err(|_| Error::BadParameter(format!("cannot parse rational {s:?}")))
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// p-adic order of a nonzero integer.
pub fn ord_p(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    if let (Some(mut m), Ok(pi)) = (n.to_i64(), i64::try_from(p)) {
        let mut k = 0;
        while m % pi == 0 {
            m /= pi;
            k += 1;
        }
        return k;
    }
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut k = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return k;
        }
        m = q;
        k += 1;
    }
}

/// p-adic order of a nonzero rational.
pub fn ord_p_rational(q: &BigRational, p: u64) -> i64 {
    ord_p(q.numer(), p) as i64 - ord_p(q.denom(), p) as i64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const TRIAL_LIMIT: u64 = 1 << 20;

/// Distinct prime divisors of a nonzero integer, ascending.
///
/// Trial division up to 2^20 followed by a primality test of the cofactor;
/// cofactors that are neither 1 nor prime are rejected.
pub fn prime_divisors(n: &BigInt) -> Result<Vec<u64>> {
    if n.is_zero() {
        return Err(Error::BadParameter("cannot factor zero".into()));
    }
    let mut m: BigUint = n.magnitude().clone();
    let mut primes = Vec::new();
    let mut d = 2u64;
    while d <= TRIAL_LIMIT {
        let bd = BigUint::from(d);
        if &bd * &bd > m {
            break;
        }
        if (&m % &bd).is_zero() {
            primes.push(d);
            while (&m % &bd).is_zero() {
                m /= &bd;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > BigUint::one() {
        match m.to_u64() {
            Some(r) if is_prime_u64(r) => primes.push(r),
            _ => {
                let bd = BigUint::from(TRIAL_LIMIT);
                if &bd * &bd > m {
                    // no divisor below sqrt(m): m is prime but exceeds u64
                    return Err(Error::BadParameter(format!("prime factor {m} exceeds 64 bits")));
                }
                return Err(Error::BadParameter(format!("cannot factor cofactor {m}")));
            }
        }
    }
    primes.sort_unstable();
    Ok(primes)
}

/// Nearest-ish f64 of a rational, robust to huge numerators/denominators.
pub fn to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            let v = n / d;
            if v.is_finite() && (v != 0.0 || q.is_zero()) {
                return v;
            }
        }
    }
    let (mn, en) = split_mantissa(q.numer());
    let (md, ed) = split_mantissa(q.denom());
    let v = (mn / md) * 2f64.powi((en - ed).clamp(-2000, 2000) as i32);
    if v.is_nan() {
        0.0
    } else {
        v
    }
}

/// n = m * 2^e with |m| in [2^52, 2^53) (truncated), for n ≠ 0.
pub(crate) fn split_mantissa(n: &BigInt) -> (f64, i64) {
    let bits = n.bits() as i64;
    let shift = (bits - 53).max(0);
    let top: BigInt = n.magnitude().clone().into();
    let top = top >> (shift as usize);
    let m = top.to_f64().unwrap_or(0.0);
    let m = if n.sign() == Sign::Minus { -m } else { m };
    (m, shift)
}

/// Natural log of a positive integer, with a generous absolute error bound.
pub(crate) fn ln_bigint(n: &BigInt) -> (f64, f64) {
    debug_assert!(n.is_positive());
    let (m, e) = split_mantissa(n);
    let v = m.ln() + e as f64 * std::f64::consts::LN_2;
    // truncation of the mantissa is at most 2^-52 relative
    let err = 4.0 * f64::EPSILON * (1.0 + v.abs());
    (v, err)
}

/// floor(x * 2^bits) / 2^bits.
pub fn floor_dyadic(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits as usize;
    let scaled = (x.numer() * &scale).div_floor(x.denom());
    BigRational::new(scaled, scale)
}

/// Rational enclosure `lo <= sqrt(x) <= hi` with relative width about 2^-bits.
pub fn sqrt_bounds(x: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(!x.is_negative(), "sqrt of a negative rational");
    if x.is_zero() {
        return (BigRational::zero(), BigRational::zero());
    }
    // sqrt(n/d) = sqrt(n d) / d
    let nd: BigUint = (x.numer() * x.denom()).magnitude().clone();
    let extra = bits.saturating_add(8);
    // bring n d to at least 2^(2 extra) so the integer sqrt has `extra` bits
    let nd_bits = nd.bits() as u32;
    let k = if nd_bits >= 2 * extra { 0 } else { (2 * extra - nd_bits) / 2 + 1 };
    let scaled = nd << (2 * k as usize);
    let root = scaled.sqrt();
    let exact = &root * &root == scaled;
    let denom = BigInt::from(BigUint::one() << k as usize) * x.denom();
    let lo = BigRational::new(BigInt::from(root.clone()), denom.clone());
    let hi = if exact {
        lo.clone()
    } else {
        BigRational::new(BigInt::from(root + 1u32), denom)
    };
    (lo, hi)
}

/// Smallest power of ten not below x, as an exponent; used for precision targets.
pub fn pow10(k: u32) -> BigInt {
    BigInt::from(10u32).pow(k)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
