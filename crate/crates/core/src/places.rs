//! Places of Q and of a number field F above them, and the normalized
//! absolute values `|.|_{v,K}` (extension convention) and `|.|_w`
//! (normalized so that the product formula holds over F).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField};
use crate::interval::Interval;
use crate::modp::lifted_factors;
use crate::poly::QPoly;
use crate::rat::{ord_p, ord_p_rational, prime_divisors};
use crate::roots::{image_abs, refine_complex, refine_real, root_enclosures, RootEnclosure};

/// A place of Q: the archimedean place or a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RationalPlace {
    Infinity,
    Prime(u64),
}

impl fmt::Display for RationalPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalPlace::Infinity => write!(f, "inf"),
            RationalPlace::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for RationalPlace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RationalPlace::Infinity => s.serialize_str("inf"),
            RationalPlace::Prime(p) => s.serialize_u64(*p),
        }
    }
}

/// Which normalization of the absolute value is requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `|a|_{v,K} = |N_{F_w/Q_v}(a)|_v^{1/[F_w:Q_v]}`; restricts to `|.|_v` on Q.
    Extension,
    /// `|a|_w = |N_{F_w/Q_v}(a)|_v^{1/[F:Q]}`; satisfies the product formula on F.
    FieldNormalized,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LocalData {
    Embedding(RootEnclosure),
    /// Monic factor of the minimal polynomial over Z_p. When `modulus` is
    /// set the coefficients are only known modulo it.
    Padic { factor: Vec<BigInt>, modulus: Option<BigInt> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Place {
    pub v: RationalPlace,
    pub w_index: usize,
    pub local_degree: usize,
    pub e: usize,
    pub f: usize,
    pub local: LocalData,
}

impl Place {
    pub fn is_archimedean(&self) -> bool {
        self.v == RationalPlace::Infinity
    }

    pub fn prime(&self) -> Option<u64> {
        match self.v {
            RationalPlace::Prime(p) => Some(p),
            RationalPlace::Infinity => None,
        }
    }

    pub fn embedding(&self) -> Option<&RootEnclosure> {
        match &self.local {
            LocalData::Embedding(r) => Some(r),
            LocalData::Padic { .. } => None,
        }
    }

    pub fn local_factor(&self) -> Option<&[BigInt]> {
        match &self.local {
            LocalData::Padic { factor, .. } => Some(factor),
            LocalData::Embedding(_) => None,
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Place", 4)?;
        st.serialize_field("v", &self.v)?;
        st.serialize_field("w_index", &self.w_index)?;
        st.serialize_field("e", &self.e)?;
        st.serialize_field("f", &self.f)?;
        st.end()
    }
}

/// Bits of working precision for `digits` decimal digits.
pub fn bits_for(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

fn legendre(a: &BigInt, p: u64) -> i32 {
    let bp = BigInt::from(p);
    let r = a.mod_floor(&bp);
    if r.is_zero() {
        return 0;
    }
    let t = r.modpow(&BigInt::from((p - 1) / 2), &bp);
    if t.is_one() {
        1
    } else {
        -1
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    debug_assert!(g.gcd.is_one());
    g.x.mod_floor(m)
}

/// Square root of a quadratic residue unit `u` modulo `p^k`, odd `p`.
fn sqrt_mod_prime_power(u: &BigInt, p: u64, k: u32) -> BigInt {
    let bp = BigInt::from(p);
    let r = u.mod_floor(&bp).to_u64().unwrap();
    let root = tonelli(r, p);
    let m = bp.pow(k);
    let mut t = BigInt::from(root);
    // Newton: t <- t - (t^2 - u) / (2t), doubling the precision each step
    let mut prec = 1u32;
    while prec < k {
        prec = (2 * prec).min(k);
        let mm = bp.pow(prec);
        let inv = mod_inverse(&(BigInt::from(2) * &t), &mm);
        t = (&t - (&t * &t - u) * inv).mod_floor(&mm);
    }
    t.mod_floor(&m)
}

fn tonelli(n: u64, p: u64) -> u64 {
    let pw = |b: u64, e: u64| -> u64 {
        let (mut r, mut b, mut e) = (1u128, b as u128 % p as u128, e);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u128;
            }
            b = b * b % p as u128;
            e >>= 1;
        }
        r as u64
    };
    if p == 2 || n == 0 {
        return n % p;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pw(z, (p - 1) / 2) == p - 1).unwrap();
    let (mut m, mut c, mut t, mut r) = (s, pw(z, q), pw(n, q), pw(n, q.div_ceil(2)));
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = (tt as u128 * tt as u128 % p as u128) as u64;
            i += 1;
        }
        let b = pw(c, 1u64 << (m - i - 1));
        m = i;
        c = (b as u128 * b as u128 % p as u128) as u64;
        t = (t as u128 * c as u128 % p as u128) as u64;
        r = (r as u128 * b as u128 % p as u128) as u64;
    }
    r
}

/// Square root of `u ≡ 1 (mod 8)` modulo `2^k`.
fn sqrt_mod_two_power(u: &BigInt, k: u32) -> BigInt {
    let mut t = BigInt::one();
    for m in 3..k {
        // t^2 ≡ u (mod 2^m); fix the next bit
        let mm = BigInt::one() << (m + 1) as usize;
        if !(&t * &t - u).mod_floor(&mm).is_zero() {
            t += BigInt::one() << (m - 1) as usize;
        }
    }
    t.mod_floor(&(BigInt::one() << k as usize))
}

fn exact_factor(field: &NumberField) -> LocalData {
    LocalData::Padic { factor: field.min_poly().to_vec(), modulus: None }
}

fn quadratic_places(field: &NumberField, p: u64, digits: u32) -> Result<Vec<Place>> {
    let mp = field.min_poly();
    let (c, b) = (&mp[0], &mp[1]);
    let disc = b * b - BigInt::from(4) * c;
    let bp = BigInt::from(p);
    let k2 = ord_p(&disc, p);
    let unit = &disc / bp.pow(k2);
    let one = |e, f| Place {
        v: RationalPlace::Prime(p),
        w_index: 0,
        local_degree: 2,
        e,
        f,
        local: exact_factor(field),
    };
    let split = if p == 2 {
        if k2 % 2 == 1 || unit.mod_floor(&BigInt::from(4)) == BigInt::from(3) {
            return Ok(vec![one(2, 1)]);
        }
        unit.mod_floor(&BigInt::from(8)).is_one()
    } else {
        if k2 % 2 == 1 {
            return Ok(vec![one(2, 1)]);
        }
        legendre(&unit, p) == 1
    };
    if !split {
        return Ok(vec![one(1, 2)]);
    }
    let k = k2 / 2;
    if k >= digits {
        return Err(Error::PrecisionExhausted(format!(
            "the two roots above {p} agree to {digits} p-adic digits"
        )));
    }
    let n = digits;
    let modulus = bp.pow(n);
    // r = (-b ± p^k sqrt(u)) / 2
    let mut roots: Vec<BigInt> = if p == 2 {
        let m1 = BigInt::one() << (n + 1) as usize;
        let s = sqrt_mod_two_power(&unit, n + 1) << k as usize;
        [&s, &(-&s)]
            .iter()
            .map(|sq| {
                let num = (-b + *sq).mod_floor(&m1);
                debug_assert!(num.is_even());
                (num >> 1usize).mod_floor(&modulus)
            })
            .collect()
    } else {
        let s = sqrt_mod_prime_power(&unit, p, n) * bp.pow(k);
        let inv2 = mod_inverse(&BigInt::from(2), &modulus);
        [&s, &(-&s)]
            .iter()
            .map(|sq| ((-b + *sq) * &inv2).mod_floor(&modulus))
            .collect()
    };
    roots.sort();
    Ok(roots
        .into_iter()
        .enumerate()
        .map(|(i, r)| Place {
            v: RationalPlace::Prime(p),
            w_index: i,
            local_degree: 1,
            e: 1,
            f: 1,
            local: LocalData::Padic {
                factor: vec![(-r).mod_floor(&modulus), BigInt::one()],
                modulus: Some(modulus.clone()),
            },
        })
        .collect())
}

/// All places of `field` above `v`.
///
/// `digits` is the number of p-adic digits kept in approximate local factors
/// and the number of decimal digits of archimedean root enclosures.
pub fn places_above(field: &NumberField, v: RationalPlace, digits: u32) -> Result<Vec<Place>> {
    if digits == 0 {
        return Err(Error::BadParameter("precision must be positive".into()));
    }
    match v {
        RationalPlace::Infinity => {
            let enclosures = root_enclosures(field.poly(), bits_for(digits))?;
            Ok(enclosures
                .into_iter()
                .enumerate()
                .map(|(i, enc)| {
                    let ld = if enc.is_real() { 1 } else { 2 };
                    Place { v, w_index: i, local_degree: ld, e: 1, f: ld, local: LocalData::Embedding(enc) }
                })
                .collect())
        }
        RationalPlace::Prime(p) => {
            if !crate::rat::is_prime_u64(p) {
                return Err(Error::BadParameter(format!("{p} is not prime")));
            }
            let d = field.degree();
            if d == 1 {
                return Ok(vec![Place { v, w_index: 0, local_degree: 1, e: 1, f: 1, local: exact_factor(field) }]);
            }
            if d == 2 {
                return quadratic_places(field, p, digits);
            }
            if (field.poly_disc() % BigInt::from(p)).is_zero() {
                return Err(Error::UnsupportedRamification(p));
            }
            let factors = lifted_factors(field.min_poly(), p, digits);
            if factors.len() == 1 {
                return Ok(vec![Place { v, w_index: 0, local_degree: d, e: 1, f: d, local: exact_factor(field) }]);
            }
            let modulus = BigInt::from(p).pow(digits);
            Ok(factors
                .into_iter()
                .enumerate()
                .map(|(i, g)| {
                    let deg = g.len() - 1;
                    Place {
                        v,
                        w_index: i,
                        local_degree: deg,
                        e: 1,
                        f: deg,
                        local: LocalData::Padic { factor: g, modulus: Some(modulus.clone()) },
                    }
                })
                .collect())
        }
    }
}

/// The place above `v` with index `w_index`.
pub fn place(field: &NumberField, v: RationalPlace, w_index: usize, digits: u32) -> Result<Place> {
    let mut all = places_above(field, v, digits)?;
    if w_index >= all.len() {
        return Err(Error::InvalidSpec(format!(
            "place index {w_index} out of range: {} place(s) above {v}",
            all.len()
        )));
    }
    Ok(all.swap_remove(w_index))
}

/// A normalized absolute value, kept exact where possible.
#[derive(Clone, Debug, PartialEq)]
pub enum AbsValue {
    Zero,
    /// `p^exponent`.
    PrimePower { p: u64, exponent: BigRational },
    /// `x^power` for some `x` in `[lo, hi]`, `lo > 0`.
    Archimedean { lo: BigRational, hi: BigRational, power: BigRational },
}

impl AbsValue {
    /// Enclosure of the natural logarithm; `None` for zero.
    pub fn ln(&self) -> Option<Interval> {
        match self {
            AbsValue::Zero => None,
            AbsValue::PrimePower { p, exponent } => {
                if exponent.is_zero() {
                    Some(Interval::ZERO)
                } else {
                    Some(Interval::ln_u64(*p).mul(&Interval::from_rational(exponent)))
                }
            }
            AbsValue::Archimedean { lo, hi, power } => {
                let l = Interval::ln_of_bounds(lo, hi);
                if power.is_one() {
                    Some(l)
                } else {
                    Some(l.mul(&Interval::from_rational(power)))
                }
            }
        }
    }

    /// The value as an exact rational, when it is one.
    pub fn exact(&self) -> Option<BigRational> {
        match self {
            AbsValue::Zero => Some(BigRational::zero()),
            AbsValue::PrimePower { p, exponent } if exponent.is_integer() => {
                let e = exponent.to_integer().to_i32()?;
                let base = BigRational::from_integer(BigInt::from(*p));
                Some(if e >= 0 { base.pow(e) } else { base.pow(-e).recip() })
            }
            AbsValue::Archimedean { lo, hi, power } if lo == hi && power.is_one() => Some(lo.clone()),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            AbsValue::Zero => 0.0,
            _ => self.ln().map_or(0.0, |l| l.mid().exp()),
        }
    }
}

/// Exponent `ord_p(N_{F_w/Q_p}(a))` for a nonzero element.
pub fn local_norm_order(place: &Place, a: &FieldElement) -> Result<i64> {
    let p = place.prime().ok_or_else(|| Error::BadParameter("archimedean place has no order".into()))?;
    let LocalData::Padic { factor, modulus } = &place.local else {
        return Err(Error::BadParameter("place carries no local factor".into()));
    };
    let (num, den) = a.integral_repr();
    let k = num.iter().filter(|c| !c.is_zero()).map(|c| ord_p(c, p)).min().unwrap_or(0);
    let pk = BigInt::from(p).pow(k);
    let reduced: Vec<BigInt> = num.iter().map(|c| c / &pk).collect();
    let g = QPoly::from_ints(factor);
    let res = QPoly::from_ints(&reduced).resultant_with_monic(&g).to_integer();
    if let Some(m) = modulus {
        if (&res % m).is_zero() {
            return Err(Error::PrecisionExhausted(format!(
                "local norm order at a place above {p} is not determined by the p-adic precision"
            )));
        }
    }
    debug_assert!(!res.is_zero());
    let ld = place.local_degree as i64;
    Ok(ord_p(&res, p) as i64 + ld * (k as i64 - ord_p(&den, p) as i64))
}

fn archimedean_bounds(field: &NumberField, enc: &RootEnclosure, a: &FieldElement, digits: u32) -> Result<(BigRational, BigRational)> {
    let poly = a.to_poly();
    let tol = BigRational::new(BigInt::one(), crate::rat::pow10(digits));
    let mut bits = bits_for(digits);
    let mut enc = enc.clone();
    for attempt in 0..5 {
        if attempt > 0 {
            bits *= 2;
            enc = match &enc {
                RootEnclosure::Real { lo, hi } => {
                    let (lo, hi) = refine_real(field.poly(), lo, hi, bits);
                    RootEnclosure::Real { lo, hi }
                }
                RootEnclosure::Complex { re, im, .. } => {
                    let (re, im, radius) = refine_complex(field.poly(), re, im, bits)?;
                    RootEnclosure::Complex { re, im, radius }
                }
            };
        }
        if let Some((lo, hi)) = image_abs(&poly, &enc, bits) {
            if lo == hi || &hi - &lo <= &lo * &tol {
                return Ok((lo, hi));
            }
        }
    }
    Err(Error::PrecisionExhausted(format!(
        "archimedean absolute value of {a} not resolved to {digits} digits"
    )))
}

/// Over Q both normalizations agree and the value is exact.
fn rational_abs_value(place: &Place, r: &BigRational) -> AbsValue {
    match place.prime() {
        Some(p) => AbsValue::PrimePower { p, exponent: BigRational::from_integer(BigInt::from(-ord_p_rational(r, p))) },
        None => {
            let m = r.abs();
            AbsValue::Archimedean { lo: m.clone(), hi: m, power: BigRational::one() }
        }
    }
}

/// Absolute value of `a` at `place` in the requested normalization.
pub fn abs_value(field: &NumberField, place: &Place, a: &FieldElement, norm: Normalization, digits: u32) -> Result<AbsValue> {
    if a.field().as_ref() != field {
        return Err(Error::FieldMismatch);
    }
    if a.is_zero() {
        return Ok(AbsValue::Zero);
    }
    if let Some(r) = a.as_rational() {
        if field.is_rationals() {
            return Ok(rational_abs_value(place, r));
        }
    }
    let n = field.degree() as i64;
    let ld = place.local_degree as i64;
    match &place.local {
        LocalData::Padic { .. } => {
            let ord = local_norm_order(place, a)?;
            let denom = match norm {
                Normalization::Extension => ld,
                Normalization::FieldNormalized => n,
            };
            let p = place.prime().unwrap();
            Ok(AbsValue::PrimePower { p, exponent: BigRational::new(BigInt::from(-ord), BigInt::from(denom)) })
        }
        LocalData::Embedding(enc) => {
            let (lo, hi) = archimedean_bounds(field, enc, a, digits)?;
            let power = match norm {
                Normalization::Extension => BigRational::one(),
                Normalization::FieldNormalized => BigRational::new(BigInt::from(ld), BigInt::from(n)),
            };
            Ok(AbsValue::Archimedean { lo, hi, power })
        }
    }
}

/// Enclosure of `ln |a|` at `place`; `Err(OnSupport)` when `a = 0`.
pub fn ln_abs(field: &NumberField, place: &Place, a: &FieldElement, norm: Normalization, digits: u32) -> Result<Interval> {
    abs_value(field, place, a, norm, digits)?.ln().ok_or(Error::OnSupport)
}

/// Primes at which `a` can fail to be a unit.
pub fn support_primes(a: &FieldElement) -> Result<Vec<u64>> {
    let (_, den) = a.integral_repr();
    let n = a.field().degree() as u32;
    let na = a.norm() * BigRational::from_integer(den.pow(n));
    debug_assert!(na.is_integer());
    let mut primes = prime_divisors(&den)?;
    primes.extend(prime_divisors(&na.to_integer())?);
    primes.sort_unstable();
    primes.dedup();
    Ok(primes)
}

/// `|sum_v ln |a|_v|` over all places of F, using field-normalized values.
///
/// Over Q the product of the absolute values is formed exactly and an exact
/// product of one gives a defect of exactly zero.
pub fn product_formula_defect(field: &NumberField, a: &FieldElement, digits: u32) -> Result<f64> {
    if a.is_zero() {
        return Err(Error::BadParameter("the product formula needs a nonzero element".into()));
    }
    let mut values = Vec::new();
    for p in support_primes(a)? {
        for w in places_above(field, RationalPlace::Prime(p), digits)? {
            values.push(abs_value(field, &w, a, Normalization::FieldNormalized, digits)?);
        }
    }
    for w in places_above(field, RationalPlace::Infinity, digits)? {
        values.push(abs_value(field, &w, a, Normalization::FieldNormalized, digits)?);
    }
    if field.is_rationals() {
        let exact: Option<BigRational> = values.iter().map(AbsValue::exact).product();
        if exact.is_some_and(|x| x.is_one()) {
            return Ok(0.0);
        }
    }
    let total = values
        .iter()
        .map(|v| v.ln().expect("nonzero element"))
        .fold(Interval::ZERO, |acc, x| acc.add(&x));
    Ok(total.lo.abs().max(total.hi.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use std::sync::Arc;

    fn sqrt2() -> Arc<NumberField> {
        NumberField::from_i64(&[-2, 0, 1]).unwrap()
    }

    fn ef(places: &[Place]) -> Vec<(usize, usize)> {
        places.iter().map(|p| (p.e, p.f)).collect()
    }

    #[test]
    fn splitting_in_q_sqrt2() {
        let f = sqrt2();
        assert_eq!(ef(&places_above(&f, RationalPlace::Prime(7), 20).unwrap()), vec![(1, 1), (1, 1)]);
        assert_eq!(ef(&places_above(&f, RationalPlace::Prime(2), 20).unwrap()), vec![(2, 1)]);
        assert_eq!(ef(&places_above(&f, RationalPlace::Prime(3), 20).unwrap()), vec![(1, 2)]);
        let inf = places_above(&f, RationalPlace::Infinity, 20).unwrap();
        assert_eq!(inf.len(), 2);
        assert!(inf.iter().all(|w| w.local_degree == 1));
    }

    #[test]
    fn split_factors_are_roots_mod_p_power() {
        // x^2 - x - 1 splits at p = ±1 mod 5; x^2 - x - 4 (disc 17) splits at 2
        for (c, primes) in [(-1i64, vec![11u64, 19, 29, 31]), (-4, vec![2, 13])] {
            let f = NumberField::from_i64(&[c, -1, 1]).unwrap();
            for p in primes {
                let ws = places_above(&f, RationalPlace::Prime(p), 15).unwrap();
                assert_eq!(ws.len(), 2, "p = {p}");
                for w in ws {
                    let LocalData::Padic { factor, modulus: Some(m) } = &w.local else { panic!() };
                    let r = -&factor[0];
                    let val = &r * &r - &r + BigInt::from(c);
                    assert!((val % m).is_zero());
                }
            }
        }
    }

    #[test]
    fn absolute_values() {
        let q = NumberField::rationals();
        let w2 = place(&q, RationalPlace::Prime(2), 0, 20).unwrap();
        let six = FieldElement::from_int(&q, 6);
        assert_eq!(
            abs_value(&q, &w2, &six, Normalization::Extension, 20).unwrap().exact(),
            Some(rat(1, 2))
        );
        let f = sqrt2();
        let t = FieldElement::theta(&f);
        let v2 = place(&f, RationalPlace::Prime(2), 0, 20).unwrap();
        assert_eq!(
            abs_value(&f, &v2, &t, Normalization::Extension, 20).unwrap(),
            AbsValue::PrimePower { p: 2, exponent: rat(-1, 2) }
        );
        let inf = place(&f, RationalPlace::Infinity, 1, 20).unwrap();
        let v = abs_value(&f, &inf, &t, Normalization::Extension, 20).unwrap();
        assert!((v.to_f64() - 2f64.sqrt()).abs() < 1e-14);
        let l = v.ln().unwrap();
        assert!(l.contains(0.5 * 2f64.ln()) || (l.mid() - 0.5 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rationals_restrict_to_p_adic_values() {
        let f = sqrt2();
        let a = FieldElement::from_rational(&f, rat(-35, 12));
        for p in [2u64, 3, 5, 7] {
            for w in places_above(&f, RationalPlace::Prime(p), 20).unwrap() {
                let v = abs_value(&f, &w, &a, Normalization::Extension, 20).unwrap();
                let e = -crate::rat::ord_p_rational(&rat(-35, 12), p);
                assert_eq!(v, AbsValue::PrimePower { p, exponent: BigRational::from_integer(e.into()) });
            }
        }
    }

    #[test]
    fn product_formula_examples() {
        let q = NumberField::rationals();
        for (n, d) in [(6, 1), (1, 1), (-35, 12)] {
            let a = FieldElement::from_rational(&q, rat(n, d));
            assert_eq!(product_formula_defect(&q, &a, 30).unwrap(), 0.0);
        }
        let f = sqrt2();
        let a = FieldElement::new(&f, vec![rat(3, 5), rat(-7, 2)]).unwrap();
        assert!(product_formula_defect(&f, &a, 30).unwrap() < 1e-12);
        let g = NumberField::from_i64(&[1, 0, 1]).unwrap();
        let b = FieldElement::new(&g, vec![rat(5, 1), rat(12, 7)]).unwrap();
        assert!(product_formula_defect(&g, &b, 30).unwrap() < 1e-12);
        let c = NumberField::from_i64(&[-2, 0, 0, 1]).unwrap();
        // norm 127, prime to the discriminant 108
        let x = FieldElement::new(&c, vec![rat(5, 1), rat(1, 1)]).unwrap();
        assert!(product_formula_defect(&c, &x, 30).unwrap() < 1e-12);
    }

    #[test]
    fn local_degrees_sum_to_field_degree() {
        for poly in [[-2i64, 0, 1], [1, 0, 1], [-1, -1, 1], [-5, 0, 1]] {
            let f = NumberField::from_i64(&poly).unwrap();
            for p in (2u64..200).filter(|&p| crate::rat::is_prime_u64(p)) {
                let ws = places_above(&f, RationalPlace::Prime(p), 12).unwrap();
                assert_eq!(ws.iter().map(|w| w.e * w.f).sum::<usize>(), 2, "{poly:?} p = {p}");
                assert!(ws.iter().all(|w| w.e * w.f == w.local_degree));
            }
        }
    }

    #[test]
    fn cubic_ramified_prime_is_out_of_scope() {
        let c = NumberField::from_i64(&[-2, 0, 0, 1]).unwrap();
        assert_eq!(places_above(&c, RationalPlace::Prime(3), 10), Err(Error::UnsupportedRamification(3)));
        let ws = places_above(&c, RationalPlace::Prime(5), 10).unwrap();
        assert_eq!(ws.iter().map(|w| w.local_degree).sum::<usize>(), 3);
    }
}
