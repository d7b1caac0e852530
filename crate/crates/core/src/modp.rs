//! Polynomials over F_p, Berlekamp factorization, Hensel lifting to Z/p^k
//! and the Zassenhaus irreducibility test for monic integer polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::QPoly;
use crate::rat::is_prime_u64;

pub type FpPoly = Vec<u64>;

fn trim(mut v: FpPoly) -> FpPoly {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powm(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b, p);
        }
        b = mulm(b, b, p);
        e >>= 1;
    }
    r
}

fn invm(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    powm(a, p - 2, p)
}

fn deg(a: &FpPoly) -> Option<usize> {
    a.len().checked_sub(1)
}

fn fp_sub(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

fn fp_add(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

fn fp_mul(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulm(x, y, p)) % p;
        }
    }
    trim(out)
}

fn fp_divrem(a: &FpPoly, d: &FpPoly, p: u64) -> (FpPoly, FpPoly) {
    let dd = deg(d).expect("division by zero polynomial mod p");
    let inv = invm(d[dd], p);
    let mut rem = a.clone();
    if rem.len() <= dd {
        return (Vec::new(), trim(rem));
    }
    let mut quot = vec![0u64; rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = mulm(rem[k + dd], inv, p);
        if c != 0 {
            for (j, &dc) in d.iter().enumerate() {
                rem[k + j] = (rem[k + j] + p - mulm(c, dc, p)) % p;
            }
        }
        quot[k] = c;
    }
    rem.truncate(dd);
    (trim(quot), trim(rem))
}

fn fp_monic(a: &FpPoly, p: u64) -> FpPoly {
    match a.last() {
        Some(&l) => {
            let inv = invm(l, p);
            a.iter().map(|&c| mulm(c, inv, p)).collect()
        }
        None => Vec::new(),
    }
}

fn fp_gcd(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let r = fp_divrem(&x, &y, p).1;
        x = y;
        y = r;
    }
    fp_monic(&x, p)
}

/// `(g, s, t)` with `s a + t b = g` monic.
fn fp_ext_gcd(a: &FpPoly, b: &FpPoly, p: u64) -> (FpPoly, FpPoly, FpPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        let t2 = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let inv = invm(*r0.last().unwrap(), p);
    let sc = |v: &FpPoly| trim(v.iter().map(|&c| mulm(c, inv, p)).collect());
    (sc(&r0), sc(&s0), sc(&t0))
}

fn fp_powmod(base: &FpPoly, mut e: u64, m: &FpPoly, p: u64) -> FpPoly {
    let mut result = vec![1u64];
    let mut b = fp_divrem(base, m, p).1;
    while e > 0 {
        if e & 1 == 1 {
            result = fp_divrem(&fp_mul(&result, &b, p), m, p).1;
        }
        b = fp_divrem(&fp_mul(&b, &b, p), m, p).1;
        e >>= 1;
    }
    result
}

/// Reduction of an integer polynomial mod p.
pub fn reduce_mod_p(f: &[BigInt], p: u64) -> FpPoly {
    let bp = BigInt::from(p);
    trim(f.iter().map(|c| c.mod_floor(&bp).to_u64().unwrap()).collect())
}

/// Kernel basis of a square matrix mod p.
fn fp_nullspace(mut m: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = invm(m[r][c], p);
        for j in 0..cols {
            m[r][j] = mulm(m[r][j], inv, p);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] = (m[i][j] + p - mulm(f, m[r][j], p)) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut y = vec![0u64; cols];
            y[f] = 1;
            for (ri, &pc) in pivots.iter().enumerate() {
                y[pc] = (p - m[ri][f]) % p;
            }
            y
        })
        .collect()
}

/// Berlekamp factorization of a monic squarefree polynomial over F_p.
///
/// Factors are monic and sorted by (degree, coefficients).
pub fn berlekamp(f: &FpPoly, p: u64) -> Vec<FpPoly> {
    let d = deg(f).expect("zero polynomial");
    debug_assert_eq!(f[d], 1);
    if d <= 1 {
        return vec![f.clone()];
    }
    let xp = fp_powmod(&vec![0, 1], p, f, p);
    let mut q_rows = Vec::with_capacity(d);
    let mut cur = vec![1u64];
    for _ in 0..d {
        let mut row = cur.clone();
        row.resize(d, 0);
        q_rows.push(row);
        cur = fp_divrem(&fp_mul(&cur, &xp, p), f, p).1;
    }
    // v Q = v  <=>  (Q - I)^T v^T = 0
    let m: Vec<Vec<u64>> = (0..d)
        .map(|j| {
            (0..d)
                .map(|k| {
                    let q = q_rows[k][j];
                    if j == k {
                        (q + p - 1) % p
                    } else {
                        q
                    }
                })
                .collect()
        })
        .collect();
    let basis = fp_nullspace(m, p);
    let r = basis.len();
    let mut factors = vec![f.clone()];
    for v in basis.into_iter().map(trim) {
        if factors.len() == r {
            break;
        }
        if deg(&v).unwrap_or(0) == 0 {
            continue;
        }
        let mut next = Vec::new();
        for h in factors {
            if deg(&h) == Some(1) || next.len() + 1 > r {
                next.push(h);
                continue;
            }
            let dh = deg(&h).unwrap();
            let mut parts = Vec::new();
            let mut covered = 0;
            for s in 0..p {
                let g = fp_gcd(&h, &fp_sub(&v, &vec![s], p), p);
                if let Some(dg) = deg(&g) {
                    if dg >= 1 {
                        covered += dg;
                        parts.push(g);
                    }
                }
                if covered == dh {
                    break;
                }
            }
            if parts.len() > 1 {
                next.extend(parts);
            } else {
                next.push(h);
            }
        }
        factors = next;
    }
    factors.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    factors
}

// ---- integer polynomials mod p^k -----------------------------------------

fn zmod(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut v: Vec<BigInt> = a.iter().map(|c| c.mod_floor(m)).collect();
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn zmul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn zsub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default()
        })
        .collect()
}

fn lift_from_fp(a: &FpPoly) -> Vec<BigInt> {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

/// Lifts `f ≡ g h (mod p)` with monic `g`, `h` to `f ≡ G H (mod p^k)`.
fn hensel_pair(
    f: &[BigInt],
    g: &FpPoly,
    h: &FpPoly,
    p: u64,
    k: u32,
) -> (Vec<BigInt>, Vec<BigInt>) {
    let bp = BigInt::from(p);
    let (one, s, t) = fp_ext_gcd(g, h, p);
    assert_eq!(one, vec![1], "Hensel lifting needs coprime factors mod p");
    let mut gz = lift_from_fp(g);
    let mut hz = lift_from_fp(h);
    let mut pj = bp.clone();
    for _ in 1..k {
        let next = &pj * &bp;
        let diff = zmod(&zsub(f, &zmul(&gz, &hz)), &next);
        let e: FpPoly = trim(
            diff.iter()
                .map(|c| {
                    debug_assert!((c % &pj).is_zero());
                    (c / &pj).mod_floor(&bp).to_u64().unwrap()
                })
                .collect(),
        );
        if !e.is_empty() {
            let te = fp_mul(&t, &e, p);
            let (q, sigma) = fp_divrem(&te, g, p);
            let tau = fp_add(&fp_mul(&s, &e, p), &fp_mul(&q, h, p), p);
            let bump = |base: &mut Vec<BigInt>, corr: &FpPoly| {
                if base.len() < corr.len() {
                    base.resize(corr.len(), BigInt::zero());
                }
                for (i, &c) in corr.iter().enumerate() {
                    base[i] += BigInt::from(c) * &pj;
                }
            };
            bump(&mut gz, &sigma);
            bump(&mut hz, &tau);
        }
        pj = next;
        gz = zmod(&gz, &pj);
        hz = zmod(&hz, &pj);
    }
    (zmod(&gz, &pj), zmod(&hz, &pj))
}

/// Lifts the monic factorization `f ≡ prod factors (mod p)` to mod p^k.
///
/// `f` must be monic with integer coefficients and squarefree mod p.
pub fn hensel_lift(f: &[BigInt], factors: &[FpPoly], p: u64, k: u32) -> Vec<Vec<BigInt>> {
    let modulus = BigInt::from(p).pow(k);
    if factors.len() <= 1 {
        return vec![zmod(f, &modulus)];
    }
    let mut out = Vec::with_capacity(factors.len());
    let mut target: Vec<BigInt> = f.to_vec();
    for i in 0..factors.len() - 1 {
        let rest = factors[i + 1..]
            .iter()
            .fold(vec![1u64], |acc, g| fp_mul(&acc, g, p));
        let (g, h) = hensel_pair(&target, &factors[i], &rest, p, k);
        out.push(g);
        target = h;
    }
    out.push(target);
    out
}

/// Factors mod p of a monic integer polynomial, lifted to mod p^k.
pub fn lifted_factors(f: &[BigInt], p: u64, k: u32) -> Vec<Vec<BigInt>> {
    let fp = reduce_mod_p(f, p);
    let factors = berlekamp(&fp, p);
    hensel_lift(f, &factors, p, k)
}

fn symmetric(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half = m / 2;
    a.iter()
        .map(|c| {
            let r = c.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect()
}

/// Next combination of `k` indices out of `n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Irreducibility over Q of a monic integer polynomial.
///
/// Rational-root check, then Berlekamp modulo a few primes not dividing the
/// discriminant (degree-pattern intersection), then Hensel lifting beyond
/// the Mignotte bound with trial recombination of the lifted factors.
pub fn is_irreducible(f: &[BigInt]) -> bool {
    let qf = QPoly::from_ints(f);
    let d = match qf.degree() {
        Some(d) => d,
        None => return false,
    };
    if d <= 1 {
        return d == 1;
    }
    if !qf.is_squarefree() {
        return false;
    }
    if has_rational_root(f) {
        return false;
    }
    let disc = qf.discriminant_monic().to_integer();
    let mut candidates: Vec<(u64, Vec<FpPoly>)> = Vec::new();
    let mut possible: Vec<bool> = vec![true; d + 1];
    let mut p = 2u64;
    while candidates.len() < 5 && p < 10_000 {
        if is_prime_u64(p) && !(&disc % BigInt::from(p)).is_zero() {
            let factors = berlekamp(&reduce_mod_p(f, p), p);
            if factors.len() == 1 {
                return true;
            }
            let mut sums = vec![false; d + 1];
            sums[0] = true;
            for g in &factors {
                let dg = g.len() - 1;
                for s in (dg..=d).rev() {
                    if sums[s - dg] {
                        sums[s] = true;
                    }
                }
            }
            for (slot, ok) in possible.iter_mut().zip(&sums) {
                *slot &= *ok;
            }
            candidates.push((p, factors));
        }
        p += 1;
    }
    if (1..d).all(|s| !possible[s]) {
        return true;
    }
    let (p, factors) = candidates
        .into_iter()
        .min_by_key(|(_, fs)| fs.len())
        .expect("no good prime below 10000");
    let norm1: BigInt = f.iter().map(|c| c.abs()).sum();
    let bound = (BigInt::one() << d) * norm1 * 2;
    let mut k = 1u32;
    while BigInt::from(p).pow(k) <= bound {
        k += 1;
    }
    let modulus = BigInt::from(p).pow(k);
    let lifted = hensel_lift(f, &factors, p, k);
    let r = lifted.len();
    for size in 1..=r / 2 {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let prod = idx
                .iter()
                .fold(vec![BigInt::one()], |acc, &i| zmod(&zmul(&acc, &lifted[i]), &modulus));
            let cand = QPoly::from_ints(&symmetric(&prod, &modulus));
            let (q, rem) = qf.divrem(&cand);
            if rem.is_zero() && q.to_integer_coeffs().is_some() {
                return false;
            }
            if !next_combination(&mut idx, r) {
                break;
            }
        }
    }
    true
}

fn has_rational_root(f: &[BigInt]) -> bool {
    let c0 = &f[0];
    if c0.is_zero() {
        return true;
    }
    let Some(c) = c0.abs().to_u64() else {
        return false;
    };
    if c > 1_000_000_000_000 {
        // recombination still finds linear factors
        return false;
    }
    let qf = QPoly::from_ints(f);
    let mut d = 1u64;
    while d * d <= c {
        if c % d == 0 {
            for r in [d, c / d] {
                for s in [1i64, -1] {
                    let x = BigRational::from_integer(BigInt::from(r) * s);
                    if qf.eval(&x).is_zero() {
                        return true;
                    }
                }
            }
        }
        d += 1;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn berlekamp_splits_completely() {
        // x^4 - 1 = (x-1)(x+1)(x^2+1) mod 7; x^2+1 is irreducible mod 7
        let f = reduce_mod_p(&z(&[-1, 0, 0, 0, 1]), 7);
        let fs = berlekamp(&f, 7);
        assert_eq!(fs.len(), 3);
        let prod = fs.iter().fold(vec![1u64], |a, g| fp_mul(&a, g, 7));
        assert_eq!(prod, f);
        // mod 5 it splits into linear factors
        let fs5 = berlekamp(&reduce_mod_p(&z(&[-1, 0, 0, 0, 1]), 5), 5);
        assert_eq!(fs5.len(), 4);
    }

    #[test]
    fn hensel_lift_reproduces_product() {
        let f = z(&[-2, 0, 1]);
        let lifted = lifted_factors(&f, 7, 10);
        assert_eq!(lifted.len(), 2);
        let m = BigInt::from(7).pow(10);
        let prod = zmod(&zmul(&lifted[0], &lifted[1]), &m);
        assert_eq!(prod, zmod(&f, &m));
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&z(&[-2, 0, 1])));
        assert!(is_irreducible(&z(&[1, 0, 1])));
        assert!(!is_irreducible(&z(&[-4, 0, 1])));
        assert!(is_irreducible(&z(&[-2, 0, 0, 1])));
        // x^4 + 1 is irreducible over Q but reducible mod every prime
        assert!(is_irreducible(&z(&[1, 0, 0, 0, 1])));
        // (x^2 + 1)(x^2 + 2) has no rational roots
        assert!(!is_irreducible(&z(&[2, 0, 3, 0, 1])));
        // (x^2 - 2)(x^2 - 3)
        assert!(!is_irreducible(&z(&[6, 0, -5, 0, 1])));
        // cyclotomic Phi_5
        assert!(is_irreducible(&z(&[1, 1, 1, 1, 1])));
        assert!(is_irreducible(&z(&[0, 1])));
    }
}
