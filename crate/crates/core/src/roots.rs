//! Certified enclosures of the roots of a squarefree rational polynomial.
//!
//! Real roots come from Sturm sequences and bisection on dyadic intervals.
//! Non-real roots start from Aberth iterations in f64, are polished by
//! Newton steps in exact rational arithmetic, and are certified by the
//! inclusion disk `|z - r| <= d |f(z)| / |f'(z)|`, which always contains a
//! root. Disjoint disks in the open upper half plane, one per expected
//! conjugate pair, then enclose distinct roots.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::QPoly;
use crate::rat::{floor_dyadic, sqrt_bounds, to_f64};

#[derive(Clone, Debug, PartialEq)]
pub enum RootEnclosure {
    /// Root in `[lo, hi]`; `lo == hi` means the root is exactly rational.
    Real { lo: BigRational, hi: BigRational },
    /// Root with positive imaginary part inside the closed disk.
    Complex { re: BigRational, im: BigRational, radius: BigRational },
}

impl RootEnclosure {
    pub fn is_real(&self) -> bool {
        matches!(self, RootEnclosure::Real { .. })
    }

    /// Center approximation as floats.
    pub fn approx(&self) -> (f64, f64) {
        match self {
            RootEnclosure::Real { lo, hi } => (to_f64(&((lo + hi) / BigRational::from_integer(2.into()))), 0.0),
            RootEnclosure::Complex { re, im, .. } => (to_f64(re), to_f64(im)),
        }
    }
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

fn sign(q: &BigRational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

fn sturm_chain(f: &QPoly) -> Vec<QPoly> {
    let mut chain = vec![f.clone(), f.derivative()];
    while !chain.last().unwrap().is_zero() {
        let n = chain.len();
        let r = chain[n - 2].rem(&chain[n - 1]).neg();
        if r.is_zero() {
            break;
        }
        chain.push(r);
    }
    chain
}

fn variations(chain: &[QPoly], x: &BigRational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in chain {
        let s = sign(&p.eval(x));
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Power of two strictly above every root modulus (Cauchy bound).
fn dyadic_root_bound(f: &QPoly) -> BigRational {
    let b = f.root_bound();
    let mut p = BigRational::one();
    while p <= b {
        p *= BigRational::from_integer(2.into());
    }
    p
}

/// Isolating intervals `(lo, hi]` of the real roots, ascending.
fn isolate_real(f: &QPoly) -> Vec<(BigRational, BigRational)> {
    let chain = sturm_chain(f);
    let b = dyadic_root_bound(f);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    // depth-first with the left half explored first keeps the output sorted
    while let Some((lo, hi)) = stack.pop() {
        let n = variations(&chain, &lo) - variations(&chain, &hi);
        match n {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) * half();
                stack.push((mid.clone(), hi));
                stack.push((lo, mid));
            }
        }
    }
    out
}

/// Shrinks a one-root interval `(lo, hi]` to width at most `2^-bits`.
pub fn refine_real(f: &QPoly, lo: &BigRational, hi: &BigRational, bits: u32) -> (BigRational, BigRational) {
    if lo == hi || f.eval(hi).is_zero() {
        return (hi.clone(), hi.clone());
    }
    let target = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let mut s_lo = sign(&f.eval(&lo));
    if s_lo == 0 {
        s_lo = sign(&f.derivative().eval(&lo));
    }
    while &hi - &lo > target {
        let mid = (&lo + &hi) * half();
        let s = sign(&f.eval(&mid));
        if s == 0 {
            return (mid.clone(), mid);
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

#[derive(Clone, Copy, Debug)]
struct C64(f64, f64);

impl C64 {
    fn add(self, o: C64) -> C64 {
        C64(self.0 + o.0, self.1 + o.1)
    }
    fn sub(self, o: C64) -> C64 {
        C64(self.0 - o.0, self.1 - o.1)
    }
    fn mul(self, o: C64) -> C64 {
        C64(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn div(self, o: C64) -> C64 {
        let d = o.0 * o.0 + o.1 * o.1;
        C64((self.0 * o.0 + self.1 * o.1) / d, (self.1 * o.0 - self.0 * o.1) / d)
    }
}

fn aberth(f: &QPoly) -> Vec<C64> {
    let d = f.degree().unwrap();
    let c: Vec<f64> = f.coeffs().iter().map(to_f64).collect();
    let eval = |z: C64| -> (C64, C64) {
        let mut p = C64(0.0, 0.0);
        let mut dp = C64(0.0, 0.0);
        for k in (0..=d).rev() {
            dp = dp.mul(z).add(p);
            p = p.mul(z).add(C64(c[k], 0.0));
        }
        (p, dp)
    };
    let r = to_f64(&f.root_bound()).max(1.0);
    let mut z: Vec<C64> = (0..d)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / d as f64 + 0.4;
            C64(0.5 * r * a.cos(), 0.5 * r * a.sin())
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, dp) = eval(z[i]);
            if p.0 == 0.0 && p.1 == 0.0 {
                continue;
            }
            let w = p.div(dp);
            let mut s = C64(0.0, 0.0);
            for j in 0..d {
                if j != i {
                    s = s.add(C64(1.0, 0.0).div(z[i].sub(z[j])));
                }
            }
            let step = w.div(C64(1.0, 0.0).sub(w.mul(s)));
            if step.0.is_finite() && step.1.is_finite() {
                z[i] = z[i].sub(step);
                moved = moved.max(step.0.abs() + step.1.abs());
            }
        }
        if moved < 1e-15 * r {
            break;
        }
    }
    z
}

type CQ = (BigRational, BigRational);

fn ceval(f: &QPoly, z: &CQ) -> (CQ, CQ) {
    let mut p = (BigRational::zero(), BigRational::zero());
    let mut dp = (BigRational::zero(), BigRational::zero());
    for c in f.coeffs().iter().rev() {
        dp = (&dp.0 * &z.0 - &dp.1 * &z.1 + &p.0, &dp.0 * &z.1 + &dp.1 * &z.0 + &p.1);
        p = (&p.0 * &z.0 - &p.1 * &z.1 + c, &p.0 * &z.1 + &p.1 * &z.0);
    }
    (p, dp)
}

fn norm2(z: &CQ) -> BigRational {
    &z.0 * &z.0 + &z.1 * &z.1
}

/// Upper bound on the Newton inclusion radius `d |f(z)| / |f'(z)|`.
fn inclusion_radius(f: &QPoly, z: &CQ) -> Option<BigRational> {
    let d = f.degree().unwrap();
    let (p, dp) = ceval(f, z);
    let den = norm2(&dp);
    if den.is_zero() {
        return None;
    }
    let r2 = norm2(&p) * BigRational::from_integer(BigInt::from(d * d)) / den;
    Some(sqrt_bounds(&r2, 64).1)
}

fn newton_disk(f: &QPoly, start: C64, bits: u32) -> Result<(CQ, BigRational)> {
    let exhausted = || Error::PrecisionExhausted(format!("complex root of {f} near {:.6}+{:.6}i", start.0, start.1));
    let to_q = |x: f64| BigRational::from_float(x).ok_or_else(exhausted);
    let work = bits + 16;
    let mut z: CQ = (floor_dyadic(&to_q(start.0)?, work), floor_dyadic(&to_q(start.1)?, work));
    let target = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
    for _ in 0..64 {
        let r = inclusion_radius(f, &z).ok_or_else(exhausted)?;
        if r <= target && z.1 > r {
            return Ok((z, r));
        }
        let (p, dp) = ceval(f, &z);
        let den = norm2(&dp);
        if den.is_zero() {
            return Err(exhausted());
        }
        // p / dp = p * conj(dp) / |dp|^2
        let qre = (&p.0 * &dp.0 + &p.1 * &dp.1) / &den;
        let qim = (&p.1 * &dp.0 - &p.0 * &dp.1) / &den;
        z = (floor_dyadic(&(&z.0 - qre), work), floor_dyadic(&(&z.1 - qim), work));
    }
    Err(exhausted())
}

fn disks_disjoint(a: &(CQ, BigRational), b: &(CQ, BigRational)) -> bool {
    let dre = &a.0 .0 - &b.0 .0;
    let dim = &a.0 .1 - &b.0 .1;
    let rr = &a.1 + &b.1;
    &dre * &dre + &dim * &dim > &rr * &rr
}

/// Refines a complex enclosure to radius at most `2^-bits`.
pub fn refine_complex(f: &QPoly, re: &BigRational, im: &BigRational, bits: u32) -> Result<(BigRational, BigRational, BigRational)> {
    let exhausted = || Error::PrecisionExhausted(format!("complex root of {f}"));
    let work = bits + 16;
    let mut z: CQ = (re.clone(), im.clone());
    let target = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
    for _ in 0..64 {
        let r = inclusion_radius(f, &z).ok_or_else(exhausted)?;
        if r <= target && z.1 > r {
            return Ok((z.0, z.1, r));
        }
        let (p, dp) = ceval(f, &z);
        let den = norm2(&dp);
        let qre = (&p.0 * &dp.0 + &p.1 * &dp.1) / &den;
        let qim = (&p.1 * &dp.0 - &p.0 * &dp.1) / &den;
        z = (floor_dyadic(&(&z.0 - qre), work), floor_dyadic(&(&z.1 - qim), work));
    }
    Err(exhausted())
}

/// All roots of a squarefree polynomial: real roots ascending, then one
/// representative of each conjugate pair (positive imaginary part) ordered
/// by real part, then imaginary part. Enclosures have width or radius at
/// most `2^-bits`.
pub fn root_enclosures(f: &QPoly, bits: u32) -> Result<Vec<RootEnclosure>> {
    let d = f.degree().ok_or_else(|| Error::InvalidPolynomial("zero polynomial".into()))?;
    if d == 0 {
        return Ok(Vec::new());
    }
    if d == 1 {
        let r = -f.coeff(0) / f.coeff(1);
        return Ok(vec![RootEnclosure::Real { lo: r.clone(), hi: r }]);
    }
    let mut out: Vec<RootEnclosure> = isolate_real(f)
        .into_iter()
        .map(|(lo, hi)| {
            let (lo, hi) = refine_real(f, &lo, &hi, bits);
            RootEnclosure::Real { lo, hi }
        })
        .collect();
    let nonreal = d - out.len();
    if nonreal == 0 {
        return Ok(out);
    }
    let mut approx = aberth(f);
    approx.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    let mut disks = Vec::with_capacity(nonreal / 2);
    for z in approx.into_iter().take(nonreal / 2) {
        if !(z.1 > 0.0) {
            return Err(Error::PrecisionExhausted(format!("could not separate the non-real roots of {f}")));
        }
        disks.push(newton_disk(f, z, bits)?);
    }
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            if !disks_disjoint(&disks[i], &disks[j]) {
                return Err(Error::PrecisionExhausted(format!("root disks of {f} overlap")));
            }
        }
    }
    disks.sort_by(|a, b| a.0 .0.cmp(&b.0 .0).then_with(|| a.0 .1.cmp(&b.0 .1)));
    out.extend(disks.into_iter().map(|((re, im), radius)| RootEnclosure::Complex { re, im, radius }));
    Ok(out)
}

/// Disk `(re, im, radius)` containing `A(r)` for the root `r` inside `enc`.
pub fn image_value(a: &QPoly, enc: &RootEnclosure) -> (BigRational, BigRational, BigRational) {
    let (center, r) = match enc {
        RootEnclosure::Real { lo, hi } => (((lo + hi) * half(), BigRational::zero()), (hi - lo) * half()),
        RootEnclosure::Complex { re, im, radius } => ((re.clone(), im.clone()), radius.clone()),
    };
    let (value, _) = ceval(a, &center);
    let rho = if r.is_zero() {
        BigRational::zero()
    } else {
        // |A(z) - A(c)| <= r * sum_k k |a_k| M^(k-1) with M >= |z| on the disk
        let m = center.0.abs() + center.1.abs() + &r;
        let mut acc = BigRational::zero();
        let mut mp = BigRational::one();
        for (k, c) in a.coeffs().iter().enumerate().skip(1) {
            acc += c.abs() * BigRational::from_integer(BigInt::from(k)) * &mp;
            mp *= &m;
        }
        acc * r
    };
    (value.0, value.1, rho)
}

/// Rational enclosure `[lo, hi]` of `|A(r)|` for the root `r` inside `enc`.
///
/// Returns `None` when the enclosure cannot separate the value from zero.
pub fn image_abs(a: &QPoly, enc: &RootEnclosure, bits: u32) -> Option<(BigRational, BigRational)> {
    let (re, im, rho) = image_value(a, enc);
    let (sl, sh) = sqrt_bounds(&norm2(&(re, im)), bits + 8);
    let lo = sl - &rho;
    let hi = sh + rho;
    if lo.is_positive() || (lo.is_zero() && hi.is_zero()) {
        Some((lo, hi))
    } else {
        None
    }
}
