//! Filtration combinatorics on P^n with L = O(1) and the divisors D_i taken
//! to be coordinate hyperplanes, where every space involved is spanned by
//! monomials and all dimensions are lattice-point counts.
//!
//! For a tuple `a` supported on σ, the sheaf 𝓘(t) is the sum of
//! O(-Σ b_i D_i) over `b` with Σ a_i b_i ≥ t. A monomial x^e lies in the
//! sections of O(m) ⊗ 𝓘(t) iff some `b ≤ e` has Σ a_i b_i ≥ t, and since
//! the a_i are nonnegative the best choice is `b = e`; so x^e lies in
//! 𝓕(σ;a)_t iff its weight Σ_{i∈σ} a_i e_i is at least t.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rat::binomial;

/// h⁰(P^n, O(m − ℓ)), the number of monomials of degree m − ℓ.
pub fn h0_twist(n: u64, m: u64, ell: u64) -> BigInt {
    if ell > m {
        return BigInt::zero();
    }
    binomial(n + m - ell, n)
}

/// Σ_{ℓ≥1} h⁰(P^n, O(m − ℓ)) by direct summation.
pub fn twisted_sections_sum(n: u64, m: u64) -> BigInt {
    (1..=m).map(|ell| h0_twist(n, m, ell)).sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaTable {
    /// `(m, m·h⁰(O(m)) / Σ_{ℓ≥1} h⁰(O(m−ℓ)))` for m = 1..=m_max.
    #[serde(serialize_with = "ratio_rows")]
    pub ratios: Vec<(u64, BigRational)>,
    #[serde(serialize_with = "crate::ser::rational")]
    pub gamma: BigRational,
    #[serde(serialize_with = "crate::ser::rational")]
    pub feasible_beta_sup: BigRational,
}

fn ratio_rows<S: serde::Serializer>(rows: &[(u64, BigRational)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for (m, r) in rows {
        seq.serialize_element(&(m, r.to_string()))?;
    }
    seq.end()
}

/// The ratio table whose limsup defines γ(O(1), D_i). The ratio equals
/// n + 1 for every m, which is asserted row by row.
pub fn gamma_beta(n: u64, m_max: u64) -> Result<GammaTable> {
    if n == 0 || m_max == 0 {
        return Err(Error::BadParameter("gamma table needs n >= 1 and m_max >= 1".into()));
    }
    let gamma = BigRational::from_integer(BigInt::from(n + 1));
    let mut ratios = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        let r = BigRational::new(BigInt::from(m) * h0_twist(n, m, 0), twisted_sections_sum(n, m));
        assert_eq!(r, gamma, "ratio at m = {m} differs from n + 1");
        ratios.push((m, r));
    }
    let feasible_beta_sup = gamma.recip();
    Ok(GammaTable { ratios, gamma, feasible_beta_sup })
}

/// Δ_σ: tuples `a` with `a_i ∈ β_i⁻¹ ℕ` and `Σ β_i a_i = b`, in
/// lexicographic order. Writing a_i = k_i / β_i these are the compositions
/// of b into `betas.len()` nonnegative parts.
pub fn delta_sigma(betas: &[BigRational], b: u64) -> Result<Vec<Vec<BigRational>>> {
    if b == 0 {
        return Err(Error::BadParameter("b must be a positive integer".into()));
    }
    if let Some(beta) = betas.iter().find(|x| !x.is_positive()) {
        return Err(Error::BadParameter(format!("beta {beta} is not positive")));
    }
    if betas.is_empty() {
        return Err(Error::EmptyDelta);
    }
    let mut out = Vec::new();
    let mut k = vec![0u64; betas.len()];
    compositions(&mut k, 0, b, &mut |k| {
        out.push(k.iter().zip(betas).map(|(&ki, beta)| BigRational::from_integer(ki.into()) / beta).collect());
    });
    // k ascending lexicographically gives a ascending too, since each
    // coordinate is scaled by a fixed positive factor
    Ok(out)
}

fn compositions(k: &mut [u64], pos: usize, left: u64, f: &mut impl FnMut(&[u64])) {
    if pos + 1 == k.len() {
        k[pos] = left;
        f(k);
        return;
    }
    for v in 0..=left {
        k[pos] = v;
        compositions(k, pos + 1, left - v, f);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationProfile {
    /// Distinct monomial weights, ascending.
    #[serde(serialize_with = "crate::ser::rational_vec")]
    pub jumps: Vec<BigRational>,
    /// `dims[k] = dim 𝓕(σ;a)_t` for `t = jumps[k]`.
    pub dims: Vec<u64>,
    /// h⁰(P^n, O(m)), the dimension for every t ≤ jumps[0].
    pub h0: u64,
}

impl FiltrationProfile {
    /// dim 𝓕(σ;a)_t for any real t.
    pub fn dim_at(&self, t: &BigRational) -> u64 {
        match self.jumps.iter().position(|j| j >= t) {
            Some(k) => self.dims[k],
            None => 0,
        }
    }

    /// Σ_k t_k (dims[k] − dims[k+1]), which counts every monomial once at
    /// its weight.
    pub fn weighted_drop_sum(&self) -> BigRational {
        let mut s = BigRational::zero();
        for (k, t) in self.jumps.iter().enumerate() {
            let next = self.dims.get(k + 1).copied().unwrap_or(0);
            s += t * BigRational::from_integer((self.dims[k] - next).into());
        }
        s
    }
}

fn check_sigma(n: usize, sigma: &[usize], a: &[BigRational]) -> Result<()> {
    // all n + 1 hyperplanes have empty common intersection, but the
    // monomial count is still defined, so only larger sets are refused
    if sigma.len() > n + 1 {
        return Err(Error::BadParameter(format!("|sigma| = {} exceeds n + 1 = {}", sigma.len(), n + 1)));
    }
    if sigma.len() != a.len() {
        return Err(Error::BadParameter("sigma and a have different lengths".into()));
    }
    for (k, &i) in sigma.iter().enumerate() {
        if i > n || sigma[..k].contains(&i) {
            return Err(Error::BadParameter(format!("bad coordinate index {i} in sigma")));
        }
    }
    if a.iter().any(|x| x.is_negative()) {
        return Err(Error::BadParameter("filtration weights must be nonnegative".into()));
    }
    Ok(())
}

/// Visits every exponent vector of total degree m in n + 1 variables.
fn for_each_monomial(n: usize, m: u64, f: &mut impl FnMut(&[u64])) {
    fn rec(e: &mut [u64], pos: usize, left: u64, f: &mut impl FnMut(&[u64])) {
        if pos + 1 == e.len() {
            e[pos] = left;
            f(e);
            return;
        }
        for v in (0..=left).rev() {
            e[pos] = v;
            rec(e, pos + 1, left - v, f);
        }
    }
    let mut e = vec![0u64; n + 1];
    rec(&mut e, 0, m, f);
}

/// Monomial weights Σ_{i∈σ} a_i e_i with multiplicities.
pub fn monomial_weights(n: usize, m: u64, sigma: &[usize], a: &[BigRational]) -> Result<BTreeMap<BigRational, u64>> {
    check_sigma(n, sigma, a)?;
    let mut hist = BTreeMap::new();
    for_each_monomial(n, m, &mut |e| {
        let w = sigma
            .iter()
            .zip(a)
            .fold(BigRational::zero(), |s, (&i, ai)| s + ai * BigRational::from_integer(e[i].into()));
        *hist.entry(w).or_insert(0u64) += 1;
    });
    Ok(hist)
}

pub fn filtration_dims(n: usize, m: u64, sigma: &[usize], a: &[BigRational]) -> Result<FiltrationProfile> {
    if n == 0 {
        return Err(Error::BadParameter("n must be at least 1".into()));
    }
    let hist = monomial_weights(n, m, sigma, a)?;
    let h0 = h0_twist(n as u64, m, 0)
        .to_u64()
        .ok_or_else(|| Error::BadParameter("h0 exceeds u64".into()))?;
    let jumps: Vec<BigRational> = hist.keys().cloned().collect();
    let mut dims: Vec<u64> = Vec::with_capacity(jumps.len());
    let mut above = 0u64;
    for count in hist.values().rev() {
        above += count;
        dims.push(above);
    }
    dims.reverse();
    Ok(FiltrationProfile { jumps, dims, h0 })
}

/// Parameters of the filtration argument on P^n.
#[derive(Clone, Debug)]
pub struct RuVojtaParams {
    pub n: u64,
    pub m: u64,
    pub betas: Vec<BigRational>,
    pub b: u64,
    pub epsilon1: BigRational,
}

impl RuVojtaParams {
    /// Exact test of
    /// `(1 + n/b) max_i (β_i m h⁰(O(m)) + m ε₁) / Σ_{ℓ≥1} h⁰(O(m−ℓ)) < 1 + ε`
    /// together with `β_i < 1/(n+1)` for every i.
    pub fn feasible(&self, epsilon: &BigRational) -> Result<bool> {
        if self.n == 0 || self.m == 0 || self.b == 0 {
            return Err(Error::BadParameter("n, m and b must be positive".into()));
        }
        if self.betas.is_empty() || self.betas.iter().any(|x| !x.is_positive()) {
            return Err(Error::BadParameter("betas must be positive and nonempty".into()));
        }
        if !self.epsilon1.is_positive() || !epsilon.is_positive() {
            return Err(Error::BadParameter("epsilon and epsilon1 must be positive".into()));
        }
        let sup = BigRational::new(BigInt::one(), BigInt::from(self.n + 1));
        if self.betas.iter().any(|x| x >= &sup) {
            return Ok(false);
        }
        let m = BigRational::from_integer(self.m.into());
        let h0 = BigRational::from_integer(h0_twist(self.n, self.m, 0));
        let denom = BigRational::from_integer(twisted_sections_sum(self.n, self.m));
        let worst = self.betas.iter().max().expect("nonempty");
        let lead = BigRational::one() + BigRational::new(self.n.into(), self.b.into());
        let lhs = lead * (worst * &m * h0 + &m * &self.epsilon1) / denom;
        Ok(lhs < BigRational::one() + epsilon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn h0_examples() {
        assert_eq!(h0_twist(2, 3, 1), BigInt::from(6));
        assert_eq!(h0_twist(2, 3, 0), BigInt::from(10));
        assert_eq!(h0_twist(2, 3, 4), BigInt::from(0));
    }

    #[test]
    fn gamma_examples() {
        let t = gamma_beta(2, 3).unwrap();
        assert_eq!(t.ratios[2], (3, int(3)));
        assert_eq!(gamma_beta(1, 10).unwrap().gamma, int(2));
        let t = gamma_beta(4, 5).unwrap();
        assert_eq!((t.gamma, t.feasible_beta_sup), (int(5), rat(1, 5)));
        assert!(gamma_beta(0, 1).is_err());
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_sigma(&[rat(1, 4), rat(1, 4)], 1).unwrap(), vec![vec![int(0), int(4)], vec![int(4), int(0)]]);
        assert_eq!(delta_sigma(&[rat(1, 2)], 1).unwrap(), vec![vec![int(2)]]);
        assert_eq!(delta_sigma(&[rat(1, 3), rat(1, 3)], 1).unwrap(), vec![vec![int(0), int(3)], vec![int(3), int(0)]]);
        assert_eq!(delta_sigma(&[], 1), Err(Error::EmptyDelta));
        assert!(delta_sigma(&[rat(-1, 3)], 1).is_err());
    }

    #[test]
    fn filtration_examples() {
        let p = filtration_dims(1, 2, &[0, 1], &[int(1), int(1)]).unwrap();
        assert_eq!((p.jumps.clone(), p.dims.clone()), (vec![int(2)], vec![3]));
        assert_eq!(p.dim_at(&int(0)), 3);
        assert_eq!(p.dim_at(&rat(5, 2)), 0);
        let p = filtration_dims(1, 2, &[0, 1], &[int(2), int(1)]).unwrap();
        assert_eq!((p.jumps.clone(), p.dims.clone()), (vec![int(2), int(3), int(4)], vec![3, 2, 1]));
        let p = filtration_dims(1, 2, &[0], &[int(1)]).unwrap();
        assert_eq!(p.jumps, vec![int(0), int(1), int(2)]);
        assert_eq!(p.dim_at(&int(0)), 3);
        assert!(filtration_dims(1, 2, &[0, 1, 2], &[int(1), int(1), int(1)]).is_err());
    }

    #[test]
    fn feasibility_predicate() {
        let ok = RuVojtaParams { n: 2, m: 4, betas: vec![rat(1, 10)], b: 40, epsilon1: rat(1, 1000) };
        // (1 + 2/40)(1/10*4*15 + 4/1000)/20 = 0.31521
        assert!(ok.feasible(&rat(1, 2)).unwrap());
        let too_big = RuVojtaParams { betas: vec![rat(1, 3)], ..ok.clone() };
        assert!(!too_big.feasible(&int(10)).unwrap());
        let tight = RuVojtaParams { betas: vec![rat(3, 10)], b: 1, ..ok };
        // 3 * (0.3*60 + 0.004)/20 = 2.7006
        assert!(tight.feasible(&rat(171, 100)).unwrap());
        assert!(!tight.feasible(&rat(170, 100)).unwrap());
    }

    fn naive_dim(n: usize, m: u64, sigma: &[usize], a: &[BigRational], t: &BigRational) -> u64 {
        // independent count over all (n+1)-tuples in [0, m]
        let mut count = 0;
        let total = (m + 1).pow(n as u32 + 1);
        for code in 0..total {
            let mut c = code;
            let e: Vec<u64> = (0..=n).map(|_| { let d = c % (m + 1); c /= m + 1; d }).collect();
            if e.iter().sum::<u64>() != m {
                continue;
            }
            let w: BigRational = sigma.iter().zip(a).map(|(&i, ai)| ai * BigRational::from_integer(e[i].into())).sum();
            if &w >= t {
                count += 1;
            }
        }
        count
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn filtration_invariants(n in 1usize..=3, m in 0u64..=6, raw in prop::collection::vec((0i64..=6, 1i64..=3), 1..=3)) {
            let k = raw.len().min(n);
            let sigma: Vec<usize> = (0..k).map(|i| (i * 2) % (n + 1)).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
            let a: Vec<BigRational> = raw.iter().take(sigma.len()).map(|&(p, q)| rat(p, q)).collect();
            let p = filtration_dims(n, m, &sigma, &a).unwrap();
            prop_assert_eq!(p.dims[0], p.h0);
            prop_assert_eq!(BigInt::from(p.h0), h0_twist(n as u64, m, 0));
            prop_assert!(p.dims.windows(2).all(|w| w[0] > w[1]));
            let hist = monomial_weights(n, m, &sigma, &a).unwrap();
            let direct: BigRational = hist.iter().map(|(w, c)| w * BigRational::from_integer((*c).into())).sum();
            prop_assert_eq!(p.weighted_drop_sum(), direct);
            for t in &p.jumps {
                prop_assert_eq!(p.dim_at(t), naive_dim(n, m, &sigma, &a, t));
            }
        }

        #[test]
        fn delta_tuples_sum_to_b(raw in prop::collection::vec(1i64..=5, 1..=3), b in 1u64..=6) {
            let betas: Vec<BigRational> = raw.iter().map(|&d| rat(1, d)).collect();
            let tuples = delta_sigma(&betas, b).unwrap();
            prop_assert!(tuples.windows(2).all(|w| w[0] < w[1]));
            for a in &tuples {
                let s: BigRational = a.iter().zip(&betas).map(|(x, y)| x * y).sum();
                prop_assert_eq!(s, int(b as i64));
            }
        }
    }
}
