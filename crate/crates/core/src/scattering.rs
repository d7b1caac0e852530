//! Weight systems for linear scattering: the d-to-c reduction, grid covers
//! of the weight simplex, Type I / Type II classification of solutions and
//! the e-weights attached to each class.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heights::{LinearForm, ProjectivePoint};
use crate::linalg::determinant;
use crate::rat::binomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WeightKind {
    #[serde(rename = "d-weights")]
    D,
    #[serde(rename = "c-weights")]
    C,
    #[serde(rename = "e-weights")]
    E,
}

/// A matrix of exact weights indexed by (place, form).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightSystem {
    pub kind: WeightKind,
    #[serde(serialize_with = "crate::ser::rational_matrix")]
    pub entries: Vec<Vec<BigRational>>,
}

impl WeightSystem {
    pub fn new(kind: WeightKind, entries: Vec<Vec<BigRational>>) -> Result<WeightSystem> {
        let width = entries.first().map_or(0, |r| r.len());
        if width < 2 || entries.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidSpec("weights must form a nonempty matrix with n+1 >= 2 equal columns".into()));
        }
        if kind == WeightKind::C {
            for (v, row) in entries.iter().enumerate() {
                let s: BigRational = row.iter().sum();
                if !s.is_zero() {
                    return Err(Error::InvalidSpec(format!("c-weight row {v} sums to {s}, not 0")));
                }
            }
        }
        Ok(WeightSystem { kind, entries })
    }

    pub fn n(&self) -> usize {
        self.entries[0].len() - 1
    }

    pub fn places(&self) -> usize {
        self.entries.len()
    }

    pub fn total(&self) -> BigRational {
        self.entries.iter().flatten().sum()
    }
}

fn q(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `epsilon = -1 + sum d / (n+1)` and `c_vi = -d_vi + (sum_j d_vj) / (n+1)`.
pub fn fw_weights(d: &WeightSystem) -> Result<(BigRational, WeightSystem)> {
    let np1 = d.n() + 1;
    let total = d.total();
    if total <= q(np1) {
        return Err(Error::ThresholdNotMet { sum: total.to_string(), bound: np1 });
    }
    let eps = &total / q(np1) - BigRational::one();
    let c = d
        .entries
        .iter()
        .map(|row| {
            let mean = row.iter().sum::<BigRational>() / q(np1);
            row.iter().map(|x| &mean - x).collect()
        })
        .collect();
    Ok((eps, WeightSystem::new(WeightKind::C, c)?))
}

/// The grid `{a in (delta Z_{>=0})^k : sum a = c}` with `delta = c / m`.
///
/// The grid is never materialized; `iter` walks it lazily in lexicographic
/// order of the integer compositions of `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexCover {
    c: BigRational,
    size: usize,
    m: u64,
    delta: BigRational,
}

impl SimplexCover {
    /// Largest step `delta = c/m` with `delta <= (1-c)/size`, optionally
    /// refined by an integer factor.
    pub fn new(c: BigRational, size: usize, refine: Option<u64>) -> Result<SimplexCover> {
        if !c.is_positive() || c >= BigRational::one() {
            return Err(Error::BadParameter(format!("simplex level {c} is not in (0, 1)")));
        }
        if size == 0 {
            return Err(Error::BadParameter("empty index set".into()));
        }
        let refine = refine.unwrap_or(1);
        if refine == 0 {
            return Err(Error::BadParameter("grid refinement must be positive".into()));
        }
        let need = &c * q(size) / (BigRational::one() - &c);
        let m = need.ceil().to_integer().to_u64().ok_or_else(|| Error::BadParameter("grid too fine".into()))?.max(1) * refine;
        let delta = &c / BigRational::from_integer(m.into());
        Ok(SimplexCover { c, size, m, delta })
    }

    pub fn c(&self) -> &BigRational {
        &self.c
    }

    pub fn delta(&self) -> &BigRational {
        &self.delta
    }

    pub fn index_set_size(&self) -> usize {
        self.size
    }

    /// `c / delta`.
    pub fn steps(&self) -> u64 {
        self.m
    }

    /// Number of grid tuples, `C(m + k - 1, k - 1)`.
    pub fn len(&self) -> BigInt {
        binomial(self.m + self.size as u64 - 1, self.size as u64 - 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, a: &[BigRational]) -> bool {
        a.len() == self.size
            && a.iter().all(|x| !x.is_negative() && (x / &self.delta).is_integer())
            && a.iter().sum::<BigRational>() == self.c
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<BigRational>> + '_ {
        let k = self.size;
        let mut state: Option<Vec<u64>> = Some({
            let mut v = vec![0u64; k];
            v[k - 1] = self.m;
            v
        });
        std::iter::from_fn(move || {
            let cur = state.take()?;
            // next composition in lexicographic order
            let mut next = cur.clone();
            if let Some(j) = (0..k - 1).rev().find(|&j| next[j + 1..].iter().sum::<u64>() > 0) {
                let rest: u64 = next[j + 1..].iter().sum::<u64>() - 1;
                next[j] += 1;
                for x in next[j + 1..].iter_mut() {
                    *x = 0;
                }
                next[k - 1] = rest;
                state = Some(next);
            }
            Some(cur.iter().map(|&x| &self.delta * BigRational::from_integer(x.into())).collect())
        })
    }
}

/// A grid point `a` with `b_j >= a_j * sum(b)` for every j.
pub fn simplex_select(b: &[BigRational], cover: &SimplexCover) -> Result<Vec<BigRational>> {
    if b.len() != cover.size {
        return Err(Error::BadParameter(format!("tuple of length {} for a simplex over {} indices", b.len(), cover.size)));
    }
    if b.iter().any(|x| x.is_negative()) {
        return Err(Error::BadParameter("simplex selection needs a nonnegative tuple".into()));
    }
    let total: BigRational = b.iter().sum();
    if total.is_zero() {
        return Err(Error::BadParameter("simplex selection needs a nonzero tuple".into()));
    }
    let step = &total * &cover.delta;
    let mut k: Vec<u64> = b.iter().map(|x| (x / &step).floor().to_integer().to_u64().unwrap()).collect();
    let mut sum: u64 = k.iter().sum();
    debug_assert!(sum >= cover.m, "grid step too coarse for selection");
    for j in (0..k.len()).rev() {
        let cut = k[j].min(sum - cover.m);
        k[j] -= cut;
        sum -= cut;
    }
    Ok(k.into_iter().map(|x| &cover.delta * BigRational::from_integer(x.into())).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Classification {
    TypeI(usize),
    TypeII,
    NotASolution,
}

/// Type I when some column sum reaches `(n+1+eps) h - slack` (smallest such
/// column), Type II when only the total does, otherwise not a solution.
pub fn classify_solution(lambda: &[Vec<BigRational>], h: &BigRational, n: usize, eps: &BigRational, slack: &BigRational) -> Classification {
    let threshold = (q(n + 1) + eps) * h - slack;
    for i in 0..=n {
        let col: BigRational = lambda.iter().map(|row| &row[i]).sum();
        if col >= threshold {
            return Classification::TypeI(i);
        }
    }
    let total: BigRational = lambda.iter().flatten().sum();
    if total >= threshold {
        Classification::TypeII
    } else {
        Classification::NotASolution
    }
}

/// Simplex level used for Type I classes.
pub fn type_i_level(n: usize, eps: &BigRational) -> BigRational {
    BigRational::one() - eps / q(4 * (n + 1))
}

/// Simplex level used for Type II classes.
pub fn type_ii_level(n: usize, eps: &BigRational) -> BigRational {
    BigRational::one() - eps / q(4 * (n + 1) * (n + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassKind {
    TypeI { anchor: usize },
    TypeII,
}

/// e-weights of a class.
///
/// Type I: `e_{v,anchor} = a_v (n+1+eps)` and 0 elsewhere, for a tuple `a`
/// over the places summing to `1 - eps/(4(n+1))`. Type II:
/// `e_vi = b_vi (n+1)(n+1+eps) - b_v` with `b_v = d_v n (n+1+eps)/(n+1)`,
/// for a tuple `b` over places x forms (row-major) summing to
/// `1 - eps/(4(n+1)^2)`. Fails unless the total exceeds n+1.
pub fn scatter_weights(kind: ClassKind, n: usize, eps: &BigRational, tuple: &[BigRational], d: &[BigRational]) -> Result<WeightSystem> {
    let np1 = q(n + 1);
    let scale = &np1 + eps;
    if tuple.iter().any(|x| x.is_negative()) {
        return Err(Error::BadParameter("simplex tuple has a negative entry".into()));
    }
    let sum: BigRational = tuple.iter().sum();
    let entries: Vec<Vec<BigRational>> = match kind {
        ClassKind::TypeI { anchor } => {
            if anchor > n {
                return Err(Error::BadParameter(format!("anchor {anchor} out of range for n = {n}")));
            }
            if sum != type_i_level(n, eps) {
                return Err(Error::BadParameter(format!("Type I tuple sums to {sum}, not {}", type_i_level(n, eps))));
            }
            tuple
                .iter()
                .map(|a| (0..=n).map(|i| if i == anchor { a * &scale } else { BigRational::zero() }).collect())
                .collect()
        }
        ClassKind::TypeII => {
            if tuple.len() != d.len() * (n + 1) {
                return Err(Error::BadParameter(format!(
                    "Type II tuple has {} entries, expected {} places x {} forms",
                    tuple.len(),
                    d.len(),
                    n + 1
                )));
            }
            if sum != type_ii_level(n, eps) {
                return Err(Error::BadParameter(format!("Type II tuple sums to {sum}, not {}", type_ii_level(n, eps))));
            }
            check_distribution(d)?;
            tuple
                .chunks(n + 1)
                .zip(d)
                .map(|(row, dv)| {
                    let bv = dv * q(n) * &scale / &np1;
                    row.iter().map(|b| b * &np1 * &scale - &bv).collect()
                })
                .collect()
        }
    };
    let w = WeightSystem::new(WeightKind::E, entries)?;
    let total = w.total();
    if total <= np1 {
        return Err(Error::SumCheckFailed { sum: total.to_string(), bound: n + 1 });
    }
    Ok(w)
}

fn check_distribution(d: &[BigRational]) -> Result<()> {
    if d.is_empty() || d.iter().any(|x| x.is_negative()) || d.iter().sum::<BigRational>() != BigRational::one() {
        return Err(Error::BadParameter("place distribution d_v must be nonnegative and sum to 1".into()));
    }
    Ok(())
}

/// `d_v = 1/|S|`.
pub fn uniform_distribution(places: usize) -> Vec<BigRational> {
    vec![BigRational::new(BigInt::one(), BigInt::from(places)); places]
}

/// Class assignment of a single solution profile.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub kind: ClassKind,
    pub tuple: Vec<BigRational>,
    pub e: WeightSystem,
}

/// Classifies a profile of Weil values and builds its class weights.
///
/// Type I uses `b_v = (lambda_{v,anchor} + slack/|S|) / h`; Type II uses
/// `mu_vi = lambda_vi + b_v h + slack/(|S|(n+1))`. With nonnegative Weil
/// values the resulting weights satisfy `lambda_vi >= e_vi h - slack/|S|`
/// (Type I) or `lambda_vi >= e_vi h - slack/(|S|(n+1))` (Type II).
pub fn assign_class(
    lambda: &[Vec<BigRational>],
    h: &BigRational,
    n: usize,
    eps: &BigRational,
    slack: &BigRational,
    d: &[BigRational],
) -> Result<Option<Assignment>> {
    if !h.is_positive() {
        return Err(Error::BadParameter("classification needs h > 0".into()));
    }
    let s_size = lambda.len();
    if d.len() != s_size {
        return Err(Error::BadParameter("place distribution has the wrong length".into()));
    }
    let clamp = |x: BigRational| if x.is_negative() { BigRational::zero() } else { x };
    match classify_solution(lambda, h, n, eps, slack) {
        Classification::NotASolution => Ok(None),
        Classification::TypeI(anchor) => {
            let share = slack / q(s_size);
            let b: Vec<BigRational> = lambda.iter().map(|row| clamp((&row[anchor] + &share) / h)).collect();
            let cover = SimplexCover::new(type_i_level(n, eps), s_size, None)?;
            let tuple = simplex_select(&b, &cover)?;
            let kind = ClassKind::TypeI { anchor };
            let e = scatter_weights(kind, n, eps, &tuple, d)?;
            Ok(Some(Assignment { kind, tuple, e }))
        }
        Classification::TypeII => {
            check_distribution(d)?;
            let scale = q(n + 1) + eps;
            let share = slack / q(s_size * (n + 1));
            let mut mu = Vec::with_capacity(s_size * (n + 1));
            for (row, dv) in lambda.iter().zip(d) {
                let bv = dv * q(n) * &scale / q(n + 1);
                for x in row {
                    mu.push(clamp((x + &bv * h + &share) / h));
                }
            }
            let cover = SimplexCover::new(type_ii_level(n, eps), s_size * (n + 1), None)?;
            let tuple = simplex_select(&mu, &cover)?;
            let e = scatter_weights(ClassKind::TypeII, n, eps, &tuple, d)?;
            Ok(Some(Assignment { kind: ClassKind::TypeII, tuple, e }))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScatterClass {
    pub kind: &'static str,
    pub anchor: Option<usize>,
    #[serde(serialize_with = "crate::ser::rational_vec")]
    pub tuple: Vec<BigRational>,
    #[serde(serialize_with = "crate::ser::rational_matrix")]
    pub e: Vec<Vec<BigRational>>,
    pub members: Vec<ProjectivePoint>,
    #[serde(serialize_with = "crate::ser::rational")]
    pub sum_e: BigRational,
}

/// A solution profile: the point, its Weil values per (place, form) and h.
#[derive(Clone, Debug)]
pub struct Profile {
    pub point: ProjectivePoint,
    pub lambda: Vec<Vec<BigRational>>,
    pub h: BigRational,
}

/// Groups solution profiles into classes sharing kind, anchor and tuple.
/// Classes are ordered by (Type I before Type II, anchor, tuple) and
/// members canonically; profiles that are not solutions are skipped.
pub fn scatter_solutions(profiles: &[Profile], n: usize, eps: &BigRational, slack: &BigRational, d: &[BigRational]) -> Result<Vec<ScatterClass>> {
    type Key = (u8, usize, Vec<BigRational>);
    let mut classes: BTreeMap<Key, (WeightSystem, Vec<ProjectivePoint>)> = BTreeMap::new();
    for p in profiles {
        let Some(a) = assign_class(&p.lambda, &p.h, n, eps, slack, d)? else {
            continue;
        };
        let key = match a.kind {
            ClassKind::TypeI { anchor } => (0, anchor, a.tuple),
            ClassKind::TypeII => (1, 0, a.tuple),
        };
        classes.entry(key).or_insert_with(|| (a.e, Vec::new())).1.push(p.point.clone());
    }
    Ok(classes
        .into_iter()
        .map(|((k, anchor, tuple), (e, mut members))| {
            members.sort();
            members.dedup();
            let sum_e = e.total();
            ScatterClass {
                kind: if k == 0 { "TypeI" } else { "TypeII" },
                anchor: (k == 0).then_some(anchor),
                tuple,
                e: e.entries,
                members,
                sum_e,
            }
        })
        .collect())
}

/// Top-(n+1) selection at one place.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reduction {
    /// Kept form indices, ascending.
    pub indices: Vec<usize>,
    /// Sum of the positive parts of the discarded Weil values; bounds the
    /// loss from dropping them.
    #[serde(serialize_with = "crate::ser::rational")]
    pub residual: BigRational,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Reduction of forms in general position to n+1 forms per place: keeps
/// the n+1 largest Weil values (ties to the smaller index).
pub fn gen_pos_reduce(forms: &[Vec<LinearForm>], lambda: &[Vec<BigRational>], n: usize) -> Result<Vec<Reduction>> {
    if forms.len() != lambda.len() {
        return Err(Error::BadParameter("forms and Weil values disagree on the number of places".into()));
    }
    let mut out = Vec::with_capacity(forms.len());
    for (v, (fs, ls)) in forms.iter().zip(lambda).enumerate() {
        if fs.len() < n + 1 || fs.len() != ls.len() {
            return Err(Error::BadParameter(format!("place {v}: need at least n+1 forms with one Weil value each")));
        }
        for sub in subsets(fs.len(), n + 1) {
            let m: Vec<Vec<_>> = sub.iter().map(|&i| fs[i].coeffs().to_vec()).collect();
            if determinant(&m).is_none_or(|d| d.is_zero()) {
                return Err(Error::GeneralPositionViolated { place: v, indices: sub });
            }
        }
        let mut order: Vec<usize> = (0..ls.len()).collect();
        order.sort_by(|&a, &b| ls[b].cmp(&ls[a]).then(a.cmp(&b)));
        let mut keep = order[..=n].to_vec();
        keep.sort_unstable();
        let residual = order[n + 1..]
            .iter()
            .map(|&i| if ls[i].is_positive() { ls[i].clone() } else { BigRational::zero() })
            .sum();
        out.push(Reduction { indices: keep, residual });
    }
    Ok(out)
}

/// `(n+1+eps)(1 - eps/(4(n+1))) > n+1`, the condition under which both
/// class constructions pass their sum check; it holds exactly for
/// `0 < eps < 3(n+1)`.
pub fn sum_check_holds(n: usize, eps: &BigRational) -> bool {
    (q(n + 1) + eps) * type_i_level(n, eps) > q(n + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;
    use crate::rat::{int, rat};
    use proptest::prelude::*;

    fn ws(rows: &[&[(i64, i64)]]) -> WeightSystem {
        WeightSystem::new(WeightKind::D, rows.iter().map(|r| r.iter().map(|&(a, b)| rat(a, b)).collect()).collect()).unwrap()
    }

    #[test]
    fn fw_examples() {
        let (eps, c) = fw_weights(&ws(&[&[(2, 1), (1, 1)]])).unwrap();
        assert_eq!(eps, rat(1, 2));
        assert_eq!(c.entries, vec![vec![rat(-1, 2), rat(1, 2)]]);
        let (eps, c) = fw_weights(&ws(&[&[(2, 1), (1, 1), (1, 1)]])).unwrap();
        assert_eq!(eps, rat(1, 3));
        assert_eq!(c.entries, vec![vec![rat(-2, 3), rat(1, 3), rat(1, 3)]]);
        assert!(matches!(fw_weights(&ws(&[&[(1, 1), (1, 1)]])), Err(Error::ThresholdNotMet { .. })));
    }

    #[test]
    fn cover_examples() {
        let c = SimplexCover::new(rat(3, 4), 2, None).unwrap();
        assert_eq!(c.delta(), &rat(1, 8));
        assert_eq!(c.len(), BigInt::from(7));
        let all: Vec<_> = c.iter().collect();
        assert_eq!(all.len(), 7);
        assert!(all.iter().all(|a| c.contains(a)));
        assert_eq!(all[0], vec![rat(0, 1), rat(3, 4)]);
        let one = SimplexCover::new(rat(1, 2), 1, None).unwrap();
        assert_eq!(one.iter().collect::<Vec<_>>(), vec![vec![rat(1, 2)]]);
        assert_eq!(simplex_select(&[int(1), int(0)], &c).unwrap(), vec![rat(3, 4), rat(0, 1)]);
        assert_eq!(simplex_select(&[int(1), int(1)], &c).unwrap(), vec![rat(1, 2), rat(1, 4)]);
        assert_eq!(simplex_select(&[int(5), int(5)], &c).unwrap(), vec![rat(1, 2), rat(1, 4)]);
        assert!(SimplexCover::new(int(1), 2, None).is_err());
        assert!(SimplexCover::new(int(0), 2, None).is_err());
    }

    #[test]
    fn classification_examples() {
        let h = int(10);
        let e = rat(1, 2);
        let z = int(0);
        assert_eq!(classify_solution(&[vec![int(26), int(4)]], &h, 1, &e, &z), Classification::TypeI(0));
        assert_eq!(classify_solution(&[vec![int(14), int(14)]], &h, 1, &e, &z), Classification::TypeII);
        assert_eq!(classify_solution(&[vec![int(10), int(10)]], &h, 1, &e, &z), Classification::NotASolution);
    }

    #[test]
    fn scatter_weight_examples() {
        let e = rat(1, 2);
        let w = scatter_weights(ClassKind::TypeI { anchor: 0 }, 1, &e, &[rat(15, 16)], &[int(1)]).unwrap();
        assert_eq!(w.entries, vec![vec![rat(75, 32), int(0)]]);
        let w = scatter_weights(ClassKind::TypeII, 1, &e, &[rat(31, 64), rat(31, 64)], &[int(1)]).unwrap();
        assert_eq!(w.entries, vec![vec![rat(75, 64), rat(75, 64)]]);
        assert_eq!(w.total(), rat(75, 32));
        // eps = 7 lies in [3(n+1), 4(n+1)): the level is valid but the sum check fails
        let big = int(7);
        assert!(!sum_check_holds(1, &big));
        let a = type_i_level(1, &big);
        assert!(matches!(
            scatter_weights(ClassKind::TypeI { anchor: 0 }, 1, &big, &[a], &[int(1)]),
            Err(Error::SumCheckFailed { .. })
        ));
        // threshold eps = 3(n+1) found by an independent float root of the quadratic
        let n1 = 2.0f64;
        let root = 3.0 * n1;
        assert!(((n1 + root) * (1.0 - root / (4.0 * n1)) - n1).abs() < 1e-12);
        assert!(sum_check_holds(1, &rat(599, 100)) && !sum_check_holds(1, &int(6)));
    }

    #[test]
    fn general_position() {
        let f = NumberField::rationals();
        let forms = vec![
            LinearForm::coordinate(&f, 1, 0),
            LinearForm::coordinate(&f, 1, 1),
            LinearForm::rational(&f, &[int(1), int(1)]).unwrap(),
        ];
        let r = gen_pos_reduce(std::slice::from_ref(&forms), &[vec![int(5), int(1), int(3)]], 1).unwrap();
        assert_eq!(r[0].indices, vec![0, 2]);
        assert_eq!(r[0].residual, int(1));
        let r = gen_pos_reduce(&[forms[..2].to_vec()], &[vec![int(5), int(1)]], 1).unwrap();
        assert_eq!(r[0], Reduction { indices: vec![0, 1], residual: int(0) });
        let dup = vec![forms[0].clone(), forms[1].clone(), forms[0].clone()];
        assert_eq!(
            gen_pos_reduce(&[dup], &[vec![int(1), int(1), int(1)]], 1),
            Err(Error::GeneralPositionViolated { place: 0, indices: vec![0, 2] })
        );
    }

    fn arb_b() -> impl Strategy<Value = Vec<BigRational>> {
        prop::collection::vec((0i64..50, 1i64..20), 1..=6).prop_map(|v| v.into_iter().map(|(a, b)| rat(a, b)).collect())
    }

    proptest! {
        #[test]
        fn selection_bound_is_exact(b in arb_b(), ci in 0usize..3) {
            prop_assume!(b.iter().any(|x| !x.is_zero()));
            let c = [rat(1, 2), rat(3, 4), rat(15, 16)][ci].clone();
            let cover = SimplexCover::new(c, b.len(), None).unwrap();
            let a = simplex_select(&b, &cover).unwrap();
            prop_assert!(cover.contains(&a));
            let total: BigRational = b.iter().sum();
            for (bj, aj) in b.iter().zip(&a) {
                prop_assert!(bj >= &(aj * &total));
            }
        }

        #[test]
        fn fw_rows_sum_to_zero(rows in prop::collection::vec(prop::collection::vec((0i64..9, 1i64..5), 3), 1..4)) {
            let d = WeightSystem::new(WeightKind::D, rows.iter().map(|r| r.iter().map(|&(a, b)| rat(a, b)).collect()).collect()).unwrap();
            match fw_weights(&d) {
                Ok((eps, c)) => {
                    prop_assert!(eps.is_positive() && d.total() > int(3));
                    for row in &c.entries {
                        prop_assert!(row.iter().sum::<BigRational>().is_zero());
                    }
                }
                Err(Error::ThresholdNotMet { .. }) => prop_assert!(d.total() <= int(3)),
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
