//! Bounded-height enumeration of P^n(Q) and filtering of the points by the
//! Schmidt-type, Faltings–Wüstholz-type and parametric inequalities.
//!
//! When every place of the system is archimedean, filtering first runs a
//! float prescreen with an explicit error bound; a point is discarded there
//! only when its margin is clearly negative. Every surviving point is
//! decided with interval enclosures, and points whose enclosure straddles
//! the threshold are reported as indeterminate.

use std::sync::Arc;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::NumberField;
use crate::heights::{weil_hyperplane, HyperplanePresentation, ProjectivePoint};
use crate::interval::{Interval, Verdict};
use crate::places::{bits_for, LocalData};
use crate::rat::to_f64;
use crate::roots::image_value;
use crate::twisted::{check_forms, parametric_verdict, PlaceForms, TwistedHeightSpec};

/// Streaming enumeration of the points of P^n(Q) of height at most `bound`
/// in canonical (lexicographic) order.
///
/// The odometer runs over `[-B, B]^{n+1}` starting from `(0, ..., 0, 1)`;
/// coordinates are only reset to `-B` behind a nonzero leading entry, so
/// every visited vector already has a positive first nonzero coordinate and
/// only the gcd condition needs filtering.
#[derive(Clone, Debug)]
pub struct PointEnumerator {
    bound: i64,
    cur: Option<Vec<i64>>,
    first: Option<i64>,
}

impl PointEnumerator {
    pub fn new(n: usize, bound: u64) -> Result<PointEnumerator> {
        if n == 0 {
            return Err(Error::BadParameter("n must be at least 1".into()));
        }
        if bound == 0 {
            return Err(Error::BadParameter("height bound must be at least 1".into()));
        }
        let bound = i64::try_from(bound)
            .ok()
            .filter(|b| *b < i64::MAX / 2)
            .ok_or_else(|| Error::BadParameter("height bound too large".into()))?;
        let mut start = vec![0i64; n + 1];
        start[n] = 1;
        Ok(PointEnumerator { bound, cur: Some(start), first: None })
    }

    /// The points whose first coordinate equals `x0`; these shards
    /// partition the enumeration and concatenate in canonical order.
    pub fn shard(n: usize, bound: u64, x0: i64) -> Result<PointEnumerator> {
        let mut e = PointEnumerator::new(n, bound)?;
        e.first = Some(x0);
        if x0 < 0 || x0 > e.bound {
            e.cur = None;
        } else if x0 > 0 {
            let mut start = vec![-e.bound; n + 1];
            start[0] = x0;
            e.cur = Some(start);
        }
        Ok(e)
    }

    fn successor(&self, v: &[i64]) -> Option<Vec<i64>> {
        let mut w = v.to_vec();
        let mut i = w.len() - 1;
        loop {
            if w[i] < self.bound {
                w[i] += 1;
                for c in w.iter_mut().skip(i + 1) {
                    *c = -self.bound;
                }
                break;
            }
            if i == 0 {
                return None;
            }
            i -= 1;
        }
        match self.first {
            Some(x0) if w[0] != x0 => None,
            _ => Some(w),
        }
    }
}

impl Iterator for PointEnumerator {
    type Item = ProjectivePoint;

    fn next(&mut self) -> Option<ProjectivePoint> {
        loop {
            let v = self.cur.take()?;
            self.cur = self.successor(&v);
            if v.iter().fold(0i64, |g, &c| g.gcd(&c)) == 1 {
                return Some(ProjectivePoint::from_canonical(v));
            }
        }
    }
}

/// All points of height at most `bound`, failing once more than `budget`
/// points would be produced.
pub fn enumerate_points(n: usize, bound: u64, budget: Option<usize>) -> Result<Vec<ProjectivePoint>> {
    let mut out = Vec::new();
    for x in PointEnumerator::new(n, bound)? {
        if budget.is_some_and(|b| out.len() >= b) {
            return Err(Error::BudgetExceeded(budget.unwrap()));
        }
        out.push(x);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InequalityKind {
    /// `sum_v sum_i lambda_vi(x) >= (n+1+eps) h(x) - slack`.
    Schmidt,
    /// `lambda_vi(x) - d_vi h(x) + slack >= 0` for every (v, i).
    Fw,
    /// `ln H_Q(x) <= -eps ln Q + slack` for the twisted height at fixed Q.
    Parametric,
}

impl InequalityKind {
    pub fn name(&self) -> &'static str {
        match self {
            InequalityKind::Schmidt => "schmidt",
            InequalityKind::Fw => "fw",
            InequalityKind::Parametric => "parametric",
        }
    }
}

/// An inequality system over a set S of places with n+1 forms each.
#[derive(Clone, Debug)]
pub struct SystemSpec {
    kind: InequalityKind,
    field: Arc<NumberField>,
    n: usize,
    places: Vec<PlaceForms>,
    epsilon: BigRational,
    twisted: Option<TwistedHeightSpec>,
}

impl SystemSpec {
    /// `places[v].weights` holds d-weights for `Fw`, zero-sum c-weights for
    /// `Parametric` and is ignored for `Schmidt`; `q` is required for
    /// `Parametric` only.
    pub fn new(
        kind: InequalityKind,
        field: &Arc<NumberField>,
        n: usize,
        places: Vec<PlaceForms>,
        epsilon: BigRational,
        q: Option<BigRational>,
    ) -> Result<SystemSpec> {
        if places.is_empty() {
            return Err(Error::InvalidSpec("S must contain at least one place".into()));
        }
        for (k, pf) in places.iter().enumerate() {
            if places[..k].iter().any(|o| o.place.v == pf.place.v) {
                return Err(Error::InvalidSpec(format!("place {} listed twice", pf.place.v)));
            }
            if pf.forms.iter().any(|f| f.field() != field) {
                return Err(Error::FieldMismatch);
            }
            check_forms(n, pf.place.v, &pf.forms)?;
            if kind != InequalityKind::Schmidt && pf.weights.len() != n + 1 {
                return Err(Error::InvalidSpec(format!(
                    "weights row for place {} has {} entries, expected {}",
                    pf.place.v,
                    pf.weights.len(),
                    n + 1
                )));
            }
        }
        if !epsilon.is_positive() {
            return Err(Error::InvalidSpec("epsilon must be positive".into()));
        }
        let twisted = match kind {
            InequalityKind::Parametric => {
                let q = q.ok_or_else(|| Error::InvalidSpec("parametric systems need Q".into()))?;
                Some(TwistedHeightSpec::new(field, n, places.clone(), epsilon.clone(), q)?)
            }
            _ => None,
        };
        Ok(SystemSpec { kind, field: field.clone(), n, places, epsilon, twisted })
    }

    pub fn kind(&self) -> InequalityKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn places(&self) -> &[PlaceForms] {
        &self.places
    }

    pub fn epsilon(&self) -> &BigRational {
        &self.epsilon
    }

    /// Canonical text of the system, the input of `digest`.
    pub fn describe(&self) -> String {
        let mut s = format!("kind={};poly={:?};n={};eps={}", self.kind.name(), self.field.min_poly().iter().map(|c| c.to_string()).collect::<Vec<_>>(), self.n, self.epsilon);
        if let Some(t) = &self.twisted {
            s.push_str(&format!(";Q={}", t.q()));
        }
        for pf in &self.places {
            s.push_str(&format!(";v={};w={}", pf.place.v, pf.place.w_index));
            for f in &pf.forms {
                let cs: Vec<String> = f.coeffs().iter().map(|c| format!("{:?}", c.coeffs().iter().map(|q| q.to_string()).collect::<Vec<_>>())).collect();
                s.push_str(&format!(";form={}", cs.join(",")));
            }
            if self.kind != InequalityKind::Schmidt {
                let ws: Vec<String> = pf.weights.iter().map(|q| q.to_string()).collect();
                s.push_str(&format!(";weights={}", ws.join(",")));
            }
        }
        s
    }

    /// SHA-256 of `describe` in hex.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.describe().as_bytes()))
    }
}

/// Weil values of every (place, form) at a point together with h.
#[derive(Clone, Debug, Serialize)]
pub struct PointProfile {
    pub point: ProjectivePoint,
    pub h: Interval,
    pub lambda: Vec<Vec<Interval>>,
}

/// `lambda_vi(x)` for all (v, i); `Err(OnSupport)` when some form vanishes.
pub fn point_profile(spec: &SystemSpec, x: &ProjectivePoint, digits: u32) -> Result<PointProfile> {
    let lambda = spec
        .places
        .iter()
        .map(|pf| {
            pf.forms
                .iter()
                .map(|f| weil_hyperplane(&HyperplanePresentation::new(f.clone()), x, &pf.place, digits))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PointProfile { point: x.clone(), h: x.log_height(), lambda })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Solution,
    NotSolution,
    Indeterminate,
    Support,
}

impl From<Verdict> for Outcome {
    fn from(v: Verdict) -> Outcome {
        match v {
            Verdict::Holds => Outcome::Solution,
            Verdict::Fails => Outcome::NotSolution,
            Verdict::Indeterminate => Outcome::Indeterminate,
        }
    }
}

fn on_support(spec: &SystemSpec, x: &ProjectivePoint) -> Result<bool> {
    for pf in &spec.places {
        for f in &pf.forms {
            if f.eval(x)?.is_zero() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Decides one point with interval enclosures.
pub fn exact_outcome(spec: &SystemSpec, x: &ProjectivePoint, digits: u32, slack: &BigRational) -> Result<Outcome> {
    if x.dim() != spec.n {
        return Err(Error::InvalidSpec(format!("point {x} is not in P^{}", spec.n)));
    }
    if on_support(spec, x)? {
        return Ok(Outcome::Support);
    }
    let s = Interval::from_rational(slack);
    match spec.kind {
        InequalityKind::Schmidt => {
            let p = point_profile(spec, x, digits)?;
            let lhs = p.lambda.iter().flatten().fold(Interval::ZERO, |a, b| a.add(b));
            let scale = Interval::from_rational(&(BigRational::from_integer((spec.n + 1).into()) + &spec.epsilon));
            let rhs = scale.mul(&p.h).sub(&s);
            Ok(lhs.sub(&rhs).nonnegative().into())
        }
        InequalityKind::Fw => {
            let p = point_profile(spec, x, digits)?;
            let mut result = Outcome::Solution;
            for (row, pf) in p.lambda.iter().zip(&spec.places) {
                for (l, d) in row.iter().zip(&pf.weights) {
                    let margin = l.sub(&Interval::from_rational(d).mul(&p.h)).add(&s);
                    match margin.nonnegative() {
                        Verdict::Fails => return Ok(Outcome::NotSolution),
                        Verdict::Indeterminate => result = Outcome::Indeterminate,
                        Verdict::Holds => {}
                    }
                }
            }
            Ok(result)
        }
        InequalityKind::Parametric => {
            let t = spec.twisted.as_ref().expect("parametric systems carry a twisted spec");
            Ok(parametric_verdict(t, x, digits, slack)?.into())
        }
    }
}

/// Float images of the form coefficients under the archimedean embeddings,
/// each with an absolute error bound.
struct Prescreen {
    /// per place, per form, per coefficient: (re, im, err)
    coeffs: Vec<Vec<Vec<(f64, f64, f64)>>>,
    scale: f64,
    slack: f64,
    weights: Vec<Vec<f64>>,
    ln_q: f64,
    eps: f64,
}

const U: f64 = f64::EPSILON;

impl Prescreen {
    fn build(spec: &SystemSpec, slack: &BigRational) -> Option<Prescreen> {
        let mut coeffs = Vec::new();
        for pf in &spec.places {
            let LocalData::Embedding(enc) = &pf.place.local else {
                return None;
            };
            let mut forms = Vec::new();
            for f in &pf.forms {
                let mut cs = Vec::new();
                for a in f.coeffs() {
                    let (re, im, rho) = image_value(&a.to_poly(), enc);
                    let (r, i) = (to_f64(&re), to_f64(&im));
                    let err = to_f64(&rho) * (1.0 + 4.0 * U) + 4.0 * U * (r.abs() + i.abs()) + f64::MIN_POSITIVE;
                    cs.push((r, i, err));
                }
                forms.push(cs);
            }
            coeffs.push(forms);
        }
        let ln_q = spec.twisted.as_ref().map_or(0.0, |t| to_f64(t.q()).ln());
        Some(Prescreen {
            coeffs,
            scale: (spec.n + 1) as f64 + to_f64(&spec.epsilon),
            slack: to_f64(slack),
            weights: spec.places.iter().map(|pf| pf.weights.iter().map(to_f64).collect()).collect(),
            ln_q,
            eps: to_f64(&spec.epsilon),
        })
    }

    /// Lower and upper bounds for `|l(x)|`.
    fn form_abs(cs: &[(f64, f64, f64)], x: &[i64]) -> (f64, f64) {
        let (mut re, mut im, mut mag, mut err) = (0.0, 0.0, 0.0, 0.0);
        for (&(r, i, e), &c) in cs.iter().zip(x) {
            let c = c as f64;
            re += r * c;
            im += i * c;
            mag += (r.abs() + i.abs()) * c.abs();
            err += e * c.abs();
        }
        let v = re.hypot(im);
        let slop = err * (1.0 + 4.0 * U) + 8.0 * (cs.len() + 2) as f64 * U * mag + 4.0 * U * v;
        ((v - slop).max(0.0), v + slop)
    }

    /// Returns false only when the point certainly fails the inequality.
    fn may_hold(&self, kind: InequalityKind, x: &ProjectivePoint) -> bool {
        let c = x.coords();
        let hmax = x.mult_height() as f64;
        let h = hmax.ln();
        // generous allowance for the float logarithms
        let log_err = 1e-12 * (1.0 + h.abs());
        match kind {
            InequalityKind::Schmidt => {
                let mut upper = 0.0;
                for forms in &self.coeffs {
                    for cs in forms {
                        let (lo, _) = Self::form_abs(cs, c);
                        if lo <= 0.0 {
                            return true;
                        }
                        upper += h - lo.ln() + log_err;
                    }
                }
                let rhs = self.scale * h - self.slack;
                upper - rhs >= -1e-9 * (1.0 + rhs.abs())
            }
            InequalityKind::Fw => {
                for (forms, ws) in self.coeffs.iter().zip(&self.weights) {
                    for (cs, d) in forms.iter().zip(ws) {
                        let (lo, _) = Self::form_abs(cs, c);
                        if lo <= 0.0 {
                            continue;
                        }
                        let margin = h - lo.ln() + log_err - d * h + self.slack;
                        if margin < -1e-9 * (1.0 + (d * h).abs()) {
                            return false;
                        }
                    }
                }
                true
            }
            InequalityKind::Parametric => {
                // ln H_Q >= sum_v max_i (ln |l_vi| - c_vi ln Q): a lower bound needs
                // one lower bound per place
                let mut lower = 0.0;
                for (forms, ws) in self.coeffs.iter().zip(&self.weights) {
                    let mut best = f64::NEG_INFINITY;
                    for (cs, w) in forms.iter().zip(ws) {
                        let (lo, _) = Self::form_abs(cs, c);
                        if lo > 0.0 {
                            best = best.max(lo.ln() - log_err - w * self.ln_q);
                        }
                    }
                    if best == f64::NEG_INFINITY {
                        return true;
                    }
                    lower += best;
                }
                let bound = self.slack - self.eps * self.ln_q;
                bound - lower >= -1e-9 * (1.0 + bound.abs())
            }
        }
    }
}

/// Filtered points.
#[derive(Clone, Debug, Serialize)]
pub struct SolutionSet {
    pub spec_digest: String,
    pub points: Vec<ProjectivePoint>,
    pub indeterminate: Vec<ProjectivePoint>,
    /// Points on the support of some form, outside the domain of the system.
    pub support: Vec<ProjectivePoint>,
    #[serde(serialize_with = "crate::ser::rational")]
    pub slack_used: BigRational,
    pub examined: u64,
}

#[derive(Default)]
struct Buckets {
    points: Vec<ProjectivePoint>,
    indeterminate: Vec<ProjectivePoint>,
    support: Vec<ProjectivePoint>,
    examined: u64,
}

impl Buckets {
    fn merge(mut self, o: Buckets) -> Buckets {
        self.points.extend(o.points);
        self.indeterminate.extend(o.indeterminate);
        self.support.extend(o.support);
        self.examined += o.examined;
        self
    }
}

fn run_chunk<I: Iterator<Item = ProjectivePoint>>(
    spec: &SystemSpec,
    pre: Option<&Prescreen>,
    points: I,
    digits: u32,
    slack: &BigRational,
) -> Result<Buckets> {
    let mut b = Buckets::default();
    for x in points {
        b.examined += 1;
        if let Some(p) = pre {
            if !p.may_hold(spec.kind, &x) {
                continue;
            }
        }
        match exact_outcome(spec, &x, digits, slack)? {
            Outcome::Solution => b.points.push(x),
            Outcome::Indeterminate => b.indeterminate.push(x),
            Outcome::Support => b.support.push(x),
            Outcome::NotSolution => {}
        }
    }
    Ok(b)
}

fn finish(spec: &SystemSpec, b: Buckets, slack: &BigRational) -> SolutionSet {
    SolutionSet {
        spec_digest: spec.digest(),
        points: b.points,
        indeterminate: b.indeterminate,
        support: b.support,
        slack_used: slack.clone(),
        examined: b.examined,
    }
}

/// Filters a list of points (sorted and deduplicated first).
pub fn filter_solutions(spec: &SystemSpec, points: &[ProjectivePoint], digits: u32, slack: &BigRational) -> Result<SolutionSet> {
    if slack.is_negative() {
        return Err(Error::BadParameter("slack must be nonnegative".into()));
    }
    let mut sorted = points.to_vec();
    sorted.sort();
    sorted.dedup();
    let pre = Prescreen::build(spec, slack);
    let parts: Vec<Buckets> = sorted
        .par_chunks(1024)
        .map(|chunk| run_chunk(spec, pre.as_ref(), chunk.iter().cloned(), digits, slack))
        .collect::<Result<_>>()?;
    let merged = parts.into_iter().fold(Buckets::default(), Buckets::merge);
    Ok(finish(spec, merged, slack))
}

/// Filters every point of height at most `bound` without materializing the
/// enumeration; shards by first coordinate run in parallel.
pub fn filter_enumerated(spec: &SystemSpec, bound: u64, digits: u32, slack: &BigRational) -> Result<SolutionSet> {
    if slack.is_negative() {
        return Err(Error::BadParameter("slack must be nonnegative".into()));
    }
    PointEnumerator::new(spec.n, bound)?;
    let pre = Prescreen::build(spec, slack);
    let n = spec.n;
    let parts: Vec<Buckets> = (0..=bound as i64)
        .into_par_iter()
        .map(|x0| run_chunk(spec, pre.as_ref(), PointEnumerator::shard(n, bound, x0)?, digits, slack))
        .collect::<Result<_>>()?;
    let merged = parts.into_iter().fold(Buckets::default(), Buckets::merge);
    Ok(finish(spec, merged, slack))
}

/// Digits used by the prescreen-free exact path; exposed for reports.
pub fn working_bits(digits: u32) -> u32 {
    bits_for(digits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldElement;
    use crate::heights::LinearForm;
    use crate::places::{place, RationalPlace};
    use crate::rat::{int, rat};

    fn pt(c: &[i64]) -> ProjectivePoint {
        ProjectivePoint::new(c.to_vec()).unwrap()
    }

    fn naive_count(n: usize, b: i64) -> usize {
        let mut count = 0;
        let mut v = vec![-b; n + 1];
        loop {
            if ProjectivePoint::new(v.clone()).is_ok_and(|p| p.coords() == v.as_slice()) {
                count += 1;
            }
            let mut i = n;
            loop {
                if v[i] < b {
                    v[i] += 1;
                    break;
                }
                v[i] = -b;
                if i == 0 {
                    return count;
                }
                i -= 1;
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        let p1 = enumerate_points(1, 1, None).unwrap();
        assert_eq!(p1, vec![pt(&[0, 1]), pt(&[1, -1]), pt(&[1, 0]), pt(&[1, 1])]);
        assert_eq!(enumerate_points(1, 2, None).unwrap().len(), 8);
        assert!(enumerate_points(1, 0, None).is_err());
        assert_eq!(enumerate_points(2, 5, Some(10)), Err(Error::BudgetExceeded(10)));
        for n in 1..=2 {
            for b in [1u64, 2, 3, 7] {
                let pts = enumerate_points(n, b, None).unwrap();
                assert_eq!(pts.len(), naive_count(n, b as i64));
                assert!(pts.windows(2).all(|w| w[0] < w[1]));
                let sharded: Vec<_> = (0..=b as i64).flat_map(|x0| PointEnumerator::shard(n, b, x0).unwrap()).collect();
                assert_eq!(sharded, pts);
            }
        }
    }

    pub(crate) fn roth_spec(eps: BigRational) -> SystemSpec {
        let f = NumberField::from_i64(&[-2, 0, 1]).unwrap();
        let theta = FieldElement::theta(&f);
        let w = place(&f, RationalPlace::Infinity, 1, 40).unwrap();
        let forms = vec![
            LinearForm::new(&f, vec![theta.neg(), FieldElement::one(&f)]).unwrap(),
            LinearForm::coordinate(&f, 1, 0),
        ];
        let pf = PlaceForms { place: w, forms, weights: vec![] };
        SystemSpec::new(InequalityKind::Schmidt, &f, 1, vec![pf], eps, None).unwrap()
    }

    #[test]
    fn roth_examples() {
        let s = roth_spec(rat(1, 10));
        let zero = int(0);
        assert_eq!(exact_outcome(&s, &pt(&[5, 7]), 40, &zero).unwrap(), Outcome::Solution);
        assert_eq!(exact_outcome(&s, &pt(&[5, 3]), 40, &zero).unwrap(), Outcome::NotSolution);
        let p = point_profile(&s, &pt(&[5, 7]), 40).unwrap();
        let lhs: f64 = p.lambda[0].iter().map(|l| l.mid()).sum();
        let oracle = 2.0 * 7f64.ln() - (7.0 - 5.0 * 2f64.sqrt()).abs().ln() - 5f64.ln();
        assert!((lhs - oracle).abs() < 1e-9);
        assert!(lhs > 2.1 * 7f64.ln());
        let big = filter_enumerated(&roth_spec(int(100)), 100, 40, &zero).unwrap();
        assert!(big.points.len() <= 2);
        assert_eq!(big.examined, enumerate_points(1, 100, None).unwrap().len() as u64);
    }

    #[test]
    fn prescreen_agrees_with_exact_path() {
        let s = roth_spec(rat(1, 10));
        let zero = int(0);
        let pts = enumerate_points(1, 60, None).unwrap();
        let fast = filter_solutions(&s, &pts, 40, &zero).unwrap();
        let mut slow = Vec::new();
        let mut support = Vec::new();
        for x in &pts {
            match exact_outcome(&s, x, 40, &zero).unwrap() {
                Outcome::Solution => slow.push(x.clone()),
                Outcome::Support => support.push(x.clone()),
                _ => {}
            }
        }
        assert_eq!(fast.points, slow);
        assert_eq!(fast.support, support);
        assert_eq!(fast.spec_digest.len(), 64);
    }
}
