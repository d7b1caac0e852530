//! Twisted heights `H_Q` and the logarithmic twisted height inequality.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::NumberField;
use crate::heights::{weil_hyperplane, HyperplanePresentation, LinearForm, ProjectivePoint};
use crate::interval::{Interval, Verdict};
use crate::linalg::{determinant, rank};
use crate::places::{ln_abs, Normalization, Place, RationalPlace};

/// The n+1 forms and twisting weights attached to one place of S.
#[derive(Clone, Debug)]
pub struct PlaceForms {
    pub place: Place,
    pub forms: Vec<LinearForm>,
    pub weights: Vec<BigRational>,
}

#[derive(Clone, Debug)]
pub struct TwistedHeightSpec {
    field: Arc<NumberField>,
    n: usize,
    places: Vec<PlaceForms>,
    epsilon: BigRational,
    q: BigRational,
}

/// Checks that the forms at each place are n+1 independent forms on P^n.
pub(crate) fn check_forms(n: usize, v: RationalPlace, forms: &[LinearForm]) -> Result<()> {
    if forms.len() != n + 1 {
        return Err(Error::InvalidSpec(format!("place {v}: expected {} forms, got {}", n + 1, forms.len())));
    }
    if let Some(bad) = forms.iter().find(|f| f.dim() != n) {
        return Err(Error::InvalidSpec(format!("place {v}: form on P^{} in a spec on P^{n}", bad.dim())));
    }
    let m: Vec<Vec<_>> = forms.iter().map(|f| f.coeffs().to_vec()).collect();
    if determinant(&m).is_none_or(|d| d.is_zero()) {
        return Err(Error::InvalidSpec(format!("place {v}: forms are linearly dependent")));
    }
    Ok(())
}

impl TwistedHeightSpec {
    pub fn new(
        field: &Arc<NumberField>,
        n: usize,
        places: Vec<PlaceForms>,
        epsilon: BigRational,
        q: BigRational,
    ) -> Result<TwistedHeightSpec> {
        if places.is_empty() {
            return Err(Error::InvalidSpec("S must contain at least one place".into()));
        }
        for (k, pf) in places.iter().enumerate() {
            let v = pf.place.v;
            if places[..k].iter().any(|o| o.place.v == v) {
                return Err(Error::InvalidSpec(format!("place {v} listed twice")));
            }
            if pf.forms.iter().any(|f| f.field() != field) {
                return Err(Error::FieldMismatch);
            }
            check_forms(n, v, &pf.forms)?;
            if pf.weights.len() != n + 1 {
                return Err(Error::InvalidSpec(format!("weights row for place {v} has {} entries", pf.weights.len())));
            }
            let sum: BigRational = pf.weights.iter().sum();
            if !sum.is_zero() {
                return Err(Error::InvalidSpec(format!("weights row for place {v} sums to {sum}, not 0")));
            }
        }
        if !epsilon.is_positive() {
            return Err(Error::InvalidSpec("epsilon must be positive".into()));
        }
        if q < BigRational::one() {
            return Err(Error::InvalidSpec("Q must be at least 1".into()));
        }
        Ok(TwistedHeightSpec { field: field.clone(), n, places, epsilon, q })
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn places(&self) -> &[PlaceForms] {
        &self.places
    }

    pub fn epsilon(&self) -> &BigRational {
        &self.epsilon
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    /// The same spec with another value of Q.
    pub fn with_q(&self, q: BigRational) -> Result<TwistedHeightSpec> {
        if q < BigRational::one() {
            return Err(Error::InvalidSpec("Q must be at least 1".into()));
        }
        Ok(TwistedHeightSpec { q, ..self.clone() })
    }

    fn contains_infinity(&self) -> bool {
        self.places.iter().any(|pf| pf.place.is_archimedean())
    }

    fn check_point(&self, x: &ProjectivePoint) -> Result<()> {
        if x.dim() != self.n {
            return Err(Error::InvalidSpec(format!("point {x} is not in P^{}", self.n)));
        }
        Ok(())
    }
}

/// `ln H_Q(x) = sum_{v in S} max_i (ln |l_vi(x)|_{v,K} - c_vi ln Q)`, plus
/// `h(x)` when the archimedean place is outside S (the finite places
/// outside S contribute nothing for primitive coordinates).
pub fn log_twisted_height(spec: &TwistedHeightSpec, x: &ProjectivePoint, digits: u32) -> Result<Interval> {
    spec.check_point(x)?;
    let ln_q = Interval::ln_rational(&spec.q);
    let mut total = Interval::ZERO;
    for pf in &spec.places {
        let mut best: Option<Interval> = None;
        for (form, c) in pf.forms.iter().zip(&pf.weights) {
            let value = form.eval(x)?;
            if value.is_zero() {
                continue;
            }
            let l = ln_abs(&spec.field, &pf.place, &value, Normalization::Extension, digits)?;
            let term = l.sub(&ln_q.mul(&Interval::from_rational(c)));
            best = Some(best.map_or(term, |b| b.max(&term)));
        }
        let best = best.ok_or_else(|| Error::AllFormsVanish(pf.place.v.to_string()))?;
        total = total.add(&best);
    }
    if !spec.contains_infinity() {
        total = total.add(&x.log_height());
    }
    Ok(total)
}

/// Enclosure of `H_Q(x)` itself.
pub fn twisted_height(spec: &TwistedHeightSpec, x: &ProjectivePoint, digits: u32) -> Result<Interval> {
    let l = log_twisted_height(spec, x, digits)?;
    Ok(Interval::new(l.lo.exp().next_down(), l.hi.exp().next_up()))
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistedReport {
    /// `min_i (lambda_vi(x) + c_vi ln Q)` for each place of S.
    pub per_place: Vec<Interval>,
    pub lhs: Interval,
    pub h: Interval,
    /// `h + epsilon ln Q - slack`.
    pub rhs: Interval,
    pub verdict: Verdict,
    /// `|-ln H_Q(x) - (lhs - h)|`, an upper bound from the enclosures.
    pub identity_residual: f64,
}

/// Per-place breakdown of `sum_v min_i (lambda_vi + c_vi ln Q) >= h + epsilon ln Q`,
/// relaxed by `slack`, together with the identity `-ln H_Q = lhs - h`.
pub fn log_twisted_report(spec: &TwistedHeightSpec, x: &ProjectivePoint, digits: u32, slack: &BigRational) -> Result<TwistedReport> {
    spec.check_point(x)?;
    let ln_q = Interval::ln_rational(&spec.q);
    let mut per_place = Vec::with_capacity(spec.places.len());
    for pf in &spec.places {
        let mut best: Option<Interval> = None;
        for (form, c) in pf.forms.iter().zip(&pf.weights) {
            let pres = HyperplanePresentation::new(form.clone());
            let lambda = weil_hyperplane(&pres, x, &pf.place, digits)?;
            let term = lambda.add(&ln_q.mul(&Interval::from_rational(c)));
            best = Some(best.map_or(term, |b| b.min(&term)));
        }
        per_place.push(best.expect("at least one form per place"));
    }
    let lhs = per_place.iter().fold(Interval::ZERO, |a, b| a.add(b));
    let h = x.log_height();
    let rhs = h
        .add(&ln_q.mul(&Interval::from_rational(&spec.epsilon)))
        .sub(&Interval::from_rational(slack));
    let verdict = lhs.sub(&rhs).nonnegative();
    let lhq = log_twisted_height(spec, x, digits)?;
    let resid = lhq.neg().sub(&lhs.sub(&h));
    Ok(TwistedReport {
        per_place,
        lhs,
        h,
        rhs,
        verdict,
        identity_residual: resid.lo.abs().max(resid.hi.abs()),
    })
}

/// Three-valued test of `H_Q(x) <= Q^{-epsilon}`, relaxed to
/// `ln H_Q(x) <= -epsilon ln Q + slack`.
pub fn parametric_verdict(spec: &TwistedHeightSpec, x: &ProjectivePoint, digits: u32, slack: &BigRational) -> Result<Verdict> {
    let lhq = log_twisted_height(spec, x, digits)?;
    let ln_q = Interval::ln_rational(&spec.q);
    let bound = Interval::from_rational(slack).sub(&ln_q.mul(&Interval::from_rational(&spec.epsilon)));
    Ok(bound.sub(&lhq).nonnegative())
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepEntry {
    #[serde(rename = "Q", serialize_with = "crate::ser::rational")]
    pub q: BigRational,
    pub solutions: Vec<ProjectivePoint>,
    pub indeterminate: Vec<ProjectivePoint>,
}

/// For each Q of an ascending grid, the points with `H_Q(x) <= Q^{-epsilon}`
/// (up to `slack`), in canonical order.
pub fn q_sweep(
    spec: &TwistedHeightSpec,
    q_grid: &[BigRational],
    points: &[ProjectivePoint],
    digits: u32,
    slack: &BigRational,
) -> Result<Vec<SweepEntry>> {
    if q_grid.is_empty() {
        return Err(Error::BadParameter("empty Q grid".into()));
    }
    if q_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::BadParameter("Q grid must be ascending".into()));
    }
    let mut sorted = points.to_vec();
    sorted.sort();
    sorted.dedup();
    q_grid
        .iter()
        .map(|q| {
            let s = spec.with_q(q.clone())?;
            let verdicts: Vec<Verdict> = sorted
                .par_iter()
                .map(|x| parametric_verdict(&s, x, digits, slack))
                .collect::<Result<_>>()?;
            let pick = |want: Verdict| -> Vec<ProjectivePoint> {
                sorted.iter().zip(&verdicts).filter(|(_, v)| **v == want).map(|(x, _)| x.clone()).collect()
            };
            Ok(SweepEntry { q: q.clone(), solutions: pick(Verdict::Holds), indeterminate: pick(Verdict::Indeterminate) })
        })
        .collect()
}

fn same_span(a: &[ProjectivePoint], b: &[ProjectivePoint]) -> bool {
    let rows = |s: &[ProjectivePoint]| s.iter().map(|x| x.rational_coords()).collect::<Vec<_>>();
    let (ra, rb) = (rows(a), rows(b));
    let mut both = ra.clone();
    both.extend(rb.iter().cloned());
    let r = rank(&both);
    rank(&ra) == r && rank(&rb) == r
}

/// Empirical stabilization: the first grid value from which the linear
/// span of the solution set no longer changes up to the end of the grid.
pub fn stabilization_q(sweep: &[SweepEntry]) -> Option<BigRational> {
    let last = sweep.last()?;
    let mut first = sweep.len() - 1;
    while first > 0 && same_span(&sweep[first - 1].solutions, &last.solutions) {
        first -= 1;
    }
    Some(sweep[first].q.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::places::place;
    use crate::rat::{int, rat};

    fn pt(c: &[i64]) -> ProjectivePoint {
        ProjectivePoint::new(c.to_vec()).unwrap()
    }

    fn coordinate_spec(c: (i64, i64), q: i64) -> TwistedHeightSpec {
        let f = NumberField::rationals();
        let inf = place(&f, RationalPlace::Infinity, 0, 30).unwrap();
        let forms = vec![LinearForm::coordinate(&f, 1, 0), LinearForm::coordinate(&f, 1, 1)];
        let pf = PlaceForms { place: inf, forms, weights: vec![int(c.0), int(c.1)] };
        TwistedHeightSpec::new(&f, 1, vec![pf], rat(1, 10), int(q)).unwrap()
    }

    #[test]
    fn twisted_height_examples() {
        let s = coordinate_spec((1, -1), 2);
        assert!((twisted_height(&s, &pt(&[3, 4]), 30).unwrap().mid() - 8.0).abs() < 1e-12);
        let s1 = s.with_q(int(1)).unwrap();
        assert!((twisted_height(&s1, &pt(&[3, 4]), 30).unwrap().mid() - 4.0).abs() < 1e-12);
        let zero = coordinate_spec((0, 0), 1000);
        for c in [[3, 4], [1, 7], [5, -2]] {
            let x = pt(&c);
            let h = twisted_height(&zero, &x, 30).unwrap().mid();
            assert!((h - x.mult_height() as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn report_and_identity() {
        let s = coordinate_spec((1, -1), 2);
        let r = log_twisted_report(&s, &pt(&[3, 4]), 30, &int(0)).unwrap();
        assert!((r.lhs.mid() + 2f64.ln()).abs() < 1e-12);
        assert!(r.identity_residual < 1e-12);
        let z = coordinate_spec((0, 0), 2);
        let r = log_twisted_report(&z, &pt(&[1, 1]), 30, &int(0)).unwrap();
        assert_eq!(r.lhs, Interval::ZERO);
        assert_eq!(r.verdict, Verdict::Fails);
    }

    #[test]
    fn rejects_bad_weights_and_dependent_forms() {
        let f = NumberField::rationals();
        let inf = place(&f, RationalPlace::Infinity, 0, 30).unwrap();
        let forms = vec![LinearForm::coordinate(&f, 1, 0), LinearForm::coordinate(&f, 1, 1)];
        let bad = PlaceForms { place: inf.clone(), forms: forms.clone(), weights: vec![int(1), int(1)] };
        assert!(matches!(
            TwistedHeightSpec::new(&f, 1, vec![bad], rat(1, 2), int(2)),
            Err(Error::InvalidSpec(m)) if m.contains("sums to 2")
        ));
        let dep = PlaceForms { place: inf, forms: vec![forms[0].clone(), forms[0].clone()], weights: vec![int(0), int(0)] };
        assert!(TwistedHeightSpec::new(&f, 1, vec![dep], rat(1, 2), int(2)).is_err());
    }

    #[test]
    fn sweep_at_q_one_keeps_height_one_points() {
        let s = coordinate_spec((0, 0), 1);
        let pts = vec![pt(&[1, 1]), pt(&[1, 2]), pt(&[0, 1]), pt(&[3, 4])];
        let sweep = q_sweep(&s, &[int(1)], &pts, 30, &int(0)).unwrap();
        assert_eq!(sweep[0].solutions, vec![pt(&[0, 1]), pt(&[1, 1])]);
        assert!(q_sweep(&s, &[int(1), int(2)], &[], 30, &int(0)).unwrap().iter().all(|e| e.solutions.is_empty()));
    }
}
