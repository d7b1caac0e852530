//! Projective points, heights, and local Weil functions of hyperplanes.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField};
use crate::interval::Interval;
use crate::places::{ln_abs, Normalization, Place, RationalPlace};
use crate::rat::ord_p;

/// A point of P^n(Q) in primitive integer coordinates whose first nonzero
/// coordinate is positive. The derived order is lexicographic on the
/// coordinates and serves as the canonical point order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ProjectivePoint {
    coords: Vec<i64>,
}

impl ProjectivePoint {
    /// Canonical representative of the class of a nonzero integer vector.
    pub fn new(coords: Vec<i64>) -> Result<ProjectivePoint> {
        if coords.len() < 2 {
            return Err(Error::InvalidSpec("a projective point needs at least two coordinates".into()));
        }
        let g = coords.iter().fold(0i64, |g, &c| g.gcd(&c));
        if g == 0 {
            return Err(Error::InvalidSpec("the zero vector is not a projective point".into()));
        }
        let lead = coords.iter().find(|&&c| c != 0).unwrap();
        let g = if *lead < 0 { -g } else { g };
        Ok(ProjectivePoint { coords: coords.iter().map(|c| c / g).collect() })
    }

    /// Wraps coordinates already known to be canonical.
    pub(crate) fn from_canonical(coords: Vec<i64>) -> ProjectivePoint {
        debug_assert_eq!(ProjectivePoint::new(coords.clone()).unwrap().coords, coords);
        ProjectivePoint { coords }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    /// n for a point of P^n.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// H(x) = prod_v max_i |x_i|_v, which is max_i |x_i| for primitive coordinates.
    pub fn mult_height(&self) -> u64 {
        self.coords.iter().map(|c| c.unsigned_abs()).max().unwrap()
    }

    /// h(x) = ln H(x).
    pub fn log_height(&self) -> Interval {
        Interval::ln_u64(self.mult_height())
    }

    /// `max_j ln |x_j|_v`.
    pub fn ln_max_abs(&self, v: RationalPlace) -> Interval {
        match v {
            RationalPlace::Infinity => self.log_height(),
            RationalPlace::Prime(p) => {
                let min_ord = self
                    .coords
                    .iter()
                    .filter(|&&c| c != 0)
                    .map(|&c| ord_p(&BigInt::from(c), p))
                    .min()
                    .unwrap();
                if min_ord == 0 {
                    Interval::ZERO
                } else {
                    Interval::ln_u64(p).mul(&Interval::point(-(min_ord as f64)))
                }
            }
        }
    }

    pub fn rational_coords(&self) -> Vec<BigRational> {
        self.coords.iter().map(|&c| BigRational::from_integer(c.into())).collect()
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

/// A nonzero linear form `sum_j a_j x_j` with coefficients in F.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    field: Arc<NumberField>,
    coeffs: Vec<FieldElement>,
}

impl LinearForm {
    pub fn new(field: &Arc<NumberField>, coeffs: Vec<FieldElement>) -> Result<LinearForm> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidSpec("a linear form needs at least two coefficients".into()));
        }
        if coeffs.iter().any(|c| c.field() != field) {
            return Err(Error::FieldMismatch);
        }
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(Error::InvalidSpec("the zero form is not allowed".into()));
        }
        Ok(LinearForm { field: field.clone(), coeffs })
    }

    /// Form with rational coefficients.
    pub fn rational(field: &Arc<NumberField>, coeffs: &[BigRational]) -> Result<LinearForm> {
        let c = coeffs.iter().map(|q| FieldElement::from_rational(field, q.clone())).collect();
        LinearForm::new(field, c)
    }

    /// The coordinate form `x_i` on P^n.
    pub fn coordinate(field: &Arc<NumberField>, n: usize, i: usize) -> LinearForm {
        let coeffs = (0..=n).map(|j| FieldElement::from_int(field, (i == j) as i64)).collect();
        LinearForm { field: field.clone(), coeffs }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn scale(&self, c: &FieldElement) -> Result<LinearForm> {
        let coeffs = self.coeffs.iter().map(|a| a.mul(c)).collect::<Result<Vec<_>>>()?;
        LinearForm::new(&self.field, coeffs)
    }

    pub fn eval(&self, x: &ProjectivePoint) -> Result<FieldElement> {
        if x.coords.len() != self.coeffs.len() {
            return Err(Error::InvalidSpec(format!(
                "form on P^{} evaluated at a point of P^{}",
                self.dim(),
                x.dim()
            )));
        }
        let mut acc = FieldElement::zero(&self.field);
        for (a, &c) in self.coeffs.iter().zip(&x.coords) {
            if c != 0 && !a.is_zero() {
                acc = acc.add(&a.scale(&BigRational::from_integer(c.into())))?;
            }
        }
        Ok(acc)
    }
}

/// The presentation of the hyperplane `{l = 0}` whose positive part is
/// O(1) with the coordinate sections and whose negative part is the trivial
/// bundle with the section 1.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperplanePresentation {
    form: LinearForm,
}

impl HyperplanePresentation {
    pub fn new(form: LinearForm) -> Self {
        HyperplanePresentation { form }
    }

    pub fn form(&self) -> &LinearForm {
        &self.form
    }
}

/// `lambda(x, v) = max_j ln |x_j / l(x)|_{v,K}` at the chosen place `w | v`.
pub fn weil_hyperplane(pres: &HyperplanePresentation, x: &ProjectivePoint, place: &Place, digits: u32) -> Result<Interval> {
    let form = &pres.form;
    let value = form.eval(x)?;
    if value.is_zero() {
        return Err(Error::OnSupport);
    }
    let l = ln_abs(form.field(), place, &value, Normalization::Extension, digits)?;
    Ok(x.ln_max_abs(place.v).sub(&l))
}

/// `m_S(x, D) = sum_{v in S} lambda(x, v)`.
pub fn proximity(pres: &HyperplanePresentation, x: &ProjectivePoint, places: &[Place], digits: u32) -> Result<Interval> {
    places
        .iter()
        .try_fold(Interval::ZERO, |acc, w| Ok(acc.add(&weil_hyperplane(pres, x, w, digits)?)))
}

/// Smallest constant making the Weil function nonnegative on the sample:
/// the largest negative part of `lambda` over the points, or zero.
pub fn nonnegativity_shift(pres: &HyperplanePresentation, points: &[ProjectivePoint], place: &Place, digits: u32) -> Result<f64> {
    let mut shift = 0.0f64;
    for x in points {
        match weil_hyperplane(pres, x, place, digits) {
            Ok(l) => shift = shift.max(-l.lo),
            Err(Error::OnSupport) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(shift)
}

/// Observed range of `lambda_a - lambda_b` over the sample points where
/// both are defined; two presentations of the same divisor differ by a
/// bounded function.
pub fn presentation_difference(
    a: &HyperplanePresentation,
    b: &HyperplanePresentation,
    points: &[ProjectivePoint],
    place: &Place,
    digits: u32,
) -> Result<Option<(f64, f64)>> {
    let mut range: Option<(f64, f64)> = None;
    for x in points {
        let (la, lb) = match (weil_hyperplane(a, x, place, digits), weil_hyperplane(b, x, place, digits)) {
            (Ok(la), Ok(lb)) => (la, lb),
            (Err(Error::OnSupport), _) | (_, Err(Error::OnSupport)) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        let d = la.sub(&lb).mid();
        range = Some(match range {
            None => (d, d),
            Some((lo, hi)) => (lo.min(d), hi.max(d)),
        });
    }
    Ok(range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::places::place;
    use crate::rat::int;

    fn pt(c: &[i64]) -> ProjectivePoint {
        ProjectivePoint::new(c.to_vec()).unwrap()
    }

    #[test]
    fn canonical_points_and_heights() {
        assert_eq!(pt(&[3, 4]).mult_height(), 4);
        assert_eq!(pt(&[1, 0, 0]).mult_height(), 1);
        assert_eq!(pt(&[2, 4]).coords(), &[1, 2]);
        assert_eq!(pt(&[-2, 4]).coords(), &[1, -2]);
        assert_eq!(pt(&[0, -3, 6]).coords(), &[0, 1, -2]);
        assert!(ProjectivePoint::new(vec![0, 0]).is_err());
        assert!((pt(&[3, 4]).log_height().mid() - 4f64.ln()).abs() < 1e-15);
        assert_eq!(pt(&[1, 1]).log_height(), Interval::ZERO);
        assert_eq!(pt(&[0, 1]).log_height(), Interval::ZERO);
        assert!(pt(&[0, 1]) < pt(&[1, -1]) && pt(&[1, -1]) < pt(&[1, 0]));
    }

    #[test]
    fn weil_values() {
        let q = NumberField::rationals();
        let x0 = HyperplanePresentation::new(LinearForm::coordinate(&q, 1, 0));
        let inf = place(&q, RationalPlace::Infinity, 0, 30).unwrap();
        let two = place(&q, RationalPlace::Prime(2), 0, 30).unwrap();
        let l = weil_hyperplane(&x0, &pt(&[3, 4]), &inf, 30).unwrap();
        assert!((l.mid() - (4.0f64 / 3.0).ln()).abs() < 1e-14);
        assert_eq!(weil_hyperplane(&x0, &pt(&[1, 1]), &two, 30).unwrap(), Interval::ZERO);
        let m = proximity(&x0, &pt(&[3, 4]), &[inf.clone(), two], 30).unwrap();
        assert!((m.mid() - (4.0f64 / 3.0).ln()).abs() < 1e-14);
        assert_eq!(weil_hyperplane(&x0, &pt(&[0, 1]), &inf, 30), Err(Error::OnSupport));

        let f = NumberField::from_i64(&[-2, 0, 1]).unwrap();
        let theta = FieldElement::theta(&f);
        let form = LinearForm::new(&f, vec![theta.neg(), FieldElement::one(&f)]).unwrap();
        let pres = HyperplanePresentation::new(form);
        let w = place(&f, RationalPlace::Infinity, 1, 30).unwrap();
        let l = weil_hyperplane(&pres, &pt(&[5, 7]), &w, 30).unwrap();
        let oracle = (7.0 / (7.0 - 5.0 * 2f64.sqrt()).abs()).ln();
        assert!((l.mid() - oracle).abs() < 1e-12 && (l.mid() - 4.590).abs() < 1e-3);
    }

    #[test]
    fn presentations_of_scaled_forms_differ_by_a_constant() {
        let q = NumberField::rationals();
        let form = LinearForm::rational(&q, &[int(1), int(-2)]).unwrap();
        let scaled = form.scale(&FieldElement::from_int(&q, 12)).unwrap();
        let (a, b) = (HyperplanePresentation::new(form), HyperplanePresentation::new(scaled));
        let pts: Vec<_> = (1..30).map(|k| pt(&[k, k + 1])).collect();
        for (v, expected) in [(RationalPlace::Infinity, 12f64.ln()), (RationalPlace::Prime(2), -4f64.ln())] {
            let w = place(&q, v, 0, 30).unwrap();
            let (lo, hi) = presentation_difference(&a, &b, &pts, &w, 30).unwrap().unwrap();
            assert!((lo - expected).abs() < 1e-12 && (hi - expected).abs() < 1e-12);
        }
        let w = place(&q, RationalPlace::Infinity, 0, 30).unwrap();
        let shift = nonnegativity_shift(&a, &pts, &w, 30).unwrap();
        for x in &pts {
            assert!(weil_hyperplane(&a, x, &w, 30).unwrap().lo + shift >= 0.0);
        }
    }
}
