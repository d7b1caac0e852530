//! Number fields Q[x]/(f) in the power basis of a root θ of f.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::modp::is_irreducible;
use crate::poly::QPoly;

/// Largest supported field degree.
pub const MAX_DEGREE: usize = 8;

#[derive(Debug, PartialEq, Eq)]
pub struct NumberField {
    min_poly: Vec<BigInt>,
    poly: QPoly,
    degree: usize,
    poly_disc: BigInt,
}

impl NumberField {
    /// Builds Q[x]/(f) from a monic irreducible integer polynomial given
    /// constant term first.
    pub fn new(min_poly: &[BigInt]) -> Result<Arc<NumberField>> {
        let mut coeffs = min_poly.to_vec();
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::InvalidPolynomial("degree must be at least 1".into()));
        }
        if !coeffs.last().unwrap().is_one() {
            return Err(Error::NonMonic);
        }
        let degree = coeffs.len() - 1;
        if degree > MAX_DEGREE {
            return Err(Error::InvalidPolynomial(format!(
                "degree {degree} exceeds the supported maximum {MAX_DEGREE}"
            )));
        }
        if !is_irreducible(&coeffs) {
            return Err(Error::Reducible);
        }
        let poly = QPoly::from_ints(&coeffs);
        let poly_disc = poly.discriminant_monic().to_integer();
        Ok(Arc::new(NumberField { min_poly: coeffs, poly, degree, poly_disc }))
    }

    pub fn from_i64(min_poly: &[i64]) -> Result<Arc<NumberField>> {
        let v: Vec<BigInt> = min_poly.iter().map(|&c| BigInt::from(c)).collect();
        NumberField::new(&v)
    }

    /// Q itself, presented as Q[x]/(x).
    pub fn rationals() -> Arc<NumberField> {
        NumberField::from_i64(&[0, 1]).expect("x is irreducible")
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    pub fn poly(&self) -> &QPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn poly_disc(&self) -> &BigInt {
        &self.poly_disc
    }

    pub fn is_rationals(&self) -> bool {
        self.degree == 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coeffs: Vec<BigRational>,
}

impl PartialEq for FieldElement {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.coeffs == o.coeffs
    }
}

impl Eq for FieldElement {}

/// Characteristic polynomial of multiplication by an element, with its
/// norm and trace down to Q.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPoly {
    pub charpoly: QPoly,
    pub norm: BigRational,
    pub trace: BigRational,
}

impl FieldElement {
    /// Element with the given power-basis coordinates; shorter vectors are
    /// padded with zeros.
    pub fn new(field: &Arc<NumberField>, coeffs: Vec<BigRational>) -> Result<FieldElement> {
        if coeffs.len() > field.degree {
            return Err(Error::InvalidSpec(format!(
                "element has {} coordinates but the field has degree {}",
                coeffs.len(),
                field.degree
            )));
        }
        let mut coeffs = coeffs;
        coeffs.resize(field.degree, BigRational::zero());
        Ok(FieldElement { field: field.clone(), coeffs })
    }

    pub fn from_poly(field: &Arc<NumberField>, p: &QPoly) -> FieldElement {
        let r = p.rem(&field.poly);
        let coeffs = (0..field.degree).map(|i| r.coeff(i)).collect();
        FieldElement { field: field.clone(), coeffs }
    }

    pub fn from_rational(field: &Arc<NumberField>, q: BigRational) -> FieldElement {
        let mut coeffs = vec![BigRational::zero(); field.degree];
        coeffs[0] = q;
        FieldElement { field: field.clone(), coeffs }
    }

    pub fn from_int(field: &Arc<NumberField>, n: i64) -> FieldElement {
        FieldElement::from_rational(field, BigRational::from_integer(n.into()))
    }

    pub fn zero(field: &Arc<NumberField>) -> FieldElement {
        FieldElement::from_int(field, 0)
    }

    pub fn one(field: &Arc<NumberField>) -> FieldElement {
        FieldElement::from_int(field, 1)
    }

    /// The generator θ (for Q this is the rational 0, the root of x).
    pub fn theta(field: &Arc<NumberField>) -> FieldElement {
        FieldElement::from_poly(field, &QPoly::x())
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn to_poly(&self) -> QPoly {
        QPoly::new(self.coeffs.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The element as a rational, when it lies in Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check(&self, o: &FieldElement) -> Result<()> {
        if Arc::ptr_eq(&self.field, &o.field) || self.field == o.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        Ok(FieldElement { field: self.field.clone(), coeffs })
    }

    pub fn sub(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect();
        Ok(FieldElement { field: self.field.clone(), coeffs })
    }

    pub fn neg(&self) -> FieldElement {
        let coeffs = self.coeffs.iter().map(|a| -a).collect();
        FieldElement { field: self.field.clone(), coeffs }
    }

    pub fn mul(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check(o)?;
        Ok(FieldElement::from_poly(&self.field, &self.to_poly().mul(&o.to_poly())))
    }

    pub fn scale(&self, q: &BigRational) -> FieldElement {
        let coeffs = self.coeffs.iter().map(|a| a * q).collect();
        FieldElement { field: self.field.clone(), coeffs }
    }

    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // s a + t f = 1 since f is irreducible
        let (g, s, _) = self.to_poly().ext_gcd(&self.field.poly);
        debug_assert!(g == QPoly::one());
        Ok(FieldElement::from_poly(&self.field, &s))
    }

    pub fn div(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check(o)?;
        self.mul(&o.inverse()?)
    }

    pub fn pow(&self, mut e: u32) -> FieldElement {
        let mut base = self.clone();
        let mut acc = FieldElement::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).unwrap();
            }
            base = base.mul(&base).unwrap();
            e >>= 1;
        }
        acc
    }

    /// Matrix of multiplication by this element in the power basis.
    pub fn mult_matrix(&self) -> Vec<Vec<BigRational>> {
        self.to_poly().mult_matrix(&self.field.poly)
    }

    /// Characteristic polynomial by the Faddeev–LeVerrier recurrence.
    pub fn charpoly_norm(&self) -> CharPoly {
        let d = self.field.degree;
        let m = self.mult_matrix();
        let mut c = vec![BigRational::zero(); d + 1];
        c[d] = BigRational::one();
        let mut mk = vec![vec![BigRational::zero(); d]; d];
        for k in 1..=d {
            // M_k = M * M_{k-1} + c_{d-k+1} I
            let mut next = mat_mul(&m, &mk);
            for (i, row) in next.iter_mut().enumerate() {
                row[i] += &c[d - k + 1];
            }
            mk = next;
            let am = mat_mul(&m, &mk);
            let tr: BigRational = (0..d).map(|i| am[i][i].clone()).sum();
            c[d - k] = -tr / BigRational::from_integer(BigInt::from(k));
        }
        let sign = if d.is_multiple_of(2) { BigRational::one() } else { -BigRational::one() };
        let norm = sign * &c[0];
        let trace = -c[d - 1].clone();
        CharPoly { charpoly: QPoly::new(c), norm, trace }
    }

    pub fn norm(&self) -> BigRational {
        self.charpoly_norm().norm
    }

    /// `(A, D)` with integer polynomial `A` and positive integer `D` such
    /// that the element equals `A(θ) / D`.
    pub fn integral_repr(&self) -> (Vec<BigInt>, BigInt) {
        self.to_poly().clear_denominators()
    }
}

fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let mut out = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

/// Arithmetic dispatch by operation tag.
pub fn element_arith(op: Op, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
    match op {
        Op::Add => a.add(b),
        Op::Sub => a.sub(b),
        Op::Mul => a.mul(b),
        Op::Div => a.div(b),
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => format!("{c}"),
                1 => format!("({c})*t"),
                _ => format!("({c})*t^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl crate::linalg::Scalar for FieldElement {
    fn vanishes(&self) -> bool {
        FieldElement::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        FieldElement::zero(&self.field)
    }
    fn one_like(&self) -> Self {
        FieldElement::one(&self.field)
    }
    fn plus(&self, o: &Self) -> Self {
        FieldElement::add(self, o).expect("field mismatch in linear algebra")
    }
    fn minus(&self, o: &Self) -> Self {
        FieldElement::sub(self, o).expect("field mismatch in linear algebra")
    }
    fn times(&self, o: &Self) -> Self {
        FieldElement::mul(self, o).expect("field mismatch in linear algebra")
    }
    fn over(&self, o: &Self) -> Self {
        FieldElement::div(self, o).expect("division by zero in linear algebra")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use proptest::prelude::*;

    fn sqrt2() -> Arc<NumberField> {
        NumberField::from_i64(&[-2, 0, 1]).unwrap()
    }

    fn el(f: &Arc<NumberField>, c: &[(i64, i64)]) -> FieldElement {
        FieldElement::new(f, c.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    #[test]
    fn construction() {
        let f = sqrt2();
        assert_eq!(f.degree(), 2);
        assert_eq!(f.poly_disc(), &BigInt::from(8));
        let g = NumberField::from_i64(&[1, 0, 1]).unwrap();
        assert_eq!(g.poly_disc(), &BigInt::from(-4));
        assert_eq!(NumberField::from_i64(&[-4, 0, 1]), Err(Error::Reducible));
        assert_eq!(NumberField::from_i64(&[-2, 0, 2]), Err(Error::NonMonic));
        assert!(NumberField::from_i64(&[5]).is_err());
        assert!(NumberField::rationals().is_rationals());
    }

    #[test]
    fn small_identities() {
        let f = sqrt2();
        let a = el(&f, &[(1, 1), (1, 1)]);
        let b = el(&f, &[(1, 1), (-1, 1)]);
        assert_eq!(a.mul(&b).unwrap(), FieldElement::from_int(&f, -1));
        let t = FieldElement::theta(&f);
        assert_eq!(t.mul(&t).unwrap(), FieldElement::from_int(&f, 2));
        assert_eq!(FieldElement::one(&f).div(&t).unwrap(), el(&f, &[(0, 1), (1, 2)]));
        assert_eq!(t.div(&FieldElement::zero(&f)), Err(Error::DivisionByZero));
        let other = FieldElement::theta(&NumberField::from_i64(&[1, 0, 1]).unwrap());
        assert_eq!(t.add(&other), Err(Error::FieldMismatch));
    }

    #[test]
    fn norms_and_charpolys() {
        let f = sqrt2();
        assert_eq!(el(&f, &[(1, 1), (1, 1)]).norm(), int(-1));
        assert_eq!(el(&f, &[(3, 1), (1, 1)]).norm(), int(7));
        let cp = FieldElement::theta(&f).charpoly_norm();
        assert_eq!(cp.charpoly, QPoly::from_i64(&[-2, 0, 1]));
        assert_eq!(cp.trace, int(0));
        let cubic = NumberField::from_i64(&[-2, 0, 0, 1]).unwrap();
        let cp3 = FieldElement::theta(&cubic).charpoly_norm();
        assert_eq!(cp3.charpoly, QPoly::from_i64(&[-2, 0, 0, 1]));
        assert_eq!(cp3.norm, int(2));
        assert_eq!(FieldElement::from_int(&cubic, 3).norm(), int(27));
    }

    fn arb_elem(f: Arc<NumberField>) -> impl Strategy<Value = FieldElement> {
        let d = f.degree();
        prop::collection::vec((-30i64..30, 1i64..8), d)
            .prop_map(move |v| el(&f, &v))
    }

    fn fields() -> impl Strategy<Value = Arc<NumberField>> {
        prop_oneof![
            Just(sqrt2()),
            Just(NumberField::from_i64(&[1, 0, 1]).unwrap()),
            Just(NumberField::from_i64(&[-2, 0, 0, 1]).unwrap()),
            Just(NumberField::from_i64(&[1, 1, 1, 1, 1]).unwrap()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn field_axioms((a, b, c) in fields().prop_flat_map(|f| (arb_elem(f.clone()), arb_elem(f.clone()), arb_elem(f)))) {
            prop_assert_eq!(a.mul(&b).unwrap().norm(), a.norm() * b.norm());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            if !a.is_zero() {
                prop_assert_eq!(a.mul(&a.inverse().unwrap()).unwrap(), FieldElement::one(a.field()));
            }
        }

        #[test]
        fn theta_charpoly_is_min_poly(f in fields()) {
            let cp = FieldElement::theta(&f).charpoly_norm();
            prop_assert_eq!(cp.charpoly, f.poly().clone());
        }
    }
}
