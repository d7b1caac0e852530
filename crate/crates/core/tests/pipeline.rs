use std::sync::Arc;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use heightlab::cover::{density_report, subspace_cover, CoverMode};
use heightlab::exceptional::{exact_outcome, filter_enumerated, point_profile, InequalityKind, Outcome, SystemSpec};
use heightlab::field::{FieldElement, NumberField};
use heightlab::heights::{LinearForm, ProjectivePoint};
use heightlab::interval::Verdict;
use heightlab::places::{place, RationalPlace};
use heightlab::scattering::{fw_weights, scatter_solutions, uniform_distribution, Profile, WeightKind, WeightSystem};
use heightlab::twisted::{parametric_verdict, PlaceForms, TwistedHeightSpec};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn sqrt2() -> Arc<NumberField> {
    NumberField::from_i64(&[-2, 0, 1]).unwrap()
}

fn roth(eps: BigRational) -> SystemSpec {
    let f = sqrt2();
    let theta = FieldElement::theta(&f);
    let w = place(&f, RationalPlace::Infinity, 1, 40).unwrap();
    let forms = vec![
        LinearForm::new(&f, vec![theta.neg(), FieldElement::one(&f)]).unwrap(),
        LinearForm::coordinate(&f, 1, 0),
    ];
    SystemSpec::new(InequalityKind::Schmidt, &f, 1, vec![PlaceForms { place: w, forms, weights: vec![] }], eps, None).unwrap()
}

/// lambda_1 + lambda_2 - (2 + eps) h at [q:p] straight from |p - q sqrt2|
/// and |q| at the real place sending theta to +sqrt2.
fn brute_margin(qd: i64, p: i64, eps: f64) -> f64 {
    let r2 = std::f64::consts::SQRT_2;
    let dist = (p as f64 - qd as f64 * r2).abs();
    let h = (qd.abs().max(p.abs()) as f64).ln();
    (h - dist.ln()) + (h - (qd as f64).ln()) - (2.0 + eps) * h
}

#[test]
fn roth_filter_matches_brute_force_to_height_200() {
    let spec = roth(q(1, 10));
    let set = filter_enumerated(&spec, 200, 40, &BigRational::zero()).unwrap();
    let mut oracle = Vec::new();
    for qd in 1..=200i64 {
        for p in -200..=200i64 {
            if qd.gcd(&p) == 1 && brute_margin(qd, p, 0.1) >= 0.0 {
                oracle.push(ProjectivePoint::new(vec![qd, p]).unwrap());
            }
        }
    }
    assert_eq!(set.points, oracle);
    assert!(set.indeterminate.is_empty());
    assert_eq!(set.support, vec![ProjectivePoint::new(vec![0, 1]).unwrap()]);
    assert!(set.points.contains(&ProjectivePoint::new(vec![5, 7]).unwrap()));
    assert!(!set.points.contains(&ProjectivePoint::new(vec![5, 3]).unwrap()));
}

#[test]
fn huge_epsilon_leaves_almost_nothing() {
    let set = filter_enumerated(&roth(q(100, 1)), 100, 40, &BigRational::zero()).unwrap();
    // only height-one points can satisfy lambda sum >= 102 h
    assert!(set.points.iter().all(|x| x.mult_height() == 1));
}

#[test]
fn roth_solutions_cover_and_report() {
    let set = filter_enumerated(&roth(q(3, 10)), 100, 40, &BigRational::zero()).unwrap();
    let cover = subspace_cover(&set.points, CoverMode::Exact, None).unwrap();
    assert!(cover.verify());
    assert_eq!(cover.len(), set.points.len());
    let report = density_report(Some(&cover));
    assert_eq!(report.economy_ratio, Some(1.0));
    assert_eq!(report.point_count, set.points.len());
}

#[test]
fn roth_profiles_scatter_into_heavy_classes() {
    let eps = q(1, 10);
    let spec = roth(eps.clone());
    let set = filter_enumerated(&spec, 300, 40, &BigRational::zero()).unwrap();
    let profiles: Vec<Profile> = set
        .points
        .iter()
        .filter(|x| x.mult_height() > 1)
        .map(|x| {
            let p = point_profile(&spec, x, 40).unwrap();
            let lambda = p
                .lambda
                .iter()
                .map(|row| row.iter().map(|l| BigRational::from_float(l.lo).unwrap()).collect())
                .collect();
            Profile { point: x.clone(), lambda, h: BigRational::from_float(p.h.hi).unwrap() }
        })
        .collect();
    assert!(!profiles.is_empty());
    // rounding lambda down and h up can only lose solutions; a tiny slack
    // keeps the borderline ones
    let classes = scatter_solutions(&profiles, 1, &eps, &q(1, 1_000_000), &uniform_distribution(1)).unwrap();
    let members: usize = classes.iter().map(|c| c.members.len()).sum();
    assert_eq!(members, profiles.len());
    assert!(classes.iter().all(|c| c.sum_e > q(2, 1)));
}

/// With S = {inf} and Q = H(x), the twisted height of an FW solution is at
/// most Q^{-eps}.
#[test]
fn fw_solutions_satisfy_parametric_inequality_at_q_equal_height() {
    let f = sqrt2();
    let theta = FieldElement::theta(&f);
    let w = place(&f, RationalPlace::Infinity, 1, 40).unwrap();
    let forms = vec![
        LinearForm::new(&f, vec![theta.neg(), FieldElement::one(&f)]).unwrap(),
        LinearForm::new(&f, vec![theta.clone(), FieldElement::one(&f)]).unwrap(),
    ];
    let d_row = vec![q(6, 5), q(1, 1)];
    let d = WeightSystem::new(WeightKind::D, vec![d_row.clone()]).unwrap();
    let (eps, c) = fw_weights(&d).unwrap();
    assert_eq!(eps, q(1, 10));
    let fw = SystemSpec::new(
        InequalityKind::Fw,
        &f,
        1,
        vec![PlaceForms { place: w.clone(), forms: forms.clone(), weights: d_row }],
        eps.clone(),
        None,
    )
    .unwrap();
    let tw = TwistedHeightSpec::new(&f, 1, vec![PlaceForms { place: w, forms, weights: c.entries[0].clone() }], eps, q(1, 1)).unwrap();
    let set = filter_enumerated(&fw, 80, 40, &BigRational::zero()).unwrap();
    assert!(!set.points.is_empty());
    for x in &set.points {
        let at_h = tw.with_q(BigRational::from_integer(x.mult_height().into())).unwrap();
        assert_ne!(parametric_verdict(&at_h, x, 40, &BigRational::zero()).unwrap(), Verdict::Fails, "{x}");
        assert_eq!(exact_outcome(&fw, x, 40, &BigRational::zero()).unwrap(), Outcome::Solution);
    }
}

#[test]
fn spec_digest_tracks_the_system() {
    let a = roth(q(1, 10));
    assert_eq!(a.digest(), roth(q(1, 10)).digest());
    assert_ne!(a.digest(), roth(q(1, 5)).digest());
}
