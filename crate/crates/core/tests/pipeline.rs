//! Cross-module scenarios: maps built once and pushed through several engines.

use std::sync::Arc;

use skew_core::automorph::{AlgebraMap, OrderVerdict};
use skew_core::diamond::{decide, primitivity_probe, DecideOptions, Outcome, ProbeOutcome, ProbeSearch, RuleId};
use skew_core::dynamics::{orbital_exponent, periodic_points_ff, point_map, DEFAULT_FF_POINT_CAP};
use skew_core::poly::{quotient_ring, CoeffRing, MultiPoly, QuotientSpec};
use skew_core::scalars::{FieldSpec, Scalar};
use skew_core::skew::{Membership, PolyContext, SkewRing};
use skew_core::Error;

fn plane(field: &FieldSpec) -> (Arc<CoeffRing>, MultiPoly, MultiPoly) {
    let r = CoeffRing::polynomial(field, &["x", "y"]);
    let (x, y) = (MultiPoly::var(&r, 0), MultiPoly::var(&r, 1));
    (r, x, y)
}

fn henon() -> AlgebraMap {
    let (r, x, y) = plane(&FieldSpec::Rationals);
    AlgebraMap::from_images(&r, vec![y.clone(), &x + &y.pow(2)]).unwrap()
}

#[test]
fn reduction_agrees_with_direct_construction() {
    let reduced = henon().reduce_mod_p(3).unwrap().expect("Hénon map reduces mod 3");
    let (r3, x, y) = plane(&FieldSpec::prime(3).unwrap());
    let direct = AlgebraMap::from_images(&r3, vec![y.clone(), &x + &y.pow(2)]).unwrap();
    assert_eq!(reduced.images(), direct.images());
    let a = periodic_points_ff(&reduced, DEFAULT_FF_POINT_CAP).unwrap();
    let b = periodic_points_ff(&direct, DEFAULT_FF_POINT_CAP).unwrap();
    assert_eq!(a, b);
    // a coefficient with 3 in the denominator has no reduction
    let (r, x, y) = plane(&FieldSpec::Rationals);
    let third = Scalar::from_rational(&FieldSpec::Rationals, &num_rational::BigRational::new(1.into(), 3.into())).unwrap();
    let bad = AlgebraMap::from_images(&r, vec![y.clone(), &x + &y.pow(2).scale(&third)]).unwrap();
    assert!(bad.reduce_mod_p(3).unwrap().is_none());
}

#[test]
fn point_map_inverts() {
    let alpha = henon();
    let phi = point_map(&alpha).unwrap();
    let back = phi.inverse().unwrap();
    let q = FieldSpec::Rationals;
    let p = vec![Scalar::from_int(&q, 2), Scalar::from_int(&q, -5)];
    assert_eq!(back.eval(&phi.eval(&p).unwrap()).unwrap(), p);
    // φ(1, 0) = (0, 1), so the pair is exceptional at m = ±1 only
    let pt = |a, b| vec![Scalar::from_int(&q, a), Scalar::from_int(&q, b)];
    let rep = orbital_exponent(&[pt(1, 0), pt(0, 1)], &alpha, 6).unwrap();
    assert_eq!(rep.exceptional, vec![-1, 1]);
    assert_eq!(rep.n, 2);
    // periodic seeds have finite orbits and are rejected
    assert!(matches!(orbital_exponent(&[pt(0, 0)], &alpha, 4), Err(Error::Precondition(_))));
    assert!(rep.bound_relative);
}

#[test]
fn probe_then_certificate_then_decide() {
    let alpha = henon();
    let report = primitivity_probe(&alpha, &ProbeSearch { primes: vec![2], ..ProbeSearch::default() }).unwrap();
    assert!(matches!(report.outcome, ProbeOutcome::CurveFound | ProbeOutcome::NoCurveFound { .. } | ProbeOutcome::Vacuous));
    assert_eq!(report.reductions.len(), 1);

    let open = decide(&alpha, &DecideOptions::default()).unwrap();
    assert_eq!(open.outcome, Outcome::Unknown);
    let certified = DecideOptions {
        primitivity: Some(skew_core::diamond::PrimitivityCertificate { primitive: true, source: "test".into() }),
        ..DecideOptions::default()
    };
    let closed = decide(&alpha, &certified).unwrap();
    assert_eq!(closed.outcome, Outcome::Fails);
    assert_eq!(closed.rules(), vec![RuleId::R5, RuleId::R8]);
}

#[test]
fn induced_map_on_quotient_keeps_finite_order() {
    let q = FieldSpec::Rationals;
    let r = CoeffRing::polynomial(&q, &["x"]);
    let x = MultiPoly::var(&r, 0);
    let alpha = AlgebraMap::from_images(&r, vec![-&x]).unwrap();
    let modulus = &x.pow(2) + &MultiPoly::one(&r);
    let qm = quotient_ring(&r, QuotientSpec::Univariate(modulus)).unwrap();
    let induced = alpha.induced(&qm).unwrap();
    assert_eq!(induced.order(16).unwrap(), OrderVerdict::Finite { n: 2 });
    let v = decide(&induced, &DecideOptions::default()).unwrap();
    assert_eq!(v.outcome, Outcome::Holds);
    assert_eq!(v.decided_by(), RuleId::R1);
}

#[test]
fn membership_matches_multiplication() {
    let q = FieldSpec::Rationals;
    let r = CoeffRing::polynomial(&q, &["x"]);
    let x = MultiPoly::var(&r, 0);
    let alpha = AlgebraMap::from_images(&r, vec![x.scale(&Scalar::from_int(&q, 3))]).unwrap();
    let sr = SkewRing::new(PolyContext::new(alpha), false).unwrap();
    let g = sr.from_terms([(0, MultiPoly::one(&r)), (1, -&x)]).unwrap();
    let h = sr.from_terms([(0, &x + &MultiPoly::one(&r)), (2, x.pow(2))]).unwrap();
    let f = sr.mul(&g, &h).unwrap();
    match sr.membership_one_minus_a_theta(&f, &x).unwrap() {
        Membership::Member(found) => assert_eq!(found, h),
        Membership::Nonmember(why) => panic!("{why}"),
    }
    let off = sr.add(&f, &sr.constant(MultiPoly::one(&r)));
    assert!(matches!(sr.membership_one_minus_a_theta(&off, &x).unwrap(), Membership::Nonmember(_)));
}

#[test]
fn laurent_skew_ring_inverts_theta() {
    let q = FieldSpec::Rationals;
    let r = CoeffRing::laurent(&q, &["x", "y"]);
    let alpha = AlgebraMap::monomial(&r, &[vec![2, 1], vec![1, 1]]).unwrap();
    let sr = SkewRing::new(PolyContext::new(alpha.clone()), true).unwrap();
    let t = sr.theta_pow(1).unwrap();
    let ti = sr.theta_pow(-1).unwrap();
    assert_eq!(sr.mul(&t, &ti).unwrap(), sr.one());
    let x = MultiPoly::var(&r, 0);
    // θ^{-1}·x = α^{-1}(x)·θ^{-1}
    let lhs = sr.mul(&ti, &sr.constant(x.clone())).unwrap();
    let rhs = sr.term(alpha.inverse().unwrap().apply(&x).unwrap(), -1).unwrap();
    assert_eq!(lhs, rhs);
    // the polynomial ring refuses negative θ-degrees
    let poly = SkewRing::new(PolyContext::new(alpha), false).unwrap();
    assert!(matches!(poly.theta_pow(-1), Err(Error::Precondition(_))));
}
