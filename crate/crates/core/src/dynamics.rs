//! Point dynamics of automorphisms: orbits, exhaustive cycle decompositions
//! over 𝔽_p, low-period points of Hénon maps, orbital exponents and the
//! curve through a finite point set.
//!
//! Direction convention: a map α acts on points by φ_α(a) = (α(x_1)(a), …, α(x_t)(a)).
//! The maximal ideal m_a then satisfies α(m_a) = m_{φ_α^{-1}(a)}, so point
//! orbits and ideal orbits have the same sizes.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::automorph::{AlgebraMap, MapClass};
use crate::error::{precondition, Error, Result};
use crate::linalg::Matrix;
use crate::poly::{CoeffRing, Monomial, MultiPoly, RingKind};
use crate::scalars::{inv_mod, mul_mod, pow_mod, FieldSpec, Scalar, UniPoly};

pub type Point = Vec<Scalar>;

/// Largest number of points scanned by [`periodic_points_ff`] unless overridden.
pub const DEFAULT_FF_POINT_CAP: u64 = 4_000_000;
/// Search cap handed to root finding over 𝔽_p.
pub const ROOT_SEARCH_CAP: u64 = 1_000_000;

/// φ_α as an evaluable map on K^t.
#[derive(Clone, Debug)]
pub struct PointMap {
    map: AlgebraMap,
}

pub fn point_map(alpha: &AlgebraMap) -> Result<PointMap> {
    match alpha.ring().kind() {
        RingKind::Polynomial | RingKind::Laurent => Ok(PointMap { map: alpha.clone() }),
        _ => precondition("point maps are defined on polynomial and Laurent rings"),
    }
}

impl PointMap {
    pub fn map(&self) -> &AlgebraMap {
        &self.map
    }

    pub fn eval(&self, a: &[Scalar]) -> Result<Point> {
        let ring = self.map.ring();
        if a.len() != ring.arity() {
            return precondition(format!("point has {} coordinates, ring has {} variables", a.len(), ring.arity()));
        }
        if ring.is_laurent() && a.iter().any(Scalar::is_zero) {
            return precondition("Laurent points need nonzero coordinates");
        }
        self.map.images().iter().map(|p| p.eval(a)).collect()
    }

    /// φ_α^{-1}, available when α carries an inverse.
    pub fn inverse(&self) -> Result<PointMap> {
        Ok(PointMap { map: self.map.inverse()? })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum OrbitStatus {
    Periodic { period: u64 },
    OpenBeyond { bound: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointOrbit {
    pub seed: Point,
    /// seed, φ(seed), …; exactly `period` entries when periodic.
    pub points: Vec<Point>,
    pub status: OrbitStatus,
}

/// Iterates φ_α from the seed until the first return or `max_steps` steps.
pub fn orbit(seed: &[Scalar], alpha: &AlgebraMap, max_steps: u64) -> Result<PointOrbit> {
    let phi = point_map(alpha)?;
    let seed = seed.to_vec();
    let mut points = vec![seed.clone()];
    let mut cur = seed.clone();
    for step in 1..=max_steps {
        cur = phi.eval(&cur)?;
        if cur == seed {
            return Ok(PointOrbit { seed, points, status: OrbitStatus::Periodic { period: step } });
        }
        if step < max_steps {
            points.push(cur.clone());
        }
    }
    Ok(PointOrbit { seed, points, status: OrbitStatus::OpenBeyond { bound: max_steps } })
}

/// Coefficients and exponent vectors reduced to u64 arithmetic mod p.
struct FpEvaluator {
    p: u64,
    images: Vec<Vec<(u64, Vec<i32>)>>,
}

impl FpEvaluator {
    fn new(alpha: &AlgebraMap, p: u64) -> Result<FpEvaluator> {
        let images = alpha
            .images()
            .iter()
            .map(|f| {
                f.terms()
                    .map(|(m, c)| {
                        let c = c.as_residue().ok_or_else(|| Error::Invariant("non-residue coefficient".into()))?;
                        Ok((c, m.exps().to_vec()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FpEvaluator { p, images })
    }

    fn eval(&self, a: &[u64]) -> Vec<u64> {
        let p = self.p;
        self.images
            .iter()
            .map(|terms| {
                terms.iter().fold(0u64, |acc, (c, e)| {
                    let mut v = *c;
                    for (ai, &ei) in a.iter().zip(e) {
                        let base = if ei < 0 { inv_mod(*ai, p) } else { *ai };
                        v = mul_mod(v, pow_mod(base, ei.unsigned_abs() as u64, p), p);
                    }
                    (acc + v) % p
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleRecord {
    pub length: u64,
    /// Smallest point of the cycle in base-p index order.
    pub representative: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleDecomposition {
    pub p: u64,
    pub points: u64,
    pub cycles: Vec<CycleRecord>,
    /// cycle length ↦ number of cycles
    pub histogram: BTreeMap<u64, u64>,
}

/// Partitions the 𝔽_p-points (nonzero coordinates on a Laurent ring) into φ_α-cycles.
pub fn periodic_points_ff(alpha: &AlgebraMap, cap: u64) -> Result<CycleDecomposition> {
    let ring = alpha.ring();
    let FieldSpec::PrimeField(p) = *ring.field() else {
        return precondition("exhaustive cycle scans need a prime field");
    };
    point_map(alpha)?;
    let t = ring.arity() as u32;
    let laurent = ring.is_laurent();
    let side = if laurent { p - 1 } else { p };
    let total = side
        .checked_pow(t)
        .filter(|&n| n <= cap)
        .ok_or_else(|| Error::BoundExceeded(format!("{side}^{t} points exceed the scan cap {cap}")))?;
    let offset = u64::from(laurent);
    let decode = |mut idx: u64| -> Vec<u64> {
        (0..t)
            .map(|_| {
                let c = idx % side + offset;
                idx /= side;
                c
            })
            .collect()
    };
    let encode = |a: &[u64]| -> u64 { a.iter().rev().fold(0u64, |acc, &c| acc * side + (c - offset)) };
    let ev = FpEvaluator::new(alpha, p)?;
    let next: Vec<u64> = (0..total)
        .into_par_iter()
        .map(|i| {
            let img = ev.eval(&decode(i));
            if laurent && img.contains(&0) {
                u64::MAX
            } else {
                encode(&img)
            }
        })
        .collect();
    let mut hit = vec![false; total as usize];
    for &j in &next {
        if j == u64::MAX || std::mem::replace(&mut hit[j as usize], true) {
            return precondition("φ is not a bijection on the point set");
        }
    }
    let mut seen = vec![false; total as usize];
    let mut cycles = Vec::new();
    let mut histogram = BTreeMap::new();
    for i in 0..total {
        if seen[i as usize] {
            continue;
        }
        let mut len = 0;
        let mut j = i;
        while !seen[j as usize] {
            seen[j as usize] = true;
            len += 1;
            j = next[j as usize];
        }
        cycles.push(CycleRecord { length: len, representative: decode(i) });
        *histogram.entry(len).or_insert(0) += 1;
    }
    Ok(CycleDecomposition { p, points: total, cycles, histogram })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolicPoints {
    pub period: u32,
    /// Univariate condition whose roots parametrize the points.
    pub condition: String,
    /// The variable of `condition`: "x" for period 1 (point (x, x)), "b" for the
    /// second coordinate of a 2-periodic point (a, b).
    pub variable: String,
    /// K-rational points of period dividing `period`, when root extraction succeeds.
    pub points: Option<Vec<Point>>,
}

/// Points with φ^k(a, b) = (a, b), k ∈ {1, 2}, for x ↦ y, y ↦ λx + β(y).
pub fn fixed_points_symbolic(alpha: &AlgebraMap, period: u32) -> Result<SymbolicPoints> {
    let MapClass::GeneralizedHenon { lambda, beta } = alpha.class() else {
        return precondition("symbolic periodic points need a generalized Hénon map");
    };
    let field = alpha.ring().field().clone();
    let t = UniPoly::monomial(&field, 1);
    match period {
        1 => {
            // a = b and λa + β(a) = a
            let cond = t.scale(lambda).add(beta).sub(&t);
            let points = roots(&cond).map(|rs| rs.into_iter().map(|r| vec![r.clone(), r]).collect());
            Ok(SymbolicPoints { period, condition: render(&cond, "x"), variable: "x".into(), points })
        }
        2 => {
            // φ²(a, b) = (λa + β(b), λb + β(λa + β(b))), so (1 − λ)a = β(b) and (1 − λ)b = β(a).
            let one_minus = &Scalar::one(&field) - lambda;
            if one_minus.is_zero() {
                let points = roots(beta).map(|rs| {
                    let mut out = Vec::new();
                    for a in &rs {
                        for b in &rs {
                            out.push(vec![a.clone(), b.clone()]);
                        }
                    }
                    out
                });
                return Ok(SymbolicPoints { period, condition: render(beta, "b"), variable: "b".into(), points });
            }
            let inv = one_minus.inv()?;
            let a_of_b = beta.scale(&inv);
            let cond = compose_uni(beta, &a_of_b).sub(&t.scale(&one_minus));
            let points = roots(&cond).map(|rs| rs.into_iter().map(|b| vec![a_of_b.eval(&b), b]).collect());
            Ok(SymbolicPoints { period, condition: render(&cond, "b"), variable: "b".into(), points })
        }
        _ => Err(Error::Unsupported(format!("period {period}; only 1 and 2 are handled symbolically"))),
    }
}

fn roots(p: &UniPoly) -> Option<Vec<Scalar>> {
    if p.is_zero() {
        return None;
    }
    p.roots_in_field(ROOT_SEARCH_CAP)
}

fn render(p: &UniPoly, var: &str) -> String {
    p.to_string().replace('t', var)
}

/// f(g(t)).
fn compose_uni(f: &UniPoly, g: &UniPoly) -> UniPoly {
    let field = f.field().clone();
    f.coeffs().iter().rev().fold(UniPoly::zero(&field), |acc, c| acc.mul(g).add(&UniPoly::new(&field, vec![c.clone()])))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitalReport {
    /// Nonzero m with |m| ≤ bound and φ^m(P_i) ∈ 𝒫 for some i.
    pub exceptional: Vec<i64>,
    pub n: u64,
    pub bound: u64,
    pub bound_relative: bool,
}

/// n = 1 + max|E| for the finite set 𝒫 of seeds, relative to `bound`.
pub fn orbital_exponent(seeds: &[Point], alpha: &AlgebraMap, bound: u64) -> Result<OrbitalReport> {
    let fwd = point_map(alpha)?;
    let back = fwd.inverse()?;
    let set: HashSet<&Point> = seeds.iter().collect();
    let mut exceptional = BTreeSet::new();
    for seed in seeds {
        for (phi, sign) in [(&fwd, 1i64), (&back, -1i64)] {
            let mut cur = seed.clone();
            for m in 1..=bound {
                cur = phi.eval(&cur)?;
                if cur == *seed {
                    return precondition(format!("seed {} is periodic, so its orbit is finite", fmt_point(seed)));
                }
                if set.contains(&cur) {
                    exceptional.insert(sign * m as i64);
                }
            }
        }
    }
    let n = 1 + exceptional.iter().map(|m: &i64| m.unsigned_abs()).max().unwrap_or(0);
    Ok(OrbitalReport { exceptional: exceptional.into_iter().collect(), n, bound, bound_relative: true })
}

pub fn fmt_point(p: &[Scalar]) -> String {
    let parts: Vec<String> = p.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Monomials x^i y^j with i + j ≤ d in the order 1, x, y, x², xy, y², …
pub fn curve_monomials(d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for total in 0..=d as i32 {
        for j in 0..=total {
            out.push(Monomial::new(vec![total - j, j]));
        }
    }
    out
}

/// A nonzero polynomial of degree ≤ d vanishing at every point, taken from the
/// first free column of the evaluation matrix and made monic; `None` when the
/// matrix has full column rank.
pub fn curve_membership(ring: &Arc<CoeffRing>, points: &[Point], d: u32) -> Result<Option<MultiPoly>> {
    if ring.arity() != 2 || !matches!(ring.kind(), RingKind::Polynomial) {
        return precondition("curves live in a two-variable polynomial ring");
    }
    if d == 0 {
        return precondition("degree bound must be at least 1");
    }
    let distinct: HashSet<&Point> = points.iter().collect();
    if distinct.len() != points.len() {
        return precondition("points must be distinct");
    }
    let field = ring.field();
    let monos = curve_monomials(d);
    let rows: Vec<Vec<Scalar>> = points
        .iter()
        .map(|pt| {
            monos
                .iter()
                .map(|m| {
                    let e = m.exps();
                    &pt[0].pow_u(e[0] as u64) * &pt[1].pow_u(e[1] as u64)
                })
                .collect()
        })
        .collect();
    let null = if rows.is_empty() {
        vec![{
            let mut v = vec![Scalar::zero(field); monos.len()];
            v[0] = Scalar::one(field);
            v
        }]
    } else {
        Matrix::from_rows(field, rows).nullspace()
    };
    let Some(v) = null.into_iter().next() else { return Ok(None) };
    let f = MultiPoly::from_terms(ring, monos.into_iter().zip(v))?.monic();
    for pt in points {
        if !f.eval(pt)?.is_zero() {
            return Err(Error::Invariant(format!("curve {f} misses {}", fmt_point(pt))));
        }
    }
    Ok(Some(f))
}

/// Rationals p/q in lowest terms with |p| ≤ h and 1 ≤ q ≤ h, sorted.
pub fn rationals_of_height(h: u64) -> Vec<BigRational> {
    let mut set = BTreeSet::new();
    for q in 1..=h as i64 {
        for p in -(h as i64)..=h as i64 {
            set.insert(BigRational::new(BigInt::from(p), BigInt::from(q)));
        }
    }
    set.into_iter().collect()
}

/// Periodic orbits (period ≤ max_period) through points of height ≤ h, one
/// orbit per cycle. A probe; it never claims completeness.
pub fn rational_periodic_search(alpha: &AlgebraMap, h: u64, max_period: u64) -> Result<Vec<PointOrbit>> {
    let ring = alpha.ring();
    if ring.field() != &FieldSpec::Rationals {
        return precondition("height search runs over Q");
    }
    let coords: Vec<Scalar> = rationals_of_height(h)
        .iter()
        .map(|r| Scalar::from_rational(ring.field(), r))
        .collect::<std::result::Result<_, _>>()?;
    let t = ring.arity();
    let mut grid: Vec<Point> = vec![vec![]];
    for _ in 0..t {
        grid = grid
            .into_iter()
            .flat_map(|pt| {
                coords.iter().filter(|c| !(ring.is_laurent() && c.is_zero())).map(move |c| {
                    let mut q = pt.clone();
                    q.push(c.clone());
                    q
                })
            })
            .collect();
    }
    let found: Vec<PointOrbit> = grid
        .par_iter()
        .filter_map(|pt| orbit(pt, alpha, max_period).ok())
        .filter(|o| matches!(o.status, OrbitStatus::Periodic { .. }))
        .collect();
    let mut seen: HashSet<Point> = HashSet::new();
    let mut out = Vec::new();
    for o in found {
        if seen.contains(&o.seed) {
            continue;
        }
        let rep = o.points.iter().min().expect("nonempty").clone();
        if rep != o.seed {
            continue;
        }
        seen.extend(o.points.iter().cloned());
        out.push(o);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn field_ring(field: &FieldSpec) -> (Arc<CoeffRing>, MultiPoly, MultiPoly) {
        let r = CoeffRing::polynomial(field, &["x", "y"]);
        (r.clone(), MultiPoly::var(&r, 0), MultiPoly::var(&r, 1))
    }

    fn henon(field: &FieldSpec, lambda: i64, beta: &[i64]) -> AlgebraMap {
        let (r, _, _) = field_ring(field);
        AlgebraMap::henon(&r, &Scalar::from_int(field, lambda), &UniPoly::from_ints(field, beta)).unwrap()
    }

    fn pt(field: &FieldSpec, v: &[i64]) -> Point {
        v.iter().map(|&c| Scalar::from_int(field, c)).collect()
    }

    #[test]
    fn point_map_examples() {
        let q = FieldSpec::Rationals;
        let h = henon(&q, 1, &[0, 0, 1]);
        assert_eq!(point_map(&h).unwrap().eval(&pt(&q, &[2, 3])).unwrap(), pt(&q, &[3, 11]));
        let (r, _, _) = field_ring(&q);
        let id = AlgebraMap::identity(&r);
        assert_eq!(point_map(&id).unwrap().eval(&pt(&q, &[2, 3])).unwrap(), pt(&q, &[2, 3]));
        let l = CoeffRing::laurent(&q, &["x", "y"]);
        let j = AlgebraMap::monomial(&l, &[vec![-1, 1], vec![1, 0]]).unwrap();
        let phi = point_map(&j).unwrap();
        let half = Scalar::from_int(&q, 3).try_div(&Scalar::from_int(&q, 2)).unwrap();
        assert_eq!(phi.eval(&pt(&q, &[2, 3])).unwrap(), vec![half, Scalar::from_int(&q, 2)]);
        assert!(phi.eval(&pt(&q, &[0, 3])).is_err());
    }

    #[test]
    fn orbit_examples() {
        let f2 = FieldSpec::prime(2).unwrap();
        let h = henon(&f2, 1, &[0, 0, 1]);
        let o = orbit(&pt(&f2, &[0, 1]), &h, 10).unwrap();
        assert_eq!(o.status, OrbitStatus::Periodic { period: 3 });
        assert_eq!(o.points, vec![pt(&f2, &[0, 1]), pt(&f2, &[1, 1]), pt(&f2, &[1, 0])]);
        assert_eq!(orbit(&pt(&f2, &[0, 0]), &h, 10).unwrap().status, OrbitStatus::Periodic { period: 1 });
        let q = FieldSpec::Rationals;
        let r = CoeffRing::polynomial(&q, &["x"]);
        let tr = AlgebraMap::from_images(&r, vec![&MultiPoly::var(&r, 0) + &MultiPoly::one(&r)]).unwrap();
        assert_eq!(orbit(&pt(&q, &[0]), &tr, 20).unwrap().status, OrbitStatus::OpenBeyond { bound: 20 });
    }

    #[test]
    fn cycle_examples() {
        let f2 = FieldSpec::prime(2).unwrap();
        let d = periodic_points_ff(&henon(&f2, 1, &[0, 0, 1]), DEFAULT_FF_POINT_CAP).unwrap();
        assert_eq!(d.histogram, BTreeMap::from([(1, 1), (3, 1)]));
        let f3 = FieldSpec::prime(3).unwrap();
        let (r3, _, _) = field_ring(&f3);
        let d = periodic_points_ff(&AlgebraMap::identity(&r3), DEFAULT_FF_POINT_CAP).unwrap();
        assert_eq!(d.histogram, BTreeMap::from([(1, 9)]));
        let d = periodic_points_ff(&henon(&f3, 1, &[0, 0, 1]), DEFAULT_FF_POINT_CAP).unwrap();
        assert_eq!(d.histogram.iter().map(|(l, c)| l * c).sum::<u64>(), 9);
        assert!(periodic_points_ff(&henon(&f3, 1, &[0, 0, 1]), 5).is_err());
    }

    #[test]
    fn symbolic_examples() {
        let q = FieldSpec::Rationals;
        let s1 = fixed_points_symbolic(&henon(&q, 1, &[0, 0, 1]), 1).unwrap();
        assert_eq!(s1.condition, "x^2");
        assert_eq!(s1.points, Some(vec![pt(&q, &[0, 0])]));
        let s1 = fixed_points_symbolic(&henon(&q, 1, &[-1, 0, 1]), 1).unwrap();
        let mut pts = s1.points.unwrap();
        pts.sort();
        assert_eq!(pts, vec![pt(&q, &[-1, -1]), pt(&q, &[1, 1])]);
        let f2 = FieldSpec::prime(2).unwrap();
        let s2 = fixed_points_symbolic(&henon(&f2, 1, &[0, 0, 1]), 2).unwrap();
        assert_eq!(s2.points, Some(vec![pt(&f2, &[0, 0])]));
        assert!(fixed_points_symbolic(&henon(&q, 1, &[0, 0, 1]), 3).is_err());
    }

    #[test]
    fn orbital_examples() {
        let q = FieldSpec::Rationals;
        let r = CoeffRing::polynomial(&q, &["x"]);
        let tr = AlgebraMap::from_images(&r, vec![&MultiPoly::var(&r, 0) + &MultiPoly::one(&r)]).unwrap();
        let rep = orbital_exponent(&[pt(&q, &[0]), pt(&q, &[3])], &tr, 50).unwrap();
        assert_eq!((rep.exceptional.clone(), rep.n), (vec![-3, 3], 4));
        assert_eq!(orbital_exponent(&[pt(&q, &[0])], &tr, 50).unwrap().n, 1);
        let rep = orbital_exponent(&[pt(&q, &[0]), pt(&q, &[1]), pt(&q, &[5])], &tr, 50).unwrap();
        assert_eq!(rep.exceptional, vec![-5, -4, -1, 1, 4, 5]);
        assert_eq!(rep.n, 6);
        let neg = AlgebraMap::from_images(&r, vec![-MultiPoly::var(&r, 0)]).unwrap();
        assert!(orbital_exponent(&[pt(&q, &[1])], &neg, 10).is_err());
    }

    #[test]
    fn curve_examples() {
        let q = FieldSpec::Rationals;
        let (r, x, y) = field_ring(&q);
        let c = curve_membership(&r, &[pt(&q, &[0, 0]), pt(&q, &[1, 1]), pt(&q, &[2, 4])], 2).unwrap();
        assert_eq!(c, Some(&x.pow(2) - &y));
        assert_eq!(curve_membership(&r, &[pt(&q, &[0, 0]), pt(&q, &[1, 0]), pt(&q, &[0, 1])], 1).unwrap(), None);
        assert!(curve_membership(&r, &[pt(&q, &[0, 0]), pt(&q, &[0, 0])], 1).is_err());
    }

    #[test]
    fn rational_search_finds_fixed_point() {
        let q = FieldSpec::Rationals;
        let found = rational_periodic_search(&henon(&q, 1, &[-1, 0, 1]), 2, 4).unwrap();
        let seeds: Vec<Point> = found.iter().map(|o| o.seed.clone()).collect();
        assert!(seeds.contains(&pt(&q, &[1, 1])));
        assert!(seeds.contains(&pt(&q, &[-1, -1])));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn cycles_partition_and_fixed_points_agree(pi in 0usize..4, lambda in 1i64..5, b in prop::collection::vec(0i64..5, 3..5)) {
            let p = [2u64, 3, 5, 7][pi];
            let f = FieldSpec::prime(p).unwrap();
            prop_assume!(lambda as u64 % p != 0);
            prop_assume!(b.last().copied().unwrap_or(0) as u64 % p != 0);
            let h = henon(&f, lambda, &b);
            let d = periodic_points_ff(&h, DEFAULT_FF_POINT_CAP).unwrap();
            prop_assert_eq!(d.histogram.iter().map(|(l, c)| l * c).sum::<u64>(), p * p);
            let sym = fixed_points_symbolic(&h, 1).unwrap();
            if let Some(pts) = sym.points {
                prop_assert_eq!(pts.len() as u64, d.histogram.get(&1).copied().unwrap_or(0));
            }
            for c in d.cycles.iter().take(5) {
                let seed: Point = c.representative.iter().map(|&v| Scalar::from_int(&f, v as i64)).collect();
                let o = orbit(&seed, &h, c.length + 1).unwrap();
                prop_assert_eq!(o.status, OrbitStatus::Periodic { period: c.length });
            }
        }

        #[test]
        fn curve_vanishes(pts in prop::collection::btree_set((-4i64..=4, -4i64..=4), 1..7), d in 1u32..4) {
            let q = FieldSpec::Rationals;
            let (r, _, _) = field_ring(&q);
            let pts: Vec<Point> = pts.into_iter().map(|(a, b)| pt(&q, &[a, b])).collect();
            let found = curve_membership(&r, &pts, d).unwrap();
            if pts.len() < curve_monomials(d).len() {
                prop_assert!(found.is_some());
            }
            if let Some(f) = found {
                for p in &pts {
                    prop_assert!(f.eval(p).unwrap().is_zero());
                }
            }
        }
    }
}
