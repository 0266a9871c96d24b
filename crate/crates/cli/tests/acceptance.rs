//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! All arithmetic is exact, so every comparison below uses equality (tolerance
//! zero). Sample sizes and the RNG seed are pinned as constants.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skew_cli::spec::parse_spec;
use skew_core::automorph::{linear_finite_order_test, AlgebraMap, OrderVerdict};
use skew_core::diamond::{decide, DecideOptions, Outcome, QuestionTag, RuleId};
use skew_core::dynamics::{curve_membership, fixed_points_symbolic, orbit, periodic_points_ff, OrbitStatus, Point, DEFAULT_FF_POINT_CAP};
use skew_core::linalg::Matrix;
use skew_core::modlab::{
    calc_identity_holds, chain_check, lattice_contract, lattice_expand, matrix_units_verify, CyclicModule, PolySkew,
    PolySkewRing, DEFAULT_CLOSURE_BOUND,
};
use skew_core::poly::{CoeffRing, Ideal, Monomial, MultiPoly};
use skew_core::scalars::{FieldSpec, Scalar};
use skew_core::skew::{PolyContext, SkewRing};

const SEED: u64 = 0x5eed_2026;
/// Exact arithmetic throughout: results must agree with the oracle exactly.
const TOLERANCE: u32 = 0;

const SKEW_TRIPLES_FP: usize = 500;
const SKEW_TRIPLES_Q: usize = 200;
const DIVISION_CASES: usize = 200;
const LATTICE_MAX_K: u32 = 5;
const CALC_IDENTITY_CASES: usize = 50;
const CHAIN_MAX_M: u32 = 10;
const LENGTH_ONE_CASES: usize = 20;
const MATRIX_UNITS_MAX_N: usize = 6;
const ORDER_RANDOM_CASES: usize = 100;
const ORDER_BRUTE_BOUND: u64 = 100;
const SPECIAL_MAX_N: u32 = 6;
const SPECIAL_MAX_K: u32 = 5;
const DETERMINISM_RUNS: usize = 3;
const MIN_FIXTURES: usize = 10;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);
/// (name, map, outcome, tag, decisive rule, rules that must also appear in the trace)
type TableRow = (&'static str, AlgebraMap, Outcome, Option<QuestionTag>, RuleId, &'static [RuleId]);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- helpers

fn q() -> FieldSpec {
    FieldSpec::Rationals
}

fn fp(p: u64) -> FieldSpec {
    FieldSpec::prime(p).unwrap()
}

fn int(field: &FieldSpec, v: i64) -> Scalar {
    Scalar::from_int(field, v)
}

fn rat(field: &FieldSpec, n: i64, d: i64) -> Scalar {
    Scalar::from_rational(field, &BigRational::new(n.into(), d.into())).unwrap()
}

fn rand_scalar(rng: &mut ChaCha8Rng, field: &FieldSpec) -> Scalar {
    let n = rng.gen_range(-4..=4);
    match field {
        FieldSpec::Rationals => rat(field, n, rng.gen_range(1..=3)),
        _ => int(field, n),
    }
}

fn uni_ring(field: &FieldSpec) -> Arc<CoeffRing> {
    CoeffRing::polynomial(field, &["x"])
}

fn x_pow(ring: &Arc<CoeffRing>, c: Scalar, k: i32) -> MultiPoly {
    MultiPoly::monomial(ring, c, Monomial::new(vec![k])).unwrap()
}

fn rand_uni(rng: &mut ChaCha8Rng, ring: &Arc<CoeffRing>, max_deg: i32) -> MultiPoly {
    let terms: Vec<_> = (0..=max_deg).map(|k| (Monomial::new(vec![k]), rand_scalar(rng, ring.field()))).collect();
    MultiPoly::from_terms(ring, terms).unwrap()
}

/// Skew ring over k[x] with α(x) = c·x.
fn scaling_ring(field: &FieldSpec, c: &Scalar) -> (Arc<CoeffRing>, PolySkewRing) {
    let ring = uni_ring(field);
    let alpha = AlgebraMap::from_images(&ring, vec![x_pow(&ring, c.clone(), 1)]).unwrap();
    let sr = SkewRing::new(PolyContext::new(alpha), false).unwrap();
    (ring, sr)
}

fn rand_skew(rng: &mut ChaCha8Rng, sr: &PolySkewRing, ring: &Arc<CoeffRing>, max_theta: i64, max_x: i32) -> PolySkew {
    let terms: Vec<_> = (0..=max_theta)
        .map(|k| {
            let d = rng.gen_range(0..=max_x);
            (k, rand_uni(rng, ring, d))
        })
        .collect();
    sr.from_terms(terms).unwrap()
}

/// b(x) ↦ b(s·x), computed coefficientwise.
fn rescale(b: &MultiPoly, s: &Scalar) -> MultiPoly {
    let ring = b.ring();
    let terms = b.terms().map(|(m, c)| (m.clone(), c.try_mul(&s.pow_u(m.exps()[0] as u64)).unwrap()));
    MultiPoly::from_terms(ring, terms.collect::<Vec<_>>()).unwrap()
}

/// Independent product in k[x][θ; x ↦ c·x]: (aθ^i)(bθ^j) = a·b(c^i x)θ^{i+j}.
fn naive_mul(sr: &PolySkewRing, ring: &Arc<CoeffRing>, c: &Scalar, f: &PolySkew, g: &PolySkew) -> PolySkew {
    let mut acc: BTreeMap<i64, MultiPoly> = BTreeMap::new();
    for (i, a) in f.terms() {
        for (j, b) in g.terms() {
            let twisted = rescale(b, &c.pow(i).unwrap());
            let e = acc.entry(i + j).or_insert_with(|| MultiPoly::zero(ring));
            *e = &*e + &(a * &twisted);
        }
    }
    sr.from_terms(acc).unwrap()
}

// ---------------------------------------------------------------- criteria

fn skew_arithmetic() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut total = 0;
    for (field, count) in [(fp(5), SKEW_TRIPLES_FP), (q(), SKEW_TRIPLES_Q)] {
        let c = int(&field, 2);
        let (ring, sr) = scaling_ring(&field, &c);
        let theta = ok(sr.theta_pow(1))?;
        for t in 0..count {
            let f = rand_skew(&mut rng, &sr, &ring, 3, 2);
            let g = rand_skew(&mut rng, &sr, &ring, 3, 2);
            let h = rand_skew(&mut rng, &sr, &ring, 2, 2);
            let fg = ok(sr.mul(&f, &g))?;
            ensure(fg == naive_mul(&sr, &ring, &c, &f, &g), || format!("{field} case {t}: product disagrees with the oracle"))?;
            let left = ok(sr.mul(&fg, &h))?;
            let right = ok(sr.mul(&f, &ok(sr.mul(&g, &h))?))?;
            ensure(left == right, || format!("{field} case {t}: (fg)h != f(gh)"))?;
            let r = rand_uni(&mut rng, &ring, 3);
            let lhs = ok(sr.mul(&theta, &sr.constant(r.clone())))?;
            let rhs = ok(sr.term(rescale(&r, &c), 1))?;
            ensure(lhs == rhs || r.is_zero(), || format!("{field} case {t}: theta*r != alpha(r)*theta"))?;
            if !f.is_zero() && !g.is_zero() {
                let want = f.degree().unwrap() + g.degree().unwrap();
                ensure(fg.degree() == Some(want), || format!("{field} case {t}: degree law fails"))?;
            }
            total += 1;
        }
    }

    // associativity for a non-diagonal map x ↦ x + 1 over Q
    let ring = uni_ring(&q());
    let shift = AlgebraMap::from_images(&ring, vec![&MultiPoly::var(&ring, 0) + &MultiPoly::one(&ring)]).unwrap();
    let sr = SkewRing::new(PolyContext::new(shift), false).unwrap();
    for t in 0..SKEW_TRIPLES_Q {
        let f = rand_skew(&mut rng, &sr, &ring, 2, 2);
        let g = rand_skew(&mut rng, &sr, &ring, 2, 2);
        let h = rand_skew(&mut rng, &sr, &ring, 2, 2);
        let left = ok(sr.mul(&ok(sr.mul(&f, &g))?, &h))?;
        let right = ok(sr.mul(&f, &ok(sr.mul(&g, &h))?))?;
        ensure(left == right, || format!("shift case {t}: (fg)h != f(gh)"))?;
    }
    Ok(format!("{total} scaling triples and {SKEW_TRIPLES_Q} shift triples"))
}

/// Remainder of Σ w_kθ^k modulo (u − θ)S for α(x) = 2x: Σ u^k·w_k(x/2^k).
fn remainder_oracle(w: &PolySkew, u: &Scalar, ring: &Arc<CoeffRing>) -> MultiPoly {
    let half = rat(ring.field(), 1, 2);
    let mut acc = MultiPoly::zero(ring);
    for (k, wk) in w.terms() {
        acc = &acc + &rescale(wk, &half.pow(k).unwrap()).scale(&u.pow(k).unwrap());
    }
    acc
}

fn division() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let field = q();
    let (ring, sr) = scaling_ring(&field, &int(&field, 2));
    for t in 0..DIVISION_CASES {
        let u = if t % 2 == 0 {
            Scalar::one(&field)
        } else {
            loop {
                let s = rand_scalar(&mut rng, &field);
                if !s.is_zero() {
                    break s;
                }
            }
        };
        let g = ok(sr.from_terms([(0, MultiPoly::constant(&ring, u.clone())), (1, -MultiPoly::one(&ring))]))?;
        let w1 = rand_skew(&mut rng, &sr, &ring, 4, 3);
        let w2 = rand_skew(&mut rng, &sr, &ring, 4, 3);
        let (h1, r1) = ok(sr.left_divide(&g, &w1))?;
        let (_, r2) = ok(sr.left_divide(&g, &w2))?;
        let (_, r12) = ok(sr.left_divide(&g, &sr.add(&w1, &w2)))?;
        ensure(sr.add(&ok(sr.mul(&g, &h1))?, &r1) == w1, || format!("case {t}: w != gh + r"))?;
        ensure(r1.degree().unwrap_or(0) == 0 && r1.low_degree().unwrap_or(0) == 0, || format!("case {t}: remainder not in R"))?;
        let r0 = r1.coeff(0).cloned().unwrap_or_else(|| MultiPoly::zero(&ring));
        ensure(r0 == remainder_oracle(&w1, &u, &ring), || format!("case {t}: remainder disagrees with the closed form"))?;
        ensure(r12 == sr.add(&r1, &r2), || format!("case {t}: remainder is not additive"))?;
        // any other quotient h + t' leaves a remainder of positive θ-degree
        let perturb = rand_skew(&mut rng, &sr, &ring, 2, 2);
        if !perturb.is_zero() {
            let other = sr.sub(&r1, &ok(sr.mul(&g, &perturb))?);
            ensure(other.degree().unwrap_or(0) >= 1, || format!("case {t}: remainder is not unique"))?;
        }
    }
    Ok(format!("{DIVISION_CASES} divisions by 1 - theta and u - theta"))
}

fn lattice() -> Check {
    let field = q();
    let (ring, sr) = scaling_ring(&field, &int(&field, 2));
    let u = Scalar::one(&field);
    for k in 1..=LATTICE_MAX_K as i32 {
        let xk = x_pow(&ring, Scalar::one(&field), k);
        let desc = ok(lattice_contract(&sr, &[sr.constant(xk.clone())], &u, DEFAULT_CLOSURE_BOUND))?;
        let want = ok(Ideal::principal(&xk))?;
        ensure(desc.ideal == want, || format!("k = {k}: contraction {} != {want}", desc.ideal))?;
        // α(x^k) = 2^k x^k, so (x^k) is α-stable
        ensure(ok(want.contains(&rescale(&xk, &int(&field, 2))))?, || format!("k = {k}: (x^k) not stable"))?;
        let again = ok(lattice_contract(&sr, &ok(lattice_expand(&sr, &desc))?, &u, DEFAULT_CLOSURE_BOUND))?;
        ensure(again == desc, || format!("k = {k}: expand/contract is not idempotent"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let two = int(&field, 2);
    let half = rat(&field, 1, 2);
    for t in 0..CALC_IDENTITY_CASES {
        let r = rand_uni(&mut rng, &ring, 4);
        let uu = if t % 2 == 0 { u.clone() } else { rat(&field, rng.gen_range(1..=5), rng.gen_range(1..=3)) };
        ensure(ok(calc_identity_holds(&sr, &uu, &r))?, || format!("calc identity fails for r = {r}"))?;
        // same identity through the independent product
        let g = ok(sr.from_terms([(0, MultiPoly::constant(&ring, uu.clone())), (1, -MultiPoly::one(&ring))]))?;
        let back = rescale(&r, &half);
        let rhs = sr.add(&sr.neg(&naive_mul(&sr, &ring, &two, &g, &sr.constant(back.clone()))), &sr.constant(back.scale(&uu)));
        ensure(ok(sr.term(r.clone(), 1))? == rhs || r.is_zero(), || format!("oracle identity fails for r = {r}"))?;
    }
    Ok(format!("(x^k) recovered for k <= {LATTICE_MAX_K}; identity holds on {CALC_IDENTITY_CASES} samples"))
}

fn chain() -> Check {
    let plane = CoeffRing::polynomial(&q(), &["x", "y"]);
    let parabola = &MultiPoly::var(&plane, 1) - &MultiPoly::var(&plane, 0).pow(2);
    let line = uni_ring(&q());
    for (ring, rho) in [(line.clone(), MultiPoly::var(&line, 0)), (plane.clone(), parabola)] {
        let report = ok(chain_check(&ring, &rho, CHAIN_MAX_M))?;
        ensure(report.links.len() == CHAIN_MAX_M as usize, || "missing links".into())?;
        ensure(report.all_strict, || format!("chain for {rho} is not strict"))?;
        // θ^m has coefficient 1 in degree m, and 1 ∉ (ρ) since ρ is not a unit
        ensure(!ok(ok(Ideal::principal(&rho))?.contains(&MultiPoly::one(&ring)))?, || format!("{rho} is a unit"))?;
    }
    ensure(chain_check(&line, &MultiPoly::one(&line), 3).is_err(), || "unit rho accepted".into())?;
    Ok(format!("strict for m <= {CHAIN_MAX_M} with rho = x and rho = y - x^2"))
}

fn length_one() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let field = q();
    let two = int(&field, 2);
    let (ring, sr) = scaling_ring(&field, &two);
    let x = MultiPoly::var(&ring, 0);
    let module = ok(CyclicModule::new(&sr, &x))?;
    let rho_ideal = ok(Ideal::principal(&x))?;
    for t in 0..LENGTH_ONE_CASES {
        let i = rng.gen_range(0..=4i64);
        let j = rng.gen_range(0..=4i64);
        let c = loop {
            let s = rand_scalar(&mut rng, &field);
            if !s.is_zero() {
                break s;
            }
        };
        let b = rand_uni(&mut rng, &ring, 2);
        let raw = sr.add(&ok(sr.term(MultiPoly::constant(&ring, c), i))?, &ok(sr.from_terms([(j, &x * &b)]))?);
        let m = ok(module.normal_form(&raw))?;
        ensure(m.length() == 1, || format!("case {t}: length {} != 1", m.length()))?;
        let (u, image) = ok(module.sublemma2_multiplier(&m))?;
        let want = x_pow(&ring, rat(&field, 1, 1 << i), 1);
        ensure(u == want, || format!("case {t}: multiplier {u} != {want}"))?;
        ensure(image.length() == 0 && !image.is_zero(), || format!("case {t}: image not a nonzero element of V"))?;
        let prod = naive_mul(&sr, &ring, &two, &ok(module.lift(&m))?, &sr.constant(u.clone()));
        for (k, coeff) in prod.terms() {
            ensure(ok(rho_ideal.contains(coeff))?, || format!("case {t}: coefficient of theta^{k} is outside (x)"))?;
        }
    }
    Ok(format!("{LENGTH_ONE_CASES} length-1 elements mapped into V"))
}

fn matrix_units() -> Check {
    let mut checked = 0;
    for field in [q(), fp(5)] {
        for n in 1..=MATRIX_UNITS_MAX_N {
            let report = ok(matrix_units_verify(n, &field))?;
            ensure(report.all_hold, || format!("n = {n} over {field}: an identity fails"))?;
            ensure(report.checks.iter().all(|c| c.skew == c.dense), || format!("n = {n}: routes disagree"))?;
            checked += report.checks.len();
        }
    }
    Ok(format!("{checked} identities over Q and F_5 for n <= {MATRIX_UNITS_MAX_N}"))
}

fn brute_order(a: &Matrix, bound: u64) -> Option<u64> {
    let mut p = a.clone();
    for m in 1..=bound {
        if p.is_identity() {
            return Some(m);
        }
        p = p.mul(a);
    }
    None
}

fn order_engine() -> Check {
    let field = q();
    let cases: [(&[Vec<i64>], Option<u64>); 3] = [
        (&[vec![0, -1], vec![1, 0]], Some(4)),
        (&[vec![0, -1], vec![1, 1]], Some(6)),
        (&[vec![1, 1], vec![0, 1]], None),
    ];
    for (rows, want) in cases {
        let v = ok(linear_finite_order_test(&Matrix::from_ints(&field, rows)))?;
        let good = match want {
            Some(n) => v == OrderVerdict::Finite { n },
            None => matches!(v, OrderVerdict::InfiniteCertified { .. }),
        };
        ensure(good, || format!("{rows:?}: got {v}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let mut finite = 0;
    let mut sampled = 0;
    while sampled < ORDER_RANDOM_CASES {
        let e: Vec<i64> = (0..4).map(|_| rng.gen_range(-3..=3)).collect();
        if (e[0] * e[3] - e[1] * e[2]).abs() != 1 {
            continue;
        }
        sampled += 1;
        let a = Matrix::from_ints(&field, &[vec![e[0], e[1]], vec![e[2], e[3]]]);
        let v = ok(linear_finite_order_test(&a))?;
        match brute_order(&a, ORDER_BRUTE_BOUND) {
            Some(n) => {
                finite += 1;
                ensure(v == OrderVerdict::Finite { n }, || format!("{e:?}: brute force {n}, engine {v}"))?;
            }
            None => ensure(matches!(v, OrderVerdict::InfiniteCertified { .. }), || format!("{e:?}: engine {v}"))?,
        }
    }
    Ok(format!("3 named matrices and {ORDER_RANDOM_CASES} random GL_2(Z) matrices ({finite} of finite order)"))
}

/// Cycle-length histogram of (a, b) ↦ (b, a + b²) over F_p by direct iteration.
fn henon_histogram_oracle(p: u64) -> BTreeMap<u64, u64> {
    let step = |(a, b): (u64, u64)| (b, (a + b * b) % p);
    let mut seen = BTreeSet::new();
    let mut hist = BTreeMap::new();
    for a in 0..p {
        for b in 0..p {
            if seen.contains(&(a, b)) {
                continue;
            }
            let mut len = 0;
            let mut cur = (a, b);
            loop {
                seen.insert(cur);
                cur = step(cur);
                len += 1;
                if cur == (a, b) {
                    break;
                }
            }
            *hist.entry(len).or_insert(0) += 1;
        }
    }
    hist
}

fn henon_over(p: u64) -> AlgebraMap {
    let ring = CoeffRing::polynomial(&fp(p), &["x", "y"]);
    let (x, y) = (MultiPoly::var(&ring, 0), MultiPoly::var(&ring, 1));
    AlgebraMap::from_images(&ring, vec![y.clone(), &x + &y.pow(2)]).unwrap()
}

fn henon_dynamics() -> Check {
    let f2 = fp(2);
    let pt = |a: i64, b: i64| -> Point { vec![int(&f2, a), int(&f2, b)] };
    let alpha = henon_over(2);
    let dec = ok(periodic_points_ff(&alpha, DEFAULT_FF_POINT_CAP))?;
    ensure(dec.histogram == BTreeMap::from([(1, 1), (3, 1)]), || format!("F_2 histogram {:?}", dec.histogram))?;
    let fixed: Vec<_> = dec.cycles.iter().filter(|c| c.length == 1).map(|c| c.representative.clone()).collect();
    ensure(fixed == vec![vec![0, 0]], || format!("F_2 fixed points {fixed:?}"))?;
    let o = ok(orbit(&pt(0, 1), &alpha, 10))?;
    ensure(o.status == OrbitStatus::Periodic { period: 3 }, || format!("orbit status {:?}", o.status))?;
    ensure(o.points == vec![pt(0, 1), pt(1, 1), pt(1, 0)], || "3-cycle is not (0,1) -> (1,1) -> (1,0)".into())?;

    for p in [2, 3, 5] {
        let alpha = henon_over(p);
        let dec = ok(periodic_points_ff(&alpha, DEFAULT_FF_POINT_CAP))?;
        let covered: u64 = dec.histogram.iter().map(|(l, c)| l * c).sum();
        ensure(covered == p * p, || format!("F_{p}: cycles cover {covered} points"))?;
        ensure(dec.histogram == henon_histogram_oracle(p), || format!("F_{p}: histogram disagrees with direct iteration"))?;
        let scanned: BTreeSet<Vec<u64>> =
            dec.cycles.iter().filter(|c| c.length == 1).map(|c| c.representative.clone()).collect();
        let symbolic = ok(fixed_points_symbolic(&alpha, 1))?
            .points
            .ok_or_else(|| format!("F_{p}: symbolic roots not extracted"))?;
        let symbolic: BTreeSet<Vec<u64>> =
            symbolic.iter().map(|pt| pt.iter().map(|s| s.as_residue().unwrap()).collect()).collect();
        ensure(scanned == symbolic, || format!("F_{p}: fixed points {scanned:?} vs symbolic {symbolic:?}"))?;
    }
    Ok("F_2 cycles {1:1, 3:1}; F_3 and F_5 partition all points and match the symbolic fixed points".into())
}

fn curve_test() -> Check {
    let field = q();
    let ring = CoeffRing::polynomial(&field, &["x", "y"]);
    let pts = |v: &[(i64, i64)]| -> Vec<Point> { v.iter().map(|&(a, b)| vec![int(&field, a), int(&field, b)]).collect() };
    let parabola = pts(&[(0, 0), (1, 1), (2, 4)]);
    let f = ok(curve_membership(&ring, &parabola, 2))?.ok_or("no curve through the parabola points")?;
    for p in &parabola {
        ensure(ok(f.eval(p))?.is_zero(), || format!("{f} does not vanish at a sample point"))?;
    }
    let want = &MultiPoly::var(&ring, 1) - &MultiPoly::var(&ring, 0).pow(2);
    ensure(f.monic() == want.monic(), || format!("{f} is not proportional to y - x^2"))?;
    let triangle = pts(&[(0, 0), (1, 0), (0, 1)]);
    ensure(ok(curve_membership(&ring, &triangle, 1))?.is_none(), || "a line through a triangle".into())?;
    Ok(format!("found {f}; no line through (0,0), (1,0), (0,1)"))
}

fn decide_table() -> Check {
    let qq = q();
    let line = uni_ring(&qq);
    let plane = CoeffRing::polynomial(&qq, &["x", "y"]);
    let f7 = fp(7);
    let line7 = uni_ring(&f7);
    let x = MultiPoly::var(&line, 0);
    let (px, py) = (MultiPoly::var(&plane, 0), MultiPoly::var(&plane, 1));
    let laurent_f5 = CoeffRing::laurent(&fp(5), &["x", "y"]);
    let laurent_q = CoeffRing::laurent(&qq, &["x", "y"]);

    let rows: Vec<TableRow> = vec![
        ("Q[x], x+1", AlgebraMap::from_images(&line, vec![&x + &MultiPoly::one(&line)]).unwrap(), Outcome::Fails, None, RuleId::R3, &[]),
        ("Q[x], -x", AlgebraMap::from_images(&line, vec![-&x]).unwrap(), Outcome::Holds, None, RuleId::R1, &[RuleId::R3]),
        (
            "F_7[x], 3x+5",
            AlgebraMap::from_images(&line7, vec![&MultiPoly::var(&line7, 0).scale(&int(&f7, 3)) + &MultiPoly::from_int(&line7, 5)])
                .unwrap(),
            Outcome::Holds,
            None,
            RuleId::R1,
            &[RuleId::R3],
        ),
        (
            "Q[x,y], (2x, 3y)",
            AlgebraMap::linear(&plane, &Matrix::from_ints(&qq, &[vec![2, 0], vec![0, 3]])).unwrap(),
            Outcome::Fails,
            None,
            RuleId::R2,
            &[RuleId::R4],
        ),
        ("Q[x,y], swap", AlgebraMap::from_images(&plane, vec![py.clone(), px.clone()]).unwrap(), Outcome::Holds, None, RuleId::R1, &[RuleId::R2]),
        (
            "F_5 Laurent, [[2,1],[1,1]]",
            AlgebraMap::monomial(&laurent_f5, &[vec![2, 1], vec![1, 1]]).unwrap(),
            Outcome::Holds,
            None,
            RuleId::R6,
            &[],
        ),
        (
            "Q[x,y], Henon",
            AlgebraMap::from_images(&plane, vec![py.clone(), &px + &py.pow(2)]).unwrap(),
            Outcome::Unknown,
            Some(QuestionTag::Qn4),
            RuleId::R5,
            &[],
        ),
        (
            "Q Laurent, Jordan",
            AlgebraMap::monomial(&laurent_q, &[vec![-1, 1], vec![1, 0]]).unwrap(),
            Outcome::Unknown,
            Some(QuestionTag::Qn5),
            RuleId::R7,
            &[],
        ),
    ];
    let opts = DecideOptions::default();
    for (name, alpha, outcome, tag, rule, also) in &rows {
        let v = ok(decide(alpha, &opts))?;
        ensure(v.outcome == *outcome && v.question_tag == *tag, || format!("{name}: got {v}"))?;
        ensure(v.decided_by() == *rule, || format!("{name}: decided by {} instead of {rule}", v.decided_by()))?;
        let fired = v.rules();
        ensure(also.iter().all(|r| fired.contains(r)), || format!("{name}: trace {fired:?} misses {also:?}"))?;
        ensure(v.trace.iter().all(|e| e.citation == e.rule.citation()), || format!("{name}: citation mismatch"))?;
        let first = serde_json::to_string(&v).unwrap();
        for _ in 1..DETERMINISM_RUNS {
            let again = serde_json::to_string(&ok(decide(alpha, &opts))?).unwrap();
            ensure(again == first, || format!("{name}: trace differs between runs"))?;
        }
    }
    Ok(format!("{} rows, traces identical across {DETERMINISM_RUNS} runs", rows.len()))
}

fn alpha_special() -> Check {
    let field = q();
    let (ring, sr) = scaling_ring(&field, &int(&field, 2));
    let x = MultiPoly::var(&ring, 0);
    let ctx = sr.coeffs();
    for n in 1..=SPECIAL_MAX_N {
        let got = ok(ctx.norm_product(&x, n))?;
        // Π_{i<n} 2^i x, built from integer arithmetic
        let coeff: BigInt = (0..n).map(|i| BigInt::from(1u64 << i)).product();
        let want = x_pow(&ring, Scalar::from_bigint(&field, &coeff), n as i32);
        ensure(got == want, || format!("N_{n}(x) = {got}, expected {want}"))?;
        let closed = BigInt::from(2u64).pow(n * (n - 1) / 2);
        ensure(coeff == closed, || format!("n = {n}: product coefficient {coeff} != 2^(n(n-1)/2)"))?;
    }
    let ideals: Vec<Ideal> =
        (1..=SPECIAL_MAX_K as i32).map(|k| Ideal::principal(&x_pow(&ring, Scalar::one(&field), k)).unwrap()).collect();
    let report = ok(ctx.special_probe(&x, &ideals, SPECIAL_MAX_N + 2))?;
    for (k, e) in (1..=SPECIAL_MAX_K).zip(&report.entries) {
        ensure(e.least_n == Some(k), || format!("(x^{k}): least n = {:?}", e.least_n))?;
    }
    Ok(format!("N_n matches 2^(n(n-1)/2) x^n for n <= {SPECIAL_MAX_N}; least n = k for k <= {SPECIAL_MAX_K}"))
}

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn cli_contract() -> Check {
    let mut specs: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "spec"))
        .collect();
    specs.sort();
    ensure(specs.len() >= MIN_FIXTURES, || format!("only {} fixtures", specs.len()))?;
    for path in &specs {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let ast = parse_spec(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let printed = ast.to_string();
        let again = parse_spec(&printed).map_err(|e| format!("{} reprint: {e}", path.display()))?;
        ensure(again == ast, || format!("{}: reparse differs", path.display()))?;
        ensure(again.to_string() == printed, || format!("{}: printing is not stable", path.display()))?;
    }

    let exe = env!("CARGO_BIN_EXE_skewring");
    let f = |n: &str| fixtures_dir().join(n).to_string_lossy().into_owned();
    let commands: Vec<Vec<String>> = vec![
        vec!["decide".into(), f("henon.spec")],
        vec!["decide".into(), f("jordan.spec")],
        vec!["order".into(), f("cyclotomic.spec")],
        vec!["cycles".into(), f("henon.spec"), "--prime".into(), "5".into()],
        vec!["classify".into(), f("diagonal.spec")],
        vec!["probe".into(), f("henon.spec"), "--prime".into(), "3".into()],
    ];
    for args in &commands {
        let mut outputs = Vec::new();
        for _ in 0..DETERMINISM_RUNS {
            let out = Command::new(exe).arg("--json").args(args).output().map_err(|e| e.to_string())?;
            ensure(out.status.success(), || format!("{args:?} exited with {:?}", out.status.code()))?;
            outputs.push(out.stdout);
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || format!("{args:?}: --json output differs between runs"))?;
    }
    Ok(format!("{} fixtures round-trip; {} commands byte-identical under --json", specs.len(), commands.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("skew arithmetic", skew_arithmetic),
        ("division by u - theta", division),
        ("lattice correspondence", lattice),
        ("strict chain", chain),
        ("length-one elements", length_one),
        ("matrix units", matrix_units),
        ("order engine", order_engine),
        ("Henon dynamics", henon_dynamics),
        ("curve test", curve_test),
        ("decision table", decide_table),
        ("alpha-special norms", alpha_special),
        ("CLI round trip and determinism", cli_contract),
    ];
    println!("acceptance suite (seed {SEED:#x}, tolerance {TOLERANCE})");
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let res = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match res {
            Ok(detail) => println!("PASS [{:02}] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:02}] {name}: {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
