//! Sparse multivariate polynomials, Laurent polynomials and the two supported
//! quotient shapes over a [`Scalar`] field.
//!
//! Monomials are ordered graded-lexicographically with x_1 > … > x_t. A
//! `BTreeMap` keyed by [`Monomial`] therefore stores the leading term last.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{precondition, Error, Result};
use crate::scalars::{FieldSpec, Scalar, UniPoly};

/// Exponent vector. Negative entries are only legal in Laurent rings.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<i32>);

impl Monomial {
    pub fn new(exps: Vec<i32>) -> Monomial {
        Monomial(exps)
    }

    pub fn one(arity: usize) -> Monomial {
        Monomial(vec![0; arity])
    }

    pub fn var(arity: usize, i: usize) -> Monomial {
        let mut e = vec![0; arity];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[i32] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Exponent difference; the caller decides whether negative entries are legal.
    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Componentwise ≤, i.e. divisibility among ordinary monomials.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn neg(&self) -> Monomial {
        Monomial(self.0.iter().map(|e| -e).collect())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingKind {
    Polynomial,
    Laurent,
    /// k[x]/(m) with m monic of degree ≥ 1, coefficients low to high.
    UnivariateQuotient { modulus: Vec<Scalar> },
    /// k[x_1..x_t]/(x_j − c_j : j ∈ J), sorted by variable index.
    CoordinateAffineQuotient { assignments: Vec<(usize, Scalar)> },
}

/// Ring descriptor shared by all its elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffRing {
    field: FieldSpec,
    vars: Vec<String>,
    kind: RingKind,
}

impl CoeffRing {
    pub fn new(field: &FieldSpec, vars: &[&str], kind: RingKind) -> Result<Arc<CoeffRing>> {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return precondition(format!("duplicate variable {v}"));
            }
        }
        match &kind {
            RingKind::UnivariateQuotient { modulus } => {
                if vars.len() != 1 {
                    return precondition("a univariate quotient needs exactly one variable");
                }
                if modulus.len() < 2 || !modulus.last().unwrap().is_one() {
                    return precondition("modulus must be monic of degree at least 1");
                }
            }
            RingKind::CoordinateAffineQuotient { assignments } => {
                let mut seen = vec![false; vars.len()];
                for (j, c) in assignments {
                    if *j >= vars.len() || seen[*j] {
                        return precondition("assignments must reference distinct declared variables");
                    }
                    if c.field() != *field {
                        return Err(Error::Scalar(crate::scalars::ScalarError::FieldMismatch(
                            c.field(),
                            field.clone(),
                        )));
                    }
                    seen[*j] = true;
                }
            }
            _ => {}
        }
        let kind = match kind {
            RingKind::CoordinateAffineQuotient { mut assignments } => {
                assignments.sort_by_key(|(j, _)| *j);
                RingKind::CoordinateAffineQuotient { assignments }
            }
            k => k,
        };
        Ok(Arc::new(CoeffRing { field: field.clone(), vars, kind }))
    }

    pub fn polynomial(field: &FieldSpec, vars: &[&str]) -> Arc<CoeffRing> {
        CoeffRing::new(field, vars, RingKind::Polynomial).expect("valid polynomial ring")
    }

    pub fn laurent(field: &FieldSpec, vars: &[&str]) -> Arc<CoeffRing> {
        CoeffRing::new(field, vars, RingKind::Laurent).expect("valid Laurent ring")
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn kind(&self) -> &RingKind {
        &self.kind
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn is_laurent(&self) -> bool {
        self.kind == RingKind::Laurent
    }

    /// Polynomial-type rings whose elements are ordinary polynomials (the
    /// coordinate-affine quotient is isomorphic to a polynomial ring in the
    /// unassigned variables).
    pub fn is_polynomial_like(&self) -> bool {
        matches!(self.kind, RingKind::Polynomial | RingKind::CoordinateAffineQuotient { .. })
    }

    /// Whether the ring is known to be an integral domain.
    pub fn is_domain(&self) -> bool {
        match &self.kind {
            RingKind::UnivariateQuotient { modulus } => modulus.len() == 2,
            _ => true,
        }
    }

    pub fn krull_dimension(&self) -> usize {
        match &self.kind {
            RingKind::Polynomial | RingKind::Laurent => self.arity(),
            RingKind::UnivariateQuotient { .. } => 0,
            RingKind::CoordinateAffineQuotient { assignments } => self.arity() - assignments.len(),
        }
    }

    fn same(a: &Arc<CoeffRing>, b: &Arc<CoeffRing>) -> bool {
        Arc::ptr_eq(a, b) || a == b
    }
}

impl fmt::Display for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = self.vars.join(",");
        match &self.kind {
            RingKind::Polynomial => write!(f, "poly({vars})"),
            RingKind::Laurent => write!(f, "laurent({vars})"),
            RingKind::UnivariateQuotient { modulus } => {
                let m = UniPoly::new(&self.field, modulus.clone()).to_string().replace('t', &self.vars[0]);
                write!(f, "quot({vars}; {m})")
            }
            RingKind::CoordinateAffineQuotient { assignments } => {
                write!(f, "poly({vars})/(")?;
                for (k, (j, c)) in assignments.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{} := {c}", self.vars[*j])?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Element of a [`CoeffRing`] in canonical form.
#[derive(Clone)]
pub struct MultiPoly {
    ring: Arc<CoeffRing>,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        CoeffRing::same(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for MultiPoly {}

impl Hash for MultiPoly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

/// Checked ring arithmetic.
pub fn poly_arith(f: &MultiPoly, g: &MultiPoly, op: PolyOp) -> Result<MultiPoly> {
    match op {
        PolyOp::Add => f.try_add(g),
        PolyOp::Sub => f.try_sub(g),
        PolyOp::Mul => f.try_mul(g),
    }
}

impl MultiPoly {
    pub fn zero(ring: &Arc<CoeffRing>) -> MultiPoly {
        MultiPoly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Arc<CoeffRing>) -> MultiPoly {
        MultiPoly::constant(ring, Scalar::one(ring.field()))
    }

    pub fn constant(ring: &Arc<CoeffRing>, c: Scalar) -> MultiPoly {
        assert_eq!(c.field(), *ring.field(), "constant from a different field");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(ring.arity()), c);
        }
        MultiPoly { ring: ring.clone(), terms }
    }

    pub fn from_int(ring: &Arc<CoeffRing>, v: i64) -> MultiPoly {
        MultiPoly::constant(ring, Scalar::from_int(ring.field(), v))
    }

    pub fn var(ring: &Arc<CoeffRing>, i: usize) -> MultiPoly {
        MultiPoly::monomial(ring, Scalar::one(ring.field()), Monomial::var(ring.arity(), i))
            .expect("variable of the ring")
    }

    pub fn var_named(ring: &Arc<CoeffRing>, name: &str) -> Option<MultiPoly> {
        ring.var_index(name).map(|i| MultiPoly::var(ring, i))
    }

    pub fn monomial(ring: &Arc<CoeffRing>, c: Scalar, m: Monomial) -> Result<MultiPoly> {
        MultiPoly::from_terms(ring, [(m, c)])
    }

    /// Builds and canonicalizes a polynomial from arbitrary terms.
    pub fn from_terms(
        ring: &Arc<CoeffRing>,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Result<MultiPoly> {
        let mut map: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (m, c) in terms {
            if m.arity() != ring.arity() {
                return precondition(format!("monomial of arity {} in a ring of arity {}", m.arity(), ring.arity()));
            }
            if !ring.is_laurent() && !m.is_nonnegative() {
                return precondition("negative exponent outside a Laurent ring");
            }
            if c.field() != *ring.field() {
                return Err(Error::Scalar(crate::scalars::ScalarError::FieldMismatch(c.field(), ring.field().clone())));
            }
            accumulate(&mut map, m, c);
        }
        Ok(MultiPoly { ring: ring.clone(), terms: map }.normalized())
    }

    /// Reduces into canonical form for the ring kind.
    fn normalized(self) -> MultiPoly {
        match self.ring.kind.clone() {
            RingKind::Polynomial | RingKind::Laurent => self,
            RingKind::UnivariateQuotient { modulus } => {
                if self.terms.keys().all(|m| (m.0[0] as usize) < modulus.len() - 1) {
                    return self;
                }
                let field = self.ring.field().clone();
                let top = self.terms.keys().map(|m| m.0[0] as usize).max().unwrap_or(0);
                let mut dense = vec![Scalar::zero(&field); top + 1];
                for (m, c) in &self.terms {
                    dense[m.0[0] as usize] = c.clone();
                }
                let (_, r) = UniPoly::new(&field, dense)
                    .div_rem(&UniPoly::new(&field, modulus))
                    .expect("nonzero modulus");
                let mut terms = BTreeMap::new();
                for (k, c) in r.coeffs().iter().enumerate() {
                    if !c.is_zero() {
                        terms.insert(Monomial(vec![k as i32]), c.clone());
                    }
                }
                MultiPoly { ring: self.ring, terms }
            }
            RingKind::CoordinateAffineQuotient { assignments } => {
                let mut out = BTreeMap::new();
                for (m, c) in self.terms {
                    let mut e = m.0;
                    let mut c = c;
                    for (j, v) in &assignments {
                        if e[*j] != 0 {
                            c = &c * &v.pow_u(e[*j] as u64);
                            e[*j] = 0;
                        }
                    }
                    accumulate(&mut out, Monomial(e), c);
                }
                MultiPoly { ring: self.ring, terms: out }
            }
        }
    }

    pub fn ring(&self) -> &Arc<CoeffRing> {
        &self.ring
    }

    pub fn field(&self) -> &FieldSpec {
        self.ring.field()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| Scalar::zero(self.field()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_value().is_some_and(|c| c.is_one())
    }

    /// The value if the polynomial is a constant (including zero).
    pub fn constant_value(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero(self.field())),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    /// Leading term under grlex.
    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Option<&Scalar> {
        self.leading_term().map(|(_, c)| c)
    }

    /// Total degree of the leading monomial; `None` for zero.
    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<i32> {
        self.terms.keys().map(|m| m.0[i]).max()
    }

    /// If the polynomial is a single term c·X^m, returns (c, m).
    pub fn as_single_term(&self) -> Option<(&Scalar, &Monomial)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((c, m))
        } else {
            None
        }
    }

    /// Units that are visible syntactically: nonzero constants, and single terms
    /// in a Laurent ring.
    pub fn unit_inverse(&self) -> Option<MultiPoly> {
        let (c, m) = self.as_single_term()?;
        if !m.is_one() && !self.ring.is_laurent() {
            return None;
        }
        MultiPoly::monomial(&self.ring, c.inv().ok()?, m.neg()).ok()
    }

    fn check_ring(&self, other: &MultiPoly) -> Result<()> {
        if CoeffRing::same(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch(format!("{} vs {}", self.ring, other.ring)))
        }
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_ring(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut terms, m.clone(), c.clone());
        }
        Ok(MultiPoly { ring: self.ring.clone(), terms })
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_ring(other)?;
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                accumulate(&mut terms, m1.mul(m2), c1 * c2);
            }
        }
        Ok(MultiPoly { ring: self.ring.clone(), terms }.normalized())
    }

    pub fn scale(&self, s: &Scalar) -> MultiPoly {
        if s.is_zero() {
            return MultiPoly::zero(&self.ring);
        }
        MultiPoly { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    /// Multiplication by a monomial X^e (legal when the result stays in the ring).
    pub fn shift(&self, e: &Monomial) -> Result<MultiPoly> {
        MultiPoly::from_terms(&self.ring, self.terms.iter().map(|(m, c)| (m.mul(e), c.clone())))
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(&self.ring);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        acc
    }

    /// Integer power; negative exponents require a unit.
    pub fn pow_i(&self, e: i32) -> Result<MultiPoly> {
        if e >= 0 {
            return Ok(self.pow(e as u32));
        }
        let inv = self
            .unit_inverse()
            .ok_or_else(|| Error::Precondition(format!("{self} is not a unit, cannot raise to {e}")))?;
        Ok(inv.pow(e.unsigned_abs()))
    }

    /// Multiplies every coefficient by `monic` so that the leading coefficient is 1.
    pub fn monic(&self) -> MultiPoly {
        match self.leading_coefficient() {
            None => self.clone(),
            Some(c) => self.scale(&c.inv().expect("nonzero")),
        }
    }

    /// Evaluation at a point of K^t.
    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.ring.arity() {
            return precondition(format!("point has {} coordinates, ring has {}", point.len(), self.ring.arity()));
        }
        let field = self.field();
        let mut acc = Scalar::zero(field);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (e, x) in m.0.iter().zip(point) {
                if *e != 0 {
                    t = &t * &x.pow(*e as i64).map_err(|_| {
                        Error::Precondition("zero coordinate at a variable with a negative exponent".into())
                    })?;
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Ring-homomorphic substitution x_i ↦ images[i]. Negative exponents require
    /// unit images.
    pub fn substitute(&self, images: &[MultiPoly]) -> Result<MultiPoly> {
        if images.len() != self.ring.arity() {
            return precondition(format!("expected {} images, got {}", self.ring.arity(), images.len()));
        }
        let target = match images.first() {
            Some(p) => p.ring.clone(),
            None => {
                // Arity 0: the ring is the field itself.
                return Ok(self.clone());
            }
        };
        for im in images {
            if !CoeffRing::same(&im.ring, &target) {
                return Err(Error::RingMismatch("substitution images live in different rings".into()));
            }
        }
        let mut cache: Vec<HashMap<i32, MultiPoly>> = vec![HashMap::new(); images.len()];
        let mut out = MultiPoly::zero(&target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(&target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = match cache[i].get(&e) {
                    Some(p) => p.clone(),
                    None => {
                        let p = images[i].pow_i(e).map_err(|_| {
                            Error::Precondition(format!(
                                "image of {} must be a unit for a negative exponent",
                                self.ring.vars[i]
                            ))
                        })?;
                        cache[i].insert(e, p.clone());
                        p
                    }
                };
                t = &t * &p;
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Re-homes the polynomial into a ring with the same field and arity, and
    /// canonicalizes it there.
    pub fn rehome(&self, ring: &Arc<CoeffRing>) -> Result<MultiPoly> {
        if ring.arity() != self.ring.arity() || ring.field() != self.ring.field() {
            return Err(Error::RingMismatch(format!("cannot move {} into {}", self.ring, ring)));
        }
        MultiPoly::from_terms(ring, self.terms.iter().map(|(m, c)| (m.clone(), c.clone())))
    }

    /// Univariate view of a polynomial in a one-variable ring.
    pub fn to_unipoly(&self) -> Option<UniPoly> {
        if self.ring.arity() != 1 || self.terms.keys().any(|m| m.0[0] < 0) {
            return None;
        }
        let top = self.terms.keys().map(|m| m.0[0] as usize).max().unwrap_or(0);
        let mut dense = vec![Scalar::zero(self.field()); top + 1];
        for (m, c) in &self.terms {
            dense[m.0[0] as usize] = c.clone();
        }
        Some(UniPoly::new(self.field(), dense))
    }

    pub fn from_unipoly(ring: &Arc<CoeffRing>, p: &UniPoly, var: usize) -> Result<MultiPoly> {
        let t = ring.arity();
        MultiPoly::from_terms(
            ring,
            p.coeffs().iter().enumerate().map(|(k, c)| {
                let mut e = vec![0; t];
                e[var] = k as i32;
                (Monomial(e), c.clone())
            }),
        )
    }

    /// Componentwise minimum exponent over the support.
    pub fn monomial_content(&self) -> Option<Monomial> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, m| acc.gcd(m)))
    }
}

fn accumulate(map: &mut BTreeMap<Monomial, Scalar>, m: Monomial, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&m) {
        Some(v) => {
            let s = &*v + &c;
            if s.is_zero() {
                map.remove(&m);
            } else {
                *v = s;
            }
        }
        None => {
            map.insert(m, c);
        }
    }
}

/// Graded-lexicographic division of f by the single polynomial ρ:
/// f = q·ρ + r with no monomial of r divisible by LM(ρ).
pub fn divide_by_principal(f: &MultiPoly, rho: &MultiPoly) -> Result<(MultiPoly, MultiPoly)> {
    f.check_ring(rho)?;
    if !f.ring.is_polynomial_like() {
        return precondition(format!("division by a principal generator needs a polynomial ring, not {}", f.ring));
    }
    let Some((lm, lc)) = rho.leading_term() else {
        return precondition("division by zero polynomial");
    };
    let (lm, lc_inv) = (lm.clone(), lc.inv()?);
    let ring = f.ring.clone();
    let mut p = f.terms.clone();
    let mut q = BTreeMap::new();
    let mut r = BTreeMap::new();
    while let Some((m, c)) = p.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
        if lm.divides(&m) {
            let qm = m.div(&lm);
            let qc = &c * &lc_inv;
            for (rm, rc) in &rho.terms {
                accumulate(&mut p, rm.mul(&qm), -(&qc * rc));
            }
            accumulate(&mut q, qm, qc);
        } else {
            p.remove(&m);
            accumulate(&mut r, m, c);
        }
    }
    Ok((MultiPoly { ring: ring.clone(), terms: q }, MultiPoly { ring, terms: r }))
}

/// Exact quotient f / a in a domain, or `None` when a does not divide f.
pub fn exact_divide(f: &MultiPoly, a: &MultiPoly) -> Result<Option<MultiPoly>> {
    f.check_ring(a)?;
    if a.is_zero() {
        return precondition("division by zero polynomial");
    }
    match f.ring.kind() {
        RingKind::Polynomial | RingKind::CoordinateAffineQuotient { .. } => {
            let (q, r) = divide_by_principal(f, a)?;
            Ok(r.is_zero().then_some(q))
        }
        RingKind::Laurent => {
            if f.is_zero() {
                return Ok(Some(f.clone()));
            }
            // Strip monomial content from both; in k[X] the remaining parts are
            // coprime to every x_i, so Laurent divisibility reduces to ordinary
            // divisibility.
            let cf = f.monomial_content().unwrap();
            let ca = a.monomial_content().unwrap();
            let vars: Vec<&str> = f.ring.vars.iter().map(|s| s.as_str()).collect();
            let poly = CoeffRing::polynomial(f.ring.field(), &vars);
            let fp = f.shift(&cf.neg())?.rehome(&poly)?;
            let ap = a.shift(&ca.neg())?.rehome(&poly)?;
            let (q, r) = divide_by_principal(&fp, &ap)?;
            if !r.is_zero() {
                return Ok(None);
            }
            Ok(Some(q.rehome(&f.ring)?.shift(&cf.div(&ca))?))
        }
        RingKind::UnivariateQuotient { .. } => {
            precondition("exact division needs an integral domain; the univariate quotient is not one in general")
        }
    }
}

/// Description of a quotient to form.
#[derive(Clone, Debug)]
pub enum QuotientSpec {
    /// Principal ideal of a one-variable polynomial ring.
    Univariate(MultiPoly),
    /// x_j := c_j.
    CoordinateAffine(Vec<(usize, Scalar)>),
    /// Arbitrary generators; accepted only when they have one of the shapes above.
    Generators(Vec<MultiPoly>),
}

/// The reduction homomorphism R → R/I.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    source: Arc<CoeffRing>,
    target: Arc<CoeffRing>,
}

impl QuotientMap {
    pub fn source(&self) -> &Arc<CoeffRing> {
        &self.source
    }

    pub fn target(&self) -> &Arc<CoeffRing> {
        &self.target
    }

    pub fn reduce(&self, f: &MultiPoly) -> Result<MultiPoly> {
        if !CoeffRing::same(&f.ring, &self.source) && !CoeffRing::same(&f.ring, &self.target) {
            return Err(Error::RingMismatch(format!("{} is not the source of this quotient", f.ring)));
        }
        f.rehome(&self.target)
    }
}

pub fn quotient_ring(base: &Arc<CoeffRing>, spec: QuotientSpec) -> Result<QuotientMap> {
    if base.kind() != &RingKind::Polynomial {
        return Err(Error::Unsupported(format!("quotients are formed from polynomial rings only, not {base}")));
    }
    let vars: Vec<&str> = base.vars.iter().map(|s| s.as_str()).collect();
    let kind = match spec {
        QuotientSpec::Univariate(m) => univariate_kind(base, &m)?,
        QuotientSpec::CoordinateAffine(a) => RingKind::CoordinateAffineQuotient { assignments: a },
        QuotientSpec::Generators(gens) => {
            if let Some(a) = coordinate_affine_shape(&gens) {
                RingKind::CoordinateAffineQuotient { assignments: a }
            } else if base.arity() == 1 && gens.len() == 1 {
                univariate_kind(base, &gens[0])?
            } else {
                return Err(Error::Unsupported(
                    "ideal shape needs general Gröbner machinery; only univariate moduli and coordinate assignments are supported"
                        .into(),
                ));
            }
        }
    };
    let target = CoeffRing::new(base.field(), &vars, kind)?;
    Ok(QuotientMap { source: base.clone(), target })
}

fn univariate_kind(base: &Arc<CoeffRing>, m: &MultiPoly) -> Result<RingKind> {
    if base.arity() != 1 {
        return Err(Error::Unsupported("univariate modulus in a multivariate ring".into()));
    }
    let u = m.to_unipoly().ok_or_else(|| Error::Precondition("modulus must be a polynomial".into()))?;
    if u.degree().unwrap_or(0) < 1 {
        return precondition("modulus must have degree at least 1");
    }
    Ok(RingKind::UnivariateQuotient { modulus: u.monic().coeffs().to_vec() })
}

/// Recognizes generators of the form x_j − c_j with distinct j.
fn coordinate_affine_shape(gens: &[MultiPoly]) -> Option<Vec<(usize, Scalar)>> {
    let mut out: Vec<(usize, Scalar)> = Vec::new();
    for g in gens {
        let g = g.monic();
        let mut var = None;
        let mut constant = Scalar::zero(g.field());
        for (m, c) in g.terms() {
            if m.is_one() {
                constant = c.clone();
            } else if m.degree() == 1 && m.is_nonnegative() && c.is_one() && var.is_none() {
                var = Some(m.0.iter().position(|&e| e == 1).unwrap());
            } else {
                return None;
            }
        }
        let j = var?;
        if out.iter().any(|(k, _)| *k == j) {
            return None;
        }
        out.push((j, -constant));
    }
    if out.is_empty() {
        return None;
    }
    out.sort_by_key(|(j, _)| *j);
    Some(out)
}

/// Canonical shape of a supported ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdealShape {
    Zero,
    Whole,
    /// Generated by one non-monomial element, normalized to leading coefficient 1.
    Principal(MultiPoly),
    /// Minimal monomial generators, sorted.
    Monomial(Vec<Monomial>),
    /// (x_j − c_j : j ∈ J).
    CoordinateAffine(Vec<(usize, Scalar)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ideal {
    ring: Arc<CoeffRing>,
    shape: IdealShape,
}

impl Ideal {
    pub fn zero(ring: &Arc<CoeffRing>) -> Ideal {
        Ideal { ring: ring.clone(), shape: IdealShape::Zero }
    }

    pub fn principal(g: &MultiPoly) -> Result<Ideal> {
        Ideal::from_generators(g.ring(), std::slice::from_ref(g))
    }

    /// Recognizes the supported ideal shapes from a generating set.
    pub fn from_generators(ring: &Arc<CoeffRing>, gens: &[MultiPoly]) -> Result<Ideal> {
        for g in gens {
            if !CoeffRing::same(&g.ring, ring) {
                return Err(Error::RingMismatch("ideal generator from another ring".into()));
            }
        }
        let gens: Vec<MultiPoly> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
        let shape = |s| Ok(Ideal { ring: ring.clone(), shape: s });
        if gens.is_empty() {
            return shape(IdealShape::Zero);
        }
        if gens.iter().any(|g| g.unit_inverse().is_some()) {
            return shape(IdealShape::Whole);
        }
        match ring.kind() {
            RingKind::UnivariateQuotient { modulus } => {
                let m = UniPoly::new(ring.field(), modulus.clone());
                let g = gens.iter().fold(m.clone(), |acc, p| acc.gcd(&p.to_unipoly().expect("univariate")));
                return if g.degree() == Some(0) {
                    shape(IdealShape::Whole)
                } else if g == m {
                    shape(IdealShape::Zero)
                } else {
                    shape(Ideal::normalize_principal(MultiPoly::from_unipoly(ring, &g, 0)?))
                };
            }
            RingKind::Polynomial if ring.arity() == 1 => {
                let g = gens.iter().fold(UniPoly::zero(ring.field()), |acc, p| {
                    acc.gcd(&p.to_unipoly().expect("univariate"))
                });
                if g.degree() == Some(0) {
                    return shape(IdealShape::Whole);
                }
                return shape(Ideal::normalize_principal(MultiPoly::from_unipoly(ring, &g, 0)?));
            }
            _ => {}
        }
        if ring.is_laurent() {
            // Every monomial is a unit here; only principal ideals are recognized.
            for g in &gens {
                let mut all = true;
                for h in &gens {
                    if exact_divide(h, g)?.is_none() {
                        all = false;
                        break;
                    }
                }
                if all {
                    let c = g.monomial_content().unwrap();
                    return shape(IdealShape::Principal(g.shift(&c.neg())?.monic()));
                }
            }
            return Err(Error::Unsupported("non-principal ideal of a Laurent ring".into()));
        }
        if gens.iter().all(|g| g.num_terms() == 1) {
            let mons: Vec<Monomial> = gens.iter().map(|g| g.leading_term().unwrap().0.clone()).collect();
            return shape(IdealShape::Monomial(minimal_monomials(mons)));
        }
        if let Some(a) = coordinate_affine_shape(&gens) {
            return shape(IdealShape::CoordinateAffine(a));
        }
        for g in &gens {
            let mut all = true;
            for h in &gens {
                if !divide_by_principal(h, g)?.1.is_zero() {
                    all = false;
                    break;
                }
            }
            if all {
                return shape(Ideal::normalize_principal(g.clone()));
            }
        }
        Err(Error::Unsupported(
            "ideal is neither principal, monomial nor coordinate-affine; general membership is out of scope".into(),
        ))
    }

    fn normalize_principal(g: MultiPoly) -> IdealShape {
        if g.num_terms() == 1 {
            IdealShape::Monomial(vec![g.leading_term().unwrap().0.clone()])
        } else {
            IdealShape::Principal(g.monic())
        }
    }

    pub fn ring(&self) -> &Arc<CoeffRing> {
        &self.ring
    }

    pub fn shape(&self) -> &IdealShape {
        &self.shape
    }

    pub fn is_zero(&self) -> bool {
        self.shape == IdealShape::Zero
    }

    pub fn is_whole(&self) -> bool {
        self.shape == IdealShape::Whole
    }

    pub fn generators(&self) -> Vec<MultiPoly> {
        let r = &self.ring;
        match &self.shape {
            IdealShape::Zero => vec![],
            IdealShape::Whole => vec![MultiPoly::one(r)],
            IdealShape::Principal(g) => vec![g.clone()],
            IdealShape::Monomial(ms) => ms
                .iter()
                .map(|m| MultiPoly::monomial(r, Scalar::one(r.field()), m.clone()).expect("valid monomial"))
                .collect(),
            IdealShape::CoordinateAffine(a) => a
                .iter()
                .map(|(j, c)| &MultiPoly::var(r, *j) - &MultiPoly::constant(r, c.clone()))
                .collect(),
        }
    }

    pub fn contains(&self, f: &MultiPoly) -> Result<bool> {
        if !CoeffRing::same(&f.ring, &self.ring) {
            return Err(Error::RingMismatch("membership test across rings".into()));
        }
        Ok(match &self.shape {
            IdealShape::Zero => f.is_zero(),
            IdealShape::Whole => true,
            IdealShape::Principal(g) => match self.ring.kind() {
                RingKind::UnivariateQuotient { .. } => {
                    // In k[x]/(m) with g | m: f ∈ (g) iff g divides the representative.
                    let (_, r) = f
                        .to_unipoly()
                        .expect("univariate")
                        .div_rem(&g.to_unipoly().expect("univariate"))
                        .expect("nonzero generator");
                    r.is_zero()
                }
                _ => exact_divide(f, g)?.is_some(),
            },
            IdealShape::Monomial(ms) => f.terms.keys().all(|m| ms.iter().any(|g| g.divides(m))),
            IdealShape::CoordinateAffine(a) => {
                let images: Vec<MultiPoly> = (0..self.ring.arity())
                    .map(|i| match a.iter().find(|(j, _)| *j == i) {
                        Some((_, c)) => MultiPoly::constant(&self.ring, c.clone()),
                        None => MultiPoly::var(&self.ring, i),
                    })
                    .collect();
                f.substitute(&images)?.is_zero()
            }
        })
    }

    /// α(I) ⊆ I, checked on generators.
    pub fn is_stable_under(&self, apply: impl Fn(&MultiPoly) -> Result<MultiPoly>) -> Result<bool> {
        for g in self.generators() {
            if !self.contains(&apply(&g)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens = self.generators();
        if gens.is_empty() {
            return write!(f, "(0)");
        }
        write!(f, "(")?;
        for (i, g) in gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ")")
    }
}

fn minimal_monomials(mut ms: Vec<Monomial>) -> Vec<Monomial> {
    ms.sort();
    ms.dedup();
    let mut out: Vec<Monomial> = Vec::new();
    for m in ms {
        if !out.iter().any(|g| g.divides(&m)) {
            out.push(m);
        }
    }
    out
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.prints_negative();
            let mag = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mono = format_monomial(m, &self.ring.vars);
            if mono.is_empty() {
                if mag.prints_compound() {
                    write!(f, "({mag})")?;
                } else {
                    write!(f, "{mag}")?;
                }
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else if mag.prints_compound() {
                write!(f, "({mag})*{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in {}", self.ring)
    }
}

fn format_monomial(m: &Monomial, vars: &[String]) -> String {
    let mut parts = Vec::new();
    for (e, v) in m.0.iter().zip(vars) {
        match e {
            0 => {}
            1 => parts.push(v.clone()),
            e => parts.push(format!("{v}^{e}")),
        }
    }
    parts.join("*")
}

impl serde::Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &'a MultiPoly) -> MultiPoly {
        self.try_add(rhs).expect("ring mismatch")
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &'a MultiPoly) -> MultiPoly {
        self.try_sub(rhs).expect("ring mismatch")
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &'a MultiPoly) -> MultiPoly {
        self.try_mul(rhs).expect("ring mismatch")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}
