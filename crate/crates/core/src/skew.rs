//! Skew polynomial rings R[θ;α] and skew Laurent rings R[θ^±1;α], with
//! coefficients written on the left: θ·r = α(r)·θ.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::automorph::AlgebraMap;
use crate::error::{precondition, Error, Result};
use crate::poly::{exact_divide, CoeffRing, Ideal, MultiPoly};
use crate::scalars::{FieldSpec, Scalar};

/// A commutative coefficient ring together with an automorphism α.
pub trait TwistedCoefficients: Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// α^k(a); negative k needs the inverse.
    fn twist(&self, a: &Self::Elem, k: i64) -> Result<Self::Elem>;
    fn has_inverse(&self) -> bool;
    /// Inverse of a unit that the division routines accept.
    fn unit_inverse(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

/// Polynomial-type coefficients with an [`AlgebraMap`]; images of α^k are cached.
pub struct PolyContext {
    alpha: AlgebraMap,
    alpha_inv: Option<AlgebraMap>,
    powers: Mutex<HashMap<i64, Arc<Vec<MultiPoly>>>>,
}

impl Clone for PolyContext {
    fn clone(&self) -> Self {
        PolyContext::new(self.alpha.clone())
    }
}

impl fmt::Debug for PolyContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyContext({})", self.alpha)
    }
}

impl PolyContext {
    pub fn new(alpha: AlgebraMap) -> PolyContext {
        let alpha_inv = alpha.inverse().ok();
        PolyContext { alpha, alpha_inv, powers: Mutex::new(HashMap::new()) }
    }

    pub fn ring(&self) -> &Arc<CoeffRing> {
        self.alpha.ring()
    }

    pub fn alpha(&self) -> &AlgebraMap {
        &self.alpha
    }

    pub fn alpha_inv(&self) -> Option<&AlgebraMap> {
        self.alpha_inv.as_ref()
    }

    fn power_images(&self, k: i64) -> Result<Arc<Vec<MultiPoly>>> {
        if let Some(v) = self.powers.lock().expect("cache lock").get(&k) {
            return Ok(v.clone());
        }
        let images = if k == 0 {
            (0..self.ring().arity()).map(|i| MultiPoly::var(self.ring(), i)).collect()
        } else {
            let step = if k > 0 {
                &self.alpha
            } else {
                self.alpha_inv
                    .as_ref()
                    .ok_or_else(|| Error::Precondition("α has no known inverse".into()))?
            };
            let prev = self.power_images(k - k.signum())?;
            prev.iter().map(|p| step.apply(p)).collect::<Result<Vec<_>>>()?
        };
        let images = Arc::new(images);
        self.powers.lock().expect("cache lock").insert(k, images.clone());
        Ok(images)
    }

    /// α^k(a).
    pub fn apply_power(&self, a: &MultiPoly, k: i64) -> Result<MultiPoly> {
        if k == 0 {
            return Ok(a.clone());
        }
        a.substitute(&self.power_images(k)?)
    }

    /// N_n(a) = a·α(a)·…·α^{n−1}(a).
    pub fn norm_product(&self, a: &MultiPoly, n: u32) -> Result<MultiPoly> {
        if n == 0 {
            return precondition("norm product needs n ≥ 1");
        }
        let mut acc = a.clone();
        let mut cur = a.clone();
        for _ in 1..n {
            cur = self.alpha.apply(&cur)?;
            acc = acc.try_mul(&cur)?;
        }
        Ok(acc)
    }

    /// For each ideal, the least n ≤ n_max with N_n(a) ∈ I. Every ideal must be
    /// α-stable, and N_n(a) must stay nonzero.
    pub fn special_probe(&self, a: &MultiPoly, ideals: &[Ideal], n_max: u32) -> Result<SpecialReport> {
        for ideal in ideals {
            if !ideal.is_stable_under(|g| self.alpha.apply(g))? {
                return precondition(format!("ideal {ideal} is not α-stable"));
            }
        }
        let mut first_hit: Vec<Option<u32>> = vec![None; ideals.len()];
        let mut cur = a.clone();
        let mut acc = a.clone();
        for n in 1..=n_max {
            if n > 1 {
                cur = self.alpha.apply(&cur)?;
                acc = acc.try_mul(&cur)?;
            }
            if acc.is_zero() {
                return precondition(format!("N_{n}(a) vanished, so a is not regular"));
            }
            for (slot, ideal) in first_hit.iter_mut().zip(ideals) {
                if slot.is_none() && ideal.contains(&acc)? {
                    *slot = Some(n);
                }
            }
        }
        Ok(SpecialReport {
            element: a.to_string(),
            n_max,
            entries: ideals
                .iter()
                .zip(first_hit)
                .map(|(i, n)| SpecialEntry { ideal: i.to_string(), least_n: n })
                .collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecialEntry {
    pub ideal: String,
    /// `None` when no n ≤ n_max works.
    pub least_n: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecialReport {
    pub element: String,
    pub n_max: u32,
    pub entries: Vec<SpecialEntry>,
}

impl TwistedCoefficients for PolyContext {
    type Elem = MultiPoly;

    fn zero(&self) -> MultiPoly {
        MultiPoly::zero(self.ring())
    }
    fn one(&self) -> MultiPoly {
        MultiPoly::one(self.ring())
    }
    fn is_zero(&self, a: &MultiPoly) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        a + b
    }
    fn neg(&self, a: &MultiPoly) -> MultiPoly {
        -a
    }
    fn mul(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        a * b
    }
    fn twist(&self, a: &MultiPoly, k: i64) -> Result<MultiPoly> {
        self.apply_power(a, k)
    }
    fn has_inverse(&self) -> bool {
        self.alpha_inv.is_some()
    }
    fn unit_inverse(&self, a: &MultiPoly) -> Option<MultiPoly> {
        let c = a.constant_value()?;
        Some(MultiPoly::constant(self.ring(), c.inv().ok()?))
    }
}

/// An element Σ v_i e_i of k^n = ⊕ k·e_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Idem(pub Vec<Scalar>);

impl fmt::Display for Idem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| if c.is_one() { format!("e{}", i + 1) } else { format!("{c}*e{}", i + 1) })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// k^n with the cyclic automorphism α(e_i) = e_{i+1 mod n}.
#[derive(Clone, Debug)]
pub struct CyclicIdempotents {
    field: FieldSpec,
    n: usize,
}

impl CyclicIdempotents {
    pub fn new(field: &FieldSpec, n: usize) -> Result<CyclicIdempotents> {
        if n == 0 {
            return precondition("need at least one idempotent");
        }
        Ok(CyclicIdempotents { field: field.clone(), n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// e_i, 1-based.
    pub fn e(&self, i: usize) -> Idem {
        let mut v = vec![Scalar::zero(&self.field); self.n];
        v[(i - 1) % self.n] = Scalar::one(&self.field);
        Idem(v)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
}

impl TwistedCoefficients for CyclicIdempotents {
    type Elem = Idem;

    fn zero(&self) -> Idem {
        Idem(vec![Scalar::zero(&self.field); self.n])
    }
    fn one(&self) -> Idem {
        Idem(vec![Scalar::one(&self.field); self.n])
    }
    fn is_zero(&self, a: &Idem) -> bool {
        a.0.iter().all(Scalar::is_zero)
    }
    fn add(&self, a: &Idem, b: &Idem) -> Idem {
        Idem(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }
    fn neg(&self, a: &Idem) -> Idem {
        Idem(a.0.iter().map(|x| -x).collect())
    }
    fn mul(&self, a: &Idem, b: &Idem) -> Idem {
        Idem(a.0.iter().zip(&b.0).map(|(x, y)| x * y).collect())
    }
    fn twist(&self, a: &Idem, k: i64) -> Result<Idem> {
        // α moves the coefficient of e_i onto e_{i+1}.
        let n = self.n as i64;
        Ok(Idem((0..n).map(|j| a.0[(j - k).rem_euclid(n) as usize].clone()).collect()))
    }
    fn has_inverse(&self) -> bool {
        true
    }
    fn unit_inverse(&self, a: &Idem) -> Option<Idem> {
        a.0.iter().map(|x| x.inv().ok()).collect::<Option<Vec<_>>>().map(Idem)
    }
}

/// Element Σ a_k θ^k, coefficients on the left; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewPoly<E> {
    terms: BTreeMap<i64, E>,
}

impl<E> SkewPoly<E> {
    /// a·θ^k; the caller guarantees a ≠ 0.
    pub(crate) fn single(k: i64, a: E) -> SkewPoly<E> {
        SkewPoly { terms: BTreeMap::from([(k, a)]) }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &E)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, k: i64) -> Option<&E> {
        self.terms.get(&k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn low_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }
}

/// R[θ;α], or R[θ^±1;α] when `laurent` is set.
pub struct SkewRing<C> {
    coeffs: Arc<C>,
    laurent: bool,
}

impl<C> Clone for SkewRing<C> {
    fn clone(&self) -> Self {
        SkewRing { coeffs: self.coeffs.clone(), laurent: self.laurent }
    }
}

type Sp<C> = SkewPoly<<C as TwistedCoefficients>::Elem>;

impl<C: TwistedCoefficients> SkewRing<C> {
    pub fn new(coeffs: C, laurent: bool) -> Result<SkewRing<C>> {
        if laurent && !coeffs.has_inverse() {
            return precondition("a skew Laurent ring needs an invertible α");
        }
        Ok(SkewRing { coeffs: Arc::new(coeffs), laurent })
    }

    pub fn coeffs(&self) -> &C {
        &self.coeffs
    }

    pub fn is_laurent(&self) -> bool {
        self.laurent
    }

    pub fn zero(&self) -> Sp<C> {
        SkewPoly { terms: BTreeMap::new() }
    }

    pub fn one(&self) -> Sp<C> {
        self.constant(self.coeffs.one())
    }

    pub fn constant(&self, a: C::Elem) -> Sp<C> {
        self.term(a, 0).expect("degree 0 is always allowed")
    }

    /// a·θ^k.
    pub fn term(&self, a: C::Elem, k: i64) -> Result<Sp<C>> {
        self.from_terms([(k, a)])
    }

    pub fn theta_pow(&self, k: i64) -> Result<Sp<C>> {
        self.term(self.coeffs.one(), k)
    }

    pub fn from_terms(&self, terms: impl IntoIterator<Item = (i64, C::Elem)>) -> Result<Sp<C>> {
        let mut out = BTreeMap::new();
        for (k, a) in terms {
            if k < 0 && !self.laurent {
                return precondition("negative θ-degree outside the skew Laurent ring");
            }
            add_into(&*self.coeffs, &mut out, k, a);
        }
        Ok(SkewPoly { terms: out })
    }

    pub fn add(&self, f: &Sp<C>, g: &Sp<C>) -> Sp<C> {
        let mut out = f.terms.clone();
        for (k, a) in &g.terms {
            add_into(&*self.coeffs, &mut out, *k, a.clone());
        }
        SkewPoly { terms: out }
    }

    pub fn neg(&self, f: &Sp<C>) -> Sp<C> {
        SkewPoly { terms: f.terms.iter().map(|(k, a)| (*k, self.coeffs.neg(a))).collect() }
    }

    pub fn sub(&self, f: &Sp<C>, g: &Sp<C>) -> Sp<C> {
        self.add(f, &self.neg(g))
    }

    /// (aθ^i)(bθ^j) = a·α^i(b)·θ^{i+j}.
    pub fn mul(&self, f: &Sp<C>, g: &Sp<C>) -> Result<Sp<C>> {
        let mut out = BTreeMap::new();
        for (i, a) in &f.terms {
            for (j, b) in &g.terms {
                let c = self.coeffs.mul(a, &self.coeffs.twist(b, *i)?);
                add_into(&*self.coeffs, &mut out, i + j, c);
            }
        }
        Ok(SkewPoly { terms: out })
    }

    pub fn pow(&self, f: &Sp<C>, e: u32) -> Result<Sp<C>> {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, f)?;
        }
        Ok(acc)
    }

    /// Left coefficient-wise scaling a·f.
    pub fn scale_left(&self, a: &C::Elem, f: &Sp<C>) -> Sp<C> {
        let mut out = BTreeMap::new();
        for (k, b) in &f.terms {
            add_into(&*self.coeffs, &mut out, *k, self.coeffs.mul(a, b));
        }
        SkewPoly { terms: out }
    }

    /// w = g·h + r with deg r < deg g. The leading coefficient of g must be a unit.
    pub fn left_divide(&self, g: &Sp<C>, w: &Sp<C>) -> Result<(Sp<C>, Sp<C>)> {
        let d = g.degree().ok_or_else(|| Error::Precondition("division by zero".into()))?;
        if g.low_degree().is_some_and(|k| k < 0) || w.low_degree().is_some_and(|k| k < 0) {
            return precondition("left division works with nonnegative θ-degrees");
        }
        let lead_inv = self
            .coeffs
            .unit_inverse(&g.terms[&d])
            .ok_or_else(|| Error::Precondition(format!("leading coefficient {} is not a unit", g.terms[&d])))?;
        let mut h = BTreeMap::new();
        let mut r = w.clone();
        while let Some(n) = r.degree().filter(|&n| n >= d) {
            let c = self.coeffs.twist(&self.coeffs.mul(&lead_inv, &r.terms[&n]), -d)?;
            let step = self.term(c.clone(), n - d)?;
            r = self.sub(&r, &self.mul(g, &step)?);
            if r.coeff(n).is_some() {
                return Err(Error::Invariant("leading term survived a division step".into()));
            }
            add_into(&*self.coeffs, &mut h, n - d, c);
        }
        Ok((SkewPoly { terms: h }, r))
    }

    /// f = Σ_{i<n} θ^i·f_i with each f_i supported on multiples of n, using
    /// c·θ^{qn+i} = θ^i·α^{-i}(c)·θ^{qn}.
    pub fn power_subring_decompose(&self, f: &Sp<C>, n: u32) -> Result<Vec<Sp<C>>> {
        if n == 0 {
            return precondition("n must be positive");
        }
        let n = n as i64;
        let mut parts: Vec<BTreeMap<i64, C::Elem>> = vec![BTreeMap::new(); n as usize];
        for (k, c) in &f.terms {
            let i = k.rem_euclid(n);
            add_into(&*self.coeffs, &mut parts[i as usize], k - i, self.coeffs.twist(c, -i)?);
        }
        Ok(parts.into_iter().map(|terms| SkewPoly { terms }).collect())
    }

    /// Σ θ^i·f_i.
    pub fn reconstruct(&self, parts: &[Sp<C>]) -> Result<Sp<C>> {
        let mut acc = self.zero();
        for (i, p) in parts.iter().enumerate() {
            acc = self.add(&acc, &self.mul(&self.theta_pow(i as i64)?, p)?);
        }
        Ok(acc)
    }

    /// Ascending powers of `theta`, e.g. "theta - x*theta^2".
    pub fn display(&self, f: &Sp<C>) -> String {
        if f.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (k, a)) in f.terms.iter().enumerate() {
            let mut coeff = a.to_string();
            let mut negative = false;
            let compound = coeff.trim_start_matches('-').contains(" + ") || coeff.trim_start_matches('-').contains(" - ");
            if !compound && coeff.starts_with('-') {
                negative = true;
                coeff = coeff[1..].to_string();
            }
            if compound {
                coeff = format!("({coeff})");
            }
            let theta = match k {
                0 => String::new(),
                1 => "theta".into(),
                _ => format!("theta^{k}"),
            };
            let body = match (coeff.as_str(), theta.is_empty()) {
                (_, true) => coeff.clone(),
                ("1", false) => theta,
                (_, false) => format!("{coeff}*{theta}"),
            };
            match (idx, negative) {
                (0, true) => out.push_str(&format!("-{body}")),
                (0, false) => out.push_str(&body),
                (_, true) => out.push_str(&format!(" - {body}")),
                (_, false) => out.push_str(&format!(" + {body}")),
            }
        }
        out
    }
}

fn add_into<C: TwistedCoefficients + ?Sized>(c: &C, out: &mut BTreeMap<i64, C::Elem>, k: i64, a: C::Elem) {
    if c.is_zero(&a) {
        return;
    }
    match out.remove(&k) {
        Some(prev) => {
            let sum = c.add(&prev, &a);
            if !c.is_zero(&sum) {
                out.insert(k, sum);
            }
        }
        None => {
            out.insert(k, a);
        }
    }
}

/// Outcome of testing f ∈ (1 − aθ)S.
#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    /// f = (1 − aθ)·h.
    Member(SkewPoly<MultiPoly>),
    Nonmember(String),
}

impl SkewRing<PolyContext> {
    /// Decides f ∈ (1 − aθ)S by top-down elimination; (1 − aθ)S meets R only in 0.
    pub fn membership_one_minus_a_theta(&self, f: &SkewPoly<MultiPoly>, a: &MultiPoly) -> Result<Membership> {
        let ring = self.coeffs.ring();
        if !ring.is_domain() {
            return precondition(format!("coefficient ring {ring} is not a domain"));
        }
        if a.is_zero() {
            return precondition("a must be nonzero");
        }
        if self.laurent || f.low_degree().is_some_and(|k| k < 0) {
            return precondition("membership is tested in R[θ;α]");
        }
        let g = self.from_terms([(0, MultiPoly::one(ring)), (1, -a)])?;
        let mut h = BTreeMap::new();
        let mut rest = f.clone();
        while let Some(n) = rest.degree().filter(|&n| n >= 1) {
            let top = &rest.terms[&n];
            let Some(q) = exact_divide(top, a)? else {
                return Ok(Membership::Nonmember(format!("a = {a} does not divide the θ^{n} coefficient {top}")));
            };
            // f_n = −a·α(h_{n−1})
            let c = -self.coeffs.twist(&q, -1)?;
            rest = self.sub(&rest, &self.mul(&g, &self.term(c.clone(), n - 1)?)?);
            add_into(&*self.coeffs, &mut h, n - 1, c);
        }
        if let Some(r) = rest.coeff(0) {
            return Ok(Membership::Nonmember(format!("remainder {r} is a nonzero element of R")));
        }
        Ok(Membership::Member(SkewPoly { terms: h }))
    }
}
