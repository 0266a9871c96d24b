//! Substitution automorphisms of coefficient rings: construction with a derived
//! inverse, composition, order analysis and plane normal-form matching.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{precondition, Error, Result};
use crate::linalg::{int_matrix_det, int_matrix_inverse, Matrix};
use crate::poly::{CoeffRing, Ideal, Monomial, MultiPoly, QuotientMap, RingKind};
use crate::scalars::{cyclotomic_poly_in, euler_phi, is_root_of_unity, FieldSpec, RootOfUnity, Scalar, UniPoly};

/// One factor x ↦ y, y ↦ λx + β(y) of a Hénon composition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HenonFactor {
    pub lambda: Scalar,
    pub beta: UniPoly,
}

impl HenonFactor {
    pub fn degree(&self) -> usize {
        self.beta.degree().unwrap_or(0)
    }
}

/// Structural class of a map. Parameters follow the plane normal forms and the
/// column convention α(x_j) = Σ_i A_ij x_i for linear maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapClass {
    Linear(Matrix),
    /// x ↦ βx + γ.
    UnivariateAffine { beta: Scalar, gamma: Scalar },
    /// x ↦ λx, y ↦ μy.
    TriangularI { lambda: Scalar, mu: Scalar },
    /// x ↦ λx, y ↦ y + c with c ≠ 0.
    TriangularII { lambda: Scalar, c: Scalar },
    /// x ↦ λx + Σ η_i y^i, y ↦ μy with η_i ≠ 0 only where λ = μ^i.
    TriangularIII { lambda: Scalar, mu: Scalar, eta: Vec<(u32, Scalar)> },
    /// x ↦ y, y ↦ λx + β(y) with deg β ≥ 2.
    GeneralizedHenon { lambda: Scalar, beta: UniPoly },
    /// α(X^n) = X^{Mn} on a Laurent ring, M ∈ GL_t(ℤ).
    Monomial(Vec<Vec<i64>>),
    /// h_1 ∘ h_2 ∘ … of Hénon factors (h_1 applied last).
    CompositionList(Vec<HenonFactor>),
    Unclassified,
}

impl MapClass {
    pub fn tag(&self) -> &'static str {
        match self {
            MapClass::Linear(_) => "Linear",
            MapClass::UnivariateAffine { .. } => "UnivariateAffine",
            MapClass::TriangularI { .. } => "TriangularI",
            MapClass::TriangularII { .. } => "TriangularII",
            MapClass::TriangularIII { .. } => "TriangularIII",
            MapClass::GeneralizedHenon { .. } => "GeneralizedHenon",
            MapClass::Monomial(_) => "Monomial",
            MapClass::CompositionList(_) => "CompositionList",
            MapClass::Unclassified => "Unclassified",
        }
    }

    /// Named parameters, rendered as strings.
    pub fn params(&self) -> Vec<(String, String)> {
        let p = |k: &str, v: String| (k.to_string(), v);
        match self {
            MapClass::Linear(m) => vec![p("matrix", m.to_string())],
            MapClass::UnivariateAffine { beta, gamma } => vec![p("beta", beta.to_string()), p("gamma", gamma.to_string())],
            MapClass::TriangularI { lambda, mu } => vec![p("lambda", lambda.to_string()), p("mu", mu.to_string())],
            MapClass::TriangularII { lambda, c } => vec![p("lambda", lambda.to_string()), p("c", c.to_string())],
            MapClass::TriangularIII { lambda, mu, eta } => {
                let mut v = vec![p("lambda", lambda.to_string()), p("mu", mu.to_string())];
                for (i, e) in eta {
                    v.push(p(&format!("eta_{i}"), e.to_string()));
                }
                v
            }
            MapClass::GeneralizedHenon { lambda, beta } => {
                vec![p("lambda", lambda.to_string()), p("beta", beta.to_string().replace('t', "y"))]
            }
            MapClass::Monomial(m) => vec![p("matrix", format!("{m:?}"))],
            MapClass::CompositionList(fs) => fs
                .iter()
                .enumerate()
                .map(|(i, f)| p(&format!("factor_{i}"), format!("lambda={}, beta={}", f.lambda, f.beta.to_string().replace('t', "y"))))
                .collect(),
            MapClass::Unclassified => vec![],
        }
    }
}

impl fmt::Display for MapClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())?;
        let params = self.params();
        if !params.is_empty() {
            let body: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", body.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for MapClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let params = self.params();
        let mut m = s.serialize_map(Some(params.len() + 1))?;
        m.serialize_entry("tag", self.tag())?;
        for (k, v) in &params {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

/// Outcome of an order computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome")]
pub enum OrderVerdict {
    Finite { n: u64 },
    InfiniteCertified { reason: String },
    UnknownBeyondBound { bound: u64 },
}

impl OrderVerdict {
    fn infinite(reason: impl Into<String>) -> OrderVerdict {
        OrderVerdict::InfiniteCertified { reason: reason.into() }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, OrderVerdict::Finite { .. })
    }
}

impl fmt::Display for OrderVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderVerdict::Finite { n } => write!(f, "Finite({n})"),
            OrderVerdict::InfiniteCertified { reason } => write!(f, "InfiniteCertified({reason})"),
            OrderVerdict::UnknownBeyondBound { bound } => write!(f, "UnknownBeyondBound({bound})"),
        }
    }
}

/// Steps of power iteration allowed for a matrix over 𝔽_p.
pub const FP_LINEAR_ORDER_CAP: u64 = 200_000;
/// Total-degree ceiling for bounded iteration of general maps.
pub const ITERATION_DEGREE_CAP: i64 = 64;

/// A ring endomorphism given by generator images, with an inverse verified at
/// construction whenever one is known.
#[derive(Clone, Debug)]
pub struct AlgebraMap {
    ring: Arc<CoeffRing>,
    images: Vec<MultiPoly>,
    class: MapClass,
    inverse_images: Option<Vec<MultiPoly>>,
}

impl PartialEq for AlgebraMap {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images
    }
}

impl AlgebraMap {
    /// Classifies the map and derives its inverse when the class allows it.
    pub fn from_images(ring: &Arc<CoeffRing>, images: Vec<MultiPoly>) -> Result<AlgebraMap> {
        let images = check_images(ring, images)?;
        let class = auto_classify(ring, &images)?;
        let mut map = AlgebraMap { ring: ring.clone(), images, class, inverse_images: None };
        map.inverse_images = map.derived_inverse()?;
        map.verify_inverse()?;
        Ok(map)
    }

    /// A map with an explicitly supplied inverse; both compositions are checked.
    pub fn with_inverse(ring: &Arc<CoeffRing>, images: Vec<MultiPoly>, inverse: Vec<MultiPoly>) -> Result<AlgebraMap> {
        let images = check_images(ring, images)?;
        let inverse = check_images(ring, inverse)?;
        let class = auto_classify(ring, &images)?;
        let map = AlgebraMap { ring: ring.clone(), images, class, inverse_images: Some(inverse) };
        map.verify_inverse()?;
        Ok(map)
    }

    pub fn identity(ring: &Arc<CoeffRing>) -> AlgebraMap {
        let images = (0..ring.arity()).map(|i| MultiPoly::var(ring, i)).collect();
        AlgebraMap::from_images(ring, images).expect("identity is an automorphism")
    }

    /// α(x_j) = Σ_i A_ij x_i.
    pub fn linear(ring: &Arc<CoeffRing>, a: &Matrix) -> Result<AlgebraMap> {
        let t = ring.arity();
        if a.rows() != t || a.cols() != t {
            return precondition(format!("linear map needs a {t}x{t} matrix"));
        }
        let images = (0..t)
            .map(|j| {
                (0..t).fold(MultiPoly::zero(ring), |acc, i| {
                    &acc + &MultiPoly::var(ring, i).scale(a.get(i, j))
                })
            })
            .collect();
        AlgebraMap::from_images(ring, images)
    }

    /// α(x_j) = X^{M e_j} on a Laurent ring.
    pub fn monomial(ring: &Arc<CoeffRing>, m: &[Vec<i64>]) -> Result<AlgebraMap> {
        let t = ring.arity();
        if !ring.is_laurent() {
            return precondition("monomial automorphisms live on Laurent rings");
        }
        if m.len() != t || m.iter().any(|r| r.len() != t) {
            return precondition(format!("monomial map needs a {t}x{t} integer matrix"));
        }
        let images = (0..t)
            .map(|j| {
                let e: Vec<i32> = (0..t).map(|i| m[i][j] as i32).collect();
                MultiPoly::monomial(ring, Scalar::one(ring.field()), Monomial::new(e))
            })
            .collect::<Result<Vec<_>>>()?;
        AlgebraMap::from_images(ring, images)
    }

    /// x ↦ y, y ↦ λx + β(y) on a two-variable polynomial ring.
    pub fn henon(ring: &Arc<CoeffRing>, lambda: &Scalar, beta: &UniPoly) -> Result<AlgebraMap> {
        AlgebraMap::henon_composition(ring, &[HenonFactor { lambda: lambda.clone(), beta: beta.clone() }])
    }

    /// h_1 ∘ h_2 ∘ … ∘ h_k for Hénon factors h_i.
    pub fn henon_composition(ring: &Arc<CoeffRing>, factors: &[HenonFactor]) -> Result<AlgebraMap> {
        if ring.arity() != 2 || ring.kind() != &RingKind::Polynomial {
            return precondition("Hénon maps act on a two-variable polynomial ring");
        }
        if factors.is_empty() {
            return precondition("empty Hénon composition");
        }
        let mut maps = Vec::new();
        for f in factors {
            if f.lambda.is_zero() {
                return precondition("Hénon factor needs λ ≠ 0");
            }
            let x = MultiPoly::var(ring, 0);
            let y = MultiPoly::var(ring, 1);
            let beta_y = MultiPoly::from_unipoly(ring, &f.beta, 1)?;
            let images = vec![y, &x.scale(&f.lambda) + &beta_y];
            maps.push(AlgebraMap::from_images(ring, images)?);
        }
        let mut acc = maps[0].clone();
        for m in &maps[1..] {
            acc = acc.compose(m)?;
        }
        if factors.len() > 1 {
            acc.class = MapClass::CompositionList(factors.to_vec());
        }
        Ok(acc)
    }

    pub fn ring(&self) -> &Arc<CoeffRing> {
        &self.ring
    }

    pub fn images(&self) -> &[MultiPoly] {
        &self.images
    }

    pub fn class(&self) -> &MapClass {
        &self.class
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse_images.is_some()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, p)| *p == MultiPoly::var(&self.ring, i))
    }

    pub fn apply(&self, f: &MultiPoly) -> Result<MultiPoly> {
        if **f.ring() != *self.ring {
            return Err(Error::RingMismatch(format!("{} vs {}", f.ring(), self.ring)));
        }
        f.substitute(&self.images)
    }

    /// self ∘ other: apply(compose(a, b), f) = a(b(f)).
    pub fn compose(&self, other: &AlgebraMap) -> Result<AlgebraMap> {
        if *self.ring != *other.ring {
            return Err(Error::RingMismatch("composition across rings".into()));
        }
        let images = other.images.iter().map(|p| p.substitute(&self.images)).collect::<Result<Vec<_>>>()?;
        let inverse_images = match (&self.inverse_images, &other.inverse_images) {
            (Some(a), Some(b)) => Some(a.iter().map(|p| p.substitute(b)).collect::<Result<Vec<_>>>()?),
            _ => None,
        };
        let class = auto_classify(&self.ring, &images)?;
        Ok(AlgebraMap { ring: self.ring.clone(), images, class, inverse_images })
    }

    pub fn inverse(&self) -> Result<AlgebraMap> {
        let inv = self.inverse_images.clone().ok_or_else(|| {
            Error::Unsupported(format!("no inverse known for a map of class {}", self.class.tag()))
        })?;
        let class = match &self.class {
            MapClass::CompositionList(_) => MapClass::Unclassified,
            _ => auto_classify(&self.ring, &inv)?,
        };
        Ok(AlgebraMap { ring: self.ring.clone(), images: inv, class, inverse_images: Some(self.images.clone()) })
    }

    /// α^k for k ∈ ℤ.
    pub fn pow(&self, k: i64) -> Result<AlgebraMap> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut acc = AlgebraMap::identity(&self.ring);
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base)?;
        }
        Ok(acc)
    }

    fn verify_inverse(&self) -> Result<()> {
        let Some(inv) = &self.inverse_images else { return Ok(()) };
        for (i, p) in inv.iter().enumerate() {
            let x = MultiPoly::var(&self.ring, i);
            if p.substitute(&self.images)? != x || self.images[i].substitute(inv)? != x {
                return Err(Error::Invariant(format!(
                    "inverse does not invert the map at generator {}",
                    self.ring.vars()[i]
                )));
            }
        }
        Ok(())
    }

    fn derived_inverse(&self) -> Result<Option<Vec<MultiPoly>>> {
        let r = &self.ring;
        let f = r.field();
        let var = |i| MultiPoly::var(r, i);
        let c = |s: &Scalar| MultiPoly::constant(r, s.clone());
        Ok(match &self.class {
            MapClass::Linear(a) => {
                let Some(inv) = a.inverse() else {
                    return precondition("linear map is singular, so it is not an automorphism");
                };
                let t = r.arity();
                Some(
                    (0..t)
                        .map(|j| (0..t).fold(MultiPoly::zero(r), |acc, i| &acc + &var(i).scale(inv.get(i, j))))
                        .collect(),
                )
            }
            MapClass::UnivariateAffine { beta, gamma } => {
                let bi = beta.inv()?;
                Some(vec![(&var(0) - &c(gamma)).scale(&bi)])
            }
            MapClass::TriangularI { lambda, mu } => Some(vec![var(0).scale(&lambda.inv()?), var(1).scale(&mu.inv()?)]),
            MapClass::TriangularII { lambda, c: shift } => Some(vec![var(0).scale(&lambda.inv()?), &var(1) - &c(shift)]),
            MapClass::TriangularIII { lambda, mu, eta } => {
                let y_back = var(1).scale(&mu.inv()?);
                let mut sum = MultiPoly::zero(r);
                for (i, e) in eta {
                    sum = &sum + &y_back.pow(*i).scale(e);
                }
                Some(vec![(&var(0) - &sum).scale(&lambda.inv()?), y_back])
            }
            MapClass::GeneralizedHenon { lambda, beta } => {
                let beta_x = MultiPoly::from_unipoly(r, beta, 0)?;
                Some(vec![(&var(1) - &beta_x).scale(&lambda.inv()?), var(0)])
            }
            MapClass::Monomial(m) => {
                let inv = int_matrix_inverse(m)
                    .ok_or_else(|| Error::Precondition("exponent matrix is not in GL_t(Z)".into()))?;
                let t = r.arity();
                Some(
                    (0..t)
                        .map(|j| {
                            let e: Vec<i32> = (0..t).map(|i| inv[i][j] as i32).collect();
                            MultiPoly::monomial(r, Scalar::one(f), Monomial::new(e))
                        })
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            MapClass::CompositionList(_) | MapClass::Unclassified => None,
        })
    }

    /// The map induced on R/I, after checking α(I) ⊆ I on generators.
    pub fn induced(&self, q: &QuotientMap) -> Result<AlgebraMap> {
        if **q.source() != *self.ring {
            return Err(Error::RingMismatch("quotient of a different ring".into()));
        }
        let ideal = q.ideal()?;
        if !ideal.is_stable_under(|g| self.apply(g))? {
            return precondition(format!("ideal {ideal} is not α-stable, so α does not descend"));
        }
        let images = self.images.iter().map(|p| q.reduce(p)).collect::<Result<Vec<_>>>()?;
        let inverse = match &self.inverse_images {
            Some(inv) => {
                let inv_map = AlgebraMap { ring: self.ring.clone(), images: inv.clone(), class: MapClass::Unclassified, inverse_images: None };
                if ideal.is_stable_under(|g| inv_map.apply(g))? {
                    Some(inv.iter().map(|p| q.reduce(p)).collect::<Result<Vec<_>>>()?)
                } else {
                    None
                }
            }
            None => None,
        };
        match inverse {
            Some(inv) => AlgebraMap::with_inverse(q.target(), images, inv),
            None => AlgebraMap::from_images(q.target(), images),
        }
    }

    /// Order of α, certified for the structured classes and by bounded iteration
    /// otherwise.
    pub fn order(&self, bound: u64) -> Result<OrderVerdict> {
        let field = self.ring.field().clone();
        match &self.class {
            MapClass::Linear(a) => linear_finite_order_test(a),
            MapClass::Monomial(m) => linear_finite_order_test(&Matrix::from_ints(&FieldSpec::Rationals, m)),
            MapClass::UnivariateAffine { beta, gamma } => Ok(match root_order(beta)? {
                None => OrderVerdict::infinite(format!("β = {beta} is not a root of unity")),
                Some(m) if !beta.is_one() => OrderVerdict::Finite { n: m },
                Some(_) if gamma.is_zero() => OrderVerdict::Finite { n: 1 },
                Some(_) if field.is_char_zero() => {
                    OrderVerdict::infinite(format!("α^n(x) = x + n·{gamma} never returns to x in characteristic 0"))
                }
                Some(_) => OrderVerdict::Finite { n: field.characteristic() },
            }),
            MapClass::TriangularI { lambda, mu } => Ok(match (root_order(lambda)?, root_order(mu)?) {
                (Some(a), Some(b)) => OrderVerdict::Finite { n: a.lcm(&b) },
                _ => OrderVerdict::infinite("λ or μ is not a root of unity"),
            }),
            MapClass::TriangularII { lambda, c } => Ok(match root_order(lambda)? {
                None => OrderVerdict::infinite(format!("λ = {lambda} is not a root of unity")),
                Some(_) if field.is_char_zero() => {
                    OrderVerdict::infinite(format!("y ↦ y + {c} has infinite order in characteristic 0"))
                }
                Some(a) => OrderVerdict::Finite { n: a.lcm(&field.characteristic()) },
            }),
            MapClass::TriangularIII { lambda, mu, eta } => Ok(match (root_order(lambda)?, root_order(mu)?) {
                (Some(a), Some(b)) => {
                    if eta.is_empty() {
                        OrderVerdict::Finite { n: a.lcm(&b) }
                    } else if field.is_char_zero() {
                        OrderVerdict::infinite("α^n(x) carries the term n·λ^(n−1)·η_i·y^i, nonzero in characteristic 0")
                    } else {
                        OrderVerdict::Finite { n: a.lcm(&b).lcm(&field.characteristic()) }
                    }
                }
                _ => OrderVerdict::infinite("λ or μ is not a root of unity"),
            }),
            MapClass::GeneralizedHenon { beta, .. } => Ok(OrderVerdict::infinite(format!(
                "deg α^n(y) = {}^n grows without bound",
                beta.degree().unwrap_or(0)
            ))),
            MapClass::CompositionList(fs) if fs.iter().all(|f| f.degree() >= 2) => {
                let d: usize = fs.iter().map(|f| f.degree()).product();
                Ok(OrderVerdict::infinite(format!("degree of α^n is {d}^n for a composition of Hénon factors")))
            }
            _ => self.bounded_order(bound),
        }
    }

    /// Reduction of a map with p-integral rational coefficients to F_p.
    /// `None` when some coefficient is not p-integral or the reduction is
    /// not invertible.
    pub fn reduce_mod_p(&self, p: u64) -> Result<Option<AlgebraMap>> {
        let fp = FieldSpec::prime(p)?;
        let src = &self.ring;
        let vars: Vec<&str> = src.vars().iter().map(|s| s.as_str()).collect();
        let target = CoeffRing::new(&fp, &vars, src.kind().clone())?;
        let mut images = Vec::new();
        for f in &self.images {
            let mut terms = Vec::new();
            for (m, c) in f.terms() {
                let Some(r) = c.as_rational() else { return Ok(None) };
                match Scalar::from_rational(&fp, &r) {
                    Ok(s) => terms.push((m.clone(), s)),
                    Err(_) => return Ok(None),
                }
            }
            images.push(MultiPoly::from_terms(&target, terms)?);
        }
        Ok(AlgebraMap::from_images(&target, images).ok().filter(|m| m.has_inverse()))
    }

    fn bounded_order(&self, bound: u64) -> Result<OrderVerdict> {
        let mut acc = self.clone();
        for k in 1..=bound {
            if acc.is_identity() {
                return Ok(OrderVerdict::Finite { n: k });
            }
            let spread = acc
                .images
                .iter()
                .flat_map(|p| p.terms().map(|(m, _)| m.exps().iter().map(|e| e.abs() as i64).sum::<i64>()))
                .max()
                .unwrap_or(0);
            if spread > ITERATION_DEGREE_CAP {
                break;
            }
            acc = acc.compose(self)?;
        }
        Ok(OrderVerdict::UnknownBeyondBound { bound })
    }
}

impl fmt::Display for AlgebraMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, p)) in self.ring.vars().iter().zip(&self.images).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v} -> {p}")?;
        }
        Ok(())
    }
}

impl Serialize for AlgebraMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("ring", &self.ring.to_string())?;
        let images: Vec<(String, String)> =
            self.ring.vars().iter().cloned().zip(self.images.iter().map(|p| p.to_string())).collect();
        m.serialize_entry("images", &images)?;
        m.serialize_entry("class", &self.class)?;
        m.end()
    }
}

fn root_order(a: &Scalar) -> Result<Option<u64>> {
    Ok(match is_root_of_unity(a)? {
        RootOfUnity::Yes { order } => Some(order),
        RootOfUnity::No => None,
    })
}

fn check_images(ring: &Arc<CoeffRing>, images: Vec<MultiPoly>) -> Result<Vec<MultiPoly>> {
    if images.len() != ring.arity() {
        return precondition(format!("expected {} generator images, got {}", ring.arity(), images.len()));
    }
    let mut out = Vec::with_capacity(images.len());
    for p in images {
        let p = if **p.ring() == **ring { p.rehome(ring)? } else { return Err(Error::RingMismatch(format!("image in {} for a map on {}", p.ring(), ring))) };
        if ring.is_laurent() && p.unit_inverse().is_none() {
            return precondition(format!("image {p} is not a unit, so the map does not extend to the Laurent ring"));
        }
        out.push(p);
    }
    // Well-definedness on the quotient shapes.
    match ring.kind() {
        RingKind::UnivariateQuotient { modulus } => {
            let m = UniPoly::new(ring.field(), modulus.clone());
            if !eval_unipoly_at(&m, &out[0]).is_zero() {
                return precondition("image does not respect the defining modulus");
            }
        }
        RingKind::CoordinateAffineQuotient { assignments } => {
            for (j, c) in assignments {
                if !(&out[*j] - &MultiPoly::constant(ring, c.clone())).is_zero() {
                    return precondition(format!("image of {} must equal its assigned value {c}", ring.vars()[*j]));
                }
            }
        }
        _ => {}
    }
    Ok(out)
}

fn eval_unipoly_at(p: &UniPoly, x: &MultiPoly) -> MultiPoly {
    let mut acc = MultiPoly::zero(x.ring());
    for c in p.coeffs().iter().rev() {
        acc = &(&acc * x) + &MultiPoly::constant(x.ring(), c.clone());
    }
    acc
}

fn auto_classify(ring: &Arc<CoeffRing>, images: &[MultiPoly]) -> Result<MapClass> {
    let t = ring.arity();
    let field = ring.field();
    if ring.is_laurent() {
        let singles: Vec<(&Scalar, &Monomial)> = images.iter().map(|p| p.as_single_term().expect("unit image")).collect();
        if singles.iter().all(|(c, _)| c.is_one()) {
            let m: Vec<Vec<i64>> = (0..t).map(|i| (0..t).map(|j| singles[j].1.exps()[i] as i64).collect()).collect();
            let det = int_matrix_det(&m);
            if det != 1.into() && det != (-1).into() {
                return precondition("exponent matrix is not in GL_t(Z), so the map is not an automorphism");
            }
            return Ok(MapClass::Monomial(m));
        }
    }
    if t == 1 && matches!(ring.kind(), RingKind::Polynomial | RingKind::UnivariateQuotient { .. }) {
        let p = &images[0];
        if p.total_degree().unwrap_or(0) <= 1 && p.terms().all(|(m, _)| m.exps()[0] >= 0) {
            let beta = p.coefficient(&Monomial::var(1, 0));
            let gamma = p.coefficient(&Monomial::one(1));
            let degenerate = matches!(ring.kind(), RingKind::UnivariateQuotient { modulus } if modulus.len() == 2);
            if !beta.is_zero() || degenerate {
                if degenerate {
                    return Ok(MapClass::Linear(Matrix::identity(field, 1)));
                }
                return Ok(MapClass::UnivariateAffine { beta, gamma });
            }
            return precondition("x ↦ constant is not an automorphism");
        }
        return Ok(MapClass::Unclassified);
    }
    if let Some(a) = linear_matrix(ring, images) {
        if a.det().is_zero() {
            return precondition("linear map is singular, so it is not an automorphism");
        }
        return Ok(MapClass::Linear(a));
    }
    if t == 2 && ring.kind() == &RingKind::Polynomial {
        let (class, _) = match_plane(ring, images);
        return Ok(class);
    }
    Ok(MapClass::Unclassified)
}

/// Matrix of a map whose images are homogeneous of degree one (or, on a
/// Laurent ring, scaled permutations of the variables).
fn linear_matrix(ring: &Arc<CoeffRing>, images: &[MultiPoly]) -> Option<Matrix> {
    let t = ring.arity();
    let field = ring.field();
    let mut a = Matrix::zeros(field, t, t);
    for (j, p) in images.iter().enumerate() {
        for (m, c) in p.terms() {
            if m.degree() != 1 || !m.is_nonnegative() {
                return None;
            }
            let i = m.exps().iter().position(|&e| e == 1)?;
            a.set(i, j, c.clone());
        }
    }
    Some(a)
}

/// Report of plane normal-form matching.
#[derive(Debug, Clone, Serialize)]
pub struct PlaneReport {
    pub class: MapClass,
    pub notes: Vec<String>,
}

/// Matches a plane map against the triangular types (i)–(iii), generalized
/// Hénon form, or a Hénon composition list.
pub fn classify_plane(alpha: &AlgebraMap) -> Result<PlaneReport> {
    let ring = alpha.ring();
    if ring.arity() != 2 || ring.kind() != &RingKind::Polynomial {
        return precondition(format!("plane classification needs k[x,y], not {ring}"));
    }
    if let MapClass::CompositionList(fs) = alpha.class() {
        let mut notes = Vec::new();
        let low: Vec<usize> = fs.iter().enumerate().filter(|(_, f)| f.degree() < 2).map(|(i, _)| i).collect();
        if low.len() == fs.len() {
            notes.push("composition list is affine-only (every factor has degree < 2), so it is not square".into());
            return Ok(PlaneReport { class: MapClass::Unclassified, notes });
        }
        if !low.is_empty() {
            notes.push(format!("factors {low:?} have degree < 2; the list is not cyclically reduced"));
            return Ok(PlaneReport { class: MapClass::Unclassified, notes });
        }
        return Ok(PlaneReport { class: alpha.class().clone(), notes });
    }
    let (class, notes) = match_plane(ring, alpha.images());
    Ok(PlaneReport { class, notes })
}

fn match_plane(ring: &Arc<CoeffRing>, images: &[MultiPoly]) -> (MapClass, Vec<String>) {
    let field = ring.field();
    let mut notes = Vec::new();
    let x = Monomial::var(2, 0);
    let y = Monomial::var(2, 1);
    let one = Monomial::one(2);
    let (fx, fy) = (&images[0], &images[1]);
    let only = |p: &MultiPoly, allowed: &dyn Fn(&Monomial) -> bool| p.terms().all(|(m, _)| allowed(m));

    // y ↦ μy or y ↦ y + c
    let fy_scaled = only(fy, &|m| *m == y);
    let fy_shift = only(fy, &|m| *m == y || *m == one) && fy.coefficient(&y).is_one() && !fy.coefficient(&one).is_zero();
    let lambda = fx.coefficient(&x);
    let pure_y = |m: &Monomial| m.exps()[0] == 0;

    if !lambda.is_zero() && only(fx, &|m| *m == x) {
        if fy_scaled && !fy.is_zero() {
            return (MapClass::TriangularI { lambda, mu: fy.coefficient(&y) }, notes);
        }
        if fy_shift {
            return (MapClass::TriangularII { lambda, c: fy.coefficient(&one) }, notes);
        }
    }
    if !lambda.is_zero() && fy_scaled && !fy.is_zero() && only(fx, &|m| *m == x || pure_y(m)) {
        let mu = fy.coefficient(&y);
        let mut eta = Vec::new();
        let mut ok = true;
        for (m, c) in fx.terms() {
            if *m == x {
                continue;
            }
            let i = m.exps()[1] as u32;
            if mu.pow_u(i as u64) != lambda {
                notes.push(format!(
                    "coefficient of y^{i} is nonzero but λ = {lambda} ≠ μ^{i} = {}, violating the type (iii) constraint",
                    mu.pow_u(i as u64)
                ));
                ok = false;
            }
            eta.push((i, c.clone()));
        }
        if ok {
            return (MapClass::TriangularIII { lambda, mu, eta }, notes);
        }
        return (MapClass::Unclassified, notes);
    }
    if *fx == MultiPoly::var(ring, 1) {
        let lam = fy.coefficient(&x);
        if !lam.is_zero() && only(fy, &|m| *m == x || pure_y(m)) {
            let mut beta = vec![Scalar::zero(field); fy.degree_in(1).unwrap_or(0).max(0) as usize + 1];
            for (m, c) in fy.terms() {
                if *m != x {
                    beta[m.exps()[1] as usize] = c.clone();
                }
            }
            let beta = UniPoly::new(field, beta);
            if beta.degree().unwrap_or(0) >= 2 {
                return (MapClass::GeneralizedHenon { lambda: lam, beta }, notes);
            }
            notes.push("Hénon-shaped but deg β < 2, so the map is affine and not a generalized Hénon map".into());
            return (MapClass::Unclassified, notes);
        }
    }
    notes.push("presentation matches none of the listed normal forms; conjugacy is not decided".into());
    (MapClass::Unclassified, notes)
}

/// Finite-order test for an invertible matrix. In characteristic 0 the minimal
/// polynomial must be squarefree and a product of cyclotomic factors Φ_d with
/// φ(d) ≤ t·[K:ℚ]. Over 𝔽_p the order is found by power iteration.
pub fn linear_finite_order_test(a: &Matrix) -> Result<OrderVerdict> {
    if !a.is_square() {
        return precondition("matrix must be square");
    }
    let t = a.rows();
    if t == 0 {
        return Ok(OrderVerdict::Finite { n: 1 });
    }
    if a.det().is_zero() {
        return precondition("singular matrix");
    }
    let field = a.field().clone();
    if !field.is_char_zero() {
        let mut p = a.clone();
        for k in 1..=FP_LINEAR_ORDER_CAP {
            if p.is_identity() {
                return Ok(OrderVerdict::Finite { n: k });
            }
            p = p.mul(a);
        }
        return Ok(OrderVerdict::UnknownBeyondBound { bound: FP_LINEAR_ORDER_CAP });
    }
    let minpoly = a.min_poly();
    if !minpoly.is_squarefree() {
        return Ok(OrderVerdict::infinite(format!(
            "minimal polynomial {minpoly} is not squarefree, so α is not diagonalisable"
        )));
    }
    let budget = (t * field.degree()) as u64;
    let mut rest = minpoly.clone();
    let mut order = 1u64;
    for d in cyclotomic_candidates(budget) {
        let g = rest.gcd(&cyclotomic_poly_in(&field, d as u32));
        if g.degree().unwrap_or(0) > 0 {
            rest = rest.div_rem(&g).expect("nonzero").0;
            order = order.lcm(&d);
        }
        if rest.degree() == Some(0) {
            return Ok(OrderVerdict::Finite { n: order });
        }
    }
    Ok(OrderVerdict::infinite(format!(
        "minimal polynomial {minpoly} has a factor {rest} that is not cyclotomic, so some eigenvalue is not a root of unity"
    )))
}

/// All d with φ(d) ≤ budget, scanning d ≤ 2·budget² + 2.
pub fn cyclotomic_candidates(budget: u64) -> Vec<u64> {
    (1..=2 * budget * budget + 2).filter(|&d| euler_phi(d) <= budget).collect()
}

impl QuotientMap {
    /// The ideal I of the source ring with target R/I.
    pub fn ideal(&self) -> Result<Ideal> {
        let src = self.source();
        match self.target().kind() {
            RingKind::UnivariateQuotient { modulus } => {
                let m = UniPoly::new(src.field(), modulus.clone());
                Ideal::principal(&MultiPoly::from_unipoly(src, &m, 0)?)
            }
            RingKind::CoordinateAffineQuotient { assignments } => {
                let gens: Vec<MultiPoly> = assignments
                    .iter()
                    .map(|(j, c)| &MultiPoly::var(src, *j) - &MultiPoly::constant(src, c.clone()))
                    .collect();
                Ideal::from_generators(src, &gens)
            }
            _ => Ok(Ideal::zero(src)),
        }
    }
}
