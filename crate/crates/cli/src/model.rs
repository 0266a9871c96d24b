//! Turns a validated [`SpecFile`] into core objects.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use skew_core::automorph::{AlgebraMap, HenonFactor};
use skew_core::dynamics::Point;
use skew_core::linalg::Matrix;
use skew_core::modlab::{PolySkew, PolySkewRing};
use skew_core::poly::{CoeffRing, Ideal, MultiPoly, RingKind};
use skew_core::scalars::{FieldSpec, Scalar};
use skew_core::skew::{PolyContext, SkewRing};

use crate::spec::{Base, Decl, Expr, FieldDecl, Literal, RingDecl, SpecFile};
use crate::CliError;

/// Largest exponent magnitude accepted in an expression.
pub const MAX_EXPONENT: i64 = 256;

#[derive(Clone, Debug)]
pub struct Model {
    pub field: FieldSpec,
    pub ring: Arc<CoeffRing>,
    pub alpha: Option<AlgebraMap>,
    pub lets: BTreeMap<String, MultiPoly>,
    pub ideals: BTreeMap<String, Ideal>,
    pub points: BTreeMap<String, Point>,
}

fn at(line: usize) -> impl Fn(skew_core::Error) -> CliError {
    move |source| CliError::Build { line, source }
}

/// Arithmetic the expression evaluator needs.
trait Algebra {
    type V: Clone;
    fn scalar(&self, s: Scalar) -> Self::V;
    fn var(&self, name: &str) -> Result<Self::V, skew_core::Error>;
    fn theta(&self) -> Result<Self::V, skew_core::Error>;
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn sub(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Result<Self::V, skew_core::Error>;
    fn pow(&self, a: &Self::V, e: i64) -> Result<Self::V, skew_core::Error>;
}

fn literal(field: &FieldSpec, l: &Literal) -> Result<Scalar, skew_core::Error> {
    let num = BigInt::from(l.num.clone());
    let den = l.den.clone().map_or_else(|| BigInt::from(1), BigInt::from);
    Ok(Scalar::from_rational(field, &BigRational::new(num, den))?)
}

fn eval<A: Algebra>(alg: &A, field: &FieldSpec, e: &Expr) -> Result<A::V, skew_core::Error> {
    let mut acc: Option<A::V> = None;
    for (neg, term) in &e.terms {
        let mut t: Option<A::V> = None;
        for f in &term.0 {
            let b = match &f.base {
                Base::Num(l) => alg.scalar(literal(field, l)?),
                Base::Zeta => alg.scalar(Scalar::zeta(field)?),
                Base::Theta => alg.theta()?,
                Base::Var(v) => alg.var(v)?,
                Base::Paren(inner) => eval(alg, field, inner)?,
            };
            let b = match f.exp {
                None => b,
                Some(k) if k.abs() > MAX_EXPONENT => {
                    return Err(skew_core::Error::Unsupported(format!("exponent {k} exceeds {MAX_EXPONENT}")));
                }
                Some(k) => alg.pow(&b, k)?,
            };
            t = Some(match t {
                None => b,
                Some(prev) => alg.mul(&prev, &b)?,
            });
        }
        let t = t.expect("terms are nonempty");
        acc = Some(match (acc, neg) {
            (None, false) => t,
            (None, true) => alg.sub(&alg.scalar(Scalar::zero(field)), &t),
            (Some(a), false) => alg.add(&a, &t),
            (Some(a), true) => alg.sub(&a, &t),
        });
    }
    Ok(acc.expect("expressions are nonempty"))
}

struct PolyAlg<'a> {
    ring: &'a Arc<CoeffRing>,
    lets: &'a BTreeMap<String, MultiPoly>,
}

impl Algebra for PolyAlg<'_> {
    type V = MultiPoly;

    fn scalar(&self, s: Scalar) -> MultiPoly {
        MultiPoly::constant(self.ring, s)
    }

    fn var(&self, name: &str) -> Result<MultiPoly, skew_core::Error> {
        if let Some(i) = self.ring.var_index(name) {
            return Ok(MultiPoly::var(self.ring, i));
        }
        self.lets
            .get(name)
            .cloned()
            .ok_or_else(|| skew_core::Error::Precondition(format!("unknown name {name:?}")))
    }

    fn theta(&self) -> Result<MultiPoly, skew_core::Error> {
        Err(skew_core::Error::Precondition("theta is only allowed in skew expressions".into()))
    }

    fn add(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        a + b
    }

    fn sub(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        a - b
    }

    fn mul(&self, a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly, skew_core::Error> {
        Ok(a * b)
    }

    fn pow(&self, a: &MultiPoly, e: i64) -> Result<MultiPoly, skew_core::Error> {
        a.pow_i(e as i32)
    }
}

struct SkewAlg<'a> {
    sr: &'a PolySkewRing,
    poly: PolyAlg<'a>,
}

impl Algebra for SkewAlg<'_> {
    type V = PolySkew;

    fn scalar(&self, s: Scalar) -> PolySkew {
        self.sr.constant(self.poly.scalar(s))
    }

    fn var(&self, name: &str) -> Result<PolySkew, skew_core::Error> {
        Ok(self.sr.constant(self.poly.var(name)?))
    }

    fn theta(&self) -> Result<PolySkew, skew_core::Error> {
        self.sr.theta_pow(1)
    }

    fn add(&self, a: &PolySkew, b: &PolySkew) -> PolySkew {
        self.sr.add(a, b)
    }

    fn sub(&self, a: &PolySkew, b: &PolySkew) -> PolySkew {
        self.sr.sub(a, b)
    }

    fn mul(&self, a: &PolySkew, b: &PolySkew) -> Result<PolySkew, skew_core::Error> {
        self.sr.mul(a, b)
    }

    fn pow(&self, a: &PolySkew, e: i64) -> Result<PolySkew, skew_core::Error> {
        if e >= 0 {
            return self.sr.pow(a, e as u32);
        }
        // Only single terms c·θ^k with c a unit have inverses here.
        let mut terms = a.terms();
        match (terms.next(), terms.next()) {
            (Some((k, c)), None) => {
                let ci = c
                    .unit_inverse()
                    .ok_or_else(|| skew_core::Error::Precondition(format!("{c} is not a unit")))?;
                // (cθ^k)^{-1} = θ^{-k} c^{-1} = α^{-k}(c^{-1}) θ^{-k}
                let inv = self.sr.term(self.sr.coeffs().apply_power(&ci, -k)?, -k)?;
                self.sr.pow(&inv, e.unsigned_abs() as u32)
            }
            _ => Err(skew_core::Error::Precondition("only monomials can be inverted".into())),
        }
    }
}

fn field_spec(f: &FieldDecl) -> Result<FieldSpec, skew_core::Error> {
    Ok(match f {
        FieldDecl::Q => FieldSpec::Rationals,
        FieldDecl::Fp(p) => FieldSpec::prime(*p)?,
        FieldDecl::Qzeta(n) => FieldSpec::cyclotomic(*n)?,
    })
}

/// Builds the ring, automorphism and named objects of a spec.
pub fn build(spec: &SpecFile) -> Result<Model, CliError> {
    let ring_line = spec.lines[spec.decls.iter().position(|d| matches!(d, Decl::Ring(_))).expect("validated")];
    let field = field_spec(spec.field()).map_err(at(spec.lines[0]))?;
    let ring = match spec.ring() {
        RingDecl::Poly(vs) => {
            let vs: Vec<&str> = vs.iter().map(|s| s.as_str()).collect();
            CoeffRing::new(&field, &vs, RingKind::Polynomial)
        }
        RingDecl::Laurent(vs) => {
            let vs: Vec<&str> = vs.iter().map(|s| s.as_str()).collect();
            CoeffRing::new(&field, &vs, RingKind::Laurent)
        }
        RingDecl::Quot(x, m) => {
            let base = CoeffRing::polynomial(&field, &[x.as_str()]);
            let none = BTreeMap::new();
            let mp = eval(&PolyAlg { ring: &base, lets: &none }, &field, m).map_err(at(ring_line))?;
            let up = mp.to_unipoly().expect("univariate");
            if up.degree().unwrap_or(0) == 0 {
                return Err(CliError::Build {
                    line: ring_line,
                    source: skew_core::Error::Precondition("modulus must have degree at least 1".into()),
                });
            }
            let monic = up.monic();
            CoeffRing::new(&field, &[x.as_str()], RingKind::UnivariateQuotient { modulus: monic.coeffs().to_vec() })
        }
    }
    .map_err(at(ring_line))?;

    let mut lets = BTreeMap::new();
    let mut ideals = BTreeMap::new();
    let mut points = BTreeMap::new();
    let mut images: Vec<Option<MultiPoly>> = vec![None; ring.arity()];
    let mut henon: Vec<HenonFactor> = Vec::new();
    let mut alpha: Option<AlgebraMap> = None;
    let mut auto_line = 0;

    for (d, &line) in spec.decls.iter().zip(&spec.lines) {
        let alg = PolyAlg { ring: &ring, lets: &lets };
        let ev = |e: &Expr| eval(&alg, &field, e).map_err(at(line));
        let constant = |e: &Expr| -> Result<Scalar, CliError> {
            ev(e)?.constant_value().ok_or_else(|| CliError::Build {
                line,
                source: skew_core::Error::Precondition(format!("{e} is not a constant")),
            })
        };
        match d {
            Decl::Field(_) | Decl::Ring(_) => {}
            Decl::AutoImage { var, expr } => {
                auto_line = line;
                let i = ring.var_index(var).expect("validated");
                images[i] = Some(ev(expr)?);
            }
            Decl::AutoLinear(m) => {
                let rows = m.iter().map(|r| r.iter().map(&constant).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
                alpha = Some(AlgebraMap::linear(&ring, &Matrix::from_rows(&field, rows)).map_err(at(line))?);
            }
            Decl::AutoMonomial(m) => {
                alpha = Some(AlgebraMap::monomial(&ring, m).map_err(at(line))?);
            }
            Decl::AutoHenon { lambda, beta } => {
                auto_line = line;
                let lambda = constant(lambda)?;
                let beta = ev(beta)?;
                let y_only = MultiPoly::from_terms(
                    &CoeffRing::polynomial(&field, &["y"]),
                    beta.terms().map(|(m, c)| (skew_core::poly::Monomial::new(vec![m.exps()[1]]), c.clone())),
                )
                .map_err(at(line))?;
                let beta = y_only.to_unipoly().expect("univariate");
                henon.push(HenonFactor { lambda, beta });
            }
            Decl::Let { name, expr } => {
                let v = ev(expr)?;
                lets.insert(name.clone(), v);
            }
            Decl::Ideal { name, gens } => {
                let gs = gens.iter().map(&ev).collect::<Result<Vec<_>, _>>()?;
                ideals.insert(name.clone(), Ideal::from_generators(&ring, &gs).map_err(at(line))?);
            }
            Decl::Point { name, coords } => {
                let p = coords.iter().map(&constant).collect::<Result<Vec<_>, _>>()?;
                points.insert(name.clone(), p);
            }
        }
    }
    if images.iter().any(|i| i.is_some()) {
        let imgs = images.into_iter().map(|i| i.expect("validated complete")).collect();
        alpha = Some(AlgebraMap::from_images(&ring, imgs).map_err(at(auto_line))?);
    }
    if !henon.is_empty() {
        let a = if henon.len() == 1 {
            AlgebraMap::henon(&ring, &henon[0].lambda, &henon[0].beta)
        } else {
            AlgebraMap::henon_composition(&ring, &henon)
        };
        alpha = Some(a.map_err(at(auto_line))?);
    }
    Ok(Model { field, ring, alpha, lets, ideals, points })
}

impl Model {
    pub fn alpha(&self) -> Result<&AlgebraMap, CliError> {
        self.alpha.as_ref().ok_or_else(|| CliError::Usage("the spec declares no automorphism".into()))
    }

    /// Evaluates an expression in the coefficient ring; let-bound names are in scope.
    pub fn poly(&self, e: &Expr) -> Result<MultiPoly, CliError> {
        Ok(eval(&PolyAlg { ring: &self.ring, lets: &self.lets }, &self.field, e)?)
    }

    pub fn constant(&self, e: &Expr) -> Result<Scalar, CliError> {
        self.poly(e)?
            .constant_value()
            .ok_or_else(|| CliError::Usage(format!("{e} is not a constant")))
    }

    /// S = R[θ; α] (or the Laurent extension when `laurent`).
    pub fn skew_ring(&self, laurent: bool) -> Result<PolySkewRing, CliError> {
        Ok(SkewRing::new(PolyContext::new(self.alpha()?.clone()), laurent)?)
    }

    pub fn skew(&self, sr: &PolySkewRing, e: &Expr) -> Result<PolySkew, CliError> {
        let alg = SkewAlg { sr, poly: PolyAlg { ring: &self.ring, lets: &self.lets } };
        Ok(eval(&alg, &self.field, e)?)
    }

    /// A declared ideal by name, or the principal ideal of an expression.
    pub fn ideal(&self, arg: &str) -> Result<Ideal, CliError> {
        if let Some(i) = self.ideals.get(arg.trim()) {
            return Ok(i.clone());
        }
        let e = crate::spec::parse_expr(arg)?;
        Ok(Ideal::principal(&self.poly(&e)?)?)
    }
}
