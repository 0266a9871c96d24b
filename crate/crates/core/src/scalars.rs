//! Exact scalars over ℚ, ℚ(ζ_n) and 𝔽_p, dense univariate polynomials over those
//! fields, and the cyclotomic / root-of-unity utilities built on them.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cyclotomic index must be at least 1")]
    BadCyclotomicIndex,
    #[error("zero has no multiplicative order")]
    ZeroInput,
    #[error("zeta is only available in a cyclotomic field, not {0}")]
    NoZeta(FieldSpec),
}

/// The three supported base fields.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSpec {
    Rationals,
    /// ℚ(ζ_n) = ℚ[t]/(Φ_n).
    Cyclotomic(u32),
    PrimeField(u64),
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self, ScalarError> {
        if is_prime(p) {
            Ok(FieldSpec::PrimeField(p))
        } else {
            Err(ScalarError::NotPrime(p))
        }
    }

    pub fn cyclotomic(n: u32) -> Result<Self, ScalarError> {
        if n == 0 {
            return Err(ScalarError::BadCyclotomicIndex);
        }
        Ok(FieldSpec::Cyclotomic(n))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::PrimeField(p) => *p,
            _ => 0,
        }
    }

    /// [K : prime field].
    pub fn degree(&self) -> usize {
        match self {
            FieldSpec::Cyclotomic(n) => euler_phi(*n as u64) as usize,
            _ => 1,
        }
    }

    pub fn is_char_zero(&self) -> bool {
        self.characteristic() == 0
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Cyclotomic(n) => write!(f, "Qzeta({n})"),
            FieldSpec::PrimeField(p) => write!(f, "Fp({p})"),
        }
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Rational(BigRational),
    Residue { value: u64, p: u64 },
    /// Coefficients of a polynomial in ζ of degree < φ(n), trailing zeros trimmed.
    Cyclotomic { n: u32, coeffs: Vec<BigRational> },
}

/// An element of one of the supported fields, always in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    repr: Repr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked field arithmetic.
pub fn scalar_arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar, ScalarError> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
        ArithOp::Div => a.try_div(b),
    }
}

impl Scalar {
    pub fn zero(field: &FieldSpec) -> Scalar {
        Scalar::from_int(field, 0)
    }

    pub fn one(field: &FieldSpec) -> Scalar {
        Scalar::from_int(field, 1)
    }

    pub fn from_int(field: &FieldSpec, v: i64) -> Scalar {
        Scalar::from_bigint(field, &BigInt::from(v))
    }

    pub fn from_bigint(field: &FieldSpec, v: &BigInt) -> Scalar {
        match field {
            FieldSpec::Rationals => Scalar { repr: Repr::Rational(BigRational::from_integer(v.clone())) },
            FieldSpec::PrimeField(p) => Scalar { repr: Repr::Residue { value: reduce_bigint(v, *p), p: *p } },
            FieldSpec::Cyclotomic(n) => {
                Scalar::cyclo(*n, vec![BigRational::from_integer(v.clone())])
            }
        }
    }

    /// Fails only for 𝔽_p when the denominator vanishes mod p.
    pub fn from_rational(field: &FieldSpec, v: &BigRational) -> Result<Scalar, ScalarError> {
        match field {
            FieldSpec::Rationals => Ok(Scalar { repr: Repr::Rational(v.clone()) }),
            FieldSpec::Cyclotomic(n) => Ok(Scalar::cyclo(*n, vec![v.clone()])),
            FieldSpec::PrimeField(p) => {
                let num = reduce_bigint(v.numer(), *p);
                let den = reduce_bigint(v.denom(), *p);
                if den == 0 {
                    return Err(ScalarError::DivisionByZero);
                }
                Ok(Scalar { repr: Repr::Residue { value: mul_mod(num, inv_mod(den, *p), *p), p: *p } })
            }
        }
    }

    /// The primitive root ζ_n of ℚ(ζ_n).
    pub fn zeta(field: &FieldSpec) -> Result<Scalar, ScalarError> {
        match field {
            FieldSpec::Cyclotomic(n) => {
                Ok(Scalar::cyclo(*n, vec![BigRational::zero(), BigRational::one()]))
            }
            other => Err(ScalarError::NoZeta(other.clone())),
        }
    }

    /// Element of ℚ(ζ_n) from its coefficients in powers of ζ.
    pub fn from_zeta_coeffs(n: u32, coeffs: Vec<BigRational>) -> Scalar {
        Scalar::cyclo(n, coeffs)
    }

    fn cyclo(n: u32, mut coeffs: Vec<BigRational>) -> Scalar {
        let modulus = cyclotomic_int(n);
        reduce_by_monic(&mut coeffs, &modulus);
        trim(&mut coeffs);
        Scalar { repr: Repr::Cyclotomic { n, coeffs } }
    }

    pub fn field(&self) -> FieldSpec {
        match &self.repr {
            Repr::Rational(_) => FieldSpec::Rationals,
            Repr::Residue { p, .. } => FieldSpec::PrimeField(*p),
            Repr::Cyclotomic { n, .. } => FieldSpec::Cyclotomic(*n),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Rational(r) => r.is_zero(),
            Repr::Residue { value, .. } => *value == 0,
            Repr::Cyclotomic { coeffs, .. } => coeffs.is_empty(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Rational(r) => r.is_one(),
            Repr::Residue { value, .. } => *value == 1,
            Repr::Cyclotomic { coeffs, .. } => coeffs.len() == 1 && coeffs[0].is_one(),
        }
    }

    /// The value as a rational number, when it lies in the prime subfield of a
    /// characteristic-zero field.
    pub fn as_rational(&self) -> Option<BigRational> {
        match &self.repr {
            Repr::Rational(r) => Some(r.clone()),
            Repr::Cyclotomic { coeffs, .. } => match coeffs.len() {
                0 => Some(BigRational::zero()),
                1 => Some(coeffs[0].clone()),
                _ => None,
            },
            Repr::Residue { .. } => None,
        }
    }

    /// Canonical residue in [0, p) for prime-field elements.
    pub fn as_residue(&self) -> Option<u64> {
        match &self.repr {
            Repr::Residue { value, .. } => Some(*value),
            _ => None,
        }
    }

    /// Integer value when the scalar is a rational integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|r| r.is_integer()).map(|r| r.to_integer())
    }

    fn check(&self, other: &Scalar) -> Result<(), ScalarError> {
        let (a, b) = (self.field(), other.field());
        if a != b {
            return Err(ScalarError::FieldMismatch(a, b));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Rational(a), Repr::Rational(b)) => Scalar { repr: Repr::Rational(a + b) },
            (Repr::Residue { value: a, p }, Repr::Residue { value: b, .. }) => {
                Scalar { repr: Repr::Residue { value: add_mod(*a, *b, *p), p: *p } }
            }
            (Repr::Cyclotomic { n, coeffs: a }, Repr::Cyclotomic { coeffs: b, .. }) => {
                let mut out = vec![BigRational::zero(); a.len().max(b.len())];
                for (i, c) in a.iter().enumerate() {
                    out[i] += c;
                }
                for (i, c) in b.iter().enumerate() {
                    out[i] += c;
                }
                trim(&mut out);
                Scalar { repr: Repr::Cyclotomic { n: *n, coeffs: out } }
            }
            _ => unreachable!("field checked"),
        })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Rational(a), Repr::Rational(b)) => Scalar { repr: Repr::Rational(a * b) },
            (Repr::Residue { value: a, p }, Repr::Residue { value: b, .. }) => {
                Scalar { repr: Repr::Residue { value: mul_mod(*a, *b, *p), p: *p } }
            }
            (Repr::Cyclotomic { n, coeffs: a }, Repr::Cyclotomic { coeffs: b, .. }) => {
                if a.is_empty() || b.is_empty() {
                    return Ok(Scalar::cyclo(*n, vec![]));
                }
                Scalar::cyclo(*n, rat_poly_mul(a, b))
            }
            _ => unreachable!("field checked"),
        })
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(match &self.repr {
            Repr::Rational(a) => Scalar { repr: Repr::Rational(a.recip()) },
            Repr::Residue { value, p } => Scalar { repr: Repr::Residue { value: inv_mod(*value, *p), p: *p } },
            Repr::Cyclotomic { n, coeffs } => {
                let modulus: Vec<BigRational> =
                    cyclotomic_int(*n).iter().map(|c| BigRational::from_integer(c.clone())).collect();
                let inv = rat_poly_inverse_mod(coeffs, &modulus);
                Scalar::cyclo(*n, inv)
            }
        })
    }

    fn neg_ref(&self) -> Scalar {
        match &self.repr {
            Repr::Rational(a) => Scalar { repr: Repr::Rational(-a) },
            Repr::Residue { value, p } => {
                Scalar { repr: Repr::Residue { value: if *value == 0 { 0 } else { p - value }, p: *p } }
            }
            Repr::Cyclotomic { n, coeffs } => {
                Scalar { repr: Repr::Cyclotomic { n: *n, coeffs: coeffs.iter().map(|c| -c).collect() } }
            }
        }
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Scalar, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        Ok(base.pow_u(e.unsigned_abs()))
    }

    pub fn pow_u(&self, mut e: u64) -> Scalar {
        let mut acc = Scalar::one(&self.field());
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

    /// Whether the leading sign is negative when printed, so that printers can
    /// emit `a - b` instead of `a + -b`.
    pub fn prints_negative(&self) -> bool {
        match &self.repr {
            Repr::Rational(r) => r.is_negative(),
            Repr::Cyclotomic { coeffs, .. } => coeffs.len() == 1 && coeffs[0].is_negative(),
            Repr::Residue { .. } => false,
        }
    }

    /// Whether the printed form is a sum and must be parenthesized as a factor.
    pub fn prints_compound(&self) -> bool {
        match &self.repr {
            Repr::Cyclotomic { coeffs, .. } => coeffs.iter().filter(|c| !c.is_zero()).count() > 1,
            _ => false,
        }
    }

    /// Whether the printed form is a bare number (no ζ).
    pub fn prints_plain_number(&self) -> bool {
        match &self.repr {
            Repr::Cyclotomic { coeffs, .. } => coeffs.len() <= 1,
            _ => true,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Rational(r) => write!(f, "{r}"),
            Repr::Residue { value, .. } => write!(f, "{value}"),
            Repr::Cyclotomic { coeffs, .. } => {
                if coeffs.is_empty() {
                    return write!(f, "0");
                }
                let mut first = true;
                for (k, c) in coeffs.iter().enumerate().rev() {
                    if c.is_zero() {
                        continue;
                    }
                    let neg = c.is_negative();
                    let mag = c.abs();
                    if first {
                        if neg {
                            write!(f, "-")?;
                        }
                    } else {
                        write!(f, "{}", if neg { " - " } else { " + " })?;
                    }
                    first = false;
                    match k {
                        0 => write!(f, "{mag}")?,
                        _ => {
                            if !mag.is_one() {
                                write!(f, "{mag}*")?;
                            }
                            if k == 1 {
                                write!(f, "zeta")?;
                            } else {
                                write!(f, "zeta^{k}")?;
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in {}", self.field())
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A total order used for canonical tie-breaking (smallest point first): by value
/// for ℚ and 𝔽_p residues, lexicographically by ζ-coefficients otherwise.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.repr, &other.repr) {
            (Repr::Rational(a), Repr::Rational(b)) => a.cmp(b),
            (Repr::Residue { value: a, .. }, Repr::Residue { value: b, .. }) => a.cmp(b),
            (Repr::Cyclotomic { coeffs: a, .. }, Repr::Cyclotomic { coeffs: b, .. }) => {
                let n = a.len().max(b.len());
                let z = BigRational::zero();
                for i in 0..n {
                    let x = a.get(i).unwrap_or(&z);
                    let y = b.get(i).unwrap_or(&z);
                    match x.cmp(y) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            _ => self.field().cmp(&other.field()),
        }
    }
}

// Operator impls panic on field mismatch; callers that cannot guarantee matching
// fields use the `try_*` methods.
impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar field mismatch")
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        self.try_sub(rhs).expect("scalar field mismatch")
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar field mismatch")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

/// Result of a root-of-unity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RootOfUnity {
    Yes { order: u64 },
    No,
}

/// Decide whether `a` is a root of unity and, if so, its exact multiplicative order.
pub fn is_root_of_unity(a: &Scalar) -> Result<RootOfUnity, ScalarError> {
    if a.is_zero() {
        return Err(ScalarError::ZeroInput);
    }
    match &a.repr {
        Repr::Rational(r) => {
            if r.is_one() {
                Ok(RootOfUnity::Yes { order: 1 })
            } else if (-r).is_one() {
                Ok(RootOfUnity::Yes { order: 2 })
            } else {
                Ok(RootOfUnity::No)
            }
        }
        Repr::Residue { p, .. } => Ok(RootOfUnity::Yes { order: minimal_order(a, p - 1) }),
        Repr::Cyclotomic { n, .. } => {
            // Roots of unity in ℚ(ζ_n) have order dividing lcm(2, n).
            let bound = (*n as u64).lcm(&2);
            if a.pow_u(bound).is_one() {
                Ok(RootOfUnity::Yes { order: minimal_order(a, bound) })
            } else {
                Ok(RootOfUnity::No)
            }
        }
    }
}

/// Least m dividing `multiple` with a^m = 1, given a^multiple = 1.
fn minimal_order(a: &Scalar, multiple: u64) -> u64 {
    let mut m = multiple;
    for q in prime_factors(multiple) {
        while m % q == 0 && a.pow_u(m / q).is_one() {
            m /= q;
        }
    }
    m
}

/// Dense univariate polynomial over a supported field, coefficients low to high.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UniPoly {
    field: FieldSpec,
    coeffs: Vec<Scalar>,
}

impl UniPoly {
    pub fn new(field: &FieldSpec, mut coeffs: Vec<Scalar>) -> UniPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { field: field.clone(), coeffs }
    }

    pub fn from_ints(field: &FieldSpec, coeffs: &[i64]) -> UniPoly {
        UniPoly::new(field, coeffs.iter().map(|c| Scalar::from_int(field, *c)).collect())
    }

    pub fn zero(field: &FieldSpec) -> UniPoly {
        UniPoly::new(field, vec![])
    }

    pub fn one(field: &FieldSpec) -> UniPoly {
        UniPoly::new(field, vec![Scalar::one(field)])
    }

    /// t^k.
    pub fn monomial(field: &FieldSpec, k: usize) -> UniPoly {
        let mut c = vec![Scalar::zero(field); k + 1];
        c[k] = Scalar::one(field);
        UniPoly::new(field, c)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Scalar::zero(&self.field))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect();
        UniPoly::new(&self.field, c)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect();
        UniPoly::new(&self.field, c)
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero(&self.field);
        }
        let mut out = vec![Scalar::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UniPoly::new(&self.field, out)
    }

    pub fn scale(&self, s: &Scalar) -> UniPoly {
        UniPoly::new(&self.field, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Euclidean division; `None` when dividing by zero.
    pub fn div_rem(&self, d: &UniPoly) -> Option<(UniPoly, UniPoly)> {
        let dd = d.degree()?;
        let lead_inv = d.leading()?.inv().ok()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Some((UniPoly::zero(&self.field), self.clone()));
        }
        let mut quot = vec![Scalar::zero(&self.field); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = &rem[k] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k - dd + j] = &rem[k - dd + j] - &(&c * dc);
            }
            quot[k - dd] = c;
        }
        Some((UniPoly::new(&self.field, quot), UniPoly::new(&self.field, rem)))
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading() {
            None => self.clone(),
            Some(l) => self.scale(&l.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> UniPoly {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * &Scalar::from_int(&self.field, i as i64))
            .collect();
        UniPoly::new(&self.field, c)
    }

    /// Squarefree test via gcd(f, f') over a perfect field.
    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero(&self.field);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// All roots lying in the base field, when they can be found exactly: by the
    /// rational root theorem over ℚ (and ℚ(ζ_n) for rational polynomials), by
    /// exhaustive search over 𝔽_p for p ≤ `search_cap`. `None` means the search
    /// was not attempted.
    pub fn roots_in_field(&self, search_cap: u64) -> Option<Vec<Scalar>> {
        if self.is_zero() {
            return None;
        }
        match &self.field {
            FieldSpec::PrimeField(p) => {
                if *p > search_cap {
                    return None;
                }
                Some(
                    (0..*p)
                        .map(|v| Scalar::from_int(&self.field, v as i64))
                        .filter(|x| self.eval(x).is_zero())
                        .collect(),
                )
            }
            _ => {
                let rats: Option<Vec<BigRational>> = self.coeffs.iter().map(|c| c.as_rational()).collect();
                let rats = rats?;
                let mut roots = rational_roots(&rats)?;
                roots.sort();
                roots.dedup();
                roots
                    .into_iter()
                    .map(|r| Scalar::from_rational(&self.field, &r).ok())
                    .collect()
            }
        }
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.prints_negative();
            let mag = if neg { -c } else { c.clone() };
            if !first {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            first = false;
            let body = if mag.prints_compound() { format!("({mag})") } else { mag.to_string() };
            match k {
                0 => write!(f, "{body}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{body}*")?;
                    }
                    if k == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} over {}", self.field)
    }
}

/// Φ_d over ℚ, by exact division of t^d − 1 by Φ_e for the proper divisors e of d.
pub fn cyclotomic_poly(d: u32) -> UniPoly {
    cyclotomic_poly_in(&FieldSpec::Rationals, d)
}

/// Image of Φ_d (integer coefficients) in the given field.
pub fn cyclotomic_poly_in(field: &FieldSpec, d: u32) -> UniPoly {
    let ints = cyclotomic_int(d);
    UniPoly::new(field, ints.iter().map(|c| Scalar::from_bigint(field, c)).collect())
}

type IntPolyCache = Mutex<HashMap<u32, Arc<Vec<BigInt>>>>;

fn cyclotomic_cache() -> &'static IntPolyCache {
    static CACHE: OnceLock<IntPolyCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Integer coefficients of Φ_d, low to high. Memoized.
fn cyclotomic_int(d: u32) -> Arc<Vec<BigInt>> {
    assert!(d >= 1, "cyclotomic index must be positive");
    if let Some(c) = cyclotomic_cache().lock().unwrap().get(&d) {
        return c.clone();
    }
    // t^d − 1
    let mut num = vec![BigInt::zero(); d as usize + 1];
    num[0] = BigInt::from(-1);
    num[d as usize] = BigInt::one();
    for e in divisors(d as u64) {
        if e == d as u64 {
            continue;
        }
        let phi_e = cyclotomic_int(e as u32);
        num = int_exact_div_monic(&num, &phi_e);
    }
    let out = Arc::new(num);
    cyclotomic_cache().lock().unwrap().insert(d, out.clone());
    out
}

fn int_exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for k in (dd..rem.len()).rev() {
        let c = rem[k].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dc) in den.iter().enumerate() {
            rem[k - dd + j] -= &c * dc;
        }
        quot[k - dd] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()), "inexact cyclotomic division");
    quot
}

fn trim(c: &mut Vec<BigRational>) {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
}

fn reduce_by_monic(c: &mut Vec<BigRational>, modulus: &[BigInt]) {
    let dd = modulus.len() - 1;
    while c.len() > dd {
        let k = c.len() - 1;
        let lead = c[k].clone();
        if !lead.is_zero() {
            for (j, m) in modulus.iter().enumerate() {
                c[k - dd + j] -= &lead * BigRational::from_integer(m.clone());
            }
        }
        c.pop();
    }
}

fn rat_poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn rat_poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    trim(&mut rem);
    let db = b.len() - 1;
    if rem.len() <= db {
        return (vec![], rem);
    }
    let lead = b[db].clone();
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for k in (db..rem.len()).rev() {
        let c = &rem[k] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bc) in b.iter().enumerate() {
            rem[k - db + j] -= &c * bc;
        }
        quot[k - db] = c;
    }
    trim(&mut rem);
    trim(&mut quot);
    (quot, rem)
}

/// Inverse of `a` modulo an irreducible `m` by the extended Euclidean algorithm.
fn rat_poly_inverse_mod(a: &[BigRational], m: &[BigRational]) -> Vec<BigRational> {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    let (mut s0, mut s1): (Vec<BigRational>, Vec<BigRational>) = (vec![], vec![BigRational::one()]);
    trim(&mut r1);
    while r1.len() > 1 {
        let (q, r) = rat_poly_divrem(&r0, &r1);
        let qs = if q.is_empty() || s1.is_empty() { vec![] } else { rat_poly_mul(&q, &s1) };
        let mut s2 = vec![BigRational::zero(); s0.len().max(qs.len())];
        for (i, c) in s0.iter().enumerate() {
            s2[i] += c;
        }
        for (i, c) in qs.iter().enumerate() {
            s2[i] -= c;
        }
        trim(&mut s2);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    // r1 is a nonzero constant since m is irreducible and a ≠ 0 mod m.
    let c = r1[0].clone();
    s1.iter().map(|x| x / &c).collect()
}

/// Rational roots of a polynomial with rational coefficients. Gives up (None)
/// when the integer coefficients are too large to enumerate divisors.
fn rational_roots(coeffs: &[BigRational]) -> Option<Vec<BigRational>> {
    let mut c: Vec<BigRational> = coeffs.to_vec();
    trim(&mut c);
    if c.is_empty() {
        return None;
    }
    let mut roots = Vec::new();
    // factor out t^k
    let lead_zero = c.iter().take_while(|x| x.is_zero()).count();
    if lead_zero > 0 {
        roots.push(BigRational::zero());
        c.drain(..lead_zero);
    }
    if c.len() == 1 {
        return Some(roots);
    }
    let lcm = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = c.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let a0 = ints[0].abs().to_u64()?;
    let an = ints.last().unwrap().abs().to_u64()?;
    const LIMIT: u64 = 1_000_000_000_000;
    if a0 > LIMIT || an > LIMIT {
        return None;
    }
    let eval = |x: &BigRational| {
        let mut acc = BigRational::zero();
        for k in ints.iter().rev() {
            acc = acc * x + BigRational::from_integer(k.clone());
        }
        acc
    };
    for p in divisors(a0) {
        for q in divisors(an) {
            for sign in [1i64, -1] {
                let cand = BigRational::new(BigInt::from(p) * sign, BigInt::from(q));
                if eval(&cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    Some(roots)
}

// ---- integer helpers ----

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    for p in prime_factors(n) {
        result = result / p * (p - 1);
    }
    result
}

/// Positive divisors of n in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Distinct prime factors by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    // p prime
    pow_mod(a, p - 2, p)
}

fn reduce_bigint(v: &BigInt, p: u64) -> u64 {
    let r = v.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_rational(&FieldSpec::Rationals, &BigRational::new(n.into(), d.into())).unwrap()
    }

    #[test]
    fn rational_sum() {
        assert_eq!(scalar_arith(&q(1, 2), &q(1, 3), ArithOp::Add).unwrap(), q(5, 6));
    }

    #[test]
    fn prime_field_product() {
        let f = FieldSpec::prime(7).unwrap();
        let r = scalar_arith(&Scalar::from_int(&f, 3), &Scalar::from_int(&f, 5), ArithOp::Mul).unwrap();
        assert_eq!(r, Scalar::one(&f));
    }

    #[test]
    fn identity_and_errors() {
        let a = q(-7, 3);
        assert_eq!(&a * &Scalar::one(&FieldSpec::Rationals), a);
        assert_eq!(
            scalar_arith(&a, &Scalar::zero(&FieldSpec::Rationals), ArithOp::Div),
            Err(ScalarError::DivisionByZero)
        );
        let f7 = FieldSpec::prime(7).unwrap();
        assert!(matches!(
            scalar_arith(&a, &Scalar::one(&f7), ArithOp::Add),
            Err(ScalarError::FieldMismatch(..))
        ));
        assert_eq!(FieldSpec::prime(4), Err(ScalarError::NotPrime(4)));
        assert_eq!(FieldSpec::cyclotomic(0), Err(ScalarError::BadCyclotomicIndex));
    }

    #[test]
    fn roots_of_unity_examples() {
        assert_eq!(is_root_of_unity(&q(-1, 1)).unwrap(), RootOfUnity::Yes { order: 2 });
        assert_eq!(is_root_of_unity(&q(2, 1)).unwrap(), RootOfUnity::No);
        let f7 = FieldSpec::prime(7).unwrap();
        assert_eq!(is_root_of_unity(&Scalar::from_int(&f7, 3)).unwrap(), RootOfUnity::Yes { order: 6 });
        assert_eq!(is_root_of_unity(&Scalar::zero(&f7)), Err(ScalarError::ZeroInput));
        let k = FieldSpec::cyclotomic(5).unwrap();
        let z = Scalar::zeta(&k).unwrap();
        assert_eq!(is_root_of_unity(&z).unwrap(), RootOfUnity::Yes { order: 5 });
        assert_eq!(is_root_of_unity(&-z.clone()).unwrap(), RootOfUnity::Yes { order: 10 });
        let two = Scalar::from_int(&k, 2);
        assert_eq!(is_root_of_unity(&(&z + &two)).unwrap(), RootOfUnity::No);
    }

    #[test]
    fn cyclotomic_examples() {
        let f = FieldSpec::Rationals;
        assert_eq!(cyclotomic_poly(1), UniPoly::from_ints(&f, &[-1, 1]));
        assert_eq!(cyclotomic_poly(4), UniPoly::from_ints(&f, &[1, 0, 1]));
        assert_eq!(cyclotomic_poly(6), UniPoly::from_ints(&f, &[1, -1, 1]));
        assert_eq!(cyclotomic_poly(12), UniPoly::from_ints(&f, &[1, 0, -1, 0, 1]));
    }

    #[test]
    fn cyclotomic_field_inverse() {
        let k = FieldSpec::cyclotomic(7).unwrap();
        let z = Scalar::zeta(&k).unwrap();
        let a = &(&z * &z) + &Scalar::from_int(&k, 3);
        let b = a.inv().unwrap();
        assert!((&a * &b).is_one());
        // ζ^7 = 1
        assert!(z.pow_u(7).is_one());
    }

    #[test]
    fn display_forms() {
        let k = FieldSpec::cyclotomic(5).unwrap();
        let z = Scalar::zeta(&k).unwrap();
        let a = &(&z * &z) - &Scalar::from_rational(&k, &BigRational::new(1.into(), 2.into())).unwrap();
        assert_eq!(a.to_string(), "zeta^2 - 1/2");
        assert_eq!(q(-3, 2).to_string(), "-3/2");
    }

    #[test]
    fn rational_root_search() {
        let f = FieldSpec::Rationals;
        // (t - 1)(t + 1)(2t - 3) = 2t^3 - 3t^2 - 2t + 3
        let p = UniPoly::from_ints(&f, &[3, -2, -3, 2]);
        let roots = p.roots_in_field(0).unwrap();
        assert_eq!(roots, vec![q(-1, 1), q(1, 1), q(3, 2)]);
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..50).filter(|n| is_prime(*n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
    }

    fn field_of(kind: usize) -> FieldSpec {
        match kind {
            0 => FieldSpec::Rationals,
            1 => FieldSpec::prime(13).unwrap(),
            _ => FieldSpec::cyclotomic(5).unwrap(),
        }
    }

    /// Σ c_i ζ^i with small rational c_i (only c_0 outside cyclotomic fields).
    fn element(field: &FieldSpec, c: &[(i64, i64)]) -> Scalar {
        match field {
            FieldSpec::Cyclotomic(n) => {
                let coeffs = c.iter().map(|&(a, b)| BigRational::new(a.into(), b.into())).collect();
                Scalar::from_zeta_coeffs(*n, coeffs)
            }
            _ => Scalar::from_rational(field, &BigRational::new(c[0].0.into(), c[0].1.into())).unwrap(),
        }
    }

    fn coeffs() -> impl Strategy<Value = Vec<(i64, i64)>> {
        prop::collection::vec((-6i64..=6, 1i64..=4), 4)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn field_axioms(kind in 0usize..3, a in coeffs(), b in coeffs(), c in coeffs()) {
            let f = field_of(kind);
            let (a, b, c) = (element(&f, &a), element(&f, &b), element(&f, &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
                prop_assert_eq!(a.try_div(&a).unwrap(), Scalar::one(&f));
            }
        }

        #[test]
        fn root_of_unity_order_matches_powering(p in prop::sample::select(vec![5u64, 7, 11, 13, 17]), v in 1u64..1000) {
            let f = FieldSpec::prime(p).unwrap();
            let a = Scalar::from_int(&f, (v % (p - 1) + 1) as i64);
            let brute = (1..p).find(|&m| a.pow_u(m).is_one()).unwrap();
            prop_assert_eq!(is_root_of_unity(&a).unwrap(), RootOfUnity::Yes { order: brute });
        }

        #[test]
        fn zeta_powers_have_expected_order(n in 1u32..=12, k in 0u64..24) {
            let f = FieldSpec::cyclotomic(n).unwrap();
            let z = Scalar::zeta(&f).unwrap().pow_u(k);
            let want = n as u64 / (n as u64).gcd(&k);
            prop_assert_eq!(is_root_of_unity(&z).unwrap(), RootOfUnity::Yes { order: want });
            // 1 + ζ^k against brute-force powering
            let w = &z + &Scalar::one(&f);
            let bound = (n as u64).lcm(&2);
            let brute = (1..=bound).find(|&m| !w.is_zero() && w.pow_u(m).is_one());
            match is_root_of_unity(&w) {
                Ok(RootOfUnity::Yes { order }) => prop_assert_eq!(Some(order), brute),
                Ok(RootOfUnity::No) => prop_assert_eq!(brute, None),
                Err(e) => prop_assert!(w.is_zero(), "{}", e),
            }
        }

        #[test]
        fn cyclotomic_product_identity(n in 1u32..=40) {
            let f = FieldSpec::Rationals;
            let prod = divisors(n as u64).into_iter().fold(UniPoly::one(&f), |acc, d| acc.mul(&cyclotomic_poly(d as u32)));
            let mut want = vec![0i64; n as usize + 1];
            want[0] = -1;
            want[n as usize] = 1;
            prop_assert_eq!(prod, UniPoly::from_ints(&f, &want));
        }
    }
}
