//! Finite witnesses for module-theoretic facts about S = R[θ;α]: the lattice
//! correspondence for S/(u−θ)S, normal forms in M = S/ρ(1−θ)S, essentiality
//! probes, non-Artinian chains and matrix-unit identities.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{precondition, Error, Result};
use crate::linalg::Matrix;
use crate::poly::{divide_by_principal, CoeffRing, Ideal, Monomial, MultiPoly};
use crate::scalars::{FieldSpec, Scalar};
use crate::skew::{CyclicIdempotents, PolyContext, SkewPoly, SkewRing, TwistedCoefficients};

pub type PolySkewRing = SkewRing<PolyContext>;
pub type PolySkew = SkewPoly<MultiPoly>;

/// Iterations of α^{-1}-closure before `lattice_contract` gives up.
pub const DEFAULT_CLOSURE_BOUND: usize = 32;

/// The right ideal (u − θ)S + N of S, for an α-stable ideal N of R.
#[derive(Clone, Debug, PartialEq)]
pub struct SubmoduleDesc {
    pub u: Scalar,
    pub ideal: Ideal,
}

impl fmt::Display for SubmoduleDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} - theta)S + {}", self.u, self.ideal)
    }
}

impl Serialize for SubmoduleDesc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn u_minus_theta(sr: &PolySkewRing, u: &Scalar) -> Result<PolySkew> {
    if u.is_zero() {
        return precondition("u must be a nonzero scalar");
    }
    let ring = sr.coeffs().ring();
    sr.from_terms([(0, MultiPoly::constant(ring, u.clone())), (1, -MultiPoly::one(ring))])
}

/// N = J ∩ R for J = (u − θ)S + Σ g·S: remainders mod u − θ, closed under α^{-1}.
pub fn lattice_contract(sr: &PolySkewRing, gens: &[PolySkew], u: &Scalar, bound: usize) -> Result<SubmoduleDesc> {
    let ring = sr.coeffs().ring().clone();
    let g = u_minus_theta(sr, u)?;
    let inv = sr
        .coeffs()
        .alpha_inv()
        .ok_or_else(|| Error::Precondition("α must be invertible".into()))?
        .clone();
    let mut rems = Vec::new();
    for w in gens {
        let (_, r) = sr.left_divide(&g, w)?;
        rems.push(r.coeff(0).cloned().unwrap_or_else(|| MultiPoly::zero(&ring)));
    }
    let mut cur = Ideal::from_generators(&ring, &rems)?;
    for _ in 0..bound {
        let mut next_gens = cur.generators();
        for h in cur.generators() {
            next_gens.push(inv.apply(&h)?);
        }
        let next = Ideal::from_generators(&ring, &next_gens)?;
        if next == cur {
            if !cur.is_stable_under(|h| sr.coeffs().alpha().apply(h))? {
                return Err(Error::Invariant(format!("closure {cur} is not α-stable")));
            }
            return Ok(SubmoduleDesc { u: u.clone(), ideal: cur });
        }
        cur = next;
    }
    Err(Error::BoundExceeded(format!("α^(-1)-closure did not stabilize within {bound} steps")))
}

/// Generators u − θ, n_1, …, n_k of (u − θ)S + N.
pub fn lattice_expand(sr: &PolySkewRing, desc: &SubmoduleDesc) -> Result<Vec<PolySkew>> {
    let mut out = vec![u_minus_theta(sr, &desc.u)?];
    out.extend(desc.ideal.generators().into_iter().map(|g| sr.constant(g)));
    Ok(out)
}

/// The identity rθ = −(u − θ)α^{-1}(r) + u·α^{-1}(r).
pub fn calc_identity_holds(sr: &PolySkewRing, u: &Scalar, r: &MultiPoly) -> Result<bool> {
    let g = u_minus_theta(sr, u)?;
    let back = sr.coeffs().twist(r, -1)?;
    let lhs = sr.term(r.clone(), 1)?;
    let rhs = sr.add(
        &sr.neg(&sr.mul(&g, &sr.constant(back.clone()))?),
        &sr.constant(back.scale(u)),
    );
    Ok(lhs == rhs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome")]
pub enum SimpleTopOutcome {
    NotSimple { witness: String },
    Simple { reason: String },
    NoObstructionFound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateStatus {
    pub ideal: String,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimpleTopReport {
    pub outcome: SimpleTopOutcome,
    pub candidates: Vec<CandidateStatus>,
}

/// Looks for a proper nonzero α-stable ideal among the candidates; one such N
/// makes (u − θ)S + N an intermediate submodule.
pub fn simple_top_check(sr: &PolySkewRing, u: &Scalar, candidates: &[Ideal]) -> Result<SimpleTopReport> {
    if u.is_zero() {
        return precondition("u must be a nonzero scalar");
    }
    let ring = sr.coeffs().ring();
    let mut statuses = Vec::new();
    let mut witness = None;
    for n in candidates {
        let status = if n.is_zero() || n.is_whole() {
            "trivial ideal"
        } else if !n.is_stable_under(|h| sr.coeffs().alpha().apply(h))? {
            "not α-stable"
        } else {
            if witness.is_none() {
                witness = Some(SubmoduleDesc { u: u.clone(), ideal: n.clone() });
            }
            "proper α-stable ideal"
        };
        statuses.push(CandidateStatus { ideal: n.to_string(), status: status.into() });
    }
    let outcome = match witness {
        Some(w) => SimpleTopOutcome::NotSimple { witness: w.to_string() },
        None if ring.arity() == 0 => SimpleTopOutcome::Simple { reason: "R is a field, so it has only trivial ideals".into() },
        None => SimpleTopOutcome::NoObstructionFound,
    };
    Ok(SimpleTopReport { outcome, candidates: statuses })
}

/// Element Σ r_i θ^i + ρb of M = S/ρ(1−θ)S with each r_i a nonzero remainder mod ρ.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicModuleElem {
    support: BTreeMap<i64, MultiPoly>,
    tail: MultiPoly,
}

impl CyclicModuleElem {
    pub fn support(&self) -> &BTreeMap<i64, MultiPoly> {
        &self.support
    }

    pub fn tail(&self) -> &MultiPoly {
        &self.tail
    }

    /// Number of nonzero support coefficients; zero exactly on V = ρS/ρ(1−θ)S.
    pub fn length(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty() && self.tail.is_zero()
    }
}

/// The module M = S/ρ(1−θ)S for a regular non-unit ρ.
#[derive(Clone)]
pub struct CyclicModule {
    sr: PolySkewRing,
    rho: MultiPoly,
}

impl CyclicModule {
    pub fn new(sr: &PolySkewRing, rho: &MultiPoly) -> Result<CyclicModule> {
        let ring = sr.coeffs().ring();
        if !ring.is_polynomial_like() || sr.is_laurent() {
            return precondition("the cyclic module needs R[θ;α] over a polynomial coefficient ring");
        }
        if rho.is_zero() || rho.is_constant() {
            return precondition(format!("ρ = {rho} must be a nonzero non-unit"));
        }
        if !sr.coeffs().has_inverse() {
            return precondition("α must be invertible");
        }
        Ok(CyclicModule { sr: sr.clone(), rho: rho.clone() })
    }

    pub fn ring(&self) -> &PolySkewRing {
        &self.sr
    }

    pub fn rho(&self) -> &MultiPoly {
        &self.rho
    }

    /// Splits each coefficient as r_i + ρq_i and folds Σ ρq_iθ^i into ρ·Σ α^{-i}(q_i),
    /// using qθ ≡ α^{-1}(q) modulo (1−θ)S.
    pub fn normal_form(&self, raw: &PolySkew) -> Result<CyclicModuleElem> {
        let ring = self.sr.coeffs().ring();
        let mut support = BTreeMap::new();
        let mut tail = MultiPoly::zero(ring);
        for (k, c) in raw.terms() {
            if k < 0 {
                return precondition("negative θ-degree in R[θ;α]");
            }
            let (q, r) = divide_by_principal(c, &self.rho)?;
            if !r.is_zero() {
                support.insert(k, r);
            }
            tail = &tail + &self.sr.coeffs().twist(&q, -k)?;
        }
        Ok(CyclicModuleElem { support, tail })
    }

    /// Canonical representative Σ r_iθ^i + ρb in S.
    pub fn lift(&self, m: &CyclicModuleElem) -> Result<PolySkew> {
        let terms = m.support.iter().map(|(k, r)| (*k, r.clone()));
        let body = self.sr.from_terms(terms)?;
        Ok(self.sr.add(&body, &self.sr.constant(&self.rho * &m.tail)))
    }

    pub fn act(&self, m: &CyclicModuleElem, s: &PolySkew) -> Result<CyclicModuleElem> {
        self.normal_form(&self.sr.mul(&self.lift(m)?, s)?)
    }

    /// For m = r_iθ^i + ρb with r_i ∉ ρR, the multiplier u = α^{-i}(ρ) gives 0 ≠ m·u ∈ V.
    pub fn sublemma2_multiplier(&self, m: &CyclicModuleElem) -> Result<(MultiPoly, CyclicModuleElem)> {
        if m.length() != 1 {
            return precondition(format!("element has length {}, not 1", m.length()));
        }
        let (&i, _) = m.support.iter().next().expect("length 1");
        let u = self.sr.coeffs().twist(&self.rho, -i)?;
        let image = self.act(m, &self.sr.constant(u.clone()))?;
        if image.length() != 0 || image.is_zero() {
            return Err(Error::Invariant(format!("m·{u} is not a nonzero element of V")));
        }
        Ok((u, image))
    }

    /// Bounded greedy search for s with 0 ≠ m·s ∈ V. Each step tries the
    /// multipliers x^e·θ^j (|e|, j ≤ degree_bound) and α^{-i}(ρ) for support
    /// degrees i, keeping the one that shortens m the most (earliest in
    /// enumeration order on ties). `NotFound` is inconclusive.
    pub fn essential_probe(&self, m: &CyclicModuleElem, degree_bound: u32, length_budget: usize) -> Result<EssentialOutcome> {
        if m.is_zero() {
            return precondition("the probe needs a nonzero element");
        }
        let mut s = self.sr.one();
        let mut cur = m.clone();
        let mut steps = Vec::new();
        for _ in 0..=length_budget {
            if cur.length() == 0 {
                let check = self.act(m, &s)?;
                if check != cur || check.is_zero() {
                    return Err(Error::Invariant("probe witness failed re-verification".into()));
                }
                return Ok(EssentialOutcome::Witness {
                    multiplier: self.sr.display(&s),
                    image_tail: cur.tail.to_string(),
                    steps,
                });
            }
            let cands = self.candidates(&cur, degree_bound)?;
            let results: Vec<Option<(usize, CyclicModuleElem)>> = cands
                .par_iter()
                .map(|c| {
                    let img = self.act(&cur, c).ok()?;
                    (!img.is_zero() && img.length() < cur.length()).then(|| (img.length(), img))
                })
                .collect();
            let best = results
                .into_iter()
                .enumerate()
                .filter_map(|(idx, r)| r.map(|(len, img)| (len, idx, img)))
                .min_by_key(|(len, idx, _)| (*len, *idx));
            let Some((_, idx, img)) = best else {
                return Ok(EssentialOutcome::NotFound { reached_length: cur.length(), steps });
            };
            steps.push(self.sr.display(&cands[idx]));
            s = self.sr.mul(&s, &cands[idx])?;
            cur = img;
        }
        Ok(EssentialOutcome::NotFound { reached_length: cur.length(), steps })
    }

    fn candidates(&self, cur: &CyclicModuleElem, bound: u32) -> Result<Vec<PolySkew>> {
        let ring = self.sr.coeffs().ring();
        let mut out = Vec::new();
        for e in exponents_up_to(ring.arity(), bound as i32) {
            let mono = MultiPoly::monomial(ring, Scalar::one(ring.field()), Monomial::new(e))?;
            for j in 0..=bound as i64 {
                out.push(self.sr.term(mono.clone(), j)?);
            }
        }
        for &i in cur.support.keys() {
            out.push(self.sr.constant(self.sr.coeffs().twist(&self.rho, -i)?));
        }
        Ok(out)
    }
}

/// All exponent vectors of length t with total degree ≤ d, in grlex order.
fn exponents_up_to(t: usize, d: i32) -> Vec<Vec<i32>> {
    let mut out: Vec<Vec<i32>> = vec![vec![]];
    for _ in 0..t {
        out = out
            .into_iter()
            .flat_map(|v| {
                let used: i32 = v.iter().sum();
                (0..=d - used).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out.sort_by(|a, b| Monomial::new(a.clone()).cmp(&Monomial::new(b.clone())));
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome")]
pub enum EssentialOutcome {
    /// m·s = ρ·b with b given as `image_tail`.
    Witness { multiplier: String, image_tail: String, steps: Vec<String> },
    NotFound { reached_length: usize, steps: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainLink {
    pub m: u32,
    pub strict: bool,
    pub certificate: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub rho: String,
    pub links: Vec<ChainLink>,
    pub all_strict: bool,
}

/// f ∈ θ^{m+1}S + ρS iff every coefficient of f in degrees ≤ m lies in ρR.
pub fn in_theta_power_plus_rho(f: &PolySkew, m: i64, rho_ideal: &Ideal) -> Result<Option<i64>> {
    for (k, c) in f.terms() {
        if k <= m && !rho_ideal.contains(c)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Certifies θ^m ∉ θ^{m+1}S + ρS for 1 ≤ m ≤ m_max.
pub fn chain_check(ring: &Arc<CoeffRing>, rho: &MultiPoly, m_max: u32) -> Result<ChainReport> {
    if rho.is_zero() {
        return precondition("ρ must be nonzero");
    }
    let ideal = Ideal::principal(&rho.rehome(ring)?)?;
    if ideal.is_whole() {
        return precondition(format!("ρ = {rho} is a unit, so the chain collapses"));
    }
    let one = MultiPoly::one(ring);
    let mut links = Vec::new();
    for m in 1..=m_max {
        // θ^m has the single coefficient 1 in degree m
        let f = SkewPoly::<MultiPoly>::single(m as i64, one.clone());
        let bad = in_theta_power_plus_rho(&f, m as i64, &ideal)?;
        links.push(ChainLink {
            m,
            strict: bad.is_some(),
            certificate: match bad {
                Some(k) => format!("coefficient 1 of theta^{k} is not in ({rho})"),
                None => "every low coefficient lies in the ideal".into(),
            },
        });
    }
    let all_strict = links.iter().all(|l| l.strict);
    Ok(ChainReport { rho: rho.to_string(), links, all_strict })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub skew: bool,
    pub dense: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixUnitsReport {
    pub n: usize,
    pub field: String,
    pub checks: Vec<IdentityCheck>,
    pub all_hold: bool,
}

/// In T = k^n[θ^±1;α] with α(e_i) = e_{i+1}, sets f = (1−e_1)θ, a = θ^{1−n},
/// b = θ^{-1} and checks the matrix-unit identities both in the skew Laurent
/// arithmetic and in a dense n×n realization (e_i ↦ E_ii, θ ↦ weighted shift).
pub fn matrix_units_verify(n: usize, field: &FieldSpec) -> Result<MatrixUnitsReport> {
    let ci = CyclicIdempotents::new(field, n)?;
    let skew = skew_identities(&ci)?;
    let dense = dense_identities(n, field);
    let checks: Vec<IdentityCheck> = skew
        .into_iter()
        .zip(dense)
        .map(|((name, s), (_, d))| IdentityCheck { name, skew: s, dense: d })
        .collect();
    let all_hold = checks.iter().all(|c| c.skew && c.dense);
    Ok(MatrixUnitsReport { n, field: field.to_string(), checks, all_hold })
}

fn identity_names(n: usize) -> Vec<String> {
    let mut v: Vec<String> = ["f^(n-1) = e_n theta^(n-1)", "a f^(n-1) = e_1", "f b = 1 - e_1", "a f^(n-1) + f b = 1", "f^n = 0"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for k in 1..n {
        v.push(format!("e_1 theta^{k} e_1 = 0"));
    }
    v.push(format!("e_1 theta^{n} e_1 != 0"));
    v
}

fn skew_identities(ci: &CyclicIdempotents) -> Result<Vec<(String, bool)>> {
    let n = ci.n() as i64;
    let t = SkewRing::new(ci.clone(), true)?;
    let one = t.one();
    let e1 = t.constant(ci.e(1));
    let en = t.constant(ci.e(ci.n()));
    let f = t.term(ci.sub(&ci.one(), &ci.e(1)), 1)?;
    let a = t.theta_pow(1 - n)?;
    let b = t.theta_pow(-1)?;
    let f_nm1 = t.pow(&f, (n - 1) as u32)?;
    let af = t.mul(&a, &f_nm1)?;
    let fb = t.mul(&f, &b)?;
    let mut out = vec![
        t.mul(&en, &t.theta_pow(n - 1)?)? == f_nm1,
        af == e1,
        fb == t.sub(&one, &e1),
        t.add(&af, &fb) == one,
        t.pow(&f, n as u32)?.is_zero(),
    ];
    for k in 1..=n {
        let v = t.mul(&t.mul(&e1, &t.theta_pow(k)?)?, &e1)?;
        out.push(if k < n { v.is_zero() } else { !v.is_zero() });
    }
    Ok(identity_names(ci.n()).into_iter().zip(out).collect())
}

fn dense_identities(n: usize, field: &FieldSpec) -> Vec<(String, bool)> {
    let unit = |i: usize| {
        let mut m = Matrix::zeros(field, n, n);
        m.set(i, i, Scalar::one(field));
        m
    };
    // P v_i = v_{i+1}, with weight 2 on the wrap-around so that P^n = 2·I ≠ I
    // whenever 2 ≠ 1 in the field.
    let mut p = Matrix::zeros(field, n, n);
    for i in 0..n {
        let w = if i + 1 == n { Scalar::from_int(field, 2) } else { Scalar::one(field) };
        p.set((i + 1) % n, i, w);
    }
    let id = Matrix::identity(field, n);
    let sub = |a: &Matrix, b: &Matrix| {
        let mut c = a.clone();
        for i in 0..n {
            for j in 0..n {
                c.set(i, j, a.get(i, j) - b.get(i, j));
            }
        }
        c
    };
    let add = |a: &Matrix, b: &Matrix| sub(a, &sub(&Matrix::zeros(field, n, n), b));
    let zero = Matrix::zeros(field, n, n);
    let p_inv = p.inverse().expect("weighted shift is invertible");
    let e1 = unit(0);
    let en = unit(n - 1);
    let f = sub(&id, &e1).mul(&p);
    let a = p_inv.pow((n - 1) as u64);
    let f_nm1 = f.pow((n - 1) as u64);
    let af = a.mul(&f_nm1);
    let fb = f.mul(&p_inv);
    let mut out = vec![
        en.mul(&p.pow((n - 1) as u64)) == f_nm1,
        af == e1,
        fb == sub(&id, &e1),
        add(&af, &fb) == id,
        f.pow(n as u64) == zero,
    ];
    for k in 1..=n {
        let v = e1.mul(&p.pow(k as u64)).mul(&e1);
        out.push(if k < n { v == zero } else { v != zero });
    }
    identity_names(n).into_iter().zip(out).collect()
}
