//! Decision engine for property (⋄) of S = R[θ; α]: finitely generated
//! essential extensions of simple S-modules are Artinian.
//!
//! Rules are tried in a fixed order. The first rule that produces an outcome
//! decides the verdict; every later rule that also matches is recorded in the
//! trace and must agree with a decisive (Holds/Fails) winner.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::automorph::{classify_plane, AlgebraMap, MapClass, OrderVerdict};
use crate::dynamics::{
    curve_membership, curve_monomials, fixed_points_symbolic, fmt_point, orbit, periodic_points_ff,
    rational_periodic_search, OrbitStatus, Point, DEFAULT_FF_POINT_CAP,
};
use crate::error::{precondition, Error, Result};
use crate::poly::{CoeffRing, RingKind};
use crate::scalars::{is_root_of_unity, FieldSpec, RootOfUnity, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Outcome {
    Holds,
    Fails,
    Unknown,
}

/// Open question attached to an Unknown verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QuestionTag {
    Qn1,
    Qn2,
    Qn3,
    Qn4,
    Qn5,
    Unclassified,
}

impl QuestionTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            QuestionTag::Qn1 => "qn1",
            QuestionTag::Qn2 => "qn2",
            QuestionTag::Qn3 => "qn3",
            QuestionTag::Qn4 => "qn4",
            QuestionTag::Qn5 => "qn5",
            QuestionTag::Unclassified => "unclassified",
        }
    }

    /// One-line statement of the open problem.
    pub fn describe(&self) -> &'static str {
        match self {
            QuestionTag::Qn1 => {
                "open question qn1: if S is primitive and satisfies (⋄), must R be a finite direct sum of fields? \
                 (the unresolved case is Krull dimension 1 with countable spectrum)"
            }
            QuestionTag::Qn2 => {
                "open question qn2: over a countable base field, does (⋄) force every simple S-module to be \
                 finite dimensional?"
            }
            QuestionTag::Qn3 => {
                "open question qn3: no known necessary and sufficient conditions on (R, α) decide finite \
                 dimensionality of all simple S-modules in this case"
            }
            QuestionTag::Qn4 => {
                "open question qn4: is S = k[x,y][θ; α] primitive for a square (Hénon type) automorphism α? \
                 (⋄) holds exactly when it is not"
            }
            QuestionTag::Qn5 => {
                "open question qn5: is S primitive for the characteristic-0 group-algebra construction \
                 R = k[x^±1, y^±1], α(y) = x, α(x) = y·x^-1? (⋄) holds exactly when it is not"
            }
            QuestionTag::Unclassified => "the automorphism falls outside every class the engine recognizes",
        }
    }
}

impl fmt::Display for QuestionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum RuleId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    Q1,
    /// Fallback when nothing matched.
    R0,
}

impl RuleId {
    pub const ALL: [RuleId; 10] =
        [RuleId::R1, RuleId::R2, RuleId::R3, RuleId::R4, RuleId::R5, RuleId::R6, RuleId::R7, RuleId::R8, RuleId::Q1, RuleId::R0];

    /// Descriptive statement of the result each rule applies.
    pub fn citation(&self) -> &'static str {
        match self {
            RuleId::R1 => {
                "finite order: S is a finite module over a central subring, hence PI and fully bounded \
                 Noetherian, and such rings satisfy (⋄)"
            }
            RuleId::R2 => {
                "linear automorphism of k[x_1..x_t] over any field k: (⋄) holds if and only if α has finite order"
            }
            RuleId::R3 => {
                "affine automorphism x -> βx + γ of k[x]: (⋄) holds iff β is a root of unity and γ = 0 \
                 (characteristic 0, up to conjugacy), or iff β is a root of unity (characteristic p)"
            }
            RuleId::R4 => {
                "triangular automorphism of k[x,y]: (⋄) holds iff α is conjugate to type (i) with λ, μ roots \
                 of unity, equivalently iff α has finite order"
            }
            RuleId::R5 => {
                "square automorphism of k[x,y] (conjugate to a product of generalized Hénon maps): (⋄) holds \
                 if and only if S is not primitive"
            }
            RuleId::R6 => {
                "monomial automorphism of a Laurent ring over a field algebraic over F_p: S embeds in the group \
                 algebra of a torsion-free polycyclic group, all simple modules are finite dimensional, so (⋄) holds"
            }
            RuleId::R7 => {
                "monomial automorphism of a characteristic-0 Laurent ring of infinite order: (⋄) holds iff S is \
                 not primitive, which is open"
            }
            RuleId::R8 => {
                "primitive S: (⋄) holds when R has Krull dimension 0 and fails when R has Krull dimension at \
                 least 2 over an uncountable field"
            }
            RuleId::Q1 => "primitive S with R of Krull dimension 1: between the known sufficient and necessary conditions",
            RuleId::R0 => "no rule applies; classified input without a known characterization",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub rule: RuleId,
    pub citation: &'static str,
    /// Hypothesis matched, or the failing clause for a Fails outcome.
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub question_tag: Option<QuestionTag>,
    pub trace: Vec<TraceEntry>,
    pub caveats: Vec<String>,
}

impl Verdict {
    /// The rule that produced the outcome.
    pub fn decided_by(&self) -> RuleId {
        self.trace[0].rule
    }

    pub fn rules(&self) -> Vec<RuleId> {
        self.trace.iter().map(|e| e.rule).collect()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.question_tag {
            Some(t) => write!(f, "Unknown({t})"),
            None => write!(f, "{:?}", self.outcome),
        }
    }
}

pub const CAVEAT_COMPLEX_SUBFIELD: &str = "statement over C instantiated over a computable subfield: the \
    characteristic-0 plane arguments used here hold over any field of characteristic 0";

pub const CAVEAT_COUNTABLE_FIELD: &str = "countable base field: the implication from (⋄) to finite-dimensional \
    simple modules is only known over uncountable fields (qn2); the converse direction used here holds over any field";

pub const CAVEAT_UNCOUNTABLE_HYPOTHESIS: &str = "the failure of (⋄) for primitive S is proved for rings containing \
    an uncountable field; over the countable fields used here this Fails verdict is conditional on that hypothesis";

/// Externally supplied knowledge about primitivity of S.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimitivityCertificate {
    pub primitive: bool,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecideOptions {
    /// Iteration bound for orders of maps outside the certified classes.
    pub order_bound: u64,
    pub primitivity: Option<PrimitivityCertificate>,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { order_bound: 64, primitivity: None }
    }
}

struct Hit {
    rule: RuleId,
    outcome: Outcome,
    tag: Option<QuestionTag>,
    detail: String,
    caveats: Vec<&'static str>,
}

impl Hit {
    fn new(rule: RuleId, outcome: Outcome, detail: impl Into<String>) -> Hit {
        Hit { rule, outcome, tag: None, detail: detail.into(), caveats: vec![] }
    }

    fn unknown(rule: RuleId, tag: QuestionTag, detail: impl Into<String>) -> Hit {
        Hit { rule, outcome: Outcome::Unknown, tag: Some(tag), detail: detail.into(), caveats: vec![] }
    }

    fn caveat(mut self, c: &'static str) -> Hit {
        self.caveats.push(c);
        self
    }
}

fn root_order(a: &Scalar) -> Result<Option<u64>> {
    Ok(match is_root_of_unity(a)? {
        RootOfUnity::Yes { order } => Some(order),
        RootOfUnity::No => None,
    })
}

fn is_plane(ring: &CoeffRing) -> bool {
    ring.arity() == 2 && ring.kind() == &RingKind::Polynomial
}

/// Jordan's monomial pattern α(y) = x, α(x) = y·x^-1 and its x/y swap.
pub fn is_jordan_pattern(m: &[Vec<i64>]) -> bool {
    let jordan = [vec![-1, 1], vec![1, 0]];
    let swapped = [vec![0, 1], vec![1, -1]];
    m == jordan || m == swapped
}

/// Decides (⋄) for S = R[θ; α], R the ring of `alpha`.
///
/// Errors only on internal failures; a disagreement between two decisive
/// rules is reported as [`Error::Invariant`].
pub fn decide(alpha: &AlgebraMap, opts: &DecideOptions) -> Result<Verdict> {
    let ring = alpha.ring().clone();
    let field = ring.field().clone();
    let order = alpha.order(opts.order_bound)?;
    let mut hits: Vec<Hit> = Vec::new();

    // R1
    if let OrderVerdict::Finite { n } = order {
        hits.push(Hit::new(RuleId::R1, Outcome::Holds, format!("α has finite order {n}")));
    }

    // R2
    if let MapClass::Linear(_) = alpha.class() {
        if ring.kind() == &RingKind::Polynomial {
            match &order {
                OrderVerdict::Finite { n } => {
                    hits.push(Hit::new(RuleId::R2, Outcome::Holds, format!("linear map of order {n}")))
                }
                OrderVerdict::InfiniteCertified { reason } => hits.push(Hit::new(
                    RuleId::R2,
                    Outcome::Fails,
                    format!("failing clause: |α| is infinite ({reason})"),
                )),
                OrderVerdict::UnknownBeyondBound { .. } => {}
            }
        }
    }

    // R3
    if let MapClass::UnivariateAffine { beta, gamma } = alpha.class() {
        if ring.kind() == &RingKind::Polynomial {
            hits.push(rule_affine(&field, beta, gamma)?);
        }
    }

    // R4
    if field.is_char_zero() && is_plane(&ring) {
        if let Some(h) = rule_triangular(alpha)? {
            hits.push(h.caveat(CAVEAT_COMPLEX_SUBFIELD));
        }
    }

    // R5
    if field.is_char_zero() && is_plane(&ring) && is_square(alpha)? {
        let h = match &opts.primitivity {
            None => Hit::unknown(RuleId::R5, QuestionTag::Qn4, "square plane map without a primitivity certificate"),
            Some(c) if c.primitive => Hit::new(
                RuleId::R5,
                Outcome::Fails,
                format!("failing clause: S is primitive (certificate: {})", c.source),
            )
            .caveat(CAVEAT_UNCOUNTABLE_HYPOTHESIS),
            Some(c) => Hit::new(RuleId::R5, Outcome::Holds, format!("S is not primitive (certificate: {})", c.source)),
        };
        hits.push(h.caveat(CAVEAT_COMPLEX_SUBFIELD));
    }

    // R6, R7
    if let MapClass::Monomial(m) = alpha.class() {
        if ring.is_laurent() && !field.is_char_zero() {
            hits.push(
                Hit::new(RuleId::R6, Outcome::Holds, format!("monomial map over F_{}", field.characteristic()))
                    .caveat(CAVEAT_COUNTABLE_FIELD),
            );
        } else if ring.is_laurent() && !order.is_finite() {
            if is_jordan_pattern(m) {
                hits.push(Hit::unknown(RuleId::R7, QuestionTag::Qn5, "Jordan pattern α(y) = x, α(x) = y·x^-1"));
            } else {
                hits.push(Hit::unknown(
                    RuleId::R7,
                    QuestionTag::Qn3,
                    format!("infinite-order monomial map {m:?} in characteristic 0"),
                ));
            }
        }
    }

    // R8, Q1
    if let Some(c) = opts.primitivity.as_ref().filter(|c| c.primitive) {
        match ring.krull_dimension() {
            0 => hits.push(Hit::new(
                RuleId::R8,
                Outcome::Holds,
                format!("S primitive (certificate: {}), R of Krull dimension 0", c.source),
            )),
            1 => hits.push(Hit::unknown(
                RuleId::Q1,
                QuestionTag::Qn1,
                format!("S primitive (certificate: {}), R of Krull dimension 1", c.source),
            )),
            d => hits.push(
                Hit::new(
                    RuleId::R8,
                    Outcome::Fails,
                    format!("failing clause: S primitive (certificate: {}) with Krull dimension {d} ≥ 2", c.source),
                )
                .caveat(CAVEAT_UNCOUNTABLE_HYPOTHESIS),
            ),
        }
    }

    if hits.is_empty() {
        let (tag, detail) = match alpha.class() {
            MapClass::Unclassified => (QuestionTag::Unclassified, "automorphism not classified".to_string()),
            c => (QuestionTag::Qn3, format!("class {} has no characterization for ring {ring}", c.tag())),
        };
        hits.push(Hit::unknown(RuleId::R0, tag, detail));
    }
    assemble(hits)
}

fn assemble(hits: Vec<Hit>) -> Result<Verdict> {
    let first = &hits[0];
    let outcome = first.outcome;
    let tag = first.tag;
    if outcome != Outcome::Unknown {
        if let Some(bad) = hits.iter().find(|h| h.outcome != Outcome::Unknown && h.outcome != outcome) {
            return Err(Error::Invariant(format!(
                "rule {} gives {:?} but rule {} gives {:?}",
                first.rule, outcome, bad.rule, bad.outcome
            )));
        }
    }
    let mut caveats: Vec<String> = Vec::new();
    for c in hits.iter().flat_map(|h| h.caveats.iter()) {
        if !caveats.iter().any(|x| x == c) {
            caveats.push(c.to_string());
        }
    }
    let trace = hits
        .into_iter()
        .map(|h| {
            let detail = match h.tag {
                Some(t) if h.outcome == Outcome::Unknown => format!("{} [{t}]", h.detail),
                _ => h.detail,
            };
            TraceEntry { rule: h.rule, citation: h.rule.citation(), detail }
        })
        .collect();
    Ok(Verdict { outcome, question_tag: tag, trace, caveats })
}

fn rule_affine(field: &FieldSpec, beta: &Scalar, gamma: &Scalar) -> Result<Hit> {
    let root = root_order(beta)?;
    if !field.is_char_zero() {
        return Ok(match root {
            Some(m) => Hit::new(RuleId::R3, Outcome::Holds, format!("characteristic p, β = {beta} has order {m}")),
            None => Hit::new(RuleId::R3, Outcome::Fails, format!("failing clause: β = {beta} is not a root of unity")),
        });
    }
    // For β ≠ 1, x -> βx + γ is conjugate to x -> βx by x -> x + γ/(β − 1).
    let normalized_gamma_zero = !beta.is_one() || gamma.is_zero();
    Ok(match root {
        None => Hit::new(
            RuleId::R3,
            Outcome::Fails,
            format!("failing clause: β = {beta} is not a root of unity in characteristic 0"),
        ),
        Some(_) if !normalized_gamma_zero => Hit::new(
            RuleId::R3,
            Outcome::Fails,
            format!("failing clause: β = 1 and γ = {gamma}, so γ ≠ 0 in characteristic 0"),
        ),
        Some(m) => {
            let how = if gamma.is_zero() { "γ = 0" } else { "γ normalized to 0 by conjugation since β ≠ 1" };
            Hit::new(RuleId::R3, Outcome::Holds, format!("β = {beta} has order {m}, {how}"))
        }
    })
}

/// Triangular view of a plane map, including diagonal linear maps.
fn triangular_view(alpha: &AlgebraMap) -> Result<Option<MapClass>> {
    let class = match alpha.class() {
        MapClass::Linear(_) => classify_plane(alpha)?.class,
        c => c.clone(),
    };
    Ok(match class {
        c @ (MapClass::TriangularI { .. } | MapClass::TriangularII { .. } | MapClass::TriangularIII { .. }) => Some(c),
        _ => None,
    })
}

fn rule_triangular(alpha: &AlgebraMap) -> Result<Option<Hit>> {
    let Some(class) = triangular_view(alpha)? else {
        return Ok(None);
    };
    let not_root = |name: &str, v: &Scalar| {
        Hit::new(RuleId::R4, Outcome::Fails, format!("failing clause: {name} = {v} is not a root of unity"))
    };
    Ok(Some(match &class {
        MapClass::TriangularI { lambda, mu } => match (root_order(lambda)?, root_order(mu)?) {
            (Some(a), Some(b)) => {
                Hit::new(RuleId::R4, Outcome::Holds, format!("type (i) with λ of order {a} and μ of order {b}"))
            }
            (None, _) => not_root("type (i), λ", lambda),
            (_, None) => not_root("type (i), μ", mu),
        },
        MapClass::TriangularII { c, .. } => Hit::new(
            RuleId::R4,
            Outcome::Fails,
            format!("failing clause: type (ii), y -> y + {c} with c ≠ 0 in characteristic 0"),
        ),
        MapClass::TriangularIII { lambda, mu, eta } => match (root_order(lambda)?, root_order(mu)?) {
            (None, _) => not_root("type (iii), λ", lambda),
            (_, None) => not_root("type (iii), μ", mu),
            _ if eta.is_empty() => Hit::new(RuleId::R4, Outcome::Holds, "type (iii) with η = 0 is type (i) with roots of unity"),
            _ => Hit::new(
                RuleId::R4,
                Outcome::Fails,
                "failing clause: type (iii) with η ≠ 0 is not conjugate to type (i) in characteristic 0",
            ),
        },
        _ => unreachable!("triangular_view returns triangular classes only"),
    }))
}

fn is_square(alpha: &AlgebraMap) -> Result<bool> {
    Ok(match alpha.class() {
        MapClass::GeneralizedHenon { .. } => true,
        MapClass::CompositionList(fs) => fs.iter().all(|f| f.degree() >= 2),
        _ => false,
    })
}

/// Human-readable rendering of a verdict; stable for identical verdicts.
pub fn explain(v: &Verdict) -> String {
    let mut out = format!("verdict: {v}\n");
    if let Some(t) = v.question_tag {
        out.push_str(&format!("open: {}\n", t.describe()));
    }
    for (i, e) in v.trace.iter().enumerate() {
        let role = if i == 0 { "decisive" } else { "corroborating" };
        out.push_str(&format!("[{}] ({role}) \"{}\"\n    {}\n", e.rule, e.citation, e.detail));
    }
    for c in &v.caveats {
        out.push_str(&format!("caveat: {c}\n"));
    }
    out
}

/// Search parameters for [`primitivity_probe`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeSearch {
    /// Primes for reduction statistics of maps with rational coefficients.
    pub primes: Vec<u64>,
    pub max_period: u64,
    pub degree: u32,
    /// Height bound for rational seeds.
    pub height: u64,
    /// Maximum number of one-point-per-orbit selections examined.
    pub selection_cap: u64,
}

impl Default for ProbeSearch {
    fn default() -> Self {
        ProbeSearch { primes: vec![], max_period: 6, degree: 2, height: 3, selection_cap: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum ProbeOutcome {
    /// No orbits: the empty selection trivially lies on every curve.
    Vacuous,
    /// Some selection lies on a curve of degree ≤ d; evidence toward primitivity.
    CurveFound,
    /// No examined selection lies on such a curve; no conclusion either way.
    NoCurveFound { exhausted: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveHit {
    pub selection: Vec<String>,
    pub curve: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub p: u64,
    pub histogram: std::collections::BTreeMap<u64, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub degree: u32,
    pub orbits: Vec<Vec<String>>,
    pub selections_total: u128,
    pub selections_tried: u64,
    pub cap_exceeded: bool,
    pub hits: Vec<CurveHit>,
    pub hit_count: u64,
    pub outcome: ProbeOutcome,
    pub reductions: Vec<Reduction>,
    pub warnings: Vec<String>,
}

/// Hits kept verbatim in a report; further hits are only counted.
pub const PROBE_HIT_LIMIT: usize = 16;

/// Gathers finite orbits of a square plane map and tests one-point-per-orbit
/// selections for lying on a curve of degree ≤ d. Reports evidence only.
pub fn primitivity_probe(alpha: &AlgebraMap, search: &ProbeSearch) -> Result<ProbeReport> {
    let plane = classify_plane(alpha)?;
    let square = match &plane.class {
        MapClass::GeneralizedHenon { .. } => true,
        MapClass::CompositionList(fs) => fs.iter().all(|f| f.degree() >= 2),
        _ => false,
    };
    if !square {
        return precondition(format!("primitivity probe needs a square plane map, got {}", plane.class.tag()));
    }
    let ring = alpha.ring();
    let mut orbits: Vec<Vec<Point>> = Vec::new();
    let mut reductions = Vec::new();
    match ring.field() {
        FieldSpec::PrimeField(_) => {
            let dec = periodic_points_ff(alpha, DEFAULT_FF_POINT_CAP)?;
            for c in dec.cycles.iter().filter(|c| c.length <= search.max_period) {
                let seed: Point = c.representative.iter().map(|&v| Scalar::from_int(ring.field(), v as i64)).collect();
                orbits.push(orbit(&seed, alpha, c.length)?.points);
            }
        }
        FieldSpec::Rationals => {
            for o in rational_periodic_search(alpha, search.height, search.max_period)? {
                orbits.push(o.points);
            }
            for period in [1, 2] {
                if u64::from(period) > search.max_period {
                    continue;
                }
                if let Some(pts) = fixed_points_symbolic(alpha, period)?.points {
                    for p in pts {
                        let o = orbit(&p, alpha, search.max_period)?;
                        if matches!(o.status, OrbitStatus::Periodic { .. }) {
                            orbits.push(o.points);
                        }
                    }
                }
            }
            for &p in &search.primes {
                if let Some(reduced) = alpha.reduce_mod_p(p)? {
                    let dec = periodic_points_ff(&reduced, DEFAULT_FF_POINT_CAP)?;
                    reductions.push(Reduction { p, histogram: dec.histogram });
                }
            }
        }
        FieldSpec::Cyclotomic(_) => {}
    }
    probe_orbits(ring, orbits, search.degree, search.selection_cap, reductions)
}

/// Core of [`primitivity_probe`] on explicit orbit data.
pub fn probe_orbits(
    ring: &Arc<CoeffRing>,
    orbits: Vec<Vec<Point>>,
    degree: u32,
    cap: u64,
    reductions: Vec<Reduction>,
) -> Result<ProbeReport> {
    // Canonical order: points within an orbit ascending, orbits by least point.
    let mut canon: Vec<Vec<Point>> = orbits
        .into_iter()
        .map(|o| {
            let s: BTreeSet<Point> = o.into_iter().collect();
            s.into_iter().collect::<Vec<_>>()
        })
        .filter(|o| !o.is_empty())
        .collect();
    canon.sort();
    canon.dedup();

    let monomials = curve_monomials(degree).len();
    let mut warnings = Vec::new();
    if !canon.is_empty() && canon.len() < monomials {
        warnings.push(format!(
            "{} representatives against {monomials} monomials of degree ≤ {degree}: a curve always exists",
            canon.len()
        ));
    }
    let total: u128 = canon.iter().map(|o| o.len() as u128).product();
    let orbits_out = canon.iter().map(|o| o.iter().map(|p| fmt_point(p)).collect()).collect();
    if canon.is_empty() {
        return Ok(ProbeReport {
            degree,
            orbits: orbits_out,
            selections_total: 1,
            selections_tried: 0,
            cap_exceeded: false,
            hits: vec![],
            hit_count: 0,
            outcome: ProbeOutcome::Vacuous,
            reductions,
            warnings,
        });
    }

    let cap_exceeded = total > u128::from(cap);
    if cap_exceeded {
        warnings.push(format!("{total} selections exceed the cap {cap}; examined the first {cap}"));
    }
    let mut idx = vec![0usize; canon.len()];
    let mut tried = 0u64;
    let mut hits = Vec::new();
    let mut hit_count = 0u64;
    loop {
        if tried == cap {
            break;
        }
        let sel: Vec<Point> = idx.iter().zip(&canon).map(|(&i, o)| o[i].clone()).collect();
        tried += 1;
        if let Some(c) = curve_membership(ring, &sel, degree)? {
            hit_count += 1;
            if hits.len() < PROBE_HIT_LIMIT {
                hits.push(CurveHit { selection: sel.iter().map(|p| fmt_point(p)).collect(), curve: c.to_string() });
            }
        }
        // Mixed-radix increment, last orbit fastest.
        let mut k = canon.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < canon[k].len() {
                break;
            }
            idx[k] = 0;
        }
        if idx.iter().all(|&i| i == 0) {
            break;
        }
    }
    let outcome = if hit_count > 0 {
        ProbeOutcome::CurveFound
    } else {
        ProbeOutcome::NoCurveFound { exhausted: !cap_exceeded }
    };
    Ok(ProbeReport {
        degree,
        orbits: orbits_out,
        selections_total: total,
        selections_tried: tried,
        cap_exceeded,
        hits,
        hit_count,
        outcome,
        reductions,
        warnings,
    })
}
