//! Argument definitions and subcommand implementations.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use skew_core::automorph::{classify_plane, AlgebraMap};
use skew_core::diamond::{self, DecideOptions, PrimitivityCertificate, ProbeSearch};
use skew_core::dynamics::{curve_membership, fmt_point, orbit, periodic_points_ff, Point, DEFAULT_FF_POINT_CAP};
use skew_core::modlab::{
    calc_identity_holds, chain_check, lattice_contract, lattice_expand, matrix_units_verify, CyclicModule,
    EssentialOutcome, DEFAULT_CLOSURE_BOUND,
};
use skew_core::poly::{MultiPoly, RingKind};
use skew_core::scalars::{FieldSpec, Scalar};

use crate::model::{build, Model};
use crate::spec::{parse_expr, parse_points, parse_spec};
use crate::{read_file, CliError, Outcome};

#[derive(Debug, Parser)]
#[command(name = "skewring", version, about = "Skew polynomial rings R[theta; alpha]: classification, (⋄) decisions, dynamics")]
pub struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Add a wall-clock stamp (reports are otherwise reproducible byte for byte).
    #[arg(long, global = true)]
    pub stamp: bool,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Print the spec in canonical form.
    Fmt { spec: PathBuf },
    /// Classify the automorphism.
    Classify { spec: PathBuf },
    /// Decide property (⋄) for S = R[theta; alpha].
    Decide {
        spec: PathBuf,
        #[arg(long, default_value_t = 64)]
        order_bound: u64,
        /// Externally known primitivity of S.
        #[arg(long)]
        primitive: Option<bool>,
        /// Source recorded with --primitive.
        #[arg(long, default_value = "command line")]
        certificate: String,
    },
    /// Order of the automorphism.
    Order {
        spec: PathBuf,
        #[arg(long, default_value_t = 64)]
        bound: u64,
    },
    /// Periodic orbits over F_p of period at most N.
    Orbits {
        spec: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        max_period: u64,
    },
    /// Cycle-length histogram of the point map over F_p.
    Cycles {
        spec: PathBuf,
        #[arg(long)]
        prime: u64,
        /// Also write the histogram as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Least-degree curve check through the points of a file.
    Curve {
        spec: PathBuf,
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        points: PathBuf,
    },
    /// alpha-special probe: least n with N_n(a) in each ideal.
    Special {
        spec: PathBuf,
        #[arg(long)]
        a: String,
        /// Generator expression or declared ideal name; repeatable.
        #[arg(long, required = true)]
        ideal: Vec<String>,
        #[arg(long, default_value_t = 8)]
        max_n: u32,
    },
    /// Module-lattice experiments.
    Modlab {
        #[command(subcommand)]
        cmd: ModlabCmd,
    },
    /// Check the matrix-unit identities for n cyclically permuted idempotents.
    VerifyMatrixUnits {
        #[arg(long)]
        n: usize,
        /// Q or Fp(p).
        #[arg(long, default_value = "Q")]
        field: String,
    },
    /// Orbit-on-a-curve evidence for a square plane map.
    Probe {
        spec: PathBuf,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, default_value_t = 3)]
        height: u64,
        #[arg(long, default_value_t = 6)]
        max_period: u64,
        #[arg(long)]
        prime: Vec<u64>,
        #[arg(long, default_value_t = 10_000)]
        cap: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum ModlabCmd {
    /// Strictness of theta^m S + rho S for m = 1..M.
    Chain {
        spec: PathBuf,
        /// Defaults to the first ring variable.
        #[arg(long)]
        rho: Option<String>,
        #[arg(long, default_value_t = 10)]
        max: u32,
    },
    /// Search s with 0 != m*s in V for m in S/rho(1-theta)S.
    Essential {
        spec: PathBuf,
        #[arg(long)]
        elem: String,
        #[arg(long, default_value_t = 2)]
        bound: u32,
        #[arg(long)]
        rho: Option<String>,
        #[arg(long, default_value_t = 8)]
        length_budget: usize,
    },
    /// Contract the right ideal generated by (u - theta) and the given elements.
    Lattice {
        spec: PathBuf,
        #[arg(long, default_value = "1")]
        u: String,
        /// Skew expression; repeatable. Defaults to the first ring variable.
        #[arg(long)]
        generator: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_CLOSURE_BOUND)]
        bound: usize,
    },
}

impl Cmd {
    pub fn name(&self) -> &'static str {
        match self {
            Cmd::Fmt { .. } => "fmt",
            Cmd::Classify { .. } => "classify",
            Cmd::Decide { .. } => "decide",
            Cmd::Order { .. } => "order",
            Cmd::Orbits { .. } => "orbits",
            Cmd::Cycles { .. } => "cycles",
            Cmd::Curve { .. } => "curve",
            Cmd::Special { .. } => "special",
            Cmd::Modlab { cmd: ModlabCmd::Chain { .. } } => "modlab chain",
            Cmd::Modlab { cmd: ModlabCmd::Essential { .. } } => "modlab essential",
            Cmd::Modlab { cmd: ModlabCmd::Lattice { .. } } => "modlab lattice",
            Cmd::VerifyMatrixUnits { .. } => "verify-matrix-units",
            Cmd::Probe { .. } => "probe",
        }
    }

    pub fn input_files(&self) -> Vec<&PathBuf> {
        match self {
            Cmd::Fmt { spec }
            | Cmd::Classify { spec }
            | Cmd::Decide { spec, .. }
            | Cmd::Order { spec, .. }
            | Cmd::Orbits { spec, .. }
            | Cmd::Cycles { spec, .. }
            | Cmd::Special { spec, .. }
            | Cmd::Probe { spec, .. }
            | Cmd::Modlab { cmd: ModlabCmd::Chain { spec, .. } }
            | Cmd::Modlab { cmd: ModlabCmd::Essential { spec, .. } }
            | Cmd::Modlab { cmd: ModlabCmd::Lattice { spec, .. } } => vec![spec],
            Cmd::Curve { spec, points, .. } => vec![spec, points],
            Cmd::VerifyMatrixUnits { .. } => vec![],
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report payloads serialize")
}

fn load(path: &Path) -> Result<Model, CliError> {
    build(&parse_spec(&read_file(path)?)?)
}

fn first_var(m: &Model) -> Result<MultiPoly, CliError> {
    if m.ring.arity() == 0 {
        return Err(CliError::Usage("the ring has no variables".into()));
    }
    Ok(MultiPoly::var(&m.ring, 0))
}

fn expr_poly(m: &Model, text: &str) -> Result<MultiPoly, CliError> {
    m.poly(&parse_expr(text)?)
}

/// The map over F_p: the spec's own map, or its reduction from Q.
fn over_fp(alpha: &AlgebraMap, p: u64) -> Result<AlgebraMap, CliError> {
    match alpha.ring().field() {
        FieldSpec::PrimeField(q) if *q == p => Ok(alpha.clone()),
        FieldSpec::PrimeField(q) => Err(CliError::Usage(format!("spec is over F_{q}, not F_{p}"))),
        FieldSpec::Rationals => alpha
            .reduce_mod_p(p)?
            .ok_or_else(|| CliError::Usage(format!("the map has no invertible reduction mod {p}"))),
        FieldSpec::Cyclotomic(_) => Err(CliError::Core(skew_core::Error::Unsupported(
            "reduction from a cyclotomic field".into(),
        ))),
    }
}

pub fn execute(cmd: &Cmd) -> Result<Outcome, CliError> {
    match cmd {
        Cmd::Fmt { spec } => {
            let s = parse_spec(&read_file(spec)?)?;
            let text = s.to_string();
            Ok(Outcome { result: json!({ "canonical": text }), text, ..Default::default() })
        }
        Cmd::Classify { spec } => classify(&load(spec)?),
        Cmd::Decide { spec, order_bound, primitive, certificate } => {
            let m = load(spec)?;
            let opts = DecideOptions {
                order_bound: *order_bound,
                primitivity: primitive.map(|p| PrimitivityCertificate { primitive: p, source: certificate.clone() }),
            };
            let v = diamond::decide(m.alpha()?, &opts)?;
            Ok(Outcome {
                result: to_value(&v),
                text: diamond::explain(&v),
                caveats: v.caveats.clone(),
                ..Default::default()
            })
        }
        Cmd::Order { spec, bound } => {
            let m = load(spec)?;
            let o = m.alpha()?.order(*bound)?;
            Ok(Outcome { result: to_value(&o), text: format!("order: {o}\n"), ..Default::default() })
        }
        Cmd::Orbits { spec, prime, max_period } => orbits(&load(spec)?, *prime, *max_period),
        Cmd::Cycles { spec, prime, csv } => cycles(&load(spec)?, *prime, csv.as_ref()),
        Cmd::Curve { spec, degree, points } => curve(&load(spec)?, *degree, &read_file(points)?),
        Cmd::Special { spec, a, ideal, max_n } => {
            let m = load(spec)?;
            let a = expr_poly(&m, a)?;
            let ideals = ideal.iter().map(|i| m.ideal(i)).collect::<Result<Vec<_>, _>>()?;
            let sr = m.skew_ring(false)?;
            let rep = sr.coeffs().special_probe(&a, &ideals, *max_n)?;
            let mut text = format!("a = {}\n", rep.element);
            for e in &rep.entries {
                match e.least_n {
                    Some(n) => writeln!(text, "{}: least n = {n}", e.ideal),
                    None => writeln!(text, "{}: none up to n = {}", e.ideal, rep.n_max),
                }
                .expect("string write");
            }
            Ok(Outcome { result: to_value(&rep), text, ..Default::default() })
        }
        Cmd::Modlab { cmd } => modlab(cmd),
        Cmd::VerifyMatrixUnits { n, field } => {
            let f = parse_field_arg(field)?;
            let rep = matrix_units_verify(*n, &f)?;
            let mut text = format!("n = {}, field {}\n", rep.n, rep.field);
            for c in &rep.checks {
                let mark = if c.skew && c.dense { "ok" } else { "FAILED" };
                writeln!(text, "  {mark:6} {} (skew: {}, dense: {})", c.name, c.skew, c.dense).expect("string write");
            }
            writeln!(text, "all identities hold: {}", rep.all_hold).expect("string write");
            let out = Outcome { result: to_value(&rep), text, ..Default::default() };
            if rep.all_hold {
                Ok(out)
            } else {
                Err(CliError::Core(skew_core::Error::Invariant("a matrix-unit identity failed".into())))
            }
        }
        Cmd::Probe { spec, degree, height, max_period, prime, cap } => {
            let m = load(spec)?;
            let search = ProbeSearch {
                primes: prime.clone(),
                max_period: *max_period,
                degree: *degree,
                height: *height,
                selection_cap: *cap,
            };
            let rep = diamond::primitivity_probe(m.alpha()?, &search)?;
            let mut text = format!("{} orbits, {} selections tried\n", rep.orbits.len(), rep.selections_tried);
            for o in &rep.orbits {
                writeln!(text, "  orbit {}", o.join(" -> ")).expect("string write");
            }
            for h in &rep.hits {
                writeln!(text, "  on curve {} = 0: {}", h.curve, h.selection.join(", ")).expect("string write");
            }
            writeln!(text, "outcome: {:?}", rep.outcome).expect("string write");
            Ok(Outcome { result: to_value(&rep), text, warnings: rep.warnings.clone(), ..Default::default() })
        }
    }
}

fn parse_field_arg(s: &str) -> Result<FieldSpec, CliError> {
    let s = s.trim();
    if s == "Q" {
        return Ok(FieldSpec::Rationals);
    }
    if let Some(p) = s.strip_prefix("Fp(").and_then(|r| r.strip_suffix(')')) {
        let p: u64 = p.trim().parse().map_err(|_| CliError::Usage(format!("bad prime in {s:?}")))?;
        return Ok(FieldSpec::prime(p).map_err(skew_core::Error::from)?);
    }
    Err(CliError::Usage(format!("unsupported field {s:?}; expected Q or Fp(p)")))
}

fn classify(m: &Model) -> Result<Outcome, CliError> {
    let a = m.alpha()?;
    let plane = if m.ring.arity() == 2 && m.ring.kind() == &RingKind::Polynomial {
        Some(classify_plane(a)?)
    } else {
        None
    };
    let mut text = format!("ring: {}\nmap: {a}\nclass: {}\n", m.ring, a.class());
    let mut notes = Vec::new();
    if let Some(p) = &plane {
        writeln!(text, "plane type: {}", p.class).expect("string write");
        notes = p.notes.clone();
    }
    let result = json!({
        "ring": m.ring.to_string(),
        "map": a,
        "class": a.class(),
        "plane_class": plane.as_ref().map(|p| to_value(&p.class)),
        "notes": notes,
    });
    Ok(Outcome { result, text, warnings: notes, ..Default::default() })
}

fn orbits(m: &Model, p: u64, max_period: u64) -> Result<Outcome, CliError> {
    let a = over_fp(m.alpha()?, p)?;
    let dec = periodic_points_ff(&a, DEFAULT_FF_POINT_CAP)?;
    let field = a.ring().field().clone();
    let mut list = Vec::new();
    let mut text = String::new();
    for c in dec.cycles.iter().filter(|c| c.length <= max_period) {
        let seed: Point = c.representative.iter().map(|&v| Scalar::from_int(&field, v as i64)).collect();
        let o = orbit(&seed, &a, c.length)?;
        let pts: Vec<String> = o.points.iter().map(|q| fmt_point(q)).collect();
        writeln!(text, "period {}: {}", c.length, pts.join(" -> ")).expect("string write");
        list.push(json!({ "period": c.length, "points": pts }));
    }
    writeln!(text, "{} orbits of period ≤ {max_period} over F_{p}", list.len()).expect("string write");
    Ok(Outcome {
        result: json!({ "p": p, "max_period": max_period, "orbits": list }),
        text,
        ..Default::default()
    })
}

fn cycles(m: &Model, p: u64, csv_path: Option<&PathBuf>) -> Result<Outcome, CliError> {
    let a = over_fp(m.alpha()?, p)?;
    let dec = periodic_points_ff(&a, DEFAULT_FF_POINT_CAP)?;
    let mut text = format!("F_{p}: {} points in {} cycles\n", dec.points, dec.cycles.len());
    for (len, count) in &dec.histogram {
        writeln!(text, "  length {len}: {count}").expect("string write");
    }
    if let Some(path) = csv_path {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(["length", "count"]).map_err(io)?;
        for (len, count) in &dec.histogram {
            w.write_record([len.to_string(), count.to_string()]).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    let histogram: BTreeMap<String, u64> = dec.histogram.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    Ok(Outcome {
        result: json!({ "p": p, "points": dec.points, "cycles": dec.cycles.len(), "histogram": histogram }),
        text,
        ..Default::default()
    })
}

fn curve(m: &Model, degree: u32, points_text: &str) -> Result<Outcome, CliError> {
    let raw = parse_points(points_text, m.ring.arity())?;
    let pts: Vec<Point> = raw
        .iter()
        .map(|coords| coords.iter().map(|e| m.constant(e)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    let c = curve_membership(&m.ring, &pts, degree)?;
    let shown: Vec<String> = pts.iter().map(|p| fmt_point(p)).collect();
    let text = match &c {
        Some(f) => format!("{} points lie on {f} = 0 (degree ≤ {degree})\n", pts.len()),
        None => format!("no curve of degree ≤ {degree} through the {} points\n", pts.len()),
    };
    Ok(Outcome {
        result: json!({ "degree": degree, "points": shown, "curve": c.map(|f| f.to_string()) }),
        text,
        ..Default::default()
    })
}

fn modlab(cmd: &ModlabCmd) -> Result<Outcome, CliError> {
    match cmd {
        ModlabCmd::Chain { spec, rho, max } => {
            let m = load(spec)?;
            let rho = match rho {
                Some(r) => expr_poly(&m, r)?,
                None => first_var(&m)?,
            };
            let rep = chain_check(&m.ring, &rho, *max)?;
            let mut text = format!("rho = {}\n", rep.rho);
            for l in &rep.links {
                writeln!(text, "  m = {}: {} ({})", l.m, if l.strict { "strict" } else { "not certified" }, l.certificate)
                    .expect("string write");
            }
            writeln!(text, "all strict: {}", rep.all_strict).expect("string write");
            Ok(Outcome { result: to_value(&rep), text, ..Default::default() })
        }
        ModlabCmd::Essential { spec, elem, bound, rho, length_budget } => {
            let m = load(spec)?;
            let sr = m.skew_ring(false)?;
            let rho = match rho {
                Some(r) => expr_poly(&m, r)?,
                None => first_var(&m)?,
            };
            let module = CyclicModule::new(&sr, &rho)?;
            let f = m.skew(&sr, &parse_expr(elem)?)?;
            let nf = module.normal_form(&f)?;
            let shown = sr.display(&module.lift(&nf)?);
            let out = module.essential_probe(&nf, *bound, *length_budget)?;
            let mut text = format!("M = S/{rho}(1 - theta)S, m = {shown} (length {})\n", nf.length());
            match &out {
                EssentialOutcome::Witness { multiplier, image_tail, .. } => {
                    writeln!(text, "m * ({multiplier}) = {rho}*({image_tail}), a nonzero element of V").expect("string write")
                }
                EssentialOutcome::NotFound { reached_length, .. } => {
                    writeln!(text, "no witness within the bounds; reached length {reached_length}").expect("string write")
                }
            }
            Ok(Outcome {
                result: json!({ "rho": rho.to_string(), "element": shown, "length": nf.length(), "outcome": out }),
                text,
                ..Default::default()
            })
        }
        ModlabCmd::Lattice { spec, u, generator, bound } => {
            let m = load(spec)?;
            let sr = m.skew_ring(false)?;
            let u = m.constant(&parse_expr(u)?)?;
            let gens = if generator.is_empty() {
                vec![sr.constant(first_var(&m)?)]
            } else {
                generator.iter().map(|g| m.skew(&sr, &parse_expr(g)?)).collect::<Result<Vec<_>, _>>()?
            };
            let desc = lattice_contract(&sr, &gens, &u, *bound)?;
            let again = lattice_contract(&sr, &lattice_expand(&sr, &desc)?, &u, *bound)?;
            if again != desc {
                return Err(CliError::Core(skew_core::Error::Invariant(format!(
                    "expand/contract is not idempotent: {desc} vs {again}"
                ))));
            }
            let x = first_var(&m)?;
            let calc = calc_identity_holds(&sr, &u, &x)?;
            let text = format!(
                "submodule: {desc}\ncontraction ideal: {}\ncalc identity for r = {x}: {calc}\n",
                desc.ideal
            );
            Ok(Outcome {
                result: json!({ "submodule": desc, "ideal": desc.ideal.to_string(), "calc_identity": calc }),
                text,
                ..Default::default()
            })
        }
    }
}
