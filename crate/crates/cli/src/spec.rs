//! Spec-file grammar: lexer, AST, parser and pretty-printer.
//!
//! One declaration per line; `#` starts a comment. Expressions:
//!
//! ```text
//! EXPR   := ['-'] TERM (('+'|'-') TERM)*
//! TERM   := FACTOR ('*' FACTOR)*
//! FACTOR := BASE ('^' ['-'] INT)?
//! BASE   := INT ['/' INT] | 'zeta' | 'theta' | IDENT | '(' EXPR ')'
//! ```

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Lexical,
    Syntactic,
    Semantic,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Lexical => "lexical error",
            ErrorKind::Syntactic => "syntax error",
            ErrorKind::Semantic => "semantic error",
        })
    }
}

/// Error with a 1-based source position.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}: {message}")]
pub struct ParseError {
    pub kind: ErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(kind: ErrorKind, line: usize, col: usize, message: impl Into<String>) -> ParseError {
        ParseError { kind, line, col, message: message.into() }
    }
}

/// Numeric literal kept as written so printing reproduces it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Literal {
    pub num: BigUint,
    pub den: Option<BigUint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Base {
    Num(Literal),
    Zeta,
    Theta,
    Var(String),
    Paren(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub base: Base,
    pub exp: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term(pub Vec<Factor>);

/// Sum of signed terms; `true` marks a subtracted (or leading negated) term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub terms: Vec<(bool, Term)>,
}

impl Expr {
    /// Identifiers other than `zeta`/`theta`, in order of appearance.
    pub fn idents(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_idents(&mut out);
        out
    }

    fn collect_idents<'a>(&'a self, out: &mut Vec<&'a str>) {
        for (_, t) in &self.terms {
            for f in &t.0 {
                match &f.base {
                    Base::Var(v) => out.push(v),
                    Base::Paren(e) => e.collect_idents(out),
                    _ => {}
                }
            }
        }
    }

    pub fn any_base(&self, pred: &dyn Fn(&Base) -> bool) -> bool {
        self.terms.iter().flat_map(|(_, t)| &t.0).any(|f| {
            pred(&f.base)
                || match &f.base {
                    Base::Paren(e) => e.any_base(pred),
                    _ => false,
                }
        })
    }

    pub fn has_negative_exponent(&self) -> bool {
        self.terms.iter().flat_map(|(_, t)| &t.0).any(|f| {
            f.exp.is_some_and(|e| e < 0)
                || match &f.base {
                    Base::Paren(e) => e.has_negative_exponent(),
                    _ => false,
                }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldDecl {
    Q,
    Fp(u64),
    Qzeta(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingDecl {
    Poly(Vec<String>),
    Laurent(Vec<String>),
    Quot(String, Expr),
}

impl RingDecl {
    pub fn vars(&self) -> Vec<String> {
        match self {
            RingDecl::Poly(v) | RingDecl::Laurent(v) => v.clone(),
            RingDecl::Quot(x, _) => vec![x.clone()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Field(FieldDecl),
    Ring(RingDecl),
    AutoImage { var: String, expr: Expr },
    AutoLinear(Vec<Vec<Expr>>),
    AutoMonomial(Vec<Vec<i64>>),
    AutoHenon { lambda: Expr, beta: Expr },
    Let { name: String, expr: Expr },
    Ideal { name: String, gens: Vec<Expr> },
    Point { name: String, coords: Vec<Expr> },
}

/// Parsed spec file. Equality compares declarations only, not positions.
#[derive(Clone, Debug)]
pub struct SpecFile {
    pub decls: Vec<Decl>,
    /// Source line of each declaration.
    pub lines: Vec<usize>,
}

impl PartialEq for SpecFile {
    fn eq(&self, other: &Self) -> bool {
        self.decls == other.decls
    }
}

impl Eq for SpecFile {}

impl SpecFile {
    pub fn field(&self) -> &FieldDecl {
        self.decls
            .iter()
            .find_map(|d| match d {
                Decl::Field(f) => Some(f),
                _ => None,
            })
            .expect("validated spec has a field")
    }

    pub fn ring(&self) -> &RingDecl {
        self.decls
            .iter()
            .find_map(|d| match d {
                Decl::Ring(r) => Some(r),
                _ => None,
            })
            .expect("validated spec has a ring")
    }
}

// ---------------------------------------------------------------- lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigUint),
    Arrow,
    Sym(char),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    col: usize,
}

fn lex(line: &str, line_no: usize) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Spanned { tok: Tok::Ident(chars[start..i].iter().collect()), col });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<BigUint>().expect("ascii digits");
            out.push(Spanned { tok: Tok::Int(v), col });
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Spanned { tok: Tok::Arrow, col });
            i += 2;
        } else if "+-*/^()[],;=".contains(c) {
            out.push(Spanned { tok: Tok::Sym(c), col });
            i += 1;
        } else {
            return Err(ParseError::new(ErrorKind::Lexical, line_no, col, format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- parser

struct Cursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |s| s.col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::new(ErrorKind::Syntactic, self.line, self.col(), msg))
    }

    fn semantic<T>(&self, col: usize, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::new(ErrorKind::Semantic, self.line, col, msg))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn int(&mut self) -> Result<BigUint, ParseError> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = v.clone();
                self.pos += 1;
                Ok(v)
            }
            _ => self.err("expected integer"),
        }
    }

    fn small_int(&mut self) -> Result<u64, ParseError> {
        let col = self.col();
        let v = self.int()?;
        u64::try_from(&v).or_else(|_| self.semantic(col, "integer too large"))
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat('-');
        let col = self.col();
        let v = self.small_int()?;
        let v = i64::try_from(v).or_else(|_| self.semantic(col, "integer too large"))?;
        Ok(if neg { -v } else { v })
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            self.err("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = Vec::new();
        let neg = self.eat('-');
        terms.push((neg, self.term()?));
        loop {
            if self.eat('+') {
                terms.push((false, self.term()?));
            } else if self.eat('-') {
                terms.push((true, self.term()?));
            } else {
                break;
            }
        }
        Ok(Expr { terms })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut fs = vec![self.factor()?];
        while self.eat('*') {
            fs.push(self.factor()?);
        }
        Ok(Term(fs))
    }

    fn factor(&mut self) -> Result<Factor, ParseError> {
        let base = self.base()?;
        let exp = if self.eat('^') { Some(self.signed_int()?) } else { None };
        Ok(Factor { base, exp })
    }

    fn base(&mut self) -> Result<Base, ParseError> {
        match self.peek() {
            Some(Tok::Int(_)) => {
                let num = self.int()?;
                let den = if self.eat('/') {
                    let col = self.col();
                    let d = self.int()?;
                    if d == BigUint::from(0u32) {
                        return self.semantic(col, "zero denominator");
                    }
                    Some(d)
                } else {
                    None
                };
                Ok(Base::Num(Literal { num, den }))
            }
            Some(Tok::Ident(s)) => {
                let b = match s.as_str() {
                    "zeta" => Base::Zeta,
                    "theta" => Base::Theta,
                    _ => Base::Var(s.clone()),
                };
                self.pos += 1;
                Ok(b)
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(Base::Paren(Box::new(e)))
            }
            _ => self.err("expected a number, variable or '('"),
        }
    }

    /// `(a, b, ...)` of expressions.
    fn expr_tuple(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect('(')?;
        let mut out = vec![self.expr()?];
        while self.eat(',') {
            out.push(self.expr()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn ident_list(&mut self) -> Result<Vec<String>, ParseError> {
        self.expect('(')?;
        let mut out = vec![self.ident()?];
        while self.eat(',') {
            out.push(self.ident()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn matrix<T>(&mut self, mut entry: impl FnMut(&mut Self) -> Result<T, ParseError>) -> Result<Vec<Vec<T>>, ParseError> {
        self.expect('[')?;
        let mut rows = Vec::new();
        loop {
            self.expect('[')?;
            let mut row = vec![entry(self)?];
            while self.eat(',') {
                row.push(entry(self)?);
            }
            self.expect(']')?;
            rows.push(row);
            if !self.eat(',') {
                break;
            }
        }
        self.expect(']')?;
        Ok(rows)
    }
}

fn cursor<'a>(toks: &'a [Spanned], line: usize, text: &str) -> Cursor<'a> {
    Cursor { toks, pos: 0, line, end_col: text.chars().count() + 1 }
}

/// Parses a standalone expression (command-line arguments, fuzzing).
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    if text.contains('\n') {
        return Err(ParseError::new(ErrorKind::Lexical, 1, 1, "expression must be a single line"));
    }
    let toks = lex(text, 1)?;
    let mut c = cursor(&toks, 1, text);
    let e = c.expr()?;
    c.finish()?;
    Ok(e)
}

fn parse_decl(c: &mut Cursor<'_>) -> Result<Decl, ParseError> {
    let kw_col = c.col();
    let kw = c.ident()?;
    let d = match kw.as_str() {
        "field" => {
            let name = c.ident()?;
            match name.as_str() {
                "Q" => Decl::Field(FieldDecl::Q),
                "Fp" => {
                    c.expect('(')?;
                    let col = c.col();
                    let p = c.small_int()?;
                    c.expect(')')?;
                    if !skew_core::scalars::is_prime(p) {
                        return c.semantic(col, format!("{p} is not prime"));
                    }
                    Decl::Field(FieldDecl::Fp(p))
                }
                "Qzeta" => {
                    c.expect('(')?;
                    let col = c.col();
                    let n = c.small_int()?;
                    c.expect(')')?;
                    if n == 0 || n > 10_000 {
                        return c.semantic(col, "cyclotomic index must lie in 1..=10000");
                    }
                    Decl::Field(FieldDecl::Qzeta(n as u32))
                }
                other => return c.semantic(kw_col, format!("unknown field {other:?}; expected Q, Fp(p) or Qzeta(n)")),
            }
        }
        "ring" => {
            let kind = c.ident()?;
            match kind.as_str() {
                "poly" => Decl::Ring(RingDecl::Poly(c.ident_list()?)),
                "laurent" => Decl::Ring(RingDecl::Laurent(c.ident_list()?)),
                "quot" => {
                    c.expect('(')?;
                    let x = c.ident()?;
                    c.expect(';')?;
                    let m = c.expr()?;
                    c.expect(')')?;
                    Decl::Ring(RingDecl::Quot(x, m))
                }
                other => return c.semantic(kw_col, format!("unknown ring kind {other:?}")),
            }
        }
        "auto" => match c.peek() {
            Some(Tok::Ident(s)) if s == "linear" && c.toks.get(c.pos + 1).map(|t| &t.tok) == Some(&Tok::Sym('[')) => {
                c.pos += 1;
                Decl::AutoLinear(c.matrix(|c| c.expr())?)
            }
            Some(Tok::Ident(s)) if s == "monomial" && c.toks.get(c.pos + 1).map(|t| &t.tok) == Some(&Tok::Sym('[')) => {
                c.pos += 1;
                Decl::AutoMonomial(c.matrix(|c| c.signed_int())?)
            }
            Some(Tok::Ident(s)) if s == "henon" && c.toks.get(c.pos + 1).map(|t| &t.tok) == Some(&Tok::Sym('(')) => {
                c.pos += 1;
                c.expect('(')?;
                let lambda = c.expr()?;
                c.expect(',')?;
                let beta = c.expr()?;
                c.expect(')')?;
                Decl::AutoHenon { lambda, beta }
            }
            _ => {
                let var = c.ident()?;
                match c.bump() {
                    Some(Tok::Arrow) => {}
                    _ => {
                        c.pos -= 1;
                        return c.err("expected '->'");
                    }
                }
                Decl::AutoImage { var, expr: c.expr()? }
            }
        },
        "let" => {
            let name = c.ident()?;
            c.expect('=')?;
            Decl::Let { name, expr: c.expr()? }
        }
        "ideal" => {
            let name = c.ident()?;
            c.expect('=')?;
            Decl::Ideal { name, gens: c.expr_tuple()? }
        }
        "point" => {
            let name = c.ident()?;
            c.expect('=')?;
            Decl::Point { name, coords: c.expr_tuple()? }
        }
        other => return c.semantic(kw_col, format!("unknown declaration {other:?}")),
    };
    c.finish()?;
    Ok(d)
}

/// Parses and validates a spec file.
pub fn parse_spec(text: &str) -> Result<SpecFile, ParseError> {
    let mut decls = Vec::new();
    let mut lines = Vec::new();
    let mut cols = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let toks = lex(line, i + 1)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = cursor(&toks, i + 1, line);
        decls.push(parse_decl(&mut c)?);
        lines.push(i + 1);
        cols.push(toks[0].col);
    }
    let spec = SpecFile { decls, lines };
    validate(&spec, &cols)?;
    Ok(spec)
}

const RESERVED: [&str; 2] = ["zeta", "theta"];

fn validate(spec: &SpecFile, cols: &[usize]) -> Result<(), ParseError> {
    let sem = |k: usize, msg: String| Err(ParseError::new(ErrorKind::Semantic, spec.lines[k], cols[k], msg));
    let eof_line = spec.lines.last().copied().unwrap_or(1);
    let mut field: Option<&FieldDecl> = None;
    let mut vars: Option<Vec<String>> = None;
    let mut laurent = false;
    let mut names: Vec<String> = Vec::new();
    let mut auto_style: Option<&'static str> = None;
    let mut imaged: Vec<String> = Vec::new();

    for (k, d) in spec.decls.iter().enumerate() {
        let check_expr = |e: &Expr, scope: &[String], allow_neg: bool| -> Result<(), ParseError> {
            for v in e.idents() {
                if !scope.iter().any(|s| s == v) {
                    return sem(k, format!("undeclared variable {v:?}"));
                }
            }
            if e.any_base(&|b| matches!(b, Base::Theta)) {
                return sem(k, "theta is only allowed in skew expressions".into());
            }
            if e.any_base(&|b| matches!(b, Base::Zeta)) && !matches!(field, Some(FieldDecl::Qzeta(_))) {
                return sem(k, "zeta needs a Qzeta(n) field".into());
            }
            if !allow_neg && e.has_negative_exponent() {
                return sem(k, "negative exponents need a Laurent ring".into());
            }
            Ok(())
        };
        match d {
            Decl::Field(f) => {
                if field.is_some() {
                    return sem(k, "field declared twice".into());
                }
                field = Some(f);
            }
            Decl::Ring(r) => {
                if field.is_none() {
                    return sem(k, "ring declared before field".into());
                }
                if vars.is_some() {
                    return sem(k, "ring declared twice".into());
                }
                let vs = r.vars();
                for (i, v) in vs.iter().enumerate() {
                    if RESERVED.contains(&v.as_str()) {
                        return sem(k, format!("{v:?} is reserved"));
                    }
                    if vs[..i].contains(v) {
                        return sem(k, format!("duplicate variable {v:?}"));
                    }
                }
                if let RingDecl::Quot(_, m) = r {
                    check_expr(m, &vs, false)?;
                }
                laurent = matches!(r, RingDecl::Laurent(_));
                vars = Some(vs);
            }
            _ => {
                let Some(vs) = vars.as_ref() else {
                    return sem(k, "declaration before the ring".into());
                };
                let scope: Vec<String> = vs.iter().chain(names.iter()).cloned().collect();
                let style = match d {
                    Decl::AutoImage { .. } => Some("images"),
                    Decl::AutoLinear(_) => Some("linear"),
                    Decl::AutoMonomial(_) => Some("monomial"),
                    Decl::AutoHenon { .. } => Some("henon"),
                    _ => None,
                };
                if let Some(s) = style {
                    match auto_style {
                        Some(prev) if prev != s => {
                            return sem(k, format!("automorphism given both as {prev} and as {s}"));
                        }
                        Some(prev) if prev == "linear" || prev == "monomial" => {
                            return sem(k, "automorphism declared twice".into());
                        }
                        _ => auto_style = Some(s),
                    }
                }
                match d {
                    Decl::AutoImage { var, expr } => {
                        if !vs.contains(var) {
                            return sem(k, format!("undeclared variable {var:?}"));
                        }
                        if imaged.contains(var) {
                            return sem(k, format!("image of {var:?} given twice"));
                        }
                        imaged.push(var.clone());
                        check_expr(expr, vs, laurent)?;
                    }
                    Decl::AutoLinear(m) => {
                        if m.len() != vs.len() || m.iter().any(|r| r.len() != vs.len()) {
                            return sem(k, format!("linear matrix must be {0}x{0}", vs.len()));
                        }
                        for e in m.iter().flatten() {
                            check_expr(e, &[], false)?;
                        }
                    }
                    Decl::AutoMonomial(m) => {
                        if !laurent {
                            return sem(k, "monomial automorphisms need a Laurent ring".into());
                        }
                        if m.len() != vs.len() || m.iter().any(|r| r.len() != vs.len()) {
                            return sem(k, format!("monomial matrix must be {0}x{0}", vs.len()));
                        }
                    }
                    Decl::AutoHenon { lambda, beta } => {
                        if vs.len() != 2 || laurent || matches!(spec.ring(), RingDecl::Quot(..)) {
                            return sem(k, "henon factors need ring poly(x, y)".into());
                        }
                        check_expr(lambda, &[], false)?;
                        check_expr(beta, &vs[1..], false)?;
                    }
                    Decl::Let { name, expr } => {
                        check_expr(expr, &scope, laurent)?;
                        declare(&mut names, vs, name).or_else(|m| sem(k, m))?;
                    }
                    Decl::Ideal { name, gens } => {
                        for g in gens {
                            check_expr(g, &scope, laurent)?;
                        }
                        declare(&mut names, vs, name).or_else(|m| sem(k, m))?;
                    }
                    Decl::Point { name, coords } => {
                        if coords.len() != vs.len() {
                            return sem(k, format!("point needs {} coordinates", vs.len()));
                        }
                        for e in coords {
                            check_expr(e, &[], false)?;
                        }
                        declare(&mut names, vs, name).or_else(|m| sem(k, m))?;
                    }
                    Decl::Field(_) | Decl::Ring(_) => unreachable!(),
                }
            }
        }
    }
    if field.is_none() {
        return Err(ParseError::new(ErrorKind::Semantic, eof_line, 1, "missing field declaration"));
    }
    if vars.is_none() {
        return Err(ParseError::new(ErrorKind::Semantic, eof_line, 1, "missing ring declaration"));
    }
    if auto_style == Some("images") {
        let vs = vars.as_ref().expect("checked");
        if let Some(v) = vs.iter().find(|v| !imaged.contains(v)) {
            return Err(ParseError::new(ErrorKind::Semantic, eof_line, 1, format!("no image given for {v:?}")));
        }
    }
    Ok(())
}

fn declare(names: &mut Vec<String>, vars: &[String], name: &str) -> Result<(), String> {
    if RESERVED.contains(&name) || vars.iter().any(|v| v == name) || names.iter().any(|n| n == name) {
        return Err(format!("name {name:?} already in use"));
    }
    names.push(name.to_string());
    Ok(())
}

// ---------------------------------------------------------------- printer

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.den {
            Some(d) => write!(f, "{}/{}", self.num, d),
            None => write!(f, "{}", self.num),
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Num(l) => write!(f, "{l}"),
            Base::Zeta => f.write_str("zeta"),
            Base::Theta => f.write_str("theta"),
            Base::Var(v) => f.write_str(v),
            Base::Paren(e) => write!(f, "({e})"),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exp {
            Some(e) => write!(f, "{}^{e}", self.base),
            None => write!(f, "{}", self.base),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (neg, t)) in self.terms.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{t}")?,
                (0, false) => write!(f, "{t}")?,
                (_, true) => write!(f, " - {t}")?,
                (_, false) => write!(f, " + {t}")?,
            }
        }
        Ok(())
    }
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn matrix<T: fmt::Display>(m: &[Vec<T>]) -> String {
    let rows: Vec<String> = m.iter().map(|r| format!("[{}]", join(r))).collect();
    format!("[{}]", rows.join(", "))
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::Field(FieldDecl::Q) => f.write_str("field Q"),
            Decl::Field(FieldDecl::Fp(p)) => write!(f, "field Fp({p})"),
            Decl::Field(FieldDecl::Qzeta(n)) => write!(f, "field Qzeta({n})"),
            Decl::Ring(RingDecl::Poly(v)) => write!(f, "ring poly({})", v.join(", ")),
            Decl::Ring(RingDecl::Laurent(v)) => write!(f, "ring laurent({})", v.join(", ")),
            Decl::Ring(RingDecl::Quot(x, m)) => write!(f, "ring quot({x}; {m})"),
            Decl::AutoImage { var, expr } => write!(f, "auto {var} -> {expr}"),
            Decl::AutoLinear(m) => write!(f, "auto linear {}", matrix(m)),
            Decl::AutoMonomial(m) => write!(f, "auto monomial {}", matrix(m)),
            Decl::AutoHenon { lambda, beta } => write!(f, "auto henon({lambda}, {beta})"),
            Decl::Let { name, expr } => write!(f, "let {name} = {expr}"),
            Decl::Ideal { name, gens } => write!(f, "ideal {name} = ({})", join(gens)),
            Decl::Point { name, coords } => write!(f, "point {name} = ({})", join(coords)),
        }
    }
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Parses a points file: one point per line, coordinates separated by
/// commas, optionally parenthesized. Coordinates are constant expressions.
pub fn parse_points(text: &str, arity: usize) -> Result<Vec<Vec<Expr>>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let toks = lex(line, i + 1)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = cursor(&toks, i + 1, line);
        let coords = if c.peek() == Some(&Tok::Sym('(')) {
            c.expr_tuple()?
        } else {
            let mut v = vec![c.expr()?];
            while c.eat(',') {
                v.push(c.expr()?);
            }
            v
        };
        c.finish()?;
        if coords.len() != arity {
            return Err(ParseError::new(
                ErrorKind::Semantic,
                i + 1,
                toks[0].col,
                format!("expected {arity} coordinates, found {}", coords.len()),
            ));
        }
        for e in &coords {
            if let Some(v) = e.idents().first() {
                return Err(ParseError::new(ErrorKind::Semantic, i + 1, toks[0].col, format!("coordinate uses variable {v:?}")));
            }
            if e.any_base(&|b| matches!(b, Base::Theta)) {
                return Err(ParseError::new(ErrorKind::Semantic, i + 1, toks[0].col, "theta in a coordinate"));
            }
        }
        out.push(coords);
    }
    Ok(out)
}
