//! The `.pde` system language: a line-oriented grammar of semicolon-
//! terminated statements.
//!
//! ```text
//! system nls;
//! indep t, x;
//! dep v, w;
//! param gamma = 1/10;
//! param sigma;              # free parameter
//! order 2;                  # optional; must cover every index present
//! eq v_t + gamma*v - w_xx = 0;
//! singular v = 0;
//! expect dim_E = 12;        # reference values for report comparison
//! ```
//!
//! Jet variables are written `u_txx`: a declared dependent name, an
//! underscore, then a string of declared independent names (longest match,
//! so multi-character names like `u1` work). Permutations of the index
//! string name the same coordinate.

use crate::expr::{self, ExprRef};
use crate::system::{Expectation, ParamValue, Parameter, SystemSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DslError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: undeclared symbol `{name}`")]
    Undeclared { line: usize, col: usize, name: String },
    #[error("{line}:{col}: inconsistent index `{index}` on `{base}`: {msg}")]
    BadIndex {
        line: usize,
        col: usize,
        base: String,
        index: String,
        msg: String,
    },
}

/// A validation diagnostic with a stable machine code.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub code: &'static str,
    pub message: String,
}

const KEYWORDS: &[&str] = &[
    "system", "indep", "dep", "param", "order", "eq", "singular", "expect", "regular", "free",
];

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(BigRational),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Equals,
    Comma,
    Semi,
    Bang,
    Gt,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, DslError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>,
                        line: &mut usize,
                        col: &mut usize| {
            let c = chars.next().unwrap();
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars, &mut line, &mut col);
            }
            '#' => {
                while let Some(&c2) = chars.peek() {
                    if c2 == '\n' {
                        break;
                    }
                    bump(&mut chars, &mut line, &mut col);
                }
            }
            '+' => {
                bump(&mut chars, &mut line, &mut col);
                out.push(Spanned { tok: Tok::Plus, line: tline, col: tcol });
            }
            '-' => {
                bump(&mut chars, &mut line, &mut col);
                out.push(Spanned { tok: Tok::Minus, line: tline, col: tcol });
            }
            '*' => {
                bump(&mut chars, &mut line, &mut col);
                out.push(Spanned { tok: Tok::Star, line: tline, col: tcol });
            }
            '/' => {
                bump(&mut chars, &mut line, &mut col);
                out.push(Spanned { tok: Tok::Slash, line: tline, col: tcol });
            }
            '^' => {
                bump(&mut chars, &mut line, &mut col);
                out.push(Spanned { tok: Tok::Caret, line: tline, col: tcol });
            }
            '(' => {
                bump(&mut chars, &mut line, &mut col);
                out.push(Spanned { tok: Tok::LParen, line: tline, col: tcol });
            }
            ')' => {
                bump(&mut chars, &mut line, &mut col);
                out.push(Spanned { tok: Tok::RParen, line: tline, col: tcol });
            }
            '=' => {
                bump(&mut chars, &mut line, &mut col);
                out.push(Spanned { tok: Tok::Equals, line: tline, col: tcol });
            }
            ',' => {
                bump(&mut chars, &mut line, &mut col);
                out.push(Spanned { tok: Tok::Comma, line: tline, col: tcol });
            }
            ';' => {
                bump(&mut chars, &mut line, &mut col);
                out.push(Spanned { tok: Tok::Semi, line: tline, col: tcol });
            }
            '!' => {
                bump(&mut chars, &mut line, &mut col);
                out.push(Spanned { tok: Tok::Bang, line: tline, col: tcol });
            }
            '>' => {
                bump(&mut chars, &mut line, &mut col);
                out.push(Spanned { tok: Tok::Gt, line: tline, col: tcol });
            }
            '0'..='9' => {
                let mut s = String::new();
                let mut seen_dot = false;
                while let Some(&c2) = chars.peek() {
                    if c2.is_ascii_digit() {
                        s.push(bump(&mut chars, &mut line, &mut col));
                    } else if c2 == '.' && !seen_dot {
                        seen_dot = true;
                        s.push(bump(&mut chars, &mut line, &mut col));
                    } else {
                        break;
                    }
                }
                let value = parse_decimal(&s).ok_or(DslError::Syntax {
                    line: tline,
                    col: tcol,
                    msg: format!("bad number literal `{}`", s),
                })?;
                out.push(Spanned { tok: Tok::Number(value), line: tline, col: tcol });
            }
            c2 if c2.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(&c3) = chars.peek() {
                    if c3.is_ascii_alphanumeric() || c3 == '_' {
                        s.push(bump(&mut chars, &mut line, &mut col));
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Ident(s), line: tline, col: tcol });
            }
            other => {
                return Err(DslError::Syntax {
                    line: tline,
                    col: tcol,
                    msg: format!("unexpected character `{}`", other),
                })
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    if let Some(dot) = s.find('.') {
        let int_part = &s[..dot];
        let frac_part = &s[dot + 1..];
        if frac_part.is_empty() {
            return None;
        }
        let digits: String = format!("{}{}", int_part, frac_part);
        let num: BigInt = digits.parse().ok()?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        Some(BigRational::new(num, den))
    } else {
        let num: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(num))
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    name: String,
    indep: Vec<String>,
    dep: Vec<String>,
    params: Vec<Parameter>,
    declared_order: Option<u32>,
    equations: Vec<ExprRef>,
    singular: Vec<ExprRef>,
    expectations: Vec<Expectation>,
    regular: Vec<crate::system::DeclaredRegularity>,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, DslError> {
        let t = self.peek();
        Err(DslError::Syntax {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        })
    }

    fn expect_tok(&mut self, want: Tok, what: &str) -> Result<(), DslError> {
        if self.peek().tok == want {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected {}", what))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, usize, usize), DslError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Ident(s) => {
                self.next();
                Ok((s, t.line, t.col))
            }
            _ => self.err("expected identifier"),
        }
    }

    fn declare_name(&mut self, name: &str, line: usize, col: usize) -> Result<(), DslError> {
        if KEYWORDS.contains(&name) {
            return Err(DslError::Syntax {
                line,
                col,
                msg: format!("`{}` is a reserved word", name),
            });
        }
        if name.contains('_') {
            return Err(DslError::Syntax {
                line,
                col,
                msg: format!("declared name `{}` may not contain `_`", name),
            });
        }
        Ok(())
    }

    fn statement(&mut self) -> Result<bool, DslError> {
        let t = self.peek().clone();
        let kw = match &t.tok {
            Tok::Eof => return Ok(false),
            Tok::Ident(s) => s.clone(),
            _ => return self.err("expected a statement keyword"),
        };
        match kw.as_str() {
            "system" => {
                self.next();
                let (name, _, _) = self.expect_ident()?;
                self.name = name;
                self.expect_tok(Tok::Semi, "`;`")?;
            }
            "indep" | "dep" => {
                self.next();
                loop {
                    let (name, line, col) = self.expect_ident()?;
                    self.declare_name(&name, line, col)?;
                    if kw == "indep" {
                        self.indep.push(name);
                    } else {
                        self.dep.push(name);
                    }
                    match self.peek().tok {
                        Tok::Comma => {
                            self.next();
                        }
                        Tok::Semi => {
                            self.next();
                            break;
                        }
                        _ => return self.err("expected `,` or `;`"),
                    }
                }
            }
            "param" => {
                self.next();
                let (name, line, col) = self.expect_ident()?;
                self.declare_name(&name, line, col)?;
                let value = if self.peek().tok == Tok::Equals {
                    self.next();
                    let e = self.expr()?;
                    match &*e {
                        expr::Expr::Const(c) => ParamValue::Fixed(c.clone()),
                        _ => return self.err("parameter value must be a constant"),
                    }
                } else {
                    ParamValue::Free
                };
                self.params.push(Parameter { name, value });
                self.expect_tok(Tok::Semi, "`;`")?;
            }
            "order" => {
                self.next();
                let t = self.next();
                let n = match t.tok {
                    Tok::Number(v) if v.is_integer() && !v.numer().sign().eq(&num_bigint::Sign::Minus) => {
                        use num_traits::ToPrimitive;
                        v.to_integer().to_u32()
                    }
                    _ => None,
                };
                let Some(n) = n else {
                    return Err(DslError::Syntax {
                        line: t.line,
                        col: t.col,
                        msg: "order must be a non-negative integer".into(),
                    });
                };
                self.declared_order = Some(n);
                self.expect_tok(Tok::Semi, "`;`")?;
            }
            "eq" => {
                self.next();
                let lhs = self.expr()?;
                self.expect_tok(Tok::Equals, "`=`")?;
                let rhs = self.expr()?;
                self.equations.push(expr::sub(lhs, rhs));
                self.expect_tok(Tok::Semi, "`;`")?;
            }
            "singular" => {
                self.next();
                let lhs = self.expr()?;
                let e = if self.peek().tok == Tok::Equals {
                    self.next();
                    let rhs = self.expr()?;
                    expr::sub(lhs, rhs)
                } else {
                    lhs
                };
                self.singular.push(e);
                self.expect_tok(Tok::Semi, "`;`")?;
            }
            "regular" => {
                self.next();
                let e = self.expr()?;
                let kind = match self.peek().tok {
                    Tok::Bang => {
                        self.next();
                        self.expect_tok(Tok::Equals, "`=`")?;
                        crate::system::RegKind::NonZero
                    }
                    Tok::Gt => {
                        self.next();
                        crate::system::RegKind::Positive
                    }
                    _ => return self.err("expected `!=` or `>`"),
                };
                let t = self.next();
                match t.tok {
                    Tok::Number(v) if v.is_zero() => {}
                    _ => {
                        return Err(DslError::Syntax {
                            line: t.line,
                            col: t.col,
                            msg: "regularity comparisons must be against 0".into(),
                        })
                    }
                }
                self.regular
                    .push(crate::system::DeclaredRegularity { expr: e, kind });
                self.expect_tok(Tok::Semi, "`;`")?;
            }
            "expect" => {
                self.next();
                let (key, _, _) = self.expect_ident()?;
                self.expect_tok(Tok::Equals, "`=`")?;
                let e = self.expr()?;
                let v = match &*e {
                    expr::Expr::Const(c) if c.is_integer() => {
                        use num_traits::ToPrimitive;
                        c.to_integer().to_i64()
                    }
                    _ => None,
                };
                let Some(v) = v else {
                    return self.err("expect value must be an integer");
                };
                self.expectations.push(Expectation { key, value: v });
                self.expect_tok(Tok::Semi, "`;`")?;
            }
            _ => return self.err(format!("unknown statement `{}`", kw)),
        }
        Ok(true)
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<ExprRef, DslError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    acc = expr::add(acc, self.term()?);
                }
                Tok::Minus => {
                    self.next();
                    acc = expr::sub(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<ExprRef, DslError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    acc = expr::mul(acc, self.unary()?);
                }
                Tok::Slash => {
                    self.next();
                    acc = expr::div(acc, self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<ExprRef, DslError> {
        if self.peek().tok == Tok::Minus {
            self.next();
            return Ok(expr::neg(self.unary()?));
        }
        self.power()
    }

    // power := atom ('^' ['-'] integer)?
    fn power(&mut self) -> Result<ExprRef, DslError> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Caret {
            self.next();
            let negative = if self.peek().tok == Tok::Minus {
                self.next();
                true
            } else {
                false
            };
            let t = self.next();
            let n = match t.tok {
                Tok::Number(v) if v.is_integer() => {
                    use num_traits::ToPrimitive;
                    v.to_integer().to_i32()
                }
                _ => None,
            };
            let Some(mut n) = n else {
                return Err(DslError::Syntax {
                    line: t.line,
                    col: t.col,
                    msg: "exponent must be an integer".into(),
                });
            };
            if negative {
                n = -n;
            }
            return Ok(expr::pow(base, n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprRef, DslError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Number(v) => {
                self.next();
                Ok(expr::constant(v))
            }
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.expect_tok(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.next();
                if matches!(name.as_str(), "exp" | "sqrt" | "ln") {
                    self.expect_tok(Tok::LParen, "`(`")?;
                    let arg = self.expr()?;
                    self.expect_tok(Tok::RParen, "`)`")?;
                    return Ok(match name.as_str() {
                        "exp" => expr::exp(arg),
                        "sqrt" => expr::sqrt(arg),
                        _ => expr::ln(arg),
                    });
                }
                self.resolve_symbol(&name, t.line, t.col)
            }
            _ => self.err("expected a number, symbol or `(`"),
        }
    }

    fn resolve_symbol(&self, name: &str, line: usize, col: usize) -> Result<ExprRef, DslError> {
        if let Some(split) = name.find('_') {
            let base = &name[..split];
            let index = &name[split + 1..];
            if index.contains('_') {
                return Err(DslError::BadIndex {
                    line,
                    col,
                    base: base.to_string(),
                    index: index.to_string(),
                    msg: "at most one `_` allowed".into(),
                });
            }
            let Some(dep) = self.dep.iter().position(|d| d == base) else {
                return Err(DslError::Undeclared {
                    line,
                    col,
                    name: name.to_string(),
                });
            };
            let vars = self.decompose_index(index).ok_or_else(|| DslError::BadIndex {
                line,
                col,
                base: base.to_string(),
                index: index.to_string(),
                msg: "index is not a string of declared independent variables".into(),
            })?;
            let idx = crate::multi_index::MultiIndex::from_vars(self.indep.len(), &vars);
            return Ok(expr::jet(dep, idx));
        }
        if let Some(i) = self.indep.iter().position(|v| v == name) {
            return Ok(expr::indep(i));
        }
        if let Some(i) = self.dep.iter().position(|v| v == name) {
            return Ok(expr::jet(
                i,
                crate::multi_index::MultiIndex::zero(self.indep.len()),
            ));
        }
        if let Some(i) = self.params.iter().position(|p| p.name == name) {
            return Ok(expr::param(i));
        }
        Err(DslError::Undeclared {
            line,
            col,
            name: name.to_string(),
        })
    }

    /// Greedy longest-match decomposition of an index string into declared
    /// independent variable positions.
    fn decompose_index(&self, index: &str) -> Option<Vec<usize>> {
        let mut names: Vec<(usize, &String)> = self.indep.iter().enumerate().collect();
        names.sort_by_key(|(_, n)| std::cmp::Reverse(n.len()));
        let mut rest = index;
        let mut out = Vec::new();
        'outer: while !rest.is_empty() {
            for (i, n) in &names {
                if rest.starts_with(n.as_str()) {
                    out.push(*i);
                    rest = &rest[n.len()..];
                    continue 'outer;
                }
            }
            return None;
        }
        if out.is_empty() {
            return None;
        }
        Some(out)
    }
}

/// Parse DSL source into a system. Syntax, undeclared-symbol and index
/// errors are reported with positions; invariant checks live in
/// [`validate`].
pub fn parse_system(src: &str) -> Result<SystemSpec, DslError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        name: "unnamed".into(),
        indep: Vec::new(),
        dep: Vec::new(),
        params: Vec::new(),
        declared_order: None,
        equations: Vec::new(),
        singular: Vec::new(),
        expectations: Vec::new(),
    };
    while p.statement()? {}
    let mut spec = SystemSpec {
        name: p.name,
        indep_vars: p.indep,
        dep_vars: p.dep,
        parameters: p.params,
        equations: p.equations,
        singular_loci: p.singular,
        order: 0,
        expectations: p.expectations,
    };
    let inferred = spec.inferred_order();
    spec.order = match p.declared_order {
        Some(d) => d.max(inferred),
        None => inferred,
    };
    // Keep the declared order for validation.
    if let Some(d) = p.declared_order {
        if d < inferred {
            // order field stays at inferred; validate() reports the mismatch
            spec.expectations.push(Expectation {
                key: "__declared_order".into(),
                value: d as i64,
            });
        }
    }
    Ok(spec)
}

/// Invariant diagnostics for a parsed (or programmatically built) system.
pub fn validate(spec: &SystemSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for name in spec
        .indep_vars
        .iter()
        .chain(spec.dep_vars.iter())
        .chain(spec.parameters.iter().map(|p| &p.name))
    {
        if !seen.insert(name.clone()) {
            out.push(Diagnostic {
                code: "duplicate_symbol",
                message: format!("symbol `{}` declared more than once", name),
            });
        }
    }
    if spec.indep_vars.is_empty() {
        out.push(Diagnostic {
            code: "no_indep",
            message: "at least one independent variable is required".into(),
        });
    }
    if spec.dep_vars.is_empty() {
        out.push(Diagnostic {
            code: "no_dep",
            message: "at least one dependent variable is required".into(),
        });
    }
    let inferred = spec.inferred_order();
    if let Some(declared) = spec.expectation("__declared_order") {
        if (declared as u32) < inferred {
            out.push(Diagnostic {
                code: "order_mismatch",
                message: format!(
                    "declared order {} but index of length {} present",
                    declared, inferred
                ),
            });
        }
    }
    if spec.order < inferred {
        out.push(Diagnostic {
            code: "order_mismatch",
            message: format!(
                "order {} below maximal index length {}",
                spec.order, inferred
            ),
        });
    }
    if spec.order < 1 {
        out.push(Diagnostic {
            code: "order_invalid",
            message: "system order must be at least 1".into(),
        });
    }
    out
}

// ---------------------------------------------------------------------------
// Canonical printer
// ---------------------------------------------------------------------------

/// Renders expressions with declared names; `parse . render` is the
/// identity on parser output.
pub struct Printer<'a> {
    indep: &'a [String],
    dep: &'a [String],
    params: Vec<String>,
}

impl<'a> Printer<'a> {
    pub fn new(spec: &'a SystemSpec) -> Self {
        Printer {
            indep: &spec.indep_vars,
            dep: &spec.dep_vars,
            params: spec.parameters.iter().map(|p| p.name.clone()).collect(),
        }
    }

    pub fn from_parts(indep: &'a [String], dep: &'a [String], params: Vec<String>) -> Self {
        Printer { indep, dep, params }
    }

    pub fn render(&self, e: &ExprRef) -> String {
        let mut s = String::new();
        self.fmt(e, 0, &mut s);
        s
    }

    // levels: 1 add/sub, 2 mul/div, 3 unary minus, 4 pow, 5 atom
    fn fmt(&self, e: &ExprRef, parent_level: u8, out: &mut String) {
        let level = match &**e {
            expr::Expr::Add(..) | expr::Expr::Sub(..) => 1,
            expr::Expr::Mul(..) | expr::Expr::Div(..) => 2,
            expr::Expr::Neg(..) => 3,
            expr::Expr::Pow(..) => 4,
            _ => 5,
        };
        let needs_parens = level < parent_level
            || (level == parent_level && matches!(&**e, expr::Expr::Neg(..)));
        if needs_parens {
            out.push('(');
        }
        match &**e {
            expr::Expr::Const(c) => {
                if c.is_integer() {
                    let _ = write!(out, "{}", c.numer());
                } else {
                    let _ = write!(out, "{}/{}", c.numer(), c.denom());
                }
            }
            expr::Expr::Var(expr::Leaf::Indep(i)) => out.push_str(&self.indep[*i]),
            expr::Expr::Var(expr::Leaf::Param(i)) => out.push_str(&self.params[*i]),
            expr::Expr::Var(expr::Leaf::Jet(j)) => {
                out.push_str(&self.dep[j.dep]);
                if !j.idx.is_empty() {
                    out.push('_');
                    out.push_str(&j.idx.render(self.indep));
                }
            }
            expr::Expr::Add(a, b) => {
                self.fmt(a, 1, out);
                out.push_str(" + ");
                self.fmt(b, 2, out);
            }
            expr::Expr::Sub(a, b) => {
                self.fmt(a, 1, out);
                out.push_str(" - ");
                self.fmt(b, 2, out);
            }
            expr::Expr::Mul(a, b) => {
                self.fmt(a, 2, out);
                out.push('*');
                self.fmt(b, 3, out);
            }
            expr::Expr::Div(a, b) => {
                self.fmt(a, 2, out);
                out.push('/');
                self.fmt(b, 3, out);
            }
            expr::Expr::Neg(a) => {
                out.push('-');
                self.fmt(a, 3, out);
            }
            expr::Expr::Pow(a, n) => {
                self.fmt(a, 5, out);
                let _ = write!(out, "^{}", n);
            }
            expr::Expr::Exp(a) => {
                out.push_str("exp(");
                self.fmt(a, 0, out);
                out.push(')');
            }
            expr::Expr::Sqrt(a) => {
                out.push_str("sqrt(");
                self.fmt(a, 0, out);
                out.push(')');
            }
            expr::Expr::Ln(a) => {
                out.push_str("ln(");
                self.fmt(a, 0, out);
                out.push(')');
            }
        }
        if needs_parens {
            out.push(')');
        }
    }
}

/// Render a whole system back to DSL source (the canonical fixture form).
pub fn render_system(spec: &SystemSpec) -> String {
    let printer = Printer::new(spec);
    let mut s = String::new();
    let _ = writeln!(s, "system {};", spec.name);
    let _ = writeln!(s, "indep {};", spec.indep_vars.join(", "));
    let _ = writeln!(s, "dep {};", spec.dep_vars.join(", "));
    for p in &spec.parameters {
        match &p.value {
            ParamValue::Fixed(v) => {
                if v.is_integer() {
                    let _ = writeln!(s, "param {} = {};", p.name, v.numer());
                } else {
                    let _ = writeln!(s, "param {} = {}/{};", p.name, v.numer(), v.denom());
                }
            }
            ParamValue::Free => {
                let _ = writeln!(s, "param {};", p.name);
            }
        }
    }
    let _ = writeln!(s, "order {};", spec.order);
    for e in &spec.equations {
        let _ = writeln!(s, "eq {} = 0;", printer.render(e));
    }
    for e in &spec.singular_loci {
        let _ = writeln!(s, "singular {} = 0;", printer.render(e));
    }
    for ex in &spec.expectations {
        if !ex.key.starts_with("__") {
            let _ = writeln!(s, "expect {} = {};", ex.key, ex.value);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi_index::MultiIndex;

    #[test]
    fn parse_minimal_heat() {
        let spec = parse_system("dep u; indep t, x; eq u_t - u_xx = 0;").unwrap();
        assert_eq!(spec.order, 2);
        assert_eq!(spec.equations.len(), 1);
        assert_eq!(spec.indep_vars, vec!["t", "x"]);
        assert!(validate(&spec).is_empty());
    }

    #[test]
    fn parse_nls_shape() {
        let src = "\
system nls;
indep t, x;
dep v, w;
param gamma = 1/10;
param sigma = -1;
param phi = 0;
param psi = 0;
eq v_t + gamma*v - w_xx - sigma*w*(v^2 + w^2) = phi;
eq w_t + gamma*w + v_xx - sigma*v*(v^2 + w^2) = psi;
";
        let spec = parse_system(src).unwrap();
        assert_eq!(spec.equations.len(), 2);
        assert_eq!(spec.order, 2);
        assert!(validate(&spec).is_empty());
    }

    #[test]
    fn undeclared_symbol_is_an_error() {
        let err = parse_system("dep u; indep t, x; eq z_x = 0;").unwrap_err();
        assert!(matches!(err, DslError::Undeclared { .. }));
    }

    #[test]
    fn index_symmetry() {
        let a = parse_system("dep u; indep t, x; eq u_tx = 0;").unwrap();
        let b = parse_system("dep u; indep t, x; eq u_xt = 0;").unwrap();
        assert_eq!(a.equations[0], b.equations[0]);
    }

    #[test]
    fn multichar_indep_names_longest_match() {
        let spec = parse_system("dep y; indep t, u1, u2; eq y_u1u2t - y = 0;").unwrap();
        let e = &spec.equations[0];
        let leaves = e.leaves();
        let has = leaves.iter().any(|l| {
            matches!(l, crate::expr::Leaf::Jet(j)
                if j.idx == MultiIndex::from_vars(3, &[0, 1, 2]))
        });
        assert!(has);
    }

    #[test]
    fn order_mismatch_diagnostic() {
        let spec = parse_system("dep u; indep t, x; order 2; eq u_txx = 0;").unwrap();
        let diags = validate(&spec);
        assert!(diags.iter().any(|d| d.code == "order_mismatch"));
    }

    #[test]
    fn duplicate_symbol_diagnostic() {
        let mut spec = parse_system("dep u; indep t, x; eq u_t = 0;").unwrap();
        spec.dep_vars.push("u".into());
        let diags = validate(&spec);
        assert!(diags.iter().any(|d| d.code == "duplicate_symbol"));
    }

    #[test]
    fn declared_order_can_exceed_inferred() {
        let spec = parse_system("dep u; indep t, x; order 3; eq u_t - u_xx = 0;").unwrap();
        assert_eq!(spec.order, 3);
        assert!(validate(&spec).is_empty());
    }

    #[test]
    fn roundtrip_is_fixed_point() {
        let src = "\
system mcf;
indep t, x;
dep u;
param d = 3;
eq u*(1 + u_x^2)*u_t - u*u_xx^2 + (d - 1)*(1 + u_x^2) = 0;
singular u = 0;
";
        let spec1 = parse_system(src).unwrap();
        let printed = render_system(&spec1);
        let spec2 = parse_system(&printed).unwrap();
        assert_eq!(spec1.equations, spec2.equations);
        assert_eq!(spec1.singular_loci, spec2.singular_loci);
        let printed2 = render_system(&spec2);
        assert_eq!(printed, printed2);
    }

    #[test]
    fn expectation_statement() {
        let spec =
            parse_system("dep u; indep t, x; eq u_t - u_xx = 0; expect dim_E = 7;").unwrap();
        assert_eq!(spec.expectation("dim_E"), Some(7));
    }

    #[test]
    fn decimal_literals_exact() {
        let spec = parse_system("dep u; indep t; param g = 0.1; eq u_t - g*u = 0;").unwrap();
        match &spec.parameters[0].value {
            ParamValue::Fixed(v) => {
                assert_eq!(v, &BigRational::new(BigInt::from(1), BigInt::from(10)));
            }
            _ => panic!(),
        }
    }
}
