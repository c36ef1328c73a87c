//! Expression trees over jet coordinates: exact rational arithmetic with
//! analytic primitives, differentiation, evaluation and substitution.

use crate::multi_index::MultiIndex;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// A jet coordinate: dependent variable `dep` differentiated by `idx`.
/// `idx` of length zero is the dependent variable itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar {
    pub dep: usize,
    pub idx: MultiIndex,
}

/// Leaf symbols an expression can reference.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Leaf {
    Indep(usize),
    Param(usize),
    Jet(JetVar),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(BigRational),
    Var(Leaf),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    /// Integer power; exponent may be negative.
    Pow(Arc<Expr>, i32),
    Exp(Arc<Expr>),
    Sqrt(Arc<Expr>),
    Ln(Arc<Expr>),
}

pub type ExprRef = Arc<Expr>;

pub fn rat(n: i64, d: i64) -> ExprRef {
    Arc::new(Expr::Const(BigRational::new(BigInt::from(n), BigInt::from(d))))
}

pub fn int(n: i64) -> ExprRef {
    rat(n, 1)
}

pub fn constant(c: BigRational) -> ExprRef {
    Arc::new(Expr::Const(c))
}

pub fn indep(i: usize) -> ExprRef {
    Arc::new(Expr::Var(Leaf::Indep(i)))
}

pub fn param(i: usize) -> ExprRef {
    Arc::new(Expr::Var(Leaf::Param(i)))
}

pub fn jet(dep: usize, idx: MultiIndex) -> ExprRef {
    Arc::new(Expr::Var(Leaf::Jet(JetVar { dep, idx })))
}

fn as_const(e: &Expr) -> Option<&BigRational> {
    match e {
        Expr::Const(c) => Some(c),
        _ => None,
    }
}

/// Smart constructors fold rational constants and algebraic identities so
/// obviously-zero results come out as the literal zero expression.
pub fn add(a: ExprRef, b: ExprRef) -> ExprRef {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => return constant(x + y),
        (Some(x), None) if x.is_zero() => return b,
        (None, Some(y)) if y.is_zero() => return a,
        _ => {}
    }
    Arc::new(Expr::Add(a, b))
}

pub fn sub(a: ExprRef, b: ExprRef) -> ExprRef {
    if Arc::ptr_eq(&a, &b) {
        return int(0);
    }
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => return constant(x - y),
        (None, Some(y)) if y.is_zero() => return a,
        (Some(x), None) if x.is_zero() => return neg(b),
        _ => {}
    }
    if a == b {
        return int(0);
    }
    Arc::new(Expr::Sub(a, b))
}

pub fn mul(a: ExprRef, b: ExprRef) -> ExprRef {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => return constant(x * y),
        (Some(x), None) => {
            if x.is_zero() {
                return int(0);
            }
            if x.is_one() {
                return b;
            }
        }
        (None, Some(y)) => {
            if y.is_zero() {
                return int(0);
            }
            if y.is_one() {
                return a;
            }
        }
        _ => {}
    }
    Arc::new(Expr::Mul(a, b))
}

pub fn div(a: ExprRef, b: ExprRef) -> ExprRef {
    if let Some(y) = as_const(&b) {
        if y.is_one() {
            return a;
        }
        if !y.is_zero() {
            if let Some(x) = as_const(&a) {
                return constant(x / y);
            }
        }
    }
    if let Some(x) = as_const(&a) {
        if x.is_zero() {
            // 0/b is zero wherever b is regular; the denominator constraint
            // is tracked separately by regularity collection.
            if as_const(&b).is_none() {
                return int(0);
            }
        }
    }
    Arc::new(Expr::Div(a, b))
}

pub fn neg(a: ExprRef) -> ExprRef {
    if let Some(x) = as_const(&a) {
        return constant(-x);
    }
    Arc::new(Expr::Neg(a))
}

pub fn pow(a: ExprRef, n: i32) -> ExprRef {
    if n == 0 {
        return int(1);
    }
    if n == 1 {
        return a;
    }
    if let Some(x) = as_const(&a) {
        if n > 0 || !x.is_zero() {
            let p = x.pow(n);
            return constant(p);
        }
    }
    Arc::new(Expr::Pow(a, n))
}

pub fn exp(a: ExprRef) -> ExprRef {
    if let Some(x) = as_const(&a) {
        if x.is_zero() {
            return int(1);
        }
    }
    Arc::new(Expr::Exp(a))
}

pub fn sqrt(a: ExprRef) -> ExprRef {
    Arc::new(Expr::Sqrt(a))
}

pub fn ln(a: ExprRef) -> ExprRef {
    if let Some(x) = as_const(&a) {
        if x.is_one() {
            return int(0);
        }
    }
    Arc::new(Expr::Ln(a))
}

/// Sum a list of terms, folding constants.
pub fn sum(terms: impl IntoIterator<Item = ExprRef>) -> ExprRef {
    let mut acc = int(0);
    for t in terms {
        acc = add(acc, t);
    }
    acc
}

impl Expr {
    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    /// Collect every leaf appearing in the tree.
    pub fn leaves(&self) -> Vec<Leaf> {
        let mut set = std::collections::BTreeSet::new();
        self.walk(&mut |e| {
            if let Expr::Var(l) = e {
                set.insert(l.clone());
            }
        });
        set.into_iter().collect()
    }

    /// Maximal jet-variable index length appearing in the tree (0 if none).
    pub fn max_order(&self) -> u32 {
        let mut m = 0;
        self.walk(&mut |e| {
            if let Expr::Var(Leaf::Jet(j)) = e {
                m = m.max(j.idx.len());
            }
        });
        m
    }

    fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Const(_) | Expr::Var(_) => {}
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Sqrt(a) | Expr::Ln(a) => {
                a.walk(f)
            }
        }
    }

    /// Subexpressions that must stay nonzero (denominators) or positive
    /// (sqrt and ln arguments) for the expression to be evaluable.
    pub fn regularity_constraints(&self) -> Vec<Constraint> {
        let mut out = Vec::new();
        self.walk(&mut |e| match e {
            Expr::Div(_, b) => out.push(Constraint::NonZero(b.clone())),
            Expr::Pow(a, n) if *n < 0 => out.push(Constraint::NonZero(a.clone())),
            Expr::Sqrt(a) | Expr::Ln(a) => out.push(Constraint::Positive(a.clone())),
            _ => {}
        });
        out
    }
}

/// A regularity constraint attached to an expression.
#[derive(Debug, Clone)]
pub enum Constraint {
    NonZero(ExprRef),
    Positive(ExprRef),
}

/// Evaluation result: exact rational when possible, floating otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Rat(BigRational),
    Float(f64),
}

impl Value {
    pub fn rat_i64(n: i64, d: i64) -> Value {
        Value::Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Rat(r) => rational_to_f64(r),
            Value::Float(f) => *f,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Rat(r) => r.is_zero(),
            Value::Float(f) => *f == 0.0,
        }
    }

    pub fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }

    pub fn as_rat(&self) -> Option<&BigRational> {
        match self {
            Value::Rat(r) => Some(r),
            Value::Float(_) => None,
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back through string conversion for extreme magnitudes.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn v_add(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Rat(x), Value::Rat(y)) => Value::Rat(x + y),
        (x, y) => Value::Float(x.to_f64() + y.to_f64()),
    }
}

fn v_sub(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Rat(x), Value::Rat(y)) => Value::Rat(x - y),
        (x, y) => Value::Float(x.to_f64() - y.to_f64()),
    }
}

fn v_mul(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Rat(x), Value::Rat(y)) => Value::Rat(x * y),
        (x, y) => Value::Float(x.to_f64() * y.to_f64()),
    }
}

fn v_neg(a: Value) -> Value {
    match a {
        Value::Rat(x) => Value::Rat(-x),
        Value::Float(f) => Value::Float(-f),
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("division by zero in subexpression `{0}`")]
    DivisionByZero(String),
    #[error("domain error: `{0}` must be positive, got {1}")]
    DomainError(String, f64),
    #[error("unbound leaf {0:?} during evaluation")]
    UnboundLeaf(Leaf),
}

/// Environment binding leaves to values.
pub trait Env {
    fn lookup(&self, leaf: &Leaf) -> Option<Value>;
}

impl Env for HashMap<Leaf, Value> {
    fn lookup(&self, leaf: &Leaf) -> Option<Value> {
        self.get(leaf).cloned()
    }
}

/// Evaluate with exact rational arithmetic where the tree and environment
/// allow it; sqrt/exp/ln force the floating path.
pub fn evaluate(e: &Expr, env: &dyn Env) -> Result<Value, EvalError> {
    match e {
        Expr::Const(c) => Ok(Value::Rat(c.clone())),
        Expr::Var(l) => env.lookup(l).ok_or_else(|| EvalError::UnboundLeaf(l.clone())),
        Expr::Add(a, b) => Ok(v_add(evaluate(a, env)?, evaluate(b, env)?)),
        Expr::Sub(a, b) => Ok(v_sub(evaluate(a, env)?, evaluate(b, env)?)),
        Expr::Mul(a, b) => Ok(v_mul(evaluate(a, env)?, evaluate(b, env)?)),
        Expr::Div(a, b) => {
            let num = evaluate(a, env)?;
            let den = evaluate(b, env)?;
            if den.is_zero() {
                return Err(EvalError::DivisionByZero(format!("{:?}", b)));
            }
            Ok(match (num, den) {
                (Value::Rat(x), Value::Rat(y)) => Value::Rat(x / y),
                (x, y) => Value::Float(x.to_f64() / y.to_f64()),
            })
        }
        Expr::Neg(a) => Ok(v_neg(evaluate(a, env)?)),
        Expr::Pow(a, n) => {
            let base = evaluate(a, env)?;
            if *n < 0 && base.is_zero() {
                return Err(EvalError::DivisionByZero(format!("{:?}", a)));
            }
            Ok(match base {
                Value::Rat(x) => Value::Rat(x.pow(*n)),
                Value::Float(f) => Value::Float(f.powi(*n)),
            })
        }
        Expr::Exp(a) => Ok(Value::Float(evaluate(a, env)?.to_f64().exp())),
        Expr::Sqrt(a) => {
            let v = evaluate(a, env)?.to_f64();
            if v <= 0.0 {
                return Err(EvalError::DomainError(format!("{:?}", a), v));
            }
            Ok(Value::Float(v.sqrt()))
        }
        Expr::Ln(a) => {
            let v = evaluate(a, env)?.to_f64();
            if v <= 0.0 {
                return Err(EvalError::DomainError(format!("{:?}", a), v));
            }
            Ok(Value::Float(v.ln()))
        }
    }
}

/// Partial derivative with respect to a single leaf, as a new tree.
pub fn partial(e: &ExprRef, wrt: &Leaf) -> ExprRef {
    match &**e {
        Expr::Const(_) => int(0),
        Expr::Var(l) => {
            if l == wrt {
                int(1)
            } else {
                int(0)
            }
        }
        Expr::Add(a, b) => add(partial(a, wrt), partial(b, wrt)),
        Expr::Sub(a, b) => sub(partial(a, wrt), partial(b, wrt)),
        Expr::Mul(a, b) => add(
            mul(partial(a, wrt), b.clone()),
            mul(a.clone(), partial(b, wrt)),
        ),
        Expr::Div(a, b) => {
            let da = partial(a, wrt);
            let db = partial(b, wrt);
            // d(a/b) = da/b - a*db/b^2
            sub(
                div(da, b.clone()),
                div(mul(a.clone(), db), pow(b.clone(), 2)),
            )
        }
        Expr::Neg(a) => neg(partial(a, wrt)),
        Expr::Pow(a, n) => mul(
            mul(int(*n as i64), pow(a.clone(), n - 1)),
            partial(a, wrt),
        ),
        Expr::Exp(a) => mul(e.clone(), partial(a, wrt)),
        Expr::Sqrt(a) => div(partial(a, wrt), mul(int(2), sqrt(a.clone()))),
        Expr::Ln(a) => div(partial(a, wrt), a.clone()),
    }
}

/// Substitute leaves by expressions (used for path parametrizations,
/// map composition and the identity-at-zero check).
pub fn substitute(e: &ExprRef, map: &HashMap<Leaf, ExprRef>) -> ExprRef {
    match &**e {
        Expr::Const(_) => e.clone(),
        Expr::Var(l) => map.get(l).cloned().unwrap_or_else(|| e.clone()),
        Expr::Add(a, b) => add(substitute(a, map), substitute(b, map)),
        Expr::Sub(a, b) => sub(substitute(a, map), substitute(b, map)),
        Expr::Mul(a, b) => mul(substitute(a, map), substitute(b, map)),
        Expr::Div(a, b) => div(substitute(a, map), substitute(b, map)),
        Expr::Neg(a) => neg(substitute(a, map)),
        Expr::Pow(a, n) => pow(substitute(a, map), *n),
        Expr::Exp(a) => exp(substitute(a, map)),
        Expr::Sqrt(a) => sqrt(substitute(a, map)),
        Expr::Ln(a) => ln(substitute(a, map)),
    }
}

/// Reverse-mode gradient of `e` with respect to every leaf, evaluated at
/// `env`. One forward pass and one backward sweep over the shared DAG.
pub fn gradient(e: &ExprRef, env: &dyn Env) -> Result<HashMap<Leaf, Value>, EvalError> {
    // Forward pass with memoization keyed on node address.
    let mut values: HashMap<*const Expr, Value> = HashMap::new();
    forward(e, env, &mut values)?;

    let mut adjoints: HashMap<*const Expr, Value> = HashMap::new();
    adjoints.insert(Arc::as_ptr(e), Value::rat_i64(1, 1));

    // Backward sweep in reverse topological order.
    let order = topo_order(e);
    let mut grads: HashMap<Leaf, Value> = HashMap::new();
    for node in order.iter().rev() {
        let ptr = Arc::as_ptr(node);
        let adj = match adjoints.get(&ptr) {
            Some(a) => a.clone(),
            None => continue,
        };
        let mut push = |child: &ExprRef, contrib: Value| {
            let cptr = Arc::as_ptr(child);
            let entry = adjoints.entry(cptr).or_insert(Value::rat_i64(0, 1));
            *entry = v_add(entry.clone(), contrib);
        };
        match &**node {
            Expr::Const(_) => {}
            Expr::Var(l) => {
                let entry = grads.entry(l.clone()).or_insert(Value::rat_i64(0, 1));
                *entry = v_add(entry.clone(), adj);
            }
            Expr::Add(a, b) => {
                push(a, adj.clone());
                push(b, adj);
            }
            Expr::Sub(a, b) => {
                push(a, adj.clone());
                push(b, v_neg(adj));
            }
            Expr::Mul(a, b) => {
                let va = values[&Arc::as_ptr(a)].clone();
                let vb = values[&Arc::as_ptr(b)].clone();
                push(a, v_mul(adj.clone(), vb));
                push(b, v_mul(adj, va));
            }
            Expr::Div(a, b) => {
                let va = values[&Arc::as_ptr(a)].clone();
                let vb = values[&Arc::as_ptr(b)].clone();
                let inv_b = v_div_value(Value::rat_i64(1, 1), vb.clone());
                push(a, v_mul(adj.clone(), inv_b.clone()));
                // d/db (a/b) = -a/b^2
                let term = v_neg(v_mul(va, v_mul(inv_b.clone(), inv_b)));
                push(b, v_mul(adj, term));
            }
            Expr::Neg(a) => push(a, v_neg(adj)),
            Expr::Pow(a, n) => {
                let va = values[&Arc::as_ptr(a)].clone();
                let dp = v_mul(
                    Value::rat_i64(*n as i64, 1),
                    value_powi(va, *n - 1),
                );
                push(a, v_mul(adj, dp));
            }
            Expr::Exp(a) => {
                let v = values[&ptr].clone();
                push(a, v_mul(adj, v));
            }
            Expr::Sqrt(a) => {
                let v = values[&ptr].to_f64();
                push(a, v_mul(adj, Value::Float(0.5 / v)));
            }
            Expr::Ln(a) => {
                let va = values[&Arc::as_ptr(a)].clone();
                push(a, v_mul(adj, v_div_value(Value::rat_i64(1, 1), va)));
            }
        }
    }
    Ok(grads)
}

fn v_div_value(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Rat(x), Value::Rat(y)) => Value::Rat(x / y),
        (x, y) => Value::Float(x.to_f64() / y.to_f64()),
    }
}

fn value_powi(v: Value, n: i32) -> Value {
    match v {
        Value::Rat(x) => {
            if n < 0 && x.is_zero() {
                Value::Float(f64::INFINITY)
            } else {
                Value::Rat(x.pow(n))
            }
        }
        Value::Float(f) => Value::Float(f.powi(n)),
    }
}

fn forward(
    e: &ExprRef,
    env: &dyn Env,
    memo: &mut HashMap<*const Expr, Value>,
) -> Result<Value, EvalError> {
    let ptr = Arc::as_ptr(e);
    if let Some(v) = memo.get(&ptr) {
        return Ok(v.clone());
    }
    let v = match &**e {
        Expr::Const(c) => Value::Rat(c.clone()),
        Expr::Var(l) => env.lookup(l).ok_or_else(|| EvalError::UnboundLeaf(l.clone()))?,
        Expr::Add(a, b) => v_add(forward(a, env, memo)?, forward(b, env, memo)?),
        Expr::Sub(a, b) => v_sub(forward(a, env, memo)?, forward(b, env, memo)?),
        Expr::Mul(a, b) => v_mul(forward(a, env, memo)?, forward(b, env, memo)?),
        Expr::Div(a, b) => {
            let num = forward(a, env, memo)?;
            let den = forward(b, env, memo)?;
            if den.is_zero() {
                return Err(EvalError::DivisionByZero(format!("{:?}", b)));
            }
            v_div_value(num, den)
        }
        Expr::Neg(a) => v_neg(forward(a, env, memo)?),
        Expr::Pow(a, n) => {
            let base = forward(a, env, memo)?;
            if *n < 0 && base.is_zero() {
                return Err(EvalError::DivisionByZero(format!("{:?}", a)));
            }
            value_powi(base, *n)
        }
        Expr::Exp(a) => Value::Float(forward(a, env, memo)?.to_f64().exp()),
        Expr::Sqrt(a) => {
            let v = forward(a, env, memo)?.to_f64();
            if v <= 0.0 {
                return Err(EvalError::DomainError(format!("{:?}", a), v));
            }
            Value::Float(v.sqrt())
        }
        Expr::Ln(a) => {
            let v = forward(a, env, memo)?.to_f64();
            if v <= 0.0 {
                return Err(EvalError::DomainError(format!("{:?}", a), v));
            }
            Value::Float(v.ln())
        }
    };
    memo.insert(ptr, v.clone());
    Ok(v)
}

/// DAG nodes in post-order (children before parents); each shared node
/// appears once. Iterating in reverse visits parents before children, which
/// is what the adjoint sweep needs.
fn topo_order(root: &ExprRef) -> Vec<ExprRef> {
    let mut seen: HashMap<*const Expr, ()> = HashMap::new();
    let mut out: Vec<ExprRef> = Vec::new();
    fn rec(e: &ExprRef, seen: &mut HashMap<*const Expr, ()>, out: &mut Vec<ExprRef>) {
        let ptr = Arc::as_ptr(e);
        if seen.contains_key(&ptr) {
            return;
        }
        seen.insert(ptr, ());
        match &**e {
            Expr::Const(_) | Expr::Var(_) => {}
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                rec(a, seen, out);
                rec(b, seen, out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Sqrt(a) | Expr::Ln(a) => {
                rec(a, seen, out)
            }
        }
        out.push(e.clone());
    }
    rec(root, &mut seen, &mut out);
    out
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Context-free debug rendering; the DSL printer renders with names.
        match self {
            Expr::Const(c) => write!(f, "{}", c),
            Expr::Var(Leaf::Indep(i)) => write!(f, "$x{}", i),
            Expr::Var(Leaf::Param(i)) => write!(f, "$p{}", i),
            Expr::Var(Leaf::Jet(j)) => write!(f, "$u{}[{}]", j.dep, j.idx),
            Expr::Add(a, b) => write!(f, "({} + {})", a, b),
            Expr::Sub(a, b) => write!(f, "({} - {})", a, b),
            Expr::Mul(a, b) => write!(f, "({} * {})", a, b),
            Expr::Div(a, b) => write!(f, "({} / {})", a, b),
            Expr::Neg(a) => write!(f, "(-{})", a),
            Expr::Pow(a, n) => write!(f, "({}^{})", a, n),
            Expr::Exp(a) => write!(f, "exp({})", a),
            Expr::Sqrt(a) => write!(f, "sqrt({})", a),
            Expr::Ln(a) => write!(f, "ln({})", a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi_index::MultiIndex;

    fn env_of(pairs: Vec<(Leaf, Value)>) -> HashMap<Leaf, Value> {
        pairs.into_iter().collect()
    }

    #[test]
    fn constant_folding_gives_literal_zero() {
        let x = indep(0);
        let e = mul(int(0), x.clone());
        assert!(e.is_zero_literal());
        let e2 = sub(x.clone(), x.clone());
        assert!(e2.is_zero_literal());
        let e3 = add(int(2), int(-2));
        assert!(e3.is_zero_literal());
    }

    #[test]
    fn evaluate_rational_exact() {
        // (d-1)/u at u=2, d=3 -> 1
        let u = jet(0, MultiIndex::zero(2));
        let d = param(0);
        let e = div(sub(d.clone(), int(1)), u.clone());
        let env = env_of(vec![
            (Leaf::Jet(JetVar { dep: 0, idx: MultiIndex::zero(2) }), Value::rat_i64(2, 1)),
            (Leaf::Param(0), Value::rat_i64(3, 1)),
        ]);
        assert_eq!(evaluate(&e, &env).unwrap(), Value::rat_i64(1, 1));
    }

    #[test]
    fn evaluate_division_by_zero_reports() {
        let u = jet(0, MultiIndex::zero(2));
        let e = div(int(1), u.clone());
        let env = env_of(vec![(
            Leaf::Jet(JetVar { dep: 0, idx: MultiIndex::zero(2) }),
            Value::rat_i64(0, 1),
        )]);
        assert!(matches!(
            evaluate(&e, &env),
            Err(EvalError::DivisionByZero(_))
        ));
    }

    #[test]
    fn gradient_matches_symbolic_partial() {
        // f = x^2 * p + x/p
        let x = indep(0);
        let p = param(0);
        let f = add(mul(pow(x.clone(), 2), p.clone()), div(x.clone(), p.clone()));
        let env = env_of(vec![
            (Leaf::Indep(0), Value::rat_i64(3, 2)),
            (Leaf::Param(0), Value::rat_i64(5, 1)),
        ]);
        let g = gradient(&f, &env).unwrap();
        let dx_sym = partial(&f, &Leaf::Indep(0));
        let dp_sym = partial(&f, &Leaf::Param(0));
        assert_eq!(
            g[&Leaf::Indep(0)],
            evaluate(&dx_sym, &env).unwrap()
        );
        assert_eq!(
            g[&Leaf::Param(0)],
            evaluate(&dp_sym, &env).unwrap()
        );
        // d/dx = 2xp + 1/p = 15 + 1/5 = 76/5
        assert_eq!(g[&Leaf::Indep(0)], Value::rat_i64(76, 5));
    }

    #[test]
    fn regularity_collection() {
        let u = jet(0, MultiIndex::zero(1));
        let e = add(div(int(1), u.clone()), sqrt(u.clone()));
        let cs = e.regularity_constraints();
        assert_eq!(cs.len(), 2);
    }
}
