//! Jet-space bookkeeping: coordinates, dimensions, points and total
//! derivatives.

use crate::expr::{self, Expr, ExprRef, Leaf, Value};
use crate::multi_index::{binomial, MultiIndex};
use std::collections::HashMap;

/// A coordinate of a jet space: either a base (independent) variable or a
/// jet variable of some order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    Indep(usize),
    Jet { dep: usize, idx: MultiIndex },
}

impl Coord {
    pub fn to_leaf(&self) -> Leaf {
        match self {
            Coord::Indep(i) => Leaf::Indep(*i),
            Coord::Jet { dep, idx } => Leaf::Jet(crate::expr::JetVar {
                dep: *dep,
                idx: idx.clone(),
            }),
        }
    }

    pub fn order(&self) -> u32 {
        match self {
            Coord::Indep(_) => 0,
            Coord::Jet { idx, .. } => idx.len(),
        }
    }
}

/// The order-r jet space for m dependent variables over n independent ones.
#[derive(Debug, Clone)]
pub struct JetSpace {
    pub n: usize,
    pub m: usize,
    pub r: u32,
    coords: Vec<Coord>,
    index: HashMap<Coord, usize>,
}

impl JetSpace {
    pub fn new(n: usize, m: usize, r: u32) -> Self {
        let mut coords = Vec::new();
        for i in 0..n {
            coords.push(Coord::Indep(i));
        }
        for order in 0..=r {
            for dep in 0..m {
                for idx in MultiIndex::all_of_length(n, order) {
                    coords.push(Coord::Jet { dep, idx });
                }
            }
        }
        let index = coords
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        JetSpace { n, m, r, coords, index }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn coord_index(&self, c: &Coord) -> Option<usize> {
        self.index.get(c).copied()
    }

    /// Coordinates of exact order `k` (jet variables only).
    pub fn coords_of_order(&self, k: u32) -> Vec<Coord> {
        self.coords
            .iter()
            .filter(|c| matches!(c, Coord::Jet { idx, .. } if idx.len() == k))
            .cloned()
            .collect()
    }
}

/// n + m * C(n+r, r): the dimension of the order-r jet space.
pub fn jet_dimension(n: u64, m: u64, r: u64) -> u128 {
    n as u128 + m as u128 * binomial(n + r, r)
}

/// A full coordinate assignment on a jet space.
#[derive(Debug, Clone)]
pub struct Point {
    values: HashMap<Leaf, Value>,
}

impl Point {
    pub fn new(values: HashMap<Leaf, Value>) -> Self {
        Point { values }
    }

    pub fn values(&self) -> &HashMap<Leaf, Value> {
        &self.values
    }

    pub fn get(&self, leaf: &Leaf) -> Option<&Value> {
        self.values.get(leaf)
    }

    pub fn set(&mut self, leaf: Leaf, v: Value) {
        self.values.insert(leaf, v);
    }
}

impl expr::Env for Point {
    fn lookup(&self, leaf: &Leaf) -> Option<Value> {
        self.values.get(leaf).cloned()
    }
}

/// Total derivative in direction `var`:
/// D_i e = de/dx_i + sum over jet variables u_k in e of (de/du_k) u_{k+1_i},
/// implemented as a direct recursive transform with the chain rule through
/// the analytic primitives.
pub fn total_derivative(e: &ExprRef, var: usize, n_indep: usize) -> ExprRef {
    use expr::{add, div, exp, int, mul, neg, pow, sqrt, sub};
    match &**e {
        Expr::Const(_) => int(0),
        Expr::Var(Leaf::Indep(i)) => int(if *i == var { 1 } else { 0 }),
        Expr::Var(Leaf::Param(_)) => int(0),
        Expr::Var(Leaf::Jet(j)) => expr::jet(j.dep, j.idx.bump(var)),
        Expr::Add(a, b) => add(
            total_derivative(a, var, n_indep),
            total_derivative(b, var, n_indep),
        ),
        Expr::Sub(a, b) => sub(
            total_derivative(a, var, n_indep),
            total_derivative(b, var, n_indep),
        ),
        Expr::Mul(a, b) => add(
            mul(total_derivative(a, var, n_indep), b.clone()),
            mul(a.clone(), total_derivative(b, var, n_indep)),
        ),
        Expr::Div(a, b) => {
            let da = total_derivative(a, var, n_indep);
            let db = total_derivative(b, var, n_indep);
            sub(
                div(da, b.clone()),
                div(mul(a.clone(), db), pow(b.clone(), 2)),
            )
        }
        Expr::Neg(a) => neg(total_derivative(a, var, n_indep)),
        Expr::Pow(a, k) => mul(
            mul(int(*k as i64), pow(a.clone(), k - 1)),
            total_derivative(a, var, n_indep),
        ),
        Expr::Exp(a) => mul(exp(a.clone()), total_derivative(a, var, n_indep)),
        Expr::Sqrt(a) => div(
            total_derivative(a, var, n_indep),
            mul(int(2), sqrt(a.clone())),
        ),
        Expr::Ln(a) => div(total_derivative(a, var, n_indep), ln_arg(a)),
    }
}

fn ln_arg(a: &ExprRef) -> ExprRef {
    a.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{add, div, int, jet, mul, param, pow, sub, Leaf, Value};
    use crate::multi_index::MultiIndex;

    fn mi(n: usize, vars: &[usize]) -> MultiIndex {
        MultiIndex::from_vars(n, vars)
    }

    #[test]
    fn jet_dimension_examples() {
        assert_eq!(jet_dimension(2, 1, 2), 8);
        assert_eq!(jet_dimension(2, 2, 2), 14);
        assert_eq!(jet_dimension(1, 1, 0), 2);
        assert_eq!(jet_dimension(2, 2, 3), 22);
        assert_eq!(jet_dimension(3, 3, 3), 63);
        assert_eq!(jet_dimension(3, 3, 4), 108);
    }

    #[test]
    fn jet_dimension_strictly_increasing() {
        for n in 1..5u64 {
            for m in 1..4u64 {
                for r in 0..4u64 {
                    let d = jet_dimension(n, m, r);
                    assert!(jet_dimension(n + 1, m, r) > d);
                    assert!(jet_dimension(n, m + 1, r) > d);
                    assert!(jet_dimension(n, m, r + 1) > d);
                }
            }
        }
    }

    #[test]
    fn space_coordinate_count_matches_formula() {
        let s = JetSpace::new(2, 1, 2);
        assert_eq!(s.dim() as u128, jet_dimension(2, 1, 2));
        assert_eq!(s.coords_of_order(2).len(), 3);
        let s2 = JetSpace::new(3, 3, 3);
        assert_eq!(s2.dim() as u128, jet_dimension(3, 3, 3));
        assert_eq!(s2.coords_of_order(3).len(), 30);
        // duplicate-free
        let mut sorted = s2.coords().to_vec();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), s2.dim());
    }

    #[test]
    fn total_derivative_single_step() {
        // D_x(u_x) = u_xx  (indep order: t=0, x=1)
        let ux = jet(0, mi(2, &[1]));
        let d = total_derivative(&ux, 1, 2);
        assert_eq!(d, jet(0, mi(2, &[1, 1])));
    }

    #[test]
    fn total_derivative_linearity() {
        // D_t(u_t - u_xx) = u_tt - u_txx
        let e = sub(jet(0, mi(2, &[0])), jet(0, mi(2, &[1, 1])));
        let d = total_derivative(&e, 0, 2);
        let expected = sub(jet(0, mi(2, &[0, 0])), jet(0, mi(2, &[0, 1, 1])));
        assert_eq!(d, expected);
    }

    #[test]
    fn total_derivatives_commute() {
        // On a nonlinear expression: e = u * u_x^2 + u_t / u
        let u = jet(0, mi(2, &[]));
        let ux = jet(0, mi(2, &[1]));
        let ut = jet(0, mi(2, &[0]));
        let e = add(mul(u.clone(), pow(ux, 2)), div(ut, u.clone()));
        let dtx = total_derivative(&total_derivative(&e, 0, 2), 1, 2);
        let dxt = total_derivative(&total_derivative(&e, 1, 2), 0, 2);
        // Compare by exact evaluation at a few rational points.
        for seed in 1..6i64 {
            let mut env: std::collections::HashMap<Leaf, Value> = Default::default();
            let space = JetSpace::new(2, 1, 3);
            for (k, c) in space.coords().iter().enumerate() {
                env.insert(
                    c.to_leaf(),
                    Value::rat_i64(seed + k as i64 + 1, 3 + k as i64),
                );
            }
            let a = crate::expr::evaluate(&dtx, &env).unwrap();
            let b = crate::expr::evaluate(&dxt, &env).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn evaluate_mcf_rhs_hand_value() {
        // u_t = (u*u_xx^2 - (1+u_x^2)(d-1)) / (u*(1+u_x^2))
        // at u=1, u_x=0, u_xx=2, d=2 -> 3
        let u = jet(0, mi(2, &[]));
        let ux = jet(0, mi(2, &[1]));
        let uxx = jet(0, mi(2, &[1, 1]));
        let d = param(0);
        let one_plus = add(int(1), pow(ux.clone(), 2));
        let rhs = div(
            sub(
                mul(u.clone(), pow(uxx.clone(), 2)),
                mul(one_plus.clone(), sub(d.clone(), int(1))),
            ),
            mul(u.clone(), one_plus.clone()),
        );
        let mut env: std::collections::HashMap<Leaf, Value> = Default::default();
        env.insert(
            Leaf::Jet(crate::expr::JetVar { dep: 0, idx: mi(2, &[]) }),
            Value::rat_i64(1, 1),
        );
        env.insert(
            Leaf::Jet(crate::expr::JetVar { dep: 0, idx: mi(2, &[1]) }),
            Value::rat_i64(0, 1),
        );
        env.insert(
            Leaf::Jet(crate::expr::JetVar { dep: 0, idx: mi(2, &[1, 1]) }),
            Value::rat_i64(2, 1),
        );
        env.insert(Leaf::Param(0), Value::rat_i64(2, 1));
        let v = crate::expr::evaluate(&rhs, &env).unwrap();
        assert_eq!(v, Value::rat_i64(3, 1));
    }
}
