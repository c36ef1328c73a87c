//! Sparse multivariate polynomials and polynomial fractions over the
//! rationals. Used for canonical-form zero checks and for the exact
//! function-field rank elimination.

use crate::expr::{Expr, ExprRef, Leaf};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

/// Exponent vector aligned to a caller-supplied variable list.
pub type Monomial = Vec<u16>;

/// Sparse polynomial: monomial -> nonzero coefficient. The map form is the
/// canonical form; equal polynomials have equal maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub n_vars: usize,
    pub terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero(n_vars: usize) -> Self {
        Poly {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: BigRational) -> Self {
        let mut p = Poly::zero(n_vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; n_vars], c);
        }
        p
    }

    pub fn one(n_vars: usize) -> Self {
        Poly::constant(n_vars, BigRational::one())
    }

    pub fn var(n_vars: usize, i: usize) -> Self {
        let mut m = vec![0u16; n_vars];
        m[i] = 1;
        let mut p = Poly::zero(n_vars);
        p.terms.insert(m, BigRational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.n_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.insert(m, ca * cb);
            }
        }
        out
    }

    pub fn powi(&self, n: u32) -> Poly {
        let mut acc = Poly::one(self.n_vars);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Leading term in lexicographic monomial order.
    fn lead(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Exact division: panics if `self` is not a multiple of `other`.
    /// Used by fraction-free elimination where divisibility is guaranteed.
    pub fn exact_div(&self, other: &Poly) -> Poly {
        assert!(!other.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quo = Poly::zero(self.n_vars);
        let (lm, lc) = {
            let (m, c) = other.lead().unwrap();
            (m.clone(), c.clone())
        };
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.lead().unwrap();
                (m.clone(), c.clone())
            };
            let qm: Option<Monomial> = rm
                .iter()
                .zip(&lm)
                .map(|(a, b)| a.checked_sub(*b))
                .collect();
            let qm = qm.expect("exact_div: leading monomial not divisible");
            let qc = rc / &lc;
            let mut t = Poly::zero(self.n_vars);
            t.insert(qm.clone(), qc.clone());
            rem = rem.sub(&t.mul(other));
            quo.insert(qm, qc);
        }
        quo
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as u32).sum())
            .max()
            .unwrap_or(0)
    }
}

/// Polynomial fraction in canonical-enough form (no gcd reduction; equality
/// to zero is still decidable via the numerator).
#[derive(Debug, Clone)]
pub struct PolyFraction {
    pub num: Poly,
    pub den: Poly,
}

impl PolyFraction {
    pub fn from_poly(p: Poly) -> Self {
        let n = p.n_vars;
        PolyFraction {
            num: p,
            den: Poly::one(n),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &PolyFraction) -> PolyFraction {
        PolyFraction {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
    }

    pub fn sub(&self, o: &PolyFraction) -> PolyFraction {
        PolyFraction {
            num: self.num.mul(&o.den).sub(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
    }

    pub fn mul(&self, o: &PolyFraction) -> PolyFraction {
        PolyFraction {
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
        }
    }

    pub fn div(&self, o: &PolyFraction) -> Option<PolyFraction> {
        if o.num.is_zero() {
            return None;
        }
        Some(PolyFraction {
            num: self.num.mul(&o.den),
            den: self.den.mul(&o.num),
        })
    }

    pub fn neg(&self) -> PolyFraction {
        PolyFraction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

/// Convert a rational expression tree into a polynomial fraction over the
/// given leaf ordering. Returns None if the tree contains exp/sqrt/ln or an
/// unmapped leaf, or if an intermediate degree explodes past `max_degree`.
pub fn expr_to_fraction(
    e: &ExprRef,
    var_index: &HashMap<Leaf, usize>,
    max_degree: u32,
) -> Option<PolyFraction> {
    let n = var_index.len();
    let guard = |f: PolyFraction| -> Option<PolyFraction> {
        if f.num.total_degree() > max_degree || f.den.total_degree() > max_degree {
            None
        } else {
            Some(f)
        }
    };
    let r = match &**e {
        Expr::Const(c) => PolyFraction::from_poly(Poly::constant(n, c.clone())),
        Expr::Var(l) => {
            let i = *var_index.get(l)?;
            PolyFraction::from_poly(Poly::var(n, i))
        }
        Expr::Add(a, b) => expr_to_fraction(a, var_index, max_degree)?
            .add(&expr_to_fraction(b, var_index, max_degree)?),
        Expr::Sub(a, b) => expr_to_fraction(a, var_index, max_degree)?
            .sub(&expr_to_fraction(b, var_index, max_degree)?),
        Expr::Mul(a, b) => expr_to_fraction(a, var_index, max_degree)?
            .mul(&expr_to_fraction(b, var_index, max_degree)?),
        Expr::Div(a, b) => expr_to_fraction(a, var_index, max_degree)?
            .div(&expr_to_fraction(b, var_index, max_degree)?)?,
        Expr::Neg(a) => expr_to_fraction(a, var_index, max_degree)?.neg(),
        Expr::Pow(a, k) => {
            let base = expr_to_fraction(a, var_index, max_degree)?;
            if *k >= 0 {
                PolyFraction {
                    num: base.num.powi(*k as u32),
                    den: base.den.powi(*k as u32),
                }
            } else {
                if base.num.is_zero() {
                    return None;
                }
                PolyFraction {
                    num: base.den.powi((-k) as u32),
                    den: base.num.powi((-k) as u32),
                }
            }
        }
        Expr::Exp(_) | Expr::Sqrt(_) | Expr::Ln(_) => return None,
    };
    guard(r)
}

/// Decide whether a rational expression is identically zero by canonical
/// polynomial form. Returns None when the expression is not rational.
pub fn is_identically_zero(e: &ExprRef) -> Option<bool> {
    if e.is_zero_literal() {
        return Some(true);
    }
    let leaves = e.leaves();
    let var_index: HashMap<Leaf, usize> = leaves
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect();
    let f = expr_to_fraction(e, &var_index, 64)?;
    Some(f.num.is_zero())
}

/// Exact rank of a matrix of polynomials via fraction-free Gaussian
/// elimination (Bareiss) over the polynomial ring. Pivot entries are any
/// nonzero polynomials; divisions are exact by the Bareiss identity.
pub fn poly_matrix_rank(mat: &mut Vec<Vec<Poly>>) -> usize {
    let rows = mat.len();
    if rows == 0 {
        return 0;
    }
    let cols = mat[0].len();
    let n_vars = mat[0][0].n_vars;
    let mut prev = Poly::one(n_vars);
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        // pick any row with a nonzero entry in this column, preferring the
        // smallest polynomial to limit growth
        let pivot = (row..rows)
            .filter(|&r| !mat[r][col].is_zero())
            .min_by_key(|&r| mat[r][col].terms.len());
        let Some(p) = pivot else { continue };
        mat.swap(row, p);
        for r in row + 1..rows {
            for c in col + 1..cols {
                // Bareiss step: (pivot*m[r][c] - m[r][col]*m[row][c]) / prev
                let t = mat[row][col]
                    .mul(&mat[r][c])
                    .sub(&mat[r][col].mul(&mat[row][c]));
                mat[r][c] = t.exact_div(&prev);
            }
            mat[r][col] = Poly::zero(n_vars);
        }
        prev = mat[row][col].clone();
        row += 1;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{add, div, indep, int, mul, pow, sub};

    #[test]
    fn canonical_zero_detection() {
        // (x+1)^2 - x^2 - 2x - 1 == 0
        let x = indep(0);
        let e = sub(
            sub(
                sub(pow(add(x.clone(), int(1)), 2), pow(x.clone(), 2)),
                mul(int(2), x.clone()),
            ),
            int(1),
        );
        assert_eq!(is_identically_zero(&e), Some(true));
        let f = sub(pow(add(x.clone(), int(1)), 2), pow(x.clone(), 2));
        assert_eq!(is_identically_zero(&f), Some(false));
    }

    #[test]
    fn fraction_zero_detection() {
        // x/(x+1) - x/(x+1) handled by smart constructor; do a nontrivial one:
        // 1/x + 1/(-x) == 0
        let x = indep(0);
        let e = add(div(int(1), x.clone()), div(int(1), crate::expr::neg(x.clone())));
        assert_eq!(is_identically_zero(&e), Some(true));
    }

    #[test]
    fn bareiss_rank_polynomials() {
        // rows: [1, x], [x, x^2] -> rank 1 ; adding [0, 1] -> rank 2
        let one = Poly::one(1);
        let x = Poly::var(1, 0);
        let x2 = x.mul(&x);
        let mut m = vec![
            vec![one.clone(), x.clone()],
            vec![x.clone(), x2.clone()],
        ];
        assert_eq!(poly_matrix_rank(&mut m), 1);
        let mut m2 = vec![
            vec![one.clone(), x.clone()],
            vec![x.clone(), x2],
            vec![Poly::zero(1), one.clone()],
        ];
        assert_eq!(poly_matrix_rank(&mut m2), 2);
    }

    #[test]
    fn exact_division_roundtrip() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let a = x.add(&y);
        let b = x.sub(&y);
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div(&a), b);
    }
}
