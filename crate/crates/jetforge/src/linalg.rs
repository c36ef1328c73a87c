//! Exact and floating rank/kernel computations for evaluated matrices.
//!
//! Matrices whose entries are all rational are handled by fraction-free
//! Gaussian elimination over the integers (Bareiss). Anything touched by an
//! analytic primitive drops to f64 elimination with a relative pivot
//! threshold.

use crate::expr::Value;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Relative pivot threshold for floating rank decisions.
pub const FLOAT_RANK_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum ValueMatrix {
    Rational(Vec<Vec<BigRational>>),
    Float(Vec<Vec<f64>>),
}

impl ValueMatrix {
    /// Build from evaluated values; exact if every entry is rational.
    pub fn from_values(rows: Vec<Vec<Value>>) -> ValueMatrix {
        let all_rat = rows
            .iter()
            .all(|r| r.iter().all(|v| matches!(v, Value::Rat(_))));
        if all_rat {
            ValueMatrix::Rational(
                rows.into_iter()
                    .map(|r| {
                        r.into_iter()
                            .map(|v| match v {
                                Value::Rat(x) => x,
                                Value::Float(_) => unreachable!(),
                            })
                            .collect()
                    })
                    .collect(),
            )
        } else {
            ValueMatrix::Float(
                rows.into_iter()
                    .map(|r| r.into_iter().map(|v| v.to_f64()).collect())
                    .collect(),
            )
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            ValueMatrix::Rational(m) => rational_rank(m),
            ValueMatrix::Float(m) => float_rank(m),
        }
    }
}

/// Exact rank: clear row denominators to integers, then Bareiss.
pub fn rational_rank(mat: &[Vec<BigRational>]) -> usize {
    if mat.is_empty() || mat[0].is_empty() {
        return 0;
    }
    let mut m: Vec<Vec<BigInt>> = mat
        .iter()
        .map(|row| {
            let mut lcm = BigInt::one();
            for v in row {
                let d = v.denom();
                let g = num_integer_gcd(&lcm, d);
                lcm = &lcm / &g * d;
            }
            row.iter()
                .map(|v| v.numer() * (&lcm / v.denom()))
                .collect()
        })
        .collect();
    bareiss_rank(&mut m)
}

fn num_integer_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let t = &a % &b;
        a = b;
        b = t;
    }
    if a.is_zero() {
        BigInt::one()
    } else {
        a
    }
}

/// Fraction-free Gaussian elimination rank over the integers.
pub fn bareiss_rank(m: &mut Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        // smallest nonzero pivot keeps entry growth down
        let pivot = (row..rows)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].magnitude().bits());
        let Some(p) = pivot else { continue };
        m.swap(row, p);
        for r in row + 1..rows {
            for c in col + 1..cols {
                let t = &m[row][col] * &m[r][c] - &m[r][col] * &m[row][c];
                m[r][c] = t / &prev; // exact by the Bareiss identity
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[row][col].clone();
        row += 1;
        rank += 1;
    }
    rank
}

/// Floating rank with full pivoting and a relative threshold against the
/// largest pivot seen so far.
pub fn float_rank(mat: &[Vec<f64>]) -> usize {
    if mat.is_empty() || mat[0].is_empty() {
        return 0;
    }
    let mut m: Vec<Vec<f64>> = mat.to_vec();
    let rows = m.len();
    let cols = m[0].len();
    let mut rank = 0;
    let mut used_rows = vec![false; rows];
    let mut max_pivot: f64 = 0.0;
    for _ in 0..cols.min(rows) {
        // full pivot search over unused rows
        let mut best = (0usize, 0usize, 0.0f64);
        for r in 0..rows {
            if used_rows[r] {
                continue;
            }
            for c in 0..cols {
                if m[r][c].abs() > best.2 {
                    best = (r, c, m[r][c].abs());
                }
            }
        }
        let (pr, pc, pv) = best;
        if pv == 0.0 {
            break;
        }
        max_pivot = max_pivot.max(pv);
        if pv < FLOAT_RANK_THRESHOLD * max_pivot {
            break;
        }
        used_rows[pr] = true;
        rank += 1;
        let pivot_row = m[pr].clone();
        for r in 0..rows {
            if used_rows[r] {
                continue;
            }
            let factor = m[r][pc] / pivot_row[pc];
            if factor != 0.0 {
                for c in 0..cols {
                    m[r][c] -= factor * pivot_row[c];
                }
                m[r][pc] = 0.0;
            }
        }
    }
    rank
}

/// Exact kernel basis of a rational matrix (columns = unknowns). Returns a
/// basis of column vectors spanning the null space.
pub fn rational_kernel(mat: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    if mat.is_empty() {
        return Vec::new();
    }
    let rows = mat.len();
    let cols = mat[0].len();
    let mut m: Vec<Vec<BigRational>> = mat.to_vec();
    // Gauss-Jordan to reduced row echelon form.
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let pivot = (row..rows).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot else { continue };
        m.swap(row, p);
        let inv = m[row][col].clone();
        for c in 0..cols {
            m[row][c] = &m[row][c] / &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..cols {
                    let t = &m[row][c] * &f;
                    m[r][c] = &m[r][c] - &t;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let mut basis = Vec::new();
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    for &fc in &free_cols {
        let mut v = vec![BigRational::zero(); cols];
        v[fc] = BigRational::one();
        for (ri, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[ri][fc].clone();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn rq(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rational_rank_simple() {
        let m = vec![
            vec![r(1), r(2), r(3)],
            vec![r(2), r(4), r(6)],
            vec![r(0), r(1), r(1)],
        ];
        assert_eq!(rational_rank(&m), 2);
    }

    #[test]
    fn rational_rank_with_denominators() {
        let m = vec![vec![rq(1, 3), rq(2, 7)], vec![rq(1, 2), rq(3, 7)]];
        // det = 1/3*3/7 - 2/7*1/2 = 1/7 - 1/7 = 0 -> rank 1
        assert_eq!(rational_rank(&m), 1);
    }

    #[test]
    fn float_rank_threshold() {
        let m = vec![
            vec![1.0, 0.0],
            vec![0.0, 1e-15],
        ];
        assert_eq!(float_rank(&m), 1);
        let m2 = vec![vec![1.0, 0.0], vec![0.0, 1e-3]];
        assert_eq!(float_rank(&m2), 2);
    }

    #[test]
    fn kernel_basis() {
        // x + y + z = 0 -> kernel dim 2
        let m = vec![vec![r(1), r(1), r(1)]];
        let k = rational_kernel(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: BigRational = v.iter().cloned().sum();
            assert!(s.is_zero());
        }
        // full-rank square -> empty kernel
        let m2 = vec![vec![r(1), r(0)], vec![r(0), r(1)]];
        assert!(rational_kernel(&m2).is_empty());
    }

    #[test]
    fn bareiss_matches_gauss_jordan_rank() {
        let m = vec![
            vec![r(2), r(4), r(1), r(3)],
            vec![r(1), r(2), r(0), r(1)],
            vec![r(3), r(6), r(1), r(4)],
            vec![r(0), r(0), r(1), r(1)],
        ];
        let rank = rational_rank(&m);
        let kernel = rational_kernel(&m);
        assert_eq!(rank + kernel.len(), 4);
        assert_eq!(rank, 2);
    }
}
