//! Symmetric derivative multi-indices over the declared independent variables.

use std::fmt;

/// Derivative counts per independent variable, in declaration order.
///
/// `counts[i]` is how many times the expression is differentiated with
/// respect to independent variable `i`. Equal count vectors compare equal,
/// which is what makes `u_tx` and `u_xt` the same jet coordinate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    counts: Vec<u32>,
}

impl MultiIndex {
    pub fn zero(n_indep: usize) -> Self {
        MultiIndex {
            counts: vec![0; n_indep],
        }
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        MultiIndex { counts }
    }

    /// Build from a list of variable positions, e.g. `[0, 1, 1]` for `txx`.
    pub fn from_vars(n_indep: usize, vars: &[usize]) -> Self {
        let mut counts = vec![0u32; n_indep];
        for &v in vars {
            counts[v] += 1;
        }
        MultiIndex { counts }
    }

    pub fn len(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, var: usize) -> u32 {
        self.counts[var]
    }

    pub fn n_vars(&self) -> usize {
        self.counts.len()
    }

    /// Index raised by one derivative in direction `var`.
    pub fn bump(&self, var: usize) -> Self {
        let mut counts = self.counts.clone();
        counts[var] += 1;
        MultiIndex { counts }
    }

    /// Index lowered by one derivative in direction `var`, if present.
    pub fn lower(&self, var: usize) -> Option<Self> {
        if self.counts[var] == 0 {
            return None;
        }
        let mut counts = self.counts.clone();
        counts[var] -= 1;
        Some(MultiIndex { counts })
    }

    pub fn add(&self, other: &MultiIndex) -> Self {
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a + b)
            .collect();
        MultiIndex { counts }
    }

    /// Render with the given variable names, e.g. `txx`.
    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        for (i, &c) in self.counts.iter().enumerate() {
            for _ in 0..c {
                s.push_str(&names[i]);
            }
        }
        s
    }

    /// All multi-indices of exact length `len` over `n` variables, in
    /// lexicographic order of count vectors.
    pub fn all_of_length(n: usize, len: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(n: usize, pos: usize, remaining: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if pos == n - 1 {
                cur[pos] = remaining;
                out.push(MultiIndex {
                    counts: cur.clone(),
                });
                return;
            }
            // descending first count gives lexicographically decreasing order;
            // we want ascending, so iterate 0..=remaining
            for c in 0..=remaining {
                cur[pos] = c;
                rec(n, pos + 1, remaining - c, cur, out);
            }
        }
        if n == 0 {
            if len == 0 {
                out.push(MultiIndex { counts: vec![] });
            }
            return out;
        }
        rec(n, 0, len, &mut cur, &mut out);
        out.sort();
        out
    }

    /// All multi-indices of length `0..=len`.
    pub fn all_up_to(n: usize, len: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for l in 0..=len {
            out.extend(Self::all_of_length(n, l));
        }
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.counts)
    }
}

/// Binomial coefficient C(n, k) as u128 to keep dimension counts overflow-safe.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_and_bump() {
        let m = MultiIndex::from_vars(2, &[0, 1, 1]);
        assert_eq!(m.len(), 3);
        assert_eq!(m.counts(), &[1, 2]);
        let b = m.bump(0);
        assert_eq!(b.counts(), &[2, 2]);
        assert_eq!(m.lower(0).unwrap().counts(), &[0, 2]);
        assert!(MultiIndex::zero(2).lower(0).is_none());
    }

    #[test]
    fn permutation_invariance() {
        let a = MultiIndex::from_vars(2, &[0, 1]);
        let b = MultiIndex::from_vars(2, &[1, 0]);
        assert_eq!(a, b);
    }

    #[test]
    fn enumeration_counts() {
        // #multi-indices of length r over n vars = C(n+r-1, r)
        assert_eq!(MultiIndex::all_of_length(2, 2).len(), 3);
        assert_eq!(MultiIndex::all_of_length(3, 3).len(), 10);
        assert_eq!(MultiIndex::all_up_to(2, 2).len(), 6);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(7, 3), 35);
        assert_eq!(binomial(5, 0), 1);
    }
}
