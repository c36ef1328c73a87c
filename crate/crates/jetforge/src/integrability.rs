//! Prolongation, symbol extraction, generic-point dimension counts and the
//! formal-integrability / involutivity verdicts.

use crate::expr::{gradient, ExprRef, Leaf, Value};
use crate::jet::{Coord, JetSpace, Point};
use crate::linalg::{float_rank, rational_rank, ValueMatrix};
use crate::multi_index::MultiIndex;
use crate::sample::{SampleError, Sampler, DEFAULT_SAMPLES};
use crate::system::SystemSpec;
use crate::jet::total_derivative;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntegrabilityError {
    #[error(transparent)]
    Sampling(#[from] SampleError),
}

/// A system together with all total derivatives of its equations up to
/// order `k` beyond the base order.
#[derive(Debug, Clone)]
pub struct ProlongedSystem {
    pub base: SystemSpec,
    pub order: u32,
    pub equations: Vec<ExprRef>,
}

/// Adjoin every D_alpha F with |alpha| <= k, in deterministic order:
/// original equations first, then per equation the derivatives ordered by
/// multi-index.
pub fn prolong(spec: &SystemSpec, k: u32) -> ProlongedSystem {
    let n = spec.n_indep();
    let mut equations = Vec::new();
    for eq in &spec.equations {
        for alpha in MultiIndex::all_up_to(n, k) {
            let mut e = eq.clone();
            for (var, &count) in alpha.counts().iter().enumerate() {
                for _ in 0..count {
                    e = total_derivative(&e, var, n);
                }
            }
            equations.push(e);
        }
    }
    ProlongedSystem {
        base: spec.clone(),
        order: spec.order + k,
        equations,
    }
}

impl ProlongedSystem {
    pub fn jet_space(&self) -> JetSpace {
        JetSpace::new(self.base.n_indep(), self.base.n_dep(), self.order)
    }
}

/// Per-point evaluated Jacobian rows for a set of equations.
fn jacobian_rows(
    equations: &[ExprRef],
    cols: &[Coord],
    point: &Point,
) -> Result<Vec<Vec<Value>>, crate::expr::EvalError> {
    let mut rows = Vec::with_capacity(equations.len());
    for eq in equations {
        let grads: HashMap<Leaf, Value> = gradient(eq, point)?;
        let row = cols
            .iter()
            .map(|c| {
                grads
                    .get(&c.to_leaf())
                    .cloned()
                    .unwrap_or(Value::rat_i64(0, 1))
            })
            .collect();
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct Dims {
    pub jet: u64,
    #[serde(rename = "E")]
    pub e: u64,
    pub g: u64,
    pub g_plus: u64,
    #[serde(rename = "E_plus")]
    pub e_plus: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdicts {
    pub surjective: bool,
    pub involutive_paper: bool,
    pub involutive_cartan: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionReport {
    pub schema: u32,
    pub system: String,
    pub seed: u64,
    pub samples: usize,
    pub dims: Dims,
    pub verdicts: Verdicts,
    /// dim E + dim g_plus - dim E_plus; zero exactly when surjective.
    pub margin: i64,
    pub cartan_characters: Vec<u64>,
    pub rank_histogram: BTreeMap<String, BTreeMap<usize, usize>>,
    /// Reference values carried by the fixture, if any.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub reference: BTreeMap<String, i64>,
    /// Keys whose computed value disagrees with the reference.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reference_mismatches: Vec<String>,
}

fn histogram(ranks: &[usize]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for &r in ranks {
        *h.entry(r).or_insert(0) += 1;
    }
    h
}

/// Generic equation-manifold dimension: dim(jet) - max Jacobian rank over
/// the sample set.
pub fn equation_dimension(
    spec: &SystemSpec,
    seed: u64,
    samples: usize,
) -> Result<u64, IntegrabilityError> {
    let space = spec.jet_space();
    let constraints = spec.regularity_constraints();
    let mut sampler = Sampler::new(seed);
    let mut max_rank = 0;
    for _ in 0..samples {
        let p = sampler.sample_point(&space, spec, &constraints)?;
        let rows = match jacobian_rows(&spec.equations, space.coords(), &p) {
            Ok(r) => r,
            Err(_) => continue,
        };
        max_rank = max_rank.max(ValueMatrix::from_values(rows).rank());
    }
    Ok(space.dim() as u64 - max_rank as u64)
}

/// Generic symbol dimension: kernel of the top-order Jacobian block.
pub fn symbol_dimension(
    spec: &SystemSpec,
    seed: u64,
    samples: usize,
) -> Result<u64, IntegrabilityError> {
    let space = spec.jet_space();
    let tops = space.coords_of_order(spec.order);
    let constraints = spec.regularity_constraints();
    let mut sampler = Sampler::new(seed);
    let mut max_rank = 0;
    for _ in 0..samples {
        let p = sampler.sample_point(&space, spec, &constraints)?;
        let rows = match jacobian_rows(&spec.equations, &tops, &p) {
            Ok(r) => r,
            Err(_) => continue,
        };
        max_rank = max_rank.max(ValueMatrix::from_values(rows).rank());
    }
    Ok(tops.len() as u64 - max_rank as u64)
}

/// Everything criterion-level in one pass: the five dimensions, the
/// surjectivity margin, both involutivity verdicts and the rank histograms,
/// deterministic in (spec, seed, samples).
pub fn formal_integrability_report(
    spec: &SystemSpec,
    seed: u64,
    samples: usize,
) -> Result<DimensionReport, IntegrabilityError> {
    let samples = samples.max(DEFAULT_SAMPLES);
    let base_space = spec.jet_space();
    let prolonged = prolong(spec, 1);
    let plus_space = prolonged.jet_space();
    let base_tops = base_space.coords_of_order(spec.order);
    let plus_tops = plus_space.coords_of_order(prolonged.order);

    // Regularity constraints of base and prolonged equations coincide on
    // denominators of the base; derivatives add squared denominators, which
    // the base constraints already guard.
    let mut constraints = spec.regularity_constraints();
    for eq in &prolonged.equations {
        constraints.extend(eq.regularity_constraints());
    }

    let mut sampler = Sampler::new(seed);
    let mut ranks_e = Vec::new();
    let mut ranks_g = Vec::new();
    let mut ranks_e_plus = Vec::new();
    let mut ranks_g_plus = Vec::new();
    let mut best_symbol_point: Option<(usize, Point)> = None;

    for _ in 0..samples {
        // Sample on the prolonged space; base coordinates are a subset.
        let p = sampler.sample_point(&plus_space, spec, &constraints)?;
        let base_rows = match jacobian_rows(&spec.equations, base_space.coords(), &p) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let g_rows = match jacobian_rows(&spec.equations, &base_tops, &p) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let plus_rows = match jacobian_rows(&prolonged.equations, plus_space.coords(), &p) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let g_plus_rows = match jacobian_rows(&prolonged.equations, &plus_tops, &p) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let re = ValueMatrix::from_values(base_rows).rank();
        let rg = ValueMatrix::from_values(g_rows).rank();
        let rep = ValueMatrix::from_values(plus_rows).rank();
        let rgp = ValueMatrix::from_values(g_plus_rows).rank();
        ranks_e.push(re);
        ranks_g.push(rg);
        ranks_e_plus.push(rep);
        ranks_g_plus.push(rgp);
        if best_symbol_point.as_ref().map(|(r, _)| *r < rg).unwrap_or(true) {
            best_symbol_point = Some((rg, p));
        }
    }

    let max_or = |v: &Vec<usize>| v.iter().copied().max().unwrap_or(0);
    let dim_jet = base_space.dim() as u64;
    let dim_e = dim_jet - max_or(&ranks_e) as u64;
    let dim_g = base_tops.len() as u64 - max_or(&ranks_g) as u64;
    let dim_e_plus = plus_space.dim() as u64 - max_or(&ranks_e_plus) as u64;
    let dim_g_plus = plus_tops.len() as u64 - max_or(&ranks_g_plus) as u64;

    let surjective = dim_e_plus == dim_e + dim_g_plus;
    let involutive_paper = dim_g_plus == dim_g;

    // Cartan test at the best symbol point found.
    let (involutive_cartan, characters) = match &best_symbol_point {
        Some((_, p)) => cartan_test(spec, p, dim_g_plus, seed ^ 0x9e3779b97f4a7c15),
        None => (false, Vec::new()),
    };

    let mut rank_histogram = BTreeMap::new();
    rank_histogram.insert("E".to_string(), histogram(&ranks_e));
    rank_histogram.insert("g".to_string(), histogram(&ranks_g));
    rank_histogram.insert("E_plus".to_string(), histogram(&ranks_e_plus));
    rank_histogram.insert("g_plus".to_string(), histogram(&ranks_g_plus));

    // Compare against fixture-carried reference values.
    let mut reference = BTreeMap::new();
    let mut reference_mismatches = Vec::new();
    let computed: &[(&str, i64)] = &[
        ("dim_E", dim_e as i64),
        ("dim_g", dim_g as i64),
        ("dim_g_plus", dim_g_plus as i64),
        ("dim_E_plus", dim_e_plus as i64),
        ("surjective", surjective as i64),
        ("involutive", involutive_paper as i64),
    ];
    for e in &spec.expectations {
        if e.key.starts_with("__") {
            continue;
        }
        reference.insert(e.key.clone(), e.value);
        if let Some((_, got)) = computed.iter().find(|(k, _)| *k == e.key) {
            if *got != e.value {
                reference_mismatches.push(e.key.clone());
            }
        }
    }

    Ok(DimensionReport {
        schema: 1,
        system: spec.name.clone(),
        seed,
        samples,
        dims: Dims {
            jet: dim_jet,
            e: dim_e,
            g: dim_g,
            g_plus: dim_g_plus,
            e_plus: dim_e_plus,
        },
        verdicts: Verdicts {
            surjective,
            involutive_paper,
            involutive_cartan,
        },
        margin: dim_e as i64 + dim_g_plus as i64 - dim_e_plus as i64,
        cartan_characters: characters,
        rank_histogram,
        reference,
        reference_mismatches,
    })
}

/// Dual involutivity verdict: the stability criterion dim g_{r+1} = dim g_r
/// next to the Cartan test with a generic flag.
pub fn involutivity_check(
    spec: &SystemSpec,
    seed: u64,
    samples: usize,
) -> Result<(bool, bool), IntegrabilityError> {
    let report = formal_integrability_report(spec, seed, samples)?;
    Ok((
        report.verdicts.involutive_paper,
        report.verdicts.involutive_cartan,
    ))
}

/// Cartan test at a fixed generic point: with a generic coordinate flag
/// f_1..f_n, the symbol is involutive iff
/// dim g_{r+1} = sum_{i=0}^{n-1} dim g^(i),
/// where g^(i) is the subspace of g_r killed by contraction with the first
/// i flag vectors. Returns the verdict and the Cartan characters
/// alpha_i = dim g^(i-1) - dim g^(i).
fn cartan_test(
    spec: &SystemSpec,
    point: &Point,
    dim_g_plus: u64,
    flag_seed: u64,
) -> (bool, Vec<u64>) {
    let n = spec.n_indep();
    let m = spec.n_dep();
    let r = spec.order;
    let space = spec.jet_space();
    let tops = space.coords_of_order(r);

    let Ok(sigma_rows) = jacobian_rows(&spec.equations, &tops, point) else {
        return (false, Vec::new());
    };

    // Generic rational flag matrix.
    let mut sampler = Sampler::new(flag_seed);
    let flag = loop {
        let mut t = Vec::new();
        for _ in 0..n {
            let row: Vec<BigRational> = (0..n)
                .map(|_| match sampler.draw() {
                    Value::Rat(x) => x,
                    Value::Float(_) => unreachable!(),
                })
                .collect();
            t.push(row);
        }
        if rational_rank(&t) == n {
            break t;
        }
    };

    // Contraction rows for flag vector l: for each dep j and each beta of
    // length r-1, the condition sum_v f_l[v] * V^j_{beta+1_v} = 0.
    let col_index: HashMap<(usize, MultiIndex), usize> = tops
        .iter()
        .enumerate()
        .map(|(i, c)| match c {
            Coord::Jet { dep, idx } => ((*dep, idx.clone()), i),
            Coord::Indep(_) => unreachable!("top coords are jets"),
        })
        .collect();
    let betas = MultiIndex::all_of_length(n, r.saturating_sub(1));
    let contraction_rows = |l: usize| -> Vec<Vec<BigRational>> {
        let mut rows = Vec::new();
        for dep in 0..m {
            for beta in &betas {
                let mut row = vec![BigRational::zero(); tops.len()];
                for v in 0..n {
                    let alpha = beta.bump(v);
                    if let Some(&ci) = col_index.get(&(dep, alpha)) {
                        row[ci] = &row[ci] + &flag[l][v];
                    }
                }
                rows.push(row);
            }
        }
        rows
    };

    // Stack sigma with contraction conditions and measure kernel dims.
    let all_rational = sigma_rows
        .iter()
        .all(|r| r.iter().all(|v| matches!(v, Value::Rat(_))));
    let kernel_dim = |extra: &[Vec<BigRational>]| -> usize {
        if all_rational {
            let mut mat: Vec<Vec<BigRational>> = sigma_rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|v| v.as_rat().unwrap().clone())
                        .collect()
                })
                .collect();
            mat.extend(extra.iter().cloned());
            tops.len() - rational_rank(&mat)
        } else {
            let mut mat: Vec<Vec<f64>> = sigma_rows
                .iter()
                .map(|r| r.iter().map(|v| v.to_f64()).collect())
                .collect();
            for row in extra {
                mat.push(row.iter().map(crate::expr::rational_to_f64).collect());
            }
            tops.len() - float_rank(&mat)
        }
    };

    let mut dims = Vec::new(); // dim g^(i) for i = 0..n
    let mut extra: Vec<Vec<BigRational>> = Vec::new();
    dims.push(kernel_dim(&extra));
    for l in 0..n {
        extra.extend(contraction_rows(l));
        dims.push(kernel_dim(&extra));
    }

    let sum: u64 = dims[..n].iter().map(|&d| d as u64).sum();
    let characters: Vec<u64> = (1..=n).map(|i| (dims[i - 1] - dims[i]) as u64).collect();
    (sum == dim_g_plus, characters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_system;

    const SEED: u64 = 42;

    #[test]
    fn prolong_counts() {
        // heat, k=1 -> 3 equations
        let spec = parse_system("dep u; indep t, x; eq u_t - u_xx = 0;").unwrap();
        let p = prolong(&spec, 1);
        assert_eq!(p.equations.len(), 3);
        assert_eq!(p.order, 3);
        // count = original * C(n+k, k)
        let nls = parse_system(
            "dep v, w; indep t, x; param g = 1; \
             eq v_t + g*v - w_xx - w*(v^2 + w^2) = 0; \
             eq w_t + g*w + v_xx - v*(v^2 + w^2) = 0;",
        )
        .unwrap();
        assert_eq!(prolong(&nls, 1).equations.len(), 6);
        assert_eq!(prolong(&nls, 2).equations.len(), 12);
    }

    #[test]
    fn empty_system_dimension_is_full_space() {
        let spec = parse_system("dep u; indep t, x; order 2;").unwrap();
        assert_eq!(equation_dimension(&spec, SEED, 4).unwrap(), 8);
    }

    #[test]
    fn heat_equation_dims() {
        let spec = parse_system("dep u; indep t, x; eq u_t - u_xx = 0;").unwrap();
        let rep = formal_integrability_report(&spec, SEED, 8).unwrap();
        assert_eq!(rep.dims.jet, 8);
        assert_eq!(rep.dims.e, 7);
        assert_eq!(rep.dims.g, 2);
        assert_eq!(rep.dims.g_plus, 2);
        assert_eq!(rep.dims.e_plus, 9);
        assert!(rep.verdicts.surjective);
        assert!(rep.verdicts.involutive_paper);
        assert!(rep.verdicts.involutive_cartan);
    }

    #[test]
    fn single_gradient_equation_trivially_involutive() {
        // u_x = 0 on JetSpace(2,1,1)
        let spec = parse_system("dep u; indep t, x; eq u_x = 0;").unwrap();
        let rep = formal_integrability_report(&spec, SEED, 8).unwrap();
        assert_eq!(rep.dims.jet, 5);
        assert_eq!(rep.dims.e, 4);
        assert_eq!(rep.dims.g, 1);
        assert_eq!(rep.dims.g_plus, 1);
        assert!(rep.verdicts.involutive_cartan);
        assert!(rep.verdicts.surjective);
    }

    #[test]
    fn nls_dimension_identity_exact() {
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
        let rep = formal_integrability_report(&spec, SEED, 8).unwrap();
        assert_eq!(rep.dims.jet, 14);
        assert_eq!(rep.dims.e, 12);
        assert_eq!(rep.dims.g, 4);
        assert_eq!(rep.dims.g_plus, 4);
        assert_eq!(rep.dims.e_plus, 16);
        assert!(rep.verdicts.surjective);
        assert!(rep.verdicts.involutive_paper);
        assert!(rep.verdicts.involutive_cartan);
        assert_eq!(rep.margin, 0);
    }

    #[test]
    fn dims_invariant_under_row_scaling_and_permutation() {
        let spec = parse_system(
            "dep v, w; indep t, x; \
             eq v_t - w_xx = 0; eq w_t + v_xx = 0;",
        )
        .unwrap();
        let rep1 = formal_integrability_report(&spec, SEED, 8).unwrap();
        let mut spec2 = spec.clone();
        spec2.equations.reverse();
        spec2.equations[0] = crate::expr::mul(crate::expr::int(-7), spec2.equations[0].clone());
        let rep2 = formal_integrability_report(&spec2, SEED + 5, 8).unwrap();
        assert_eq!(rep1.dims.e, rep2.dims.e);
        assert_eq!(rep1.dims.g, rep2.dims.g);
        assert_eq!(rep1.dims.e_plus, rep2.dims.e_plus);
        assert_eq!(rep1.dims.g_plus, rep2.dims.g_plus);
    }

    #[test]
    fn reports_reproducible_from_seed() {
        let spec = parse_system("dep u; indep t, x; eq u_t - u*u_x = 0;").unwrap();
        let a = formal_integrability_report(&spec, 123, 8).unwrap();
        let b = formal_integrability_report(&spec, 123, 8).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn reference_mismatch_flagging() {
        let spec = parse_system(
            "dep u; indep t, x; eq u_t - u_xx = 0; expect dim_E = 7; expect dim_g = 99;",
        )
        .unwrap();
        let rep = formal_integrability_report(&spec, SEED, 8).unwrap();
        assert_eq!(rep.reference.get("dim_E"), Some(&7));
        assert!(rep.reference_mismatches.contains(&"dim_g".to_string()));
        assert!(!rep.reference_mismatches.contains(&"dim_E".to_string()));
    }
}
