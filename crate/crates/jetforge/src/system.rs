//! Parsed PDE systems: variable context, equations, parameters, singular
//! loci and the canonical serialized form.

use crate::expr::{Constraint, ExprRef, Leaf, Value};
use crate::jet::JetSpace;
use num_rational::BigRational;
use serde_json::json;
use std::collections::HashMap;

/// Declared value of a parameter: fixed rational or free.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Fixed(BigRational),
    Free,
}

#[derive(Debug, Clone)]
pub struct Parameter {
    pub name: String,
    pub value: ParamValue,
}

/// Reference dimension values a fixture may carry for report comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub key: String,
    pub value: i64,
}

/// A declared regularity condition (`regular <expr> != 0;` or `> 0;`).
/// Needed by systems whose equations are shipped denominator-cleared, where
/// the tree-level constraint collection has nothing to find.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegKind {
    NonZero,
    Positive,
}

#[derive(Debug, Clone)]
pub struct DeclaredRegularity {
    pub expr: ExprRef,
    pub kind: RegKind,
}

/// A validated PDE system over jet coordinates. Equations are stored
/// normalized to `expr = 0`.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub name: String,
    pub indep_vars: Vec<String>,
    pub dep_vars: Vec<String>,
    pub parameters: Vec<Parameter>,
    pub equations: Vec<ExprRef>,
    pub singular_loci: Vec<ExprRef>,
    /// Declared order; at least the maximal jet index length present. A
    /// declared order above the inferred one embeds the system in a higher
    /// jet space.
    pub order: u32,
    /// Paper-reference values carried by the fixture (may be empty).
    pub expectations: Vec<Expectation>,
    /// Explicitly declared regularity conditions.
    pub regular: Vec<DeclaredRegularity>,
}

impl SystemSpec {
    pub fn n_indep(&self) -> usize {
        self.indep_vars.len()
    }

    pub fn n_dep(&self) -> usize {
        self.dep_vars.len()
    }

    /// Maximal jet index length actually appearing in equations and loci.
    pub fn inferred_order(&self) -> u32 {
        self.equations
            .iter()
            .chain(self.singular_loci.iter())
            .map(|e| e.max_order())
            .max()
            .unwrap_or(0)
    }

    pub fn jet_space(&self) -> JetSpace {
        JetSpace::new(self.n_indep(), self.n_dep(), self.order)
    }

    /// Regularity constraints: tree-collected (denominators, sqrt/ln
    /// arguments) plus the declared ones.
    pub fn regularity_constraints(&self) -> Vec<Constraint> {
        let mut out = Vec::new();
        for e in self.equations.iter().chain(self.singular_loci.iter()) {
            out.extend(e.regularity_constraints());
        }
        for d in &self.regular {
            out.push(match d.kind {
                RegKind::NonZero => Constraint::NonZero(d.expr.clone()),
                RegKind::Positive => Constraint::Positive(d.expr.clone()),
            });
        }
        out
    }

    /// Environment bindings for parameters with fixed values.
    pub fn param_env(&self) -> HashMap<Leaf, Value> {
        let mut env = HashMap::new();
        for (i, p) in self.parameters.iter().enumerate() {
            if let ParamValue::Fixed(v) = &p.value {
                env.insert(Leaf::Param(i), Value::Rat(v.clone()));
            }
        }
        env
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.parameters.iter().position(|p| p.name == name)
    }

    pub fn indep_index(&self, name: &str) -> Option<usize> {
        self.indep_vars.iter().position(|v| v == name)
    }

    pub fn dep_index(&self, name: &str) -> Option<usize> {
        self.dep_vars.iter().position(|v| v == name)
    }

    pub fn expectation(&self, key: &str) -> Option<i64> {
        self.expectations
            .iter()
            .find(|e| e.key == key)
            .map(|e| e.value)
    }

    /// Canonical JSON form with stable key order; equations rendered with
    /// the canonical printer so the form round-trips through the parser.
    pub fn to_canonical_json(&self) -> serde_json::Value {
        let printer = crate::dsl::Printer::new(self);
        json!({
            "schema": 1,
            "name": self.name,
            "indep_vars": self.indep_vars,
            "dep_vars": self.dep_vars,
            "parameters": self.parameters.iter().map(|p| {
                match &p.value {
                    ParamValue::Fixed(v) => json!({"name": p.name, "value": v.to_string()}),
                    ParamValue::Free => json!({"name": p.name, "value": "free"}),
                }
            }).collect::<Vec<_>>(),
            "order": self.order,
            "equations": self.equations.iter().map(|e| printer.render(e)).collect::<Vec<_>>(),
            "singular_loci": self.singular_loci.iter().map(|e| printer.render(e)).collect::<Vec<_>>(),
            "regular": self.regular.iter().map(|d| {
                let op = match d.kind { RegKind::NonZero => "!= 0", RegKind::Positive => "> 0" };
                json!(format!("{} {}", printer.render(&d.expr), op))
            }).collect::<Vec<_>>(),
            "expectations": self.expectations.iter()
                .filter(|e| !e.key.starts_with("__"))
                .map(|e| json!({"key": e.key, "value": e.value})).collect::<Vec<_>>(),
        })
    }
}
