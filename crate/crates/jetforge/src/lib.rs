//! Symbolic jet-bundle engine and numerical flow lab.
//!
//! The crate splits into a symbolic half — a `.pde` system language,
//! jet-space calculus, formal-integrability dimension counts and Cartan
//! distributions — and a numerical half with deterministic solvers for a
//! neckpinching curvature flow, a damped-driven cubic Schrödinger system
//! and pullback-flow rigidity checks on flat space.

pub mod dsl;
pub mod expr;
pub mod integrability;
pub mod jet;
pub mod linalg;
pub mod multi_index;
pub mod poly;
pub mod sample;
pub mod system;
