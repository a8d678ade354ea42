//! Carathéodory reduction, exact gauges and Banach-Mazur estimates for
//! finitely generated p-convex bodies, `0 < p < 1`.
//!
//! A body is `p-conv(±A)` for a finite spanning set `A ⊂ R^n`; its gauge is
//! a p-norm. The crate provides:
//!
//! - [`combination`]: evaluation and reweighting of signed combinations;
//! - [`caratheodory`]: reduction to independent supports and the exact
//!   gauge by subset enumeration;
//! - [`norms`]: operator norms, q-envelopes, axiom checks and distance
//!   estimation;
//! - [`gluskin`]: random spaces `Q_p(A)`, volumes and Monte Carlo studies.

// `!(x <= y)` is used on purpose: it is true for NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod caratheodory;
pub mod combination;
pub mod error;
pub mod gluskin;
pub mod linalg;
pub mod norms;
pub mod rng;
pub mod types;

pub use caratheodory::{
    caratheodory_reduce, caratheodory_zero, contains, gauge_bruteforce, lemma4_reduce, membership,
    ReductionResult,
};
pub use combination::{combination_weight, eval_combination, split_to_unit_weight};
pub use error::{Error, Result};
pub use norms::PNormedSpace;
pub use types::{
    GeneratorSet, LinearMap, PBody, PCombination, PExponent, Sign, Term, Vector, DEFAULT_TOL,
};
