//! A formal kernel and computational laboratory for nonstandard Heyting
//! arithmetic in all finite types.
//!
//! The crate parses and type-checks terms of Gödel's T and external formulas
//! with a standardness predicate, decides strong majorizability over finite
//! models, instantiates and validates a catalog of axiom schemas, checks
//! natural-deduction proof scripts, runs exact real arithmetic on Cauchy
//! codes, and executes the concrete functionals of the theory at a finite
//! "nonstandardness scale" N with explicit 1/N error terms.
//!
//! Start with the guide in `book/` (its code blocks are doc-tested, see
//! [`guide`]) or the `nsak` CLI (`nsak selftest`, `nsak demo`, `nsak prove`).

pub mod checker;
pub mod cli;
pub mod evaluator;
pub mod guide;
pub mod kernel;
pub mod majorizability;
pub mod reals;
pub mod schemas;
pub mod syntax;
pub mod terms;
pub mod witnesses;

pub use checker::{infer_type, is_internal, relativize, Context};
pub use evaluator::{eval_nat, normalize, Fuel};
pub use syntax::{parse_formula, parse_term, parse_type, FiniteType, Formula, Term};
