//! Exact combinatorics of extended affine Weyl groups, sigma-conjugacy
//! class invariants, and affine Deligne-Lusztig dimension tables.
//!
//! The crate has two independent routes to every answer. The reduction
//! oracle computes, for an element w, the full map from classes to
//! dimensions by Deligne-Lusztig reduction trees with memoization; the
//! formulas module computes the closed-form verdict (nonempty with an
//! exact dimension, empty with a reason, or not applicable). Sweeps in
//! [`sweep`] check one against the other entry by entry, exactly; all
//! arithmetic is integer or rational, with no tolerances anywhere.

pub mod affine_weyl;
pub mod error;
pub mod formulas;
pub mod linalg;
pub mod parse;
pub mod reduction_oracle;
pub mod root_system;
pub mod sigma_classes;
pub mod sweep;

pub use affine_weyl::{AffineElement, CosetDecomposition, KappaClass};
pub use error::{AdlvError, Result};
pub use formulas::{CordialCertificate, EmptyReason, Hypothesis, Verdict};
pub use reduction_oracle::{Descent, DimTable, Oracle, SplitPolicy, DEFAULT_BUDGET};
pub use root_system::{
    CartanType, Coweight, FiniteWeylElement, LatticeMode, RationalCoweight, RootDatum, SigmaPerm,
};
pub use sigma_classes::ClassInvariant;
