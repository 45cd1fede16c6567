//! Exact boundary computations for Siegel modular varieties of genus `d` and
//! principal level `n >= 3`.
//!
//! The crate turns restriction formulas for weighted complexes and
//! intersection complexes on the Baily-Borel boundary into finite
//! computations: Kostant's theorem over standard parabolics of `GSp(2d)`,
//! weight truncations along central tori, double-coset counts over `Z/n`, and
//! Hecke indices between levels. Every closed-form count ships with a
//! brute-force oracle in [`shadow`].

pub mod arith;
pub mod engine;
pub mod error;
pub mod group;
pub mod hecke;
pub mod kostant;
pub mod reps;
pub mod shadow;
pub mod strata;

pub use arith::{ExactRational, GroupKind};
pub use engine::{Chain, SymbolicClass};
pub use error::{Error, Result};
pub use group::{build_context, GroupContext, LeviShape, ParabolicData, ParabolicSet, WeylElt};
pub use reps::{Bound, GradedVirtualRep, LeviWeight, Profile, Weight};
pub use strata::StratumRef;
