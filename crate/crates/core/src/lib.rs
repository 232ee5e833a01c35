//! Congruence obstructions for line arrangements whose singular points have
//! odd multiplicity, checked both on the weak combinatorics and on explicit
//! incidence structures through the intersection lattice of the blow-up.

pub mod combinatorics;
pub mod enumerate;
pub mod fixtures;
pub mod incidence_file;
pub mod lattice;
pub mod pipeline;
pub mod report;

pub use combinatorics::{RealizationClass, WeakCombinatorics};
pub use lattice::{HomologyClass, IncidenceStructure};
pub use report::{ObstructionReport, Outcome, Residue, Verdict};
