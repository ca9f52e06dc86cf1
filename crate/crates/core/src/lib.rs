//! Measuring the topology and search geometry of CNF solution spaces.
//!
//! The crate is organised around the experiment pipeline:
//!
//! - [`formulas`]: random k-SAT, polynomial control families, Margulis
//!   expanders, Tseitin contradictions, conjunction and DIMACS I/O.
//! - [`solver`]: a CDCL solver with conflict accounting, a brute-force
//!   oracle, blocking-clause enumeration and an external-solver bridge.
//! - [`topology`]: the cubical complex induced by a solution set and its
//!   Betti numbers over GF(2).
//! - [`shattering`], [`drunkwalk`], [`lineartest`], [`scaling`]: the four
//!   measurement protocols.
//! - [`harness`]: configs, batch execution, persistence and SVG charts.

pub mod assignment;
pub mod drunkwalk;
pub mod error;
pub mod formulas;
pub mod harness;
pub mod lineartest;
pub mod rng;
pub mod scaling;
pub mod shattering;
pub mod solver;
pub mod topology;

pub use assignment::Assignment;
pub use error::{Error, Result};
pub use formulas::{CnfFormula, FamilyTag, Literal};
pub use solver::{SolutionSet, SolveResult, SolveStatus, SolverConfig};
