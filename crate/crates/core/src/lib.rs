//! Hypergraph Lagrangians: colex hypergraphs, certified numerical Lagrangians,
//! closed-form predictions and bounds, and exhaustive searches over
//! left-compressed hypergraphs for small parameters.

pub mod binom;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod hypergraph;
pub mod io;
pub mod oracle;
pub mod random;
pub mod solver;
pub mod weighting;

pub use error::{Error, Result};
pub use hypergraph::{build_colex, colex_compare, colex_rank, colex_unrank, complete, Edge, Hypergraph};
pub use solver::{solve_lagrangian, LagrangianCertificate, SolverConfig};
pub use weighting::Weighting;
