//! Modulus-based matrix splitting solvers for linear complementarity
//! problems, from the single-sweep baseline up to the relaxation
//! accelerated two-sweep method, together with executable convergence
//! certificates and the benchmark problem families exercised by the CLI.

pub mod cli;
pub mod convergence;
pub mod lcp;
pub mod linalg;
pub mod problems;
pub mod solvers;
