//! Regression test case selection as quadratic unconstrained binary optimization.
//!
//! The crate turns a test suite (costs, fault history, statement coverage) into a QUBO
//! model, solves it with simulated annealing or exhaustive search, builds Pareto
//! frontiers from the selections, and compares algorithms statistically.

pub mod error;
pub mod experiment;
pub mod pareto;
pub mod qubo;
pub mod solvers;
pub mod stats;
pub mod suite;

pub use error::{Error, Result};
pub use pareto::{
    count_nondominated, dominates, reference_frontier, Objectives, ParetoArchive, Provenance,
    SelectionSolution, Sense,
};
pub use qubo::{
    build_three_objective_qubo, build_two_objective_qubo, evaluate_objectives2,
    evaluate_objectives3, penalty_upper_bound, ObjectiveVector2, ObjectiveVector3, QuboModel,
};
pub use solvers::{
    additional_greedy, bootstrap_solve, extract_archive, solve_exact, solve_sa, AnnealConfig,
    BootstrapConfig, SampleSet,
};
pub use stats::{classify_magnitude, mann_whitney_u, vargha_delaney_a12, Alternative, Magnitude, StatReport};
pub use suite::{normalize_costs, NormalizedCosts, TestCase, TestSuite};
