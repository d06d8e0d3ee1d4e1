//! Bootstrap decomposition: solve `m` random sub-suites of size `n` and merge the
//! selections by union.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{derive_seed, solve_sa, AnnealConfig};
use crate::error::{Error, Result};
use crate::pareto::{Objectives, Provenance, SelectionSolution};
use crate::qubo::{build_two_objective_qubo, evaluate_objectives2};
use crate::suite::{NormalizedCosts, TestSuite};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    /// Sub-suite size.
    pub n: usize,
    /// Number of sub-suites.
    pub m: usize,
    /// Target fraction of distinct test cases the sub-suites should reach.
    pub beta_coverage: f64,
    pub seed: u64,
}

impl BootstrapConfig {
    pub fn validate(&self, suite_len: usize) -> Result<()> {
        if self.n == 0 || self.n > suite_len {
            return Err(Error::Parameter(format!(
                "sub-suite size n = {} must lie in [1, {suite_len}]",
                self.n
            )));
        }
        if self.m == 0 {
            return Err(Error::Parameter("number of sub-suites m must be at least 1".into()));
        }
        if !(self.beta_coverage > 0.0 && self.beta_coverage <= 1.0) {
            return Err(Error::Parameter(format!(
                "coverage target beta must lie in (0, 1], got {}",
                self.beta_coverage
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapOutcome {
    /// Union of the per-subset selections over the full suite.
    pub solution: SelectionSolution,
    /// Suite positions of each sampled sub-suite, ascending.
    pub subsets: Vec<Vec<usize>>,
    /// Suite positions selected in each sub-problem.
    pub sub_selections: Vec<Vec<usize>>,
    /// Fraction of distinct suite tests that appeared in at least one sub-suite.
    pub distinct_fraction: f64,
    /// The sampled sub-suites fell short of `beta_coverage`.
    pub below_target: bool,
}

/// Each sub-suite is drawn uniformly without replacement, independently of the others,
/// and solved as a two-objective QUBO with the global `alpha` and the suite's
/// normalized costs. Sub-problem `j` anneals with seed `derive_seed(aconfig.seed, j)`.
pub fn bootstrap_solve(
    suite: &TestSuite,
    costs: &NormalizedCosts,
    alpha: f64,
    bconfig: &BootstrapConfig,
    aconfig: &AnnealConfig,
) -> Result<BootstrapOutcome> {
    bconfig.validate(suite.len())?;
    aconfig.validate()?;
    if costs.len() != suite.len() {
        return Err(Error::Dimension {
            expected: suite.len(),
            actual: costs.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(bconfig.seed);
    let subsets: Vec<Vec<usize>> = (0..bconfig.m)
        .map(|_| {
            let mut s = index::sample(&mut rng, suite.len(), bconfig.n).into_vec();
            s.sort_unstable();
            s
        })
        .collect();

    let sub_selections: Vec<Vec<usize>> = subsets
        .par_iter()
        .enumerate()
        .map(|(j, positions)| {
            let sub_suite = suite.subset(positions)?;
            let sub_costs = costs.restrict(positions);
            let model = build_two_objective_qubo(&sub_suite, &sub_costs, alpha)?;
            let config = AnnealConfig {
                seed: derive_seed(aconfig.seed, j as u64),
                ..*aconfig
            };
            let samples = solve_sa(&model, &config)?;
            let best = samples.best().expect("at least one read");
            Ok(positions
                .iter()
                .zip(&best.assignment)
                .filter_map(|(&p, &x)| x.then_some(p))
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut assignment = vec![false; suite.len()];
    for &p in sub_selections.iter().flatten() {
        assignment[p] = true;
    }
    let mut sampled = vec![false; suite.len()];
    for &p in subsets.iter().flatten() {
        sampled[p] = true;
    }
    let distinct_fraction = sampled.iter().filter(|&&s| s).count() as f64 / suite.len() as f64;
    let objectives = evaluate_objectives2(suite, costs, &assignment)?;

    Ok(BootstrapOutcome {
        solution: SelectionSolution::new(
            assignment,
            Objectives::Two(objectives),
            Provenance::new("bootqa", 0),
        ),
        subsets,
        sub_selections,
        distinct_fraction,
        below_target: distinct_fraction < bconfig.beta_coverage,
    })
}
