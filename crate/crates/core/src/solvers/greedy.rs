//! Additional-greedy selection and incremental frontiers.
//!
//! Each step picks the unselected test with the highest
//! `(new statements / |K| + e_i) / max(cost_i, ε)`, breaking ties by lower cost and then
//! lower index. The cumulative suite after every pick is a frontier candidate.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::pareto::{Objectives, ParetoArchive, Provenance, SelectionSolution};
use crate::qubo::evaluate_objectives3;
use crate::suite::{NormalizedCosts, TestSuite};

pub const SCORE_EPSILON: f64 = 1e-9;

/// Candidates emitted by an incremental construction and their non-dominated subset.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementalFrontier {
    pub candidates: Vec<SelectionSolution>,
    pub frontier: ParetoArchive,
}

/// Greedy order over `pool`. With `stop_when_useless`, stops at the first step where
/// no remaining test adds coverage or a fault; otherwise orders the whole pool.
fn greedy_order(
    suite: &TestSuite,
    costs: &NormalizedCosts,
    pool: &[usize],
    stop_when_useless: bool,
) -> Vec<usize> {
    let statement_pos: HashMap<u64, usize> = suite
        .coverage_index()
        .keys()
        .enumerate()
        .map(|(p, &k)| (k, p))
        .collect();
    let universe = statement_pos.len();
    let mut covered = vec![false; universe];
    let mut gain: Vec<usize> = suite
        .cases()
        .iter()
        .map(|c| c.covered_statements.len())
        .collect();
    let mut remaining: Vec<usize> = pool.to_vec();
    let mut order = Vec::with_capacity(pool.len());

    let score = |i: usize, gain: &[usize]| {
        let coverage = if universe == 0 {
            0.0
        } else {
            gain[i] as f64 / universe as f64
        };
        let fault = if suite.case(i).fault_flag { 1.0 } else { 0.0 };
        (coverage + fault) / costs.values[i].max(SCORE_EPSILON)
    };

    while !remaining.is_empty() {
        let (slot, &pick) = remaining
            .iter()
            .enumerate()
            .max_by(|(_, &a), (_, &b)| {
                score(a, &gain)
                    .total_cmp(&score(b, &gain))
                    .then_with(|| costs.values[b].total_cmp(&costs.values[a]))
                    .then_with(|| b.cmp(&a))
            })
            .expect("nonempty");
        if stop_when_useless && score(pick, &gain) == 0.0 {
            break;
        }
        remaining.swap_remove(slot);
        order.push(pick);
        for k in &suite.case(pick).covered_statements {
            let p = statement_pos[k];
            if !covered[p] {
                covered[p] = true;
                for &j in &suite.coverage_index()[k] {
                    gain[j] -= 1;
                }
            }
        }
    }
    order
}

fn prefixes(
    suite: &TestSuite,
    costs: &NormalizedCosts,
    order: &[usize],
    algorithm: &str,
) -> Result<IncrementalFrontier> {
    let mut assignment = vec![false; suite.len()];
    let mut candidates = Vec::with_capacity(order.len());
    for &i in order {
        assignment[i] = true;
        let objectives = evaluate_objectives3(suite, costs, &assignment)?;
        candidates.push(SelectionSolution::new(
            assignment.clone(),
            Objectives::Three(objectives),
            Provenance::new(algorithm, 0),
        ));
    }
    let frontier = ParetoArchive::from_candidates(candidates.clone())?;
    Ok(IncrementalFrontier {
        candidates,
        frontier,
    })
}

/// Additional greedy over the whole suite. Provenance is `("greedy", 0)`.
pub fn additional_greedy(suite: &TestSuite, costs: &NormalizedCosts) -> Result<IncrementalFrontier> {
    if costs.len() != suite.len() {
        return Err(Error::Dimension {
            expected: suite.len(),
            actual: costs.len(),
        });
    }
    let pool: Vec<usize> = (0..suite.len()).collect();
    let order = greedy_order(suite, costs, &pool, true);
    prefixes(suite, costs, &order, "greedy")
}

/// Orders the tests of `best_assignment` greedily and keeps the non-dominated prefixes.
/// Provenance is `("selectqa", 0)`.
pub fn extract_archive(
    suite: &TestSuite,
    costs: &NormalizedCosts,
    best_assignment: &[bool],
) -> Result<IncrementalFrontier> {
    if best_assignment.len() != suite.len() {
        return Err(Error::Dimension {
            expected: suite.len(),
            actual: best_assignment.len(),
        });
    }
    if costs.len() != suite.len() {
        return Err(Error::Dimension {
            expected: suite.len(),
            actual: costs.len(),
        });
    }
    let pool: Vec<usize> = best_assignment
        .iter()
        .enumerate()
        .filter_map(|(i, &x)| x.then_some(i))
        .collect();
    let order = greedy_order(suite, costs, &pool, false);
    prefixes(suite, costs, &order, "selectqa")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suite::{normalize_costs, TestCase};

    fn suite(cases: Vec<TestCase>) -> (TestSuite, NormalizedCosts) {
        let s = TestSuite::new(cases).unwrap();
        let c = normalize_costs(&s).unwrap();
        (s, c)
    }

    #[test]
    fn dominant_test_first() {
        let (s, c) = suite(vec![
            TestCase::new(0, 2.0).with_coverage([1]),
            TestCase::new(1, 1.0).with_coverage([1, 2, 3]),
            TestCase::new(2, 2.0).with_coverage([3]),
        ]);
        let out = additional_greedy(&s, &c).unwrap();
        assert_eq!(out.candidates[0].selected().collect::<Vec<_>>(), vec![1]);
        assert_eq!(out.candidates.len(), 1);
    }

    #[test]
    fn second_pick_skips_redundant_test() {
        let (s, c) = suite(vec![
            TestCase::new(0, 1.0).with_coverage([1, 2]),
            TestCase::new(1, 1.0).with_coverage([2]),
            TestCase::new(2, 1.0).with_coverage([3]),
        ]);
        let out = additional_greedy(&s, &c).unwrap();
        let picks: Vec<Vec<usize>> = out
            .candidates
            .iter()
            .map(|s| s.selected().collect())
            .collect();
        assert_eq!(picks, vec![vec![0], vec![0, 2]]);
        assert!(out.candidates.len() <= s.len());
    }

    #[test]
    fn faults_keep_greedy_going() {
        let (s, c) = suite(vec![
            TestCase::new(0, 1.0).with_coverage([1, 2]),
            TestCase::new(1, 4.0).with_fault(true),
            TestCase::new(2, 1.0),
        ]);
        let out = additional_greedy(&s, &c).unwrap();
        let last: Vec<usize> = out.candidates.last().unwrap().selected().collect();
        assert_eq!(last, vec![0, 1]);
    }

    #[test]
    fn zero_cost_tests_are_scored_with_epsilon() {
        let (s, c) = suite(vec![
            TestCase::new(0, 0.0).with_coverage([1]),
            TestCase::new(1, 1.0).with_coverage([1, 2]),
        ]);
        let out = additional_greedy(&s, &c).unwrap();
        assert_eq!(out.candidates[0].selected().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn archive_of_single_selection() {
        let (s, c) = suite(vec![
            TestCase::new(0, 1.0).with_coverage([1]),
            TestCase::new(1, 1.0).with_coverage([2]),
        ]);
        let out = extract_archive(&s, &c, &[false, true]).unwrap();
        assert_eq!(out.frontier.len(), 1);
        assert_eq!(out.frontier.members()[0].assignment, vec![false, true]);
        assert!(extract_archive(&s, &c, &[true]).is_err());
    }
}
