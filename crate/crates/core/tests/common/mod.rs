//! Instance generators and brute-force oracles shared by the integration tests.
//! Nothing here calls into the code paths it is used to check.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsq_core::{NormalizedCosts, ObjectiveVector3, Sense, TestCase, TestSuite};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random three-objective suite: `tests` cases over up to `statements` statements.
pub fn random_suite(rng: &mut ChaCha8Rng, tests: usize, statements: u64, density: f64) -> TestSuite {
    let cases = (0..tests)
        .map(|i| {
            let covered: Vec<u64> = (0..statements).filter(|_| rng.gen_bool(density)).collect();
            TestCase::new(i as u64, rng.gen_range(1.0..100.0))
                .with_fault(rng.gen_bool(0.4))
                .with_coverage(covered)
        })
        .collect();
    TestSuite::new(cases).unwrap()
}

pub fn random_rate_suite(rng: &mut ChaCha8Rng, tests: usize) -> TestSuite {
    let cases = (0..tests)
        .map(|i| {
            TestCase::new(i as u64, rng.gen_range(0.1..60.0)).with_failure_rate(rng.gen_range(0.01..1.0))
        })
        .collect();
    TestSuite::new(cases).unwrap()
}

pub fn all_assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << n).map(move |m| (0..n).map(|b| m & (1 << b) != 0).collect())
}

/// Unexpanded objective with squared coverage penalties.
pub fn penalty_form(suite: &TestSuite, costs: &NormalizedCosts, alpha: f64, penalty: f64, x: &[bool]) -> f64 {
    let mut h = 0.0;
    for (i, case) in suite.cases().iter().enumerate() {
        if x[i] {
            h += alpha * costs.values[i];
            if case.fault_flag {
                h -= 1.0 - alpha;
            }
        }
    }
    for k in statement_ids(suite) {
        let covering = suite
            .cases()
            .iter()
            .enumerate()
            .filter(|(i, c)| x[*i] && c.covered_statements.contains(&k))
            .count() as f64;
        h += penalty * (covering - 1.0) * (covering - 1.0);
    }
    h
}

/// Statements covered by any case, recomputed from the cases.
pub fn statement_ids(suite: &TestSuite) -> Vec<u64> {
    let mut ks: Vec<u64> = suite
        .cases()
        .iter()
        .flat_map(|c| c.covered_statements.iter().copied())
        .collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

pub fn covered_count(suite: &TestSuite, x: &[bool]) -> usize {
    let mut ks: Vec<u64> = suite
        .cases()
        .iter()
        .enumerate()
        .filter(|(i, _)| x[*i])
        .flat_map(|(_, c)| c.covered_statements.iter().copied())
        .collect();
    ks.sort_unstable();
    ks.dedup();
    ks.len()
}

/// Some assignment covers every statement exactly once (zero penalty is reachable).
pub fn exact_cover_exists(suite: &TestSuite) -> bool {
    let ks = statement_ids(suite);
    all_assignments(suite.len()).any(|x| {
        ks.iter().all(|k| {
            suite
                .cases()
                .iter()
                .enumerate()
                .filter(|(i, c)| x[*i] && c.covered_statements.contains(k))
                .count()
                == 1
        })
    })
}

pub fn brute_objectives(suite: &TestSuite, costs: &NormalizedCosts, x: &[bool]) -> ObjectiveVector3 {
    ObjectiveVector3 {
        total_cost: (0..x.len()).filter(|&i| x[i]).map(|i| costs.values[i]).sum(),
        statement_coverage: covered_count(suite, x),
        fault_coverage: (0..x.len()).filter(|&i| x[i] && suite.case(i).fault_flag).count(),
    }
}

/// Plain-definition dominance with the same tolerance the library documents.
pub fn oracle_dominates(a: &[f64], b: &[f64], senses: &[Sense]) -> bool {
    let mut strict = false;
    for i in 0..a.len() {
        let (better, worse) = match senses[i] {
            Sense::Minimize => (a[i] < b[i] - 1e-9, a[i] > b[i] + 1e-9),
            Sense::Maximize => (a[i] > b[i] + 1e-9, a[i] < b[i] - 1e-9),
        };
        if worse {
            return false;
        }
        strict |= better;
    }
    strict
}

/// O(n²) non-dominated filter; returns the sorted, deduplicated surviving vectors.
pub fn oracle_front(vectors: &[Vec<f64>], senses: &[Sense]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vectors
        .iter()
        .filter(|v| !vectors.iter().any(|o| oracle_dominates(o, v, senses)))
        .cloned()
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= 1e-9));
    out
}

/// Null distribution counts of U for sample sizes (m, n) by the classical recurrence
/// f(u; m, n) = f(u - n; m - 1, n) + f(u; m, n - 1).
pub fn u_distribution(m: usize, n: usize) -> Vec<u64> {
    fn rec(u: i64, m: usize, n: usize, memo: &mut std::collections::HashMap<(i64, usize, usize), u64>) -> u64 {
        if u < 0 {
            return 0;
        }
        if m == 0 || n == 0 {
            return u64::from(u == 0);
        }
        if let Some(&v) = memo.get(&(u, m, n)) {
            return v;
        }
        let v = rec(u - n as i64, m - 1, n, memo) + rec(u, m, n - 1, memo);
        memo.insert((u, m, n), v);
        v
    }
    let mut memo = Default::default();
    (0..=(m * n) as i64).map(|u| rec(u, m, n, &mut memo)).collect()
}
