//! Synthetic suites for the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsq_core::{TestCase, TestSuite};

/// Suite of `tests` cases over `statements` statements, each case covering a statement
/// with probability `density`.
pub fn coverage_suite(tests: usize, statements: u64, density: f64, seed: u64) -> TestSuite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = (0..tests)
        .map(|i| {
            let covered: Vec<u64> = (0..statements).filter(|_| rng.gen_bool(density)).collect();
            TestCase::new(i as u64, rng.gen_range(1.0..100.0))
                .with_fault(rng.gen_bool(0.3))
                .with_coverage(covered)
        })
        .collect();
    TestSuite::new(cases).expect("generated suite is valid")
}

/// Time/failure-rate suite with strictly positive rates.
pub fn rate_suite(tests: usize, seed: u64) -> TestSuite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = (0..tests)
        .map(|i| {
            TestCase::new(i as u64, rng.gen_range(0.1..60.0)).with_failure_rate(rng.gen_range(0.01..1.0))
        })
        .collect();
    TestSuite::new(cases).expect("generated suite is valid")
}
