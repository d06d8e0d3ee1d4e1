mod common;

use common::*;
use proptest::prelude::*;
use tsq_core::pareto::SENSES3;
use tsq_core::*;

fn archive_strategy() -> impl Strategy<Value = Vec<Vec<(u8, u8, u8)>>> {
    // Small integer grids make duplicates and ties frequent.
    prop::collection::vec(prop::collection::vec((0u8..8, 0u8..6, 0u8..4), 0..12), 1..5)
}

fn to_archives(raw: &[Vec<(u8, u8, u8)>]) -> Vec<ParetoArchive> {
    raw.iter()
        .enumerate()
        .map(|(run, members)| {
            let solutions = members
                .iter()
                .map(|&(c, k, f)| {
                    SelectionSolution::new(
                        Vec::new(),
                        Objectives::Three(ObjectiveVector3 {
                            total_cost: c as f64 * 0.125,
                            statement_coverage: k as usize,
                            fault_coverage: f as usize,
                        }),
                        Provenance::new("alg", run),
                    )
                })
                .collect();
            ParetoArchive::from_candidates(solutions).unwrap()
        })
        .collect()
}

fn vectors(a: &ParetoArchive) -> Vec<Vec<f64>> {
    let mut v: Vec<Vec<f64>> = a.members().iter().map(|m| m.objectives.values()).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

proptest! {
    #[test]
    fn reference_matches_pairwise_filter(raw in archive_strategy()) {
        let archives = to_archives(&raw);
        let reference = reference_frontier(&archives).unwrap();
        let union: Vec<Vec<f64>> = archives.iter().flat_map(|a| a.members().iter().map(|m| m.objectives.values())).collect();
        prop_assert_eq!(vectors(&reference), oracle_front(&union, &SENSES3));
        for a in &archives {
            prop_assert!(count_nondominated(a, &reference) <= a.len());
        }
    }

    #[test]
    fn reference_is_idempotent_and_order_free(raw in archive_strategy()) {
        let archives = to_archives(&raw);
        let once = reference_frontier(&archives).unwrap();
        let twice = reference_frontier(std::slice::from_ref(&once)).unwrap();
        prop_assert_eq!(&twice, &once);
        let mut reversed = archives.clone();
        reversed.reverse();
        prop_assert_eq!(reference_frontier(&reversed).unwrap(), once);
    }

    #[test]
    fn retained_provenance_covers_every_duplicate(raw in archive_strategy()) {
        let archives = to_archives(&raw);
        let reference = reference_frontier(&archives).unwrap();
        for (run, a) in archives.iter().enumerate() {
            for m in a.members() {
                if let Some(r) = reference.members().iter().find(|r| r.objectives.same_as(&m.objectives)) {
                    prop_assert!(r.provenance.contains(&Provenance::new("alg", run)));
                }
            }
        }
    }
}
