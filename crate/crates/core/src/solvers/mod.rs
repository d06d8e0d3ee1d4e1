//! Solvers producing test selections from a suite or a QUBO model.

mod anneal;
mod bootstrap;
mod exact;
mod greedy;

pub use anneal::{default_beta_range, solve_sa, AnnealConfig};
pub use bootstrap::{bootstrap_solve, BootstrapConfig, BootstrapOutcome};
pub use exact::{solve_exact, EXACT_VAR_LIMIT};
pub use greedy::{additional_greedy, extract_archive, IncrementalFrontier, SCORE_EPSILON};

use crate::error::Result;
use crate::qubo::QuboModel;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub assignment: Vec<bool>,
    pub energy: f64,
    pub multiplicity: usize,
}

/// Distinct assignments with their energies, lowest energy first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleSet {
    samples: Vec<Sample>,
}

impl SampleSet {
    /// Aggregates raw reads, evaluating each distinct assignment against `model`.
    pub fn from_reads(model: &QuboModel, mut reads: Vec<Vec<bool>>) -> Result<SampleSet> {
        reads.sort();
        let mut samples: Vec<Sample> = Vec::new();
        for read in reads {
            match samples.last_mut() {
                Some(last) if last.assignment == read => last.multiplicity += 1,
                _ => {
                    let energy = model.energy(&read)?;
                    samples.push(Sample {
                        assignment: read,
                        energy,
                        multiplicity: 1,
                    });
                }
            }
        }
        samples.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then_with(|| a.assignment.cmp(&b.assignment))
        });
        Ok(SampleSet { samples })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn best(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn lowest_energy(&self) -> Option<f64> {
        self.best().map(|s| s.energy)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn total_reads(&self) -> usize {
        self.samples.iter().map(|s| s.multiplicity).sum()
    }
}

/// Mixes a base seed with an index into an independent 64-bit seed (SplitMix64 finalizer).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(index.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
