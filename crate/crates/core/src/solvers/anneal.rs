use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::SampleSet;
use crate::error::{Error, Result};
use crate::qubo::QuboModel;

/// Simulated annealing parameters. With `beta_range` unset the schedule is derived
/// from the model by [`default_beta_range`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealConfig {
    pub num_reads: usize,
    pub sweeps: usize,
    pub beta_range: Option<(f64, f64)>,
    pub seed: u64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            num_reads: 100,
            sweeps: 1000,
            beta_range: None,
            seed: 0,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_reads == 0 || self.sweeps == 0 {
            return Err(Error::Parameter("reads and sweeps must be at least 1".into()));
        }
        if let Some((hot, cold)) = self.beta_range {
            if !(hot > 0.0 && cold >= hot && cold.is_finite()) {
                return Err(Error::Parameter(format!(
                    "beta range ({hot}, {cold}) must satisfy 0 < initial <= final"
                )));
            }
        }
        Ok(())
    }
}

/// Inverse temperatures at which the largest possible single-flip energy increase is
/// accepted with probability 1/2 at the start, and the smallest nonzero coefficient is
/// accepted with probability 1e-4 at the end.
pub fn default_beta_range(model: &QuboModel) -> (f64, f64) {
    let mut worst = vec![0.0_f64; model.num_vars()];
    let mut smallest = f64::INFINITY;
    for (i, &c) in model.linear().iter().enumerate() {
        worst[i] += c.abs();
        if c != 0.0 {
            smallest = smallest.min(c.abs());
        }
    }
    for (&(i, j), &c) in model.quadratic() {
        worst[i] += c.abs();
        worst[j] += c.abs();
        if c != 0.0 {
            smallest = smallest.min(c.abs());
        }
    }
    let worst = worst.into_iter().fold(0.0_f64, f64::max);
    if worst == 0.0 {
        return (1.0, 1.0);
    }
    let hot = std::f64::consts::LN_2 / worst;
    let cold = (1e4_f64).ln() / smallest;
    (hot, cold.max(hot))
}

fn schedule(hot: f64, cold: f64, sweeps: usize) -> Vec<f64> {
    if sweeps == 1 {
        return vec![cold];
    }
    let ratio = (cold / hot).powf(1.0 / (sweeps - 1) as f64);
    let mut betas = Vec::with_capacity(sweeps);
    let mut beta = hot;
    for _ in 0..sweeps {
        betas.push(beta);
        beta *= ratio;
    }
    betas
}

fn anneal_read(
    model: &QuboModel,
    adjacency: &[Vec<(usize, f64)>],
    betas: &[f64],
    seed: u64,
    read: usize,
) -> Vec<bool> {
    let n = model.num_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(read as u64);

    let mut state: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    // field[i] = linear[i] + Σ_j Q_ij x_j, so flipping i changes the energy by ±field[i].
    let mut field = model.linear().to_vec();
    for (i, neighbours) in adjacency.iter().enumerate() {
        for &(j, c) in neighbours {
            if state[j] {
                field[i] += c;
            }
        }
    }
    let mut energy = 0.0;
    let mut best_energy = energy;
    let mut best = state.clone();

    for &beta in betas {
        for i in 0..n {
            let delta = if state[i] { -field[i] } else { field[i] };
            let accept = delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp();
            if !accept {
                continue;
            }
            state[i] = !state[i];
            energy += delta;
            let sign = if state[i] { 1.0 } else { -1.0 };
            for &(j, c) in &adjacency[i] {
                field[j] += sign * c;
            }
            if energy < best_energy - 1e-12 {
                best_energy = energy;
                best.copy_from_slice(&state);
            }
        }
    }
    best
}

/// Runs `num_reads` independent single-flip Metropolis chains over a geometric
/// inverse-temperature schedule and returns the lowest state each chain visited.
/// Read `r` draws from stream `r` of a ChaCha generator seeded with `config.seed`,
/// so the result does not depend on how reads are scheduled across threads.
pub fn solve_sa(model: &QuboModel, config: &AnnealConfig) -> Result<SampleSet> {
    config.validate()?;
    if model.num_vars() == 0 {
        return SampleSet::from_reads(model, vec![Vec::new(); config.num_reads]);
    }
    let (hot, cold) = config
        .beta_range
        .unwrap_or_else(|| default_beta_range(model));
    let betas = schedule(hot, cold, config.sweeps);
    let adjacency = model.adjacency();
    let reads: Vec<Vec<bool>> = (0..config.num_reads)
        .into_par_iter()
        .map(|r| anneal_read(model, &adjacency, &betas, config.seed, r))
        .collect();
    SampleSet::from_reads(model, reads)
}
