use super::SampleSet;
use crate::error::{Error, Result};
use crate::qubo::QuboModel;

pub const EXACT_VAR_LIMIT: usize = 24;

/// Enumerates every assignment in Gray-code order and returns all global minima.
pub fn solve_exact(model: &QuboModel) -> Result<SampleSet> {
    let n = model.num_vars();
    if n > EXACT_VAR_LIMIT {
        return Err(Error::Capacity {
            vars: n,
            limit: EXACT_VAR_LIMIT,
        });
    }
    if n == 0 {
        return SampleSet::from_reads(model, vec![Vec::new()]);
    }

    let adjacency = model.adjacency();
    let scale = 1.0
        + model.offset().abs()
        + model.linear().iter().map(|c| c.abs()).sum::<f64>()
        + model.quadratic().values().map(|c| c.abs()).sum::<f64>();
    // Incremental updates drift; candidates are re-evaluated exactly below.
    let slack = 1e-9 * scale;

    let mut state = 0u32;
    let mut field = model.linear().to_vec();
    let mut energy = 0.0;
    let mut min = 0.0;
    let mut candidates = vec![0u32];
    for step in 1u64..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        let on = state & (1 << i) != 0;
        energy += if on { -field[i] } else { field[i] };
        state ^= 1 << i;
        let sign = if on { -1.0 } else { 1.0 };
        for &(j, c) in &adjacency[i] {
            field[j] += sign * c;
        }
        if energy < min - slack {
            min = energy;
            candidates.clear();
            candidates.push(state);
        } else if energy <= min + slack {
            candidates.push(state);
        }
    }

    let decode = |mask: u32| (0..n).map(|b| mask & (1 << b) != 0).collect::<Vec<bool>>();
    let evaluated: Vec<(Vec<bool>, f64)> = candidates
        .into_iter()
        .map(|mask| {
            let a = decode(mask);
            let e = model.energy(&a)?;
            Ok((a, e))
        })
        .collect::<Result<_>>()?;
    let exact_min = evaluated
        .iter()
        .map(|(_, e)| *e)
        .fold(f64::INFINITY, f64::min);
    let ground: Vec<Vec<bool>> = evaluated
        .into_iter()
        .filter(|(_, e)| *e <= exact_min + 1e-9)
        .map(|(a, _)| a)
        .collect();
    SampleSet::from_reads(model, ground)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_min(model: &QuboModel) -> f64 {
        let n = model.num_vars();
        (0..1u32 << n)
            .map(|m| {
                let a: Vec<bool> = (0..n).map(|b| m & (1 << b) != 0).collect();
                model.energy(&a).unwrap()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn empty_model_has_one_empty_ground_state() {
        let mut model = QuboModel::new(0);
        model.add_offset(3.5);
        let set = solve_exact(&model).unwrap();
        assert_eq!(set.len(), 1);
        assert!(set.best().unwrap().assignment.is_empty());
        assert_eq!(set.lowest_energy(), Some(3.5));
    }

    #[test]
    fn all_ties_are_returned() {
        let model = QuboModel::new(4);
        assert_eq!(solve_exact(&model).unwrap().len(), 16);
    }

    #[test]
    fn matches_direct_enumeration() {
        let mut model = QuboModel::new(5);
        let lin = [0.3, -1.2, 0.7, -0.4, 0.1];
        for (i, c) in lin.iter().enumerate() {
            model.add_linear(i, *c);
        }
        model.add_quadratic(0, 1, 0.9);
        model.add_quadratic(1, 3, 1.5);
        model.add_quadratic(2, 4, -0.6);
        model.add_quadratic(0, 4, -0.2);
        let set = solve_exact(&model).unwrap();
        assert!((set.lowest_energy().unwrap() - brute_min(&model)).abs() < 1e-12);
    }

    #[test]
    fn capacity_guard() {
        let model = QuboModel::new(EXACT_VAR_LIMIT + 1);
        assert!(matches!(solve_exact(&model), Err(Error::Capacity { .. })));
    }
}
