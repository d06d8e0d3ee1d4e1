//! Pareto dominance, frontiers and the cross-algorithm reference frontier.

use std::cmp::Ordering;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::qubo::{ObjectiveVector2, ObjectiveVector3};

/// Absolute tolerance used when comparing real-valued objectives.
pub const OBJECTIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Senses of [`ObjectiveVector3`]: cost is minimized, coverage and faults maximized.
pub const SENSES3: [Sense; 3] = [Sense::Minimize, Sense::Maximize, Sense::Maximize];
/// Senses of [`ObjectiveVector2`]: cost is minimized, failure rate maximized.
pub const SENSES2: [Sense; 2] = [Sense::Minimize, Sense::Maximize];

/// True iff `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64], senses: &[Sense]) -> Result<bool> {
    if a.len() != b.len() || a.len() != senses.len() {
        return Err(Error::Dimension {
            expected: senses.len(),
            actual: if a.len() != senses.len() { a.len() } else { b.len() },
        });
    }
    Ok(dominates_unchecked(a, b, senses))
}

fn dominates_unchecked(a: &[f64], b: &[f64], senses: &[Sense]) -> bool {
    let mut strictly_better = false;
    for ((&x, &y), sense) in a.iter().zip(b).zip(senses) {
        // Gain of `a` over `b` in the improving direction.
        let gain = match sense {
            Sense::Minimize => y - x,
            Sense::Maximize => x - y,
        };
        if gain < -OBJECTIVE_TOLERANCE {
            return false;
        }
        if gain > OBJECTIVE_TOLERANCE {
            strictly_better = true;
        }
    }
    strictly_better
}

fn same_vector(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len()
        && a
            .iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= OBJECTIVE_TOLERANCE)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objectives {
    Three(ObjectiveVector3),
    Two(ObjectiveVector2),
}

impl Objectives {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Objectives::Three(v) => vec![
                v.total_cost,
                v.statement_coverage as f64,
                v.fault_coverage as f64,
            ],
            Objectives::Two(v) => vec![v.total_cost, v.total_failure_rate],
        }
    }

    pub fn senses(&self) -> &'static [Sense] {
        match self {
            Objectives::Three(_) => &SENSES3,
            Objectives::Two(_) => &SENSES2,
        }
    }

    pub fn dimension(&self) -> usize {
        self.senses().len()
    }

    pub fn total_cost(&self) -> f64 {
        match self {
            Objectives::Three(v) => v.total_cost,
            Objectives::Two(v) => v.total_cost,
        }
    }

    pub fn dominates(&self, other: &Objectives) -> bool {
        self.dimension() == other.dimension()
            && dominates_unchecked(&self.values(), &other.values(), self.senses())
    }

    pub fn same_as(&self, other: &Objectives) -> bool {
        same_vector(&self.values(), &other.values())
    }
}

impl fmt::Display for Objectives {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objectives::Three(v) => write!(
                f,
                "{} {} {}",
                v.total_cost, v.statement_coverage, v.fault_coverage
            ),
            Objectives::Two(v) => write!(f, "{} {}", v.total_cost, v.total_failure_rate),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Provenance {
    pub algorithm: String,
    pub run: usize,
}

impl Provenance {
    pub fn new(algorithm: impl Into<String>, run: usize) -> Self {
        Provenance {
            algorithm: algorithm.into(),
            run,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionSolution {
    /// Selected test positions; empty when the solution was read back from a frontier file.
    pub assignment: Vec<bool>,
    pub objectives: Objectives,
    /// Every (algorithm, run) that produced this objective vector.
    pub provenance: Vec<Provenance>,
}

impl SelectionSolution {
    pub fn new(assignment: Vec<bool>, objectives: Objectives, provenance: Provenance) -> Self {
        SelectionSolution {
            assignment,
            objectives,
            provenance: vec![provenance],
        }
    }

    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, &x)| x.then_some(i))
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = vec![provenance];
        self
    }
}

/// A mutually non-dominated set of solutions, sorted by objective vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParetoArchive {
    members: Vec<SelectionSolution>,
}

fn canonical_order(a: &SelectionSolution, b: &SelectionSolution) -> Ordering {
    let (va, vb) = (a.objectives.values(), b.objectives.values());
    va.iter()
        .zip(&vb)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.assignment.cmp(&b.assignment))
        .then_with(|| a.provenance.cmp(&b.provenance))
}

impl ParetoArchive {
    /// Keeps the non-dominated candidates. Candidates with equal objective vectors
    /// collapse into one member carrying all their provenances.
    pub fn from_candidates(candidates: Vec<SelectionSolution>) -> Result<ParetoArchive> {
        if let Some(first) = candidates.first() {
            let dim = first.objectives.dimension();
            if candidates.iter().any(|c| c.objectives.dimension() != dim) {
                return Err(Error::InvalidData(
                    "solutions with different objective dimensionality".into(),
                ));
            }
        }
        let vectors: Vec<Vec<f64>> = candidates.iter().map(|c| c.objectives.values()).collect();
        let senses = candidates.first().map(|c| c.objectives.senses());
        let mut kept: Vec<SelectionSolution> = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                !vectors
                    .iter()
                    .any(|other| dominates_unchecked(other, &vectors[*i], senses.unwrap()))
            })
            .map(|(_, c)| c.clone())
            .collect();
        kept.sort_by(canonical_order);

        let mut members: Vec<SelectionSolution> = Vec::with_capacity(kept.len());
        for candidate in kept {
            match members
                .iter_mut()
                .find(|m| m.objectives.same_as(&candidate.objectives))
            {
                Some(existing) => existing.provenance.extend(candidate.provenance),
                None => members.push(candidate),
            }
        }
        for m in &mut members {
            m.provenance.sort();
            m.provenance.dedup();
        }
        Ok(ParetoArchive { members })
    }

    pub fn members(&self) -> &[SelectionSolution] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_vector(&self, objectives: &Objectives) -> bool {
        self.members.iter().any(|m| m.objectives.same_as(objectives))
    }

    /// One line per (member, provenance): `<algorithm> <run> <objectives...>`.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for m in &self.members {
            for p in &m.provenance {
                writeln!(out, "{} {} {}", p.algorithm, p.run, m.objectives).unwrap();
            }
        }
        out
    }
}

/// Non-dominated filter of the union of all frontiers.
pub fn reference_frontier(frontiers: &[ParetoArchive]) -> Result<ParetoArchive> {
    let union: Vec<SelectionSolution> = frontiers
        .iter()
        .flat_map(|f| f.members.iter().cloned())
        .collect();
    ParetoArchive::from_candidates(union)
}

/// Number of members of `run_frontier` whose objective vector made it into `reference`.
pub fn count_nondominated(run_frontier: &ParetoArchive, reference: &ParetoArchive) -> usize {
    run_frontier
        .members
        .iter()
        .filter(|m| reference.contains_vector(&m.objectives))
        .count()
}

/// Parses frontier lines written by [`ParetoArchive::to_lines`]. Three numeric columns
/// after the provenance mean a three-objective vector, two mean a two-objective one.
pub fn parse_frontier_lines(text: &str) -> Result<Vec<SelectionSolution>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() || fields[0].starts_with('#') {
            continue;
        }
        let bad = |msg: &str| Error::parse("<frontier>", line, msg);
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad("invalid number"));
        let count = |s: &str| s.parse::<usize>().map_err(|_| bad("invalid count"));
        let run = fields
            .get(1)
            .ok_or_else(|| bad("missing run index"))?
            .parse::<usize>()
            .map_err(|_| bad("invalid run index"))?;
        let objectives = match &fields[2..] {
            [cost, cov, faults] => Objectives::Three(ObjectiveVector3 {
                total_cost: num(cost)?,
                statement_coverage: count(cov)?,
                fault_coverage: count(faults)?,
            }),
            [cost, rate] => Objectives::Two(ObjectiveVector2 {
                total_cost: num(cost)?,
                total_failure_rate: num(rate)?,
            }),
            _ => return Err(bad("expected `<algorithm> <run> <objectives...>`")),
        };
        out.push(SelectionSolution::new(
            Vec::new(),
            objectives,
            Provenance::new(fields[0], run),
        ));
    }
    Ok(out)
}

/// Groups solutions into per-(algorithm, run) frontiers, ordered by provenance.
pub fn group_by_run(solutions: Vec<SelectionSolution>) -> Result<Vec<(Provenance, ParetoArchive)>> {
    let mut groups: std::collections::BTreeMap<Provenance, Vec<SelectionSolution>> =
        Default::default();
    for s in solutions {
        for p in &s.provenance {
            groups.entry(p.clone()).or_default().push(s.clone().with_provenance(p.clone()));
        }
    }
    groups
        .into_iter()
        .map(|(p, members)| Ok((p, ParetoArchive::from_candidates(members)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v3(cost: f64, cov: usize, faults: usize) -> Objectives {
        Objectives::Three(ObjectiveVector3 {
            total_cost: cost,
            statement_coverage: cov,
            fault_coverage: faults,
        })
    }

    fn sol(o: Objectives, alg: &str, run: usize) -> SelectionSolution {
        SelectionSolution::new(Vec::new(), o, Provenance::new(alg, run))
    }

    #[test]
    fn dominance_examples() {
        let a = [1.0, 5.0, 2.0];
        assert!(!dominates(&a, &a, &SENSES3).unwrap());
        assert!(dominates(&a, &[2.0, 5.0, 2.0], &SENSES3).unwrap());
        let (x, y) = ([1.0, 4.0], [2.0, 5.0]);
        assert!(!dominates(&x, &y, &SENSES2).unwrap());
        assert!(!dominates(&y, &x, &SENSES2).unwrap());
        assert!(dominates(&[1.0], &[1.0, 2.0], &SENSES2).is_err());
    }

    #[test]
    fn cost_tolerance() {
        assert!(!dominates(&[1.0, 5.0], &[1.0 + 1e-12, 5.0], &SENSES2).unwrap());
        assert!(v3(0.1 + 0.2, 3, 1).same_as(&v3(0.3, 3, 1)));
    }

    #[test]
    fn reference_of_single_archive_is_itself() {
        let a = ParetoArchive::from_candidates(vec![
            sol(v3(1.0, 2, 0), "a", 0),
            sol(v3(2.0, 3, 0), "a", 0),
            sol(v3(3.0, 3, 1), "a", 0),
        ])
        .unwrap();
        assert_eq!(reference_frontier(std::slice::from_ref(&a)).unwrap(), a);
    }

    #[test]
    fn dominated_archive_disappears() {
        let a = ParetoArchive::from_candidates(vec![
            sol(v3(1.0, 5, 2), "a", 0),
            sol(v3(0.5, 5, 1), "a", 0),
        ])
        .unwrap();
        let b = ParetoArchive::from_candidates(vec![
            sol(v3(2.0, 4, 0), "b", 0),
            sol(v3(3.0, 4, 1), "b", 0),
        ])
        .unwrap();
        let r = reference_frontier(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(r, a);
        assert_eq!(count_nondominated(&a, &r), 2);
        assert_eq!(count_nondominated(&b, &r), 0);
    }

    #[test]
    fn duplicates_collapse_but_count_for_everyone() {
        let a = ParetoArchive::from_candidates(vec![sol(v3(1.0, 5, 2), "a", 0)]).unwrap();
        let b = ParetoArchive::from_candidates(vec![sol(v3(1.0, 5, 2), "b", 3)]).unwrap();
        let r = reference_frontier(&[b.clone(), a.clone()]).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(
            r.members()[0].provenance,
            vec![Provenance::new("a", 0), Provenance::new("b", 3)]
        );
        assert_eq!(count_nondominated(&a, &r), 1);
        assert_eq!(count_nondominated(&b, &r), 1);
    }

    #[test]
    fn mixed_dimensionality_is_rejected() {
        let a = ParetoArchive::from_candidates(vec![sol(v3(1.0, 5, 2), "a", 0)]).unwrap();
        let b = ParetoArchive::from_candidates(vec![sol(
            Objectives::Two(ObjectiveVector2 {
                total_cost: 1.0,
                total_failure_rate: 0.5,
            }),
            "b",
            0,
        )])
        .unwrap();
        assert!(reference_frontier(&[a, b]).is_err());
    }

    // A run frontier of 567 mutually non-dominated members, 205 of which survive into
    // the reference frontier, is counted as 205.
    #[test]
    fn flex_scale_bookkeeping() {
        let run: Vec<SelectionSolution> = (0..567)
            .map(|i| sol(v3(i as f64, i, 0), "greedy", 0))
            .collect();
        let run = ParetoArchive::from_candidates(run).unwrap();
        assert_eq!(run.len(), 567);
        // Another algorithm finds strictly better faults for the first 362 coverage levels.
        let other: Vec<SelectionSolution> = (0..362)
            .map(|i| sol(v3(i as f64, i, 1), "selectqa", 0))
            .collect();
        let other = ParetoArchive::from_candidates(other).unwrap();
        let reference = reference_frontier(&[run.clone(), other.clone()]).unwrap();
        assert_eq!(count_nondominated(&run, &reference), 205);
        assert_eq!(count_nondominated(&other, &reference), 362);
    }

    #[test]
    fn frontier_lines_round_trip() {
        let a = ParetoArchive::from_candidates(vec![
            sol(v3(0.25, 4, 1), "selectqa", 2),
            sol(v3(0.75, 6, 1), "selectqa", 2),
        ])
        .unwrap();
        let text = a.to_lines();
        assert_eq!(text, "selectqa 2 0.25 4 1\nselectqa 2 0.75 6 1\n");
        let groups = group_by_run(parse_frontier_lines(&text).unwrap()).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].1, a);
        assert!(parse_frontier_lines("a x 1 2 3").is_err());
    }
}
