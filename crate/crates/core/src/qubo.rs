//! QUBO construction for test case selection and energy evaluation.
//!
//! Variable `i` selects test case `i` of the suite. The three-objective model is
//!
//! ```text
//! H(x) = α Σ cost_i x_i − (1 − α) Σ e_i x_i + P Σ_k (Σ_{i ∈ T_k} x_i − 1)²
//! ```
//!
//! expanded under `x² = x`: each statement contributes `−P` to the linear term of every
//! covering test, `+2P` to every unordered pair of covering tests, and `+P` to the offset.
//! The offset is kept so that energies equal the unexpanded penalty form exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::suite::{NormalizedCosts, TestSuite};

pub const DEFAULT_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    num_vars: usize,
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
    /// Weight given to the cost objective when the model was built.
    pub alpha: f64,
    /// Penalty weight on the coverage constraints, 0 when there are none.
    pub penalty: f64,
}

impl QuboModel {
    pub fn new(num_vars: usize) -> Self {
        QuboModel {
            num_vars,
            linear: vec![0.0; num_vars],
            quadratic: BTreeMap::new(),
            offset: 0.0,
            alpha: DEFAULT_ALPHA,
            penalty: 0.0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    /// Pairwise coefficients keyed by `(i, j)` with `i < j`.
    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn add_offset(&mut self, v: f64) {
        self.offset += v;
    }

    pub fn add_linear(&mut self, i: usize, v: f64) {
        assert!(i < self.num_vars, "variable {i} out of range");
        self.linear[i] += v;
    }

    /// Adds `v·x_i·x_j`. A diagonal term folds into the linear part.
    pub fn add_quadratic(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.num_vars && j < self.num_vars, "variable out of range");
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.linear[i] += v,
            std::cmp::Ordering::Less => *self.quadratic.entry((i, j)).or_insert(0.0) += v,
            std::cmp::Ordering::Greater => *self.quadratic.entry((j, i)).or_insert(0.0) += v,
        }
    }

    pub fn energy(&self, assignment: &[bool]) -> Result<f64> {
        if assignment.len() != self.num_vars {
            return Err(Error::Dimension {
                expected: self.num_vars,
                actual: assignment.len(),
            });
        }
        let mut e = self.offset;
        for (&c, &x) in self.linear.iter().zip(assignment) {
            if x {
                e += c;
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if assignment[i] && assignment[j] {
                e += c;
            }
        }
        Ok(e)
    }

    /// Symmetric neighbour lists `(j, Q_ij)` for every variable.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.num_vars];
        for (&(i, j), &c) in &self.quadratic {
            adj[i].push((j, c));
            adj[j].push((i, c));
        }
        adj
    }

    /// Serializes the model as `offset`, `lin` and `quad` lines. Every variable gets a
    /// `lin` line so the variable count survives a round trip.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# alpha {}", self.alpha).unwrap();
        writeln!(out, "# penalty {}", self.penalty).unwrap();
        writeln!(out, "offset {}", self.offset).unwrap();
        for (i, c) in self.linear.iter().enumerate() {
            writeln!(out, "lin {i} {c}").unwrap();
        }
        for (&(i, j), c) in &self.quadratic {
            writeln!(out, "quad {i} {j} {c}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<QuboModel> {
        let bad = |line: usize, msg: &str| Error::parse("<qubo>", line, msg);
        let mut offset = 0.0;
        let mut alpha = DEFAULT_ALPHA;
        let mut penalty = 0.0;
        let mut lin = Vec::new();
        let mut quad = Vec::new();
        let mut num_vars = 0;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let fields: Vec<&str> = raw.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(line, "invalid number"));
            let idx = |s: &str| s.parse::<usize>().map_err(|_| bad(line, "invalid index"));
            match fields.as_slice() {
                [] => {}
                ["#", "alpha", v] => alpha = num(v)?,
                ["#", "penalty", v] => penalty = num(v)?,
                [first, ..] if first.starts_with('#') => {}
                ["offset", v] => offset += num(v)?,
                ["lin", i, v] => {
                    let i = idx(i)?;
                    num_vars = num_vars.max(i + 1);
                    lin.push((i, num(v)?));
                }
                ["quad", i, j, v] => {
                    let (i, j) = (idx(i)?, idx(j)?);
                    num_vars = num_vars.max(i.max(j) + 1);
                    quad.push((i, j, num(v)?));
                }
                _ => return Err(bad(line, "expected `offset <v>`, `lin <i> <v>` or `quad <i> <j> <v>`")),
            }
        }
        let mut model = QuboModel::new(num_vars);
        model.offset = offset;
        model.alpha = alpha;
        model.penalty = penalty;
        for (i, v) in lin {
            model.add_linear(i, v);
        }
        for (i, j, v) in quad {
            model.add_quadratic(i, j, v);
        }
        Ok(model)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

fn check_costs(suite: &TestSuite, costs: &NormalizedCosts) -> Result<()> {
    if costs.len() != suite.len() {
        return Err(Error::Dimension {
            expected: suite.len(),
            actual: costs.len(),
        });
    }
    Ok(())
}

/// Penalty one above the largest magnitude the unconstrained objective can reach.
pub fn penalty_upper_bound(suite: &TestSuite, costs: &NormalizedCosts, alpha: f64) -> f64 {
    let cost_sum: f64 = costs.values.iter().sum();
    let fault_sum = suite.cases().iter().filter(|c| c.fault_flag).count() as f64;
    alpha * cost_sum + (1.0 - alpha) * fault_sum + 1.0
}

pub fn build_three_objective_qubo(
    suite: &TestSuite,
    costs: &NormalizedCosts,
    alpha: f64,
    penalty: Option<f64>,
) -> Result<QuboModel> {
    check_alpha(alpha)?;
    check_costs(suite, costs)?;
    let penalty = match penalty {
        Some(p) if p > 0.0 && p.is_finite() => p,
        Some(p) => return Err(Error::Parameter(format!("penalty must be positive, got {p}"))),
        None => penalty_upper_bound(suite, costs, alpha),
    };

    let mut model = QuboModel::new(suite.len());
    model.alpha = alpha;
    model.penalty = penalty;
    for (i, case) in suite.cases().iter().enumerate() {
        let fault = if case.fault_flag { 1.0 } else { 0.0 };
        model.add_linear(i, alpha * costs.values[i] - (1.0 - alpha) * fault);
    }
    for members in suite.coverage_index().values() {
        model.add_offset(penalty);
        for (a, &i) in members.iter().enumerate() {
            model.add_linear(i, -penalty);
            for &j in &members[a + 1..] {
                model.add_quadratic(i, j, 2.0 * penalty);
            }
        }
    }
    Ok(model)
}

pub fn build_two_objective_qubo(
    suite: &TestSuite,
    costs: &NormalizedCosts,
    alpha: f64,
) -> Result<QuboModel> {
    check_alpha(alpha)?;
    check_costs(suite, costs)?;
    let mut model = QuboModel::new(suite.len());
    model.alpha = alpha;
    for (i, case) in suite.cases().iter().enumerate() {
        let rate = case.failure_rate.ok_or_else(|| {
            Error::InvalidData(format!("test {} has no failure rate", case.label))
        })?;
        model.add_linear(i, alpha * costs.values[i] - (1.0 - alpha) * rate);
    }
    Ok(model)
}

/// Cost, statement coverage and past-fault coverage of a selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveVector3 {
    pub total_cost: f64,
    pub statement_coverage: usize,
    pub fault_coverage: usize,
}

/// Cost and accumulated failure rate of a selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveVector2 {
    pub total_cost: f64,
    pub total_failure_rate: f64,
}

fn check_assignment(suite: &TestSuite, costs: &NormalizedCosts, assignment: &[bool]) -> Result<()> {
    check_costs(suite, costs)?;
    if assignment.len() != suite.len() {
        return Err(Error::Dimension {
            expected: suite.len(),
            actual: assignment.len(),
        });
    }
    Ok(())
}

pub fn evaluate_objectives3(
    suite: &TestSuite,
    costs: &NormalizedCosts,
    assignment: &[bool],
) -> Result<ObjectiveVector3> {
    check_assignment(suite, costs, assignment)?;
    let mut total_cost = 0.0;
    let mut fault_coverage = 0;
    for (i, case) in suite.cases().iter().enumerate() {
        if assignment[i] {
            total_cost += costs.values[i];
            fault_coverage += usize::from(case.fault_flag);
        }
    }
    let statement_coverage = suite
        .coverage_index()
        .values()
        .filter(|members| members.iter().any(|&i| assignment[i]))
        .count();
    Ok(ObjectiveVector3 {
        total_cost,
        statement_coverage,
        fault_coverage,
    })
}

pub fn evaluate_objectives2(
    suite: &TestSuite,
    costs: &NormalizedCosts,
    assignment: &[bool],
) -> Result<ObjectiveVector2> {
    check_assignment(suite, costs, assignment)?;
    let mut total_cost = 0.0;
    let mut total_failure_rate = 0.0;
    for (i, case) in suite.cases().iter().enumerate() {
        if assignment[i] {
            total_cost += costs.values[i];
            total_failure_rate += case.failure_rate.ok_or_else(|| {
                Error::InvalidData(format!("test {} has no failure rate", case.label))
            })?;
        }
    }
    Ok(ObjectiveVector2 {
        total_cost,
        total_failure_rate,
    })
}
