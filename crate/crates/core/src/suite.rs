//! Test suites, dataset ingestion and cost normalization.
//!
//! Two on-disk layouts are supported:
//!
//! * three-objective datasets split over a coverage file (`<test_id>: <s1> <s2> ...`),
//!   a cost file (`test_id,raw_cost`) and a fault file (`test_id,fault_id`);
//! * two-objective datasets in a single CSV with header
//!   `id,time,rate[,rate_unit=percent|fraction]`.
//!
//! Test ids in the files are opaque labels. Inside a [`TestSuite`] every case is
//! addressed by its position, which doubles as the QUBO variable index.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub type StatementId = u64;

#[derive(Debug, Clone, PartialEq)]
pub struct TestCase {
    /// Position in the owning suite.
    pub id: usize,
    /// Identifier used in the dataset files.
    pub label: u64,
    pub raw_cost: f64,
    pub fault_flag: bool,
    /// Fraction in `[0, 1]`; only two-objective datasets carry it.
    pub failure_rate: Option<f64>,
    pub covered_statements: BTreeSet<StatementId>,
}

impl TestCase {
    pub fn new(label: u64, raw_cost: f64) -> Self {
        TestCase {
            id: 0,
            label,
            raw_cost,
            fault_flag: false,
            failure_rate: None,
            covered_statements: BTreeSet::new(),
        }
    }

    pub fn with_fault(mut self, fault: bool) -> Self {
        self.fault_flag = fault;
        self
    }

    pub fn with_failure_rate(mut self, rate: f64) -> Self {
        self.failure_rate = Some(rate);
        self
    }

    pub fn with_coverage(mut self, statements: impl IntoIterator<Item = StatementId>) -> Self {
        self.covered_statements = statements.into_iter().collect();
        self
    }
}

/// An ordered test suite with its statement coverage index.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSuite {
    cases: Vec<TestCase>,
    statement_universe: BTreeSet<StatementId>,
    coverage_index: BTreeMap<StatementId, Vec<usize>>,
}

impl TestSuite {
    /// Builds a suite, renumbering cases by position and indexing coverage.
    pub fn new(mut cases: Vec<TestCase>) -> Result<Self> {
        let mut labels = HashMap::with_capacity(cases.len());
        let mut coverage_index: BTreeMap<StatementId, Vec<usize>> = BTreeMap::new();
        for (pos, case) in cases.iter_mut().enumerate() {
            if !(case.raw_cost.is_finite() && case.raw_cost >= 0.0) {
                return Err(Error::InvalidData(format!(
                    "test {} has cost {}, expected a finite nonnegative value",
                    case.label, case.raw_cost
                )));
            }
            if let Some(rate) = case.failure_rate {
                if !(0.0..=1.0).contains(&rate) {
                    return Err(Error::InvalidData(format!(
                        "test {} has failure rate {rate}, expected a fraction in [0, 1]",
                        case.label
                    )));
                }
            }
            if labels.insert(case.label, pos).is_some() {
                return Err(Error::Consistency(format!("duplicate test id {}", case.label)));
            }
            case.id = pos;
            for &k in &case.covered_statements {
                coverage_index.entry(k).or_default().push(pos);
            }
        }
        let statement_universe = coverage_index.keys().copied().collect();
        Ok(TestSuite {
            cases,
            statement_universe,
            coverage_index,
        })
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn cases(&self) -> &[TestCase] {
        &self.cases
    }

    pub fn case(&self, i: usize) -> &TestCase {
        &self.cases[i]
    }

    /// Statements covered by at least one case.
    pub fn statement_universe(&self) -> &BTreeSet<StatementId> {
        &self.statement_universe
    }

    /// Statement id to the positions of the cases that cover it. Every list is
    /// nonempty and sorted.
    pub fn coverage_index(&self) -> &BTreeMap<StatementId, Vec<usize>> {
        &self.coverage_index
    }

    pub fn has_failure_rates(&self) -> bool {
        self.cases.iter().all(|c| c.failure_rate.is_some())
    }

    /// Sub-suite made of the given positions, in the given order.
    pub fn subset(&self, positions: &[usize]) -> Result<TestSuite> {
        let cases = positions
            .iter()
            .map(|&p| {
                self.cases.get(p).cloned().ok_or_else(|| {
                    Error::Parameter(format!("position {p} outside suite of {}", self.len()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TestSuite::new(cases)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizationMode {
    MaxDivide,
}

/// Per-case execution costs scaled into `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedCosts {
    pub values: Vec<f64>,
    pub mode: NormalizationMode,
}

impl NormalizedCosts {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn restrict(&self, positions: &[usize]) -> NormalizedCosts {
        NormalizedCosts {
            values: positions.iter().map(|&p| self.values[p]).collect(),
            mode: self.mode,
        }
    }
}

/// Divides every raw cost by the largest one. All-zero suites map to zeros.
pub fn normalize_costs(suite: &TestSuite) -> Result<NormalizedCosts> {
    if suite.is_empty() {
        return Err(Error::InvalidData(
            "cannot normalize the costs of an empty suite".into(),
        ));
    }
    let max = suite
        .cases()
        .iter()
        .map(|c| c.raw_cost)
        .fold(0.0_f64, f64::max);
    let values = suite
        .cases()
        .iter()
        .map(|c| if max > 0.0 { c.raw_cost / max } else { 0.0 })
        .collect();
    Ok(NormalizedCosts {
        values,
        mode: NormalizationMode::MaxDivide,
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Content lines with their 1-based line numbers. Blank lines and `#` comments are skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn looks_like_header(line: &str) -> bool {
    line.chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic())
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: usize, field: &str, what: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::parse(path, line, format!("invalid {what} `{}`", field.trim())))
}

fn split_pair<'a>(path: &Path, line: usize, text: &'a str) -> Result<(&'a str, &'a str)> {
    let mut fields = text.split(',');
    match (fields.next(), fields.next(), fields.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(Error::parse(path, line, "expected two comma-separated fields")),
    }
}

/// Loads a three-objective dataset. Cases follow the order of the coverage file.
pub fn load_three_objective_dataset(
    coverage_path: &Path,
    cost_path: &Path,
    fault_path: &Path,
) -> Result<TestSuite> {
    let mut cases = Vec::new();
    let mut position = HashMap::new();
    for (line, text) in content_lines(&read(coverage_path)?) {
        let (id, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::parse(coverage_path, line, "expected `<test_id>: <statements>`"))?;
        let label: u64 = parse_field(coverage_path, line, id, "test id")?;
        let statements = rest
            .split_whitespace()
            .map(|s| parse_field(coverage_path, line, s, "statement id"))
            .collect::<Result<BTreeSet<StatementId>>>()?;
        if position.insert(label, cases.len()).is_some() {
            return Err(Error::parse(
                coverage_path,
                line,
                format!("duplicate test id {label}"),
            ));
        }
        cases.push(TestCase::new(label, 0.0).with_coverage(statements));
    }

    let mut costed = vec![false; cases.len()];
    for (idx, (line, text)) in content_lines(&read(cost_path)?).enumerate() {
        if idx == 0 && looks_like_header(text) {
            continue;
        }
        let (id, cost) = split_pair(cost_path, line, text)?;
        let label: u64 = parse_field(cost_path, line, id, "test id")?;
        let cost: f64 = parse_field(cost_path, line, cost, "cost")?;
        if !(cost.is_finite() && cost >= 0.0) {
            return Err(Error::parse(cost_path, line, format!("negative or non-finite cost {cost}")));
        }
        let &pos = position.get(&label).ok_or_else(|| {
            Error::Consistency(format!(
                "{}:{line}: test id {label} does not appear in the coverage file",
                cost_path.display()
            ))
        })?;
        if std::mem::replace(&mut costed[pos], true) {
            return Err(Error::parse(cost_path, line, format!("duplicate cost for test id {label}")));
        }
        cases[pos].raw_cost = cost;
    }
    if let Some(pos) = costed.iter().position(|c| !c) {
        return Err(Error::Consistency(format!(
            "test id {} has no entry in {}",
            cases[pos].label,
            cost_path.display()
        )));
    }

    for (idx, (line, text)) in content_lines(&read(fault_path)?).enumerate() {
        if idx == 0 && looks_like_header(text) {
            continue;
        }
        let (id, fault) = split_pair(fault_path, line, text)?;
        let label: u64 = parse_field(fault_path, line, id, "test id")?;
        let _: u64 = parse_field(fault_path, line, fault, "fault id")?;
        let &pos = position.get(&label).ok_or_else(|| {
            Error::Consistency(format!(
                "{}:{line}: test id {label} does not appear in the coverage file",
                fault_path.display()
            ))
        })?;
        cases[pos].fault_flag = true;
    }

    TestSuite::new(cases)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateUnit {
    Percent,
    Fraction,
}

/// Loads a two-objective (time, failure rate) CSV. Rates are stored as fractions.
/// The header may declare `rate_unit=percent`; the default unit is a fraction.
pub fn load_two_objective_dataset(csv_path: &Path, drop_zero_rate: bool) -> Result<TestSuite> {
    let text = read(csv_path)?;
    let mut lines = content_lines(&text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(csv_path, 1, "missing header `id,time,rate`"))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let unit = match columns.as_slice() {
        ["id", "time", "rate"] => RateUnit::Fraction,
        ["id", "time", "rate", unit] => match *unit {
            "rate_unit=percent" => RateUnit::Percent,
            "rate_unit=fraction" => RateUnit::Fraction,
            other => {
                return Err(Error::parse(csv_path, hline, format!("unknown rate unit `{other}`")))
            }
        },
        _ => {
            return Err(Error::parse(
                csv_path,
                hline,
                "expected header `id,time,rate[,rate_unit=percent|fraction]`",
            ))
        }
    };
    let scale = match unit {
        RateUnit::Percent => 100.0,
        RateUnit::Fraction => 1.0,
    };

    let mut cases = Vec::new();
    for (line, row) in lines {
        let fields: Vec<&str> = row.split(',').collect();
        let [id, time, rate] = fields.as_slice() else {
            return Err(Error::parse(csv_path, line, "expected three fields `id,time,rate`"));
        };
        let label: u64 = parse_field(csv_path, line, id, "test id")?;
        let time: f64 = parse_field(csv_path, line, time, "time")?;
        let rate: f64 = parse_field(csv_path, line, rate, "rate")?;
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::InvalidData(format!(
                "{}:{line}: negative or non-finite time {time}",
                csv_path.display()
            )));
        }
        if !(0.0..=scale).contains(&rate) {
            return Err(Error::InvalidData(format!(
                "{}:{line}: rate {rate} outside [0, {scale}]",
                csv_path.display()
            )));
        }
        if drop_zero_rate && rate == 0.0 {
            continue;
        }
        let fraction = rate / scale;
        cases.push(
            TestCase::new(label, time)
                .with_failure_rate(fraction)
                .with_fault(fraction > 0.0),
        );
    }
    TestSuite::new(cases)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes the three files read by [`load_three_objective_dataset`]. Fault history is
/// collapsed to a single fault id per flagged test.
pub fn write_three_objective_dataset(
    suite: &TestSuite,
    coverage_path: &Path,
    cost_path: &Path,
    fault_path: &Path,
) -> Result<()> {
    let mut coverage = String::new();
    let mut costs = String::new();
    let mut faults = String::new();
    for case in suite.cases() {
        write!(coverage, "{}:", case.label).unwrap();
        for s in &case.covered_statements {
            write!(coverage, " {s}").unwrap();
        }
        coverage.push('\n');
        writeln!(costs, "{},{}", case.label, case.raw_cost).unwrap();
        if case.fault_flag {
            writeln!(faults, "{},0", case.label).unwrap();
        }
    }
    write(coverage_path, &coverage)?;
    write(cost_path, &costs)?;
    write(fault_path, &faults)
}

/// Writes a two-objective CSV with fractional rates.
pub fn write_two_objective_dataset(suite: &TestSuite, csv_path: &Path) -> Result<()> {
    let mut out = String::from("id,time,rate,rate_unit=fraction\n");
    for case in suite.cases() {
        let rate = case.failure_rate.ok_or_else(|| {
            Error::InvalidData(format!("test {} has no failure rate", case.label))
        })?;
        writeln!(out, "{},{},{}", case.label, case.raw_cost, rate).unwrap();
    }
    write(csv_path, &out)
}
