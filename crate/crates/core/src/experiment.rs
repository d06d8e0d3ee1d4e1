//! Batch experiments: repeated runs per algorithm, frontier assembly, counting and
//! statistics, written to a fixed set of text files.
//!
//! Everything written except `timing.txt` is a pure function of the configuration and
//! the input files. Run `r` uses seed `master_seed + r`; jobs run concurrently and are
//! reassembled in (algorithm, run) order.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pareto::{count_nondominated, reference_frontier, ParetoArchive, Provenance, SelectionSolution};
use crate::qubo::{build_three_objective_qubo, build_two_objective_qubo, QuboModel, DEFAULT_ALPHA};
use crate::solvers::{
    additional_greedy, bootstrap_solve, extract_archive, solve_exact, solve_sa, AnnealConfig,
    BootstrapConfig, EXACT_VAR_LIMIT,
};
use crate::stats::{Alternative, StatReport};
use crate::suite::{load_three_objective_dataset, load_two_objective_dataset, normalize_costs, NormalizedCosts, TestSuite};
use crate::pareto::Objectives;

/// Files produced by [`run_experiment`] that are covered by the reproducibility contract.
pub const OUTPUT_FILES: [&str; 6] = [
    "frontier.txt",
    "reference.txt",
    "counts.txt",
    "stats.txt",
    "solutions.txt",
    "meta.txt",
];
pub const TIMING_FILE: &str = "timing.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    ThreeObjective,
    TwoObjective,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "three" | "three-objective" | "3" => Ok(Mode::ThreeObjective),
            "two" | "two-objective" | "2" => Ok(Mode::TwoObjective),
            other => Err(Error::Parameter(format!("unknown mode `{other}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::ThreeObjective => "three",
            Mode::TwoObjective => "two",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    SelectQa,
    Greedy,
    BootQa,
    Exact,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SelectQa => "selectqa",
            Algorithm::Greedy => "greedy",
            Algorithm::BootQa => "bootqa",
            Algorithm::Exact => "exact",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "selectqa" => Ok(Algorithm::SelectQa),
            "greedy" => Ok(Algorithm::Greedy),
            "bootqa" => Ok(Algorithm::BootQa),
            "exact" => Ok(Algorithm::Exact),
            other => Err(Error::Parameter(format!("unknown algorithm `{other}`"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    ThreeObjective {
        coverage: PathBuf,
        costs: PathBuf,
        faults: PathBuf,
    },
    TwoObjective {
        csv: PathBuf,
        drop_zero_rate: bool,
    },
}

impl DatasetSource {
    pub fn mode(&self) -> Mode {
        match self {
            DatasetSource::ThreeObjective { .. } => Mode::ThreeObjective,
            DatasetSource::TwoObjective { .. } => Mode::TwoObjective,
        }
    }

    pub fn load(&self) -> Result<TestSuite> {
        match self {
            DatasetSource::ThreeObjective {
                coverage,
                costs,
                faults,
            } => load_three_objective_dataset(coverage, costs, faults),
            DatasetSource::TwoObjective {
                csv,
                drop_zero_rate,
            } => load_two_objective_dataset(csv, *drop_zero_rate),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub algorithms: Vec<Algorithm>,
    pub runs: usize,
    pub alpha: f64,
    pub penalty: Option<f64>,
    /// Seed fields of the anneal and bootstrap configs are replaced per run.
    pub anneal: AnnealConfig,
    pub bootstrap: BootstrapConfig,
    pub master_seed: u64,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(dataset: DatasetSource, algorithms: Vec<Algorithm>, output_dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            dataset,
            algorithms,
            runs: 10,
            alpha: DEFAULT_ALPHA,
            penalty: None,
            anneal: AnnealConfig::default(),
            bootstrap: BootstrapConfig {
                n: 20,
                m: 10,
                beta_coverage: 0.9,
                seed: 0,
            },
            master_seed: 0,
            output_dir: output_dir.into(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.dataset.mode()
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        self.master_seed.wrapping_add(run as u64)
    }

    fn validate(&self, suite: &TestSuite) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Parameter("runs must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Parameter("no algorithms selected".into()));
        }
        let mut seen = self.algorithms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.algorithms.len() {
            return Err(Error::Parameter("algorithm listed twice".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        self.anneal.validate()?;
        for &alg in &self.algorithms {
            match (alg, self.mode()) {
                (Algorithm::BootQa, Mode::ThreeObjective) => {
                    return Err(Error::Parameter("bootqa needs a two-objective dataset".into()))
                }
                (Algorithm::Greedy, Mode::TwoObjective) => {
                    return Err(Error::Parameter("greedy needs a three-objective dataset".into()))
                }
                (Algorithm::Exact, _) if suite.len() > EXACT_VAR_LIMIT => {
                    return Err(Error::Capacity {
                        vars: suite.len(),
                        limit: EXACT_VAR_LIMIT,
                    })
                }
                (Algorithm::BootQa, _) => self.bootstrap.validate(suite.len())?,
                _ => {}
            }
        }
        if suite.is_empty() {
            return Err(Error::InvalidData("dataset contains no test cases".into()));
        }
        Ok(())
    }
}

/// Output of one algorithm on one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub provenance: Provenance,
    /// Selection the algorithm settled on (the full greedy suite for greedy).
    pub solution: SelectionSolution,
    /// Candidates emitted before non-dominated filtering.
    pub candidates: usize,
    pub frontier: ParetoArchive,
    /// Distinct-case fraction reached by bootstrap sampling.
    pub sampled_fraction: Option<f64>,
    pub elapsed_secs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunCount {
    pub provenance: Provenance,
    pub candidates: usize,
    pub frontier: usize,
    pub nondominated: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub mode: Mode,
    pub suite_size: usize,
    pub statements: usize,
    pub penalty: f64,
    pub records: Vec<RunRecord>,
    /// Members fed to the reference frontier before filtering.
    pub union_size: usize,
    pub reference: ParetoArchive,
    pub counts: Vec<RunCount>,
    pub stats: Vec<StatReport>,
}

struct Prepared {
    suite: TestSuite,
    costs: NormalizedCosts,
    model: QuboModel,
}

fn run_one(config: &ExperimentConfig, prep: &Prepared, alg: Algorithm, run: usize) -> Result<RunRecord> {
    let seed = config.run_seed(run);
    let provenance = Provenance::new(alg.name(), run);
    let anneal = AnnealConfig { seed, ..config.anneal };
    let start = Instant::now();
    let mode = config.mode();

    let relabel = |archive: ParetoArchive| -> Result<ParetoArchive> {
        ParetoArchive::from_candidates(
            archive
                .members()
                .iter()
                .cloned()
                .map(|m| m.with_provenance(provenance.clone()))
                .collect(),
        )
    };
    let single = |solution: SelectionSolution| -> Result<(SelectionSolution, usize, ParetoArchive)> {
        let solution = solution.with_provenance(provenance.clone());
        let frontier = ParetoArchive::from_candidates(vec![solution.clone()])?;
        Ok((solution, 1, frontier))
    };
    let evaluate = |assignment: Vec<bool>| -> Result<SelectionSolution> {
        let objectives = match mode {
            Mode::ThreeObjective => Objectives::Three(crate::qubo::evaluate_objectives3(
                &prep.suite,
                &prep.costs,
                &assignment,
            )?),
            Mode::TwoObjective => Objectives::Two(crate::qubo::evaluate_objectives2(
                &prep.suite,
                &prep.costs,
                &assignment,
            )?),
        };
        Ok(SelectionSolution::new(assignment, objectives, provenance.clone()))
    };

    let mut sampled_fraction = None;
    let (solution, candidates, frontier) = match alg {
        Algorithm::SelectQa | Algorithm::Exact => {
            let samples = if alg == Algorithm::Exact {
                solve_exact(&prep.model)?
            } else {
                solve_sa(&prep.model, &anneal)?
            };
            let best = samples.best().expect("solvers return at least one sample").assignment.clone();
            match mode {
                Mode::ThreeObjective => {
                    let inc = extract_archive(&prep.suite, &prep.costs, &best)?;
                    (evaluate(best)?, inc.candidates.len(), relabel(inc.frontier)?)
                }
                Mode::TwoObjective => single(evaluate(best)?)?,
            }
        }
        Algorithm::Greedy => {
            let inc = additional_greedy(&prep.suite, &prep.costs)?;
            let last = inc
                .candidates
                .last()
                .map(|c| c.assignment.clone())
                .unwrap_or_else(|| vec![false; prep.suite.len()]);
            (evaluate(last)?, inc.candidates.len(), relabel(inc.frontier)?)
        }
        Algorithm::BootQa => {
            let bconfig = BootstrapConfig { seed, ..config.bootstrap };
            let out = bootstrap_solve(&prep.suite, &prep.costs, config.alpha, &bconfig, &anneal)?;
            sampled_fraction = Some(out.distinct_fraction);
            single(out.solution)?
        }
    };
    Ok(RunRecord {
        provenance,
        solution,
        candidates,
        frontier,
        sampled_fraction,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn pairwise_stats(config: &ExperimentConfig, records: &[RunRecord], counts: &[RunCount]) -> Result<Vec<StatReport>> {
    let per_alg = |alg: Algorithm, f: &dyn Fn(usize) -> f64| -> Vec<f64> {
        (0..records.len())
            .filter(|&i| records[i].provenance.algorithm == alg.name())
            .map(f)
            .collect()
    };
    let mut out = Vec::new();
    for (i, &a) in config.algorithms.iter().enumerate() {
        for &b in &config.algorithms[i + 1..] {
            match config.mode() {
                Mode::ThreeObjective => {
                    let nd = |k: usize| counts[k].nondominated as f64;
                    let (xa, xb) = (per_alg(a, &nd), per_alg(b, &nd));
                    let (hi, lo, xh, xl) = if mean(&xa) >= mean(&xb) {
                        (a, b, xa, xb)
                    } else {
                        (b, a, xb, xa)
                    };
                    out.push(StatReport::compare(
                        format!("{hi}>{lo} non-dom"),
                        &xh,
                        &xl,
                        Alternative::Greater,
                    )?);
                }
                Mode::TwoObjective => {
                    let cost = |k: usize| records[k].solution.objectives.total_cost();
                    let rate = |k: usize| match records[k].solution.objectives {
                        Objectives::Two(v) => v.total_failure_rate,
                        Objectives::Three(v) => v.fault_coverage as f64,
                    };
                    out.push(StatReport::compare(
                        format!("{a}<{b} cost"),
                        &per_alg(a, &cost),
                        &per_alg(b, &cost),
                        Alternative::Less,
                    )?);
                    out.push(StatReport::compare(
                        format!("{a}>{b} rate"),
                        &per_alg(a, &rate),
                        &per_alg(b, &rate),
                        Alternative::Greater,
                    )?);
                }
            }
        }
    }
    Ok(out)
}

/// Loads the dataset and runs every (algorithm, run) pair without touching the disk.
pub fn execute(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let suite = config.dataset.load().map_err(|e| e.context("loading dataset"))?;
    config.validate(&suite)?;
    let costs = normalize_costs(&suite)?;
    let model = match config.mode() {
        Mode::ThreeObjective => build_three_objective_qubo(&suite, &costs, config.alpha, config.penalty)?,
        Mode::TwoObjective => build_two_objective_qubo(&suite, &costs, config.alpha)?,
    };
    let prep = Prepared { suite, costs, model };

    let jobs: Vec<(Algorithm, usize)> = config
        .algorithms
        .iter()
        .flat_map(|&a| (0..config.runs).map(move |r| (a, r)))
        .collect();
    let records: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(alg, run)| {
            run_one(config, &prep, alg, run).map_err(|e| e.context(format!("{alg} run {run}")))
        })
        .collect::<Result<_>>()?;

    let frontiers: Vec<ParetoArchive> = records.iter().map(|r| r.frontier.clone()).collect();
    let union_size = frontiers.iter().map(ParetoArchive::len).sum();
    let reference = reference_frontier(&frontiers)?;
    let counts: Vec<RunCount> = records
        .iter()
        .map(|r| RunCount {
            provenance: r.provenance.clone(),
            candidates: r.candidates,
            frontier: r.frontier.len(),
            nondominated: count_nondominated(&r.frontier, &reference),
        })
        .collect();
    let stats = pairwise_stats(config, &records, &counts)?;

    Ok(ExperimentReport {
        mode: config.mode(),
        suite_size: prep.suite.len(),
        statements: prep.suite.statement_universe().len(),
        penalty: prep.model.penalty,
        records,
        union_size,
        reference,
        counts,
        stats,
    })
}

impl ExperimentReport {
    /// Contents of every file in [`OUTPUT_FILES`], in that order.
    pub fn render(&self, config: &ExperimentConfig) -> Vec<(&'static str, String)> {
        let mut frontier = String::new();
        for r in &self.records {
            frontier.push_str(&r.frontier.to_lines());
        }

        let mut counts = String::from("# algorithm run candidates frontier nondominated\n");
        for c in &self.counts {
            writeln!(
                counts,
                "{} {} {} {} {}",
                c.provenance.algorithm, c.provenance.run, c.candidates, c.frontier, c.nondominated
            )
            .unwrap();
        }

        let mut stats = String::new();
        for s in &self.stats {
            writeln!(stats, "{}", s.to_line()).unwrap();
        }

        let mut solutions = String::new();
        for r in &self.records {
            let selected: Vec<String> = r.solution.selected().map(|i| i.to_string()).collect();
            write!(
                solutions,
                "{} {} {} selected={}",
                r.provenance.algorithm,
                r.provenance.run,
                r.solution.objectives,
                selected.join(",")
            )
            .unwrap();
            if let Some(f) = r.sampled_fraction {
                write!(solutions, " sampled={f:.6}").unwrap();
            }
            solutions.push('\n');
        }

        (&[
            ("frontier.txt", frontier),
            ("reference.txt", self.reference.to_lines()),
            ("counts.txt", counts),
            ("stats.txt", stats),
            ("solutions.txt", solutions),
            ("meta.txt", self.meta(config)),
        ])
            .to_vec()
    }

    fn meta(&self, config: &ExperimentConfig) -> String {
        let mut m = String::new();
        let mut kv = |k: &str, v: String| writeln!(m, "{k}={v}").unwrap();
        kv("mode", self.mode.to_string());
        match &config.dataset {
            DatasetSource::ThreeObjective {
                coverage,
                costs,
                faults,
            } => {
                kv("coverage", coverage.display().to_string());
                kv("costs", costs.display().to_string());
                kv("faults", faults.display().to_string());
            }
            DatasetSource::TwoObjective {
                csv,
                drop_zero_rate,
            } => {
                kv("dataset", csv.display().to_string());
                kv("drop_zero_rate", drop_zero_rate.to_string());
            }
        }
        kv("test_cases", self.suite_size.to_string());
        kv("statements", self.statements.to_string());
        let algs: Vec<&str> = config.algorithms.iter().map(|a| a.name()).collect();
        kv("algorithms", algs.join(","));
        kv("runs", config.runs.to_string());
        kv("alpha", config.alpha.to_string());
        kv("penalty", self.penalty.to_string());
        kv(
            "penalty_source",
            if config.penalty.is_some() { "override" } else { "upper-bound" }.into(),
        );
        kv("reads", config.anneal.num_reads.to_string());
        kv("sweeps", config.anneal.sweeps.to_string());
        kv(
            "beta_range",
            match config.anneal.beta_range {
                Some((h, c)) => format!("{h},{c}"),
                None => "auto".into(),
            },
        );
        if config.algorithms.contains(&Algorithm::BootQa) {
            kv("n", config.bootstrap.n.to_string());
            kv("m", config.bootstrap.m.to_string());
            kv("beta_coverage", config.bootstrap.beta_coverage.to_string());
        }
        kv("master_seed", config.master_seed.to_string());
        kv("union_size", self.union_size.to_string());
        kv("reference_size", self.reference.len().to_string());
        m
    }

    pub fn timing(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            writeln!(out, "{} {} {:.6}", r.provenance.algorithm, r.provenance.run, r.elapsed_secs).unwrap();
        }
        out
    }

    /// Writes all output files into `dir`. On failure, files written so far are removed.
    pub fn write(&self, config: &ExperimentConfig, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut files = self.render(config);
        files.push((TIMING_FILE, self.timing()));
        let mut written = Vec::new();
        for (name, contents) in files {
            let path = dir.join(name);
            if let Err(e) = fs::write(&path, contents) {
                for p in &written {
                    let _ = fs::remove_file(p);
                }
                return Err(Error::io(path, e));
            }
            written.push(path);
        }
        Ok(())
    }
}

/// Runs the experiment and writes its files to `config.output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let report = execute(config)?;
    report.write(config, &config.output_dir)?;
    Ok(report)
}
