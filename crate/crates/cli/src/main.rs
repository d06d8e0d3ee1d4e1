use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tsq_core::experiment::{run_experiment, Algorithm, DatasetSource, ExperimentConfig, Mode};
use tsq_core::pareto::{group_by_run, parse_frontier_lines};
use tsq_core::{
    additional_greedy, bootstrap_solve, build_three_objective_qubo, build_two_objective_qubo,
    count_nondominated, evaluate_objectives2, evaluate_objectives3, normalize_costs, reference_frontier,
    solve_exact, solve_sa, Alternative, AnnealConfig, BootstrapConfig, Error, NormalizedCosts, Objectives,
    ParetoArchive, QuboModel, Result, StatReport, TestSuite,
};

#[derive(Parser)]
#[command(name = "tsq", version, about = "Regression test selection via QUBO models")]
struct Cli {
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the QUBO model of a dataset and print it in text form.
    BuildQubo {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a dataset's model, or a saved model, and list the distinct samples.
    Solve {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        anneal: AnnealArgs,
        /// Solve a model written by `build-qubo` instead of a dataset.
        #[arg(long, conflicts_with_all = ["coverage", "dataset"])]
        qubo: Option<PathBuf>,
        /// Enumerate all assignments instead of annealing.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Additional-greedy baseline on a three-objective dataset.
    Greedy {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a two-objective dataset by bootstrap decomposition.
    Bootqa {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        anneal: AnnealArgs,
        #[command(flatten)]
        boot: BootArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reference frontier and per-run non-dominated counts from frontier files.
    Frontier {
        /// Files of `<algorithm> <run> <objectives...>` lines.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Directory for reference.txt and counts.txt (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mann-Whitney U test and A12 effect size for two samples.
    Stats {
        /// File of whitespace-separated numbers.
        x: PathBuf,
        y: PathBuf,
        #[arg(long, value_enum, default_value = "two-sided")]
        alternative: AltArg,
        #[arg(long, default_value = "x vs y")]
        hypothesis: String,
    },
    /// Full protocol: repeated runs, reference frontier, counts and statistics.
    Experiment {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        anneal: AnnealArgs,
        #[command(flatten)]
        boot: BootArgs,
        /// Comma-separated subset of selectqa, greedy, bootqa, exact.
        #[arg(long, value_delimiter = ',', default_value = "selectqa")]
        algorithms: Vec<String>,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Coverage file (`<id>: <stmt> <stmt> ...`).
    #[arg(long)]
    coverage: Option<PathBuf>,
    /// Cost file (`<id>,<cost>`).
    #[arg(long)]
    costs: Option<PathBuf>,
    /// Fault file (`<id>,<faults>`).
    #[arg(long)]
    faults: Option<PathBuf>,
    /// Time and failure-rate CSV.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Objective layout; inferred from the dataset flags if omitted.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Keep rows whose failure rate is zero.
    #[arg(long)]
    keep_zero_rate: bool,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value_t = tsq_core::qubo::DEFAULT_ALPHA)]
    alpha: f64,
    /// Constraint penalty (default: upper-bound rule).
    #[arg(long)]
    penalty: Option<f64>,
}

#[derive(Args)]
struct AnnealArgs {
    #[arg(long, default_value_t = 100)]
    reads: usize,
    #[arg(long, default_value_t = 1000)]
    sweeps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BootArgs {
    /// Sub-problem size.
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Number of sub-problems.
    #[arg(long, default_value_t = 10)]
    m: usize,
    /// Target fraction of distinct test cases sampled.
    #[arg(long, default_value_t = 0.9)]
    beta_coverage: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum AltArg {
    Less,
    Greater,
    TwoSided,
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl DataArgs {
    fn source(&self) -> Result<DatasetSource> {
        let three = [&self.coverage, &self.costs, &self.faults];
        let any_three = three.iter().any(|p| p.is_some());
        let mode = match (self.mode, any_three, self.dataset.is_some()) {
            (_, true, true) => {
                return Err(Error::Parameter("--dataset cannot be combined with --coverage/--costs/--faults".into()))
            }
            (Some(m), _, _) => m,
            (None, true, false) => Mode::ThreeObjective,
            (None, false, true) => Mode::TwoObjective,
            (None, false, false) => {
                return Err(Error::Parameter("give --coverage, --costs and --faults, or --dataset".into()))
            }
        };
        match mode {
            Mode::ThreeObjective => match three {
                [Some(coverage), Some(costs), Some(faults)] => Ok(DatasetSource::ThreeObjective {
                    coverage: coverage.clone(),
                    costs: costs.clone(),
                    faults: faults.clone(),
                }),
                _ => Err(Error::Parameter("three-objective mode needs --coverage, --costs and --faults".into())),
            },
            Mode::TwoObjective => match &self.dataset {
                Some(csv) => Ok(DatasetSource::TwoObjective {
                    csv: csv.clone(),
                    drop_zero_rate: !self.keep_zero_rate,
                }),
                None => Err(Error::Parameter("two-objective mode needs --dataset".into())),
            },
        }
    }
}

impl AnnealArgs {
    fn config(&self) -> AnnealConfig {
        AnnealConfig {
            num_reads: self.reads,
            sweeps: self.sweeps,
            beta_range: None,
            seed: self.seed,
        }
    }
}

impl BootArgs {
    fn config(&self, seed: u64) -> BootstrapConfig {
        BootstrapConfig {
            n: self.n,
            m: self.m,
            beta_coverage: self.beta_coverage,
            seed,
        }
    }
}

struct Loaded {
    mode: Mode,
    suite: TestSuite,
    costs: NormalizedCosts,
}

fn load(data: &DataArgs) -> Result<Loaded> {
    let source = data.source()?;
    let suite = source.load()?;
    let costs = normalize_costs(&suite)?;
    Ok(Loaded {
        mode: source.mode(),
        suite,
        costs,
    })
}

fn build_model(l: &Loaded, model: &ModelArgs) -> Result<QuboModel> {
    match l.mode {
        Mode::ThreeObjective => build_three_objective_qubo(&l.suite, &l.costs, model.alpha, model.penalty),
        Mode::TwoObjective => {
            if model.penalty.is_some() {
                return Err(Error::Parameter("--penalty has no effect on a two-objective model".into()));
            }
            build_two_objective_qubo(&l.suite, &l.costs, model.alpha)
        }
    }
}

fn objectives(l: &Loaded, assignment: &[bool]) -> Result<Objectives> {
    Ok(match l.mode {
        Mode::ThreeObjective => Objectives::Three(evaluate_objectives3(&l.suite, &l.costs, assignment)?),
        Mode::TwoObjective => Objectives::Two(evaluate_objectives2(&l.suite, &l.costs, assignment)?),
    })
}

fn selected_labels(suite: &TestSuite, assignment: &[bool]) -> String {
    let labels: Vec<String> = (0..assignment.len())
        .filter(|&i| assignment[i])
        .map(|i| suite.case(i).label.to_string())
        .collect();
    labels.join(",")
}

fn bits(assignment: &[bool]) -> String {
    assignment.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn read_sample(path: &Path) -> Result<Vec<f64>> {
    read(path)?
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidData(format!("{}: `{t}` is not a number", path.display())))
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::BuildQubo { data, model, out } => {
            let l = load(&data)?;
            emit(out.as_deref(), &build_model(&l, &model)?.to_text())
        }
        Command::Solve {
            data,
            model,
            anneal,
            qubo,
            exact,
            out,
        } => {
            let (loaded, qmodel) = match &qubo {
                Some(path) => (None, QuboModel::from_text(&read(path)?)?),
                None => {
                    let l = load(&data)?;
                    let m = build_model(&l, &model)?;
                    (Some(l), m)
                }
            };
            let samples = if exact {
                solve_exact(&qmodel)?
            } else {
                solve_sa(&qmodel, &anneal.config())?
            };
            let mut text = String::new();
            if let (Some(l), Some(best)) = (&loaded, samples.best()) {
                writeln!(
                    text,
                    "# best {} selected={}",
                    objectives(l, &best.assignment)?,
                    selected_labels(&l.suite, &best.assignment)
                )
                .unwrap();
            }
            text.push_str("# energy multiplicity assignment\n");
            for s in samples.samples() {
                writeln!(text, "{} {} {}", s.energy, s.multiplicity, bits(&s.assignment)).unwrap();
            }
            emit(out.as_deref(), &text)
        }
        Command::Greedy { data, out } => {
            let l = load(&data)?;
            if l.mode != Mode::ThreeObjective {
                return Err(Error::Parameter("greedy needs a three-objective dataset".into()));
            }
            let inc = additional_greedy(&l.suite, &l.costs)?;
            eprintln!("{} candidates, {} non-dominated", inc.candidates.len(), inc.frontier.len());
            emit(out.as_deref(), &inc.frontier.to_lines())
        }
        Command::Bootqa {
            data,
            model,
            anneal,
            boot,
            out,
        } => {
            let l = load(&data)?;
            if l.mode != Mode::TwoObjective {
                return Err(Error::Parameter("bootqa needs a two-objective dataset".into()));
            }
            if model.penalty.is_some() {
                return Err(Error::Parameter("--penalty has no effect on a two-objective model".into()));
            }
            let acfg = anneal.config();
            let outcome = bootstrap_solve(&l.suite, &l.costs, model.alpha, &boot.config(anneal.seed), &acfg)?;
            if outcome.below_target {
                eprintln!(
                    "warning: sampled {:.3} of the suite, below the {} target",
                    outcome.distinct_fraction, boot.beta_coverage
                );
            }
            let text = format!(
                "{} selected={} sampled={:.6}\n",
                outcome.solution.objectives,
                selected_labels(&l.suite, &outcome.solution.assignment),
                outcome.distinct_fraction
            );
            emit(out.as_deref(), &text)
        }
        Command::Frontier { inputs, out } => {
            let mut solutions = Vec::new();
            for path in &inputs {
                let parsed = parse_frontier_lines(&read(path)?).map_err(|e| e.context(path.display().to_string()))?;
                solutions.extend(parsed);
            }
            let runs = group_by_run(solutions)?;
            let archives: Vec<ParetoArchive> = runs.iter().map(|(_, a)| a.clone()).collect();
            let reference = reference_frontier(&archives)?;
            let mut counts = String::from("# algorithm run frontier nondominated\n");
            for (p, a) in &runs {
                writeln!(counts, "{} {} {} {}", p.algorithm, p.run, a.len(), count_nondominated(a, &reference)).unwrap();
            }
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(|e| Error::Io {
                        path: dir.clone(),
                        source: e,
                    })?;
                    emit(Some(&dir.join("reference.txt")), &reference.to_lines())?;
                    emit(Some(&dir.join("counts.txt")), &counts)
                }
                None => emit(None, &format!("{}{counts}", reference.to_lines())),
            }
        }
        Command::Stats {
            x,
            y,
            alternative,
            hypothesis,
        } => {
            let alt = match alternative {
                AltArg::Less => Alternative::Less,
                AltArg::Greater => Alternative::Greater,
                AltArg::TwoSided => Alternative::TwoSided,
            };
            let report = StatReport::compare(hypothesis, &read_sample(&x)?, &read_sample(&y)?, alt)?;
            println!("{}", report.to_line());
            Ok(())
        }
        Command::Experiment {
            data,
            model,
            anneal,
            boot,
            algorithms,
            runs,
            out,
        } => {
            let algorithms = algorithms
                .iter()
                .map(|a| a.trim().parse::<Algorithm>())
                .collect::<Result<Vec<_>>>()?;
            let mut config = ExperimentConfig::new(data.source()?, algorithms, out);
            config.runs = runs;
            config.alpha = model.alpha;
            config.penalty = model.penalty;
            config.anneal = anneal.config();
            config.bootstrap = boot.config(0);
            config.master_seed = anneal.seed;
            let report = run_experiment(&config)?;
            eprintln!(
                "{} runs, union {} -> reference {}; results in {}",
                report.records.len(),
                report.union_size,
                report.reference.len(),
                config.output_dir.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 3 })
        }
    }
}
