//! Command-line surface.
//!
//! Four subcommands: `compose` (membership vector in, composed vector out),
//! `infer` (crisp in, crisp out), `simulate` (closed-loop trace), and
//! `bench-convergence` (error-vs-N study with optional SVG plot). All
//! output is CSV with a `# seed=...` preamble echoing the resolved seed.
//!
//! Seed precedence: `--seed` flag, then the `FUZZPROB_SEED` environment
//! variable, then 0. Exit codes: 0 success, 1 usage error, 2 data or
//! semantic error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fuzzprob::bench::{run_convergence_bench, BenchBackend, BenchSpec, InstanceSource};
use fuzzprob::controller::{
    closed_loop_run, defuzzify_centroid, fuzzify, infer, Backend, PlantConfig,
};
use fuzzprob::emit::{csv_string, format_real, write_svg_lineplot, CsvRecord};
use fuzzprob::fuzzy::{compose, relation_from_rules, CompositionSemantics, MembershipVector};
use fuzzprob::prob::ZeroRowPolicy;
use fuzzprob::rulebase::{RuleBase, REFERENCE_RULEBASE};
use fuzzprob::stochastic::StreamConfig;

#[derive(Parser)]
#[command(
    name = "fuzzprob",
    version,
    about = "Fuzzy, probabilistic, and bit-stream inference over discrete universes"
)]
struct Cli {
    /// Seed for all randomized paths (falls back to $FUZZPROB_SEED, then 0)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file; stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Inference backend
    #[arg(long, global = true, value_enum, default_value_t = BackendArg::Fuzzy)]
    backend: BackendArg,

    /// Composition semantics for the fuzzy backend
    #[arg(long, global = true, value_enum, default_value_t = SemanticsArg::Maxmin)]
    semantics: SemanticsArg,

    /// Bit-stream length for the stochastic backend
    #[arg(long, global = true, default_value_t = 4096)]
    slots: usize,

    /// Hoeffding delta for estimator reports
    #[arg(long, global = true, default_value_t = 1e-3)]
    delta: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Fuzzy,
    Prob,
    Stochastic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SemanticsArg {
    Maxmin,
    Maxproduct,
}

impl From<SemanticsArg> for CompositionSemantics {
    fn from(s: SemanticsArg) -> Self {
        match s {
            SemanticsArg::Maxmin => CompositionSemantics::MaxMin,
            SemanticsArg::Maxproduct => CompositionSemantics::MaxProduct,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchBackendArg {
    ExactFuzzy,
    ExactProb,
    StochasticCompose,
    McMarginal,
}

impl From<BenchBackendArg> for BenchBackend {
    fn from(b: BenchBackendArg) -> Self {
        match b {
            BenchBackendArg::ExactFuzzy => BenchBackend::ExactFuzzy,
            BenchBackendArg::ExactProb => BenchBackend::ExactProb,
            BenchBackendArg::StochasticCompose => BenchBackend::StochasticCompose,
            BenchBackendArg::McMarginal => BenchBackend::McMarginal,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compose a membership vector with the rule base's relation
    Compose {
        /// Rule-base file (defaults to the built-in reference)
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Comma-separated grades on the input universe
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        x: Vec<f64>,
    },
    /// Crisp-in, crisp-out inference through the selected backend
    Infer {
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Crisp input on the rule base's input universe
        #[arg(long, allow_negative_numbers = true)]
        crisp: f64,
    },
    /// Closed-loop run against the first-order plant; emits a trace CSV
    Simulate {
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Plant decay coefficient
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
        /// Plant input gain
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        b: f64,
        /// Euler step, seconds
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        /// Initial plant state
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x0: f64,
        /// Setpoint the controller steers toward
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        setpoint: f64,
        /// Number of closed-loop steps
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// Error-vs-N convergence study; emits bench rows as CSV
    BenchConvergence {
        /// `reference` or `random:MxN[:seed]`
        #[arg(long, default_value = "reference")]
        instance: String,
        /// Backends to bench (default: stochastic-compose,mc-marginal)
        #[arg(long, value_enum, value_delimiter = ',')]
        backends: Option<Vec<BenchBackendArg>>,
        /// Sample counts, strictly increasing (default: 256,1024,4096,16384)
        #[arg(long = "n-grid", value_delimiter = ',')]
        n_grid: Option<Vec<usize>>,
        /// Seeds per (backend, N) point
        #[arg(long, default_value_t = 100)]
        seeds_per_point: usize,
        /// Also write a log-log SVG plot here
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Measure wall time per row (makes the CSV run-dependent)
        #[arg(long)]
        timing: bool,
    },
}

enum CliError {
    Usage(String),
    Data(String),
}

impl From<fuzzprob::Error> for CliError {
    fn from(e: fuzzprob::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("FUZZPROB_SEED") {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "FUZZPROB_SEED must be a 64-bit integer, got `{raw}`"
            ))
        }),
        Err(_) => Ok(0),
    }
}

fn load_rules(path: &Option<PathBuf>) -> Result<RuleBase, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?,
        None => REFERENCE_RULEBASE.to_string(),
    };
    RuleBase::parse(&text).map_err(|e| match path {
        Some(p) => CliError::Data(format!("{}: {e}", p.display())),
        None => CliError::Data(e.to_string()),
    })
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, content)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn with_preamble(seed: u64, csv: &str) -> String {
    format!("# seed={seed}\n{csv}")
}

struct ComposeRow {
    index: usize,
    point: f64,
    grade: f64,
}

impl CsvRecord for ComposeRow {
    const HEADER: &'static str = "index,point,grade";

    fn csv_line(&self) -> String {
        format!(
            "{},{},{}",
            self.index,
            format_real(self.point),
            format_real(self.grade)
        )
    }
}

struct InferRow {
    crisp_in: f64,
    backend: &'static str,
    crisp_out: f64,
}

impl CsvRecord for InferRow {
    const HEADER: &'static str = "crisp_in,backend,crisp_out";

    fn csv_line(&self) -> String {
        format!(
            "{},{},{}",
            format_real(self.crisp_in),
            self.backend,
            format_real(self.crisp_out)
        )
    }
}

fn build_backend(
    arg: BackendArg,
    sem: SemanticsArg,
    slots: usize,
    seed: u64,
) -> Result<Backend, CliError> {
    Ok(match arg {
        BackendArg::Fuzzy => Backend::ExactFuzzy(sem.into()),
        BackendArg::Prob => Backend::ExactProb(ZeroRowPolicy::Error),
        BackendArg::Stochastic => Backend::Stochastic(StreamConfig::shared(slots, seed)?),
    })
}

fn parse_instance(text: &str, default_seed: u64) -> Result<InstanceSource, CliError> {
    if text == "reference" {
        return Ok(InstanceSource::Reference);
    }
    let usage = || {
        CliError::Usage(format!(
            "instance must be `reference` or `random:MxN[:seed]`, got `{text}`"
        ))
    };
    let rest = text.strip_prefix("random:").ok_or_else(usage)?;
    let mut parts = rest.split(':');
    let dims = parts.next().ok_or_else(usage)?;
    let (m, n) = dims.split_once('x').ok_or_else(usage)?;
    let m: usize = m.parse().map_err(|_| usage())?;
    let n: usize = n.parse().map_err(|_| usage())?;
    let seed = match parts.next() {
        Some(s) => s.parse().map_err(|_| usage())?,
        None => default_seed,
    };
    if parts.next().is_some() {
        return Err(usage());
    }
    Ok(InstanceSource::Random { m, n, seed })
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let seed = resolve_seed(cli.seed)?;
    match cli.command {
        Command::Compose { rules, x } => {
            let rb = load_rules(&rules)?;
            let input = MembershipVector::new(rb.input_universe().clone(), x)?;
            let rel = relation_from_rules(&rb);
            let y = compose(&input, &rel, cli.semantics.into())?;
            let rows: Vec<ComposeRow> = y
                .grades()
                .iter()
                .enumerate()
                .map(|(index, &grade)| ComposeRow {
                    index,
                    point: y.universe().point(index),
                    grade,
                })
                .collect();
            write_output(&cli.out, &with_preamble(seed, &csv_string(&rows)))
        }
        Command::Infer { rules, crisp } => {
            let rb = load_rules(&rules)?;
            let backend = build_backend(cli.backend, cli.semantics, cli.slots, seed)?;
            let x = fuzzify(crisp, &rb);
            let y = infer(&x, &rb, &backend)?;
            let crisp_out = defuzzify_centroid(&y)?;
            let rows = [InferRow {
                crisp_in: crisp,
                backend: backend.name(),
                crisp_out,
            }];
            write_output(&cli.out, &with_preamble(seed, &csv_string(&rows)))
        }
        Command::Simulate {
            rules,
            a,
            b,
            dt,
            x0,
            setpoint,
            steps,
        } => {
            let rb = load_rules(&rules)?;
            let plant = PlantConfig::new(a, b, dt, x0, setpoint, steps)?;
            let backend = build_backend(cli.backend, cli.semantics, cli.slots, seed)?;
            let trace = closed_loop_run(&rb, &plant, &backend, seed)?;
            write_output(&cli.out, &with_preamble(seed, &csv_string(&trace)))
        }
        Command::BenchConvergence {
            instance,
            backends,
            n_grid,
            seeds_per_point,
            svg,
            timing,
        } => {
            let spec = BenchSpec {
                instance: parse_instance(&instance, seed)?,
                backends: backends
                    .map(|bs| bs.into_iter().map(BenchBackend::from).collect())
                    .unwrap_or_else(|| {
                        vec![BenchBackend::StochasticCompose, BenchBackend::McMarginal]
                    }),
                n_grid: n_grid.unwrap_or_else(|| vec![256, 1024, 4096, 16384]),
                seeds_per_point,
                base_seed: seed,
                delta: cli.delta,
                timing,
            };
            let rows = run_convergence_bench(&spec)?;
            if let Some(svg_path) = &svg {
                write_svg_lineplot(&rows, svg_path)?;
            }
            write_output(&cli.out, &with_preamble(seed, &csv_string(&rows)))
        }
    }
}
