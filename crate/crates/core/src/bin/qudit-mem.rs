use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qudit_memory::correction::{build_cosets, diagonal_table, CosetTable, SubgroupSpec};
use qudit_memory::fourier::{Window, DEFAULT_EPSILON};
use qudit_memory::harness::report::{emit, CsvRow, Format};
use qudit_memory::harness::{
    run_cycle, run_echo_verify, run_fisher_trend, run_qft_bench, EchoConfig, ExperimentConfig, FisherConfig,
};
use qudit_memory::{Error, QuditDim};

/// Qudit quantum-memory experiments.
#[derive(Parser)]
#[command(name = "qudit-mem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// End-to-end memory cycles: error, extraction, adaptive QFT, correction.
    Cycle(Common),
    /// Adaptive-QFT cost against dimension.
    QftBench {
        #[command(flatten)]
        common: Common,
        /// Dimensions to sweep.
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        dims: Vec<usize>,
    },
    /// Infidelity scaling of free and echoed clock noise.
    EchoVerify {
        #[command(flatten)]
        common: Common,
        /// Noise amplitude.
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Linear drift of the noise amplitude per unit time.
        #[arg(long, default_value_t = 1.0)]
        drift: f64,
        #[arg(long, default_value_t = 1)]
        trotter_steps: usize,
        /// Total evolution times.
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.02,0.04,0.08")]
        times: Vec<f64>,
    },
    /// Fisher information against accumulation time.
    Fisher {
        #[command(flatten)]
        common: Common,
        /// Coherence time.
        #[arg(long, default_value_t = 1.0)]
        t2: f64,
        /// Signal rate [default: π/(4·t2)].
        #[arg(long)]
        phi: Option<f64>,
        /// Finite-difference step.
        #[arg(long, default_value_t = 1e-5)]
        step: f64,
    },
    /// Syndrome to correction table.
    CosetTable {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = TableKind::Diagonal)]
        table: TableKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableKind {
    /// The diagonal transversal X^{i+1} Z^i of ⟨Z⟩.
    Diagonal,
    /// Lexicographically least representatives of --subgroup cosets.
    Canonical,
}

#[derive(Args)]
struct Common {
    /// Qudit dimension.
    #[arg(long, default_value_t = 5)]
    d: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Width of the shift-exponent distribution.
    #[arg(long, default_value_t = 0.5)]
    sigma_shift: f64,
    /// Width of the phase-exponent distribution.
    #[arg(long, default_value_t = 0.5)]
    sigma_phase: f64,
    /// Coarse cutoff K [default: ceil(log2 d)].
    #[arg(long)]
    k: Option<usize>,
    /// Escalation threshold.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Bin window: hard or raised-cosine.
    #[arg(long, default_value = "hard")]
    window: String,
    /// Stabilizer subgroup: z, singleton, or a generator m,n.
    #[arg(long, default_value = "z")]
    subgroup: String,
    /// Output file [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Run trials on one thread.
    #[arg(long)]
    serial: bool,
}

impl Common {
    fn format(&self) -> Result<Format, Error> {
        self.format.parse()
    }

    fn experiment(&self) -> Result<ExperimentConfig, Error> {
        Ok(ExperimentConfig {
            d: self.d,
            trials: self.trials,
            seed: self.seed,
            sigma_shift: self.sigma_shift,
            sigma_phase: self.sigma_phase,
            cutoff: self.k,
            epsilon: self.epsilon,
            window: self.window.parse::<Window>()?,
            subgroup: self.subgroup.parse::<SubgroupSpec>()?,
            output: self.out.clone(),
            parallel: !self.serial,
        })
    }
}

#[derive(Serialize)]
struct CosetRow {
    syndrome: usize,
    rep_m: usize,
    rep_n: usize,
    corr_m: usize,
    corr_n: usize,
}

impl CsvRow for CosetRow {
    const HEADER: &'static [&'static str] = &["syndrome", "rep_m", "rep_n", "corr_m", "corr_n"];

    fn fields(&self) -> Vec<String> {
        [self.syndrome, self.rep_m, self.rep_n, self.corr_m, self.corr_n].iter().map(ToString::to_string).collect()
    }
}

#[derive(Serialize)]
struct CosetSummary {
    d: usize,
    kind: String,
    subgroup_order: usize,
    cosets: usize,
}

fn coset_rows(table: &CosetTable) -> Vec<CosetRow> {
    table
        .cosets()
        .iter()
        .map(|c| CosetRow {
            syndrome: c.label,
            rep_m: c.representative.m(),
            rep_n: c.representative.n(),
            corr_m: c.correction.m(),
            corr_n: c.correction.n(),
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Cycle(common) => {
            let config = common.experiment()?;
            let format = common.format()?;
            let (rows, summary) = run_cycle(&config)?;
            emit(&rows, &summary, format, common.out.as_deref())
        }
        Command::QftBench { common, dims } => {
            let config = common.experiment()?;
            let format = common.format()?;
            let (rows, summary) = run_qft_bench(&config, &dims)?;
            emit(&rows, &summary, format, common.out.as_deref())
        }
        Command::EchoVerify { common, omega, drift, trotter_steps, times } => {
            let format = common.format()?;
            let config = EchoConfig { d: common.d, omega, drift, trotter_steps, times };
            let (rows, summary) = run_echo_verify(&config)?;
            emit(&rows, &summary, format, common.out.as_deref())
        }
        Command::Fisher { common, t2, phi, step } => {
            let format = common.format()?;
            let config = FisherConfig {
                d: common.d,
                cutoff: common.k,
                epsilon: common.epsilon,
                window: common.window.parse()?,
                t2,
                phi,
                step,
                times: None,
            };
            let (rows, summary) = run_fisher_trend(&config)?;
            emit(&rows, &summary, format, common.out.as_deref())
        }
        Command::CosetTable { common, table } => {
            let format = common.format()?;
            let dim = QuditDim::new(common.d)?;
            let (table, kind) = match table {
                TableKind::Diagonal => (diagonal_table(dim), "diagonal".to_string()),
                TableKind::Canonical => {
                    let spec: SubgroupSpec = common.subgroup.parse()?;
                    (build_cosets(dim, &spec.build(dim))?, format!("canonical/{spec}"))
                }
            };
            let summary =
                CosetSummary { d: common.d, kind, subgroup_order: table.subgroup().order(), cosets: table.len() };
            emit(&coset_rows(&table), &summary, format, common.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qudit-mem: {e}");
            if e.is_invariant_violation() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
