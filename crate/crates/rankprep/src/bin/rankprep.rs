use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rankprep::commands::execute;
use rankprep::config::{Command, RunConfig};
use rankprep::sparsesim::{Backend, Mode};
use rankprep::variants::QpeEngine;
use rankprep::{Encoding, Error};

#[derive(Parser)]
#[command(name = "rankprep", version, about = "Rank-1 Hamiltonian state preparation simulator")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write `<command>.json` and CSV side files here.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// What to print on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for sweeps (default: logical cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Sub {
    /// Adiabatic preparation with the low-rank simulator.
    PrepAdiabatic(Overrides),
    /// Closed-form and empirical bounds.
    Bounds(Overrides),
    /// One phase-estimation preparation.
    Qpe(Overrides),
    /// Normalization estimate by phase estimation.
    EstimateNorm(Overrides),
    /// Riemann-sum integration through the normalization.
    Integrate(Overrides),
    /// Hadamard-test preparation and normalization sweep.
    Hadamard(Overrides),
    /// Repeated Hadamard-test verification.
    Verify(Overrides),
    /// Grover-Rudolph reference state.
    GroverRudolph(Overrides),
    /// Filling ratios of the reference corpus.
    Table1(Overrides),
    /// Infidelity sweeps over n and r.
    Fig2(Overrides),
}

#[derive(Args, Default)]
struct Overrides {
    /// Function, e.g. `lognormal:0,0.5` or `tabulated:points.csv`.
    #[arg(long = "fn")]
    function: Option<String>,
    /// `a,b`.
    #[arg(long, value_parser = pair::<f64>)]
    interval: Option<[f64; 2]>,
    #[arg(long)]
    encoding: Option<Encoding>,
    #[arg(long)]
    n: Option<u32>,
    /// `lo,hi`, inclusive.
    #[arg(long, value_parser = pair::<u32>)]
    n_range: Option<[u32; 2]>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    r_values: Option<Vec<usize>>,
    #[arg(long)]
    k_margin: Option<f64>,
    /// Total evolution time, overriding `k_margin`.
    #[arg(long = "total-time")]
    t_override: Option<f64>,
    /// `exact` or `taylor:<m>`.
    #[arg(long)]
    backend: Option<Backend>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    digits: Option<u32>,
    #[arg(long)]
    no_rescale: bool,
    #[arg(long)]
    no_empirical: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Phase-register qubits.
    #[arg(long)]
    m: Option<u32>,
    /// Base evolution time for `qpe`.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    epsilon_fail: Option<f64>,
    #[arg(long)]
    engine: Option<QpeEngine>,
    /// `qpe` or `exact`.
    #[arg(long)]
    estimator: Option<String>,
    /// `plus` or `target`.
    #[arg(long)]
    initial: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    quad_points: Option<usize>,
    #[arg(long)]
    fit_n: Option<u32>,
}

impl Overrides {
    fn apply(self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($field:ident),*) => {$(if let Some(v) = self.$field { cfg.$field = Some(v); })*};
        }
        set!(function, n, r, r_values, k_margin, t_override, backend, m, t, epsilon_fail, engine);
        set!(estimator, initial, lambda, trials, shots, points, fit_n, interval, n_range);
        if let Some(e) = self.encoding {
            cfg.encoding = e;
        }
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if let Some(d) = self.digits {
            cfg.digits = d;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(q) = self.quad_points {
            cfg.quad_points = q;
        }
        if self.no_rescale {
            cfg.rescale = false;
        }
        if self.no_empirical {
            cfg.empirical = false;
        }
    }
}

fn pair<T: std::str::FromStr + Copy>(s: &str) -> Result<[T; 2], String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two comma-separated values, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<T>().map_err(|_| format!("bad value {x:?}"));
    Ok([parse(a)?, parse(b)?])
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rankprep: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let (cmd, overrides) = match cli.command {
        Sub::PrepAdiabatic(o) => (Command::PrepAdiabatic, o),
        Sub::Bounds(o) => (Command::Bounds, o),
        Sub::Qpe(o) => (Command::Qpe, o),
        Sub::EstimateNorm(o) => (Command::EstimateNorm, o),
        Sub::Integrate(o) => (Command::Integrate, o),
        Sub::Hadamard(o) => (Command::Hadamard, o),
        Sub::Verify(o) => (Command::Verify, o),
        Sub::GroverRudolph(o) => (Command::GroverRudolph, o),
        Sub::Table1(o) => (Command::Table1, o),
        Sub::Fig2(o) => (Command::Fig2, o),
    };
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    overrides.apply(&mut cfg);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let out = pool.install(|| execute(cmd, cfg))?;
    if let Some(dir) = &cli.output_dir {
        out.write_to(dir)?;
    }
    match cli.format {
        Format::Json => print!("{}", out.json),
        Format::Csv => match out.primary_csv() {
            Some(f) => print!("{}", f.content),
            None => return Err(Error::Config(format!("{} has no CSV output", cmd.name()))),
        },
    }
    Ok(())
}
