//! Command-line front end. Exit codes: 0 success, 1 compute failure,
//! 2 usage or configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::experiments::{
    emit_records, inconsistency_summary, plot_risk_curves, read_records, run_cell, run_sweep_to,
    spike_regime_summary, verification_suite, CRule, SweepGrid, SweepRecord,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ridgeless", version, about = "Minimum-norm Laplace-kernel interpolation experiments")]
pub struct Cli {
    /// Base seed (simulate, verify); for sweep it replaces the grid's seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (.csv or .json for records, .svg for plots).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = default_jobs())]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one cell, e.g. `simulate d=1 n=100 c=4 seed=7`, and print its record.
    Simulate {
        /// key=value pairs: d, n, c, seed, f0, m_test, alpha_witness.
        params: Vec<String>,
    },
    /// Run every cell of a grid file and write the records.
    Sweep {
        /// Flat `key = value` grid file.
        grid: PathBuf,
    },
    /// Run the numerical self-checks; nonzero exit if any fails.
    Verify,
    /// Plot risk curves from a record file to SVG.
    Plot {
        /// .csv or .json record file.
        records: PathBuf,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Compute(other.to_string()),
        }
    }
}

/// Parse `argv` and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if cli.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return EXIT_USAGE;
    }
    let result = match &cli.command {
        Command::Simulate { params } => simulate(&cli, params),
        Command::Sweep { grid } => sweep(&cli, grid),
        Command::Verify => verify(&cli),
        Command::Plot { records } => plot(&cli, records),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            EXIT_FAILURE
        }
    }
}

fn simulate(cli: &Cli, params: &[String]) -> Result<(), Failure> {
    let mut grid = SweepGrid {
        d_list: vec![1],
        n_list: vec![100],
        c_rule: CRule::Absolute,
        c_values: vec![1.0],
        seeds: vec![cli.seed.unwrap_or(0)],
        ..SweepGrid::default()
    };
    for p in params {
        let (key, value) = p
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("expected key=value, got `{p}`")))?;
        let key = match key {
            "d" => "d_list",
            "n" => "n_list",
            "c" => "c_values",
            "seed" => "seeds",
            "f0" | "m_test" | "alpha_witness" => key,
            other => return Err(Failure::Usage(format!("unknown parameter `{other}`"))),
        };
        grid.set(key, value)?;
    }
    grid.validate()?;
    if grid.cells().len() != 1 {
        return Err(Failure::Usage("simulate takes single values of d, n, c and seed".into()));
    }
    let record = run_cell(&grid, &grid.hash(), &grid.cells()[0]);
    if let Some(out) = &cli.out {
        emit_records(std::slice::from_ref(&record), out)?;
    } else {
        let text = serde_json::to_string_pretty(&record).map_err(|e| Failure::Compute(e.to_string()))?;
        println!("{text}");
    }
    if record.is_error() {
        return Err(Failure::Compute(format!("{}: {}", record.coordinates(), record.error)));
    }
    Ok(())
}

fn sweep(cli: &Cli, grid_path: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(grid_path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", grid_path.display())))?;
    let mut grid = SweepGrid::parse(&text)?;
    if let Some(seed) = cli.seed {
        grid.seeds = vec![seed];
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("sweep.csv"));
    let records = run_sweep_to(&grid, &out, cli.jobs)?;
    let failed: Vec<&SweepRecord> = records.iter().filter(|r| r.is_error()).collect();
    println!("{} records written to {}", records.len(), out.display());
    print_summaries(&records);
    if !failed.is_empty() {
        for r in &failed {
            eprintln!("failed cell {}: {}", r.coordinates(), r.error);
        }
        return Err(Failure::Compute(format!("{} of {} cells failed", failed.len(), records.len())));
    }
    Ok(())
}

fn print_summaries(records: &[SweepRecord]) {
    let mut stdout = std::io::stdout().lock();
    if let Ok(s) = inconsistency_summary(records) {
        let _ = writeln!(stdout, "\nminimum risk over c");
        let _ = writeln!(stdout, "{:>3} {:>6} {:>10} {:>10} {:>10} {:>10}", "d", "n", "c/n^(1/d)", "risk", "seed min", "seed max");
        for r in &s.rows {
            let _ = writeln!(
                stdout,
                "{:>3} {:>6} {:>10.4} {:>10.5} {:>10.5} {:>10.5}",
                r.d, r.n, r.c_ratio_best, r.risk.mean, r.risk.min, r.risk.max
            );
        }
        for (d, rho) in &s.trends {
            let _ = writeln!(stdout, "d={d}: Spearman(min risk, n) = {rho:.3}");
        }
        if !s.excluded.is_empty() {
            let _ = writeln!(stdout, "excluded records (failed or jittered): {}", s.excluded.len());
        }
    }
    if let Ok(s) = spike_regime_summary(records) {
        let _ = writeln!(stdout, "\n||f_hat||^2 / ||f0||^2 on the domain");
        let _ = writeln!(stdout, "{:>3} {:>6} {:>10} {:>12}", "d", "n", "c/n^(1/d)", "ratio");
        for r in &s.rows {
            let _ = writeln!(stdout, "{:>3} {:>6} {:>10.4} {:>12.5}", r.d, r.n, r.c_ratio, r.ratio.mean);
        }
    }
}

fn verify(cli: &Cli) -> Result<(), Failure> {
    let checks = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| Failure::Compute(e.to_string()))?
        .install(|| verification_suite(cli.seed.unwrap_or(1)))?;
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        println!(
            "{:<width$}  {:>14.6e}  {:<16}  {}",
            c.name,
            c.value,
            c.limit,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(Failure::Compute(format!("{failed} of {} checks failed", checks.len())));
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}

fn plot(cli: &Cli, records_path: &Path) -> Result<(), Failure> {
    let records = read_records(records_path)?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("risk.svg"));
    plot_risk_curves(&records, &out).map_err(|e| match e {
        Error::InvalidInput(msg) => Failure::Usage(msg),
        other => Failure::from(other),
    })?;
    println!("wrote {}", out.display());
    Ok(())
}
