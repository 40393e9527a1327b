use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use twophoton_cli::{emit_plot_script, run_golden, run_scan, CliError, CliResult, ScanConfig};

/// Two-photon scattering amplitudes from the commutator series.
#[derive(Parser)]
#[command(name = "twophoton", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs an energy scan described by a TOML configuration.
    Scan {
        config: PathBuf,
        /// Output CSV; overrides `output.csv`. Standard output when neither is set.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Worker threads; all cores by default.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Compares computed O_1..O_n with a golden corpus (built-in id or directory).
    Golden { corpus: String },
    /// Writes a gnuplot script for a scan dataset.
    Plot {
        dataset: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn scan(config: PathBuf, output: Option<PathBuf>, threads: Option<usize>) -> CliResult<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("--threads: {e}")))?;
    }
    let cfg = ScanConfig::load(&config)?;
    let ds = run_scan(&cfg)?;
    match output.or_else(|| cfg.output.csv.clone()) {
        Some(path) => {
            ds.write_csv(BufWriter::new(File::create(&path)?))?;
            eprintln!("wrote {} rows to {}", ds.rows.len(), path.display());
            if cfg.output.plot_script {
                let script = emit_plot_script(&path, None)?;
                eprintln!("wrote {}", script.display());
            }
        }
        None => ds.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn golden(corpus: &str) -> CliResult<()> {
    let report = run_golden(corpus)?;
    for o in &report.orders {
        println!(
            "O{}: {} ({} expected terms, {} computed)",
            o.order,
            if o.pass { "pass" } else { "FAIL" },
            o.expected_terms,
            o.computed_terms
        );
    }
    println!("{}: {}/{} orders match", report.id, report.passed(), report.orders.len());
    if report.all_pass() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("{} order(s) differ from the corpus", report.orders.len() - report.passed())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Scan { config, output, threads } => scan(config, output, threads),
        Command::Golden { corpus } => golden(&corpus),
        Command::Plot { dataset, output } => emit_plot_script(&dataset, output.as_deref()).map(|p| println!("{}", p.display())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
