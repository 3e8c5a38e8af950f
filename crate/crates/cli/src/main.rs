use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fuzzy_hausdorff::TailRule;
use fuzzy_hausdorff_cli::{
    load_document, run_compactness, run_convergence, run_gen, run_metrics, run_oracle_check, CliError, CliResult,
    CompactArgs, CompactMode, ConvergeMode, MetricKind, Report, Settings,
};

#[derive(Parser)]
#[command(name = "fzh", version, about = "Endograph and sendograph metrics on finite fuzzy sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Tail window length (default: max(5, len/10), capped at len).
    #[arg(long, global = true)]
    window: Option<usize>,
    /// Tail tolerance.
    #[arg(long, global = true, default_value_t = TailRule::DEFAULT_TOL)]
    tol: f64,
    /// Number of interior levels in the alpha grid.
    #[arg(long = "alpha-grid", global = true, default_value_t = 101)]
    alpha_grid: usize,
    /// Default seed for generators without one.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write a JSON version of the report to this path.
    #[arg(long = "emit-json", global = true)]
    emit_json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise distance matrix.
    Metrics {
        doc: PathBuf,
        /// end, send or level:ALPHA.
        #[arg(long, default_value = "send")]
        kind: String,
        /// Comma-separated set names (default: all declared sets).
        #[arg(long, value_delimiter = ',')]
        sets: Vec<String>,
    },
    /// Tail diagnostics for a sequence against a limit.
    Converge {
        doc: PathBuf,
        #[arg(long)]
        sequence: String,
        #[arg(long)]
        limit: String,
        /// gamma, end, send, level or all.
        #[arg(long, default_value = "all")]
        mode: String,
    },
    /// Compactness certificates for a family.
    Compact {
        doc: PathBuf,
        #[arg(long)]
        family: String,
        /// tb_end, tb_send, erc, rel_send or closedness.
        #[arg(long)]
        mode: String,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Candidate limit for closedness.
        #[arg(long)]
        candidate: Option<String>,
        /// Metric for closedness: end or send.
        #[arg(long)]
        metric: Option<String>,
    },
    /// Closed forms against grid oracles.
    Oracle {
        doc: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        #[arg(long, value_delimiter = ',')]
        sets: Vec<String>,
    },
    /// Expand generators into an explicit document.
    Gen { doc: PathBuf },
}

fn run(cli: Cli) -> CliResult<Report> {
    let c = &cli.common;
    let settings = Settings {
        window: c.window,
        tol: c.tol,
        alpha_grid: c.alpha_grid,
    };
    match cli.command {
        Command::Metrics { doc, kind, sets } => {
            let doc = load_document(&doc, c.seed)?;
            run_metrics(&doc, kind.parse::<MetricKind>()?, &sets)
        }
        Command::Converge {
            doc,
            sequence,
            limit,
            mode,
        } => {
            let doc = load_document(&doc, c.seed)?;
            run_convergence(&doc, &sequence, &limit, mode.parse::<ConvergeMode>()?, settings)
        }
        Command::Compact {
            doc,
            family,
            mode,
            eps,
            candidate,
            metric,
        } => {
            let doc = load_document(&doc, c.seed)?;
            let args = CompactArgs { eps, candidate, metric };
            run_compactness(&doc, &family, mode.parse::<CompactMode>()?, &args, settings)
        }
        Command::Oracle { doc, resolution, sets } => {
            let doc = load_document(&doc, c.seed)?;
            run_oracle_check(&doc, resolution, &sets)
        }
        Command::Gen { doc } => run_gen(&load_document(&doc, c.seed)?),
    }
}

fn write_outputs(report: &Report, out: Option<&PathBuf>, json: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, &report.csv)?,
        None => print!("{}", report.csv),
    }
    if let Some(path) = json {
        let mut text = serde_json::to_string_pretty(&report.json).expect("serializable");
        text.push('\n');
        fs::write(path, text)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.common.out.clone();
    let json = cli.common.emit_json.clone();
    let result = run(cli).and_then(|report| {
        write_outputs(&report, out.as_ref(), json.as_ref())?;
        Ok(report)
    });
    match result {
        Ok(report) => ExitCode::from(report.exit_code() as u8),
        Err(e) => {
            eprintln!("fzh: {e}");
            ExitCode::from(2)
        }
    }
}
