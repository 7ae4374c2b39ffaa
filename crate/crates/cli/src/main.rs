mod commands;
mod manifest;
mod plot;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Update-family classification, bootstrap closures, droplet events and KCM
/// simulation.
#[derive(Parser, Debug)]
#[command(name = "kcmlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    /// family file, or the name of a bundled family
    pub family: String,
    /// infection density; `estimate` accepts a comma-separated sweep
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<f64>,
    /// torus side
    #[arg(long = "L", default_value_t = 64)]
    pub l: i64,
    #[arg(long, default_value_t = 1000.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 100)]
    pub replicates: u64,
    #[arg(long)]
    pub seed: u64,
    /// `torus`, `single-site` (one site, infected boundary) or `chain:N`
    /// (N sites on a row, infected boundary, target at the right end)
    #[arg(long, default_value = "torus")]
    pub system: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stable directions, difficulties, α and the universality class
    Classify {
        family: String,
        #[arg(long)]
        box_radius: Option<i64>,
        /// print the full report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Bootstrap closure of an initial set (JSON list of [x, y])
    Closure {
        family: String,
        initial: PathBuf,
        /// window [x0,x1]×[y0,y1]; defaults to the initial set's bounding box grown by --margin
        #[arg(long, num_args = 4, value_names = ["X0", "X1", "Y0", "Y1"], allow_negative_numbers = true)]
        window: Option<Vec<i64>>,
        #[arg(long, default_value_t = 10)]
        margin: i64,
        /// closure site list; a run-length grid goes to <out>.grid
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One CSV row per replicate: infection time of the target
    Simulate(SimArgs),
    /// Mean infection time with confidence interval, one row per q
    Estimate {
        #[command(flatten)]
        sim: SimArgs,
        /// SVG plot of log(mean τ) against 1/q^α
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Monte Carlo probabilities of droplet and helping events
    Events {
        /// family file or bundled name (tower mode)
        family: Option<String>,
        /// `tower`, `segment` or `harris`
        #[arg(long, default_value = "tower")]
        mode: String,
        #[arg(long, default_value = "iso")]
        tower: String,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// segment length (segment mode)
        #[arg(long, default_value_t = 30)]
        length: usize,
        /// run length W (segment mode) or schedule override (tower mode)
        #[arg(long)]
        w: Option<usize>,
        /// iso doubling rounds
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        #[arg(long)]
        trim: Option<i64>,
        #[arg(long)]
        ring_side: Option<i64>,
        #[arg(long, default_value_t = 40.0)]
        max_side: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check result files against their manifests and evaluate them
    Report {
        #[arg(required = true)]
        manifests: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit codes: 0 success, 2 validation error, 3 inconclusive verdict,
/// 4 acceptance failure.
pub enum Outcome {
    Ok,
    Inconclusive,
    Failed,
}

fn main() -> ExitCode {
    if let Ok(n) = std::env::var("KCMLAB_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
            }
            _ => {
                eprintln!("error: KCMLAB_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Classify { family, box_radius, json } => commands::classify(&family, box_radius, json),
        Command::Closure { family, initial, window, margin, out } => {
            commands::closure(&family, &initial, window, margin, out.as_deref())
        }
        Command::Simulate(a) => commands::simulate(&a),
        Command::Estimate { sim, plot } => commands::estimate(&sim, plot.as_deref()),
        Command::Events {
            family,
            mode,
            tower,
            q,
            samples,
            seed,
            length,
            w,
            rounds,
            trim,
            ring_side,
            max_side,
            out,
        } => commands::events(commands::EventArgs {
            family,
            mode,
            tower,
            q,
            samples,
            seed,
            length,
            w,
            rounds,
            trim,
            ring_side,
            max_side,
            out,
        }),
        Command::Report { manifests, out } => report::report(&manifests, out.as_deref()),
    };
    match res {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Inconclusive) => ExitCode::from(3),
        Ok(Outcome::Failed) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
