mod args;
mod commands;
mod error;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use intercausal::copositivity::{DEFAULT_SAMPLES, DEFAULT_SEED};

use args::{Deltas, Grid, IndexPair, Observation, Pair};

#[derive(Parser, Debug)]
#[command(name = "intercausal", version, about = "Qualitative intercausal reasoning on discrete belief networks")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    /// Seed for the sampling falsifier and random priors.
    #[arg(long, env = "INTERCAUSAL_SEED", default_value_t = DEFAULT_SEED, global = true)]
    seed: u64,
    /// Differences within this tolerance count as equalities.
    #[arg(long, default_value_t = 1e-9, global = true)]
    eps: f64,
    /// Samples for the falsifier on matrices beyond the exact-test size.
    #[arg(long, default_value_t = DEFAULT_SAMPLES, global = true)]
    samples: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and check a network file.
    Validate { file: PathBuf },
    /// Influence and synergy signs for every parent and pair of parents.
    Report { file: PathBuf },
    /// Product synergy of a pair of parents for one outcome of a child.
    Prodsyn {
        file: PathBuf,
        #[arg(long)]
        child: String,
        #[arg(long)]
        pair: Pair,
        #[arg(long)]
        outcome: String,
        /// 1: per instantiation of the other parents; 2: for every distribution over them.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
        version: u8,
    },
    /// Sign of the influence between two causes once their common effect is observed.
    Intercausal {
        file: PathBuf,
        #[arg(long)]
        pair: Pair,
        #[arg(long)]
        observe: Observation,
    },
    /// Intercausal sign under evidence on a child of the binary effect.
    Indirect {
        file: PathBuf,
        #[arg(long)]
        pair: Pair,
        /// The binary common effect.
        #[arg(long)]
        effect: String,
        /// Observed child of the effect; its influence gives the evidence direction.
        #[arg(long)]
        observed: Option<String>,
        /// Likelihood ratio Pr(d|C)/Pr(d|~C) of the evidence.
        #[arg(long)]
        lambda: Option<f64>,
        /// Signs d1,d2,d3,d4 given directly instead of derived from the network.
        #[arg(long, allow_hyphen_values = true)]
        deltas: Option<Deltas>,
        /// Distribution over the other parents of the effect (default: the network's).
        #[arg(long, value_delimiter = ',')]
        x_prior: Option<Vec<f64>>,
        #[arg(long, default_value = "0,1")]
        a_pair: IndexPair,
        #[arg(long, default_value = "0,1")]
        b_pair: IndexPair,
    },
    /// Oracle influence along a grid of priors or likelihood ratios, as CSV.
    #[command(group(ArgGroup::new("mode").required(true).args(["prior", "lambda"])))]
    Sweep {
        file: PathBuf,
        #[arg(long)]
        pair: Pair,
        /// Binary root whose prior is swept.
        #[arg(long, requires = "grid")]
        prior: Option<String>,
        #[arg(long)]
        grid: Option<Grid>,
        #[arg(long)]
        observe: Option<Observation>,
        /// Likelihood-ratio grid for virtual evidence on --effect.
        #[arg(long, requires = "effect", conflicts_with_all = ["grid", "observe"])]
        lambda: Option<Grid>,
        #[arg(long)]
        effect: Option<String>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compare the observed-effect verdict with the oracle on random priors.
    OracleCheck {
        file: PathBuf,
        #[arg(long)]
        pair: Pair,
        #[arg(long)]
        observe: Observation,
        #[arg(long, default_value_t = 100)]
        priors: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            let text = match cli.format {
                Format::Human => out.human,
                Format::Json => serde_json::to_string_pretty(&out.json).expect("json") + "\n",
            };
            // A closed pipe downstream is not our failure.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status())
        }
    }
}
