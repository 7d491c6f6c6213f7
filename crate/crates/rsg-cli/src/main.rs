//! `rsg`: pipelines over edge shifts, rational transducers, Thompson groups
//! V_{Γ,E}, rational similarity groups and trees of atoms.

mod bundle;
mod commands;
mod demo;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;
use crate::output::Outcome;

#[derive(Parser, Debug)]
#[command(name = "rsg", version, about = "Rational similarity groups, nuclei and trees of atoms")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Input bundle (JSON).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Directory for JSON/DOT/CSV artifacts.
    #[arg(long, global = true, env = "RSG_OUT_DIR")]
    pub out: Option<PathBuf>,
    /// Refinement or descendant depth.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Pool horizon D for atoms.
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// State budget for machine constructions.
    #[arg(long = "budget-states", global = true)]
    pub budget_states: Option<usize>,
    /// Worker count. Runs are serial; the value is recorded.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Print the JSON result instead of the summary.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Directed graphs: subshift checks, cores, classes groups.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Rational transducers.
    #[command(subcommand)]
    Trans(TransCmd),
    /// Thompson group V_{Γ,E}.
    #[command(subcommand)]
    V(VCmd),
    /// Full RSGs from a certified nucleus.
    #[command(subcommand)]
    Rsg(RsgCmd),
    /// Trees of atoms and type graphs of Cayley graphs.
    #[command(subcommand)]
    Atoms(AtomsCmd),
    /// Mapping triples, nucleus extraction and certificates.
    #[command(subcommand)]
    Hyp(HypCmd),
    /// Named reproductions.
    Demo(DemoArgs),
}

#[derive(Subcommand, Debug)]
pub enum GraphCmd {
    Check,
    Core,
    Classes,
}

#[derive(Subcommand, Debug)]
pub enum TransCmd {
    Eval,
    /// maps[0] ∘ maps[1].
    Compose,
    Invert,
    Nucleus,
    VerifyNucleus,
}

#[derive(Subcommand, Debug)]
pub enum VCmd {
    /// v[0] ∘ v[1].
    Compose,
    MapCones,
    PushCore,
}

#[derive(Subcommand, Debug)]
pub enum RsgCmd {
    Member,
    /// elements[0] ∘ elements[1].
    Compose,
    Normalish,
    KerDel1,
    Germ,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    /// Oracle JSON, e.g. {"kind":"free","rank":2}; overrides the bundle.
    #[arg(long)]
    pub oracle: Option<String>,
    /// Highest level L.
    #[arg(long)]
    pub level: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum AtomsCmd {
    Build(OracleArgs),
    Types(OracleArgs),
    Addresses(OracleArgs),
}

#[derive(Subcommand, Debug)]
pub enum HypCmd {
    Triple {
        #[command(flatten)]
        oracle: OracleArgs,
        /// Group element g as a word.
        #[arg(long)]
        g: String,
        /// Cone root w as a word.
        #[arg(long)]
        w: String,
    },
    Nucleus(OracleArgs),
    Certify(OracleArgs),
}

#[derive(Args, Debug)]
pub struct DemoArgs {
    /// One of: classes, z2-atoms, ternary, binary, wreath, parity, free2, free-product, houghton.
    pub name: String,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let c = &cli.common;
    if c.jobs == 0 {
        return Err(CliError::Usage("--jobs must be positive".into()));
    }
    for (name, v) in [("depth", c.depth), ("horizon", c.horizon), ("budget-states", c.budget_states)] {
        if v == Some(0) {
            return Err(CliError::Usage(format!("--{name} must be positive")));
        }
    }
    match &cli.cmd {
        Command::Graph(x) => commands::graph(c, x),
        Command::Trans(x) => commands::trans(c, x),
        Command::V(x) => commands::v(c, x),
        Command::Rsg(x) => commands::rsg(c, x),
        Command::Atoms(x) => commands::atoms(c, x),
        Command::Hyp(x) => commands::hyp(c, x),
        Command::Demo(d) => demo::run(c, d),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|o| output::emit(&cli, o)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
