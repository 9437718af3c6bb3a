mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use osx_core::error::ErrorClass;

#[derive(Parser, Debug)]
#[command(name = "osx", version, about = "Exact Lipschitz distances on Outer Space and its simplicial completion")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Require every input point to have this rank.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(2..))]
    pub rank: Option<u64>,
    /// Worker threads for the randomized suites.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lipschitz distance between two points of Outer Space.
    Distance {
        x: PathBuf,
        y: PathBuf,
        /// Symmetrized factor d(x,y) + d(y,x).
        #[arg(long)]
        sym: bool,
    },
    /// Extended distance between two completion points.
    Cdistance { s: PathBuf, t: PathBuf },
    /// Translation length of a word.
    Length {
        x: PathBuf,
        #[arg(short = 'w', long = "word")]
        word: String,
    },
    /// Candidate loops, extended for completion points.
    Candidates { x: PathBuf },
    /// Collapse a forest, or show the graph of groups of the zero-length part.
    Collapse {
        x: PathBuf,
        /// Comma-separated edge ids.
        #[arg(long)]
        edges: Option<String>,
    },
    /// Face point keeping the given edges.
    Face {
        x: PathBuf,
        #[arg(long)]
        keep: String,
    },
    /// Distance from a point to the face of a candidate image.
    Facedist {
        x: PathBuf,
        #[arg(long)]
        subgraph: String,
    },
    /// Translation lengths of the words in a file, one per line.
    Axes {
        t: PathBuf,
        #[arg(long)]
        words: PathBuf,
    },
    /// Pinch a subgraph along a decreasing schedule.
    Pinch {
        x: PathBuf,
        #[arg(long)]
        edges: String,
        #[arg(long)]
        schedule: String,
    },
    /// Interior point approximating a completion point.
    Approx {
        t: PathBuf,
        #[arg(long)]
        eps: String,
    },
    /// Sequence checks over a JSON list of points.
    Seq {
        #[command(subcommand)]
        action: SeqAction,
    },
    /// The family separating the axes and Lipschitz topologies.
    Strictness {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        m: u32,
    },
    /// Run the property suite.
    Verify {
        /// `all`, `quick`, or comma-separated criterion numbers.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Write the fixture points as JSON files.
    Fixtures {
        #[arg(long, env = "OSX_FIXTURES", default_value = "fixtures")]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum SeqAction {
    Check {
        /// JSON array of file paths or inline graphs.
        list: PathBuf,
        #[arg(long, value_enum)]
        kind: SeqKind,
        /// Decreasing epsilons, comma-separated.
        #[arg(long)]
        schedule: String,
        /// Second sequence, for `equiv`.
        #[arg(long)]
        other: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeqKind {
    Cauchy,
    Admissible,
    Equiv,
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
            println!("{}", if cli.global.json { out.json.to_string() } else { out.text });
            ExitCode::SUCCESS
        }
        Err(e) => {
            let (code, class) = match e.class() {
                ErrorClass::Malformed => (1, "malformed"),
                ErrorClass::Domain => (2, "domain"),
                ErrorClass::Internal => (3, "internal"),
            };
            if cli.global.json {
                eprintln!("{}", serde_json::json!({ "error": class, "message": e.to_string() }));
            } else {
                eprintln!("error ({class}): {e}");
            }
            ExitCode::from(code)
        }
    }
}
