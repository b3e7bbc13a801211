//! `khx`: Khovanov homology, movie maps and verification suites from the
//! command line. Every run prints one JSON report on stdout.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kh_core::EdgeId;

use commands::{RingArg, Suite};
use report::Recorder;

#[derive(Parser)]
#[command(name = "khx", version, about = "Khovanov homology workbench")]
struct Cli {
    /// print the report on one line
    #[arg(long, global = true)]
    compact: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Homology of a PD diagram file.
    Kh {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "f2")]
        ring: RingArg,
        #[arg(long)]
        reduced: bool,
        /// basepoint edge; defaults to the minimal edge of the first component
        #[arg(long)]
        bp: Option<EdgeId>,
    },
    /// Map on homology induced by a movie file (JSON lines).
    Map {
        file: PathBuf,
        #[arg(long)]
        reduced: bool,
        #[arg(long)]
        bp: Option<EdgeId>,
    },
    /// Run a check suite on a diagram, a movie or a bundle directory.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        target: PathBuf,
        #[arg(long)]
        bp: Option<EdgeId>,
    },
    /// Build the companion bundle for n copies of a knot with ears.
    Construct {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// knot diagram to cut open; the trefoil by default
        #[arg(long)]
        knot: Option<PathBuf>,
        /// directory for composite.pd, companion.pd, movie.jsonl, bundle.json
        #[arg(long)]
        out: Option<PathBuf>,
        /// also report where Sq1 is nonzero on the companion
        #[arg(long)]
        sq1: bool,
    },
}

fn init_threads() {
    if let Some(n) = std::env::var("KH_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()).filter(|&n| n > 0) {
        // fails only if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let mut rec = Recorder::new(std::env::args().skip(1).collect());
    let outcome = match &cli.cmd {
        Cmd::Kh { file, ring, reduced, bp } => commands::cmd_kh(&mut rec, file, *ring, *reduced, *bp),
        Cmd::Map { file, reduced, bp } => commands::cmd_map(&mut rec, file, *reduced, *bp),
        Cmd::Verify { suite, target, bp } => commands::cmd_verify(&mut rec, *suite, target, *bp),
        Cmd::Construct { n, knot, out, sq1 } => commands::cmd_construct(&mut rec, *n, knot.as_deref(), out.as_ref(), *sq1),
    };
    let (report, code) = rec.finish(outcome);
    let text = if cli.compact { serde_json::to_string(&report) } else { serde_json::to_string_pretty(&report) };
    // a closed pipe is not worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{}", text.expect("report serializes"));
    ExitCode::from(code as u8)
}
