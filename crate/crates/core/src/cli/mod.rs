//! Command-line front end.

pub mod commands;
pub mod examples;
pub mod formats;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric_graph::Model;
use crate::rational::parse_q;

pub use commands::{cmd_extremals, cmd_info, cmd_realize, cmd_realize_canonical, Granularity, OutputMode};

#[derive(Debug, Parser)]
#[command(name = "tropaut", version, about = "Linear systems on metric graphs and tropical realizations of their automorphism groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Genus, canonical divisor, valences and automorphism count of a graph.
    Info {
        graph: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Minimal generating set of R(D).
    Extremals {
        graph: PathBuf,
        #[command(flatten)]
        divisor: DivisorArgs,
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Also report the lattice rank of D.
        #[arg(long)]
        rank: bool,
        #[arg(long)]
        json: bool,
    },
    /// Matrix realizations of a finite automorphism group.
    Realize {
        graph: PathBuf,
        #[command(flatten)]
        divisor: DivisorArgs,
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, value_enum, default_value = "all")]
        mode: OutputMode,
        #[arg(long)]
        json: bool,
    },
    /// Write the bundled example inputs into a directory.
    Examples { dir: PathBuf },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DivisorArgs {
    /// Divisor file with `chip <point> <n>` lines.
    pub divisor: Option<PathBuf>,
    /// Use the canonical divisor.
    #[arg(long)]
    pub canonical: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct GroupArgs {
    /// Use the full automorphism group.
    #[arg(long)]
    pub aut: bool,
    /// Group file with generators.
    #[arg(long, value_name = "FILE")]
    pub group: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// Lattice spacing `p/q`; must divide every length, support offset and group constraint.
    #[arg(long, value_name = "P/Q", conflicts_with = "refine")]
    pub granularity: Option<String>,
    /// Divide the default lattice spacing by N.
    #[arg(long, value_name = "N", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub refine: u32,
}

impl LatticeArgs {
    fn resolve(&self) -> Result<Granularity> {
        match &self.granularity {
            Some(s) => Ok(Granularity::Explicit(parse_q(s)?)),
            None => Ok(Granularity::Refine(self.refine)),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<Arc<Model>> {
    Ok(Arc::new(formats::parse_model(&read(path)?)?))
}

fn load_divisor(m: &Model, args: &DivisorArgs) -> Result<crate::divisor::Divisor> {
    match (&args.divisor, args.canonical) {
        (_, true) => Ok(m.canonical_divisor()),
        (Some(p), false) => formats::parse_divisor(m, &read(p)?),
        (None, false) => Err(Error::Io("a divisor file or --canonical is required".into())),
    }
}

fn emit<T: Serialize>(report: &T, text: String, json: bool) -> Result<String> {
    if json {
        let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    } else {
        Ok(text)
    }
}

/// Runs a command, returning its output and exit status: 0 on success, 2
/// when a verification or injectivity check fails.
pub fn run(cli: &Cli) -> Result<(String, i32)> {
    match &cli.command {
        Command::Info { graph, json } => {
            let m = load_model(graph)?;
            let r = cmd_info(&m)?;
            Ok((emit(&r, r.to_text(), *json)?, 0))
        }
        Command::Extremals { graph, divisor, lattice, rank, json } => {
            let m = load_model(graph)?;
            let d = load_divisor(&m, divisor)?;
            let r = cmd_extremals(&m, d, &lattice.resolve()?, *rank)?;
            let code = if r.passed() { 0 } else { 2 };
            Ok((emit(&r, r.to_text(), *json)?, code))
        }
        Command::Realize { graph, divisor, group, lattice, mode, json } => {
            let m = load_model(graph)?;
            let spec = match &group.group {
                Some(p) => formats::parse_group(&m, &read(p)?)?,
                None => formats::GroupSpec::Auto,
            };
            let g = formats::resolve_group(&m, &spec)?;
            let gran = lattice.resolve()?;
            let r = if divisor.canonical {
                cmd_realize_canonical(&m, &g, &gran, *mode)?
            } else {
                cmd_realize(&m, load_divisor(&m, divisor)?, &g, &gran, *mode)?
            };
            let code = if r.passed() { 0 } else { 2 };
            Ok((emit(&r, r.to_text(), *json)?, code))
        }
        Command::Examples { dir } => {
            let written = examples::write_examples(dir)?;
            let text = written.iter().map(|p| format!("{}\n", p.display())).collect();
            Ok((text, 0))
        }
    }
}

/// Remediation hint for an error, if there is one.
pub fn hint(e: &Error) -> Option<&'static str> {
    match e {
        Error::InfiniteGroup => Some("supply a finite subgroup with --group (rotate/reflect lines)"),
        Error::Granularity { .. }
        | Error::NoInvariantRepresentative { .. }
        | Error::NoExtremals { .. }
        | Error::NotInjective(_) => {
            Some("try a finer lattice with --refine N or an explicit --granularity")
        }
        Error::Hyperelliptic => Some("the canonical map is 2-to-1 here; choose another divisor"),
        Error::EmptySystem => Some("D is not equivalent to an effective divisor"),
        _ => None,
    }
}
