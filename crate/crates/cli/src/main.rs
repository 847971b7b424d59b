//! `apd`: construct, compose, search for and verify AP-destroying permutations.
//!
//! Exit status: 0 pass/found, 1 fail/none, 2 usage or precondition error.
//! Documents go to stdout, diagnostics to stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use apd::almost::{build_almost, build_almost_structural};
use apd::blocks::{block_rearrangement, build_destroyer};
use apd::catalog::table_entries;
use apd::crt::{check_coverage, compose_perms, Component, CrtBasis};
use apd::prime::prime_destroyer;
use apd::search::{search_perm, SearchConfig, SearchMode, SearchVerdict};
use apd::verify::{check_almost, check_pattern, check_patterns, survivor_stats};
use apd::{parse_perm, render_perm, Pattern, PatternSet, Perm, PermFormat};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "apd", version, about = "Permutations of Z_n that destroy arithmetic progressions")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Format of emitted permutation files.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl From<Format> for PermFormat {
    fn from(f: Format) -> PermFormat {
        match f {
            Format::Text => PermFormat::Text,
            Format::Json => PermFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Brute-force check a permutation and print its certificate.
    Verify {
        #[arg(long)]
        perm: PathBuf,
        #[command(flatten)]
        claims: Claims,
    },
    /// Backtracking search for a permutation destroying a pattern set.
    Search {
        #[arg(long)]
        n: usize,
        /// Comma-separated `s:t` list, e.g. `0:0,1:1,-1:2`.
        #[arg(long, allow_hyphen_values = true)]
        patterns: PatternSet,
        /// Fix π(0) = 0.
        #[arg(long)]
        normalize: bool,
        /// Node budget.
        #[arg(long)]
        limit: Option<u64>,
        /// Count every solution instead of stopping at the first.
        #[arg(long)]
        exhaustive: bool,
        /// Shuffle the value order with this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the witness here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Combine permutations of coprime moduli by the Chinese remainder theorem.
    Compose {
        /// Where to write the composite.
        #[arg(long)]
        out: PathBuf,
        /// Coverage range checked for the composite.
        #[arg(long, default_value_t = 1)]
        s: u64,
        #[arg(long, default_value_t = 2)]
        t: u64,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Build a permutation of Z_n from a master permutation.
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        master: PathBuf,
        /// Target tolerance: builds a (t, t)-almost destroyer from a
        /// (4t+7, 4t+7)-almost master. Without it, an AP destroyer from a
        /// (1, 2)-almost master.
        #[arg(long)]
        t: Option<usize>,
        /// Write the stage trace (JSON) here; needs --t.
        #[arg(long, requires = "t")]
        trace: Option<PathBuf>,
        /// Skip the master check (the result is still a permutation).
        #[arg(long)]
        unchecked: bool,
    },
    /// The quadratic-residue construction for a prime p ≡ 3 (mod 8).
    Prime {
        #[arg(long)]
        p: u64,
        /// Write a certificate including ξ here.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Operations on the embedded reference table.
    Table {
        #[command(subcommand)]
        action: TableAction,
    },
    /// Monte Carlo statistics of 0:0 survivors under random permutations.
    Stats {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum TableAction {
    /// Re-verify every row against its claims.
    Verify,
    /// Print one row as a permutation file.
    Show { row: usize },
}

#[derive(Args)]
struct Claims {
    /// Check (s, t)-almost destruction.
    #[arg(long, requires = "t", conflicts_with = "patterns")]
    s: Option<u64>,
    #[arg(long, requires = "s")]
    t: Option<u64>,
    /// Check an explicit pattern list.
    #[arg(long, allow_hyphen_values = true)]
    patterns: Option<PatternSet>,
}

/// A failure that maps to exit status 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Usage {
        Usage(e.to_string())
    }
}

type Run = Result<bool, Usage>;

fn read_perm(path: &Path) -> Result<Perm, Usage> {
    let src = fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    parse_perm(&src).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Usage> {
    fs::write(path, contents).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn verify(perm: &Path, claims: Claims) -> Run {
    let perm = read_perm(perm)?;
    let cert = match (claims.s, claims.t, claims.patterns) {
        (Some(s), Some(t), None) => check_almost(&perm, s, t)?,
        (None, None, Some(patterns)) => check_patterns(&perm, &patterns),
        _ => return Err(Usage("give either --s and --t, or --patterns".into())),
    };
    println!("{}", cert.to_json());
    Ok(cert.verdict.passed())
}

#[allow(clippy::too_many_arguments)]
fn search(
    n: usize,
    patterns: PatternSet,
    normalize: bool,
    limit: Option<u64>,
    exhaustive: bool,
    seed: Option<u64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    format: PermFormat,
) -> Run {
    let config = SearchConfig {
        patterns,
        normalize,
        node_limit: limit,
        threads: Some(threads.unwrap_or_else(rayon::current_num_threads)),
        seed,
        mode: if exhaustive { SearchMode::ExhaustiveCount } else { SearchMode::FirstFound },
    };
    let outcome = search_perm(n, &config)?;
    let (label, ok) = match (&outcome.verdict, outcome.count) {
        (SearchVerdict::Found(_), _) => ("found", true),
        (SearchVerdict::Exhausted, Some(c)) => ("exhausted", c > 0),
        (SearchVerdict::Exhausted, None) => ("exhausted", false),
        (SearchVerdict::LimitReached, _) => ("limit", false),
    };
    let mut doc = json!({ "n": n, "patterns": config.patterns.to_string(), "outcome": label, "nodes": outcome.nodes });
    if let Some(count) = outcome.count {
        doc["count"] = json!(count);
    }
    if let Some(w) = outcome.witness() {
        doc["perm"] = json!(w.images());
        if let Some(path) = &out {
            write(path, &render_perm(w, format))?;
        }
    }
    if matches!(outcome.verdict, SearchVerdict::LimitReached) {
        eprintln!("node limit reached before the search finished");
    }
    println!("{doc}");
    Ok(ok)
}

fn compose(out: &Path, s: u64, t: u64, files: &[PathBuf], format: PermFormat) -> Run {
    let mut components = Vec::with_capacity(files.len());
    for path in files {
        let perm = read_perm(path)?;
        components.push(Component::discover(path.display().to_string(), perm, s, t));
    }
    let moduli: Vec<u64> = components.iter().map(|c| c.perm.modulus() as u64).collect();
    let basis = CrtBasis::new(&moduli)?;
    let perms: Vec<Perm> = components.iter().map(|c| c.perm.clone()).collect();
    let composite = compose_perms(&perms, &basis)?;
    write(out, &render_perm(&composite, format))?;
    let report = check_coverage(&components, s, t);
    if let Some(problem) = report.first_failure() {
        eprintln!("coverage incomplete: {problem}");
    }
    println!("{}", serde_json::to_string(&report)?);
    Ok(report.passed())
}

fn build(
    n: usize,
    master: &Path,
    t: Option<usize>,
    trace: Option<PathBuf>,
    unchecked: bool,
    format: PermFormat,
) -> Run {
    let master = read_perm(master)?;
    let perm = match t {
        None if unchecked => block_rearrangement(n, &master)?,
        None => build_destroyer(n, &master)?,
        Some(t) => {
            let (perm, stages) =
                if unchecked { build_almost_structural(n, t, &master)? } else { build_almost(n, t, &master)? };
            if let Some(path) = trace {
                write(&path, &stages.to_json())?;
            }
            perm
        }
    };
    print!("{}", render_perm(&perm, format));
    Ok(true)
}

fn prime(p: u64, cert: Option<PathBuf>, format: PermFormat) -> Run {
    let c = prime_destroyer(p)?;
    let check = check_pattern(&c.perm, Pattern::new(0, 0));
    if let Some(path) = cert {
        let mut doc = check.to_json_value();
        doc["p"] = json!(p);
        doc["xi"] = json!(c.witness.xi);
        write(&path, &format!("{doc}\n"))?;
    }
    print!("{}", render_perm(&c.perm, format));
    Ok(check.verdict.passed())
}

fn table(action: TableAction, format: PermFormat) -> Run {
    match action {
        TableAction::Verify => {
            let mut all = true;
            for row in table_entries() {
                let cert = check_patterns(&row.perm, &row.claims);
                let verdict = if cert.verdict.passed() { "PASS" } else { "FAIL" };
                println!("{verdict} row {} n={} claims={}", row.index, row.modulus, row.claims);
                all &= cert.verdict.passed();
            }
            Ok(all)
        }
        TableAction::Show { row } => {
            let entry =
                apd::catalog::table_entry(row).ok_or_else(|| Usage(format!("no table row {row} (rows are 1-15)")))?;
            print!("{}", render_perm(&entry.perm, format));
            Ok(true)
        }
    }
}

fn stats(n: usize, trials: u64, seed: u64) -> Run {
    let s = survivor_stats(n, trials, seed)?;
    println!("{}", serde_json::to_string(&s)?);
    Ok(true)
}

fn run(cli: Cli) -> Run {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
    }
    let format = PermFormat::from(cli.format);
    match cli.command {
        Command::Verify { perm, claims } => verify(&perm, claims),
        Command::Search { n, patterns, normalize, limit, exhaustive, seed, out } => {
            search(n, patterns, normalize, limit, exhaustive, seed, out, cli.threads, format)
        }
        Command::Compose { out, s, t, files } => compose(&out, s, t, &files, format),
        Command::Build { n, master, t, trace, unchecked } => build(n, &master, t, trace, unchecked, format),
        Command::Prime { p, cert } => prime(p, cert, format),
        Command::Table { action } => table(action, format),
        Command::Stats { n, trials, seed } => stats(n, trials, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
