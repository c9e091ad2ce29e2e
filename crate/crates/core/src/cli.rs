//! The `omd` command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::compose::{construct, Constructed, Construction};
use crate::design::{DesignArray, Hole, Transversal};
use crate::error::Error;
use crate::format::{from_json, to_grid, to_latex};
use crate::room::find_transversal;
use crate::search::{Search, SearchConfig, DEFAULT_BUDGET, DEFAULT_SEED, RNG_NAME};
use crate::verify::{verify, VerificationReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAIL: u8 = 1;
pub const EXIT_NONEXISTENT: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_PARSE: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "omd", version, about = "Build and check orthogonally resolvable matching designs")]
pub struct Cli {
    /// Seed for every randomized search.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Node budget for each search.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Grid,
    Latex,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct an OMD(n, k) and write it out.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a design file.
    Verify { path: PathBuf },
    /// Construct and verify every OMD(n, k) with n <= n-max, k <= k-max.
    Sweep {
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        k_max: usize,
    },
    /// Search for a transversal of a design file.
    Transversal { path: PathBuf },
}

impl Cli {
    fn config(&self) -> SearchConfig {
        SearchConfig { seed: self.seed, budget: self.budget }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = e.exit_code() as u8;
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            code
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let cfg = cli.config();
    let res = match &cli.command {
        Command::Generate { n, k, format, out: path } => {
            generate(*n, *k, &cfg, *format, path.as_deref(), out, err)
        }
        Command::Verify { path } => verify_file(path, out, err),
        Command::Sweep { n_max, k_max } => sweep_cmd(*n_max, *k_max, &cfg, out),
        Command::Transversal { path } => transversal_file(path, &cfg, out, err),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_VERIFY_FAIL
        }
    }
}

/// Exit code for a failed construction.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonExistent { .. } | Error::InvalidParameter(_) => EXIT_NONEXISTENT,
        Error::SearchExhausted { .. } => EXIT_BUDGET,
        _ => EXIT_VERIFY_FAIL,
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    construction: &'a Construction,
    description: String,
    seed: u64,
    budget: u64,
    rng: &'static str,
    transversal: &'a Option<Transversal>,
    hole: &'a Option<Hole>,
    report: &'a VerificationReport,
}

/// The JSON written by `generate`: the design fields plus a `meta` object,
/// which `verify` ignores.
#[derive(Serialize)]
struct Generated<'a> {
    #[serde(flatten)]
    design: &'a DesignArray,
    meta: Meta<'a>,
}

pub fn render_generated(c: &Constructed, cfg: &SearchConfig) -> String {
    let g = Generated {
        design: &c.design,
        meta: Meta {
            construction: &c.construction,
            description: c.construction.to_string(),
            seed: cfg.seed,
            budget: cfg.budget,
            rng: RNG_NAME,
            transversal: &c.transversal,
            hole: &c.hole,
            report: &c.report,
        },
    };
    let mut s = serde_json::to_string(&g).expect("serializable");
    s.push('\n');
    s
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => out.write_all(text.as_bytes()),
    }
}

fn generate(
    n: usize,
    k: usize,
    cfg: &SearchConfig,
    format: Format,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<u8> {
    let c = match construct(n, k, cfg) {
        Ok(c) => c,
        Err(e) => {
            writeln!(err, "OMD({n},{k}): {e}")?;
            return Ok(exit_code(&e));
        }
    };
    writeln!(err, "OMD({n},{k}) of side {}: {}", c.design.side(), c.construction)?;
    let text = match format {
        Format::Json => render_generated(&c, cfg),
        Format::Grid => to_grid(&c.design),
        Format::Latex => match to_latex(&c.design) {
            Ok(t) => t,
            Err(m) => {
                writeln!(err, "{m}")?;
                return Ok(EXIT_VERIFY_FAIL);
            }
        },
    };
    emit(path, &text, out)?;
    writeln!(err, "{}", c.report)?;
    Ok(EXIT_OK)
}

fn load(path: &Path, err: &mut dyn Write) -> std::io::Result<Option<DesignArray>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            writeln!(err, "{}: {e}", path.display())?;
            return Ok(None);
        }
    };
    match from_json(&text) {
        Ok(a) => Ok(Some(a)),
        Err(e) => {
            writeln!(err, "{}: not a design file: {e}", path.display())?;
            Ok(None)
        }
    }
}

fn verify_file(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<u8> {
    let Some(a) = load(path, err)? else { return Ok(EXIT_PARSE) };
    let report = verify(&a);
    writeln!(out, "OMD({},{}) over {}, side {}", a.n(), a.k(), a.host(), a.side())?;
    writeln!(out, "{report}")?;
    Ok(if report.passed { EXIT_OK } else { EXIT_VERIFY_FAIL })
}

fn transversal_file(
    path: &Path,
    cfg: &SearchConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<u8> {
    let Some(a) = load(path, err)? else { return Ok(EXIT_PARSE) };
    match find_transversal(&a, cfg.budget) {
        Search::Found(t) => {
            writeln!(out, "{}", serde_json::to_string(&t).expect("serializable"))?;
            Ok(EXIT_OK)
        }
        Search::Infeasible => {
            writeln!(err, "no transversal exists")?;
            Ok(EXIT_VERIFY_FAIL)
        }
        Search::Exhausted => {
            writeln!(err, "budget of {} nodes exhausted", cfg.budget)?;
            Ok(EXIT_BUDGET)
        }
    }
}

/// Whether an OMD(n, k) exists.
pub fn admissible(n: usize, k: usize) -> bool {
    k > 0 && n > 0 && n % (2 * k) == 0 && !(k == 1 && (n == 4 || n == 6))
}

/// One case of a sweep.
#[derive(Debug)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub outcome: Result<Constructed, Error>,
}

impl SweepRow {
    /// Verified, or correctly reported as nonexistent.
    pub fn ok(&self) -> bool {
        match &self.outcome {
            Ok(c) => c.report.passed,
            Err(Error::NonExistent { .. }) => !admissible(self.n, self.k),
            Err(_) => false,
        }
    }
}

/// Every `(n, k)` with `k <= k_max`, `n <= n_max`, `2k | n`, ordered by `(k, n)`.
pub fn sweep(n_max: usize, k_max: usize, cfg: &SearchConfig) -> Vec<SweepRow> {
    let cases: Vec<(usize, usize)> = (1..=k_max)
        .flat_map(|k| (1..).map(move |m| (2 * k * m, k)).take_while(|&(n, _)| n <= n_max))
        .collect();
    cases
        .into_par_iter()
        .map(|(n, k)| SweepRow { n, k, outcome: construct(n, k, cfg) })
        .collect()
}

fn sweep_cmd(n_max: usize, k_max: usize, cfg: &SearchConfig, out: &mut dyn Write) -> std::io::Result<u8> {
    let rows = sweep(n_max, k_max, cfg);
    writeln!(out, "{:>4} {:>3}  {:>5} {:>8}  {:<11}  construction", "n", "k", "side", "cells", "verified")?;
    let mut code = EXIT_OK;
    for row in &rows {
        let (side, cells, status, what) = match &row.outcome {
            Ok(c) => (
                c.design.side().to_string(),
                c.report.counts.non_empty.to_string(),
                if c.report.passed { "yes" } else { "NO" },
                c.construction.to_string(),
            ),
            Err(Error::NonExistent { reason, .. }) => {
                let status = if row.ok() { "nonexistent" } else { "NO" };
                ("-".into(), "-".into(), status, reason.clone())
            }
            Err(e @ Error::SearchExhausted { .. }) => ("-".into(), "-".into(), "exhausted", e.to_string()),
            Err(e) => ("-".into(), "-".into(), "NO", e.to_string()),
        };
        writeln!(out, "{:>4} {:>3}  {:>5} {:>8}  {:<11}  {}", row.n, row.k, side, cells, status, what)?;
        if !row.ok() {
            let this = match row.outcome {
                Err(Error::SearchExhausted { .. }) => EXIT_BUDGET,
                _ => EXIT_VERIFY_FAIL,
            };
            if code == EXIT_OK || this == EXIT_VERIFY_FAIL {
                code = this;
            }
        }
    }
    let failed = rows.iter().filter(|r| !r.ok()).count();
    writeln!(out, "{} cases, {} failed", rows.len(), failed)?;
    Ok(code)
}
