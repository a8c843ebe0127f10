//! `solve`, `round` and `plot`.

use std::fs;
use std::path::{Path, PathBuf};

use choremarket::oracle::brute_force_cu;
use choremarket::rounding::check_budgets_close;
use choremarket::solver::AllocationsError;
use choremarket::{
    all_allocations, check_ef11, check_prop1, round_fair, solve_with, Mode, Preprocessed, Rational, SolveOptions,
};
use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Signed;

use crate::error::CliError;
use crate::exact::{exact_matrix, exact_vec, parse_rational};
use crate::files::{
    parse_instance, to_json, Certificates, MetaRecord, OutcomeRecord, PreassignmentRecord, RoundingFile, SolutionFile,
};
use crate::plot;

pub const THREADS_VAR: &str = "CHOREMARKET_THREADS";

#[derive(Debug, Parser)]
#[command(name = "choremarket", version, about = "Competitive equilibria for dividing chores")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Direct,
    Dual,
    Auto,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Direct => Mode::Direct,
            ModeArg::Dual => Mode::Dual,
            ModeArg::Auto => Mode::Auto,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every competitive utility profile with an allocation and prices.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        /// Also report the unique allocation of each profile.
        #[arg(long)]
        all_allocations: bool,
        /// Cross-check against the brute-force oracle.
        #[arg(long)]
        oracle_check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// An indivisible allocation that is weighted-EF11 and weighted-Prop1.
    Round {
        file: PathBuf,
        /// Comma-separated positive weights; defaults to the budget magnitudes.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG of the utility set of a two-agent instance.
    Plot {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            file,
            mode,
            all_allocations,
            oracle_check,
            out,
        } => solve(&file, mode.into(), all_allocations, oracle_check, out.as_deref()),
        Command::Round { file, weights, out } => round(&file, weights.as_deref(), out.as_deref()),
        Command::Plot { file, out } => plot(&file, out.as_deref()),
    }
}

fn load(path: &Path) -> Result<Preprocessed, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_VAR) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .map(Some)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {v:?}"))),
        _ => Ok(None),
    }
}

pub fn solve(
    path: &Path,
    mode: Mode,
    want_allocations: bool,
    oracle_check: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let pre = load(path)?;
    let inst = &pre.instance;
    let opts = SolveOptions {
        mode,
        threads: threads_from_env()?,
        ..SolveOptions::default()
    };
    let mut sol = solve_with(inst, &opts);
    let mut allocations = None;
    let mut refused = None;
    if want_allocations {
        match all_allocations(inst, &sol) {
            Ok(zs) => {
                sol.meta.degenerate = Some(false);
                allocations = Some(
                    zs.iter()
                        .map(|z| exact_matrix(pre.expand_allocation(z).shares()))
                        .collect(),
                );
            }
            Err(AllocationsError::Degenerate) => {
                sol.meta.degenerate = Some(true);
                refused = Some(AllocationsError::Degenerate.to_string());
            }
            Err(AllocationsError::CapExceeded(e)) => return Err(CliError::CapExceeded(e.to_string())),
            Err(e @ AllocationsError::Peel { .. }) => return Err(CliError::Certificate(e.to_string())),
        }
    }
    let mut file = SolutionFile {
        profiles: sol.profiles.iter().map(|u| exact_vec(u)).collect(),
        outcomes: sol
            .outcomes
            .iter()
            .map(|o| OutcomeRecord {
                u: exact_vec(&o.u),
                z: exact_matrix(pre.expand_allocation(&o.z).shares()),
                p: exact_vec(&pre.expand_prices(&o.p)),
            })
            .collect(),
        preassigned: pre
            .preassigned
            .iter()
            .map(|a| PreassignmentRecord {
                chore: a.chore + 1,
                agent: a.agent + 1,
            })
            .collect(),
        allocations,
        allocations_refused: refused,
        meta: MetaRecord::from_meta(&sol.meta),
    };
    let mut mismatch = None;
    if oracle_check {
        let report = brute_force_cu(inst).map_err(|e| CliError::CapExceeded(e.to_string()))?;
        file.meta.oracle_profiles = Some(report.profiles.len());
        if report.profiles != sol.profiles {
            mismatch = Some(CliError::OracleMismatch {
                solver: sol.profiles.len(),
                oracle: report.profiles.len(),
            });
        }
    }
    emit(out, &to_json(&file))?;
    match mismatch {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn parse_weights(text: &str) -> Result<Vec<Rational>, CliError> {
    text.split(',')
        .map(|w| parse_rational(w).map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

pub fn round(path: &Path, weights: Option<&str>, out: Option<&Path>) -> Result<(), CliError> {
    let pre = load(path)?;
    let inst = &pre.instance;
    let beta = match weights {
        Some(text) => parse_weights(text)?,
        None => inst.budgets().iter().map(Signed::abs).collect(),
    };
    if beta.len() != inst.n() {
        return Err(CliError::Usage(format!(
            "expected {} weights, got {}",
            inst.n(),
            beta.len()
        )));
    }
    if let Some(k) = beta.iter().position(|w| !w.is_positive()) {
        return Err(CliError::Usage(format!("weight {} is not strictly positive", k + 1)));
    }
    let r = round_fair(inst, &beta).map_err(|e| CliError::Certificate(e.to_string()))?;
    let certificates = Certificates {
        ef11: check_ef11(inst, &r.allocation, &beta),
        prop1: check_prop1(inst, &r.allocation, &beta),
        budgets_close: check_budgets_close(&r.allocation, &r.prices, &r.budgets),
    };
    let mut owner = vec![0; pre.original_m];
    for (k, &j) in pre.chore_map.iter().enumerate() {
        owner[j] = r.allocation.owner[k] + 1;
    }
    for a in &pre.preassigned {
        owner[a.chore] = a.agent + 1;
    }
    let file = RoundingFile {
        owner,
        b_prime: exact_vec(&r.allocation.b_prime),
        p: exact_vec(&pre.expand_prices(&r.prices)),
        weights: exact_vec(&beta),
        certificates,
    };
    emit(out, &to_json(&file))?;
    if file.certificates.all() {
        Ok(())
    } else {
        Err(CliError::Certificate(format!("{:?}", file.certificates)))
    }
}

pub fn plot(path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let pre = load(path)?;
    let inst = &pre.instance;
    if inst.n() != 2 {
        return Err(CliError::Usage(format!(
            "plot needs exactly 2 agents, found {}",
            inst.n()
        )));
    }
    let sol = solve_with(
        inst,
        &SolveOptions {
            threads: threads_from_env()?,
            ..SolveOptions::default()
        },
    );
    emit(out, &plot::render(inst, &sol.profiles))
}
