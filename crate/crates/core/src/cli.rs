//! Command-line front end.
//!
//! Exit status: 0 when a check holds (or a command succeeds), 1 when a check
//! fails, 2 on usage, parse or I/O errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::cnf::{CnfFormula, Lit, PartialAssignment, Var, VarNames};
use crate::dimacs;
use crate::oracle::{Constraint, DEFAULT_ENUM_LIMIT};
use crate::propagate::{propagate_fixpoint, render_fixpoint, trace_input, InputStage};
use crate::reduce::{compose_upac, contra_to_prop, prop_to_contra, SideMap};
use crate::verify::{check_stage_correspondence, check_stage_correspondence_all, is_upac, is_upi, Verdict};

/// Environment variable overriding the enumeration limit of the verifiers.
pub const LIMIT_ENV: &str = "UNITRES_ENUM_LIMIT";

#[derive(Debug, Parser)]
#[command(name = "unitres", version, about = "Unit resolution over partial assignments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run unit propagation to fixpoint or first conflict.
    Propagate {
        cnf: PathBuf,
        /// Input literals in DIMACS signs, e.g. "-2 4".
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        assign: String,
    },
    /// Print the inference trace as a table or as line records.
    Trace {
        cnf: PathBuf,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        assign: String,
        /// Use the stage-by-stage engine instead of the worklist engine.
        #[arg(long)]
        staged: bool,
        /// With --staged: make the assignment the stage-0 set instead of
        /// restriction units firing at stage 1.
        #[arg(long, requires = "staged")]
        initial: bool,
        /// Maximum number of stages (default: number of variables + 2).
        #[arg(long)]
        max_stages: Option<usize>,
        /// Emit one record per inference instead of a table.
        #[arg(long)]
        records: bool,
        /// Names for variables 1, 2, ... separated by spaces.
        #[arg(long)]
        names: Option<String>,
        /// Side map of a reduced formula, used to name its fresh variables.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Contradiction → propagation: build the stage simulation.
    #[command(name = "reduce-c2p")]
    ReduceC2p {
        cnf: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Propagation → contradiction: append the negated output literal.
    #[command(name = "reduce-p2c")]
    ReduceP2c {
        cnf: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        omega: i64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compose an arc-consistent encoding from an inconsistency-detecting one.
    #[command(name = "compose-upac")]
    ComposeUpac {
        cnf: PathBuf,
        /// Input variables of the constraint, e.g. "1 2 3".
        #[arg(long)]
        vars: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check that propagation detects every falsifying partial assignment.
    #[command(name = "verify-upi")]
    VerifyUpi {
        cnf: PathBuf,
        /// "atmost <k> of <n>", "table <n> <bits>" or "cnf <path>".
        #[arg(long)]
        constraint: String,
    },
    /// Check that propagation also restores generalized arc consistency.
    #[command(name = "verify-upac")]
    VerifyUpac {
        cnf: PathBuf,
        #[arg(long)]
        constraint: String,
    },
    /// Check the stage correspondence between a formula and its simulation.
    #[command(name = "verify-hm")]
    VerifyHm {
        cnf: PathBuf,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "all")]
        assign: Option<String>,
        /// Sweep every partial assignment (the default).
        #[arg(long)]
        all: bool,
    },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

type CliResult = std::result::Result<i32, Failure>;

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("usage error");
            let _ = writeln!(err, "{}", line.trim_start_matches("error: "));
            return 2;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(Failure(message)) => {
            let _ = writeln!(err, "{message}");
            2
        }
    }
}

fn enum_limit() -> std::result::Result<usize, Failure> {
    match std::env::var(LIMIT_ENV) {
        Ok(value) => value
            .trim()
            .parse()
            .map_err(|_| Failure(format!("{LIMIT_ENV} must be a non-negative integer, got `{value}`"))),
        Err(_) => Ok(DEFAULT_ENUM_LIMIT),
    }
}

fn load(path: &Path) -> std::result::Result<CnfFormula, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    dimacs::parse_bytes(&bytes).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn parse_assignment(text: &str) -> std::result::Result<PartialAssignment, Failure> {
    let lits = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<i64>()
                .map_err(|_| Failure(format!("invalid literal `{tok}` in assignment")))
                .and_then(|v| Lit::from_dimacs(v).map_err(Failure::from))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(PartialAssignment::from_lits(lits)?)
}

fn parse_constraint(spec: &str) -> std::result::Result<Constraint, Failure> {
    let trimmed = spec.trim();
    if let Some(path) = trimmed.strip_prefix("cnf ") {
        return Ok(Constraint::from_cnf(load(Path::new(path.trim()))?)?);
    }
    Ok(trimmed.parse()?)
}

fn write_formula(formula: &CnfFormula, output: Option<&Path>, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    match output {
        Some(path) => {
            fs::write(path, dimacs::emit(formula)).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            writeln!(
                out,
                "WROTE {} vars={} clauses={} size={}",
                path.display(),
                formula.num_vars(),
                formula.num_clauses(),
                formula.size()
            )?;
        }
        None => out.write_all(dimacs::emit(formula).as_bytes())?,
    }
    Ok(())
}

fn verdict_exit(verdict: &Verdict, out: &mut dyn Write) -> CliResult {
    write!(out, "{verdict}")?;
    Ok(if verdict.holds() { 0 } else { 1 })
}

fn execute(command: Command, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Propagate { cnf, assign } => {
            let formula = load(&cnf)?;
            let assignment = parse_assignment(&assign)?;
            let outcome = propagate_fixpoint(&formula.restrict(&assignment)?);
            match outcome.conflict_clause {
                Some(ci) => writeln!(out, "CONFLICT: clause {ci}")?,
                None => {
                    let lits: Vec<String> = outcome.final_set.iter().map(|l| l.to_string()).collect();
                    if lits.is_empty() {
                        writeln!(out, "FIXPOINT:")?;
                    } else {
                        writeln!(out, "FIXPOINT: {}", lits.join(" "))?;
                    }
                }
            }
            Ok(0)
        }
        Command::Trace {
            cnf,
            assign,
            staged,
            initial,
            max_stages,
            records,
            names,
            map,
        } => {
            let formula = load(&cnf)?;
            let assignment = parse_assignment(&assign)?;
            let mut var_names = match names {
                Some(list) => VarNames::from_list(&list.split_whitespace().collect::<Vec<_>>()),
                None => VarNames::new(),
            };
            if let Some(path) = map {
                let text = fs::read_to_string(&path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
                var_names = SideMap::parse(&text)
                    .map_err(|e| Failure(format!("{}: {e}", path.display())))?
                    .names(&var_names);
            }
            if staged {
                let input = if initial {
                    InputStage::Initial
                } else {
                    InputStage::RestrictionUnits
                };
                let limit = max_stages.unwrap_or(formula.num_vars() as usize + 2);
                let trace = trace_input(&formula, &assignment, input, limit)?;
                let shown = match input {
                    InputStage::Initial => formula.clone(),
                    InputStage::RestrictionUnits => formula.restrict(&assignment)?,
                };
                if records {
                    write!(out, "{}", trace.render_records())?;
                } else {
                    write!(out, "{}", trace.render_table(&shown, &var_names))?;
                }
            } else {
                let restricted = formula.restrict(&assignment)?;
                let outcome = propagate_fixpoint(&restricted);
                if records {
                    for (step, i) in outcome.trail.iter().enumerate() {
                        writeln!(out, "INFER {} {} {}", step + 1, i.clause, i.lit)?;
                    }
                    if let Some(ci) = outcome.conflict_clause {
                        writeln!(out, "CONFLICT {} {ci}", outcome.trail.len() + 1)?;
                    }
                } else {
                    write!(out, "{}", render_fixpoint(&outcome, &restricted, &var_names))?;
                }
            }
            Ok(0)
        }
        Command::ReduceC2p { cnf, output, map } => {
            let formula = load(&cnf)?;
            let reduction = contra_to_prop(&formula)?;
            write_formula(&reduction.formula, output.as_deref(), out)?;
            if let Some(path) = map {
                fs::write(&path, reduction.map.to_side_map()).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            }
            if output.is_some() {
                let c = reduction.counts;
                writeln!(
                    out,
                    "COUNTS injection={} replication={} deduction={} unit={} collection={} total={}",
                    c.injection,
                    c.replication,
                    c.deduction,
                    c.unit,
                    c.collection,
                    c.total()
                )?;
            }
            Ok(0)
        }
        Command::ReduceP2c { cnf, omega, output } => {
            let formula = load(&cnf)?;
            let reduced = prop_to_contra(&formula, Lit::from_dimacs(omega)?)?;
            write_formula(&reduced, output.as_deref(), out)?;
            Ok(0)
        }
        Command::ComposeUpac { cnf, vars, output } => {
            let formula = load(&cnf)?;
            let inputs = vars
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u32>()
                        .map_err(|_| Failure(format!("invalid variable `{tok}`")))
                        .and_then(|id| Var::new(id).map_err(Failure::from))
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let composition = compose_upac(&formula, &inputs)?;
            write_formula(&composition.formula, output.as_deref(), out)?;
            Ok(0)
        }
        Command::VerifyUpi { cnf, constraint } => {
            let formula = load(&cnf)?;
            let q = parse_constraint(&constraint)?;
            verdict_exit(&is_upi(&formula, &q, enum_limit()?)?, out)
        }
        Command::VerifyUpac { cnf, constraint } => {
            let formula = load(&cnf)?;
            let q = parse_constraint(&constraint)?;
            verdict_exit(&is_upac(&formula, &q, enum_limit()?)?, out)
        }
        Command::VerifyHm { cnf, assign, all: _ } => {
            let formula = load(&cnf)?;
            let verdict = match assign {
                Some(text) => check_stage_correspondence(&formula, &parse_assignment(&text)?)?,
                None => check_stage_correspondence_all(&formula, enum_limit()?)?,
            };
            verdict_exit(&verdict, out)
        }
    }
}
