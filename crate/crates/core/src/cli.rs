//! Command line front end.
//!
//! Exit codes: `0` positive verdict, `1` negative verdict, `2` bad input or
//! usage.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{is_full_row_rank, ColoringResult, Force, PatternGraph};
use crate::network::StructuredNetwork;
use crate::oracle::{audit_network, AuditConfig, DEFAULT_RANK_TOLERANCE};
use crate::pattern::PatternMatrix;

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sscnet",
    version,
    about = "Strong structural controllability of structured networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide controllability of a network file and run the necessary checks.
    Check {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Decide strong full row rank of a pattern matrix file.
    Rank {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Extract the node-level topology and test weak colorability.
    Topo {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Sample numeric realizations and run the Kalman rank test on each.
    Audit {
        path: PathBuf,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_RANK_TOLERANCE)]
        tol: f64,
    },
    /// Print one of the network's pattern graphs in Graphviz DOT format.
    ExportDot {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::Assembled)]
        which: Which,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// G([A+BWC BH]) with its coloring
    Assembled,
    /// G([A+I+BWC BH]) with its coloring
    AssembledShifted,
    /// G([W H]) with its coloring
    Interconnection,
    /// G([W~ H~]) with its weak coloring
    Topology,
}

/// Parses `args` (program name first) and runs the command, writing the
/// result to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_YES };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let Error::AssumptionViolated(vs) = &e {
                for v in vs {
                    let _ = writeln!(err, "  {v}");
                }
            }
            EXIT_INPUT
        }
    }
}

fn verdict(b: bool) -> i32 {
    if b {
        EXIT_YES
    } else {
        EXIT_NO
    }
}

fn load_pattern(path: &Path) -> Result<PatternMatrix> {
    PatternMatrix::from_json_str(&std::fs::read_to_string(path)?)
}

fn load_network(path: &Path) -> Result<StructuredNetwork> {
    let net = StructuredNetwork::from_path(path)?;
    let violations = net.validate();
    if violations.is_empty() {
        Ok(net)
    } else {
        Err(Error::AssumptionViolated(violations))
    }
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn fmt_set(set: &BTreeSet<usize>) -> String {
    let items: Vec<String> = set.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

fn fmt_forces(seq: &[Force]) -> String {
    if seq.is_empty() {
        return "(none)".into();
    }
    seq.iter()
        .map(|f| format!("{}->{}", f.forcer, f.forced))
        .collect::<Vec<_>>()
        .join(" ")
}

fn indent(m: &PatternMatrix) -> String {
    m.to_string().lines().map(|l| format!("  {l}\n")).collect()
}

fn execute(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Check { path, json } => {
            let report = load_network(path)?.analyze();
            if *json {
                emit_json(out, &report)?;
            } else {
                write!(out, "{report}")?;
            }
            Ok(verdict(report.controllable == Some(true)))
        }
        Command::Rank { path, json } => {
            let m = load_pattern(path)?;
            let coloring = is_full_row_rank(&m)?;
            if *json {
                #[derive(Serialize)]
                struct RankReport<'a> {
                    rows: usize,
                    cols: usize,
                    full_row_rank: bool,
                    certificate: &'a ColoringResult,
                }
                emit_json(
                    out,
                    &RankReport {
                        rows: m.rows(),
                        cols: m.cols(),
                        full_row_rank: coloring.colorable,
                        certificate: &coloring,
                    },
                )?;
            } else {
                let label = if coloring.colorable {
                    "full row rank"
                } else {
                    "not full row rank"
                };
                writeln!(out, "{:<18}{label}", "verdict:")?;
                writeln!(
                    out,
                    "{:<18}{}",
                    "derived set:",
                    fmt_set(&coloring.derived_set)
                )?;
                writeln!(out, "{:<18}{}", "uncolored:", fmt_set(&coloring.uncolored))?;
                writeln!(
                    out,
                    "{:<18}{}",
                    "forcings:",
                    fmt_forces(&coloring.forcing_sequence)
                )?;
            }
            Ok(verdict(coloring.colorable))
        }
        Command::Topo { path, json } => {
            let check = load_network(path)?.topology_necessary_check()?;
            if *json {
                emit_json(out, &check)?;
            } else {
                write!(out, "W~ =\n{}", indent(&check.topology.w))?;
                write!(out, "H~ =\n{}", indent(&check.topology.h))?;
                let c = &check.coloring;
                writeln!(
                    out,
                    "{:<20}{}",
                    "weakly colorable:",
                    if c.colorable { "yes" } else { "no" }
                )?;
                writeln!(out, "{:<20}{}", "seeds:", fmt_set(&c.seeds))?;
                writeln!(out, "{:<20}{}", "reached:", fmt_set(&c.derived_set))?;
                writeln!(out, "{:<20}{}", "unreached:", fmt_set(&c.uncolored))?;
                writeln!(out, "{:<20}{}", "trace:", fmt_forces(&c.forcing_sequence))?;
            }
            Ok(verdict(check.weakly_colorable))
        }
        Command::Audit {
            path,
            trials,
            seed,
            tol,
        } => {
            let net = load_network(path)?;
            let cfg = AuditConfig::new(*trials as usize, *seed, *tol)?;
            let outcome = audit_network(&net, &cfg)?;
            #[derive(Serialize)]
            struct AuditReport<'a> {
                config: &'a AuditConfig,
                outcome: &'a crate::oracle::AuditOutcome,
            }
            emit_json(
                out,
                &AuditReport {
                    config: &cfg,
                    outcome: &outcome,
                },
            )?;
            Ok(verdict(outcome.consistent))
        }
        Command::ExportDot { path, which } => {
            let net = load_network(path)?;
            let (graph, coloring) = match which {
                Which::Assembled | Which::AssembledShifted => {
                    let asm = net.assemble()?;
                    let m = if *which == Which::Assembled {
                        asm.plain
                    } else {
                        asm.shifted
                    };
                    let g = PatternGraph::build(&m)?;
                    let c = g.color_change();
                    (g, c)
                }
                Which::Interconnection => {
                    let g = PatternGraph::build(&net.w.hstack(&net.h)?)?;
                    let c = g.color_change();
                    (g, c)
                }
                Which::Topology => {
                    let t = net.extract_topology()?;
                    let g = PatternGraph::build(&t.w.hstack(&t.h)?)?;
                    let c = g.weak_color_change();
                    (g, c)
                }
            };
            write!(out, "{}", graph.to_dot(Some(&coloring)))?;
            Ok(EXIT_YES)
        }
    }
}
