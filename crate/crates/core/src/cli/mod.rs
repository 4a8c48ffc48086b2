//! Command-line front end for the `esqkd` binary.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 when `verify` finds a
//! failing identity.

mod format;
pub mod verify;

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::adversary::AttackKind;
use crate::analysis::{
    correlation_table, detection_report, exact_round_stats, session_from_round, CorrelationTable, DetectionReport,
    Probability, Scenario,
};
use crate::protocol::{Distribution, Variant};

pub use format::{flatten_json, Format};

/// Version of the JSON and CSV report layout.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "esqkd", version, about = "Entanglement-swapping QKD simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact detection statistics for one protocol/attack pair, with an
    /// optional Monte Carlo cross-check.
    Simulate(SimulateArgs),
    /// Check every exact identity the simulator relies on.
    Verify(VerifyArgs),
    /// Session detection probability for n = 1..n_max.
    Curve(CurveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    Original,
    Modified,
}

impl From<ProtocolArg> for Variant {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Original => Variant::Original,
            ProtocolArg::Modified => Variant::Modified,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttackArg {
    None,
    Intercept,
    Delta,
    DeltaHpre,
    DeltaRandomH,
    Delayed,
    Source,
}

impl From<AttackArg> for AttackKind {
    fn from(a: AttackArg) -> Self {
        match a {
            AttackArg::None => AttackKind::None,
            AttackArg::Intercept => AttackKind::InterceptResend,
            AttackArg::Delta => AttackKind::DeltaSwap,
            AttackArg::DeltaHpre => AttackKind::DeltaSwapHPre,
            AttackArg::DeltaRandomH => AttackKind::DeltaSwapRandomH,
            AttackArg::Delayed => AttackKind::DelayedMeasurement,
            AttackArg::Source => AttackKind::SourceControl,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub protocol: ProtocolArg,
    #[arg(long, value_enum, default_value = "none")]
    pub attack: AttackArg,
    /// Rounds per session.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub rounds: u32,
    /// Monte Carlo sessions; 0 reports exact values only.
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Share of each session's rounds that are publicly compared, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub compare_fraction: f64,
    /// Alice prepares both pairs and sends qubits 2 and 4 to Bob.
    #[arg(long)]
    pub alice_prepares_both: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Corrupt the preparation circuit to exercise the failure path.
    #[arg(long, hide = true)]
    pub mutate_bell_phase: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[arg(long, value_enum)]
    pub attack: AttackArg,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub n_max: u32,
    #[arg(long, value_enum, default_value = "modified")]
    pub protocol: ProtocolArg,
    #[arg(long)]
    pub alice_prepares_both: bool,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSpec {
    pub protocol: Variant,
    pub attack: AttackKind,
    pub distribution: Distribution,
    pub rounds: u32,
    pub trials: u64,
    pub seed: u64,
    pub compare_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub run: RunSpec,
    pub report: DetectionReport,
    pub correlation_tables: Vec<CorrelationTable>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub n: u32,
    pub exact: Probability,
    pub closed_form: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveDocument {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub rows: Vec<CurveRow>,
}

fn scenario_for(protocol: ProtocolArg, attack: AttackArg, alice_prepares_both: bool) -> Scenario {
    let distribution = if alice_prepares_both {
        Distribution::AlicePreparesBoth
    } else {
        Distribution::Exchange
    };
    Scenario::new(protocol.into(), attack.into()).with_distribution(distribution)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(&a, out),
        Command::Verify(a) => verify(&a, out),
        Command::Curve(a) => curve(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

type CliResult = Result<i32, Box<dyn std::error::Error>>;

pub fn build_report(a: &SimulateArgs) -> crate::Result<ReportDocument> {
    let scenario = scenario_for(a.protocol, a.attack, a.alice_prepares_both);
    scenario.check()?;
    let report = detection_report(&scenario, a.rounds, a.compare_fraction, a.trials, a.seed)?;
    Ok(ReportDocument {
        schema_version: SCHEMA_VERSION,
        run: RunSpec {
            protocol: scenario.variant,
            attack: scenario.attack,
            distribution: scenario.distribution,
            rounds: a.rounds,
            trials: a.trials,
            seed: a.seed,
            compare_fraction: a.compare_fraction,
        },
        report,
        correlation_tables: correlation_table(&scenario)?,
    })
}

fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> CliResult {
    let doc = build_report(a)?;
    match a.format {
        Format::Json => format::write_json(out, &doc)?,
        Format::Csv => format::write_long_csv(out, &doc)?,
        Format::Table => format::write_report_table(out, &doc)?,
    }
    Ok(EXIT_OK)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult {
    let checks = verify::run_suite(verify::Mutation {
        flip_bell_phase: a.mutate_bell_phase,
    })?;
    let width = checks.iter().map(|c| c.anchor.len()).max().unwrap_or(0);
    for c in &checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{mark}  {:<width$}  {}", c.anchor, c.claim)?;
        if let (false, Some(d)) = (c.passed, &c.detail) {
            writeln!(out, "      {:<width$}  {d}", "")?;
        }
    }
    writeln!(out)?;
    writeln!(out, "second swap corrections on (R, T, U), by outcome on (3, S):")?;
    for line in verify::second_table_lines() {
        writeln!(out, "  {line}")?;
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.anchor).collect();
    writeln!(out)?;
    writeln!(
        out,
        "{} of {} identities hold",
        checks.len() - failed.len(),
        checks.len()
    )?;
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        writeln!(out, "failed: {}", failed.join("; "))?;
        Ok(EXIT_VERIFY_FAILED)
    }
}

pub fn build_curve(a: &CurveArgs) -> crate::Result<CurveDocument> {
    let scenario = scenario_for(a.protocol, a.attack, a.alice_prepares_both);
    let stats = exact_round_stats(&scenario)?;
    let rows = (1..=a.n_max)
        .map(|n| CurveRow {
            n,
            exact: session_from_round(&stats.detection, n),
            closed_form: scenario.closed_form_session(n),
        })
        .collect();
    Ok(CurveDocument {
        schema_version: SCHEMA_VERSION,
        scenario,
        rows,
    })
}

fn curve(a: &CurveArgs, out: &mut dyn Write) -> CliResult {
    let doc = build_curve(a)?;
    match a.format {
        Format::Json => format::write_json(out, &doc)?,
        Format::Csv => format::write_curve_csv(out, &doc)?,
        Format::Table => format::write_curve_table(out, &doc)?,
    }
    Ok(EXIT_OK)
}
