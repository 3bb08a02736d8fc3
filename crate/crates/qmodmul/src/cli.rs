//! Command-line front end: argument parsing, the four subcommands, and the
//! structured report they emit.
//!
//! Subcommands:
//!
//! * `run`: execute chosen schemes on one input (or sweep all inputs) and
//!   check each case against the ideal target state;
//! * `verify`: full sweep of all schemes, inputs, and measurement outcomes
//!   for one `(N, a)`, plus oracle invariant checks;
//! * `count`: gate counts per scheme by circuit traversal;
//! * `compare`: counts for all three schemes side by side with the
//!   Toffoli-savings identities.
//!
//! Exit codes: 0 all checks passed, 1 at least one verification case failed,
//! 2 invalid input, 3 a guardrail refused the request. Reports are
//! reproducible: the same invocation yields byte-identical JSON except for
//! the `wall_clock_ms` field.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::modarith::{gcd, SchemeParams};
use crate::resources::{compare_schemes, scheme_cost, SchemeComparison, SchemeCost};
use crate::schemes::{
    build_parity_oracle, layout_for, parity_phase, verify_scheme, ParityMask, SchemeKind,
    VerifyMode,
};

/// Seed used when none is given, so reports are reproducible by default.
pub const DEFAULT_SEED: u64 = 42;

/// Largest modulus `run` and `verify` will simulate.
pub const MAX_SIMULATED_MODULUS: u64 = 63;

/// Largest modulus `compare` will accept.
pub const MAX_COMPARED_MODULUS: u64 = 4096;

#[derive(Parser, Debug)]
#[command(
    name = "qmodmul",
    version,
    about = "Simulate, verify, and count controlled modular multiplication circuits"
)]
pub struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Run schemes on one input value and check the produced states
    Run(RunArgs),
    /// Sweep every input and measurement outcome for one modulus
    Verify(VerifyArgs),
    /// Count gates per scheme by traversing the built circuits
    Count(CountArgs),
    /// Compare the three schemes and check the Toffoli-savings identities
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Output format: human or json
    #[arg(long, default_value = "human")]
    format: String,
    /// Write the JSON report to this path as well
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Odd modulus N
    #[arg(long = "N")]
    modulus: u64,
    /// Multiplier a in 1..N coprime to N, or "auto" for the smallest a >= 2
    #[arg(long, default_value = "auto")]
    a: String,
    /// Input value x in 0..N; omitted means every x
    #[arg(long)]
    x: Option<u64>,
    /// Scheme to run: A, B, C, or all
    #[arg(long, default_value = "all")]
    scheme: String,
    /// Measurement outcomes: all, sampled, or an explicit bitstring
    #[arg(long, default_value = "all")]
    outcome: String,
    /// RNG seed for sampled outcomes
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Odd modulus N (at most 63)
    #[arg(long = "N")]
    modulus: u64,
    /// Multiplier a in 1..N coprime to N, or "auto"
    #[arg(long, default_value = "auto")]
    a: String,
    /// RNG seed, echoed into the report
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct CountArgs {
    /// Odd modulus N
    #[arg(long = "N")]
    modulus: u64,
    /// Multiplier a in 1..N coprime to N, or "auto"
    #[arg(long, default_value = "auto")]
    a: String,
    /// Scheme to count: A, B, C, or all
    #[arg(long, default_value = "all")]
    scheme: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Comma-separated odd moduli
    #[arg(long = "N", value_delimiter = ',', required = true)]
    moduli: Vec<u64>,
    /// Multiplier a, or "auto" to resolve per modulus
    #[arg(long, default_value = "auto")]
    a: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Human,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MultiplierChoice {
    Auto,
    Fixed(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemeChoice {
    All,
    One(SchemeKind),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutcomeChoice {
    All,
    Sampled,
    Forced(Vec<bool>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Run,
    Verify,
    Count,
    Compare,
}

impl CommandKind {
    fn name(self) -> &'static str {
        match self {
            CommandKind::Run => "run",
            CommandKind::Verify => "verify",
            CommandKind::Count => "count",
            CommandKind::Compare => "compare",
        }
    }
}

/// Fully parsed and validated invocation.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: CommandKind,
    pub moduli: Vec<u64>,
    pub multiplier: MultiplierChoice,
    pub x: Option<u64>,
    pub scheme: SchemeChoice,
    pub outcome: OutcomeChoice,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

fn parse_multiplier(s: &str) -> Result<MultiplierChoice> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(MultiplierChoice::Auto);
    }
    s.parse::<u64>()
        .map(MultiplierChoice::Fixed)
        .map_err(|_| Error::InvalidArgument(format!("--a expects an integer or \"auto\", got {s:?}")))
}

fn parse_scheme(s: &str) -> Result<SchemeChoice> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(SchemeChoice::All);
    }
    Ok(SchemeChoice::One(SchemeKind::from_str(s)?))
}

fn parse_outcome(s: &str) -> Result<OutcomeChoice> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(OutcomeChoice::All);
    }
    if s.eq_ignore_ascii_case("sampled") {
        return Ok(OutcomeChoice::Sampled);
    }
    let mut bits = Vec::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '0' => bits.push(false),
            '1' => bits.push(true),
            other => return Err(Error::BitstringChar(other)),
        }
    }
    Ok(OutcomeChoice::Forced(bits))
}

fn parse_format(s: &str) -> Result<OutputFormat> {
    match s.to_ascii_lowercase().as_str() {
        "human" => Ok(OutputFormat::Human),
        "json" => Ok(OutputFormat::Json),
        other => Err(Error::InvalidArgument(format!(
            "--format expects human or json, got {other:?}"
        ))),
    }
}

impl Cli {
    /// Resolve the parsed arguments into a validated [`RunConfig`].
    pub fn into_config(self) -> Result<RunConfig> {
        match self.command {
            CliCommand::Run(args) => Ok(RunConfig {
                command: CommandKind::Run,
                moduli: vec![args.modulus],
                multiplier: parse_multiplier(&args.a)?,
                x: args.x,
                scheme: parse_scheme(&args.scheme)?,
                outcome: parse_outcome(&args.outcome)?,
                seed: args.seed,
                format: parse_format(&args.common.format)?,
                out: args.common.out,
            }),
            CliCommand::Verify(args) => Ok(RunConfig {
                command: CommandKind::Verify,
                moduli: vec![args.modulus],
                multiplier: parse_multiplier(&args.a)?,
                x: None,
                scheme: SchemeChoice::All,
                outcome: OutcomeChoice::All,
                seed: args.seed,
                format: parse_format(&args.common.format)?,
                out: args.common.out,
            }),
            CliCommand::Count(args) => Ok(RunConfig {
                command: CommandKind::Count,
                moduli: vec![args.modulus],
                multiplier: parse_multiplier(&args.a)?,
                x: None,
                scheme: parse_scheme(&args.scheme)?,
                outcome: OutcomeChoice::All,
                seed: DEFAULT_SEED,
                format: parse_format(&args.common.format)?,
                out: args.common.out,
            }),
            CliCommand::Compare(args) => Ok(RunConfig {
                command: CommandKind::Compare,
                moduli: args.moduli,
                multiplier: parse_multiplier(&args.a)?,
                x: None,
                scheme: SchemeChoice::All,
                outcome: OutcomeChoice::All,
                seed: DEFAULT_SEED,
                format: parse_format(&args.common.format)?,
                out: args.common.out,
            }),
        }
    }
}

/// Map an error to the process exit code it should produce.
pub fn exit_code_for(error: &Error) -> i32 {
    match error {
        Error::Guardrail(_) | Error::EnumerationTooLarge { .. } | Error::TooManyQubits(_) => 3,
        _ => 2,
    }
}

#[derive(Clone, Debug, Serialize)]
struct ToolInfo {
    name: &'static str,
    version: &'static str,
}

#[derive(Clone, Debug, Serialize)]
struct ConfigEcho {
    moduli: Vec<u64>,
    multiplier: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<u64>,
    scheme: String,
    outcome: String,
    seed: u64,
}

/// One verification case in the report.
#[derive(Clone, Debug, Serialize)]
pub struct CaseRow {
    pub scheme: SchemeKind,
    pub modulus: u64,
    pub multiplier: u64,
    pub x: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_law_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub registers_clean: Option<bool>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Structural checks of one parity-oracle mask.
#[derive(Clone, Debug, Serialize)]
pub struct OracleCheck {
    pub mask: String,
    /// Applying the oracle twice restores every basis state.
    pub self_inverse: bool,
    /// The oracle flips its target exactly on data = 1 and odd masked parity.
    pub selective: bool,
    /// CNOT and Toffoli counts match the chain construction.
    pub counts_match: bool,
    pub pass: bool,
}

/// Gate counts for the schemes at one `(N, a)`.
#[derive(Clone, Debug, Serialize)]
pub struct CountBundle {
    pub modulus: u64,
    pub multiplier: u64,
    pub width: usize,
    pub schemes: Vec<SchemeCost>,
}

/// The structured report every subcommand emits.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    tool: ToolInfo,
    command: &'static str,
    config: ConfigEcho,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cases: Vec<CaseRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub oracle_checks: Vec<OracleCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub counts: Vec<CountBundle>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<SchemeComparison>,
    pub overall_pass: bool,
    pub wall_clock_ms: f64,
}

fn echo_config(config: &RunConfig) -> ConfigEcho {
    ConfigEcho {
        moduli: config.moduli.clone(),
        multiplier: match &config.multiplier {
            MultiplierChoice::Auto => "auto".to_string(),
            MultiplierChoice::Fixed(a) => a.to_string(),
        },
        x: config.x,
        scheme: match &config.scheme {
            SchemeChoice::All => "all".to_string(),
            SchemeChoice::One(kind) => kind.to_string(),
        },
        outcome: match &config.outcome {
            OutcomeChoice::All => "all".to_string(),
            OutcomeChoice::Sampled => "sampled".to_string(),
            OutcomeChoice::Forced(bits) => bits
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect(),
        },
        seed: config.seed,
    }
}

/// Smallest multiplier of at least 2 coprime to `modulus`, or the fixed
/// choice unchanged.
pub fn resolve_multiplier(choice: &MultiplierChoice, modulus: u64) -> Result<u64> {
    match choice {
        MultiplierChoice::Fixed(a) => Ok(*a),
        MultiplierChoice::Auto => (2..modulus)
            .find(|&a| gcd(a, modulus) == 1)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("no multiplier >= 2 is coprime to {modulus}"))
            }),
    }
}

fn selected_schemes(choice: &SchemeChoice) -> Vec<SchemeKind> {
    match choice {
        SchemeChoice::All => SchemeKind::all().to_vec(),
        SchemeChoice::One(kind) => vec![*kind],
    }
}

fn case_rows_from_report(
    report: crate::schemes::VerificationReport,
    rows: &mut Vec<CaseRow>,
    overall: &mut bool,
) {
    *overall &= report.pass;
    for case in report.cases {
        rows.push(CaseRow {
            scheme: report.scheme,
            modulus: report.modulus,
            multiplier: report.multiplier,
            x: report.x,
            outcome: case.outcome,
            probability: case.probability,
            max_deviation: Some(case.max_deviation),
            phase_law_ok: case.phase_law_ok,
            registers_clean: Some(case.registers_clean),
            pass: case.pass,
            error: None,
        });
    }
}

fn simulation_guardrail(command: CommandKind, modulus: u64) -> Result<()> {
    if modulus > MAX_SIMULATED_MODULUS {
        return Err(Error::Guardrail(format!(
            "{} simulates statevectors and caps N at {MAX_SIMULATED_MODULUS}; \
             use count or compare for larger moduli",
            command.name()
        )));
    }
    Ok(())
}

fn cmd_run(config: &RunConfig) -> Result<Report> {
    let modulus = config.moduli[0];
    simulation_guardrail(CommandKind::Run, modulus)?;
    let a = resolve_multiplier(&config.multiplier, modulus)?;
    let params = SchemeParams::new(modulus, a)?;
    if let Some(x) = config.x {
        if x >= modulus {
            return Err(Error::ValueOutOfRange { value: x, modulus });
        }
    }
    if let OutcomeChoice::Forced(bits) = &config.outcome {
        if bits.len() != params.width() {
            return Err(Error::BitstringLength {
                expected: params.width(),
                got: bits.len(),
            });
        }
    }
    let xs: Vec<u64> = match config.x {
        Some(x) => vec![x],
        None => (0..modulus).collect(),
    };
    let mut cases = Vec::new();
    let mut overall = true;
    for kind in selected_schemes(&config.scheme) {
        for &x in &xs {
            let mode = match (&config.outcome, kind) {
                (_, SchemeKind::A | SchemeKind::B) => VerifyMode::AllOutcomes,
                (OutcomeChoice::All, _) => VerifyMode::AllOutcomes,
                (OutcomeChoice::Sampled, _) => VerifyMode::Sampled(config.seed),
                (OutcomeChoice::Forced(bits), _) => VerifyMode::Forced(bits.clone()),
            };
            match verify_scheme(kind, &params, x, mode) {
                Ok(report) => case_rows_from_report(report, &mut cases, &mut overall),
                Err(err) => {
                    overall = false;
                    cases.push(CaseRow {
                        scheme: kind,
                        modulus,
                        multiplier: a,
                        x,
                        outcome: None,
                        probability: None,
                        max_deviation: None,
                        phase_law_ok: None,
                        registers_clean: None,
                        pass: false,
                        error: Some(err.to_string()),
                    });
                }
            }
        }
    }
    Ok(Report {
        tool: tool_info(),
        command: CommandKind::Run.name(),
        config: echo_config(config),
        cases,
        oracle_checks: Vec::new(),
        counts: Vec::new(),
        comparisons: Vec::new(),
        overall_pass: overall,
        wall_clock_ms: 0.0,
    })
}

/// Check every mask of the oracle at width `n`: structure, selectivity on
/// all basis states, and involution.
fn check_oracles(params: &SchemeParams) -> Result<Vec<OracleCheck>> {
    let layout = layout_for(SchemeKind::C, params);
    let n = params.width();
    let mut checks = Vec::with_capacity(1 << n);
    for value in 0..1u64 << n {
        let mask = ParityMask::from_value(value, n);
        let circ = build_parity_oracle(
            &mask,
            layout.data(),
            layout.xreg(),
            layout.oracle(),
            layout.total_qubits(),
        )?;
        let count = crate::resources::count_circuit(&circ);
        let k = value.count_ones() as usize;
        let counts_match = if k == 0 {
            count.total_gates == 0
        } else {
            count.cnot == 2 * (k - 1) && count.toffoli == 1 && count.total_gates == 2 * k - 1
        };
        let mut self_inverse = true;
        let mut selective = true;
        let oracle_bit = 1u64 << layout.oracle();
        for data in 0..2u64 {
            for y in 0..1u64 << n {
                for o in 0..2u64 {
                    let index = (data << layout.data())
                        | crate::modarith::pack_register(y, layout.xreg())
                        | (o * oracle_bit);
                    let once = circ.apply_to_basis(index)?;
                    let twice = circ.apply_to_basis(once)?;
                    self_inverse &= twice == index;
                    let should_flip =
                        data == 1 && parity_phase(&mask, y) == -1;
                    selective &= (once == index ^ oracle_bit) == should_flip
                        && (once == index) == !should_flip;
                }
            }
        }
        checks.push(OracleCheck {
            mask: mask.to_string(),
            self_inverse,
            selective,
            counts_match,
            pass: self_inverse && selective && counts_match,
        });
    }
    Ok(checks)
}

fn cmd_verify(config: &RunConfig) -> Result<Report> {
    let modulus = config.moduli[0];
    simulation_guardrail(CommandKind::Verify, modulus)?;
    let a = resolve_multiplier(&config.multiplier, modulus)?;
    let params = SchemeParams::new(modulus, a)?;
    let mut cases = Vec::new();
    let mut overall = true;
    for x in 0..modulus {
        for kind in SchemeKind::all() {
            let report = verify_scheme(kind, &params, x, VerifyMode::AllOutcomes)?;
            case_rows_from_report(report, &mut cases, &mut overall);
        }
    }
    let oracle_checks = check_oracles(&params)?;
    overall &= oracle_checks.iter().all(|c| c.pass);
    Ok(Report {
        tool: tool_info(),
        command: CommandKind::Verify.name(),
        config: echo_config(config),
        cases,
        oracle_checks,
        counts: Vec::new(),
        comparisons: Vec::new(),
        overall_pass: overall,
        wall_clock_ms: 0.0,
    })
}

fn cmd_count(config: &RunConfig) -> Result<Report> {
    let modulus = config.moduli[0];
    let a = resolve_multiplier(&config.multiplier, modulus)?;
    let params = SchemeParams::new(modulus, a)?;
    let schemes = selected_schemes(&config.scheme)
        .into_iter()
        .map(|kind| scheme_cost(kind, &params))
        .collect::<Result<Vec<_>>>()?;
    let bundle = CountBundle {
        modulus,
        multiplier: a,
        width: params.width(),
        schemes,
    };
    Ok(Report {
        tool: tool_info(),
        command: CommandKind::Count.name(),
        config: echo_config(config),
        cases: Vec::new(),
        oracle_checks: Vec::new(),
        counts: vec![bundle],
        comparisons: Vec::new(),
        overall_pass: true,
        wall_clock_ms: 0.0,
    })
}

fn cmd_compare(config: &RunConfig) -> Result<Report> {
    let mut comparisons = Vec::new();
    let mut overall = true;
    for &modulus in &config.moduli {
        if modulus > MAX_COMPARED_MODULUS {
            return Err(Error::Guardrail(format!(
                "compare caps N at {MAX_COMPARED_MODULUS}, got {modulus}"
            )));
        }
        let a = resolve_multiplier(&config.multiplier, modulus)?;
        let params = SchemeParams::new(modulus, a)?;
        let cmp = compare_schemes(&params)?;
        overall &= cmp.savings.measured_uncompute_exact
            && cmp.savings.control_elision_exact
            && cmp.savings.control_elision_positive;
        comparisons.push(cmp);
    }
    Ok(Report {
        tool: tool_info(),
        command: CommandKind::Compare.name(),
        config: echo_config(config),
        cases: Vec::new(),
        oracle_checks: Vec::new(),
        counts: Vec::new(),
        comparisons,
        overall_pass: overall,
        wall_clock_ms: 0.0,
    })
}

fn tool_info() -> ToolInfo {
    ToolInfo {
        name: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
    }
}

/// Execute a validated configuration and produce the report.
pub fn execute(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let mut report = match config.command {
        CommandKind::Run => cmd_run(config),
        CommandKind::Verify => cmd_verify(config),
        CommandKind::Count => cmd_count(config),
        CommandKind::Compare => cmd_compare(config),
    }?;
    report.wall_clock_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

fn format_count_line(label: &str, c: &crate::resources::ResourceCount) -> String {
    format!(
        "{label}: {} gates (toffoli {}, cnot {}, single {}, cswap {}, cz {}, conditioned {}), {} measured qubits",
        c.total_gates, c.toffoli, c.cnot, c.single_qubit, c.cswap, c.cz,
        c.classically_conditioned, c.measured_qubits
    )
}

/// Render the human-readable tables for a report.
pub fn render_human(report: &Report) -> String {
    let mut out = String::new();
    let push = |out: &mut String, line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    match report.command {
        "run" | "verify" => {
            let mut shown = 0usize;
            let total = report.cases.len();
            let failed: Vec<&CaseRow> = report.cases.iter().filter(|c| !c.pass).collect();
            // Group scheme C outcome sweeps into one line per (scheme, x).
            let mut i = 0usize;
            while i < report.cases.len() {
                let case = &report.cases[i];
                let mut j = i + 1;
                while j < report.cases.len() {
                    let peer = &report.cases[j];
                    if peer.scheme == case.scheme && peer.x == case.x && peer.outcome.is_some() {
                        j += 1;
                    } else {
                        break;
                    }
                }
                let group = &report.cases[i..j];
                let worst_dev = group
                    .iter()
                    .filter_map(|c| c.max_deviation)
                    .fold(0.0f64, f64::max);
                let all_pass = group.iter().all(|c| c.pass);
                let outcomes = if group.len() > 1 || case.outcome.is_some() {
                    format!(", {} outcome(s)", group.len())
                } else {
                    String::new()
                };
                push(
                    &mut out,
                    format!(
                        "scheme {} N={} a={} x={}{}: {} (max deviation {:.2e})",
                        case.scheme,
                        case.modulus,
                        case.multiplier,
                        case.x,
                        outcomes,
                        if all_pass { "pass" } else { "FAIL" },
                        worst_dev
                    ),
                );
                shown += 1;
                i = j;
            }
            let _ = shown;
            if !report.oracle_checks.is_empty() {
                let ok = report.oracle_checks.iter().filter(|c| c.pass).count();
                push(
                    &mut out,
                    format!(
                        "oracle checks: {ok}/{} masks pass",
                        report.oracle_checks.len()
                    ),
                );
            }
            push(
                &mut out,
                format!(
                    "{} of {} cases pass{}",
                    total - failed.len(),
                    total,
                    if failed.is_empty() { "" } else { " (FAILURES above)" }
                ),
            );
        }
        "count" => {
            for bundle in &report.counts {
                push(
                    &mut out,
                    format!(
                        "N={} a={} (width {}):",
                        bundle.modulus, bundle.multiplier, bundle.width
                    ),
                );
                for sc in &bundle.schemes {
                    push(
                        &mut out,
                        format!(
                            "  scheme {} ({} qubits), {}",
                            sc.scheme,
                            sc.qubits,
                            format_count_line("fixed", &sc.cost.fixed)
                        ),
                    );
                    if let Some(worst) = &sc.cost.synthesized_worst {
                        push(
                            &mut out,
                            format!(
                                "    {} at outcome {}",
                                format_count_line("worst synthesized tail", worst),
                                sc.cost.worst_outcome.as_deref().unwrap_or("-")
                            ),
                        );
                    }
                }
            }
        }
        "compare" => {
            for cmp in &report.comparisons {
                push(
                    &mut out,
                    format!(
                        "N={} a={} (width {}):",
                        cmp.modulus, cmp.multiplier, cmp.savings.width
                    ),
                );
                push(
                    &mut out,
                    format!(
                        "  {:<8} {:>7} {:>9} {:>8} {:>8}  notes",
                        "scheme", "qubits", "toffoli", "cnot", "total"
                    ),
                );
                for row in &cmp.rows {
                    push(
                        &mut out,
                        format!(
                            "  {:<8} {:>7} {:>9} {:>8} {:>8}  {}",
                            row.scheme.to_string(),
                            row.qubits,
                            row.counts.toffoli,
                            row.counts.cnot,
                            row.counts.total_gates,
                            row.notes
                        ),
                    );
                }
                let s = &cmp.savings;
                push(
                    &mut out,
                    format!(
                        "  measured uncomputation saves {} Toffoli vs scheme B \
                         (expected {}, {})",
                        s.measured_uncompute_saves,
                        s.measured_uncompute_expected,
                        if s.measured_uncompute_exact { "exact" } else { "MISMATCH" }
                    ),
                );
                push(
                    &mut out,
                    format!(
                        "  dropping pass controls saves {} Toffoli vs scheme A \
                         (predicted {}, {}, {})",
                        s.control_elision_saves,
                        s.control_elision_predicted,
                        if s.control_elision_exact { "exact" } else { "MISMATCH" },
                        if s.control_elision_positive { "positive" } else { "NOT POSITIVE" }
                    ),
                );
            }
        }
        _ => {}
    }
    push(
        &mut out,
        format!(
            "overall: {} ({:.1} ms)",
            if report.overall_pass { "pass" } else { "FAIL" },
            report.wall_clock_ms
        ),
    );
    out
}

/// Parse arguments, execute, emit output, and return the process exit code.
pub fn run_cli() -> i32 {
    let cli = Cli::parse();
    let config = match cli.into_config() {
        Ok(config) => config,
        Err(err) => {
            eprintln!("error: {err}");
            return exit_code_for(&err);
        }
    };
    let report = match execute(&config) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("error: {err}");
            return exit_code_for(&err);
        }
    };
    let json = match serde_json::to_string_pretty(&report) {
        Ok(json) => json,
        Err(err) => {
            eprintln!("error: {err}");
            return 2;
        }
    };
    match config.format {
        OutputFormat::Human => print!("{}", render_human(&report)),
        OutputFormat::Json => println!("{json}"),
    }
    if let Some(path) = &config.out {
        if let Err(err) = std::fs::write(path, format!("{json}\n")) {
            eprintln!("error: failed to write {}: {err}", path.display());
            return 2;
        }
    }
    if report.overall_pass {
        0
    } else {
        1
    }
}
