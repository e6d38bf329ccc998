use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ltlff::declare::{parse_declare, translate_model};
use ltlff::formula::GMode;
use ltlff::kb::{parse_ltlkb, KnowledgeBase, MIN_TRACE_LENGTH};
use ltlff::measures::{measure, MeasureConfig, MeasureError, MeasureId, DEFAULT_MIS_CAP};
use ltlff::postulates::{counterexample, expected_compliance, reverify, sweep, PostulateError, PostulateId};
use ltlff::report::{build_report, ReportOptions};
use ltlff::solver::{SolverConfig, SolverError, DEFAULT_NODE_BUDGET, DEFAULT_ORACLE_CAP};

#[derive(Parser)]
#[command(name = "ltlff", version, about = "Inconsistency measures for temporal knowledge bases over finite traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute inconsistency measures for a `.ltlkb` file.
    Measure(MeasureArgs),
    /// Translate a `.decl` Declare model and measure the result.
    Declare(DeclareArgs),
    /// Show a minimal witness and the distinct minimal conflict bases.
    Explain(ExplainArgs),
    /// Check rationality postulates on random or curated instances.
    Postulates(PostulatesArgs),
    /// Compare search and exhaustive enumeration on one input.
    OracleCheck(OracleCheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct TraceArgs {
    /// Trace length m (states t0..tm); overrides an `m = N` line in the file.
    #[arg(long = "m", visible_alias = "trace-length")]
    m: Option<usize>,
    /// Allow m below 2.
    #[arg(long)]
    allow_short_trace: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// Minimize by exhaustive enumeration (small signatures only).
    #[arg(long)]
    oracle: bool,
    /// Search-node budget per solver call.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
}

impl SolveArgs {
    fn config(&self) -> MeasureConfig {
        MeasureConfig {
            solver: SolverConfig { node_budget: self.budget, oracle_cap: DEFAULT_ORACLE_CAP },
            mis_cap: DEFAULT_MIS_CAP,
            use_oracle: self.oracle,
        }
    }
}

#[derive(Args)]
struct MeasureArgs {
    input: PathBuf,
    #[command(flatten)]
    trace: TraceArgs,
    /// How `G` expands: strict (later states only) or reflexive.
    #[arg(long, default_value = "strict")]
    g_semantics: GMode,
    /// Measure to compute, `all`, or a comma-separated list.
    #[arg(long, default_value = "all")]
    measure: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    solve: SolveArgs,
    /// Also count distinct minimal conflict bases.
    #[arg(long)]
    min_interpretations: bool,
}

#[derive(Args)]
struct DeclareArgs {
    input: PathBuf,
    #[command(flatten)]
    trace: TraceArgs,
    #[arg(long, default_value = "reflexive")]
    g_semantics: GMode,
    #[arg(long, default_value = "all")]
    measure: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    solve: SolveArgs,
    /// Write the translated knowledge base to this `.ltlkb` path.
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args)]
struct ExplainArgs {
    /// A `.ltlkb` file, or a `.decl` model (translated with reflexive G unless overridden).
    input: PathBuf,
    #[command(flatten)]
    trace: TraceArgs,
    #[arg(long)]
    g_semantics: Option<GMode>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    solve: SolveArgs,
    /// Maximum number of conflict bases listed.
    #[arg(long, default_value_t = 20)]
    display_cap: usize,
}

#[derive(Args)]
struct OracleCheckArgs {
    /// A `.ltlkb` file or a `.decl` model, as for `explain`.
    input: PathBuf,
    #[command(flatten)]
    trace: TraceArgs,
    #[arg(long)]
    g_semantics: Option<GMode>,
    #[arg(long, default_value = "all")]
    measure: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Args)]
struct PostulatesArgs {
    /// Measure id or `all`.
    #[arg(long, default_value = "all")]
    measure: String,
    /// Postulate id (CO, MO, IN, DO, TS) or `all`.
    #[arg(long, default_value = "all")]
    postulate: String,
    /// Number of applicable random instances per cell.
    #[arg(long, default_value_t = 200)]
    sweep: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instead of sweeping, write certified counterexamples for cells
    /// expected to fail into this directory.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[command(flatten)]
    solve: SolveArgs,
}

enum CliError {
    Parse(String),
    Budget(String),
    Other(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Other(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Budget(m) | CliError::Other(m) => m,
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::Solver(s) => s.into(),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<PostulateError> for CliError {
    fn from(e: PostulateError) -> Self {
        match e {
            PostulateError::Measure(m) => m.into(),
            other => CliError::Other(other.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))
}

fn resolve_m(flag: Option<usize>, file: Option<usize>, trace: &TraceArgs) -> Result<usize> {
    let m = flag.or(file).ok_or_else(|| {
        CliError::Other("trace length not given: pass --m N or start the file with `m = N`".into())
    })?;
    if m < MIN_TRACE_LENGTH && !trace.allow_short_trace {
        return Err(CliError::Other(format!("m = {m} is below {MIN_TRACE_LENGTH}; pass --allow-short-trace to accept it")));
    }
    Ok(m)
}

fn load_ltlkb(path: &Path, trace: &TraceArgs, g_mode: GMode) -> Result<KnowledgeBase> {
    let file = parse_ltlkb(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let m = resolve_m(trace.m, file.m, trace)?;
    Ok(KnowledgeBase::with_any_trace_length(file.formulas, m, g_mode))
}

fn load_decl(path: &Path, trace: &TraceArgs, g_mode: GMode) -> Result<KnowledgeBase> {
    let model = parse_declare(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let m = resolve_m(trace.m, None, trace)?;
    Ok(translate_model(&model, m, g_mode))
}

fn parse_measures(spec: &str) -> Result<Vec<MeasureId>> {
    if spec.eq_ignore_ascii_case("all") {
        return Ok(MeasureId::ALL.to_vec());
    }
    spec.split(',').map(|s| s.trim().parse().map_err(CliError::Other)).collect()
}

fn parse_postulates(spec: &str) -> Result<Vec<PostulateId>> {
    if spec.eq_ignore_ascii_case("all") {
        return Ok(PostulateId::ALL.to_vec());
    }
    spec.split(',').map(|s| s.trim().parse().map_err(CliError::Other)).collect()
}

fn emit_report(kb: &KnowledgeBase, opts: &ReportOptions, config: &MeasureConfig, format: Format) -> Result<()> {
    let report = build_report(kb, opts, config)?;
    match format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
    Ok(())
}

fn cmd_measure(args: &MeasureArgs) -> Result<()> {
    let kb = load_ltlkb(&args.input, &args.trace, args.g_semantics)?;
    let opts = ReportOptions {
        measures: parse_measures(&args.measure)?,
        min_interpretations: args.min_interpretations,
        ..ReportOptions::default()
    };
    emit_report(&kb, &opts, &args.solve.config(), args.format)
}

fn cmd_declare(args: &DeclareArgs) -> Result<()> {
    let kb = load_decl(&args.input, &args.trace, args.g_semantics)?;
    if let Some(path) = &args.emit {
        let mut text = format!("# translated from {}\n", args.input.display());
        if kb.g_mode() == GMode::Reflexive {
            text.push_str("# evaluate with --g-semantics reflexive\n");
        }
        text.push_str(&kb.to_ltlkb());
        fs::write(path, text).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
    }
    let opts = ReportOptions { measures: parse_measures(&args.measure)?, ..ReportOptions::default() };
    emit_report(&kb, &opts, &args.solve.config(), args.format)
}

/// Loads by extension: `.decl` defaults to reflexive `G`, anything else is
/// read as `.ltlkb` with strict `G`.
fn load_any(path: &Path, trace: &TraceArgs, g_mode: Option<GMode>) -> Result<KnowledgeBase> {
    if path.extension().is_some_and(|e| e == "decl") {
        load_decl(path, trace, g_mode.unwrap_or(GMode::Reflexive))
    } else {
        load_ltlkb(path, trace, g_mode.unwrap_or(GMode::Strict))
    }
}

fn cmd_explain(args: &ExplainArgs) -> Result<()> {
    let kb = load_any(&args.input, &args.trace, args.g_semantics)?;
    let opts = ReportOptions {
        measures: vec![MeasureId::AffectedStates, MeasureId::ConflictCells],
        min_interpretations: true,
        display_cap: args.display_cap,
    };
    emit_report(&kb, &opts, &args.solve.config(), args.format)
}

fn cmd_postulates(args: &PostulatesArgs) -> Result<()> {
    let config = args.solve.config();
    let measures = parse_measures(&args.measure)?;
    let postulates = parse_postulates(&args.postulate)?;
    if let Some(dir) = &args.fixtures {
        fs::create_dir_all(dir).map_err(|e| CliError::Other(format!("{}: {e}", dir.display())))?;
        for &id in &measures {
            for &p in &postulates {
                if expected_compliance(id, p) {
                    continue;
                }
                let path = dir.join(format!("{id}_{p}.json"));
                match counterexample(id, p, &config)? {
                    Some(v) if reverify(&v, &config)? => {
                        let json = serde_json::to_string_pretty(&v).expect("verdict serializes");
                        fs::write(&path, json + "\n").map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
                        println!("{id} {p}: wrote {}", path.display());
                    }
                    Some(_) => return Err(CliError::Other(format!("{id} {p}: counterexample failed re-verification"))),
                    None => println!("{id} {p}: no counterexample found"),
                }
            }
        }
        return Ok(());
    }
    let mut reports = Vec::new();
    for &id in &measures {
        for &p in &postulates {
            let report = sweep(id, p, args.sweep, args.seed, &config)?;
            if let Format::Text = args.format {
                let expected = if expected_compliance(id, p) { "expected to hold" } else { "expected to fail" };
                println!("{id:<6} {p}  {} ({expected})", report.summary());
            }
            reports.push(report);
        }
    }
    if let Format::Json = args.format {
        println!("{}", serde_json::to_string_pretty(&reports).expect("reports serialize"));
    }
    Ok(())
}

fn cmd_oracle_check(args: &OracleCheckArgs) -> Result<()> {
    let kb = load_any(&args.input, &args.trace, args.g_semantics)?;
    let search = MeasureConfig { use_oracle: false, ..args.solve.config() };
    let oracle = MeasureConfig { use_oracle: true, ..search };
    let mut mismatches = 0;
    let ids: Vec<MeasureId> = parse_measures(&args.measure)?.into_iter().filter(|id| id.cost_mode().is_some()).collect();
    let mut rows = Vec::new();
    for id in ids {
        let (a, b) = (measure(&kb, id, &search)?, measure(&kb, id, &oracle)?);
        if a != b {
            mismatches += 1;
        }
        rows.push(serde_json::json!({ "measure": id, "search": a, "oracle": b, "agree": a == b }));
        if let Format::Text = args.format {
            println!("{id:<6} search {a:<4} oracle {b:<4} {}", if a == b { "ok" } else { "MISMATCH" });
        }
    }
    if let Format::Json = args.format {
        println!("{}", serde_json::to_string_pretty(&rows).expect("rows serialize"));
    }
    if mismatches > 0 {
        return Err(CliError::Other(format!("{mismatches} measure(s) disagree")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Measure(a) => cmd_measure(a),
        Command::Declare(a) => cmd_declare(a),
        Command::Explain(a) => cmd_explain(a),
        Command::Postulates(a) => cmd_postulates(a),
        Command::OracleCheck(a) => cmd_oracle_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
