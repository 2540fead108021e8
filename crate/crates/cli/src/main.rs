//! `csc` — cut-shortcut pointer analysis toolkit.
//!
//! Subcommands: `analyze` (run one analysis, emit a report), `interp`
//! (bounded exhaustive interpretation, emit dynamic facts), `check`
//! (analysis + interpreter recall + CI dominance), `compare` (metric table
//! across analyses) and `gen` (deterministic stress-program generation).
//!
//! Exit codes: 0 ok, 1 input or usage error, 2 dominance violation,
//! 3 recall violation.

use clap::{Args, Parser, Subcommand};
use csc_core::ir::{check_program, MethodId, Severity};
use csc_core::solver::{export_dot, render_report, solve, AnalysisResult, EmptyPolicy};
use csc_core::{
    compare_metrics, compute_metrics, parse_program, solve_context_sensitive, Budget,
    ContainerModel, CtxFlavor, CutShortcutPolicy, Metrics, PatternSet, Program,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "csc", version, about = "Cut-shortcut pointer analysis for a mini OO IR")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one analysis and emit its report.
    Analyze(AnalyzeArgs),
    /// Interpret the program exhaustively (within budget) and emit facts.
    Interp(InterpArgs),
    /// Run interpreter + analysis + CI baseline; verify recall and dominance.
    Check(CheckArgs),
    /// Run several analyses and compare their precision metrics.
    Compare(CompareArgs),
    /// Generate a deterministic stress program.
    Gen(GenArgs),
}

#[derive(Args, Clone)]
struct AnalysisOpts {
    /// ci | csc | kcfa:K | kobj:K
    #[arg(long, default_value = "csc")]
    analysis: String,
    /// Comma-separated subset of {field, container, local}; `all` or `none`.
    #[arg(long, default_value = "all")]
    patterns: String,
    /// Container model JSON (container pattern; optional).
    #[arg(long)]
    container_model: Option<PathBuf>,
    /// Entry method, as Class.method.
    #[arg(long, default_value = "Main.main")]
    entry: String,
}

#[derive(Args)]
struct AnalyzeArgs {
    input: PathBuf,
    #[command(flatten)]
    opts: AnalysisOpts,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write a Graphviz rendering of the PFG here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct InterpArgs {
    input: PathBuf,
    #[arg(long, default_value = "Main.main")]
    entry: String,
    #[arg(long, default_value_t = 10_000)]
    max_steps: u64,
    #[arg(long, default_value_t = 256)]
    max_paths: u64,
    #[arg(long, default_value_t = 64)]
    max_depth: u32,
    /// Write the facts JSON here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    input: PathBuf,
    #[command(flatten)]
    opts: AnalysisOpts,
    #[arg(long, default_value_t = 10_000)]
    max_steps: u64,
    #[arg(long, default_value_t = 256)]
    max_paths: u64,
    #[arg(long, default_value_t = 64)]
    max_depth: u32,
    /// Write the combined JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    input: PathBuf,
    /// Comma-separated analyses to run, first is the baseline.
    #[arg(long, default_value = "ci,csc")]
    analyses: String,
    #[arg(long, default_value = "all")]
    patterns: String,
    #[arg(long)]
    container_model: Option<PathBuf>,
    #[arg(long, default_value = "Main.main")]
    entry: String,
    /// Emit CSV instead of the aligned table.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    n_containers: u32,
    #[arg(long, default_value_t = 0)]
    n_field_wrappers: u32,
    #[arg(long, default_value_t = 0)]
    n_local_flows: u32,
    /// Nesting depth of field-wrapper init chains.
    #[arg(long, default_value_t = 2)]
    depth: u32,
    /// Write the program here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Analyze(args) => cmd_analyze(args),
        Cmd::Interp(args) => cmd_interp(args),
        Cmd::Check(args) => cmd_check(args),
        Cmd::Compare(args) => cmd_compare(args),
        Cmd::Gen(args) => cmd_gen(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(1, format!("cannot read `{}`: {e}", path.display())))?;
    let program = parse_program(&text)
        .map_err(|e| fail(1, format!("{}: {e}", path.display())))?;
    let diagnostics = check_program(&program);
    let mut bad = false;
    for d in &diagnostics {
        eprintln!("{}: {d}", path.display());
        bad |= d.severity == Severity::Error;
    }
    if bad {
        return Err(fail(1, String::new()));
    }
    Ok(program)
}

fn resolve_entry(program: &Program, entry: &str) -> Result<MethodId, Failure> {
    program.resolve_entry(entry).map_err(|e| fail(1, e))
}

fn parse_patterns(s: &str) -> Result<PatternSet, Failure> {
    match s.trim() {
        "all" => return Ok(PatternSet::all()),
        "none" | "" => return Ok(PatternSet::none()),
        _ => {}
    }
    let mut set = PatternSet::none();
    for part in s.split(',') {
        match part.trim() {
            "field" => {
                set.field = true;
                set.load_handling = true;
            }
            "container" => set.container = true,
            "local" => set.local = true,
            other => return Err(fail(1, format!("unknown pattern `{other}`"))),
        }
    }
    Ok(set)
}

fn load_model(path: &Option<PathBuf>) -> Result<Option<ContainerModel>, Failure> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(1, format!("cannot read `{}`: {e}", path.display())))?;
    let model = ContainerModel::parse(&text)
        .map_err(|e| fail(1, format!("{}: {e}", path.display())))?;
    Ok(Some(model))
}

enum AnalysisKind {
    Ci,
    Csc,
    Ctx(CtxFlavor),
}

fn parse_analysis(s: &str) -> Result<AnalysisKind, Failure> {
    let s = s.trim();
    if s == "ci" {
        return Ok(AnalysisKind::Ci);
    }
    if s == "csc" {
        return Ok(AnalysisKind::Csc);
    }
    if let Some(k) = s.strip_prefix("kcfa:") {
        let k = k.parse().map_err(|_| fail(1, format!("bad context depth in `{s}`")))?;
        return Ok(AnalysisKind::Ctx(CtxFlavor::KCfa(k)));
    }
    if let Some(k) = s.strip_prefix("kobj:") {
        let k = k.parse().map_err(|_| fail(1, format!("bad context depth in `{s}`")))?;
        return Ok(AnalysisKind::Ctx(CtxFlavor::KObj(k)));
    }
    Err(fail(1, format!("unknown analysis `{s}` (expected ci, csc, kcfa:K or kobj:K)")))
}

fn run_analysis(
    program: &Program,
    entry: MethodId,
    kind: &AnalysisKind,
    patterns: PatternSet,
    model: Option<&ContainerModel>,
) -> Result<AnalysisResult, Failure> {
    match kind {
        AnalysisKind::Ci => Ok(solve(program, entry, &mut EmptyPolicy)),
        AnalysisKind::Csc => {
            let mut policy = CutShortcutPolicy::new(program, patterns, model)
                .map_err(|errors| fail(1, format!("container model: {}", errors.join("; "))))?;
            for w in policy.warnings() {
                eprintln!("warning: {w}");
            }
            Ok(solve(program, entry, &mut policy))
        }
        AnalysisKind::Ctx(flavor) => {
            let cs = solve_context_sensitive(program, entry, *flavor);
            Ok(csc_core::ctxsens::project_to_ci(&cs))
        }
    }
}

fn emit(path: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| fail(1, format!("cannot write `{}`: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let program = load_program(&args.input)?;
    let entry = resolve_entry(&program, &args.opts.entry)?;
    let kind = parse_analysis(&args.opts.analysis)?;
    let patterns = parse_patterns(&args.opts.patterns)?;
    let model = load_model(&args.opts.container_model)?;
    let result = run_analysis(&program, entry, &kind, patterns, model.as_ref())?;
    let metrics = compute_metrics(&program, &result);
    emit(&args.report, &render_report(&program, &result, &metrics))?;
    if args.dot.is_some() {
        emit(&args.dot, &export_dot(&program, &result))?;
    }
    Ok(())
}

fn cmd_interp(args: InterpArgs) -> Result<(), Failure> {
    let program = load_program(&args.input)?;
    let entry = resolve_entry(&program, &args.entry)?;
    let budget = Budget {
        max_steps_per_path: args.max_steps,
        max_paths: args.max_paths,
        max_call_depth: args.max_depth,
    };
    let facts = csc_core::interp::explore(&program, entry, budget);
    emit(&args.report, &csc_core::interp::render_facts(&program, &facts))
}

/// All `pt` entries of `result` not covered by the CI baseline, rendered as
/// one message each.
fn dominance_violations(
    program: &Program,
    result: &AnalysisResult,
    baseline: &AnalysisResult,
) -> Vec<String> {
    let mut violations = Vec::new();
    for (ptr, objs) in &result.pt {
        let base = baseline.pt_of(*ptr);
        for o in objs {
            if !base.contains(o) {
                violations.push(format!(
                    "pt({}) contains {} which the CI baseline excludes",
                    ptr.render(program),
                    program.site(*o).label
                ));
            }
        }
    }
    violations.sort();
    violations
}

fn cmd_check(args: CheckArgs) -> Result<(), Failure> {
    let program = load_program(&args.input)?;
    let entry = resolve_entry(&program, &args.opts.entry)?;
    let kind = parse_analysis(&args.opts.analysis)?;
    let patterns = parse_patterns(&args.opts.patterns)?;
    let model = load_model(&args.opts.container_model)?;

    let result = run_analysis(&program, entry, &kind, patterns, model.as_ref())?;
    let baseline = solve(&program, entry, &mut EmptyPolicy);
    let budget = Budget {
        max_steps_per_path: args.max_steps,
        max_paths: args.max_paths,
        max_call_depth: args.max_depth,
    };
    let facts = csc_core::interp::explore(&program, entry, budget);

    let recall = csc_core::interp::check_recall(&program, &facts, &result);
    let dominance = dominance_violations(&program, &result, &baseline);

    let doc = serde_json::json!({
        "analysis": args.opts.analysis.trim(),
        "dominanceViolations": dominance,
        "exhausted": facts.exhausted,
        "metrics": {
            "analysis": metrics_json(&compute_metrics(&program, &result)),
            "ci": metrics_json(&compute_metrics(&program, &baseline)),
        },
        "recallViolations": recall,
    });
    let mut rendered = serde_json::to_string_pretty(&doc).expect("check report serialize");
    rendered.push('\n');
    if let Some(path) = &args.report {
        std::fs::write(path, &rendered)
            .map_err(|e| fail(1, format!("cannot write `{}`: {e}", path.display())))?;
    }

    println!("recall: {}", if recall.is_empty() { "ok".into() } else { format!("{} violation(s)", recall.len()) });
    for v in &recall {
        println!("  {v}");
    }
    println!("dominance: {}", if dominance.is_empty() { "ok".into() } else { format!("{} violation(s)", dominance.len()) });
    for v in &dominance {
        println!("  {v}");
    }

    if !recall.is_empty() {
        return Err(fail(3, String::new()));
    }
    if !dominance.is_empty() {
        return Err(fail(2, String::new()));
    }
    Ok(())
}

fn metrics_json(m: &Metrics) -> serde_json::Value {
    serde_json::json!({
        "callEdge": m.call_edge,
        "failCast": m.fail_cast,
        "polyCall": m.poly_call,
        "reachMtd": m.reach_mtd,
    })
}

fn cmd_compare(args: CompareArgs) -> Result<(), Failure> {
    let program = load_program(&args.input)?;
    let entry = resolve_entry(&program, &args.entry)?;
    let patterns = parse_patterns(&args.patterns)?;
    let model = load_model(&args.container_model)?;

    let mut rows = Vec::new();
    for name in args.analyses.split(',') {
        let name = name.trim();
        if name.is_empty() {
            continue;
        }
        let kind = parse_analysis(name)?;
        let result = run_analysis(&program, entry, &kind, patterns, model.as_ref())?;
        rows.push((name.to_string(), compute_metrics(&program, &result)));
    }
    if rows.is_empty() {
        return Err(fail(1, "no analyses requested"));
    }
    let comparison = compare_metrics(rows);
    if args.csv {
        print!("{}", comparison.render_csv());
    } else {
        print!("{}", comparison.render_table());
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let spec = csc_core::stress::StressSpec {
        seed: args.seed,
        n_containers: args.n_containers,
        n_field_wrappers: args.n_field_wrappers,
        n_local_flows: args.n_local_flows,
        depth: args.depth,
    };
    emit(&args.out, &csc_core::stress::generate(&spec))
}
