//! Acceptance gate: one test per shipping criterion, each ending in a
//! single `[PRIMARY n] ...: pass` line (a failed assertion is the fail
//! line).  Everything a release must guarantee is here; the unit suites
//! cover the internals.

use csc_core::cutshortcut::{ContainerModel, CutShortcutPolicy, Pattern, PatternSet};
use csc_core::ctxsens::{project_to_ci, solve_context_sensitive, CtxFlavor};
use csc_core::ir::parse_program;
use csc_core::solver::{pfg_reachable, render_report, solve, AnalysisResult, EmptyPolicy};
use csc_core::{check_recall, compute_metrics, explore, Budget, Program};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_programs() -> Vec<(PathBuf, Program)> {
    let mut out = Vec::new();
    for sub in ["paper", "hand", "gen"] {
        let mut files: Vec<PathBuf> = std::fs::read_dir(corpus().join(sub))
            .expect("corpus dir")
            .map(|e| e.expect("entry").path())
            .filter(|p| p.extension().is_some_and(|e| e == "ir"))
            .collect();
        files.sort();
        for path in files {
            let text = std::fs::read_to_string(&path).expect("read");
            let program =
                parse_program(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            out.push((path, program));
        }
    }
    assert!(out.len() >= 4 + 10 + 16, "corpus too small: {}", out.len());
    out
}

fn model() -> ContainerModel {
    let text = std::fs::read_to_string(corpus().join("stdlib/std.json")).expect("model");
    ContainerModel::parse(&text).expect("model JSON")
}

fn entry(program: &Program) -> csc_core::MethodId {
    program.resolve_entry("Main.main").expect("Main.main")
}

fn run_ci(program: &Program) -> AnalysisResult {
    solve(program, entry(program), &mut EmptyPolicy)
}

fn run_csc(program: &Program, patterns: PatternSet) -> AnalysisResult {
    let model = model();
    let mut policy =
        CutShortcutPolicy::new(program, patterns, Some(&model)).expect("model resolves");
    solve(program, entry(program), &mut policy)
}

/// `pt` (or `hosts`) as rendered-pointer -> sorted-labels, the sidecar
/// format.
fn rendered(
    program: &Program,
    sets: &BTreeMap<csc_core::Pointer, std::collections::BTreeSet<csc_core::SiteId>>,
) -> BTreeMap<String, Vec<String>> {
    sets.iter()
        .map(|(ptr, objs)| {
            let mut labels: Vec<String> =
                objs.iter().map(|&s| program.site(s).label.clone()).collect();
            labels.sort();
            (ptr.render(program), labels)
        })
        .collect()
}

fn expect_sets(actual: &BTreeMap<String, Vec<String>>, doc: &serde_json::Value, what: &str) {
    for (key, want) in doc.as_object().expect("object") {
        let want: Vec<String> =
            want.as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
        let got = actual.get(key).cloned().unwrap_or_default();
        assert_eq!(got, want, "{what}: {key}");
    }
}

/// Check one paper program against its expected-results sidecar.
fn check_paper_program(stem: &str) -> (Program, AnalysisResult, AnalysisResult) {
    let path = corpus().join(format!("paper/{stem}.ir"));
    let text = std::fs::read_to_string(&path).expect("read");
    let program = parse_program(&text).expect("parse");
    let ci = run_ci(&program);
    let csc = run_csc(&program, PatternSet::all());

    let sidecar = corpus().join(format!("paper/{stem}.expected.json"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&sidecar).expect("sidecar")).expect("JSON");
    expect_sets(&rendered(&program, &ci.pt), &doc["ci"]["pt"], &format!("{stem} ci pt"));
    expect_sets(&rendered(&program, &csc.pt), &doc["csc"]["pt"], &format!("{stem} csc pt"));
    if let Some(hosts) = doc["csc"].get("hosts") {
        expect_sets(&rendered(&program, &csc.hosts), hosts, &format!("{stem} csc hosts"));
    }
    (program, ci, csc)
}

fn pt(program: &Program, result: &AnalysisResult, key: &str) -> Vec<String> {
    rendered(program, &result.pt).get(key).cloned().unwrap_or_default()
}

#[test]
fn criterion_01_direct_setter_exactness() {
    let (program, ci, csc) = check_paper_program("fig1");
    assert_eq!(pt(&program, &csc, "o15.item"), ["o16"]);
    assert_eq!(pt(&program, &csc, "o20.item"), ["o21"]);
    assert_eq!(pt(&program, &csc, "Main.main/result1"), ["o16"]);
    assert_eq!(pt(&program, &csc, "Main.main/result2"), ["o21"]);
    assert_eq!(pt(&program, &ci, "Main.main/result1"), ["o16", "o21"]);
    assert_eq!(pt(&program, &ci, "Main.main/result2"), ["o16", "o21"]);
    println!("[PRIMARY 1] direct setter/getter exactness: pass");
}

#[test]
fn criterion_02_nested_setter_exactness() {
    let (program, ci, csc) = check_paper_program("fig3");
    assert_eq!(pt(&program, &csc, "o8.f"), ["o7"]);
    assert_eq!(pt(&program, &csc, "o10.f"), ["o9"]);
    assert_eq!(pt(&program, &ci, "o8.f"), ["o7", "o9"]);
    assert_eq!(pt(&program, &ci, "o10.f"), ["o7", "o9"]);
    println!("[PRIMARY 2] nested-call store exactness: pass");
}

#[test]
fn criterion_03_container_exactness() {
    let (program, ci, csc) = check_paper_program("fig4");
    assert_eq!(pt(&program, &csc, "Main.main/x"), ["o2"]);
    assert_eq!(pt(&program, &csc, "Main.main/y"), ["o7"]);
    assert_eq!(pt(&program, &csc, "Main.main/r1"), ["o2"]);
    assert_eq!(pt(&program, &csc, "Main.main/r2"), ["o7"]);
    let hosts = rendered(&program, &csc.hosts);
    assert_eq!(hosts.get("Main.main/it1").cloned().unwrap_or_default(), ["o1"]);
    assert_eq!(hosts.get("Main.main/it2").cloned().unwrap_or_default(), ["o6"]);
    for key in ["Main.main/x", "Main.main/y", "Main.main/r1", "Main.main/r2"] {
        assert_eq!(pt(&program, &ci, key), ["o2", "o7"], "{key}");
    }
    println!("[PRIMARY 3] container/iterator exactness: pass");
}

#[test]
fn criterion_04_local_flow_exactness() {
    let (program, ci, csc) = check_paper_program("fig5");
    assert_eq!(pt(&program, &csc, "Main.main/r1"), ["o10", "o11"]);
    assert_eq!(pt(&program, &csc, "Main.main/r2"), ["o14", "o15"]);
    assert_eq!(pt(&program, &ci, "Main.main/r1"), ["o10", "o11", "o14", "o15"]);
    assert_eq!(pt(&program, &ci, "Main.main/r2"), ["o10", "o11", "o14", "o15"]);
    println!("[PRIMARY 4] local-flow exactness: pass");
}

#[test]
fn criterion_05_recall_suite() {
    let started = Instant::now();
    let programs = corpus_programs();
    for (path, program) in &programs {
        let entry = entry(program);
        let facts = explore(program, entry, Budget::default());
        let mut results: Vec<(String, AnalysisResult)> = vec![
            ("ci".into(), run_ci(program)),
            ("csc".into(), run_csc(program, PatternSet::all())),
        ];
        for flavor in [CtxFlavor::KCfa(1), CtxFlavor::KCfa(2), CtxFlavor::KObj(2)] {
            let projected = project_to_ci(&solve_context_sensitive(program, entry, flavor));
            results.push((flavor.name(), projected));
        }
        for (name, result) in &results {
            let violations = check_recall(program, &facts, result);
            assert!(violations.is_empty(), "{} [{name}]: {violations:?}", path.display());
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(120),
        "recall suite took {elapsed:?}, budget is 2 minutes"
    );
    println!(
        "[PRIMARY 5] recall suite ({} programs x 5 analyses, {elapsed:?}): pass",
        programs.len()
    );
}

#[test]
fn criterion_06_dominance_and_improvement() {
    for (path, program) in &corpus_programs() {
        let ci = run_ci(program);
        let csc = run_csc(program, PatternSet::all());
        for (ptr, objs) in &csc.pt {
            assert!(
                objs.is_subset(ci.pt_of(*ptr)),
                "{}: pt({}) exceeds baseline",
                path.display(),
                ptr.render(program)
            );
        }
        let m_csc = compute_metrics(program, &csc);
        let m_ci = compute_metrics(program, &ci);
        assert!(m_csc.dominated_by(&m_ci), "{}: {m_csc:?} vs {m_ci:?}", path.display());
    }
    for stem in ["fig1", "fig3", "fig4", "fig5"] {
        let (program, ci, csc) = check_paper_program(stem);
        let m_csc = compute_metrics(&program, &csc);
        let m_ci = compute_metrics(&program, &ci);
        assert!(m_csc.improves_on(&m_ci), "{stem}: no strict improvement: {m_csc:?} vs {m_ci:?}");
    }
    println!("[PRIMARY 6] precision dominance + strict paper improvements: pass");
}

#[test]
fn criterion_07_shortcut_admissibility() {
    let mut checked = 0usize;
    for (path, program) in &corpus_programs() {
        let ci = run_ci(program);
        let csc = run_csc(program, PatternSet::all());
        for &(src, tgt, rule) in &csc.shortcuts {
            assert!(
                pfg_reachable(program, &ci, src, tgt),
                "{}: inadmissible {rule} shortcut {} -> {}",
                path.display(),
                src.render(program),
                tgt.render(program)
            );
            checked += 1;
        }
    }
    assert!(checked > 0, "no shortcuts were emitted anywhere");
    println!("[PRIMARY 7] shortcut admissibility ({checked} shortcuts): pass");
}

#[test]
fn criterion_08_pattern_isolation_and_attribution() {
    for (path, program) in &corpus_programs() {
        let ci = run_ci(program);
        let none = run_csc(program, PatternSet::none());
        assert_eq!(
            render_report(program, &none, &compute_metrics(program, &none)),
            render_report(program, &ci, &compute_metrics(program, &ci)),
            "{}: disabled patterns must reproduce the baseline",
            path.display()
        );
    }
    for (stem, pattern) in
        [("fig1", Pattern::Field), ("fig4", Pattern::Container), ("fig5", Pattern::Local)]
    {
        let path = corpus().join(format!("paper/{stem}.ir"));
        let program = parse_program(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let only = run_csc(&program, PatternSet::only(pattern));
        let ci = run_ci(&program);
        let m_only = compute_metrics(&program, &only);
        let m_ci = compute_metrics(&program, &ci);
        assert!(
            m_only.improves_on(&m_ci),
            "{stem}: {pattern:?} alone should improve: {m_only:?} vs {m_ci:?}"
        );
    }
    println!("[PRIMARY 8] pattern isolation + per-pattern attribution: pass");
}

/// Wall time of one `csc` run; `None` if it exceeded `limit` and was killed.
fn timed_subprocess(args: &[&str], limit: Duration) -> Option<Duration> {
    let started = Instant::now();
    let mut child = std::process::Command::new(env!("CARGO_BIN_EXE_csc"))
        .args(args)
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .spawn()
        .expect("spawn csc");
    loop {
        match child.try_wait().expect("wait") {
            Some(status) => {
                assert!(status.success(), "csc {args:?} failed");
                return Some(started.elapsed());
            }
            None if started.elapsed() > limit => {
                child.kill().ok();
                child.wait().ok();
                return None;
            }
            None => std::thread::sleep(Duration::from_millis(10)),
        }
    }
}

#[test]
fn criterion_09_scaling_trend() {
    let dir = tempfile::tempdir().expect("tempdir");
    let big = dir.path().join("big.ir");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_csc"))
        .args([
            "gen",
            "--seed",
            "7",
            "--n-containers",
            "200",
            "--n-field-wrappers",
            "50",
            "--n-local-flows",
            "50",
            "--depth",
            "3",
            "--out",
            big.to_str().unwrap(),
        ])
        .status()
        .expect("gen");
    assert!(status.success());
    let model = corpus().join("stdlib/std.json");
    let base_args = |analysis: &str| {
        vec![
            "analyze".to_string(),
            big.to_str().unwrap().to_string(),
            "--analysis".to_string(),
            analysis.to_string(),
            "--container-model".to_string(),
            model.to_str().unwrap().to_string(),
        ]
    };
    let run = |analysis: &str, limit: Duration| {
        let args = base_args(analysis);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        timed_subprocess(&refs, limit)
    };
    // Minimum of two runs filters ambient noise for the cheap analyses.
    let ci = (0..2).filter_map(|_| run("ci", Duration::from_secs(60))).min().expect("ci finishes");
    let csc =
        (0..2).filter_map(|_| run("csc", Duration::from_secs(60))).min().expect("csc finishes");
    let kobj = run("kobj:2", Duration::from_secs(60));

    assert!(
        csc <= ci * 2,
        "csc must stay within 2x of the baseline: csc={csc:?} ci={ci:?}"
    );
    match kobj {
        None => println!(
            "[PRIMARY 9] scaling trend (ci={ci:?}, csc={csc:?}, kobj:2 hit the 60s budget): pass"
        ),
        Some(kobj) => {
            assert!(
                kobj >= ci * 10,
                "kobj:2 should be at least 10x the baseline here: kobj={kobj:?} ci={ci:?}"
            );
            println!(
                "[PRIMARY 9] scaling trend (ci={ci:?}, csc={csc:?}, kobj:2={kobj:?}): pass"
            );
        }
    }
}

#[test]
fn criterion_10_oracle_equivalence() {
    let mut compared = 0usize;
    for (path, program) in &corpus_programs() {
        let statements: usize = program.methods.iter().map(|m| m.body.len()).sum();
        if statements > 50 {
            continue;
        }
        let entry = entry(program);
        let fast = solve(program, entry, &mut EmptyPolicy);
        let naive = csc_oracle::solve_naive(program, entry);
        assert_eq!(fast.pt, naive.pt, "{}", path.display());
        assert_eq!(fast.edges, naive.edges, "{}", path.display());
        assert_eq!(fast.reachable, naive.reachable, "{}", path.display());
        assert_eq!(fast.call_edges, naive.call_edges, "{}", path.display());
        assert_eq!(fast.diagnostics, naive.diagnostics, "{}", path.display());
        compared += 1;
    }
    assert!(compared >= 10, "only {compared} corpus programs at <= 50 statements");
    println!("[PRIMARY 10] oracle equivalence ({compared} programs): pass");
}

#[test]
fn criterion_11_byte_determinism() {
    let dir = tempfile::tempdir().expect("tempdir");
    let fig4 = corpus().join("paper/fig4.ir");
    let model = corpus().join("stdlib/std.json");
    let run = |args: &[&str]| -> (Vec<u8>, Vec<u8>) {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_csc"))
            .args(args)
            .output()
            .expect("run csc");
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        (out.stdout, out.stderr)
    };

    let dot_a = dir.path().join("a.dot");
    let dot_b = dir.path().join("b.dot");
    let analyze = |dot: &Path| {
        run(&[
            "analyze",
            fig4.to_str().unwrap(),
            "--analysis",
            "csc",
            "--container-model",
            model.to_str().unwrap(),
            "--dot",
            dot.to_str().unwrap(),
        ])
    };
    assert_eq!(analyze(&dot_a).0, analyze(&dot_b).0, "analyze stdout");
    assert_eq!(
        std::fs::read(&dot_a).unwrap(),
        std::fs::read(&dot_b).unwrap(),
        "DOT files differ between runs"
    );

    for args in [
        vec!["interp", fig4.to_str().unwrap()],
        vec!["compare", fig4.to_str().unwrap(), "--analyses", "ci,csc,kcfa:2,kobj:2",
             "--container-model", model.to_str().unwrap(), "--csv"],
        vec!["gen", "--seed", "99", "--n-containers", "2", "--n-field-wrappers", "1"],
    ] {
        assert_eq!(run(&args).0, run(&args).0, "{args:?} stdout");
    }
    println!("[PRIMARY 11] byte determinism of reports, DOT, facts, tables: pass");
}
