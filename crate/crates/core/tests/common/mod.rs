//! Shared corpus plumbing for the integration tests.
//!
//! Each test target compiles this module separately and uses a subset of
//! the helpers.
#![allow(dead_code)]

use csc_core::cutshortcut::{ContainerModel, CutShortcutPolicy, PatternSet};
use csc_core::ir::{parse_program, Program};
use csc_core::solver::{solve, AnalysisResult, EmptyPolicy};
use std::path::{Path, PathBuf};

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Every `.ir` file under `corpus/<sub>`, sorted by name.
pub fn corpus_files(sub: &str) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir().join(sub))
        .expect("corpus directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "ir"))
        .collect();
    files.sort();
    files
}

pub fn load(path: &Path) -> Program {
    let text = std::fs::read_to_string(path).expect("read corpus program");
    parse_program(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn std_model() -> ContainerModel {
    let text = std::fs::read_to_string(corpus_dir().join("stdlib/std.json")).expect("read model");
    ContainerModel::parse(&text).expect("parse model")
}

pub fn entry(program: &Program) -> csc_core::ir::MethodId {
    program.resolve_entry("Main.main").expect("Main.main")
}

pub fn solve_ci(program: &Program) -> AnalysisResult {
    solve(program, entry(program), &mut EmptyPolicy)
}

pub fn solve_csc(program: &Program, patterns: PatternSet) -> AnalysisResult {
    let model = std_model();
    let mut policy =
        CutShortcutPolicy::new(program, patterns, Some(&model)).expect("container model resolves");
    solve(program, entry(program), &mut policy)
}

/// Look up a rendered pointer's points-to set as sorted site labels.
pub fn pt_labels(program: &Program, result: &AnalysisResult, rendered: &str) -> Vec<String> {
    let mut labels: Vec<String> = result
        .pt
        .iter()
        .find(|(ptr, _)| ptr.render(program) == rendered)
        .map(|(_, objs)| objs.iter().map(|&s| program.site(s).label.clone()).collect())
        .unwrap_or_default();
    labels.sort();
    labels
}
