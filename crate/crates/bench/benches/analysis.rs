//! Wall-time comparison of the analyses on generated stress programs.
//!
//! The interesting trend: CSC stays within a small constant of CI as the
//! program grows, while object sensitivity re-analyses the mixer chains per
//! context and falls behind.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use csc_bench::{std_model, stress_program};
use csc_core::solver::{solve, EmptyPolicy};
use csc_core::{solve_context_sensitive, CtxFlavor, CutShortcutPolicy, PatternSet};

fn bench_analyses(c: &mut Criterion) {
    let model = std_model();
    let mut group = c.benchmark_group("analysis");
    for &n in &[8u32, 32] {
        let program = stress_program(n);
        let entry = program.resolve_entry("Main.main").expect("entry");

        group.bench_with_input(BenchmarkId::new("ci", n), &program, |b, p| {
            b.iter(|| solve(p, entry, &mut EmptyPolicy));
        });
        group.bench_with_input(BenchmarkId::new("csc", n), &program, |b, p| {
            b.iter(|| {
                let mut policy = CutShortcutPolicy::new(p, PatternSet::all(), Some(&model))
                    .expect("model resolves");
                solve(p, entry, &mut policy)
            });
        });
        group.bench_with_input(BenchmarkId::new("kobj2", n), &program, |b, p| {
            b.iter(|| solve_context_sensitive(p, entry, CtxFlavor::KObj(2)));
        });
    }
    group.finish();
}

criterion_group!(benches, bench_analyses);
criterion_main!(benches);
