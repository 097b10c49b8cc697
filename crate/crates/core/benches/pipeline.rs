//! Pipeline benchmarks, runnable in both execution modes.
//!
//! Per-tetrahedron work inside `total_invariant` and the trace replay is
//! data-parallel when the `parallel` feature is on (the default) and
//! sequential otherwise.  Group names carry the mode, so
//!
//! ```text
//! cargo bench -p angled
//! cargo bench -p angled --no-default-features
//! ```
//!
//! leave side-by-side `*-par` and `*-seq` entries under `target/criterion/`
//! for comparison.

use angled::abelian::GroupSpec;
use angled::angles::AngleSystem;
use angled::complex::{random_walk, Triangulation};
use angled::invariant::total_invariant;
use angled::trace::{run_trace_with, TraceContext};
use criterion::{criterion_group, criterion_main, Criterion};

const MODE: &str = if cfg!(feature = "parallel") { "par" } else { "seq" };

struct Case {
    name: &'static str,
    t: Triangulation,
    group: GroupSpec,
}

fn cases() -> Vec<Case> {
    let crosspoly = Triangulation::cross_polytope_boundary();
    vec![
        Case {
            name: "simplex-Z4",
            t: Triangulation::boundary_4_simplex(),
            group: "Z/4".parse().unwrap(),
        },
        Case {
            name: "crosspoly-Z2xZ4",
            t: crosspoly.clone(),
            group: "Z/2 x Z/4".parse().unwrap(),
        },
        Case {
            // a larger complex, as the fuzzer would produce
            name: "walk20-Z2xZ4",
            t: random_walk(&crosspoly, 9, 20),
            group: "Z/2 x Z/4".parse().unwrap(),
        },
    ]
}

/// One-time constraint-matrix factorization per triangulation.
fn bench_factor(c: &mut Criterion) {
    let mut g = c.benchmark_group(format!("factor-{MODE}"));
    g.sample_size(10);
    for case in cases() {
        g.bench_function(case.name, |b| b.iter(|| AngleSystem::new(&case.t).unwrap()));
    }
    g.finish();
}

fn bench_invariant(c: &mut Criterion) {
    let mut g = c.benchmark_group(format!("invariant-{MODE}"));
    for case in cases() {
        let system = AngleSystem::new(&case.t).unwrap();
        let s = system.random_structure(&case.group, 1).unwrap();
        g.bench_function(case.name, |b| {
            b.iter(|| {
                let report = total_invariant(&case.t, &s).unwrap();
                assert!(report.holds);
            })
        });
    }
    g.finish();
}

fn bench_trace(c: &mut Criterion) {
    let mut g = c.benchmark_group(format!("trace-{MODE}"));
    g.sample_size(20);
    for case in cases() {
        let system = AngleSystem::new(&case.t).unwrap();
        let ctx = TraceContext::new(&case.t).unwrap();
        let s = system.random_structure(&case.group, 1).unwrap();
        g.bench_function(case.name, |b| {
            b.iter(|| {
                let report = run_trace_with(&ctx, &s).unwrap();
                assert!(report.passed());
            })
        });
    }
    g.finish();
}

/// The fuzzer's steady state: many structures verified against one
/// triangulation with shared combinatorial data.
fn bench_batch(c: &mut Criterion) {
    let mut g = c.benchmark_group(format!("batch16-{MODE}"));
    g.sample_size(10);
    for case in cases() {
        let system = AngleSystem::new(&case.t).unwrap();
        let ctx = TraceContext::new(&case.t).unwrap();
        let structures: Vec<_> = (0..16)
            .map(|seed| system.random_structure(&case.group, seed).unwrap())
            .collect();
        g.bench_function(case.name, |b| {
            b.iter(|| {
                for s in &structures {
                    assert!(total_invariant(&case.t, s).unwrap().holds);
                    assert!(run_trace_with(&ctx, s).unwrap().passed());
                }
            })
        });
    }
    g.finish();
}

criterion_group!(pipeline, bench_factor, bench_invariant, bench_trace, bench_batch);
criterion_main!(pipeline);
