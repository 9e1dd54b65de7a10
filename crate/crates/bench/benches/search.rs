//! Automorphism search, state-space exploration and property checks on
//! the library fixtures.

use std::collections::BTreeSet;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use symcsp::checkers::{pairwise_sync_on, symmetric_on};
use symcsp::graph::automorphisms;
use symcsp::library::{gen_buffer_system, gen_sync_io, gen_two_process_sync_io, networks};
use symcsp::{explore, Limits, Vertex};

fn automorphism_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("automorphisms");
    for (name, net) in [
        ("three_cycle", networks::three_cycle()),
        ("positive", networks::positive()),
        ("complete6", networks::complete(6)),
    ] {
        g.bench_function(name, |b| b.iter(|| automorphisms(black_box(&net)).unwrap()));
    }
    g.finish();
}

fn exploration(c: &mut Criterion) {
    let mut g = c.benchmark_group("explore");
    let cycle = gen_sync_io(&networks::three_cycle(), true).unwrap();
    for (name, sys) in [
        ("two_process_sync_io", gen_two_process_sync_io().unwrap()),
        ("buffer", gen_buffer_system().unwrap()),
        ("sync_io_three_cycle", cycle),
    ] {
        g.bench_function(name, |b| {
            b.iter(|| explore(black_box(&sys), Limits::default()).unwrap())
        });
    }
    g.finish();
}

fn checks(c: &mut Criterion) {
    let sys = gen_sync_io(&networks::three_cycle(), true).unwrap();
    let graph = explore(&sys, Limits::default()).unwrap();
    let all: BTreeSet<Vertex> = sys.vertices().cloned().collect();
    let group = automorphisms(sys.network()).unwrap();
    let mut g = c.benchmark_group("check_three_cycle");
    g.bench_function("pairwise_sync", |b| {
        b.iter(|| pairwise_sync_on(black_box(&graph), &all))
    });
    g.bench_function("symmetric", |b| {
        b.iter(|| symmetric_on(black_box(&graph), &group, Limits::default()))
    });
    g.finish();
}

criterion_group!(benches, automorphism_search, exploration, checks);
criterion_main!(benches);
