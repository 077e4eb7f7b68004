use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dstit_bench::{generated, verdict, FORMULAS};
use dstit_core::harness::{generate_model, GenParams};
use dstit_core::{parse, Evaluator};

fn parsing(c: &mut Criterion) {
    c.bench_function("parse", |b| {
        b.iter(|| {
            for text in FORMULAS {
                black_box(parse(text).unwrap());
            }
        })
    });
}

fn generation(c: &mut Criterion) {
    let mut seed = 0;
    c.bench_function("generate_model", |b| {
        b.iter(|| {
            seed += 1;
            black_box(generate_model(&GenParams::varied(seed, 0)).unwrap())
        })
    });
}

fn truth_sets(c: &mut Criterion) {
    let m = verdict();
    let formulas: Vec<_> = FORMULAS.iter().map(|t| parse(t).unwrap()).collect();
    c.bench_function("truth_set/verdict", |b| {
        b.iter(|| {
            let mut ev = Evaluator::new(&m);
            for f in &formulas {
                black_box(ev.truth_set(f).unwrap());
            }
        })
    });

    let models = generated(0..20);
    let f = parse("Ob:alice p -> (Os:alice p | K:alice p)").unwrap();
    c.bench_function("truth_set/generated", |b| {
        b.iter(|| {
            for m in &models {
                black_box(Evaluator::new(m).truth_set(&f).unwrap());
            }
        })
    });
}

criterion_group!(benches, parsing, generation, truth_sets);
criterion_main!(benches);
