use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use proxima::classify::predict_corpus;
use proxima::{
    rank_corpus, Corpus, InfluenceKernel, PositionalDocument, QueryAst, RbfConfig, Scorer,
};
use proxima_bench::{fixture, term_lists};

fn query() -> QueryAst {
    QueryAst::or(
        QueryAst::and(QueryAst::term("c0d0"), QueryAst::term("c0d1")),
        QueryAst::near(7, "c1d2", "c1d2e0"),
    )
}

fn indexing(c: &mut Criterion) {
    let lists = term_lists(1000, 200, 1);
    c.bench_function("index 1000x200", |b| {
        b.iter_batched(
            || lists.clone(),
            |lists| {
                let mut corpus = Corpus::new();
                for (id, terms) in lists {
                    corpus
                        .insert(PositionalDocument::from_terms(id, terms))
                        .unwrap();
                }
                corpus
            },
            BatchSize::LargeInput,
        )
    });
}

fn scoring(c: &mut Criterion) {
    let synth = fixture(1000, 200, 2);
    let kernel = InfluenceKernel::triangular(5).unwrap();
    let q = query();
    let mut group = c.benchmark_group("rank 1000x200");
    for (name, scorer) in [
        ("standard", Scorer::Standard(kernel)),
        ("rbf", Scorer::Rbf(RbfConfig::new(5, kernel).unwrap())),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| rank_corpus(black_box(&synth.corpus), &q, &scorer))
        });
    }
    group.finish();
}

fn classification(c: &mut Criterion) {
    let synth = fixture(300, 200, 3);
    let kernel = InfluenceKernel::triangular(2).unwrap();
    let mut group = c.benchmark_group("classify 300x200");
    group.sample_size(20);
    for (name, scorer) in [
        ("standard", Scorer::Standard(kernel)),
        ("rbf", Scorer::Rbf(RbfConfig::new(6, kernel).unwrap())),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| {
                predict_corpus(black_box(&synth.corpus), &synth.categories, &scorer, None).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, indexing, scoring, classification);
criterion_main!(benches);
