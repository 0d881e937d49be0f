use criterion::{criterion_group, criterion_main, Criterion};
use subsel::{lazy_greedy, naive_greedy, FacilityLocation, SetObjective, SparseFacilityLocation};
use subsel_bench::{similarity, sparse_similarity};

const SEED: u64 = 7;
const N: usize = 512;
const DIM: usize = 32;
const K: usize = 32;

fn bench_greedy(c: &mut Criterion) {
    let sim = similarity(SEED, N, DIM);
    let objective = FacilityLocation::new(&sim);
    let mut group = c.benchmark_group("greedy");
    group.bench_function("naive", |b| b.iter(|| naive_greedy(&objective, K).unwrap()));
    group.bench_function("lazy", |b| b.iter(|| lazy_greedy(&objective, K).unwrap()));
    group.finish();
}

fn bench_gain(c: &mut Criterion) {
    let sim = similarity(SEED, N, DIM);
    let objective = FacilityLocation::new(&sim);
    let prefix = lazy_greedy(&objective, 16).unwrap().order;
    let mut state = objective.initial_state();
    for &j in &prefix {
        objective.commit(&mut state, j).unwrap();
    }
    let base = objective.evaluate(&prefix).unwrap();
    let candidates: Vec<usize> = (0..N).filter(|j| !prefix.contains(j)).collect();
    let mut group = c.benchmark_group("gain_scan");
    group.bench_function("memoized", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for &j in &candidates {
                acc += objective.gain(&state, j).unwrap();
            }
            acc
        })
    });
    group.bench_function("evaluate_difference", |b| {
        let mut subset = prefix.clone();
        b.iter(|| {
            let mut acc = 0.0;
            for &j in &candidates {
                subset.push(j);
                acc += objective.evaluate(&subset).unwrap() - base;
                subset.pop();
            }
            acc
        })
    });
    group.finish();
}

fn bench_sparsity(c: &mut Criterion) {
    let sim = similarity(SEED, N, DIM);
    let graph = sparse_similarity(SEED, N, DIM, 16);
    let dense = FacilityLocation::new(&sim);
    let sparse = SparseFacilityLocation::new(&graph);
    let mut group = c.benchmark_group("facility_location");
    group.bench_function("dense", |b| b.iter(|| lazy_greedy(&dense, K).unwrap()));
    group.bench_function("sparse", |b| b.iter(|| lazy_greedy(&sparse, K).unwrap()));
    group.finish();
}

criterion_group!(
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = bench_greedy, bench_gain, bench_sparsity
);
criterion_main!(benches);
