use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use partialcp::channels::{is_positive_map, kraus_from_choi, transfer_from_kraus};
use partialcp::compatdomain::{boundary_radius, DomainQuery};
use partialcp::matcore::herm_eig;
use partialcp::opendyn::{reduced_map, ReducedDynamics};
use partialcp::random::{random_cptp_kraus, random_hermitian, random_unitary};
use partialcp::search::SearchConfig;
use partialcp::{AssignmentMap, BlochVector, Generator, Superoperator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn eigensolver(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut group = c.benchmark_group("herm_eig");
    for n in [4, 8, 16] {
        let m = random_hermitian(n, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| herm_eig(black_box(m))));
    }
    group.finish();
}

fn representations(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t = transfer_from_kraus(&random_cptp_kraus(3, 3, 4, &mut rng));
    c.bench_function("choi_kraus_round_trip_d3", |b| {
        b.iter(|| {
            let k = kraus_from_choi(&black_box(&t).choi()).unwrap();
            transfer_from_kraus(&k)
        })
    });
}

fn positivity_search(c: &mut Criterion) {
    let flip = Superoperator::flip_map();
    c.bench_function("positive_map_search_flip", |b| {
        b.iter(|| is_positive_map(black_box(&flip), SearchConfig::default()))
    });
}

fn reduction(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rd = ReducedDynamics::new(AssignmentMap::correlated(0.5), Generator::Unitary(random_unitary(4, &mut rng))).unwrap();
    c.bench_function("reduced_map_qubit", |b| b.iter(|| reduced_map(black_box(&rd), 0.0)));
}

fn domain(c: &mut Criterion) {
    let q = DomainQuery::phi(&AssignmentMap::correlated(0.5)).unwrap();
    let dir = BlochVector::new(1.0, 1.0, 1.0);
    c.bench_function("boundary_radius", |b| b.iter(|| boundary_radius(black_box(&q), dir)));
}

criterion_group!(benches, eigensolver, representations, positivity_search, reduction, domain);
criterion_main!(benches);
