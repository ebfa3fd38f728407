use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use flataff::cech::{coboundary_matrix_with, LocalSystem, Nerve};
use flataff::cohomology::CoefficientModule;
use flataff::group::{fox_jacobian_with, Presentation, Word};
use flataff::rational::frac;
use flataff::{MatrixQ, Strategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STRATEGIES: [(&str, Strategy); 2] = [("sequential", Strategy::Sequential), ("parallel", Strategy::Parallel)];

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> MatrixQ {
    let data = (0..rows * cols).map(|_| frac(rng.gen_range(-9..=9), rng.gen_range(1..=5))).collect();
    MatrixQ::new(rows, cols, data).unwrap()
}

fn rref(c: &mut Criterion) {
    let mut group = c.benchmark_group("rref");
    group.sample_size(10);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [24, 48] {
        let m = random_matrix(&mut rng, n, n + 8);
        for (name, s) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, n), &m, |b, m| b.iter(|| black_box(m.rref_with(s))));
        }
    }
    group.finish();
}

/// Commutators of all generator pairs of a free-abelian-like presentation.
fn fox(c: &mut Criterion) {
    let mut group = c.benchmark_group("fox_jacobian");
    group.sample_size(10);
    let k = 12;
    let relators: Vec<Word> =
        (0..k).flat_map(|i| (i + 1..k).map(move |j| Word::commutator(&Word::gen(i), &Word::gen(j)))).collect();
    let p = Presentation::new(k, relators).unwrap();
    let module = CoefficientModule::trivial(p.clone(), 3);
    for (name, s) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| black_box(fox_jacobian_with(&p, &module, s))));
    }
    group.finish();
}

fn coboundary(c: &mut Criterion) {
    let mut group = c.benchmark_group("cech_coboundary_matrix");
    group.sample_size(10);
    let system = LocalSystem::constant(Nerve::simplex_boundary(6), 2);
    for (name, s) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| black_box(coboundary_matrix_with(&system, 2, s).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, rref, fox, coboundary);
criterion_main!(benches);
