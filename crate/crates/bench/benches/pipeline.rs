use std::hint::black_box;

use brandt_core::brandt::BrandtCollection;
use brandt_core::ideals::enumerate_classes;
use brandt_core::quaternion::{construct_algebra, construct_maximal_order};
use brandt_core::spectral::{eigendecompose, sturm_bound};
use brandt_core::supersingular::SupersingularSet;
use brandt_core::theta::ThetaReport;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const LEVELS: [u64; 3] = [37, 101, 199];

fn stages(c: &mut Criterion) {
    let mut g = c.benchmark_group("stages");
    g.sample_size(10);
    for level in LEVELS {
        let order = construct_maximal_order(&construct_algebra(level).unwrap()).unwrap();
        g.bench_with_input(BenchmarkId::new("classes", level), &level, |b, &n| {
            b.iter(|| enumerate_classes(black_box(&order), n).unwrap())
        });

        let classes = enumerate_classes(&order, level).unwrap();
        let bound = sturm_bound(level) + 2;
        g.bench_with_input(BenchmarkId::new("brandt", level), &bound, |b, &m| {
            b.iter(|| BrandtCollection::compute(black_box(&classes), m).unwrap())
        });

        let collection = BrandtCollection::compute(&classes, bound).unwrap();
        g.bench_with_input(BenchmarkId::new("eigendecompose", level), &collection, |b, col| {
            b.iter(|| eigendecompose(black_box(col), 0).unwrap())
        });

        let spectrum = eigendecompose(&collection, 0).unwrap();
        g.bench_with_input(BenchmarkId::new("theta_report", level), &collection, |b, col| {
            b.iter(|| ThetaReport::build(black_box(col), &spectrum, 0).unwrap())
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("supersingular");
    g.sample_size(10);
    for level in [37, 101] {
        g.bench_with_input(BenchmarkId::from_parameter(level), &level, |b, &n| {
            b.iter(|| SupersingularSet::compute(black_box(n)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, stages, oracle);
criterion_main!(benches);
