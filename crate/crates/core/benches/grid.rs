//! Parallel vs sequential grid evaluation, and the single-point pipeline.
//!
//! Run with `cargo bench -p cavmag`. The sequential path is always compiled;
//! the parallel case only exists with the `parallel` feature (default).

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use cavmag::sweep::{figure_preset, run_grid_seq, run_point};

#[cfg(feature = "parallel")]
use cavmag::sweep::run_grid;

fn shrink(spec: &mut cavmag::sweep::GridSpec, n1: usize, n2: usize) {
    spec.axis1.count = n1;
    if let Some(ax) = spec.axis2.as_mut() {
        ax.count = n2;
    }
}

fn bench_point(c: &mut Criterion) {
    let p = cavmag::model::SystemParams::paper_defaults();
    c.bench_function("run_point", |b| b.iter(|| run_point(&p)));
}

fn bench_grid(c: &mut Criterion) {
    let mut spec = figure_preset("fig2").unwrap();
    shrink(&mut spec, 24, 24);

    let mut group = c.benchmark_group("grid_24x24");
    group.sample_size(20);
    group.bench_function("sequential", |b| {
        b.iter_batched(|| spec.clone(), |s| run_grid_seq(&s).unwrap(), BatchSize::SmallInput)
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter_batched(|| spec.clone(), |s| run_grid(&s).unwrap(), BatchSize::SmallInput)
    });
    group.finish();
}

criterion_group!(benches, bench_point, bench_grid);
criterion_main!(benches);
