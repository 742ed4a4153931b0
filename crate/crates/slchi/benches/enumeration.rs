//! Parallel vs sequential timings for the data-parallel kernels.
//! `sequential` runs the same code on a one-thread pool.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use slchi::counting::chi_local;
use slchi::par;
use slchi::sl2_local::{count_det_one, sl2_elements};
use slchi::subgroup::{enumerate_subgroups, Subgroup};
use slchi::{Ring, RingSpec};

fn modes(c: &mut Criterion, name: &str, mut body: impl FnMut() + Send) {
    let mut g = c.benchmark_group(name);
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("default", par::is_parallel()), |b| b.iter(&mut body));
    g.bench_function("sequential", |b| b.iter(|| par::sequential(&mut body)));
    g.finish();
}

fn benches(c: &mut Criterion) {
    let z27 = Ring::build(&RingSpec::rational(3, 3)).unwrap();
    modes(c, "count_det_one/Z27", || {
        std::hint::black_box(count_det_one(&z27));
    });
    modes(c, "sl2_elements/Z27", || {
        std::hint::black_box(sl2_elements(&z27).len());
    });

    let z4 = Ring::build(&RingSpec::rational(2, 2)).unwrap();
    modes(c, "enumerate_subgroups/Z4", || {
        std::hint::black_box(enumerate_subgroups(&z4, 1000).unwrap().len());
    });

    let g = Subgroup::full(&z27);
    modes(c, "chi_local/SL2(Z27)", || {
        std::hint::black_box(chi_local(&g, 1 << 21).unwrap());
    });
}

criterion_group!(enumeration, benches);
criterion_main!(enumeration);
