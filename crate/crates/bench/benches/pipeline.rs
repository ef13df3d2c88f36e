use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use branchgrid::homology::homology_f2;
use branchgrid::maps::commutation::CommutationSurface;
use branchgrid::pipeline::{compute, signed};
use branchgrid::{build_lifted, GradedComplex, Ring, VariableOrder};
use branchgrid_bench::{complex, grid, label, CASES};

fn build(c: &mut Criterion) {
    let mut g = c.benchmark_group("build");
    for &(name, m) in CASES {
        let d = build_lifted(&grid(name), m);
        g.bench_with_input(BenchmarkId::from_parameter(label(name, m)), &d, |b, d| {
            b.iter(|| GradedComplex::build(d).unwrap())
        });
    }
    g.finish();
}

fn signs(c: &mut Criterion) {
    let mut g = c.benchmark_group("signs");
    g.sample_size(10);
    for &(name, m) in CASES {
        let cx = complex(name, m);
        g.bench_with_input(BenchmarkId::from_parameter(label(name, m)), &cx, |b, cx| {
            b.iter(|| signed(cx, VariableOrder::Canonical).unwrap())
        });
    }
    g.finish();
}

fn homology(c: &mut Criterion) {
    let mut g = c.benchmark_group("homology");
    g.sample_size(10);
    for &(name, m) in CASES {
        let cx = complex(name, m);
        g.bench_with_input(BenchmarkId::new("f2", label(name, m)), &cx, |b, cx| {
            b.iter(|| homology_f2(cx).unwrap())
        });
        let gr = grid(name);
        g.bench_with_input(BenchmarkId::new("z", label(name, m)), &gr, |b, gr| {
            b.iter(|| compute(gr, m, Ring::Z).unwrap())
        });
    }
    g.finish();
}

fn commutation(c: &mut Criterion) {
    let cs = CommutationSurface::new(&grid("unknot4c"), 0, 2).unwrap();
    c.bench_function("commutation/unknot4c/m2", |b| {
        b.iter(|| (0..2).all(|t| cs.step(t).unwrap().check_z().unwrap().0.all()))
    });
}

criterion_group!(benches, build, signs, homology, commutation);
criterion_main!(benches);
