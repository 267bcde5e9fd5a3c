use criterion::{black_box, criterion_group, criterion_main, Criterion};

use cubic_rings::algebra::BranchCase;
use cubic_rings::duality::trace_dual;
use cubic_rings::families::{make_am, make_family, FamilyDescriptor, Subscript};
use cubic_rings::ideals::iso_classes;
use cubic_rings::overrings::{brute_force_overrings, closed_form_lattices, overrings_by_procedure};
use cubic_rings_bench::algebra;

fn enumeration(c: &mut Criterion) {
    let a = algebra(5, BranchCase::ThreeBranches);
    let mut g = c.benchmark_group("overrings m=3 p=5 (3)");
    g.bench_function("closed form", |b| b.iter(|| closed_form_lattices(&a, black_box(3)).unwrap()));
    g.bench_function("procedure", |b| b.iter(|| overrings_by_procedure(&a, black_box(3)).unwrap()));
    g.bench_function("exhaustive", |b| b.iter(|| brute_force_overrings(&a, black_box(3)).unwrap()));
    g.finish();
}

fn duals(c: &mut Criterion) {
    let a = algebra(7, BranchCase::OneBranchRamified);
    let d = FamilyDescriptor::shifted(BranchCase::OneBranchRamified, 1, Subscript::Rho(3), vec![4]);
    let ring = make_family(&a, &d).unwrap();
    c.bench_function("trace dual 1r k=1 rho=3", |b| b.iter(|| trace_dual(black_box(&ring)).unwrap()));
}

fn census(c: &mut Criterion) {
    let mut g = c.benchmark_group("ideal census A_2");
    g.sample_size(10);
    for p in [5, 13] {
        let a = algebra(p, BranchCase::OneBranchRamified);
        let a2 = make_am(&a, 2).unwrap();
        g.bench_function(format!("1r p={p}"), |b| b.iter(|| iso_classes(black_box(&a2)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, enumeration, duals, census);
criterion_main!(benches);
