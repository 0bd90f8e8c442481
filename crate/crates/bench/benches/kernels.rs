use std::collections::BTreeMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use vecstruct_bench::random_form;
use vecstruct_core::clifford::build_clifford;
use vecstruct_core::exterior::{hodge, wedge};
use vecstruct_core::geometry::{riemann, ConnectionSpec, FdPolicy, Model};
use vecstruct_core::groups::{self, GroupId};
use vecstruct_core::torsion::{analyze_theta, TorsionSolver};

fn exterior(c: &mut Criterion) {
    let a = random_form(1, 8, 3);
    let b = random_form(2, 8, 4);
    c.bench_function("wedge 3x4 forms on R^8", |bench| bench.iter(|| wedge(black_box(&a), black_box(&b))));
    c.bench_function("hodge star of a 4-form on R^8", |bench| bench.iter(|| hodge(black_box(&b))));
    let rep = build_clifford(8).unwrap();
    let psi = vecstruct_core::clifford::Spinor::basis(8, 0);
    c.bench_function("clifford action of a 3-form, n=8", |bench| {
        bench.iter(|| rep.act(black_box(&a), black_box(&psi)))
    });
}

fn structure(c: &mut Criterion) {
    let mut g = c.benchmark_group("structure groups");
    g.sample_size(10);
    g.bench_function("g2 subalgebra", |bench| bench.iter(|| groups::subalgebra(&GroupId::G2, 7)));
    let g2 = groups::subalgebra(&GroupId::G2, 7).unwrap();
    g.bench_function("analyze_theta G2", |bench| bench.iter(|| analyze_theta(black_box(&g2))));
    let solver = TorsionSolver::new(&g2).unwrap();
    let gamma = random_form(3, 7, 1);
    g.bench_function("torsion solve G2", |bench| bench.iter(|| solver.solve(black_box(&gamma))));
    let so3 = groups::subalgebra(&GroupId::So3Irred5, 5).unwrap();
    g.bench_function("casimir split SO(3) on forms of degree 3", |bench| {
        bench.iter(|| groups::casimir_split(&so3, groups::RepSpace::Forms(3)))
    });
    g.finish();
}

fn chart(c: &mut Criterion) {
    let m = Model::build("conformal_g2", &BTreeMap::new(), FdPolicy::default()).unwrap();
    let x = vec![0.1, -0.2, 0.05, 0.0, 0.3, -0.1, 0.2];
    let mut g = c.benchmark_group("chart geometry");
    g.sample_size(20);
    g.bench_function("christoffel conformal_g2", |bench| bench.iter(|| m.metric.christoffel(black_box(&x))));
    g.bench_function("riemann conformal_g2", |bench| bench.iter(|| riemann(&m.metric, &ConnectionSpec::LeviCivita, black_box(&x))));
    g.finish();
}

criterion_group!(benches, exterior, structure, chart);
criterion_main!(benches);
