use std::collections::BTreeSet;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use coarsedim_core::coarse::{e_multiplicity, Subset};
use coarsedim_core::covers::{greedy_bdiscrete_cover, staircase, ScalarField};
use coarsedim_core::dynamics::FiniteAction;
use coarsedim_core::groups::{GroupElement, GroupSpec};

fn ball_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("ball");
    for radius in [6u32, 10] {
        group.bench_with_input(BenchmarkId::new("z2", radius), &radius, |b, &r| {
            let spec = GroupSpec::lattice(2).unwrap();
            b.iter(|| spec.ball(r).unwrap().gr(r))
        });
        group.bench_with_input(BenchmarkId::new("heisenberg", radius), &radius, |b, &r| {
            let spec = GroupSpec::heisenberg().unwrap();
            b.iter(|| spec.ball(r).unwrap().gr(r))
        });
    }
    group.finish();
}

fn transversal_multiplicity(c: &mut Criterion) {
    let mut group = c.benchmark_group("e-multiplicity");
    for q in [60usize, 120] {
        let a = FiniteAction::cyclic_translation(q, 6).unwrap();
        let k: Subset = (0..q).collect();
        let l: BTreeSet<GroupElement> =
            (-1..=1).map(|v| GroupElement::Lattice(vec![v])).collect();
        let b: BTreeSet<GroupElement> =
            (-2..=2).map(|v| GroupElement::Lattice(vec![v])).collect();
        let (_, cover) = greedy_bdiscrete_cover(&a, &k, &l, &b).unwrap();
        let e = a.orbit_entourage(&k, &l).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(q), &q, |bch, _| {
            bch.iter(|| e_multiplicity(&cover, &e).unwrap())
        });
    }
    group.finish();
}

fn staircase_smoothing(c: &mut Criterion) {
    let mut group = c.benchmark_group("staircase");
    for n in [3u32, 5] {
        let q = 120;
        let a = FiniteAction::cyclic_translation(q, 16).unwrap();
        let l: BTreeSet<GroupElement> =
            (-1..=1).map(|v| GroupElement::Lattice(vec![v])).collect();
        let f = ScalarField::indicator(q, &(40..60).collect());
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bch, &n| {
            bch.iter(|| staircase(&a, &f, &l, n).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ball_enumeration, transversal_multiplicity, staircase_smoothing);
criterion_main!(benches);
