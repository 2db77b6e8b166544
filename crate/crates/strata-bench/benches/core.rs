//! Benchmarks for the hot paths: Hecke-algebra products in the T-basis,
//! Smith normal form, and fiber-algebra block analysis.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use strata_core::exquo::sl5d_action;
use strata_core::findim::descriptor::{build_fiber, CoefficientKind, FiberDescriptor};
use strata_core::hecke::{hecke_mul, HeckeElt};
use strata_core::lattice::smith_normal_form;
use strata_core::weyl::{ball, RootSystemSpec};

/// Square of the full radius-3 ball sum: every pairwise basis product up to
/// length 6, with coefficient bookkeeping.
fn hecke_products(c: &mut Criterion) {
    let spec = RootSystemSpec::a_sl(3).expect("spec");
    let elements = ball(spec, 3).expect("ball");
    let mut sum = HeckeElt::zero(spec);
    for x in &elements {
        sum = sum.add(&HeckeElt::basis(x)).expect("same spec");
    }
    let mut group = c.benchmark_group("hecke");
    group.sample_size(20);
    group.bench_function("ball3_sum_squared", |b| {
        b.iter(|| hecke_mul(black_box(&sum), black_box(&sum)).expect("product"))
    });
    group.finish();
}

/// A fixed pseudo-random 8×8 integer matrix with small entries.
fn snf_input() -> Vec<Vec<i64>> {
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1);
        ((state >> 33) % 19) as i64 - 9
    };
    (0..8).map(|_| (0..8).map(|_| next()).collect()).collect()
}

fn smith_form(c: &mut Criterion) {
    let matrix = snf_input();
    c.bench_function("smith_normal_form_8x8", |b| {
        b.iter(|| smith_normal_form(black_box(&matrix)))
    });
}

/// Block census of the 32-dimensional wall fiber of the rank-4 Klein
/// family: radical, central splitting, and block dimensions.
fn fiber_blocks(c: &mut Criterion) {
    let desc = FiberDescriptor::CrossedProduct {
        action: sl5d_action().0.to_json(),
        coefficient: CoefficientKind::M2Rho,
        cocycle: None,
    };
    let point: Vec<_> =
        ["2", "3", "2", "3"].iter().map(|s| s.parse().expect("scalar")).collect();
    let mut group = c.benchmark_group("fiber");
    group.sample_size(10);
    group.bench_function("wall_fiber_blocks", |b| {
        b.iter(|| {
            let alg = build_fiber(black_box(&desc), black_box(&point)).expect("fiber");
            alg.blocks().expect("blocks")
        })
    });
    group.finish();
}

criterion_group!(benches, hecke_products, smith_form, fiber_blocks);
criterion_main!(benches);
