use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use itomc::engine::{run_fast_mcs, run_traditional_mcs};
use itomc::model::wind_model;
use itomc::response::EndpointResponse;
use itomc::sampling::Placement;
use itomc::sde::simulate_em_path;
use itomc::spectral::{spectral_path_with_table, BasisTable};
use itomc::TimeGrid;

/// Single-path cost of the two integrators on the bundled wind model,
/// 1200 steps each (60 s at h = 0.05).
fn paths(c: &mut Criterion) {
    let model = wind_model();
    let grid = TimeGrid::new(0.0, 60.0, 0.05).unwrap();
    c.bench_function("em_path_1200_steps", |b| {
        b.iter(|| simulate_em_path(&model, &grid, model.initial(), 7, black_box(0)).unwrap())
    });

    let k = 6;
    let table = BasisTable::new(&grid, k).unwrap();
    let zeta: Vec<f64> = (0..k).map(|j| 0.3 - 0.1 * j as f64).collect();
    c.bench_function("spectral_path_1200_steps_k6", |b| {
        b.iter(|| {
            spectral_path_with_table(&model, &grid, model.initial(), black_box(&zeta), &table, 0)
                .unwrap()
        })
    });
}

/// Whole-ensemble cost of a small endpoint study, both routes.
fn engine(c: &mut Criterion) {
    let model = wind_model();
    let grid = TimeGrid::new(0.0, 10.0, 0.01).unwrap();
    let rrf = EndpointResponse { component: 0 };
    c.bench_function("traditional_mcs_n64", |b| {
        b.iter(|| run_traditional_mcs(&model, &rrf, &grid, 64, black_box(7), 1).unwrap())
    });
    c.bench_function("fast_mcs_n64_k4", |b| {
        b.iter(|| {
            run_fast_mcs(&model, &rrf, &grid, 64, 4, black_box(7), Placement::Uniform, true, 1)
                .unwrap()
        })
    });
}

criterion_group!(benches, paths, engine);
criterion_main!(benches);
