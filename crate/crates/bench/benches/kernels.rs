//! Benchmarks of the numerical kernels on a representative parameter set
//! (alpha = 0.05, omega_c = 4, mu = 1/2, V = 1/2): the dressing factor in
//! both its closed and quadrature forms, the displacement propagator, one
//! response transform, full generator assembly, trajectory propagation, and
//! the two crossover solvers.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use duet_core::bath::{dressing_factor, dressing_factor_quadrature};
use duet_core::crossover::{solve_tc_approx, solve_tc_full, xi_squared};
use duet_core::dynamics::{closed_form_resonant, donor_start, evolve};
use duet_core::{
    Axis, BathModel, Bracket, Generator, Mu, Propagator, Regime, ResponseSet, SystemModel,
    ThermalState,
};

const TOL: f64 = 1e-10;

fn bath() -> BathModel {
    BathModel::three_dimensional(0.05, 4.0, Mu::Finite(0.5))
}

fn system() -> SystemModel {
    SystemModel::new(0.0, 0.5).unwrap()
}

fn propagator(temperature: f64) -> Propagator {
    Propagator::new(bath(), ThermalState::new(temperature).unwrap()).unwrap()
}

fn generator(temperature: f64) -> Generator {
    let responses = ResponseSet::with_tolerance(propagator(temperature), TOL);
    Generator::build(Regime::Resonant, &system(), &responses).unwrap()
}

fn time_grid() -> Vec<f64> {
    (0..600).map(|i| 60.0 * i as f64 / 599.0).collect()
}

fn bench_dressing(c: &mut Criterion) {
    let bath = bath();
    let thermal = ThermalState::new(5.0).unwrap();
    c.bench_function("dressing/closed_form", |b| {
        b.iter(|| dressing_factor(black_box(&bath), black_box(&thermal), TOL).unwrap())
    });
    c.bench_function("dressing/quadrature", |b| {
        b.iter(|| dressing_factor_quadrature(black_box(&bath), black_box(&thermal), 1e-8).unwrap())
    });
}

fn bench_propagator(c: &mut Criterion) {
    let prop = propagator(5.0);
    c.bench_function("propagator/phi_closed", |b| {
        b.iter(|| prop.phi(black_box(1.7)).unwrap())
    });
    c.bench_function("propagator/phi_numeric", |b| {
        b.iter(|| prop.phi_numeric(black_box(1.7), 1e-8).unwrap())
    });
}

fn bench_response(c: &mut Criterion) {
    let responses = ResponseSet::with_tolerance(propagator(5.0), TOL);
    // One half-line Fourier transform of the dressed correlator: the unit
    // of cost behind every rate entering the generator.
    c.bench_function("response/transform_yy", |b| {
        b.iter(|| responses.response(Axis::Y, black_box(0.16)).unwrap())
    });
}

fn bench_generator(c: &mut Criterion) {
    let system = system();
    let bath = bath();
    // The whole per-point pipeline as the command-line tool runs it:
    // thermal state, propagator, response transforms, rate assembly.
    c.bench_function("generator/build_resonant", |b| {
        b.iter(|| {
            let thermal = ThermalState::new(black_box(5.0)).unwrap();
            let prop = Propagator::new(bath.clone(), thermal).unwrap();
            let responses = ResponseSet::with_tolerance(prop, TOL);
            Generator::build(Regime::Resonant, &system, &responses).unwrap()
        })
    });
}

fn bench_trajectories(c: &mut Criterion) {
    let generator = generator(5.0);
    let times = time_grid();
    c.bench_function("dynamics/evolve_600", |b| {
        b.iter(|| evolve(black_box(&generator), donor_start(), black_box(&times)).unwrap())
    });
    c.bench_function("dynamics/closed_form_resonant_600", |b| {
        b.iter(|| closed_form_resonant(black_box(&generator), black_box(&times)).unwrap())
    });
}

fn bench_crossover(c: &mut Criterion) {
    let system = system();
    let bath = bath();
    c.bench_function("crossover/xi_squared", |b| {
        b.iter(|| xi_squared(black_box(&system), black_box(&bath), black_box(12.0)).unwrap())
    });
    c.bench_function("crossover/solve_approx", |b| {
        b.iter(|| solve_tc_approx(black_box(&system), black_box(&bath), Bracket::default()).unwrap())
    });
    let mut slow = c.benchmark_group("crossover");
    // Each criterion evaluation runs several adaptive transforms; keep the
    // sample count small so the whole suite stays under a minute.
    slow.sample_size(10);
    slow.bench_function("solve_full", |b| {
        b.iter(|| solve_tc_full(black_box(&system), black_box(&bath), Bracket::default()).unwrap())
    });
    slow.finish();
}

criterion_group!(
    benches,
    bench_dressing,
    bench_propagator,
    bench_response,
    bench_generator,
    bench_trajectories,
    bench_crossover
);
criterion_main!(benches);
