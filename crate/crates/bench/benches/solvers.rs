use std::time::Duration;

use cantisim_bench::fixture;
use cantisim_core::reduced::{adiabatic_rates, evolve_populations};
use cantisim_core::solver::{evolve_master, evolve_trajectories, steady_state_report};
use cantisim_core::units::mhz;
use cantisim_core::{Integrator, SolverOptions, TrajectoryConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn master(c: &mut Criterion) {
    let mut g = c.benchmark_group("master");
    for fock in [10, 20] {
        let f = fixture("fig3", fock, 0.5);
        g.bench_with_input(BenchmarkId::new("rk4_fig3", fock), &f, |b, f| {
            b.iter(|| evolve_master(&f.model, &f.initial, &f.options).unwrap())
        });
        let opts = f.options.clone().with_integrator(Integrator::Rk45);
        g.bench_with_input(BenchmarkId::new("rk45_fig3", fock), &f, |b, f| {
            b.iter(|| evolve_master(&f.model, &f.initial, &opts).unwrap())
        });
    }
    g.finish();
}

fn trajectories(c: &mut Criterion) {
    let f = fixture("fig3", 20, 0.5);
    let tcfg = TrajectoryConfig { n_trajectories: 50, master_seed: 1 };
    c.bench_function("trajectories_fig3_50", |b| {
        b.iter(|| evolve_trajectories(&f.model, &f.initial, &f.options, &tcfg).unwrap())
    });
}

fn steady(c: &mut Criterion) {
    let mut g = c.benchmark_group("steady_state");
    g.bench_function("fig3_n20", |b| {
        let f = fixture("fig3", 20, 1.0);
        b.iter(|| steady_state_report(&f.model).unwrap())
    });
    for fock in [20, 40] {
        let f = fixture("fig6", fock, 1.0);
        g.bench_with_input(BenchmarkId::new("fig6", fock), &f, |b, f| b.iter(|| steady_state_report(&f.model).unwrap()));
    }
    g.finish();
}

fn reduced(c: &mut Criterion) {
    let rates = adiabatic_rates(mhz(1.0), mhz(4.0), mhz(50.0));
    let gamma = mhz(50.0) / 5e4;
    let up = rates.heating_rate() + 41.0 * gamma;
    let down = rates.a_minus + 42.0 * gamma;
    let x: f64 = 41.0 / 42.0;
    let p0: Vec<f64> = (0..=400).map(|n| x.powi(n) / 42.0).collect();
    let opts = SolverOptions::uniform(1e-6, 11);
    c.bench_function("populations_n400_1us", |b| b.iter(|| evolve_populations(up, down, &p0, &opts).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10).measurement_time(Duration::from_secs(3));
    targets = master, trajectories, steady, reduced
}
criterion_main!(benches);
