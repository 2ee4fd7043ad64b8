use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use optospring::cavity::{cooling_ratio_surface, SurfaceGrid};
use optospring::geometry::polarizability;
use optospring::oracle::{simulate_gas_langevin, SdeConfig};
use optospring::trap::axial_frequency;
use optospring::units::KB;
use optospring::{CavityConfig, DiskMirror, Execution, TrapBeams};
use std::hint::black_box;

const STRATEGIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn omega_z(disk: &DiskMirror) -> f64 {
    axial_frequency(
        &TrapBeams::design_point(),
        &polarizability(disk).unwrap(),
        disk,
    )
}

fn bench_surface(c: &mut Criterion) {
    let disk = DiskMirror::design_point();
    let cav = CavityConfig::design_point();
    let wz = omega_z(&disk);
    let grid = SurfaceGrid::default();
    let mut group = c.benchmark_group("cooling_ratio_surface_121x81");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| cooling_ratio_surface(black_box(&grid), &cav, wz, disk.mass, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_gas_ensemble(c: &mut Criterion) {
    let disk = DiskMirror::design_point();
    let wz = omega_z(&disk);
    let cfg = SdeConfig {
        omega_z: wz,
        gamma_bg: 1e-2 * wz,
        temperature: 300.0,
        mass: disk.mass,
        s_intensity: 0.0,
        dt: 0.02 / wz,
        n_steps: 10_000,
        n_trajectories: 200,
        seed: 1,
        initial_energy: 10.0 * KB * 300.0,
    };
    let mut group = c.benchmark_group("gas_langevin_200x10k");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| simulate_gas_langevin(black_box(&cfg), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_surface, bench_gas_ensemble);
criterion_main!(benches);
