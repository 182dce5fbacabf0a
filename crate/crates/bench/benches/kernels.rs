//! Microbenchmarks for the numerical kernels: quadrature, the analytic
//! density grid and one Crank-Nicolson propagation step.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64 as C64;

use tdtunnel_core::density::density_grid;
use tdtunnel_core::model::{BarrierSpec, EnergyPair, Particle, PerturbationSpec};
use tdtunnel_core::numerics::{adaptive_quadrature, endpoint_singular_quadrature};
use tdtunnel_core::scenario::density_solution;
use tdtunnel_core::tdse::{init_packet, GridSpec, PerturbationRegion, Propagator, WavePacket};

fn bench_quadrature(c: &mut Criterion) {
    c.bench_function("adaptive_quadrature_oscillatory", |b| {
        b.iter(|| {
            adaptive_quadrature(
                |x| (10.0 * x).sin() * (-x).exp(),
                black_box(0.0),
                black_box(5.0),
                1e-10,
            )
            .unwrap()
            .value
        })
    });
    c.bench_function("endpoint_singular_quadrature_inv_sqrt", |b| {
        b.iter(|| {
            endpoint_singular_quadrature(
                |x| 1.0 / x.sqrt(),
                black_box(0.0),
                black_box(1.0),
                1e-10,
            )
            .unwrap()
            .value
        })
    });
}

fn bench_density_grid(c: &mut Criterion) {
    let p = Particle::new(1.0, 0.5).unwrap();
    let barrier = BarrierSpec::rectangular(1.0, 1.0).unwrap();
    let pert = PerturbationSpec::Constant { v0: 0.1 };
    let ep = EnergyPair::new(0.5, 0.5).unwrap();
    let sol = density_solution(&p, &barrier, &pert, &ep, None).unwrap();
    c.bench_function("density_grid_201x101", |b| {
        b.iter(|| density_grid(black_box(&sol), 0.0, 50.0, 201, 0.0, 1.0, 101).unwrap())
    });
}

fn bench_propagator_step(c: &mut Criterion) {
    let p = Particle::new(1.0, 0.5).unwrap();
    let barrier = BarrierSpec::rectangular(1.0, 2.0).unwrap();
    let grid = GridSpec::new(-250.0, 250.0, 2501, 0.01).unwrap();
    let packet = WavePacket {
        x0: -60.0,
        sigma: 15.0,
        k0: 1.0,
    };
    let psi0 = init_packet(&grid, &packet).unwrap();
    let mut prop = Propagator::new(grid, &p, &barrier, PerturbationRegion::BarrierOnly).unwrap();
    c.bench_function("crank_nicolson_step_2501", |b| {
        let mut psi: Vec<C64> = psi0.clone();
        b.iter(|| {
            prop.step(&mut psi, black_box(0.0), grid.dt);
        })
    });
}

criterion_group!(
    kernels,
    bench_quadrature,
    bench_density_grid,
    bench_propagator_step
);
criterion_main!(kernels);
