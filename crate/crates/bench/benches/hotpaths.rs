//! Hot paths of the simulator, grouped by layer: array responses evaluated
//! thousands of times per beampattern cut, the per-slot sensing/tracking
//! pipeline, the conic beam design that dominates end-to-end runtime, and
//! one full closed-loop frame.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use isac_bench::{config, measurement, track, two_object_problem, uav};
use isac_core::beamform;
use isac_core::phy::{self, ArrayGeometry};
use isac_core::sensing::{self, CrbParams};
use isac_core::sim::{self, Scheme};
use isac_core::tracker::{self, NoiseModel};
use isac_core::world::PolarState;

const FC_HZ: f64 = 30e9;

fn array_responses(c: &mut Criterion) {
    let geom = ArrayGeometry::from_config(&config(30));
    let mut group = c.benchmark_group("array");
    group.bench_function("steering_vector_n30", |b| {
        b.iter(|| phy::steering_vector(black_box(1.2), &geom))
    });
    group.bench_function("channel_vector_n30", |b| {
        b.iter(|| phy::channel_vector(black_box(1.2), black_box(120.0), &geom, 1.0))
    });
    let omni = phy::omni_covariance(1000.0, &geom);
    // the 0.1°-step half-plane cut behind each beampattern CSV row set
    group.bench_function("gain_cut_1801_points_n30", |b| {
        b.iter(|| {
            (0..=1800)
                .map(|i| omni.gain((i as f64 * 0.1).to_radians(), &geom))
                .sum::<f64>()
        })
    });
    group.finish();
}

fn sensing_and_tracking(c: &mut Criterion) {
    let cfg = config(30);
    let crb = CrbParams::from_config(&cfg);
    let noise = NoiseModel::from_config(&cfg);
    let uav = uav();
    let truth = PolarState {
        theta_rad: 1.15,
        d_m: 118.3,
        v_mps: 24.0,
    };
    let mut group = c.benchmark_group("per_slot");
    group.bench_function("crb_variances", |b| {
        b.iter(|| sensing::crb_variances(black_box(12.0), black_box(1.15), black_box(118.3), &crb))
    });
    group.bench_function("synthesize_measurement", |b| {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        b.iter(|| {
            sensing::synthesize_measurement(&truth, &uav, black_box(12.0), FC_HZ, &crb, 1.0, &mut rng)
        })
    });
    let tr = track();
    let meas = measurement();
    group.bench_function("ekf_step", |b| {
        b.iter(|| tracker::ekf_step(&tr, &meas, &uav, &noise, 0.01, FC_HZ))
    });
    group.finish();
}

fn slot_design(c: &mut Criterion) {
    let mut group = c.benchmark_group("design");
    group.sample_size(10);
    group.measurement_time(Duration::from_secs(20));
    let small = two_object_problem(8, 2e-3);
    group.bench_function("solve_beams_n8", |b| {
        b.iter(|| beamform::solve_beams(&small).unwrap())
    });
    let full = two_object_problem(30, 2e-3);
    group.bench_function("solve_beams_n30", |b| {
        b.iter(|| beamform::solve_beams(&full).unwrap())
    });
    group.bench_function("waterfill_mrt_n30", |b| {
        b.iter(|| beamform::waterfill_mrt(&full).unwrap())
    });
    group.finish();
}

fn closed_loop(c: &mut Criterion) {
    let cfg = config(8);
    let mut group = c.benchmark_group("loop");
    group.sample_size(10);
    group.measurement_time(Duration::from_secs(30));
    group.bench_function("one_frame_proposed_n8", |b| {
        b.iter(|| sim::simulate_scheme(&cfg, Scheme::Proposed, black_box(3), 1).unwrap())
    });
    group.finish();
}

criterion_group!(
    hotpaths,
    array_responses,
    sensing_and_tracking,
    slot_design,
    closed_loop
);
criterion_main!(hotpaths);
