use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ecrt::ecrt::EcrtCodec;
use ecrt::experiments::{fig2_sweep, SweepParams};
use ecrt::modcore::{acquire_with, synthesize_signal, NoiseSpec, SignalSpec, SystemConfig};
use ecrt::par::Exec;
use ecrt::rcrt::RcrtCodec;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn codecs(c: &mut Criterion) {
    let config = SystemConfig::simulation(14).unwrap();
    let n = 200_000;
    let signal = synthesize_signal(&SignalSpec::new(0.5, 2200.0, n as f64, 1)).unwrap();
    let frames = acquire_with(Exec::Parallel, &signal, &config, &NoiseSpec::uniform(0.5, 1.0, 2), n).unwrap();

    let mut group = c.benchmark_group("ecrt_round_trip");
    for (name, exec) in STRATEGIES {
        let codec = EcrtCodec::new(config).with_exec(exec);
        group.bench_with_input(BenchmarkId::from_parameter(name), &frames, |b, f| {
            b.iter(|| black_box(codec.decode(&codec.encode(f))))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("rcrt_round_trip");
    for (name, exec) in STRATEGIES {
        let codec = RcrtCodec::new(config).unwrap().with_exec(exec);
        group.bench_with_input(BenchmarkId::from_parameter(name), &frames, |b, f| {
            b.iter(|| black_box(codec.decode(&codec.encode(f))))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("acquire");
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| {
            b.iter(|| black_box(acquire_with(exec, &signal, &config, &NoiseSpec::uniform(0.5, 1.0, 2), n).unwrap()))
        });
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("fig2_sweep");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        let params = SweepParams {
            signal: SignalSpec::new(0.5, 2200.0, 5_000.0, 1),
            exec,
            ..SweepParams::simulation_defaults()
        };
        group.bench_function(name, |b| b.iter(|| black_box(fig2_sweep(&params).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, codecs, sweeps);
criterion_main!(benches);
