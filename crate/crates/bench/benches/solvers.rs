use criterion::{black_box, criterion_group, criterion_main, Criterion};

use steadyfsi::config::RunConfig;
use steadyfsi::discrete::{solve_continuity, solve_momentum};
use steadyfsi::fixedpoint::{apply_t, initial_state, RunLog};
use steadyfsi::operators::BogovskiiSolver;

fn solvers(c: &mut Criterion) {
    let cfg = RunConfig::default().solver_config().unwrap();
    let s = initial_state(&cfg).unwrap();
    let (grid, u) = (&s.fluid.grid, &s.fluid.u);

    c.bench_function("continuity_32", |b| {
        b.iter(|| {
            solve_continuity(
                black_box(u),
                grid,
                &cfg.law,
                &cfg.reg,
                &cfg.bc,
                &cfg.continuity,
            )
            .unwrap()
        })
    });
    c.bench_function("momentum_32", |b| {
        b.iter(|| {
            solve_momentum(
                black_box(&s.fluid.rho),
                u,
                grid,
                &cfg.params,
                &cfg.law,
                &cfg.reg,
                &cfg.bc,
            )
            .unwrap()
        })
    });
    c.bench_function("apply_t_32", |b| {
        b.iter(|| {
            let mut log = RunLog::new();
            apply_t(black_box(&s), &cfg, &mut log).unwrap()
        })
    });
    let bog = BogovskiiSolver::new(grid).unwrap();
    let g: Vec<f64> = s.fluid.rho.iter().map(|r| r.sqrt()).collect();
    c.bench_function("bogovskii_32", |b| {
        b.iter(|| bog.solve(black_box(&g)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = solvers
}
criterion_main!(benches);
