use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use monopsony_core::game::quadrature_payoff;
use monopsony_core::{numeric_best_response, payoff, CostFunction, PayoffMethod, Player, Profile};

fn bench_payoff(c: &mut Criterion) {
    let profile = Profile::new(0.3, 0.8).unwrap();
    for cost in ["linear", "power:0.5", "exp:3", "pwl:0.4@3"] {
        let cost: CostFunction = cost.parse().unwrap();
        c.bench_function(&format!("payoff/analytic/{cost}"), |b| {
            b.iter(|| payoff(black_box(0.3), black_box(0.8), &cost))
        });
        c.bench_function(&format!("payoff/quadrature/{cost}"), |b| {
            b.iter(|| quadrature_payoff(Player::One, black_box(&profile), &cost, 1e-10).unwrap())
        });
    }
}

fn bench_numeric_best_response(c: &mut Criterion) {
    let cost = CostFunction::exponential(3.0).unwrap();
    c.bench_function("numeric_best_response/1001", |b| {
        b.iter(|| numeric_best_response(black_box(0.7), &cost, 1001, PayoffMethod::Analytic).unwrap())
    });
}

criterion_group!(benches, bench_payoff, bench_numeric_best_response);
criterion_main!(benches);
