#![allow(dead_code)]

use monopsony_core::CostFunction;
use proptest::prelude::*;

/// Fixed-step composite Simpson on each piece between sorted cut points.
/// Deliberately unrelated to the adaptive integrator under test.
pub fn simpson_pieces<F: Fn(f64) -> f64>(f: F, cuts: &[f64], per_piece: usize) -> f64 {
    let mut cuts: Vec<f64> = cuts.iter().copied().filter(|x| (0.0..=1.0).contains(x)).collect();
    cuts.extend([0.0, 1.0]);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let n = per_piece + per_piece % 2;
    cuts.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let h = (b - a) / n as f64;
            let mut s = f(a) + f(b);
            for k in 1..n {
                s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
            }
            s * h / 3.0
        })
        .sum()
}

/// Rent of a politician at `own` against a rival at `rival`, written straight
/// from the wage rule: the benefactor pays the larger of the two costs.
pub fn rent_from_wage_rule(c: &CostFunction, own: f64, rival: f64, b: f64) -> f64 {
    let mine = c.eval((own - b).abs()).unwrap();
    let theirs = c.eval((rival - b).abs()).unwrap();
    mine.max(theirs) - mine
}

pub fn cost_strategy() -> impl Strategy<Value = CostFunction> {
    prop_oneof![
        Just(CostFunction::Linear),
        (0.3f64..4.0).prop_map(|p| CostFunction::power(p).unwrap()),
        (0.5f64..3.5).prop_map(|k| CostFunction::exponential(k).unwrap()),
        (0.1f64..0.9, 0.2f64..5.0).prop_map(|(at, r)| CostFunction::piecewise_linear(at, r).unwrap()),
    ]
}

pub fn smooth_cost_strategy() -> impl Strategy<Value = CostFunction> {
    prop_oneof![
        Just(CostFunction::Linear),
        (1.0f64..4.0).prop_map(|p| CostFunction::power(p).unwrap()),
        (0.5f64..3.5).prop_map(|k| CostFunction::exponential(k).unwrap()),
    ]
}
