use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use monopsony_core::equilibrium::{batch_dynamics, solve_dynamics, DynamicsOptions};
use monopsony_core::export::{self, format_sig, EquilibriumReport, SCHEMA};
use monopsony_core::{
    benchmark_objective, benchmark_optimum, best_response, brute_force_nash, expected_utility,
    marginal_utility, solve_closed_form, verify_equilibrium, CostFunction, EquilibriumMethod,
    EquilibriumResult, PayoffMethod, Player, Profile,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{Check, Command, Format, RunConfig, SolveMethod};
use crate::CliError;

/// Executes one command and writes its artifact.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let body = render(config)?;
    match &config.out {
        Some(path) => std::fs::write(path, &body)?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    if let Some(script) = &config.gnuplot {
        let data = config.out.as_deref().ok_or_else(|| {
            CliError::Config("--gnuplot: needs --out so the script can find the data".into())
        })?;
        std::fs::write(script, gnuplot_script(config.command, data)?)?;
    }
    Ok(())
}

/// The artifact text for `config`, without touching the filesystem.
pub fn render(config: &RunConfig) -> Result<String, CliError> {
    match config.command {
        Command::Envelope => envelope(config),
        Command::Payoff => payoff(config),
        Command::BrMap => br_map(config),
        Command::Equilibrium => equilibrium(config),
        Command::Dynamics => dynamics(config),
        Command::Sweep => sweep(config),
        Command::Benchmark => benchmark(config),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn envelope(config: &RunConfig) -> Result<String, CliError> {
    let csv = export::envelope_csv(&config.profile, &config.cost, config.grid_n)?;
    Ok(match config.format {
        Format::Csv => csv,
        Format::Json => {
            let rows: Vec<serde_json::Value> = csv
                .lines()
                .skip(1)
                .map(|line| {
                    let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
                    json!({"b": v[0], "c1": v[1], "c2": v[2], "w": v[3], "u1": v[4], "u2": v[5]})
                })
                .collect();
            to_json(&json!({"schema": SCHEMA, "config": config, "rows": rows}))
        }
    })
}

fn payoff(config: &RunConfig) -> Result<String, CliError> {
    let p = &config.profile;
    let mut players = Vec::new();
    for player in Player::BOTH {
        let analytic = expected_utility(player, p, &config.cost, PayoffMethod::Analytic)?;
        let quadrature = expected_utility(player, p, &config.cost, PayoffMethod::Quadrature)?;
        // undefined where the platforms coincide
        let marginal = marginal_utility(player, p, &config.cost).ok();
        players.push((player, analytic, quadrature, marginal));
    }
    Ok(match config.format {
        Format::Csv => {
            let mut out = String::from("player,analytic,quadrature,abs_error_estimate,marginal\n");
            for (player, a, q, m) in &players {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    player.index(),
                    format_sig(a.expected_utility),
                    format_sig(q.expected_utility),
                    format_sig(q.abs_error_estimate),
                    m.map(format_sig).unwrap_or_default()
                )
                .unwrap();
            }
            out
        }
        Format::Json => {
            let players: Vec<_> = players
                .iter()
                .map(|(player, a, q, m)| {
                    json!({"player": player.index(), "analytic": a, "quadrature": q, "marginal": m})
                })
                .collect();
            to_json(&json!({"schema": SCHEMA, "config": config, "players": players}))
        }
    })
}

fn br_map(config: &RunConfig) -> Result<String, CliError> {
    Ok(match config.format {
        Format::Csv => export::br_map_csv(&config.cost, config.grid_n)?,
        Format::Json => {
            let rows = monopsony_core::equilibrium::uniform_grid(config.grid_n)
                .into_iter()
                .map(|xj| {
                    let br = best_response(xj, &config.cost)?;
                    Ok(json!({"xj": xj, "candidates": br.candidates, "values": br.values, "is_tie": br.is_tie}))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            to_json(&json!({"schema": SCHEMA, "config": config, "rows": rows}))
        }
    })
}

fn solve(config: &RunConfig, cost: &CostFunction) -> Result<EquilibriumResult, CliError> {
    match config.method {
        SolveMethod::ClosedForm => {
            let mut r = solve_closed_form(cost)?;
            if config.dev_grid_n != monopsony_core::equilibrium::DEFAULT_DEVIATION_GRID {
                r.max_deviation_gain = verify_equilibrium(&r.profile, cost, config.dev_grid_n)?;
            }
            Ok(r)
        }
        SolveMethod::Dynamics => {
            let (mut r, trace) = solve_dynamics(config.init, cost, &dynamics_options(config))?;
            if !trace.converged {
                return Err(CliError::CheckFailed(format!(
                    "dynamics for {cost} did not converge within {} rounds",
                    config.max_iter
                )));
            }
            r.max_deviation_gain = verify_equilibrium(&r.profile, cost, config.dev_grid_n)?;
            Ok(r)
        }
        SolveMethod::BruteForce => {
            let found = brute_force_nash(cost, config.grid_n, config.eps)?;
            let profile = found
                .iter()
                .copied()
                .find(|p| p.x1() <= p.x2())
                .or_else(|| found.first().copied())
                .ok_or_else(|| {
                    CliError::CheckFailed(format!(
                        "no grid equilibrium for {cost} at grid {} and eps {:e}; eps is too small for the grid",
                        config.grid_n, config.eps
                    ))
                })?;
            Ok(EquilibriumResult {
                profile,
                max_deviation_gain: verify_equilibrium(&profile, cost, config.dev_grid_n)?,
                method: EquilibriumMethod::BruteForce,
                iterations: config.grid_n * config.grid_n,
            })
        }
    }
}

#[derive(Serialize)]
struct EquilibriumOutput<'a> {
    #[serde(flatten)]
    report: EquilibriumReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_equilibria: Option<Vec<[f64; 2]>>,
    config: &'a RunConfig,
}

/// Multi-kink `pwl` specs contain commas.
fn csv_field(s: &str) -> String {
    if s.contains(',') {
        format!("\"{s}\"")
    } else {
        s.to_string()
    }
}

const CSV_EQ_HEADER: &str = "cost,method,x1,x2,max_deviation_gain,iterations\n";

fn equilibrium_row(r: &EquilibriumReport) -> String {
    let method = serde_json::to_value(r.method).unwrap();
    format!(
        "{},{},{},{},{},{}\n",
        csv_field(&r.cost),
        method.as_str().unwrap(),
        format_sig(r.x1),
        format_sig(r.x2),
        format_sig(r.max_deviation_gain),
        r.iterations
    )
}

fn equilibrium(config: &RunConfig) -> Result<String, CliError> {
    let result = solve(config, &config.cost)?;
    let report = EquilibriumReport::new(&config.cost, &result);
    Ok(match config.format {
        Format::Csv => format!("{CSV_EQ_HEADER}{}", equilibrium_row(&report)),
        Format::Json => {
            let grid_equilibria = match config.method {
                SolveMethod::BruteForce => Some(
                    brute_force_nash(&config.cost, config.grid_n, config.eps)?
                        .iter()
                        .map(|p| [p.x1(), p.x2()])
                        .collect(),
                ),
                _ => None,
            };
            to_json(&EquilibriumOutput {
                report,
                grid_equilibria,
                config,
            })
        }
    })
}

fn dynamics_options(config: &RunConfig) -> DynamicsOptions {
    DynamicsOptions {
        max_iter: config.max_iter,
        tol: config.tol,
        order: config.order.into(),
    }
}

/// `n` starting profiles with distinct coordinates, reproducible from `seed`.
pub fn random_starts(n: usize, seed: u64) -> Vec<Profile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| loop {
            let (a, b): (f64, f64) = (rng.gen(), rng.gen());
            if (a - b).abs() > 1e-6 {
                break Profile::new(a, b).unwrap();
            }
        })
        .collect()
}

fn dynamics(config: &RunConfig) -> Result<String, CliError> {
    let opts = dynamics_options(config);
    if let Some(n) = config.starts {
        let starts = random_starts(n, config.seed);
        let traces = batch_dynamics(&starts, &config.cost, &opts)?;
        return Ok(match config.format {
            Format::Csv => {
                let mut out = String::from("start,x1_0,x2_0,x1,x2,rounds,converged,tie_events\n");
                for (i, t) in traces.iter().enumerate() {
                    let (s, e) = (t.iterates[0], t.last());
                    writeln!(
                        out,
                        "{i},{},{},{},{},{},{},{}",
                        format_sig(s.x1()),
                        format_sig(s.x2()),
                        format_sig(e.x1()),
                        format_sig(e.x2()),
                        t.rounds(),
                        t.converged,
                        t.tie_events
                    )
                    .unwrap();
                }
                out
            }
            Format::Json => to_json(&json!({"schema": SCHEMA, "config": config, "traces": traces})),
        });
    }
    let trace = monopsony_core::best_response_dynamics(config.init, &config.cost, &opts)?;
    Ok(match config.format {
        Format::Csv => export::dynamics_csv(&trace),
        Format::Json => to_json(&json!({"schema": SCHEMA, "config": config, "trace": trace})),
    })
}

#[derive(Serialize)]
struct SweepCheck {
    check: Check,
    passed: bool,
    failures: Vec<String>,
}

fn quarters_tolerance(config: &RunConfig) -> f64 {
    match config.method {
        SolveMethod::ClosedForm => 1e-9,
        SolveMethod::Dynamics => config.tol.max(1e-9),
        SolveMethod::BruteForce => 2.0 / (config.grid_n - 1) as f64,
    }
}

fn sweep(config: &RunConfig) -> Result<String, CliError> {
    let results = config
        .costs
        .par_iter()
        .map(|c| solve(config, c).map(|r| EquilibriumReport::new(c, &r)))
        .collect::<Result<Vec<_>, CliError>>()?;

    let check = config.check.map(|check| {
        let tol = quarters_tolerance(config);
        let failures: Vec<String> = results
            .iter()
            .filter(|r| {
                let p = Profile::new(r.x1, r.x2).unwrap().canonical();
                (p.x1() - 0.25).abs() > tol
                    || (p.x2() - 0.75).abs() > tol
                    || r.max_deviation_gain > monopsony_core::equilibrium::VERIFY_TOLERANCE
            })
            .map(|r| r.cost.clone())
            .collect();
        SweepCheck {
            check,
            passed: failures.is_empty(),
            failures,
        }
    });

    let body = match config.format {
        Format::Csv => {
            let mut out = String::from(CSV_EQ_HEADER);
            for r in &results {
                out.push_str(&equilibrium_row(r));
            }
            out
        }
        Format::Json => to_json(&json!({
            "schema": SCHEMA,
            "config": config,
            "results": results,
            "check": check,
        })),
    };
    match check {
        Some(c) if !c.passed => {
            // still emit the data so the failure can be inspected
            match &config.out {
                Some(path) => std::fs::write(path, &body)?,
                None => std::io::stdout().lock().write_all(body.as_bytes())?,
            }
            Err(CliError::CheckFailed(format!(
                "quarters check failed for {}",
                c.failures.join(", ")
            )))
        }
        _ => Ok(body),
    }
}

fn benchmark(config: &RunConfig) -> Result<String, CliError> {
    let optimum = benchmark_optimum(&config.cost)?;
    let objective = benchmark_objective(optimum, &config.cost)?;
    Ok(match config.format {
        Format::Csv => format!(
            "cost,optimum,objective\n{},{},{}\n",
            csv_field(&config.cost.to_string()),
            format_sig(optimum),
            format_sig(objective)
        ),
        Format::Json => to_json(&json!({
            "schema": SCHEMA,
            "config": config,
            "cost": config.cost,
            "optimum": optimum,
            "objective": objective,
        })),
    })
}

fn gnuplot_script(command: Command, data: &Path) -> Result<String, CliError> {
    let data = data.display();
    let mut s = String::from("set datafile separator \",\"\nset key top center\n");
    match command {
        Command::Envelope => {
            writeln!(s, "set xlabel \"b\"\nset ylabel \"utility\"").unwrap();
            writeln!(
                s,
                "plot \"{data}\" using 1:2 with lines title \"c1\", \\\n     \"\" using 1:3 with lines title \"c2\", \\\n     \"\" using 1:4 with lines lw 2 title \"w\""
            )
            .unwrap();
        }
        Command::BrMap => {
            writeln!(s, "set xlabel \"x_j\"\nset ylabel \"best response\"").unwrap();
            writeln!(
                s,
                "plot \"{data}\" using 1:2 with points pt 7 ps 0.3 title \"br1\", \\\n     \"\" using 1:3 with points pt 7 title \"br2\""
            )
            .unwrap();
        }
        _ => {
            return Err(CliError::Config(
                "--gnuplot: only supported for envelope and br-map".into(),
            ))
        }
    }
    Ok(s)
}
