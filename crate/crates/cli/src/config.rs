//! Command-line flags, config files and the merged run configuration.
//!
//! Precedence is flags, then the `--config` TOML file, then built-in defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use monopsony_core::{CostFunction, Profile, UpdateOrder};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "monopsony-polar",
    version,
    about = "Platform competition under monopsonistic lobbying"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub knobs: Knobs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Costs, wage envelope and rents across benefactors
    Envelope,
    /// Expected payoffs and marginal payoffs at a profile
    Payoff,
    /// Best-response map over the rival's platform
    BrMap,
    /// Solve and certify the equilibrium for one cost
    Equilibrium,
    /// Best-response dynamics trace (or a batch of random starts)
    Dynamics,
    /// Equilibria across several cost families
    Sweep,
    /// Competitive-wage benchmark optimum
    Benchmark,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    ClosedForm,
    Dynamics,
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Quarters,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Sequential,
    Simultaneous,
}

impl From<Order> for UpdateOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::Sequential => UpdateOrder::Sequential,
            Order::Simultaneous => UpdateOrder::Simultaneous,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Knobs {
    /// TOML file with defaults for any of the flags below
    #[arg(long, global = true, value_name = "PATH")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Cost family: linear | power:<p> | exp:<k> | pwl:<kink>@<ratio>
    #[arg(long, global = true, value_name = "SPEC")]
    pub cost: Option<String>,

    /// Comma-separated cost families for `sweep`
    #[arg(long, global = true, value_name = "SPECS")]
    pub costs: Option<String>,

    /// Platform profile `x1,x2`
    #[arg(long, global = true, value_name = "X1,X2")]
    pub profile: Option<String>,

    /// Starting profile `x1,x2` for dynamics
    #[arg(long, global = true, value_name = "X1,X2")]
    pub init: Option<String>,

    /// Grid size (rows for envelope/br-map, profile grid for brute force)
    #[arg(long, global = true, value_name = "N")]
    pub grid_n: Option<usize>,

    /// Convergence tolerance for dynamics
    #[arg(long, global = true, value_name = "T")]
    pub tol: Option<f64>,

    /// Deviation threshold for the brute-force grid oracle
    #[arg(long, global = true, value_name = "E")]
    pub eps: Option<f64>,

    #[arg(long, global = true, value_name = "K")]
    pub max_iter: Option<usize>,

    /// Output file; stdout when absent
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Seed for random starts in dynamics batches
    #[arg(long, global = true, value_name = "S")]
    pub seed: Option<u64>,

    /// Number of random starts; switches `dynamics` to batch mode
    #[arg(long, global = true, value_name = "N")]
    pub starts: Option<usize>,

    /// Solver for `equilibrium` and `sweep`
    #[arg(long, global = true, value_enum)]
    pub method: Option<SolveMethod>,

    /// Fail with exit status 3 unless every sweep result passes the check
    #[arg(long, global = true, value_enum)]
    pub check: Option<Check>,

    /// Update order for dynamics
    #[arg(long, global = true, value_enum)]
    pub order: Option<Order>,

    /// Grid used to certify equilibria against unilateral deviations
    #[arg(long, global = true, value_name = "N")]
    pub dev_grid_n: Option<usize>,

    /// Also write a gnuplot script for `envelope` / `br-map` output
    #[arg(long, global = true, value_name = "PATH")]
    pub gnuplot: Option<PathBuf>,
}

impl Knobs {
    fn or(self, file: Knobs) -> Knobs {
        Knobs {
            config: self.config,
            cost: self.cost.or(file.cost),
            costs: self.costs.or(file.costs),
            profile: self.profile.or(file.profile),
            init: self.init.or(file.init),
            grid_n: self.grid_n.or(file.grid_n),
            tol: self.tol.or(file.tol),
            eps: self.eps.or(file.eps),
            max_iter: self.max_iter.or(file.max_iter),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
            seed: self.seed.or(file.seed),
            starts: self.starts.or(file.starts),
            method: self.method.or(file.method),
            check: self.check.or(file.check),
            order: self.order.or(file.order),
            dev_grid_n: self.dev_grid_n.or(file.dev_grid_n),
            gnuplot: self.gnuplot.or(file.gnuplot),
        }
    }
}

pub const MIN_GRID: usize = 101;

/// Effective settings for one run, echoed into every JSON artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub cost: CostFunction,
    pub costs: Vec<CostFunction>,
    pub profile: Profile,
    pub init: Profile,
    pub grid_n: usize,
    pub tol: f64,
    pub eps: f64,
    pub max_iter: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub starts: Option<usize>,
    pub method: SolveMethod,
    pub check: Option<Check>,
    pub order: Order,
    pub dev_grid_n: usize,
    #[serde(skip)]
    pub gnuplot: Option<PathBuf>,
}

fn knob_error(knob: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("--{knob}: {msg}"))
}

fn parse_cost(knob: &str, spec: &str) -> Result<CostFunction, CliError> {
    spec.parse().map_err(|e| knob_error(knob, e))
}

/// Splits a comma-separated list of cost specs. A bare `<kink>@<ratio>` item
/// continues the preceding `pwl` spec, so `pwl:0.3@0.5,0.6@2` stays whole.
pub fn parse_cost_list(list: &str) -> Result<Vec<CostFunction>, CliError> {
    let mut specs: Vec<String> = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match specs.last_mut() {
            Some(prev) if !item.contains(':') && item.contains('@') && prev.starts_with("pwl:") => {
                prev.push(',');
                prev.push_str(item);
            }
            _ => specs.push(item.to_string()),
        }
    }
    if specs.is_empty() {
        return Err(knob_error("costs", "empty list"));
    }
    specs.iter().map(|s| parse_cost("costs", s)).collect()
}

pub fn parse_profile(knob: &str, text: &str) -> Result<Profile, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        return Err(knob_error(knob, format!("expected `x1,x2`, got `{text}`")));
    };
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| knob_error(knob, format!("`{s}` is not a number ({e})")))
    };
    Profile::new(num(a)?, num(b)?).map_err(|e| knob_error(knob, e))
}

fn read_config_file(path: &Path) -> Result<Knobs, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| knob_error("config", format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| knob_error("config", format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(command: Command, flags: Knobs) -> Result<Self, CliError> {
        let knobs = match &flags.config {
            Some(path) => {
                let file = read_config_file(path)?;
                flags.or(file)
            }
            None => flags,
        };
        let method = knobs.method.unwrap_or(SolveMethod::ClosedForm);
        let default_grid = match command {
            Command::Envelope => monopsony_core::export::DEFAULT_ENVELOPE_POINTS,
            Command::BrMap => monopsony_core::export::DEFAULT_BR_MAP_POINTS,
            _ => 101,
        };
        let grid_n = knobs.grid_n.unwrap_or(default_grid);
        if grid_n < MIN_GRID {
            return Err(knob_error(
                "grid-n",
                format!("must be at least {MIN_GRID}, got {grid_n}"),
            ));
        }
        let dev_grid_n = knobs
            .dev_grid_n
            .unwrap_or(monopsony_core::equilibrium::DEFAULT_DEVIATION_GRID);
        if dev_grid_n < MIN_GRID {
            return Err(knob_error(
                "dev-grid-n",
                format!("must be at least {MIN_GRID}, got {dev_grid_n}"),
            ));
        }
        let tol = knobs.tol.unwrap_or(1e-8);
        if tol.is_nan() || tol <= 0.0 {
            return Err(knob_error("tol", format!("must be positive, got {tol}")));
        }
        let eps = knobs.eps.unwrap_or(1e-9);
        if eps.is_nan() || eps <= 0.0 {
            return Err(knob_error("eps", format!("must be positive, got {eps}")));
        }
        let max_iter = knobs.max_iter.unwrap_or(50);
        if max_iter == 0 {
            return Err(knob_error("max-iter", "must be at least 1"));
        }
        if knobs.starts == Some(0) {
            return Err(knob_error("starts", "must be at least 1"));
        }
        let cost = match &knobs.cost {
            Some(s) => parse_cost("cost", s)?,
            None => CostFunction::Linear,
        };
        let costs = match &knobs.costs {
            Some(s) => parse_cost_list(s)?,
            None => CostFunction::shipped(),
        };
        let profile = match &knobs.profile {
            Some(s) => parse_profile("profile", s)?,
            None => Profile::new(0.25, 0.75).unwrap(),
        };
        let init = match &knobs.init {
            Some(s) => parse_profile("init", s)?,
            None => Profile::new(0.1, 0.6).unwrap(),
        };
        let default_format = match command {
            Command::Envelope | Command::BrMap | Command::Dynamics => Format::Csv,
            _ => Format::Json,
        };
        Ok(Self {
            command,
            cost,
            costs,
            profile,
            init,
            grid_n,
            tol,
            eps,
            max_iter,
            out: knobs.out,
            format: knobs.format.unwrap_or(default_format),
            seed: knobs.seed.unwrap_or(0),
            starts: knobs.starts,
            method,
            check: knobs.check,
            order: knobs.order.unwrap_or(Order::Sequential),
            dev_grid_n,
            gnuplot: knobs.gnuplot,
        })
    }
}
