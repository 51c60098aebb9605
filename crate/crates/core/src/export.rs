//! CSV and JSON artifacts for plotting and cross-checking.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::best_response::best_response;
use crate::cost::CostFunction;
use crate::equilibrium::{uniform_grid, DynamicsTrace, EquilibriumMethod, EquilibriumResult};
use crate::error::{Error, Result};
use crate::game::Profile;

pub const SCHEMA: &str = "monopsony-polar/1";
pub const SIGNIFICANT_DIGITS: usize = 12;
pub const DEFAULT_ENVELOPE_POINTS: usize = 1001;
pub const DEFAULT_BR_MAP_POINTS: usize = 501;

/// `%.12g`-style formatting: 12 significant digits, trailing zeros dropped,
/// exponent notation outside `[1e-4, 1e12)`.
pub fn format_sig(v: f64) -> String {
    format_sig_digits(v, SIGNIFICANT_DIGITS)
}

pub fn format_sig_digits(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn check_points(points: usize) -> Result<()> {
    if points < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 points, got {points}"
        )));
    }
    Ok(())
}

/// Costs, wage envelope and rents on a uniform grid of benefactors:
/// `b,c1,c2,w,u1,u2`.
pub fn envelope_csv(profile: &Profile, cost: &CostFunction, points: usize) -> Result<String> {
    check_points(points)?;
    let mut out = String::from("b,c1,c2,w,u1,u2\n");
    for b in uniform_grid(points) {
        let c1 = cost.eval((profile.x1() - b).abs())?;
        let c2 = cost.eval((profile.x2() - b).abs())?;
        let w = c1.max(c2);
        let row = [b, c1, c2, w, w - c1, w - c2].map(format_sig).join(",");
        writeln!(out, "{row}").unwrap();
    }
    Ok(out)
}

/// Closed-form best-response map on a uniform grid of rival platforms:
/// `xj,br1,br2_or_empty,U_at_br`.
pub fn br_map_csv(cost: &CostFunction, points: usize) -> Result<String> {
    check_points(points)?;
    let mut out = String::from("xj,br1,br2_or_empty,U_at_br\n");
    for xj in uniform_grid(points) {
        let br = best_response(xj, cost)?;
        let second = if br.is_tie {
            format_sig(br.right())
        } else {
            String::new()
        };
        writeln!(
            out,
            "{},{},{},{}",
            format_sig(xj),
            format_sig(br.left()),
            second,
            format_sig(br.best_value())
        )
        .unwrap();
    }
    Ok(out)
}

/// `iter,x1,x2,residual`; the starting row has an empty residual.
pub fn dynamics_csv(trace: &DynamicsTrace) -> String {
    let mut out = String::from("iter,x1,x2,residual\n");
    for (i, p) in trace.iterates.iter().enumerate() {
        let residual = match i {
            0 => String::new(),
            _ => format_sig(trace.residuals[i - 1]),
        };
        writeln!(
            out,
            "{i},{},{},{residual}",
            format_sig(p.x1()),
            format_sig(p.x2())
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub schema: String,
    pub cost_family: String,
    pub params: Vec<f64>,
    pub cost: String,
    pub method: EquilibriumMethod,
    pub x1: f64,
    pub x2: f64,
    pub max_deviation_gain: f64,
    pub iterations: usize,
}

impl EquilibriumReport {
    pub fn new(cost: &CostFunction, result: &EquilibriumResult) -> Self {
        Self {
            schema: SCHEMA.into(),
            cost_family: cost.family().into(),
            params: cost.params(),
            cost: cost.to_string(),
            method: result.method,
            x1: result.profile.x1(),
            x2: result.profile.x2(),
            max_deviation_gain: result.max_deviation_gain,
            iterations: result.iterations,
        }
    }
}
