use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid cost parameter: {0}")]
    InvalidCost(String),

    #[error("cannot parse cost spec `{spec}`: {reason}")]
    CostSpec { spec: String, reason: String },

    #[error("payoff is not differentiable at x_i = x_j = {0}")]
    Degenerate(f64),

    #[error("quadrature did not converge: error estimate {estimate:e} after {intervals} subintervals")]
    QuadratureNonConvergence { estimate: f64, intervals: usize },

    #[error("optimizer did not converge after {iterations} iterations (bracket width {width:e})")]
    OptimizerNonConvergence { iterations: usize, width: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Checks `lo <= value <= hi`, rejecting NaN.
pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    domain: &'static str,
) -> Result<()> {
    if value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::Domain { name, value, domain })
    }
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    check_range(name, value, 0.0, 1.0, "[0, 1]")
}
