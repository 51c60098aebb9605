//! Policy-production cost functions.
//!
//! Every cost is a continuous, strictly increasing map `c: [0, 1] -> [0, inf)`
//! with `c(0) = 0`, expressed as a function of the distance between a
//! politician's platform and the proposed policy. Each family carries a
//! closed-form antiderivative so payoffs can be evaluated exactly.
//!
//! Families are written in a compact text grammar:
//!
//! ```text
//! linear                      c(d) = d
//! power:<p>                   c(d) = d^p,        p > 0
//! exp:<k>                     c(d) = e^(kd) - 1, k > 0
//! pwl:<kink>@<ratio>[,...]    piecewise linear, slope 1 up to the first kink,
//!                             each later segment's slope is the previous one
//!                             times <ratio>
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};

/// A kink of a piecewise-linear cost: at distance `at` the slope is
/// multiplied by `ratio`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kink {
    pub at: f64,
    pub ratio: f64,
}

/// Continuous piecewise-linear cost through the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    kinks: Vec<Kink>,
    // segment k covers [starts[k], starts[k + 1]) with slope slopes[k]
    starts: Vec<f64>,
    slopes: Vec<f64>,
    values: Vec<f64>,
    primitives: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(kinks: Vec<Kink>) -> Result<Self> {
        if kinks.is_empty() {
            return Err(Error::InvalidCost(
                "piecewise-linear cost needs at least one kink".into(),
            ));
        }
        let mut starts = vec![0.0];
        let mut slopes = vec![1.0];
        for k in &kinks {
            let last = *starts.last().unwrap();
            if !(k.at > last && k.at < 1.0) {
                return Err(Error::InvalidCost(format!(
                    "kinks must be strictly increasing inside (0, 1), got {}",
                    k.at
                )));
            }
            if !(k.ratio > 0.0 && k.ratio.is_finite()) {
                return Err(Error::InvalidCost(format!(
                    "slope ratio must be positive and finite, got {}",
                    k.ratio
                )));
            }
            starts.push(k.at);
            slopes.push(slopes.last().unwrap() * k.ratio);
        }
        let mut values = vec![0.0];
        let mut primitives = vec![0.0];
        for s in 1..starts.len() {
            let width = starts[s] - starts[s - 1];
            let v0 = values[s - 1];
            values.push(v0 + slopes[s - 1] * width);
            primitives.push(primitives[s - 1] + v0 * width + 0.5 * slopes[s - 1] * width * width);
        }
        Ok(Self {
            kinks,
            starts,
            slopes,
            values,
            primitives,
        })
    }

    pub fn kinks(&self) -> &[Kink] {
        &self.kinks
    }

    fn segment(&self, d: f64) -> usize {
        self.starts.partition_point(|&s| s <= d).saturating_sub(1)
    }

    fn value(&self, d: f64) -> f64 {
        let s = self.segment(d);
        self.values[s] + self.slopes[s] * (d - self.starts[s])
    }

    fn primitive(&self, d: f64) -> f64 {
        let s = self.segment(d);
        let h = d - self.starts[s];
        self.primitives[s] + self.values[s] * h + 0.5 * self.slopes[s] * h * h
    }
}

/// A strictly increasing policy-production cost with `c(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CostFunction {
    Linear,
    Power { exponent: f64 },
    Exponential { rate: f64 },
    PiecewiseLinear(PiecewiseLinear),
}

impl CostFunction {
    pub fn power(exponent: f64) -> Result<Self> {
        if exponent > 0.0 && exponent.is_finite() {
            Ok(Self::Power { exponent })
        } else {
            Err(Error::InvalidCost(format!(
                "power exponent must be positive and finite, got {exponent}"
            )))
        }
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        // rates past ~700 overflow e^(kd) on [0, 1]
        if rate > 0.0 && rate <= 500.0 {
            Ok(Self::Exponential { rate })
        } else {
            Err(Error::InvalidCost(format!(
                "exponential rate must lie in (0, 500], got {rate}"
            )))
        }
    }

    pub fn piecewise_linear(kink: f64, slope_ratio: f64) -> Result<Self> {
        PiecewiseLinear::new(vec![Kink {
            at: kink,
            ratio: slope_ratio,
        }])
        .map(Self::PiecewiseLinear)
    }

    /// The families exercised by sweeps and acceptance checks: concave,
    /// linear, convex and kinked costs.
    pub fn shipped() -> Vec<CostFunction> {
        [
            "linear",
            "power:0.5",
            "power:1",
            "power:2",
            "power:3",
            "exp:1",
            "exp:3",
            "pwl:0.3@0.5",
            "pwl:0.4@3",
        ]
        .iter()
        .map(|s| s.parse().expect("shipped cost specs are valid"))
        .collect()
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Power { .. } => "power",
            Self::Exponential { .. } => "exp",
            Self::PiecewiseLinear(_) => "pwl",
        }
    }

    /// Numeric parameters in grammar order (kink/ratio pairs for `pwl`).
    pub fn params(&self) -> Vec<f64> {
        match self {
            Self::Linear => vec![],
            Self::Power { exponent } => vec![*exponent],
            Self::Exponential { rate } => vec![*rate],
            Self::PiecewiseLinear(p) => p.kinks.iter().flat_map(|k| [k.at, k.ratio]).collect(),
        }
    }

    /// Distances in (0, 1) where the cost is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::PiecewiseLinear(p) => p.kinks.iter().map(|k| k.at).collect(),
            _ => vec![],
        }
    }

    /// `c(d)` for `d` in `[0, 1]`.
    pub fn eval(&self, d: f64) -> Result<f64> {
        check_unit("distance", d)?;
        Ok(self.value(d))
    }

    /// `∫_a^b c(s) ds` for `0 <= a <= b <= 1`.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        check_unit("lower limit", a)?;
        check_unit("upper limit", b)?;
        if a > b {
            return Err(Error::Domain {
                name: "lower limit",
                value: a,
                domain: "[0, upper limit]",
            });
        }
        Ok(self.primitive(b) - self.primitive(a))
    }

    /// `∫_0^d c(s) ds`.
    pub fn antiderivative(&self, d: f64) -> Result<f64> {
        check_unit("distance", d)?;
        Ok(self.primitive(d))
    }

    pub(crate) fn value(&self, d: f64) -> f64 {
        match self {
            Self::Linear => d,
            Self::Power { exponent } => d.powf(*exponent),
            Self::Exponential { rate } => (rate * d).exp_m1(),
            Self::PiecewiseLinear(p) => p.value(d),
        }
    }

    pub(crate) fn primitive(&self, d: f64) -> f64 {
        match self {
            Self::Linear => 0.5 * d * d,
            Self::Power { exponent } => d.powf(exponent + 1.0) / (exponent + 1.0),
            Self::Exponential { rate } => ((rate * d).exp_m1() - rate * d) / rate,
            Self::PiecewiseLinear(p) => p.primitive(d),
        }
    }
}

impl fmt::Display for CostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear => f.write_str("linear"),
            Self::Power { exponent } => write!(f, "power:{exponent}"),
            Self::Exponential { rate } => write!(f, "exp:{rate}"),
            Self::PiecewiseLinear(p) => {
                f.write_str("pwl:")?;
                for (i, k) in p.kinks.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}@{}", k.at, k.ratio)?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for CostFunction {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let bad = |reason: String| Error::CostSpec {
            spec: spec.to_string(),
            reason,
        };
        let number = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| bad(format!("`{s}` is not a number ({e})")))
        };
        let (family, arg) = match spec.trim().split_once(':') {
            Some((f, a)) => (f.trim(), Some(a)),
            None => (spec.trim(), None),
        };
        let cost = match (family, arg) {
            ("linear", None) => Ok(Self::Linear),
            ("power", Some(a)) => Self::power(number(a)?),
            ("exp", Some(a)) => Self::exponential(number(a)?),
            ("pwl", Some(a)) => {
                let kinks = a
                    .split(',')
                    .map(|part| {
                        let (at, ratio) = part
                            .split_once('@')
                            .ok_or_else(|| bad(format!("expected <kink>@<ratio>, got `{part}`")))?;
                        Ok(Kink {
                            at: number(at)?,
                            ratio: number(ratio)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                PiecewiseLinear::new(kinks).map(Self::PiecewiseLinear)
            }
            ("linear", Some(_)) => return Err(bad("`linear` takes no parameter".into())),
            ("power" | "exp" | "pwl", None) => {
                return Err(bad(format!("`{family}` needs a parameter after `:`")))
            }
            _ => {
                return Err(bad(
                    "expected linear | power:<p> | exp:<k> | pwl:<kink>@<ratio>".into()
                ))
            }
        };
        cost.map_err(|e| bad(e.to_string()))
    }
}

impl TryFrom<String> for CostFunction {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<CostFunction> for String {
    fn from(c: CostFunction) -> String {
        c.to_string()
    }
}
