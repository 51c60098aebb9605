//! Best-response correspondence.
//!
//! Against a rival at `xj`, the payoff has one interior peak on each side of
//! the rival: `xj / 3` on the left and `(2 + xj) / 3` on the right. Their
//! values are `peak_rent(xj / 3)` and `peak_rent((1 - xj) / 3)`, and since
//! `peak_rent` is strictly increasing the closer edge loses: a rival right of
//! the median is answered on the left and vice versa, with both peaks optimal
//! at `xj = 1/2`.

use serde::{Deserialize, Serialize};

use crate::cost::CostFunction;
use crate::error::{check_range, check_unit, Error, Result};
use crate::game::{payoff, quadrature_payoff, PayoffMethod, Player, Profile};
use crate::optimize::golden_section_max;
use crate::quadrature::DEFAULT_TOLERANCE;

/// Half-width of the band around `xj = 1/2` where both peaks are returned.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Payoff gap below which the numeric search reports both humps.
pub const NUMERIC_TIE_TOLERANCE: f64 = 1e-10;

pub const MIN_GRID: usize = 101;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestResponseSet {
    /// One or two platforms, left one first.
    pub candidates: Vec<f64>,
    /// Expected payoff at each candidate.
    pub values: Vec<f64>,
    pub is_tie: bool,
}

impl BestResponseSet {
    fn single(x: f64, value: f64) -> Self {
        Self {
            candidates: vec![x],
            values: vec![value],
            is_tie: false,
        }
    }

    fn tie(left: (f64, f64), right: (f64, f64)) -> Self {
        Self {
            candidates: vec![left.0, right.0],
            values: vec![left.1, right.1],
            is_tie: true,
        }
    }

    pub fn left(&self) -> f64 {
        self.candidates[0]
    }

    pub fn right(&self) -> f64 {
        *self.candidates.last().unwrap()
    }

    pub fn best_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The payoff-maximizing platform on each side of a rival at `xj`.
pub fn interior_candidates(xj: f64) -> Result<(f64, f64)> {
    check_unit("xj", xj)?;
    let left = xj / 3.0;
    let right = (2.0 + xj) / 3.0;
    debug_assert!((0.0..=1.0 / 3.0).contains(&left));
    debug_assert!((2.0 / 3.0..=1.0).contains(&right));
    Ok((left, right))
}

/// `∫_t^{3t} c - 2 ∫_0^t c`: the rent earned at an interior peak lying `t`
/// from the nearer edge of the ideology space, for `t` in `[0, 1/3]`.
pub fn peak_rent(t: f64, cost: &CostFunction) -> Result<f64> {
    check_range("t", t, 0.0, 1.0 / 3.0 + 1e-15, "[0, 1/3]")?;
    Ok(peak_rent_unchecked(t, cost))
}

fn peak_rent_unchecked(t: f64, cost: &CostFunction) -> f64 {
    let t = t.clamp(0.0, 1.0 / 3.0);
    cost.primitive((3.0 * t).min(1.0)) - 3.0 * cost.primitive(t)
}

/// Closed-form best response to a rival at `xj`.
pub fn best_response(xj: f64, cost: &CostFunction) -> Result<BestResponseSet> {
    let (left, right) = interior_candidates(xj)?;
    let left = (left, peak_rent_unchecked(xj / 3.0, cost));
    let right = (right, peak_rent_unchecked((1.0 - xj) / 3.0, cost));
    Ok(if xj > 0.5 + TIE_TOLERANCE {
        BestResponseSet::single(left.0, left.1)
    } else if xj < 0.5 - TIE_TOLERANCE {
        BestResponseSet::single(right.0, right.1)
    } else {
        BestResponseSet::tie(left, right)
    })
}

/// Best response found by brute force: the best point of a uniform grid on
/// each side of the rival, polished by golden-section search between its grid
/// neighbours. Both sides are returned when their payoffs are within
/// [`NUMERIC_TIE_TOLERANCE`].
pub fn numeric_best_response(
    xj: f64,
    cost: &CostFunction,
    grid_n: usize,
    method: PayoffMethod,
) -> Result<BestResponseSet> {
    check_unit("xj", xj)?;
    if grid_n < MIN_GRID {
        return Err(Error::InvalidGrid(format!(
            "grid_n must be at least {MIN_GRID}, got {grid_n}"
        )));
    }

    let failure = std::cell::Cell::new(None);
    let u = |x: f64| match method {
        PayoffMethod::Analytic => payoff(x, xj, cost),
        PayoffMethod::Quadrature => {
            // own platform is player one; the rival is player two
            let profile = Profile::new(x, xj).expect("search stays inside [0, 1]");
            match quadrature_payoff(Player::One, &profile, cost, DEFAULT_TOLERANCE) {
                Ok(q) => q.value,
                Err(e) => {
                    failure.set(Some(e));
                    f64::NAN
                }
            }
        }
    };

    let step = 1.0 / (grid_n - 1) as f64;
    let grid: Vec<f64> = (0..grid_n).map(|k| k as f64 * step).collect();
    let values: Vec<f64> = grid.iter().map(|&x| u(x)).collect();

    let hump = |lo: f64, hi: f64| -> Result<(f64, f64)> {
        let best = (0..grid_n)
            .filter(|&k| grid[k] >= lo && grid[k] <= hi)
            .max_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (a, b) = match best {
            Some(k) => ((grid[k] - step).max(lo), (grid[k] + step).min(hi)),
            // side narrower than one grid cell
            None => (lo, hi),
        };
        let e = golden_section_max(u, a, b, 1e-11, 200)?;
        Ok(match best {
            Some(k) if values[k] > e.value => (grid[k], values[k]),
            _ => (e.x, e.value),
        })
    };
    let left = hump(0.0, xj)?;
    let right = hump(xj, 1.0)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }

    Ok(if (left.1 - right.1).abs() <= NUMERIC_TIE_TOLERANCE {
        BestResponseSet::tie(left, right)
    } else if left.1 > right.1 {
        BestResponseSet::single(left.0, left.1)
    } else {
        BestResponseSet::single(right.0, right.1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn candidate_examples() {
        let (l, r) = interior_candidates(0.75).unwrap();
        assert_eq!(l, 0.25);
        assert_abs_diff_eq!(r, 11.0 / 12.0, epsilon = 1e-15);
        assert_eq!(interior_candidates(0.0).unwrap(), (0.0, 2.0 / 3.0));
        let (l, r) = interior_candidates(0.5).unwrap();
        assert_abs_diff_eq!(l, 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r, 5.0 / 6.0, epsilon = 1e-15);
        assert!(interior_candidates(1.5).is_err());
    }

    #[test]
    fn peak_rent_examples() {
        for c in CostFunction::shipped() {
            assert_eq!(peak_rent(0.0, &c).unwrap(), 0.0);
        }
        assert_abs_diff_eq!(
            peak_rent(0.25, &CostFunction::Linear).unwrap(),
            0.1875,
            epsilon = 1e-15
        );
        let sq = CostFunction::power(2.0).unwrap();
        assert_abs_diff_eq!(peak_rent(0.25, &sq).unwrap(), 0.125, epsilon = 1e-15);
        assert!(peak_rent(0.34, &sq).is_err());
        assert!(peak_rent(-0.01, &sq).is_err());
        assert!(peak_rent(1.0 / 3.0, &sq).is_ok());
    }

    #[test]
    fn correspondence_branches() {
        let lin = CostFunction::Linear;
        let br = best_response(0.75, &lin).unwrap();
        assert_eq!(br.candidates, vec![0.25]);
        assert!(!br.is_tie);

        let cubic = CostFunction::power(3.0).unwrap();
        let br = best_response(0.0, &cubic).unwrap();
        assert_eq!(br.candidates, vec![2.0 / 3.0]);

        let br = best_response(0.5, &lin).unwrap();
        assert!(br.is_tie);
        assert_abs_diff_eq!(br.candidates[0], 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(br.candidates[1], 5.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(br.values[0], br.values[1], epsilon = 1e-15);
        assert_abs_diff_eq!(br.values[0], 1.0 / 12.0, epsilon = 1e-15);
    }

    #[test]
    fn numeric_examples() {
        let lin = CostFunction::Linear;
        let br = numeric_best_response(0.75, &lin, 1001, PayoffMethod::Analytic).unwrap();
        assert_abs_diff_eq!(br.candidates[0], 0.25, epsilon = 1e-6);
        assert!(!br.is_tie);

        let exp1 = CostFunction::exponential(1.0).unwrap();
        let br = numeric_best_response(0.2, &exp1, 1001, PayoffMethod::Analytic).unwrap();
        assert_abs_diff_eq!(br.candidates[0], 2.2 / 3.0, epsilon = 1e-6);

        let br = numeric_best_response(0.5, &lin, 1001, PayoffMethod::Analytic).unwrap();
        assert!(br.is_tie);
        assert_abs_diff_eq!(br.left(), 1.0 / 6.0, epsilon = 1e-6);
        assert_abs_diff_eq!(br.right(), 5.0 / 6.0, epsilon = 1e-6);
    }

    #[test]
    fn numeric_quadrature_mode_agrees() {
        let c = CostFunction::exponential(3.0).unwrap();
        let br = numeric_best_response(0.8, &c, 101, PayoffMethod::Quadrature).unwrap();
        assert_abs_diff_eq!(br.candidates[0], 0.8 / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn numeric_rejects_small_grid() {
        let err = numeric_best_response(0.3, &CostFunction::Linear, 50, PayoffMethod::Analytic);
        assert!(matches!(err, Err(Error::InvalidGrid(_))));
    }
}
