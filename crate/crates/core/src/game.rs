//! Wage envelope, rents and payoffs of the two-politician lobbying game.
//!
//! A benefactor at ideology `b` pays the smallest uniform wage that gets both
//! politicians to back a policy at `b`, so the wage is pinned by whichever
//! politician is farther away. Benefactors are uniform on `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::cost::CostFunction;
use crate::error::{check_unit, Error, Result};
use crate::optimize::golden_section_min;
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn other(self) -> Self {
        match self {
            Self::One => Self::Two,
            Self::Two => Self::One,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Self::One => 1,
            Self::Two => 2,
        }
    }

    pub const BOTH: [Player; 2] = [Player::One, Player::Two];
}

/// Platform pair `(x1, x2)` with both coordinates in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    x1: f64,
    x2: f64,
}

impl Profile {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        check_unit("x1", x1)?;
        check_unit("x2", x2)?;
        Ok(Self { x1, x2 })
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn platform(&self, player: Player) -> f64 {
        match player {
            Player::One => self.x1,
            Player::Two => self.x2,
        }
    }

    /// `(own, rival)` platforms from `player`'s point of view.
    pub fn sides(&self, player: Player) -> (f64, f64) {
        (self.platform(player), self.platform(player.other()))
    }

    pub fn with(&self, player: Player, x: f64) -> Result<Self> {
        match player {
            Player::One => Self::new(x, self.x2),
            Player::Two => Self::new(self.x1, x),
        }
    }

    /// Sorted so that `x1 <= x2`; for reporting only.
    pub fn canonical(&self) -> Self {
        Self {
            x1: self.x1.min(self.x2),
            x2: self.x1.max(self.x2),
        }
    }

    /// Image under `b -> 1 - b`, with player labels swapped so the left
    /// politician stays player one.
    pub fn reflected(&self) -> Self {
        Self {
            x1: 1.0 - self.x2,
            x2: 1.0 - self.x1,
        }
    }

    /// Image under `b -> 1 - b` keeping player labels.
    pub fn mirrored(&self) -> Self {
        Self {
            x1: 1.0 - self.x1,
            x2: 1.0 - self.x2,
        }
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        (self.x1 - other.x1).abs().max((self.x2 - other.x2).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoffMethod {
    Analytic,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffReport {
    pub player: Player,
    pub expected_utility: f64,
    pub method: PayoffMethod,
    pub abs_error_estimate: f64,
}

/// Minimum uniform wage inducing both politicians to support a policy at `b`.
pub fn wage(b: f64, profile: &Profile, cost: &CostFunction) -> Result<f64> {
    check_unit("b", b)?;
    Ok(wage_unchecked(b, profile, cost))
}

fn wage_unchecked(b: f64, profile: &Profile, cost: &CostFunction) -> f64 {
    cost.value((profile.x1 - b).abs())
        .max(cost.value((profile.x2 - b).abs()))
}

/// Rent of `player` from the benefactor at `b`: wage minus own cost.
pub fn interim_utility(player: Player, b: f64, profile: &Profile, cost: &CostFunction) -> Result<f64> {
    check_unit("b", b)?;
    Ok(interim_unchecked(player, b, profile, cost))
}

fn interim_unchecked(player: Player, b: f64, profile: &Profile, cost: &CostFunction) -> f64 {
    let own = cost.value((profile.platform(player) - b).abs());
    wage_unchecked(b, profile, cost) - own
}

/// Closed-form expected rent of a politician at `own` facing a rival at
/// `rival`, integrating only over the surplus region on the politician's own
/// side of the midpoint.
///
/// For `own <= rival` this is `G(rival) - G(own) - 2 G((rival - own) / 2)`
/// with `G` the antiderivative of the cost; the other side is its mirror image.
pub fn payoff(own: f64, rival: f64, cost: &CostFunction) -> f64 {
    let g = |d: f64| cost.primitive(d);
    let u = if own <= rival {
        g(rival) - g(own) - 2.0 * g(0.5 * (rival - own))
    } else {
        g(1.0 - rival) - g(1.0 - own) - 2.0 * g(0.5 * (own - rival))
    };
    // rents are nonnegative; only roundoff can push this below zero
    u.max(0.0)
}

/// Expected rent of `player` integrated over `[0, 1]` by adaptive Simpson
/// quadrature, split where the integrand has kinks.
pub fn quadrature_payoff(
    player: Player,
    profile: &Profile,
    cost: &CostFunction,
    tol: f64,
) -> Result<quadrature::Quadrature> {
    let (x1, x2) = (profile.x1, profile.x2);
    let mut cuts = vec![x1, x2, 0.5 * (x1 + x2)];
    for k in cost.breakpoints() {
        for x in [x1, x2] {
            cuts.extend([x - k, x + k]);
        }
    }
    quadrature::integrate(
        |b| interim_unchecked(player, b, profile, cost),
        0.0,
        1.0,
        &cuts,
        tol,
    )
}

pub fn expected_utility(
    player: Player,
    profile: &Profile,
    cost: &CostFunction,
    method: PayoffMethod,
) -> Result<PayoffReport> {
    let (expected_utility, abs_error_estimate) = match method {
        PayoffMethod::Analytic => {
            let (own, rival) = profile.sides(player);
            let u = payoff(own, rival, cost);
            // four antiderivative terms of magnitude at most G(1)
            (u, 4.0 * f64::EPSILON * cost.primitive(1.0).max(u))
        }
        PayoffMethod::Quadrature => {
            let q = quadrature_payoff(player, profile, cost, quadrature::DEFAULT_TOLERANCE)?;
            (q.value.max(0.0), q.error_estimate)
        }
    };
    Ok(PayoffReport {
        player,
        expected_utility,
        method,
        abs_error_estimate,
    })
}

/// `∂U_i/∂x_i`. Undefined where the platforms coincide, where the payoff has
/// a kink.
pub fn marginal_utility(player: Player, profile: &Profile, cost: &CostFunction) -> Result<f64> {
    let (own, rival) = profile.sides(player);
    let c = |d: f64| cost.value(d);
    if own < rival {
        Ok(c(0.5 * (rival - own)) - c(own))
    } else if own > rival {
        Ok(c(1.0 - own) - c(0.5 * (own - rival)))
    } else {
        Err(Error::Degenerate(own))
    }
}

/// Expected own policy-production cost `∫_0^1 c(|x - b|) db` under a
/// platform-independent competitive wage.
pub fn benchmark_objective(x: f64, cost: &CostFunction) -> Result<f64> {
    check_unit("x", x)?;
    Ok(cost.primitive(x) + cost.primitive(1.0 - x))
}

pub const BENCHMARK_TOLERANCE: f64 = 1e-8;

/// Platform minimizing the competitive-benchmark objective.
pub fn benchmark_optimum(cost: &CostFunction) -> Result<f64> {
    golden_section_min(
        |x| cost.primitive(x) + cost.primitive(1.0 - x),
        0.0,
        1.0,
        BENCHMARK_TOLERANCE,
        200,
    )
    .map(|e| e.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn quarters() -> Profile {
        Profile::new(0.25, 0.75).unwrap()
    }

    #[test]
    fn profile_validation() {
        assert!(Profile::new(-0.01, 0.5).is_err());
        assert!(Profile::new(0.5, 1.01).is_err());
        assert!(Profile::new(f64::NAN, 0.5).is_err());
        let p = Profile::new(0.8, 0.1).unwrap();
        assert_eq!(p.canonical(), Profile::new(0.1, 0.8).unwrap());
        assert_eq!(p.sides(Player::Two), (0.1, 0.8));
    }

    #[test]
    fn wage_examples() {
        let lin = CostFunction::Linear;
        assert_eq!(wage(0.0, &quarters(), &lin).unwrap(), 0.75);
        assert_eq!(wage(0.5, &quarters(), &lin).unwrap(), 0.25);
        let center = Profile::new(0.5, 0.5).unwrap();
        assert_abs_diff_eq!(wage(0.9, &center, &lin).unwrap(), 0.4, epsilon = 1e-15);
        assert!(wage(1.2, &center, &lin).is_err());
    }

    #[test]
    fn interim_examples() {
        let lin = CostFunction::Linear;
        let p = quarters();
        assert_eq!(interim_utility(Player::One, 0.0, &p, &lin).unwrap(), 0.5);
        assert_eq!(interim_utility(Player::One, 0.6, &p, &lin).unwrap(), 0.0);
        assert_eq!(interim_utility(Player::One, 0.5, &p, &lin).unwrap(), 0.0);
        assert!(interim_utility(Player::One, -0.5, &p, &lin).is_err());
    }

    #[test]
    fn expected_utility_anchors() {
        let p = quarters();
        for method in [PayoffMethod::Analytic, PayoffMethod::Quadrature] {
            let lin = expected_utility(Player::One, &p, &CostFunction::Linear, method).unwrap();
            assert_abs_diff_eq!(lin.expected_utility, 0.1875, epsilon = 1e-10);
            let sq = CostFunction::power(2.0).unwrap();
            let sq = expected_utility(Player::One, &p, &sq, method).unwrap();
            assert_abs_diff_eq!(sq.expected_utility, 0.125, epsilon = 1e-10);
        }
    }

    #[test]
    fn converged_platforms_earn_nothing() {
        for c in CostFunction::shipped() {
            for x in [0.0, 0.3, 0.5, 1.0] {
                let p = Profile::new(x, x).unwrap();
                for player in Player::BOTH {
                    let r = expected_utility(player, &p, &c, PayoffMethod::Analytic).unwrap();
                    assert_eq!(r.expected_utility, 0.0);
                }
            }
        }
    }

    #[test]
    fn marginal_examples() {
        let lin = CostFunction::Linear;
        assert_abs_diff_eq!(
            marginal_utility(Player::One, &quarters(), &lin).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            marginal_utility(Player::Two, &quarters(), &lin).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let p = Profile::new(0.1, 0.75).unwrap();
        assert_abs_diff_eq!(
            marginal_utility(Player::One, &p, &lin).unwrap(),
            0.225,
            epsilon = 1e-15
        );
        let tie = Profile::new(0.4, 0.4).unwrap();
        assert_eq!(
            marginal_utility(Player::One, &tie, &lin),
            Err(Error::Degenerate(0.4))
        );
    }

    #[test]
    fn benchmark_examples() {
        let lin = CostFunction::Linear;
        assert_eq!(benchmark_objective(0.5, &lin).unwrap(), 0.25);
        assert_eq!(benchmark_objective(0.0, &lin).unwrap(), 0.5);
        assert!(benchmark_objective(2.0, &lin).is_err());
        for c in CostFunction::shipped() {
            assert_abs_diff_eq!(benchmark_optimum(&c).unwrap(), 0.5, epsilon = 1e-6);
        }
    }
}
