//! Pure-strategy equilibria: closed-form fixed point, best-response dynamics
//! and an exhaustive grid oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::best_response::{best_response, numeric_best_response, BestResponseSet};
use crate::cost::CostFunction;
use crate::error::{Error, Result};
use crate::game::{payoff, PayoffMethod, Player, Profile};

/// Largest deviation gain accepted for a profile reported as an equilibrium.
pub const VERIFY_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_DEVIATION_GRID: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumMethod {
    ClosedForm,
    Dynamics,
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub profile: Profile,
    pub max_deviation_gain: f64,
    pub method: EquilibriumMethod,
    pub iterations: usize,
}

impl EquilibriumResult {
    pub fn is_verified(&self) -> bool {
        self.max_deviation_gain <= VERIFY_TOLERANCE
    }
}

/// Which branch of the correspondence a player sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    /// `x = rival / 3`
    Left,
    /// `x = (2 + rival) / 3`
    Right,
}

impl Branch {
    /// `(slope, intercept)` of the branch as a function of the rival.
    fn line(self) -> (f64, f64) {
        match self {
            Branch::Left => (1.0 / 3.0, 0.0),
            Branch::Right => (1.0 / 3.0, 2.0 / 3.0),
        }
    }
}

fn contains(set: &BestResponseSet, x: f64, tol: f64) -> bool {
    set.candidates.iter().any(|&c| (c - x).abs() <= tol)
}

/// Every mutual best response, found by solving the linear system for each
/// pair of correspondence branches and keeping the consistent solutions.
pub fn closed_form_equilibria(cost: &CostFunction) -> Result<Vec<Profile>> {
    let mut found: Vec<Profile> = Vec::new();
    for b1 in [Branch::Left, Branch::Right] {
        for b2 in [Branch::Left, Branch::Right] {
            // x1 - s1 x2 = k1, -s2 x1 + x2 = k2
            let (s1, k1) = b1.line();
            let (s2, k2) = b2.line();
            let det = 1.0 - s1 * s2;
            let x1 = (k1 + s1 * k2) / det;
            let x2 = (k2 + s2 * k1) / det;
            let Ok(p) = Profile::new(x1, x2) else { continue };
            let ok1 = contains(&best_response(x2, cost)?, x1, VERIFY_TOLERANCE);
            let ok2 = contains(&best_response(x1, cost)?, x2, VERIFY_TOLERANCE);
            if ok1 && ok2 && !found.iter().any(|q| q.sup_distance(&p) <= VERIFY_TOLERANCE) {
                found.push(p);
            }
        }
    }
    found.sort_by(|a, b| a.x1().total_cmp(&b.x1()));
    Ok(found)
}

/// Equilibrium with the left politician labelled player one, verified against
/// deviations on a [`DEFAULT_DEVIATION_GRID`]-point grid.
pub fn solve_closed_form(cost: &CostFunction) -> Result<EquilibriumResult> {
    let profile = closed_form_equilibria(cost)?
        .into_iter()
        .find(|p| p.x1() <= p.x2())
        .ok_or_else(|| Error::InvalidCost(format!("no pure equilibrium found for {cost}")))?;
    Ok(EquilibriumResult {
        profile,
        max_deviation_gain: verify_equilibrium(&profile, cost, DEFAULT_DEVIATION_GRID)?,
        method: EquilibriumMethod::ClosedForm,
        iterations: 0,
    })
}

/// Largest payoff either player gains by deviating unilaterally, searching
/// deviations on a `dev_grid_n`-point grid refined by golden-section search.
pub fn verify_equilibrium(profile: &Profile, cost: &CostFunction, dev_grid_n: usize) -> Result<f64> {
    let mut gain: f64 = 0.0;
    for player in Player::BOTH {
        let (own, rival) = profile.sides(player);
        let best = numeric_best_response(rival, cost, dev_grid_n, PayoffMethod::Analytic)?;
        gain = gain.max(best.best_value() - payoff(own, rival, cost));
    }
    Ok(gain)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateOrder {
    /// Player one moves, then player two answers the new platform.
    #[default]
    Sequential,
    /// Both answer the previous profile.
    Simultaneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub order: UpdateOrder,
}

impl Default for DynamicsOptions {
    fn default() -> Self {
        Self {
            max_iter: 50,
            tol: 1e-8,
            order: UpdateOrder::Sequential,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsTrace {
    /// Starting profile followed by the profile after each round.
    pub iterates: Vec<Profile>,
    /// Sup-norm movement in each round.
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub tie_events: usize,
}

impl DynamicsTrace {
    pub fn last(&self) -> Profile {
        *self.iterates.last().unwrap()
    }

    pub fn rounds(&self) -> usize {
        self.residuals.len()
    }
}

/// Ties go to the left peak first and alternate afterwards.
struct TieBreaker {
    next_left: bool,
    events: usize,
}

impl TieBreaker {
    fn pick(&mut self, set: &BestResponseSet) -> f64 {
        if !set.is_tie {
            return set.candidates[0];
        }
        self.events += 1;
        let x = if self.next_left { set.left() } else { set.right() };
        self.next_left = !self.next_left;
        x
    }
}

/// Iterates best responses from `init` until a round moves less than
/// `opts.tol`. Running out of rounds is reported through `converged`.
pub fn best_response_dynamics(
    init: Profile,
    cost: &CostFunction,
    opts: &DynamicsOptions,
) -> Result<DynamicsTrace> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::Domain {
            name: "tol",
            value: opts.tol,
            domain: "(0, inf)",
        });
    }
    let mut ties = TieBreaker {
        next_left: true,
        events: 0,
    };
    let mut iterates = vec![init];
    let mut residuals = Vec::new();
    let mut current = init;
    let mut converged = false;
    for _ in 0..opts.max_iter {
        let x1 = ties.pick(&best_response(current.x2(), cost)?);
        let x2 = match opts.order {
            UpdateOrder::Sequential => ties.pick(&best_response(x1, cost)?),
            UpdateOrder::Simultaneous => ties.pick(&best_response(current.x1(), cost)?),
        };
        let next = Profile::new(x1, x2)?;
        let residual = next.sup_distance(&current);
        iterates.push(next);
        residuals.push(residual);
        current = next;
        if residual < opts.tol {
            converged = true;
            break;
        }
    }
    Ok(DynamicsTrace {
        iterates,
        residuals,
        converged,
        tie_events: ties.events,
    })
}

/// Runs dynamics from `init` and certifies the end point.
pub fn solve_dynamics(
    init: Profile,
    cost: &CostFunction,
    opts: &DynamicsOptions,
) -> Result<(EquilibriumResult, DynamicsTrace)> {
    let trace = best_response_dynamics(init, cost, opts)?;
    let profile = trace.last();
    let result = EquilibriumResult {
        profile,
        max_deviation_gain: verify_equilibrium(&profile, cost, DEFAULT_DEVIATION_GRID)?,
        method: EquilibriumMethod::Dynamics,
        iterations: trace.rounds(),
    };
    Ok((result, trace))
}

/// Dynamics from many starts, run in parallel.
pub fn batch_dynamics(
    starts: &[Profile],
    cost: &CostFunction,
    opts: &DynamicsOptions,
) -> Result<Vec<DynamicsTrace>> {
    starts
        .par_iter()
        .map(|&init| best_response_dynamics(init, cost, opts))
        .collect()
}

/// Platforms `k / (grid_n - 1)`.
pub fn uniform_grid(grid_n: usize) -> Vec<f64> {
    let last = (grid_n - 1) as f64;
    (0..grid_n).map(|k| k as f64 / last).collect()
}

/// Every grid profile at which neither player can gain more than `eps` by a
/// unilateral move to another grid platform. The grid must contain 1/4 and
/// 3/4, i.e. `grid_n ≡ 1 (mod 4)`.
pub fn brute_force_nash(cost: &CostFunction, grid_n: usize, eps: f64) -> Result<Vec<Profile>> {
    if grid_n < 5 || grid_n % 4 != 1 {
        return Err(Error::InvalidGrid(format!(
            "grid_n must be at least 5 and congruent to 1 mod 4 so that 1/4 and 3/4 are grid points, got {grid_n}"
        )));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Domain {
            name: "eps",
            value: eps,
            domain: "(0, inf)",
        });
    }
    let grid = uniform_grid(grid_n);
    // table[own][rival]; the game is symmetric so one table serves both players
    let table: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&own| grid.iter().map(|&rival| payoff(own, rival, cost)).collect())
        .collect();
    let best_against: Vec<f64> = (0..grid_n)
        .map(|rival| {
            (0..grid_n)
                .map(|own| table[own][rival])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();

    let mut found: Vec<Profile> = (0..grid_n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let (table, best_against, grid) = (&table, &best_against, &grid);
            (0..grid_n).filter_map(move |b| {
                let stable_a = table[a][b] >= best_against[b] - eps;
                let stable_b = table[b][a] >= best_against[a] - eps;
                (stable_a && stable_b).then(|| Profile::new(grid[a], grid[b]).unwrap())
            })
        })
        .collect();
    found.sort_by(|p, q| p.x1().total_cmp(&q.x1()).then(p.x2().total_cmp(&q.x2())));
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn is_quarters(p: &Profile, tol: f64) -> bool {
        let c = p.canonical();
        (c.x1() - 0.25).abs() <= tol && (c.x2() - 0.75).abs() <= tol
    }

    #[test]
    fn closed_form_examples() {
        for spec in ["linear", "power:0.5", "exp:3"] {
            let c: CostFunction = spec.parse().unwrap();
            let r = solve_closed_form(&c).unwrap();
            assert_abs_diff_eq!(r.profile.x1(), 0.25, epsilon = 1e-12);
            assert_abs_diff_eq!(r.profile.x2(), 0.75, epsilon = 1e-12);
            assert!(r.max_deviation_gain <= VERIFY_TOLERANCE);
            assert_eq!(r.method, EquilibriumMethod::ClosedForm);
        }
    }

    #[test]
    fn closed_form_finds_both_labelings_only() {
        let eqs = closed_form_equilibria(&CostFunction::Linear).unwrap();
        assert_eq!(eqs.len(), 2);
        assert!(is_quarters(&eqs[0], 1e-12) && eqs[0].x1() < 0.5);
        assert!(is_quarters(&eqs[1], 1e-12) && eqs[1].x1() > 0.5);
    }

    #[test]
    fn dynamics_from_quarters_stops_at_once() {
        for c in CostFunction::shipped() {
            let init = Profile::new(0.25, 0.75).unwrap();
            let t = best_response_dynamics(init, &c, &DynamicsOptions::default()).unwrap();
            assert!(t.converged);
            assert_eq!(t.rounds(), 1);
            assert_eq!(t.residuals[0], 0.0);
        }
    }

    #[test]
    fn dynamics_hand_iteration() {
        let init = Profile::new(0.1, 0.6).unwrap();
        let t = best_response_dynamics(init, &CostFunction::Linear, &DynamicsOptions::default()).unwrap();
        assert_abs_diff_eq!(t.iterates[1].x1(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(t.iterates[1].x2(), 2.2 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.iterates[2].x1(), 2.2 / 9.0, epsilon = 1e-15);
        assert!(t.converged);
        assert!(is_quarters(&t.last(), 1e-8));
    }

    #[test]
    fn dynamics_tie_at_center() {
        let init = Profile::new(0.5, 0.5).unwrap();
        let t = best_response_dynamics(init, &CostFunction::Linear, &DynamicsOptions::default()).unwrap();
        assert_eq!(t.tie_events, 1);
        assert_abs_diff_eq!(t.iterates[1].x1(), 1.0 / 6.0, epsilon = 1e-15);
        assert!(t.converged);
        assert!(is_quarters(&t.last(), 1e-8));
        assert!(t.last().x1() < 0.5);
    }

    #[test]
    fn simultaneous_updates_also_settle() {
        let init = Profile::new(0.1, 0.6).unwrap();
        let opts = DynamicsOptions {
            order: UpdateOrder::Simultaneous,
            ..Default::default()
        };
        let t = best_response_dynamics(init, &CostFunction::Linear, &opts).unwrap();
        assert!(t.converged);
        assert!(is_quarters(&t.last(), 1e-8));
    }

    #[test]
    fn dynamics_reports_non_convergence() {
        let init = Profile::new(0.1, 0.6).unwrap();
        let opts = DynamicsOptions {
            max_iter: 2,
            ..Default::default()
        };
        let t = best_response_dynamics(init, &CostFunction::Linear, &opts).unwrap();
        assert!(!t.converged);
        assert_eq!(t.rounds(), 2);
    }

    #[test]
    fn brute_force_examples() {
        let lin = CostFunction::Linear;
        let expected = vec![
            Profile::new(0.25, 0.75).unwrap(),
            Profile::new(0.75, 0.25).unwrap(),
        ];
        assert_eq!(brute_force_nash(&lin, 101, 1e-9).unwrap(), expected);
        let sq = CostFunction::power(2.0).unwrap();
        assert_eq!(brute_force_nash(&sq, 201, 1e-9).unwrap(), expected);
        let loose = brute_force_nash(&lin, 101, 1e-2).unwrap();
        assert!(loose.len() > 2);
        assert!(loose.contains(&expected[0]));
    }

    #[test]
    fn brute_force_grid_must_hit_quarters() {
        assert!(matches!(
            brute_force_nash(&CostFunction::Linear, 100, 1e-9),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn verification_examples() {
        let lin = CostFunction::Linear;
        let q = Profile::new(0.25, 0.75).unwrap();
        assert!(verify_equilibrium(&q, &lin, 1001).unwrap() <= 1e-9);
        let r = Profile::new(0.75, 0.25).unwrap();
        assert!(verify_equilibrium(&r, &lin, 1001).unwrap() <= 1e-9);
        let center = Profile::new(0.5, 0.5).unwrap();
        assert_abs_diff_eq!(
            verify_equilibrium(&center, &lin, 1001).unwrap(),
            1.0 / 12.0,
            epsilon = 1e-12
        );
    }
}
