//! Two politicians choose platforms on `[0, 1]` and sell legislative support
//! to a continuum of benefactors, each of whom pays the smallest uniform wage
//! that wins over both. This crate evaluates that game exactly and
//! numerically: wage envelope, rents, best responses and equilibria.

pub mod best_response;
pub mod cost;
pub mod equilibrium;
pub mod error;
pub mod export;
pub mod game;
pub mod optimize;
pub mod quadrature;

pub use best_response::{
    best_response, interior_candidates, numeric_best_response, peak_rent, BestResponseSet,
};
pub use cost::CostFunction;
pub use equilibrium::{
    best_response_dynamics, brute_force_nash, solve_closed_form, verify_equilibrium, DynamicsOptions,
    DynamicsTrace, EquilibriumMethod, EquilibriumResult, UpdateOrder,
};
pub use error::{Error, Result};
pub use game::{
    benchmark_objective, benchmark_optimum, expected_utility, interim_utility, marginal_utility, payoff,
    wage, PayoffMethod, PayoffReport, Player, Profile,
};
