//! Solver library for the robust Heterogeneous Vehicle Routing Problem (HVRP)
//! under demand uncertainty.
//!
//! The library evaluates worst-case route loads in closed form over five
//! uncertainty-set families, runs robust local-search metaheuristics (iterated
//! local search and adaptive memory programming) and separates robust rounded
//! capacity inequalities against fractional solutions.
//!
//! Module layout:
//! - [`instance`]: problem data, routes, solutions, cost evaluation, the
//!   variant transforms and feasibility validation;
//! - [`uncertainty`]: the uncertainty-set families, closed-form worst-case
//!   loads, incremental load trackers and benchmark-parameterized builders;
//! - [`local_search`]: penalized cost, neighborhood moves with incremental
//!   delta evaluation and tabu search;
//! - [`metaheuristics`]: the ILS and AMP drivers with the shared construction
//!   heuristic, perturbation and reference-set machinery;
//! - [`cuts`]: robust rounded-capacity inequality evaluation and separation.

pub mod instance;
pub mod rng;
pub mod uncertainty;

#[cfg(any(test, feature = "test-oracles"))]
pub mod oracles;

pub use instance::{
    route_cost, solution_cost, validate, DistanceRounding, FeasibilityReport, Instance,
    InstanceData, InstanceError, Route, Solution, Variant, VehicleType,
};
pub use uncertainty::{
    build_set, BudgetSet, CardinalitySet, DiscreteSet, EllipsoidSet, FactorModelSet, Family,
    LoadTracker, UncertaintyError, UncertaintySet,
};
