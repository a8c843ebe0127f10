//! Exact competitive equilibria for dividing chores.
//!
//! Given strictly negative values `v` (agents by chores) and negative
//! budgets `b`, [`solve_all`] returns every competitive utility profile with
//! one certified allocation and price vector each. [`round_fair`] turns a
//! competitive allocation into an indivisible one that is weighted-EF¹₁ and
//! weighted-Prop1. All arithmetic is on exact rationals.
//!
//! ```
//! use choremarket::{solve_all, Instance, Mode};
//!
//! let inst = Instance::from_ints(&[vec![-1, -8], vec![-1, -2]], &[-1, -2]).unwrap();
//! let sol = solve_all(&inst, Mode::Auto);
//! assert_eq!(sol.profiles.len(), 2);
//! ```

pub mod certify;
pub mod graph;
pub mod graphs;
pub mod maxflow;
pub mod model;
pub mod oracle;
pub mod predicates;
pub mod recover;
pub mod rounding;
pub mod solver;

pub use certify::{check_competitive, verify_outcome, CompetitiveOutcome, Rejection};
pub use graph::{Component, ConsumptionGraph, Cycle};
pub use graphs::{
    enumerate_rich_family, enumerate_rich_family_dual, mww_graph_for_weights, prune, two_agent_mww, Mode, RichFamily,
    WeightVector,
};
pub use model::{
    consumption_graph, int, ratio, utility_of, validate_instance, Allocation, Instance, ModelError, Preassignment,
    Preprocessed, PriceVector, Rational, UtilityProfile,
};
pub use oracle::{brute_force_cu, kkt_check, OracleReport};
pub use predicates::{is_degenerate, is_pareto_optimal, is_weighted_envy_free, path_product};
pub use recover::{candidate_utility, CandidateProfile};
pub use rounding::{check_ef11, check_prop1, round_fair, IndivisibleAllocation};
pub use solver::{all_allocations, leaf_peel, solve_all, solve_with, Enumeration, SolutionSet, SolveOptions};
