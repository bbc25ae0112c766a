//! Exact solver for cooperative export games under minimum quantity
//! commitments.
//!
//! Small and medium-sized producers whose individual capacity falls short
//! of a market's minimum quantity commitment (MQC) can pool capacity and
//! export as a consortium. This crate models such situations, solves the
//! optimal exporter-selection problem for every coalition exactly, builds
//! the associated transferable-utility game, and computes gain-sharing
//! allocations together with their core-stability certificates:
//!
//! * the NEA rule (surplus split among essential players, always in the
//!   core),
//! * the δ-proportional rule (not guaranteed stable),
//! * egalitarian and proportional essential-rate rules with exact maximal
//!   stable tax parameters, and
//! * the nucleolus, via successive exact-rational linear programs.
//!
//! All arithmetic is exact: quantities, prices and payoffs are
//! arbitrary-precision rationals, so core membership, argmax ties and
//! lexicographic comparisons are decided without rounding error.

pub mod allocation;
pub mod cli;
pub mod coalition;
pub mod game;
pub mod gen;
pub mod instance;
pub mod lp;
pub mod model;
pub mod nucleolus;
pub mod numeric;
pub mod report;

pub use allocation::{
    delta_proportional, egalitarian_rate, excess, in_core, min_excess_per_essential,
    min_excess_ratio, nea, proportional_rate, rho_egalitarian, rho_proportional, Allocation,
    AllocationError, AllocationRule, CoalitionSearchResult, CoreCheck,
};
pub use coalition::{
    brute_force_coalition, complementary_members, essential_members, g_contribution,
    optimal_complementary, potential_members, solve_coalition, Coalition, CoalitionError,
    CoalitionSolution,
};
pub use game::{coalition_value, CEGame, GameError};
pub use gen::{generate, Profile};
pub use instance::{parse_instance, Instance, InstanceError};
pub use lp::{lp_solve, LinearProgram, LpError, LpOutcome, Sense};
pub use model::{
    individual_strategy_mqc, individual_strategy_no_mqc, CESituation, ModelError, PlayerClass,
    PlayerProfile, Strategy,
};
pub use nucleolus::{nucleolus, sorted_excesses, NucleolusError};
pub use numeric::Rational;
