//! Social optima, price of anarchy, the cycle-of-paths lower-bound family
//! and empirical checkers for structural properties of equilibria.

mod lemmas;
mod lower_bound;
mod optimum;

pub use lemmas::{
    check_cost_bound_unilateral, check_distance_stretch, check_doubling_lemma,
    greedy_center_points, unilateral_stretch_profile, LemmaCheckReport, LemmaVerdict, Quantity,
    Witness, COST_BOUND, DOUBLING, DOUBLING_COOPERATIVE, STRETCH, STRETCH_UNILATERAL,
};
pub use lower_bound::{generate_lower_bound_instance, suggested_alpha, LowerBoundInstance};
pub use optimum::{
    price_of_anarchy, social_optimum_exact, social_optimum_lower_bound,
    worst_collaborative_equilibrium, EdgeSubset, EXACT_EDGE_CAP,
};
