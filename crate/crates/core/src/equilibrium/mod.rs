//! Edge valuations, equilibrium verification, best responses and the
//! edge-bidding dynamics.

mod collaborative;
mod dynamics;
mod report;
mod unilateral;
mod valuation;

pub use collaborative::{is_equilibrium_graph, verify_collaborative};
pub use dynamics::{run_dynamics, Action, ScanPolicy, Step, Trajectory};
pub use report::{Concept, EquilibriumReport, Verdict, Violation};
pub use unilateral::{
    best_response, best_response_dynamics, verify_unilateral_nash, BestResponseRun, NashMode,
    EXACT_DEGREE_CAP,
};
pub use valuation::{edge_valuations, EdgeValuation, ValuationKind};
