//! Unilateral and cooperative network creation games played on arbitrary
//! host graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] holds host graphs, breadth-first distances and neighborhood
//!   queries.
//! * [`game`] realizes joint strategies into built networks and evaluates
//!   player and social costs.
//! * [`equilibrium`] computes edge valuations, verifies Nash and
//!   collaborative equilibria, computes best responses and runs the
//!   edge-bidding dynamics.
//! * [`analysis`] covers social optima, price of anarchy, the cycle-of-paths
//!   lower-bound family and the structural checkers.
//!
//! All money-like quantities are exact rationals; usage costs keep the
//! number of unreachable ordered pairs apart from the finite distance sum.

pub mod analysis;
pub mod cost;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod graph;
pub mod rational;

pub use cost::Cost;
pub use error::{Error, Result};
pub use graph::{DistanceMatrix, Edge, Graph, HostGraph};
pub use rational::Rational;
