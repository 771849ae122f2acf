//! Edge-bidding dynamics for the cooperative game.
//!
//! Each step examines one host edge. An absent edge whose total benefit
//! exceeds the price is bought, with the price split in proportion to the
//! benefits. A present edge whose total loss is below the price is dropped.
//! A present edge with a payer contributing more than its own loss has its
//! price re-split in proportion to the losses. Adding and dropping strictly
//! lower the social cost `α |E_s| + Σ d`, so no network repeats and the run
//! terminates.

use std::fmt::Write as _;

use num::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::valuation::{addition_benefits, removal_loss, removal_losses};
use crate::cost::Cost;
use crate::game::{network_cost, normalize_payments, BuiltGraph, PaymentMatrix};
use crate::graph::{Edge, HostGraph};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanPolicy {
    /// Host edges in canonical order, cyclically.
    RoundRobin,
    /// A fresh seeded permutation of the host edges for every pass.
    Random { seed: u64 },
    /// The move with the largest cost decrease over all host edges.
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Add,
    Remove,
    Reallocate,
    None,
}

impl Action {
    pub fn mutates_graph(self) -> bool {
        matches!(self, Action::Add | Action::Remove)
    }

    fn label(self) -> &'static str {
        match self {
            Action::Add => "add",
            Action::Remove => "remove",
            Action::Reallocate => "reallocate",
            Action::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub edge: Edge,
    pub action: Action,
    /// New contributions on `edge` after an add or reallocate.
    #[serde(serialize_with = "serialize_payments")]
    pub payments: Vec<(usize, Rational)>,
    /// Social cost after the step.
    pub potential: Cost,
}

fn serialize_payments<S: serde::Serializer>(
    payments: &[(usize, Rational)],
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(payments.len()))?;
    for (p, a) in payments {
        map.serialize_entry(p, &rational::format(a))?;
    }
    map.end()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub initial_potential: Cost,
    pub steps: Vec<Step>,
    pub converged: bool,
    /// Contributions at the end of the run.
    pub payments: PaymentMatrix,
    pub built: BuiltGraph,
}

impl Trajectory {
    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    pub fn mutations(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.action.mutates_graph())
            .count()
    }

    pub fn final_potential(&self) -> &Cost {
        self.steps
            .last()
            .map_or(&self.initial_potential, |s| &s.potential)
    }

    /// One line per step: `step edge(u,v) action num/den`. Potentials of
    /// disconnected networks carry a trailing `unreachable=k`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, step) in self.steps.iter().enumerate() {
            let p = &step.potential;
            let _ = write!(
                out,
                "{} edge({},{}) {} {}/{}",
                i + 1,
                step.edge.lo(),
                step.edge.hi(),
                step.action.label(),
                p.amount.numer(),
                p.amount.denom()
            );
            if p.unreachable != 0 {
                let _ = write!(out, " unreachable={}", p.unreachable);
            }
            out.push('\n');
        }
        out
    }
}

struct Move {
    action: Action,
    payments: Vec<(usize, Rational)>,
    decrease: Cost,
}

/// Splits `price` in proportion to `values`. When some values carry lost or
/// gained connectivity, only those players pay, in proportion to their
/// unreachable counts.
fn allocate(values: &[Cost], price: &Rational) -> Vec<(usize, Rational)> {
    let connectivity = values.iter().any(|v| v.unreachable > 0);
    let weights: Vec<(usize, Rational)> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| {
            let w = if connectivity {
                rational::int(v.unreachable)
            } else if v.unreachable == 0 {
                v.amount.clone()
            } else {
                return None;
            };
            (w > Rational::zero()).then_some((i, w))
        })
        .collect();
    let total: Rational = weights.iter().map(|(_, w)| w).sum();
    if total.is_zero() {
        return Vec::new();
    }
    weights
        .into_iter()
        .map(|(i, w)| (i, w * price / &total))
        .collect()
}

struct State<'a> {
    host: &'a HostGraph,
    payments: PaymentMatrix,
    built: BuiltGraph,
    potential: Cost,
}

impl<'a> State<'a> {
    fn evaluate(&self, idx: usize) -> Option<Move> {
        let edge = self.host.edges()[idx];
        let alpha = self.host.alpha();
        let (graph, dist) = (self.built.graph(), self.built.distances());
        if !self.built.contains(idx) {
            let benefits = addition_benefits(dist, edge);
            let total: Cost = benefits.iter().sum();
            return total.exceeds(alpha).then(|| Move {
                action: Action::Add,
                payments: allocate(&benefits, alpha),
                decrease: total - Cost::finite(alpha.clone()),
            });
        }
        // Contributions sum to α, so if no payer overpays the losses cover α.
        let overpaid = self.payments.entries(idx).any(|(player, paid)| {
            removal_loss(graph, dist, edge, player) < Cost::finite(paid.clone())
        });
        if !overpaid {
            return None;
        }
        let losses = removal_losses(graph, dist, edge);
        let total: Cost = losses.iter().sum();
        if total.below(alpha) {
            Some(Move {
                action: Action::Remove,
                payments: Vec::new(),
                decrease: Cost::finite(alpha.clone()) - total,
            })
        } else {
            Some(Move {
                action: Action::Reallocate,
                payments: allocate(&losses, alpha),
                decrease: Cost::zero(),
            })
        }
    }

    fn apply(&mut self, idx: usize, mv: Move) -> Step {
        let edge = self.host.edges()[idx];
        match mv.action {
            Action::Add | Action::Reallocate => {
                self.payments.replace_edge(idx, mv.payments.iter().cloned())
            }
            Action::Remove => self.payments.clear_edge(idx),
            Action::None => {}
        }
        if mv.action.mutates_graph() {
            let mut present = self.built.present().to_vec();
            present[idx] = mv.action == Action::Add;
            self.built = BuiltGraph::from_mask(self.host, present);
            let next = network_cost(self.host, &self.built);
            debug_assert!(next < self.potential, "potential must strictly decrease");
            self.potential = next;
        }
        Step {
            edge,
            action: mv.action,
            payments: mv.payments,
            potential: self.potential.clone(),
        }
    }

    fn idle(&self, idx: usize) -> Step {
        Step {
            edge: self.host.edges()[idx],
            action: Action::None,
            payments: Vec::new(),
            potential: self.potential.clone(),
        }
    }
}

/// Runs the bidding dynamics from `init` until a full pass over the host
/// edges changes nothing, or until `max_steps` edge examinations.
///
/// The initial contributions are normalized and bids on unbuilt edges are
/// discarded; neither changes the network or its cost.
pub fn run_dynamics(
    host: &HostGraph,
    init: &PaymentMatrix,
    policy: ScanPolicy,
    max_steps: usize,
) -> Trajectory {
    let mut payments = normalize_payments(host, init);
    let realized = payments.realized(host);
    for (idx, &present) in realized.iter().enumerate() {
        if !present {
            payments.clear_edge(idx);
        }
    }
    let built = BuiltGraph::from_mask(host, realized);
    let potential = network_cost(host, &built);
    let mut state = State {
        host,
        payments,
        built,
        potential: potential.clone(),
    };
    let m = host.edge_count();
    let mut steps = Vec::new();
    let mut converged = m == 0;

    match policy {
        ScanPolicy::RoundRobin => {
            let mut quiet = 0;
            let mut idx = 0;
            while !converged && steps.len() < max_steps {
                match state.evaluate(idx) {
                    Some(mv) => {
                        steps.push(state.apply(idx, mv));
                        quiet = 0;
                    }
                    None => {
                        steps.push(state.idle(idx));
                        quiet += 1;
                    }
                }
                converged = quiet == m;
                idx = (idx + 1) % m;
            }
        }
        ScanPolicy::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut order: Vec<usize> = (0..m).collect();
            'passes: while !converged {
                order.shuffle(&mut rng);
                let mut changed = false;
                for &idx in &order {
                    if steps.len() >= max_steps {
                        break 'passes;
                    }
                    match state.evaluate(idx) {
                        Some(mv) => {
                            steps.push(state.apply(idx, mv));
                            changed = true;
                        }
                        None => steps.push(state.idle(idx)),
                    }
                }
                converged = !changed;
            }
        }
        ScanPolicy::Greedy => {
            while steps.len() < max_steps {
                let mut best: Option<(usize, Move)> = None;
                for idx in 0..m {
                    if let Some(mv) = state.evaluate(idx) {
                        let wins = match &best {
                            None => true,
                            Some((_, b)) => mv.decrease > b.decrease,
                        };
                        if wins {
                            best = Some((idx, mv));
                        }
                    }
                }
                match best {
                    Some((idx, mv)) => steps.push(state.apply(idx, mv)),
                    None => {
                        converged = true;
                        break;
                    }
                }
            }
            if steps.len() >= max_steps && !converged {
                converged = (0..m).all(|idx| state.evaluate(idx).is_none());
            }
        }
    }

    Trajectory {
        initial_potential: potential,
        steps,
        converged,
        payments: state.payments,
        built: state.built,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::verify_collaborative;
    use crate::rational::{int, ratio};

    #[test]
    fn cheap_links_build_the_clique() {
        let host = HostGraph::complete(3, int(1));
        let t = run_dynamics(
            &host,
            &PaymentMatrix::empty(&host),
            ScanPolicy::RoundRobin,
            100,
        );
        assert!(t.converged);
        assert_eq!(t.built.edge_count(), 3);
        assert!(verify_collaborative(&host, &t.payments).passed());
    }

    #[test]
    fn expensive_links_drop_one_clique_edge() {
        let host = HostGraph::complete(3, int(3));
        let t = run_dynamics(
            &host,
            &PaymentMatrix::split_evenly(&host),
            ScanPolicy::RoundRobin,
            100,
        );
        assert!(t.converged);
        assert_eq!(t.mutations(), 1);
        assert_eq!(t.steps[0].action, Action::Remove);
        assert_eq!(t.built.edge_count(), 2);
        assert!(verify_collaborative(&host, &t.payments).passed());
    }

    #[test]
    fn equilibrium_is_a_fixpoint() {
        let host = HostGraph::complete(4, ratio(3, 2));
        let init = PaymentMatrix::split_evenly(&host);
        for policy in [
            ScanPolicy::RoundRobin,
            ScanPolicy::Random { seed: 9 },
            ScanPolicy::Greedy,
        ] {
            let t = run_dynamics(&host, &init, policy, 100);
            assert!(t.converged);
            assert_eq!(t.mutations(), 0);
            assert_eq!(t.payments, init);
        }
    }

    #[test]
    fn exhausted_budget_is_flagged() {
        let host = HostGraph::complete(5, int(1));
        let t = run_dynamics(
            &host,
            &PaymentMatrix::empty(&host),
            ScanPolicy::RoundRobin,
            3,
        );
        assert!(!t.converged);
        assert_eq!(t.step_count(), 3);
    }

    #[test]
    fn overpayment_is_reallocated() {
        // On C_4 at α = 3 each edge is worth 2 to each endpoint, so no
        // single owner can carry it but the two endpoints together can.
        let host = HostGraph::new(4, &crate::graph::generators::cycle(4), int(3)).unwrap();
        let init = PaymentMatrix::single_owner(&host, host.edges(), |e| e.lo()).unwrap();
        let t = run_dynamics(&host, &init, ScanPolicy::RoundRobin, 100);
        assert!(t.converged);
        assert_eq!(t.mutations(), 0);
        assert_eq!(t.steps[0].action, Action::Reallocate);
        assert_eq!(
            t.steps[0].payments,
            vec![(0, ratio(3, 2)), (1, ratio(3, 2))]
        );
        assert!(verify_collaborative(&host, &t.payments).passed());
    }

    #[test]
    fn dump_format() {
        let host = HostGraph::complete(3, int(3));
        let t = run_dynamics(
            &host,
            &PaymentMatrix::split_evenly(&host),
            ScanPolicy::RoundRobin,
            100,
        );
        let first = t.dump().lines().next().unwrap().to_string();
        assert_eq!(first, "1 edge(0,1) remove 14/1");
    }

    #[test]
    fn allocation_respects_benefits() {
        let values = vec![Cost::from_parts(0, 3), Cost::from_parts(0, 1), Cost::zero()];
        assert_eq!(
            allocate(&values, &int(2)),
            vec![(0, ratio(3, 2)), (1, ratio(1, 2))]
        );
        let values = vec![Cost::from_parts(2, -5), Cost::from_parts(0, 9)];
        assert_eq!(allocate(&values, &int(2)), vec![(0, int(2))]);
    }
}
