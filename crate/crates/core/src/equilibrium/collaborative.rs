use num::Zero;
use rayon::prelude::*;

use super::report::{Concept, EquilibriumReport, Violation};
use super::valuation::{addition_benefits, removal_loss, removal_losses};
use crate::cost::Cost;
use crate::game::{BuiltGraph, PaymentMatrix};
use crate::graph::HostGraph;

/// Checks every single-edge coalition deviation.
///
/// A coalition blocks only if none of its members is worse off and at least
/// one is strictly better off. Hence an absent edge is stable when its total
/// benefit is at most the link price, and a present edge is stable when its
/// contributions sum to the price and no payer contributes more than its
/// own loss from removal.
pub fn verify_collaborative(host: &HostGraph, payments: &PaymentMatrix) -> EquilibriumReport {
    let built = BuiltGraph::from_mask(host, payments.realized(host));
    let alpha = host.alpha();
    let violations: Vec<Violation> = (0..host.edge_count())
        .into_par_iter()
        .flat_map_iter(|idx| {
            let edge = host.edges()[idx];
            let mut found = Vec::new();
            let sum = payments.edge_sum(idx);
            if !sum.is_zero() && sum != *alpha {
                found.push(Violation::Unnormalized { edge, sum });
            }
            if built.contains(idx) {
                for (player, _) in payments.entries(idx) {
                    let paid = Cost::finite(payments.normalized(host, idx, player));
                    let loss = removal_loss(built.graph(), built.distances(), edge, player);
                    if loss < paid {
                        found.push(Violation::Overpayment {
                            edge,
                            player,
                            gain: paid - loss,
                        });
                    }
                }
            } else {
                let benefits = addition_benefits(built.distances(), edge);
                let total: Cost = benefits.iter().sum();
                if total.exceeds(alpha) {
                    let coalition = (0..host.n())
                        .filter(|&i| benefits[i].is_positive())
                        .collect();
                    found.push(Violation::FundableEdge {
                        edge,
                        coalition,
                        gain: total - Cost::finite(alpha.clone()),
                    });
                }
            }
            found
        })
        .collect();
    EquilibriumReport::new(Concept::Collaborative, violations)
}

/// Whether some payment assignment makes `built` a collaborative
/// equilibrium: every present edge is worth at least the price to the
/// players in total and every absent edge at most the price.
///
/// Valuations depend only on the network, so the per-edge conditions are
/// independent of one another.
pub fn is_equilibrium_graph(host: &HostGraph, built: &BuiltGraph) -> bool {
    let alpha = host.alpha();
    host.edges().iter().enumerate().all(|(idx, &edge)| {
        if built.contains(idx) {
            let total: Cost = removal_losses(built.graph(), built.distances(), edge)
                .iter()
                .sum();
            !total.below(alpha)
        } else {
            let total: Cost = addition_benefits(built.distances(), edge).iter().sum();
            !total.exceeds(alpha)
        }
    })
}
