use num::{Signed, Zero};

use crate::cost::{Cost, Usage};
use crate::equilibrium::is_equilibrium_graph;
use crate::error::{Error, Result};
use crate::game::{BuiltGraph, Model};
use crate::graph::{all_pairs_distances, Edge, Graph, HostGraph};
use crate::rational::{self, Rational};

/// Exhaustive searches visit `2^|E|` edge subsets.
pub const EXACT_EDGE_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSubset {
    pub edges: Vec<Edge>,
    pub cost: Cost,
}

fn subset_edges(host: &HostGraph, mask: u32) -> impl Iterator<Item = Edge> + '_ {
    host.edges()
        .iter()
        .enumerate()
        .filter(move |(i, _)| mask >> i & 1 == 1)
        .map(|(_, &e)| e)
}

fn subset_cost(host: &HostGraph, mask: u32) -> Cost {
    let graph = Graph::from_edges(host.n(), subset_edges(host, mask));
    let usage: Usage = (0..host.n())
        .flat_map(|s| graph.bfs(s))
        .map(|d| match d {
            Some(d) => Usage {
                unreachable: 0,
                finite: u64::from(d),
            },
            None => Usage {
                unreachable: 1,
                finite: 0,
            },
        })
        .sum();
    Cost::finite(host.alpha() * rational::int(i64::from(mask.count_ones()))) + usage.cost()
}

fn check_cap(host: &HostGraph) -> Result<()> {
    if host.edge_count() > EXACT_EDGE_CAP {
        return Err(Error::EdgeCap {
            edges: host.edge_count(),
            cap: EXACT_EDGE_CAP,
        });
    }
    Ok(())
}

/// Lexicographic order on edge subsets of the canonical host edge list.
fn lex_smaller(host: &HostGraph, a: u32, b: u32) -> bool {
    subset_edges(host, a).lt(subset_edges(host, b))
}

/// Minimum of `α |F| + Σ d_F` over all edge subsets `F`.
///
/// Both models share this optimum: a unilateral optimum never buys an edge
/// twice. Disconnected subsets lose to connected ones under the
/// lexicographic cost; ties go to the lexicographically smallest edge list.
pub fn social_optimum_exact(host: &HostGraph, model: Model) -> Result<EdgeSubset> {
    let _ = model;
    check_cap(host)?;
    let connected = host.graph().is_connected();
    let min_edges = if connected {
        host.n().saturating_sub(1) as u32
    } else {
        0
    };
    let mut best: Option<(Cost, u32)> = None;
    for mask in 0u32..(1u32 << host.edge_count()) {
        if mask.count_ones() < min_edges {
            continue;
        }
        let cost = subset_cost(host, mask);
        let wins = match &best {
            None => true,
            Some((c, m)) => cost < *c || (cost == *c && lex_smaller(host, mask, *m)),
        };
        if wins {
            best = Some((cost, mask));
        }
    }
    let (cost, mask) = best.expect("at least one subset is enumerated");
    Ok(EdgeSubset {
        edges: subset_edges(host, mask).collect(),
        cost,
    })
}

/// The most expensive network that some payment assignment turns into a
/// collaborative equilibrium, or `None` if there is none.
pub fn worst_collaborative_equilibrium(host: &HostGraph) -> Result<Option<EdgeSubset>> {
    check_cap(host)?;
    let mut worst: Option<(Cost, u32)> = None;
    for mask in 0u32..(1u32 << host.edge_count()) {
        let present = (0..host.edge_count()).map(|i| mask >> i & 1 == 1).collect();
        let built = BuiltGraph::from_mask(host, present);
        if !is_equilibrium_graph(host, &built) {
            continue;
        }
        let cost = subset_cost(host, mask);
        let wins = match &worst {
            None => true,
            Some((c, m)) => cost > *c || (cost == *c && lex_smaller(host, mask, *m)),
        };
        if wins {
            worst = Some((cost, mask));
        }
    }
    Ok(worst.map(|(cost, mask)| EdgeSubset {
        edges: subset_edges(host, mask).collect(),
        cost,
    }))
}

/// `α (n - 1) + Σ_{u≠v} d_G(u, v)`: a connected spanning network needs at
/// least `n - 1` edges and cannot beat host distances.
pub fn social_optimum_lower_bound(host: &HostGraph) -> Result<Cost> {
    let dist = all_pairs_distances(host.graph());
    if !dist.is_connected() {
        return Err(Error::DisconnectedHost);
    }
    let edges = host.n().saturating_sub(1) as i64;
    Ok(Cost::finite(host.alpha() * rational::int(edges)) + dist.total_usage().cost())
}

/// Exact ratio of an equilibrium cost to an optimum cost.
pub fn price_of_anarchy(equilibrium_cost: &Cost, optimum_cost: &Cost) -> Result<Rational> {
    if !equilibrium_cost.is_finite() || equilibrium_cost.amount.is_negative() {
        return Err(Error::InvalidCost(equilibrium_cost.to_string()));
    }
    if !optimum_cost.is_finite()
        || optimum_cost.amount.is_zero()
        || optimum_cost.amount.is_negative()
    {
        return Err(Error::InvalidCost(optimum_cost.to_string()));
    }
    Ok(&equilibrium_cost.amount / &optimum_cost.amount)
}
