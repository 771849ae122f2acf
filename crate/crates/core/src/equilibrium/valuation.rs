use serde::Serialize;

use crate::cost::{Cost, Usage};
use crate::error::{Error, Result};
use crate::game::BuiltGraph;
use crate::graph::{DistanceMatrix, Edge, Graph, HostGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ValuationKind {
    /// The edge is absent; values are usage-cost decreases if it is added.
    Addition,
    /// The edge is present; values are usage-cost increases if it is removed.
    Removal,
}

/// Each player's stake in one host edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeValuation {
    pub edge: Edge,
    pub kind: ValuationKind,
    pub values: Vec<Cost>,
}

impl EdgeValuation {
    pub fn total(&self) -> Cost {
        self.values.iter().sum()
    }
}

pub fn edge_valuations(host: &HostGraph, built: &BuiltGraph, e: Edge) -> Result<EdgeValuation> {
    let idx = host.edge_index(e).ok_or(Error::NotHostEdge(e))?;
    let (kind, values) = if built.contains(idx) {
        (
            ValuationKind::Removal,
            removal_losses(built.graph(), built.distances(), e),
        )
    } else {
        (
            ValuationKind::Addition,
            addition_benefits(built.distances(), e),
        )
    };
    Ok(EdgeValuation {
        edge: e,
        kind,
        values,
    })
}

#[derive(Clone, Copy, Default)]
struct Delta {
    unreachable: i64,
    finite: i64,
}

impl Delta {
    fn cost(self) -> Cost {
        Cost::from_parts(self.unreachable, self.finite)
    }
}

/// Per-player usage decrease from adding the absent edge `e = {a, b}`.
///
/// A pair `(i, j)` can only gain when `i` is at least two hops closer to
/// `a` than to `b` and `j` is at least two hops closer to `b` than to `a`
/// (or vice versa), so only those two sides are crossed.
pub(crate) fn addition_benefits(dist: &DistanceMatrix, e: Edge) -> Vec<Cost> {
    let n = dist.n();
    let (a, b) = (e.lo(), e.hi());
    let da: Vec<Option<u32>> = dist.row(a).collect();
    let db: Vec<Option<u32>> = dist.row(b).collect();
    let strictly_closer = |near: Option<u32>, far: Option<u32>| match (near, far) {
        (Some(x), Some(y)) => x + 1 < y,
        (Some(_), None) => true,
        _ => false,
    };
    let side_a: Vec<usize> = (0..n).filter(|&i| strictly_closer(da[i], db[i])).collect();
    let side_b: Vec<usize> = (0..n).filter(|&j| strictly_closer(db[j], da[j])).collect();

    let mut gains = vec![Delta::default(); n];
    for &i in &side_a {
        let to_a = da[i].expect("side a reaches a");
        for &j in &side_b {
            let through = i64::from(to_a + 1 + db[j].expect("side b reaches b"));
            let gain = match dist.get(i, j) {
                None => Delta {
                    unreachable: 1,
                    finite: -through,
                },
                Some(old) if through < i64::from(old) => Delta {
                    unreachable: 0,
                    finite: i64::from(old) - through,
                },
                Some(_) => continue,
            };
            for p in [i, j] {
                gains[p].unreachable += gain.unreachable;
                gains[p].finite += gain.finite;
            }
        }
    }
    gains.into_iter().map(Delta::cost).collect()
}

/// Usage increase for `player` if the present edge `e` is removed.
pub(crate) fn removal_loss(graph: &Graph, dist: &DistanceMatrix, e: Edge, player: usize) -> Cost {
    let after: Usage = graph
        .bfs_with(player, Some(e), None)
        .into_iter()
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
    let before = dist.usage(player);
    Delta {
        unreachable: after.unreachable as i64 - before.unreachable as i64,
        finite: after.finite as i64 - before.finite as i64,
    }
    .cost()
}

/// Full loss vector for removing `e`. Only players whose distances to the
/// two endpoints differ by one can route a shortest path through `e`.
pub(crate) fn removal_losses(graph: &Graph, dist: &DistanceMatrix, e: Edge) -> Vec<Cost> {
    (0..dist.n())
        .map(|i| match (dist.get(i, e.lo()), dist.get(i, e.hi())) {
            (Some(x), Some(y)) if x.abs_diff(y) == 1 => removal_loss(graph, dist, e, i),
            _ => Cost::zero(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators;
    use crate::rational::int;

    fn built(host: &HostGraph, edges: &[(usize, usize)]) -> BuiltGraph {
        let edges: Vec<_> = edges.iter().map(|&(u, v)| Edge::new(u, v)).collect();
        BuiltGraph::from_edges(host, &edges).unwrap()
    }

    #[test]
    fn star_leaf_pair_benefits() {
        let host = HostGraph::complete(4, int(1));
        let g = built(&host, &generators::star(4));
        let v = edge_valuations(&host, &g, Edge::new(1, 2)).unwrap();
        assert_eq!(v.kind, ValuationKind::Addition);
        let expected: Vec<_> = [0, 1, 1, 0]
            .iter()
            .map(|&x| Cost::from_parts(0, x))
            .collect();
        assert_eq!(v.values, expected);
    }

    #[test]
    fn triangle_edge_losses() {
        let host = HostGraph::complete(3, int(1));
        let g = built(&host, &generators::complete(3));
        let v = edge_valuations(&host, &g, Edge::new(0, 1)).unwrap();
        assert_eq!(v.kind, ValuationKind::Removal);
        let expected: Vec<_> = [1, 1, 0].iter().map(|&x| Cost::from_parts(0, x)).collect();
        assert_eq!(v.values, expected);
    }

    #[test]
    fn bridge_removal_disconnects_everyone() {
        let host = HostGraph::new(4, &generators::path(4), int(1)).unwrap();
        let g = built(&host, &generators::path(4));
        let v = edge_valuations(&host, &g, Edge::new(1, 2)).unwrap();
        assert!(v.values.iter().all(|c| c.unreachable > 0));
    }

    #[test]
    fn joining_components_is_infinitely_valuable() {
        let host = HostGraph::new(4, &generators::path(4), int(1)).unwrap();
        let g = built(&host, &[(0, 1), (2, 3)]);
        let v = edge_valuations(&host, &g, Edge::new(1, 2)).unwrap();
        assert_eq!(v.values[0], Cost::from_parts(2, -5));
        assert_eq!(v.values[1], Cost::from_parts(2, -3));
    }

    #[test]
    fn not_a_host_edge() {
        let host = HostGraph::new(3, &generators::path(3), int(1)).unwrap();
        let g = built(&host, &generators::path(3));
        assert!(edge_valuations(&host, &g, Edge::new(0, 2)).is_err());
    }
}
