//! The cycle-of-paths host family `G_{k,l}`.
//!
//! Start from a cycle `v_1 .. v_{2l}`. Every cycle edge `{v_i, v_{i+1}}`
//! gets a parallel path `P_i` of `k` edges, and every other cycle vertex is
//! joined to the next-but-one by a path `Q_i` of `k` edges from `v_{2i}` to
//! `v_{2i+2}`. The host has `(3k - 1) l` vertices and `(3k + 2) l` edges.
//!
//! Two spanning unicyclic subgraphs are kept alongside it. `G_1` retains
//! the short cycle and cuts every path once. `G_2` drops every cycle edge,
//! cuts the even `P` paths once and keeps the long cycle formed by the `Q`
//! paths. With the link price at `12 n k^2` and `n > 432 k^2`, `G_2` is a
//! collaborative equilibrium although it costs more than `G_1`.

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::game::{network_cost, BuiltGraph, PaymentMatrix};
use crate::graph::{Edge, HostGraph};
use crate::rational::{self, Rational};

#[derive(Clone, Debug)]
pub struct LowerBoundInstance {
    pub k: usize,
    pub l: usize,
    /// Host graph priced at [`suggested_alpha`].
    pub host: HostGraph,
    /// Vertex ids of `v_1 .. v_{2l}`.
    pub cycle: Vec<usize>,
    /// `P_1 .. P_{2l}` as vertex sequences from `v_i` to `v_{i+1}`.
    pub p_paths: Vec<Vec<usize>>,
    /// `Q_1 .. Q_l` as vertex sequences from `v_{2i}` to `v_{2i+2}`.
    pub q_paths: Vec<Vec<usize>>,
    /// The cheap reference network.
    pub g1: Vec<Edge>,
    /// The expensive equilibrium network.
    pub g2: Vec<Edge>,
    /// Every `G_2` edge bought wholly by its lower-indexed endpoint.
    pub g2_payments: PaymentMatrix,
}

/// `12 n k^2`, the price at which `G_2` is stable.
pub fn suggested_alpha(k: usize, n: usize) -> Rational {
    rational::int((12 * n * k * k) as i64)
}

/// The edge cut from a path of `k` edges: the middle one, index `k / 2`.
fn cut(path: &[usize]) -> Edge {
    let k = path.len() - 1;
    Edge::new(path[k / 2], path[k / 2 + 1])
}

fn path_edges(path: &[usize]) -> impl Iterator<Item = Edge> + '_ {
    path.windows(2).map(|w| Edge::new(w[0], w[1]))
}

pub fn generate_lower_bound_instance(k: usize, l: usize) -> Result<LowerBoundInstance> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "path length k must be at least 2, got {k}"
        )));
    }
    if l < 3 {
        return Err(Error::InvalidParameter(format!(
            "cycle parameter l must be at least 3, got {l}"
        )));
    }
    let cycle_len = 2 * l;
    let cycle: Vec<usize> = (0..cycle_len).collect();
    let mut next_id = cycle_len;
    let mut interior = |count: usize| {
        let ids: Vec<usize> = (next_id..next_id + count).collect();
        next_id += count;
        ids
    };
    let v = |i: usize| cycle[(i - 1) % cycle_len];

    let mut p_paths = Vec::with_capacity(cycle_len);
    for i in 1..=cycle_len {
        let mut path = vec![v(i)];
        path.extend(interior(k - 1));
        path.push(v(i + 1));
        p_paths.push(path);
    }
    let mut q_paths = Vec::with_capacity(l);
    for i in 1..=l {
        let mut path = vec![v(2 * i)];
        path.extend(interior(k - 1));
        path.push(v(2 * i + 2));
        q_paths.push(path);
    }
    let n = next_id;

    let cycle_edges: Vec<Edge> = (1..=cycle_len).map(|i| Edge::new(v(i), v(i + 1))).collect();
    let mut all: Vec<Edge> = cycle_edges.clone();
    all.extend(p_paths.iter().flat_map(|p| path_edges(p)));
    all.extend(q_paths.iter().flat_map(|p| path_edges(p)));
    let pairs: Vec<(usize, usize)> = all.iter().map(|e| (e.lo(), e.hi())).collect();
    let host = HostGraph::new(n, &pairs, suggested_alpha(k, n))?;

    let g1_cuts: Vec<Edge> = p_paths.iter().chain(&q_paths).map(|p| cut(p)).collect();
    let mut g1: Vec<Edge> = host
        .edges()
        .iter()
        .copied()
        .filter(|e| !g1_cuts.contains(e))
        .collect();
    g1.sort_unstable();

    // P_{2i} sits at zero-based index 2i - 1.
    let mut g2_cuts: Vec<Edge> = p_paths.iter().skip(1).step_by(2).map(|p| cut(p)).collect();
    g2_cuts.extend(&cycle_edges);
    let g2: Vec<Edge> = host
        .edges()
        .iter()
        .copied()
        .filter(|e| !g2_cuts.contains(e))
        .collect();

    let g2_payments = PaymentMatrix::single_owner(&host, &g2, Edge::lo)?;
    Ok(LowerBoundInstance {
        k,
        l,
        host,
        cycle,
        p_paths,
        q_paths,
        g1,
        g2,
        g2_payments,
    })
}

impl LowerBoundInstance {
    pub fn n(&self) -> usize {
        self.host.n()
    }

    pub fn alpha(&self) -> &Rational {
        self.host.alpha()
    }

    pub fn built_g1(&self) -> BuiltGraph {
        BuiltGraph::from_edges(&self.host, &self.g1).expect("G_1 edges come from the host")
    }

    pub fn built_g2(&self) -> BuiltGraph {
        BuiltGraph::from_edges(&self.host, &self.g2).expect("G_2 edges come from the host")
    }

    /// `(cost(G_1), cost(G_2))` at the instance price.
    pub fn costs(&self) -> (Cost, Cost) {
        (
            network_cost(&self.host, &self.built_g1()),
            network_cost(&self.host, &self.built_g2()),
        )
    }

    fn header(&self) -> Vec<String> {
        vec![format!(
            "k={} l={} alpha={}",
            self.k,
            self.l,
            rational::format(self.alpha())
        )]
    }

    /// Host, `G_1` and `G_2` in the edge-list format, each headed by a
    /// `# k=.. l=.. alpha=..` comment.
    pub fn to_edge_lists(&self) -> (String, String, String) {
        let h = self.header();
        (
            self.host.to_edge_list(&h),
            crate::graph::format_edge_list(self.n(), &self.g1, &h),
            crate::graph::format_edge_list(self.n(), &self.g2, &h),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{all_pairs_distances, Graph};
    use crate::rational::int;

    #[test]
    fn smallest_instance_sizes() {
        let inst = generate_lower_bound_instance(2, 3).unwrap();
        assert_eq!(inst.n(), 15);
        assert_eq!(inst.host.edge_count(), 24);
        assert_eq!(inst.alpha(), &int(720));
    }

    #[test]
    fn reference_networks_are_connected_and_unicyclic() {
        for (k, l) in [(2, 3), (3, 4), (4, 5), (5, 3)] {
            let inst = generate_lower_bound_instance(k, l).unwrap();
            assert_eq!(inst.n(), (3 * k - 1) * l);
            assert_eq!(inst.host.edge_count(), (3 * k + 2) * l);
            for edges in [&inst.g1, &inst.g2] {
                assert_eq!(edges.len(), inst.n());
                let g = Graph::from_edges(inst.n(), edges.iter().copied());
                assert!(all_pairs_distances(&g).is_connected());
            }
        }
    }

    #[test]
    fn g2_has_no_cycle_edges_and_keeps_q_paths() {
        let inst = generate_lower_bound_instance(3, 4).unwrap();
        let cycle_len = inst.cycle.len();
        for i in 0..cycle_len {
            let e = Edge::new(inst.cycle[i], inst.cycle[(i + 1) % cycle_len]);
            assert!(!inst.g2.contains(&e));
            assert!(inst.g1.contains(&e));
        }
        for q in &inst.q_paths {
            assert!(path_edges(q).all(|e| inst.g2.contains(&e)));
        }
        for (i, p) in inst.p_paths.iter().enumerate() {
            let kept = path_edges(p).filter(|e| inst.g2.contains(e)).count();
            // zero-based even index = odd P path, kept whole
            assert_eq!(kept, if i % 2 == 0 { 3 } else { 2 });
        }
    }

    #[test]
    fn rejects_small_parameters() {
        assert!(generate_lower_bound_instance(1, 3).is_err());
        assert!(generate_lower_bound_instance(2, 2).is_err());
    }

    #[test]
    fn edge_list_header() {
        let inst = generate_lower_bound_instance(2, 3).unwrap();
        let (host, _, g2) = inst.to_edge_lists();
        assert!(host.starts_with("# k=2 l=3 alpha=720\n15 24\n"));
        assert!(g2.starts_with("# k=2 l=3 alpha=720\n15 15\n"));
    }
}
