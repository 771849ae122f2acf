//! Undirected graphs, breadth-first distances and neighborhood queries.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::num::NonZeroU32;

use num::Signed;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::Usage;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Unordered vertex pair, stored with the smaller endpoint first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge(usize, usize);

impl Edge {
    pub fn new(u: usize, v: usize) -> Self {
        if u <= v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    pub fn lo(self) -> usize {
        self.0
    }

    pub fn hi(self) -> usize {
        self.1
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint opposite `v`. `v` must be an endpoint.
    pub fn other(self, v: usize) -> usize {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// Adjacency-list graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from edges that are already known to be valid and distinct.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut graph = Graph::empty(n);
        for e in edges {
            graph.adj[e.lo()].push(e.hi());
            graph.adj[e.hi()].push(e.lo());
            graph.edge_count += 1;
        }
        for list in &mut graph.adj {
            list.sort_unstable();
        }
        graph
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.adj[e.lo()].binary_search(&e.hi()).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&v| u < v)
                .map(move |&v| Edge(u, v))
        })
    }

    /// Single-source distances with `removed` treated as absent and `added`
    /// treated as present.
    pub fn bfs_with(
        &self,
        source: usize,
        removed: Option<Edge>,
        added: Option<Edge>,
    ) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap_or(0);
            let extra = added.filter(|e| e.contains(x)).map(|e| e.other(x));
            for y in self.adj[x].iter().copied().chain(extra) {
                if dist[y].is_none() && removed != Some(Edge::new(x, y)) {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn bfs(&self, source: usize) -> Vec<Option<u32>> {
        self.bfs_with(source, None, None)
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.bfs(0).iter().all(Option::is_some)
    }
}

/// The fixed graph of permitted links together with the uniform link price.
#[derive(Clone, Debug, PartialEq)]
pub struct HostGraph {
    edges: Vec<Edge>,
    index: HashMap<Edge, usize>,
    graph: Graph,
    alpha: Rational,
}

impl HostGraph {
    /// Validates and canonicalizes an edge list. Edges are stored sorted.
    pub fn new(n: usize, edge_list: &[(usize, usize)], alpha: Rational) -> Result<Self> {
        if alpha.is_negative() {
            return Err(Error::NegativeAlpha(rational::format(&alpha)));
        }
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(u, v) in edge_list {
            if u >= n || v >= n {
                return Err(Error::EndpointOutOfRange { u, v, n });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            edges.push(Edge::new(u, v));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0]));
        }
        let index = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let graph = Graph::from_edges(n, edges.iter().copied());
        Ok(HostGraph {
            edges,
            index,
            graph,
            alpha,
        })
    }

    pub fn complete(n: usize, alpha: Rational) -> Self {
        let pairs: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        HostGraph::new(n, &pairs, alpha).expect("complete graph is valid")
    }

    /// Same vertices and edges, different link price.
    pub fn with_alpha(&self, alpha: Rational) -> Result<Self> {
        if alpha.is_negative() {
            return Err(Error::NegativeAlpha(rational::format(&alpha)));
        }
        Ok(HostGraph {
            alpha,
            ..self.clone()
        })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_index(&self, e: Edge) -> Option<usize> {
        self.index.get(&e).copied()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.index.contains_key(&e)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn degree(&self, v: usize) -> usize {
        self.graph.degree(v)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        self.graph.neighbors(v)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn to_edge_list(&self, header: &[String]) -> String {
        format_edge_list(self.n(), &self.edges, header)
    }
}

/// Parses `"n m"` followed by `m` lines `"u v"`. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_edge_list(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing \"n m\" header"))?;
    let (n, m) = parse_pair(line, header)?;
    let mut edges = Vec::with_capacity(m);
    for (line, body) in lines {
        edges.push(parse_pair(line, body)?);
    }
    if edges.len() != m {
        return Err(Error::parse(
            line,
            format!("header announces {m} edges, found {}", edges.len()),
        ));
    }
    Ok((n, edges))
}

fn parse_pair(line: usize, body: &str) -> Result<(usize, usize)> {
    let mut it = body.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::parse(line, "expected two integers"))?
            .parse()
            .map_err(|_| Error::parse(line, format!("not a vertex index: {body:?}")))
    };
    let pair = (next()?, next()?);
    if it.next().is_some() {
        return Err(Error::parse(line, "trailing tokens"));
    }
    Ok(pair)
}

pub fn format_edge_list(n: usize, edges: &[Edge], header: &[String]) -> String {
    let mut out = String::new();
    for line in header {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(&format!("{} {}\n", n, edges.len()));
    for e in edges {
        out.push_str(&format!("{} {}\n", e.lo(), e.hi()));
    }
    out
}

/// Exact all-pairs hop distances.
///
/// Unreachable pairs are `None`; the per-vertex usage keeps the number of
/// unreachable vertices apart from the finite distance sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    // distance + 1, so the niche encodes "unreachable" without a sentinel value
    cells: Vec<Option<NonZeroU32>>,
    usage: Vec<Usage>,
    diameter: u32,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> Option<u32> {
        self.cells[u * self.n + v].map(|d| d.get() - 1)
    }

    pub fn row(&self, u: usize) -> impl Iterator<Item = Option<u32>> + '_ {
        self.cells[u * self.n..(u + 1) * self.n]
            .iter()
            .map(|d| d.map(|d| d.get() - 1))
    }

    /// Distance sum and unreachable count from `u`.
    pub fn usage(&self, u: usize) -> Usage {
        self.usage[u]
    }

    /// Sum over all ordered pairs.
    pub fn total_usage(&self) -> Usage {
        self.usage.iter().copied().sum()
    }

    /// Largest finite distance.
    pub fn diameter(&self) -> u32 {
        self.diameter
    }

    pub fn is_connected(&self) -> bool {
        self.usage.iter().all(|u| u.unreachable == 0)
    }

    /// `|N_k(u)|`: vertices within distance `k` of `u`.
    pub fn neighborhood_size(&self, u: usize, k: u64) -> usize {
        self.row(u)
            .filter(|d| matches!(d, Some(d) if u64::from(*d) <= k))
            .count()
    }

    pub fn profile(&self, u: usize, k: u64) -> NeighborhoodProfile {
        NeighborhoodProfile {
            source: u,
            radius: k,
            size: self.neighborhood_size(u, k),
        }
    }

    /// `N_k = min_v |N_k(v)|`.
    pub fn min_neighborhood_size(&self, k: u64) -> usize {
        (0..self.n)
            .map(|v| self.neighborhood_size(v, k))
            .min()
            .unwrap_or(0)
    }

    /// Largest distance from `u`, or `None` when some vertex is unreachable.
    pub fn eccentricity(&self, u: usize) -> Option<u32> {
        self.row(u).try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }

    pub fn component_size(&self, u: usize) -> usize {
        self.row(u).filter(Option::is_some).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NeighborhoodProfile {
    pub source: usize,
    pub radius: u64,
    pub size: usize,
}

/// One breadth-first search per source; sources are processed in parallel.
pub fn all_pairs_distances(graph: &Graph) -> DistanceMatrix {
    let n = graph.n();
    let rows: Vec<Vec<Option<u32>>> = (0..n).into_par_iter().map(|s| graph.bfs(s)).collect();
    let mut cells = Vec::with_capacity(n * n);
    let mut usage = Vec::with_capacity(n);
    let mut diameter = 0;
    for row in rows {
        let mut u = Usage::default();
        for d in row {
            match d {
                Some(d) => {
                    u.finite += u64::from(d);
                    diameter = diameter.max(d);
                    cells.push(NonZeroU32::new(d + 1));
                }
                None => {
                    u.unreachable += 1;
                    cells.push(None);
                }
            }
        }
        usage.push(u);
    }
    DistanceMatrix {
        n,
        cells,
        usage,
        diameter,
    }
}

/// Small graph families used by tests, fixtures and the CLI.
pub mod generators {
    use super::*;

    pub fn path(n: usize) -> Vec<(usize, usize)> {
        (1..n).map(|v| (v - 1, v)).collect()
    }

    pub fn cycle(n: usize) -> Vec<(usize, usize)> {
        let mut edges = path(n);
        if n > 2 {
            edges.push((n - 1, 0));
        }
        edges
    }

    pub fn star(n: usize) -> Vec<(usize, usize)> {
        (1..n).map(|v| (0, v)).collect()
    }

    pub fn complete(n: usize) -> Vec<(usize, usize)> {
        (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect()
    }

    /// Erdős–Rényi `G(n, p)`, resampled until connected.
    pub fn random_connected<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<(usize, usize)> {
        loop {
            let edges: Vec<_> = complete(n)
                .into_iter()
                .filter(|_| rng.gen_bool(p))
                .collect();
            let graph = Graph::from_edges(n, edges.iter().map(|&(u, v)| Edge::new(u, v)));
            if graph.is_connected() {
                return edges;
            }
        }
    }
}
