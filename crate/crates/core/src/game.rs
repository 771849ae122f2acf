//! Strategies, realized networks and costs for both game models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cost::{Cost, Usage};
use crate::error::{Error, Result};
use crate::graph::{all_pairs_distances, DistanceMatrix, Edge, Graph, HostGraph};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Unilateral,
    Cooperative,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Unilateral => "unilateral",
            Model::Cooperative => "cooperative",
        })
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "unilateral" => Ok(Model::Unilateral),
            "cooperative" => Ok(Model::Cooperative),
            other => Err(Error::InvalidParameter(format!("unknown model {other:?}"))),
        }
    }
}

/// Per player, the set of host neighbors it buys links to.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnilateralStrategy {
    choices: Vec<BTreeSet<usize>>,
}

impl UnilateralStrategy {
    pub fn empty(n: usize) -> Self {
        UnilateralStrategy {
            choices: vec![BTreeSet::new(); n],
        }
    }

    pub fn new(host: &HostGraph, choices: Vec<Vec<usize>>) -> Result<Self> {
        if choices.len() != host.n() {
            return Err(Error::StrategyShape {
                expected: host.n(),
                got: choices.len(),
            });
        }
        let mut strategy = UnilateralStrategy::empty(host.n());
        for (i, set) in choices.into_iter().enumerate() {
            strategy.set(host, i, set)?;
        }
        Ok(strategy)
    }

    /// Replaces player `i`'s purchases.
    pub fn set(
        &mut self,
        host: &HostGraph,
        i: usize,
        set: impl IntoIterator<Item = usize>,
    ) -> Result<()> {
        if i >= host.n() {
            return Err(Error::UnknownPlayer(i));
        }
        let set: BTreeSet<usize> = set.into_iter().collect();
        for &j in &set {
            if j >= host.n() || j == i || !host.contains(Edge::new(i, j)) {
                return Err(Error::NotHostEdge(Edge::new(i, j)));
            }
        }
        self.choices[i] = set;
        Ok(())
    }

    pub fn with_player(
        &self,
        host: &HostGraph,
        i: usize,
        set: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let mut next = self.clone();
        next.set(host, i, set)?;
        Ok(next)
    }

    pub fn n(&self) -> usize {
        self.choices.len()
    }

    pub fn of(&self, i: usize) -> &BTreeSet<usize> {
        &self.choices[i]
    }

    /// An edge is built when either endpoint buys it.
    pub fn realized(&self, host: &HostGraph) -> Vec<bool> {
        let mut present = vec![false; host.edge_count()];
        for (i, set) in self.choices.iter().enumerate() {
            for &j in set {
                if let Some(idx) = host.edge_index(Edge::new(i, j)) {
                    present[idx] = true;
                }
            }
        }
        present
    }

    pub fn bought(&self) -> usize {
        self.choices.iter().map(BTreeSet::len).sum()
    }

    /// Every host edge bought by its lower-indexed endpoint.
    pub fn host_complete(host: &HostGraph) -> Self {
        let mut strategy = UnilateralStrategy::empty(host.n());
        for e in host.edges() {
            strategy.choices[e.lo()].insert(e.hi());
        }
        strategy
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, set) in self.choices.iter().enumerate() {
            out.push_str(&format!("player {i}:"));
            for j in set {
                out.push_str(&format!(" {j}"));
            }
            out.push('\n');
        }
        out
    }

    /// Parses `player i: j1 j2 ...` lines. Players without a line buy nothing.
    pub fn parse(host: &HostGraph, text: &str) -> Result<Self> {
        let mut strategy = UnilateralStrategy::empty(host.n());
        for (line, body) in content_lines(text) {
            let (head, rest) = body
                .split_once(':')
                .ok_or_else(|| Error::parse(line, "expected \"player i: ...\""))?;
            let i = head
                .strip_prefix("player")
                .and_then(|s| s.trim().parse::<usize>().ok())
                .ok_or_else(|| Error::parse(line, format!("bad player header {head:?}")))?;
            let set = rest
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::parse(line, format!("bad vertex {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            strategy.set(host, i, set)?;
        }
        Ok(strategy)
    }
}

/// Sparse per-edge contributions `s(i, e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaymentMatrix {
    per_edge: Vec<BTreeMap<usize, Rational>>,
}

impl PaymentMatrix {
    pub fn empty(host: &HostGraph) -> Self {
        PaymentMatrix {
            per_edge: vec![BTreeMap::new(); host.edge_count()],
        }
    }

    /// Builds a matrix from `(edge, player, amount)` triples; repeated
    /// triples for the same player and edge accumulate.
    pub fn from_entries(
        host: &HostGraph,
        entries: impl IntoIterator<Item = (Edge, usize, Rational)>,
    ) -> Result<Self> {
        let mut m = PaymentMatrix::empty(host);
        for (e, player, amount) in entries {
            let idx = host.edge_index(e).ok_or(Error::NotHostEdge(e))?;
            let current = m.get(idx, player);
            m.set(host, idx, player, current + amount)?;
        }
        Ok(m)
    }

    /// Every host edge paid in equal halves by its two endpoints.
    pub fn split_evenly(host: &HostGraph) -> Self {
        let half = host.alpha() / rational::int(2);
        let mut m = PaymentMatrix::empty(host);
        if half.is_zero() {
            return m;
        }
        for (idx, e) in host.edges().iter().enumerate() {
            m.per_edge[idx].insert(e.lo(), half.clone());
            m.per_edge[idx].insert(e.hi(), half.clone());
        }
        m
    }

    /// Each listed edge bought wholly by `owner(edge)`.
    pub fn single_owner(
        host: &HostGraph,
        edges: &[Edge],
        owner: impl Fn(Edge) -> usize,
    ) -> Result<Self> {
        PaymentMatrix::from_entries(
            host,
            edges.iter().map(|&e| (e, owner(e), host.alpha().clone())),
        )
    }

    pub fn edge_count(&self) -> usize {
        self.per_edge.len()
    }

    pub fn get(&self, edge_idx: usize, player: usize) -> Rational {
        self.per_edge[edge_idx]
            .get(&player)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn set(
        &mut self,
        host: &HostGraph,
        edge_idx: usize,
        player: usize,
        amount: Rational,
    ) -> Result<()> {
        let edge = host.edges()[edge_idx];
        if player >= host.n() {
            return Err(Error::UnknownPlayer(player));
        }
        if amount.is_negative() {
            return Err(Error::NegativePayment {
                edge,
                player,
                amount: rational::format(&amount),
            });
        }
        if amount.is_zero() {
            self.per_edge[edge_idx].remove(&player);
        } else {
            self.per_edge[edge_idx].insert(player, amount);
        }
        Ok(())
    }

    /// Replaces every contribution on one edge.
    pub fn replace_edge(
        &mut self,
        edge_idx: usize,
        entries: impl IntoIterator<Item = (usize, Rational)>,
    ) {
        self.per_edge[edge_idx] = entries.into_iter().filter(|(_, a)| !a.is_zero()).collect();
    }

    pub fn clear_edge(&mut self, edge_idx: usize) {
        self.per_edge[edge_idx].clear();
    }

    /// Nonzero contributions on one edge, by ascending player.
    pub fn entries(&self, edge_idx: usize) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.per_edge[edge_idx].iter().map(|(&p, a)| (p, a))
    }

    pub fn edge_sum(&self, edge_idx: usize) -> Rational {
        self.per_edge[edge_idx].values().sum()
    }

    /// Edges whose total contribution reaches the link price.
    pub fn realized(&self, host: &HostGraph) -> Vec<bool> {
        (0..self.per_edge.len())
            .map(|idx| self.edge_sum(idx) >= *host.alpha())
            .collect()
    }

    /// `s'(i, e)`: the contribution after scaling an overfunded edge down to
    /// the link price.
    pub fn normalized(&self, host: &HostGraph, edge_idx: usize, player: usize) -> Rational {
        let amount = self.get(edge_idx, player);
        let sum = self.edge_sum(edge_idx);
        if sum > *host.alpha() {
            amount * host.alpha() / sum
        } else {
            amount
        }
    }

    pub fn to_text(&self, host: &HostGraph) -> String {
        let mut out = String::new();
        for (idx, entries) in self.per_edge.iter().enumerate() {
            if entries.is_empty() {
                continue;
            }
            let e = host.edges()[idx];
            out.push_str(&format!("edge {} {}:", e.lo(), e.hi()));
            for (p, a) in entries {
                out.push_str(&format!(" {p}={}", rational::format(a)));
            }
            out.push('\n');
        }
        out
    }

    /// Parses `edge u v: i1=p1 i2=p2 ...` lines.
    pub fn parse(host: &HostGraph, text: &str) -> Result<Self> {
        let mut m = PaymentMatrix::empty(host);
        for (line, body) in content_lines(text) {
            let (head, rest) = body
                .split_once(':')
                .ok_or_else(|| Error::parse(line, "expected \"edge u v: ...\""))?;
            let ends: Vec<usize> = head
                .strip_prefix("edge")
                .map(|s| {
                    s.split_whitespace()
                        .filter_map(|t| t.parse().ok())
                        .collect()
                })
                .unwrap_or_default();
            if ends.len() != 2 {
                return Err(Error::parse(line, format!("bad edge header {head:?}")));
            }
            let e = Edge::new(ends[0], ends[1]);
            let idx = host.edge_index(e).ok_or(Error::NotHostEdge(e))?;
            for token in rest.split_whitespace() {
                let (p, a) = token.split_once('=').ok_or_else(|| {
                    Error::parse(line, format!("expected player=amount, got {token:?}"))
                })?;
                let player: usize = p
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad player {p:?}")))?;
                let amount = rational::parse(a)
                    .ok_or_else(|| Error::parse(line, format!("bad amount {a:?}")))?;
                let current = m.get(idx, player);
                m.set(host, idx, player, current + amount)?;
            }
        }
        Ok(m)
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JointStrategy {
    Unilateral(UnilateralStrategy),
    Cooperative(PaymentMatrix),
}

impl JointStrategy {
    pub fn model(&self) -> Model {
        match self {
            JointStrategy::Unilateral(_) => Model::Unilateral,
            JointStrategy::Cooperative(_) => Model::Cooperative,
        }
    }

    fn check_shape(&self, host: &HostGraph) -> Result<()> {
        match self {
            JointStrategy::Unilateral(s) if s.n() != host.n() => Err(Error::StrategyShape {
                expected: host.n(),
                got: s.n(),
            }),
            JointStrategy::Cooperative(p) if p.edge_count() != host.edge_count() => {
                Err(Error::StrategyShape {
                    expected: host.edge_count(),
                    got: p.edge_count(),
                })
            }
            _ => Ok(()),
        }
    }
}

/// The realized network `G_s` with its cached distances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuiltGraph {
    present: Vec<bool>,
    graph: Graph,
    distances: DistanceMatrix,
}

impl BuiltGraph {
    /// `present` is indexed by host edge.
    pub fn from_mask(host: &HostGraph, present: Vec<bool>) -> Self {
        assert_eq!(
            present.len(),
            host.edge_count(),
            "mask must cover every host edge"
        );
        let graph = Graph::from_edges(
            host.n(),
            host.edges()
                .iter()
                .zip(&present)
                .filter(|(_, &p)| p)
                .map(|(&e, _)| e),
        );
        let distances = all_pairs_distances(&graph);
        BuiltGraph {
            present,
            graph,
            distances,
        }
    }

    pub fn from_edges(host: &HostGraph, edges: &[Edge]) -> Result<Self> {
        let mut present = vec![false; host.edge_count()];
        for &e in edges {
            present[host.edge_index(e).ok_or(Error::NotHostEdge(e))?] = true;
        }
        Ok(BuiltGraph::from_mask(host, present))
    }

    pub fn present(&self) -> &[bool] {
        &self.present
    }

    pub fn contains(&self, edge_idx: usize) -> bool {
        self.present[edge_idx]
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.graph.edges().collect()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.distances
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }
}

pub fn realize_network(host: &HostGraph, strategy: &JointStrategy) -> Result<BuiltGraph> {
    strategy.check_shape(host)?;
    let present = match strategy {
        JointStrategy::Unilateral(s) => s.realized(host),
        JointStrategy::Cooperative(p) => p.realized(host),
    };
    Ok(BuiltGraph::from_mask(host, present))
}

/// Scales every overfunded edge so its contributions sum to exactly the
/// link price. Other edges are left untouched.
pub fn normalize_payments(host: &HostGraph, payments: &PaymentMatrix) -> PaymentMatrix {
    let mut out = payments.clone();
    for idx in 0..payments.edge_count() {
        let sum = payments.edge_sum(idx);
        if sum > *host.alpha() {
            let scaled: Vec<_> = payments
                .entries(idx)
                .map(|(p, a)| (p, a * host.alpha() / &sum))
                .collect();
            out.replace_edge(idx, scaled);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlayerCost {
    pub creation: Cost,
    pub usage: Usage,
}

impl PlayerCost {
    pub fn total(&self) -> Cost {
        self.creation.clone() + self.usage.cost()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CostBreakdown {
    pub players: Vec<PlayerCost>,
    pub creation: Cost,
    pub usage: Usage,
}

impl CostBreakdown {
    pub fn total(&self) -> Cost {
        self.creation.clone() + self.usage.cost()
    }
}

/// `c_i(s)`: creation spend plus the distance sum from `i`.
pub fn player_cost(
    host: &HostGraph,
    built: &BuiltGraph,
    strategy: &JointStrategy,
    i: usize,
) -> PlayerCost {
    let creation = match strategy {
        JointStrategy::Unilateral(s) => host.alpha() * rational::int(s.of(i).len() as i64),
        JointStrategy::Cooperative(p) => (0..host.edge_count())
            .filter(|&idx| built.contains(idx))
            .map(|idx| p.normalized(host, idx, i))
            .sum(),
    };
    PlayerCost {
        creation: Cost::finite(creation),
        usage: built.distances().usage(i),
    }
}

/// `c(s) = Σ_i c_i(s)`.
pub fn social_cost(
    host: &HostGraph,
    built: &BuiltGraph,
    strategy: &JointStrategy,
) -> CostBreakdown {
    let players: Vec<_> = (0..host.n())
        .map(|i| player_cost(host, built, strategy, i))
        .collect();
    let creation = players.iter().map(|p| &p.creation).sum();
    let usage = players.iter().map(|p| p.usage).sum();
    CostBreakdown {
        players,
        creation,
        usage,
    }
}

/// `α |E_s| + Σ_{u,v} d_{G_s}(u, v)`: the social cost when every realized
/// edge is paid exactly once, and the potential of the bidding dynamics.
pub fn network_cost(host: &HostGraph, built: &BuiltGraph) -> Cost {
    Cost::finite(host.alpha() * rational::int(built.edge_count() as i64))
        + built.distances().total_usage().cost()
}
