//! Implementations checked against independent brute-force oracles.

use std::collections::BTreeSet;

use ncg_core::analysis::{greedy_center_points, social_optimum_exact, social_optimum_lower_bound};
use ncg_core::equilibrium::{
    edge_valuations, verify_collaborative, verify_unilateral_nash, NashMode,
};
use ncg_core::game::{
    normalize_payments, realize_network, social_cost, BuiltGraph, JointStrategy, Model,
    PaymentMatrix, UnilateralStrategy,
};
use ncg_core::graph::{all_pairs_distances, generators, Edge, HostGraph};
use ncg_core::rational::{int, ratio};
use ncg_core::{Cost, Rational};
use proptest::prelude::*;

/// Floyd–Warshall with `None` for infinity.
fn floyd_warshall(n: usize, edges: &[Edge]) -> Vec<Vec<Option<u32>>> {
    let mut d = vec![vec![None; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = Some(0);
    }
    for e in edges {
        d[e.lo()][e.hi()] = Some(1);
        d[e.hi()][e.lo()] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Per-vertex (unreachable, sum) from a Floyd–Warshall matrix.
fn usage_rows(d: &[Vec<Option<u32>>]) -> Vec<Cost> {
    d.iter()
        .map(|row| {
            let unreachable = row.iter().filter(|x| x.is_none()).count() as i64;
            let sum: i64 = row.iter().flatten().map(|&x| i64::from(x)).sum();
            Cost::from_parts(unreachable, sum)
        })
        .collect()
}

fn graph_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..=64).prop_flat_map(|n| {
        let pairs = prop::collection::vec((0..n, 0..n), 0..(3 * n));
        pairs.prop_map(move |raw| {
            let set: BTreeSet<Edge> = raw
                .into_iter()
                .filter(|(u, v)| u != v)
                .map(|(u, v)| Edge::new(u, v))
                .collect();
            (n, set.into_iter().map(|e| (e.lo(), e.hi())).collect())
        })
    })
}

fn small_host() -> impl Strategy<Value = HostGraph> {
    (2usize..=8, 1i64..=24, 1i64..=4).prop_flat_map(|(n, num, den)| {
        let all = generators::complete(n);
        prop::collection::vec(any::<bool>(), all.len()).prop_map(move |keep| {
            let edges: Vec<_> = all
                .iter()
                .zip(&keep)
                .filter(|(_, &k)| k)
                .map(|(&e, _)| e)
                .collect();
            HostGraph::new(n, &edges, ratio(num, den)).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bfs_matches_floyd_warshall((n, edges) in graph_strategy()) {
        let host = HostGraph::new(n, &edges, int(1)).unwrap();
        let m = all_pairs_distances(host.graph());
        let oracle = floyd_warshall(n, host.edges());
        let rows = usage_rows(&oracle);
        for (u, row) in oracle.iter().enumerate() {
            for (v, &d) in row.iter().enumerate() {
                prop_assert_eq!(m.get(u, v), d);
            }
            prop_assert_eq!(m.usage(u).cost(), rows[u].clone());
        }
        let diameter = oracle.iter().flatten().flatten().copied().max().unwrap_or(0);
        prop_assert_eq!(m.diameter(), diameter);
    }

    #[test]
    fn neighborhoods_grow_to_components((n, edges) in graph_strategy()) {
        let host = HostGraph::new(n, &edges, int(1)).unwrap();
        let m = all_pairs_distances(host.graph());
        for u in 0..n {
            let oracle = floyd_warshall(n, host.edges());
            for k in 0..=u64::from(m.diameter()) {
                let size = m.neighborhood_size(u, k);
                prop_assert!(m.neighborhood_size(u, k + 1) >= size);
                let by_oracle = oracle[u].iter().filter(|d| matches!(d, Some(d) if u64::from(*d) <= k)).count();
                prop_assert_eq!(size, by_oracle);
            }
            prop_assert_eq!(m.neighborhood_size(u, u64::from(m.diameter())), m.component_size(u));
            prop_assert_eq!(m.neighborhood_size(u, 0), 1);
            if u > 8 { break; }
        }
    }

    #[test]
    fn valuations_match_recomputation(host in small_host(), mask in prop::collection::vec(any::<bool>(), 28)) {
        let present: Vec<bool> = (0..host.edge_count()).map(|i| mask[i]).collect();
        let built = BuiltGraph::from_mask(&host, present.clone());
        let before = usage_rows(&floyd_warshall(host.n(), &built.edges()));
        for (idx, &e) in host.edges().iter().enumerate() {
            let mut toggled = present.clone();
            toggled[idx] = !toggled[idx];
            let edges: Vec<Edge> = host.edges().iter().zip(&toggled).filter(|(_, &p)| p).map(|(&e, _)| e).collect();
            let after = usage_rows(&floyd_warshall(host.n(), &edges));
            let v = edge_valuations(&host, &built, e).unwrap();
            for i in 0..host.n() {
                let expected = if present[idx] { &after[i] - &before[i] } else { &before[i] - &after[i] };
                prop_assert_eq!(&v.values[i], &expected, "edge {} player {}", e, i);
                prop_assert!(!v.values[i].below(&int(0)));
            }
        }
    }

    #[test]
    fn unilateral_costs_add_up(host in small_host(), picks in prop::collection::vec(any::<bool>(), 56)) {
        let mut choices = vec![Vec::new(); host.n()];
        for (idx, e) in host.edges().iter().enumerate() {
            if picks[2 * idx] { choices[e.lo()].push(e.hi()); }
            if picks[2 * idx + 1] { choices[e.hi()].push(e.lo()); }
        }
        let s = UnilateralStrategy::new(&host, choices).unwrap();
        let strategy = JointStrategy::Unilateral(s.clone());
        let built = realize_network(&host, &strategy).unwrap();
        let breakdown = social_cost(&host, &built, &strategy);
        let sum: Cost = breakdown.players.iter().map(|p| p.total()).sum();
        prop_assert_eq!(&sum, &breakdown.total());
        let expected = Cost::finite(host.alpha() * int(s.bought() as i64)) + built.distances().total_usage().cost();
        prop_assert_eq!(breakdown.total(), expected);
    }

    #[test]
    fn cooperative_creation_is_alpha_per_edge(host in small_host(), raw in prop::collection::vec((0usize..8, 0i64..6, 1i64..4), 0..40)) {
        let entries: Vec<_> = raw
            .into_iter()
            .filter(|_| host.edge_count() > 0)
            .enumerate()
            .map(|(i, (p, num, den))| {
                let e = host.edges()[i % host.edge_count()];
                (e, if p % 2 == 0 { e.lo() } else { p % host.n() }, ratio(num, den))
            })
            .collect();
        let payments = normalize_payments(&host, &PaymentMatrix::from_entries(&host, entries).unwrap());
        let strategy = JointStrategy::Cooperative(payments.clone());
        let built = realize_network(&host, &strategy).unwrap();
        let breakdown = social_cost(&host, &built, &strategy);
        prop_assert_eq!(breakdown.creation, Cost::finite(host.alpha() * int(built.edge_count() as i64)));
        // text form round-trips
        prop_assert_eq!(PaymentMatrix::parse(&host, &payments.to_text(&host)).unwrap(), payments);
    }

    #[test]
    fn more_payment_never_removes_edges(host in small_host(), extra in 0usize..28, amount in 1i64..5) {
        prop_assume!(host.edge_count() > 0);
        let base = PaymentMatrix::split_evenly(&host);
        let idx = extra % host.edge_count();
        let mut more = base.clone();
        let e = host.edges()[idx];
        more.set(&host, idx, e.lo(), base.get(idx, e.lo()) + int(amount)).unwrap();
        let before = base.realized(&host);
        let after = more.realized(&host);
        prop_assert!(before.iter().zip(&after).all(|(b, a)| !b || *a));
    }

    #[test]
    fn scaling_one_edge_keeps_network_and_verdict(host in small_host(), which in 0usize..28, factor in 2i64..5) {
        prop_assume!(host.edge_count() > 0);
        let payments = PaymentMatrix::split_evenly(&host);
        let idx = which % host.edge_count();
        let mut scaled = payments.clone();
        let entries: Vec<(usize, Rational)> = payments.entries(idx).map(|(p, a)| (p, a * int(factor))).collect();
        scaled.replace_edge(idx, entries);
        let normalized = normalize_payments(&host, &scaled);
        prop_assert_eq!(normalized.realized(&host), payments.realized(&host));
        prop_assert_eq!(
            verify_collaborative(&host, &normalized).verdict,
            verify_collaborative(&host, &payments).verdict
        );
    }

    #[test]
    fn exact_nash_implies_link_stable(host in small_host(), picks in prop::collection::vec(any::<bool>(), 28)) {
        let mut choices = vec![Vec::new(); host.n()];
        for (idx, e) in host.edges().iter().enumerate() {
            if picks[idx] { choices[e.lo()].push(e.hi()); } else { choices[e.hi()].push(e.lo()); }
        }
        let s = UnilateralStrategy::new(&host, choices).unwrap();
        let exact = verify_unilateral_nash(&host, &s, NashMode::Exact).unwrap();
        let local = verify_unilateral_nash(&host, &s, NashMode::Local).unwrap();
        prop_assert!(!exact.passed() || local.passed());
    }

    #[test]
    fn strategy_text_round_trips(host in small_host(), picks in prop::collection::vec(any::<bool>(), 56)) {
        let mut choices = vec![Vec::new(); host.n()];
        for (idx, e) in host.edges().iter().enumerate() {
            if picks[2 * idx] { choices[e.lo()].push(e.hi()); }
            if picks[2 * idx + 1] { choices[e.hi()].push(e.lo()); }
        }
        let s = UnilateralStrategy::new(&host, choices).unwrap();
        prop_assert_eq!(UnilateralStrategy::parse(&host, &s.to_text()).unwrap(), s);
    }

    #[test]
    fn lower_bound_never_exceeds_optimum(host in small_host()) {
        prop_assume!(host.graph().is_connected() && host.edge_count() <= 14);
        let lower = social_optimum_lower_bound(&host).unwrap();
        let exact = social_optimum_exact(&host, Model::Cooperative).unwrap();
        prop_assert!(lower <= exact.cost);
    }

    #[test]
    fn centers_are_separated_and_cover_the_sphere((n, edges) in graph_strategy(), u in 0usize..64, k in 0u64..3) {
        let host = HostGraph::new(n, &edges, int(1)).unwrap();
        let m = all_pairs_distances(host.graph());
        let u = u % n;
        let centers = greedy_center_points(&m, u, k);
        let radius = (4 * k + 3) as u32;
        for (i, &a) in centers.iter().enumerate() {
            prop_assert_eq!(m.get(u, a), Some(radius));
            for &b in &centers[i + 1..] {
                prop_assert!(m.get(a, b).is_none_or(|d| u64::from(d) > 2 * k));
            }
        }
        for v in (0..n).filter(|&v| m.get(u, v) == Some(radius)) {
            prop_assert!(centers.iter().any(|&c| matches!(m.get(c, v), Some(d) if u64::from(d) <= 2 * k)));
        }
    }
}

#[test]
fn player_cost_ignores_splits_on_edges_the_player_does_not_fund() {
    let host = HostGraph::complete(4, int(2));
    let e01 = Edge::new(0, 1);
    let e23 = Edge::new(2, 3);
    let mut a = PaymentMatrix::from_entries(&host, [(e01, 0, int(2))]).unwrap();
    let mut b = a.clone();
    a.replace_edge(host.edge_index(e23).unwrap(), [(2, int(1)), (3, int(1))]);
    b.replace_edge(
        host.edge_index(e23).unwrap(),
        [(2, ratio(1, 2)), (3, ratio(3, 2))],
    );
    let (sa, sb) = (JointStrategy::Cooperative(a), JointStrategy::Cooperative(b));
    let (ba, bb) = (
        realize_network(&host, &sa).unwrap(),
        realize_network(&host, &sb).unwrap(),
    );
    for i in [0, 1] {
        assert_eq!(
            ncg_core::game::player_cost(&host, &ba, &sa, i),
            ncg_core::game::player_cost(&host, &bb, &sb, i)
        );
    }
}
