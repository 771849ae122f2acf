use std::collections::{BTreeSet, VecDeque};

use super::report::{Concept, EquilibriumReport, Violation};
use crate::cost::{Cost, Usage};
use crate::error::{Error, Result};
use crate::game::{BuiltGraph, UnilateralStrategy};
use crate::graph::{Graph, HostGraph};
use crate::rational;

/// Exact enumeration visits `2^degree` strategies per player.
pub const EXACT_DEGREE_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NashMode {
    /// Every alternative neighbor set of every player.
    Exact,
    /// Single-edge additions, drops and swaps only.
    Local,
}

/// The network formed by everyone except `player`, against which all of
/// `player`'s alternatives are evaluated.
struct Deviations<'a> {
    host: &'a HostGraph,
    player: usize,
    others: Graph,
}

impl<'a> Deviations<'a> {
    fn new(host: &'a HostGraph, strategy: &UnilateralStrategy, player: usize) -> Self {
        let without = strategy
            .with_player(host, player, [])
            .expect("empty strategy is always valid");
        let others = BuiltGraph::from_mask(host, without.realized(host))
            .graph()
            .clone();
        Deviations {
            host,
            player,
            others,
        }
    }

    /// `c_i` when the player buys exactly `bought`.
    fn cost(&self, bought: &[usize]) -> Cost {
        let n = self.others.n();
        let mut dist = vec![None; n];
        let mut queue = VecDeque::new();
        dist[self.player] = Some(0u32);
        queue.push_back(self.player);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap_or(0);
            let extra = if x == self.player { bought } else { &[][..] };
            for &y in self.others.neighbors(x).iter().chain(extra) {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        let usage: Usage = dist
            .iter()
            .map(|d| match d {
                Some(d) => Usage {
                    unreachable: 0,
                    finite: u64::from(*d),
                },
                None => Usage {
                    unreachable: 1,
                    finite: 0,
                },
            })
            .sum();
        Cost::finite(self.host.alpha() * rational::int(bought.len() as i64)) + usage.cost()
    }

    fn exact_best(&self) -> Result<(Cost, Vec<usize>)> {
        let options = self.host.neighbors(self.player);
        if options.len() > EXACT_DEGREE_CAP {
            return Err(Error::DegreeCap {
                player: self.player,
                degree: options.len(),
                cap: EXACT_DEGREE_CAP,
            });
        }
        let mut best: Option<(Cost, Vec<usize>)> = None;
        for mask in 0u32..(1 << options.len()) {
            let set: Vec<usize> = (0..options.len())
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| options[b])
                .collect();
            let cost = self.cost(&set);
            if best.as_ref().is_none_or(|(c, s)| better(&cost, &set, c, s)) {
                best = Some((cost, set));
            }
        }
        Ok(best.expect("the empty set is always a candidate"))
    }

    fn local_best(&self, current: &BTreeSet<usize>) -> (Cost, Vec<usize>) {
        let held: Vec<usize> = current.iter().copied().collect();
        let free: Vec<usize> = self
            .host
            .neighbors(self.player)
            .iter()
            .copied()
            .filter(|v| !current.contains(v))
            .collect();
        let mut candidates: Vec<Vec<usize>> = vec![held.clone()];
        for &d in &held {
            candidates.push(held.iter().copied().filter(|&x| x != d).collect());
        }
        for &a in &free {
            let mut with = held.clone();
            with.push(a);
            candidates.push(with);
            for &d in &held {
                let mut swap: Vec<usize> = held.iter().copied().filter(|&x| x != d).collect();
                swap.push(a);
                candidates.push(swap);
            }
        }
        let mut best: Option<(Cost, Vec<usize>)> = None;
        for mut set in candidates {
            set.sort_unstable();
            let cost = self.cost(&set);
            if best.as_ref().is_none_or(|(c, s)| better(&cost, &set, c, s)) {
                best = Some((cost, set));
            }
        }
        best.expect("the current strategy is always a candidate")
    }
}

/// Lower cost, then fewer purchases, then lexicographically smaller set.
fn better(cost: &Cost, set: &[usize], best_cost: &Cost, best_set: &[usize]) -> bool {
    (cost, set.len(), set) < (best_cost, best_set.len(), best_set)
}

pub fn verify_unilateral_nash(
    host: &HostGraph,
    strategy: &UnilateralStrategy,
    mode: NashMode,
) -> Result<EquilibriumReport> {
    if strategy.n() != host.n() {
        return Err(Error::StrategyShape {
            expected: host.n(),
            got: strategy.n(),
        });
    }
    if mode == NashMode::Exact {
        if let Some(player) = (0..host.n()).find(|&v| host.degree(v) > EXACT_DEGREE_CAP) {
            return Err(Error::DegreeCap {
                player,
                degree: host.degree(player),
                cap: EXACT_DEGREE_CAP,
            });
        }
    }
    let mut violations = Vec::new();
    for player in 0..host.n() {
        let deviations = Deviations::new(host, strategy, player);
        let current: Vec<usize> = strategy.of(player).iter().copied().collect();
        let current_cost = deviations.cost(&current);
        let (best_cost, best_set) = match mode {
            NashMode::Exact => deviations.exact_best()?,
            NashMode::Local => deviations.local_best(strategy.of(player)),
        };
        if best_cost < current_cost {
            violations.push(Violation::Deviation {
                player,
                from: current,
                to: best_set,
                gain: &current_cost - &best_cost,
            });
        }
    }
    let concept = match mode {
        NashMode::Exact => Concept::Nash,
        NashMode::Local => Concept::LinkStable,
    };
    Ok(EquilibriumReport::new(concept, violations))
}

/// A cost-minimizing neighbor set for `player` with everyone else fixed.
/// Ties go to the fewest purchases, then the lexicographically smallest set.
pub fn best_response(
    host: &HostGraph,
    strategy: &UnilateralStrategy,
    player: usize,
) -> Result<BTreeSet<usize>> {
    if player >= host.n() {
        return Err(Error::UnknownPlayer(player));
    }
    let (_, set) = Deviations::new(host, strategy, player).exact_best()?;
    Ok(set.into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestResponseRun {
    pub strategy: UnilateralStrategy,
    pub converged: bool,
    pub rounds: usize,
    pub moves: usize,
}

/// Round-robin best responses until a full round changes nothing or
/// `max_rounds` is exhausted. A player only moves when its cost strictly
/// drops.
pub fn best_response_dynamics(
    host: &HostGraph,
    init: &UnilateralStrategy,
    max_rounds: usize,
) -> Result<BestResponseRun> {
    let mut strategy = init.clone();
    let mut moves = 0;
    for round in 1..=max_rounds {
        let mut changed = false;
        for player in 0..host.n() {
            let deviations = Deviations::new(host, &strategy, player);
            let current: Vec<usize> = strategy.of(player).iter().copied().collect();
            let (best_cost, best_set) = deviations.exact_best()?;
            if best_cost < deviations.cost(&current) {
                strategy.set(host, player, best_set)?;
                changed = true;
                moves += 1;
            }
        }
        if !changed {
            return Ok(BestResponseRun {
                strategy,
                converged: true,
                rounds: round,
                moves,
            });
        }
    }
    Ok(BestResponseRun {
        strategy,
        converged: false,
        rounds: max_rounds,
        moves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::Verdict;
    use crate::graph::generators;
    use crate::rational::{int, ratio};

    fn path_in_triangle(alpha: crate::Rational) -> (HostGraph, UnilateralStrategy) {
        let host = HostGraph::complete(3, alpha);
        let s = UnilateralStrategy::new(&host, vec![vec![1], vec![2], vec![]]).unwrap();
        (host, s)
    }

    #[test]
    fn single_edge_owner_is_nash() {
        let host = HostGraph::new(2, &[(0, 1)], int(2)).unwrap();
        let s = UnilateralStrategy::new(&host, vec![vec![1], vec![]]).unwrap();
        assert!(verify_unilateral_nash(&host, &s, NashMode::Exact)
            .unwrap()
            .passed());
    }

    #[test]
    fn cheap_shortcut_breaks_path() {
        let (host, s) = path_in_triangle(ratio(1, 2));
        let report = verify_unilateral_nash(&host, &s, NashMode::Exact).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        assert_eq!(
            report.violations[0],
            Violation::Deviation {
                player: 0,
                from: vec![1],
                to: vec![1, 2],
                gain: Cost::finite(ratio(1, 2)),
            }
        );
        assert_eq!(
            verify_unilateral_nash(&host, &s, NashMode::Local)
                .unwrap()
                .verdict,
            Verdict::Fail
        );
    }

    #[test]
    fn expensive_links_keep_path() {
        let (host, s) = path_in_triangle(int(3));
        let report = verify_unilateral_nash(&host, &s, NashMode::Exact).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.concept, Concept::Nash);
        assert_eq!(
            verify_unilateral_nash(&host, &s, NashMode::Local)
                .unwrap()
                .concept,
            Concept::LinkStable
        );
    }

    #[test]
    fn best_response_examples() {
        let host = HostGraph::complete(3, ratio(1, 2));
        let s = UnilateralStrategy::new(&host, vec![vec![], vec![2], vec![]]).unwrap();
        assert_eq!(best_response(&host, &s, 0).unwrap(), BTreeSet::from([1, 2]));

        let pair = HostGraph::new(2, &[(0, 1)], int(10)).unwrap();
        assert_eq!(
            best_response(&pair, &UnilateralStrategy::empty(2), 0).unwrap(),
            BTreeSet::from([1])
        );

        let s = s.with_player(&host, 0, [1, 2]).unwrap();
        assert_eq!(best_response(&host, &s, 0).unwrap(), BTreeSet::from([1, 2]));
    }

    #[test]
    fn degree_cap_is_a_capability_error() {
        let host = HostGraph::new(18, &generators::star(18), int(1)).unwrap();
        let s = UnilateralStrategy::empty(18);
        assert!(matches!(
            verify_unilateral_nash(&host, &s, NashMode::Exact),
            Err(Error::DegreeCap {
                player: 0,
                degree: 17,
                ..
            })
        ));
        assert!(verify_unilateral_nash(&host, &s, NashMode::Local).is_ok());
        assert!(best_response(&host, &s, 0).is_err());
    }

    #[test]
    fn best_response_dynamics_reaches_nash() {
        let host = HostGraph::complete(5, int(3));
        let run = best_response_dynamics(&host, &UnilateralStrategy::empty(5), 50).unwrap();
        assert!(run.converged);
        assert!(
            verify_unilateral_nash(&host, &run.strategy, NashMode::Exact)
                .unwrap()
                .passed()
        );
    }
}
