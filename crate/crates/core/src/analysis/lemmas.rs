//! Empirical checkers for structural properties of equilibrium networks.
//!
//! Each checker returns a [`LemmaCheckReport`] listing the witnesses it
//! examined. Fractional radii are rounded up before neighborhood lookups and
//! irrational bounds are rounded upwards, so rounding can only weaken an
//! assertion.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cost::Cost;
use crate::game::{BuiltGraph, Model};
use crate::graph::{all_pairs_distances, DistanceMatrix, HostGraph};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Quantity {
    Int(u64),
    Real(f64),
    /// Exact rational in `p/q` form.
    Exact(String),
    /// Unreachable vertices make the observation unbounded.
    Unbounded(&'static str),
}

impl Quantity {
    fn unbounded() -> Self {
        Quantity::Unbounded("inf")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub u: usize,
    pub k: u64,
    pub bound: Quantity,
    pub observed: Quantity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaVerdict {
    Pass,
    Fail,
    /// Observations only; no bound is asserted.
    Informational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaCheckReport {
    pub lemma: String,
    pub witnesses: Vec<Witness>,
    pub verdict: LemmaVerdict,
    /// Witnesses whose observation exceeds the bound.
    #[serde(skip)]
    pub violations: usize,
}

impl LemmaCheckReport {
    fn asserted(lemma: &str, witnesses: Vec<Witness>, violations: usize) -> Self {
        LemmaCheckReport {
            lemma: lemma.to_string(),
            witnesses,
            verdict: if violations == 0 {
                LemmaVerdict::Pass
            } else {
                LemmaVerdict::Fail
            },
            violations,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == LemmaVerdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub const DOUBLING: &str = "doubling-2k+2a/n";
pub const DOUBLING_COOPERATIVE: &str = "doubling-2k+4sqrt(a/n)";
pub const STRETCH: &str = "stretch-3d+7a^(1/3)+5a^(1/3)d^(2/3)";
pub const STRETCH_UNILATERAL: &str = "stretch-unilateral-c(d+sqrt(a*d))";
pub const COST_BOUND: &str = "cost-bound-an+2sum(d)";

/// Smallest `k` with `|N_k(u)| > n/2`.
fn half_radius(dist: &DistanceMatrix, u: usize) -> Option<u64> {
    let n = dist.n();
    let mut finite: Vec<u32> = dist.row(u).flatten().collect();
    let needed = n / 2 + 1;
    if finite.len() < needed {
        return None;
    }
    let (_, kth, _) = finite.select_nth_unstable(needed - 1);
    Some(u64::from(*kth))
}

/// For every vertex `u` and the smallest `k` with `|N_k(u)| > n/2`,
/// asserts that the ball of radius `2k + ⌈2α/n⌉` covers all `n` vertices,
/// and, for the cooperative model, also the ball of radius
/// `2k + ⌈4 √(α/n)⌉`. Larger `k` only give weaker assertions.
///
/// Each witness records the radius as `bound` and the eccentricity of `u`
/// as `observed`.
pub fn check_doubling_lemma(
    built: &BuiltGraph,
    alpha: &Rational,
    model: Model,
) -> Vec<LemmaCheckReport> {
    let dist = built.distances();
    let n = dist.n();
    let mut reports = Vec::new();
    if n == 0 {
        return reports;
    }
    let size = rational::int(n as i64);
    let linear = rational::ceil_to_u64(&(alpha * rational::int(2) / &size));
    let root = rational::ceil_sqrt(&(alpha * rational::int(16) / &size));
    let mut variants = vec![(DOUBLING, linear)];
    if model == Model::Cooperative {
        variants.push((DOUBLING_COOPERATIVE, root));
    }
    for (name, slack) in variants {
        let mut witnesses = Vec::new();
        let mut violations = 0;
        for u in 0..n {
            let Some(k) = half_radius(dist, u) else {
                continue;
            };
            let radius = 2 * k + slack;
            let observed = match dist.eccentricity(u) {
                Some(ecc) => {
                    violations += usize::from(u64::from(ecc) > radius);
                    Quantity::Int(u64::from(ecc))
                }
                None => {
                    violations += 1;
                    Quantity::unbounded()
                }
            };
            witnesses.push(Witness {
                u,
                k,
                bound: Quantity::Int(radius),
                observed,
            });
        }
        reports.push(LemmaCheckReport::asserted(name, witnesses, violations));
    }
    reports
}

/// Multiplies by `1 + 1e-12`, far above the rounding error of the few f64
/// operations below, so the result bounds the exact value from above.
fn round_up(x: f64) -> f64 {
    x * (1.0 + 1e-12) + f64::MIN_POSITIVE
}

/// `3d + 7 α^{1/3} + 5 α^{1/3} d^{2/3}`, rounded upwards.
fn stretch_bound(alpha_cbrt: f64, d: u64) -> f64 {
    let d = d as f64;
    let d23 = round_up((d * d).cbrt());
    round_up(3.0 * d + 7.0 * alpha_cbrt + round_up(5.0 * alpha_cbrt * d23))
}

/// Worst network distance per host distance, together with a source
/// attaining it. `None` marks a pair the network does not connect.
fn worst_by_host_distance(
    host: &DistanceMatrix,
    network: &DistanceMatrix,
) -> BTreeMap<u64, (usize, Option<u32>)> {
    let mut worst: BTreeMap<u64, (usize, Option<u32>)> = BTreeMap::new();
    for u in 0..host.n() {
        for (dg, ds) in host.row(u).zip(network.row(u)) {
            let Some(dg) = dg else { continue };
            let entry = worst.entry(u64::from(dg)).or_insert((u, Some(0)));
            let worse = match (entry.1, ds) {
                (None, _) => false,
                (Some(_), None) => true,
                (Some(a), Some(b)) => b > a,
            };
            if worse {
                *entry = (u, ds);
            }
        }
    }
    worst
}

/// Asserts `d_{G_s}(u,v) <= 3 d_G(u,v) + 7 α^{1/3} + 5 α^{1/3} d_G(u,v)^{2/3}`
/// for all pairs. One witness per host distance `k` reports the worst pair.
pub fn check_distance_stretch(
    host: &HostGraph,
    built: &BuiltGraph,
    alpha: &Rational,
) -> LemmaCheckReport {
    let host_dist = all_pairs_distances(host.graph());
    let alpha_cbrt = round_up(rational::to_f64(alpha).cbrt());
    let mut witnesses = Vec::new();
    let mut violations = 0;
    for (k, (u, observed)) in worst_by_host_distance(&host_dist, built.distances()) {
        let bound = stretch_bound(alpha_cbrt, k);
        let observed = match observed {
            Some(d) => {
                violations += usize::from(f64::from(d) > bound);
                Quantity::Int(u64::from(d))
            }
            None => {
                violations += 1;
                Quantity::unbounded()
            }
        };
        witnesses.push(Witness {
            u,
            k,
            bound: Quantity::Real(bound),
            observed,
        });
    }
    LemmaCheckReport::asserted(STRETCH, witnesses, violations)
}

/// Unilateral counterpart of the stretch check. No constant is known, so
/// the report only lists `constant * (d + sqrt(α d))` next to the worst
/// observed distance per host distance `d`.
pub fn unilateral_stretch_profile(
    host: &HostGraph,
    built: &BuiltGraph,
    alpha: &Rational,
    constant: f64,
) -> LemmaCheckReport {
    let host_dist = all_pairs_distances(host.graph());
    let a = rational::to_f64(alpha);
    let witnesses = worst_by_host_distance(&host_dist, built.distances())
        .into_iter()
        .map(|(k, (u, observed))| {
            let d = k as f64;
            Witness {
                u,
                k,
                bound: Quantity::Real(constant * (d + (a * d).sqrt())),
                observed: observed
                    .map_or_else(Quantity::unbounded, |d| Quantity::Int(u64::from(d))),
            }
        })
        .collect();
    LemmaCheckReport {
        lemma: STRETCH_UNILATERAL.to_string(),
        witnesses,
        verdict: LemmaVerdict::Informational,
        violations: 0,
    }
}

/// Asserts `c(s) <= α n + 2 Σ_{u,v} d_{G_s}(u, v)` for a unilateral
/// equilibrium whose total cost is `social_cost`.
pub fn check_cost_bound_unilateral(
    built: &BuiltGraph,
    social_cost: &Cost,
    alpha: &Rational,
) -> LemmaCheckReport {
    let usage = built.distances().total_usage();
    let bound = Cost::finite(alpha * rational::int(built.n() as i64))
        + Cost::from_parts(usage.unreachable as i64 * 2, 0)
        + Cost::finite(rational::int(2 * usage.finite as i64));
    let violations = usize::from(*social_cost > bound);
    let show = |c: &Cost| {
        if c.is_finite() {
            Quantity::Exact(rational::format(&c.amount))
        } else {
            Quantity::unbounded()
        }
    };
    let witness = Witness {
        u: 0,
        k: 0,
        bound: show(&bound),
        observed: show(social_cost),
    };
    LemmaCheckReport::asserted(COST_BOUND, vec![witness], violations)
}

/// Greedy center points on the sphere `S` of radius `4k + 3` around `u`.
///
/// Scans `S` in ascending vertex order; each unmarked vertex becomes a
/// center and marks every member of `S` within `2k` of it. Centers are
/// pairwise more than `2k` apart and every member of `S` lies within `2k`
/// of some center.
pub fn greedy_center_points(dist: &DistanceMatrix, u: usize, k: u64) -> Vec<usize> {
    let sphere: Vec<usize> = dist
        .row(u)
        .enumerate()
        .filter(|(_, d)| *d == Some((4 * k + 3) as u32))
        .map(|(v, _)| v)
        .collect();
    let mut marked = vec![false; sphere.len()];
    let mut centers = Vec::new();
    for (i, &z) in sphere.iter().enumerate() {
        if marked[i] {
            continue;
        }
        centers.push(z);
        for (j, &w) in sphere.iter().enumerate() {
            if matches!(dist.get(z, w), Some(d) if u64::from(d) <= 2 * k) {
                marked[j] = true;
            }
        }
    }
    centers
}
