//! Runs configured experiments: dynamics, verification, lemma checks and
//! price of anarchy, one α at a time.

use std::fmt::Write as _;
use std::path::PathBuf;

use ncg_core::analysis::{
    check_cost_bound_unilateral, check_distance_stretch, check_doubling_lemma, price_of_anarchy,
    social_optimum_exact, social_optimum_lower_bound, unilateral_stretch_profile, LemmaCheckReport,
    LemmaVerdict, EXACT_EDGE_CAP,
};
use ncg_core::equilibrium::{
    best_response_dynamics, run_dynamics, verify_collaborative, verify_unilateral_nash,
    EquilibriumReport, NashMode, ScanPolicy, EXACT_DEGREE_CAP,
};
use ncg_core::game::{
    realize_network, social_cost, BuiltGraph, JointStrategy, Model, PaymentMatrix,
    UnilateralStrategy,
};
use ncg_core::graph::{format_edge_list, HostGraph};
use ncg_core::rational::{self, Rational};
use ncg_core::Cost;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, PolicyKind, Prepared, PreparedInit};
use crate::CliError;

/// First line of every results CSV.
pub const CSV_VERSION_LINE: &str = "# ncg-results v1";

pub const CSV_COLUMNS: [&str; 14] = [
    "alpha_num",
    "alpha_den",
    "n",
    "edges_realized",
    "diameter",
    "social_cost_num",
    "social_cost_den",
    "optimum_basis",
    "poa_num",
    "poa_den",
    "converged",
    "steps",
    "lemma_verdicts",
    "model",
];

/// Default cooperative budget: this many edge examinations per host edge.
pub const STEPS_PER_EDGE: usize = 50;
/// Default unilateral budget in best-response rounds.
pub const DEFAULT_ROUNDS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimumBasis {
    Exact,
    /// The denominator is a lower bound, so the ratio upper-bounds the true one.
    LowerBound,
}

impl OptimumBasis {
    fn label(self) -> &'static str {
        match self {
            OptimumBasis::Exact => "exact",
            OptimumBasis::LowerBound => "lower-bound",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimumSummary {
    pub basis: OptimumBasis,
    pub cost: Cost,
    #[serde(serialize_with = "ser_rational")]
    pub poa: Rational,
}

fn ser_rational<S: serde::Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(v))
}

/// Everything measured for one α.
#[derive(Clone, Debug, Serialize)]
pub struct AlphaRun {
    #[serde(serialize_with = "ser_rational")]
    pub alpha: Rational,
    pub model: Model,
    pub n: usize,
    pub converged: bool,
    pub steps: usize,
    pub edges: Vec<(usize, usize)>,
    /// `None` when the network is disconnected.
    pub diameter: Option<u32>,
    pub social_cost: Cost,
    pub equilibrium: Option<EquilibriumReport>,
    pub optimum: Option<OptimumSummary>,
    pub lemmas: Vec<LemmaCheckReport>,
    /// Final strategy in its text format.
    #[serde(skip)]
    pub strategy_text: String,
    /// Step-by-step record of a cooperative run.
    #[serde(skip)]
    pub trajectory: Option<String>,
}

impl AlphaRun {
    /// `name:verdict` items joined by `;`, equilibrium first.
    pub fn verdicts(&self) -> String {
        let mut items = Vec::new();
        if let Some(r) = &self.equilibrium {
            items.push(format!(
                "equilibrium:{}",
                if r.passed() { "pass" } else { "fail" }
            ));
        }
        for l in &self.lemmas {
            let v = match l.verdict {
                LemmaVerdict::Pass => "pass",
                LemmaVerdict::Fail => "fail",
                LemmaVerdict::Informational => "info",
            };
            items.push(format!("{}:{v}", l.lemma));
        }
        if items.is_empty() {
            "-".to_string()
        } else {
            items.join(";")
        }
    }

    fn record(&self) -> Vec<String> {
        let (cost_num, cost_den) = if self.social_cost.is_finite() {
            (
                self.social_cost.amount.numer().to_string(),
                self.social_cost.amount.denom().to_string(),
            )
        } else {
            (self.social_cost.to_string(), String::new())
        };
        let (basis, poa_num, poa_den) = match &self.optimum {
            Some(o) => (
                o.basis.label().to_string(),
                o.poa.numer().to_string(),
                o.poa.denom().to_string(),
            ),
            None => ("none".to_string(), String::new(), String::new()),
        };
        vec![
            self.alpha.numer().to_string(),
            self.alpha.denom().to_string(),
            self.n.to_string(),
            self.edges.len().to_string(),
            self.diameter
                .map_or_else(|| "inf".to_string(), |d| d.to_string()),
            cost_num,
            cost_den,
            basis,
            poa_num,
            poa_den,
            self.converged.to_string(),
            self.steps.to_string(),
            self.verdicts(),
            self.model.to_string(),
        ]
    }

    /// Whether every asserted check passed.
    pub fn checks_passed(&self) -> bool {
        self.equilibrium
            .as_ref()
            .is_none_or(EquilibriumReport::passed)
            && self.lemmas.iter().all(|l| l.verdict != LemmaVerdict::Fail)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentResult {
    pub format: &'static str,
    pub runs: Vec<AlphaRun>,
}

impl ExperimentResult {
    pub fn converged(&self) -> bool {
        self.runs.iter().all(|r| r.converged)
    }

    /// The summary table: a version line, a header and one row per α.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS).expect("in-memory write");
        for run in &self.runs {
            w.write_record(run.record()).expect("in-memory write");
        }
        let body =
            String::from_utf8(w.into_inner().expect("in-memory write")).expect("csv is utf-8");
        format!("{CSV_VERSION_LINE}\n{body}")
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("results serialize");
        text.push('\n');
        text
    }
}

fn policy(config: &ExperimentConfig) -> ScanPolicy {
    match config.policy {
        PolicyKind::RoundRobin => ScanPolicy::RoundRobin,
        PolicyKind::Random => ScanPolicy::Random { seed: config.seed },
        PolicyKind::Greedy => ScanPolicy::Greedy,
    }
}

fn initial_payments(host: &HostGraph, init: &PreparedInit) -> Result<PaymentMatrix, CliError> {
    Ok(match init {
        PreparedInit::Empty => PaymentMatrix::empty(host),
        PreparedInit::HostComplete => PaymentMatrix::split_evenly(host),
        PreparedInit::G2(edges) => PaymentMatrix::single_owner(host, edges, |e| e.lo())?,
        PreparedInit::Payments(p) => p.clone(),
        PreparedInit::Unilateral(_) => unreachable!("validated against the model"),
    })
}

fn initial_strategy(host: &HostGraph, init: &PreparedInit) -> UnilateralStrategy {
    match init {
        PreparedInit::HostComplete => UnilateralStrategy::host_complete(host),
        PreparedInit::Unilateral(s) => s.clone(),
        _ => UnilateralStrategy::empty(host.n()),
    }
}

/// Runs the configured experiment at a single α.
pub fn run_alpha(
    config: &ExperimentConfig,
    prepared: &Prepared,
    alpha: &Rational,
) -> Result<AlphaRun, CliError> {
    let host = prepared.host.with_alpha(alpha.clone())?;
    let (strategy, built, converged, steps, trajectory, equilibrium) = match config.model {
        Model::Cooperative => {
            let init = initial_payments(&host, &prepared.init)?;
            let budget = config
                .max_steps
                .unwrap_or(STEPS_PER_EDGE * host.edge_count().max(1));
            let t = run_dynamics(&host, &init, policy(config), budget);
            let report = config
                .checks
                .equilibrium
                .then(|| verify_collaborative(&host, &t.payments));
            let dump = t.dump();
            let strategy = JointStrategy::Cooperative(t.payments);
            (
                strategy,
                t.built,
                t.converged,
                t.steps.len(),
                Some(dump),
                report,
            )
        }
        Model::Unilateral => {
            let init = initial_strategy(&host, &prepared.init);
            let run =
                best_response_dynamics(&host, &init, config.max_steps.unwrap_or(DEFAULT_ROUNDS))?;
            let report = if config.checks.equilibrium || config.checks.lemmas {
                let mode = if host.max_degree() <= EXACT_DEGREE_CAP {
                    NashMode::Exact
                } else {
                    NashMode::Local
                };
                Some(verify_unilateral_nash(&host, &run.strategy, mode)?)
            } else {
                None
            };
            let strategy = JointStrategy::Unilateral(run.strategy);
            let built = realize_network(&host, &strategy)?;
            (strategy, built, run.converged, run.rounds, None, report)
        }
    };
    let cost = social_cost(&host, &built, &strategy).total();
    let optimum = if config.checks.poa {
        let (basis, opt) = if host.edge_count() <= EXACT_EDGE_CAP {
            (
                OptimumBasis::Exact,
                social_optimum_exact(&host, config.model)?.cost,
            )
        } else {
            (OptimumBasis::LowerBound, social_optimum_lower_bound(&host)?)
        };
        match price_of_anarchy(&cost, &opt) {
            Ok(poa) => Some(OptimumSummary {
                basis,
                cost: opt,
                poa,
            }),
            // a disconnected outcome has no finite ratio
            Err(_) => None,
        }
    } else {
        None
    };
    let lemmas = if config.checks.lemmas {
        lemma_reports(
            config,
            &host,
            &built,
            &strategy,
            &cost,
            equilibrium.as_ref(),
        )
    } else {
        Vec::new()
    };
    let dist = built.distances();
    Ok(AlphaRun {
        alpha: alpha.clone(),
        model: config.model,
        n: host.n(),
        converged,
        steps,
        edges: built.edges().iter().map(|e| (e.lo(), e.hi())).collect(),
        diameter: dist.is_connected().then(|| dist.diameter()),
        social_cost: cost,
        equilibrium: equilibrium.filter(|_| config.checks.equilibrium),
        optimum,
        lemmas,
        strategy_text: match &strategy {
            JointStrategy::Cooperative(p) => p.to_text(&host),
            JointStrategy::Unilateral(s) => s.to_text(),
        },
        trajectory,
    })
}

fn lemma_reports(
    config: &ExperimentConfig,
    host: &HostGraph,
    built: &BuiltGraph,
    strategy: &JointStrategy,
    cost: &Cost,
    equilibrium: Option<&EquilibriumReport>,
) -> Vec<LemmaCheckReport> {
    let alpha = host.alpha();
    let mut reports = check_doubling_lemma(built, alpha, config.model);
    match strategy {
        JointStrategy::Cooperative(_) => reports.push(check_distance_stretch(host, built, alpha)),
        JointStrategy::Unilateral(_) => {
            // the cost bound presumes an exactly verified Nash equilibrium
            if equilibrium
                .is_some_and(|r| r.passed() && r.concept == ncg_core::equilibrium::Concept::Nash)
            {
                reports.push(check_cost_bound_unilateral(built, cost, alpha));
            }
            reports.push(unilateral_stretch_profile(
                host,
                built,
                alpha,
                config.stretch_constant,
            ));
        }
    }
    reports
}

/// Runs every α of a validated config, in parallel, keeping rows in α order.
pub fn run_prepared(
    config: &ExperimentConfig,
    prepared: &Prepared,
) -> Result<ExperimentResult, CliError> {
    let runs = prepared
        .alphas
        .par_iter()
        .map(|alpha| run_alpha(config, prepared, alpha))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExperimentResult {
        format: "ncg-results v1",
        runs,
    })
}

/// Validates `config`, then runs it. No files are touched.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, CliError> {
    let prepared = config.prepare()?;
    run_prepared(config, &prepared)
}

/// [`run_experiment`] for α lists, rejecting an empty list.
pub fn sweep_alpha(config: &ExperimentConfig) -> Result<ExperimentResult, CliError> {
    let prepared = config.prepare()?;
    if prepared.alphas.is_empty() {
        return Err(CliError::Config {
            field: "alpha".into(),
            reason: "empty list".into(),
        });
    }
    run_prepared(config, &prepared)
}

/// Files written for a finished experiment.
#[derive(Debug, Default)]
pub struct Written {
    pub files: Vec<PathBuf>,
}

fn write(path: &PathBuf, contents: &str, written: &mut Written) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))?;
    written.files.push(path.clone());
    Ok(())
}

fn alpha_tag(alpha: &Rational) -> String {
    format!("{}_{}", alpha.numer(), alpha.denom())
}

/// Writes the CSV and JSON results. Runs that did not converge also get
/// their trajectory (cooperative) or final strategy (unilateral) dumped.
pub fn write_results(
    config: &ExperimentConfig,
    result: &ExperimentResult,
) -> Result<Written, CliError> {
    let mut written = Written::default();
    write(&config.csv, &result.to_csv(), &mut written)?;
    write(&config.json, &result.to_json(), &mut written)?;
    for run in result.runs.iter().filter(|r| !r.converged) {
        let path = config
            .output_dir
            .join(format!("trajectory-alpha-{}.txt", alpha_tag(&run.alpha)));
        let body = run.trajectory.as_deref().unwrap_or(&run.strategy_text);
        write(&path, body, &mut written)?;
    }
    Ok(written)
}

/// Writes the final strategy and realized network of each run.
pub fn write_networks(
    config: &ExperimentConfig,
    result: &ExperimentResult,
) -> Result<Written, CliError> {
    let mut written = Written::default();
    for run in &result.runs {
        let tag = alpha_tag(&run.alpha);
        let edges: Vec<_> = run
            .edges
            .iter()
            .map(|&(u, v)| ncg_core::Edge::new(u, v))
            .collect();
        let header = [format!(
            "realized network, alpha={}",
            rational::format(&run.alpha)
        )];
        write(
            &config.output_dir.join(format!("network-alpha-{tag}.txt")),
            &format_edge_list(run.n, &edges, &header),
            &mut written,
        )?;
        write(
            &config.output_dir.join(format!("strategy-alpha-{tag}.txt")),
            &run.strategy_text,
            &mut written,
        )?;
    }
    Ok(written)
}

/// Human-readable summary, one line per α.
pub fn summary(result: &ExperimentResult) -> String {
    let mut out = String::new();
    for run in &result.runs {
        let _ = write!(
            out,
            "alpha={} edges={} diameter={} cost={} converged={} steps={}",
            rational::format(&run.alpha),
            run.edges.len(),
            run.diameter
                .map_or_else(|| "inf".to_string(), |d| d.to_string()),
            run.social_cost,
            run.converged,
            run.steps
        );
        if let Some(o) = &run.optimum {
            let _ = write!(
                out,
                " poa={} ({})",
                rational::format(&o.poa),
                o.basis.label()
            );
        }
        let _ = writeln!(out, " checks={}", run.verdicts());
    }
    out
}
