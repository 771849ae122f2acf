use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ncg_cli::config::{load_host, ConfigPairs, ExperimentConfig, HostSource, OUTPUT_DIR_ENV};
use ncg_cli::experiment::{summary, write_networks, write_results};
use ncg_cli::{CliError, EXIT_NOT_CONVERGED};
use ncg_core::analysis::{
    check_cost_bound_unilateral, check_distance_stretch, check_doubling_lemma,
    generate_lower_bound_instance, price_of_anarchy, social_optimum_exact,
    social_optimum_lower_bound, unilateral_stretch_profile, worst_collaborative_equilibrium,
    LemmaVerdict, EXACT_EDGE_CAP,
};
use ncg_core::equilibrium::{verify_collaborative, verify_unilateral_nash, NashMode};
use ncg_core::game::{
    realize_network, social_cost, BuiltGraph, JointStrategy, Model, PaymentMatrix,
    UnilateralStrategy,
};
use ncg_core::graph::{parse_edge_list, HostGraph};
use ncg_core::rational::{self, Rational};
use ncg_core::Edge;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "ncg",
    version,
    about = "Network creation games: dynamics, equilibria and price of anarchy"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run dynamics at one link price and write results plus the final network.
    Simulate(ExperimentArgs),
    /// Run dynamics for every link price in a list.
    Sweep(ExperimentArgs),
    /// Check a strategy profile for equilibrium.
    Verify(VerifyArgs),
    /// Exact social optimum (or its lower bound for large hosts).
    Optimum(HostArgs),
    /// Generate a cycle-of-paths lower-bound instance.
    Construct(ConstructArgs),
    /// Run the structural lemma checks on a network.
    CheckLemmas(LemmaArgs),
}

/// Every flag overrides the config-file key of the same name.
#[derive(Args)]
struct ExperimentArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    host_file: Option<String>,
    #[arg(long)]
    host_complete: Option<String>,
    /// `name:key=value,...`, e.g. `random:n=10,p=0.3` or `lower-bound:k=2,l=350`.
    #[arg(long)]
    host_generator: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// Comma-separated, strictly increasing rationals, or `suggested`.
    #[arg(long)]
    alpha: Option<String>,
    /// `empty`, `host-complete`, `g2` or `file:PATH`.
    #[arg(long)]
    init: Option<String>,
    /// `round-robin`, `random` or `greedy`.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    max_steps: Option<String>,
    /// Comma-separated subset of `equilibrium,lemmas,poa`, or `none`.
    #[arg(long)]
    checks: Option<String>,
    #[arg(long)]
    stretch_constant: Option<String>,
    /// Defaults to $NCG_OUTPUT_DIR, then the working directory.
    #[arg(long)]
    output_dir: Option<String>,
    #[arg(long)]
    csv: Option<String>,
    #[arg(long)]
    json: Option<String>,
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig, CliError> {
        let mut pairs = match &self.config {
            Some(path) => ConfigPairs::load(path)?,
            None => ConfigPairs::default(),
        };
        let flags = [
            ("host_file", &self.host_file),
            ("host_complete", &self.host_complete),
            ("host_generator", &self.host_generator),
            ("model", &self.model),
            ("alpha", &self.alpha),
            ("init", &self.init),
            ("policy", &self.policy),
            ("seed", &self.seed),
            ("max_steps", &self.max_steps),
            ("checks", &self.checks),
            ("stretch_constant", &self.stretch_constant),
            ("output_dir", &self.output_dir),
            ("csv", &self.csv),
            ("json", &self.json),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                pairs.set(key, v.clone());
            }
        }
        ExperimentConfig::from_pairs(&pairs)
    }
}

#[derive(Args)]
struct HostArgs {
    /// Host graph in edge-list format.
    #[arg(
        long,
        conflicts_with = "host_complete",
        required_unless_present = "host_complete"
    )]
    host: Option<PathBuf>,
    /// Use the complete graph on this many vertices.
    #[arg(long)]
    host_complete: Option<usize>,
    #[arg(long)]
    alpha: String,
    #[arg(long, default_value = "cooperative")]
    model: Model,
}

impl HostArgs {
    fn load(&self) -> Result<HostGraph, CliError> {
        let source = match (&self.host, self.host_complete) {
            (Some(path), _) => HostSource::File(path.clone()),
            (None, Some(n)) => HostSource::Complete(n),
            (None, None) => unreachable!("clap requires a host"),
        };
        let alpha = rational::parse(&self.alpha).ok_or_else(|| CliError::Config {
            field: "alpha".into(),
            reason: format!("`{}` is not a rational number", self.alpha),
        })?;
        let (host, _) = load_host(&source, 0)?;
        Ok(host.with_alpha(alpha)?)
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    host: HostArgs,
    /// Payments (cooperative) or bought neighbor sets (unilateral).
    #[arg(long)]
    strategy: PathBuf,
    /// Unilateral deviation search: `exact` or `local`.
    #[arg(long, default_value = "exact")]
    mode: String,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    #[arg(long, env = OUTPUT_DIR_ENV, default_value = ".")]
    output_dir: PathBuf,
}

#[derive(Args)]
struct LemmaArgs {
    #[command(flatten)]
    host: HostArgs,
    /// The equilibrium network in edge-list format (a subgraph of the host).
    #[arg(long)]
    network: PathBuf,
    /// Unilateral strategy; enables the cost bound check.
    #[arg(long)]
    strategy: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    stretch_constant: f64,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json(value: &impl serde::Serialize) {
    emit(&(serde_json::to_string_pretty(value).expect("output serializes") + "\n"));
}

fn verdict_code(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn experiment(args: &ExperimentArgs, single: bool) -> Result<ExitCode, CliError> {
    let config = args.config()?;
    let prepared = config.prepare()?;
    if single && prepared.alphas.len() != 1 {
        return Err(CliError::Config {
            field: "alpha".into(),
            reason: "simulate takes a single value; use sweep for lists".into(),
        });
    }
    let result = ncg_cli::experiment::run_prepared(&config, &prepared)?;
    let mut written = write_results(&config, &result)?.files;
    if single {
        written.extend(write_networks(&config, &result)?.files);
    }
    emit(&summary(&result));
    for path in &written {
        eprintln!("wrote {}", path.display());
    }
    if !result.converged() {
        eprintln!("dynamics did not converge within the step budget");
        return Ok(ExitCode::from(EXIT_NOT_CONVERGED));
    }
    Ok(verdict_code(result.runs.iter().all(|r| r.checks_passed())))
}

fn verify(args: &VerifyArgs) -> Result<ExitCode, CliError> {
    let host = args.host.load()?;
    let text = read(&args.strategy)?;
    let report = match args.host.model {
        Model::Cooperative => verify_collaborative(&host, &PaymentMatrix::parse(&host, &text)?),
        Model::Unilateral => {
            let mode = match args.mode.as_str() {
                "exact" => NashMode::Exact,
                "local" => NashMode::Local,
                other => {
                    return Err(CliError::Config {
                        field: "mode".into(),
                        reason: format!("`{other}` is not exact or local"),
                    })
                }
            };
            verify_unilateral_nash(&host, &UnilateralStrategy::parse(&host, &text)?, mode)?
        }
    };
    print_json(&report);
    Ok(verdict_code(report.passed()))
}

fn optimum(args: &HostArgs) -> Result<ExitCode, CliError> {
    let host = args.load()?;
    let lower = social_optimum_lower_bound(&host)?;
    let mut out = json!({ "n": host.n(), "host_edges": host.edge_count(), "alpha": rational::format(host.alpha()), "lower_bound": lower });
    if host.edge_count() <= EXACT_EDGE_CAP {
        let opt = social_optimum_exact(&host, args.model)?;
        out["optimum"] = json!({ "cost": opt.cost, "edges": opt.edges });
        if args.model == Model::Cooperative {
            if let Some(worst) = worst_collaborative_equilibrium(&host)? {
                let poa: Rational = price_of_anarchy(&worst.cost, &opt.cost)?;
                out["worst_equilibrium"] = json!({ "cost": worst.cost, "edges": worst.edges });
                out["poa"] = json!(rational::format(&poa));
            }
        }
    }
    print_json(&out);
    Ok(ExitCode::SUCCESS)
}

fn construct(args: &ConstructArgs) -> Result<ExitCode, CliError> {
    let inst = generate_lower_bound_instance(args.k, args.l)?;
    let (host, g1, g2) = inst.to_edge_lists();
    std::fs::create_dir_all(&args.output_dir).map_err(|e| CliError::io(&args.output_dir, e))?;
    let files = [
        ("host.txt", host),
        ("g1.txt", g1),
        ("g2.txt", g2),
        ("g2-payments.txt", inst.g2_payments.to_text(&inst.host)),
    ];
    for (name, text) in &files {
        write(&args.output_dir.join(name), text)?;
    }
    let (c1, c2) = inst.costs();
    let ratio = price_of_anarchy(&c2, &c1)?;
    print_json(&json!({
        "k": inst.k,
        "l": inst.l,
        "n": inst.n(),
        "host_edges": inst.host.edge_count(),
        "alpha": rational::format(inst.alpha()),
        "cost_g1": c1,
        "cost_g2": c2,
        "ratio": rational::format(&ratio),
        "ratio_approx": rational::to_f64(&ratio),
    }));
    Ok(ExitCode::SUCCESS)
}

fn check_lemmas(args: &LemmaArgs) -> Result<ExitCode, CliError> {
    let host = args.host.load()?;
    let (n, edges) = parse_edge_list(&read(&args.network)?)?;
    if n != host.n() {
        return Err(CliError::Config {
            field: "network".into(),
            reason: format!("network has {n} vertices, host has {}", host.n()),
        });
    }
    let edges: Vec<Edge> = edges.into_iter().map(|(u, v)| Edge::new(u, v)).collect();
    let built = BuiltGraph::from_edges(&host, &edges)?;
    let alpha = host.alpha();
    let mut reports = check_doubling_lemma(&built, alpha, args.host.model);
    match args.host.model {
        Model::Cooperative => reports.push(check_distance_stretch(&host, &built, alpha)),
        Model::Unilateral => {
            if let Some(path) = &args.strategy {
                let strategy =
                    JointStrategy::Unilateral(UnilateralStrategy::parse(&host, &read(path)?)?);
                let built = realize_network(&host, &strategy)?;
                let cost = social_cost(&host, &built, &strategy).total();
                reports.push(check_cost_bound_unilateral(&built, &cost, alpha));
            }
            reports.push(unilateral_stretch_profile(
                &host,
                &built,
                alpha,
                args.stretch_constant,
            ));
        }
    }
    print_json(&reports);
    Ok(verdict_code(
        reports.iter().all(|r| r.verdict != LemmaVerdict::Fail),
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(args) => experiment(args, true),
        Command::Sweep(args) => experiment(args, false),
        Command::Verify(args) => verify(args),
        Command::Optimum(args) => optimum(args),
        Command::Construct(args) => construct(args),
        Command::CheckLemmas(args) => check_lemmas(args),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("ncg: {e}");
        ExitCode::from(e.exit_code())
    })
}
