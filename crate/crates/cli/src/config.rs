//! Flat `key = value` experiment configuration.
//!
//! A config is a bag of string pairs. Files and command-line flags both
//! produce pairs (flags win), and [`ExperimentConfig::from_pairs`] turns the
//! merged bag into a validated config. Nothing is written to disk until a
//! config has been fully validated and its inputs loaded.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ncg_core::analysis::{generate_lower_bound_instance, suggested_alpha, LowerBoundInstance};
use ncg_core::game::{Model, PaymentMatrix, UnilateralStrategy};
use ncg_core::graph::{generators, parse_edge_list, HostGraph};
use ncg_core::rational::{self, Rational};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "NCG_OUTPUT_DIR";

pub const KEYS: &[&str] = &[
    "host_file",
    "host_complete",
    "host_generator",
    "model",
    "alpha",
    "init",
    "policy",
    "seed",
    "max_steps",
    "checks",
    "stretch_constant",
    "output_dir",
    "csv",
    "json",
];

fn invalid(field: &str, reason: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

/// Merged `key = value` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigPairs(BTreeMap<String, String>);

impl ConfigPairs {
    /// Parses a config file body. Blank lines and `#` comments are skipped;
    /// unknown and repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut pairs = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(invalid(
                    "config",
                    format!("line {}: expected `key = value`", lineno + 1),
                ));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(invalid(key, format!("line {}: unknown key", lineno + 1)));
            }
            if pairs
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(invalid(
                    key,
                    format!("line {}: given more than once", lineno + 1),
                ));
            }
        }
        Ok(ConfigPairs(pairs))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid("config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets `key`, replacing any earlier value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key), "unknown key {key}");
        self.0.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum HostSource {
    File(PathBuf),
    Complete(usize),
    Generator {
        name: String,
        params: Vec<(String, String)>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphaSpec {
    List(Vec<Rational>),
    /// The lower-bound family's `12 n k^2`.
    Suggested,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InitSpec {
    Empty,
    HostComplete,
    File(PathBuf),
    /// The expensive network of a lower-bound instance, single owners.
    G2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyKind {
    RoundRobin,
    Random,
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checks {
    pub equilibrium: bool,
    pub lemmas: bool,
    pub poa: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            equilibrium: true,
            lemmas: true,
            poa: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub host: HostSource,
    pub model: Model,
    pub alpha: AlphaSpec,
    pub init: InitSpec,
    pub policy: PolicyKind,
    pub seed: u64,
    /// Edge examinations for cooperative dynamics, best-response rounds for
    /// unilateral ones. `None` means the default budget.
    pub max_steps: Option<usize>,
    pub checks: Checks,
    /// Constant of the informational unilateral stretch profile.
    pub stretch_constant: f64,
    pub output_dir: PathBuf,
    pub csv: PathBuf,
    pub json: PathBuf,
}

fn parse_num<T: std::str::FromStr>(field: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| invalid(field, format!("`{value}`: {e}")))
}

fn parse_alpha(value: &str) -> Result<AlphaSpec, CliError> {
    if value.trim() == "suggested" {
        return Ok(AlphaSpec::Suggested);
    }
    let mut list = Vec::new();
    for part in value.split(',').map(str::trim) {
        let a = rational::parse(part)
            .ok_or_else(|| invalid("alpha", format!("`{part}` is not a rational number")))?;
        if a < rational::int(0) {
            return Err(invalid("alpha", format!("`{part}` is negative")));
        }
        if list.last().is_some_and(|prev| &a <= prev) {
            return Err(invalid("alpha", "values must be strictly increasing"));
        }
        list.push(a);
    }
    if list.is_empty() || value.trim().is_empty() {
        return Err(invalid("alpha", "empty list"));
    }
    Ok(AlphaSpec::List(list))
}

fn parse_generator(value: &str) -> Result<HostSource, CliError> {
    let (name, rest) = value.split_once(':').unwrap_or((value, ""));
    let mut params = Vec::new();
    for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| {
            invalid(
                "host_generator",
                format!("parameter `{part}` is not `key=value`"),
            )
        })?;
        params.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(HostSource::Generator {
        name: name.trim().to_string(),
        params,
    })
}

impl ExperimentConfig {
    pub fn from_pairs(pairs: &ConfigPairs) -> Result<Self, CliError> {
        let sources: Vec<_> = ["host_file", "host_complete", "host_generator"]
            .into_iter()
            .filter(|k| pairs.get(k).is_some())
            .collect();
        let host = match sources.as_slice() {
            [] => {
                return Err(invalid(
                    "host",
                    "missing; give one of host_file, host_complete, host_generator",
                ))
            }
            [_, _, ..] => {
                return Err(invalid(
                    "host",
                    format!(
                        "exactly one host source allowed, got {}",
                        sources.join(", ")
                    ),
                ))
            }
            ["host_file"] => HostSource::File(PathBuf::from(pairs.get("host_file").unwrap())),
            ["host_complete"] => HostSource::Complete(parse_num(
                "host_complete",
                pairs.get("host_complete").unwrap(),
            )?),
            _ => parse_generator(pairs.get("host_generator").unwrap())?,
        };
        let model = match pairs.get("model") {
            None => Model::Cooperative,
            Some(m) => m
                .parse()
                .map_err(|_| invalid("model", format!("`{m}` is not unilateral or cooperative")))?,
        };
        let alpha = parse_alpha(
            pairs
                .get("alpha")
                .ok_or_else(|| invalid("alpha", "missing"))?,
        )?;
        let init = match pairs.get("init").unwrap_or("empty") {
            "empty" => InitSpec::Empty,
            "host-complete" => InitSpec::HostComplete,
            "g2" => InitSpec::G2,
            other => match other.strip_prefix("file:") {
                Some(path) if !path.is_empty() => InitSpec::File(PathBuf::from(path)),
                _ => {
                    return Err(invalid(
                        "init",
                        format!("`{other}` is not empty, host-complete, g2 or file:PATH"),
                    ))
                }
            },
        };
        let policy = match pairs.get("policy").unwrap_or("round-robin") {
            "round-robin" => PolicyKind::RoundRobin,
            "random" => PolicyKind::Random,
            "greedy" => PolicyKind::Greedy,
            other => {
                return Err(invalid(
                    "policy",
                    format!("`{other}` is not round-robin, random or greedy"),
                ))
            }
        };
        if model == Model::Unilateral && policy != PolicyKind::RoundRobin {
            return Err(invalid(
                "policy",
                "unilateral best-response dynamics are round-robin only",
            ));
        }
        if model == Model::Unilateral && init == InitSpec::G2 {
            return Err(invalid("init", "g2 is a cooperative payment profile"));
        }
        let seed = pairs.get("seed").map_or(Ok(0), |s| parse_num("seed", s))?;
        let max_steps = pairs
            .get("max_steps")
            .map(|s| parse_num("max_steps", s))
            .transpose()?;
        let checks = match pairs.get("checks") {
            None => Checks::default(),
            Some(list) => {
                let mut checks = Checks {
                    equilibrium: false,
                    lemmas: false,
                    poa: false,
                };
                for item in list
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty() && *s != "none")
                {
                    match item {
                        "equilibrium" => checks.equilibrium = true,
                        "lemmas" => checks.lemmas = true,
                        "poa" => checks.poa = true,
                        other => return Err(invalid("checks", format!("unknown check `{other}`"))),
                    }
                }
                checks
            }
        };
        let stretch_constant: f64 = pairs
            .get("stretch_constant")
            .map_or(Ok(1.0), |s| parse_num("stretch_constant", s))?;
        if !(stretch_constant.is_finite() && stretch_constant > 0.0) {
            return Err(invalid("stretch_constant", "must be a positive number"));
        }
        let output_dir = match pairs.get("output_dir") {
            Some(dir) => PathBuf::from(dir),
            None => {
                std::env::var_os(OUTPUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from)
            }
        };
        let csv = pairs
            .get("csv")
            .map_or_else(|| output_dir.join("results.csv"), PathBuf::from);
        let json = pairs
            .get("json")
            .map_or_else(|| output_dir.join("results.json"), PathBuf::from);
        Ok(ExperimentConfig {
            host,
            model,
            alpha,
            init,
            policy,
            seed,
            max_steps,
            checks,
            stretch_constant,
            output_dir,
            csv,
            json,
        })
    }

    /// Loads the host and init inputs and resolves the α list.
    pub fn prepare(&self) -> Result<Prepared, CliError> {
        let (host, instance) = load_host(&self.host, self.seed)?;
        if !host.graph().is_connected() {
            return Err(invalid("host", "host graph is disconnected"));
        }
        let alphas = match &self.alpha {
            AlphaSpec::List(list) => list.clone(),
            AlphaSpec::Suggested => match &instance {
                Some(inst) => vec![suggested_alpha(inst.k, inst.n())],
                None => {
                    return Err(invalid(
                        "alpha",
                        "`suggested` needs the lower-bound host generator",
                    ))
                }
            },
        };
        let init = match (&self.init, self.model) {
            (InitSpec::Empty, _) => PreparedInit::Empty,
            (InitSpec::HostComplete, _) => PreparedInit::HostComplete,
            (InitSpec::G2, _) => match &instance {
                Some(inst) => PreparedInit::G2(inst.g2.clone()),
                None => return Err(invalid("init", "g2 needs the lower-bound host generator")),
            },
            (InitSpec::File(path), model) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| invalid("init", format!("{}: {e}", path.display())))?;
                let reason =
                    |e: ncg_core::Error| invalid("init", format!("{}: {e}", path.display()));
                match model {
                    Model::Unilateral => PreparedInit::Unilateral(
                        UnilateralStrategy::parse(&host, &text).map_err(reason)?,
                    ),
                    Model::Cooperative => {
                        PreparedInit::Payments(PaymentMatrix::parse(&host, &text).map_err(reason)?)
                    }
                }
            }
        };
        Ok(Prepared { host, alphas, init })
    }
}

fn param<T: std::str::FromStr>(
    params: &[(String, String)],
    key: &str,
) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    params
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| {
            v.parse()
                .map_err(|e| invalid("host_generator", format!("{key}=`{v}`: {e}")))
        })
        .transpose()
}

fn required<T: std::str::FromStr>(params: &[(String, String)], key: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    param(params, key)?.ok_or_else(|| invalid("host_generator", format!("missing parameter {key}")))
}

/// Builds the host (priced at 1; callers reprice per α). The lower-bound
/// generator also returns its instance.
pub fn load_host(
    source: &HostSource,
    seed: u64,
) -> Result<(HostGraph, Option<LowerBoundInstance>), CliError> {
    let one = rational::int(1);
    fn host_err(field: &str) -> impl Fn(ncg_core::Error) -> CliError + '_ {
        move |e| invalid(field, e.to_string())
    }
    match source {
        HostSource::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| invalid("host_file", format!("{}: {e}", path.display())))?;
            let (n, edges) = parse_edge_list(&text).map_err(host_err("host_file"))?;
            Ok((
                HostGraph::new(n, &edges, one).map_err(host_err("host_file"))?,
                None,
            ))
        }
        HostSource::Complete(n) => Ok((HostGraph::complete(*n, one), None)),
        HostSource::Generator { name, params } => {
            let known: &[&str] = match name.as_str() {
                "lower-bound" => &["k", "l"],
                "random" => &["n", "p", "seed"],
                "complete" | "path" | "cycle" | "star" => &["n"],
                other => {
                    return Err(invalid(
                        "host_generator",
                        format!("unknown generator `{other}`"),
                    ))
                }
            };
            if let Some((k, _)) = params.iter().find(|(k, _)| !known.contains(&k.as_str())) {
                return Err(invalid(
                    "host_generator",
                    format!("{name} takes no parameter {k}"),
                ));
            }
            if name == "lower-bound" {
                let inst =
                    generate_lower_bound_instance(required(params, "k")?, required(params, "l")?)
                        .map_err(host_err("host_generator"))?;
                let host = inst
                    .host
                    .with_alpha(one)
                    .map_err(host_err("host_generator"))?;
                return Ok((host, Some(inst)));
            }
            let n: usize = required(params, "n")?;
            let edges = match name.as_str() {
                "complete" => generators::complete(n),
                "path" => generators::path(n),
                "cycle" => generators::cycle(n),
                "star" => generators::star(n),
                _ => {
                    let p: f64 = required(params, "p")?;
                    if !(p > 0.0 && p <= 1.0) {
                        return Err(invalid("host_generator", "p must lie in (0, 1]"));
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(param(params, "seed")?.unwrap_or(seed));
                    generators::random_connected(n, p, &mut rng)
                }
            };
            Ok((
                HostGraph::new(n, &edges, one).map_err(host_err("host_generator"))?,
                None,
            ))
        }
    }
}

/// Inputs of a validated config.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub host: HostGraph,
    pub alphas: Vec<Rational>,
    pub init: PreparedInit,
}

#[derive(Clone, Debug)]
pub enum PreparedInit {
    Empty,
    HostComplete,
    G2(Vec<ncg_core::Edge>),
    Payments(PaymentMatrix),
    Unilateral(UnilateralStrategy),
}
