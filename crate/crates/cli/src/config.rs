//! Flat dotted-key configuration: defaults, optional config file, then
//! command-line overrides, resolved into typed parameters plus a provenance
//! listing embedded in every output.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use combcode::{EncodingParams, PhysicalParams};

/// Failures are split by exit code: usage/config problems exit 2, compute
/// problems exit 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "config error: {m}"),
            CliError::Compute(m) => write!(f, "compute error: {m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 3,
        }
    }
}

impl From<combcode::Error> for CliError {
    fn from(e: combcode::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

pub const ENCODING_KEYS: [&str; 6] = [
    "encoding.alpha",
    "encoding.beta",
    "encoding.r",
    "encoding.phi",
    "encoding.k",
    "encoding.tau",
];
pub const PHYSICAL_KEYS: [&str; 4] = [
    "physical.mass",
    "physical.omega_a",
    "physical.g0",
    "physical.lambda_c",
];
pub const OTHER_KEYS: [&str; 2] = ["truncation.tolerance", "threads"];

fn is_known(key: &str) -> bool {
    ENCODING_KEYS.contains(&key) || PHYSICAL_KEYS.contains(&key) || OTHER_KEYS.contains(&key)
}

/// Resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub encoding: EncodingParams,
    pub physical: Option<PhysicalParams>,
    pub tolerance: f64,
    /// `None` means automatic thread count.
    pub threads: Option<usize>,
    values: BTreeMap<String, String>,
}

impl RunConfig {
    /// Dotted key/value pairs of the resolved configuration, for provenance
    /// headers. Thread count is excluded: outputs are identical across
    /// thread-count choices and their provenance should be too.
    pub fn provenance(&self) -> Vec<(String, String)> {
        self.values
            .iter()
            .filter(|(k, _)| k.as_str() != "threads")
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    pub fn effective_threads(&self) -> usize {
        self.threads.unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        })
    }
}

fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "{}:{}: expected `key = value`, got {raw:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        let key = key.trim();
        if !is_known(key) {
            return Err(CliError::Usage(format!(
                "{}:{}: unknown config key {key:?}",
                path.display(),
                lineno + 1
            )));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn get_f64(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(s) => s
            .parse::<f64>()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("key {key:?}: invalid number {s:?}"))),
    }
}

/// Builds the run configuration from (in increasing precedence) defaults,
/// the optional config file, and `--key value` overrides given as dotted
/// key/value pairs.
pub fn resolve(
    config_path: Option<&Path>,
    overrides: &[(String, String)],
    threads_flag: Option<&str>,
) -> Result<RunConfig, CliError> {
    let mut map = BTreeMap::new();
    if let Some(path) = config_path {
        map = parse_config_file(path)?;
    }
    for (key, value) in overrides {
        if !is_known(key) {
            return Err(CliError::Usage(format!("unknown override key {key:?}")));
        }
        map.insert(key.clone(), value.clone());
    }

    let encoding = EncodingParams {
        alpha: get_f64(&map, "encoding.alpha")?.unwrap_or(1.0),
        beta: get_f64(&map, "encoding.beta")?.unwrap_or(0.0),
        r: get_f64(&map, "encoding.r")?.unwrap_or(1.5),
        phi: get_f64(&map, "encoding.phi")?.unwrap_or(0.0),
        k: get_f64(&map, "encoding.k")?.unwrap_or(0.5),
        tau: get_f64(&map, "encoding.tau")?.unwrap_or(std::f64::consts::PI),
    };
    encoding.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let physical_given: Vec<&&str> =
        PHYSICAL_KEYS.iter().filter(|k| map.contains_key(**k)).collect();
    let physical = if physical_given.is_empty() {
        None
    } else if physical_given.len() < PHYSICAL_KEYS.len() {
        let missing: Vec<&&str> =
            PHYSICAL_KEYS.iter().filter(|k| !map.contains_key(**k)).collect();
        return Err(CliError::Usage(format!(
            "incomplete physical section: missing {missing:?}"
        )));
    } else {
        let p = PhysicalParams {
            mass: get_f64(&map, "physical.mass")?.unwrap(),
            omega_a: get_f64(&map, "physical.omega_a")?.unwrap(),
            g0: get_f64(&map, "physical.g0")?.unwrap(),
            lambda_c: get_f64(&map, "physical.lambda_c")?.unwrap(),
        };
        p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Some(p)
    };

    let tolerance = get_f64(&map, "truncation.tolerance")?.unwrap_or(1e-10);
    if !(tolerance > 0.0 && tolerance <= 1e-4) {
        return Err(CliError::Usage(format!(
            "key \"truncation.tolerance\": must be in (0, 1e-4], got {tolerance}"
        )));
    }

    // threads: flag beats env beats config file beats auto
    let threads_src = threads_flag
        .map(str::to_string)
        .or_else(|| std::env::var("COMBCODE_THREADS").ok())
        .or_else(|| map.get("threads").cloned());
    let threads = match threads_src.as_deref() {
        None | Some("auto") => None,
        Some(s) => Some(s.parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(|| {
            CliError::Usage(format!("key \"threads\": expected `auto` or integer >= 1, got {s:?}"))
        })?),
    };

    // record the fully resolved values (not just what the user set)
    let mut values = BTreeMap::new();
    for (key, v) in [
        ("encoding.alpha", encoding.alpha),
        ("encoding.beta", encoding.beta),
        ("encoding.r", encoding.r),
        ("encoding.phi", encoding.phi),
        ("encoding.k", encoding.k),
        ("encoding.tau", encoding.tau),
        ("truncation.tolerance", tolerance),
    ] {
        values.insert(key.to_string(), format!("{v:.17e}"));
    }
    if let Some(p) = &physical {
        for (key, v) in [
            ("physical.mass", p.mass),
            ("physical.omega_a", p.omega_a),
            ("physical.g0", p.g0),
            ("physical.lambda_c", p.lambda_c),
        ] {
            values.insert(key.to_string(), format!("{v:.17e}"));
        }
    }
    values.insert(
        "threads".to_string(),
        threads.map(|n| n.to_string()).unwrap_or_else(|| "auto".to_string()),
    );

    Ok(RunConfig { encoding, physical, tolerance, threads, values })
}
