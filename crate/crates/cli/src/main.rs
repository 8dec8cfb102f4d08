//! Command-line front end: loads a dotted-key config, runs the numerical
//! operations, and emits reproducible CSV/JSON artifacts.

mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use combcode::comb_state::{codeword, psi0, psi_pm, CodewordLabel};
use combcode::dynamics::window_acceptance;
use combcode::error_analysis::{fit_exponential, p_max, sweep, SweepPoint};
use combcode::numerics::truncation_plan;
use combcode::physical_limits::validate_regime;
use combcode::{EncodingParams, TruncationPolicy};

use config::{CliError, RunConfig};

#[derive(Parser)]
#[command(
    name = "combcode",
    about = "Comb-state codeword wavefunctions, intrinsic error probabilities, and trap limits",
    version
)]
struct Cli {
    /// Flat dotted-key config file (`encoding.alpha = 1.8` per line).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Worker threads: an integer or `auto` (default; COMBCODE_THREADS
    /// overrides the default).
    #[arg(long, global = true)]
    threads: Option<String>,

    #[arg(long = "encoding.alpha", global = true, value_name = "REAL", allow_negative_numbers = true)]
    encoding_alpha: Option<f64>,
    #[arg(long = "encoding.beta", global = true, value_name = "REAL", allow_negative_numbers = true)]
    encoding_beta: Option<f64>,
    #[arg(long = "encoding.r", global = true, value_name = "REAL", allow_negative_numbers = true)]
    encoding_r: Option<f64>,
    #[arg(long = "encoding.phi", global = true, value_name = "REAL", allow_negative_numbers = true)]
    encoding_phi: Option<f64>,
    #[arg(long = "encoding.k", global = true, value_name = "REAL", allow_negative_numbers = true)]
    encoding_k: Option<f64>,
    #[arg(long = "encoding.tau", global = true, value_name = "REAL", allow_negative_numbers = true)]
    encoding_tau: Option<f64>,
    #[arg(long = "physical.mass", global = true, value_name = "REAL", allow_negative_numbers = true)]
    physical_mass: Option<f64>,
    #[arg(long = "physical.omega_a", global = true, value_name = "REAL", allow_negative_numbers = true)]
    physical_omega_a: Option<f64>,
    #[arg(long = "physical.g0", global = true, value_name = "REAL", allow_negative_numbers = true)]
    physical_g0: Option<f64>,
    #[arg(long = "physical.lambda_c", global = true, value_name = "REAL", allow_negative_numbers = true)]
    physical_lambda_c: Option<f64>,
    #[arg(long = "truncation.tolerance", global = true, value_name = "REAL", allow_negative_numbers = true)]
    truncation_tolerance: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Codeword wavefunction samples (CSV `coordinate,re,im,abs2`).
    Wavefunction {
        /// Codeword: 0, 1, + or -.
        #[arg(long)]
        label: String,
        /// Axis: x (position) or p (momentum).
        #[arg(long, value_parser = ["x", "p"])]
        axis: String,
    },
    /// Shift-error probability report (JSON).
    ErrorReport,
    /// p_p versus alpha sweep (CSV plus exponential-fit JSON sidecar).
    Sweep {
        #[arg(long, value_name = "REAL", allow_negative_numbers = true)]
        alpha_lo: f64,
        #[arg(long, value_name = "REAL", allow_negative_numbers = true)]
        alpha_hi: f64,
        #[arg(long, value_name = "N")]
        n_points: usize,
        /// Squeezing value; repeatable for overlapping curves.
        #[arg(long = "r", value_name = "REAL", allow_negative_numbers = true)]
        r_list: Vec<f64>,
    },
    /// Trap-derived coupling and parameter ceilings (JSON).
    Limits,
    /// Homodyne acceptance-window trade-off (JSON).
    Window {
        #[arg(long, value_name = "REAL", allow_negative_numbers = true)]
        x_lo: f64,
        #[arg(long, value_name = "REAL", allow_negative_numbers = true)]
        x_hi: f64,
    },
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_header(cfg: &RunConfig) -> String {
    let mut out = String::new();
    for (k, v) in cfg.provenance() {
        out.push_str(&format!("# {k} = {v}\n"));
    }
    out
}

fn config_json(cfg: &RunConfig) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = cfg
        .provenance()
        .into_iter()
        .map(|(k, v)| (k, serde_json::Value::String(v)))
        .collect();
    serde_json::Value::Object(map)
}

fn plan(cfg: &RunConfig) -> Result<TruncationPolicy, CliError> {
    Ok(truncation_plan(
        cfg.encoding.alpha,
        cfg.encoding.r,
        cfg.encoding.beta,
        cfg.tolerance,
    )?)
}

fn write_output(out: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Compute(format!("stdout: {e}")))
        }
    }
}

fn cmd_wavefunction(
    cfg: &RunConfig,
    label: &str,
    axis: &str,
    format: &str,
) -> Result<String, CliError> {
    let lbl = match label {
        "0" | "zero" => CodewordLabel::Zero,
        "1" | "one" => CodewordLabel::One,
        "+" | "plus" => CodewordLabel::Plus,
        "-" | "minus" => CodewordLabel::Minus,
        other => return Err(CliError::Usage(format!("invalid codeword label {other:?}"))),
    };
    let trunc = plan(cfg)?;
    let sqrt2 = 2.0f64.sqrt();
    let wf = match (axis, lbl) {
        ("x", _) => codeword(lbl, &cfg.encoding, &trunc)?,
        ("p", CodewordLabel::Zero) => psi0(&cfg.encoding, &trunc)?,
        ("p", CodewordLabel::One) => {
            // the shifted codeword in momentum is the base form at beta + 1
            let shifted = EncodingParams { beta: cfg.encoding.beta + 1.0, ..cfg.encoding };
            let trunc = truncation_plan(shifted.alpha, shifted.r, shifted.beta, cfg.tolerance)?;
            psi0(&shifted, &trunc)?
        }
        ("p", CodewordLabel::Plus) => psi_pm(true, &cfg.encoding, &trunc)?,
        ("p", CodewordLabel::Minus) => psi_pm(false, &cfg.encoding, &trunc)?,
        _ => unreachable!("axis is validated by clap"),
    };
    // plotted coordinates: x/sqrt2 on the position axis, sqrt2*p on momentum
    let coord = |i: usize| {
        let c = wf.coord(i);
        if axis == "x" { c / sqrt2 } else { sqrt2 * c }
    };
    if format == "json" {
        let rows: Vec<serde_json::Value> = (0..wf.len())
            .map(|i| {
                let a = wf.amplitudes[i];
                json!([coord(i), a.re, a.im, a.norm_sqr()])
            })
            .collect();
        let doc = json!({
            "config": config_json(cfg),
            "label": label,
            "axis": axis,
            "columns": ["coordinate", "re", "im", "abs2"],
            "rows": rows,
        });
        return Ok(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()));
    }
    let mut out = csv_header(cfg);
    out.push_str(&format!("# label = {label}\n# axis = {axis}\n"));
    out.push_str("coordinate,re,im,abs2\n");
    for i in 0..wf.len() {
        let a = wf.amplitudes[i];
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt17(coord(i)),
            fmt17(a.re),
            fmt17(a.im),
            fmt17(a.norm_sqr())
        ));
    }
    Ok(out)
}

fn cmd_error_report(cfg: &RunConfig) -> Result<String, CliError> {
    let trunc = plan(cfg)?;
    let report = p_max(&cfg.encoding, &trunc)?;
    let violations = match &cfg.physical {
        Some(phys) => {
            let rep = validate_regime(phys, &cfg.encoding)?;
            serde_json::to_value(rep.violations).unwrap()
        }
        None => serde_json::Value::Array(vec![]),
    };
    let doc = json!({
        "config": config_json(cfg),
        "report": serde_json::to_value(&report).unwrap(),
        "violations": violations,
    });
    Ok(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
}

fn cmd_sweep(
    cfg: &RunConfig,
    alpha_lo: f64,
    alpha_hi: f64,
    n_points: usize,
    r_list: &[f64],
) -> Result<(String, String), CliError> {
    if n_points == 0 {
        return Err(CliError::Usage("n_points must be >= 1".into()));
    }
    if !(alpha_lo >= 0.0) || !(alpha_hi >= alpha_lo) {
        return Err(CliError::Usage(format!(
            "invalid alpha range [{alpha_lo}, {alpha_hi}]"
        )));
    }
    let r_list = if r_list.is_empty() { vec![cfg.encoding.r] } else { r_list.to_vec() };
    let alphas: Vec<f64> = (0..n_points)
        .map(|i| {
            if n_points == 1 {
                alpha_lo
            } else {
                alpha_lo + (alpha_hi - alpha_lo) * i as f64 / (n_points - 1) as f64
            }
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.effective_threads())
        .build()
        .map_err(|e| CliError::Compute(format!("thread pool: {e}")))?;

    let mut csv = csv_header(cfg);
    csv.push_str("alpha,r,p_p,error\n");
    let mut fits = Vec::new();
    for &r in &r_list {
        let outcome = pool.install(|| sweep(&alphas, r, cfg.encoding.beta, cfg.tolerance));
        let mut ordered: Vec<(f64, Result<SweepPoint<f64>, String>)> = Vec::new();
        for p in &outcome.points {
            ordered.push((p.alpha, Ok(*p)));
        }
        for (alpha, msg) in &outcome.failures {
            ordered.push((*alpha, Err(msg.clone())));
        }
        ordered.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (alpha, res) in &ordered {
            match res {
                Ok(p) => csv.push_str(&format!(
                    "{},{},{},\n",
                    fmt17(*alpha),
                    fmt17(r),
                    fmt17(p.p_p)
                )),
                Err(msg) => csv.push_str(&format!(
                    "{},{},,{}\n",
                    fmt17(*alpha),
                    fmt17(r),
                    msg.replace([',', '\n'], ";")
                )),
            }
        }
        // the decay is exponential away from the small-alpha shoulder
        let fit_points: Vec<SweepPoint<f64>> =
            outcome.points.iter().filter(|p| p.alpha >= 0.5).copied().collect();
        match fit_exponential(&fit_points) {
            Ok(fit) => fits.push(json!({
                "r": r,
                "amplitude": fit.amplitude,
                "rate": fit.rate,
                "r_squared": fit.r_squared,
            })),
            Err(e) => fits.push(json!({ "r": r, "error": e.to_string() })),
        }
    }
    let sidecar = json!({ "config": config_json(cfg), "fits": fits });
    Ok((csv, format!("{}\n", serde_json::to_string_pretty(&sidecar).unwrap())))
}

fn cmd_limits(cfg: &RunConfig) -> Result<String, CliError> {
    let phys = cfg.physical.as_ref().ok_or_else(|| {
        CliError::Usage("limits requires the physical.* config section".into())
    })?;
    let report = validate_regime(phys, &cfg.encoding)?;
    let doc = json!({
        "config": config_json(cfg),
        "limits": serde_json::to_value(&report).unwrap(),
    });
    Ok(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
}

fn cmd_window(cfg: &RunConfig, x_lo: f64, x_hi: f64) -> Result<String, CliError> {
    if !(x_lo < x_hi) {
        return Err(CliError::Usage(format!(
            "window requires x_lo < x_hi, got [{x_lo}, {x_hi}]"
        )));
    }
    let trunc = plan(cfg)?;
    let (acceptance, mean_bound) = window_acceptance(&cfg.encoding, x_lo, x_hi, &trunc)?;
    let doc = json!({
        "config": config_json(cfg),
        "x_lo": x_lo,
        "x_hi": x_hi,
        "acceptance_probability": acceptance,
        "mean_error_bound": mean_bound,
    });
    Ok(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let overrides: Vec<(String, String)> = [
        ("encoding.alpha", cli.encoding_alpha),
        ("encoding.beta", cli.encoding_beta),
        ("encoding.r", cli.encoding_r),
        ("encoding.phi", cli.encoding_phi),
        ("encoding.k", cli.encoding_k),
        ("encoding.tau", cli.encoding_tau),
        ("physical.mass", cli.physical_mass),
        ("physical.omega_a", cli.physical_omega_a),
        ("physical.g0", cli.physical_g0),
        ("physical.lambda_c", cli.physical_lambda_c),
        ("truncation.tolerance", cli.truncation_tolerance),
    ]
    .into_iter()
    .filter_map(|(k, v)| v.map(|v| (k.to_string(), format!("{v:.17e}"))))
    .collect();

    let cfg = config::resolve(cli.config.as_deref(), &overrides, cli.threads.as_deref())?;

    let default_format = match &cli.command {
        Command::Wavefunction { .. } | Command::Sweep { .. } => "csv",
        _ => "json",
    };
    let format = cli.format.as_deref().unwrap_or(default_format);

    match &cli.command {
        Command::Wavefunction { label, axis } => {
            let content = cmd_wavefunction(&cfg, label, axis, format)?;
            write_output(cli.out.as_ref(), &content)
        }
        Command::ErrorReport => {
            if format != "json" {
                return Err(CliError::Usage("error-report only supports --format json".into()));
            }
            write_output(cli.out.as_ref(), &cmd_error_report(&cfg)?)
        }
        Command::Sweep { alpha_lo, alpha_hi, n_points, r_list } => {
            if format != "csv" {
                return Err(CliError::Usage("sweep only supports --format csv".into()));
            }
            let (csv, sidecar) = cmd_sweep(&cfg, *alpha_lo, *alpha_hi, *n_points, r_list)?;
            match cli.out.as_ref() {
                Some(path) => {
                    write_output(Some(path), &csv)?;
                    let mut fit_path = path.clone();
                    fit_path.set_extension("fit.json");
                    write_output(Some(&fit_path), &sidecar)
                }
                None => {
                    // without a file target the sidecar trails as CSV comments
                    let mut combined = csv;
                    for line in sidecar.lines() {
                        combined.push_str(&format!("# {line}\n"));
                    }
                    write_output(None, &combined)
                }
            }
        }
        Command::Limits => {
            if format != "json" {
                return Err(CliError::Usage("limits only supports --format json".into()));
            }
            write_output(cli.out.as_ref(), &cmd_limits(&cfg)?)
        }
        Command::Window { x_lo, x_hi } => {
            if format != "json" {
                return Err(CliError::Usage("window only supports --format json".into()));
            }
            write_output(cli.out.as_ref(), &cmd_window(&cfg, *x_lo, *x_hi)?)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
