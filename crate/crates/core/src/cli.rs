//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed identity check, 2 usage error, 3 numerical
//! failure, 4 simulation failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::finite::{finite_upper, sweep, SweepKind, SweepRow};
use crate::mc::{
    clt_diagnostics, empirical_feinstein, run_trials_with_workers, workers_from_env, CltMode,
    InputLaw, TrialConfig,
};
use crate::second_order::{
    compute_stats, outage_bounds, pe_bounds, sigma2_from_snr_db, SystemGeometry,
};
use crate::validate::{run_identity_suite, SuiteOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_SIMULATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "fbl-mimo",
    version,
    about = "Second-order and finite-blocklength bounds for MIMO Rayleigh block fading",
    allow_negative_numbers = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Capacity, dispersion terms and error-probability bounds at one point.
    Bounds(BoundsArgs),
    /// Bound curves over an SNR or block-length grid, written as CSV.
    Sweep(SweepArgs),
    /// Monte Carlo campaign of the information density.
    Simulate(SimulateArgs),
    /// Runs the identity self-check suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Args, Serialize)]
struct BoundsArgs {
    #[arg(long, allow_negative_numbers = true)]
    snr_db: f64,
    /// Antenna ratio N/K.
    #[arg(long, allow_negative_numbers = true)]
    c: f64,
    /// Block-length ratio n/K.
    #[arg(long, allow_negative_numbers = true)]
    beta: f64,
    /// Second-order rate √(nK)(R − C).
    #[arg(long, allow_negative_numbers = true)]
    r: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Snr,
    Blocklength,
}

#[derive(Debug, Args, Serialize)]
struct SweepArgs {
    /// Figure preset.
    #[arg(long, value_parser = clap::value_parser!(u8).range(3..=5), conflicts_with = "kind")]
    figure: Option<u8>,
    /// Custom sweep: vary SNR (dB) or n/K.
    #[arg(long, requires = "grid")]
    kind: Option<Kind>,
    /// Grid values, either `v1,v2,...` or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, default_value_t = 16)]
    nn: usize,
    #[arg(long, default_value_t = 8)]
    k: usize,
    /// Block length, for SNR sweeps.
    #[arg(long)]
    n: Option<usize>,
    /// SNR in dB, for block-length sweeps.
    #[arg(long, allow_negative_numbers = true)]
    snr_db: Option<f64>,
    /// Rate in nats per channel use per transmit antenna (default log 2).
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum InputArg {
    Gaussian,
    Qpsk,
}

#[derive(Debug, Args, Serialize)]
struct SimulateArgs {
    /// Receive antennas N.
    #[arg(long)]
    nn: usize,
    /// Transmit antennas K.
    #[arg(long)]
    k: usize,
    /// Block length n.
    #[arg(long)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    snr_db: f64,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "gaussian")]
    input: InputArg,
    /// Rate for the Feinstein and finite-n bounds (default log 2).
    #[arg(long)]
    rate: Option<f64>,
    /// Worker threads; overrides FBL_MIMO_THREADS. 0 = one per core.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
    #[arg(long, hide = true, allow_negative_numbers = true)]
    inject_delta0_fault: Option<f64>,
}

/// Runs the CLI on the process arguments and returns the exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    let outcome = match &cli.command {
        Command::Bounds(a) => cmd_bounds(a),
        Command::Sweep(a) => cmd_sweep(a, started),
        Command::Simulate(a) => cmd_simulate(a, started),
        Command::Validate(a) => cmd_validate(a),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn numeric(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_NUMERIC,
        message: e.to_string(),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: format!("cannot write {}: {e}", path.display()),
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Provenance written next to every output file; data files themselves stay
/// free of timing information so that reruns are byte-identical.
#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    parameters: Value,
    seed: Option<u64>,
    version: &'static str,
    duration_seconds: f64,
    outputs: Vec<String>,
}

fn write_manifest(
    out: &Path,
    command: &str,
    parameters: Value,
    seed: Option<u64>,
    started: Instant,
    outputs: &[&Path],
) -> Result<(), Failure> {
    let manifest = RunManifest {
        command,
        parameters,
        seed,
        version: env!("CARGO_PKG_VERSION"),
        duration_seconds: started.elapsed().as_secs_f64(),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
    };
    let path = sidecar(out, ".manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    fs::write(&path, text + "\n").map_err(|e| io_failure(&path, e))
}

fn cmd_bounds(a: &BoundsArgs) -> Result<i32, Failure> {
    if !a.snr_db.is_finite() || !a.r.is_finite() {
        return Err(usage("--snr-db and --r must be finite"));
    }
    if !(a.c > 0.0 && a.c.is_finite()) || !(a.beta > 0.0 && a.beta.is_finite()) {
        return Err(usage("--c and --beta must be positive"));
    }
    let keys = [
        "capacity",
        "theta_minus",
        "theta_plus",
        "zeta0",
        "zeta1_lin",
        "zeta1_quad",
        "zeta2",
        "pe_lower",
        "pe_upper",
    ];
    let (record, code) = match compute_stats(sigma2_from_snr_db(a.snr_db), a.c, a.beta) {
        Ok(s) => {
            let pe = pe_bounds(a.r, &s);
            let values = [
                s.capacity,
                s.theta_minus,
                s.theta_plus,
                s.zeta0,
                s.zeta1_lin,
                s.zeta1_quad,
                s.zeta2,
                pe.lower,
                pe.upper,
            ];
            let mut m = serde_json::Map::new();
            for (k, v) in keys.iter().zip(values) {
                m.insert((*k).into(), json!(v));
            }
            m.insert("error".into(), Value::Null);
            (Value::Object(m), EXIT_OK)
        }
        Err(e) => {
            let mut m = serde_json::Map::new();
            for k in keys {
                m.insert(k.into(), Value::Null);
            }
            m.insert("error".into(), json!(e.to_string()));
            (Value::Object(m), EXIT_NUMERIC)
        }
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&record).expect("record serialises")
    );
    Ok(code)
}

/// `v1,v2,...` or `start:stop:step` (inclusive of `stop` up to rounding).
fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let bad = || usage(format!("cannot parse grid {spec:?}"));
    if spec.contains(':') {
        let parts: Vec<f64> = spec
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| start + step * i as f64).collect())
    } else {
        spec.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect()
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, Failure> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn write_record(
    w: &mut csv::Writer<fs::File>,
    fields: &[String],
    path: &Path,
) -> Result<(), Failure> {
    w.write_record(fields)
        .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn opt_num(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

fn cmd_sweep(a: &SweepArgs, started: Instant) -> Result<i32, Failure> {
    let rate = a.rate.unwrap_or(std::f64::consts::LN_2);
    let (table, failed_all) = match (a.figure, a.kind) {
        (Some(3), _) => figure3(),
        (Some(4), _) => snr_table(&[36, 144], a.nn, a.k, rate, &preset_grid(-60, 60, 10.0))?,
        (Some(5), _) => blocklength_table(a.nn, a.k, -0.785, rate, &preset_grid(4, 128, 4.0))?,
        (Some(f), _) => return Err(usage(format!("no preset for figure {f}"))),
        (None, Some(kind)) => {
            let grid = parse_grid(a.grid.as_deref().unwrap_or_default())?;
            match kind {
                Kind::Snr => {
                    let n = a.n.ok_or_else(|| usage("--kind snr needs --n"))?;
                    snr_table(&[n], a.nn, a.k, rate, &grid)?
                }
                Kind::Blocklength => {
                    let snr = a
                        .snr_db
                        .ok_or_else(|| usage("--kind blocklength needs --snr-db"))?;
                    blocklength_table(a.nn, a.k, snr, rate, &grid)?
                }
            }
        }
        (None, None) => return Err(usage("either --figure or --kind with --grid is required")),
    };

    let mut w = csv_writer(&a.out)?;
    for row in &table {
        write_record(&mut w, row, &a.out)?;
    }
    w.flush().map_err(|e| io_failure(&a.out, e))?;
    drop(w);
    let params = serde_json::to_value(a).expect("arguments serialise");
    write_manifest(&a.out, "sweep", params, None, started, &[&a.out])?;
    if failed_all {
        return Err(numeric("every row of the sweep failed"));
    }
    Ok(EXIT_OK)
}

/// `lo/scale, (lo+1)/scale, ..., hi/scale` without accumulated rounding.
fn preset_grid(lo: i32, hi: i32, scale: f64) -> Vec<f64> {
    (lo..=hi).map(|i| i as f64 / scale).collect()
}

type Table = (Vec<Vec<String>>, bool);

fn figure3() -> Table {
    let sigma2 = sigma2_from_snr_db(10.0);
    let mut rows = vec![["c", "beta", "upper", "lower", "limit", "error"]
        .map(String::from)
        .to_vec()];
    let mut failures = 0;
    let mut total = 0;
    for c in [0.5, 1.0, 2.0] {
        for k in 0..=20 {
            let beta = 10f64.powf(k as f64 / 10.0);
            total += 1;
            let row = match outage_bounds(-1.0, sigma2, c, beta) {
                Ok(o) => vec![
                    fmt_num(c),
                    fmt_num(beta),
                    fmt_num(o.upper),
                    fmt_num(o.lower),
                    fmt_num(o.limit),
                    String::new(),
                ],
                Err(e) => {
                    failures += 1;
                    vec![
                        fmt_num(c),
                        fmt_num(beta),
                        String::new(),
                        String::new(),
                        String::new(),
                        e.to_string(),
                    ]
                }
            };
            rows.push(row);
        }
    }
    (rows, failures == total)
}

fn sweep_or_usage(kind: &SweepKind, grid: &[f64]) -> Result<Vec<SweepRow>, Failure> {
    sweep(kind, grid).map_err(|e| match e {
        Error::Domain(m) => usage(m),
        other => numeric(other),
    })
}

fn snr_table(ns: &[usize], nn: usize, k: usize, rate: f64, grid: &[f64]) -> Result<Table, Failure> {
    let mut rows = vec![["n", "snr_db", "bound", "error"].map(String::from).to_vec()];
    let mut failures = 0;
    let mut total = 0;
    for &n in ns {
        let geom = SystemGeometry::new(nn, k, n).map_err(|e| usage(e.to_string()))?;
        for row in sweep_or_usage(&SweepKind::Snr { geom, rate }, grid)? {
            total += 1;
            let err = row.error();
            failures += usize::from(err.is_some());
            rows.push(vec![
                n.to_string(),
                fmt_num(row.x),
                opt_num(row.bound.as_ref().ok().map(|b| b.total)),
                err.unwrap_or_default(),
            ]);
        }
    }
    Ok((rows, failures == total))
}

fn blocklength_table(
    nn: usize,
    k: usize,
    snr_db: f64,
    rate: f64,
    grid: &[f64],
) -> Result<Table, Failure> {
    if nn == 0 || k == 0 {
        return Err(usage("--nn and --k must be positive"));
    }
    let kind = SweepKind::Blocklength {
        n_rx: nn,
        n_tx: k,
        snr_db,
        rate,
    };
    let mut rows = vec![[
        "n_over_K",
        "finite_bound",
        "out_upper",
        "out_lower",
        "out_limit",
        "error",
    ]
    .map(String::from)
    .to_vec()];
    let data = sweep_or_usage(&kind, grid)?;
    let total = data.len();
    let mut failures = 0;
    for row in data {
        let err = row.error();
        failures += usize::from(err.is_some());
        let out = row.outage.as_ref().and_then(|o| o.as_ref().ok());
        rows.push(vec![
            fmt_num(row.x),
            opt_num(row.bound.as_ref().ok().map(|b| b.total)),
            opt_num(out.map(|o| o.upper)),
            opt_num(out.map(|o| o.lower)),
            opt_num(out.map(|o| o.limit)),
            err.unwrap_or_default(),
        ]);
    }
    Ok((rows, failures == total))
}

fn cmd_simulate(a: &SimulateArgs, started: Instant) -> Result<i32, Failure> {
    let geom = SystemGeometry::new(a.nn, a.k, a.n).map_err(|e| usage(e.to_string()))?;
    if !a.snr_db.is_finite() {
        return Err(usage("--snr-db must be finite"));
    }
    let rate = a.rate.unwrap_or(std::f64::consts::LN_2);
    let sigma2 = sigma2_from_snr_db(a.snr_db);
    let law = match a.input {
        InputArg::Gaussian => InputLaw::Gaussian,
        InputArg::Qpsk => InputLaw::Qpsk,
    };
    let config =
        TrialConfig::new(geom, sigma2, law, a.trials, a.seed).map_err(|e| usage(e.to_string()))?;
    let stats = compute_stats(sigma2, geom.c(), geom.beta()).map_err(numeric)?;

    let workers = a.threads.unwrap_or_else(workers_from_env);
    let samples = run_trials_with_workers(&config, workers).map_err(|e| Failure {
        code: EXIT_SIMULATION,
        message: format!("simulation failed: {e}"),
    })?;
    fs::write(&a.out, samples.to_csv()).map_err(|e| io_failure(&a.out, e))?;

    let mode = match law {
        InputLaw::Gaussian => CltMode::GaussianInput,
        InputLaw::Qpsk => CltMode::ConstrainedInput,
    };
    let diag = clt_diagnostics(&samples, &stats, mode);
    let feinstein = empirical_feinstein(&samples, rate);
    let bound = finite_upper(rate, &geom, sigma2);

    let n = samples.len() as f64;
    let mean_i = samples.values().iter().sum::<f64>() / n;
    let std_i = if samples.len() > 1 {
        (samples
            .values()
            .iter()
            .map(|v| (v - mean_i).powi(2))
            .sum::<f64>()
            / (n - 1.0))
            .sqrt()
    } else {
        0.0
    };
    let diag_ok = diag.as_ref().ok();
    let summary = json!({
        "mean": diag_ok.map(|d| d.mean),
        "std": diag_ok.map(|d| d.std),
        "ks": diag_ok.map(|d| d.standardized_ks),
        "theoretical_C": stats.capacity,
        "theoretical_theta": diag_ok.map(|d| d.reference_scale),
        "reference_center": diag_ok.map(|d| d.reference_center),
        "empirical_feinstein": feinstein.value,
        "empirical_feinstein_delta": feinstein.delta,
        "theorem2_bound": bound.as_ref().ok().map(|b| b.total),
        "mean_I": mean_i,
        "std_I": std_i,
        "theta_plus": stats.theta_plus,
        "theta_minus": stats.theta_minus,
        "rate": rate,
        "input": a.input,
        "trials": a.trials,
        "seed": a.seed,
        "diagnostics_error": diag.as_ref().err().map(ToString::to_string),
        "theorem2_error": bound.as_ref().err().map(ToString::to_string),
    });
    let summary_path = sidecar(&a.out, ".summary.json");
    let text = serde_json::to_string_pretty(&summary).expect("summary serialises");
    fs::write(&summary_path, text + "\n").map_err(|e| io_failure(&summary_path, e))?;

    let mut params = serde_json::to_value(a).expect("arguments serialise");
    if let Some(obj) = params.as_object_mut() {
        obj.insert("threads".into(), json!(workers));
    }
    write_manifest(
        &a.out,
        "simulate",
        params,
        Some(a.seed),
        started,
        &[&a.out, &summary_path],
    )?;

    if let Err(e) = diag {
        return Err(Failure {
            code: EXIT_SIMULATION,
            message: format!("diagnostics failed: {e}"),
        });
    }
    Ok(EXIT_OK)
}

fn cmd_validate(a: &ValidateArgs) -> Result<i32, Failure> {
    let opts = SuiteOptions {
        delta0_fault: a.inject_delta0_fault.unwrap_or(0.0),
    };
    let report = run_identity_suite(opts);
    if a.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serialises")
        );
    } else {
        print!("{}", report.render());
    }
    Ok(if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    })
}
