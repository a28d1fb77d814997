//! Seeded Monte Carlo sampling of the mutual information density.
//!
//! The generator is ChaCha20 (`rand_chacha::ChaCha20Rng`); see [`sampler`]
//! for the per-trial stream layout.

pub mod diagnostics;
pub mod feinstein;
pub mod linalg;
pub mod sampler;

use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

use crate::error::{ensure_positive, Error, Result};
use crate::second_order::{InputSpread, SystemGeometry};

pub use diagnostics::{clt_diagnostics, ks_distance_to_normal, CltMode, EmpiricalSummary};
pub use feinstein::{empirical_feinstein, empirical_feinstein_grid, FeinsteinEstimate};
pub use linalg::{hermitian_logdet_solve, CMatrix, HermitianFactor};
pub use sampler::{sample_information_density, ChannelDraw};

/// Environment variable holding the worker count (`0` or unset: one per core).
pub const THREADS_ENV: &str = "FBL_MIMO_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputLaw {
    /// i.i.d. `CN(0, 1)` entries.
    Gaussian,
    /// Uniform QPSK with unit-modulus symbols.
    Qpsk,
}

impl std::str::FromStr for InputLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(InputLaw::Gaussian),
            "qpsk" => Ok(InputLaw::Qpsk),
            other => Err(Error::domain(format!("unknown input law {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialConfig {
    pub geom: SystemGeometry,
    pub sigma2: f64,
    pub input_law: InputLaw,
    pub trials: usize,
    pub seed: u64,
}

impl TrialConfig {
    pub fn new(
        geom: SystemGeometry,
        sigma2: f64,
        input_law: InputLaw,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        ensure_positive("sigma2", sigma2)?;
        if trials == 0 {
            return Err(Error::domain("at least one trial is required"));
        }
        Ok(Self {
            geom,
            sigma2,
            input_law,
            trials,
            seed,
        })
    }
}

/// Per-trial information densities and input spreads, in trial order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    config: TrialConfig,
    values: Vec<f64>,
    spreads: Vec<InputSpread>,
}

impl SampleSet {
    /// Wraps externally produced samples, e.g. synthetic draws in tests.
    pub fn from_parts(
        config: TrialConfig,
        values: Vec<f64>,
        spreads: Vec<InputSpread>,
    ) -> Result<Self> {
        if values.is_empty() || values.len() != spreads.len() {
            return Err(Error::domain(format!(
                "{} values and {} spreads; need matching nonempty lists",
                values.len(),
                spreads.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("sample {i} is not finite")));
        }
        Ok(Self {
            config,
            values,
            spreads,
        })
    }

    pub fn config(&self) -> &TrialConfig {
        &self.config
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spreads(&self) -> &[InputSpread] {
        &self.spreads
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// CSV with header `trial,I,a,b`, 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(80 * (self.len() + 1));
        out.push_str("trial,I,a,b\n");
        for (i, (v, s)) in self.values.iter().zip(&self.spreads).enumerate() {
            writeln!(out, "{i},{v:.16e},{:.16e},{:.16e}", s.a, s.b).expect("writing to a String");
        }
        out
    }
}

/// Worker count from [`THREADS_ENV`]; `0`, unset or unparsable mean automatic.
pub fn workers_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

/// Runs every trial with the worker count from the environment.
pub fn run_trials(config: &TrialConfig) -> Result<SampleSet> {
    run_trials_with_workers(config, workers_from_env())
}

/// Runs every trial on `workers` threads (`0` = one per core).
///
/// Output is identical for every worker count. On failure the error of the
/// lowest failing trial index is returned.
pub fn run_trials_with_workers(config: &TrialConfig, workers: usize) -> Result<SampleSet> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<(f64, InputSpread)>> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| sample_information_density(config, t))
            .collect()
    });
    let mut values = Vec::with_capacity(config.trials);
    let mut spreads = Vec::with_capacity(config.trials);
    for r in results {
        let (v, s) = r?;
        values.push(v);
        spreads.push(s);
    }
    SampleSet::from_parts(*config, values, spreads)
}
