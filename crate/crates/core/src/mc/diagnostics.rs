//! Standardisation of information-density samples and normality checks.

use super::SampleSet;
use crate::error::{Error, Result};
use crate::normal::normal_cdf;
use crate::second_order::{theta_n_constrained, SecondOrderStats, ThetaN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CltMode {
    /// `z = √(nK)(I − C)/θ₊`.
    GaussianInput,
    /// `z = √(nK)(I − C + ζ₀ a)/θ_n(a, b)` per trial.
    ConstrainedInput,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EmpiricalSummary {
    /// Mean of the standardised samples.
    pub mean: f64,
    /// Sample standard deviation of the standardised samples.
    pub std: f64,
    /// Kolmogorov–Smirnov distance of the standardised samples to `Φ`.
    pub standardized_ks: f64,
    /// `C` in Gaussian mode; `C − ζ₀·mean(a)` in constrained mode.
    pub reference_center: f64,
    /// `θ₊` in Gaussian mode; the mean of the per-trial `θ_n` in constrained mode.
    pub reference_scale: f64,
}

/// `sup_z |F_emp(z) − Φ(z)|`.
pub fn ks_distance_to_normal(samples: &[f64]) -> f64 {
    let mut z = samples.to_vec();
    z.sort_by(f64::total_cmp);
    let n = z.len() as f64;
    z.iter()
        .enumerate()
        .map(|(i, &v)| {
            let p = normal_cdf(v);
            ((i + 1) as f64 / n - p).max(p - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

fn mean_std(z: &[f64]) -> (f64, f64) {
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    if z.len() < 2 {
        return (mean, 0.0);
    }
    let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn clt_diagnostics(
    samples: &SampleSet,
    stats: &SecondOrderStats,
    mode: CltMode,
) -> Result<EmpiricalSummary> {
    let root = samples.config().geom.symbols().sqrt();
    let (z, center, scale) = match mode {
        CltMode::GaussianInput => {
            let z: Vec<f64> = samples
                .values()
                .iter()
                .map(|i| root * (i - stats.capacity) / stats.theta_plus)
                .collect();
            (z, stats.capacity, stats.theta_plus)
        }
        CltMode::ConstrainedInput => {
            let mut bad = Vec::new();
            let mut z = Vec::with_capacity(samples.len());
            let mut theta_sum = 0.0;
            let mut a_sum = 0.0;
            for (t, (i, spread)) in samples.values().iter().zip(samples.spreads()).enumerate() {
                match theta_n_constrained(stats, spread) {
                    ThetaN::Positive(theta) => {
                        z.push(root * (i - stats.capacity + stats.zeta0 * spread.a) / theta);
                        theta_sum += theta;
                        a_sum += spread.a;
                    }
                    ThetaN::NonPositiveVariance { .. } => bad.push(t),
                }
            }
            if !bad.is_empty() {
                return Err(Error::NonPositiveVariance(bad));
            }
            let n = samples.len() as f64;
            (z, stats.capacity - stats.zeta0 * a_sum / n, theta_sum / n)
        }
    };
    let (mean, std) = mean_std(&z);
    Ok(EmpiricalSummary {
        mean,
        std,
        standardized_ks: ks_distance_to_normal(&z),
        reference_center: center,
        reference_scale: scale,
    })
}
