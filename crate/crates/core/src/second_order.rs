//! Closed-form second-order statistics of the MIMO Rayleigh block-fading channel.
//!
//! Rates are in nats per channel use per transmit antenna, `R = log(M)/(nK)`.
//! A second-order rate `r` is the `√(nK)`-scaled gap `√(nK)(R − C)`; the
//! outage variant uses the `K`-scaling `K(R − C)` instead. SNR is `1/σ²`,
//! `SNR_dB = −10 log₁₀ σ²`.

use crate::error::{ensure_positive, Error, Result};
use crate::mp::{delta0_prime_from, delta0_raw, delta_gamma_tables};
use crate::normal::normal_cdf;
use crate::quadrature::{tail_quadrature, QuadratureSpec};

pub fn sigma2_from_snr_db(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

pub fn snr_db_from_sigma2(sigma2: f64) -> f64 {
    -10.0 * sigma2.log10()
}

/// Antenna and block-length counts. `c = N/K` and `β = n/K` are always derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct SystemGeometry {
    n_rx: usize,
    n_tx: usize,
    blocklength: usize,
}

impl SystemGeometry {
    pub fn new(n_rx: usize, n_tx: usize, blocklength: usize) -> Result<Self> {
        if n_rx == 0 || n_tx == 0 || blocklength == 0 {
            return Err(Error::domain(format!(
                "antenna and block-length counts must be positive (N={n_rx}, K={n_tx}, n={blocklength})"
            )));
        }
        Ok(Self {
            n_rx,
            n_tx,
            blocklength,
        })
    }

    /// Receive antennas `N`.
    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    /// Transmit antennas `K`.
    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    /// Block length `n`.
    pub fn blocklength(&self) -> usize {
        self.blocklength
    }

    pub fn c(&self) -> f64 {
        self.n_rx as f64 / self.n_tx as f64
    }

    pub fn beta(&self) -> f64 {
        self.blocklength as f64 / self.n_tx as f64
    }

    /// `nK`, the number of complex input symbols per block.
    pub fn symbols(&self) -> f64 {
        self.blocklength as f64 * self.n_tx as f64
    }
}

/// Closed-form bundle at `(σ², c, β)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SecondOrderStats {
    pub sigma2: f64,
    pub c: f64,
    pub beta: f64,
    pub capacity: f64,
    pub theta_minus: f64,
    pub theta_plus: f64,
    pub zeta0: f64,
    pub zeta1_lin: f64,
    pub zeta1_quad: f64,
    pub zeta2: f64,
}

impl SecondOrderStats {
    /// `ζ₁(a) = ζ₁¹ a + ζ₁² a²`.
    pub fn zeta1(&self, a: f64) -> f64 {
        self.zeta1_lin * a + self.zeta1_quad * a * a
    }

    /// `−log(1 − δ₀²/(c(1+δ₀)²))`, the β-independent part of `θ±²/β`.
    pub fn outage_log_term(&self) -> f64 {
        let d = delta0_raw(self.sigma2, self.c);
        outage_log_term(d, self.c)
    }

    pub fn theta_minus_out(&self) -> f64 {
        self.theta_minus / self.beta.sqrt()
    }

    pub fn theta_plus_out(&self) -> f64 {
        self.theta_plus / self.beta.sqrt()
    }
}

fn outage_log_term(d: f64, c: f64) -> f64 {
    let ratio = d / (1.0 + d);
    -(-ratio * ratio / c).ln_1p()
}

/// Asymptotic per-antenna ergodic capacity `C(σ², c)` in nats.
pub fn capacity(sigma2: f64, c: f64) -> Result<f64> {
    ensure_positive("sigma2", sigma2)?;
    ensure_positive("c", c)?;
    let d = delta0_raw(sigma2, c);
    Ok(capacity_from(sigma2, c, d))
}

fn capacity_from(sigma2: f64, c: f64, d: f64) -> f64 {
    d.ln_1p() + c * (1.0 / (sigma2 * (1.0 + d))).ln_1p() - d / (1.0 + d)
}

/// `θ₋²` and `θ₊²` without the ζ coefficients.
fn theta_squares(sigma2: f64, c: f64, beta: f64, d: f64) -> (f64, f64) {
    let log_term = outage_log_term(d, c);
    let dp = delta0_prime_from(sigma2, c, d);
    let minus = beta * log_term + (c + sigma2 * sigma2 * dp);
    let plus = beta * log_term + 2.0 * (c - sigma2 * d);
    (minus, plus)
}

/// Computes `C`, `θ±` and the ζ coefficients at `(σ², c, β)`.
pub fn compute_stats(sigma2: f64, c: f64, beta: f64) -> Result<SecondOrderStats> {
    compute_stats_with(sigma2, c, beta, &QuadratureSpec::default())
}

pub fn compute_stats_with(
    sigma2: f64,
    c: f64,
    beta: f64,
    spec: &QuadratureSpec,
) -> Result<SecondOrderStats> {
    ensure_positive("sigma2", sigma2)?;
    ensure_positive("c", c)?;
    ensure_positive("beta", beta)?;

    let table = delta_gamma_tables(sigma2, sigma2, c, 1)?;
    let d0 = table.delta[0];
    let d1 = table.delta[1];

    let cap = capacity_from(sigma2, c, d0);
    let (tm2, tp2) = theta_squares(sigma2, c, beta, d0);
    if !(tm2 > 0.0) {
        return Err(Error::InternalConsistency(format!(
            "θ₋² = {tm2:e} is not positive at σ²={sigma2:e}, c={c}, β={beta}"
        )));
    }
    if !(tp2 > tm2) {
        return Err(Error::InternalConsistency(format!(
            "θ₊² = {tp2:e} does not exceed θ₋² = {tm2:e} at σ²={sigma2:e}, c={c}"
        )));
    }

    let zeta0 = table.gamma[1];
    let one_d = 1.0 + d0;
    let d_cubed = d0 * one_d.powi(3);
    let zeta1_lin = -beta * (sigma2 * d1 * d1 + 2.0 * sigma2 / beta * d0 * one_d * d1) / d_cubed
        - beta * sigma2 * zeta1_tail_integral(sigma2, c, zeta0, spec)?;
    let zeta1_quad = beta
        * (d0 * d0 * d1 * d1
            - (d0 + sigma2 * d1)
                * (-sigma2 * d1.powi(3) + (1.0 + 2.0 * d0) * d1 * d1 - d0 * d0 * d1))
        / (d_cubed * d_cubed);
    let zeta2 = beta * d1 / one_d.powi(4);

    let stats = SecondOrderStats {
        sigma2,
        c,
        beta,
        capacity: cap,
        theta_minus: tm2.sqrt(),
        theta_plus: tp2.sqrt(),
        zeta0,
        zeta1_lin,
        zeta1_quad,
        zeta2,
    };
    if !(stats.capacity > 0.0 && stats.zeta0 > 0.0 && stats.zeta2 > 0.0) {
        return Err(Error::InternalConsistency(format!(
            "positivity of C, ζ₀, ζ₂ violated: {stats:?}"
        )));
    }
    Ok(stats)
}

/// `∫_{σ²}^∞ γ₂(u) / (1 − c + u(1 + 2δ₀(u))) du`, with `γ₂` anchored at `σ²`.
fn zeta1_tail_integral(sigma2: f64, c: f64, zeta0: f64, spec: &QuadratureSpec) -> Result<f64> {
    let d0s = delta0_raw(sigma2, c);
    let base = 1.0 / (1.0 + d0s) + sigma2;
    tail_quadrature(|u| zeta1_tail_integrand(u, c, base, zeta0), sigma2, spec)
}

// Expanding one recursion step and using 1/(1+δ₀) = 1 − c + xδ₀ at both u and
// σ² turns γ₂(u) = δ₁(u) − σ²δ₂(u) into a ratio of positive terms:
//
//   γ₂(u) = δ₀(u)(1 + γ₁(σ²)) / ((1 + δ₀(u)) D²),   D = 1/(1+δ₀(σ²)) + σ² + uδ₀(u),
//
// and likewise 1 − c + u(1+2δ₀(u)) = 1/(1+δ₀(u)) + u(1+δ₀(u)). The direct form
// cancels terms of size (c−1)/σ² when c > 1 and σ² is small.
fn zeta1_tail_integrand(u: f64, c: f64, base: f64, zeta0: f64) -> f64 {
    let d0u = delta0_raw(u, c);
    let denom = base + u * d0u;
    let gamma2 = d0u * (1.0 + zeta0) / ((1.0 + d0u) * denom * denom);
    gamma2 / (1.0 / (1.0 + d0u) + u * (1.0 + d0u))
}

/// Gaussian lower/upper bounds on the optimal average error probability at
/// second-order rate `r`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ErrorBounds {
    pub r: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn pe_bounds(r: f64, stats: &SecondOrderStats) -> ErrorBounds {
    let upper = normal_cdf(r / stats.theta_plus);
    let lower = if r <= 0.0 {
        normal_cdf(r / stats.theta_minus)
    } else {
        0.5
    };
    ErrorBounds { r, lower, upper }
}

/// Bounds on the second-order outage probability at `K`-scaled rate `r`, with
/// the `β → ∞` limiting outage `Φ(r/θ^out)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OutageBounds {
    pub r: f64,
    pub lower: f64,
    pub upper: f64,
    pub limit: f64,
}

pub fn outage_bounds(r: f64, sigma2: f64, c: f64, beta: f64) -> Result<OutageBounds> {
    ensure_positive("sigma2", sigma2)?;
    ensure_positive("c", c)?;
    ensure_positive("beta", beta)?;
    if r.is_nan() {
        return Err(Error::domain("r must not be NaN"));
    }
    let d = delta0_raw(sigma2, c);
    let (tm2, tp2) = theta_squares(sigma2, c, beta, d);
    Ok(outage_from_thetas(
        r,
        (tm2 / beta).sqrt(),
        (tp2 / beta).sqrt(),
        outage_log_term(d, c).sqrt(),
    ))
}

/// Outage bounds from an already computed stats bundle.
pub fn outage_bounds_from_stats(r: f64, stats: &SecondOrderStats) -> OutageBounds {
    outage_from_thetas(
        r,
        stats.theta_minus_out(),
        stats.theta_plus_out(),
        stats.outage_log_term().sqrt(),
    )
}

fn outage_from_thetas(r: f64, minus_out: f64, plus_out: f64, theta_out: f64) -> OutageBounds {
    OutageBounds {
        r,
        lower: normal_cdf(r / minus_out).min(0.5),
        upper: normal_cdf(r / plus_out),
        limit: normal_cdf(r / theta_out),
    }
}

/// Normalised traces of `A = I_K − XXᴴ/n`: `a = tr A / K`, `b = tr A² / K`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct InputSpread {
    pub a: f64,
    pub b: f64,
}

impl InputSpread {
    /// `a ≤ 1` always holds since `XXᴴ` is positive semidefinite, and `b ≥ a²`
    /// by Cauchy–Schwarz. Energy-constrained inputs additionally have `a ≥ 0`,
    /// but unconstrained Gaussian draws can overshoot unit energy, so negative
    /// `a` is accepted here.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::domain("input spread must be finite"));
        }
        if a > 1.0 {
            return Err(Error::domain(format!("tr A / K = {a} exceeds 1")));
        }
        if b < a * a * (1.0 - 1e-12) - 1e-15 {
            return Err(Error::domain(format!(
                "tr A² / K = {b} is below (tr A / K)² = {}",
                a * a
            )));
        }
        Ok(Self { a, b })
    }

    pub fn is_energy_constrained(&self) -> bool {
        (0.0..=1.0).contains(&self.a)
    }
}

/// Per-instance standard deviation for energy-constrained inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaN {
    Positive(f64),
    /// `θ₋² + ζ₁(a) + ζ₂ b ≤ 0`; no standard deviation exists for this input.
    NonPositiveVariance {
        radicand: f64,
    },
}

impl ThetaN {
    pub fn value(&self) -> Option<f64> {
        match *self {
            ThetaN::Positive(v) => Some(v),
            ThetaN::NonPositiveVariance { .. } => None,
        }
    }
}

pub fn theta_n_radicand(stats: &SecondOrderStats, spread: &InputSpread) -> f64 {
    stats.theta_minus * stats.theta_minus + stats.zeta1(spread.a) + stats.zeta2 * spread.b
}

/// `θ_n = √(θ₋² + ζ₁(a) + ζ₂ b)`, flagged when the radicand is not positive.
pub fn theta_n_constrained(stats: &SecondOrderStats, spread: &InputSpread) -> ThetaN {
    let radicand = theta_n_radicand(stats, spread);
    if radicand > 0.0 {
        ThetaN::Positive(radicand.sqrt())
    } else {
        ThetaN::NonPositiveVariance { radicand }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Limit {
    Finite(f64),
    Infinite,
}

impl Limit {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            Limit::Finite(v) => Some(v),
            Limit::Infinite => None,
        }
    }
}

/// Leading coefficients of `σ²C`, `σ²θ₊²`, `σ²θ₋²` as `σ² → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LowSnrCoefficients {
    pub capacity: f64,
    pub theta_plus_sq: f64,
    pub theta_minus_sq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AsymptoticLimits {
    pub c: f64,
    pub beta: f64,
    /// `lim_{σ²→0} θ₋²`.
    pub high_snr_theta_minus_sq: Limit,
    /// `lim_{σ²→0} θ₊²`.
    pub high_snr_theta_plus_sq: Limit,
    pub low_snr: LowSnrCoefficients,
}

pub fn asymptotic_limits(c: f64, beta: f64) -> Result<AsymptoticLimits> {
    ensure_positive("c", c)?;
    ensure_positive("beta", beta)?;
    let (minus, plus) = if c < 1.0 {
        let l = -beta * (-c).ln_1p();
        (Limit::Finite(l + c), Limit::Finite(l + 2.0 * c))
    } else if c > 1.0 {
        let l = -beta * (-1.0 / c).ln_1p();
        (Limit::Finite(l + 1.0), Limit::Finite(l + 2.0))
    } else {
        (Limit::Infinite, Limit::Infinite)
    };
    Ok(AsymptoticLimits {
        c,
        beta,
        high_snr_theta_minus_sq: minus,
        high_snr_theta_plus_sq: plus,
        low_snr: LowSnrCoefficients {
            capacity: c,
            theta_plus_sq: 2.0 * c,
            theta_minus_sq: 2.0 * c,
        },
    })
}
