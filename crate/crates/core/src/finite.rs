//! Finite-blocklength approximation of the Feinstein achievability bound.
//!
//! For a rate `R` and block of `nK` symbols the reported upper bound is
//!
//! ```text
//! Φ(√(nK)/θ₊ · (R − C + δ*)) + exp(−nK δ*)
//! ```
//!
//! where `δ*` is the stationary point of that expression under a Gaussian
//! density approximation. The vanishing remainder term of the underlying
//! theorem has no closed form and is not included, so the value is an
//! approximation rather than a guaranteed inequality.

use rayon::prelude::*;

use crate::error::{ensure_positive, Error, Result};
use crate::normal::normal_cdf;
use crate::second_order::{
    compute_stats, outage_bounds_from_stats, sigma2_from_snr_db, OutageBounds, SystemGeometry,
};

/// Optimising slack for the finite-`n` bound.
///
/// Fails with [`Error::OutOfRegime`] when the discriminant under the square
/// root is negative, which happens for rates far above capacity or very
/// short blocks.
pub fn delta_star(rate: f64, capacity: f64, theta_plus: f64, n: usize, k: usize) -> Result<f64> {
    ensure_positive("theta_plus", theta_plus)?;
    if n == 0 || k == 0 {
        return Err(Error::domain("n and K must be positive"));
    }
    if !(rate.is_finite() && capacity.is_finite()) {
        return Err(Error::domain("rate and capacity must be finite"));
    }
    let nk = n as f64 * k as f64;
    let gap = capacity - rate;
    let t2 = theta_plus * theta_plus;
    let scale = gap + t2;
    let log_term = t2 / nk * (2.0 * std::f64::consts::PI * nk * t2).ln();
    let ratio = (gap * gap + log_term) / (scale * scale);
    let disc = 1.0 - ratio;
    if !(disc >= 0.0) || !(scale > 0.0) {
        return Err(Error::OutOfRegime(format!(
            "δ* discriminant 1 − [(C−R)² + θ₊² log(2π nK θ₊²)/nK]/(C−R+θ₊²)² = {disc:.6e} \
             is negative (C−R = {gap:.6e}, θ₊² = {t2:.6e}, nK = {nk})"
        )));
    }
    // 1 − √(1 − q) = q / (1 + √(1 − q)) avoids cancellation for small q.
    Ok(scale * ratio / (1.0 + disc.sqrt()))
}

/// The two terms of the finite-`n` bound at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FiniteBound {
    pub rate: f64,
    pub capacity: f64,
    pub theta_plus: f64,
    pub delta_star: f64,
    pub gaussian_term: f64,
    pub exp_term: f64,
    /// Raw sum of both terms; may exceed 1.
    pub total: f64,
}

impl FiniteBound {
    /// `total` clamped to a probability, for display only.
    pub fn clamped_total(&self) -> f64 {
        self.total.min(1.0)
    }

    /// The first-order normal approximation `Φ(√(nK)(R − C)/θ₊)` at the same point.
    pub fn normal_approximation(&self, geom: &SystemGeometry) -> f64 {
        normal_cdf(geom.symbols().sqrt() * (self.rate - self.capacity) / self.theta_plus)
    }
}

pub fn finite_upper(rate: f64, geom: &SystemGeometry, sigma2: f64) -> Result<FiniteBound> {
    let stats = compute_stats(sigma2, geom.c(), geom.beta())?;
    finite_upper_from(rate, geom, stats.capacity, stats.theta_plus)
}

fn finite_upper_from(
    rate: f64,
    geom: &SystemGeometry,
    capacity: f64,
    theta_plus: f64,
) -> Result<FiniteBound> {
    let ds = delta_star(rate, capacity, theta_plus, geom.blocklength(), geom.n_tx())?;
    let nk = geom.symbols();
    let gaussian_term = normal_cdf(nk.sqrt() / theta_plus * (rate - capacity + ds));
    let exp_term = (-nk * ds).exp();
    Ok(FiniteBound {
        rate,
        capacity,
        theta_plus,
        delta_star: ds,
        gaussian_term,
        exp_term,
        total: gaussian_term + exp_term,
    })
}

/// What a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepKind {
    /// Grid values are SNRs in dB at a fixed geometry.
    Snr { geom: SystemGeometry, rate: f64 },
    /// Grid values are `n/K` at fixed antennas and SNR. Each `n/K · K` must be
    /// an integer block length.
    Blocklength {
        n_rx: usize,
        n_tx: usize,
        snr_db: f64,
        rate: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// SNR in dB or `n/K`, depending on the sweep kind.
    pub x: f64,
    pub bound: Result<FiniteBound>,
    /// Present for block-length sweeps only; `r = K(R − C)`.
    pub outage: Option<Result<OutageBounds>>,
}

impl SweepRow {
    pub fn error(&self) -> Option<String> {
        let bound_err = self.bound.as_ref().err().map(ToString::to_string);
        let outage_err = match &self.outage {
            Some(Err(e)) => Some(e.to_string()),
            _ => None,
        };
        match (bound_err, outage_err) {
            (Some(a), Some(b)) if a != b => Some(format!("{a}; {b}")),
            (Some(a), _) => Some(a),
            (None, b) => b,
        }
    }
}

/// Evaluates the finite-`n` bound on every grid point, in parallel.
///
/// Per-point failures are kept in the row; only an invalid grid fails the
/// whole sweep.
pub fn sweep(kind: &SweepKind, grid: &[f64]) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::domain("sweep grid is empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("sweep grid contains non-finite values"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("sweep grid must be strictly increasing"));
    }
    Ok(grid.par_iter().map(|&x| sweep_point(kind, x)).collect())
}

fn sweep_point(kind: &SweepKind, x: f64) -> SweepRow {
    match *kind {
        SweepKind::Snr { geom, rate } => SweepRow {
            x,
            bound: finite_upper(rate, &geom, sigma2_from_snr_db(x)),
            outage: None,
        },
        SweepKind::Blocklength {
            n_rx,
            n_tx,
            snr_db,
            rate,
        } => {
            let point = blocklength_point(n_rx, n_tx, x).and_then(|geom| {
                let stats = compute_stats(sigma2_from_snr_db(snr_db), geom.c(), geom.beta())?;
                Ok((geom, stats))
            });
            match point {
                Ok((geom, stats)) => {
                    let r = n_tx as f64 * (rate - stats.capacity);
                    SweepRow {
                        x,
                        bound: finite_upper_from(rate, &geom, stats.capacity, stats.theta_plus),
                        outage: Some(Ok(outage_bounds_from_stats(r, &stats))),
                    }
                }
                Err(e) => SweepRow {
                    x,
                    bound: Err(e.clone()),
                    outage: Some(Err(e)),
                },
            }
        }
    }
}

fn blocklength_point(n_rx: usize, n_tx: usize, n_over_k: f64) -> Result<SystemGeometry> {
    let n = n_over_k * n_tx as f64;
    let rounded = n.round();
    if !(rounded >= 1.0) || (n - rounded).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::domain(format!(
            "n/K = {n_over_k} with K = {n_tx} does not give a positive integer block length"
        )));
    }
    SystemGeometry::new(n_rx, n_tx, rounded as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_star_vanishes_for_huge_blocks() {
        let nk = 1e12;
        let n = 1_000_000;
        let k = 1_000_000;
        let ds = delta_star(0.5, 0.5, 1.0, n, k).unwrap();
        let want = 1.0 - (1.0 - (2.0 * std::f64::consts::PI * nk).ln() / nk).sqrt();
        assert!(ds > 0.0);
        assert!(((ds - want) / want).abs() < 1e-6);
        assert!(ds < 1e-10);
    }

    #[test]
    fn delta_star_decreases_when_block_doubles() {
        let (rate, cap, theta) = (0.6, 0.9, 1.3);
        let mut prev = f64::INFINITY;
        for e in 0..12 {
            let n = 4usize << e;
            let ds = delta_star(rate, cap, theta, n, 8).unwrap();
            assert!(ds < prev, "n={n}");
            prev = ds;
        }
    }

    #[test]
    fn delta_star_stationary_point() {
        // δ* zeroes the derivative of Φ(√M/θ (R−C+δ)) + e^{−Mδ} once the Gaussian
        // density is written out explicitly.
        let (rate, cap, theta, n, k) = (0.6, 0.8, 1.1, 40, 4);
        let m = (n * k) as f64;
        let ds = delta_star(rate, cap, theta, n, k).unwrap();
        let z = m.sqrt() / theta * (rate - cap + ds);
        let density = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let deriv = density * m.sqrt() / theta - m * (-m * ds).exp();
        assert!(deriv.abs() < 1e-9 * m, "derivative {deriv}");
    }

    #[test]
    fn out_of_regime_is_reported() {
        let err = delta_star(5.0, 0.5, 0.3, 2, 1).unwrap_err();
        assert!(matches!(err, Error::OutOfRegime(_)), "{err}");
        assert!(err.to_string().contains("discriminant"));
    }

    #[test]
    fn total_is_sum_of_terms() {
        let geom = SystemGeometry::new(16, 8, 36).unwrap();
        let fb = finite_upper(2f64.ln(), &geom, 1.0).unwrap();
        assert_eq!(fb.total, fb.gaussian_term + fb.exp_term);
        assert!(fb.delta_star >= 0.0);
        assert!(fb.clamped_total() <= 1.0);
    }

    #[test]
    fn sweep_cardinality_and_degenerate_grid() {
        let geom = SystemGeometry::new(16, 8, 36).unwrap();
        let kind = SweepKind::Snr {
            geom,
            rate: 2f64.ln(),
        };
        let rows = sweep(&kind, &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(rows.len(), 3);
        let single = sweep(&kind, &[0.0]).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(
            single[0].bound.as_ref().unwrap(),
            &finite_upper(2f64.ln(), &geom, 1.0).unwrap()
        );
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let geom = SystemGeometry::new(2, 2, 2).unwrap();
        let kind = SweepKind::Snr { geom, rate: 0.1 };
        assert!(sweep(&kind, &[]).is_err());
        assert!(sweep(&kind, &[1.0, 1.0]).is_err());
        assert!(sweep(&kind, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn blocklength_grid_must_give_integer_n() {
        let kind = SweepKind::Blocklength {
            n_rx: 16,
            n_tx: 8,
            snr_db: 0.0,
            rate: 2f64.ln(),
        };
        let rows = sweep(&kind, &[1.0, 1.0625, 1.25]).unwrap();
        assert!(rows[0].error().is_none());
        assert!(rows[1].error().unwrap().contains("integer"));
        assert!(rows[2].outage.as_ref().unwrap().is_ok());
    }

    #[test]
    fn far_above_capacity_rows_are_flagged() {
        let geom = SystemGeometry::new(1, 1, 1).unwrap();
        let kind = SweepKind::Snr { geom, rate: 50.0 };
        let rows = sweep(&kind, &[-20.0, 0.0]).unwrap();
        assert!(rows.iter().all(|r| r.error().is_some()));
    }
}
