//! Samples the mutual information density for Gaussian and QPSK inputs and
//! compares the standardised samples with the standard normal law.
//!
//! Run with `--release`; set FBL_MIMO_THREADS to pin the worker count.

use fbl_mimo::mc::{clt_diagnostics, run_trials, CltMode, InputLaw, TrialConfig};
use fbl_mimo::{compute_stats, sigma2_from_snr_db, SystemGeometry};

fn main() -> fbl_mimo::Result<()> {
    let geom = SystemGeometry::new(16, 8, 144)?;
    let sigma2 = sigma2_from_snr_db(10.0);
    let stats = compute_stats(sigma2, geom.c(), geom.beta())?;
    println!(
        "C = {:.6}, θ₊ = {:.6}, θ₋ = {:.6}",
        stats.capacity, stats.theta_plus, stats.theta_minus
    );

    for (law, mode) in [
        (InputLaw::Gaussian, CltMode::GaussianInput),
        (InputLaw::Qpsk, CltMode::ConstrainedInput),
    ] {
        let config = TrialConfig::new(geom, sigma2, law, 5_000, 42)?;
        let samples = run_trials(&config)?;
        let d = clt_diagnostics(&samples, &stats, mode)?;
        let mean_i = samples.values().iter().sum::<f64>() / samples.len() as f64;
        println!(
            "{law:?}: mean I = {mean_i:.6}, standardised mean {:+.4}, std {:.4}, KS {:.4} (scale {:.4})",
            d.mean, d.std, d.standardized_ks, d.reference_scale
        );
    }
    Ok(())
}
