//! Empirical Feinstein bound from simulated information densities against the
//! closed-form finite-blocklength bound, for short blocks (n = 36).

use std::f64::consts::LN_2;

use fbl_mimo::mc::{empirical_feinstein, run_trials, InputLaw, TrialConfig};
use fbl_mimo::{finite_upper, sigma2_from_snr_db, SystemGeometry};

fn main() -> fbl_mimo::Result<()> {
    let geom = SystemGeometry::new(16, 8, 36)?;
    println!(
        "{:>7} {:>12} {:>12} {:>10}",
        "SNR dB", "empirical", "bound", "δ"
    );
    for snr_db in [-2.5, -2.0, -1.5, -1.0] {
        let sigma2 = sigma2_from_snr_db(snr_db);
        let config = TrialConfig::new(geom, sigma2, InputLaw::Gaussian, 4_000, 5)?;
        let samples = run_trials(&config)?;
        let emp = empirical_feinstein(&samples, LN_2);
        let bound = finite_upper(LN_2, &geom, sigma2)?;
        println!(
            "{snr_db:>7} {:>12.5} {:>12.5} {:>10.5}",
            emp.value, bound.total, emp.delta
        );
    }
    Ok(())
}
