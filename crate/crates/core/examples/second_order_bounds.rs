//! Capacity, dispersion terms and the Gaussian error-probability bounds at one
//! operating point, plus the high- and low-SNR limits.

use fbl_mimo::second_order::{asymptotic_limits, Limit};
use fbl_mimo::{compute_stats, pe_bounds, sigma2_from_snr_db, SystemGeometry};

fn main() -> fbl_mimo::Result<()> {
    // 16 receive, 8 transmit antennas, blocks of 144 symbols, SNR 10 dB.
    let geom = SystemGeometry::new(16, 8, 144)?;
    let sigma2 = sigma2_from_snr_db(10.0);
    let s = compute_stats(sigma2, geom.c(), geom.beta())?;

    println!("c = {}, β = {}, σ² = {sigma2}", geom.c(), geom.beta());
    println!("C   = {:.6} nats/channel use/antenna", s.capacity);
    println!("θ₋  = {:.6}", s.theta_minus);
    println!("θ₊  = {:.6}", s.theta_plus);
    println!(
        "ζ₀ = {:.6}, ζ₁ = ({:.6}, {:.6}), ζ₂ = {:.6}",
        s.zeta0, s.zeta1_lin, s.zeta1_quad, s.zeta2
    );

    println!("\n{:>6} {:>12} {:>12}", "r", "lower", "upper");
    for r in [-6.0, -4.0, -2.0, -1.0, 0.0, 1.0] {
        let b = pe_bounds(r, &s);
        println!("{r:>6} {:>12.4e} {:>12.4e}", b.lower, b.upper);
    }

    for c in [0.5, 1.0, 2.0] {
        let lim = asymptotic_limits(c, geom.beta())?;
        let show = |l: Limit| l.finite().map_or("∞".to_string(), |v| format!("{v:.4}"));
        println!(
            "\nc = {c}: high SNR θ₋² → {}, θ₊² → {}; low SNR σ²C → {}",
            show(lim.high_snr_theta_minus_sq),
            show(lim.high_snr_theta_plus_sq),
            lim.low_snr.capacity
        );
    }
    Ok(())
}
