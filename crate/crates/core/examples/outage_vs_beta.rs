//! Second-order outage probability bounds as the block-length ratio β grows,
//! at SNR 10 dB and K-scaled rate r = −1, with the β → ∞ limit.

use fbl_mimo::{outage_bounds, sigma2_from_snr_db};

fn main() -> fbl_mimo::Result<()> {
    let sigma2 = sigma2_from_snr_db(10.0);
    for c in [0.5, 1.0, 2.0] {
        println!("c = {c}");
        println!(
            "{:>10} {:>12} {:>12} {:>12}",
            "β", "lower", "upper", "limit"
        );
        for k in (0..=20).step_by(4) {
            let beta = 10f64.powf(k as f64 / 10.0);
            let o = outage_bounds(-1.0, sigma2, c, beta)?;
            println!(
                "{beta:>10.4} {:>12.7} {:>12.7} {:>12.7}",
                o.lower, o.upper, o.limit
            );
        }
        println!();
    }
    Ok(())
}
