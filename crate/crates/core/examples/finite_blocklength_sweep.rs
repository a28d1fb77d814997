//! Finite-blocklength upper bound on the error probability at R = log 2,
//! swept over SNR for two block lengths and over n/K at fixed SNR.

use std::f64::consts::LN_2;

use fbl_mimo::{sweep, SweepKind, SystemGeometry};

fn main() -> fbl_mimo::Result<()> {
    let snr_grid: Vec<f64> = (-6..=6).map(|i| i as f64 * 0.5).collect();
    for n in [36, 144] {
        let geom = SystemGeometry::new(16, 8, n)?;
        println!("n = {n}");
        for row in sweep(&SweepKind::Snr { geom, rate: LN_2 }, &snr_grid)? {
            match &row.bound {
                Ok(b) => println!(
                    "  {:>5.1} dB  bound {:.4e}  (normal approx {:.4e}, δ* = {:.4e})",
                    row.x,
                    b.total,
                    b.normal_approximation(&geom),
                    b.delta_star
                ),
                Err(e) => println!("  {:>5.1} dB  {e}", row.x),
            }
        }
    }

    let kind = SweepKind::Blocklength {
        n_rx: 16,
        n_tx: 8,
        snr_db: -0.785,
        rate: LN_2,
    };
    let grid: Vec<f64> = (1..=8).map(|i| (4 * i) as f64).collect();
    println!("\nSNR −0.785 dB, bound and outage bounds against n/K");
    for row in sweep(&kind, &grid)? {
        let bound = row.bound.as_ref().map(|b| b.total).unwrap_or(f64::NAN);
        if let Some(Ok(o)) = &row.outage {
            println!(
                "  n/K = {:>4}: bound {bound:.4e}  outage in [{:.4e}, {:.4e}], limit {:.4e}",
                row.x, o.lower, o.upper, o.limit
            );
        }
    }
    Ok(())
}
