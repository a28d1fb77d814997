//! The Marčenko–Pastur fixed point δ₀(x), its derivative, the δ_t/γ_t tables,
//! and a numerical check of the Stieltjes-transform identity.

use fbl_mimo::mp::{
    delta0, delta0_prime, delta_gamma_tables, mp_measure_integral, mp_support, MpPoint,
};
use fbl_mimo::QuadratureSpec;

fn main() -> fbl_mimo::Result<()> {
    let spec = QuadratureSpec::default();
    println!(
        "{:>6} {:>10} {:>14} {:>14} {:>14}",
        "c", "x", "δ₀(x)", "δ₀'(x)", "c∫dμ/(t+x)"
    );
    for c in [0.5, 1.0, 2.0] {
        for x in [0.01, 0.1, 1.0, 10.0] {
            let p = MpPoint::new(x, c)?;
            let stieltjes = c * mp_measure_integral(|t| 1.0 / (t + x), c, &spec)?;
            println!(
                "{c:>6} {x:>10} {:>14.10} {:>14.10} {:>14.10}",
                delta0(p),
                delta0_prime(p),
                stieltjes
            );
        }
    }

    let (a, b) = mp_support(2.0);
    println!("\nsupport of μ_2: [{a:.6}, {b:.6}] plus an atom of mass 1/2 at 0");

    let t = delta_gamma_tables(0.1, 0.1, 2.0, 3)?;
    println!("\nδ_t(0.1), σ² = 0.1, c = 2: {:?}", t.delta);
    println!("γ_t(0.1):                   {:?}", t.gamma);
    Ok(())
}
