//! Information density of a single hand-built draw, and the log-determinant
//! solver used underneath.

use fbl_mimo::mc::{hermitian_logdet_solve, CMatrix, ChannelDraw};
use num_complex::Complex64;

fn main() -> fbl_mimo::Result<()> {
    let one = |v: f64| CMatrix::from_element(1, 1, Complex64::new(v, 0.0));
    let draw = ChannelDraw::new(one(1.0), one(1.0), one(0.0))?;
    println!(
        "scalar draw h = x = 1, w = 0, σ² = 1: I = {:.12} (log 2 + 1/2)",
        draw.information_density(1.0)?
    );

    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(2.0, 0.0),
            Complex64::new(0.5, -0.5),
            Complex64::new(0.5, 0.5),
            Complex64::new(3.0, 0.0),
        ],
    );
    let (log_det, z) = hermitian_logdet_solve(&m, &CMatrix::identity(2, 2))?;
    println!("log det M = {log_det:.12} (log 5.5 = {:.12})", 5.5f64.ln());
    println!("M⁻¹ = {z:.6}");
    Ok(())
}
